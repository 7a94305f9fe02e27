//! Derivative-free search for `U ⊗ V` carrying one projector tuple onto
//! another.
//!
//! Unitaries are parameterized as `U = U_0 exp(i G(x_A))`,
//! `V = V_0 exp(i G(x_B))` with full Hermitian generators (`m² + n²` real
//! parameters). Each start runs a Hooke–Jeeves pattern search: coordinate
//! exploration with a shrinking step, followed by a pattern move along the
//! last improvement.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::config::PatternSearchOptions;
use crate::linalg::{
    apply_local, hermitian_from_params, inner, unitary_from_generator, unitary_mapping, BipartiteOperator,
    ComplexMatrix, LocalUnitary,
};
use crate::random::{haar_unitary, sub_rng};
use crate::spectral::schmidt_decompose;

/// Restarts run in parallel batches of this size; the lowest accepted
/// index in a batch wins, independent of thread count.
const BATCH: usize = 8;

/// Residuals below this end a run early.
const CONVERGED: f64 = 1e-14;

/// Stream offset separating search randomness from other consumers of the
/// master seed.
const STREAM_BASE: u64 = 1 << 32;

/// `Σ_j ‖(U⊗V) q_j (U⊗V)† − p_j‖_F²`, computed from full matrices.
pub fn slu_residual(ps: &[BipartiteOperator], qs: &[BipartiteOperator], lu: &LocalUnitary) -> f64 {
    let w = lu.full();
    ps.iter()
        .zip(qs)
        .map(|(p, q)| {
            let d = q.matrix().conjugate_by(&w).distance(p.matrix());
            d * d
        })
        .sum()
}

/// Range bases of a matched projector pair.
struct Pair {
    p_basis: Vec<Vec<Complex64>>,
    q_basis: Vec<Vec<Complex64>>,
}

/// Residual via `‖W Q W† − P‖² = 2r − 2‖B_P† W B_Q‖²`.
struct Objective {
    pairs: Vec<Pair>,
}

impl Objective {
    fn new(ps: &[BipartiteOperator], qs: &[BipartiteOperator]) -> Self {
        let mut pairs: Vec<Pair> = ps
            .iter()
            .zip(qs)
            .map(|(p, q)| Pair {
                p_basis: p.range_basis(0.5),
                q_basis: q.range_basis(0.5),
            })
            .collect();
        // A complete tuple is determined by all but one member; drop the
        // largest to save work.
        let d = ps.first().map_or(0, BipartiteOperator::dim);
        let total: usize = pairs.iter().map(|p| p.p_basis.len()).sum();
        if pairs.len() > 1 && total == d {
            let largest = (0..pairs.len())
                .max_by_key(|&k| (pairs[k].p_basis.len(), std::cmp::Reverse(k)))
                .expect("nonempty");
            pairs.remove(largest);
        }
        Self { pairs }
    }

    fn eval(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
        let mut total = 0.0;
        for pair in &self.pairs {
            let r = pair.p_basis.len() as f64;
            let mut overlap = 0.0;
            for qb in &pair.q_basis {
                let img = apply_local(u, v, qb);
                for pb in &pair.p_basis {
                    overlap += inner(pb, &img).norm_sqr();
                }
            }
            total += 2.0 * r - 2.0 * overlap;
        }
        total.max(0.0)
    }
}

/// A starting frame `(U_0, V_0)`.
#[derive(Clone)]
struct Start {
    u0: ComplexMatrix,
    v0: ComplexMatrix,
}

fn unitaries_at(start: &Start, x: &[f64], m: usize, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let ga = hermitian_from_params(m, &x[..m * m]);
    let gb = hermitian_from_params(n, &x[m * m..]);
    let u = start.u0.matmul(&unitary_from_generator(&ga).expect("Hermitian generator"));
    let v = start.v0.matmul(&unitary_from_generator(&gb).expect("Hermitian generator"));
    (u, v)
}

struct RunResult {
    u: ComplexMatrix,
    v: ComplexMatrix,
}

fn pattern_search(obj: &Objective, start: &Start, m: usize, n: usize, opts: &PatternSearchOptions) -> RunResult {
    let dim = m * m + n * n;
    let evals = std::cell::Cell::new(0usize);
    let mut f = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let (u, v) = unitaries_at(start, x, m, n);
        obj.eval(&u, &v)
    };

    let mut base = vec![0.0; dim];
    let mut f_base = f(&base);
    let mut step = opts.initial_step;

    let explore = |f: &mut dyn FnMut(&[f64]) -> f64, x: &mut Vec<f64>, fx: &mut f64, step: f64| {
        for k in 0..x.len() {
            let orig = x[k];
            x[k] = orig + step;
            let up = f(x);
            if up < *fx {
                *fx = up;
                continue;
            }
            x[k] = orig - step;
            let down = f(x);
            if down < *fx {
                *fx = down;
                continue;
            }
            x[k] = orig;
        }
    };

    while step >= opts.min_step && f_base > CONVERGED {
        let mut trial = base.clone();
        let mut f_trial = f_base;
        explore(&mut f, &mut trial, &mut f_trial, step);
        if f_trial < f_base {
            // Pattern moves while they keep paying off.
            loop {
                let direction: Vec<f64> = trial.iter().zip(&base).map(|(t, b)| t - b).collect();
                base = trial.clone();
                f_base = f_trial;
                let mut jump: Vec<f64> = base.iter().zip(&direction).map(|(b, d)| b + d).collect();
                let mut f_jump = f(&jump);
                explore(&mut f, &mut jump, &mut f_jump, step);
                if f_jump < f_base {
                    trial = jump;
                    f_trial = f_jump;
                } else {
                    break;
                }
                if evals.get() >= opts.max_evaluations {
                    break;
                }
            }
        } else {
            step *= opts.shrink;
        }
        if evals.get() >= opts.max_evaluations {
            break;
        }
    }
    let (u, v) = unitaries_at(start, &base, m, n);
    RunResult { u, v }
}

/// Starts that send a nondegenerate rank-one `q_j` onto `p_j` through
/// their Schmidt bases, with random relative phases `e^{±iθ_k}`.
fn schmidt_starts(ps: &[BipartiteOperator], qs: &[BipartiteOperator], seed: u64, count: usize) -> Vec<Start> {
    let (m, n) = ps[0].dims();
    let mut frames: Vec<[Vec<Vec<Complex64>>; 4]> = Vec::new();
    for (p, q) in ps.iter().zip(qs) {
        let (pb, qb) = (p.range_basis(0.5), q.range_basis(0.5));
        if pb.len() != 1 || qb.len() != 1 {
            continue;
        }
        let (Ok(sp), Ok(sq)) = (schmidt_decompose(&pb[0], m, n), schmidt_decompose(&qb[0], m, n)) else {
            continue;
        };
        let c = &sp.coefficients;
        let nondegenerate = c.windows(2).all(|w| w[0] - w[1] > 1e-6);
        if !nondegenerate || sp.rank() != sq.rank() {
            continue;
        }
        frames.push([sq.basis_a, sp.basis_a, sq.basis_b, sp.basis_b]);
    }
    if frames.is_empty() {
        return Vec::new();
    }
    let mut starts = Vec::with_capacity(count);
    for k in 0..count {
        let [qa, pa, qb, pb] = &frames[k % frames.len()];
        let mut rng = sub_rng(seed, STREAM_BASE + k as u64);
        let thetas: Vec<f64> = (0..pa.len())
            .map(|_| if k < frames.len() { 0.0 } else { rng.random::<f64>() * std::f64::consts::TAU })
            .collect();
        let pa_ph: Vec<Vec<Complex64>> = pa
            .iter()
            .zip(&thetas)
            .map(|(v, &t)| v.iter().map(|z| z * Complex64::from_polar(1.0, t)).collect())
            .collect();
        let pb_ph: Vec<Vec<Complex64>> = pb
            .iter()
            .zip(&thetas)
            .map(|(v, &t)| v.iter().map(|z| z * Complex64::from_polar(1.0, -t)).collect())
            .collect();
        let (Ok(u0), Ok(v0)) = (unitary_mapping(qa, &pa_ph, m), unitary_mapping(qb, &pb_ph, n)) else {
            continue;
        };
        starts.push(Start { u0, v0 });
    }
    starts
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub lu: LocalUnitary,
    pub residual: f64,
    pub accepted: bool,
    pub starts_used: usize,
}

/// Multi-start search. Starts: identity, Schmidt-aligned frames, then Haar
/// random frames, `restarts` in total (at least one).
pub fn search_slu(
    ps: &[BipartiteOperator],
    qs: &[BipartiteOperator],
    opts: &PatternSearchOptions,
    seed: u64,
    accept_tol: f64,
) -> SearchOutcome {
    let (m, n) = ps[0].dims();
    let obj = Objective::new(ps, qs);
    let total = opts.restarts.max(1);

    let mut starts = vec![Start {
        u0: ComplexMatrix::identity(m),
        v0: ComplexMatrix::identity(n),
    }];
    starts.extend(schmidt_starts(ps, qs, seed, (total - 1).div_ceil(2)));
    starts.truncate(total);
    let mut k = 0u64;
    while starts.len() < total {
        let mut rng = sub_rng(seed, 2 * STREAM_BASE + k);
        starts.push(Start {
            u0: haar_unitary(&mut rng, m),
            v0: haar_unitary(&mut rng, n),
        });
        k += 1;
    }

    let mut best: Option<(f64, LocalUnitary)> = None;
    let mut used = 0;
    for batch in starts.chunks(BATCH) {
        let results: Vec<RunResult> = batch
            .par_iter()
            .map(|s| pattern_search(&obj, s, m, n, opts))
            .collect();
        for r in results {
            used += 1;
            let lu = LocalUnitary::new_unchecked(r.u, r.v);
            // Authoritative residual on every member, not the reduced objective.
            let residual = slu_residual(ps, qs, &lu);
            if residual <= accept_tol {
                return SearchOutcome {
                    lu,
                    residual,
                    accepted: true,
                    starts_used: used,
                };
            }
            if best.as_ref().is_none_or(|(b, _)| residual < *b) {
                best = Some((residual, lu));
            }
        }
    }
    let (residual, lu) = best.expect("at least one start");
    SearchOutcome {
        lu,
        residual,
        accepted: false,
        starts_used: used,
    }
}
