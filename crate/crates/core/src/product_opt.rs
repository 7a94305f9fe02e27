//! Optimization of `⟨a,b|H|a,b⟩` over product vectors.
//!
//! The seesaw fixes one local vector and replaces the other by an extremal
//! eigenvector of the conditioned local operator. Restarts are independent
//! and run in parallel; the reduction takes the best value and breaks ties
//! by the lowest restart index, so results do not depend on thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::TOLERANCES;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, inner, kron_vec, norm, normalized, orthogonalize_against, BipartiteOperator,
    ComplexMatrix,
};
use crate::random::{random_unit_vector, sub_rng};

/// Attempts run in parallel batches of this size during deflated searches.
const DEFLATION_BATCH: usize = 8;

/// A new product vector must carry at least this much weight outside the
/// span already found. Product vectors can sit in a flat valley where
/// overlap `1 - tol` allows a drift of order `tol^(1/4)`, so this has to be
/// well above `sqrt(tol)`.
const NEW_DIRECTION_WEIGHT: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Stop a run when one full alternation changes the value by less than this.
    pub iter_tol: f64,
    /// Maximum number of alternations per run.
    pub max_iterations: usize,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            seed: 42,
            iter_tol: 1e-12,
            max_iterations: 500,
        }
    }
}

/// `a ⊗ b` with unit local factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductVector {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl ProductVector {
    /// Normalizes both factors.
    pub fn new(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        Ok(Self {
            a: normalized(a).ok_or(Error::ZeroVector)?,
            b: normalized(b).ok_or(Error::ZeroVector)?,
        })
    }

    pub fn vector(&self) -> Vec<Complex64> {
        kron_vec(&self.a, &self.b)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductOptimum {
    pub value: f64,
    pub vector: ProductVector,
    pub restarts_used: usize,
    /// `max - min` of the per-restart values.
    pub spread: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// Values after every half-step of one seesaw run.
#[derive(Clone, Debug)]
pub struct SeesawTrace {
    pub values: Vec<f64>,
    pub vector: ProductVector,
}

impl SeesawTrace {
    pub fn value(&self) -> f64 {
        *self.values.last().expect("at least one half-step")
    }
}

/// `⟨a,b|H|a,b⟩`.
pub fn product_expectation(h: &BipartiteOperator, pv: &ProductVector) -> f64 {
    h.expectation(&pv.vector())
}

/// `H_b[i,k] = Σ_{j,l} conj(b_j) H[(i,j),(k,l)] b_l`.
fn conditioned_on_b(h: &ComplexMatrix, m: usize, n: usize, b: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m, |i, k| {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let bj = b[j].conj();
            if bj == Complex64::new(0.0, 0.0) {
                continue;
            }
            for l in 0..n {
                s += bj * h[(i * n + j, k * n + l)] * b[l];
            }
        }
        s
    })
    .hermitian_part()
}

/// `H_a[j,l] = Σ_{i,k} conj(a_i) H[(i,j),(k,l)] a_k`.
fn conditioned_on_a(h: &ComplexMatrix, m: usize, n: usize, a: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |j, l| {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..m {
            let ai = a[i].conj();
            if ai == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..m {
                s += ai * h[(i * n + j, k * n + l)] * a[k];
            }
        }
        s
    })
    .hermitian_part()
}

fn extremal_eigvec(h: &ComplexMatrix, dir: Direction) -> (f64, Vec<Complex64>) {
    let eig = hermitian_eig(h).expect("conditioned operator is Hermitian");
    let k = match dir {
        Direction::Maximize => eig.values.len() - 1,
        Direction::Minimize => 0,
    };
    (eig.values[k], eig.vector(k))
}

/// Extremal eigenvector of the conditioned operator, except that the
/// current vector is kept when it already attains the extremum. Without
/// this, degenerate operators make the iteration wander.
fn local_update(h: &ComplexMatrix, current: &[Complex64], dir: Direction, slack: f64) -> (f64, Vec<Complex64>) {
    let (best, v) = extremal_eigvec(h, dir);
    let now = inner(current, &h.apply(current)).re;
    if (best - now).abs() <= 1e-3 * slack {
        (now, current.to_vec())
    } else {
        (best, v)
    }
}

/// One seesaw run from `start`.
pub fn run_seesaw(
    h: &BipartiteOperator,
    start: &ProductVector,
    dir: Direction,
    iter_tol: f64,
    max_iterations: usize,
) -> SeesawTrace {
    let (m, n) = h.dims();
    let mat = h.matrix();
    let mut a = start.a.clone();
    let mut b = start.b.clone();
    let mut values = Vec::with_capacity(2 * max_iterations.min(64));
    let slack = 1e-10 * (1.0 + mat.max_abs());
    let mut previous = h.expectation(&kron_vec(&a, &b));

    for _ in 0..max_iterations.max(1) {
        let (va, new_a) = local_update(&conditioned_on_b(mat, m, n, &b), &a, dir, slack);
        a = new_a;
        let (vb, new_b) = local_update(&conditioned_on_a(mat, m, n, &a), &b, dir, slack);
        b = new_b;
        for v in [va, vb] {
            let last = values.last().copied().unwrap_or(previous);
            match dir {
                Direction::Maximize => debug_assert!(v >= last - slack, "ascent broke: {last} -> {v}"),
                Direction::Minimize => debug_assert!(v <= last + slack, "descent broke: {last} -> {v}"),
            }
            values.push(v);
        }
        if (vb - previous).abs() < iter_tol {
            break;
        }
        previous = vb;
    }
    SeesawTrace {
        values,
        vector: ProductVector { a, b },
    }
}

fn random_start(seed: u64, stream: u64, m: usize, n: usize) -> ProductVector {
    let mut rng = sub_rng(seed, stream);
    let a = random_unit_vector(&mut rng, m);
    let b = random_unit_vector(&mut rng, n);
    ProductVector { a, b }
}

fn better(dir: Direction, candidate: f64, incumbent: f64) -> bool {
    match dir {
        Direction::Maximize => candidate > incumbent,
        Direction::Minimize => candidate < incumbent,
    }
}

/// Multi-start seesaw without a positivity check.
pub fn optimize_product(h: &BipartiteOperator, dir: Direction, opts: &SeesawOptions) -> ProductOptimum {
    let (m, n) = h.dims();
    let restarts = opts.restarts.max(1);
    let runs: Vec<SeesawTrace> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = random_start(opts.seed, r as u64, m, n);
            run_seesaw(h, &start, dir, opts.iter_tol, opts.max_iterations)
        })
        .collect();

    let mut best = 0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (r, run) in runs.iter().enumerate() {
        let v = run.value();
        lo = lo.min(v);
        hi = hi.max(v);
        if better(dir, v, runs[best].value()) {
            best = r;
        }
    }
    let vector = runs[best].vector.clone();
    ProductOptimum {
        // Recomputed from the vector so the reported value matches it exactly.
        value: product_expectation(h, &vector),
        vector,
        restarts_used: restarts,
        spread: hi - lo,
    }
}

fn require_psd(h: &BipartiteOperator) -> Result<()> {
    h.require_psd().map(|_| ())
}

/// Largest `⟨a,b|H|a,b⟩` found; a lower bound on the true maximum.
pub fn max_product_overlap(h: &BipartiteOperator, opts: &SeesawOptions) -> Result<ProductOptimum> {
    require_psd(h)?;
    Ok(optimize_product(h, Direction::Maximize, opts))
}

/// Smallest `⟨a,b|H|a,b⟩` found; an upper bound on the true minimum.
pub fn min_product_overlap(h: &BipartiteOperator, opts: &SeesawOptions) -> Result<ProductOptimum> {
    require_psd(h)?;
    Ok(optimize_product(h, Direction::Minimize, opts))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProductSearch {
    Found { vector: ProductVector, value: f64 },
    NoneFoundNumerically { best_value: f64 },
}

impl ProductSearch {
    pub fn is_found(&self) -> bool {
        matches!(self, ProductSearch::Found { .. })
    }
}

/// Looks for a unit product vector in the range of a projector.
pub fn contains_product_vector(p: &BipartiteOperator, opts: &SeesawOptions, tol: f64) -> Result<ProductSearch> {
    p.require_projector()?;
    let best = optimize_product(p, Direction::Maximize, opts);
    Ok(if best.value >= 1.0 - tol {
        ProductSearch::Found {
            vector: best.vector,
            value: best.value,
        }
    } else {
        ProductSearch::NoneFoundNumerically {
            best_value: best.value,
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SpanSearch {
    Spanned { vectors: Vec<ProductVector> },
    NotSpannedNumerically { found_rank: usize, needed_rank: usize },
}

impl SpanSearch {
    pub fn is_spanned(&self) -> bool {
        matches!(self, SpanSearch::Spanned { .. })
    }
}

/// Product vectors found in `range(p)` with linearly independent
/// contributions, plus an orthonormal basis of their span.
struct DeflatedSearch {
    vectors: Vec<ProductVector>,
    span: Vec<Vec<Complex64>>,
    rank: usize,
}

/// One deflated attempt: ascend on `(I-Π)p(I-Π)` to leave the span found so
/// far, polish on `p`, and as a fallback ascend on `p` directly from the
/// same start.
fn deflated_attempt(
    p: &BipartiteOperator,
    deflated: &BipartiteOperator,
    span: &[Vec<Complex64>],
    start: &ProductVector,
    opts: &SeesawOptions,
    tol: f64,
) -> Option<ProductVector> {
    let accept = |pv: &ProductVector| {
        let x = pv.vector();
        if p.expectation(&x) < 1.0 - tol {
            return false;
        }
        let inside: f64 = span.iter().map(|s| inner(s, &x).norm_sqr()).sum();
        1.0 - inside > NEW_DIRECTION_WEIGHT
    };
    let escape = run_seesaw(deflated, start, Direction::Maximize, opts.iter_tol, opts.max_iterations);
    if accept(&escape.vector) {
        return Some(escape.vector);
    }
    let polished = run_seesaw(p, &escape.vector, Direction::Maximize, opts.iter_tol, opts.max_iterations);
    if accept(&polished.vector) {
        return Some(polished.vector);
    }
    let direct = run_seesaw(p, start, Direction::Maximize, opts.iter_tol, opts.max_iterations);
    accept(&direct.vector).then_some(direct.vector)
}

fn deflated_search(p: &BipartiteOperator, opts: &SeesawOptions, tol: f64) -> Result<DeflatedSearch> {
    p.require_projector()?;
    let (m, n) = p.dims();
    let d = p.dim();
    let rank = p.range_basis(0.5).len();
    let max_failures = 3 * opts.restarts.max(1);

    let mut vectors = Vec::new();
    let mut span: Vec<Vec<Complex64>> = Vec::new();
    let mut failures = 0;
    let mut stream: u64 = 0;

    while vectors.len() < rank && failures < max_failures {
        let pi = ComplexMatrix::projector_onto(&span, d);
        let complement = &ComplexMatrix::identity(d) - &pi;
        let deflated = BipartiteOperator::from_hermitian(
            m,
            n,
            complement.matmul(p.matrix()).matmul(&complement),
        );
        let batch: Vec<Option<ProductVector>> = (0..DEFLATION_BATCH as u64)
            .into_par_iter()
            .map(|k| {
                let start = random_start(opts.seed, stream + k, m, n);
                deflated_attempt(p, &deflated, &span, &start, opts, tol)
            })
            .collect();
        stream += DEFLATION_BATCH as u64;

        match batch.into_iter().enumerate().find_map(|(i, r)| r.map(|pv| (i, pv))) {
            Some((i, pv)) => {
                failures += i;
                let projected = p.matrix().apply(&pv.vector());
                if let Some(w) = orthogonalize_against(&projected, &span, NEW_DIRECTION_WEIGHT.sqrt() / 2.0) {
                    span.push(w);
                    vectors.push(pv);
                    failures = 0;
                } else {
                    failures += 1;
                }
            }
            None => failures += DEFLATION_BATCH,
        }
    }
    Ok(DeflatedSearch { vectors, span, rank })
}

/// Whether `range(p)` is spanned by product vectors found by deflated search.
pub fn spanned_by_product_vectors(p: &BipartiteOperator, opts: &SeesawOptions, tol: f64) -> Result<SpanSearch> {
    let found = deflated_search(p, opts, tol)?;
    Ok(if found.vectors.len() >= found.rank {
        SpanSearch::Spanned { vectors: found.vectors }
    } else {
        SpanSearch::NotSpannedNumerically {
            found_rank: found.vectors.len(),
            needed_rank: found.rank,
        }
    })
}

/// `p = p11 + p12` with `p11` the projector onto the span of the product
/// vectors found in `range(p)`.
#[derive(Clone, Debug)]
pub struct ProductSplit {
    pub product_part: BipartiteOperator,
    pub entangled_part: BipartiteOperator,
    pub vectors: Vec<ProductVector>,
}

pub fn split_product_part(p: &BipartiteOperator, opts: &SeesawOptions, tol: f64) -> Result<ProductSplit> {
    let found = deflated_search(p, opts, tol)?;
    let (m, n) = p.dims();
    let product_part = BipartiteOperator::projector(&found.span, m, n);
    let entangled_part = p.sub(&product_part)?;
    Ok(ProductSplit {
        product_part,
        entangled_part,
        vectors: found.vectors,
    })
}

/// Checks the unit-norm invariant of a product vector.
pub fn is_unit_product(pv: &ProductVector) -> bool {
    (norm(&pv.a) - 1.0).abs() <= TOLERANCES.hermiticity * 10.0
        && (norm(&pv.b) - 1.0).abs() <= TOLERANCES.hermiticity * 10.0
}
