//! LU and SLU decisions.
//!
//! [`decide_lu`] screens spectra and local invariants, then hands the
//! matched eigenprojector tuples to [`decide_slu`], which tries an exact
//! path for diagonal families before a numerical search. Every
//! `Equivalent` verdict carries an LU re-verified by direct conjugation.

mod commutant;
mod invariants;
mod search;
mod twirl;
mod verdict;

use crate::config::{Options, TOLERANCES};
use crate::error::{Error, Result};
use crate::linalg::{unitary_mapping, BipartiteOperator, LocalUnitary};
use crate::product_opt::contains_product_vector;
use crate::spectral::{compare_decompositions, schmidt_decompose, spectral_decompose, SpectralDecomposition};

pub use commutant::{
    commutant_blocks, diagonal_slu_decide, permutation_matrix, refine_partition, BlockPartition, DiagonalDecision,
};
pub use invariants::{
    compare_projector_invariants, invariants_of_decomposition, lu_invariants, projector_invariants, LuInvariants,
    ProjectorInvariants,
};
pub use search::{search_slu, slu_residual, SearchOutcome};
pub use twirl::{
    diagonal_signs, intersection, is_group_invariant, local_pauli, slu_triple_check, twirl_finite, FiniteLuGroup,
};
pub use verdict::{Certificate, EquivalenceVerdict, Side};

use commutant::{exact_diagonal_decide, ExactOutcome};

/// Second Schmidt coefficient above which a rank-one eigenspace is taken
/// as provably entangled.
const ENTANGLED_SCHMIDT: f64 = 1e-6;

/// Decides whether `h = (U⊗V) k (U⊗V)†` for some local unitary.
///
/// The returned LU maps `k` onto `h`.
pub fn decide_lu(h: &BipartiteOperator, k: &BipartiteOperator, opts: &Options) -> Result<EquivalenceVerdict> {
    h.same_dims(k)?;
    let dh = spectral_decompose(h, opts.group_tol);
    let dk = spectral_decompose(k, opts.group_tol);
    if let Some(m) = compare_decompositions(&dh, &dk, opts.spectrum_tol).mismatch {
        return Ok(EquivalenceVerdict::Inequivalent {
            certificate: Certificate::SpectrumMismatch {
                index: m.index,
                kind: m.kind,
                left: m.left,
                right: m.right,
            },
        });
    }
    let ih = invariants_of_decomposition(&dh);
    let ik = invariants_of_decomposition(&dk);
    if let Some(certificate) = compare_projector_invariants(&ih.projectors, &ik.projectors, opts.invariant_tol) {
        return Ok(EquivalenceVerdict::Inequivalent { certificate });
    }
    if let Some(certificate) = class_screen(&dh, &dk, opts)? {
        return Ok(EquivalenceVerdict::Inequivalent { certificate });
    }
    if let Some((lu, residual)) = rank_one_candidate(&dh, &dk, opts) {
        return Ok(EquivalenceVerdict::Equivalent { lu, residual });
    }
    decide_slu(&dh.projectors, &dk.projectors, opts)
}

/// Non-kernel rank-one eigenspaces spanned by an entangled vector. Such an
/// eigenspace contains no product vector, so the operator is in `D_λ`.
fn proven_entangled_eigenspace(d: &SpectralDecomposition) -> Option<usize> {
    (0..d.len()).find(|&j| {
        d.eigenvalues[j] != 0.0
            && d.bases[j].len() == 1
            && schmidt_decompose(&d.bases[j][0], d.dim_a, d.dim_b)
                .map(|s| s.coefficients.get(1).is_some_and(|&c| c > ENTANGLED_SCHMIDT))
                .unwrap_or(false)
    })
}

/// Every non-kernel eigenspace contains a product vector, by dimension
/// count or by an exhibited vector.
fn all_eigenspaces_have_products(d: &SpectralDecomposition, opts: &Options) -> Result<bool> {
    let generic = (d.dim_a - 1) * (d.dim_b - 1);
    for j in 0..d.len() {
        if d.eigenvalues[j] == 0.0 || d.bases[j].len() > generic {
            continue;
        }
        if !contains_product_vector(&d.projectors[j], &opts.seesaw, opts.product_tol)?.is_found() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One side proven in `D_λ`, the other with a product vector in every
/// eigenspace. Runs only when exactly one side has a proof, which the
/// Schmidt screen already rules out for matched spectra; kept as the
/// class-level argument in its own right.
fn class_screen(dh: &SpectralDecomposition, dk: &SpectralDecomposition, opts: &Options) -> Result<Option<Certificate>> {
    let (ph, pk) = (proven_entangled_eigenspace(dh), proven_entangled_eigenspace(dk));
    let (side, eigenspace, other) = match (ph, pk) {
        (Some(j), None) => (Side::Left, j, dk),
        (None, Some(j)) => (Side::Right, j, dh),
        _ => return Ok(None),
    };
    Ok(all_eigenspaces_have_products(other, opts)?.then_some(Certificate::ClassMismatch { side, eigenspace }))
}

/// Aligns the Schmidt bases of a matched rank-one pair and checks the
/// resulting LU on every eigenprojector.
fn rank_one_candidate(
    dh: &SpectralDecomposition,
    dk: &SpectralDecomposition,
    opts: &Options,
) -> Option<(LocalUnitary, f64)> {
    let (m, n) = (dh.dim_a, dh.dim_b);
    for j in 0..dh.len() {
        if dh.bases[j].len() != 1 || dk.bases[j].len() != 1 {
            continue;
        }
        let (Ok(sp), Ok(sq)) = (
            schmidt_decompose(&dh.bases[j][0], m, n),
            schmidt_decompose(&dk.bases[j][0], m, n),
        ) else {
            continue;
        };
        if sp.rank() != sq.rank() {
            continue;
        }
        let (Ok(u), Ok(v)) = (
            unitary_mapping(&sq.basis_a, &sp.basis_a, m),
            unitary_mapping(&sq.basis_b, &sp.basis_b, n),
        ) else {
            continue;
        };
        let lu = LocalUnitary::new_unchecked(u, v);
        let residual = slu_residual(&dh.projectors, &dk.projectors, &lu);
        if residual <= opts.accept_tol {
            return Some((lu, residual));
        }
    }
    None
}

fn check_tuple(side: &'static str, tuple: &[BipartiteOperator]) -> Result<()> {
    for p in tuple {
        p.require_projector()?;
    }
    for i in 0..tuple.len() {
        for j in (i + 1)..tuple.len() {
            let overlap = tuple[i].matrix().matmul(tuple[j].matrix()).frobenius_norm();
            if overlap > TOLERANCES.orthogonality {
                return Err(Error::NonOrthogonalTuple {
                    side,
                    first: i,
                    second: j,
                    overlap,
                });
            }
        }
    }
    Ok(())
}

/// Decides whether one `U⊗V` carries every `qs[j]` onto `ps[j]`.
pub fn decide_slu(ps: &[BipartiteOperator], qs: &[BipartiteOperator], opts: &Options) -> Result<EquivalenceVerdict> {
    if ps.len() != qs.len() {
        return Err(Error::InvalidArgument(format!(
            "tuples have different lengths ({} vs {})",
            ps.len(),
            qs.len()
        )));
    }
    let Some(first) = ps.first() else {
        return Err(Error::InvalidArgument("empty tuples".into()));
    };
    for x in ps.iter().chain(qs) {
        first.same_dims(x)?;
    }
    check_tuple("p", ps)?;
    check_tuple("q", qs)?;

    let ip: Vec<ProjectorInvariants> = ps.iter().map(|p| projector_invariants(p, None)).collect();
    let iq: Vec<ProjectorInvariants> = qs.iter().map(|q| projector_invariants(q, None)).collect();
    if let Some(certificate) = compare_projector_invariants(&ip, &iq, opts.invariant_tol) {
        return Ok(EquivalenceVerdict::Inequivalent { certificate });
    }

    match exact_diagonal_decide(ps, qs) {
        Some(ExactOutcome::Inequivalent(certificate)) => return Ok(EquivalenceVerdict::Inequivalent { certificate }),
        Some(ExactOutcome::Equivalent(lu)) => {
            let residual = slu_residual(ps, qs, &lu);
            if residual <= opts.accept_tol {
                return Ok(EquivalenceVerdict::Equivalent { lu, residual });
            }
        }
        None => {}
    }

    let out = search_slu(ps, qs, &opts.search, opts.seed, opts.accept_tol);
    Ok(if out.accepted {
        EquivalenceVerdict::Equivalent {
            lu: out.lu,
            residual: out.residual,
        }
    } else {
        EquivalenceVerdict::Undecided {
            best_residual: out.residual,
            best_lu: out.lu,
        }
    })
}

/// `(U⊗V) q_j (U⊗V)†` for every `j`, after checking that the witness
/// already carries `qs[i]` onto `ps[i]` for each `i` in `fixed`.
pub fn gauge_fix(
    ps: &[BipartiteOperator],
    qs: &[BipartiteOperator],
    witness: &LocalUnitary,
    fixed: &[usize],
) -> Result<Vec<BipartiteOperator>> {
    let moved: Vec<BipartiteOperator> = qs.iter().map(|q| q.conjugate(witness)).collect::<Result<_>>()?;
    for &i in fixed {
        let (Some(p), Some(q)) = (ps.get(i), moved.get(i)) else {
            return Err(Error::InvalidArgument(format!("fixed index {i} out of range")));
        };
        let d = q.distance(p);
        if d > TOLERANCES.projector {
            return Err(Error::InvalidArgument(format!(
                "witness does not map member {i} across (distance {d:.3e})"
            )));
        }
    }
    Ok(moved)
}
