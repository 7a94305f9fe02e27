//! Necessary conditions for LU equivalence that are cheap to compare.

use serde::Serialize;

use crate::linalg::{hermitian_eig, BipartiteOperator, Subsystem};
use crate::spectral::{schmidt_coefficients, spectral_decompose, SpectralDecomposition};

use super::verdict::Certificate;

/// LU-invariant data of one projector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectorInvariants {
    pub rank: usize,
    /// Spectrum of `Tr_B P`, descending.
    pub local_a: Vec<f64>,
    /// Spectrum of `Tr_A P`, descending.
    pub local_b: Vec<f64>,
    /// Schmidt coefficients (padded) when `P` has rank one.
    pub schmidt: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LuInvariants {
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub projectors: Vec<ProjectorInvariants>,
}

fn descending_spectrum(p: &BipartiteOperator, traced: Subsystem) -> Vec<f64> {
    let mut v = hermitian_eig(&p.partial_trace(traced).hermitian_part())
        .expect("partial trace of a Hermitian operator is Hermitian")
        .values;
    v.reverse();
    v
}

/// Invariants of a projector whose range has the given orthonormal basis.
pub fn projector_invariants(p: &BipartiteOperator, basis: Option<&[Vec<num_complex::Complex64>]>) -> ProjectorInvariants {
    let (m, n) = p.dims();
    let rank = match basis {
        Some(b) => b.len(),
        None => p.range_basis(0.5).len(),
    };
    let schmidt = (rank == 1).then(|| {
        let v = match basis {
            Some(b) => b[0].clone(),
            None => p.range_basis(0.5).remove(0),
        };
        schmidt_coefficients(&v, m, n).expect("unit vector")
    });
    ProjectorInvariants {
        rank,
        local_a: descending_spectrum(p, Subsystem::B),
        local_b: descending_spectrum(p, Subsystem::A),
        schmidt,
    }
}

pub fn invariants_of_decomposition(dec: &SpectralDecomposition) -> LuInvariants {
    LuInvariants {
        eigenvalues: dec.eigenvalues.clone(),
        multiplicities: dec.multiplicities.clone(),
        projectors: dec
            .projectors
            .iter()
            .zip(&dec.bases)
            .map(|(p, b)| projector_invariants(p, Some(b)))
            .collect(),
    }
}

/// Global spectrum, reduced spectra of each eigenprojector and Schmidt
/// coefficients of rank-one eigenprojectors.
pub fn lu_invariants(h: &BipartiteOperator, group_tol: f64) -> LuInvariants {
    invariants_of_decomposition(&spectral_decompose(h, group_tol))
}

fn differs(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() != b.len() || a.iter().zip(b).any(|(x, y)| (x - y).abs() > tol)
}

/// First screen failure between matched projectors `left[j]`, `right[j]`.
///
/// Ranks are compared first, then Schmidt coefficients for rank-one pairs,
/// then reduced spectra on A and on B.
pub fn compare_projector_invariants(
    left: &[ProjectorInvariants],
    right: &[ProjectorInvariants],
    tol: f64,
) -> Option<Certificate> {
    for (j, (l, r)) in left.iter().zip(right).enumerate() {
        if l.rank != r.rank {
            return Some(Certificate::RankMismatch {
                projector: j,
                left: l.rank,
                right: r.rank,
            });
        }
        if let (Some(sl), Some(sr)) = (&l.schmidt, &r.schmidt) {
            if differs(sl, sr, tol) {
                return Some(Certificate::SchmidtMismatch {
                    projector: j,
                    left: sl.clone(),
                    right: sr.clone(),
                });
            }
        }
        for (factor, a, b) in [
            (Subsystem::A, &l.local_a, &r.local_a),
            (Subsystem::B, &l.local_b, &r.local_b),
        ] {
            if differs(a, b, tol) {
                return Some(Certificate::LocalSpectrumMismatch {
                    projector: j,
                    factor,
                    left: a.clone(),
                    right: b.clone(),
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::random::{random_local_unitary, random_nondegenerate_state, sub_rng};

    #[test]
    fn invariant_under_local_unitaries() {
        let mut rng = sub_rng(21, 0);
        for (m, n) in [(2, 2), (2, 3), (3, 3)] {
            let h = random_nondegenerate_state(&mut rng, m, n);
            let lu = random_local_unitary(&mut rng, m, n);
            let a = lu_invariants(&h, 1e-8);
            let b = lu_invariants(&h.conjugate(&lu).unwrap(), 1e-8);
            assert!(compare_projector_invariants(&a.projectors, &b.projectors, 1e-8).is_none());
            assert!(!differs(&a.eigenvalues, &b.eigenvalues, 1e-8));
        }
    }

    #[test]
    fn crlu_top_projectors_differ() {
        let a = lu_invariants(&fixtures::crlu_rho(), 1e-8);
        let b = lu_invariants(&fixtures::crlu_sigma(), 1e-8);
        assert!(!differs(&a.projectors[0].local_a, &[1.0, 0.0], 1e-12));
        assert!(!differs(&b.projectors[0].local_a, &[0.5, 0.5], 1e-12));
        match compare_projector_invariants(&a.projectors, &b.projectors, 1e-6) {
            Some(Certificate::SchmidtMismatch { projector, .. }) => assert_eq!(projector, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rho1_top_projector_is_maximally_entangled() {
        let a = lu_invariants(&fixtures::rho1(), 1e-8);
        assert!(!differs(&a.projectors[0].local_a, &[0.5, 0.5], 1e-12));
        assert!(!differs(&a.projectors[0].local_b, &[0.5, 0.5], 1e-12));
    }
}
