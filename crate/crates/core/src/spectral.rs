//! Grouped spectral decompositions, spectrum comparison and Schmidt forms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron_vec, norm, BipartiteOperator, ComplexMatrix};

/// Default relative grouping tolerance for eigenvalue clusters.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;

/// Schmidt coefficients below this fraction of the largest are dropped.
const SCHMIDT_CUTOFF: f64 = 1e-10;

/// `H = Σ_j λ_j P_j` with distinct eigenvalues in descending order.
///
/// The kernel is kept as an ordinary eigenspace, so the projectors always
/// sum to the identity.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub dim_a: usize,
    pub dim_b: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub projectors: Vec<BipartiteOperator>,
    /// Orthonormal basis of each eigenspace.
    pub bases: Vec<Vec<Vec<Complex64>>>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Σ λ_j P_j`.
    pub fn reconstruct(&self) -> BipartiteOperator {
        let mut acc = BipartiteOperator::zeros(self.dim_a, self.dim_b);
        for (l, p) in self.eigenvalues.iter().zip(&self.projectors) {
            acc = acc.add(&p.scaled(*l)).expect("same dims");
        }
        acc
    }

    /// Same projectors with new eigenvalues.
    pub fn relabel(&self, values: &[f64]) -> BipartiteOperator {
        let mut acc = BipartiteOperator::zeros(self.dim_a, self.dim_b);
        for (l, p) in values.iter().zip(&self.projectors) {
            acc = acc.add(&p.scaled(*l)).expect("same dims");
        }
        acc
    }

    /// Index of the eigenspace whose eigenvalue is within `tol` of `value`.
    pub fn index_of(&self, value: f64, tol: f64) -> Option<usize> {
        self.eigenvalues.iter().position(|l| (l - value).abs() <= tol)
    }

    /// Index of the kernel, if zero is an eigenvalue.
    pub fn kernel_index(&self) -> Option<usize> {
        self.eigenvalues.iter().position(|&l| l == 0.0)
    }
}

/// Eigendecomposition grouped into distinct eigenvalues.
///
/// Adjacent eigenvalues (descending) merge when their gap is at most
/// `group_tol * (1 + spectral radius)`; a cluster's value is its mean, and a
/// cluster containing values that small is reported as exactly zero.
pub fn spectral_decompose(h: &BipartiteOperator, group_tol: f64) -> SpectralDecomposition {
    let eig = h.eigen();
    let d = h.dim();
    let radius = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let gap_tol = group_tol * (1.0 + radius);

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in (0..d).rev() {
        match clusters.last_mut() {
            Some(c) if eig.values[*c.last().expect("nonempty")] - eig.values[k] <= gap_tol => {
                c.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    let mut bases = Vec::with_capacity(clusters.len());
    for c in clusters {
        let mean = c.iter().map(|&k| eig.values[k]).sum::<f64>() / c.len() as f64;
        let value = if mean.abs() <= gap_tol { 0.0 } else { mean };
        let basis: Vec<Vec<Complex64>> = c.iter().map(|&k| eig.vector(k)).collect();
        eigenvalues.push(value);
        multiplicities.push(c.len());
        projectors.push(BipartiteOperator::projector(&basis, h.dim_a(), h.dim_b()));
        bases.push(basis);
    }
    SpectralDecomposition {
        dim_a: h.dim_a(),
        dim_b: h.dim_b(),
        eigenvalues,
        multiplicities,
        projectors,
        bases,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchKind {
    Eigenvalue,
    Multiplicity,
    /// One spectrum has more distinct eigenvalues than the other.
    Count,
}

/// First point where two grouped spectra diverge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMismatch {
    /// Position in the descending list of distinct eigenvalues.
    pub index: usize,
    pub kind: MismatchKind,
    /// `(eigenvalue, multiplicity)` on each side, absent past the end.
    pub left: Option<(f64, usize)>,
    pub right: Option<(f64, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub matches: bool,
    pub mismatch: Option<SpectrumMismatch>,
}

/// Compares distinct eigenvalues and multiplicities within `tol`.
pub fn spectra_match(h: &BipartiteOperator, k: &BipartiteOperator, tol: f64) -> Result<SpectrumReport> {
    h.same_dims(k)?;
    let dh = spectral_decompose(h, DEFAULT_GROUP_TOL);
    let dk = spectral_decompose(k, DEFAULT_GROUP_TOL);
    Ok(compare_decompositions(&dh, &dk, tol))
}

pub fn compare_decompositions(
    dh: &SpectralDecomposition,
    dk: &SpectralDecomposition,
    tol: f64,
) -> SpectrumReport {
    let n = dh.len().max(dk.len());
    for i in 0..n {
        let left = dh.eigenvalues.get(i).map(|&l| (l, dh.multiplicities[i]));
        let right = dk.eigenvalues.get(i).map(|&l| (l, dk.multiplicities[i]));
        let kind = match (left, right) {
            (Some((l, ml)), Some((r, mr))) => {
                if (l - r).abs() > tol {
                    Some(MismatchKind::Eigenvalue)
                } else if ml != mr {
                    Some(MismatchKind::Multiplicity)
                } else {
                    None
                }
            }
            _ => Some(MismatchKind::Count),
        };
        if let Some(kind) = kind {
            return SpectrumReport {
                matches: false,
                mismatch: Some(SpectrumMismatch {
                    index: i,
                    kind,
                    left,
                    right,
                }),
            };
        }
    }
    SpectrumReport {
        matches: true,
        mismatch: None,
    }
}

/// `ψ = Σ_i c_i a_i ⊗ b_i` with `c_i > 0` descending.
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    pub dim_a: usize,
    pub dim_b: usize,
    pub coefficients: Vec<f64>,
    pub basis_a: Vec<Vec<Complex64>>,
    pub basis_b: Vec<Vec<Complex64>>,
}

impl SchmidtForm {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `Σ c_i a_i ⊗ b_i`.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim_a * self.dim_b];
        for ((c, a), b) in self.coefficients.iter().zip(&self.basis_a).zip(&self.basis_b) {
            for (o, x) in out.iter_mut().zip(kron_vec(a, b)) {
                *o += x * c;
            }
        }
        out
    }

    /// Coefficients padded with zeros to `min(m, n)` entries.
    pub fn padded_coefficients(&self) -> Vec<f64> {
        let mut c = self.coefficients.clone();
        c.resize(self.dim_a.min(self.dim_b), 0.0);
        c
    }
}

/// Schmidt decomposition through the eigendecomposition of `C C†`, where
/// `C` is the `m × n` coefficient matrix of `ψ`.
pub fn schmidt_decompose(psi: &[Complex64], dim_a: usize, dim_b: usize) -> Result<SchmidtForm> {
    if psi.len() != dim_a * dim_b {
        return Err(Error::Shape {
            expected: format!("vector of length {}", dim_a * dim_b),
            actual: format!("length {}", psi.len()),
        });
    }
    if norm(psi) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let c = ComplexMatrix::from_vec(dim_a, dim_b, psi.to_vec())?;
    let eig = hermitian_eig(&c.matmul(&c.adjoint()))?;
    let ct = c.transpose();

    let mut terms: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = Vec::new();
    for k in (0..dim_a).rev() {
        let a = eig.vector(k);
        let a_conj: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
        let img = ct.apply(&a_conj);
        let s = norm(&img);
        let b = img.iter().map(|z| z / s).collect();
        terms.push((s, a, b));
    }
    terms.sort_by(|x, y| y.0.total_cmp(&x.0));
    let s_max = terms[0].0;
    terms.retain(|t| t.0 > SCHMIDT_CUTOFF * s_max && t.0 > 0.0);
    terms.truncate(dim_a.min(dim_b));

    Ok(SchmidtForm {
        dim_a,
        dim_b,
        coefficients: terms.iter().map(|t| t.0).collect(),
        basis_a: terms.iter().map(|t| t.1.clone()).collect(),
        basis_b: terms.into_iter().map(|t| t.2).collect(),
    })
}

/// Singular values of the coefficient matrix, descending, always
/// `min(m, n)` of them.
pub fn schmidt_coefficients(psi: &[Complex64], dim_a: usize, dim_b: usize) -> Result<Vec<f64>> {
    Ok(schmidt_decompose(psi, dim_a, dim_b)?.padded_coefficients())
}

/// Eigenvalues of the partial transpose of `|ψ⟩⟨ψ|` from the Schmidt
/// coefficients: `c_i²` and `±c_i c_j` for `i < j`, zero-padded to `mn`,
/// ascending.
pub fn pure_pt_spectrum(s: &SchmidtForm) -> Vec<f64> {
    let c = &s.coefficients;
    let mut out: Vec<f64> = c.iter().map(|x| x * x).collect();
    for i in 0..c.len() {
        for j in (i + 1)..c.len() {
            out.push(c[i] * c[j]);
            out.push(-c[i] * c[j]);
        }
    }
    out.resize(s.dim_a * s.dim_b, 0.0);
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::basis_vector;
    use crate::random::{random_local_unitary, random_nondegenerate_state, sub_rng};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn rho1_decomposition() {
        let d = spectral_decompose(&fixtures::rho1(), DEFAULT_GROUP_TOL);
        assert!(close(&d.eigenvalues, &[0.6, 0.2, 0.1], 1e-12), "{:?}", d.eigenvalues);
        assert_eq!(d.multiplicities, vec![1, 1, 2]);
    }

    #[test]
    fn identity_is_one_eigenspace() {
        let d = spectral_decompose(&BipartiteOperator::identity(2, 2), DEFAULT_GROUP_TOL);
        assert_eq!(d.eigenvalues, vec![1.0]);
        assert_eq!(d.multiplicities, vec![4]);
        assert!(d.projectors[0].distance(&BipartiteOperator::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn crlu_rho_decomposition() {
        let d = spectral_decompose(&fixtures::crlu_rho(), DEFAULT_GROUP_TOL);
        assert!(close(&d.eigenvalues, &[0.5, 0.25, 0.125], 1e-12));
        assert_eq!(d.multiplicities, vec![1, 1, 2]);
    }

    #[test]
    fn kernel_is_included() {
        let d = spectral_decompose(&fixtures::crlu_rho().shifted(-0.125), DEFAULT_GROUP_TOL);
        assert_eq!(d.kernel_index(), Some(2));
        let mut sum = BipartiteOperator::zeros(2, 2);
        for p in &d.projectors {
            sum = sum.add(p).unwrap();
        }
        assert!(sum.distance(&BipartiteOperator::identity(2, 2)) < 1e-10);
    }

    #[test]
    fn decomposition_invariants() {
        let mut rng = sub_rng(11, 0);
        let h = random_nondegenerate_state(&mut rng, 2, 3);
        let d = spectral_decompose(&h, DEFAULT_GROUP_TOL);
        assert!(d.reconstruct().distance(&h) < 1e-8);
        for (i, p) in d.projectors.iter().enumerate() {
            assert!(p.projector_defect() < 1e-9);
            for q in &d.projectors[i + 1..] {
                assert!(p.matrix().matmul(q.matrix()).frobenius_norm() < 1e-9);
            }
        }
        assert_eq!(d.multiplicities.iter().sum::<usize>(), 6);
    }

    #[test]
    fn crlu_spectra_match() {
        let r = spectra_match(&fixtures::crlu_rho(), &fixtures::crlu_sigma(), 1e-8).unwrap();
        assert!(r.matches);
    }

    #[test]
    fn shift_breaks_match() {
        let h = fixtures::rho1();
        let r = spectra_match(&h, &h.shifted(0.1), 1e-8).unwrap();
        assert!(!r.matches);
        let m = r.mismatch.unwrap();
        assert_eq!((m.index, m.kind), (0, MismatchKind::Eigenvalue));
    }

    #[test]
    fn spectra_match_after_local_unitary() {
        let mut rng = sub_rng(12, 0);
        let h = random_nondegenerate_state(&mut rng, 2, 2);
        let lu = random_local_unitary(&mut rng, 2, 2);
        assert!(spectra_match(&h, &h.conjugate(&lu).unwrap(), 1e-8).unwrap().matches);
    }

    #[test]
    fn spectra_match_rejects_dimension_mismatch() {
        let r = spectra_match(&BipartiteOperator::identity(2, 2), &BipartiteOperator::identity(2, 3), 1e-8);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn schmidt_examples() {
        let s = schmidt_decompose(&basis_vector(4, 0), 2, 2).unwrap();
        assert!(close(&s.coefficients, &[1.0], 1e-14));

        let phi = [c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)];
        let s = schmidt_decompose(&phi, 2, 2).unwrap();
        assert!(close(&s.coefficients, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2], 1e-14));

        let t = PI / 6.0;
        let psi = [c(t.cos()), c(0.0), c(0.0), c(t.sin())];
        let s = schmidt_decompose(&psi, 2, 2).unwrap();
        assert!(close(&s.coefficients, &[3f64.sqrt() / 2.0, 0.5], 1e-14));
    }

    #[test]
    fn schmidt_rejects_zero() {
        assert!(matches!(
            schmidt_decompose(&[c(0.0); 4], 2, 2),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn pure_pt_examples() {
        let form = |coefficients: Vec<f64>| SchmidtForm {
            dim_a: 2,
            dim_b: 2,
            basis_a: vec![],
            basis_b: vec![],
            coefficients,
        };
        assert!(close(
            &pure_pt_spectrum(&form(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2])),
            &[-0.5, 0.5, 0.5, 0.5],
            1e-15
        ));
        assert!(close(&pure_pt_spectrum(&form(vec![1.0])), &[0.0, 0.0, 0.0, 1.0], 0.0));
        assert!(close(
            &pure_pt_spectrum(&form(vec![0.9f64.sqrt(), 0.1f64.sqrt()])),
            &[-0.3, 0.1, 0.3, 0.9],
            1e-15
        ));
    }
}
