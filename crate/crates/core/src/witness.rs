//! Entanglement witnesses from states and back, witness verification, UPB
//! states and eigenvalue relabelling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{Options, TOLERANCES};
use crate::error::{Error, Result};
use crate::linalg::{inner, BipartiteOperator};
use crate::product_opt::{max_product_overlap, min_product_overlap, optimize_product, Direction, ProductVector};
use crate::spectral::spectral_decompose;

/// Values within this of zero count as zero when grading witnesses.
const SIGN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessStatus {
    /// Has a negative eigenvalue and is nonnegative on every product found.
    #[serde(rename = "verified_ew")]
    VerifiedEW,
    /// Some product vector has a negative expectation.
    NotBlockPositive,
    PositiveSemidefinite,
    /// Built but not yet checked.
    Unverified,
}

#[derive(Clone, Debug)]
pub struct WitnessCandidate {
    pub op: BipartiteOperator,
    pub min_eigenvalue: f64,
    /// Smallest `⟨a,b|W|a,b⟩` found by descent; an upper bound on the true
    /// minimum.
    pub min_product_value: f64,
    pub status: WitnessStatus,
    /// Product vector with negative expectation, for `NotBlockPositive`.
    pub violating: Option<ProductVector>,
}

impl WitnessCandidate {
    pub fn unverified(op: BipartiteOperator) -> Self {
        Self {
            op,
            min_eigenvalue: f64::NAN,
            min_product_value: f64::NAN,
            status: WitnessStatus::Unverified,
            violating: None,
        }
    }

    pub fn is_verified(&self) -> bool {
        self.status == WitnessStatus::VerifiedEW
    }
}

/// Grades `w` by its smallest eigenvalue and the smallest product
/// expectation found by seesaw descent.
///
/// The descent runs on `w + cI`, `c = max(0, -λ_min) + 1`, and the value is
/// reported unshifted.
pub fn verify_witness(w: &BipartiteOperator, opts: &Options) -> WitnessCandidate {
    let min_eigenvalue = w.min_eigenvalue();
    let c = (-min_eigenvalue).max(0.0) + 1.0;
    let best = optimize_product(&w.shifted(c), Direction::Minimize, &opts.seesaw);
    let min_product_value = w.expectation(&best.vector.vector());

    let (status, violating) = if min_eigenvalue >= -TOLERANCES.psd {
        (WitnessStatus::PositiveSemidefinite, None)
    } else if min_product_value < -SIGN_TOL {
        (WitnessStatus::NotBlockPositive, Some(best.vector))
    } else {
        (WitnessStatus::VerifiedEW, None)
    };
    WitnessCandidate {
        op: w.clone(),
        min_eigenvalue,
        min_product_value,
        status,
        violating,
    }
}

#[derive(Clone, Debug)]
pub struct TopWitness {
    pub w1: WitnessCandidate,
    pub w2: WitnessCandidate,
    pub mu: f64,
}

/// `W_i = μI - ρ_i` with `μ` the largest product expectation over both
/// states.
///
/// When `μ` reaches the shared top eigenvalue the construction fails and
/// both candidates carry `PositiveSemidefinite`.
pub fn witness_from_state_top(
    rho1: &BipartiteOperator,
    rho2: &BipartiteOperator,
    opts: &Options,
) -> Result<TopWitness> {
    rho1.same_dims(rho2)?;
    let l1 = rho1.max_eigenvalue();
    let l2 = rho2.max_eigenvalue();
    if (l1 - l2).abs() > opts.spectrum_tol {
        return Err(Error::InvalidArgument(format!(
            "top eigenvalues differ: {l1} vs {l2}"
        )));
    }
    let mu = max_product_overlap(rho1, &opts.seesaw)?
        .value
        .max(max_product_overlap(rho2, &opts.seesaw)?.value);

    let build = |rho: &BipartiteOperator| {
        let w = BipartiteOperator::identity(rho.dim_a(), rho.dim_b())
            .scaled(mu)
            .sub(rho)
            .expect("same dims");
        let mut cand = verify_witness(&w, opts);
        if mu >= l1 - SIGN_TOL {
            cand.status = WitnessStatus::PositiveSemidefinite;
            cand.violating = None;
        }
        cand
    };
    Ok(TopWitness {
        w1: build(rho1),
        w2: build(rho2),
        mu,
    })
}

#[derive(Clone, Debug)]
pub struct EigenspaceWitness {
    pub w: WitnessCandidate,
    pub mu: f64,
    pub p_max: f64,
    pub p_min: f64,
}

/// `W = -μ P_j + Σ_{i≠j} λ_i P_i` for a full-rank state.
///
/// `μ = safety · p_min / p_max` with `p_max` the largest product overlap of
/// `P_j` and `p_min` the smallest product expectation of the remaining sum.
/// If `P_j` has no product overlap at all, any positive `μ` works and
/// `λ_j` is used.
pub fn witness_from_eigenspace(rho: &BipartiteOperator, j: usize, opts: &Options) -> Result<EigenspaceWitness> {
    let min = rho.require_psd()?;
    if min <= TOLERANCES.psd {
        return Err(Error::InvalidArgument(format!(
            "state must have full rank (smallest eigenvalue {min:.3e})"
        )));
    }
    let dec = spectral_decompose(rho, opts.group_tol);
    if j >= dec.len() {
        return Err(Error::InvalidArgument(format!(
            "eigenspace index {j} out of range ({} distinct eigenvalues)",
            dec.len()
        )));
    }
    if dec.len() == 1 {
        return Err(Error::Inapplicable(
            "the chosen eigenspace is the whole space, the remaining sum is empty".into(),
        ));
    }
    let (m, n) = rho.dims();
    let mut rest = BipartiteOperator::zeros(m, n);
    for (i, (l, p)) in dec.eigenvalues.iter().zip(&dec.projectors).enumerate() {
        if i != j {
            rest = rest.add(&p.scaled(*l))?;
        }
    }
    let pj = &dec.projectors[j];
    let p_max = max_product_overlap(pj, &opts.seesaw)?.value;
    let p_min = min_product_overlap(&rest, &opts.seesaw)?.value;

    let mu = if p_max <= opts.product_tol {
        dec.eigenvalues[j]
    } else if p_min <= SIGN_TOL {
        return Err(Error::Inapplicable(format!(
            "eigenspace {j} has product overlap {p_max:.3e} and the remaining sum vanishes on a product vector"
        )));
    } else {
        opts.safety_factor * p_min / p_max
    };
    let w = rest.sub(&pj.scaled(mu))?;
    Ok(EigenspaceWitness {
        w: verify_witness(&w, opts),
        mu,
        p_max,
        p_min,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shift {
    /// `x = max(0, -λ_min) + 1`.
    Auto,
    Fixed(f64),
}

/// `W + xI`, positive semidefinite.
pub fn state_from_witness(w: &BipartiteOperator, shift: Shift) -> Result<BipartiteOperator> {
    let min = w.min_eigenvalue();
    let x = match shift {
        Shift::Auto => (-min).max(0.0) + 1.0,
        Shift::Fixed(x) => {
            if x + min < -TOLERANCES.psd {
                return Err(Error::InvalidArgument(format!(
                    "shift {x} is smaller than -λ_min = {}",
                    -min
                )));
            }
            x
        }
    };
    Ok(w.shifted(x))
}

/// Smallest `x` making both `W + xI` and its partial transpose positive
/// semidefinite.
pub fn ppt_guarantee_x(w: &BipartiteOperator) -> f64 {
    let min = w.min_eigenvalue().min(w.partial_transpose().min_eigenvalue());
    (-min).max(0.0)
}

/// `Σ_j μ_j P_j` with the projectors of `h` (descending eigenvalue order)
/// and new strictly descending positive eigenvalues.
pub fn positive_relabel(h: &BipartiteOperator, new_eigenvalues: &[f64], group_tol: f64) -> Result<BipartiteOperator> {
    let dec = spectral_decompose(h, group_tol);
    if new_eigenvalues.len() != dec.len() {
        return Err(Error::InvalidArgument(format!(
            "{} eigenvalues given for {} eigenspaces",
            new_eigenvalues.len(),
            dec.len()
        )));
    }
    if new_eigenvalues.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::InvalidArgument("eigenvalues must be positive".into()));
    }
    if new_eigenvalues.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eigenvalues must be strictly descending".into()));
    }
    Ok(dec.relabel(new_eigenvalues))
}

/// Orthonormal product vectors in `C^m ⊗ C^n`.
#[derive(Clone, Debug)]
pub struct UpbSpec {
    members: Vec<ProductVector>,
    dim_a: usize,
    dim_b: usize,
}

impl UpbSpec {
    pub fn new(members: Vec<ProductVector>, dim_a: usize, dim_b: usize) -> Result<Self> {
        for pv in &members {
            if pv.dims() != (dim_a, dim_b) {
                return Err(Error::Shape {
                    expected: format!("{dim_a}⊗{dim_b} product vectors"),
                    actual: format!("{}⊗{}", pv.a.len(), pv.b.len()),
                });
            }
        }
        let vecs: Vec<Vec<Complex64>> = members.iter().map(ProductVector::vector).collect();
        for i in 0..vecs.len() {
            for j in (i + 1)..vecs.len() {
                let overlap = inner(&vecs[i], &vecs[j]).norm();
                if overlap > 1e-10 {
                    return Err(Error::NonOrthogonalTuple {
                        side: "upb",
                        first: i,
                        second: j,
                        overlap,
                    });
                }
            }
        }
        Ok(Self { members, dim_a, dim_b })
    }

    pub fn members(&self) -> &[ProductVector] {
        &self.members
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }
}

/// `(I - Σ_i |a_i,b_i⟩⟨a_i,b_i|) / (mn - l)`.
pub fn upb_state(upb: &UpbSpec) -> Result<BipartiteOperator> {
    let (m, n) = upb.dims();
    let l = upb.members.len();
    if l >= m * n {
        return Err(Error::InvalidArgument(format!(
            "{l} product vectors leave no complement in dimension {}",
            m * n
        )));
    }
    let vecs: Vec<Vec<Complex64>> = upb.members.iter().map(ProductVector::vector).collect();
    let span = BipartiteOperator::projector(&vecs, m, n);
    Ok(BipartiteOperator::identity(m, n)
        .sub(&span)?
        .scaled(1.0 / (m * n - l) as f64))
}

/// The five-member tiles UPB in `3 ⊗ 3`.
pub fn tiles_upb() -> UpbSpec {
    let r = |v: [f64; 3]| -> Vec<Complex64> { v.iter().map(|&x| Complex64::new(x, 0.0)).collect() };
    let pv = |a: [f64; 3], b: [f64; 3]| ProductVector::new(&r(a), &r(b)).expect("nonzero");
    let members = vec![
        pv([1.0, 0.0, 0.0], [1.0, -1.0, 0.0]),
        pv([1.0, -1.0, 0.0], [0.0, 0.0, 1.0]),
        pv([0.0, 0.0, 1.0], [0.0, 1.0, -1.0]),
        pv([0.0, 1.0, -1.0], [1.0, 0.0, 0.0]),
        pv([1.0, 1.0, 1.0], [1.0, 1.0, 1.0]),
    ];
    UpbSpec::new(members, 3, 3).expect("tiles vectors are orthogonal")
}
