//! PPT/NPT status, eigenspace product content (`D_λ`, `D̄_λ`) and extremal
//! partial-transpose eigenvalues.
//!
//! `D_λ`: some eigenspace contains no product vector. `D̄_λ`: some eigenspace
//! is not spanned by product vectors. Proofs come from Schmidt ranks of
//! eigenlines; seesaw failures only give evidence. The kernel of a
//! rank-deficient state is not counted as an eigenspace here.

use serde::{Deserialize, Serialize};

use crate::config::Options;
use crate::error::{Error, Result};
use crate::linalg::BipartiteOperator;
use crate::product_opt::{contains_product_vector, spanned_by_product_vectors, ProductSearch, SpanSearch};
use crate::spectral::{schmidt_decompose, spectral_decompose};

/// PT eigenvalues within this of zero count as zero.
const PT_BOUNDARY: f64 = 1e-9;
/// Slack for the extremal bounds `-1/2` and `1`.
const EXTREMAL_TOL: f64 = 1e-8;
/// Second Schmidt coefficient above which an eigenline is entangled.
const ENTANGLED_SCHMIDT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Proven,
    /// A numerical search failed where success would refute membership.
    Evidence,
    RefutedNumerically,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalPt {
    MaxEntTwoQubit,
    PureProduct,
    Neither,
}

/// Whether an eigenspace contains a product vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductContent {
    /// Spanned by one entangled vector.
    ProvenAbsent,
    /// Dimension above `(m-1)(n-1)` forces a product vector.
    PresentByDimension,
    Found,
    NoneFoundNumerically,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spanning {
    ProvenNotSpanned,
    Spanned,
    NotSpannedNumerically,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenspaceReport {
    pub eigenvalue: f64,
    pub dimension: usize,
    pub kernel: bool,
    /// Schmidt coefficients of the spanning vector of an eigenline.
    pub schmidt: Option<Vec<f64>>,
    pub product_content: ProductContent,
    pub spanning: Spanning,
    /// Best seesaw overlap with the eigenspace, when a search ran.
    pub best_overlap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateClassification {
    pub trace: f64,
    pub is_npt: bool,
    pub is_ppt: bool,
    /// PPT only because `pt_min` is within rounding of zero.
    pub ppt_boundary: bool,
    pub pt_min: f64,
    pub pt_max: f64,
    pub pt_spectrum: Vec<f64>,
    pub d_lambda: Membership,
    pub d_lambda_bar: Membership,
    pub extremal: ExtremalPt,
    /// PPT in 2⊗2 or 2⊗3, where PPT implies separable.
    pub separable_certified: bool,
    /// PPT, not certified separable, and no product vector found in the range.
    pub ppt_entangled_candidate: bool,
    pub eigenspaces: Vec<EigenspaceReport>,
}

fn entangled_line(schmidt: &Option<Vec<f64>>) -> bool {
    schmidt
        .as_ref()
        .is_some_and(|c| c.get(1).is_some_and(|&x| x > ENTANGLED_SCHMIDT))
}

fn report(
    p: &BipartiteOperator,
    basis: &[Vec<num_complex::Complex64>],
    eigenvalue: f64,
    opts: &Options,
) -> Result<EigenspaceReport> {
    let (m, n) = p.dims();
    let dimension = basis.len();
    let kernel = eigenvalue == 0.0;
    let schmidt = if dimension == 1 {
        Some(schmidt_decompose(&basis[0], m, n)?.padded_coefficients())
    } else {
        None
    };
    if dimension == 1 {
        let entangled = entangled_line(&schmidt);
        let (product_content, spanning) = if entangled {
            (ProductContent::ProvenAbsent, Spanning::ProvenNotSpanned)
        } else {
            (ProductContent::Found, Spanning::Spanned)
        };
        return Ok(EigenspaceReport {
            eigenvalue,
            dimension,
            kernel,
            schmidt,
            product_content,
            spanning,
            best_overlap: None,
        });
    }
    let mut best_overlap = None;
    let product_content = if dimension > (m - 1) * (n - 1) {
        ProductContent::PresentByDimension
    } else {
        match contains_product_vector(p, &opts.seesaw, opts.product_tol)? {
            ProductSearch::Found { value, .. } => {
                best_overlap = Some(value);
                ProductContent::Found
            }
            ProductSearch::NoneFoundNumerically { best_value } => {
                best_overlap = Some(best_value);
                ProductContent::NoneFoundNumerically
            }
        }
    };
    let spanning = if product_content == ProductContent::NoneFoundNumerically {
        Spanning::NotSpannedNumerically
    } else {
        match spanned_by_product_vectors(p, &opts.seesaw, opts.product_tol)? {
            SpanSearch::Spanned { .. } => Spanning::Spanned,
            SpanSearch::NotSpannedNumerically { .. } => Spanning::NotSpannedNumerically,
        }
    };
    Ok(EigenspaceReport {
        eigenvalue,
        dimension,
        kernel,
        schmidt,
        product_content,
        spanning,
        best_overlap,
    })
}

/// Extremal PT eigenvalues of a normalized state: `-1/2` only for two-qubit
/// maximally entangled pure states, `1` only for pure product states.
pub fn detect_extremal_pt(rho: &BipartiteOperator) -> Result<ExtremalPt> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { trace });
    }
    rho.require_psd()?;
    let pt = rho.partial_transpose().eigenvalues();
    Ok(extremal_from_pt(pt[0], pt[pt.len() - 1]))
}

fn extremal_from_pt(pt_min: f64, pt_max: f64) -> ExtremalPt {
    if pt_min <= -0.5 + EXTREMAL_TOL {
        ExtremalPt::MaxEntTwoQubit
    } else if pt_max >= 1.0 - EXTREMAL_TOL {
        ExtremalPt::PureProduct
    } else {
        ExtremalPt::Neither
    }
}

/// Classifies a positive semidefinite operator. The extremal check is done
/// on the trace-normalized state.
pub fn classify(rho: &BipartiteOperator, opts: &Options) -> Result<StateClassification> {
    rho.require_psd()?;
    let trace = rho.trace();
    if trace <= 0.0 {
        return Err(Error::InvalidArgument("zero operator has no classification".into()));
    }
    let (m, n) = rho.dims();
    let pt_spectrum = rho.partial_transpose().eigenvalues();
    let pt_min = pt_spectrum[0];
    let pt_max = pt_spectrum[pt_spectrum.len() - 1];
    let is_ppt = pt_min > -PT_BOUNDARY;
    let ppt_boundary = is_ppt && pt_min.abs() <= PT_BOUNDARY;
    let extremal = extremal_from_pt(pt_min / trace, pt_max / trace);

    let dec = spectral_decompose(rho, opts.group_tol);
    let eigenspaces: Vec<EigenspaceReport> = (0..dec.len())
        .map(|j| report(&dec.projectors[j], &dec.bases[j], dec.eigenvalues[j], opts))
        .collect::<Result<_>>()?;
    let counted = || eigenspaces.iter().filter(|e| !e.kernel);

    let d_lambda = if counted().any(|e| e.product_content == ProductContent::ProvenAbsent) {
        Membership::Proven
    } else if counted().any(|e| e.product_content == ProductContent::NoneFoundNumerically) {
        Membership::Evidence
    } else {
        Membership::RefutedNumerically
    };
    let d_lambda_bar = if d_lambda == Membership::Proven || counted().any(|e| e.spanning == Spanning::ProvenNotSpanned)
    {
        Membership::Proven
    } else if counted().any(|e| e.spanning == Spanning::NotSpannedNumerically) {
        Membership::Evidence
    } else {
        Membership::RefutedNumerically
    };

    let separable_certified = is_ppt && m * n <= 6;
    let ppt_entangled_candidate = is_ppt && !separable_certified && {
        let range = BipartiteOperator::projector(&rho.range_basis(PT_BOUNDARY), m, n);
        !contains_product_vector(&range, &opts.seesaw, opts.product_tol)?.is_found()
    };

    Ok(StateClassification {
        trace,
        is_npt: !is_ppt,
        is_ppt,
        ppt_boundary,
        pt_min,
        pt_max,
        pt_spectrum,
        d_lambda,
        d_lambda_bar,
        extremal,
        separable_certified,
        ppt_entangled_candidate,
        eigenspaces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::basis_vector;

    #[test]
    fn rho1_is_npt_and_in_d_lambda() {
        let c = classify(&fixtures::rho1(), &Options::default()).unwrap();
        assert!(c.is_npt && !c.is_ppt);
        assert!((c.pt_min + 0.1).abs() < 1e-10);
        assert_eq!(c.d_lambda, Membership::Proven);
        assert_eq!(c.d_lambda_bar, Membership::Proven);
    }

    #[test]
    fn shifted_separable_state_is_in_d_lambda() {
        let rho = fixtures::fixture("paper.rho3").unwrap();
        let c = classify(&rho, &Options::default()).unwrap();
        assert!(c.is_ppt && c.separable_certified);
        assert_eq!(c.d_lambda, Membership::Proven);
        assert!(!c.ppt_entangled_candidate);
    }

    #[test]
    fn noisy_tiles_state_gives_evidence() {
        let rho = fixtures::fixture("paper.tiles_upb_state_noisy").unwrap();
        let c = classify(&rho, &Options::default()).unwrap();
        assert!(c.is_ppt && !c.separable_certified);
        assert_eq!(c.d_lambda, Membership::Evidence);
        let four = c.eigenspaces.iter().find(|e| e.dimension == 4).unwrap();
        assert_eq!(four.product_content, ProductContent::NoneFoundNumerically);
    }

    #[test]
    fn tiles_state_is_a_ppt_entangled_candidate() {
        let c = classify(&fixtures::tiles_state(), &Options::default()).unwrap();
        assert!(c.is_ppt && c.ppt_boundary);
        assert!(c.ppt_entangled_candidate);
    }

    #[test]
    fn extremal_cases() {
        let bell = BipartiteOperator::pure(&fixtures::phi_plus(), 2, 2).unwrap();
        assert_eq!(detect_extremal_pt(&bell).unwrap(), ExtremalPt::MaxEntTwoQubit);
        let prod = BipartiteOperator::pure(&basis_vector(4, 0), 2, 2).unwrap();
        assert_eq!(detect_extremal_pt(&prod).unwrap(), ExtremalPt::PureProduct);
        let mixed = BipartiteOperator::identity(2, 2).scaled(0.25);
        assert_eq!(detect_extremal_pt(&mixed).unwrap(), ExtremalPt::Neither);
        let c = classify(&mixed, &Options::default()).unwrap();
        assert!(c.is_ppt && c.extremal == ExtremalPt::Neither);
        assert_eq!(c.d_lambda, Membership::RefutedNumerically);
    }

    #[test]
    fn rejects_unnormalized_and_non_psd() {
        let two = BipartiteOperator::identity(2, 2).scaled(0.5);
        assert!(matches!(detect_extremal_pt(&two), Err(Error::NotNormalized { .. })));
        let neg = BipartiteOperator::identity(2, 2).scaled(-1.0);
        assert!(matches!(classify(&neg, &Options::default()), Err(Error::NotPositiveSemidefinite { .. })));
    }
}
