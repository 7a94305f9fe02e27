use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::io::matrix_to_json;
use crate::linalg::{LocalUnitary, Subsystem};
use crate::spectral::MismatchKind;

/// Which argument of a two-operand decision a certificate refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Replayable reason for inequivalence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// Distinct eigenvalues or multiplicities differ at `index` (descending).
    SpectrumMismatch {
        index: usize,
        kind: MismatchKind,
        left: Option<(f64, usize)>,
        right: Option<(f64, usize)>,
    },
    /// Matched projectors have different ranks.
    RankMismatch { projector: usize, left: usize, right: usize },
    /// Reduced spectra of matched projectors differ on one factor.
    LocalSpectrumMismatch {
        projector: usize,
        factor: Subsystem,
        left: Vec<f64>,
        right: Vec<f64>,
    },
    /// Schmidt coefficients of matched rank-one projectors differ.
    SchmidtMismatch {
        projector: usize,
        left: Vec<f64>,
        right: Vec<f64>,
    },
    /// After fixing the first members, the remaining freedom on `factor`
    /// is block-diagonal in the common eigenbasis and cannot carry the
    /// diagonal `source` onto `target` inside `block`. All diagonals are
    /// full length, in the eigenbasis of the first operand.
    CommutantObstruction {
        projector: usize,
        factor: Subsystem,
        fixed: Vec<usize>,
        fixed_diagonals: Vec<Vec<f64>>,
        partition: Vec<Vec<usize>>,
        block: Vec<usize>,
        source: Vec<f64>,
        target: Vec<f64>,
    },
    /// `side` has an eigenspace proven to contain no product vector while
    /// every eigenspace of the other operand contains one.
    ClassMismatch { side: Side, eigenspace: usize },
    /// No element of the intersection of two exhaustive finite groups maps
    /// the third member across.
    NoIntersectingElement { intersection_size: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum EquivalenceVerdict {
    /// `lu` carries the second operand onto the first with the given
    /// residual (sum of squared Frobenius distances).
    Equivalent { lu: LocalUnitary, residual: f64 },
    Inequivalent { certificate: Certificate },
    /// The search found nothing acceptable; this is not a proof either way.
    Undecided { best_residual: f64, best_lu: LocalUnitary },
}

impl EquivalenceVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            EquivalenceVerdict::Equivalent { .. } => "equivalent",
            EquivalenceVerdict::Inequivalent { .. } => "inequivalent",
            EquivalenceVerdict::Undecided { .. } => "undecided",
        }
    }

    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::Equivalent { .. })
    }

    pub fn is_inequivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::Inequivalent { .. })
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, EquivalenceVerdict::Undecided { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            EquivalenceVerdict::Inequivalent { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn lu(&self) -> Option<&LocalUnitary> {
        match self {
            EquivalenceVerdict::Equivalent { lu, .. } => Some(lu),
            EquivalenceVerdict::Undecided { best_lu, .. } => Some(best_lu),
            EquivalenceVerdict::Inequivalent { .. } => None,
        }
    }

    pub fn residual(&self) -> Option<f64> {
        match self {
            EquivalenceVerdict::Equivalent { residual, .. } => Some(*residual),
            EquivalenceVerdict::Undecided { best_residual, .. } => Some(*best_residual),
            EquivalenceVerdict::Inequivalent { .. } => None,
        }
    }

    /// Exit status used by the command line: 0, 1 or 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            EquivalenceVerdict::Equivalent { .. } => 0,
            EquivalenceVerdict::Inequivalent { .. } => 1,
            EquivalenceVerdict::Undecided { .. } => 2,
        }
    }
}

#[derive(Serialize)]
struct LuJson {
    u: serde_json::Value,
    v: serde_json::Value,
}

impl Serialize for EquivalenceVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("EquivalenceVerdict", 4)?;
        s.serialize_field("kind", self.kind())?;
        s.serialize_field("residual", &self.residual())?;
        s.serialize_field("certificate", &self.certificate())?;
        let lu = self.lu().map(|lu| LuJson {
            u: matrix_to_json(lu.u()),
            v: matrix_to_json(lu.v()),
        });
        s.serialize_field("lu", &lu)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let v = EquivalenceVerdict::Equivalent {
            lu: LocalUnitary::identity(2, 2),
            residual: 0.0,
        };
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["kind"], "equivalent");
        assert_eq!(j["residual"], 0.0);
        assert!(j["certificate"].is_null());
        assert_eq!(j["lu"]["u"][0][0], serde_json::json!([1.0, 0.0]));

        let c = EquivalenceVerdict::Inequivalent {
            certificate: Certificate::SchmidtMismatch {
                projector: 0,
                left: vec![1.0, 0.0],
                right: vec![0.5f64.sqrt(); 2],
            },
        };
        let j = serde_json::to_value(&c).unwrap();
        assert_eq!(j["kind"], "inequivalent");
        assert_eq!(j["certificate"]["type"], "schmidt_mismatch");
        assert!(j["lu"].is_null());
        assert_eq!(c.exit_code(), 1);
    }
}
