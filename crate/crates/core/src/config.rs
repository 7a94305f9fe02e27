//! Tolerances and run options shared by the library, the tests and the CLI.

use serde::{Deserialize, Serialize};

use crate::product_opt::SeesawOptions;

/// Fixed numerical tolerances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative Hermiticity bound: `max|M - M†| <= hermiticity * (1 + max|M|)`.
    pub hermiticity: f64,
    /// Entrywise bound on `U†U - I`.
    pub orthonormality: f64,
    /// Frobenius bound on eigendecomposition reconstruction.
    pub reconstruction: f64,
    /// Off-diagonal Frobenius mass at which Jacobi sweeps stop (scaled by `max(1, ‖A‖_F)`).
    pub jacobi_offdiag: f64,
    /// Eigenvalues above `-psd` count as nonnegative.
    pub psd: f64,
    /// Frobenius bound on `P² - P` for projector inputs.
    pub projector: f64,
    /// Frobenius bound on `P_i P_j` for members of an orthogonal tuple.
    pub orthogonality: f64,
    /// Entrywise equality of real labels (diagonal entries, commutant blocks).
    pub label: f64,
    /// Frobenius bound used for group membership and twirl fixed points.
    pub group: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    hermiticity: 1e-12,
    orthonormality: 1e-10,
    reconstruction: 1e-10,
    jacobi_offdiag: 1e-13,
    psd: 1e-9,
    projector: 1e-8,
    orthogonality: 1e-8,
    label: 1e-9,
    group: 1e-8,
};

/// Options for the unitary pattern search used by the SLU decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSearchOptions {
    pub restarts: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub min_step: f64,
    pub max_evaluations: usize,
}

impl Default for PatternSearchOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            initial_step: 0.5,
            shrink: 0.5,
            min_step: 1e-6,
            max_evaluations: 60_000,
        }
    }
}

/// Every tunable knob of a run. The CLI builds one of these from its flags.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Options {
    pub seed: u64,
    pub seesaw: SeesawOptions,
    pub search: PatternSearchOptions,
    /// Seesaw overlap needed to call a vector "in the subspace": `>= 1 - product_tol`.
    pub product_tol: f64,
    /// Relative gap under which adjacent eigenvalues merge into one eigenspace.
    pub group_tol: f64,
    /// Absolute tolerance when comparing spectra.
    pub spectrum_tol: f64,
    /// Absolute tolerance when comparing LU invariants (local spectra, Schmidt coefficients).
    pub invariant_tol: f64,
    /// Residual (sum of squared Frobenius distances) at which an LU is accepted.
    pub accept_tol: f64,
    /// Safety factor applied to the witness weight bound `p_min / p_max`.
    pub safety_factor: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: 42,
            seesaw: SeesawOptions::default(),
            search: PatternSearchOptions::default(),
            product_tol: 1e-7,
            group_tol: 1e-8,
            spectrum_tol: 1e-8,
            invariant_tol: 1e-6,
            accept_tol: 1e-7,
            safety_factor: 0.99,
        }
    }
}

impl Options {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.seesaw.seed = seed;
        self
    }
}
