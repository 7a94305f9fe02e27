//! Named operators built from exact constants.
//!
//! Every fixture is generated in code; [`fixture`] looks one up by name.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::linalg::{basis_vector, kron, kron_vec, BipartiteOperator, ComplexMatrix};
use crate::witness::{tiles_upb, upb_state};

/// Parameters of the α pair: `α_i = x|ψ⟩⟨ψ| + y B_i` with
/// `ψ = cos θ|00⟩ + sin θ|11⟩`.
pub const ALPHA_X: f64 = 1.0;
pub const ALPHA_Y: f64 = 2.0;
pub const ALPHA_THETA: f64 = std::f64::consts::PI / 6.0;

/// Noise added to make rank-deficient fixtures full rank.
pub const EPSILON: f64 = 0.01;

pub const NAMES: &[&str] = &[
    "paper.rho1",
    "paper.rho3prime",
    "paper.rho3",
    "paper.crlu.rho",
    "paper.crlu.sigma",
    "paper.tiles_upb_state",
    "paper.tiles_upb_state_noisy",
    "paper.cex.P1",
    "paper.cex.P2",
    "paper.cex.P3",
    "paper.cex.Q1",
    "paper.cex.Q2",
    "paper.cex.Q3",
    "paper.alpha1",
    "paper.alpha2",
    "maximally_mixed.2x2",
    "bell.phi_plus",
];

pub fn fixture(name: &str) -> Option<BipartiteOperator> {
    Some(match name {
        "paper.rho1" => rho1(),
        "paper.rho3prime" => rho3_prime(),
        "paper.rho3" => rho3_prime().shifted(EPSILON),
        "paper.crlu.rho" => crlu_rho(),
        "paper.crlu.sigma" => crlu_sigma(),
        "paper.tiles_upb_state" => tiles_state(),
        "paper.tiles_upb_state_noisy" => tiles_state().shifted(EPSILON),
        "paper.cex.P1" => cex_p()[0].clone(),
        "paper.cex.P2" => cex_p()[1].clone(),
        "paper.cex.P3" => cex_p()[2].clone(),
        "paper.cex.Q1" => cex_q()[0].clone(),
        "paper.cex.Q2" => cex_q()[1].clone(),
        "paper.cex.Q3" => cex_q()[2].clone(),
        "paper.alpha1" => alpha_pair().0,
        "paper.alpha2" => alpha_pair().1,
        "maximally_mixed.2x2" => BipartiteOperator::identity(2, 2).scaled(0.25),
        "bell.phi_plus" => BipartiteOperator::pure(&phi_plus(), 2, 2).expect("2x2"),
        _ => return None,
    })
}

/// Named projector-tuple pairs `(p, q)` from the three-projector example.
pub const MANIFEST_NAMES: &[&str] = &["paper.cex", "paper.cex.12", "paper.cex.13", "paper.cex.23"];

pub fn manifest(name: &str) -> Option<(Vec<BipartiteOperator>, Vec<BipartiteOperator>)> {
    let pick: &[usize] = match name {
        "paper.cex" => &[0, 1, 2],
        "paper.cex.12" => &[0, 1],
        "paper.cex.13" => &[0, 2],
        "paper.cex.23" => &[1, 2],
        _ => return None,
    };
    let (p, q) = (cex_p(), cex_q());
    Some((
        pick.iter().map(|&i| p[i].clone()).collect(),
        pick.iter().map(|&i| q[i].clone()).collect(),
    ))
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ket2(i: usize, j: usize) -> Vec<Complex64> {
    basis_vector(4, 2 * i + j)
}

pub fn phi_plus() -> Vec<Complex64> {
    vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]
}

pub fn phi_minus() -> Vec<Complex64> {
    vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(-FRAC_1_SQRT_2)]
}

pub fn psi_plus() -> Vec<Complex64> {
    vec![c(0.0), c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(0.0)]
}

pub fn psi_minus() -> Vec<Complex64> {
    vec![c(0.0), c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2), c(0.0)]
}

/// `(|01⟩⟨01| + |10⟩⟨10| + 2|φ+⟩⟨φ+| + 6|φ-⟩⟨φ-|) / 10`.
pub fn rho1() -> BipartiteOperator {
    BipartiteOperator::mixture(
        &[
            (0.1, ket2(0, 1)),
            (0.1, ket2(1, 0)),
            (0.2, phi_plus()),
            (0.6, phi_minus()),
        ],
        2,
        2,
    )
    .expect("2x2")
}

/// `(|00⟩⟨00| + |11⟩⟨11| + 4|++⟩⟨++|) / 6`.
pub fn rho3_prime() -> BipartiteOperator {
    let plus = [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)];
    BipartiteOperator::mixture(
        &[
            (1.0 / 6.0, ket2(0, 0)),
            (1.0 / 6.0, ket2(1, 1)),
            (4.0 / 6.0, kron_vec(&plus, &plus)),
        ],
        2,
        2,
    )
    .expect("2x2")
}

/// `|00⟩⟨00|/2 + |01⟩⟨01|/4 + (|10⟩⟨10| + |11⟩⟨11|)/8`.
pub fn crlu_rho() -> BipartiteOperator {
    BipartiteOperator::mixture(
        &[
            (0.5, ket2(0, 0)),
            (0.25, ket2(0, 1)),
            (0.125, ket2(1, 0)),
            (0.125, ket2(1, 1)),
        ],
        2,
        2,
    )
    .expect("2x2")
}

/// `|φ+⟩⟨φ+|/2 + |φ-⟩⟨φ-|/4 + (|01⟩⟨01| + |10⟩⟨10|)/8`.
pub fn crlu_sigma() -> BipartiteOperator {
    BipartiteOperator::mixture(
        &[
            (0.5, phi_plus()),
            (0.25, phi_minus()),
            (0.125, ket2(0, 1)),
            (0.125, ket2(1, 0)),
        ],
        2,
        2,
    )
    .expect("2x2")
}

/// The rank-4 PPT entangled state built from the 3⊗3 tiles UPB.
pub fn tiles_state() -> BipartiteOperator {
    upb_state(&tiles_upb()).expect("tiles UPB is orthonormal")
}

fn local_projector(dim: usize, i: usize) -> ComplexMatrix {
    let e = basis_vector(dim, i);
    ComplexMatrix::outer(&e, &e)
}

fn cex(i: usize, diag: [f64; 4]) -> BipartiteOperator {
    BipartiteOperator::new(
        4,
        4,
        kron(&local_projector(4, i), &ComplexMatrix::from_real_diagonal(&diag)),
    )
    .expect("Hermitian")
}

/// `P_j = |j⟩⟨j| ⊗ D_j` on `C^4 ⊗ C^4`.
pub fn cex_p() -> Vec<BipartiteOperator> {
    vec![
        cex(0, [1.0, 1.0, 0.0, 0.0]),
        cex(1, [1.0, 0.0, 1.0, 0.0]),
        cex(2, [1.0, 0.0, 0.0, 1.0]),
    ]
}

/// Same as [`cex_p`] except the third member, whose B factor is
/// `diag(0,1,1,0)`.
pub fn cex_q() -> Vec<BipartiteOperator> {
    vec![
        cex(0, [1.0, 1.0, 0.0, 0.0]),
        cex(1, [1.0, 0.0, 1.0, 0.0]),
        cex(2, [0.0, 1.0, 1.0, 0.0]),
    ]
}

fn exchange() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, rb) = (a.rows(), b.rows());
    ComplexMatrix::from_fn(ra + rb, ra + rb, |i, j| match (i < ra, j < ra) {
        (true, true) => a[(i, j)],
        (false, false) => b[(i - ra, j - ra)],
        _ => c(0.0),
    })
}

/// B factor of the unitary mapping `(Q1, Q3)` onto `(P1, P3)`: `X ⊕ X`.
pub fn cex_v13() -> ComplexMatrix {
    direct_sum(&exchange(), &exchange())
}

/// B factor of the unitary mapping `(Q2, Q3)` onto `(P2, P3)`: the block
/// exchange `[[0, I], [I, 0]]`.
pub fn cex_v23() -> ComplexMatrix {
    kron(&exchange(), &ComplexMatrix::identity(2))
}

/// `(α1, α2)` with `B1 = |Ψ+⟩⟨Ψ+|`, `B2 = |Ψ-⟩⟨Ψ-|`.
pub fn alpha_pair() -> (BipartiteOperator, BipartiteOperator) {
    alpha_pair_with(ALPHA_X, ALPHA_Y, ALPHA_THETA)
}

pub fn alpha_psi(theta: f64) -> Vec<Complex64> {
    vec![c(theta.cos()), c(0.0), c(0.0), c(theta.sin())]
}

pub fn alpha_pair_with(x: f64, y: f64, theta: f64) -> (BipartiteOperator, BipartiteOperator) {
    let psi = alpha_psi(theta);
    let a1 = BipartiteOperator::mixture(&[(x, psi.clone()), (y, psi_plus())], 2, 2).expect("2x2");
    let a2 = BipartiteOperator::mixture(&[(x, psi), (y, psi_minus())], 2, 2).expect("2x2");
    (a1, a2)
}
