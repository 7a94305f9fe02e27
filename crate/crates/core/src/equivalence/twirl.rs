//! Finite groups of local unitaries, twirling and the triple check for
//! simultaneous equivalence relative to supplied groups.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::config::TOLERANCES;
use crate::error::{Error, Result};
use crate::linalg::{BipartiteOperator, ComplexMatrix, LocalUnitary};

use super::verdict::{Certificate, EquivalenceVerdict};

/// Per-factor phase is removed before hashing: the first entry with modulus
/// above this is rotated onto the positive real axis.
const PHASE_PIVOT: f64 = 1e-3;
/// Hash grid for canonical entries.
const GRID: f64 = 1e6;

/// A finite set of local unitaries, closed (or not) under products up to
/// per-factor phase.
#[derive(Clone, Debug)]
pub struct FiniteLuGroup {
    elements: Vec<LocalUnitary>,
    closed: bool,
}

fn canonical_key(m: &ComplexMatrix) -> Vec<(i64, i64)> {
    let pivot = m.as_slice().iter().find(|z| z.norm() > PHASE_PIVOT).copied();
    let phase = pivot.map_or(Complex64::new(1.0, 0.0), |p| p.conj() / p.norm());
    m.as_slice()
        .iter()
        .map(|z| {
            let w = z * phase;
            ((w.re * GRID).round() as i64, (w.im * GRID).round() as i64)
        })
        .collect()
}

/// Rounded entries of both factors after phase canonicalization.
type Key = (Vec<(i64, i64)>, Vec<(i64, i64)>);

fn key(lu: &LocalUnitary) -> Key {
    (canonical_key(lu.u()), canonical_key(lu.v()))
}

/// Index of an element equal to `lu` up to per-factor phase.
fn position(
    elements: &[LocalUnitary],
    index: &HashMap<Key, usize>,
    lu: &LocalUnitary,
) -> Option<usize> {
    if let Some(&i) = index.get(&key(lu)) {
        return Some(i);
    }
    // Rounding can split a class across grid cells.
    elements
        .iter()
        .position(|e| e.equals_up_to_phase(lu, TOLERANCES.group))
}

impl FiniteLuGroup {
    /// Records whether the set contains the identity and is closed under
    /// products; [`twirl_finite`] refuses sets that are not.
    pub fn new(elements: Vec<LocalUnitary>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidArgument("empty group".into()));
        };
        let dims = first.dims();
        if elements.iter().any(|e| e.dims() != dims) {
            return Err(Error::InvalidArgument("group elements have different dimensions".into()));
        }
        let index: HashMap<_, _> = elements.iter().enumerate().map(|(i, e)| (key(e), i)).collect();
        let identity = LocalUnitary::identity(dims.0, dims.1);
        let mut closed = position(&elements, &index, &identity).is_some();
        'outer: for a in &elements {
            for b in &elements {
                if closed && position(&elements, &index, &a.compose(b)).is_none() {
                    closed = false;
                    break 'outer;
                }
            }
        }
        Ok(Self { elements, closed })
    }

    pub fn trivial(dim_a: usize, dim_b: usize) -> Self {
        Self {
            elements: vec![LocalUnitary::identity(dim_a, dim_b)],
            closed: true,
        }
    }

    pub fn elements(&self) -> &[LocalUnitary] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn dims(&self) -> (usize, usize) {
        self.elements[0].dims()
    }

    pub fn contains(&self, lu: &LocalUnitary) -> bool {
        self.elements.iter().any(|e| e.equals_up_to_phase(lu, TOLERANCES.group))
    }
}

fn paulis() -> [ComplexMatrix; 4] {
    let i = Complex64::i();
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ComplexMatrix::from_vec(2, 2, vec![0.0.into(), -i, i, 0.0.into()]).expect("2x2"),
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0]),
    ]
}

/// `{I, X, Y, Z} ⊗ {I, X, Y, Z}` on two qubits; closed up to phase.
pub fn local_pauli() -> FiniteLuGroup {
    let ps = paulis();
    let elements = ps
        .iter()
        .flat_map(|a| ps.iter().map(move |b| LocalUnitary::new_unchecked(a.clone(), b.clone())))
        .collect();
    FiniteLuGroup {
        elements,
        closed: true,
    }
}

/// Diagonal `±1` matrices on each factor, modulo the global sign of each
/// factor: `2^(m-1) · 2^(n-1)` elements.
pub fn diagonal_signs(dim_a: usize, dim_b: usize) -> FiniteLuGroup {
    fn signs(d: usize) -> Vec<ComplexMatrix> {
        (0..1usize << (d - 1))
            .map(|mask| {
                let diag: Vec<f64> = (0..d)
                    .map(|k| if k > 0 && mask >> (k - 1) & 1 == 1 { -1.0 } else { 1.0 })
                    .collect();
                ComplexMatrix::from_real_diagonal(&diag)
            })
            .collect()
    }
    let sa = signs(dim_a);
    let sb = signs(dim_b);
    let elements = sa
        .iter()
        .flat_map(|a| sb.iter().map(move |b| LocalUnitary::new_unchecked(a.clone(), b.clone())))
        .collect();
    FiniteLuGroup {
        elements,
        closed: true,
    }
}

/// `(1/|G|) Σ_g g ρ g†`.
pub fn twirl_finite(rho: &BipartiteOperator, g: &FiniteLuGroup) -> Result<BipartiteOperator> {
    if !g.closed {
        return Err(Error::GroupNotClosed);
    }
    if rho.dims() != g.dims() {
        return Err(Error::DimensionMismatch {
            left: format!("{}⊗{}", rho.dim_a(), rho.dim_b()),
            right: format!("{}⊗{}", g.dims().0, g.dims().1),
        });
    }
    let d = rho.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for e in &g.elements {
        acc = &acc + rho.conjugate(e)?.matrix();
    }
    let avg = acc.scale_real(1.0 / g.len() as f64).hermitian_part();
    Ok(BipartiteOperator::from_hermitian(rho.dim_a(), rho.dim_b(), avg))
}

pub fn is_group_invariant(rho: &BipartiteOperator, g: &FiniteLuGroup) -> Result<bool> {
    Ok(twirl_finite(rho, g)?.distance(rho) <= TOLERANCES.group)
}

/// Elements of `g1` also in `g2` up to per-factor phase, in `g1`'s order.
pub fn intersection(g1: &FiniteLuGroup, g2: &FiniteLuGroup) -> FiniteLuGroup {
    let elements: Vec<LocalUnitary> = g1.elements.iter().filter(|e| g2.contains(e)).cloned().collect();
    let closed = g1.closed && g2.closed;
    FiniteLuGroup { elements, closed }
}

/// Given `ρ1 = σ1` and `ρ2 = σ2` already, checks that `ρ1` is invariant
/// under `g1` and `ρ2` under `g2`, then looks for the first element of
/// `g1 ∩ g2` carrying `σ3` onto `ρ3`.
///
/// A miss is a proof only if the caller vouches that the groups exhaust
/// the relevant commutants (`groups_exhaustive`); otherwise it is
/// reported as undecided.
#[allow(clippy::too_many_arguments)]
pub fn slu_triple_check(
    rho1: &BipartiteOperator,
    rho2: &BipartiteOperator,
    rho3: &BipartiteOperator,
    sigma3: &BipartiteOperator,
    g1: &FiniteLuGroup,
    g2: &FiniteLuGroup,
    groups_exhaustive: bool,
) -> Result<EquivalenceVerdict> {
    for x in [rho2, rho3, sigma3] {
        rho1.same_dims(x)?;
    }
    if !is_group_invariant(rho1, g1)? {
        return Err(Error::InvarianceFailed("the first operator is not invariant under the first group".into()));
    }
    if !is_group_invariant(rho2, g2)? {
        return Err(Error::InvarianceFailed("the second operator is not invariant under the second group".into()));
    }
    let common = intersection(g1, g2);
    let mut best: Option<(f64, LocalUnitary)> = None;
    for e in common.elements() {
        let d = sigma3.conjugate(e)?.distance(rho3);
        if d <= TOLERANCES.group {
            return Ok(EquivalenceVerdict::Equivalent {
                lu: e.clone(),
                residual: d * d,
            });
        }
        if best.as_ref().is_none_or(|(b, _)| d * d < *b) {
            best = Some((d * d, e.clone()));
        }
    }
    if groups_exhaustive {
        return Ok(EquivalenceVerdict::Inequivalent {
            certificate: Certificate::NoIntersectingElement {
                intersection_size: common.len(),
            },
        });
    }
    let (best_residual, best_lu) = best.unwrap_or_else(|| {
        let (m, n) = rho1.dims();
        (f64::INFINITY, LocalUnitary::identity(m, n))
    });
    Ok(EquivalenceVerdict::Undecided { best_residual, best_lu })
}
