//! Dense complex linear algebra for small bipartite systems.
//!
//! Matrices are row-major `Vec<Complex64>`. Bipartite indices follow the
//! usual convention: basis vector `|i⟩ ⊗ |j⟩` of `C^m ⊗ C^n` sits at row
//! `i * n + j`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::TOLERANCES;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

const MAX_JACOBI_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                expected: format!("{} entries", rows * cols),
                actual: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real entries given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Shape {
                expected: format!("columns of length {rows}"),
                actual: "ragged columns".into(),
            });
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Orthogonal projector `Σ |v⟩⟨v|` onto an orthonormal set.
    pub fn projector_onto(vectors: &[Vec<Complex64>], dim: usize) -> Self {
        let mut p = Self::zeros(dim, dim);
        for v in vectors {
            for i in 0..dim {
                for j in 0..dim {
                    p[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `M A M†`.
    pub fn conjugate_by(&self, m: &Self) -> Self {
        m.matmul(self).matmul(&m.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max |M - M†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut defect: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                defect = defect.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        defect
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && self.hermiticity_defect() <= TOLERANCES.hermiticity * (1.0 + self.max_abs())
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()))
    }

    /// `max |M†M - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = self.adjoint().matmul(self);
        g.distance_entrywise(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= TOLERANCES.orthonormality
    }

    fn distance_entrywise(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest off-diagonal modulus.
    pub fn offdiagonal_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    m = m.max(self[(i, j)].norm());
                }
            }
        }
        m
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| v.iter().map(|z| z / n).collect())
}

pub fn basis_vector(dim: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[i] = ONE;
    v
}

/// Gram-Schmidt against an orthonormal set. Returns the normalized residual
/// when its norm before normalization exceeds `threshold`.
pub fn orthogonalize_against(
    v: &[Complex64],
    basis: &[Vec<Complex64>],
    threshold: f64,
) -> Option<Vec<Complex64>> {
    let mut w = v.to_vec();
    // Two passes for numerical orthogonality.
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    (norm(&w) > threshold).then(|| normalized(&w)).flatten()
}

/// Extends an orthonormal set to an orthonormal basis of `C^dim`.
pub fn complete_basis(partial: &[Vec<Complex64>], dim: usize) -> Vec<Vec<Complex64>> {
    let mut basis = partial.to_vec();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        if let Some(w) = orthogonalize_against(&basis_vector(dim, i), &basis, 1e-6) {
            basis.push(w);
        }
    }
    basis
}

/// A unitary mapping each `from[k]` onto `to[k]`; both sets orthonormal.
/// The orthogonal complements are matched by an arbitrary completion.
pub fn unitary_mapping(
    from: &[Vec<Complex64>],
    to: &[Vec<Complex64>],
    dim: usize,
) -> Result<ComplexMatrix> {
    if from.len() != to.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot map {} vectors onto {}",
            from.len(),
            to.len()
        )));
    }
    let from = complete_basis(from, dim);
    let to = complete_basis(to, dim);
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (f, t) in from.iter().zip(&to) {
        for i in 0..dim {
            for j in 0..dim {
                u[(i, j)] += t[i] * f[j].conj();
            }
        }
    }
    Ok(u)
}

/// Which tensor factor an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::A => write!(f, "A"),
            Subsystem::B => write!(f, "B"),
        }
    }
}

/// An `mn × mn` Hermitian matrix tagged with its local dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteOperator {
    dim_a: usize,
    dim_b: usize,
    mat: ComplexMatrix,
}

impl BipartiteOperator {
    /// Validates shape and Hermiticity, then stores the exact Hermitian part.
    pub fn new(dim_a: usize, dim_b: usize, mat: ComplexMatrix) -> Result<Self> {
        let d = dim_a * dim_b;
        if dim_a == 0 || dim_b == 0 || mat.rows != d || mat.cols != d {
            return Err(Error::Shape {
                expected: format!("{d}x{d} for {dim_a}⊗{dim_b}"),
                actual: format!("{}x{}", mat.rows, mat.cols),
            });
        }
        if !mat.is_hermitian() {
            return Err(Error::NotHermitian {
                defect: mat.hermiticity_defect(),
            });
        }
        Ok(Self {
            dim_a,
            dim_b,
            mat: mat.hermitian_part(),
        })
    }

    /// For results of operations that preserve Hermiticity up to rounding.
    pub(crate) fn from_hermitian(dim_a: usize, dim_b: usize, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.rows, dim_a * dim_b);
        Self {
            dim_a,
            dim_b,
            mat: mat.hermitian_part(),
        }
    }

    pub fn identity(dim_a: usize, dim_b: usize) -> Self {
        Self::from_hermitian(dim_a, dim_b, ComplexMatrix::identity(dim_a * dim_b))
    }

    pub fn zeros(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self::from_hermitian(dim_a, dim_b, ComplexMatrix::zeros(d, d))
    }

    /// `|ψ⟩⟨ψ|` (not normalized).
    pub fn pure(psi: &[Complex64], dim_a: usize, dim_b: usize) -> Result<Self> {
        if psi.len() != dim_a * dim_b {
            return Err(Error::Shape {
                expected: format!("vector of length {}", dim_a * dim_b),
                actual: format!("length {}", psi.len()),
            });
        }
        Ok(Self::from_hermitian(dim_a, dim_b, ComplexMatrix::outer(psi, psi)))
    }

    /// `Σ w_k |v_k⟩⟨v_k|`.
    pub fn mixture(terms: &[(f64, Vec<Complex64>)], dim_a: usize, dim_b: usize) -> Result<Self> {
        let d = dim_a * dim_b;
        let mut m = ComplexMatrix::zeros(d, d);
        for (w, v) in terms {
            if v.len() != d {
                return Err(Error::Shape {
                    expected: format!("vector of length {d}"),
                    actual: format!("length {}", v.len()),
                });
            }
            m = &m + &ComplexMatrix::outer(v, v).scale_real(*w);
        }
        Ok(Self::from_hermitian(dim_a, dim_b, m))
    }

    /// Orthogonal projector onto an orthonormal set of bipartite vectors.
    pub fn projector(vectors: &[Vec<Complex64>], dim_a: usize, dim_b: usize) -> Self {
        Self::from_hermitian(
            dim_a,
            dim_b,
            ComplexMatrix::projector_onto(vectors, dim_a * dim_b),
        )
    }

    /// `a ⊗ b` for Hermitian local factors.
    pub fn product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() || !b.is_square() {
            return Err(Error::Shape {
                expected: "square local factors".into(),
                actual: format!("{}x{} and {}x{}", a.rows, a.cols, b.rows, b.cols),
            });
        }
        Self::new(a.rows, b.rows, kron(a, b))
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: format!("{}⊗{}", self.dim_a, self.dim_b),
                right: format!("{}⊗{}", other.dim_a, other.dim_b),
            });
        }
        Ok(())
    }

    /// Transpose on the B factor: `((i,j),(k,l)) ← ((i,l),(k,j))`.
    pub fn partial_transpose(&self) -> Self {
        let (m, n) = (self.dim_a, self.dim_b);
        let _ = m;
        let src = &self.mat;
        let pt = ComplexMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            let (i, j) = (r / n, r % n);
            let (k, l) = (c / n, c % n);
            src[(i * n + l, k * n + j)]
        });
        Self::from_hermitian(self.dim_a, self.dim_b, pt)
    }

    /// Trace over the named factor; the result lives on the other factor.
    pub fn partial_trace(&self, traced: Subsystem) -> ComplexMatrix {
        let (m, n) = (self.dim_a, self.dim_b);
        let src = &self.mat;
        match traced {
            Subsystem::B => ComplexMatrix::from_fn(m, m, |i, k| {
                (0..n).map(|j| src[(i * n + j, k * n + j)]).sum()
            }),
            Subsystem::A => ComplexMatrix::from_fn(n, n, |j, l| {
                (0..m).map(|i| src[(i * n + j, i * n + l)]).sum()
            }),
        }
    }

    /// `(U ⊗ V) X (U ⊗ V)†`.
    pub fn conjugate(&self, lu: &LocalUnitary) -> Result<Self> {
        if lu.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                left: format!("{}⊗{}", self.dim_a, self.dim_b),
                right: format!("{}⊗{}", lu.u.rows, lu.v.rows),
            });
        }
        Ok(Self::from_hermitian(
            self.dim_a,
            self.dim_b,
            self.mat.conjugate_by(&lu.full()),
        ))
    }

    /// `X + x I`.
    pub fn shifted(&self, x: f64) -> Self {
        let mut m = self.mat.clone();
        for i in 0..self.dim() {
            m[(i, i)] += x;
        }
        Self::from_hermitian(self.dim_a, self.dim_b, m)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_hermitian(self.dim_a, self.dim_b, self.mat.scale_real(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dims(other)?;
        Ok(Self::from_hermitian(self.dim_a, self.dim_b, &self.mat + &other.mat))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dims(other)?;
        Ok(Self::from_hermitian(self.dim_a, self.dim_b, &self.mat - &other.mat))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.mat.distance(&other.mat)
    }

    /// `⟨ψ|X|ψ⟩`.
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        inner(psi, &self.mat.apply(psi)).re
    }

    pub fn eigen(&self) -> HermitianEigen {
        hermitian_eig(&self.mat).expect("BipartiteOperator is Hermitian by construction")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("nonempty")
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -TOLERANCES.psd
    }

    /// Frobenius norm of `X² - X`.
    pub fn projector_defect(&self) -> f64 {
        self.mat.matmul(&self.mat).distance(&self.mat)
    }

    pub fn require_projector(&self) -> Result<()> {
        let defect = self.projector_defect();
        if defect > TOLERANCES.projector {
            return Err(Error::NotProjector { defect });
        }
        Ok(())
    }

    pub fn require_psd(&self) -> Result<f64> {
        let min = self.min_eigenvalue();
        if min < -TOLERANCES.psd {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        Ok(min)
    }

    /// Exchanges the tensor factors: the result lives on `C^n ⊗ C^m`.
    pub fn swapped(&self) -> Self {
        let (m, n) = (self.dim_a, self.dim_b);
        let src = &self.mat;
        let out = ComplexMatrix::from_fn(m * n, m * n, |r, c| {
            let (j, i) = (r / m, r % m);
            let (l, k) = (c / m, c % m);
            src[(i * n + j, k * n + l)]
        });
        Self::from_hermitian(n, m, out)
    }

    /// Rank as the number of eigenvalues above `tol * max(1, ‖X‖)`.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        let eig = self.eigen();
        let scale = eig.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        eig.values.iter().filter(|v| v.abs() > tol * scale).count()
    }

    /// Orthonormal basis of the range (eigenvectors with eigenvalue above 1/2
    /// for a projector, above `tol` in general).
    pub fn range_basis(&self, tol: f64) -> Vec<Vec<Complex64>> {
        let eig = self.eigen();
        let scale = eig.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        (0..self.dim())
            .rev()
            .filter(|&k| eig.values[k].abs() > tol * scale)
            .map(|k| eig.vectors.column(k))
            .collect()
    }
}

/// A pair `(U, V)` of unitaries acting as `U ⊗ V`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    u: ComplexMatrix,
    v: ComplexMatrix,
}

impl LocalUnitary {
    pub fn new(u: ComplexMatrix, v: ComplexMatrix) -> Result<Self> {
        for m in [&u, &v] {
            let defect = m.unitarity_defect();
            if defect > TOLERANCES.orthonormality {
                return Err(Error::NotUnitary { defect });
            }
        }
        Ok(Self { u, v })
    }

    /// Skips validation; for factors built from eigendecompositions or
    /// products of validated unitaries.
    pub(crate) fn new_unchecked(u: ComplexMatrix, v: ComplexMatrix) -> Self {
        Self { u, v }
    }

    pub fn identity(dim_a: usize, dim_b: usize) -> Self {
        Self {
            u: ComplexMatrix::identity(dim_a),
            v: ComplexMatrix::identity(dim_b),
        }
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.u.rows, self.v.rows)
    }

    /// The full `mn × mn` matrix `U ⊗ V`.
    pub fn full(&self) -> ComplexMatrix {
        kron(&self.u, &self.v)
    }

    /// `(U₁ ⊗ V₁)(U₂ ⊗ V₂) = U₁U₂ ⊗ V₁V₂`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            u: self.u.matmul(&other.u),
            v: self.v.matmul(&other.v),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            u: self.u.adjoint(),
            v: self.v.adjoint(),
        }
    }

    /// `(U ⊗ V)|x⟩` without forming the Kronecker product.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        apply_local(&self.u, &self.v, x)
    }

    /// Equality of `U ⊗ V` as a map, allowing an independent global phase
    /// on each factor.
    pub fn equals_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.dims() == other.dims()
            && same_up_to_phase(&self.u, &other.u, tol)
            && same_up_to_phase(&self.v, &other.v, tol)
    }

    /// Swaps the factors: `U ⊗ V` becomes `V ⊗ U`.
    pub fn swapped(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }
}

/// `(U ⊗ V) x` via the reshaping `X ↦ U X Vᵀ`.
pub fn apply_local(u: &ComplexMatrix, v: &ComplexMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let (m, n) = (u.rows, v.rows);
    debug_assert_eq!(x.len(), m * n);
    // t = X Vᵀ : t[i][l] = Σ_j x[i][j] v[l][j]
    let mut t = vec![ZERO; m * n];
    for i in 0..m {
        for l in 0..n {
            let mut s = ZERO;
            for j in 0..n {
                s += x[i * n + j] * v[(l, j)];
            }
            t[i * n + l] = s;
        }
    }
    let mut out = vec![ZERO; m * n];
    for k in 0..m {
        for i in 0..m {
            let a = u[(k, i)];
            if a == ZERO {
                continue;
            }
            for l in 0..n {
                out[k * n + l] += a * t[i * n + l];
            }
        }
    }
    out
}

/// `|tr(A†B)| / n ≈ 1` for unitaries equal up to a global phase.
pub fn same_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    if a.rows != b.rows || a.cols != b.cols || a.rows == 0 {
        return false;
    }
    let overlap = a.adjoint().matmul(b).trace();
    let n = a.rows as f64;
    if overlap.norm() < 0.5 * n {
        return false;
    }
    let phase = overlap / overlap.norm();
    a.scale(phase).distance(b) <= tol * n.sqrt()
}

/// Eigenvalues in ascending order and orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vector(k);
            m = &m + &ComplexMatrix::outer(&v, &v).scale_real(lambda);
        }
        m
    }
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
///
/// Each rotation is `J = D R D†` with `D = diag(e^{iφ/2}, e^{-iφ/2})` on the
/// pivot pair, so that `J† A J` zeroes `a_pq` after the real symmetric
/// rotation `R`. Sweeps stop once the off-diagonal Frobenius mass falls below
/// `jacobi_offdiag * max(1, ‖A‖_F)`.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::Shape {
            expected: "square matrix".into(),
            actual: format!("{}x{}", h.rows, h.cols),
        });
    }
    if !h.is_hermitian() {
        return Err(Error::NotHermitian {
            defect: h.hermiticity_defect(),
        });
    }
    let n = h.rows;
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = TOLERANCES.jacobi_offdiag * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let abs_g = g.norm();
                if abs_g < f64::MIN_POSITIVE.sqrt() {
                    continue;
                }
                let phase = g / abs_g;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * abs_g);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let j_pp = Complex64::new(c, 0.0);
                let j_pq = phase * s;
                let j_qp = -phase.conj() * s;
                let j_qq = Complex64::new(c, 0.0);

                // A ← A J (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                }
                // A ← J† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                // V ← V J
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// `exp(i G)` for Hermitian `G`, via the eigendecomposition of `G`.
pub fn unitary_from_generator(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(g)?;
    let n = g.rows;
    let v = &eig.vectors;
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&l| Complex64::from_polar(1.0, l))
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum()
    }))
}

/// Hermitian matrix from `n²` real parameters: diagonal entries first, then
/// real and imaginary parts of the strict upper triangle.
pub fn hermitian_from_params(n: usize, params: &[f64]) -> ComplexMatrix {
    debug_assert_eq!(params.len(), n * n);
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = Complex64::new(params[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = Complex64::new(params[k], params[k + 1]);
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
            k += 2;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn phi_plus() -> Vec<Complex64> {
        vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)]
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let d = kron(
            &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
            &ComplexMatrix::from_real_diagonal(&[1.0, 1.0]),
        );
        assert_eq!(d, ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_places_block() {
        let k = kron(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), &pauli_x());
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        assert_eq!(k, expected);
    }

    #[test]
    fn partial_transpose_identity_and_involution() {
        let id = BipartiteOperator::identity(2, 3);
        assert_eq!(id.partial_transpose(), id);
        let psi = BipartiteOperator::pure(&phi_plus(), 2, 2).unwrap();
        assert!(psi.partial_transpose().partial_transpose().distance(&psi) < 1e-15);
    }

    #[test]
    fn partial_transpose_of_bell_projector() {
        let psi = BipartiteOperator::pure(&phi_plus(), 2, 2).unwrap();
        let vals = psi.partial_transpose().eigenvalues();
        for (got, want) in vals.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn partial_traces() {
        let psi = BipartiteOperator::pure(&phi_plus(), 2, 2).unwrap();
        let ra = psi.partial_trace(Subsystem::B);
        assert!(ra.distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        let zz = BipartiteOperator::pure(&basis_vector(4, 0), 2, 2).unwrap();
        assert_eq!(
            zz.partial_trace(Subsystem::B),
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0])
        );
        let id = BipartiteOperator::identity(2, 2);
        assert_eq!(id.partial_trace(Subsystem::A), ComplexMatrix::identity(2).scale_real(2.0));
    }

    #[test]
    fn partial_trace_of_rectangular_product() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 2.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.2], &[0.0, 3.0, 0.0], &[0.2, 0.0, 0.5]]);
        let ab = BipartiteOperator::product(&a, &b).unwrap();
        assert!(ab.partial_trace(Subsystem::B).distance(&a.scale_real(4.5)) < 1e-14);
        assert!(ab.partial_trace(Subsystem::A).distance(&b.scale_real(3.0)) < 1e-14);
    }

    #[test]
    fn eig_of_diagonal() {
        let eig = hermitian_eig(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eig_of_pt_block() {
        let block = ComplexMatrix::from_real_rows(&[&[0.1, -0.2], &[-0.2, 0.1]]);
        let eig = hermitian_eig(&block).unwrap();
        assert!((eig.values[0] + 0.1).abs() < 1e-15);
        assert!((eig.values[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn eig_reconstructs_complex_matrix() {
        let h = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(i as f64, 0.0)
            } else if i < j {
                c(0.3 * (i + j) as f64, 0.7)
            } else {
                c(0.3 * (i + j) as f64, -0.7)
            }
        });
        let eig = hermitian_eig(&h).unwrap();
        assert!(eig.reconstruct().distance(&h) < 1e-12);
        assert!(eig.vectors.unitarity_defect() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn generator_exponentials() {
        let z = unitary_from_generator(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(z.distance(&ComplexMatrix::identity(3)) < 1e-15);

        let u = unitary_from_generator(&ComplexMatrix::from_real_diagonal(&[PI, 0.0])).unwrap();
        assert!(u.distance(&ComplexMatrix::from_real_diagonal(&[-1.0, 1.0])) < 1e-15);

        let ix = unitary_from_generator(&pauli_x().scale_real(PI / 2.0)).unwrap();
        assert!(ix.distance(&pauli_x().scale(c(0.0, 1.0))) < 1e-14);
    }

    #[test]
    fn generator_must_be_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(unitary_from_generator(&m).is_err());
    }

    #[test]
    fn operator_rejects_non_hermitian_and_bad_shape() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            BipartiteOperator::new(1, 2, m),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            BipartiteOperator::new(2, 2, ComplexMatrix::identity(3)),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn local_apply_matches_kron() {
        let u = unitary_from_generator(&ComplexMatrix::from_real_rows(&[&[0.3, 0.1], &[0.1, -0.2]]))
            .unwrap();
        let v = unitary_from_generator(&hermitian_from_params(
            3,
            &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        ))
        .unwrap();
        let lu = LocalUnitary::new(u, v).unwrap();
        let x: Vec<Complex64> = (0..6).map(|k| c(k as f64, 1.0 - k as f64)).collect();
        let direct = lu.full().apply(&x);
        let fast = lu.apply(&x);
        assert!(direct.iter().zip(&fast).all(|(a, b)| (a - b).norm() < 1e-13));
    }

    #[test]
    fn phase_equality() {
        let x = pauli_x();
        assert!(same_up_to_phase(&x, &x.scale(c(0.0, 1.0)), 1e-12));
        assert!(!same_up_to_phase(&x, &ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn swap_of_product() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diagonal(&[3.0, 4.0, 5.0]);
        let ab = BipartiteOperator::product(&a, &b).unwrap();
        let ba = BipartiteOperator::product(&b, &a).unwrap();
        assert_eq!(ab.swapped(), ba);
    }

    #[test]
    fn unitary_mapping_sends_sets() {
        let from = vec![basis_vector(3, 0), basis_vector(3, 2)];
        let to = vec![
            normalized(&[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap(),
            normalized(&[c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]).unwrap(),
        ];
        let u = unitary_mapping(&from, &to, 3).unwrap();
        assert!(u.is_unitary());
        for (f, t) in from.iter().zip(&to) {
            let img = u.apply(f);
            assert!(img.iter().zip(t).all(|(a, b)| (a - b).norm() < 1e-14));
        }
    }
}
