//! Seeded random objects: Haar unitaries, states, Hermitian matrices.
//!
//! Everything takes an explicit generator so runs are reproducible.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::linalg::{
    inner, kron_vec, normalized, BipartiteOperator, ComplexMatrix, LocalUnitary,
};

/// Generator for sub-stream `stream` of the master `seed`.
pub fn sub_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| gaussian_complex(rng)).collect()
}

/// Uniformly random unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        if let Some(v) = normalized(&gaussian_vector(rng, dim)) {
            return v;
        }
    }
}

/// Haar-random unitary by Gram-Schmidt on Gaussian columns.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut w = gaussian_vector(rng, dim);
        for _ in 0..2 {
            for c in &cols {
                let p = inner(c, &w);
                for (wi, ci) in w.iter_mut().zip(c) {
                    *wi -= p * ci;
                }
            }
        }
        if let Some(w) = normalized(&w) {
            cols.push(w);
        }
    }
    ComplexMatrix::from_columns(&cols).expect("square by construction")
}

pub fn random_local_unitary<R: Rng + ?Sized>(rng: &mut R, dim_a: usize, dim_b: usize) -> LocalUnitary {
    LocalUnitary::new(haar_unitary(rng, dim_a), haar_unitary(rng, dim_b))
        .expect("Gram-Schmidt output is unitary")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Random full-rank density matrix `G G† / tr(G G†)` with Ginibre `G`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim_a: usize, dim_b: usize) -> BipartiteOperator {
    let d = dim_a * dim_b;
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let gg = g.matmul(&g.adjoint());
    let t = gg.trace().re;
    BipartiteOperator::from_hermitian(dim_a, dim_b, gg.scale_real(1.0 / t))
}

/// Random state with a well-separated spectrum: `Σ p_k |v_k⟩⟨v_k|` for a
/// Haar basis and weights `p_k ∝ k + 1 + u_k/2`, `u_k` uniform in `[0, 1)`.
pub fn random_nondegenerate_state<R: Rng + ?Sized>(
    rng: &mut R,
    dim_a: usize,
    dim_b: usize,
) -> BipartiteOperator {
    let d = dim_a * dim_b;
    let u = haar_unitary(rng, d);
    let w: Vec<f64> = (0..d).map(|k| k as f64 + 1.0 + 0.5 * rng.random::<f64>()).collect();
    let total: f64 = w.iter().sum();
    let terms: Vec<(f64, Vec<Complex64>)> = w
        .iter()
        .enumerate()
        .map(|(k, &p)| (p / total, u.column(k)))
        .collect();
    BipartiteOperator::mixture(&terms, dim_a, dim_b).expect("dimensions agree")
}

/// Random product vector `a ⊗ b` with its factors.
pub fn random_product<R: Rng + ?Sized>(
    rng: &mut R,
    dim_a: usize,
    dim_b: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    (random_unit_vector(rng, dim_a), random_unit_vector(rng, dim_b))
}

pub fn random_product_vector<R: Rng + ?Sized>(rng: &mut R, dim_a: usize, dim_b: usize) -> Vec<Complex64> {
    let (a, b) = random_product(rng, dim_a, dim_b);
    kron_vec(&a, &b)
}
