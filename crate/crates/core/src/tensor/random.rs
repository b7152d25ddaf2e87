//! Seeded Haar sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ket::Ket;
use super::linalg::orthogonal_residual;
use super::matrix::{CMatrix, C64};

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Mix a base seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Haar-distributed unitary: Gram-Schmidt on the columns of a complex
/// Ginibre matrix, which yields the Q factor with a positive R diagonal.
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    assert!(dim >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let col: Vec<C64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
        // A Gaussian column is almost surely independent; redraw otherwise.
        if let Some(q) = orthogonal_residual(&basis, &col, 1e-8) {
            basis.push(q);
        }
    }
    CMatrix::from_columns(dim, &basis)
}

/// Haar-random unit ket.
pub fn random_ket(dim: usize, seed: u64) -> Ket {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
    Ket::normalized(v).expect("gaussian vector is nonzero")
}
