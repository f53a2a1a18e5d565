//! Seeded generators for random vectors, unitaries and isometries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::linalg::{c64, ComplexMatrix, ComplexVector};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vector of independent standard complex Gaussian entries.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    ComplexVector::from_fn(dim, |_, _| {
        c64(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Uniformly distributed unit vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

/// Weights drawn uniformly from the probability simplex.
pub fn simplex_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Haar-distributed `rows × cols` isometry (orthonormal columns), `cols ≤ rows`.
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut j = 0;
    while j < cols {
        let mut v = gaussian_vector(rng, rows);
        for _ in 0..2 {
            for k in 0..j {
                let b = out.column(k).into_owned();
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            out.set_column(j, &v.unscale(n));
            j += 1;
        }
    }
    out
}

/// Haar-distributed unitary.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    isometry(rng, dim, dim)
}
