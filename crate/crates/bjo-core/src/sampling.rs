//! Seeded random matrices: Ginibre draws, unitaries, and positive factors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{c64, CMatrix};

/// Standard complex Gaussian: independent N(0, 1/2) real and imaginary parts.
pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re / 2f64.sqrt(), im / 2f64.sqrt())
}

/// Ginibre rectangular draw: i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| standard_complex(rng))
}

/// Haar-like unitary from the QR factorization of a Ginibre draw, with the
/// R-diagonal phases absorbed so the factor is uniquely determined.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = ginibre(rng, n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 1e-300 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Matrix with orthonormal columns (rows >= cols) or orthonormal rows
/// (rows < cols), from the QR factorization of a Ginibre draw.
pub fn orthonormal_factor<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    if rows >= cols {
        let g = ginibre(rng, rows, cols);
        let qr = g.qr();
        let q = qr.q();
        CMatrix::from_fn(rows, cols, |i, j| q[(i, j)])
    } else {
        orthonormal_factor(rng, cols, rows).adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let u = random_unitary(&mut rng, n);
            let err = (u.adjoint() * &u - CMatrix::identity(n, n))
                .map(|z| z.norm())
                .max();
            assert!(err < 1e-12, "n = {n}: unitarity defect {err}");
        }
    }

    #[test]
    fn orthonormal_columns_and_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let tall = orthonormal_factor(&mut rng, 4, 2);
        let err = (tall.adjoint() * &tall - CMatrix::identity(2, 2))
            .map(|z| z.norm())
            .max();
        assert!(err < 1e-12);
        let wide = orthonormal_factor(&mut rng, 2, 4);
        let err = (&wide * wide.adjoint() - CMatrix::identity(2, 2))
            .map(|z| z.norm())
            .max();
        assert!(err < 1e-12);
    }

    #[test]
    fn draws_are_deterministic_per_seed() {
        let a = ginibre(&mut ChaCha8Rng::seed_from_u64(42), 3, 3);
        let b = ginibre(&mut ChaCha8Rng::seed_from_u64(42), 3, 3);
        assert_eq!(a, b);
    }
}
