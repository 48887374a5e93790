//! Seeded random matrices used by verification, rotation and search.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{c, CMatrix, HermitianOperator};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-random unitary: QR of a complex Gaussian matrix with phases of `R` removed.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| {
        c(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random orthogonal matrix: QR of a real Gaussian matrix with sign-fixed diagonal.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let z = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let z = CMatrix::from_fn(d, d, |_, _| c(gaussian(rng), gaussian(rng)));
    HermitianOperator::from_hermitian((&z + z.adjoint()).scale(0.5))
}

/// Random positive semi-definite operator `G G†` with `G` of the given column rank.
pub fn random_psd<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> HermitianOperator {
    let g = CMatrix::from_fn(d, rank.max(1), |_, _| c(gaussian(rng), gaussian(rng)));
    HermitianOperator::from_hermitian(&g * g.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::frobenius;

    #[test]
    fn haar_unitary_is_unitary_and_seeded() {
        let u = haar_unitary(4, &mut rng(3));
        let id = CMatrix::identity(4, 4);
        assert!(frobenius(&(u.adjoint() * &u - id)) < 1e-13);
        assert_eq!(u, haar_unitary(4, &mut rng(3)));
        assert_ne!(u, haar_unitary(4, &mut rng(4)));
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let o = random_orthogonal(8, &mut rng(11));
        let e = o.transpose() * &o - DMatrix::<f64>::identity(8, 8);
        assert!(e.norm() < 1e-13);
    }

    #[test]
    fn streams_differ() {
        let a: f64 = rng_stream(1, 0).random();
        let b: f64 = rng_stream(1, 1).random();
        assert_ne!(a, b);
    }
}
