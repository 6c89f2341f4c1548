//! Haar-random unitaries.
//!
//! Sampling uses the QR decomposition of a complex Ginibre matrix with the
//! phases of `R`'s diagonal absorbed into `Q`. Every sampler is a pure
//! function of its seed and stream, so results are reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{ComplexMatrix, C64};

#[derive(Debug, Clone)]
pub struct HaarSampler {
    rng: ChaCha8Rng,
}

impl HaarSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `index` derived from `seed`; used for per-sample
    /// parallelism.
    pub fn stream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Standard complex normal (unit variance per real component).
    pub fn gaussian(&mut self) -> C64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        C64::new(re, im)
    }

    /// Haar-distributed element of U(d).
    pub fn unitary(&mut self, d: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(d, d, |_, _| self.gaussian());
        let qr = g.to_nalgebra().qr();
        let (q, r) = (qr.q(), qr.r());
        let q = ComplexMatrix::from_nalgebra(&q);
        ComplexMatrix::from_fn(d, d, |row, col| {
            let rd = r[(col, col)];
            let phase = if rd.norm() > 0.0 {
                rd / rd.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            q[(row, col)] * phase
        })
    }

    /// Haar-distributed element of SU(d).
    pub fn special_unitary(&mut self, d: usize) -> ComplexMatrix {
        su_normalize(&self.unitary(d))
    }
}

/// Haar-random SU(d) element from a fixed seed.
pub fn haar_unitary(d: usize, seed: u64) -> ComplexMatrix {
    HaarSampler::new(seed).special_unitary(d)
}

/// Rescale by the principal root `det(U)^{-1/d}` so the determinant is one.
pub fn su_normalize(u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.rows();
    let det = u.to_nalgebra().determinant();
    let root = C64::from_polar(det.norm().powf(-1.0 / d as f64), -det.arg() / d as f64);
    u.scale(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;

    #[test]
    fn samples_are_special_unitary() {
        let mut s = HaarSampler::new(3);
        for d in 1..=5 {
            let u = s.special_unitary(d);
            assert!(u.unitarity_deviation() < 1e-12);
            let det = u.to_nalgebra().determinant();
            assert!((det - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        assert_eq!(haar_unitary(4, 99), haar_unitary(4, 99));
        assert_ne!(haar_unitary(4, 99), haar_unitary(4, 100));
        let a = HaarSampler::stream(5, 2).unitary(3);
        let b = HaarSampler::stream(5, 2).unitary(3);
        assert_eq!(a, b);
        assert_ne!(a, HaarSampler::stream(5, 3).unitary(3));
    }

    #[test]
    fn second_moment_matches_schur_orthogonality() {
        // E[U ⊗ Ū] = |1>><<1| / d
        let d = 2;
        let samples = 10_000;
        let mut s = HaarSampler::new(17);
        let mut acc = ComplexMatrix::zeros(d * d, d * d);
        for _ in 0..samples {
            let u = s.special_unitary(d);
            acc += &kron(&u, &u.conj());
        }
        let mean = acc.scale_real(1.0 / samples as f64);
        let expected = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
            let hit = r / d == r % d && c / d == c % d;
            C64::new(if hit { 1.0 / d as f64 } else { 0.0 }, 0.0)
        });
        assert!(mean.max_abs_diff(&expected) < 5e-2);
    }
}
