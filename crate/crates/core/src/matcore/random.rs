//! Random matrix tuples and Haar-distributed unitaries.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, MatrixTuple, Similarity};

/// Standard complex Gaussian: real and imaginary parts i.i.d. `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with entries `scale · CN(0, 1)`.
pub fn ginibre<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, |_, _| complex_gaussian(rng) * scale)
}

pub fn random_tuple<R: Rng + ?Sized>(g: usize, n: usize, scale: f64, rng: &mut R) -> MatrixTuple {
    MatrixTuple::new((0..g).map(|_| ginibre(n, scale, rng)).collect())
        .expect("components share a level")
}

/// Random tuple of unit Frobenius norm.
pub fn random_direction<R: Rng + ?Sized>(g: usize, n: usize, rng: &mut R) -> MatrixTuple {
    let t = random_tuple(g, n, 1.0, rng);
    let norm = t.frobenius_norm();
    t.scale(Complex64::new(1.0 / norm, 0.0))
}

/// Haar-distributed unitary: QR of a Ginibre matrix, with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    assert!(n > 0, "unitary dimension must be positive");
    let z = ginibre(n, 1.0, rng).to_nalgebra();
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases: Vec<Complex64> = (0..n)
        .map(|j| {
            let d = r[(j, j)];
            if d.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                d / d.norm()
            }
        })
        .collect();
    CMatrix::from_fn(n, |i, j| q[(i, j)] * phases[j])
}

/// Unit-disk uniform complex number.
fn unit_disk<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, theta)
}

/// `I + N` with `N` strictly upper triangular, entries uniform in the unit
/// disk, resampled until the condition number is at most `max_cond`.
pub fn upper_unipotent<R: Rng + ?Sized>(n: usize, max_cond: f64, rng: &mut R) -> Similarity {
    loop {
        let m = CMatrix::from_fn(n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => Complex64::new(1.0, 0.0),
            std::cmp::Ordering::Less => unit_disk(rng),
            std::cmp::Ordering::Greater => Complex64::new(0.0, 0.0),
        });
        if let Ok(s) = Similarity::new(m) {
            if s.cond() <= max_cond {
                return s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = SeedStream::new(7).rng();
        for _ in 0..100 {
            let u = haar_unitary(4, &mut rng);
            let err = (&u.adjoint() * &u).dist(&CMatrix::identity(4));
            assert!(err <= 1e-12 * 4.0, "unitarity error {err:e}");
        }
    }

    #[test]
    fn haar_entry_mean_vanishes() {
        // Haar measure is invariant under U ↦ e^{iθ}U, so E[U_11] = 0.
        let mut rng = SeedStream::new(11).rng();
        let draws = 10_000;
        let mean: Complex64 =
            (0..draws).map(|_| haar_unitary(3, &mut rng).get(0, 0)).sum::<Complex64>() / draws as f64;
        assert!(mean.norm() <= 5.0 / (draws as f64).sqrt(), "|mean| = {}", mean.norm());
    }

    #[test]
    fn haar_twirl_is_scalar() {
        // Schur: E[U* A U] = tr(A)/n · I.
        let mut rng = SeedStream::new(13).rng();
        let a = CMatrix::diag(&[Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)]);
        let draws = 10_000;
        let mut acc = CMatrix::zeros(2);
        for _ in 0..draws {
            let u = haar_unitary(2, &mut rng);
            acc += &(&(&u.adjoint() * &a) * &u);
        }
        let mean = acc.scale(Complex64::new(1.0 / draws as f64, 0.0));
        let err = mean.dist(&CMatrix::scalar(2, Complex64::new(2.0, 0.0)));
        assert!(err <= 5.0 / (draws as f64).sqrt() * a.frobenius_norm(), "err {err}");
    }

    #[test]
    fn twirl_error_halves_when_samples_quadruple() {
        // Median over seeds of err(4M)/err(M) should sit near 1/2.
        let a = CMatrix::from_real(3, &[1.0, 2.0, 0.0, 0.0, -1.0, 1.0, 3.0, 0.0, 2.0]).unwrap();
        let target = CMatrix::scalar(3, a.trace() / 3.0);
        let twirl_err = |m: usize, seed: u64| {
            let mut rng = SeedStream::new(seed).rng();
            let mut acc = CMatrix::zeros(3);
            for _ in 0..m {
                let u = haar_unitary(3, &mut rng);
                acc += &(&(&u.adjoint() * &a) * &u);
            }
            acc.scale(Complex64::new(1.0 / m as f64, 0.0)).dist(&target)
        };
        let mut ratios: Vec<f64> = (0..15)
            .map(|s| twirl_err(4000, 100 + s) / twirl_err(1000, 500 + s))
            .collect();
        ratios.sort_by(f64::total_cmp);
        let median = ratios[ratios.len() / 2];
        assert!((0.3..0.8).contains(&median), "median ratio {median}");
    }

    #[test]
    fn unipotent_similarities_are_bounded() {
        let mut rng = SeedStream::new(3).rng();
        for n in 2..5 {
            let s = upper_unipotent(n, 100.0, &mut rng);
            assert!(s.cond() <= 100.0);
            assert_eq!(s.matrix().get(n - 1, 0), Complex64::new(0.0, 0.0));
        }
    }
}
