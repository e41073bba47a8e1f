// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential of skew-Hermitian generators via eigendecomposition.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use super::{hermitian_eig, max_abs, CMatrix};
use crate::error::{Error, Result};

/// Process-wide count of matrix exponentials evaluated so far.
///
/// The phase-only pulse engine precomputes its propagator kernel once and
/// must never exponentiate again during segment evaluation; tests pin that
/// down by snapshotting this counter.
static EXPM_CALLS: AtomicU64 = AtomicU64::new(0);

pub fn expm_call_count() -> u64 {
    EXPM_CALLS.load(Ordering::SeqCst)
}

/// `exp(G)` for skew-Hermitian `G = -i H`.
///
/// Diagonalizes the Hermitian `H = i G` and exponentiates the spectrum, so
/// the result is unitary to machine precision. Rejects generators whose
/// skew-Hermiticity defect `max|G + G†|` exceeds `1e-10` (relative to the
/// largest entry for generators above unit scale).
pub fn expm_skew_hermitian(generator: &CMatrix) -> Result<CMatrix> {
    let n = generator.nrows();
    if n != generator.ncols() || n == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expm needs a square nonempty matrix, got {}x{}",
            generator.nrows(),
            generator.ncols()
        )));
    }
    let scale = max_abs(generator).max(1.0);
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((generator[(i, j)] + generator[(j, i)].conj()).norm());
        }
    }
    if defect > 1e-10 * scale {
        return Err(Error::InvalidMatrix {
            kind: "skew-Hermitian generator",
            detail: format!("defect max|G + G†| = {defect:.3e} exceeds 1e-10 x scale"),
        });
    }

    EXPM_CALLS.fetch_add(1, Ordering::SeqCst);

    // H = iG is Hermitian; exp(G) = exp(-iH) = V e^{-i lambda} V†.
    let h = generator.mapv(|z| Complex64::new(0.0, 1.0) * z);
    let eig = hermitian_eig(&h)?;
    Ok(eig.apply_spectral(|lambda| Complex64::new(0.0, -lambda).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff, sigma_x, unitarity_defect};
    use ndarray::Array2;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    /// Independent oracle: truncated Taylor series with scaling and squaring.
    pub(crate) fn expm_taylor(m: &CMatrix) -> CMatrix {
        let n = m.nrows();
        let norm = crate::linalg::max_abs(m) * n as f64;
        let squarings = norm.log2().ceil().max(0.0) as u32 + 4;
        let scaled = m.mapv(|z| z / (2.0f64.powi(squarings as i32)));
        let mut out: CMatrix = Array2::eye(n);
        let mut term: CMatrix = Array2::eye(n);
        for k in 1..=24 {
            term = term.dot(&scaled).mapv(|z| z / k as f64);
            out = out + &term;
        }
        for _ in 0..squarings {
            out = out.dot(&out);
        }
        out
    }

    fn minus_i() -> Complex64 {
        Complex64::new(0.0, -1.0)
    }

    #[test]
    fn zero_generator_is_identity() {
        let z: CMatrix = Array2::zeros((4, 4));
        let u = expm_skew_hermitian(&z).unwrap();
        assert!(max_abs_diff(&u, &identity(4)) < 1e-15);
    }

    #[test]
    fn half_pi_x_rotation() {
        let gen = sigma_x().mapv(|z| z * minus_i() * FRAC_PI_2);
        let u = expm_skew_hermitian(&gen).unwrap();
        let expect = sigma_x().mapv(|z| z * minus_i());
        assert!(max_abs_diff(&u, &expect) < 1e-14);
    }

    #[test]
    fn matches_taylor_oracle_on_random_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 4, 8, 16] {
            let mut h: CMatrix = Array2::zeros((n, n));
            for i in 0..n {
                h[(i, i)] = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
                for j in (i + 1)..n {
                    let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
            let gen = h.mapv(|z| z * minus_i());
            let u = expm_skew_hermitian(&gen).unwrap();
            let reference = expm_taylor(&gen);
            assert!(max_abs_diff(&u, &reference) < 1e-12);
            assert!(unitarity_defect(&u) < 1e-12);
        }
    }

    #[test]
    fn rejects_non_skew_input() {
        let m = identity(3);
        assert!(expm_skew_hermitian(&m).is_err());
    }

    #[test]
    fn counter_increments() {
        let before = expm_call_count();
        let z: CMatrix = Array2::zeros((2, 2));
        let _ = expm_skew_hermitian(&z).unwrap();
        assert!(expm_call_count() > before);
    }
}
