// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
//!
//! Dimensions here stay small (the four-spin register is 16x16), where
//! Jacobi is both simple and accurate to a few ulps.

use ndarray::Array2;
use num_complex::Complex64;

use super::{hermiticity_defect, max_abs, CMatrix};
use crate::error::{Error, Result};

/// Eigendecomposition `A = V diag(values) V†` of a Hermitian matrix.
///
/// `values` are ascending; column `k` of `vectors` is the eigenvector for
/// `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const MAX_SWEEPS: usize = 60;

/// Diagonalizes a Hermitian matrix.
///
/// Rejects inputs whose Hermiticity defect exceeds `1e-8` relative to the
/// largest entry.
pub fn hermitian_eig(matrix: &CMatrix) -> Result<HermitianEigen> {
    let n = matrix.nrows();
    if n != matrix.ncols() || n == 0 {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig needs a square nonempty matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let scale = max_abs(matrix).max(1.0);
    let defect = hermiticity_defect(matrix);
    if defect > 1e-8 * scale {
        return Err(Error::InvalidMatrix {
            kind: "Hermitian matrix",
            detail: format!("Hermiticity defect {defect:.3e} exceeds 1e-8 x scale"),
        });
    }

    // Work on an exactly Hermitian copy: upper triangle wins.
    let mut a = matrix.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let upper = a[(i, j)];
            a[(j, i)] = upper.conj();
        }
    }
    let mut v: CMatrix = Array2::eye(n);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = a[(p, q)];
                let abs_beta = beta.norm();
                if abs_beta == 0.0 {
                    continue;
                }
                let phase = beta / abs_beta;
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                let tau = (gamma - alpha) / (2.0 * abs_beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_col = phase.conj() * s; // s e^{-i phi}
                let c_col = phase.conj() * c;
                let s_row = phase * s; // s e^{+i phi}
                let c_row = phase * c;

                // A <- A R, columns p and q
                for i in 0..n {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    a[(i, p)] = ap * c - aq * s_col;
                    a[(i, q)] = ap * s + aq * c_col;
                }
                // A <- R† A, rows p and q
                for j in 0..n {
                    let ap = a[(p, j)];
                    let aq = a[(q, j)];
                    a[(p, j)] = ap * c - aq * s_row;
                    a[(q, j)] = ap * s + aq * c_row;
                }
                // V <- V R
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c - vq * s_col;
                    v[(i, q)] = vp * s + vq * c_col;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

impl HermitianEigen {
    /// Rebuilds `V f(diag) V†` for a complex-valued spectral function.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled[(i, k)] *= w;
            }
        }
        scaled.dot(&super::dagger(&self.vectors))
    }
}
