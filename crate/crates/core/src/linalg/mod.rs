// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra: Kronecker products, Pauli matrices, the
//! Hermitian eigensolver and the skew-Hermitian matrix exponential.

mod eig;
mod expm;

pub use eig::{hermitian_eig, HermitianEigen};
pub use expm::{expm_call_count, expm_skew_hermitian};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
pub type CMatrix = Array2<Complex64>;

/// Largest register handled by dense tensor products.
pub const MAX_QUBITS: usize = 14;

pub fn identity(dim: usize) -> CMatrix {
    Array2::eye(dim)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    Array2::zeros((rows, cols))
}

/// 2x2 Pauli X.
pub fn sigma_x() -> CMatrix {
    ndarray::array![
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    ]
}

/// 2x2 Pauli Y.
pub fn sigma_y() -> CMatrix {
    ndarray::array![
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
    ]
}

/// 2x2 Pauli Z.
pub fn sigma_z() -> CMatrix {
    ndarray::array![
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
    ]
}

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

/// Kronecker product with the left factor as the most significant qubit.
///
/// Fails once the result would exceed the [`MAX_QUBITS`] dense cap.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.nrows() * b.nrows();
    let cols = a.ncols() * b.ncols();
    let cap = 1usize << MAX_QUBITS;
    if rows > cap || cols > cap {
        return Err(Error::SizeCap {
            dim: rows.max(cols),
            max_qubits: MAX_QUBITS,
        });
    }
    Ok(ndarray::linalg::kron(a, b))
}

/// Kronecker product of a sequence of factors, leftmost = most significant.
pub fn tensor_product_all(factors: &[&CMatrix]) -> Result<CMatrix> {
    let mut out = identity(1);
    for f in factors {
        out = tensor_product(&out, f)?;
    }
    Ok(out)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.dim(), b.dim(), "max_abs_diff on mismatched shapes");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest absolute entry of `M - M†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest absolute entry of `U†U - 1`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let gram = dagger(u).dot(u);
    max_abs_diff(&gram, &identity(u.nrows()))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diag().sum()
}

/// Checks `dim = 2^n` and returns `n`.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim >= 2 && dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::DimensionMismatch(format!(
            "dimension {dim} is not a power of two >= 2"
        )))
    }
}
