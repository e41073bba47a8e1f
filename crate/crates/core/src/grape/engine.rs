// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Segment and pulse propagators through the `Z X Z†` factorization.

use ndarray::Array2;
use num_complex::Complex64;

use super::PulseSpec;
use crate::error::{Error, Result};
use crate::linalg::{expm_skew_hermitian, qubit_count, CMatrix};
use crate::qstate::UnitaryMatrix;
use crate::spin::{control_operators, iz_diagonal};

/// Unitarity slack for long segment products.
pub const PULSE_PRODUCT_TOL: f64 = 1e-10;

/// Propagator kernel for one `(H0, rf scale)` pair.
///
/// Construction performs the single matrix exponential
/// `X = exp(-i (H0 + s Omega Ix) dt)`; every later call is elementwise
/// phase work and matrix products only.
#[derive(Debug, Clone)]
pub struct PropagatorContext {
    dim: usize,
    iz_diag: Vec<f64>,
    x: CMatrix,
}

impl PropagatorContext {
    pub fn new(h0: &CMatrix, pulse: &PulseSpec, rf_scale: f64) -> Result<Self> {
        pulse.validate()?;
        if !(rf_scale > 0.0) || !rf_scale.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rf scale {rf_scale} must be positive"
            )));
        }
        let n = qubit_count(h0.nrows())?;
        if h0.nrows() != h0.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "drift Hamiltonian must be square, got {}x{}",
                h0.nrows(),
                h0.ncols()
            )));
        }
        let ix = control_operators(n).ix;
        let drive = rf_scale * pulse.amplitude_rad_s;
        let generator = (h0 + &ix.mapv(|z| z * drive))
            .mapv(|z| z * Complex64::new(0.0, -pulse.dt_s));
        let x = expm_skew_hermitian(&generator)?;
        Ok(PropagatorContext {
            dim: h0.nrows(),
            iz_diag: iz_diagonal(n),
            x,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[cfg(test)]
    pub(crate) fn iz_diag(&self) -> &[f64] {
        &self.iz_diag
    }

    /// Diagonal of `Z = exp(-i phi Iz)`.
    fn z_phases(&self, phi: f64) -> Vec<Complex64> {
        self.iz_diag
            .iter()
            .map(|&m| Complex64::new(0.0, -phi * m).exp())
            .collect()
    }

    /// `U_j = Z_j X Z_j†`: entry `(a, b)` picks up `exp(-i phi (m_a - m_b))`.
    pub fn segment_unitary(&self, phi: f64) -> CMatrix {
        let z = self.z_phases(phi);
        let d = self.dim;
        let mut out = Array2::zeros((d, d));
        for a in 0..d {
            for b in 0..d {
                out[(a, b)] = z[a] * self.x[(a, b)] * z[b].conj();
            }
        }
        out
    }

    /// Time-ordered product `U_N ... U_1` (earliest segment rightmost).
    pub fn pulse_unitary(&self, phases: &[f64]) -> CMatrix {
        let mut u: CMatrix = Array2::eye(self.dim);
        for &phi in phases {
            u = self.segment_unitary(phi).dot(&u);
        }
        u
    }

    /// `Phi = |tr(V† U(T))|^2 / d^2`.
    pub fn fidelity(&self, phases: &[f64], target: &CMatrix) -> f64 {
        let u = self.pulse_unitary(phases);
        fidelity_from_overlap(overlap(target, &u), self.dim)
    }

    /// Fidelity and its exact phase gradient in one forward/backward pass.
    ///
    /// With `F_j = U_j ... U_1`, `P_j = V† U_N ... U_{j+1}` and
    /// `T_j = tr(P_j Iz F_j)`, the segment rule `dU_j/dphi = i [U_j, Iz]`
    /// gives `dc/dphi_j = i (T_{j-1} - T_j)` for the overlap
    /// `c = tr(V† U(T))`.
    pub fn fidelity_and_gradient(&self, phases: &[f64], target: &CMatrix) -> (f64, Vec<f64>) {
        let d = self.dim;
        let n = phases.len();
        // forward products F_0..F_N
        let mut forward: Vec<CMatrix> = Vec::with_capacity(n + 1);
        forward.push(Array2::eye(d));
        for &phi in phases {
            let u = self.segment_unitary(phi);
            let next = u.dot(&forward[forward.len() - 1]);
            forward.push(next);
        }
        let c = overlap(target, &forward[n]);
        let fid = fidelity_from_overlap(c, d);

        // backward accumulation of T_j = sum_b m_b (F_j P_j)_{bb}
        let mut t = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut p = crate::linalg::dagger(target);
        t[n] = self.iz_trace(&forward[n], &p);
        for j in (1..=n).rev() {
            let u = self.segment_unitary(phases[j - 1]);
            p = p.dot(&u);
            t[j - 1] = self.iz_trace(&forward[j - 1], &p);
        }

        let scale = 2.0 / (d * d) as f64;
        let grad = (1..=n)
            .map(|j| {
                let dc = Complex64::new(0.0, 1.0) * (t[j - 1] - t[j]);
                scale * (c.conj() * dc).re
            })
            .collect();
        (fid, grad)
    }

    /// `tr(P Iz F) = sum_b m_b (F P)_{bb}` without forming the product.
    fn iz_trace(&self, f: &CMatrix, p: &CMatrix) -> Complex64 {
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..d {
            let mut diag = Complex64::new(0.0, 0.0);
            for a in 0..d {
                diag += f[(b, a)] * p[(a, b)];
            }
            acc += diag * self.iz_diag[b];
        }
        acc
    }
}

/// `tr(V† U)` as an elementwise sum.
pub(crate) fn overlap(target: &CMatrix, u: &CMatrix) -> Complex64 {
    target
        .iter()
        .zip(u.iter())
        .map(|(v, x)| v.conj() * x)
        .sum()
}

pub(crate) fn fidelity_from_overlap(c: Complex64, dim: usize) -> f64 {
    c.norm_sqr() / (dim * dim) as f64
}

/// Propagator of segment `j` (zero-based) of the pulse:
/// `U_j = exp(-i [H0 + s Omega cos(phi_j) Ix + s Omega sin(phi_j) Iy] dt)`.
pub fn segment_propagator(
    h0: &CMatrix,
    pulse: &PulseSpec,
    j: usize,
    rf_scale: f64,
) -> Result<UnitaryMatrix> {
    if j >= pulse.n_segments() {
        return Err(Error::InvalidArgument(format!(
            "segment {j} out of range for {} segments",
            pulse.n_segments()
        )));
    }
    let ctx = PropagatorContext::new(h0, pulse, rf_scale)?;
    UnitaryMatrix::new_with_tolerance(ctx.segment_unitary(pulse.phases[j]), 1e-12)
}

/// Full-pulse propagator `U(T) = U_N ... U_1`.
pub fn pulse_propagator(h0: &CMatrix, pulse: &PulseSpec, rf_scale: f64) -> Result<UnitaryMatrix> {
    let ctx = PropagatorContext::new(h0, pulse, rf_scale)?;
    UnitaryMatrix::new_with_tolerance(ctx.pulse_unitary(&pulse.phases), PULSE_PRODUCT_TOL)
}
