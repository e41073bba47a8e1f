// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Gate fidelity, its exact phase gradient, and the robustness average over
//! the `(ensemble member, rf scale)` grid.

use super::engine::{fidelity_from_overlap, overlap, PropagatorContext};
use super::{FidelityReport, GridFidelity, OptimizationConfig, PulseSpec};
use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::CMatrix;
use crate::qstate::UnitaryMatrix;
use crate::spin::build_internal_hamiltonian;

/// Global-phase-invariant gate fidelity `|tr(U_target† U)|^2 / d^2`.
pub fn gate_fidelity(u_actual: &UnitaryMatrix, u_target: &UnitaryMatrix) -> Result<f64> {
    if u_actual.dim() != u_target.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between dims {} and {}",
            u_actual.dim(),
            u_target.dim()
        )));
    }
    Ok(fidelity_from_overlap(
        overlap(u_target.matrix(), u_actual.matrix()),
        u_actual.dim(),
    ))
}

/// Exact gradient of the pulse fidelity with respect to every segment phase.
pub fn exact_phase_gradient(
    h0: &CMatrix,
    pulse: &PulseSpec,
    rf_scale: f64,
    u_target: &UnitaryMatrix,
) -> Result<Vec<f64>> {
    let ctx = PropagatorContext::new(h0, pulse, rf_scale)?;
    if ctx.dim() != u_target.dim() {
        return Err(Error::DimensionMismatch(format!(
            "target dim {} vs Hamiltonian dim {}",
            u_target.dim(),
            ctx.dim()
        )));
    }
    let (_, grad) = ctx.fidelity_and_gradient(&pulse.phases, u_target.matrix());
    Ok(grad)
}

struct GridPoint {
    member: usize,
    rf_scale: f64,
    weight: f64,
    context: PropagatorContext,
}

/// Weighted fidelity objective over the robustness grid, with propagator
/// kernels precomputed once at construction.
pub struct RobustObjective {
    points: Vec<GridPoint>,
    target: CMatrix,
    total_weight: f64,
}

impl RobustObjective {
    pub fn new(
        pulse: &PulseSpec,
        config: &OptimizationConfig,
        u_target: &UnitaryMatrix,
    ) -> Result<Self> {
        config.validate()?;
        pulse.validate()?;
        let mut points = Vec::with_capacity(config.ensemble.len() * config.rf_scales.len());
        for (member, entry) in config.ensemble.members().iter().enumerate() {
            let h0 = build_internal_hamiltonian(&entry.system, config.coupling_model);
            if h0.nrows() != u_target.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "target dim {} vs member Hamiltonian dim {}",
                    u_target.dim(),
                    h0.nrows()
                )));
            }
            for &rf_scale in &config.rf_scales {
                points.push(GridPoint {
                    member,
                    rf_scale,
                    weight: entry.weight as f64,
                    context: PropagatorContext::new(&h0, pulse, rf_scale)?,
                });
            }
        }
        let total_weight = points.iter().map(|p| p.weight).sum();
        Ok(RobustObjective {
            points,
            target: u_target.matrix().clone(),
            total_weight,
        })
    }

    pub fn grid_len(&self) -> usize {
        self.points.len()
    }

    /// Weighted average fidelity at the given phases.
    pub fn fidelity(&self, phases: &[f64]) -> f64 {
        let fids = exec::map_ordered(&self.points, |p| p.context.fidelity(phases, &self.target));
        self.reduce_scalar(&fids)
    }

    /// Weighted average fidelity and its gradient: the same weighted mean of
    /// per-point gradients, reduced in fixed grid order.
    pub fn fidelity_and_gradient(&self, phases: &[f64]) -> (f64, Vec<f64>) {
        let evals = exec::map_ordered(&self.points, |p| {
            p.context.fidelity_and_gradient(phases, &self.target)
        });
        let fids: Vec<f64> = evals.iter().map(|(f, _)| *f).collect();
        let avg = self.reduce_scalar(&fids);
        let mut grad = vec![0.0f64; phases.len()];
        for (point, (_, g)) in self.points.iter().zip(evals.iter()) {
            let w = point.weight / self.total_weight;
            for (acc, &gi) in grad.iter_mut().zip(g.iter()) {
                *acc += w * gi;
            }
        }
        (avg, grad)
    }

    fn reduce_scalar(&self, values: &[f64]) -> f64 {
        self.points
            .iter()
            .zip(values)
            .map(|(p, v)| p.weight * v)
            .sum::<f64>()
            / self.total_weight
    }

    /// Full per-point report at the given phases.
    pub fn report(&self, phases: &[f64], iterations: usize, converged: bool) -> FidelityReport {
        let (avg, grad) = self.fidelity_and_gradient(phases);
        let fids = exec::map_ordered(&self.points, |p| p.context.fidelity(phases, &self.target));
        let grid = self
            .points
            .iter()
            .zip(fids)
            .map(|(p, fidelity)| {
                debug_assert!(fidelity <= 1.0 + 1e-12 && fidelity >= 0.0);
                GridFidelity {
                    member: p.member,
                    rf_scale: p.rf_scale,
                    weight: p.weight,
                    fidelity,
                }
            })
            .collect();
        FidelityReport {
            grid,
            average: avg,
            gradient_norm: norm(&grad),
            iterations,
            converged,
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One-shot robust objective evaluation of a pulse against a target gate.
pub fn robust_objective(
    pulse: &PulseSpec,
    config: &OptimizationConfig,
    u_target: &UnitaryMatrix,
) -> Result<FidelityReport> {
    let objective = RobustObjective::new(pulse, config, u_target)?;
    Ok(objective.report(&pulse.phases, 0, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grape::pulse_propagator;
    use crate::linalg::identity;
    use crate::spin::{
        crotonic_proton_environment, environment_ensemble, CouplingModel, EnvironmentEnsemble,
        SpinSystem,
    };
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use num_complex::Complex64;
    use std::f64::consts::TAU;

    fn swap_bc_target() -> UnitaryMatrix {
        crate::homogeniser::partial_swap_unitary(0.0)
            .embed(&[1, 2], 4)
            .unwrap()
            .then(&swap_perm())
            .unwrap()
    }

    fn swap_perm() -> UnitaryMatrix {
        let mut mat: CMatrix = Array2::zeros((16, 16));
        for idx in 0..16usize {
            let b1 = (idx >> 2) & 1;
            let b2 = (idx >> 1) & 1;
            let swapped = (idx & !0b110) | (b2 << 2) | (b1 << 1);
            mat[(swapped, idx)] = Complex64::new(1.0, 0.0);
        }
        UnitaryMatrix::new(mat).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let id4 = UnitaryMatrix::identity(2);
        assert_abs_diff_eq!(gate_fidelity(&id4, &id4).unwrap(), 1.0, epsilon = 1e-15);

        let phase = UnitaryMatrix::new(identity(4).mapv(|z| z * Complex64::from_polar(1.0, 0.7)))
            .unwrap();
        assert_abs_diff_eq!(gate_fidelity(&phase, &id4).unwrap(), 1.0, epsilon = 1e-12);

        let swap = crate::homogeniser::partial_swap_unitary(std::f64::consts::FRAC_PI_2);
        // |tr(SWAP)|^2 / 16 with tr(SWAP) = 2 (the i factor is global phase)
        assert_abs_diff_eq!(gate_fidelity(&id4, &swap).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn zero_amplitude_gradient_vanishes() {
        let sys = SpinSystem::crotonic_default();
        let h0 = build_internal_hamiltonian(&sys, CouplingModel::Isotropic);
        let pulse = PulseSpec::random(30, 1e-5, 0.0, 5).unwrap();
        let target = swap_bc_target();
        let grad = exact_phase_gradient(&h0, &pulse, 1.0, &target).unwrap();
        assert!(grad.iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let sys = SpinSystem::crotonic_default();
        let h0 = build_internal_hamiltonian(&sys, CouplingModel::Isotropic);
        let pulse = PulseSpec::random(50, 1e-5, TAU * 1e4, 11).unwrap();
        let target = swap_perm();
        let grad = exact_phase_gradient(&h0, &pulse, 1.0, &target).unwrap();

        let h = 1e-6;
        let mut worst_rel = 0.0f64;
        for j in 0..pulse.n_segments() {
            let mut plus = pulse.clone();
            plus.phases[j] += h;
            let mut minus = pulse.clone();
            minus.phases[j] -= h;
            let fp = gate_fidelity(&pulse_propagator(&h0, &plus, 1.0).unwrap(), &target).unwrap();
            let fm = gate_fidelity(&pulse_propagator(&h0, &minus, 1.0).unwrap(), &target).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            let rel = (grad[j] - fd).abs() / fd.abs().max(1e-8);
            worst_rel = worst_rel.max(rel);
        }
        assert!(worst_rel <= 1e-6, "max relative deviation {worst_rel:.3e}");
    }

    #[test]
    fn single_segment_gradient_matches_symbolic_form() {
        // one spin, H0 = 0, target exp(-i b Ix): the overlap is
        // 2 [cos(b/2) cos(a/2) + sin(b/2) sin(a/2) cos(phi)] with a = Omega dt,
        // so dPhi/dphi = -2 c(phi) sin(b/2) sin(a/2) sin(phi) / d^2.
        let h0: CMatrix = Array2::zeros((2, 2));
        let omega = TAU * 1e4;
        let dt = 3e-5;
        let a = omega * dt;
        let b = 1.1f64;
        let ops = crate::spin::control_operators(1);
        let gen = ops.ix.mapv(|z| z * Complex64::new(0.0, -b));
        let target =
            UnitaryMatrix::new(crate::linalg::expm_skew_hermitian(&gen).unwrap()).unwrap();
        for phi in [0.3, 1.2, 2.9, 4.4] {
            let pulse = PulseSpec::new(dt, omega, vec![phi]).unwrap();
            let grad = exact_phase_gradient(&h0, &pulse, 1.0, &target).unwrap();
            let c = 2.0 * ((b / 2.0).cos() * (a / 2.0).cos()
                + (b / 2.0).sin() * (a / 2.0).sin() * phi.cos());
            let symbolic = 2.0 * c * (-2.0 * (b / 2.0).sin() * (a / 2.0).sin() * phi.sin()) / 4.0;
            assert!(
                (grad[0] - symbolic).abs() < 1e-12,
                "phi = {phi}: {} vs {symbolic}",
                grad[0]
            );
        }
    }

    #[test]
    fn degenerate_grid_equals_plain_fidelity() {
        let sys = SpinSystem::crotonic_default();
        let h0 = build_internal_hamiltonian(&sys, CouplingModel::Isotropic);
        let mut config = OptimizationConfig::new(EnvironmentEnsemble::single(sys));
        config.rf_scales = vec![1.0];
        let pulse = PulseSpec::random(40, 1e-5, TAU * 1e4, 3).unwrap();
        let target = swap_perm();
        let report = robust_objective(&pulse, &config, &target).unwrap();
        let plain =
            gate_fidelity(&pulse_propagator(&h0, &pulse, 1.0).unwrap(), &target).unwrap();
        assert_abs_diff_eq!(report.average, plain, epsilon = 1e-14);
        assert_eq!(report.grid.len(), 1);
    }

    #[test]
    fn identical_members_average_to_any_single_member() {
        let sys = SpinSystem::crotonic_default();
        let env = crotonic_proton_environment(Array2::zeros((5, 4))).unwrap();
        let ensemble = environment_ensemble(&sys, &env.couplings_hz, &env.methyl).unwrap();
        let mut config = OptimizationConfig::new(ensemble);
        config.rf_scales = vec![1.0];
        let pulse = PulseSpec::random(25, 1e-5, TAU * 1e4, 17).unwrap();
        let target = swap_perm();
        let report = robust_objective(&pulse, &config, &target).unwrap();
        assert_eq!(report.grid.len(), 16);
        for point in &report.grid {
            assert_abs_diff_eq!(point.fidelity, report.average, epsilon = 1e-14);
        }
    }
}
