// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Pulse optimization: gradient ascent with backtracking, and an L-BFGS
//! mode riding on the exact gradients.

use std::collections::VecDeque;

use super::objective::{norm, RobustObjective};
use super::{FidelityReport, OptimizationConfig, OptimizerKind, PulseSpec};
use crate::error::Result;
use crate::qstate::UnitaryMatrix;

const ARMIJO_C1: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;
const LBFGS_MEMORY: usize = 10;

/// Maximizes the robust fidelity over the segment phases.
///
/// Accepted steps never decrease the objective. Terminates on reaching the
/// target fidelity, on a small gradient, on the iteration cap, or when the
/// line search stalls; non-convergence is reported through the
/// `converged` flag, not an error.
pub fn optimize_pulse(
    u_target: &UnitaryMatrix,
    config: &OptimizationConfig,
    pulse_init: &PulseSpec,
) -> Result<(PulseSpec, FidelityReport)> {
    let objective = RobustObjective::new(pulse_init, config, u_target)?;
    let mut phases = pulse_init.phases.clone();
    let (mut f, mut grad) = objective.fidelity_and_gradient(&phases);
    let mut iterations = 0usize;
    let mut ascent_step = 1.0f64;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new(); // (s, y) on -f

    while f < config.target_fidelity
        && iterations < config.max_iterations
        && norm(&grad) >= config.gradient_tolerance
    {
        let direction = match config.optimizer {
            OptimizerKind::GradientAscent => grad.clone(),
            OptimizerKind::Lbfgs => lbfgs_direction(&grad, &history),
        };
        let slope: f64 = direction.iter().zip(&grad).map(|(d, g)| d * g).sum();
        let (direction, slope) = if slope > 0.0 {
            (direction, slope)
        } else {
            // fall back to steepest ascent when curvature info misleads
            let s = grad.iter().map(|g| g * g).sum();
            (grad.clone(), s)
        };

        let start = match config.optimizer {
            OptimizerKind::GradientAscent => (ascent_step * 2.0).min(1e6),
            OptimizerKind::Lbfgs => 1.0,
        };
        let mut step = start;
        let mut accepted = None;
        while step > MIN_STEP {
            let candidate: Vec<f64> = phases
                .iter()
                .zip(&direction)
                .map(|(p, d)| p + step * d)
                .collect();
            let fc = objective.fidelity(&candidate);
            if fc > f + ARMIJO_C1 * step * slope {
                accepted = Some((candidate, fc));
                break;
            }
            step *= 0.5;
        }
        let Some((new_phases, new_f)) = accepted else {
            break; // line search stalled; return best so far
        };
        debug_assert!(new_f >= f, "accepted step decreased the objective");
        let (_, new_grad) = {
            let fg = objective.fidelity_and_gradient(&new_phases);
            (fg.0, fg.1)
        };

        if config.optimizer == OptimizerKind::Lbfgs {
            let s: Vec<f64> = new_phases.iter().zip(&phases).map(|(a, b)| a - b).collect();
            // minimizing -f: y = -(g_new - g_old)
            let y: Vec<f64> = new_grad
                .iter()
                .zip(&grad)
                .map(|(gn, go)| -(gn - go))
                .collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            if sy > 1e-12 {
                history.push_back((s, y));
                if history.len() > LBFGS_MEMORY {
                    history.pop_front();
                }
            }
        } else {
            ascent_step = step;
        }

        phases = new_phases;
        f = new_f;
        grad = new_grad;
        iterations += 1;
    }

    let converged = f >= config.target_fidelity;
    let report = objective.report(&phases, iterations, converged);
    let pulse = PulseSpec::new(pulse_init.dt_s, pulse_init.amplitude_rad_s, phases)?;
    Ok((pulse, report))
}

/// Two-loop recursion on the minimization of `-f`; returns an ascent
/// direction for `f`.
fn lbfgs_direction(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>)>) -> Vec<f64> {
    // q = grad of (-f)
    let mut q: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y) in history.iter().rev() {
        let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
        let alpha = s.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() / sy;
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= alpha * yi;
        }
        alphas.push((alpha, sy));
    }
    if let Some((s, y)) = history.back() {
        let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        let gamma = sy / yy;
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y), (alpha, sy)) in history.iter().zip(alphas.into_iter().rev()) {
        let beta = y.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() / sy;
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (alpha - beta) * si;
        }
    }
    // descent direction for -f is -q; that is the ascent direction for f
    q.iter().map(|v| -v).collect()
}
