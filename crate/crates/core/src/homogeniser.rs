// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! The partial-swap homogeniser: the four-qubit linear-chain circuit with its
//! closed-form marginals, and the general N-reservoir contact chain.
//!
//! Chain positions are indexed 0..3 and initially hold qubits A, B, C, D.
//! A and B start pure (`|0>`), C and D start maximally mixed. Partial swaps
//! act only between the middle positions (1, 2); full SWAPs rotate the
//! system and reservoir registers to bring every (system, reservoir) pair
//! into contact exactly once.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::CMatrix;
use crate::qstate::{
    state_from_f, trace_distance, von_neumann_entropy, DensityMatrix, Polarisation, UnitaryMatrix,
};

pub const QUBIT_A: usize = 0;
pub const QUBIT_B: usize = 1;
pub const QUBIT_C: usize = 2;
pub const QUBIT_D: usize = 3;
const NUM_POSITIONS: usize = 4;
const MIDDLE: (usize, usize) = (1, 2);

/// Largest full-state contact chain: one system qubit plus nine reservoir
/// qubits keeps the density matrix at 1024x1024.
pub const MAX_CHAIN_RESERVOIR: usize = 9;

/// Tolerance for validating a schedule against the closed-form marginals.
pub const SCHEDULE_VALIDATION_TOL: f64 = 1e-10;

/// Two-qubit partial swap `U = cos(eta) 1 + i sin(eta) S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSwapGate {
    pub eta: f64,
}

impl PartialSwapGate {
    pub fn new(eta: f64) -> Self {
        PartialSwapGate { eta }
    }

    pub fn unitary(&self) -> UnitaryMatrix {
        partial_swap_unitary(self.eta)
    }
}

/// `cos(eta) 1 + i sin(eta) SWAP` on two qubits.
pub fn partial_swap_unitary(eta: f64) -> UnitaryMatrix {
    let c = Complex64::new(eta.cos(), 0.0);
    let is = Complex64::new(0.0, eta.sin());
    let mut mat: CMatrix = Array2::zeros((4, 4));
    mat[(0, 0)] = c + is;
    mat[(3, 3)] = c + is;
    mat[(1, 1)] = c;
    mat[(2, 2)] = c;
    mat[(1, 2)] = is;
    mat[(2, 1)] = is;
    UnitaryMatrix::new(mat).expect("partial swap is unitary by construction")
}

// Routing swaps are the plain permutation; the i*SWAP limit of the partial
// swap differs only by a global phase.
fn swap_unitary() -> UnitaryMatrix {
    let mut mat: CMatrix = Array2::zeros((4, 4));
    mat[(0, 0)] = Complex64::new(1.0, 0.0);
    mat[(1, 2)] = Complex64::new(1.0, 0.0);
    mat[(2, 1)] = Complex64::new(1.0, 0.0);
    mat[(3, 3)] = Complex64::new(1.0, 0.0);
    UnitaryMatrix::new(mat).expect("permutation is unitary")
}

/// One step of the interaction schedule, acting on chain positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleStep {
    PartialSwap { low: usize, high: usize },
    Swap { low: usize, high: usize },
}

impl ScheduleStep {
    pub fn positions(&self) -> (usize, usize) {
        match *self {
            ScheduleStep::PartialSwap { low, high } | ScheduleStep::Swap { low, high } => {
                (low, high)
            }
        }
    }

    fn is_adjacent(&self) -> bool {
        let (low, high) = self.positions();
        high == low + 1
    }
}

/// Ordered partial-swap contacts plus SWAP routing on the linear chain.
#[derive(Debug, Clone)]
pub struct InteractionSchedule {
    steps: Vec<ScheduleStep>,
    adjacency_required: bool,
}

impl InteractionSchedule {
    /// The validated four-qubit schedule realizing Fig.-style contacts
    /// (B,C), (B,D), (A,C), (A,D): partial swaps at the middle pair, single
    /// reservoir rotations between B's contacts, simultaneous register
    /// rotations around A's, and a final rotation pair restoring register
    /// order before readout.
    pub fn standard() -> Result<InteractionSchedule> {
        let ps = |low, high| ScheduleStep::PartialSwap { low, high };
        let sw = |low, high| ScheduleStep::Swap { low, high };
        let schedule = InteractionSchedule {
            steps: vec![
                ps(1, 2),
                sw(2, 3),
                ps(1, 2),
                sw(0, 1),
                sw(2, 3),
                ps(1, 2),
                sw(2, 3),
                ps(1, 2),
                sw(0, 1),
                sw(2, 3),
            ],
            adjacency_required: true,
        };
        schedule.validate_structure()?;
        schedule.validate_against_closed_form()?;
        Ok(schedule)
    }

    pub fn from_steps(steps: Vec<ScheduleStep>, adjacency_required: bool) -> Result<Self> {
        let schedule = InteractionSchedule {
            steps,
            adjacency_required,
        };
        schedule.validate_structure()?;
        Ok(schedule)
    }

    pub fn steps(&self) -> &[ScheduleStep] {
        &self.steps
    }

    pub fn partial_swap_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, ScheduleStep::PartialSwap { .. }))
            .count()
    }

    /// Logical (system, reservoir) qubit pairs met by the partial swaps, in
    /// schedule order.
    pub fn contacts(&self) -> Vec<(usize, usize)> {
        let mut pos_to_qubit = [0usize, 1, 2, 3];
        let mut contacts = Vec::new();
        for step in &self.steps {
            match *step {
                ScheduleStep::PartialSwap { low, high } => {
                    let a = pos_to_qubit[low].min(pos_to_qubit[high]);
                    let b = pos_to_qubit[low].max(pos_to_qubit[high]);
                    contacts.push((a, b));
                }
                ScheduleStep::Swap { low, high } => {
                    pos_to_qubit.swap(low, high);
                }
            }
        }
        contacts
    }

    /// Position-to-qubit map after all steps.
    fn final_permutation(&self) -> [usize; 4] {
        let mut pos_to_qubit = [0usize, 1, 2, 3];
        for step in &self.steps {
            if let ScheduleStep::Swap { low, high } = *step {
                pos_to_qubit.swap(low, high);
            }
        }
        pos_to_qubit
    }

    fn validate_structure(&self) -> Result<()> {
        for step in &self.steps {
            let (low, high) = step.positions();
            if low >= NUM_POSITIONS || high >= NUM_POSITIONS || low == high {
                return Err(Error::ScheduleValidation(format!(
                    "step positions ({low}, {high}) invalid on a 4-position chain"
                )));
            }
            if self.adjacency_required && !step.is_adjacent() {
                return Err(Error::ScheduleValidation(format!(
                    "step on positions ({low}, {high}) violates chain adjacency"
                )));
            }
            if self.adjacency_required {
                if let ScheduleStep::PartialSwap { low, high } = *step {
                    if (low, high) != MIDDLE {
                        return Err(Error::ScheduleValidation(format!(
                            "partial swap at ({low}, {high}); only the middle pair carries them"
                        )));
                    }
                }
            }
        }
        let mut contacts = self.contacts();
        contacts.sort_unstable();
        let expected = [
            (QUBIT_A, QUBIT_C),
            (QUBIT_A, QUBIT_D),
            (QUBIT_B, QUBIT_C),
            (QUBIT_B, QUBIT_D),
        ];
        if contacts != expected {
            return Err(Error::ScheduleValidation(format!(
                "contacts {contacts:?} are not each (system, reservoir) pair exactly once"
            )));
        }
        if self.final_permutation() != [0, 1, 2, 3] {
            return Err(Error::ScheduleValidation(
                "schedule does not restore register order before readout".into(),
            ));
        }
        Ok(())
    }

    /// Compares simulated marginals against the closed forms on the paper's
    /// ten-degree sweep grid.
    fn validate_against_closed_form(&self) -> Result<()> {
        for deg in (0..=90).step_by(10) {
            let eta = (deg as f64).to_radians();
            let sim = simulate_homogeniser(eta, self)?;
            let theory = closed_form_marginals(eta);
            let err = sim
                .as_array()
                .iter()
                .zip(theory.as_array().iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if err > SCHEDULE_VALIDATION_TOL {
                return Err(Error::ScheduleValidation(format!(
                    "marginals deviate from the closed forms by {err:.3e} at eta = {deg} deg"
                )));
            }
        }
        Ok(())
    }
}

/// Per-qubit readout polarisations of the four-qubit circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalSet {
    pub f_a: Polarisation,
    pub f_b: Polarisation,
    pub f_c: Polarisation,
    pub f_d: Polarisation,
}

impl MarginalSet {
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.f_a.value(),
            self.f_b.value(),
            self.f_c.value(),
            self.f_d.value(),
        ]
    }

    /// Largest violation of `f_B + f_C = 1` and `f_A + f_D = 1`.
    pub fn complementarity_defect(&self) -> f64 {
        let [fa, fb, fc, fd] = self.as_array();
        ((fb + fc) - 1.0).abs().max(((fa + fd) - 1.0).abs())
    }
}

/// Initial state of the circuit: A, B pure `|0>`; C, D maximally mixed.
pub fn initial_state() -> DensityMatrix {
    let pure = DensityMatrix::basis_state(2, 0).expect("two-qubit ground state");
    let mixed = DensityMatrix::maximally_mixed(2);
    pure.tensor(&mixed).expect("4 qubits under the cap")
}

/// Runs the schedule at coupling `eta` and reads out all four marginals.
pub fn simulate_homogeniser(eta: f64, schedule: &InteractionSchedule) -> Result<MarginalSet> {
    let mut rho = initial_state();
    let pswap = partial_swap_unitary(eta);
    let swap = swap_unitary();
    for step in schedule.steps() {
        let (low, high) = step.positions();
        let gate = match step {
            ScheduleStep::PartialSwap { .. } => &pswap,
            ScheduleStep::Swap { .. } => &swap,
        };
        rho = rho.apply_gate(gate, &[low, high])?;
    }
    let f = |q: usize| -> Result<Polarisation> { rho.partial_trace(&[q])?.polarisation() };
    Ok(MarginalSet {
        f_a: f(QUBIT_A)?,
        f_b: f(QUBIT_B)?,
        f_c: f(QUBIT_C)?,
        f_d: f(QUBIT_D)?,
    })
}

/// Full 16x16 unitary of the scheduled circuit at coupling `eta`.
pub fn circuit_unitary(eta: f64, schedule: &InteractionSchedule) -> Result<UnitaryMatrix> {
    let pswap = partial_swap_unitary(eta);
    let swap = swap_unitary();
    let mut u = UnitaryMatrix::identity(4);
    for step in schedule.steps() {
        let (low, high) = step.positions();
        let gate = match step {
            ScheduleStep::PartialSwap { .. } => &pswap,
            ScheduleStep::Swap { .. } => &swap,
        };
        u = u.then(&gate.embed(&[low, high], 4)?)?;
    }
    Ok(u)
}

/// Closed-form marginals: `f_B = cos^4(eta)`,
/// `f_A = 4 cos^2 - 9 cos^4 + 8 cos^6 - 2 cos^8`, with complements for C, D.
pub fn closed_form_marginals(eta: f64) -> MarginalSet {
    let c2 = eta.cos().powi(2);
    let f_b = c2 * c2;
    let f_a = 4.0 * c2 - 9.0 * c2.powi(2) + 8.0 * c2.powi(3) - 2.0 * c2.powi(4);
    let p = |v: f64| Polarisation::new(v).expect("closed forms stay within [0, 1]");
    MarginalSet {
        f_a: p(f_a),
        f_b: p(f_b),
        f_c: p(1.0 - f_b),
        f_d: p(1.0 - f_a),
    }
}

/// Full-state record of an N-reservoir contact chain.
#[derive(Debug, Clone)]
pub struct HomogenisationTrace {
    /// System polarisation before any contact and after each contact;
    /// length `n_reservoir + 1`.
    pub system_polarisations: Vec<f64>,
    /// Final trace distance of each reservoir qubit from its initial state.
    pub reservoir_distances: Vec<f64>,
}

/// Evolves `system (x) xi^{(x) n}` through sequential partial swaps between
/// the system and the k-th fresh reservoir qubit.
pub fn homogenize_chain(
    system: &DensityMatrix,
    reservoir_f: f64,
    n_reservoir: usize,
    eta: f64,
) -> Result<HomogenisationTrace> {
    if system.num_qubits() != 1 {
        return Err(Error::InvalidArgument(
            "chain system must be a single qubit".into(),
        ));
    }
    if n_reservoir == 0 {
        return Err(Error::InvalidArgument("need at least one reservoir qubit".into()));
    }
    if n_reservoir > MAX_CHAIN_RESERVOIR {
        return Err(Error::SizeCap {
            dim: 1usize << (n_reservoir + 1),
            max_qubits: MAX_CHAIN_RESERVOIR + 1,
        });
    }
    let xi = state_from_f(reservoir_f)?;
    let mut rho = system.clone();
    for _ in 0..n_reservoir {
        rho = rho.tensor(&xi)?;
    }
    let pswap = partial_swap_unitary(eta);
    let mut system_polarisations =
        vec![system.polarisation()?.value()];
    for k in 1..=n_reservoir {
        rho = rho.apply_gate(&pswap, &[0, k])?;
        system_polarisations.push(rho.partial_trace(&[0])?.polarisation()?.value());
    }
    let mut reservoir_distances = Vec::with_capacity(n_reservoir);
    for k in 1..=n_reservoir {
        let marginal = rho.partial_trace(&[k])?;
        reservoir_distances.push(trace_distance(&marginal, &xi)?);
    }
    Ok(HomogenisationTrace {
        system_polarisations,
        reservoir_distances,
    })
}

/// Exact polarisation map for z-diagonal product inputs:
/// `f <- f cos^2(eta) + f_r sin^2(eta)`, iterated `n` times.
pub fn marginal_map_iterate(f_system: f64, f_reservoir: f64, eta: f64, n: usize) -> Vec<f64> {
    let c2 = eta.cos().powi(2);
    let s2 = eta.sin().powi(2);
    let mut f = f_system;
    (0..n)
        .map(|_| {
            f = f * c2 + f_reservoir * s2;
            f
        })
        .collect()
}

/// Per-qubit von Neumann entropies at one coupling strength.
#[derive(Debug, Clone, Copy)]
pub struct EntropyRow {
    pub eta: f64,
    /// Entropies of the simulated marginals, qubits A..D.
    pub entropy: [f64; 4],
    pub entropy_sum: f64,
    /// Entropies of the closed-form marginals.
    pub theory_entropy: [f64; 4],
    pub theory_entropy_sum: f64,
}

/// Simulated and closed-form entropy table over an eta grid (radians),
/// ordered as given.
pub fn entropy_profile(eta_grid: &[f64], schedule: &InteractionSchedule) -> Result<Vec<EntropyRow>> {
    exec::try_map_ordered(eta_grid, |&eta| {
        let sim = simulate_homogeniser(eta, schedule)?;
        let theory = closed_form_marginals(eta);
        let entropies = |m: &MarginalSet| -> Result<[f64; 4]> {
            let v = m.as_array();
            Ok([
                von_neumann_entropy(v[0])?,
                von_neumann_entropy(v[1])?,
                von_neumann_entropy(v[2])?,
                von_neumann_entropy(v[3])?,
            ])
        };
        let entropy = entropies(&sim)?;
        let theory_entropy = entropies(&theory)?;
        Ok(EntropyRow {
            eta,
            entropy,
            entropy_sum: entropy.iter().sum(),
            theory_entropy,
            theory_entropy_sum: theory_entropy.iter().sum(),
        })
    })
}

/// Enumerates contact orderings consistent with the chain constraints and
/// returns those whose simulated marginals match the closed forms.
///
/// Routing SWAPs exactly relocate qubits, so marginals depend only on the
/// contact order; the search therefore applies partial swaps directly to
/// logical pairs.
pub fn search_contact_orderings() -> Result<Vec<[(usize, usize); 4]>> {
    let base = [
        (QUBIT_B, QUBIT_C),
        (QUBIT_B, QUBIT_D),
        (QUBIT_A, QUBIT_C),
        (QUBIT_A, QUBIT_D),
    ];
    let mut matches = Vec::new();
    for perm in permutations_of_four() {
        let order = [base[perm[0]], base[perm[1]], base[perm[2]], base[perm[3]]];
        let mut ok = true;
        'grid: for deg in (0..=90).step_by(10) {
            let eta = (deg as f64).to_radians();
            let pswap = partial_swap_unitary(eta);
            let mut rho = initial_state();
            for &(x, y) in &order {
                rho = rho.apply_gate(&pswap, &[x, y])?;
            }
            let theory = closed_form_marginals(eta).as_array();
            for q in 0..4 {
                let f = rho.partial_trace(&[q])?.polarisation()?.value();
                if (f - theory[q]).abs() > SCHEDULE_VALIDATION_TOL {
                    ok = false;
                    break 'grid;
                }
            }
        }
        if ok {
            matches.push(order);
        }
    }
    Ok(matches)
}

fn permutations_of_four() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&x| seen[x] = true);
                    if seen == [true; 4] {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}
