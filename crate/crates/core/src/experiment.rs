// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end coupling-strength sweeps: ideal gates or GRAPE pulses,
//! polarisation readout, both normalisation schemes and plot-ready record
//! emission.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::exec;
use crate::grape::{PropagatorContext, PulseSpec};
use crate::homogeniser::{
    closed_form_marginals, simulate_homogeniser, InteractionSchedule, MarginalSet, ScheduleStep,
};
use crate::linalg::CMatrix;
use crate::qstate::{von_neumann_entropy, Polarisation, UnitaryMatrix};
use crate::spin::{build_internal_hamiltonian, CouplingModel, EnvironmentEnsemble};

/// Intensity normalisation applied to raw polarisations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalisationScheme {
    None,
    /// Everything divided by the mean initial-state intensity of spins A, B.
    SchemeA,
    /// Each spin divided by its own reference intensity: the eta = 0 value
    /// for A and B, the eta = 90 deg value for C and D.
    SchemeB,
}

impl NormalisationScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalisationScheme::None => "none",
            NormalisationScheme::SchemeA => "scheme_a",
            NormalisationScheme::SchemeB => "scheme_b",
        }
    }
}

impl std::str::FromStr for NormalisationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NormalisationScheme::None),
            "scheme_a" | "scheme-a" | "a" => Ok(NormalisationScheme::SchemeA),
            "scheme_b" | "scheme-b" | "b" => Ok(NormalisationScheme::SchemeB),
            other => Err(Error::InvalidArgument(format!(
                "unknown normalisation scheme `{other}`"
            ))),
        }
    }
}

/// Circuit realization used for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    IdealGates,
    GrapePulses,
}

impl SweepMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepMode::IdealGates => "ideal",
            SweepMode::GrapePulses => "grape",
        }
    }
}

impl std::str::FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(SweepMode::IdealGates),
            "grape" => Ok(SweepMode::GrapePulses),
            other => Err(Error::InvalidArgument(format!("unknown sweep mode `{other}`"))),
        }
    }
}

/// One sweep point. Raw values obey the physical bounds; normalised values
/// may drift slightly outside `[0, 1]`, so they are plain floats.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub eta_deg: f64,
    pub repeat: usize,
    pub f_raw: MarginalSet,
    /// Normalised polarisations, qubits A..D.
    pub f_norm: [f64; 4],
    pub scheme: NormalisationScheme,
    pub mode: SweepMode,
}

/// How a named gate is realized in a pulsed circuit.
#[derive(Debug, Clone)]
pub enum GateImpl {
    Pulse(PulseSpec),
    /// Exact unitary standing in for a pulse; used for the omitted eta = 0
    /// gate and for consistency tests.
    Exact(UnitaryMatrix),
}

/// Named gate implementations for the pulsed circuit.
#[derive(Debug, Clone, Default)]
pub struct GateLibrary {
    gates: BTreeMap<String, GateImpl>,
}

impl GateLibrary {
    pub fn new() -> Self {
        GateLibrary::default()
    }

    pub fn insert_pulse(&mut self, name: impl Into<String>, pulse: PulseSpec) {
        self.gates.insert(name.into(), GateImpl::Pulse(pulse));
    }

    pub fn insert_exact(&mut self, name: impl Into<String>, u: UnitaryMatrix) {
        self.gates.insert(name.into(), GateImpl::Exact(u));
    }

    pub fn get(&self, name: &str) -> Option<&GateImpl> {
        self.gates.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gates.keys().map(String::as_str)
    }
}

/// Formats an eta value in degrees for gate names: `30`, `12.5`.
pub fn format_eta_deg(eta_deg: f64) -> String {
    if (eta_deg - eta_deg.round()).abs() < 1e-9 {
        format!("{}", eta_deg.round() as i64)
    } else {
        format!("{eta_deg}")
    }
}

/// Gate names for the scheduled circuit at one coupling strength, with the
/// eta = 0 partial swaps omitted and vertically adjacent routing SWAPs
/// merged into a single combined gate.
pub fn gate_plan(schedule: &InteractionSchedule, eta_deg: f64) -> Vec<String> {
    let mut plan = Vec::new();
    let steps = schedule.steps();
    let mut i = 0;
    while i < steps.len() {
        match steps[i] {
            ScheduleStep::PartialSwap { .. } => {
                if eta_deg != 0.0 {
                    plan.push(format!("pswap_bc_{}", format_eta_deg(eta_deg)));
                }
                i += 1;
            }
            ScheduleStep::Swap { low, high } => {
                let merged = if i + 1 < steps.len() {
                    match steps[i + 1] {
                        ScheduleStep::Swap {
                            low: low2,
                            high: high2,
                        } if (low, high) != (low2, high2)
                            && low != low2
                            && high != high2 =>
                        {
                            true
                        }
                        _ => false,
                    }
                } else {
                    false
                };
                if merged {
                    plan.push("swap_ab_cd".to_string());
                    i += 2;
                } else {
                    plan.push(swap_name(low, high));
                    i += 1;
                }
            }
        }
    }
    plan
}

fn swap_name(low: usize, high: usize) -> String {
    let name = |p: usize| ["a", "b", "c", "d"][p];
    format!("swap_{}{}", name(low), name(high))
}

/// Inputs for a grape-mode sweep.
#[derive(Debug, Clone)]
pub struct PulsedCircuitSetup {
    pub library: GateLibrary,
    pub ensemble: EnvironmentEnsemble,
    pub coupling_model: CouplingModel,
}

/// Sweeps the homogeniser circuit over `eta_grid_deg`.
///
/// Ideal mode applies the schedule's exact unitaries. Grape mode resolves
/// each planned gate from the library, propagates per ensemble member and
/// averages the marginals with multiplicity weights. Both are deterministic,
/// so `repeats` simply duplicates rows with increasing repeat indices.
pub fn run_sweep(
    schedule: &InteractionSchedule,
    eta_grid_deg: &[f64],
    repeats: usize,
    pulsed: Option<&PulsedCircuitSetup>,
) -> Result<Vec<SweepRecord>> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let mut grid: Vec<f64> = eta_grid_deg.to_vec();
    grid.sort_by(f64::total_cmp);

    let singles: Vec<SweepRecord> = match pulsed {
        None => exec::try_map_ordered(&grid, |&eta_deg| {
            let marginals = simulate_homogeniser(eta_deg.to_radians(), schedule)?;
            Ok(base_record(eta_deg, marginals, SweepMode::IdealGates))
        })?,
        Some(setup) => {
            // members' Hamiltonians and the eta-independent routing gates
            // resolve once, up front
            let members: Vec<(f64, CMatrix)> = setup
                .ensemble
                .members()
                .iter()
                .map(|m| {
                    (
                        m.weight as f64,
                        build_internal_hamiltonian(&m.system, setup.coupling_model),
                    )
                })
                .collect();
            let mut shared: BTreeMap<String, Vec<UnitaryMatrix>> = BTreeMap::new();
            for &eta_deg in &grid {
                for name in gate_plan(schedule, eta_deg) {
                    if !name.starts_with("pswap") && !shared.contains_key(&name) {
                        let resolved =
                            resolve_gate(&setup.library, &name, &members, eta_deg)?;
                        shared.insert(name, resolved);
                    }
                }
            }
            exec::try_map_ordered(&grid, |&eta_deg| {
                let plan = gate_plan(schedule, eta_deg);
                let mut weighted = [0.0f64; 4];
                let mut total = 0.0;
                for (m, (weight, h0)) in members.iter().enumerate() {
                    let mut rho = crate::homogeniser::initial_state();
                    for name in &plan {
                        let u = if name.starts_with("pswap") {
                            resolve_gate_for_member(&setup.library, name, h0, eta_deg)?
                        } else {
                            shared[name][m].clone()
                        };
                        rho = rho.apply_unitary(&u)?;
                    }
                    for q in 0..4 {
                        let f = rho.partial_trace(&[q])?.polarisation()?.value();
                        weighted[q] += weight * f;
                    }
                    total += weight;
                }
                let f = weighted.map(|v| v / total);
                let marginals = MarginalSet {
                    f_a: Polarisation::new(f[0])?,
                    f_b: Polarisation::new(f[1])?,
                    f_c: Polarisation::new(f[2])?,
                    f_d: Polarisation::new(f[3])?,
                };
                Ok(base_record(eta_deg, marginals, SweepMode::GrapePulses))
            })?
        }
    };

    let mut records = Vec::with_capacity(singles.len() * repeats);
    for record in singles {
        for repeat in 0..repeats {
            let mut row = record.clone();
            row.repeat = repeat;
            records.push(row);
        }
    }
    Ok(records)
}

fn base_record(eta_deg: f64, marginals: MarginalSet, mode: SweepMode) -> SweepRecord {
    SweepRecord {
        eta_deg,
        repeat: 0,
        f_norm: marginals.as_array(),
        f_raw: marginals,
        scheme: NormalisationScheme::None,
        mode,
    }
}

fn resolve_gate(
    library: &GateLibrary,
    name: &str,
    members: &[(f64, CMatrix)],
    eta_deg: f64,
) -> Result<Vec<UnitaryMatrix>> {
    members
        .iter()
        .map(|(_, h0)| resolve_gate_for_member(library, name, h0, eta_deg))
        .collect()
}

fn resolve_gate_for_member(
    library: &GateLibrary,
    name: &str,
    h0: &CMatrix,
    eta_deg: f64,
) -> Result<UnitaryMatrix> {
    match library.get(name) {
        None => Err(Error::MissingPulse {
            gate: name.to_string(),
            eta_deg,
        }),
        Some(GateImpl::Exact(u)) => Ok(u.clone()),
        Some(GateImpl::Pulse(pulse)) => {
            let ctx = PropagatorContext::new(h0, pulse, 1.0)?;
            UnitaryMatrix::new_with_tolerance(
                ctx.pulse_unitary(&pulse.phases),
                crate::grape::PULSE_PRODUCT_TOL,
            )
        }
    }
}

/// Scheme A: every value divided by the mean raw intensity of spins A and B
/// at the eta = 0 reference.
pub fn normalise_scheme_a(records: &[SweepRecord]) -> Result<Vec<SweepRecord>> {
    let refs: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.eta_deg == 0.0)
        .collect();
    if refs.is_empty() {
        return Err(Error::Normalisation(
            "scheme A needs the eta = 0 initial-state reference".into(),
        ));
    }
    let mean: f64 = refs
        .iter()
        .map(|r| (r.f_raw.f_a.value() + r.f_raw.f_b.value()) / 2.0)
        .sum::<f64>()
        / refs.len() as f64;
    if mean.abs() < 1e-12 {
        return Err(Error::Normalisation("zero reference intensity".into()));
    }
    Ok(records
        .iter()
        .map(|r| {
            let mut out = r.clone();
            out.f_norm = r.f_raw.as_array().map(|v| v / mean);
            out.scheme = NormalisationScheme::SchemeA;
            out
        })
        .collect())
}

/// Scheme B: each spin divided by its own reference — the eta = 0 raw value
/// for A and B, the eta = 90 deg raw value for C and D.
pub fn normalise_scheme_b(records: &[SweepRecord]) -> Result<Vec<SweepRecord>> {
    let mean_at = |eta: f64, pick: fn(&SweepRecord) -> f64| -> Option<f64> {
        let vals: Vec<f64> = records
            .iter()
            .filter(|r| (r.eta_deg - eta).abs() < 1e-9)
            .map(pick)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    };
    let ref_a = mean_at(0.0, |r| r.f_raw.f_a.value());
    let ref_b = mean_at(0.0, |r| r.f_raw.f_b.value());
    let ref_c = mean_at(90.0, |r| r.f_raw.f_c.value());
    let ref_d = mean_at(90.0, |r| r.f_raw.f_d.value());
    let (Some(ra), Some(rb), Some(rc), Some(rd)) = (ref_a, ref_b, ref_c, ref_d) else {
        return Err(Error::Normalisation(
            "scheme B needs eta = 0 (spins A, B) and eta = 90 deg (spins C, D) references".into(),
        ));
    };
    let refs = [ra, rb, rc, rd];
    if let Some(r) = refs.iter().find(|r| r.abs() < 1e-12) {
        return Err(Error::Normalisation(format!("zero per-spin reference {r}")));
    }
    Ok(records
        .iter()
        .map(|r| {
            let raw = r.f_raw.as_array();
            let mut out = r.clone();
            out.f_norm = [raw[0] / refs[0], raw[1] / refs[1], raw[2] / refs[2], raw[3] / refs[3]];
            out.scheme = NormalisationScheme::SchemeB;
            out
        })
        .collect())
}

const HEADER: &str = "eta_deg,fA_raw,fB_raw,fC_raw,fD_raw,fA_norm,fB_norm,fC_norm,fD_norm,\
theory_fA,theory_fB,theory_fC,theory_fD,S_A,S_B,S_C,S_D,S_sum,mode,scheme";

/// Writes records as comma-separated values with theory and entropy columns,
/// sorted by `(eta, repeat)`. Numbers carry 17 significant digits.
pub fn emit_records(records: &[SweepRecord], w: &mut impl Write) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to emit".into()));
    }
    let mut rows: Vec<&SweepRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        a.eta_deg
            .total_cmp(&b.eta_deg)
            .then(a.repeat.cmp(&b.repeat))
    });
    let ctx = |e| Error::io("writing records", e);
    writeln!(w, "{HEADER}").map_err(ctx)?;
    for r in rows {
        let theory = closed_form_marginals(r.eta_deg.to_radians()).as_array();
        let mut cols: Vec<String> = Vec::with_capacity(20);
        cols.push(format!("{:.16e}", r.eta_deg));
        for v in r.f_raw.as_array() {
            cols.push(format!("{v:.16e}"));
        }
        for v in r.f_norm {
            cols.push(format!("{v:.16e}"));
        }
        for v in theory {
            cols.push(format!("{v:.16e}"));
        }
        let entropies: Result<Vec<f64>> = r
            .f_norm
            .iter()
            .map(|&f| von_neumann_entropy(f.clamp(-1.0, 1.0)))
            .collect();
        let entropies = entropies?;
        for v in &entropies {
            cols.push(format!("{v:.16e}"));
        }
        cols.push(format!("{:.16e}", entropies.iter().sum::<f64>()));
        cols.push(r.mode.as_str().to_string());
        cols.push(r.scheme.as_str().to_string());
        writeln!(w, "{}", cols.join(",")).map_err(ctx)?;
    }
    Ok(())
}

/// Reads records back from [`emit_records`] output. Repeat indices are
/// reconstructed positionally within each eta group.
pub fn read_records(r: impl Read) -> Result<Vec<SweepRecord>> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::RecordFormat("empty records file".into()))?
        .map_err(|e| Error::io("reading records", e))?;
    if header.trim() != HEADER {
        return Err(Error::RecordFormat("unexpected header row".into()));
    }
    let mut records = Vec::new();
    let mut repeat_counter: BTreeMap<u64, usize> = BTreeMap::new();
    for line in lines {
        let line = line.map_err(|e| Error::io("reading records", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 20 {
            return Err(Error::RecordFormat(format!(
                "expected 20 columns, found {}",
                cols.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            cols[i]
                .parse()
                .map_err(|_| Error::RecordFormat(format!("bad number `{}`", cols[i])))
        };
        let eta_deg = num(0)?;
        let f_raw = MarginalSet {
            f_a: Polarisation::new(num(1)?)?,
            f_b: Polarisation::new(num(2)?)?,
            f_c: Polarisation::new(num(3)?)?,
            f_d: Polarisation::new(num(4)?)?,
        };
        let f_norm = [num(5)?, num(6)?, num(7)?, num(8)?];
        let mode: SweepMode = cols[18].parse()?;
        let scheme: NormalisationScheme = cols[19].parse()?;
        let counter = repeat_counter.entry(eta_deg.to_bits()).or_insert(0);
        let repeat = *counter;
        *counter += 1;
        records.push(SweepRecord {
            eta_deg,
            repeat,
            f_raw,
            f_norm,
            scheme,
            mode,
        });
    }
    Ok(records)
}
