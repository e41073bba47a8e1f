// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! TOML spin-system configs.
//!
//! An empty document yields the crotonic defaults. A `couplings` section
//! alone overrides individual J values on the default system; a `spins`
//! section replaces the spin set entirely (couplings then default to zero
//! except where listed). Unknown keys are rejected.
//!
//! ```toml
//! [[spins]]
//! label = "A"
//! frequency_hz = -11962.2
//!
//! [[couplings]]
//! pair = ["A", "B"]
//! j_hz = 41.6
//!
//! [[protons]]
//! label = "M1"
//! methyl = true
//! couplings_hz = { A = 4.1, B = 0.0, C = 6.6, D = 127.5 }
//! ```

use ndarray::Array2;
use serde::Deserialize;
use std::collections::BTreeMap;

use super::{ProtonEnvironment, SpinSystem};
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    spins: Option<Vec<SpinEntry>>,
    couplings: Option<Vec<CouplingEntry>>,
    protons: Option<Vec<ProtonEntry>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpinEntry {
    label: String,
    frequency_hz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingEntry {
    pair: [String; 2],
    j_hz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtonEntry {
    label: String,
    #[serde(default)]
    methyl: bool,
    couplings_hz: BTreeMap<String, f64>,
}

/// Result of [`parse_spin_config`].
#[derive(Debug, Clone)]
pub struct ParsedSpinConfig {
    pub system: SpinSystem,
    pub protons: Option<ProtonEnvironment>,
}

/// Parses a spin-system config document.
pub fn parse_spin_config(text: &str) -> Result<ParsedSpinConfig> {
    let doc: ConfigDoc =
        toml::from_str(text).map_err(|e| Error::SpinConfig(e.to_string()))?;

    let system = match doc.spins {
        Some(entries) => {
            if entries.is_empty() {
                return Err(Error::SpinConfig("`spins` section is empty".into()));
            }
            let labels: Vec<String> = entries.iter().map(|e| e.label.clone()).collect();
            let freqs: Vec<f64> = entries.iter().map(|e| e.frequency_hz).collect();
            let n = labels.len();
            let couplings = resolve_couplings(
                &labels,
                Array2::zeros((n, n)),
                doc.couplings.as_deref().unwrap_or(&[]),
            )?;
            SpinSystem::new(labels, freqs, couplings)?
        }
        None => {
            let base = SpinSystem::crotonic_default();
            match doc.couplings.as_deref() {
                None | Some([]) => base,
                Some(entries) => {
                    let labels = base.labels().to_vec();
                    let n = labels.len();
                    let mut table = Array2::zeros((n, n));
                    for i in 0..n {
                        for j in 0..n {
                            table[(i, j)] = base.coupling_hz(i, j);
                        }
                    }
                    let couplings = resolve_couplings(&labels, table, entries)?;
                    let freqs = (0..n).map(|k| base.frequency_hz(k)).collect();
                    SpinSystem::new(labels, freqs, couplings)?
                }
            }
        }
    };

    let protons = match doc.protons {
        None => None,
        Some(entries) => Some(resolve_protons(&system, entries)?),
    };

    Ok(ParsedSpinConfig { system, protons })
}

fn resolve_couplings(
    labels: &[String],
    mut table: Array2<f64>,
    entries: &[CouplingEntry],
) -> Result<Array2<f64>> {
    let index = |label: &str| -> Result<usize> {
        labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::SpinConfig(format!("coupling references unknown spin `{label}`")))
    };
    let mut set: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for entry in entries {
        let a = index(&entry.pair[0])?;
        let b = index(&entry.pair[1])?;
        if a == b {
            return Err(Error::SpinConfig(format!(
                "self-coupling on `{}` is not allowed",
                entry.pair[0]
            )));
        }
        let key = (a.min(b), a.max(b));
        if let Some(&prev) = set.get(&key) {
            if prev != entry.j_hz {
                return Err(Error::SpinConfig(format!(
                    "conflicting couplings for ({}, {}): {} vs {} Hz",
                    entry.pair[0], entry.pair[1], prev, entry.j_hz
                )));
            }
        }
        set.insert(key, entry.j_hz);
        table[(a, b)] = entry.j_hz;
        table[(b, a)] = entry.j_hz;
    }
    Ok(table)
}

fn resolve_protons(system: &SpinSystem, entries: Vec<ProtonEntry>) -> Result<ProtonEnvironment> {
    if entries.is_empty() {
        return Err(Error::SpinConfig("`protons` section is empty".into()));
    }
    let n_spins = system.n_spins();
    let mut labels = Vec::with_capacity(entries.len());
    let mut couplings_hz = Array2::zeros((entries.len(), n_spins));
    let mut methyl = Vec::new();
    for (p, entry) in entries.iter().enumerate() {
        if labels.contains(&entry.label) {
            return Err(Error::SpinConfig(format!(
                "duplicate proton label `{}`",
                entry.label
            )));
        }
        for (spin_label, j) in &entry.couplings_hz {
            let c = system.label_index(spin_label).ok_or_else(|| {
                Error::SpinConfig(format!(
                    "proton `{}` couples to unknown spin `{spin_label}`",
                    entry.label
                ))
            })?;
            couplings_hz[(p, c)] = *j;
        }
        if entry.methyl {
            methyl.push(p);
        }
        labels.push(entry.label.clone());
    }
    Ok(ProtonEnvironment {
        labels,
        couplings_hz,
        methyl,
    })
}
