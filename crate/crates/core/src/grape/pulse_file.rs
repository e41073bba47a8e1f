// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Pulse files: a small header followed by one phase per line.
//!
//! ```text
//! homog pulse v1
//! n_segments = 20
//! dt_s = 2.5000000000000001e-6
//! amplitude_rad_s = 6.2831853071795865e4
//! spin_system = crotonic
//! target_gate = swap_bc
//! phases_rad:
//! 5.6041938805884601e0
//! ...
//! ```
//!
//! Floats are written with 17 significant digits, so read/write round-trips
//! are bit-exact.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::PulseSpec;
use crate::error::{Error, Result};

const MAGIC: &str = "homog pulse v1";

/// Pulse plus the provenance recorded in its file header.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseFile {
    pub pulse: PulseSpec,
    pub spin_system: String,
    pub target_gate: String,
}

pub fn write_pulse_to(w: &mut impl Write, file: &PulseFile) -> Result<()> {
    let ctx = |e| Error::io("writing pulse", e);
    writeln!(w, "{MAGIC}").map_err(ctx)?;
    writeln!(w, "n_segments = {}", file.pulse.n_segments()).map_err(ctx)?;
    writeln!(w, "dt_s = {:.16e}", file.pulse.dt_s).map_err(ctx)?;
    writeln!(w, "amplitude_rad_s = {:.16e}", file.pulse.amplitude_rad_s).map_err(ctx)?;
    writeln!(w, "spin_system = {}", file.spin_system).map_err(ctx)?;
    writeln!(w, "target_gate = {}", file.target_gate).map_err(ctx)?;
    writeln!(w, "phases_rad:").map_err(ctx)?;
    for phi in &file.pulse.phases {
        writeln!(w, "{phi:.16e}").map_err(ctx)?;
    }
    Ok(())
}

pub fn write_pulse_file(path: &Path, file: &PulseFile) -> Result<()> {
    let mut buf = Vec::new();
    write_pulse_to(&mut buf, file)?;
    fs::write(path, buf).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn read_pulse_from(r: impl Read) -> Result<PulseFile> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();
    let mut next_line = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::PulseFile("unexpected end of file".into()))?
            .map_err(|e| Error::io("reading pulse", e))
    };

    let magic = next_line()?;
    if magic.trim() != MAGIC {
        return Err(Error::PulseFile(format!(
            "bad magic line `{magic}` (expected `{MAGIC}`)"
        )));
    }
    let mut n_segments: Option<usize> = None;
    let mut dt_s: Option<f64> = None;
    let mut amplitude: Option<f64> = None;
    let mut spin_system: Option<String> = None;
    let mut target_gate: Option<String> = None;
    loop {
        let line = next_line()?;
        let line = line.trim();
        if line == "phases_rad:" {
            break;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::PulseFile(format!("malformed header line `{line}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "n_segments" => {
                n_segments = Some(value.parse().map_err(|_| {
                    Error::PulseFile(format!("bad n_segments `{value}`"))
                })?)
            }
            "dt_s" => {
                dt_s = Some(
                    value
                        .parse()
                        .map_err(|_| Error::PulseFile(format!("bad dt_s `{value}`")))?,
                )
            }
            "amplitude_rad_s" => {
                amplitude = Some(value.parse().map_err(|_| {
                    Error::PulseFile(format!("bad amplitude_rad_s `{value}`"))
                })?)
            }
            "spin_system" => spin_system = Some(value.to_string()),
            "target_gate" => target_gate = Some(value.to_string()),
            other => {
                return Err(Error::PulseFile(format!("unknown header key `{other}`")));
            }
        }
    }
    let n = n_segments.ok_or_else(|| Error::PulseFile("missing n_segments".into()))?;
    let dt_s = dt_s.ok_or_else(|| Error::PulseFile("missing dt_s".into()))?;
    let amplitude =
        amplitude.ok_or_else(|| Error::PulseFile("missing amplitude_rad_s".into()))?;
    let spin_system = spin_system.ok_or_else(|| Error::PulseFile("missing spin_system".into()))?;
    let target_gate = target_gate.ok_or_else(|| Error::PulseFile("missing target_gate".into()))?;

    let mut phases = Vec::with_capacity(n);
    for line in lines {
        let line = line.map_err(|e| Error::io("reading pulse", e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let phi: f64 = line
            .parse()
            .map_err(|_| Error::PulseFile(format!("bad phase `{line}`")))?;
        phases.push(phi);
    }
    if phases.len() != n {
        return Err(Error::PulseFile(format!(
            "header promises {n} phases, file carries {}",
            phases.len()
        )));
    }
    Ok(PulseFile {
        pulse: PulseSpec::new(dt_s, amplitude, phases)?,
        spin_system,
        target_gate,
    })
}

pub fn read_pulse_file(path: &Path) -> Result<PulseFile> {
    let file = fs::File::open(path)
        .map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    read_pulse_from(file)
}
