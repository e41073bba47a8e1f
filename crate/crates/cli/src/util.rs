// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use homog_core::spin::{parse_spin_config, ParsedSpinConfig, SpinSystem};

/// Parses a `start:stop:step` grid in degrees.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("grid `{spec}` must be start:stop:step in degrees");
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().with_context(|| format!("bad grid number `{p}`")))
        .collect::<Result<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !step.is_finite() || step <= 0.0 {
        bail!("grid step must be positive");
    }
    if stop < start {
        bail!("grid stop {stop} below start {start}");
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// Loads the spin config if given, else the crotonic defaults.
pub fn load_spin_config(path: Option<&PathBuf>) -> Result<ParsedSpinConfig> {
    match path {
        None => Ok(ParsedSpinConfig {
            system: SpinSystem::crotonic_default(),
            protons: None,
        }),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading spin config {}", path.display()))?;
            Ok(parse_spin_config(&text)
                .with_context(|| format!("parsing spin config {}", path.display()))?)
        }
    }
}

/// Fails early when the output location cannot exist, so no work is wasted
/// and no partial artifact is left behind.
pub fn check_out_path(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            bail!("output directory {} does not exist", parent.display());
        }
    }
    if path.is_dir() {
        bail!("output path {} is a directory", path.display());
    }
    Ok(())
}

/// Writes a fully assembled artifact in one shot.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn parse_rf_scales(spec: &str) -> Result<Vec<f64>> {
    let scales: Vec<f64> = spec
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad rf scale `{p}`"))
        })
        .collect::<Result<_>>()?;
    if scales.is_empty() {
        bail!("rf scales must be nonempty");
    }
    Ok(scales)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:90:10").unwrap().len(), 10);
        assert_eq!(parse_grid("0:0:1").unwrap(), vec![0.0]);
        assert_eq!(parse_grid("5:6:0.5").unwrap(), vec![5.0, 5.5, 6.0]);
        assert!(parse_grid("0:90:0").is_err());
        assert!(parse_grid("90:0:10").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn rf_scale_parsing() {
        assert_eq!(parse_rf_scales("0.95,1.0,1.05").unwrap().len(), 3);
        assert!(parse_rf_scales("x").is_err());
    }
}
