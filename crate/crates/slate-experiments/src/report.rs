//! Report emission: deterministic CSV files plus a run manifest.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::sweep::{ScanPoint, SweepOutcome};

/// Writes the per-slack violation curves: one row per
/// (setting, variant, slack) triple.
pub fn write_sweep_curves(outcome: &SweepOutcome, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("create {path:?}"))?;
    w.write_record(["setting", "variant", "b", "mean_max_d", "n_seeds"])?;
    for cell in &outcome.cells {
        for (i, &slack) in outcome.slack_grid.iter().enumerate() {
            w.write_record([
                cell.setting.clone(),
                cell.variant.label().to_string(),
                slack.to_string(),
                format!("{:.6}", cell.mean_max_d[i]),
                cell.n_instances.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the per-cell summary metrics: one row per (setting, variant).
pub fn write_sweep_metrics(outcome: &SweepOutcome, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("create {path:?}"))?;
    w.write_record([
        "setting",
        "variant",
        "mean_utility",
        "mean_bottom_decile",
        "violation_count",
        "n_seeds",
    ])?;
    for cell in &outcome.cells {
        w.write_record([
            cell.setting.clone(),
            cell.variant.label().to_string(),
            format!("{:.6}", cell.mean_utility),
            format!("{:.6}", cell.mean_bottom_decile),
            cell.violation_count.to_string(),
            cell.n_instances.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a curves CSV back into (setting, variant, b, mean_max_d) rows.
pub fn read_sweep_curves(path: &Path) -> Result<Vec<(String, String, u32, f64)>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("open {path:?}"))?;
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        rows.push((
            record[0].to_string(),
            record[1].to_string(),
            record[2].parse()?,
            record[3].parse()?,
        ));
    }
    Ok(rows)
}

/// Writes parameter-scan points.
pub fn write_scan(points: &[ScanPoint], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("create {path:?}"))?;
    w.write_record([
        "param",
        "value",
        "variant",
        "mean_max_d_at_b0",
        "mean_violating_slacks",
        "violation_count",
        "n_seeds",
    ])?;
    for p in points {
        let param = match p.param {
            crate::sweep::ScanParam::Beta => "beta",
            crate::sweep::ScanParam::Delta => "delta",
            crate::sweep::ScanParam::MuGamma => "mu_gamma",
        };
        w.write_record([
            param.to_string(),
            p.value.to_string(),
            p.variant.label().to_string(),
            format!("{:.6}", p.mean_max_d_at_zero),
            format!("{:.6}", p.mean_violating_slacks),
            p.violation_count.to_string(),
            p.n_instances.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Creates the run directory and records a manifest with the configuration
/// hash, seeds, and crate version.
pub fn init_run_dir(base: &Path, config_text: &str, seeds: &[u64]) -> Result<PathBuf> {
    fs::create_dir_all(base).with_context(|| format!("create run dir {base:?}"))?;
    let digest = Sha256::digest(config_text.as_bytes());
    #[derive(Serialize)]
    struct Manifest<'a> {
        config_sha256: String,
        seeds: &'a [u64],
        version: &'a str,
    }
    let manifest = Manifest {
        config_sha256: hex::encode(digest),
        seeds,
        version: env!("CARGO_PKG_VERSION"),
    };
    let mut f = fs::File::create(base.join("manifest.json"))?;
    writeln!(f, "{}", serde_json::to_string_pretty(&manifest)?)?;
    Ok(base.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{SweepCell, SweepOutcome};
    use slate_process::Variant;

    fn sample_outcome() -> SweepOutcome {
        SweepOutcome {
            slack_grid: vec![0, 1],
            cells: vec![SweepCell {
                setting: "exact".into(),
                variant: Variant::Fast,
                n_instances: 2,
                mean_utility: 4.5,
                mean_bottom_decile: 1.25,
                mean_max_d: vec![0.75, 0.5],
                mean_violating_slacks: 0.0,
                violation_count: 0,
            }],
        }
    }

    #[test]
    fn curves_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.csv");
        let outcome = sample_outcome();
        write_sweep_curves(&outcome, &path).unwrap();
        let rows = read_sweep_curves(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], ("exact".into(), "fast".into(), 0, 0.75));
        assert_eq!(rows[1], ("exact".into(), "fast".into(), 1, 0.5));
    }

    #[test]
    fn identical_outcomes_produce_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_sweep_curves(&sample_outcome(), &a).unwrap();
        write_sweep_curves(&sample_outcome(), &b).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }

    #[test]
    fn empty_outcome_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        let outcome = SweepOutcome {
            slack_grid: vec![],
            cells: vec![],
        };
        write_sweep_curves(&outcome, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.trim(), "setting,variant,b,mean_max_d,n_seeds");
    }

    #[test]
    fn manifest_records_config_hash() {
        let dir = tempfile::tempdir().unwrap();
        init_run_dir(dir.path(), "config text", &[1, 2, 3]).unwrap();
        let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert!(manifest.contains("config_sha256"));
        assert!(manifest.contains("\"seeds\""));
    }
}
