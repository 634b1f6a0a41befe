//! Deterministic artifact writing: `report.json`, `rows.jsonl`,
//! `spectrum.csv`. Identical configurations produce byte-identical files:
//! map keys are ordered, floats print as shortest round-trip decimals, and
//! no timestamps are embedded.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs;
use std::path::Path;

use nilspec::report::CheckReport;

pub fn write_report<T: Serialize>(out_dir: &Path, report: &T) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let json = serde_json::to_string_pretty(report)?;
    fs::write(out_dir.join("report.json"), json + "\n")?;
    Ok(())
}

pub fn write_rows(out_dir: &Path, config_hash: &str, reports: &[CheckReport]) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let mut lines = String::new();
    for rep in reports {
        for r in &rep.rows {
            #[derive(Serialize)]
            struct Line<'a> {
                check: &'a str,
                config_hash: &'a str,
                sample: usize,
                lhs: [f64; 2],
                rhs: [f64; 2],
                residual: f64,
                verdict: bool,
            }
            lines.push_str(&serde_json::to_string(&Line {
                check: &r.check,
                config_hash,
                sample: r.sample,
                lhs: r.lhs,
                rhs: r.rhs,
                residual: r.residual,
                verdict: r.verdict,
            })?);
            lines.push('\n');
        }
    }
    fs::write(out_dir.join("rows.jsonl"), lines)?;
    Ok(())
}

pub fn write_csv(out_dir: &Path, config_hash: &str, csv: &str) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let header =
        format!("# config_hash {config_hash}\ngamma_index,block,eigenvalue,multiplicity\n");
    fs::write(out_dir.join("spectrum.csv"), format!("{header}{csv}"))?;
    Ok(())
}
