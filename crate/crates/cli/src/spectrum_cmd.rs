//! Spectrum commands: single Box spectra, pair comparison, torus-bundle
//! truncations.

use anyhow::{bail, Context};
use nalgebra::DVector;
use serde::Serialize;
use std::collections::BTreeMap;

use nilspec::spectra::{box_spectrum, compare_spectra, torus_bundle_spectrum, SpectrumReport};

use crate::config::{GroupSpec, RunConfig};

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumOutcome {
    pub mode: String,
    pub config_hash: String,
    pub tool_version: String,
    pub tolerances: BTreeMap<String, f64>,
    pub reports: Vec<SpectrumReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<nilspec::spectra::ComparisonVerdict>,
    pub passed: bool,
    pub csv: String,
}

/// Parse `H(a,b,l)` or `P(a,b,l,eps,seed)`.
pub fn parse_group_token(token: &str) -> anyhow::Result<GroupSpec> {
    let token = token.trim();
    let (kind, rest) = token.split_at(1);
    let rest = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .with_context(|| format!("bad group token '{token}'; expected H(a,b,l)"))?;
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    match (kind, parts.len()) {
        ("H", 3) => Ok(GroupSpec {
            a: parts[0].parse()?,
            b: parts[1].parse()?,
            l: parts[2].parse()?,
            eps: None,
            seed: 42,
        }),
        ("P", 5) => Ok(GroupSpec {
            a: parts[0].parse()?,
            b: parts[1].parse()?,
            l: parts[2].parse()?,
            eps: Some(parts[3].parse()?),
            seed: parts[4].parse()?,
        }),
        _ => bail!("bad group token '{token}'; expected H(a,b,l) or P(a,b,l,eps,seed)"),
    }
}

/// Parse a gamma spec: `e1`, `e1+e2`, `random`, or a comma list.
pub fn parse_gamma(spec: &str, l: usize, seed: u64) -> anyhow::Result<DVector<f64>> {
    let spec = spec.trim();
    if spec == "random" {
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut v = DVector::zeros(l);
        for i in 0..l {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            v[i] = ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0;
        }
        return Ok(v);
    }
    if spec.contains(',') {
        let parts: Vec<f64> = spec
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .context("bad gamma component")?;
        if parts.len() != l {
            bail!("gamma has {} components, the Z-space has {l}", parts.len());
        }
        return Ok(DVector::from_vec(parts));
    }
    let mut v = DVector::zeros(l);
    for term in spec.split('+') {
        let term = term.trim();
        let idx: usize = term
            .strip_prefix('e')
            .with_context(|| format!("bad gamma term '{term}'"))?
            .parse()?;
        if idx == 0 || idx > l {
            bail!("gamma term '{term}' out of range 1..={l}");
        }
        v[idx - 1] += 1.0;
    }
    Ok(v)
}

pub fn run_box(cfg: &RunConfig, gamma_spec: &str) -> anyhow::Result<SpectrumOutcome> {
    let space = cfg.group.build()?;
    let gamma = parse_gamma(gamma_spec, space.l, cfg.seed)?;
    let rep = box_spectrum(&space, &gamma, cfg.level, &cfg.group.id())?;
    let csv = rep.to_csv(0);
    Ok(SpectrumOutcome {
        mode: "box".to_string(),
        config_hash: cfg.hash(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        tolerances: crate::config::default_tolerances(),
        reports: vec![rep],
        comparison: None,
        passed: true,
        csv,
    })
}

pub fn run_compare(
    cfg: &RunConfig,
    pair: &str,
    gamma_spec: &str,
) -> anyhow::Result<SpectrumOutcome> {
    let (ta, tb) = pair
        .split_once(':')
        .context("pair must look like H(1,1,3):H(2,0,3)")?;
    let ga = parse_group_token(ta)?;
    let gb = parse_group_token(tb)?;
    let sa = ga.build()?;
    let sb = gb.build()?;
    let gamma = parse_gamma(gamma_spec, sa.l, cfg.seed)?;
    let ra = box_spectrum(&sa, &gamma, cfg.level, &ga.id())?;
    let rb = box_spectrum(&sb, &gamma, cfg.level, &gb.id())?;
    let tol = cfg.tol("spectrum-compare");
    let verdict = compare_spectra(&ra, &rb, tol)?;
    let mut csv = ra.to_csv(0);
    csv.push_str(&rb.to_csv(1));
    let passed = verdict.verdict;
    Ok(SpectrumOutcome {
        mode: "compare".to_string(),
        config_hash: cfg.hash(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        tolerances: crate::config::default_tolerances(),
        reports: vec![ra, rb],
        comparison: Some(verdict),
        passed,
        csv,
    })
}

pub fn run_torus(cfg: &RunConfig, radius: f64) -> anyhow::Result<SpectrumOutcome> {
    let space = cfg.group.build()?;
    let basis: Vec<DVector<f64>> = (0..space.l)
        .map(|i| {
            let mut v = DVector::zeros(space.l);
            v[i] = 1.0;
            v
        })
        .collect();
    let reports = torus_bundle_spectrum(&space, &basis, cfg.level, radius, &cfg.group.id())?;
    let mut csv = String::new();
    for (i, r) in reports.iter().enumerate() {
        csv.push_str(&r.to_csv(i));
    }
    Ok(SpectrumOutcome {
        mode: "torus".to_string(),
        config_hash: cfg.hash(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        tolerances: crate::config::default_tolerances(),
        reports,
        comparison: None,
        passed: true,
        csv,
    })
}
