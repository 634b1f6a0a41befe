//! Run configuration: flat key-value text with sections (JSON accepted as
//! an alternative), canonical serialization and the config hash embedded in
//! every output artifact.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Context};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupSpec {
    pub l: usize,
    pub a: usize,
    pub b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default = "default_perturb_seed")]
    pub seed: u64,
}

fn default_perturb_seed() -> u64 {
    42
}

impl GroupSpec {
    pub fn id(&self) -> String {
        match self.eps {
            Some(e) if e != 0.0 => format!(
                "P({},{})_{}[eps={},seed={}]",
                self.a, self.b, self.l, e, self.seed
            ),
            _ => format!("H({},{})_{}", self.a, self.b, self.l),
        }
    }

    pub fn build(&self) -> anyhow::Result<nilspec::algebra::EndomorphismSpace> {
        let space = match self.eps {
            Some(e) if e != 0.0 => {
                nilspec::algebra::perturbed_h_type_space(self.l, self.a, self.b, e, self.seed)?
            }
            _ => nilspec::algebra::h_type_space(self.l, self.a, self.b)?,
        };
        Ok(space)
    }

    /// The sigma-equivalent partner with the same `a + b`: block pattern
    /// `(a + b, 0)` built from the same (possibly perturbed) module.
    pub fn sigma_partner(&self) -> GroupSpec {
        GroupSpec {
            l: self.l,
            a: self.a + self.b,
            b: 0,
            eps: self.eps,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub group: GroupSpec,
    /// basis mode: "constant" or "changing"
    #[serde(default = "default_basis")]
    pub basis: String,
    /// quadrature preset name
    #[serde(default = "default_quad")]
    pub quad: String,
    /// global seed for samplers
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// verification sample count
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Hermite truncation level for spectra
    #[serde(default = "default_level")]
    pub level: usize,
    /// tolerance ledger: check name -> tolerance
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn default_basis() -> String {
    "constant".to_string()
}
fn default_quad() -> String {
    "l3-default".to_string()
}
fn default_seed() -> u64 {
    2024
}
fn default_samples() -> usize {
    20
}
fn default_level() -> usize {
    6
}

/// Built-in tolerance ledger; config `[tolerances]` entries override.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    let mut t = BTreeMap::new();
    for (k, v) in [
        ("identity-MF", 1e-5),
        ("identity-DeltaZF", 1e-5),
        ("intertwine-laplacian", 1e-4),
        ("z-neumann-identity", 1e-4),
        ("second-radial", 1e-4),
        ("boundary-laplacian", 1e-4),
        ("dirichlet", 1e-10),
        ("z-neumann", 1e-4),
        ("neumann-span", 1e-8),
        ("independence-threshold", 1e-8),
        ("spectrum-compare", 1e-9),
        ("stencil-step", 1e-3),
    ] {
        t.insert(k.to_string(), v);
    }
    t
}

impl RunConfig {
    pub fn tol(&self, key: &str) -> f64 {
        if let Some(v) = self.tolerances.get(key) {
            return *v;
        }
        *default_tolerances()
            .get(key)
            .unwrap_or_else(|| panic!("unknown tolerance key '{key}'"))
    }

    pub fn quad_spec(&self) -> anyhow::Result<nilspec::quad::QuadSpec> {
        Ok(nilspec::quad::QuadSpec::preset(&self.quad)?)
    }

    /// Canonical flat text form; the config hash is the SHA-256 of this.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[group]");
        let _ = writeln!(s, "l = {}", self.group.l);
        let _ = writeln!(s, "a = {}", self.group.a);
        let _ = writeln!(s, "b = {}", self.group.b);
        if let Some(e) = self.group.eps {
            let _ = writeln!(s, "eps = {}", e);
            let _ = writeln!(s, "seed = {}", self.group.seed);
        }
        let _ = writeln!(s, "[basis]");
        let _ = writeln!(s, "mode = {}", self.basis);
        let _ = writeln!(s, "[quad]");
        let _ = writeln!(s, "preset = {}", self.quad);
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "level = {}", self.level);
        if !self.tolerances.is_empty() {
            let _ = writeln!(s, "[tolerances]");
            for (k, v) in &self.tolerances {
                let _ = writeln!(s, "{} = {}", k, v);
            }
        }
        s
    }

    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_text().as_bytes());
        let digest = h.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }

    pub fn apply_override(&mut self, kv: &str) -> anyhow::Result<()> {
        let (k, v) = kv
            .split_once('=')
            .context("tolerance override must be KEY=VALUE")?;
        let value: f64 = v
            .trim()
            .parse()
            .with_context(|| format!("bad tolerance value '{v}'"))?;
        self.tolerances.insert(k.trim().to_string(), value);
        Ok(())
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            group: GroupSpec {
                l: 3,
                a: 1,
                b: 1,
                eps: None,
                seed: default_perturb_seed(),
            },
            basis: default_basis(),
            quad: default_quad(),
            seed: default_seed(),
            samples: default_samples(),
            level: default_level(),
            tolerances: BTreeMap::new(),
        }
    }
}

/// Parse the flat sectioned key-value grammar, or JSON when the document
/// starts with `{`.
pub fn parse_config(text: &str) -> anyhow::Result<RunConfig> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed).context("config JSON parse failure");
    }
    let mut cfg = RunConfig::default();
    let mut group_seen = false;
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].trim().to_string();
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("line {}: expected 'key = value', got '{raw}'", lineno + 1);
        };
        let key = k.trim();
        let val = v.trim();
        let parse_usize = |val: &str| -> anyhow::Result<usize> {
            val.parse()
                .with_context(|| format!("line {}: field '{key}': bad integer '{val}'", lineno + 1))
        };
        match (section.as_str(), key) {
            ("group", "l") => {
                cfg.group.l = parse_usize(val)?;
                group_seen = true;
            }
            ("group", "a") => {
                cfg.group.a = parse_usize(val)?;
                group_seen = true;
            }
            ("group", "b") => {
                cfg.group.b = parse_usize(val)?;
                group_seen = true;
            }
            ("group", "eps") => {
                cfg.group.eps = Some(val.parse().with_context(|| {
                    format!("line {}: field 'eps': bad float '{val}'", lineno + 1)
                })?)
            }
            ("group", "seed") => cfg.group.seed = val.parse()?,
            ("basis", "mode") => {
                if val != "constant" && val != "changing" {
                    bail!(
                        "line {}: basis mode must be 'constant' or 'changing'",
                        lineno + 1
                    );
                }
                cfg.basis = val.to_string();
            }
            ("quad", "preset") => cfg.quad = val.to_string(),
            ("run", "seed") => cfg.seed = val.parse()?,
            ("run", "samples") => cfg.samples = parse_usize(val)?,
            ("run", "level") => cfg.level = parse_usize(val)?,
            ("tolerances", name) => {
                cfg.tolerances.insert(
                    name.to_string(),
                    val.parse().with_context(|| {
                        format!("line {}: tolerance '{name}': bad float", lineno + 1)
                    })?,
                );
            }
            (sec, key) => bail!("line {}: unknown field '[{}] {}'", lineno + 1, sec, key),
        }
    }
    if group_seen && cfg.group.a + cfg.group.b == 0 {
        bail!("config rejected: group needs a + b >= 1");
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_sectioned_text() {
        let text = "
# comment
[group]
l = 3
a = 2
b = 0
[quad]
preset = l3-default
[run]
seed = 7
[tolerances]
intertwine-laplacian = 2e-4
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.group.l, 3);
        assert_eq!(cfg.group.a, 2);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.tol("intertwine-laplacian"), 2e-4);
        assert_eq!(cfg.tol("identity-MF"), 1e-5);
    }

    #[test]
    fn zero_copies_rejected_at_parse_level() {
        let text = "[group]\nl = 3\na = 0\nb = 0\n";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn json_alternative_and_hash_stability() {
        let cfg1 = parse_config("[group]\nl = 3\na = 1\nb = 1\n").unwrap();
        let cfg2 = parse_config("{\"group\": {\"l\": 3, \"a\": 1, \"b\": 1}}").unwrap();
        assert_eq!(cfg1.hash(), cfg2.hash());
        let mut cfg3 = cfg1.clone();
        cfg3.apply_override("identity-MF=1e-6").unwrap();
        assert_ne!(cfg1.hash(), cfg3.hash());
    }

    #[test]
    fn unknown_field_has_line_diagnostic() {
        let err = parse_config("[group]\nl = 3\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }
}
