use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use serde::Deserialize;
use vreg_core::scalars::Q64;
use vreg_core::suites::{FieldMode, SuiteParams, SUITES};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(rename = "D")]
    pub d: u32,
    pub mode: ModeSpec,
    pub cutoff: i64,
    #[serde(default)]
    pub momenta: Vec<String>,
    pub suites: Vec<SuiteSpec>,
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSpec {
    Formal,
    Concrete(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub name: String,
    #[serde(default)]
    pub window: Option<i64>,
    #[serde(default)]
    pub depth: Option<i64>,
    #[serde(default)]
    pub pairing_weight: Option<i64>,
    #[serde(default)]
    pub branches: Option<Vec<i64>>,
    #[serde(default)]
    pub scale: Option<String>,
    #[serde(default)]
    pub mutate: bool,
}

/// A validated run plan: suites in config order with their parameters.
pub struct Plan {
    pub suites: Vec<(String, SuiteParams)>,
    pub report: Option<PathBuf>,
}

fn rational(s: &str, what: &str) -> Result<BigRational> {
    s.trim().parse::<BigRational>().map_err(|e| anyhow!("{what} {s:?} is not a rational number: {e}"))
}

pub fn load(path: &Path) -> Result<SessionConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

impl SessionConfig {
    pub fn plan(&self) -> Result<Plan> {
        if self.d == 0 {
            bail!("D must be positive");
        }
        if self.cutoff < 2 {
            bail!("cutoff must be at least 2, got {}", self.cutoff);
        }
        if self.suites.is_empty() {
            bail!("the suite list is empty");
        }
        let mode = match &self.mode {
            ModeSpec::Formal => FieldMode::Formal,
            ModeSpec::Concrete(v) => {
                let z = rational(v, "concrete z")?;
                if z == BigRational::from_integer(0.into()) {
                    bail!("concrete z must be nonzero");
                }
                FieldMode::Concrete(z)
            }
        };
        let momenta = self
            .momenta
            .iter()
            .map(|m| m.trim().parse::<Q64>().map_err(|e| anyhow!("momentum {m:?}: {e}")))
            .collect::<Result<Vec<_>>>()?;
        let mut suites = Vec::new();
        for s in &self.suites {
            if !SUITES.contains(&s.name.as_str()) {
                bail!("unknown suite {:?}; known suites: {}", s.name, SUITES.join(", "));
            }
            let mut p = SuiteParams { d: self.d, mode: mode.clone(), cutoff: self.cutoff, ..SuiteParams::default() };
            if !momenta.is_empty() {
                p.momenta = momenta.clone();
            }
            p.window = s.window;
            p.depth = s.depth;
            p.pairing_weight = s.pairing_weight;
            if let Some(b) = &s.branches {
                p.branches = b.clone();
            }
            p.scale = s.scale.as_deref().map(|v| rational(v, "scale")).transpose()?;
            p.mutate = s.mutate;
            if p.window.is_some_and(|w| w < 0) || p.depth.is_some_and(|d| d < 0) || p.pairing_weight.is_some_and(|w| w < 0) {
                bail!("suite {:?}: window, depth and pairing weight must be nonnegative", s.name);
            }
            suites.push((s.name.clone(), p));
        }
        Ok(Plan { suites, report: self.report.clone() })
    }
}

/// Parses `lo..hi` into the half-width max(|lo|, |hi|).
pub fn parse_window(s: &str) -> Result<i64> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| anyhow!("window {s:?} must look like lo..hi"))?;
    let lo: i64 = lo.trim().parse().with_context(|| format!("window lower end {lo:?}"))?;
    let hi: i64 = hi.trim().parse().with_context(|| format!("window upper end {hi:?}"))?;
    if lo > hi {
        bail!("window {s:?} is empty");
    }
    Ok(lo.abs().max(hi.abs()))
}
