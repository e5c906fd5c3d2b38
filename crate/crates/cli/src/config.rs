//! Run configuration, read from TOML. Every section and key is optional; unknown
//! keys are rejected by name.
// `!(a < b)` is the NaN-rejecting comparison, kept deliberately.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};

use periods_core::representation::GroupRep;
use periods_core::statistics::{DEFAULT_GRID_POINTS, DEFAULT_GRID_START};
use periods_core::{schottky_sl2, sym_power, CountMode, Functional};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub representation: RepresentationConfig,
    pub enumeration: EnumerationConfig,
    pub functionals: FunctionalsConfig,
    pub clt: CltConfig,
    pub proximality: ProximalityConfig,
    pub verify: VerifyConfig,
    pub synthetic: Option<SyntheticConfig>,
    pub run: RunSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Schottky,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepresentationConfig {
    pub family: Family,
    pub multiplier: f64,
    pub angle: f64,
    /// Symmetric power applied to the Schottky pair; 1 keeps it in `SL(2)`.
    pub sym_power: usize,
    /// Representation file, relative to the config file.
    pub path: Option<PathBuf>,
}

impl Default for RepresentationConfig {
    fn default() -> Self {
        RepresentationConfig {
            family: Family::Schottky,
            multiplier: 4.0,
            angle: std::f64::consts::FRAC_PI_4,
            sym_power: 1,
            path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnumerationConfig {
    pub max_len: usize,
    pub mode: CountMode,
    pub class_budget: u64,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig { max_len: 12, mode: CountMode::All, class_budget: 10_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomFunctional {
    pub name: String,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FunctionalsConfig {
    /// Orders classes; `length`, `chi<k>` or a custom name.
    pub order: String,
    /// Observed in the CLT; equal to `order` for the self-conditioned harness.
    pub observe: String,
    pub custom: Vec<CustomFunctional>,
}

impl Default for FunctionalsConfig {
    fn default() -> Self {
        FunctionalsConfig { order: "length".into(), observe: "chi1".into(), custom: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CltConfig {
    /// Explicit thresholds; when absent the grid spans `[grid_start * T, T]`
    /// for the completeness horizon `T`.
    pub t_grid: Option<Vec<f64>>,
    pub grid_start: f64,
    pub grid_points: usize,
    pub histogram_width: f64,
}

impl Default for CltConfig {
    fn default() -> Self {
        CltConfig { t_grid: None, grid_start: DEFAULT_GRID_START, grid_points: DEFAULT_GRID_POINTS, histogram_width: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProximalityConfig {
    pub r: f64,
    pub eps: f64,
    pub samples: usize,
}

impl Default for ProximalityConfig {
    fn default() -> Self {
        ProximalityConfig { r: 1.2, eps: 0.05, samples: periods_core::spectral::DEFAULT_SAMPLES }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub random_instances: usize,
    pub dims: Vec<usize>,
    pub class_max_len: usize,
    /// Symmetric powers of the Schottky pair whose classes are checked.
    pub class_sym_powers: Vec<usize>,
    pub power_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            random_instances: 1000,
            dims: vec![2, 3, 4],
            class_max_len: 10,
            class_sym_powers: vec![1, 2, 3],
            power_samples: 100,
        }
    }
}

/// Planted dataset for end-to-end checks of the CLT harness: periods with
/// counting function `e^(h t) / (h t)` and observable `L p + sigma sqrt(p) Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub h: f64,
    pub l: f64,
    pub sigma: f64,
    pub t_max: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    /// 0 uses every available core. Not part of the config hash.
    pub workers: usize,
    /// Not part of the config hash.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        Ok(cfg)
    }

    /// Reads `path`, resolving a relative representation path against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            e => e,
        })?;
        if let (Some(p), Some(dir)) = (cfg.representation.path.as_mut(), path.parent()) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let rep = &self.representation;
        if rep.family == Family::File && rep.path.is_none() {
            return bad("representation.family = \"file\" needs representation.path".into());
        }
        if !(1..=12).contains(&rep.sym_power) {
            return bad(format!("representation.sym_power = {} outside 1..=12", rep.sym_power));
        }
        let e = &self.enumeration;
        if !(1..=40).contains(&e.max_len) {
            return bad(format!("enumeration.max_len = {} outside 1..=40", e.max_len));
        }
        if e.class_budget == 0 {
            return bad("enumeration.class_budget must be positive".into());
        }
        let p = &self.proximality;
        if !(p.r.is_finite() && p.r > 0.0) {
            return bad(format!("proximality.r = {} must be positive and finite", p.r));
        }
        if !(p.eps > 0.0 && p.eps <= 1.0) {
            return bad(format!("proximality.eps = {} outside (0, 1]", p.eps));
        }
        let c = &self.clt;
        if let Some(g) = &c.t_grid {
            if g.len() < 3 {
                return bad(format!("clt.t_grid has {} points, needs at least 3", g.len()));
            }
            if g.windows(2).any(|w| !(w[0] < w[1])) || g.iter().any(|t| !t.is_finite()) {
                return bad("clt.t_grid must be finite and strictly increasing".into());
            }
        }
        if c.grid_points < 3 {
            return bad(format!("clt.grid_points = {} is below 3", c.grid_points));
        }
        if !(c.grid_start > 0.0 && c.grid_start < 1.0) {
            return bad(format!("clt.grid_start = {} outside (0, 1)", c.grid_start));
        }
        if !(c.histogram_width > 0.0 && c.histogram_width <= 8.0) {
            return bad(format!("clt.histogram_width = {} outside (0, 8]", c.histogram_width));
        }
        let v = &self.verify;
        if v.dims.iter().any(|&d| !(2..=8).contains(&d)) {
            return bad(format!("verify.dims = {:?} must lie in 2..=8", v.dims));
        }
        if v.class_sym_powers.iter().any(|&k| !(1..=12).contains(&k)) {
            return bad(format!("verify.class_sym_powers = {:?} must lie in 1..=12", v.class_sym_powers));
        }
        if let Some(s) = &self.synthetic {
            if !(s.h > 0.0 && s.sigma > 0.0 && s.l.is_finite() && s.h * s.t_max > 1.0) {
                return bad("synthetic needs h > 0, sigma > 0, finite l and h * t_max > 1".into());
            }
            if (s.h * s.t_max).exp() / (s.h * s.t_max) > 1e7 {
                return bad("synthetic dataset would exceed 1e7 records".into());
            }
        }
        Ok(())
    }

    /// Representation described by the config.
    pub fn build_rep(&self) -> Result<GroupRep, CliError> {
        let rep = &self.representation;
        match rep.family {
            Family::Schottky => {
                let base = schottky_sl2(rep.multiplier, rep.angle)?;
                if rep.sym_power == 1 {
                    Ok(base)
                } else {
                    Ok(sym_power(&base, rep.sym_power)?)
                }
            }
            Family::File => {
                let path = rep.path.as_ref().expect("validated");
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                Ok(GroupRep::from_toml_str(&text)?)
            }
        }
    }

    /// Functional list for dimension `dim`: `order` first, then `observe` if it differs.
    pub fn functionals(&self, dim: usize) -> Result<Vec<Functional>, CliError> {
        let resolve = |name: &str| -> Result<Functional, CliError> {
            if let Some(c) = self.functionals.custom.iter().find(|c| c.name == name) {
                let f = Functional::new(c.name.clone(), c.coeffs.clone())?;
                f.check_dim(dim)?;
                return Ok(f);
            }
            Ok(Functional::named(name, dim)?)
        };
        let mut list = vec![resolve(&self.functionals.order)?];
        if self.functionals.observe != self.functionals.order {
            list.push(resolve(&self.functionals.observe)?);
        }
        Ok(list)
    }

    /// SHA-256 of the canonical JSON form, leaving out settings that must not
    /// change outputs (worker count, output directory).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.workers = 0;
        c.run.out = None;
        let json = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_default() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn unknown_key_is_named() {
        let e = RunConfig::from_toml_str("[enumeration]\nmax_length = 3\n").unwrap_err();
        assert!(e.to_string().contains("max_length"), "{e}");
    }

    #[test]
    fn short_grid_rejected() {
        let c = RunConfig::from_toml_str("[clt]\nt_grid = [1.0]\n").unwrap();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn hash_ignores_workers_only() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.run.workers = 7;
        assert_eq!(a.hash(), b.hash());
        b.run.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn custom_functionals_resolve() {
        let c = RunConfig::from_toml_str(
            "[functionals]\norder = \"length\"\nobserve = \"psi\"\n[[functionals.custom]]\nname = \"psi\"\ncoeffs = [1.0, 2.0]\n",
        )
        .unwrap();
        let f = c.functionals(3).unwrap();
        assert_eq!(f[1].coeffs(), &[1.0, 2.0]);
        assert!(c.functionals(4).is_err());
    }
}
