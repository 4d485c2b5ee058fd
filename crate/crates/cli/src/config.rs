//! Run configuration: a JSON file, validated against the catalog schema
//! before anything is computed, with command-line flags layered on top.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use bohmfree::verify::{Calibration, Check, VerifyCase};
use bohmfree::{Family, FreeAction, Grid1D, Potential, Section, Seeds, Units};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "bohmfree/1";

/// Default spacing of the laboratory grid when none is configured.
pub const DEFAULT_DX: f64 = 5e-3;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub units: UnitsConfig,
    pub family: Option<FamilyConfig>,
    pub action: Option<ActionConfig>,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    pub seeds: Option<SeedsConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Build the amplitude from another family of the same section.
    pub amplitude_from: Option<FamilyConfig>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsConfig {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub tag: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionConfig {
    Separable { k: f64 },
    NonSeparable { x0: f64, t0: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t: Option<f64>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
    pub snapshots: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub ode_tol: Option<f64>,
    /// Replacement constants C for the configured family.
    #[serde(default)]
    pub residual_constant_overrides: BTreeMap<Check, f64>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedsConfig {
    pub a0: Option<f64>,
    pub da0: Option<f64>,
    /// Scale of the delta-trap amplitude; same as the family parameter.
    pub beta: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub params: BTreeMap<String, ParamRange>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamRange {
    List(Vec<f64>),
    Linspace(Linspace),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub num: usize,
}

impl ParamRange {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            ParamRange::List(v) => v.clone(),
            ParamRange::Linspace(Linspace { start, stop, num }) => match num {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        };
        ensure!(v.iter().all(|x| x.is_finite()), "sweep values must be finite");
        Ok(v)
    }

    /// Number of values, without materializing them.
    pub fn len(&self) -> usize {
        match self {
            ParamRange::List(v) => v.len(),
            ParamRange::Linspace(l) => l.num,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Everything a command needs, validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub units: Units,
    pub family: Family,
    pub action: FreeAction,
    pub potential: Potential,
    pub amplitude_family: Option<Family>,
    pub seeds: Seeds,
    /// Seeds the user did not set and that the ODE path will use.
    pub seeds_defaulted: bool,
    pub ode_tol: f64,
    pub calibration: Calibration,
    pub tol_scale: f64,
    pub grid: Option<Grid1D>,
    pub time: TimeConfig,
}

fn family_from(cfg: &FamilyConfig) -> Result<Family> {
    Family::from_params(&cfg.tag, &cfg.params).with_context(|| format!("family {}", cfg.tag))
}

/// Apply the flags, then check the configuration as a whole.
pub fn resolve(cfg: &RunConfig, family_flag: Option<&str>, tol_scale: Option<f64>) -> Result<Resolved> {
    let units = Units::new(cfg.units.hbar, cfg.units.mass)?;
    let family_cfg = match (family_flag, &cfg.family) {
        (Some(tag), Some(fc)) if fc.tag == tag => fc.clone(),
        (Some(tag), _) => FamilyConfig {
            tag: tag.to_string(),
            params: BTreeMap::new(),
        },
        (None, Some(fc)) => fc.clone(),
        (None, None) => bail!("no family given; pass --family or set family.tag in the config"),
    };
    let mut family_cfg = family_cfg;
    let seeds_cfg = cfg.seeds.unwrap_or_default();
    if let Some(beta) = seeds_cfg.beta {
        ensure!(family_cfg.tag == "delta_trap", "seeds.beta applies only to delta_trap");
        if let Some(&b) = family_cfg.params.get("beta") {
            ensure!(b == beta, "seeds.beta ({beta}) contradicts family.params.beta ({b})");
        }
        family_cfg.params.insert("beta".into(), beta);
    }
    let family = family_from(&family_cfg)?;
    let section = family.section().context("family has no action section")?;

    let action = match cfg.action {
        Some(ActionConfig::Separable { k }) => FreeAction::separable(k, units)?,
        Some(ActionConfig::NonSeparable { x0, t0 }) => FreeAction::non_separable(x0, t0, units)?,
        None => match section {
            Section::Separable => FreeAction::separable(1.0, units)?,
            Section::NonSeparable => FreeAction::non_separable(0.0, 0.0, units)?,
        },
    };
    let potential = Potential::for_action(family, &action)?;

    let amplitude_family = match &cfg.amplitude_from {
        Some(fc) => {
            let f = family_from(fc)?;
            ensure!(
                f.section() == Some(section),
                "amplitude_from {} belongs to the other action variant",
                fc.tag
            );
            Some(f)
        }
        None => None,
    };

    let default = Seeds::default();
    let seeds = Seeds {
        a0: seeds_cfg.a0.unwrap_or(default.a0),
        da0: seeds_cfg.da0.unwrap_or(default.da0),
        a1: seeds_cfg.a1.unwrap_or(default.a1),
        a2: seeds_cfg.a2.unwrap_or(default.a2),
    };
    ensure!(
        [seeds.a0, seeds.da0, seeds.a1, seeds.a2].iter().all(|v| v.is_finite()),
        "seeds must be finite"
    );
    let seeds_defaulted = seeds_cfg.a0.is_none() && seeds_cfg.da0.is_none();

    let ode_tol = cfg.tolerances.ode_tol.unwrap_or(1e-12);
    ensure!(
        (1e-12..=1e-4).contains(&ode_tol),
        "tolerances.ode_tol must lie in [1e-12, 1e-4]"
    );
    let mut calibration = Calibration::embedded().clone();
    for (&check, &c) in &cfg.tolerances.residual_constant_overrides {
        calibration.set(family.tag(), check, c)?;
    }
    let tol_scale = tol_scale.unwrap_or(1.0);
    ensure!(tol_scale.is_finite() && tol_scale > 0.0, "--tol-scale must be positive");

    let grid = match cfg.grid {
        Some(g) => Some(Grid1D::new(g.x_min, g.x_max, g.n)?),
        None => None,
    };
    for (name, v) in [
        ("t", cfg.time.t),
        ("t_start", cfg.time.t_start),
        ("t_end", cfg.time.t_end),
    ] {
        if let Some(v) = v {
            ensure!(v.is_finite(), "time.{name} must be finite");
        }
    }
    if let Some(t) = cfg.time.t {
        action.elapsed(t)?;
    }

    Ok(Resolved {
        units,
        family,
        action,
        potential,
        amplitude_family,
        seeds,
        seeds_defaulted,
        ode_tol,
        calibration,
        tol_scale,
        grid,
        time: cfg.time,
    })
}

impl Resolved {
    /// Time of the state: configured, or 0.3 (separable) / t0 + 1.5.
    pub fn t(&self) -> f64 {
        self.time.t.unwrap_or_else(|| match self.family.section() {
            Some(Section::NonSeparable) => self.action.elapsed_origin() + 1.5,
            _ => 0.3,
        })
    }

    /// Configured grid, or the family's standard window mapped to x at t.
    pub fn grid_at(&self, t: f64) -> Result<Grid1D> {
        if let Some(g) = self.grid {
            return Ok(g);
        }
        let (lo, hi) = VerifyCase::window(&self.family);
        let c = self.potential.coordinate();
        Ok(Grid1D::with_spacing(
            c.position(lo, t, &self.units)?,
            c.position(hi, t, &self.units)?,
            DEFAULT_DX,
        )?)
    }

    pub fn case(&self) -> Result<VerifyCase> {
        let t = self.t();
        let grid = self.grid_at(t)?;
        Ok(VerifyCase {
            potential: self.potential,
            grid,
            t,
            dt: grid.dx() * grid.dx(),
            t_later: t + 0.5,
        })
    }
}

/// Extension used for the default time of non-separable states.
trait Origin {
    fn elapsed_origin(&self) -> f64;
}

impl Origin for FreeAction {
    fn elapsed_origin(&self) -> f64 {
        match self.kind {
            bohmfree::ActionKind::NonSeparable { t0, .. } => t0,
            bohmfree::ActionKind::Separable { .. } => 0.0,
        }
    }
}
