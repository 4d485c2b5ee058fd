//! Per-family constants C of the grid-dependent tolerances C·dx² and
//! C·(dx² + dt²), read from the calibration fixture.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FIXTURE: &str = include_str!("../../fixtures/calibration.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Cancellation,
    Continuity,
    Schrodinger,
    Liouville,
}

impl Check {
    pub const ALL: [Check; 4] = [
        Check::Cancellation,
        Check::Continuity,
        Check::Schrodinger,
        Check::Liouville,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Cancellation => "cancellation",
            Check::Continuity => "continuity",
            Check::Schrodinger => "schrodinger",
            Check::Liouville => "liouville",
        }
    }

    /// Whether the tolerance includes dt² as well as dx².
    pub fn uses_dt(&self) -> bool {
        matches!(self, Check::Continuity | Check::Schrodinger)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    /// Factor applied to the largest measured ratio.
    pub safety: f64,
    /// Spacings the constants were measured at.
    pub spacings: Vec<f64>,
    pub constants: BTreeMap<String, BTreeMap<Check, f64>>,
}

impl Calibration {
    /// The fixture shipped with the crate.
    pub fn embedded() -> &'static Calibration {
        static CELL: OnceLock<Calibration> = OnceLock::new();
        CELL.get_or_init(|| Calibration::from_json(FIXTURE).expect("embedded calibration fixture parses"))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Calibration = serde_json::from_str(s).map_err(|e| Error::Calibration(e.to_string()))?;
        for (tag, m) in &c.constants {
            if let Some((check, v)) = m.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::Calibration(format!(
                    "{tag}.{}: {v} is not a positive constant",
                    check.name()
                )));
            }
        }
        Ok(c)
    }

    /// Every constant infinite; used when measuring raw residuals.
    pub fn unbounded() -> Self {
        Self {
            safety: 1.0,
            spacings: Vec::new(),
            constants: BTreeMap::new(),
        }
    }

    pub fn constant(&self, tag: &str, check: Check) -> Result<f64> {
        if self.constants.is_empty() {
            return Ok(f64::INFINITY);
        }
        self.constants
            .get(tag)
            .and_then(|m| m.get(&check))
            .copied()
            .ok_or_else(|| Error::Calibration(format!("no constant for {tag}.{}", check.name())))
    }

    pub fn set(&mut self, tag: &str, check: Check, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Calibration(format!(
                "{tag}.{}: {value} is not a positive constant",
                check.name()
            )));
        }
        self.constants.entry(tag.to_string()).or_default().insert(check, value);
        Ok(())
    }
}
