//! The catalog of external potentials whose Bohm potential can be cancelled
//! by an amplitude riding on a free classical action.
//!
//! Every family depends on (x, t) only through a reduced coordinate: z = x − kt/m
//! for the eight families tied to the separable action, y = (x − x0)/(t − t0)
//! for the four tied to the non-separable one. The latter enter the laboratory
//! frame as V(x, t) = 𝒱(y)/(t − t0)².

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::actions::{ActionKind, FreeAction};
use crate::error::{Error, Result};
use crate::grid::Units;

/// Which closed-form free action a family pairs with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    Separable,
    NonSeparable,
}

impl Section {
    pub fn name(&self) -> &'static str {
        match self {
            Section::Separable => "separable",
            Section::NonSeparable => "non_separable",
        }
    }
}

/// How the amplitude of a family is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Availability {
    ClosedForm,
    OdeOnly,
    AnalyticPiecewise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Finite,
    NonZero,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub unit: &'static str,
    pub default: f64,
    pub constraint: Constraint,
}

const fn param(name: &'static str, unit: &'static str, default: f64, constraint: Constraint) -> ParamSpec {
    ParamSpec {
        name,
        unit,
        default,
        constraint,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// V(z) = −F z.
    ConstantForce { force: f64 },
    /// V(z) = −γ δ(z); β scales the piecewise-linear amplitude.
    DeltaTrap { gamma: f64, beta: f64 },
    /// V(z) = α / z.
    MovingCoulomb { alpha: f64 },
    /// V(z) = γ cos(κ z).
    CosineWave { gamma: f64, kappa: f64 },
    /// V(z) = m ω² z² / 2.
    HarmonicZ { omega: f64 },
    /// V(z) = −γ sech² z.
    PoschlTeller { gamma: f64 },
    /// V(z) = m ω² z² / 2 − ħ ω / 2.
    ModifiedHarmonicZ { omega: f64 },
    /// V(z) = −(ħ²/m) sech² z + ħ² / 2m.
    ModifiedPoschlTeller,
    /// 𝒱(y) = −F0 y.
    TimeDecreasingForce { force0: f64 },
    /// 𝒱(y) = m ω0² y² / 2.
    DecayingHarmonic { omega0: f64 },
    /// 𝒱(y) = Z0 / y.
    CoulombLike { charge0: f64 },
    /// 𝒱(y) = m ω0² y² / 2 − ħ ω0 / 2.
    ModifiedDecayingHarmonic { omega0: f64 },
    /// V ≡ 0. A control used by tests and the free-evolution comparison; not
    /// part of the catalog and valid with either action.
    Zero,
}

/// Catalog tags in catalog order.
pub const CATALOG_TAGS: [&str; 12] = [
    "constant_force",
    "delta_trap",
    "moving_coulomb",
    "cosine_wave",
    "harmonic_z",
    "poschl_teller",
    "modified_harmonic_z",
    "modified_poschl_teller",
    "time_decreasing_force",
    "decaying_harmonic",
    "coulomb_like",
    "modified_decaying_harmonic",
];

use Constraint::*;

const CONSTANT_FORCE: &[ParamSpec] = &[param("F", "force", 1.0, NonZero)];
const DELTA_TRAP: &[ParamSpec] = &[
    param("gamma", "energy*length", 1.0, Positive),
    param("beta", "amplitude", 1.0, Finite),
];
const MOVING_COULOMB: &[ParamSpec] = &[param("alpha", "energy*length", 1.0, NonZero)];
const COSINE_WAVE: &[ParamSpec] = &[
    param("gamma", "energy", 1.0, Finite),
    param("kappa", "1/length", 1.0, Finite),
];
const HARMONIC: &[ParamSpec] = &[param("omega", "1/time", 1.0, Positive)];
const POSCHL_TELLER: &[ParamSpec] = &[param("gamma", "energy", 1.0, Positive)];
const NO_PARAMS: &[ParamSpec] = &[];
const TIME_DECREASING_FORCE: &[ParamSpec] = &[param("F0", "force*time^3", 1.0, NonZero)];
const DECAYING_HARMONIC: &[ParamSpec] = &[param("omega0", "time", 1.0, Positive)];
const COULOMB_LIKE: &[ParamSpec] = &[param("Z0", "energy*length*time", 1.0, NonZero)];

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::ConstantForce { .. } => "constant_force",
            Family::DeltaTrap { .. } => "delta_trap",
            Family::MovingCoulomb { .. } => "moving_coulomb",
            Family::CosineWave { .. } => "cosine_wave",
            Family::HarmonicZ { .. } => "harmonic_z",
            Family::PoschlTeller { .. } => "poschl_teller",
            Family::ModifiedHarmonicZ { .. } => "modified_harmonic_z",
            Family::ModifiedPoschlTeller => "modified_poschl_teller",
            Family::TimeDecreasingForce { .. } => "time_decreasing_force",
            Family::DecayingHarmonic { .. } => "decaying_harmonic",
            Family::CoulombLike { .. } => "coulomb_like",
            Family::ModifiedDecayingHarmonic { .. } => "modified_decaying_harmonic",
            Family::Zero => "zero",
        }
    }

    pub fn schema_for(tag: &str) -> Option<&'static [ParamSpec]> {
        Some(match tag {
            "constant_force" => CONSTANT_FORCE,
            "delta_trap" => DELTA_TRAP,
            "moving_coulomb" => MOVING_COULOMB,
            "cosine_wave" => COSINE_WAVE,
            "harmonic_z" | "modified_harmonic_z" => HARMONIC,
            "poschl_teller" => POSCHL_TELLER,
            "modified_poschl_teller" | "zero" => NO_PARAMS,
            "time_decreasing_force" => TIME_DECREASING_FORCE,
            "decaying_harmonic" | "modified_decaying_harmonic" => DECAYING_HARMONIC,
            "coulomb_like" => COULOMB_LIKE,
            _ => return None,
        })
    }

    pub fn schema(&self) -> &'static [ParamSpec] {
        Self::schema_for(self.tag()).expect("every family has a schema")
    }

    /// Parameter values in schema order.
    pub fn params(&self) -> Vec<f64> {
        match *self {
            Family::ConstantForce { force } => vec![force],
            Family::DeltaTrap { gamma, beta } => vec![gamma, beta],
            Family::MovingCoulomb { alpha } => vec![alpha],
            Family::CosineWave { gamma, kappa } => vec![gamma, kappa],
            Family::HarmonicZ { omega } | Family::ModifiedHarmonicZ { omega } => vec![omega],
            Family::PoschlTeller { gamma } => vec![gamma],
            Family::ModifiedPoschlTeller | Family::Zero => vec![],
            Family::TimeDecreasingForce { force0 } => vec![force0],
            Family::DecayingHarmonic { omega0 } | Family::ModifiedDecayingHarmonic { omega0 } => {
                vec![omega0]
            }
            Family::CoulombLike { charge0 } => vec![charge0],
        }
    }

    pub fn param_map(&self) -> BTreeMap<String, f64> {
        self.schema()
            .iter()
            .zip(self.params())
            .map(|(spec, v)| (spec.name.to_string(), v))
            .collect()
    }

    /// Build a family from its tag and named parameters. Unknown names are
    /// rejected; missing names take the catalog default.
    pub fn from_params(tag: &str, given: &BTreeMap<String, f64>) -> Result<Self> {
        let schema = Self::schema_for(tag).ok_or_else(|| Error::InvalidParameter {
            family: "catalog",
            name: tag.to_string(),
            reason: "unknown family tag",
        })?;
        let static_tag = CATALOG_TAGS.iter().copied().find(|t| *t == tag).unwrap_or("zero");
        if let Some(unknown) = given.keys().find(|k| !schema.iter().any(|s| s.name == k.as_str())) {
            return Err(Error::InvalidParameter {
                family: static_tag,
                name: unknown.clone(),
                reason: "unknown parameter for this family",
            });
        }
        let get = |i: usize| -> f64 {
            let spec = &schema[i];
            given.get(spec.name).copied().unwrap_or(spec.default)
        };
        let family = match tag {
            "constant_force" => Family::ConstantForce { force: get(0) },
            "delta_trap" => Family::DeltaTrap {
                gamma: get(0),
                beta: get(1),
            },
            "moving_coulomb" => Family::MovingCoulomb { alpha: get(0) },
            "cosine_wave" => Family::CosineWave {
                gamma: get(0),
                kappa: get(1),
            },
            "harmonic_z" => Family::HarmonicZ { omega: get(0) },
            "poschl_teller" => Family::PoschlTeller { gamma: get(0) },
            "modified_harmonic_z" => Family::ModifiedHarmonicZ { omega: get(0) },
            "modified_poschl_teller" => Family::ModifiedPoschlTeller,
            "time_decreasing_force" => Family::TimeDecreasingForce { force0: get(0) },
            "decaying_harmonic" => Family::DecayingHarmonic { omega0: get(0) },
            "coulomb_like" => Family::CoulombLike { charge0: get(0) },
            "modified_decaying_harmonic" => Family::ModifiedDecayingHarmonic { omega0: get(0) },
            _ => Family::Zero,
        };
        family.validate()?;
        Ok(family)
    }

    /// Catalog defaults.
    pub fn default_for(tag: &str) -> Result<Self> {
        Self::from_params(tag, &BTreeMap::new())
    }

    pub fn validate(&self) -> Result<()> {
        for (spec, v) in self.schema().iter().zip(self.params()) {
            let ok = v.is_finite()
                && match spec.constraint {
                    Finite => true,
                    NonZero => v != 0.0,
                    Positive => v > 0.0,
                };
            if !ok {
                return Err(Error::InvalidParameter {
                    family: self.tag(),
                    name: spec.name.to_string(),
                    reason: match spec.constraint {
                        Finite => "must be finite",
                        NonZero => "must be finite and nonzero",
                        Positive => "must be finite and positive",
                    },
                });
            }
        }
        Ok(())
    }

    /// The action variant this family is tied to; `None` for the zero control.
    pub fn section(&self) -> Option<Section> {
        match self {
            Family::TimeDecreasingForce { .. }
            | Family::DecayingHarmonic { .. }
            | Family::CoulombLike { .. }
            | Family::ModifiedDecayingHarmonic { .. } => Some(Section::NonSeparable),
            Family::Zero => None,
            _ => Some(Section::Separable),
        }
    }

    /// Catalog-level availability (independent of parameter values).
    pub fn nominal_availability(&self) -> Availability {
        match self {
            Family::DeltaTrap { .. } => Availability::AnalyticPiecewise,
            Family::CosineWave { .. } => Availability::OdeOnly,
            _ => Availability::ClosedForm,
        }
    }

    /// Whether the reduced profile has a pole at s = 0.
    pub fn is_coulomb(&self) -> bool {
        matches!(self, Family::MovingCoulomb { .. } | Family::CoulombLike { .. })
    }

    /// Reduced profile V(z) or 𝒱(y).
    pub fn reduced_profile(&self, s: f64, units: &Units) -> Result<f64> {
        let (hbar, m) = (units.hbar, units.mass);
        Ok(match *self {
            Family::ConstantForce { force } => -force * s,
            Family::DeltaTrap { .. } => return Err(Error::NotAFunction("delta_trap")),
            Family::MovingCoulomb { alpha: c } | Family::CoulombLike { charge0: c } => {
                if s == 0.0 {
                    return Err(Error::Singularity { s });
                }
                c / s
            }
            Family::CosineWave { gamma, kappa } => gamma * (kappa * s).cos(),
            Family::HarmonicZ { omega } | Family::DecayingHarmonic { omega0: omega } => 0.5 * m * omega * omega * s * s,
            Family::PoschlTeller { gamma } => -gamma * sech(s).powi(2),
            Family::ModifiedHarmonicZ { omega } | Family::ModifiedDecayingHarmonic { omega0: omega } => {
                0.5 * m * omega * omega * s * s - 0.5 * hbar * omega
            }
            Family::ModifiedPoschlTeller => -(hbar * hbar / m) * sech(s).powi(2) + hbar * hbar / (2.0 * m),
            Family::TimeDecreasingForce { force0 } => -force0 * s,
            Family::Zero => 0.0,
        })
    }
}

pub(crate) fn sech(s: f64) -> f64 {
    // 1/cosh overflows gracefully to 0 for large |s|.
    1.0 / s.cosh()
}

/// Degree n = (√(1 + 8mγ/ħ²) − 1)/2 of the Legendre functions solving the
/// Pöschl–Teller amplitude equation.
pub fn legendre_degree(gamma: f64, units: &Units) -> f64 {
    let g = 8.0 * units.mass * gamma / (units.hbar * units.hbar);
    ((1.0 + g).sqrt() - 1.0) / 2.0
}

/// Integer Legendre degree, if the family's degree is a nonnegative integer.
pub fn integer_legendre_degree(gamma: f64, units: &Units) -> Option<usize> {
    let n = legendre_degree(gamma, units);
    let r = n.round();
    ((n - r).abs() <= 1e-12 * r.max(1.0) && r >= 0.0).then_some(r as usize)
}

/// Map between laboratory (x, t) and the reduced coordinate of a family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducedCoordinate {
    /// z = x − k t / m.
    Z { k: f64 },
    /// y = (x − x0)/(t − t0), t > t0.
    Y { x0: f64, t0: f64 },
}

impl ReducedCoordinate {
    pub fn from_action(a: &FreeAction) -> Self {
        match a.kind {
            ActionKind::Separable { k } => ReducedCoordinate::Z { k },
            ActionKind::NonSeparable { x0, t0 } => ReducedCoordinate::Y { x0, t0 },
        }
    }

    pub fn action_kind(&self) -> ActionKind {
        match *self {
            ReducedCoordinate::Z { k } => ActionKind::Separable { k },
            ReducedCoordinate::Y { x0, t0 } => ActionKind::NonSeparable { x0, t0 },
        }
    }

    pub fn section(&self) -> Section {
        match self {
            ReducedCoordinate::Z { .. } => Section::Separable,
            ReducedCoordinate::Y { .. } => Section::NonSeparable,
        }
    }

    fn elapsed(t: f64, t0: f64) -> Result<f64> {
        if t > t0 {
            Ok(t - t0)
        } else {
            Err(Error::TimeDomain { t, t0 })
        }
    }

    pub fn reduce(&self, x: f64, t: f64, units: &Units) -> Result<f64> {
        match *self {
            ReducedCoordinate::Z { k } => Ok(x - k * t / units.mass),
            ReducedCoordinate::Y { x0, t0 } => Ok((x - x0) / Self::elapsed(t, t0)?),
        }
    }

    /// Inverse of [`Self::reduce`] at fixed t.
    pub fn position(&self, s: f64, t: f64, units: &Units) -> Result<f64> {
        match *self {
            ReducedCoordinate::Z { k } => Ok(s + k * t / units.mass),
            ReducedCoordinate::Y { x0, t0 } => Ok(x0 + s * Self::elapsed(t, t0)?),
        }
    }

    /// dx/ds at fixed t: 1 for z, t − t0 for y.
    pub fn stretch(&self, t: f64) -> Result<f64> {
        match *self {
            ReducedCoordinate::Z { .. } => Ok(1.0),
            ReducedCoordinate::Y { t0, .. } => Self::elapsed(t, t0),
        }
    }

    /// Factor multiplying the reduced amplitude: 1 or 1/√(t − t0).
    pub fn amplitude_scale(&self, t: f64) -> Result<f64> {
        Ok(1.0 / self.stretch(t)?.sqrt())
    }

    /// Factor multiplying the reduced potential: 1 or 1/(t − t0)².
    pub fn potential_scale(&self, t: f64) -> Result<f64> {
        let tau = self.stretch(t)?;
        Ok(1.0 / (tau * tau))
    }
}

/// A catalog family bound to its reduced coordinate and units, i.e. a
/// concrete V(x, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    family: Family,
    coordinate: ReducedCoordinate,
    units: Units,
}

impl Potential {
    pub fn new(family: Family, coordinate: ReducedCoordinate, units: Units) -> Result<Self> {
        family.validate()?;
        if let Some(section) = family.section() {
            if section != coordinate.section() {
                return Err(Error::VariantMismatch {
                    family: family.tag(),
                    expected: section.name(),
                });
            }
        }
        Ok(Self {
            family,
            coordinate,
            units,
        })
    }

    /// Bind a family to the coordinate implied by an action.
    pub fn for_action(family: Family, action: &FreeAction) -> Result<Self> {
        Self::new(family, ReducedCoordinate::from_action(action), action.units)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn coordinate(&self) -> &ReducedCoordinate {
        &self.coordinate
    }

    pub fn units(&self) -> &Units {
        &self.units
    }

    pub fn action(&self) -> FreeAction {
        FreeAction {
            kind: self.coordinate.action_kind(),
            units: self.units,
        }
    }

    /// Same coordinate and units, different family.
    pub fn with_family(&self, family: Family) -> Result<Self> {
        Self::new(family, self.coordinate, self.units)
    }

    pub fn reduced_profile(&self, s: f64) -> Result<f64> {
        self.family.reduced_profile(s, &self.units)
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let s = self.coordinate.reduce(x, t, &self.units)?;
        Ok(self.reduced_profile(s)? * self.coordinate.potential_scale(t)?)
    }

    /// Availability for these parameter values: Pöschl–Teller with a
    /// non-integer Legendre degree falls back to the ODE path.
    pub fn availability(&self) -> Availability {
        match self.family {
            Family::PoschlTeller { gamma } => {
                if integer_legendre_degree(gamma, &self.units).is_some() {
                    Availability::ClosedForm
                } else {
                    Availability::OdeOnly
                }
            }
            f => f.nominal_availability(),
        }
    }
}

pub fn reduced_profile(p: &Potential, s: f64) -> Result<f64> {
    p.reduced_profile(s)
}

pub fn eval_potential(p: &Potential, x: f64, t: f64) -> Result<f64> {
    p.eval(x, t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub index: usize,
    pub tag: &'static str,
    pub reduced_form: &'static str,
    pub params: &'static [ParamSpec],
    pub action: Section,
    pub availability: Availability,
    pub amplitude: &'static str,
}

/// The twelve catalog families in stable order.
pub fn catalog() -> Vec<CatalogEntry> {
    CATALOG_TAGS
        .iter()
        .enumerate()
        .map(|(index, &tag)| {
            let family = Family::default_for(tag).expect("catalog defaults are valid");
            let (reduced_form, amplitude) = describe(tag);
            CatalogEntry {
                index,
                tag,
                reduced_form,
                params: family.schema(),
                action: family.section().expect("catalog families have a section"),
                availability: family.nominal_availability(),
                amplitude,
            }
        })
        .collect()
}

fn describe(tag: &str) -> (&'static str, &'static str) {
    match tag {
        "constant_force" => ("V(z) = -F z", "Ai(-(2mF/hbar^2)^(1/3) z)"),
        "delta_trap" => ("V(z) = -gamma delta(z)", "(m gamma beta/hbar^2) |z| - beta"),
        "moving_coulomb" => ("V(z) = alpha/z", "(sqrt(2m alpha z)/hbar) K1(2 sqrt(2m alpha z)/hbar)"),
        "cosine_wave" => ("V(z) = gamma cos(kappa z)", "Mathieu equation, ODE only"),
        "harmonic_z" => ("V(z) = m omega^2 z^2/2", "D_{-1/2}(sqrt(2m omega/hbar) z)"),
        "poschl_teller" => (
            "V(z) = -gamma sech^2 z",
            "a1 P_n(tanh z) + a2 Q_n(tanh z), integer n; ODE otherwise",
        ),
        "modified_harmonic_z" => (
            "V(z) = m omega^2 z^2/2 - hbar omega/2",
            "(m omega/hbar pi)^(1/4) exp(-m omega z^2/2 hbar)",
        ),
        "modified_poschl_teller" => ("V(z) = -(hbar^2/m) sech^2 z + hbar^2/2m", "sech(z)/sqrt(2)"),
        "time_decreasing_force" => ("W(y) = -F0 y", "Ai(-(2mF0/hbar^2)^(1/3) y)/sqrt(t-t0)"),
        "decaying_harmonic" => ("W(y) = m omega0^2 y^2/2", "D_{-1/2}(sqrt(2m omega0/hbar) y)/sqrt(t-t0)"),
        "coulomb_like" => (
            "W(y) = Z0/y",
            "(sqrt(2m Z0 y)/hbar) K1(2 sqrt(2m Z0 y)/hbar)/sqrt(t-t0)",
        ),
        "modified_decaying_harmonic" => (
            "W(y) = m omega0^2 y^2/2 - hbar omega0/2",
            "(m omega0/hbar pi)^(1/4) exp(-m omega0 y^2/2 hbar)/sqrt(t-t0)",
        ),
        _ => ("V = 0", "constant"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Units {
        Units::natural()
    }

    fn z(k: f64) -> ReducedCoordinate {
        ReducedCoordinate::Z { k }
    }

    fn y(x0: f64, t0: f64) -> ReducedCoordinate {
        ReducedCoordinate::Y { x0, t0 }
    }

    #[test]
    fn reduced_profile_examples() {
        let u = nat();
        assert_eq!(Family::ConstantForce { force: 1.0 }.reduced_profile(2.0, &u), Ok(-2.0));
        assert_eq!(Family::PoschlTeller { gamma: 1.0 }.reduced_profile(0.0, &u), Ok(-1.0));
        assert_eq!(Family::ModifiedPoschlTeller.reduced_profile(0.0, &u), Ok(-0.5));
        assert_eq!(
            Family::MovingCoulomb { alpha: 1.0 }.reduced_profile(0.0, &u),
            Err(Error::Singularity { s: 0.0 })
        );
        assert_eq!(
            Family::DeltaTrap { gamma: 1.0, beta: 1.0 }.reduced_profile(0.3, &u),
            Err(Error::NotAFunction("delta_trap"))
        );
    }

    #[test]
    fn eval_potential_examples() {
        let u = nat();
        let p = Potential::new(Family::ConstantForce { force: 1.0 }, z(1.0), u).unwrap();
        assert_eq!(p.eval(3.0, 1.0), Ok(-2.0));

        let p = Potential::new(Family::DecayingHarmonic { omega0: 1.0 }, y(0.0, 0.0), u).unwrap();
        assert!((p.eval(2.0, 2.0).unwrap() - 0.125).abs() < 1e-15);

        let p = Potential::new(Family::CoulombLike { charge0: 1.0 }, y(0.0, 0.0), u).unwrap();
        assert!((p.eval(1.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(p.eval(1.0, 0.0), Err(Error::TimeDomain { .. })));
    }

    #[test]
    fn variant_binding_is_enforced() {
        let u = nat();
        assert!(matches!(
            Potential::new(Family::ModifiedPoschlTeller, y(0.0, 0.0), u),
            Err(Error::VariantMismatch { .. })
        ));
        assert!(matches!(
            Potential::new(Family::CoulombLike { charge0: 1.0 }, z(1.0), u),
            Err(Error::VariantMismatch { .. })
        ));
        assert!(Potential::new(Family::Zero, z(1.0), u).is_ok());
        assert!(Potential::new(Family::Zero, y(0.0, 0.0), u).is_ok());
    }

    #[test]
    fn parameter_validation() {
        assert!(Family::PoschlTeller { gamma: 0.0 }.validate().is_err());
        assert!(Family::DeltaTrap { gamma: -1.0, beta: 1.0 }.validate().is_err());
        assert!(Family::MovingCoulomb { alpha: 0.0 }.validate().is_err());
        assert!(Family::HarmonicZ { omega: f64::NAN }.validate().is_err());
        let mut given = BTreeMap::new();
        given.insert("gamma".to_string(), 2.0);
        assert_eq!(
            Family::from_params("poschl_teller", &given),
            Ok(Family::PoschlTeller { gamma: 2.0 })
        );
        given.insert("omega".to_string(), 2.0);
        assert!(Family::from_params("poschl_teller", &given).is_err());
        assert!(Family::from_params("no_such_family", &BTreeMap::new()).is_err());
    }

    #[test]
    fn catalog_shape() {
        let cat = catalog();
        assert_eq!(cat.len(), 12);
        let cos = cat.iter().find(|e| e.tag == "cosine_wave").unwrap();
        assert_eq!(cos.availability, Availability::OdeOnly);
        let mpt = cat.iter().find(|e| e.tag == "modified_poschl_teller").unwrap();
        assert_eq!(mpt.availability, Availability::ClosedForm);
        let delta = cat.iter().find(|e| e.tag == "delta_trap").unwrap();
        assert_eq!(delta.availability, Availability::AnalyticPiecewise);
        assert_eq!(cat.iter().filter(|e| e.action == Section::Separable).count(), 8);
        assert_eq!(cat.iter().filter(|e| e.action == Section::NonSeparable).count(), 4);
        for (i, e) in cat.iter().enumerate() {
            assert_eq!(e.index, i);
            assert_eq!(Family::default_for(e.tag).unwrap().tag(), e.tag);
        }
    }

    #[test]
    fn legendre_degree_values() {
        let u = nat();
        assert_eq!(integer_legendre_degree(1.0, &u), Some(1));
        assert_eq!(integer_legendre_degree(3.0, &u), Some(2));
        assert_eq!(integer_legendre_degree(0.5, &u), None);
        let p = Potential::new(Family::PoschlTeller { gamma: 2.0 }, z(0.0), u).unwrap();
        assert_eq!(p.availability(), Availability::OdeOnly);
    }

    #[test]
    fn modified_harmonic_offset() {
        let u = Units::new(1.3, 0.7).unwrap();
        let w = 1.9;
        for s in [-3.0, -0.1, 0.0, 2.5] {
            let a = Family::ModifiedHarmonicZ { omega: w }.reduced_profile(s, &u).unwrap();
            let b = Family::HarmonicZ { omega: w }.reduced_profile(s, &u).unwrap();
            assert!((a - b + 0.5 * u.hbar * w).abs() < 1e-12);
        }
    }
}
