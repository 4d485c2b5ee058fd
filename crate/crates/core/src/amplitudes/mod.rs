//! Amplitudes A whose Bohm potential cancels a catalog potential, and the
//! wave states ψ = A exp(iS/ħ) assembled from them.

pub mod ode;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::actions::FreeAction;
use crate::error::{Error, Result};
use crate::grid::{d2, l2_norm, ComplexField, Grid1D, RealField, Units};
use crate::potentials::{integer_legendre_degree, sech, Availability, Family, Potential};
use crate::special::{
    airy_ai_with_derivative, bessel_k_pair, legendre_pq_tanh, parabolic_cylinder_dmhalf_with_derivative,
};

pub use ode::DenseSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmplitudeSource {
    ClosedForm,
    OdeOracle,
    AnalyticPiecewise,
}

/// Free constants of the amplitude: ODE initial data (a0, da0) and the
/// Legendre mixing coefficients (a1, a2) of the Pöschl–Teller family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub a0: f64,
    pub da0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self {
            a0: 1.0,
            da0: 0.0,
            a1: 1.0,
            a2: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed form when one exists, ODE otherwise.
    Auto,
    Ode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    pub seeds: Seeds,
    pub ode_tol: f64,
    pub method: Method,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            seeds: Seeds::default(),
            ode_tol: 1e-10,
            method: Method::Auto,
        }
    }
}

/// Closed-form reduced amplitude at s with default constants.
pub fn closed_form_amplitude(p: &Potential, s: f64) -> Result<f64> {
    Ok(closed_form_with_derivative(p, s, &Seeds::default())?.0)
}

/// (A(s), A'(s)) from the closed form of the family.
pub fn closed_form_with_derivative(p: &Potential, s: f64, seeds: &Seeds) -> Result<(f64, f64)> {
    let Units { hbar, mass: m } = *p.units();
    let kappa = p.units().ode_factor();
    Ok(match *p.family() {
        Family::ConstantForce { force } | Family::TimeDecreasingForce { force0: force } => {
            let c = (kappa * force).cbrt();
            let (ai, aip) = airy_ai_with_derivative(-c * s);
            (ai, -c * aip)
        }
        Family::DeltaTrap { gamma, beta } => {
            let slope = m * gamma * beta / (hbar * hbar);
            let sign = if s > 0.0 {
                1.0
            } else if s < 0.0 {
                -1.0
            } else {
                0.0
            };
            (slope * s.abs() - beta, slope * sign)
        }
        Family::MovingCoulomb { alpha: c } | Family::CoulombLike { charge0: c } => {
            if !(c * s > 0.0) {
                return Err(Error::Domain {
                    function: "coulomb amplitude",
                    arg: s,
                });
            }
            let v = 2.0 * (kappa * c * s).sqrt();
            let (k0, k1) = bessel_k_pair(0.0, v)?;
            (0.5 * v * k1, -v * v * k0 / (4.0 * s))
        }
        Family::CosineWave { .. } => return Err(Error::NoClosedForm("cosine_wave")),
        Family::HarmonicZ { omega } | Family::DecayingHarmonic { omega0: omega } => {
            let c = (2.0 * m * omega / hbar).sqrt();
            let (d, dp) = parabolic_cylinder_dmhalf_with_derivative(c * s);
            (d, c * dp)
        }
        Family::PoschlTeller { gamma } => {
            let n = integer_legendre_degree(gamma, p.units())
                .ok_or(Error::NoClosedForm("poschl_teller with non-integer Legendre degree"))?;
            let [pn, qn, dpn, dqn] = legendre_pq_tanh(n, s);
            (seeds.a1 * pn + seeds.a2 * qn, seeds.a1 * dpn + seeds.a2 * dqn)
        }
        Family::ModifiedHarmonicZ { omega } | Family::ModifiedDecayingHarmonic { omega0: omega } => {
            let w = m * omega / hbar;
            let a = (w / std::f64::consts::PI).powf(0.25) * (-0.5 * w * s * s).exp();
            (a, -w * s * a)
        }
        Family::ModifiedPoschlTeller => {
            let a = sech(s) / std::f64::consts::SQRT_2;
            (a, -s.tanh() * a)
        }
        Family::Zero => (1.0, 0.0),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Evaluator {
    Closed(Seeds),
    Dense(DenseSolution),
}

/// Reduced amplitude A(s) sampled on a uniform grid in s, with an evaluator
/// valid anywhere inside the sampled interval.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeProfile {
    source: AmplitudeSource,
    potential: Potential,
    samples: RealField,
    evaluator: Evaluator,
}

impl AmplitudeProfile {
    pub fn source(&self) -> AmplitudeSource {
        self.source
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn family(&self) -> &Family {
        self.potential.family()
    }

    pub fn samples(&self) -> &RealField {
        &self.samples
    }

    pub fn range(&self) -> (f64, f64) {
        let g = self.samples.grid();
        (g.x_min(), g.x_max())
    }

    /// A(s); range error outside the sampled interval.
    pub fn eval(&self, s: f64) -> Result<f64> {
        Ok(self.eval_with_derivative(s)?.0)
    }

    pub fn eval_with_derivative(&self, s: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.range();
        let slack = 1e-12 * (hi - lo);
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(Error::Range { s, lo, hi });
        }
        let s = s.clamp(lo, hi);
        match &self.evaluator {
            Evaluator::Closed(seeds) => closed_form_with_derivative(&self.potential, s, seeds),
            Evaluator::Dense(sol) => sol.eval(s).ok_or(Error::Range { s, lo, hi }),
        }
    }
}

/// Closed-form profile on [lo, hi] with n samples.
pub fn closed_form_profile(p: &Potential, lo: f64, hi: f64, n: usize, seeds: &Seeds) -> Result<AmplitudeProfile> {
    let grid = Grid1D::new(lo, hi, n)?;
    let samples = RealField::try_from_fn(grid, |s| Ok(closed_form_with_derivative(p, s, seeds)?.0))?;
    let source = match p.availability() {
        Availability::AnalyticPiecewise => AmplitudeSource::AnalyticPiecewise,
        _ => AmplitudeSource::ClosedForm,
    };
    Ok(AmplitudeProfile {
        source,
        potential: *p,
        samples,
        evaluator: Evaluator::Closed(*seeds),
    })
}

/// Integrate the reduced equation from s_start to s_end and resample the
/// dense solution onto n uniform points spanning the interval.
pub fn integrate_amplitude_ode(
    p: &Potential,
    s_start: f64,
    s_end: f64,
    a0: f64,
    da0: f64,
    tol: f64,
    n: usize,
) -> Result<AmplitudeProfile> {
    let sol = ode::solve(p, s_start, s_end, a0, da0, tol)?;
    ode_profile(p, sol, s_start.min(s_end), s_start.max(s_end), n)
}

fn ode_profile(p: &Potential, sol: DenseSolution, lo: f64, hi: f64, n: usize) -> Result<AmplitudeProfile> {
    let grid = Grid1D::new(lo, hi, n)?;
    let (slo, shi) = sol.range();
    let samples = RealField::try_from_fn(grid, |s| {
        sol.eval(s.clamp(slo, shi))
            .map(|v| v.0)
            .ok_or(Error::Range { s, lo: slo, hi: shi })
    })?;
    Ok(AmplitudeProfile {
        source: AmplitudeSource::OdeOracle,
        potential: *p,
        samples,
        evaluator: Evaluator::Dense(sol),
    })
}

/// Where the ODE path seeds its initial data: s = 0, or the end of the
/// interval nearest the pole for the Coulomb families.
pub fn default_seed_point(p: &Potential, lo: f64, hi: f64) -> f64 {
    if p.family().is_coulomb() {
        if lo > 0.0 {
            lo
        } else {
            hi
        }
    } else {
        0.0
    }
}

/// Profile on [lo, hi] by the requested method.
pub fn build_profile(p: &Potential, lo: f64, hi: f64, n: usize, opts: &ProfileOptions) -> Result<AmplitudeProfile> {
    let use_closed = opts.method == Method::Auto && p.availability() != Availability::OdeOnly;
    if use_closed {
        return closed_form_profile(p, lo, hi, n, &opts.seeds);
    }
    if !(hi > lo) {
        return Err(Error::InvalidBounds { x_min: lo, x_max: hi });
    }
    let s0 = default_seed_point(p, lo, hi);
    let Seeds { a0, da0, .. } = opts.seeds;
    let tol = opts.ode_tol;
    let sol = if s0 <= lo {
        ode::solve(p, s0, hi, a0, da0, tol)?
    } else if s0 >= hi {
        ode::solve(p, s0, lo, a0, da0, tol)?
    } else {
        DenseSolution::merge(
            ode::solve(p, s0, hi, a0, da0, tol)?,
            ode::solve(p, s0, lo, a0, da0, tol)?,
        )
    };
    ode_profile(p, sol, lo, hi, n)
}

/// Max-norm distance between the closed form and the ODE oracle seeded with
/// closed-form data at `seed`, relative to the closed form's max norm.
pub fn dual_path_error(p: &Potential, lo: f64, hi: f64, seed: f64, tol: f64, n: usize) -> Result<f64> {
    let seeds = Seeds::default();
    let (a0, da0) = closed_form_with_derivative(p, seed, &seeds)?;
    let sol = if seed <= lo {
        ode::solve(p, seed, hi, a0, da0, tol)?
    } else if seed >= hi {
        ode::solve(p, seed, lo, a0, da0, tol)?
    } else {
        DenseSolution::merge(
            ode::solve(p, seed, hi, a0, da0, tol)?,
            ode::solve(p, seed, lo, a0, da0, tol)?,
        )
    };
    let oracle = ode_profile(p, sol, lo, hi, n)?;
    let closed = closed_form_profile(p, lo, hi, n, &seeds)?;
    let diff = oracle.samples().zip_with(closed.samples(), |a, b| a - b)?.max_abs();
    Ok(diff / closed.samples().max_abs())
}

/// d2(A) − (2m/ħ²) V A on the profile's own grid.
pub fn ode_residual(profile: &AmplitudeProfile) -> Result<RealField> {
    let a = profile.samples();
    let a2 = d2(a);
    let kappa = profile.potential().units().ode_factor();
    let g = *a.grid();
    let vals = (0..g.len())
        .map(|i| {
            let v = profile.potential().reduced_profile(g.x(i))?;
            Ok(a2.values()[i] - kappa * v * a.values()[i])
        })
        .collect::<Result<Vec<_>>>()?;
    RealField::new(g, vals)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Normalization {
    Unknown,
    Normalized { scale: f64 },
    NotNormalizable,
}

/// ψ = A exp(iS/ħ) on a laboratory grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub grid: Grid1D,
    pub time: f64,
    pub amplitude: RealField,
    pub phase: RealField,
    pub units: Units,
    pub action: FreeAction,
    pub potential: Potential,
    pub normalization: Normalization,
}

impl WaveState {
    pub fn psi(&self) -> ComplexField {
        let hbar = self.units.hbar;
        let vals = self
            .amplitude
            .values()
            .iter()
            .zip(self.phase.values())
            .map(|(&a, &s)| Complex64::from_polar(1.0, s / hbar) * a)
            .collect();
        ComplexField::new(self.grid, vals).expect("amplitude and phase share the grid")
    }

    /// |ψ|² = A².
    pub fn density(&self) -> RealField {
        self.amplitude.map(|a| a * a).expect("finite amplitude")
    }

    /// Reduced coordinate of every grid point.
    pub fn reduced_coordinates(&self) -> Result<Vec<f64>> {
        let c = self.potential.coordinate();
        self.grid
            .points()
            .map(|x| c.reduce(x, self.time, &self.units))
            .collect()
    }
}

/// Place a reduced profile on a laboratory grid at time t.
pub fn assemble_state(
    a: &FreeAction,
    p: &Potential,
    amp: &AmplitudeProfile,
    grid: &Grid1D,
    t: f64,
) -> Result<WaveState> {
    let kind = p.coordinate().action_kind();
    if !kind.same_variant(&a.kind) {
        let section = p.family().section().unwrap_or_else(|| p.coordinate().section());
        return Err(Error::VariantMismatch {
            family: p.family().tag(),
            expected: section.name(),
        });
    }
    if kind != a.kind || a.units != *p.units() {
        return Err(Error::Precondition(
            "potential and action are bound to different parameters",
        ));
    }
    if amp.potential() != p {
        return Err(Error::FamilyMismatch);
    }
    let scale = p.coordinate().amplitude_scale(t)?;
    let coord = p.coordinate();
    let amplitude = RealField::try_from_fn(*grid, |x| {
        let s = coord.reduce(x, t, &a.units)?;
        Ok(scale * amp.eval(s)?)
    })?;
    let phase = a.phase_field(grid, t)?;
    Ok(WaveState {
        grid: *grid,
        time: t,
        amplitude,
        phase,
        units: a.units,
        action: *a,
        potential: *p,
        normalization: Normalization::Unknown,
    })
}

/// Rescale to unit norm when the amplitude has decayed at both ends of the
/// grid (outer 2% of samples, at least 3, below 1e-8 of the peak).
pub fn normalize_if_integrable(state: WaveState) -> WaveState {
    let mut state = state;
    if let Family::DeltaTrap { .. } = state.potential.family() {
        state.normalization = Normalization::NotNormalizable;
        return state;
    }
    let vals = state.amplitude.values();
    let n = vals.len();
    let peak = state.amplitude.max_abs();
    let tail = (n / 50).max(3).min(n / 2);
    let small = |v: &f64| v.abs() <= 1e-8 * peak;
    let decayed = peak > 0.0 && vals[..tail].iter().all(small) && vals[n - tail..].iter().all(small);
    if !decayed {
        state.normalization = Normalization::NotNormalizable;
        return state;
    }
    let scale = 1.0 / l2_norm(&state.amplitude);
    state.amplitude = state.amplitude.scale(scale).expect("finite scale");
    state.normalization = Normalization::Normalized { scale };
    state
}
