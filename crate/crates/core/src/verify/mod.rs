//! Residual engine: the Bohm potential and every defining equation checked
//! on assembled states.

pub mod calibration;
pub mod pipeline;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::actions::FreeAction;
use crate::amplitudes::{AmplitudeProfile, WaveState};
use crate::error::{Error, Result};
use crate::grid::{d1, d2, Grid1D, RealField, Units};
use crate::potentials::{Family, Potential};

pub use calibration::{Calibration, Check};
pub use pipeline::{run_checks, verify_catalog, verify_family, FamilyReport, Skipped, VerifyCase, VerifyOptions};

/// Tolerance of the Hamilton–Jacobi check, absolute.
pub const HJ_TOLERANCE: f64 = 1e-12;
/// Tolerance of the non-separable Liouville check on y-aligned grids.
pub const ALIGNED_LIOUVILLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dx: f64,
}

impl From<&Grid1D> for GridSummary {
    fn from(g: &Grid1D) -> Self {
        Self {
            x_min: g.x_min(),
            x_max: g.x_max(),
            n: g.len(),
            dx: g.dx(),
        }
    }
}

/// Outcome of one check. `passed` is `max_abs <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub max_abs: f64,
    pub l2: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub grid: Option<GridSummary>,
    /// Reduced-coordinate intervals left out of the statistics.
    pub excluded_zones: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ResidualReport {
    /// Statistics of `field` over the points where `mask` is true (all
    /// points when `mask` is `None`). The l2 figure is √(Σ r² dx).
    pub fn from_field(name: &str, field: &RealField, mask: Option<&[bool]>, tolerance: f64) -> Self {
        let dx = field.grid().dx();
        let mut max_abs: f64 = 0.0;
        let mut sum = 0.0;
        for (i, &r) in field.values().iter().enumerate() {
            if mask.map_or(true, |m| m[i]) {
                max_abs = max_abs.max(r.abs());
                sum += r * r;
            }
        }
        Self::scalar(name, max_abs, (sum * dx).sqrt(), tolerance).with_grid(field.grid())
    }

    pub fn scalar(name: &str, max_abs: f64, l2: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            max_abs,
            l2,
            tolerance,
            passed: max_abs <= tolerance,
            grid: None,
            excluded_zones: Vec::new(),
            note: None,
        }
    }

    pub fn with_grid(mut self, g: &Grid1D) -> Self {
        self.grid = Some(g.into());
        self
    }

    pub fn with_zones(mut self, zones: Vec<[f64; 2]>) -> Self {
        self.excluded_zones = zones;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Where the Bohm potential is not evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BohmOptions {
    /// |A| below this is treated as zero.
    pub amplitude_floor: f64,
    /// Half-width of the window around a node, in grid cells.
    pub node_cells: f64,
    /// Lower bound on that half-width, in units of x.
    pub node_min_width: f64,
    /// Largest excluded fraction before the evaluation is refused.
    pub max_excluded_fraction: f64,
}

impl Default for BohmOptions {
    fn default() -> Self {
        Self {
            amplitude_floor: 1e-10,
            node_cells: 3.0,
            node_min_width: 0.1,
            max_excluded_fraction: 0.2,
        }
    }
}

/// V_B on a grid, zero where excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct BohmField {
    pub values: RealField,
    pub valid: Vec<bool>,
    pub excluded_zones: Vec<[f64; 2]>,
}

/// −(ħ²/2m) A''/A with the default exclusion options.
pub fn bohm_potential(state: &WaveState) -> Result<BohmField> {
    bohm_potential_with(state, &BohmOptions::default())
}

pub fn bohm_potential_with(state: &WaveState, opts: &BohmOptions) -> Result<BohmField> {
    let (valid, zones_x) = exclusion_mask(&state.amplitude, opts)?;
    let coord = state.potential.coordinate();
    let excluded_zones = zones_x
        .into_iter()
        .map(|[a, b]| {
            let sa = coord.reduce(a, state.time, &state.units)?;
            let sb = coord.reduce(b, state.time, &state.units)?;
            Ok([sa.min(sb), sa.max(sb)])
        })
        .collect::<Result<Vec<_>>>()?;
    let values = bohm_values(&state.amplitude, &state.units, &valid)?;
    Ok(BohmField {
        values,
        valid,
        excluded_zones,
    })
}

fn bohm_values(a: &RealField, units: &Units, valid: &[bool]) -> Result<RealField> {
    let a2 = d2(a);
    let k = units.kinetic_factor();
    let vals = a
        .values()
        .iter()
        .zip(a2.values())
        .zip(valid)
        .map(|((&a, &a2), &ok)| if ok { -k * a2 / a } else { 0.0 })
        .collect();
    RealField::new(*a.grid(), vals)
}

/// Points kept for V_B, and the excluded x-intervals.
fn exclusion_mask(a: &RealField, opts: &BohmOptions) -> Result<(Vec<bool>, Vec<[f64; 2]>)> {
    let g = a.grid();
    let v = a.values();
    let n = v.len();
    let floor = opts.amplitude_floor;
    let mut valid: Vec<bool> = v.iter().map(|a| a.abs() >= floor).collect();
    let half = (opts.node_cells * g.dx()).max(opts.node_min_width);
    let mut nodes = Vec::new();
    for i in 0..n - 1 {
        let (a0, a1) = (v[i], v[i + 1]);
        if a0.abs() < floor && a1.abs() < floor {
            continue;
        }
        if a0 == 0.0 {
            nodes.push(g.x(i));
        } else if a0 * a1 < 0.0 {
            nodes.push(g.x(i) - a0 * (g.x(i + 1) - g.x(i)) / (a1 - a0));
        }
    }
    if v[n - 1] == 0.0 {
        nodes.push(g.x(n - 1));
    }
    for &xn in &nodes {
        let lo = (((xn - half - g.x_min()) / g.dx()).ceil().max(0.0)) as usize;
        let hi = (((xn + half - g.x_min()) / g.dx()).floor().min((n - 1) as f64)) as isize;
        for ok in valid.iter_mut().take((hi + 1).max(0) as usize).skip(lo) {
            *ok = false;
        }
    }
    let excluded = valid.iter().filter(|&&ok| !ok).count();
    if excluded as f64 > opts.max_excluded_fraction * n as f64 {
        return Err(Error::AllNodes { excluded, total: n });
    }
    let mut zones = Vec::new();
    let mut i = 0;
    while i < n {
        if !valid[i] {
            let start = i;
            while i < n && !valid[i] {
                i += 1;
            }
            zones.push([g.x(start), g.x(i - 1)]);
        } else {
            i += 1;
        }
    }
    Ok((valid, zones))
}

/// V_B + V on the state's grid.
pub fn cancellation_residual(state: &WaveState, p: &Potential, tolerance: f64) -> Result<ResidualReport> {
    cancellation_residual_with(state, p, tolerance, &BohmOptions::default())
}

pub fn cancellation_residual_with(
    state: &WaveState,
    p: &Potential,
    tolerance: f64,
    opts: &BohmOptions,
) -> Result<ResidualReport> {
    if p.coordinate() != state.potential.coordinate() || p.units() != &state.units {
        return Err(Error::FamilyMismatch);
    }
    if let Family::DeltaTrap { .. } = p.family() {
        return Err(Error::NotAFunction("delta_trap"));
    }
    let vb = bohm_potential_with(state, opts)?;
    let g = state.grid;
    let vals = (0..g.len())
        .map(|i| {
            if vb.valid[i] {
                Ok(vb.values.values()[i] + p.eval(g.x(i), state.time)?)
            } else {
                Ok(0.0)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let field = RealField::new(g, vals)?;
    Ok(ResidualReport::from_field("cancellation", &field, Some(&vb.valid), tolerance).with_zones(vb.excluded_zones))
}

/// Laboratory amplitude A(x, t) of a profile placed on an action.
pub fn lab_amplitude<'a>(
    a: &'a FreeAction,
    p: &'a Potential,
    amp: &'a AmplitudeProfile,
) -> Result<impl Fn(f64, f64) -> Result<f64> + 'a> {
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
    Ok(move |x: f64, t: f64| {
        let c = p.coordinate();
        Ok(c.amplitude_scale(t)? * amp.eval(c.reduce(x, t, &a.units)?)?)
    })
}

fn sample<F: Fn(f64, f64) -> Result<f64>>(grid: &Grid1D, t: f64, f: &F) -> Result<Vec<f64>> {
    grid.points().map(|x| f(x, t)).collect()
}

fn check_times(a: &FreeAction, t: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::Precondition("dt must be positive"));
    }
    a.elapsed(t - dt)?;
    a.elapsed(t)?;
    a.elapsed(t + dt)?;
    Ok(())
}

/// (1/m)(A² S')' + ∂t(A²) with S' analytic and centered differences.
pub fn continuity_residual(
    a: &FreeAction,
    p: &Potential,
    amp: &AmplitudeProfile,
    grid: &Grid1D,
    t: f64,
    dt: f64,
    tolerance: f64,
) -> Result<ResidualReport> {
    let f = lab_amplitude(a, p, amp)?;
    continuity_residual_from(a, grid, t, dt, f, tolerance)
}

/// Continuity residual for an arbitrary laboratory amplitude A(x, t).
pub fn continuity_residual_from<F: Fn(f64, f64) -> Result<f64>>(
    a: &FreeAction,
    grid: &Grid1D,
    t: f64,
    dt: f64,
    amp: F,
    tolerance: f64,
) -> Result<ResidualReport> {
    check_times(a, t, dt)?;
    let m = a.units.mass;
    let rho = |tt: f64| -> Result<Vec<f64>> { Ok(sample(grid, tt, &amp)?.into_iter().map(|v| v * v).collect()) };
    let (rm, r0, rp) = (rho(t - dt)?, rho(t)?, rho(t + dt)?);
    let flux = grid
        .points()
        .zip(&r0)
        .map(|(x, &r)| Ok(r * a.momentum(x, t)? / m))
        .collect::<Result<Vec<_>>>()?;
    let div = d1(&RealField::new(*grid, flux)?);
    let vals = (0..grid.len())
        .map(|i| div.values()[i] + (rp[i] - rm[i]) / (2.0 * dt))
        .collect();
    let field = RealField::new(*grid, vals)?;
    Ok(ResidualReport::from_field("continuity", &field, None, tolerance))
}

/// How ψ is differentiated in the Schrödinger residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchrodingerPath {
    /// Stencils applied to Re ψ and Im ψ.
    Stencil,
    /// Stencils applied to A only; derivatives of S analytic.
    Polar,
}

/// |−(ħ²/2m)ψ'' + Vψ − iħψ̇| by the stencil path.
pub fn schrodinger_residual(
    a: &FreeAction,
    p: &Potential,
    amp: &AmplitudeProfile,
    grid: &Grid1D,
    t: f64,
    dt: f64,
    tolerance: f64,
) -> Result<ResidualReport> {
    let f = lab_amplitude(a, p, amp)?;
    schrodinger_residual_from(a, p, grid, t, dt, f, SchrodingerPath::Stencil, tolerance)
}

/// Schrödinger residual for an arbitrary laboratory amplitude, with the
/// potential taken from `p`.
#[allow(clippy::too_many_arguments)]
pub fn schrodinger_residual_from<F: Fn(f64, f64) -> Result<f64>>(
    a: &FreeAction,
    p: &Potential,
    grid: &Grid1D,
    t: f64,
    dt: f64,
    amp: F,
    path: SchrodingerPath,
    tolerance: f64,
) -> Result<ResidualReport> {
    check_times(a, t, dt)?;
    let hbar = a.units.hbar;
    let kin = a.units.kinetic_factor();
    let n = grid.len();
    let pot = grid.points().map(|x| p.eval(x, t)).collect::<Result<Vec<_>>>()?;
    let i = Complex64::i();
    let vals: Vec<f64> = match path {
        SchrodingerPath::Stencil => {
            let psi = |tt: f64| -> Result<Vec<Complex64>> {
                grid.points()
                    .map(|x| Ok(Complex64::from_polar(1.0, a.eval(x, tt)? / hbar) * amp(x, tt)?))
                    .collect()
            };
            let (pm, p0, pp) = (psi(t - dt)?, psi(t)?, psi(t + dt)?);
            let re = d2(&RealField::new(*grid, p0.iter().map(|z| z.re).collect())?);
            let im = d2(&RealField::new(*grid, p0.iter().map(|z| z.im).collect())?);
            (0..n)
                .map(|j| {
                    let lap = Complex64::new(re.values()[j], im.values()[j]);
                    let dot = (pp[j] - pm[j]) / (2.0 * dt);
                    (-kin * lap + pot[j] * p0[j] - i * hbar * dot).norm()
                })
                .collect()
        }
        SchrodingerPath::Polar => {
            let (am, a0, ap) = (
                sample(grid, t - dt, &amp)?,
                sample(grid, t, &amp)?,
                sample(grid, t + dt, &amp)?,
            );
            let af = RealField::new(*grid, a0.clone())?;
            let (a1, a2) = (d1(&af), d2(&af));
            let s2 = a.curvature(t)?;
            (0..n)
                .map(|j| {
                    let x = grid.x(j);
                    let s1 = a.momentum(x, t)?;
                    let st = a.time_derivative(x, t)?;
                    let av = a0[j];
                    let lap = Complex64::new(a2.values()[j] - av * s1 * s1 / (hbar * hbar), 0.0)
                        + i * (2.0 * a1.values()[j] * s1 + av * s2) / hbar;
                    let adot = (ap[j] - am[j]) / (2.0 * dt);
                    Ok((-kin * lap + pot[j] * av - i * hbar * adot + av * st).norm())
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let field = RealField::new(*grid, vals)?;
    let name = match path {
        SchrodingerPath::Stencil => "schrodinger",
        SchrodingerPath::Polar => "schrodinger_polar",
    };
    Ok(ResidualReport::from_field(name, &field, None, tolerance))
}

/// Density transport between states of one family at increasing times.
/// Separable: A²(x, t2) against A²(x − kΔt/m, t1). Non-separable:
/// (t2 − t0)A²(x2, t2) against (t1 − t0)A²(x1, t1) at equal y. Values are
/// relative to the peak of the earlier density; earlier densities are
/// linearly interpolated and points whose preimage leaves the grid are left
/// out.
pub fn liouville_invariant(a: &FreeAction, states: &[WaveState], tolerance: f64) -> Result<ResidualReport> {
    if states.len() < 2 {
        return Err(Error::Precondition("Liouville check needs at least two states"));
    }
    let mut worst: Option<ResidualReport> = None;
    for w in states.windows(2) {
        let (s1, s2) = (&w[0], &w[1]);
        if s1.potential != s2.potential || s1.action != *a || s2.action != *a {
            return Err(Error::FamilyMismatch);
        }
        if !(s2.time > s1.time) {
            return Err(Error::Precondition("state times must increase"));
        }
        let r = transport_report(a, s1, s2, None, tolerance)?;
        if worst.as_ref().map_or(true, |w| r.max_abs > w.max_abs) {
            worst = Some(r);
        }
    }
    Ok(worst.expect("at least one pair"))
}

/// Separable density comparison with an explicit shift; the Liouville check
/// uses shift = kΔt/m.
pub fn liouville_with_shift(
    a: &FreeAction,
    s1: &WaveState,
    s2: &WaveState,
    shift: f64,
    tolerance: f64,
) -> Result<ResidualReport> {
    transport_report(a, s1, s2, Some(shift), tolerance)
}

fn transport_report(
    a: &FreeAction,
    s1: &WaveState,
    s2: &WaveState,
    shift: Option<f64>,
    tolerance: f64,
) -> Result<ResidualReport> {
    use crate::actions::ActionKind;
    let rho1 = s1.density();
    let rho2 = s2.density();
    let m = a.units.mass;
    let (w1, w2) = match a.kind {
        ActionKind::Separable { .. } => (1.0, 1.0),
        ActionKind::NonSeparable { .. } => (a.elapsed(s1.time)?, a.elapsed(s2.time)?),
    };
    let preimage = |x2: f64| -> Result<f64> {
        match a.kind {
            ActionKind::Separable { k } => Ok(x2 - shift.unwrap_or(k * (s2.time - s1.time) / m)),
            ActionKind::NonSeparable { x0, .. } => {
                let y = (x2 - x0) / w2;
                Ok(x0 + y * w1)
            }
        }
    };
    let peak = w1 * rho1.max_abs();
    if !(peak > 0.0) {
        return Err(Error::Precondition("earlier density vanishes identically"));
    }
    let g2 = s2.grid;
    let mut vals = vec![0.0; g2.len()];
    let mut mask = vec![false; g2.len()];
    for i in 0..g2.len() {
        let x1 = preimage(g2.x(i))?;
        let snapped = snap(&s1.grid, x1);
        if let Some(r1) = rho1.interpolate(snapped) {
            vals[i] = (w2 * rho2.values()[i] - w1 * r1) / peak;
            mask[i] = true;
        }
    }
    let kept = mask.iter().filter(|&&k| k).count();
    if 2 * kept < g2.len() {
        return Err(Error::Interpolation { kept, total: g2.len() });
    }
    let field = RealField::new(g2, vals)?;
    let mut report = ResidualReport::from_field("liouville", &field, Some(&mask), tolerance);
    if kept < g2.len() {
        report = report.with_note(format!(
            "{} points without preimage on the earlier grid",
            g2.len() - kept
        ));
    }
    Ok(report)
}

// Pull x onto the grid when it is within rounding of an end point.
fn snap(g: &Grid1D, x: f64) -> f64 {
    let eps = 1e-9 * g.dx();
    if x < g.x_min() && x > g.x_min() - eps {
        g.x_min()
    } else if x > g.x_max() && x < g.x_max() + eps {
        g.x_max()
    } else {
        x
    }
}

/// A'(0⁺) − A'(0⁻) + (2mγ/ħ²) A(0) for the piecewise delta-trap amplitude,
/// from its closed-form slopes ±mγβ/ħ² and A(0) = −β.
pub fn jump_condition_check(gamma: f64, beta: f64, units: &Units) -> Result<ResidualReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter {
            family: "delta_trap",
            name: "gamma".into(),
            reason: "must be finite and positive",
        });
    }
    if !beta.is_finite() {
        return Err(Error::InvalidParameter {
            family: "delta_trap",
            name: "beta".into(),
            reason: "must be finite",
        });
    }
    let h2 = units.hbar * units.hbar;
    let slope = units.mass * gamma * beta / h2;
    let strength = 2.0 * units.mass * gamma / h2;
    let a0 = -beta;
    let r = slope - (-slope) + strength * a0;
    let scale = 2.0 * slope.abs() + (strength * a0).abs();
    let report = ResidualReport::scalar("jump", r.abs(), r.abs(), 8.0 * f64::EPSILON * scale);
    Ok(if beta == 0.0 {
        report.with_note("trivial: beta = 0 gives the zero amplitude")
    } else {
        report
    })
}

/// Least-squares slope of log(residual) against log(dx). Needs at least
/// three spacings, each half the previous, with strictly decreasing
/// residuals.
pub fn order_from_residuals(dxs: &[f64], residuals: &[f64]) -> Result<f64> {
    if dxs.len() != residuals.len() {
        return Err(Error::Refinement("one residual per spacing"));
    }
    if dxs.len() < 3 {
        return Err(Error::Refinement("at least three spacings are needed"));
    }
    for w in dxs.windows(2) {
        if !(w[0] > 0.0) || ((w[0] / w[1]) - 2.0).abs() > 1e-6 {
            return Err(Error::Refinement("spacings must halve at each step"));
        }
    }
    if residuals.windows(2).any(|w| !(w[1] < w[0])) || residuals.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::NonMonotone(residuals.to_vec()));
    }
    let xs: Vec<f64> = dxs.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Run `check` at every spacing and return the observed order.
pub fn convergence_order<F: FnMut(f64) -> Result<f64>>(mut check: F, dxs: &[f64]) -> Result<f64> {
    let residuals = dxs.iter().map(|&dx| check(dx)).collect::<Result<Vec<_>>>()?;
    order_from_residuals(dxs, &residuals)
}
