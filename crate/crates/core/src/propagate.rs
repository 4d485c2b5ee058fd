//! Crank–Nicolson evolution of an assembled state under its external
//! potential, used to check that the density is carried along unchanged.

use num_complex::Complex64;

use crate::actions::FreeAction;
use crate::amplitudes::{AmplitudeProfile, Normalization, WaveState};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid1D, Units};
use crate::potentials::{Family, Potential};
use crate::verify::lab_amplitude;

/// Relative wall amplitude above which a run is rejected.
pub const WALL_THRESHOLD: f64 = 1e-8;

/// Region used for phase comparison, relative to the peak modulus.
pub const PHASE_REGION: f64 = 1e-3;

/// Solve a tridiagonal system with constant off-diagonals `off` and diagonal
/// `diag` (Thomas algorithm).
fn solve_tridiagonal(off: Complex64, diag: &[Complex64], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut denom = diag[0];
    if denom.norm() == 0.0 {
        return Err(Error::SingularSolve(0));
    }
    c[0] = off / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off * c[i - 1];
        if denom.norm() == 0.0 || !denom.is_finite() {
            return Err(Error::SingularSolve(i));
        }
        c[i] = off / denom;
        d[i] = (rhs[i] - off * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// One Crank–Nicolson step from t to t + dt with zero Dirichlet walls. The
/// potential is sampled at t + dt/2.
pub fn cn_step(psi: &ComplexField, p: &Potential, t: f64, dt: f64, units: &Units) -> Result<ComplexField> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Precondition("dt must be positive"));
    }
    if units != p.units() {
        return Err(Error::Precondition("potential and state use different units"));
    }
    let grid = *psi.grid();
    let n = grid.len();
    let vals = psi.values();
    let tm = t + 0.5 * dt;
    let dx = grid.dx();
    // H = -K d²/dx² + V; (1 + iH dt/2ħ) ψ' = (1 − iH dt/2ħ) ψ
    let kin = units.hbar * units.hbar / (2.0 * units.mass * dx * dx);
    let r = Complex64::new(0.0, 0.5 * dt / units.hbar);
    let off = -r * kin;
    let mut diag = Vec::with_capacity(n - 2);
    let mut rhs = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        let h0 = 2.0 * kin + p.eval(grid.x(i), tm)?;
        let left = if i > 1 { vals[i - 1] } else { Complex64::new(0.0, 0.0) };
        let right = if i < n - 2 {
            vals[i + 1]
        } else {
            Complex64::new(0.0, 0.0)
        };
        diag.push(1.0 + r * h0);
        rhs.push((1.0 - r * h0) * vals[i] - off * (left + right));
    }
    let inner = solve_tridiagonal(off, &diag, &rhs)?;
    let mut out = Vec::with_capacity(n);
    out.push(Complex64::new(0.0, 0.0));
    out.extend(inner);
    out.push(Complex64::new(0.0, 0.0));
    ComplexField::new(grid, out)
}

/// Σ|ψ|² dx, the quantity conserved exactly by the discrete scheme.
pub fn probability(psi: &ComplexField) -> f64 {
    psi.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * psi.grid().dx()
}

/// Which families may be evolved against zero walls.
pub fn is_evolvable(f: &Family) -> bool {
    matches!(
        f,
        Family::ModifiedHarmonicZ { .. } | Family::ModifiedPoschlTeller | Family::ModifiedDecayingHarmonic { .. }
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSpec {
    pub t_end: f64,
    pub steps: usize,
    /// Number of evenly spaced snapshots after the initial one.
    pub snapshots: usize,
    /// Evolve freely (V = 0) instead of under the state's potential.
    pub zero_potential: bool,
}

impl EvolutionSpec {
    pub fn new(t_end: f64, steps: usize) -> Self {
        Self {
            t_end,
            steps,
            snapshots: 10,
            zero_potential: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub psi: ComplexField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRun {
    pub initial: WaveState,
    pub family: Family,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub zero_potential: bool,
    pub snapshots: Vec<Snapshot>,
    /// Relative probability change of each step.
    pub step_drift: Vec<f64>,
    /// Largest |ψ| next to a wall relative to the peak, over the evolved states.
    pub max_wall_ratio: f64,
}

impl EvolutionRun {
    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps as f64
    }

    /// |P(T) − P(0)| / P(0).
    pub fn total_drift(&self) -> f64 {
        let p0 = probability(&self.snapshots[0].psi);
        let p1 = probability(&self.snapshots[self.snapshots.len() - 1].psi);
        ((p1 - p0) / p0).abs()
    }

    pub fn max_step_drift(&self) -> f64 {
        self.step_drift.iter().fold(0.0, |m, &d| m.max(d))
    }
}

fn wall_ratio(values: &[f64]) -> f64 {
    let n = values.len();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return f64::INFINITY;
    }
    values[1].abs().max(values[n - 2].abs()) / peak
}

/// Evolve `initial` from its own time to `spec.t_end`. The domain must be
/// wide enough that the transported analytic state stays below
/// `WALL_THRESHOLD` of its peak next to both walls for the whole run;
/// `amp` is the profile the state was assembled from.
pub fn evolve(initial: &WaveState, amp: &AmplitudeProfile, spec: &EvolutionSpec) -> Result<EvolutionRun> {
    let family = *initial.potential.family();
    if !is_evolvable(&family) {
        return Err(Error::Precondition(
            "only modified_harmonic_z, modified_poschl_teller and modified_decaying_harmonic can be evolved",
        ));
    }
    if spec.steps == 0 {
        return Err(Error::Precondition("steps must be at least 1"));
    }
    let t_start = initial.time;
    if !(spec.t_end > t_start) || !spec.t_end.is_finite() {
        return Err(Error::Precondition("t_end must come after the initial time"));
    }
    initial.action.elapsed(t_start)?;
    initial.action.elapsed(spec.t_end)?;
    let dt = (spec.t_end - t_start) / spec.steps as f64;
    let time = |step: usize| {
        if step == spec.steps {
            spec.t_end
        } else {
            t_start + step as f64 * dt
        }
    };

    if amp.potential() != &initial.potential {
        return Err(Error::FamilyMismatch);
    }
    let lab = lab_amplitude(&initial.action, &initial.potential, amp)?;
    let grid = initial.grid;
    for step in 0..=spec.steps {
        let t = time(step);
        let a = grid.points().map(|x| lab(x, t)).collect::<Result<Vec<_>>>()?;
        let ratio = wall_ratio(&a);
        if ratio > WALL_THRESHOLD {
            return Err(Error::WallContamination { t, ratio });
        }
    }

    let p = if spec.zero_potential {
        initial.potential.with_family(Family::Zero)?
    } else {
        initial.potential
    };
    let every = (spec.steps / spec.snapshots.max(1)).max(1);
    let modulus = |psi: &ComplexField| psi.values().iter().map(|z| z.norm()).collect::<Vec<_>>();

    let mut psi = initial.psi();
    let mut max_wall = wall_ratio(&modulus(&psi));
    let mut snapshots = vec![Snapshot {
        t: t_start,
        psi: psi.clone(),
    }];
    let mut step_drift = Vec::with_capacity(spec.steps);
    let mut prob = probability(&psi);
    for step in 1..=spec.steps {
        let next = cn_step(&psi, &p, time(step - 1), dt, &initial.units)?;
        max_wall = max_wall.max(wall_ratio(&modulus(&next)));
        let np = probability(&next);
        step_drift.push(((np - prob) / prob).abs());
        prob = np;
        psi = next;
        if step % every == 0 || step == spec.steps {
            snapshots.push(Snapshot {
                t: time(step),
                psi: psi.clone(),
            });
        }
    }
    Ok(EvolutionRun {
        initial: initial.clone(),
        family,
        t_start,
        t_end: spec.t_end,
        steps: spec.steps,
        zero_potential: spec.zero_potential,
        snapshots,
        step_drift,
        max_wall_ratio: max_wall,
    })
}

/// Reduced-coordinate interval covering `grid` for every time in [t_start, t_end].
pub fn reduced_span(p: &Potential, grid: &Grid1D, t_start: f64, t_end: f64) -> Result<(f64, f64)> {
    let c = p.coordinate();
    let u = p.units();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    // z and y are monotone in t at fixed x, so the corners suffice
    for x in [grid.x_min(), grid.x_max()] {
        for t in [t_start, t_end] {
            let s = c.reduce(x, t, u)?;
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    Ok((lo, hi))
}

fn amplitude_scale(run: &EvolutionRun) -> f64 {
    match run.initial.normalization {
        Normalization::Normalized { scale } => scale,
        _ => 1.0,
    }
}

/// Max over snapshots of ‖|ψ|² − A²‖₂ / ‖A²‖₂, with A the analytic amplitude
/// carried to each snapshot time.
pub fn density_transport_error(
    run: &EvolutionRun,
    a: &FreeAction,
    p: &Potential,
    amp: &AmplitudeProfile,
) -> Result<f64> {
    let lab = lab_amplitude(a, p, amp)?;
    let scale = amplitude_scale(run);
    let mut worst = 0.0f64;
    for snap in &run.snapshots {
        let grid = snap.psi.grid();
        let mut diff = 0.0;
        let mut norm = 0.0;
        for (x, z) in grid.points().zip(snap.psi.values()) {
            let amp = scale * lab(x, snap.t)?;
            let rho = amp * amp;
            diff += (z.norm_sqr() - rho).powi(2);
            norm += rho * rho;
        }
        if norm > 0.0 {
            worst = worst.max((diff / norm).sqrt());
        }
    }
    Ok(worst)
}

/// Largest deviation of arg ψ − S/ħ from its value at the peak, over the
/// region where |ψ| exceeds 1e-3 of the peak, across all snapshots.
pub fn phase_agreement(run: &EvolutionRun, a: &FreeAction) -> Result<f64> {
    let hbar = a.units.hbar;
    let mut worst = 0.0f64;
    for snap in &run.snapshots {
        let grid = snap.psi.grid();
        let mut w = Vec::with_capacity(grid.len());
        for (x, z) in grid.points().zip(snap.psi.values()) {
            let s = a.eval(x, snap.t)?;
            w.push(z * Complex64::from_polar(1.0, -s / hbar));
        }
        let (ipk, peak) = w.iter().enumerate().fold(
            (0, 0.0f64),
            |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc },
        );
        let reference = w[ipk].conj() / peak;
        for z in &w {
            if z.norm() > PHASE_REGION * peak {
                worst = worst.max((z * reference).arg().abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitudes::{assemble_state, build_profile, normalize_if_integrable, ProfileOptions};

    fn gaussian(grid: Grid1D) -> ComplexField {
        let c = (2.0 / std::f64::consts::PI).powf(0.25);
        ComplexField::from_fn(grid, |x| Complex64::new(c * (-x * x).exp(), 0.0)).unwrap()
    }

    fn free() -> Potential {
        let a = FreeAction::separable(0.0, Units::natural()).unwrap();
        Potential::for_action(Family::Zero, &a).unwrap()
    }

    #[test]
    fn tridiagonal_matches_dense_product() {
        let off = Complex64::new(0.3, -0.2);
        let diag: Vec<_> = (0..6).map(|i| Complex64::new(2.0 + i as f64, 0.5)).collect();
        let x: Vec<_> = (0..6).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let rhs: Vec<_> = (0..6)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += off * x[i - 1];
                }
                if i < 5 {
                    v += off * x[i + 1];
                }
                v
            })
            .collect();
        let got = solve_tridiagonal(off, &diag, &rhs).unwrap();
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).norm() < 1e-13);
        }
    }

    #[test]
    fn free_gaussian_keeps_norm() {
        let grid = Grid1D::new(-10.0, 10.0, 801).unwrap();
        let mut psi = gaussian(grid);
        let u = Units::natural();
        let p = free();
        for i in 0..50 {
            let p0 = probability(&psi);
            psi = cn_step(&psi, &p, i as f64 * 0.01, 0.01, &u).unwrap();
            assert!(((probability(&psi) - p0) / p0).abs() < 1e-12);
        }
    }

    #[test]
    fn nonpositive_dt_rejected() {
        let grid = Grid1D::new(-10.0, 10.0, 101).unwrap();
        let psi = gaussian(grid);
        let u = Units::natural();
        assert!(matches!(
            cn_step(&psi, &free(), 0.0, 0.0, &u),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            cn_step(&psi, &free(), 0.0, -1e-3, &u),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn plane_wave_phase_advance() {
        // interior of a wide box, far from the walls
        let k = 2.0;
        let dx = 1e-3;
        let dt = 1e-4;
        let grid = Grid1D::with_spacing(-5.0, 5.0, dx).unwrap();
        let psi = ComplexField::from_fn(grid, |x| Complex64::from_polar(1.0, k * x)).unwrap();
        let out = cn_step(&psi, &free(), 0.0, dt, &Units::natural()).unwrap();
        // discrete dispersion of the scheme
        let lam = (2.0 - 2.0 * (k * dx).cos()) / (2.0 * dx * dx);
        let want = Complex64::new(1.0, -0.5 * dt * lam) / Complex64::new(1.0, 0.5 * dt * lam);
        let i = grid.len() / 2;
        let ratio = out.values()[i] / psi.values()[i];
        assert!((ratio - want).norm() < 1e-12);
        // continuum value e^{-i k² dt / 2}
        let exact = Complex64::from_polar(1.0, -0.5 * k * k * dt);
        assert!((ratio - exact).norm() < 1e-9);
    }

    fn mpt_state(x_min: f64, x_max: f64, dx: f64, t_end: f64) -> (FreeAction, Potential, AmplitudeProfile, WaveState) {
        let u = Units::natural();
        let a = FreeAction::separable(1.0, u).unwrap();
        let p = Potential::for_action(Family::ModifiedPoschlTeller, &a).unwrap();
        let grid = Grid1D::with_spacing(x_min, x_max, dx).unwrap();
        let (lo, hi) = reduced_span(&p, &grid, 0.0, t_end).unwrap();
        let amp = build_profile(&p, lo, hi, 4001, &ProfileOptions::default()).unwrap();
        let st = normalize_if_integrable(assemble_state(&a, &p, &amp, &grid, 0.0).unwrap());
        (a, p, amp, st)
    }

    #[test]
    fn narrow_domain_hits_the_wall() {
        let (_, _, amp, st) = mpt_state(-2.0, 2.0, 0.02, 1.0);
        let r = evolve(&st, &amp, &EvolutionSpec::new(1.0, 100));
        assert!(matches!(r, Err(Error::WallContamination { .. })));
    }

    #[test]
    fn non_decaying_families_rejected() {
        let u = Units::natural();
        let a = FreeAction::separable(1.0, u).unwrap();
        let p = Potential::for_action(Family::ConstantForce { force: 1.0 }, &a).unwrap();
        let grid = Grid1D::new(-5.0, 5.0, 101).unwrap();
        let amp = build_profile(&p, -6.0, 6.0, 1001, &ProfileOptions::default()).unwrap();
        let st = assemble_state(&a, &p, &amp, &grid, 0.0).unwrap();
        assert!(matches!(
            evolve(&st, &amp, &EvolutionSpec::new(1.0, 10)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn short_mpt_run_transports_density() {
        let (a, p, amp, st) = mpt_state(-20.0, 22.0, 0.02, 1.0);
        let run = evolve(&st, &amp, &EvolutionSpec::new(1.0, 500)).unwrap();
        assert!(run.max_step_drift() < 1e-12);
        assert_eq!(run.snapshots.len(), 11);
        assert!(run.snapshots.windows(2).all(|w| w[1].t > w[0].t));
        assert!((run.snapshots.last().unwrap().t - 1.0).abs() < 1e-15);
        let err = density_transport_error(&run, &a, &p, &amp).unwrap();
        assert!(err < 1e-3, "transport error {err}");
        assert!(phase_agreement(&run, &a).unwrap() < 1e-3);
    }
}
