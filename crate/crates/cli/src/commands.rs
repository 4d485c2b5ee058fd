use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, ensure, Context, Result};
use bohmfree::propagate::{is_evolvable, reduced_span};
use bohmfree::verify::pipeline::run_checks;
use bohmfree::{
    assemble_state, bohm_potential, build_profile, catalog, density_transport_error, evolve, normalize_if_integrable,
    phase_agreement, AmplitudeProfile, Error, EvolutionSpec, Family, Grid1D, Normalization, Potential, ProfileOptions,
    Section, VerifyOptions, WaveState,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{resolve, Format, Resolved, RunConfig, SCHEMA};

pub const MAX_SWEEP_POINTS: usize = 10_000;
/// Pass thresholds of an evolution run.
pub const TRANSPORT_TOLERANCE: f64 = 1e-3;
pub const DRIFT_TOLERANCE: f64 = 1e-9;

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Global {
    pub config: RunConfig,
    pub family: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub tol_scale: Option<f64>,
}

impl Global {
    fn format(&self) -> Option<Format> {
        self.format.or(self.config.output.format)
    }

    fn out_dir(&self) -> Option<PathBuf> {
        self.out.clone().or_else(|| self.config.output.path.clone())
    }

    fn resolve(&self) -> Result<Resolved> {
        resolve(&self.config, self.family.as_deref(), self.tol_scale)
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn cell(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn cmd_catalog(g: &Global) -> Result<bool> {
    let entries = catalog();
    match g.format() {
        Some(Format::Json) => print_json(&entries)?,
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            w.write_record([
                "index",
                "tag",
                "action",
                "availability",
                "params",
                "reduced_form",
                "amplitude",
            ])?;
            for e in &entries {
                w.write_record([
                    e.index.to_string(),
                    e.tag.to_string(),
                    e.action.name().to_string(),
                    availability_name(e.availability),
                    params_text(e),
                    e.reduced_form.to_string(),
                    e.amplitude.to_string(),
                ])?;
            }
            w.flush()?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(
                out,
                "{:>2}  {:<28} {:<14} {:<19} params",
                "#", "tag", "action", "amplitude"
            )?;
            for e in &entries {
                writeln!(
                    out,
                    "{:>2}  {:<28} {:<14} {:<19} {}",
                    e.index,
                    e.tag,
                    e.action.name(),
                    availability_name(e.availability),
                    params_text(e)
                )?;
                writeln!(out, "    V = {}    A: {}", e.reduced_form, e.amplitude)?;
            }
        }
    }
    Ok(true)
}

fn availability_name(a: bohmfree::Availability) -> String {
    serde_json::to_value(a)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn params_text(e: &bohmfree::CatalogEntry) -> String {
    let parts: Vec<String> = e.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(" ")
    }
}

/// Amplitude profile covering `grid` for every time in [t0, t1].
fn profile_for(r: &Resolved, p: &Potential, grid: &Grid1D, t0: f64, t1: f64, n_min: usize) -> Result<AmplitudeProfile> {
    let (lo, hi) = reduced_span(p, grid, t0, t1)?;
    let ds = grid.dx() / p.coordinate().stretch(t0)?.min(p.coordinate().stretch(t1)?);
    let (lo, hi) = (lo - 2.0 * ds, hi + 2.0 * ds);
    if p.family().is_coulomb() && lo <= 0.0 && hi >= 0.0 {
        return Err(Error::Singularity { s: 0.0 }.into());
    }
    let n = (((hi - lo) / ds).ceil() as usize + 1).clamp(n_min.max(Grid1D::MIN_POINTS), 400_001);
    let opts = ProfileOptions {
        seeds: r.seeds,
        ode_tol: r.ode_tol,
        method: bohmfree::Method::Auto,
    };
    Ok(build_profile(p, lo, hi, n, &opts)?)
}

fn amplitude_potential(r: &Resolved) -> Result<Potential> {
    Ok(match r.amplitude_family {
        Some(f) => r.potential.with_family(f)?,
        None => r.potential,
    })
}

fn normalization_value(n: &Normalization) -> serde_json::Value {
    serde_json::to_value(n).unwrap_or(serde_json::Value::Null)
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn cmd_build(g: &Global) -> Result<bool> {
    let r = g.resolve()?;
    let t = r.t();
    let grid = r.grid_at(t)?;
    let amp_p = amplitude_potential(&r)?;
    let profile = profile_for(&r, &amp_p, &grid, t, t, 2)?;
    let state = normalize_if_integrable(assemble_state(&r.action, &amp_p, &profile, &grid, t)?);
    let mut notes = Vec::new();
    if profile.source() == bohmfree::AmplitudeSource::OdeOracle && r.seeds_defaulted {
        notes.push(format!(
            "ODE seeds not configured; used defaults a0 = {}, da0 = {}",
            r.seeds.a0, r.seeds.da0
        ));
    }
    if let Some(f) = r.amplitude_family {
        notes.push(format!(
            "amplitude built from {} instead of {}",
            f.tag(),
            r.family.tag()
        ));
    }
    let bohm = match bohm_potential(&state) {
        Ok(b) => Some(b),
        Err(Error::AllNodes { excluded, total }) => {
            notes.push(format!(
                "Bohm potential not evaluated: {excluded} of {total} points near nodes"
            ));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let reduced = state.reduced_coordinates()?;
    let rows = state_rows(&state, &r.potential, &reduced, bohm.as_ref());

    let dir = g.out_dir().unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&dir)?;
    let tag = r.family.tag();
    let header = [
        "x",
        "z_or_y",
        "amplitude",
        "phase",
        "density",
        "potential",
        "bohm_potential",
    ];
    let data_path = match g.format() {
        Some(Format::Json) => {
            let path = dir.join(format!("{tag}_state.json"));
            let rows_json: Vec<Vec<serde_json::Value>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| c.map(serde_json::Value::from).unwrap_or(serde_json::Value::Null))
                        .collect()
                })
                .collect();
            write_json(&path, &json!({"schema": SCHEMA, "columns": header, "rows": rows_json}))?;
            path
        }
        _ => {
            let path = dir.join(format!("{tag}_state.csv"));
            let text: Vec<Vec<String>> = rows.iter().map(|row| row.iter().map(|&c| cell(c)).collect()).collect();
            write_csv(&path, &header, &text)?;
            path
        }
    };

    let meta = json!({
        "schema": SCHEMA,
        "generated_unix": unix_now(),
        "data": data_path.file_name().map(|s| s.to_string_lossy().into_owned()),
        "config": g.config,
        "resolved": resolved_echo(&r, &grid, t),
        "source": profile.source(),
        "availability": amp_p.availability(),
        "normalization": normalization_value(&state.normalization),
        "notes": notes,
    });
    write_json(&dir.join(format!("{tag}_state.meta.json")), &meta)?;
    eprintln!("wrote {}", data_path.display());
    Ok(true)
}

fn resolved_echo(r: &Resolved, grid: &Grid1D, t: f64) -> serde_json::Value {
    let action = match r.action.kind {
        bohmfree::ActionKind::Separable { k } => json!({"variant": "separable", "k": k}),
        bohmfree::ActionKind::NonSeparable { x0, t0 } => json!({"variant": "non_separable", "x0": x0, "t0": t0}),
    };
    json!({
        "family": {"tag": r.family.tag(), "params": r.family.param_map()},
        "amplitude_from": r.amplitude_family.map(|f| json!({"tag": f.tag(), "params": f.param_map()})),
        "units": {"hbar": r.units.hbar, "mass": r.units.mass},
        "action": action,
        "grid": {"x_min": grid.x_min(), "x_max": grid.x_max(), "n": grid.len()},
        "t": t,
        "seeds": r.seeds,
        "ode_tol": r.ode_tol,
    })
}

type Row = [Option<f64>; 7];

fn state_rows(
    state: &WaveState,
    p: &Potential,
    reduced: &[f64],
    bohm: Option<&bohmfree::verify::BohmField>,
) -> Vec<Row> {
    state
        .grid
        .points()
        .enumerate()
        .map(|(i, x)| {
            let a = state.amplitude.values()[i];
            let vb = bohm.and_then(|b| b.valid[i].then(|| b.values.values()[i]));
            [
                Some(x),
                Some(reduced[i]),
                Some(a),
                Some(state.phase.values()[i]),
                Some(a * a),
                p.eval(x, state.time).ok(),
                vb,
            ]
        })
        .collect()
}

fn verify_options(r: &Resolved) -> VerifyOptions {
    VerifyOptions {
        seeds: r.seeds,
        ode_tol: r.ode_tol,
        tol_scale: r.tol_scale,
        calibration: r.calibration.clone(),
        amplitude_family: r.amplitude_family,
        ..VerifyOptions::default()
    }
}

fn verify_one(r: &Resolved) -> Result<bohmfree::FamilyReport> {
    let case = r.case()?;
    Ok(run_checks(&case, &verify_options(r))?)
}

fn emit_reports(g: &Global, name: &str, reports: &[bohmfree::FamilyReport]) -> Result<bool> {
    let passed = reports.iter().all(|r| r.passed);
    let doc = json!({"schema": SCHEMA, "reports": reports, "passed": passed});
    match g.format() {
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            w.write_record(["family", "check", "max_abs", "l2", "tolerance", "passed"])?;
            for r in reports {
                for c in &r.checks {
                    w.write_record([
                        r.family.clone(),
                        c.name.clone(),
                        fmt(c.max_abs),
                        fmt(c.l2),
                        fmt(c.tolerance),
                        c.passed.to_string(),
                    ])?;
                }
            }
            w.flush()?;
        }
        _ => print_json(&doc)?,
    }
    if let Some(dir) = g.out_dir() {
        ensure_dir(&dir)?;
        write_json(&dir.join(format!("{name}.json")), &doc)?;
    }
    Ok(passed)
}

pub fn cmd_verify(g: &Global) -> Result<bool> {
    if g.family.is_some() || g.config.family.is_some() {
        let r = g.resolve()?;
        let report = verify_one(&r)?;
        return emit_reports(g, "verify", &[report]);
    }
    let c = &g.config;
    ensure!(
        c.action.is_none() && c.grid.is_none() && c.amplitude_from.is_none() && c.seeds.is_none(),
        "action, grid, seeds and amplitude_from need a family; pass --family or set family.tag"
    );
    let resolved = bohmfree::potentials::CATALOG_TAGS
        .iter()
        .map(|tag| resolve(c, Some(tag), g.tol_scale))
        .collect::<Result<Vec<_>>>()?;
    let reports = resolved.par_iter().map(verify_one).collect::<Result<Vec<_>>>()?;
    emit_reports(g, "verify", &reports)
}

/// Parameter points of a sweep, in lexicographic order of parameter names.
pub fn sweep_points(cfg: &RunConfig) -> Result<Vec<BTreeMap<String, f64>>> {
    let sweep = cfg.sweep.as_ref().context("config has no sweep section")?;
    let family = cfg.family.as_ref().context("a sweep needs family.tag")?;
    let schema = Family::schema_for(&family.tag).with_context(|| format!("unknown family {}", family.tag))?;
    for name in sweep.params.keys() {
        ensure!(
            schema.iter().any(|s| s.name == name),
            "{} has no parameter `{name}`",
            family.tag
        );
    }
    let total = sweep
        .params
        .values()
        .try_fold(1usize, |acc, r| acc.checked_mul(r.len()));
    match total {
        Some(n) if n <= MAX_SWEEP_POINTS => {}
        _ => bail!("sweep has more than {MAX_SWEEP_POINTS} parameter combinations"),
    }
    let mut points = vec![family.params.clone()];
    for (name, range) in &sweep.params {
        let values = range.values()?;
        points = points
            .iter()
            .flat_map(|base| {
                values.iter().map(move |&v| {
                    let mut p = base.clone();
                    p.insert(name.clone(), v);
                    p
                })
            })
            .collect();
    }
    Ok(points)
}

pub fn cmd_sweep(g: &Global) -> Result<bool> {
    let mut cfg = g.config.clone();
    if let Some(tag) = &g.family {
        match cfg.family.as_mut() {
            Some(f) if &f.tag == tag => {}
            _ => {
                cfg.family = Some(crate::config::FamilyConfig {
                    tag: tag.clone(),
                    params: BTreeMap::new(),
                })
            }
        }
    }
    let points = sweep_points(&cfg)?;
    let resolved = points
        .into_iter()
        .map(|params| {
            let mut c = cfg.clone();
            if let Some(f) = c.family.as_mut() {
                f.params = params;
            }
            resolve(&c, None, g.tol_scale)
        })
        .collect::<Result<Vec<_>>>()?;
    let reports = resolved.par_iter().map(verify_one).collect::<Result<Vec<_>>>()?;
    emit_reports(g, "sweep", &reports)
}

fn refusal(f: &Family) -> String {
    let why = match f {
        Family::ConstantForce { .. } | Family::TimeDecreasingForce { .. } => {
            "its Airy amplitude decays on one side only and oscillates with slowly falling envelope on the other"
        }
        Family::DeltaTrap { .. } => "its amplitude grows linearly in |z|",
        Family::CosineWave { .. } => "its amplitude is oscillatory and does not decay",
        Family::MovingCoulomb { .. } | Family::CoulombLike { .. } => {
            "its potential is singular at the origin and the amplitude is defined on one side of it only"
        }
        _ => "its amplitude does not decay on both sides",
    };
    format!(
        "{} cannot be evolved: {why}, so the state is not square-integrable and the zero walls of the \
         propagator would cut it off; evolvable families are modified_harmonic_z, modified_poschl_teller \
         and modified_decaying_harmonic",
        f.tag()
    )
}

pub fn cmd_evolve(g: &Global, zero_potential: bool) -> Result<bool> {
    let r = g.resolve()?;
    ensure!(is_evolvable(&r.family), "{}", refusal(&r.family));
    ensure!(
        r.amplitude_family.is_none(),
        "amplitude_from is not supported by evolve"
    );
    let non_sep = r.family.section() == Some(Section::NonSeparable);
    let t0 = match r.action.kind {
        bohmfree::ActionKind::NonSeparable { t0, .. } => t0,
        bohmfree::ActionKind::Separable { .. } => 0.0,
    };
    let time = r.time;
    let t_start = time.t_start.or(time.t).unwrap_or(if non_sep { t0 + 1.0 } else { 0.0 });
    let t_end = time.t_end.unwrap_or(if non_sep { t0 + 3.0 } else { t_start + 5.0 });
    let steps = time
        .steps
        .unwrap_or(((t_end - t_start) / 2e-3).round().max(1.0) as usize);
    let grid = match r.grid {
        Some(gr) => gr,
        None if non_sep => Grid1D::new(-30.0, 30.0, 3001)?,
        None => Grid1D::new(-20.0, 30.0, 2501)?,
    };
    r.action.elapsed(t_start)?;
    let profile = profile_for(&r, &r.potential, &grid, t_start, t_end.max(t_start), 20_001)?;
    let state = normalize_if_integrable(assemble_state(&r.action, &r.potential, &profile, &grid, t_start)?);
    let spec = EvolutionSpec {
        snapshots: time.snapshots.unwrap_or(10),
        zero_potential,
        ..EvolutionSpec::new(t_end, steps)
    };
    let run = evolve(&state, &profile, &spec)?;
    let transport = density_transport_error(&run, &r.action, &r.potential, &profile)?;
    let phase = phase_agreement(&run, &r.action)?;
    let drift = run.total_drift();

    let dir = g.out_dir().unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&dir)?;
    let tag = r.family.tag();
    let stem = if zero_potential {
        format!("{tag}_control")
    } else {
        tag.to_string()
    };
    let mut files = Vec::new();
    let header = ["x", "re_psi", "im_psi", "density"];
    if g.format() == Some(Format::Json) {
        let snaps: Vec<_> = run
            .snapshots
            .iter()
            .map(|s| {
                let v = s.psi.values();
                json!({
                    "t": s.t,
                    "x": s.psi.grid().points().collect::<Vec<_>>(),
                    "re_psi": v.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "im_psi": v.iter().map(|z| z.im).collect::<Vec<_>>(),
                    "density": v.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let name = format!("{stem}_snapshots.json");
        write_json(&dir.join(&name), &json!({"schema": SCHEMA, "snapshots": snaps}))?;
        files.push(name);
    } else {
        for (i, s) in run.snapshots.iter().enumerate() {
            let rows: Vec<Vec<String>> = s
                .psi
                .grid()
                .points()
                .zip(s.psi.values())
                .map(|(x, z)| vec![fmt(x), fmt(z.re), fmt(z.im), fmt(z.norm_sqr())])
                .collect();
            let name = format!("{stem}_snapshot_{i:03}.csv");
            write_csv(&dir.join(&name), &header, &rows)?;
            files.push(name);
        }
    }
    let passed = transport <= TRANSPORT_TOLERANCE && drift <= DRIFT_TOLERANCE;
    let summary = json!({
        "schema": SCHEMA,
        "family": {"tag": tag, "params": r.family.param_map()},
        "resolved": resolved_echo(&r, &grid, t_start),
        "t_start": t_start,
        "t_end": t_end,
        "steps": steps,
        "dt": run.dt(),
        "zero_potential": zero_potential,
        "snapshot_times": run.snapshots.iter().map(|s| s.t).collect::<Vec<_>>(),
        "snapshot_files": files,
        "probability_drift": drift,
        "max_step_drift": run.max_step_drift(),
        "density_transport_error": transport,
        "phase_agreement": phase,
        "max_wall_ratio": run.max_wall_ratio,
        "tolerances": {"density_transport_error": TRANSPORT_TOLERANCE, "probability_drift": DRIFT_TOLERANCE},
        "passed": passed,
    });
    write_json(&dir.join(format!("{stem}_evolve.json")), &summary)?;
    print_json(&summary)?;
    Ok(passed)
}
