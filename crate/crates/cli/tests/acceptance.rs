//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use bohmfree::amplitudes::dual_path_error;
use bohmfree::propagate::reduced_span;
use bohmfree::special::{airy_ai, bessel_k1};
use bohmfree::verify::order_from_residuals;
use bohmfree::verify::pipeline::verify_family;
use bohmfree::{
    assemble_state, build_profile, density_transport_error, evolve, hj_residual, l2_norm, normalize_if_integrable,
    EvolutionSpec, Family, FamilyReport, FreeAction, Grid1D, Normalization, Potential, ProfileOptions, Units,
    VerifyOptions,
};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: f64, out: Outcome) -> Outcome {
    let s = elapsed.as_secs_f64();
    match out {
        Ok(d) if s <= limit_s => Ok(format!("{d}; {s:.2} s")),
        Ok(d) => Err(format!("{d}; {s:.2} s exceeds {limit_s} s")),
        Err(d) => Err(format!("{d}; {s:.2} s")),
    }
}

fn grid_families() -> Vec<Family> {
    bohmfree::potentials::CATALOG_TAGS
        .iter()
        .map(|t| Family::default_for(t).unwrap())
        .filter(|f| !matches!(f, Family::DeltaTrap { .. }))
        .collect()
}

const DXS: [f64; 3] = [2e-2, 1e-2, 5e-3];

/// Reports of every grid-checkable family at each spacing.
fn sweep_reports() -> Vec<(Family, Vec<FamilyReport>)> {
    let opts = VerifyOptions::default();
    grid_families()
        .into_iter()
        .map(|f| {
            let reps = DXS
                .iter()
                .map(|&dx| verify_family(f, Units::natural(), dx, &opts).unwrap())
                .collect();
            (f, reps)
        })
        .collect()
}

fn residual_criterion(reports: &[(Family, Vec<FamilyReport>)], names: &[&str]) -> Outcome {
    let mut worst_order = (f64::INFINITY, f64::NEG_INFINITY);
    for (f, reps) in reports {
        for &name in names {
            let fine = reps[2].check(name).unwrap();
            if !fine.passed {
                return Err(format!("{} {name}: {:e} > {:e}", f.tag(), fine.max_abs, fine.tolerance));
            }
            let res: Vec<f64> = reps.iter().map(|r| r.check(name).unwrap().max_abs).collect();
            let order = order_from_residuals(&DXS, &res).map_err(|e| format!("{} {name}: {e}", f.tag()))?;
            if !(1.8..=2.2).contains(&order) {
                return Err(format!("{} {name}: order {order:.3}", f.tag()));
            }
            worst_order = (worst_order.0.min(order), worst_order.1.max(order));
        }
    }
    Ok(format!(
        "{} families pass at dx = 5e-3, orders in [{:.3}, {:.3}]",
        reports.len(),
        worst_order.0,
        worst_order.1
    ))
}

fn hj_exactness() -> Outcome {
    let nat = Units::natural();
    let grid = Grid1D::new(-10.0, 10.0, 2001).unwrap();
    let z = FreeAction::separable(1.0, nat).unwrap();
    let y = FreeAction::non_separable(0.0, 0.0, nat).unwrap();
    let mut worst = 0.0f64;
    for i in 0..10 {
        let ts = -2.0 + 0.5 * i as f64;
        let ty = 0.5 + 0.5 * i as f64;
        worst = worst.max(hj_residual(&z, &grid, ts).unwrap().max_abs());
        worst = worst.max(hj_residual(&y, &grid, ty).unwrap().max_abs());
    }
    check(worst <= 1e-12, format!("max residual {worst:e}"))
}

fn cancellation(reports: &[(Family, Vec<FamilyReport>)]) -> Outcome {
    let opts = VerifyOptions::default();
    let dt = verify_family(
        Family::default_for("delta_trap").unwrap(),
        Units::natural(),
        5e-3,
        &opts,
    )
    .unwrap();
    let jump = dt.check("jump").map(|c| c.passed).unwrap_or(false);
    if !jump {
        return Err("delta trap jump condition failed".into());
    }
    residual_criterion(reports, &["cancellation"]).map(|d| format!("{d}; delta trap jump condition holds"))
}

fn dual_paths() -> Outcome {
    let z = FreeAction::separable(1.0, Units::natural()).unwrap();
    let cases = [
        (Family::ConstantForce { force: 1.0 }, -2.0, 2.0, -2.0, 1e-8),
        (Family::ModifiedHarmonicZ { omega: 1.0 }, -4.0, 4.0, 0.0, 1e-8),
        (Family::ModifiedPoschlTeller, -4.0, 4.0, 0.0, 1e-8),
        (Family::MovingCoulomb { alpha: 1.0 }, 0.05, 5.0, 5.0, 1e-8),
        (Family::HarmonicZ { omega: 1.0 }, -4.0, 4.0, 4.0, 1e-6),
    ];
    let mut parts = Vec::new();
    for (f, lo, hi, seed, bound) in cases {
        let p = Potential::for_action(f, &z).unwrap();
        let e = dual_path_error(&p, lo, hi, seed, 1e-12, 4001).map_err(|e| e.to_string())?;
        if e > bound {
            return Err(format!("{}: {e:e} > {bound:e}", f.tag()));
        }
        parts.push(format!("{} {e:.1e}", f.tag()));
    }
    Ok(parts.join(", "))
}

/// Γ(x) for x > 0 by shifting up twenty and applying Stirling's series.
fn gamma(x: f64) -> f64 {
    let z = x + 20.0;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z.powi(3)) + 1.0 / (1260.0 * z.powi(5)) - 1.0 / (1680.0 * z.powi(7));
    let ln = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series;
    let prod: f64 = (0..20).map(|i| x + i as f64).product();
    ln.exp() / prod
}

/// Ai from its Maclaurin series.
fn airy_series(u: f64) -> f64 {
    let c1 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0));
    let c2 = 1.0 / (3f64.powf(1.0 / 3.0) * gamma(1.0 / 3.0));
    let (mut f, mut g) = (0.0, 0.0);
    let (mut tf, mut tg) = (1.0, u);
    for k in 0..40 {
        let k = k as f64;
        f += tf;
        g += tg;
        tf *= u * u * u / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
        tg *= u * u * u / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
    }
    c1 * f - c2 * g
}

fn k1_quadrature(x: f64) -> f64 {
    let h = 2e-3;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let term = (-x * t.cosh()).exp() * t.cosh();
        sum += term;
        if term < 1e-300 || (term < sum * 1e-18 && x * t.cosh() > 50.0) {
            break;
        }
        t += h;
    }
    sum * h
}

fn special_values() -> Outcome {
    let ai0 = airy_ai(0.0);
    let series = airy_series(0.0);
    let ai_err = (ai0 - 0.355_028_053_887_817_2).abs().max((ai0 - series).abs());
    let series_ok = (airy_series(1.0) - airy_ai(1.0)).abs() <= 1e-11;
    let u = 1e-3;
    let small = (u * bessel_k1(u).unwrap() - 1.0).abs();
    let q = k1_quadrature(1.0);
    let k1_err = ((bessel_k1(1.0).unwrap() - q) / q).abs();
    check(
        ai_err <= 1e-10 && series_ok && small <= 1e-5 && k1_err <= 1e-9,
        format!("|Ai(0) err| {ai_err:.1e}, |u K1(u) - 1| at 1e-3 {small:.1e}, K1(1) rel err {k1_err:.1e}"),
    )
}

fn liouville(reports: &[(Family, Vec<FamilyReport>)]) -> Outcome {
    let mut worst_sep = 0.0f64;
    let mut worst_non = 0.0f64;
    for (f, reps) in reports {
        let c = reps[2].check("liouville").unwrap();
        if !c.passed {
            return Err(format!("{}: {:e} > {:e}", f.tag(), c.max_abs, c.tolerance));
        }
        match f.section() {
            Some(bohmfree::Section::NonSeparable) => {
                if c.max_abs > 1e-9 {
                    return Err(format!("{}: {:e}", f.tag(), c.max_abs));
                }
                worst_non = worst_non.max(c.max_abs);
            }
            _ => worst_sep = worst_sep.max(c.max_abs / c.tolerance),
        }
    }
    Ok(format!(
        "separable translation residual at most {worst_sep:.2} of C dx^2; (t - t0) A^2 at equal y within {worst_non:.1e}"
    ))
}

fn evolution() -> Outcome {
    let a = FreeAction::separable(1.0, Units::natural()).unwrap();
    let p = Potential::for_action(Family::ModifiedPoschlTeller, &a).unwrap();
    let grid = Grid1D::with_spacing(-20.0, 30.0, 0.02).unwrap();
    let (lo, hi) = reduced_span(&p, &grid, 0.0, 5.0).unwrap();
    let amp = build_profile(&p, lo, hi, 20_001, &ProfileOptions::default()).unwrap();
    let state = normalize_if_integrable(assemble_state(&a, &p, &amp, &grid, 0.0).unwrap());
    let run = evolve(&state, &amp, &EvolutionSpec::new(5.0, 2500)).map_err(|e| e.to_string())?;
    let err = density_transport_error(&run, &a, &p, &amp).unwrap();
    let drift = run.total_drift();
    let control_spec = EvolutionSpec {
        zero_potential: true,
        ..EvolutionSpec::new(5.0, 2500)
    };
    let control = evolve(&state, &amp, &control_spec).map_err(|e| e.to_string())?;
    let control_err = density_transport_error(&control, &a, &p, &amp).unwrap();
    check(
        err <= 1e-3 && drift <= 1e-9 && control_err >= 0.1,
        format!("transport error {err:.2e}, drift {drift:.1e}, control error {control_err:.3}"),
    )
}

fn normalization() -> Outcome {
    let nat = Units::natural();
    let z = FreeAction::separable(1.0, nat).unwrap();
    let y = FreeAction::non_separable(0.0, 0.0, nat).unwrap();
    let cases = [
        (Family::ModifiedHarmonicZ { omega: 1.0 }, z, -10.0, 10.0, 0.0, true),
        (Family::ModifiedPoschlTeller, z, -20.0, 20.0, 0.0, true),
        (
            Family::ModifiedDecayingHarmonic { omega0: 1.0 },
            y,
            -15.0,
            15.0,
            1.0,
            true,
        ),
        (Family::ConstantForce { force: 1.0 }, z, -10.0, 10.0, 0.0, false),
        (Family::DeltaTrap { gamma: 1.0, beta: 1.0 }, z, -10.0, 10.0, 0.0, false),
    ];
    let mut worst = 0.0f64;
    for (f, a, lo, hi, t, expect) in cases {
        let p = Potential::for_action(f, &a).unwrap();
        let grid = Grid1D::with_spacing(lo, hi, 0.01).unwrap();
        let c = p.coordinate();
        let s0 = c.reduce(lo, t, p.units()).unwrap();
        let s1 = c.reduce(hi, t, p.units()).unwrap();
        let amp = build_profile(
            &p,
            s0.min(s1) - 0.1,
            s0.max(s1) + 0.1,
            20_001,
            &ProfileOptions::default(),
        )
        .unwrap();
        let st = normalize_if_integrable(assemble_state(&a, &p, &amp, &grid, t).unwrap());
        match (st.normalization, expect) {
            (Normalization::Normalized { .. }, true) => worst = worst.max((l2_norm(&st.amplitude) - 1.0).abs()),
            (Normalization::NotNormalizable, false) => {}
            (n, _) => return Err(format!("{}: {n:?}", f.tag())),
        }
    }
    check(
        worst <= 1e-9,
        format!("three decaying states within {worst:.1e} of unit norm; Airy and delta trap flagged"),
    )
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_bohmfree");
    let dir = std::env::temp_dir().join(format!("bohmfree-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let run = |args: &[&str]| Command::new(bin).args(args).output().expect("binary runs");

    let first = run(&["verify"]);
    let second = run(&["verify"]);
    let catalog_code = first.status.code();

    let wrong = dir.join("wrong_variant.json");
    std::fs::write(
        &wrong,
        r#"{"family": {"tag": "modified_poschl_teller"}, "action": {"variant": "non_separable", "x0": 0, "t0": 0}}"#,
    )
    .unwrap();
    let wrong_code = run(&["verify", "--config", wrong.to_str().unwrap()]).status.code();

    let mismatch = dir.join("mismatch.json");
    std::fs::write(
        &mismatch,
        r#"{"family": {"tag": "modified_poschl_teller"}, "amplitude_from": {"tag": "modified_harmonic_z"}}"#,
    )
    .unwrap();
    let mismatch_code = run(&["verify", "--config", mismatch.to_str().unwrap()]).status.code();

    let (a, b) = (dir.join("a"), dir.join("b"));
    for d in [&a, &b] {
        run(&["build", "--family", "cosine_wave", "--out", d.to_str().unwrap()]);
    }
    let same_csv = std::fs::read(a.join("cosine_wave_state.csv")).ok()
        == std::fs::read(b.join("cosine_wave_state.csv")).ok()
        && a.join("cosine_wave_state.csv").exists();
    let _ = std::fs::remove_dir_all(&dir);

    check(
        catalog_code == Some(0)
            && wrong_code == Some(2)
            && mismatch_code == Some(1)
            && first.stdout == second.stdout
            && same_csv,
        format!(
            "catalog verify exit {catalog_code:?}, wrong variant exit {wrong_code:?}, mismatched amplitude exit \
             {mismatch_code:?}, identical reruns {}",
            first.stdout == second.stdout && same_csv
        ),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, out: Outcome| {
        let (tag, detail) = match out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n} {tag} {name}: {detail}");
    };

    let t = Instant::now();
    let out = hj_exactness();
    report(1, "free Hamilton-Jacobi exactness", within(t.elapsed(), 1.0, out));

    let t = Instant::now();
    let reports = sweep_reports();
    let sweep_time = t.elapsed();
    let out = cancellation(&reports);
    report(2, "Bohm potential cancels V", within(t.elapsed(), 30.0, out));

    let t = Instant::now();
    let out = dual_paths();
    report(3, "closed form and ODE oracle agree", within(t.elapsed(), 10.0, out));

    report(4, "special-function point values", special_values());

    let t = Instant::now();
    let out = residual_criterion(&reports, &["continuity", "schrodinger"]);
    report(
        5,
        "continuity and Schrodinger residuals",
        within(t.elapsed() + sweep_time, 30.0, out),
    );

    report(6, "transport along free characteristics", liouville(&reports));

    let t = Instant::now();
    let out = evolution();
    report(
        7,
        "Crank-Nicolson evolution keeps the density rigid",
        within(t.elapsed(), 60.0, out),
    );

    report(8, "normalization flags", normalization());

    report(9, "command-line contract", cli_contract());

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
