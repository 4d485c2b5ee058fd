//! Measure the tolerance constants C of every grid-checkable family and
//! write the calibration fixture.
//!
//! cargo run --release -p bohmfree --example calibrate -- crates/core/fixtures/calibration.json

use std::collections::BTreeMap;

use bohmfree::potentials::CATALOG_TAGS;
use bohmfree::verify::{run_checks, Calibration, Check, VerifyCase, VerifyOptions};
use bohmfree::{Family, Units};

const SPACINGS: [f64; 3] = [2e-2, 1e-2, 5e-3];
const SAFETY: f64 = 3.0;

fn parameter_sets(tag: &str) -> Vec<Family> {
    let base = Family::default_for(tag).expect("catalog tag");
    match tag {
        "poschl_teller" => [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&gamma| Family::PoschlTeller { gamma })
            .collect(),
        _ => vec![base],
    }
}

// Two significant digits, rounded up.
fn round_up(v: f64) -> f64 {
    let e = v.log10().floor() - 1.0;
    let p = 10f64.powf(e);
    format!("{:.1e}", (v / p).ceil() * p).parse().unwrap()
}

fn main() {
    let out = std::env::args().nth(1);
    let units = Units::natural();
    let opts = VerifyOptions {
        calibration: Calibration::unbounded(),
        ..VerifyOptions::default()
    };
    let mut constants: BTreeMap<String, BTreeMap<Check, f64>> = BTreeMap::new();
    for tag in CATALOG_TAGS.iter().filter(|t| **t != "delta_trap") {
        let mut worst: BTreeMap<Check, f64> = BTreeMap::new();
        for family in parameter_sets(tag) {
            let mut series: BTreeMap<Check, Vec<f64>> = BTreeMap::new();
            for dx in SPACINGS {
                let case = VerifyCase::standard(family, units, dx, 1.0).expect("standard case");
                let report = run_checks(&case, &opts).expect("checks run");
                let (h, dt) = (case.grid.dx(), case.dt);
                for check in Check::ALL {
                    let r = report.check(check.name()).expect("check present");
                    let scale = if check.uses_dt() { h * h + dt * dt } else { h * h };
                    series.entry(check).or_default().push(r.max_abs);
                    let w = worst.entry(check).or_insert(0.0);
                    *w = w.max(r.max_abs / scale);
                }
            }
            for (check, values) in &series {
                let order = bohmfree::verify::order_from_residuals(&SPACINGS, values);
                eprintln!(
                    "{:<28} {:?} {:<13} {:?} order {:?}",
                    tag,
                    family.params(),
                    check.name(),
                    values,
                    order
                );
            }
        }
        constants.insert(
            tag.to_string(),
            worst.into_iter().map(|(c, v)| (c, round_up(SAFETY * v))).collect(),
        );
    }
    let cal = Calibration {
        safety: SAFETY,
        spacings: SPACINGS.to_vec(),
        constants,
    };
    let json = serde_json::to_string_pretty(&cal).expect("serializable") + "\n";
    match out {
        Some(path) => std::fs::write(&path, json).expect("fixture written"),
        None => print!("{json}"),
    }
}
