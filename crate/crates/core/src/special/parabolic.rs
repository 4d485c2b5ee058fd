//! Parabolic cylinder function D_{−1/2}, the decaying solution of
//! D'' = (u²/4) D.
//!
//! For u > 0, D_{−1/2}(u) = √(u/2π) K_{1/4}(u²/4). For u ≤ 0 the equation is
//! continued by Taylor steps from the Bessel data at u = 1, in the direction
//! in which D grows.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{bessel_k_pair, continue_quadratic_ode};

const ANCHOR: f64 = 1.0;

fn from_bessel(u: f64) -> (f64, f64) {
    let w = 0.25 * u * u;
    if w > 700.0 {
        return (0.0, 0.0);
    }
    let (k14, k54) = match bessel_k_pair(0.25, w) {
        Ok(p) => p,
        Err(_) => return (f64::NAN, f64::NAN),
    };
    let pre = (u / (2.0 * PI)).sqrt();
    (pre * k14, pre * (k14 / u - 0.5 * u * k54))
}

fn anchor() -> (f64, f64) {
    static CELL: OnceLock<(f64, f64)> = OnceLock::new();
    *CELL.get_or_init(|| from_bessel(ANCHOR))
}

pub fn parabolic_cylinder_dmhalf(u: f64) -> f64 {
    parabolic_cylinder_dmhalf_with_derivative(u).0
}

/// (D_{−1/2}(u), D'_{−1/2}(u)).
pub fn parabolic_cylinder_dmhalf_with_derivative(u: f64) -> (f64, f64) {
    if u.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if u > 0.0 {
        from_bessel(u)
    } else {
        let (d, dp) = anchor();
        continue_quadratic_ode([0.0, 0.0, 0.25], ANCHOR, d, dp, u, 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_values() {
        // mpmath pcfd(-1/2, u)
        let cases = [
            (0.0, 1.216_280_214_257_520_283_1),
            (2.0, 0.243_018_893_963_601_941_59),
            (-6.0, 4730.426_723_144_533_147_4),
            (-1.0, 1.830_393_415_612_195_769_7),
            (-3.0, 8.211_120_427_613_811_161_9),
            (0.001, 1.215_698_845_940_526_496_4),
        ];
        for (u, want) in cases {
            let got = parabolic_cylinder_dmhalf(u);
            assert!(rel(got, want) < 1e-13, "D({u}) = {got}, want {want}");
        }
        let (_, dp) = parabolic_cylinder_dmhalf_with_derivative(-3.0);
        assert!(rel(dp, -10.548_825_240_696_614_841) < 1e-13);
    }

    #[test]
    fn continuous_across_zero() {
        let a = parabolic_cylinder_dmhalf(1e-9);
        let b = parabolic_cylinder_dmhalf(0.0);
        assert!(rel(a, b) < 1e-8);
    }

    #[test]
    fn satisfies_its_equation() {
        let h = 1e-3;
        for u in [-4.0, -1.5, 0.5, 3.0] {
            let f = |v: f64| parabolic_cylinder_dmhalf(v);
            let d2 = (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h);
            assert!(rel(d2, 0.25 * u * u * f(u)) < 1e-5, "u = {u}");
        }
    }
}
