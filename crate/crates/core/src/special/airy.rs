//! Airy function Ai and its derivative on the whole real line.
//!
//! For u > 1/4 Ai comes from K_{1/3} and K_{2/3} at ζ = (2/3) u^{3/2}. For
//! u ≤ 1/4 the Maclaurin data at 0 are continued with the Taylor stepper for
//! y'' = u y, which stays accurate on the oscillatory side.

use std::f64::consts::PI;

use super::{bessel_k_pair, continue_quadratic_ode};

/// Ai(0).
const AI0: f64 = 0.355_028_053_887_817_239_26;
/// Ai'(0).
const AIP0: f64 = -0.258_819_403_792_806_798_405;
const SWITCH: f64 = 0.25;

pub fn airy_ai(u: f64) -> f64 {
    airy_ai_with_derivative(u).0
}

/// (Ai(u), Ai'(u)).
pub fn airy_ai_with_derivative(u: f64) -> (f64, f64) {
    if u.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if u > SWITCH {
        let zeta = 2.0 / 3.0 * u * u.sqrt();
        if zeta > 700.0 {
            return (0.0, 0.0);
        }
        let k13 = bessel_k_pair(1.0 / 3.0, zeta).map(|p| p.0).unwrap_or(0.0);
        let k23 = bessel_k_pair(2.0 / 3.0, zeta).map(|p| p.0).unwrap_or(0.0);
        let ai = (u / 3.0).sqrt() * k13 / PI;
        let aip = -u * k23 / (PI * 3.0_f64.sqrt());
        (ai, aip)
    } else {
        continue_quadratic_ode([0.0, 1.0, 0.0], 0.0, AI0, AIP0, u, 0.5)
    }
}
