//! Modified Bessel functions of the second kind, K_ν(x), real ν ≥ 0, x > 0.
//!
//! The order is split as ν = μ + l with |μ| ≤ 1/2. K_μ and K_{μ+1} come from
//! Temme's series for x < 2 and from Steed's continued fraction (CF2) for
//! x ≥ 2; forward recurrence then climbs to K_ν, which is stable for K.

use std::f64::consts::PI;

use super::rgamma_one_plus;
use crate::error::{Error, Result};

const EPS: f64 = 1e-17;
const MAX_ITER: usize = 10_000;
const SWITCH: f64 = 2.0;

/// (K_ν(x), K_{ν+1}(x)).
pub fn bessel_k_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "bessel_k",
            arg: x,
        });
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::Domain {
            function: "bessel_k order",
            arg: nu,
        });
    }
    let nl = (nu + 0.5).floor() as usize;
    let mu = nu - nl as f64;
    let (mut k_mu, mut k_mu1) = if x < SWITCH { temme(mu, x) } else { steed(mu, x) };
    let xi2 = 2.0 / x;
    for i in 1..=nl {
        let next = (mu + i as f64) * xi2 * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    Ok((k_mu, k_mu1))
}

/// K₁(u) for u > 0.
pub fn bessel_k1(u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain {
            function: "bessel_k1",
            arg: u,
        });
    }
    Ok(bessel_k_pair(1.0, u)?.0)
}

// Gamma combinations of Temme's series:
// gam1 = (1/Γ(1−μ) − 1/Γ(1+μ)) / 2μ, gam2 = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let plus = rgamma_one_plus(mu);
    let minus = rgamma_one_plus(-mu);
    let gam2 = 0.5 * (minus + plus);
    let gam1 = if mu.abs() < 1e-4 {
        // even part of the series, avoiding the 0/0
        let c = [
            -0.577_215_664_901_532_860_61,
            0.042_002_635_034_095_235_529,
            0.042_197_734_555_544_336_748,
        ];
        let m2 = mu * mu;
        c[0] + m2 * (c[1] + m2 * c[2])
    } else {
        (minus - plus) / (2.0 * mu)
    };
    (gam1, gam2, plus, minus)
}

fn temme(mu: f64, x: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / x)
}

fn steed(mu: f64, x: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    let h = a1 * h;
    let k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    (k_mu, k_mu1)
}
