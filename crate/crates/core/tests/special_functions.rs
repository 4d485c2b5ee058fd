//! Special functions against independent quadrature and series oracles.

use bohmfree::special::{
    airy_ai, airy_ai_with_derivative, bessel_k1, bessel_k_pair, legendre_p, legendre_pq_tanh,
    parabolic_cylinder_dmhalf, parabolic_cylinder_dmhalf_with_derivative,
};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Γ(x) for x > 0 by shifting up and applying Stirling's series.
fn gamma(x: f64) -> f64 {
    let shift = 20.0;
    let z = x + shift;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z.powi(3)) + 1.0 / (1260.0 * z.powi(5)) - 1.0 / (1680.0 * z.powi(7));
    let ln = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series;
    let mut prod = 1.0;
    for i in 0..shift as usize {
        prod *= x + i as f64;
    }
    ln.exp() / prod
}

/// Ai and Ai' from the Maclaurin series.
fn airy_series(u: f64) -> (f64, f64) {
    let c1 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0));
    let c2 = 1.0 / (3f64.powf(1.0 / 3.0) * gamma(1.0 / 3.0));
    // f = Σ 3^k (1/3)_k u^{3k}/(3k)!, g = Σ 3^k (2/3)_k u^{3k+1}/(3k+1)!
    let mut f = 0.0;
    let mut g = 0.0;
    let mut df = 0.0;
    let mut dg = 0.0;
    let mut tf = 1.0;
    let mut tg = u;
    for k in 0..60 {
        let kf = k as f64;
        f += tf;
        g += tg;
        if k > 0 {
            df += tf * 3.0 * kf / u;
        }
        dg += tg * (3.0 * kf + 1.0) / u;
        tf *= u * u * u / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= u * u * u / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
    }
    (c1 * f - c2 * g, c1 * df - c2 * dg)
}

/// ∫₀^∞ e^{−x cosh t} cosh(νt) dt by the trapezoid rule, which converges
/// geometrically for this analytic, rapidly decaying integrand.
fn bessel_k_quadrature(nu: f64, x: f64) -> f64 {
    let h = 2e-3;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let term = (-x * t.cosh()).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-300 || (term < sum * 1e-18 && x * t.cosh() > 50.0) {
            break;
        }
        t += h;
    }
    sum * h
}

/// D_{−1/2}(z) = (2/√π) e^{−z²/4} ∫₀^∞ exp(−z w² − w⁴/2) dw.
fn dmhalf_quadrature(z: f64) -> f64 {
    let h = 2e-3;
    let mut sum = 0.5;
    let mut w: f64 = h;
    while w < 12.0 {
        sum += (-z * w * w - 0.5 * w.powi(4)).exp();
        w += h;
    }
    2.0 / std::f64::consts::PI.sqrt() * (-z * z / 4.0).exp() * sum * h
}

#[test]
fn gamma_oracle_is_sound() {
    assert!(rel(gamma(0.5), std::f64::consts::PI.sqrt()) < 1e-14);
    assert!(rel(gamma(5.0), 24.0) < 1e-14);
}

#[test]
fn airy_at_origin_matches_gamma_constants() {
    let ai0 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0));
    let dai0 = -1.0 / (3f64.powf(1.0 / 3.0) * gamma(1.0 / 3.0));
    let (a, d) = airy_ai_with_derivative(0.0);
    assert!(rel(a, ai0) < 1e-13);
    assert!(rel(d, dai0) < 1e-13);
}

#[test]
fn airy_matches_maclaurin_series() {
    let mut u = -4.0;
    while u <= 3.0 {
        let (want, dwant) = airy_series(u);
        let (got, dgot) = airy_ai_with_derivative(u);
        assert!(
            (got - want).abs() < 1e-11 * want.abs().max(0.05),
            "Ai({u}) = {got}, series {want}"
        );
        if u != 0.0 {
            assert!(
                (dgot - dwant).abs() < 1e-11 * dwant.abs().max(0.05),
                "Ai'({u}) = {dgot}, series {dwant}"
            );
        }
        u += 0.125;
    }
}

#[test]
fn airy_decays_for_large_argument() {
    assert!(airy_ai(10.0) > 0.0 && airy_ai(10.0) < 1e-9);
    assert_eq!(airy_ai(200.0), 0.0);
}

#[test]
fn k1_matches_quadrature_over_required_range() {
    for &u in &[
        1e-3, 3e-3, 0.01, 0.05, 0.1, 0.3, 0.7, 1.0, 1.5, 1.999, 2.0, 2.5, 4.0, 7.0, 12.0, 20.0, 30.0,
    ] {
        let want = bessel_k_quadrature(1.0, u);
        let got = bessel_k1(u).unwrap();
        assert!(rel(got, want) < 1e-9, "K1({u}) = {got}, quadrature {want}");
    }
}

#[test]
fn fractional_orders_match_quadrature() {
    for &nu in &[0.0, 0.25, 1.0 / 3.0, 2.0 / 3.0, 1.25, 2.5] {
        for &x in &[0.05, 0.4, 1.9, 2.1, 6.0, 15.0] {
            let want = bessel_k_quadrature(nu, x);
            let got = bessel_k_pair(nu, x).unwrap().0;
            assert!(rel(got, want) < 1e-11, "K_{nu}({x}) = {got}, quadrature {want}");
        }
    }
}

#[test]
fn dmhalf_matches_quadrature_on_required_range() {
    let mut u = -6.0;
    while u <= 6.0 {
        let want = dmhalf_quadrature(u);
        let got = parabolic_cylinder_dmhalf(u);
        assert!(rel(got, want) < 1e-7, "D(-1/2, {u}) = {got}, quadrature {want}");
        u += 0.25;
    }
}

#[test]
fn dmhalf_derivative_satisfies_weber_equation() {
    // D'' = (u²/4) D, checked by differencing the returned derivative
    let h = 1e-4;
    for &u in &[-5.0, -2.0, -0.3, 0.0, 0.7, 3.0, 5.5] {
        let (d, _) = parabolic_cylinder_dmhalf_with_derivative(u);
        let (_, dp) = parabolic_cylinder_dmhalf_with_derivative(u + h);
        let (_, dm) = parabolic_cylinder_dmhalf_with_derivative(u - h);
        let second = (dp - dm) / (2.0 * h);
        assert!((second - u * u / 4.0 * d).abs() < 1e-6 * d.abs().max(1.0), "u = {u}");
    }
}

#[test]
fn legendre_low_degrees_match_explicit_polynomials() {
    for &x in &[-0.9, -0.3, 0.0, 0.45, 0.99] {
        let (p2, dp2) = legendre_p(2, x);
        assert!((p2 - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        assert!((dp2 - 3.0 * x).abs() < 1e-14);
        let (p3, _) = legendre_p(3, x);
        assert!((p3 - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
    }
}

#[test]
fn legendre_q_in_tanh_variable() {
    for &s in &[-2.0, -0.5, 0.0, 0.8, 3.0] {
        let x: f64 = f64::tanh(s);
        let q0 = x.atanh();
        let q1 = x * x.atanh() - 1.0;
        let [p, q, dp, dq] = legendre_pq_tanh(1, s);
        assert!((p - x).abs() < 1e-15);
        assert!((q - q1).abs() < 1e-12);
        let sech2 = 1.0 - x * x;
        assert!((dp - sech2).abs() < 1e-14);
        assert!((dq - sech2 * (q0 + x / (1.0 - x * x))).abs() < 1e-12);
    }
}
