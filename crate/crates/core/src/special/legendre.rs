//! Integer-degree Legendre functions P_n and Q_n on (−1, 1), with
//! derivatives, evaluated at x = tanh s.

/// (P_n(x), P_n'(x)) by the three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> (f64, f64) {
    let (p, dp) = legendre_table(n, x);
    (p[n], dp[n])
}

fn legendre_table(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
        dp[1] = 1.0;
    }
    for k in 1..n {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        // P'_{k+1} = P'_{k-1} + (2k+1) P_k
        dp[k + 1] = dp[k - 1] + (2.0 * kf + 1.0) * p[k];
    }
    (p, dp)
}

/// Values and s-derivatives of P_n(tanh s) and Q_n(tanh s):
/// `[P, Q, dP/ds, dQ/ds]`.
///
/// Q_n(x) = P_n(x) artanh(x) − W_{n−1}(x), with
/// W_{n−1} = Σ_{k=1}^{n} P_{k−1} P_{n−k} / k, and artanh(tanh s) = s.
pub fn legendre_pq_tanh(n: usize, s: f64) -> [f64; 4] {
    let x = s.tanh();
    let sech2 = 1.0 / (s.cosh() * s.cosh());
    let (p, dp) = legendre_table(n, x);
    let (mut w, mut dw) = (0.0, 0.0);
    for k in 1..=n {
        let kf = k as f64;
        w += p[k - 1] * p[n - k] / kf;
        dw += (dp[k - 1] * p[n - k] + p[k - 1] * dp[n - k]) / kf;
    }
    let q = p[n] * s - w;
    let dq_dx_part = dp[n] * s - dw;
    [p[n], q, sech2 * dp[n], sech2 * dq_dx_part + p[n]]
}
