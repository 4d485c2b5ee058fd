//! Adaptive Dormand–Prince 5(4) integration of the reduced amplitude equation
//! A'' = (2m/ħ²) V(s) A, with a C² quintic Hermite interpolant through the
//! accepted steps.

use crate::error::{Error, Result};
use crate::potentials::Potential;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// b − b*, the embedded error weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 2_000_000;

/// Accepted nodes of an integration, sorted by s, each carrying (A, A', A'').
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution {
    s: Vec<f64>,
    y: Vec<[f64; 3]>,
}

impl DenseSolution {
    pub fn range(&self) -> (f64, f64) {
        (self.s[0], *self.s.last().unwrap())
    }

    pub fn nodes(&self) -> usize {
        self.s.len()
    }

    /// (A, A') at s; `None` outside the integrated interval.
    pub fn eval(&self, s: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.range();
        if !(s >= lo && s <= hi) {
            return None;
        }
        let i = match self.s.partition_point(|&v| v <= s) {
            0 => 0,
            p if p >= self.s.len() => self.s.len() - 2,
            p => p - 1,
        };
        if self.s.len() == 1 {
            return Some((self.y[0][0], self.y[0][1]));
        }
        Some(hermite5(self.s[i], self.s[i + 1], &self.y[i], &self.y[i + 1], s))
    }

    /// Join two solutions that share their first node (both started at the
    /// same seed and ran in opposite directions).
    pub(crate) fn merge(a: DenseSolution, b: DenseSolution) -> DenseSolution {
        let (mut s, mut y) = (a.s, a.y);
        for (sb, yb) in b.s.into_iter().zip(b.y) {
            if !s.contains(&sb) {
                s.push(sb);
                y.push(yb);
            }
        }
        let mut idx: Vec<usize> = (0..s.len()).collect();
        idx.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
        DenseSolution {
            s: idx.iter().map(|&i| s[i]).collect(),
            y: idx.iter().map(|&i| y[i]).collect(),
        }
    }
}

// Quintic Hermite interpolation matching value, first and second derivative
// at both ends. Returns (value, derivative).
fn hermite5(s0: f64, s1: f64, y0: &[f64; 3], y1: &[f64; 3], s: f64) -> (f64, f64) {
    let h = s1 - s0;
    let t = (s - s0) / h;
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
    let d00 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d10 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d20 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let d01 = -d00;
    let d11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d21 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    let v = h00 * y0[0] + h * h10 * y0[1] + h * h * h20 * y0[2] + h01 * y1[0] + h * h11 * y1[1] + h * h * h21 * y1[2];
    let d = (d00 * y0[0] + d01 * y1[0]) / h + d10 * y0[1] + d11 * y1[1] + h * (d20 * y0[2] + d21 * y1[2]);
    (v, d)
}

/// Integrate A'' = (2m/ħ²) V(s) A from `s_start` to `s_end` (either
/// direction) with A(s_start) = a0, A'(s_start) = da0.
pub fn solve(p: &Potential, s_start: f64, s_end: f64, a0: f64, da0: f64, tol: f64) -> Result<DenseSolution> {
    check_interval(p, s_start, s_end)?;
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::Precondition("ODE tolerance must lie in [1e-12, 1e-4]"));
    }
    if !(a0.is_finite() && da0.is_finite()) {
        return Err(Error::Precondition("initial data must be finite"));
    }
    let kappa = p.units().ode_factor();
    // absolute tolerance in units of the initial data, so that the step
    // sequence does not depend on the overall scale of the solution
    let magnitude = a0.abs().max(da0.abs());
    let atol = if magnitude > 0.0 { tol * magnitude } else { tol };
    let rhs = |s: f64, y: [f64; 2]| -> Result<[f64; 2]> { Ok([y[1], kappa * p.reduced_profile(s)? * y[0]]) };
    let second = |s: f64, a: f64| -> Result<f64> { Ok(kappa * p.reduced_profile(s)? * a) };

    let mut s = s_start;
    let mut y = [a0, da0];
    let mut nodes_s = vec![s];
    let mut nodes_y = vec![[a0, da0, second(s, a0)?]];
    let span = s_end - s_start;
    if span == 0.0 {
        return Ok(DenseSolution { s: nodes_s, y: nodes_y });
    }
    let dir = span.signum();
    let h_min = 1e-13 * span.abs().max(1.0);
    let mut h = dir * (span.abs() / 64.0).min(0.1);
    let mut k1 = rhs(s, y)?;
    let mut steps = 0;
    while (s_end - s) * dir > 0.0 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepFailure {
                s,
                reason: "step budget exhausted",
            });
        }
        let last = (s + h - s_end) * dir >= 0.0;
        if last {
            h = s_end - s;
        }
        let mut k = [[0.0; 2]; 7];
        k[0] = k1;
        for st in 1..7 {
            let mut yy = y;
            for (j, kj) in k.iter().enumerate().take(st) {
                yy[0] += h * A[st][j] * kj[0];
                yy[1] += h * A[st][j] * kj[1];
            }
            if st == 6 {
                k[6] = rhs(s + h, yy)?;
            } else {
                k[st] = rhs(s + C[st] * h, yy)?;
            }
        }
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            y_new[0] += h * A[6][j] * kj[0];
            y_new[1] += h * A[6][j] * kj[1];
        }
        let mut err = 0.0;
        for c in 0..2 {
            let e: f64 = h * k.iter().zip(E.iter()).map(|(kj, w)| w * kj[c]).sum::<f64>();
            let sc = atol + tol * y[c].abs().max(y_new[c].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / 2.0).sqrt();
        if !err.is_finite() {
            return Err(Error::StepFailure {
                s,
                reason: "non-finite solution",
            });
        }
        if err <= 1.0 {
            s = if last { s_end } else { s + h };
            y = y_new;
            k1 = k[6];
            nodes_s.push(s);
            nodes_y.push([y[0], y[1], second(s, y[0])?]);
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h.abs() < h_min {
            return Err(Error::StepFailure {
                s,
                reason: "step size underflow",
            });
        }
    }
    if dir < 0.0 {
        nodes_s.reverse();
        nodes_y.reverse();
    }
    Ok(DenseSolution { s: nodes_s, y: nodes_y })
}

fn check_interval(p: &Potential, a: f64, b: f64) -> Result<()> {
    let (lo, hi) = (a.min(b), a.max(b));
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Precondition("integration interval must be finite"));
    }
    if let crate::potentials::Family::DeltaTrap { .. } = p.family() {
        return Err(Error::NotAFunction("delta_trap"));
    }
    if p.family().is_coulomb() && lo <= 0.0 && hi >= 0.0 {
        return Err(Error::Singularity { s: 0.0 });
    }
    Ok(())
}
