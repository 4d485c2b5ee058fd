//! Special functions needed by the closed-form amplitudes.
//!
//! Everything here is built from three ingredients:
//!
//! * Temme's series and Steed's continued fraction for the modified Bessel
//!   function K_ν of real order ([`bessel`]), switching at x = 2;
//! * Taylor-series continuation of linear ODEs y'' = (q0 + q1 u + q2 u²) y
//!   ([`continue_quadratic_ode`]), which covers the Airy equation on the
//!   oscillatory side and the parabolic cylinder equation for u ≤ 0;
//! * closed-form integer-degree Legendre functions ([`legendre`]).
//!
//! Switchover points are documented on each function.

pub mod airy;
pub mod bessel;
pub mod legendre;
pub mod parabolic;

pub use airy::{airy_ai, airy_ai_with_derivative};
pub use bessel::{bessel_k1, bessel_k_pair};
pub use legendre::{legendre_p, legendre_pq_tanh};
pub use parabolic::{parabolic_cylinder_dmhalf, parabolic_cylinder_dmhalf_with_derivative};

/// Taylor coefficients c_k of 1/Γ(z) = Σ c_k z^k, k = 1..=26.
const RGAMMA_TAYLOR: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
];

/// 1/Γ(1 + μ) for |μ| ≤ 1/2, from the Taylor series of 1/Γ.
pub(crate) fn rgamma_one_plus(mu: f64) -> f64 {
    // 1/Γ(1+μ) = Σ_{j≥0} c_{j+1} μ^j
    RGAMMA_TAYLOR.iter().rev().fold(0.0, |acc, &c| acc * mu + c)
}

/// Continue a solution of y'' = (q0 + q1 u + q2 u²) y from `from` to `to`,
/// returning (y, y') at `to`. Each step re-expands the solution in a Taylor
/// series about the current point and sums it to full double precision.
pub fn continue_quadratic_ode(q: [f64; 3], from: f64, y: f64, dy: f64, to: f64, max_step: f64) -> (f64, f64) {
    let span = to - from;
    if span == 0.0 {
        return (y, dy);
    }
    let steps = (span.abs() / max_step).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let (mut u, mut y, mut dy) = (from, y, dy);
    for i in 0..steps {
        let (q0, q1, q2) = (q[0] + q[1] * u + q[2] * u * u, q[1] + 2.0 * q[2] * u, q[2]);
        // a_{k+2} (k+2)(k+1) = q0 a_k + q1 a_{k-1} + q2 a_{k-2}
        let (mut am2, mut am1, mut a0, mut a1) = (0.0, 0.0, y, dy);
        let mut sum = a0 + a1 * h;
        let mut dsum = a1;
        let mut hk = h; // h^(k+1) for the term being added next
        let mut small = 0;
        for k in 0..400usize {
            let a2 = (q0 * a0 + q1 * am1 + q2 * am2) / ((k + 2) as f64 * (k + 1) as f64);
            let term = a2 * hk * h;
            sum += term;
            dsum += (k + 2) as f64 * a2 * hk;
            let scale = sum.abs() + (h * dsum).abs() + f64::MIN_POSITIVE;
            if term.abs() <= 1e-18 * scale && ((k + 2) as f64 * a2 * hk * h).abs() <= 1e-18 * scale {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
            am2 = am1;
            am1 = a0;
            a0 = a1;
            a1 = a2;
            hk *= h;
        }
        y = sum;
        dy = dsum;
        u = if i + 1 == steps { to } else { u + h };
    }
    (y, dy)
}
