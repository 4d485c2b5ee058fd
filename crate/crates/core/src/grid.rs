//! Uniform 1D grids, sampled fields and the second-order stencils shared by
//! every residual in the crate.
//!
//! Fields are immutable once built and always hold finite samples. The
//! derivative stencils keep the field on its grid: central differences in the
//! interior, second-order one-sided differences at both ends.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants: reduced Planck constant and particle mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
}

impl Units {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && mass.is_finite() && hbar > 0.0 && mass > 0.0) {
            return Err(Error::InvalidUnits { hbar, mass });
        }
        Ok(Self { hbar, mass })
    }

    /// ħ = m = 1.
    pub fn natural() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }

    /// The factor 2m/ħ² of the reduced amplitude equation A'' = (2m/ħ²) V A.
    pub fn ode_factor(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }

    /// The factor ħ²/2m in front of the kinetic term.
    pub fn kinetic_factor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

impl Default for Units {
    fn default() -> Self {
        Self::natural()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 8;

    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidBounds { x_min, x_max });
        }
        if n < Self::MIN_POINTS {
            return Err(Error::TooFewPoints(n));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid over `[x_min, x_max]` whose spacing is as close to `dx` as an
    /// integer number of cells allows.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::Precondition("grid spacing must be positive"));
        }
        let cells = ((x_max - x_min) / dx).round().max(1.0) as usize;
        Self::new(x_min, x_max, cells + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Same spacing and size, every sample moved by `offset`.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Self::new(self.x_min + offset, self.x_max + offset, self.n)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

fn check_finite<'a, I>(what: &'static str, values: I) -> Result<()>
where
    I: IntoIterator<Item = &'a f64>,
{
    match values.into_iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index }),
        None => Ok(()),
    }
}

/// Real samples on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid1D,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        check_finite("real field", &values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(grid: Grid1D, mut f: F) -> Result<Self> {
        Self::new(grid, grid.points().map(&mut f).collect())
    }

    pub fn try_from_fn<F: FnMut(f64) -> Result<f64>>(grid: Grid1D, f: F) -> Result<Self> {
        let values = grid.points().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Pointwise map; the result must stay finite.
    pub fn map<F: FnMut(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(self.grid, self.values.iter().copied().map(f).collect())
    }

    pub fn zip_with<F: FnMut(f64, f64) -> f64>(&self, other: &Self, mut f: F) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid, values)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Linear interpolation at `x`; `None` outside the grid.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        if !self.grid.contains(x) {
            return None;
        }
        let n = self.grid.len();
        let pos = (x - self.grid.x_min()) / self.grid.dx();
        let i = (pos.floor() as usize).min(n - 2);
        let frac = pos - i as f64;
        Some(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }
}

/// Complex samples on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "complex field",
                index,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: FnMut(f64) -> Complex64>(grid: Grid1D, f: F) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn re(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.re).collect(),
        }
    }

    pub fn im(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.im).collect(),
        }
    }

    /// |ψ|² sample by sample.
    pub fn density(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    /// Trapezoid-weighted Σ|ψ|² dx.
    pub fn norm_sqr(&self) -> f64 {
        trapezoid(&self.grid, self.values.iter().map(|z| z.norm_sqr()))
    }
}

fn trapezoid<I: Iterator<Item = f64>>(grid: &Grid1D, samples: I) -> f64 {
    let last = grid.len() - 1;
    let sum: f64 = samples
        .enumerate()
        .map(|(i, v)| if i == 0 || i == last { 0.5 * v } else { v })
        .sum();
    sum * grid.dx()
}

/// First derivative: central differences inside, second-order one-sided at
/// the two boundary samples. Exact on polynomials of degree ≤ 2.
pub fn d1(field: &RealField) -> RealField {
    let f = &field.values;
    let n = f.len();
    let h2 = 2.0 * field.grid.dx();
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / h2;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) / h2;
    }
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / h2;
    RealField {
        grid: field.grid,
        values: out,
    }
}

/// Second derivative: three-point central stencil inside, four-point
/// second-order one-sided stencil at the boundaries. Exact on cubics.
pub fn d2(field: &RealField) -> RealField {
    let f = &field.values;
    let n = f.len();
    let dx = field.grid.dx();
    let h = dx * dx;
    let mut out = vec![0.0; n];
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h;
    }
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h;
    RealField {
        grid: field.grid,
        values: out,
    }
}

/// sqrt(∫ f² dx) with the trapezoid rule.
pub fn l2_norm(field: &RealField) -> f64 {
    trapezoid(&field.grid, field.values.iter().map(|v| v * v)).sqrt()
}
