//! Closed-form solutions of the free Hamilton–Jacobi equation
//! (S')²/2m + Ṡ = 0 and the residual that certifies them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, RealField, Units};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    /// S = k x − k² t / 2m.
    Separable { k: f64 },
    /// S = m (x − x0)² / 2 (t − t0), defined for t > t0 only.
    NonSeparable { x0: f64, t0: f64 },
}

impl ActionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ActionKind::Separable { .. } => "separable",
            ActionKind::NonSeparable { .. } => "non_separable",
        }
    }

    pub fn same_variant(&self, other: &ActionKind) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeAction {
    pub kind: ActionKind,
    pub units: Units,
}

impl FreeAction {
    pub fn separable(k: f64, units: Units) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::Precondition("momentum k must be finite"));
        }
        Ok(Self {
            kind: ActionKind::Separable { k },
            units,
        })
    }

    pub fn non_separable(x0: f64, t0: f64, units: Units) -> Result<Self> {
        if !(x0.is_finite() && t0.is_finite()) {
            return Err(Error::Precondition("x0 and t0 must be finite"));
        }
        Ok(Self {
            kind: ActionKind::NonSeparable { x0, t0 },
            units,
        })
    }

    /// Elapsed time t − t0, rejecting t ≤ t0 for the non-separable action.
    pub fn elapsed(&self, t: f64) -> Result<f64> {
        match self.kind {
            ActionKind::Separable { .. } => Ok(t),
            ActionKind::NonSeparable { t0, .. } => {
                if t > t0 {
                    Ok(t - t0)
                } else {
                    Err(Error::TimeDomain { t, t0 })
                }
            }
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let m = self.units.mass;
        match self.kind {
            ActionKind::Separable { k } => Ok(k * x - k * k * t / (2.0 * m)),
            ActionKind::NonSeparable { x0, .. } => {
                let tau = self.elapsed(t)?;
                let d = x - x0;
                Ok(m * d * d / (2.0 * tau))
            }
        }
    }

    /// ∂S/∂x, analytic.
    pub fn momentum(&self, x: f64, t: f64) -> Result<f64> {
        match self.kind {
            ActionKind::Separable { k } => Ok(k),
            ActionKind::NonSeparable { x0, .. } => {
                let tau = self.elapsed(t)?;
                Ok(self.units.mass * (x - x0) / tau)
            }
        }
    }

    /// ∂²S/∂x², analytic.
    pub fn curvature(&self, t: f64) -> Result<f64> {
        match self.kind {
            ActionKind::Separable { .. } => Ok(0.0),
            ActionKind::NonSeparable { .. } => Ok(self.units.mass / self.elapsed(t)?),
        }
    }

    /// ∂S/∂t, analytic.
    pub fn time_derivative(&self, x: f64, t: f64) -> Result<f64> {
        let m = self.units.mass;
        match self.kind {
            ActionKind::Separable { k } => Ok(-k * k / (2.0 * m)),
            ActionKind::NonSeparable { x0, .. } => {
                let tau = self.elapsed(t)?;
                let d = x - x0;
                Ok(-m * d * d / (2.0 * tau * tau))
            }
        }
    }

    pub fn phase_field(&self, grid: &Grid1D, t: f64) -> Result<RealField> {
        RealField::try_from_fn(*grid, |x| self.eval(x, t))
    }
}

pub fn eval_action(a: &FreeAction, x: f64, t: f64) -> Result<f64> {
    a.eval(x, t)
}

/// p = ∂S/∂x on the grid, evaluated analytically.
pub fn momentum_field(a: &FreeAction, grid: &Grid1D, t: f64) -> Result<RealField> {
    RealField::try_from_fn(*grid, |x| a.momentum(x, t))
}

/// (S')²/2m + Ṡ on the grid with both derivatives analytic.
pub fn hj_residual(a: &FreeAction, grid: &Grid1D, t: f64) -> Result<RealField> {
    a.elapsed(t)?;
    hj_residual_from(grid, &a.units, |x| a.momentum(x, t), |x| a.time_derivative(x, t))
}

/// Free Hamilton–Jacobi residual for arbitrary derivative callbacks. Used by
/// [`hj_residual`] and by tests that feed deliberately wrong actions.
pub fn hj_residual_from<P, T>(grid: &Grid1D, units: &Units, mut s_x: P, mut s_t: T) -> Result<RealField>
where
    P: FnMut(f64) -> Result<f64>,
    T: FnMut(f64) -> Result<f64>,
{
    let two_m = 2.0 * units.mass;
    RealField::try_from_fn(*grid, |x| {
        let p = s_x(x)?;
        Ok(p * p / two_m + s_t(x)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Units {
        Units::natural()
    }

    #[test]
    fn eval_examples() {
        let sep = FreeAction::separable(1.0, nat()).unwrap();
        assert_eq!(sep.eval(2.0, 0.0).unwrap(), 2.0);
        assert_eq!(sep.eval(0.0, 2.0).unwrap(), -1.0);

        let ns = FreeAction::non_separable(0.0, 0.0, nat()).unwrap();
        assert_eq!(ns.eval(2.0, 1.0).unwrap(), 2.0);

        let ns = FreeAction::non_separable(0.0, 1.0, nat()).unwrap();
        assert_eq!(ns.eval(0.0, 1.0), Err(Error::TimeDomain { t: 1.0, t0: 1.0 }));
        assert!(ns.eval(0.0, 0.5).is_err());
    }

    #[test]
    fn momentum_examples() {
        let g = Grid1D::new(-3.0, 5.0, 17).unwrap();
        let sep = FreeAction::separable(3.0, nat()).unwrap();
        for t in [0.0, 1.0, -4.0] {
            assert!(momentum_field(&sep, &g, t).unwrap().values().iter().all(|&p| p == 3.0));
        }
        let ns = FreeAction::non_separable(0.0, 0.0, nat()).unwrap();
        assert_eq!(ns.momentum(4.0, 2.0).unwrap(), 2.0);
        let ns = FreeAction::non_separable(1.0, 0.0, Units::new(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(ns.momentum(1.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn hj_examples() {
        let g = Grid1D::new(-10.0, 10.0, 401).unwrap();
        let sep = FreeAction::separable(1.7, nat()).unwrap();
        assert!(hj_residual(&sep, &g, 0.3).unwrap().max_abs() <= 1e-12);
        let ns = FreeAction::non_separable(0.5, 0.0, nat()).unwrap();
        assert!(hj_residual(&ns, &g, 2.0).unwrap().max_abs() <= 1e-12);
        assert!(hj_residual(&ns, &g, 0.0).is_err());
    }

    #[test]
    fn hj_negative_control() {
        // S = x² at fixed t: (2x)²/2m + 0, which is 2 at x = 1.
        let g = Grid1D::new(0.0, 2.0, 21).unwrap();
        let r = hj_residual_from(&g, &nat(), |x| Ok(2.0 * x), |_| Ok(0.0)).unwrap();
        assert!((r.values()[10] - 2.0).abs() < 1e-14);
    }
}
