//! Central finite differences with optional Richardson extrapolation.
//!
//! Every module that lacks closed-form partials differentiates through
//! these helpers, so step handling and extrapolation are uniform.

use std::ops::{Add, Mul, Sub};

use crate::error::{GeomError, Result};

/// Values that can be combined linearly by a difference stencil.
pub trait FdValue: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> FdValue for T where T: Clone + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Stencil settings shared by every finite-difference evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub step: f64,
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: crate::tolerances::H_FD,
            richardson: true,
        }
    }
}

impl FdConfig {
    pub fn new(step: f64, richardson: bool) -> Self {
        Self { step, richardson }
    }

    /// Step scaled by the extent of a domain interval.
    pub fn scaled(step: f64, extent: f64, richardson: bool) -> Self {
        Self {
            step: step * extent.abs().max(1.0),
            richardson,
        }
    }
}

fn central1<T: FdValue>(f: &impl Fn(f64) -> T, x: f64, h: f64) -> T {
    (f(x + h) - f(x - h)) * (0.5 / h)
}

fn central2<T: FdValue>(f: &impl Fn(f64) -> T, x: f64, h: f64) -> T {
    let two_mid = f(x) * 2.0;
    (f(x + h) + f(x - h) - two_mid) * (1.0 / (h * h))
}

fn extrapolate<T: FdValue>(coarse: T, fine: T) -> T {
    // both stencils are O(h^2); combine to cancel the leading term
    (fine * 4.0 - coarse) * (1.0 / 3.0)
}

/// First or second derivative of a univariate function.
///
/// `domain`, when given, must contain the whole stencil.
pub fn derivative<T: FdValue>(
    f: impl Fn(f64) -> T,
    x: f64,
    order: u8,
    cfg: FdConfig,
    domain: Option<(f64, f64)>,
) -> Result<T> {
    let h = cfg.step;
    if let Some((lo, hi)) = domain {
        if x - h < lo || x + h > hi {
            return Err(GeomError::Domain { value: x, lo: lo + h, hi: hi - h });
        }
    }
    let stencil = |h: f64| match order {
        1 => Ok(central1(&f, x, h)),
        2 => Ok(central2(&f, x, h)),
        _ => Err(GeomError::Precondition(format!("unsupported derivative order {order}"))),
    };
    let coarse = stencil(h)?;
    if cfg.richardson {
        Ok(extrapolate(coarse, stencil(0.5 * h)?))
    } else {
        Ok(coarse)
    }
}

fn shifted(x: &[f64], i: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += d;
    y
}

/// Partial derivative `∂f/∂x_i`.
pub fn partial<T: FdValue>(f: &impl Fn(&[f64]) -> T, x: &[f64], i: usize, cfg: FdConfig) -> T {
    let g = |t: f64| f(&shifted(x, i, t));
    let stencil = |h: f64| central1(&g, 0.0, h);
    if cfg.richardson {
        extrapolate(stencil(cfg.step), stencil(0.5 * cfg.step))
    } else {
        stencil(cfg.step)
    }
}

/// Second partial `∂²f/∂x_i∂x_j`.
pub fn second_partial<T: FdValue>(
    f: &impl Fn(&[f64]) -> T,
    x: &[f64],
    i: usize,
    j: usize,
    cfg: FdConfig,
) -> T {
    let stencil = |h: f64| -> T {
        if i == j {
            let g = |t: f64| f(&shifted(x, i, t));
            central2(&g, 0.0, h)
        } else {
            let at = |a: f64, b: f64| {
                let mut y = x.to_vec();
                y[i] += a;
                y[j] += b;
                f(&y)
            };
            (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) * (0.25 / (h * h))
        }
    };
    if cfg.richardson {
        extrapolate(stencil(cfg.step), stencil(0.5 * cfg.step))
    } else {
        stencil(cfg.step)
    }
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn loglog_slope(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(h, e)| *h > 0.0 && *e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_first_derivative_with_richardson() {
        let d = derivative(|x: f64| x * x * x, 2.0, 1, FdConfig::new(1e-3, true), None).unwrap();
        assert!((d - 12.0).abs() < 1e-6);
    }

    #[test]
    fn second_derivative_of_sine_at_origin() {
        let d = derivative(f64::sin, 0.0, 2, FdConfig::new(1e-3, false), None).unwrap();
        assert!(d.abs() < 1e-6);
    }

    #[test]
    fn stencil_outside_domain_is_rejected() {
        let r = derivative(f64::exp, 0.0, 1, FdConfig::new(1e-3, false), Some((0.0, 1.0)));
        assert!(matches!(r, Err(GeomError::Domain { .. })));
    }

    #[test]
    fn mixed_partial_of_product() {
        let f = |x: &[f64]| x[0] * x[0] * x[1];
        let d = second_partial(&f, &[1.5, -0.5], 0, 1, FdConfig::default());
        assert!((d - 3.0).abs() < 1e-7);
    }

    fn order_fit(richardson: bool) -> f64 {
        let hs = [1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3, 3.125e-3, 1e-3];
        // samples at the round-off floor carry no order information
        let samples: Vec<(f64, f64)> = hs
            .iter()
            .map(|&h| {
                let d = derivative(f64::exp, 1.0, 1, FdConfig::new(h, richardson), None).unwrap();
                (h, (d - 1f64.exp()).abs())
            })
            .filter(|(h, e)| *e > 1e3 * f64::EPSILON * 1f64.exp() / h)
            .collect();
        assert!(samples.len() >= 3);
        loglog_slope(&samples)
    }

    #[test]
    fn convergence_orders() {
        let plain = order_fit(false);
        let rich = order_fit(true);
        assert!((plain - 2.0).abs() < 0.1, "plain slope {plain}");
        assert!(rich >= 3.5, "richardson slope {rich}");
    }
}
