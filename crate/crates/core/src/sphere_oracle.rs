//! End-to-end oracle for the circle: explicit functions on S^1, their
//! extension integral computed by raw 2-D quadrature, and the Rayleigh
//! quotient maximised by brute force — no closed forms anywhere, so this
//! route is independent of the coefficient formulas it confirms.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coefficients::SphereDim;
use crate::error::{Error, Result};

/// A finitely supported Fourier series on the circle, under arc-length
/// measure: squared norm 2 pi sum |c_m|^2. The degree-k harmonic space is
/// spanned by the modes +-k.
#[derive(Debug, Clone)]
pub struct CircleFunction {
    coefficients: BTreeMap<i32, Complex64>,
}

impl CircleFunction {
    pub fn from_modes(modes: &[(i32, Complex64)]) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        for &(m, c) in modes {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Domain(format!("non-finite amplitude for mode {m}")));
            }
            if c != Complex64::ZERO {
                *coefficients.entry(m).or_insert(Complex64::ZERO) += c;
            }
        }
        if coefficients.is_empty() {
            return Err(Error::Domain("function has no nonzero mode".into()));
        }
        Ok(CircleFunction { coefficients })
    }

    pub fn pure_mode(m: i32) -> Self {
        CircleFunction {
            coefficients: BTreeMap::from([(m, Complex64::ONE)]),
        }
    }

    pub fn coefficients(&self) -> &BTreeMap<i32, Complex64> {
        &self.coefficients
    }

    pub fn norm_sq(&self) -> f64 {
        TAU * self.coefficients.values().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn max_mode(&self) -> u32 {
        self.coefficients
            .keys()
            .map(|m| m.unsigned_abs())
            .max()
            .expect("nonempty by construction")
    }

    fn eval(&self, theta: f64) -> Complex64 {
        self.coefficients
            .iter()
            .map(|(&m, &c)| c * Complex64::from_polar(1.0, m as f64 * theta))
            .sum()
    }
}

/// The extension of f at a point of the plane:
/// integral over the circle of f(omega) e^{-i omega . xi}, by the trapezoid
/// rule, which is spectrally accurate for smooth periodic integrands. The
/// node count grows with both the top mode and |xi|, the two sources of
/// oscillation.
pub fn extension_at(f: &CircleFunction, xi: [f64; 2]) -> Complex64 {
    let r = xi[0].hypot(xi[1]);
    let n = 64 + (8.0 * (f.max_mode() as f64 + r)).ceil() as usize;
    let mut sum = Complex64::ZERO;
    for j in 0..n {
        let theta = TAU * j as f64 / n as f64;
        let phase = -(xi[0] * theta.cos() + xi[1] * theta.sin());
        sum += f.eval(theta) * Complex64::from_polar(1.0, phase);
    }
    sum * (TAU / n as f64)
}

/// Angular nodes for the energy integral. |extension|^2 at fixed radius is
/// a trigonometric polynomial of degree 2 * max_mode in the angle, so the
/// trapezoid rule with more nodes than that is exact; the margin is slack.
fn angular_nodes(max_mode: u32) -> usize {
    2 * max_mode as usize + 16
}

const RADIAL_PANEL_WIDTH: f64 = 0.5;

/// (1/rho) times the integral of |extension|^2 over the ball of radius rho,
/// normalized by (2 pi)^2: polar quadrature, Gauss-Legendre panels in the
/// radius times exact trapezoid in the angle, shells evaluated in parallel.
pub fn ball_energy(f: &CircleFunction, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("rho must be finite and positive, got {rho}")));
    }
    let n_ang = angular_nodes(f.max_mode());
    let angular_avg = |r: f64| -> f64 {
        let mut sum = 0.0;
        for j in 0..n_ang {
            let phi = TAU * j as f64 / n_ang as f64;
            sum += extension_at(f, [r * phi.cos(), r * phi.sin()]).norm_sqr();
        }
        sum * (TAU / n_ang as f64)
    };
    let n_panels = (rho / RADIAL_PANEL_WIDTH).ceil() as usize;
    let radial: f64 = (0..n_panels)
        .into_par_iter()
        .map(|i| {
            let lo = rho * i as f64 / n_panels as f64;
            let hi = rho * (i + 1) as f64 / n_panels as f64;
            crate::quadrature::gl15(&|r: f64| r * angular_avg(r), lo, hi)
        })
        .sum();
    Ok(radial / (rho * TAU * TAU))
}

/// Tie tolerance for the brute-force Rayleigh argmax; the quadrature is
/// only pushed to ~1e-8 relative, so ties are declared generously.
pub const RAYLEIGH_TIE_TOL: f64 = 1e-6;

/// Argmax over pure modes k <= max_degree of energy / squared norm, with no
/// recourse to any closed form.
pub fn brute_rayleigh_argmax(rho: f64, max_degree: u32) -> Result<BTreeSet<u32>> {
    if max_degree > 12 {
        return Err(Error::Domain(format!(
            "brute-force degree cap is 12, got {max_degree}"
        )));
    }
    let quotients: Vec<f64> = (0..=max_degree)
        .map(|k| {
            let f = CircleFunction::pure_mode(k as i32);
            Ok(ball_energy(&f, rho)? / f.norm_sq())
        })
        .collect::<Result<_>>()?;
    let best = quotients.iter().cloned().fold(f64::MIN, f64::max);
    Ok(quotients
        .iter()
        .enumerate()
        .filter(|(_, &q)| best - q <= RAYLEIGH_TIE_TOL)
        .map(|(k, _)| k as u32)
        .collect())
}

/// The circle as a [`SphereDim`], for pairing oracle output with the
/// closed-form route in tests and acceptance checks.
pub fn circle() -> SphereDim {
    SphereDim::new(2).expect("d = 2 is valid")
}
