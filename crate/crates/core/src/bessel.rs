//! Bessel functions of the first kind for integer and half-integer orders,
//! together with zero tables and the structural facts (simplicity,
//! interlacing, Bourget separation) the rest of the crate relies on.
//!
//! Only real arguments `x > 0` and orders `alpha = n/2 >= 0` are supported.
//! Evaluation uses the power series where it is well conditioned and a
//! normalized backward (Miller) recurrence everywhere else; the leading
//! large-argument asymptotic is exposed for cross-checks only.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Nonnegative integer or half-integer order, stored exactly as `2*alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Order {
    twice: u32,
}

impl Order {
    pub fn from_twice(twice: u32) -> Self {
        Order { twice }
    }

    pub fn integer(n: u32) -> Self {
        Order { twice: 2 * n }
    }

    pub fn alpha(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Order of the lowest member of the same parity class (0 or 1/2).
    pub fn parity_base(self) -> Order {
        Order { twice: self.twice % 2 }
    }

    pub fn succ(self) -> Order {
        Order { twice: self.twice + 2 }
    }

    pub fn pred(self) -> Option<Order> {
        self.twice.checked_sub(2).map(|twice| Order { twice })
    }

    pub fn offset(self, k: u32) -> Order {
        Order { twice: self.twice + 2 * k }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Evaluation regime actually used for a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Series,
    RecurrenceDown,
    Asymptotic,
}

/// A Bessel value with an honest absolute error estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BesselValue {
    pub value: f64,
    pub abs_err_estimate: f64,
    pub method: Method,
}

/// Zero-band guard factor: |J| below `guard * abs_err_estimate` counts as
/// "at a zero" for classification purposes.
pub const ZERO_BAND_GUARD: f64 = 64.0;

const SERIES_X_MAX: f64 = 9.0;
const SERIES_TERM_CUTOFF: f64 = 1e-18;
const SERIES_MAX_TERMS: usize = 400;
const MILLER_ERR_FLOOR: f64 = 5e-15;
const RESCALE_THRESHOLD: f64 = 1e250;

/// ln Gamma(twice/2) by exact recursion from Gamma(1/2) and Gamma(1).
fn ln_gamma_half(twice: u32) -> f64 {
    debug_assert!(twice >= 1);
    let (mut acc, mut t) = if twice % 2 == 0 {
        (0.0f64, 2u32) // Gamma(1) = 1
    } else {
        (0.5 * std::f64::consts::PI.ln(), 1u32) // Gamma(1/2) = sqrt(pi)
    };
    while t < twice {
        acc += (t as f64 / 2.0).ln();
        t += 2;
    }
    acc
}

/// ln Gamma(alpha + 1) for an order alpha.
pub(crate) fn ln_gamma_alpha_plus_one(order: Order) -> f64 {
    ln_gamma_half(order.twice() + 2)
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("argument must be finite and positive, got {x}")));
    }
    Ok(())
}

/// Ascending power series with compensated summation.
fn series_j(order: Order, x: f64) -> Result<BesselValue> {
    let alpha = order.alpha();
    let log_t0 = alpha * (x / 2.0).ln() - ln_gamma_alpha_plus_one(order);
    if log_t0 > 700.0 || log_t0 < -740.0 {
        return Err(Error::Range { order, x });
    }
    let t0 = log_t0.exp();
    let q = (x / 2.0) * (x / 2.0);
    let mut term = t0;
    let mut sum = t0;
    let mut comp = 0.0f64; // Kahan compensation
    let mut t_max = t0.abs();
    let mut n = 0usize;
    loop {
        n += 1;
        term *= -q / (n as f64 * (alpha + n as f64));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        t_max = t_max.max(term.abs());
        if n >= 8 && term.abs() < SERIES_TERM_CUTOFF * sum.abs().max(t0 * 1e-30) {
            break;
        }
        if n >= SERIES_MAX_TERMS {
            return Err(Error::Internal(format!(
                "series for J_{order}({x}) did not converge in {SERIES_MAX_TERMS} terms"
            )));
        }
    }
    let abs_err = f64::EPSILON * (4.0 * t_max + n as f64 * sum.abs());
    Ok(BesselValue {
        value: sum,
        abs_err_estimate: abs_err.max(1e-300),
        method: Method::Series,
    })
}

/// Closed forms for the two lowest half-integer orders.
fn closed_half_pair(x: f64) -> (f64, f64) {
    let c = (2.0 / (std::f64::consts::PI * x)).sqrt();
    let j_half = c * x.sin();
    let j_three_half = c * (x.sin() / x - x.cos());
    (j_half, j_three_half)
}

/// One normalized backward-recurrence pass, returning J at every order of
/// the parity class from `base` up to `top` inclusive.
///
/// Integer parity is normalized by `J_0 + 2 J_2 + 2 J_4 + ... = 1`;
/// half-integer parity by the elementary closed forms at orders 1/2, 3/2.
fn miller_pass(top: Order, x: f64) -> Result<Vec<f64>> {
    let base = top.parity_base();
    let count = ((top.twice() - base.twice()) / 2 + 1) as usize;

    let margin = 26.0 + 10.0 * x.cbrt();
    let start_alpha = top.alpha().max(x) + margin;
    let extra_steps = (start_alpha - top.alpha()).ceil() as u32;
    let start_twice = top.twice() + 2 * extra_steps;

    let mut out = vec![0.0f64; count];
    let mut norm = 0.0f64; // integer-parity normalization sum
    let mut base_val = 0.0f64; // scaled J at base (half parity)
    let mut base1_val = 0.0f64; // scaled J at base + 1

    let mut jp1 = 0.0f64; // J_{beta+1}, scaled
    let mut jc = 1e-30f64; // J_beta, scaled
    let total_steps = (start_twice - base.twice()) / 2;

    for i in 0..=total_steps {
        let t = start_twice - 2 * i;
        let beta = t as f64 / 2.0;

        if t <= top.twice() {
            out[((t - base.twice()) / 2) as usize] = jc;
        }
        if base.twice() == 0 {
            if t == 0 {
                norm += jc;
            } else if t % 4 == 0 {
                norm += 2.0 * jc;
            }
        } else {
            if t == 1 {
                base_val = jc;
            } else if t == 3 {
                base1_val = jc;
            }
        }

        if i < total_steps {
            let jm1 = (2.0 * beta / x) * jc - jp1;
            jp1 = jc;
            jc = jm1;
            if jc.abs() > RESCALE_THRESHOLD {
                let s = 1.0 / RESCALE_THRESHOLD;
                jc *= s;
                jp1 *= s;
                norm *= s;
                base_val *= s;
                base1_val *= s;
                for v in out.iter_mut() {
                    *v *= s;
                }
            }
        }
    }

    let factor = if base.twice() == 0 {
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Internal(format!(
                "degenerate normalization sum in backward recurrence at x = {x}"
            )));
        }
        1.0 / norm
    } else {
        let (jh, jh3) = closed_half_pair(x);
        if jh.abs() >= jh3.abs() {
            if base_val == 0.0 {
                return Err(Error::Internal(format!(
                    "degenerate half-integer normalization at x = {x}"
                )));
            }
            jh / base_val
        } else {
            if base1_val == 0.0 {
                return Err(Error::Internal(format!(
                    "degenerate half-integer normalization at x = {x}"
                )));
            }
            jh3 / base1_val
        }
    };
    for v in out.iter_mut() {
        *v *= factor;
    }
    Ok(out)
}

fn series_is_safe(order: Order, x: f64) -> bool {
    let alpha = order.alpha();
    // Either the argument is small enough that cancellation stays below the
    // target, or the terms decrease from the start (no cancellation at all).
    x <= SERIES_X_MAX || (x / 2.0) * (x / 2.0) <= 0.9 * (alpha + 1.0)
}

/// Evaluate J_alpha(x) for x > 0.
pub fn eval_j(order: Order, x: f64) -> Result<BesselValue> {
    check_argument(x)?;
    if series_is_safe(order, x) {
        return series_j(order, x);
    }
    let vals = miller_pass(order, x)?;
    let value = *vals.last().expect("miller pass returns at least one value");
    Ok(BesselValue {
        value,
        abs_err_estimate: MILLER_ERR_FLOOR * value.abs().max(1.0),
        method: Method::RecurrenceDown,
    })
}

/// J at the `count` consecutive orders `start, start+1, ..., start+count-1`,
/// sharing a single backward pass where possible.
pub fn j_sequence(start: Order, count: usize, x: f64) -> Result<Vec<f64>> {
    check_argument(x)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let top = start.offset(count as u32 - 1);
    if series_is_safe(top, x) && series_is_safe(start, x) {
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            out.push(series_j(start.offset(k as u32), x)?.value);
        }
        return Ok(out);
    }
    let all = miller_pass(top, x)?;
    let skip = ((start.twice() - start.parity_base().twice()) / 2) as usize;
    Ok(all[skip..].to_vec())
}

/// J'_alpha(x) via the recurrence J'_a = (a/x) J_a - J_{a+1}.
pub fn eval_j_derivative(order: Order, x: f64) -> Result<BesselValue> {
    check_argument(x)?;
    if order.twice() == 0 {
        let j1 = eval_j(Order::integer(1), x)?;
        return Ok(BesselValue {
            value: -j1.value,
            abs_err_estimate: j1.abs_err_estimate,
            method: j1.method,
        });
    }
    let seq = j_sequence(order, 2, x)?;
    let alpha = order.alpha();
    let value = (alpha / x) * seq[0] - seq[1];
    let err = MILLER_ERR_FLOOR * (1.0 + alpha / x) * (1.0 + value.abs());
    Ok(BesselValue {
        value,
        abs_err_estimate: err,
        method: if series_is_safe(order.succ(), x) {
            Method::Series
        } else {
            Method::RecurrenceDown
        },
    })
}

/// Three-term recurrence step: J_{alpha+1} = (2 alpha / x) J_alpha - J_{alpha-1}.
///
/// Only stable upward when x exceeds the order.
pub fn recurrence_next(order: Order, x: f64, j_prev: f64, j_curr: f64) -> f64 {
    (2.0 * order.alpha() / x) * j_curr - j_prev
}

/// Leading term of the large-argument asymptotic; test cross-checks only.
pub fn eval_j_asymptotic(order: Order, x: f64) -> BesselValue {
    let phase = x - (2.0 * order.alpha() + 1.0) * std::f64::consts::FRAC_PI_4;
    let value = (2.0 / (std::f64::consts::PI * x)).sqrt() * phase.cos();
    BesselValue {
        value,
        abs_err_estimate: x.powf(-1.5),
        method: Method::Asymptotic,
    }
}

/// J at order `twice/2` where `twice` may be negative, extended through the
/// recurrence J_{b-1} = (2b/x) J_b - J_{b+1}. Used for the k = 0 coefficient
/// and the closed-form derivative windows.
pub(crate) fn eval_j_signed_twice(twice: i32, x: f64) -> Result<f64> {
    if twice >= 0 {
        return Ok(eval_j(Order::from_twice(twice as u32), x)?.value);
    }
    let b = (twice + 2) as f64 / 2.0; // order one above the requested one
    let jb = eval_j_signed_twice(twice + 2, x)?;
    let jb1 = eval_j_signed_twice(twice + 4, x)?;
    Ok((2.0 * b / x) * jb - jb1)
}

/// Ordered positive zeros of J_alpha on (0, x_max].
#[derive(Debug, Clone, Serialize)]
pub struct ZeroTable {
    order: Order,
    zeros: Vec<f64>,
    tol: f64,
}

impl ZeroTable {
    pub fn order(&self) -> Order {
        self.order
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// 1-based lookup, matching the classical j_{alpha,k} numbering.
    pub fn zero(&self, k: usize) -> Option<f64> {
        if k == 0 {
            None
        } else {
            self.zeros.get(k - 1).copied()
        }
    }

    /// Checks the table invariants: strict increase and small residuals.
    pub fn validate(&self) -> Result<()> {
        for w in self.zeros.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Internal(format!(
                    "zero table for J_{} not strictly increasing at {}",
                    self.order, w[0]
                )));
            }
        }
        for &z in &self.zeros {
            let j = eval_j(self.order, z)?.value;
            let jp = eval_j_derivative(self.order, z)?.value;
            if j.abs() > self.tol * jp.abs().max(1.0) {
                return Err(Error::Internal(format!(
                    "zero {z} of J_{} has residual {j}",
                    self.order
                )));
            }
        }
        Ok(())
    }

    /// True when the zeros of `self` and of the next order strictly alternate.
    pub fn interlaces(&self, next: &ZeroTable) -> bool {
        let a = &self.zeros;
        let b = &next.zeros;
        let n = a.len().min(b.len());
        // j_{alpha,k} < j_{alpha+1,k} < j_{alpha,k+1}
        for k in 0..n {
            if b[k] <= a[k] {
                return false;
            }
            if k + 1 < a.len() && a[k + 1] <= b[k] {
                return false;
            }
        }
        true
    }
}

/// McMahon's large-zero estimate for j_{alpha,k}.
fn mcmahon_guess(order: Order, k: usize) -> f64 {
    let alpha = order.alpha();
    let beta = (k as f64 + alpha / 2.0 - 0.25) * std::f64::consts::PI;
    let mu = 4.0 * alpha * alpha;
    beta - (mu - 1.0) / (8.0 * beta)
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta).powi(3))
}

const ZERO_RESIDUAL_TOL: f64 = 1e-13;
const ZERO_GRID_STEP: f64 = 0.7; // below pi/4 times the minimal zero spacing scale

fn refine_zero(order: Order, mut lo: f64, mut hi: f64, guess: f64) -> Result<f64> {
    let mut f_lo = eval_j(order, lo)?.value;
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..100 {
        let f = eval_j(order, x)?.value;
        let fp = eval_j_derivative(order, x)?.value;
        if f.abs() <= ZERO_RESIDUAL_TOL * fp.abs().max(1.0) {
            return Ok(x);
        }
        // Shrink the bracket around the sign change.
        if (f > 0.0) == (f_lo > 0.0) {
            lo = x;
            f_lo = f;
        } else {
            hi = x;
        }
        let newton = x - f / fp;
        x = if fp != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 * hi {
            return Ok(x);
        }
    }
    Err(Error::ZeroRefinement { order, lo, hi })
}

/// All zeros of J_alpha in (0, x_max], refined by safeguarded Newton.
pub fn zeros_up_to(order: Order, x_max: f64) -> Result<ZeroTable> {
    check_argument(x_max)?;
    let mut zeros = Vec::new();
    let mut x_prev = ZERO_GRID_STEP.min(x_max / 2.0);
    let mut f_prev = eval_j(order, x_prev)?.value;
    let mut x = x_prev;
    while x < x_max {
        x = (x + ZERO_GRID_STEP).min(x_max);
        let f = eval_j(order, x)?.value;
        if f == 0.0 || (f > 0.0) != (f_prev > 0.0) {
            let guess = mcmahon_guess(order, zeros.len() + 1);
            let z = refine_zero(order, x_prev, x, guess)?;
            if z <= x_max {
                zeros.push(z);
            }
        }
        x_prev = x;
        f_prev = f;
    }
    Ok(ZeroTable {
        order,
        zeros,
        tol: ZERO_RESIDUAL_TOL,
    })
}

/// Result of a Bourget-separation scan between J_alpha and J_{alpha+m}.
#[derive(Debug, Clone, Serialize)]
pub struct BourgetReport {
    pub order: Order,
    pub m: u32,
    pub x_max: f64,
    pub min_separation: f64,
    pub pass: bool,
}

/// Checks that zeros of J_alpha and J_{alpha+m} stay `sep_tol` apart on
/// (0, x_max]. A failure would indicate an evaluation bug, not mathematics.
pub fn check_bourget(order: Order, m: u32, x_max: f64, sep_tol: f64) -> Result<BourgetReport> {
    if !(1..=4).contains(&m) {
        return Err(Error::Domain(format!("Bourget check supports m in 1..=4, got {m}")));
    }
    if sep_tol <= 0.0 {
        return Err(Error::Domain("sep_tol must be positive".into()));
    }
    let a = zeros_up_to(order, x_max)?;
    let b = zeros_up_to(order.offset(m), x_max)?;
    let mut min_sep = f64::INFINITY;
    for &za in a.zeros() {
        for &zb in b.zeros() {
            min_sep = min_sep.min((za - zb).abs());
        }
    }
    Ok(BourgetReport {
        order,
        m,
        x_max,
        min_separation: min_sep,
        pass: min_sep > sep_tol,
    })
}

/// Sign classification with a zero band around evaluation noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignClass {
    Positive,
    Negative,
    Zero,
}

/// Sign of the product of J over all orders in `pairs`, classified ZERO as
/// soon as any factor sits inside its zero band.
pub fn sign_product(pairs: &[(Order, Order)], x: f64) -> Result<SignClass> {
    check_argument(x)?;
    let mut negative = false;
    for &(a, b) in pairs {
        for order in [a, b] {
            let v = eval_j(order, x)?;
            if v.value.abs() <= ZERO_BAND_GUARD * v.abs_err_estimate {
                return Ok(SignClass::Zero);
            }
            if v.value < 0.0 {
                negative = !negative;
            }
        }
    }
    Ok(if negative {
        SignClass::Negative
    } else {
        SignClass::Positive
    })
}

/// True when |J_alpha(x)| is inside the zero band at x.
pub fn in_zero_band(order: Order, x: f64) -> Result<bool> {
    let v = eval_j(order, x)?;
    Ok(v.value.abs() <= ZERO_BAND_GUARD * v.abs_err_estimate)
}
