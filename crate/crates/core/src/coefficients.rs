//! The coefficients Lambda_{k,d}(rho): extension energy of a degree-k
//! spherical harmonic, computed by Lommel's closed form, by an equivalent
//! rearranged form, and by an independent adaptive quadrature oracle.

use serde::Serialize;

use crate::bessel::{self, Order};
use crate::error::{Error, Result};
use crate::quadrature;

/// Sphere dimension d >= 2 together with the derived order nu = d/2 - 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SphereDim {
    d: u32,
    nu: Order,
}

impl SphereDim {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {d}")));
        }
        // nu = d/2 - 1, exactly in half-integer arithmetic: 2*nu = d - 2
        Ok(SphereDim {
            d,
            nu: Order::from_twice(d - 2),
        })
    }

    pub fn d(self) -> u32 {
        self.d
    }

    pub fn nu(self) -> Order {
        self.nu
    }

    /// Order nu + k.
    pub fn order(self, k: u32) -> Order {
        self.nu.offset(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LambdaMethod {
    ClosedForm,
    AlternativeForm,
    Quadrature,
}

/// A Lambda_{k,d}(rho) value with provenance and error metadata.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LambdaEval {
    pub k: u32,
    pub d: u32,
    pub rho: f64,
    pub value: f64,
    pub method: LambdaMethod,
    pub abs_err_estimate: f64,
}

impl LambdaEval {
    fn checked(self) -> Result<Self> {
        if !(self.value >= -1e-9 && self.value <= self.rho / 2.0 + 1.0 + 1e-9) {
            return Err(Error::Internal(format!(
                "Lambda_{{{},{}}}({}) = {} outside its sanity range",
                self.k, self.d, self.rho, self.value
            )));
        }
        Ok(self)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::Domain(format!("rho must be finite and positive, got {rho}")));
    }
    Ok(())
}

/// J at orders m-1, m, m+1 where m = nu + k; the k = 0 case may reach one
/// step below order zero and is extended through the recurrence.
fn j_triple(dim: SphereDim, k: u32, rho: f64) -> Result<[f64; 3]> {
    let m = dim.order(k);
    if let Some(prev) = m.pred() {
        let seq = bessel::j_sequence(prev, 3, rho)?;
        Ok([seq[0], seq[1], seq[2]])
    } else {
        let seq = bessel::j_sequence(m, 2, rho)?;
        let below = bessel::eval_j_signed_twice(m.twice() as i32 - 2, rho)?;
        Ok([below, seq[0], seq[1]])
    }
}

/// Lommel closed form: (rho/2) J_m^2 - (rho/2) J_{m-1} J_{m+1}, m = nu + k.
pub fn lambda_closed(k: u32, dim: SphereDim, rho: f64) -> Result<LambdaEval> {
    check_rho(rho)?;
    let [jm1, jm, jp1] = j_triple(dim, k, rho)?;
    let value = 0.5 * rho * (jm * jm - jm1 * jp1);
    let scale = jm.abs().max(jm1.abs()).max(jp1.abs());
    LambdaEval {
        k,
        d: dim.d(),
        rho,
        value,
        method: LambdaMethod::ClosedForm,
        abs_err_estimate: 2e-14 * (1.0 + rho) * scale * scale.max(1e-30),
    }
    .checked()
}

/// Rearranged form: (rho/2)(J_m^2 - (2m/rho) J_m J_{m+1} + J_{m+1}^2).
pub fn lambda_alternative(k: u32, dim: SphereDim, rho: f64) -> Result<LambdaEval> {
    check_rho(rho)?;
    let m = dim.order(k);
    let seq = bessel::j_sequence(m, 2, rho)?;
    let (jm, jp1) = (seq[0], seq[1]);
    let value = 0.5 * rho * (jm * jm - (2.0 * m.alpha() / rho) * jm * jp1 + jp1 * jp1);
    let scale = jm.abs().max(jp1.abs());
    LambdaEval {
        k,
        d: dim.d(),
        rho,
        value,
        method: LambdaMethod::AlternativeForm,
        abs_err_estimate: 2e-14 * (1.0 + rho + m.alpha()) * scale * scale.max(1e-30),
    }
    .checked()
}

/// Independent oracle: (1/rho) \int_0^rho J_{nu+k}^2(r) r dr by adaptive
/// composite Gauss-Legendre.
pub fn lambda_quadrature(k: u32, dim: SphereDim, rho: f64) -> Result<LambdaEval> {
    check_rho(rho)?;
    let m = dim.order(k);
    let integrand = move |r: f64| {
        // A range error means the value is below binary64 altogether.
        let j = bessel::eval_j(m, r).map(|v| v.value).unwrap_or(0.0);
        j * j * r
    };
    let q = quadrature::adaptive_gl15(&integrand, 0.0, rho, 5e-12 * rho.max(1.0), 1.0)?;
    LambdaEval {
        k,
        d: dim.d(),
        rho,
        value: q.value / rho,
        method: LambdaMethod::Quadrature,
        abs_err_estimate: q.abs_err_estimate / rho,
    }
    .checked()
}

/// Lambda_k - Lambda_{k+1} in product form: J_{nu+k} J_{nu+k+1}.
pub fn gap_consecutive(k: u32, dim: SphereDim, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let seq = bessel::j_sequence(dim.order(k), 2, rho)?;
    Ok(seq[0] * seq[1])
}

/// Lambda_k - Lambda_{k+2} in product form: (2(nu+k+1)/rho) J_{nu+k+1}^2.
pub fn gap_two_apart(k: u32, dim: SphereDim, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let mid = dim.order(k + 1);
    let j = bessel::eval_j(mid, rho)?.value;
    Ok((2.0 * mid.alpha() / rho) * j * j)
}

/// Upper bound on sup_{k >= k_min} Lambda_{k,d}(rho) built from the crude
/// series envelope (rho/2)^a e^{rho^2/4} / Gamma(a+1).
///
/// Returns infinity when the envelope is not yet monotone at k_min; callers
/// scan upward until the bound becomes meaningful.
pub fn lambda_tail_bound(dim: SphereDim, rho: f64, k_min: u32) -> f64 {
    if k_min == 0 || rho <= 0.0 {
        return f64::INFINITY;
    }
    let m = dim.order(k_min);
    // envelope must be decreasing from order m-1 upward: m > rho/2
    if m.alpha() <= rho / 2.0 {
        return f64::INFINITY;
    }
    let log_env = |order: Order| -> f64 {
        order.alpha() * (rho / 2.0).ln() + rho * rho / 4.0
            - bessel::ln_gamma_alpha_plus_one(order)
    };
    let prev = Order::from_twice(m.twice() - 2);
    let a = 2.0 * log_env(m); // B(m)^2
    let b = log_env(prev) + log_env(m.offset(1)); // B(m-1) B(m+1)
    let hi = a.max(b);
    let log_bound = (rho / 2.0).ln() + hi + ((a - hi).exp() + (b - hi).exp()).ln();
    log_bound.exp()
}

const TAIL_TARGET: f64 = 1e-12;
const TRUNCATION_CAP: u32 = 10_000_000;

/// K_max(rho, d): smallest k >= 8 whose tail bound drops below 1e-12,
/// making the supremum over all degrees a finite certified computation.
pub fn truncation_index(dim: SphereDim, rho: f64) -> Result<u32> {
    check_rho(rho)?;
    let nu = dim.nu().alpha();
    let lhalf = (rho / 2.0).ln();
    let quarter = rho * rho / 4.0;
    // incremental ln Gamma(alpha+1) for orders m-1, m, m+1 at k = 8
    let mut g_prev = bessel::ln_gamma_alpha_plus_one(dim.order(7));
    let mut g_mid = bessel::ln_gamma_alpha_plus_one(dim.order(8));
    let mut g_next = bessel::ln_gamma_alpha_plus_one(dim.order(9));
    let mut k = 8u32;
    loop {
        let m = nu + k as f64;
        if m > rho / 2.0 {
            let le = |alpha: f64, g: f64| alpha * lhalf + quarter - g;
            let a = 2.0 * le(m, g_mid);
            let b = le(m - 1.0, g_prev) + le(m + 1.0, g_next);
            let hi = a.max(b);
            let log_bound = lhalf + hi + ((a - hi).exp() + (b - hi).exp()).ln();
            if log_bound < TAIL_TARGET.ln() {
                return Ok(k);
            }
        }
        k += 1;
        if k > TRUNCATION_CAP {
            return Err(Error::Internal(format!(
                "truncation index for d = {}, rho = {rho} exceeded cap",
                dim.d()
            )));
        }
        g_prev += (nu + k as f64 - 1.0).ln();
        g_mid += (nu + k as f64).ln();
        g_next += (nu + k as f64 + 1.0).ln();
    }
}

/// Lambda_0 .. Lambda_{count-1} from a single backward Bessel pass.
pub fn lambda_sequence(dim: SphereDim, rho: f64, count: usize) -> Result<Vec<f64>> {
    check_rho(rho)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let nu = dim.nu();
    let js: Vec<f64> = if let Some(prev) = nu.pred() {
        bessel::j_sequence(prev, count + 2, rho)?
    } else {
        let mut seq = bessel::j_sequence(nu, count + 1, rho)?;
        let below = bessel::eval_j_signed_twice(nu.twice() as i32 - 2, rho)?;
        seq.insert(0, below);
        seq
    };
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        // js[k] = J_{nu+k-1}, js[k+1] = J_{nu+k}, js[k+2] = J_{nu+k+1}
        out.push(0.5 * rho * (js[k + 1] * js[k + 1] - js[k] * js[k + 2]));
    }
    Ok(out)
}
