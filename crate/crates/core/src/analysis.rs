//! Regularity probes: kinks of C_d at zeros of J_nu J_{nu+1}, jumps of S_d
//! there, kinks of S_d at zeros of J_{nu+2}, the derivative of Lambda_0 at
//! the origin, a Lipschitz-bound scan, and the 1/pi limit at large rho.

use serde::Serialize;

use crate::bessel::{self, Order};
use crate::coefficients::{self, SphereDim};
use crate::error::{Error, Result};
use crate::sharp::{self, ZeroHint, ZeroRole};
use crate::stability;

/// What a one-sided-derivative probe concluded about a location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeClass {
    Smooth,
    Kink,
    Jump,
    Inconclusive,
}

/// One-sided slopes of a piecewise function around a location.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KinkProbe {
    pub location: f64,
    pub left_slope: f64,
    pub right_slope: f64,
    /// Smallest finite-difference step used before extrapolation.
    pub h: f64,
    pub classification: ProbeClass,
    /// right_slope - left_slope.
    pub measured_gap: f64,
    /// Closed-form slope gap when the location designates a tabulated zero.
    pub predicted_gap: Option<f64>,
}

/// Slope gap above this is a kink, below [`SMOOTH_GAP`] is smooth; the dead
/// zone in between flags a probe that should not be trusted either way.
const KINK_GAP: f64 = 1e-4;
const SMOOTH_GAP: f64 = 1e-7;
/// Coarsest one-sided step; two halvings and Richardson extrapolation follow.
const PROBE_STEP: f64 = 1e-3;

fn classify_gap(gap: f64) -> ProbeClass {
    if gap.abs() > KINK_GAP {
        ProbeClass::Kink
    } else if gap.abs() < SMOOTH_GAP {
        ProbeClass::Smooth
    } else {
        ProbeClass::Inconclusive
    }
}

/// One-sided derivative at x in direction `dir` (+1 right, -1 left) from
/// three-point stencils at h, h/2, h/4 and two Richardson levels.
fn one_sided_slope<F>(f: &F, x: f64, dir: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let f0 = f(x)?;
    let stencil = |h: f64| -> Result<f64> {
        let f1 = f(x + dir * h)?;
        let f2 = f(x + 2.0 * dir * h)?;
        Ok(dir * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h))
    };
    let d1 = stencil(PROBE_STEP)?;
    let d2 = stencil(PROBE_STEP / 2.0)?;
    let d3 = stencil(PROBE_STEP / 4.0)?;
    let r12 = (4.0 * d2 - d1) / 3.0;
    let r23 = (4.0 * d3 - d2) / 3.0;
    Ok((8.0 * r23 - r12) / 7.0)
}

fn probe_with<F>(f: &F, location: f64, predicted_gap: Option<f64>) -> Result<KinkProbe>
where
    F: Fn(f64) -> Result<f64>,
{
    let left_slope = one_sided_slope(f, location, -1.0)?;
    let right_slope = one_sided_slope(f, location, 1.0)?;
    let measured_gap = right_slope - left_slope;
    Ok(KinkProbe {
        location,
        left_slope,
        right_slope,
        h: PROBE_STEP / 4.0,
        classification: classify_gap(measured_gap),
        measured_gap,
        predicted_gap,
    })
}

/// d/drho of the product (J_a J_{a+1}) at x; at a zero of either factor this
/// collapses to the nonvanishing factor times the derivative of the other,
/// which is the slope gap of C_d across that zero.
fn product_slope(a: Order, x: f64) -> Result<f64> {
    let ja = bessel::eval_j(a, x)?.value;
    let jb = bessel::eval_j(a.succ(), x)?.value;
    let da = bessel::eval_j_derivative(a, x)?.value;
    let db = bessel::eval_j_derivative(a.succ(), x)?.value;
    Ok(da * jb + ja * db)
}

/// Probes C_d across a designated zero of J_nu or J_{nu+1}. The measured
/// slope gap must reproduce the closed-form prediction.
pub fn probe_c_kink(dim: SphereDim, hint: ZeroHint) -> Result<KinkProbe> {
    if hint.role == ZeroRole::NuPlusTwo {
        return Err(Error::Domain(
            "C_d has no kink at zeros of J_{nu+2}; probe S_d there instead".into(),
        ));
    }
    let z = sharp::resolve_hint(dim, hint)?;
    let c = |x: f64| -> Result<f64> {
        let h = if x == z { Some(hint) } else { None };
        Ok(sharp::sharp_constant(dim, x, h)?.value)
    };
    // Orientation: whichever branch of {Lambda_0, Lambda_1} rules on the
    // left, the gap right - left is the signed derivative of the selector
    // product, possibly flipped.
    let raw = product_slope(dim.nu(), z)?;
    let left_case = sharp::classify_case(dim, z - PROBE_STEP, None)?;
    let predicted = match left_case {
        sharp::CaseTag::PosProduct => -raw,
        _ => raw,
    };
    probe_with(&c, z, Some(predicted))
}

/// Probes C_d at an arbitrary location (no hint): between consecutive zeros
/// it must come out smooth.
pub fn probe_c_at(dim: SphereDim, rho: f64) -> Result<KinkProbe> {
    let c = |x: f64| -> Result<f64> { Ok(sharp::sharp_constant(dim, x, None)?.value) };
    probe_with(&c, rho, None)
}

/// One-sided values of S_d shrinking toward a zero of J_nu or J_{nu+1},
/// against the strictly positive value at the zero itself.
#[derive(Debug, Clone, Serialize)]
pub struct JumpProbe {
    pub location: f64,
    pub eps: Vec<f64>,
    pub left_values: Vec<f64>,
    pub right_values: Vec<f64>,
    pub value_at_zero: f64,
    pub classification: ProbeClass,
}

const JUMP_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// S_d collapses to 0 on both sides of a zero of J_nu J_{nu+1} while its
/// value at the zero stays bounded away from 0: a removable-looking dip
/// that is genuinely a jump of the rho -> S_d(rho) map.
pub fn probe_s_jump(dim: SphereDim, hint: ZeroHint) -> Result<JumpProbe> {
    if hint.role == ZeroRole::NuPlusTwo {
        return Err(Error::Domain(
            "S_d is continuous at zeros of J_{nu+2}; use the kink probe there".into(),
        ));
    }
    let z = sharp::resolve_hint(dim, hint)?;
    let mut left_values = Vec::new();
    let mut right_values = Vec::new();
    for &e in &JUMP_EPS {
        left_values.push(stability::stability_constant(dim, z - e, None)?.value);
        right_values.push(stability::stability_constant(dim, z + e, None)?.value);
    }
    let value_at_zero = stability::stability_constant(dim, z, Some(hint))?.value;
    let smallest = left_values.last().unwrap().max(*right_values.last().unwrap());
    let classification = if value_at_zero - smallest > KINK_GAP {
        ProbeClass::Jump
    } else {
        ProbeClass::Inconclusive
    };
    Ok(JumpProbe {
        location: z,
        eps: JUMP_EPS.to_vec(),
        left_values,
        right_values,
        value_at_zero,
        classification,
    })
}

/// Probes S_d across a designated zero of J_{nu+2}: continuous, but the
/// ruling branch switches between Lambda_0 - Lambda_1 and
/// Lambda_0 - Lambda_2, whose slope difference is the derivative of the
/// product (J_{nu+1} J_{nu+2}) there.
pub fn probe_s_kink_at_jnu2(dim: SphereDim, hint: ZeroHint) -> Result<KinkProbe> {
    if hint.role != ZeroRole::NuPlusTwo {
        return Err(Error::Domain(
            "the stability kink probe expects a zero of J_{nu+2}".into(),
        ));
    }
    let z = sharp::resolve_hint(dim, hint)?;
    // the whole probe window must sit inside the constants-maximise case
    for x in [z - 2.0 * PROBE_STEP, z - PROBE_STEP, z + PROBE_STEP, z + 2.0 * PROBE_STEP] {
        let case = sharp::classify_case(dim, x, None)?;
        if case != sharp::CaseTag::PosProduct {
            return Err(Error::Internal(format!(
                "probe window around {z} left the constants-maximise case at {x}"
            )));
        }
    }
    let s = |x: f64| -> Result<f64> {
        let h = if x == z { Some(hint) } else { None };
        Ok(stability::stability_constant(dim, x, h)?.value)
    };
    let raw = product_slope(dim.order(1), z)?;
    let left_sel = bessel::sign_product(&[(dim.order(1), dim.order(2))], z - PROBE_STEP)?;
    // left branch Lambda_0 - Lambda_1 when the selector is positive there;
    // crossing to Lambda_0 - Lambda_2 changes the slope by the derivative
    // of Lambda_1 - Lambda_2, which is the product's slope
    let predicted = match left_sel {
        bessel::SignClass::Positive => raw,
        _ => -raw,
    };
    probe_with(&s, z, Some(predicted))
}

const ORIGIN_SAMPLES: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Right derivative of Lambda_0 at rho = 0, from Lambda_0(rho)/rho at three
/// decades and Richardson extrapolation in rho^2.
pub fn lambda0_origin_slope(dim: SphereDim) -> Result<f64> {
    let mut v = [0.0; 3];
    for (i, &rho) in ORIGIN_SAMPLES.iter().enumerate() {
        v[i] = coefficients::lambda_closed(0, dim, rho)?.value / rho;
    }
    // v(rho) = a + b rho^2 + O(rho^4); consecutive samples shrink rho by 10
    let r1 = (100.0 * v[1] - v[0]) / 99.0;
    let r2 = (100.0 * v[2] - v[1]) / 99.0;
    Ok((1e4 * r2 - r1) / (1e4 - 1.0))
}

/// Closed-form derivative of Lambda_k with respect to rho.
pub fn lambda_prime(k: u32, dim: SphereDim, rho: f64) -> Result<f64> {
    let m = dim.order(k);
    let t = m.twice() as i32;
    let jm2 = bessel::eval_j_signed_twice(t - 4, rho)?;
    let jm1 = bessel::eval_j_signed_twice(t - 2, rho)?;
    let j0 = bessel::eval_j_signed_twice(t, rho)?;
    let jp1 = bessel::eval_j_signed_twice(t + 2, rho)?;
    let jp2 = bessel::eval_j_signed_twice(t + 4, rho)?;
    Ok(0.5 * (j0 * j0 - jm1 * jp1)
        + (rho / 4.0) * (jm1 * j0 - jm2 * jp1 - j0 * jp1 + jm1 * jp2))
}

/// Largest |d Lambda_0 / d rho| and |d Lambda_1 / d rho| seen on a grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeScan {
    pub rho_max: f64,
    pub max_slope0: f64,
    pub max_slope1: f64,
}

const SCAN_STEP: f64 = 0.05;

pub fn lipschitz_scan(dim: SphereDim, rho_max: f64) -> Result<SlopeScan> {
    if !(rho_max > 0.0) {
        return Err(Error::Domain(format!("rho_max must be positive, got {rho_max}")));
    }
    let mut max_slope0 = 0.0f64;
    let mut max_slope1 = 0.0f64;
    let n = (rho_max / SCAN_STEP).ceil() as usize;
    for i in 1..=n {
        let rho = rho_max * i as f64 / n as f64;
        max_slope0 = max_slope0.max(lambda_prime(0, dim, rho)?.abs());
        max_slope1 = max_slope1.max(lambda_prime(1, dim, rho)?.abs());
    }
    Ok(SlopeScan {
        rho_max,
        max_slope0,
        max_slope1,
    })
}

/// One sampled point of the large-rho limit check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LimitRow {
    pub rho: f64,
    pub lambda: f64,
    /// rho * |Lambda_k - 1/pi|.
    pub scaled_residual: f64,
    pub c: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub k: u32,
    pub rows: Vec<LimitRow>,
    pub sup_scaled_residual: f64,
}

/// Checks Lambda_k -> 1/pi at rate O(1/rho) along an increasing list, and
/// records the accompanying trends of C_d and S_d.
pub fn limit_check(dim: SphereDim, k: u32, rho_list: &[f64]) -> Result<LimitReport> {
    if rho_list.is_empty() {
        return Err(Error::Domain("rho_list must be nonempty".into()));
    }
    if rho_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("rho_list must be strictly increasing".into()));
    }
    let inv_pi = std::f64::consts::FRAC_1_PI;
    let mut rows = Vec::with_capacity(rho_list.len());
    let mut sup = 0.0f64;
    for &rho in rho_list {
        let lambda = coefficients::lambda_closed(k, dim, rho)?.value;
        let scaled_residual = rho * (lambda - inv_pi).abs();
        sup = sup.max(scaled_residual);
        let c = sharp::sharp_constant(dim, rho, None)?.value;
        let s = stability::stability_constant(dim, rho, None)?.value;
        rows.push(LimitRow {
            rho,
            lambda,
            scaled_residual,
            c,
            s,
        });
    }
    Ok(LimitReport {
        k,
        rows,
        sup_scaled_residual: sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn dim(d: u32) -> SphereDim {
        SphereDim::new(d).unwrap()
    }

    fn hint(role: ZeroRole, index: usize) -> ZeroHint {
        ZeroHint { role, index }
    }

    #[test]
    fn c_kink_at_first_zero_of_j0() {
        let p = probe_c_kink(dim(2), hint(ZeroRole::Nu, 1)).unwrap();
        assert_eq!(p.classification, ProbeClass::Kink);
        let pred = p.predicted_gap.unwrap();
        assert!((p.measured_gap - pred).abs() <= 1e-5, "{} vs {pred}", p.measured_gap);
        // J_0' = -J_1, so the unsigned gap is J_1(j_{0,1})^2
        let j1 = bessel::eval_j(Order::integer(1), p.location).unwrap().value;
        assert!((pred.abs() - j1 * j1).abs() <= 1e-12);
    }

    #[test]
    fn c_smooth_between_zeros() {
        let p = probe_c_at(dim(2), 5.0).unwrap();
        assert_eq!(p.classification, ProbeClass::Smooth, "gap {}", p.measured_gap);
    }

    #[test]
    fn c_kink_at_pi_for_d3() {
        // nu = 1/2, first zero of J_{1/2} is exactly pi; the elementary
        // closed forms give |gap| = J'_{1/2}(pi) J_{3/2}(pi) = 2/pi^2
        let p = probe_c_kink(dim(3), hint(ZeroRole::Nu, 1)).unwrap();
        assert!((p.location - PI).abs() < 1e-12);
        assert_eq!(p.classification, ProbeClass::Kink);
        assert!((p.measured_gap.abs() - 2.0 / (PI * PI)).abs() <= 1e-5);
    }

    #[test]
    fn s_jumps_at_zeros_of_the_case_selector() {
        for (role, idx) in [(ZeroRole::Nu, 1), (ZeroRole::NuPlusOne, 1), (ZeroRole::Nu, 2)] {
            let p = probe_s_jump(dim(2), hint(role, idx)).unwrap();
            assert_eq!(p.classification, ProbeClass::Jump, "{role:?} {idx}");
            assert!(p.value_at_zero > 1e-2, "{role:?} {idx}: {}", p.value_at_zero);
            assert!(p.left_values[2] < 1e-3 && p.right_values[2] < 1e-3);
            // decay order per side: linear when the ruling branch is a
            // simple product through the vanishing factor, quadratic when
            // it is the squared-factor branch Lambda_0 - Lambda_2 (seen on
            // one side of zeros of J_{nu+1})
            for vals in [&p.left_values, &p.right_values] {
                let ratio = vals[1] / vals[2];
                assert!(
                    (5.0..20.0).contains(&ratio) || (50.0..200.0).contains(&ratio),
                    "{role:?} {idx}: ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn s_kink_at_first_zero_of_j2() {
        let p = probe_s_kink_at_jnu2(dim(2), hint(ZeroRole::NuPlusTwo, 1)).unwrap();
        assert_eq!(p.classification, ProbeClass::Kink);
        let pred = p.predicted_gap.unwrap();
        assert!((p.measured_gap - pred).abs() <= 1e-5, "{} vs {pred}", p.measured_gap);
        // continuity across the kink
        let z = p.location;
        for e in [1e-3, 1e-4, 1e-5] {
            let l = stability::stability_constant(dim(2), z - e, None).unwrap().value;
            let r = stability::stability_constant(dim(2), z + e, None).unwrap().value;
            assert!((l - r).abs() < 10.0 * e, "e={e}: {l} vs {r}");
        }
    }

    #[test]
    fn origin_slopes() {
        assert!((lambda0_origin_slope(dim(2)).unwrap() - 0.5).abs() <= 1e-4);
        for d in [3u32, 4, 5, 6, 9] {
            let s = lambda0_origin_slope(dim(d)).unwrap();
            assert!(s.abs() <= 1e-4, "d={d}: {s}");
        }
    }

    #[test]
    fn lambda_prime_matches_finite_differences() {
        for d in [2u32, 3, 5] {
            for &rho in &[0.7, 4.1, 13.3] {
                for k in 0..2u32 {
                    let exact = lambda_prime(k, dim(d), rho).unwrap();
                    let h = 1e-5;
                    let fp = coefficients::lambda_closed(k, dim(d), rho + h).unwrap().value;
                    let fm = coefficients::lambda_closed(k, dim(d), rho - h).unwrap().value;
                    let fd = (fp - fm) / (2.0 * h);
                    assert!((exact - fd).abs() <= 1e-7, "d={d} k={k} rho={rho}");
                }
            }
        }
    }

    #[test]
    fn slopes_stay_bounded_as_the_grid_extends() {
        let a = lipschitz_scan(dim(2), 200.0).unwrap();
        let b = lipschitz_scan(dim(2), 400.0).unwrap();
        assert!(a.max_slope0.is_finite() && a.max_slope1.is_finite());
        assert!(b.max_slope0 <= a.max_slope0 + 1e-6);
        assert!(b.max_slope1 <= a.max_slope1 + 1e-6);
    }

    #[test]
    fn limit_at_large_rho() {
        let list = [100.0, 200.0, 400.0, 800.0];
        let r = limit_check(dim(2), 0, &list).unwrap();
        assert!(r.sup_scaled_residual < 1.0, "{}", r.sup_scaled_residual);
        let last = r.rows.last().unwrap();
        assert!((last.c - 1.0 / PI).abs() < 1e-3);
        assert!(last.s < r.rows[0].s.max(0.05));
    }

    #[test]
    fn limit_is_exact_for_d3() {
        // Lambda_{0,3}(rho) = (1/pi)(1 - sin(2 rho)/(2 rho))
        let list = [50.0, 120.0, 333.0];
        let r = limit_check(dim(3), 0, &list).unwrap();
        for row in &r.rows {
            let expected = (1.0 / PI) * (1.0 - (2.0 * row.rho).sin() / (2.0 * row.rho));
            assert!((row.lambda - expected).abs() <= 1e-12, "rho={}", row.rho);
        }
    }

    #[test]
    fn no_kink_away_from_zeros() {
        let dm = dim(2);
        let z0 = bessel::zeros_up_to(dm.nu(), 32.0).unwrap();
        let z1 = bessel::zeros_up_to(dm.order(1), 32.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut tested = 0;
        while tested < 100 {
            let rho = 0.5 + 29.5 * rng.gen::<f64>();
            let near = z0
                .zeros()
                .iter()
                .chain(z1.zeros())
                .any(|&z| (z - rho).abs() < 0.05);
            if near {
                continue;
            }
            let p = probe_c_at(dm, rho).unwrap();
            assert_eq!(p.classification, ProbeClass::Smooth, "rho={rho} gap={}", p.measured_gap);
            tested += 1;
        }
    }
}
