//! The optimal constant C_d(rho) and its maximiser space: the four-way case
//! split on the sign of (J_nu J_{nu+1})(rho), an independently certified
//! finite maximization over the harmonic degrees, and the inequality-chain
//! checks backing the case split.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bessel::{self, Order};
use crate::coefficients::{self, SphereDim};
use crate::error::{Error, Result};

/// Which of the four structural cases a pair (d, rho) falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// (J_nu J_{nu+1})(rho) > 0: constants maximise.
    PosProduct,
    /// (J_nu J_{nu+1})(rho) < 0: symmetry breaking, degree 1 maximises.
    NegProduct,
    /// rho is a zero of J_nu: degrees {0, 1} tie.
    NuZero,
    /// rho is a zero of J_{nu+1}: degrees {0, 1, 2} tie.
    NuPlusOneZero,
}

/// Symbolic designation of an exact Bessel zero, by order role and index.
///
/// The equality cases are measure-zero in rho; they are reached by intent
/// through a hint, never by floating-point coincidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroRole {
    Nu,
    NuPlusOne,
    /// Only meaningful for the regularity probes of S_d, not for case hints.
    NuPlusTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroHint {
    pub role: ZeroRole,
    pub index: usize,
}

impl ZeroRole {
    pub fn order(self, dim: SphereDim) -> Order {
        match self {
            ZeroRole::Nu => dim.nu(),
            ZeroRole::NuPlusOne => dim.order(1),
            ZeroRole::NuPlusTwo => dim.order(2),
        }
    }
}

/// Resolves a hint to the tabulated value of the designated zero.
pub fn resolve_hint(dim: SphereDim, hint: ZeroHint) -> Result<f64> {
    if hint.index == 0 {
        return Err(Error::Domain("zero index is 1-based".into()));
    }
    let order = hint.role.order(dim);
    let mut x_max = (hint.index as f64 + 1.0) * std::f64::consts::PI + order.alpha() + 5.0;
    for _ in 0..8 {
        let table = bessel::zeros_up_to(order, x_max)?;
        if let Some(z) = table.zero(hint.index) {
            return Ok(z);
        }
        x_max *= 1.5;
    }
    Err(Error::Domain(format!(
        "zero index {} of J_{order} not found",
        hint.index
    )))
}

/// The maximiser space M_d(rho), as the set of maximising harmonic degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximiserSpace {
    pub degrees: BTreeSet<u32>,
    pub case: CaseTag,
}

/// The sharp constant C_d(rho) with its maximiser space.
#[derive(Debug, Clone, Serialize)]
pub struct SharpConstant {
    pub dim: SphereDim,
    pub rho: f64,
    pub value: f64,
    pub maximisers: MaximiserSpace,
}

impl SharpConstant {
    pub fn case(&self) -> CaseTag {
        self.maximisers.case
    }

    pub fn argmax_degrees(&self) -> &BTreeSet<u32> {
        &self.maximisers.degrees
    }
}

/// Case classification by the sign of (J_nu J_{nu+1})(rho), with zero-band
/// semantics: without a hint, a band hit is an error rather than a guess.
pub fn classify_case(dim: SphereDim, rho: f64, hint: Option<ZeroHint>) -> Result<CaseTag> {
    if let Some(h) = hint {
        return match h.role {
            ZeroRole::Nu => Ok(CaseTag::NuZero),
            ZeroRole::NuPlusOne => Ok(CaseTag::NuPlusOneZero),
            ZeroRole::NuPlusTwo => Err(Error::Domain(
                "a zero of J_{nu+2} does not select a case of the sharp constant".into(),
            )),
        };
    }
    let mut negative = false;
    for order in [dim.nu(), dim.order(1)] {
        let v = bessel::eval_j(order, rho)?;
        if v.value.abs() <= bessel::ZERO_BAND_GUARD * v.abs_err_estimate {
            return Err(Error::AmbiguousAtZero { order, rho });
        }
        if v.value < 0.0 {
            negative = !negative;
        }
    }
    Ok(if negative {
        CaseTag::NegProduct
    } else {
        CaseTag::PosProduct
    })
}

fn degrees_for(case: CaseTag) -> BTreeSet<u32> {
    match case {
        CaseTag::PosProduct => BTreeSet::from([0]),
        CaseTag::NegProduct => BTreeSet::from([1]),
        CaseTag::NuZero => BTreeSet::from([0, 1]),
        CaseTag::NuPlusOneZero => BTreeSet::from([0, 1, 2]),
    }
}

/// C_d(rho) through the case split of the four-way analysis.
pub fn sharp_constant(dim: SphereDim, rho: f64, hint: Option<ZeroHint>) -> Result<SharpConstant> {
    let case = classify_case(dim, rho, hint)?;
    let k = match case {
        CaseTag::NegProduct => 1,
        _ => 0,
    };
    let value = coefficients::lambda_closed(k, dim, rho)?.value;
    Ok(SharpConstant {
        dim,
        rho,
        value,
        maximisers: MaximiserSpace {
            degrees: degrees_for(case),
            case,
        },
    })
}

/// Relative tie tolerance for collecting argmax degrees in the brute-force
/// route. Relative to the value scale, because at small rho and large d the
/// coefficients themselves drop below any fixed absolute gap.
pub const ARGMAX_TIE_TOL: f64 = 1e-10;

/// Brute-force maximum of Lambda_{k,d}(rho) over k, with a tail-bound
/// certificate that the truncation loses nothing.
#[derive(Debug, Clone, Serialize)]
pub struct CertifiedMax {
    pub value: f64,
    pub argmax: BTreeSet<u32>,
    pub k_max: u32,
    pub tail_bound: f64,
}

pub fn certified_max(dim: SphereDim, rho: f64) -> Result<CertifiedMax> {
    let k_max = coefficients::truncation_index(dim, rho)?;
    let seq = coefficients::lambda_sequence(dim, rho, k_max as usize + 1)?;
    let value = seq.iter().cloned().fold(f64::MIN, f64::max);
    let tail_bound = coefficients::lambda_tail_bound(dim, rho, k_max);
    if !(tail_bound < value) {
        return Err(Error::Internal(format!(
            "tail bound {tail_bound} does not certify the maximum {value} at d = {}, rho = {rho}",
            dim.d()
        )));
    }
    let argmax = seq
        .iter()
        .enumerate()
        .filter(|(_, &v)| value - v <= ARGMAX_TIE_TOL * value)
        .map(|(k, _)| k as u32)
        .collect();
    Ok(CertifiedMax {
        value,
        argmax,
        k_max,
        tail_bound,
    })
}

/// One inequality of a chain, with its measured residual.
#[derive(Debug, Clone, Serialize)]
pub struct ChainLink {
    pub lhs_k: u32,
    pub rhs_k: u32,
    pub relation: ChainRelation,
    pub residual: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainRelation {
    StrictGreater,
    GreaterEq,
    Equal,
}

/// Result of checking the case-appropriate inequality chain.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub case: CaseTag,
    pub rho: f64,
    pub links: Vec<ChainLink>,
}

impl ChainReport {
    pub fn pass(&self) -> bool {
        self.links.iter().all(|l| l.ok)
    }

    pub fn first_violation(&self) -> Option<&ChainLink> {
        self.links.iter().find(|l| !l.ok)
    }
}

const CHAIN_STRICT_MARGIN: f64 = 1e-12;
const CHAIN_WEAK_TOL: f64 = 1e-11;

/// Checks every inequality of the case-appropriate chain up to the
/// truncation index.
pub fn verify_chains(dim: SphereDim, rho: f64, hint: Option<ZeroHint>) -> Result<ChainReport> {
    let case = classify_case(dim, rho, hint)?;
    let k_max = coefficients::truncation_index(dim, rho)?;
    let seq = coefficients::lambda_sequence(dim, rho, k_max as usize + 1)?;
    let mut links = Vec::new();
    let mut push = |a: u32, b: u32, rel: ChainRelation| {
        let gap = seq[a as usize] - seq[b as usize];
        let ok = match rel {
            ChainRelation::StrictGreater => gap > CHAIN_STRICT_MARGIN,
            ChainRelation::GreaterEq => gap >= -CHAIN_WEAK_TOL,
            ChainRelation::Equal => gap.abs() <= CHAIN_WEAK_TOL,
        };
        links.push(ChainLink {
            lhs_k: a,
            rhs_k: b,
            relation: rel,
            residual: gap,
            ok,
        });
    };
    let weak_run = |push: &mut dyn FnMut(u32, u32, ChainRelation), start: u32| {
        let mut a = start;
        while a + 2 <= k_max {
            push(a, a + 2, ChainRelation::GreaterEq);
            a += 2;
        }
    };
    match case {
        CaseTag::PosProduct => {
            push(0, 1, ChainRelation::StrictGreater);
            weak_run(&mut push, 1);
            push(0, 2, ChainRelation::StrictGreater);
            weak_run(&mut push, 2);
        }
        CaseTag::NegProduct => {
            push(1, 0, ChainRelation::StrictGreater);
            weak_run(&mut push, 0);
            push(1, 3, ChainRelation::StrictGreater);
            weak_run(&mut push, 3);
        }
        CaseTag::NuZero => {
            push(0, 1, ChainRelation::Equal);
            push(0, 2, ChainRelation::StrictGreater);
            weak_run(&mut push, 2);
            push(1, 3, ChainRelation::StrictGreater);
            weak_run(&mut push, 3);
        }
        CaseTag::NuPlusOneZero => {
            push(0, 1, ChainRelation::Equal);
            push(0, 2, ChainRelation::Equal);
            push(2, 4, ChainRelation::StrictGreater);
            weak_run(&mut push, 4);
            push(1, 3, ChainRelation::StrictGreater);
            weak_run(&mut push, 3);
        }
    }
    Ok(ChainReport { case, rho, links })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dim(d: u32) -> SphereDim {
        SphereDim::new(d).unwrap()
    }

    fn hint(role: ZeroRole, index: usize) -> Option<ZeroHint> {
        Some(ZeroHint { role, index })
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_case(dim(2), 1.0, None).unwrap(), CaseTag::PosProduct);
        assert_eq!(classify_case(dim(2), 3.0, None).unwrap(), CaseTag::NegProduct);
        assert_eq!(
            classify_case(dim(2), 2.4, hint(ZeroRole::Nu, 1)).unwrap(),
            CaseTag::NuZero
        );
    }

    #[test]
    fn ambiguous_without_hint_at_tabulated_zero() {
        let z = resolve_hint(dim(2), ZeroHint { role: ZeroRole::Nu, index: 1 }).unwrap();
        match classify_case(dim(2), z, None) {
            Err(Error::AmbiguousAtZero { .. }) => {}
            other => panic!("expected AmbiguousAtZero, got {other:?}"),
        }
    }

    #[test]
    fn limit_value_at_large_rho() {
        let c = sharp_constant(dim(2), 1000.0, None).unwrap();
        assert!((c.value - 1.0 / PI).abs() < 2e-3);
    }

    #[test]
    fn hinted_zero_ties_degrees_zero_one() {
        let z = resolve_hint(dim(2), ZeroHint { role: ZeroRole::Nu, index: 1 }).unwrap();
        let c = sharp_constant(dim(2), z, hint(ZeroRole::Nu, 1)).unwrap();
        assert_eq!(c.argmax_degrees(), &BTreeSet::from([0, 1]));
        let l0 = coefficients::lambda_closed(0, dim(2), z).unwrap().value;
        let l1 = coefficients::lambda_closed(1, dim(2), z).unwrap().value;
        assert!((l0 - l1).abs() <= 1e-11);
    }

    #[test]
    fn case_split_matches_certified_max_on_grid() {
        for d in 2..=6u32 {
            let dm = dim(d);
            let mut rho = 0.13;
            while rho <= 20.0 {
                let direct = sharp_constant(dm, rho, None).unwrap();
                let brute = certified_max(dm, rho).unwrap();
                assert!(
                    (direct.value - brute.value).abs() <= 1e-10,
                    "d={d} rho={rho}: {} vs {}",
                    direct.value,
                    brute.value
                );
                assert_eq!(direct.argmax_degrees(), &brute.argmax, "d={d} rho={rho}");
                rho += 0.37;
            }
        }
    }

    #[test]
    fn symmetry_breaking_near_three() {
        let brute = certified_max(dim(2), 3.0).unwrap();
        assert_eq!(brute.argmax, BTreeSet::from([1]));
    }

    #[test]
    fn hinted_j11_gives_triple_argmax() {
        let z = resolve_hint(dim(2), ZeroHint { role: ZeroRole::NuPlusOne, index: 1 }).unwrap();
        let brute = certified_max(dim(2), z).unwrap();
        assert_eq!(brute.argmax, BTreeSet::from([0, 1, 2]));
        let direct = sharp_constant(dim(2), z, hint(ZeroRole::NuPlusOne, 1)).unwrap();
        assert_eq!(direct.argmax_degrees(), &brute.argmax);
        assert!((direct.value - brute.value).abs() <= 1e-10);
    }

    #[test]
    fn chains_hold_in_each_case() {
        assert!(verify_chains(dim(2), 1.0, None).unwrap().pass());
        assert!(verify_chains(dim(2), 3.0, None).unwrap().pass());
        for d in [2u32, 3, 5] {
            let dm = dim(d);
            for idx in 1..=2usize {
                let z = resolve_hint(dm, ZeroHint { role: ZeroRole::Nu, index: idx }).unwrap();
                let r = verify_chains(dm, z, hint(ZeroRole::Nu, idx)).unwrap();
                assert!(r.pass(), "d={d} case iii idx={idx}: {:?}", r.first_violation());
                let z = resolve_hint(dm, ZeroHint { role: ZeroRole::NuPlusOne, index: idx }).unwrap();
                let r = verify_chains(dm, z, hint(ZeroRole::NuPlusOne, idx)).unwrap();
                assert!(r.pass(), "d={d} case iv idx={idx}: {:?}", r.first_violation());
            }
        }
    }

    #[test]
    fn certified_max_is_positive_and_tends_to_inv_pi() {
        for &rho in &[0.5, 5.0, 25.0] {
            let b = certified_max(dim(4), rho).unwrap();
            assert!(b.value > 0.0);
        }
        for &rho in &[100.0, 1000.0, 10000.0] {
            let c = sharp_constant(dim(2), rho, None).unwrap().value;
            assert!((c - 1.0 / PI).abs() <= 3.0 / rho, "rho={rho}");
        }
    }
}
