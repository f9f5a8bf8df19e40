//! The stability constant S_d(rho), equality space E_d(rho), deficit
//! functional on harmonic mixtures, and the sandwich inequality
//!
//!   S_d(rho) d(f, M)^2  <=  deficit(f)  <=  C_d(rho) d(f, M)^2
//!
//! with randomized verification of both equality cases.

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bessel::{self, SignClass};
use crate::coefficients::{self, SphereDim};
use crate::error::{Error, Result};
use crate::sharp::{self, CaseTag, ZeroHint, ZeroRole};

/// A finitely supported function on the sphere, reduced to its squared
/// harmonic-component norms: weights[k] = squared norm of the degree-k part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicMixture {
    weights: BTreeMap<u32, f64>,
}

impl HarmonicMixture {
    pub fn from_pairs(pairs: &[(u32, f64)]) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for &(k, w) in pairs {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Domain(format!(
                    "mixture weight for degree {k} must be a nonnegative finite real, got {w}"
                )));
            }
            if w > 0.0 {
                *weights.entry(k).or_insert(0.0) += w;
            }
        }
        if weights.is_empty() {
            return Err(Error::Domain("mixture has no positive weight".into()));
        }
        Ok(HarmonicMixture { weights })
    }

    pub fn weights(&self) -> &BTreeMap<u32, f64> {
        &self.weights
    }

    /// Total squared norm of the mixture.
    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn max_degree(&self) -> u32 {
        *self.weights.keys().next_back().expect("nonempty by construction")
    }
}

/// Sign row of the sub-selector inside a case of the stability table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subcase {
    SelectorPositive,
    SelectorZero,
    SelectorNegative,
}

/// S_d(rho) with the equality space E_d(rho) as a set of degrees.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityConstant {
    pub dim: SphereDim,
    pub rho: f64,
    pub value: f64,
    pub equality_degrees: BTreeSet<u32>,
    pub case: CaseTag,
    pub subcase: Subcase,
}

/// The combination J_nu J_{nu+1} + J_{nu+1} J_{nu+2} + J_{nu+2} J_{nu+3},
/// computed through its rearrangement
/// (2(nu+1)/rho) J_{nu+1}^2 + J_{nu+2} J_{nu+3},
/// whose first term is a square: positivity is manifest when J_{nu+2} J_{nu+3}
/// is nonnegative, which powers the exclusion argument in case (ii).
pub fn j_frak(dim: SphereDim, rho: f64) -> Result<f64> {
    let js = bessel::j_sequence(dim.order(1), 3, rho)?;
    let coef = 2.0 * (dim.nu().alpha() + 1.0) / rho;
    Ok(coef * js[0] * js[0] + js[1] * js[2])
}

/// The same combination as the literal sum of three consecutive products.
pub fn j_frak_sum(dim: SphereDim, rho: f64) -> Result<f64> {
    let js = bessel::j_sequence(dim.nu(), 4, rho)?;
    Ok(js[0] * js[1] + js[1] * js[2] + js[2] * js[3])
}

/// Zero band for the sum-form selector of case (ii); its terms are O(1).
const J_FRAK_BAND: f64 = 1e-11;

fn classify_j_frak(dim: SphereDim, rho: f64) -> Result<SignClass> {
    let v = j_frak(dim, rho)?;
    Ok(if v.abs() <= J_FRAK_BAND {
        SignClass::Zero
    } else if v > 0.0 {
        SignClass::Positive
    } else {
        SignClass::Negative
    })
}

fn subcase_of(sign: SignClass) -> Subcase {
    match sign {
        SignClass::Positive => Subcase::SelectorPositive,
        SignClass::Zero => Subcase::SelectorZero,
        SignClass::Negative => Subcase::SelectorNegative,
    }
}

/// S_d(rho) and E_d(rho) by the case table. The value is always assembled
/// from the product/square gap identities rather than by subtracting two
/// nearly equal coefficients.
pub fn stability_constant(
    dim: SphereDim,
    rho: f64,
    hint: Option<ZeroHint>,
) -> Result<StabilityConstant> {
    // A designated zero of J_{nu+2} keeps the sharp-constant case at (i)
    // but lands exactly on the triple-equality row of the selector.
    if let Some(h) = hint {
        if h.role == ZeroRole::NuPlusTwo {
            let case = sharp::classify_case(dim, rho, None)?;
            if case != CaseTag::PosProduct {
                return Err(Error::Internal(format!(
                    "zero of J_{} at rho = {rho} should sit inside case (i), found {case:?}",
                    dim.order(2)
                )));
            }
            return Ok(StabilityConstant {
                dim,
                rho,
                value: coefficients::gap_consecutive(0, dim, rho)?,
                equality_degrees: BTreeSet::from([1, 2, 3]),
                case,
                subcase: Subcase::SelectorZero,
            });
        }
    }
    let case = sharp::classify_case(dim, rho, hint)?;
    let (value, equality_degrees, subcase) = match case {
        CaseTag::PosProduct => {
            let sel = bessel::sign_product(&[(dim.order(1), dim.order(2))], rho)?;
            let (value, degrees) = match sel {
                SignClass::Positive => (
                    coefficients::gap_consecutive(0, dim, rho)?,
                    BTreeSet::from([1]),
                ),
                SignClass::Negative => (
                    coefficients::gap_two_apart(0, dim, rho)?,
                    BTreeSet::from([2]),
                ),
                // Triple row: the selector vanishes through J_{nu+2}, so
                // degrees 1, 2, 3 tie at the second-best value.
                SignClass::Zero => (
                    coefficients::gap_consecutive(0, dim, rho)?,
                    BTreeSet::from([1, 2, 3]),
                ),
            };
            (value, degrees, subcase_of(sel))
        }
        CaseTag::NegProduct => {
            let sel = classify_j_frak(dim, rho)?;
            let (value, degrees) = match sel {
                SignClass::Positive => (
                    -coefficients::gap_consecutive(0, dim, rho)?,
                    BTreeSet::from([0]),
                ),
                SignClass::Negative => (
                    coefficients::gap_two_apart(1, dim, rho)?,
                    BTreeSet::from([3]),
                ),
                SignClass::Zero => {
                    // An exact selector zero would tie degrees 0 and 3, but
                    // it is not the zero of any single Bessel factor, so no
                    // hint can designate it; inside the band the row is
                    // numerically undecidable.
                    return Err(Error::Domain(format!(
                        "selector of case (ii) at rho = {rho}, d = {} lies inside its zero band; \
                         the tie between degrees 0 and 3 cannot be resolved numerically",
                        dim.d()
                    )));
                }
            };
            (value, degrees, subcase_of(sel))
        }
        CaseTag::NuZero => {
            let (a, b) = (dim.order(2), dim.order(3));
            let sel = bessel::sign_product(&[(a, b)], rho)?;
            let (value, degrees) = match sel {
                SignClass::Positive => (
                    coefficients::gap_two_apart(0, dim, rho)?,
                    BTreeSet::from([2]),
                ),
                SignClass::Negative => (
                    coefficients::gap_two_apart(0, dim, rho)?
                        + coefficients::gap_consecutive(2, dim, rho)?,
                    BTreeSet::from([3]),
                ),
                SignClass::Zero => return Err(Error::BourgetExcluded { a, b, rho }),
            };
            (value, degrees, subcase_of(sel))
        }
        CaseTag::NuPlusOneZero => {
            let (a, b) = (dim.order(3), dim.order(4));
            let sel = bessel::sign_product(&[(a, b)], rho)?;
            let (value, degrees) = match sel {
                SignClass::Positive => (
                    coefficients::gap_two_apart(1, dim, rho)?,
                    BTreeSet::from([3]),
                ),
                SignClass::Negative => (
                    coefficients::gap_two_apart(1, dim, rho)?
                        + coefficients::gap_consecutive(3, dim, rho)?,
                    BTreeSet::from([4]),
                ),
                SignClass::Zero => return Err(Error::BourgetExcluded { a, b, rho }),
            };
            (value, degrees, subcase_of(sel))
        }
    };
    if !(value > 0.0) {
        return Err(Error::Internal(format!(
            "stability constant {value} not positive at d = {}, rho = {rho}",
            dim.d()
        )));
    }
    Ok(StabilityConstant {
        dim,
        rho,
        value,
        equality_degrees,
        case,
        subcase,
    })
}

/// Deficit of a mixture together with the two sides of the sandwich.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeficitReport {
    pub deficit: f64,
    pub distance_sq: f64,
    pub lower: f64,
    pub upper: f64,
}

/// deficit(f) = sum over non-maximiser degrees of (C_d - Lambda_k) w_k;
/// membership is decided by the maximiser set, never by comparing floats.
pub fn deficit(
    f: &HarmonicMixture,
    dim: SphereDim,
    rho: f64,
    hint: Option<ZeroHint>,
) -> Result<DeficitReport> {
    let sharp_hint = hint.filter(|h| h.role != ZeroRole::NuPlusTwo);
    let c = sharp::sharp_constant(dim, rho, sharp_hint)?;
    let s = stability_constant(dim, rho, hint)?;
    let lambdas = coefficients::lambda_sequence(dim, rho, f.max_degree() as usize + 1)?;
    let mut deficit = 0.0;
    let mut distance_sq = 0.0;
    for (&k, &w) in f.weights() {
        if c.argmax_degrees().contains(&k) {
            continue;
        }
        deficit += (c.value - lambdas[k as usize]) * w;
        distance_sq += w;
    }
    Ok(DeficitReport {
        deficit,
        distance_sq,
        lower: s.value * distance_sq,
        upper: c.value * distance_sq,
    })
}

/// Brute-force route to S_d(rho): the infimum of C_d - Lambda_k over all
/// non-maximiser degrees up to the certified truncation index, with the
/// argmin set collected under the same tie tolerance as the sharp side.
#[derive(Debug, Clone, Serialize)]
pub struct BruteStability {
    pub value: f64,
    pub argmin: BTreeSet<u32>,
    /// Degrees whose gap to the infimum is below the gray-zone width: at a
    /// plain rho that happens to fall close (but not band-close) to a Bessel
    /// zero, a quadratically vanishing gap can straddle the tie tolerance,
    /// and set comparisons should not hinge on which side it lands.
    pub near_ties: BTreeSet<u32>,
    pub k_max: u32,
}

/// Relative width of the gray zone around the infimum.
const NEAR_TIE_GRAY: f64 = 1e-6;

impl BruteStability {
    /// Whether a case-table equality set is consistent with this oracle
    /// result: either exact agreement, or every disputed degree sits inside
    /// the gray zone where the tie is numerically undecidable.
    pub fn confirms(&self, degrees: &BTreeSet<u32>) -> bool {
        degrees == &self.argmin || degrees.is_subset(&self.near_ties)
    }
}

pub fn brute_force_stability(
    dim: SphereDim,
    rho: f64,
    hint: Option<ZeroHint>,
) -> Result<BruteStability> {
    let sharp_hint = hint.filter(|h| h.role != ZeroRole::NuPlusTwo);
    let c = sharp::sharp_constant(dim, rho, sharp_hint)?;
    let k_max = coefficients::truncation_index(dim, rho)?;
    let seq = coefficients::lambda_sequence(dim, rho, k_max as usize + 1)?;
    let mut best = f64::INFINITY;
    for (k, &l) in seq.iter().enumerate() {
        if !c.argmax_degrees().contains(&(k as u32)) {
            best = best.min(c.value - l);
        }
    }
    // Degrees beyond k_max contribute C - Lambda_k >= C - tail; the infimum
    // is certified as long as it undercuts that floor.
    let tail = coefficients::lambda_tail_bound(dim, rho, k_max);
    if !(best <= c.value - tail) {
        return Err(Error::Internal(format!(
            "tail bound {tail} does not certify the stability infimum {best} \
             at d = {}, rho = {rho}",
            dim.d()
        )));
    }
    let collect_within = |tol: f64| -> BTreeSet<u32> {
        seq.iter()
            .enumerate()
            .filter(|(k, &l)| {
                !c.argmax_degrees().contains(&(*k as u32)) && (c.value - l) - best <= tol
            })
            .map(|(k, _)| k as u32)
            .collect()
    };
    Ok(BruteStability {
        value: best,
        argmin: collect_within(sharp::ARGMAX_TIE_TOL * c.value),
        near_ties: collect_within(NEAR_TIE_GRAY * c.value),
        k_max,
    })
}

/// Outcome of the randomized sandwich verification.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub d: u32,
    pub rho: f64,
    pub trials: u32,
    pub seed: u64,
    pub violations: Vec<String>,
}

impl SandwichReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

const MIXTURE_DEGREE_POOL: u32 = 12;
/// Weight floor above which a non-extremal degree must open a strict gap.
const STRICT_GAP_WEIGHT: f64 = 0.1;

/// Checks the sandwich on `trials` seeded pseudo-random mixtures. Every
/// fifth trial restricts the support to maximiser plus equality degrees so
/// that the left-equality characterization is exercised, not just the
/// generic strict inequality.
pub fn verify_sandwich(
    dim: SphereDim,
    rho: f64,
    trials: u32,
    seed: u64,
    hint: Option<ZeroHint>,
) -> Result<SandwichReport> {
    if trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let sharp_hint = hint.filter(|h| h.role != ZeroRole::NuPlusTwo);
    let c = sharp::sharp_constant(dim, rho, sharp_hint)?;
    let s = stability_constant(dim, rho, hint)?;
    let lambdas =
        coefficients::lambda_sequence(dim, rho, MIXTURE_DEGREE_POOL as usize + 1)?;
    let extremal: BTreeSet<u32> = c
        .argmax_degrees()
        .iter()
        .chain(s.equality_degrees.iter())
        .cloned()
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for trial in 0..trials {
        let pool: Vec<u32> = if trial % 5 == 0 {
            extremal.iter().cloned().collect()
        } else {
            (0..=MIXTURE_DEGREE_POOL).collect()
        };
        let size = rng.gen_range(1..=pool.len());
        let support: Vec<u32> = pool
            .choose_multiple(&mut rng, size)
            .cloned()
            .collect();
        let pairs: Vec<(u32, f64)> = support
            .iter()
            .map(|&k| (k, 1.0 - rng.gen::<f64>()))
            .collect();
        let f = HarmonicMixture::from_pairs(&pairs)?;
        let mut deficit = 0.0;
        let mut distance_sq = 0.0;
        for (&k, &w) in f.weights() {
            if c.argmax_degrees().contains(&k) {
                continue;
            }
            deficit += (c.value - lambdas[k as usize]) * w;
            distance_sq += w;
        }
        let lower = s.value * distance_sq;
        let upper = c.value * distance_sq;
        let slack = 1e-11 * upper.max(1.0);
        let mut fail = |msg: String| violations.push(format!("trial {trial}: {msg}"));
        if deficit < lower - slack || deficit > upper + slack {
            fail(format!(
                "sandwich violated: lower {lower}, deficit {deficit}, upper {upper}"
            ));
        }
        if distance_sq == 0.0 && deficit.abs() > 1e-12 {
            fail(format!("support inside maximiser space but deficit {deficit} != 0"));
        }
        // strictness of the right inequality is only checkable when the
        // expected gap (the Lambda mass off the maximiser set) survives
        // rounding against upper
        let expected_gap: f64 = f
            .weights()
            .iter()
            .filter(|(k, _)| !c.argmax_degrees().contains(k))
            .map(|(&k, &w)| lambdas[k as usize] * w)
            .sum();
        if expected_gap > 1e-12 * upper && !(deficit < upper) {
            fail(format!(
                "right equality at positive distance: deficit {deficit}, upper {upper}"
            ));
        }
        let outside_weight: f64 = f
            .weights()
            .iter()
            .filter(|(k, _)| !extremal.contains(k))
            .map(|(_, &w)| w)
            .sum();
        if outside_weight == 0.0 {
            if (deficit - lower).abs() > 1e-11 * lower.max(1e-300) {
                fail(format!(
                    "left equality missed on extremal support: deficit {deficit}, lower {lower}"
                ));
            }
        } else if outside_weight >= STRICT_GAP_WEIGHT && deficit - lower <= 1e-11 {
            fail(format!(
                "no strict gap despite outside weight {outside_weight}: \
                 deficit {deficit}, lower {lower}"
            ));
        }
    }
    Ok(SandwichReport {
        d: dim.d(),
        rho,
        trials,
        seed,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: u32) -> SphereDim {
        SphereDim::new(d).unwrap()
    }

    fn hint(role: ZeroRole, index: usize) -> Option<ZeroHint> {
        Some(ZeroHint { role, index })
    }

    fn zero_of(d: u32, role: ZeroRole, index: usize) -> f64 {
        sharp::resolve_hint(dim(d), ZeroHint { role, index }).unwrap()
    }

    #[test]
    fn mixture_validation() {
        assert!(HarmonicMixture::from_pairs(&[]).is_err());
        assert!(HarmonicMixture::from_pairs(&[(0, 0.0)]).is_err());
        assert!(HarmonicMixture::from_pairs(&[(0, -1.0)]).is_err());
        let f = HarmonicMixture::from_pairs(&[(0, 1.0), (3, 0.5)]).unwrap();
        assert_eq!(f.total(), 1.5);
        assert_eq!(f.max_degree(), 3);
    }

    #[test]
    fn deficit_on_maximisers_is_zero() {
        let f = HarmonicMixture::from_pairs(&[(0, 2.0)]).unwrap();
        let r = deficit(&f, dim(2), 1.0, None).unwrap();
        assert_eq!(r.deficit, 0.0);
        assert_eq!(r.distance_sq, 0.0);
    }

    #[test]
    fn deficit_equals_consecutive_gap() {
        let f = HarmonicMixture::from_pairs(&[(0, 1.0), (1, 1.0)]).unwrap();
        let r = deficit(&f, dim(2), 1.0, None).unwrap();
        let gap = coefficients::gap_consecutive(0, dim(2), 1.0).unwrap();
        assert!((r.deficit - gap).abs() < 1e-14);
        assert_eq!(r.distance_sq, 1.0);
    }

    #[test]
    fn case_table_matches_brute_force_on_grid() {
        for d in 2..=6u32 {
            let dm = dim(d);
            let mut rho = 0.13;
            while rho <= 20.0 {
                let s = stability_constant(dm, rho, None).unwrap();
                let b = brute_force_stability(dm, rho, None).unwrap();
                assert!(
                    (s.value - b.value).abs() <= 1e-10,
                    "d={d} rho={rho}: {} vs {}",
                    s.value,
                    b.value
                );
                assert!(b.confirms(&s.equality_degrees), "d={d} rho={rho}: {:?} vs {:?}", s.equality_degrees, b.argmin);
                let c = sharp::sharp_constant(dm, rho, None).unwrap();
                assert!(s.value > 0.0 && s.value <= c.value + 1e-15);
                assert!(s
                    .equality_degrees
                    .intersection(c.argmax_degrees())
                    .next()
                    .is_none());
                rho += 0.37;
            }
        }
    }

    #[test]
    fn hinted_zero_rows_match_brute_force() {
        for d in [2u32, 3, 5] {
            let dm = dim(d);
            for idx in 1..=2usize {
                for role in [ZeroRole::Nu, ZeroRole::NuPlusOne, ZeroRole::NuPlusTwo] {
                    let z = zero_of(d, role, idx);
                    let s = stability_constant(dm, z, hint(role, idx)).unwrap();
                    let b = brute_force_stability(dm, z, hint(role, idx)).unwrap();
                    assert!(
                        (s.value - b.value).abs() <= 1e-10,
                        "d={d} {role:?} idx={idx}: {} vs {}",
                        s.value,
                        b.value
                    );
                    assert_eq!(s.equality_degrees, b.argmin, "d={d} {role:?} idx={idx}");
                }
            }
        }
    }

    #[test]
    fn triple_row_at_zero_of_next_order() {
        // at a zero of J_{nu+2} the second-best value ties across degrees 1..3
        let z = zero_of(2, ZeroRole::NuPlusTwo, 1);
        let s = stability_constant(dim(2), z, hint(ZeroRole::NuPlusTwo, 1)).unwrap();
        assert_eq!(s.case, CaseTag::PosProduct);
        assert_eq!(s.subcase, Subcase::SelectorZero);
        assert_eq!(s.equality_degrees, BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn j_frak_forms_agree() {
        for d in 2..=7u32 {
            let mut rho = 0.19;
            while rho < 40.0 {
                let a = j_frak(dim(d), rho).unwrap();
                let b = j_frak_sum(dim(d), rho).unwrap();
                assert!((a - b).abs() <= 1e-11, "d={d} rho={rho}: {a} vs {b}");
                rho += 0.83;
            }
        }
    }

    #[test]
    fn j_frak_positive_at_higher_zeros_in_symmetry_breaking_case() {
        // if J_{nu+4} vanishes while the pair (d, rho) sits in the
        // symmetry-breaking case, the combination must come out positive.
        // Empirically the premise never triggers at moderate rho: at
        // j_{nu+4,m} the product J_nu J_{nu+1} is ~ sin of twice the McMahon
        // phase correction, hence positive — so also assert that every such
        // classifiable zero lands in the constants-maximise case.
        for d in 2..=7u32 {
            let table = bessel::zeros_up_to(dim(d).order(4), 60.0).unwrap();
            for &z in table.zeros() {
                match sharp::classify_case(dim(d), z, None) {
                    Ok(CaseTag::NegProduct) => {
                        assert!(j_frak(dim(d), z).unwrap() > 0.0, "d={d} z={z}")
                    }
                    Ok(case) => assert_eq!(case, CaseTag::PosProduct, "d={d} z={z}"),
                    Err(_) => {} // zero band of a neighbouring order
                }
            }
        }
    }

    #[test]
    fn consistency_of_j_frak_with_lambda_gap() {
        // Lambda_0 - Lambda_3 telescopes to the three-product sum
        for &(d, rho) in &[(2u32, 3.0f64), (3, 6.2), (5, 11.0)] {
            let seq = coefficients::lambda_sequence(dim(d), rho, 4).unwrap();
            let v = j_frak(dim(d), rho).unwrap();
            assert!(((seq[0] - seq[3]) - v).abs() <= 1e-11, "d={d} rho={rho}");
        }
    }

    #[test]
    fn symmetry_breaking_subcases_both_occur() {
        let mut pos = 0;
        let mut neg = 0;
        let mut rho = 0.13;
        while rho <= 40.0 {
            if let Ok(CaseTag::NegProduct) = sharp::classify_case(dim(2), rho, None) {
                let s = stability_constant(dim(2), rho, None).unwrap();
                match s.subcase {
                    Subcase::SelectorPositive => {
                        assert_eq!(s.equality_degrees, BTreeSet::from([0]));
                        pos += 1;
                    }
                    Subcase::SelectorNegative => {
                        assert_eq!(s.equality_degrees, BTreeSet::from([3]));
                        neg += 1;
                    }
                    Subcase::SelectorZero => unreachable!(),
                }
            }
            rho += 0.11;
        }
        assert!(pos > 0, "no selector-positive symmetry-breaking sample");
        assert!(neg > 0, "no selector-negative symmetry-breaking sample");
    }

    #[test]
    fn sup_side_of_the_infimum_set_reaches_c() {
        let dm = dim(2);
        let rho = 5.0;
        let c = sharp::sharp_constant(dm, rho, None).unwrap();
        let k_max = coefficients::truncation_index(dm, rho).unwrap();
        let seq = coefficients::lambda_sequence(dm, rho, k_max as usize + 1).unwrap();
        let min_lambda = seq
            .iter()
            .enumerate()
            .filter(|(k, _)| !c.argmax_degrees().contains(&(*k as u32)))
            .map(|(_, &l)| l)
            .fold(f64::INFINITY, f64::min);
        // sup over the candidate set of (C - Lambda_k) = C - min Lambda_k -> C
        assert!(min_lambda >= 0.0 && min_lambda < 1e-10);
    }

    #[test]
    fn sandwich_holds_on_random_mixtures() {
        for &(d, rho) in &[(2u32, 1.0f64), (2, 3.0), (3, 7.3), (5, 12.1)] {
            let r = verify_sandwich(dim(d), rho, 400, 7, None).unwrap();
            assert!(r.pass(), "d={d} rho={rho}: {:?}", r.violations.first());
        }
        let z = zero_of(2, ZeroRole::Nu, 1);
        let r = verify_sandwich(dim(2), z, 400, 11, hint(ZeroRole::Nu, 1)).unwrap();
        assert!(r.pass(), "{:?}", r.violations.first());
    }

    #[test]
    fn left_equality_on_extremal_support() {
        // M = {0}, E = {1} at d=2, rho=1; the gap to degree 1 is exactly S
        let f = HarmonicMixture::from_pairs(&[(0, 0.3), (1, 0.7)]).unwrap();
        let r = deficit(&f, dim(2), 1.0, None).unwrap();
        assert!((r.deficit - r.lower).abs() <= 1e-13 * r.lower.max(1.0));
        assert!(r.deficit <= r.upper);
    }

    #[test]
    fn strict_gap_with_non_extremal_mass() {
        let f = HarmonicMixture::from_pairs(&[(0, 1.0), (4, 0.5)]).unwrap();
        let r = deficit(&f, dim(2), 1.0, None).unwrap();
        assert!(r.deficit - r.lower > 1e-6);
    }
}
