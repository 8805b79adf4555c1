//! The coefficient schedule of the weighted-count test function, its
//! endoscopic transfer at central elements, and the sign or vanishing of the
//! central-element main term.
//!
//! Transfer magnitudes are tracked only as symbolic positive constants; the
//! exact content is support predicates, signs, and vanishing.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::combinatorics::{binomial, solve_unitriangular, HalfInt, TriangularSystem};
use crate::error::{Error, Result};
use crate::localfield::{valid_conductor, Conductor, PlaceData, Splitting, ValidityMode, ValidityReport};
use crate::oldforms::{closed_form_trace, TraceCase};

/// Coefficients `a_N(k, i)` of the conductor-isolating test function: the
/// function is the sum over shifts `i` of `a_N(k,i)` times the twisted coset
/// indicator at level `k - i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSchedule {
    pub case: TraceCase,
    pub n: u32,
    pub k: u32,
    /// shift -> coefficient; zero coefficients are not stored
    pub coeffs: BTreeMap<u32, BigInt>,
}

impl CoefficientSchedule {
    /// Coefficient at a shift (zero when absent).
    pub fn at(&self, shift: u32) -> BigInt {
        self.coeffs.get(&shift).cloned().unwrap_or_else(BigInt::zero)
    }
}

/// Solve the unitriangular system over the trace profile: the unique
/// schedule whose convolution with the profile is the delta at 0.
pub fn coefficient_schedule(case: TraceCase, n: u32, k: u32) -> CoefficientSchedule {
    assert!(n >= 2);
    let sys = TriangularSystem::from_fn(k as usize, |j| closed_form_trace(case, n, j as u32))
        .expect("trace profiles start at 1");
    let a = solve_unitriangular(&sys);
    let coeffs = a
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as u32, c))
        .collect();
    CoefficientSchedule { case, n, k, coeffs }
}

/// The closed forms, where they exist: for even `N` nonsplit the shift-`2i`
/// coefficient is `(-1)^i C(N/2, i)` (odd shifts vanish); split places get
/// `(-1)^i C(N, i)` at shift `i`. Returns `None` for odd `N` nonsplit, where
/// no closed form is available.
pub fn closed_form_schedule(case: TraceCase, n: u32, k: u32) -> Option<BTreeMap<u32, BigInt>> {
    let mut out = BTreeMap::new();
    match case {
        TraceCase::ConjSplit => {
            for i in 0..=k.min(n) {
                let c = binomial(n as i64, i as i64);
                if !c.is_zero() {
                    out.insert(i, if i % 2 == 0 { c } else { -c });
                }
            }
            Some(out)
        }
        TraceCase::SelfDual | TraceCase::ConjNonsplit => {
            if n % 2 != 0 {
                return None;
            }
            for i in 0..=(k / 2).min(n / 2) {
                let c = binomial(n as i64 / 2, i as i64);
                if !c.is_zero() {
                    out.insert(2 * i, if i % 2 == 0 { c } else { -c });
                }
            }
            Some(out)
        }
    }
}

/// Congruence support of a transferred coset indicator restricted to
/// central elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportPredicate {
    /// Unit gamma congruent to 1 mod p^k (split places).
    UnitCongruentOne { k: u32 },
    /// -gamma lies in the phi-image of `1 + p_w^k` (inert places).
    MinusGammaInPhiImage { k: u32 },
    /// gamma congruent to -1 mod the different (ramified, level 0).
    CongruentMinusOneModDifferent,
    /// Identically zero transfer.
    Empty,
}

/// Central transfer data of one coset indicator at one place: support
/// predicate, sign, and a symbolic positive magnitude tag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralTransferProfile {
    pub place: String,
    pub k_local: u32,
    pub support: SupportPredicate,
    /// -1, 0, or +1; 0 exactly when the support is empty.
    pub sign: i8,
    /// Tag for the undetermined positive Haar-measure constant.
    pub magnitude: &'static str,
}

/// Transfer of the level-`k` coset indicator at central elements, by
/// splitting type: split places keep sign `+` on units congruent to 1;
/// inert places carry sign `(-1)^k` on `-gamma` in the phi-image; ramified
/// places transfer to zero for `k > 0` and to sign `+` on
/// `gamma = -1 mod D` at level 0.
pub fn conj_local_profile(v: &PlaceData, k_local: u32) -> CentralTransferProfile {
    let magnitude = "positive-haar-constant";
    let (support, sign) = match v.splitting {
        Splitting::Split => (SupportPredicate::UnitCongruentOne { k: k_local }, 1),
        Splitting::Inert => (
            SupportPredicate::MinusGammaInPhiImage { k: k_local },
            if k_local % 2 == 0 { 1 } else { -1 },
        ),
        Splitting::TameRamified | Splitting::WildRamified => {
            if k_local > 0 {
                (SupportPredicate::Empty, 0)
            } else {
                (SupportPredicate::CongruentMinusOneModDifferent, 1)
            }
        }
    };
    CentralTransferProfile { place: v.id.clone(), k_local, support, sign, magnitude }
}

/// Value of the transferred weighted-count function at the identity in the
/// even self-dual case, up to one global positive constant: zero as soon as
/// some exponent is odd or exceeds `N`, otherwise the product of
/// `(-1)^{k_v/2} C(N/2, k_v/2)`.
#[derive(Clone, Debug, Serialize)]
pub struct TransferAtIdentity {
    pub value: BigInt,
    /// Places whose exponent forces vanishing, with the triggered clause.
    pub vanishing: Vec<(String, String)>,
}

pub fn selfdual_transfer_at_identity(n: u32, c: &Conductor) -> Result<TransferAtIdentity> {
    if n % 2 != 0 {
        return Err(Error::invalid("the identity-transfer formula needs even N"));
    }
    let mut vanishing = Vec::new();
    let mut value = BigInt::one();
    for (id, k) in c.iter() {
        let kv = k
            .as_int()
            .ok_or_else(|| Error::invalid(format!("place {id}: self-dual conductors have integer exponents")))?;
        if kv % 2 != 0 {
            vanishing.push((id.clone(), "odd-exponent".to_string()));
            continue;
        }
        if kv > n as i64 {
            vanishing.push((id.clone(), "exponent-exceeds-rank".to_string()));
        }
        let half = kv / 2;
        let b = binomial(n as i64 / 2, half);
        let signed = if half % 2 == 0 { b } else { -b };
        value *= signed;
    }
    if !vanishing.is_empty() {
        value = BigInt::zero();
    }
    Ok(TransferAtIdentity { value, vanishing })
}

/// Character-constraint data for the central-element sum: the minimal
/// divisor `m` of the unramified part of the conductor such that the
/// character is trivial on `(1 + m D) cap O_E^x`. Triviality is
/// upward-closed under divisibility, so one generator describes the whole
/// pattern.
#[derive(Clone, Debug, Default)]
pub struct OmegaPattern {
    pub infinity_nontrivial: bool,
    pub min_trivial: Option<Conductor>,
}

/// Sign report for the central-element main term.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaSignReport {
    pub vanishes: bool,
    /// Present exactly when `vanishes` is false.
    pub sign: Option<i8>,
    /// Whether the nonvanishing claim rests on the expected-nonvanishing
    /// conjecture rather than the proven corollary.
    pub conjectural: bool,
    /// The contributing divisor (unramified part of the conductor).
    pub contributing_divisor: Vec<(String, HalfInt)>,
    /// The character constraints under which the sign is proven.
    pub omega_constraints: String,
    /// Clauses that triggered the verdict.
    pub conditions: Vec<String>,
}

/// Decide vanishing and sign of the main term
/// `sum_{gamma central} omega^{-1}(gamma) f(gamma)`.
///
/// Self-dual: vanishes iff the identity transfer does; otherwise the sign is
/// `(-1)^{sum_v k_v/2}` and unconditional. Conjugate: vanishes (proven) iff
/// some ramified place has half-integral exponent or exponent above `N/2`;
/// otherwise the sign is `prod_v (-1)^{k_v}`, unconditional exactly when the
/// supplied character pattern has its minimal trivial divisor equal to the
/// unramified part of the conductor, conjectural otherwise.
pub fn lambda_sign(
    case: TraceCase,
    n: u32,
    c: &Conductor,
    places: &[PlaceData],
    omega: &OmegaPattern,
) -> Result<LambdaSignReport> {
    if n % 2 != 0 {
        return Err(Error::invalid("the main-term sign needs even N"));
    }
    c.validate_against(places)?;
    match case {
        TraceCase::SelfDual => {
            let t = selfdual_transfer_at_identity(n, c)?;
            let mut conditions: Vec<String> =
                t.vanishing.iter().map(|(id, why)| format!("selfdual-{why}@{id}")).collect();
            if t.value.is_zero() {
                if conditions.is_empty() {
                    conditions.push("selfdual-binomial-vanishing".to_string());
                }
                return Ok(LambdaSignReport {
                    vanishes: true,
                    sign: None,
                    conjectural: false,
                    contributing_divisor: vec![],
                    omega_constraints: "none".to_string(),
                    conditions,
                });
            }
            let sign = if t.value.is_negative() { -1 } else { 1 };
            conditions.push("selfdual-alternating-product".to_string());
            Ok(LambdaSignReport {
                vanishes: false,
                sign: Some(sign),
                conjectural: false,
                contributing_divisor: c.iter().map(|(id, k)| (id.clone(), *k)).collect(),
                omega_constraints: "none".to_string(),
                conditions,
            })
        }
        TraceCase::ConjNonsplit | TraceCase::ConjSplit => {
            let mut conditions = Vec::new();
            for v in places.iter().filter(|v| v.is_ramified()) {
                let k = c.exponent(&v.id);
                if !k.is_integral() {
                    conditions.push(format!("conj-ramified-halfintegral@{}", v.id));
                } else if k.cmp_fraction(n as i64, 2) == std::cmp::Ordering::Greater {
                    conditions.push(format!("conj-ramified-exponent-above-half-rank@{}", v.id));
                }
            }
            if !conditions.is_empty() {
                return Ok(LambdaSignReport {
                    vanishes: true,
                    sign: None,
                    conjectural: false,
                    contributing_divisor: vec![],
                    omega_constraints: "none".to_string(),
                    conditions,
                });
            }
            // sign of prod_v (-1)^{k_v} over the support
            let mut parity = 0i64;
            for (_, k) in c.iter() {
                parity += k.as_int().expect("ramified exponents are integral here");
            }
            let sign = if parity % 2 == 0 { 1 } else { -1 };
            let n_ur = c.unramified_part(places)?;
            let proven = matches!(&omega.min_trivial, Some(m) if *m == n_ur);
            conditions.push("conj-alternating-product".to_string());
            conditions.push(if proven {
                "conj-omega-exact-level".to_string()
            } else {
                "conj-omega-unverified-expected-nonvanishing".to_string()
            });
            Ok(LambdaSignReport {
                vanishes: false,
                sign: Some(sign),
                conjectural: !proven,
                contributing_divisor: n_ur.iter().map(|(id, k)| (id.clone(), *k)).collect(),
                omega_constraints:
                    "trivial on (1 + n_ur D) cap O_E^x and nontrivial on (1 + n' D) cap O_E^x for proper n' | n_ur"
                        .to_string(),
                conditions,
            })
        }
    }
}

/// Positivity report for the unweighted-count transfer.
#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    pub holds: bool,
    pub reasons: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validity: Option<ValidityReport>,
}

/// Hypotheses under which the unweighted-count transfer is strictly
/// positive.
///
/// Self-dual: every place needs `k_v >= c(omega'_v)` (conductor of the
/// transferred central character, supplied by the caller, zero when absent),
/// and a nontrivial archimedean character needs a nontrivial conductor.
/// Conjugate: the conductor must be valid, or 0-valid when the archimedean
/// character is trivial.
pub fn c_positivity(
    case: TraceCase,
    n: u32,
    c: &Conductor,
    places: &[PlaceData],
    omega_infinity_nontrivial: bool,
    omega_local_conductors: &BTreeMap<String, u32>,
) -> Result<PositivityReport> {
    c.validate_against(places)?;
    match case {
        TraceCase::SelfDual => {
            let mut reasons = Vec::new();
            let mut holds = true;
            for v in places {
                let bound = omega_local_conductors.get(&v.id).copied().unwrap_or(0);
                let k = c.exponent(&v.id);
                if k.cmp_fraction(bound as i64, 1) == std::cmp::Ordering::Less {
                    holds = false;
                    reasons.push(format!(
                        "exponent at {} is below the central-character conductor {bound}",
                        v.id
                    ));
                }
            }
            if omega_infinity_nontrivial && c.is_empty() {
                holds = false;
                reasons.push("nontrivial archimedean character needs a nontrivial conductor".to_string());
            }
            if holds {
                reasons.push("central-character conductor bounds hold at every place".to_string());
            }
            Ok(PositivityReport { holds, reasons, validity: None })
        }
        TraceCase::ConjNonsplit | TraceCase::ConjSplit => {
            if n < 4 {
                return Err(Error::OutOfScope(
                    "conjugate positivity is established for even N at least 4".to_string(),
                ));
            }
            let valid = valid_conductor(c, places, n, ValidityMode::Valid)?;
            if valid.holds {
                return Ok(PositivityReport {
                    holds: true,
                    reasons: vec!["conductor is valid".to_string()],
                    validity: Some(valid),
                });
            }
            if !omega_infinity_nontrivial {
                let zero = valid_conductor(c, places, n, ValidityMode::ZeroValid)?;
                if zero.holds {
                    return Ok(PositivityReport {
                        holds: true,
                        reasons: vec![
                            "conductor is 0-valid and the archimedean character is trivial".to_string(),
                        ],
                        validity: Some(zero),
                    });
                }
                return Ok(PositivityReport {
                    holds: false,
                    reasons: vec!["conductor is neither valid nor 0-valid".to_string()],
                    validity: Some(zero),
                });
            }
            Ok(PositivityReport {
                holds: false,
                reasons: vec![
                    "conductor is not valid and the archimedean character is nontrivial".to_string(),
                ],
                validity: Some(valid),
            })
        }
    }
}

/// The structural identity behind the identity-transfer formula: the value
/// equals the product over supported places of the shift-maximal schedule
/// coefficient `a_N(k_v, k_v)`.
pub fn shift_maximal_product(n: u32, c: &Conductor) -> Result<BigInt> {
    let mut acc = BigInt::one();
    for (id, k) in c.iter() {
        let kv = k
            .as_int()
            .ok_or_else(|| Error::invalid(format!("place {id}: integer exponent required")))?;
        let sched = coefficient_schedule(TraceCase::SelfDual, n, kv as u32);
        acc *= sched.at(kv as u32);
    }
    Ok(acc)
}
