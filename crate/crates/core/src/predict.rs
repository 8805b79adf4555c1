//! Scenario-level decision pipeline: ingest a scenario (case, rank, places,
//! conductor, optional character data), run the equidistribution-vs-bias
//! decision, and emit a deterministic machine-readable report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::HalfInt;
use crate::error::{Error, Result};
use crate::localfield::{Conductor, PlaceData, Splitting};
use crate::oldforms::TraceCase;
use crate::transfer::{c_positivity, lambda_sign, OmegaPattern, PositivityReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    SelfDual,
    ConjugateSelfDual,
}

/// A scenario file: the full input of the prediction pipeline.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub case: Case,
    pub n: u32,
    pub places: Vec<PlaceData>,
    pub conductor: Conductor,
    /// Optional per-place exponent multisets of the archimedean character.
    pub infchar: Option<Vec<Vec<HalfInt>>>,
    pub omega: OmegaPattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "yes")]
    Yes,
    #[serde(rename = "no")]
    No,
    #[serde(rename = "conjectural-no")]
    ConjecturalNo,
    #[serde(rename = "blocked")]
    Blocked,
}

#[derive(Clone, Debug, Serialize)]
pub struct BiasFactor {
    pub place: String,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArchimedeanFactor {
    /// The reported bias is relative to the archimedean root number unless a
    /// conventional value is computed from the supplied character.
    pub convention_dependent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conventional_sign: Option<i8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Condition {
    pub rule: String,
    pub clause: String,
}

/// The prediction output. Serialization order is fixed; places are reported
/// in id order, making reports byte-identical for identical scenarios.
#[derive(Clone, Debug, Serialize)]
pub struct PredictionReport {
    pub case: Case,
    pub n: u32,
    pub equidistributes: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias_sign: Option<i8>,
    pub bias_factors: Vec<BiasFactor>,
    pub archimedean: ArchimedeanFactor,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_conjectural: Option<bool>,
    pub c_positivity: PositivityReport,
    pub conditions: Vec<Condition>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        for p in &self.places {
            p.validate()?;
        }
        let mut ids: Vec<&str> = self.places.iter().map(|p| p.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != self.places.len() {
            return Err(Error::invalid("duplicate place ids"));
        }
        self.conductor.validate_against(&self.places)?;
        if let Some(ic) = &self.infchar {
            for place in ic {
                if place.len() != self.n as usize {
                    return Err(Error::invalid("archimedean character rank must equal N"));
                }
            }
        }
        if let Some(m) = &self.omega.min_trivial {
            m.validate_against(&self.places)?;
        }
        Ok(())
    }

    fn trace_case(&self) -> TraceCase {
        match self.case {
            Case::SelfDual => TraceCase::SelfDual,
            Case::ConjugateSelfDual => TraceCase::ConjNonsplit,
        }
    }
}

/// The conventional archimedean root number: each strictly positive
/// half-integral exponent `w/2` of a discrete-series pair contributes
/// `i^{w+1} = (-1)^{(w+1)/2}`; product over places. `None` when the
/// character is absent or not of that shape.
fn conventional_archimedean_sign(infchar: &Option<Vec<Vec<HalfInt>>>) -> Option<i8> {
    let ic = infchar.as_ref()?;
    let mut sign = 1i8;
    for place in ic {
        for e in place {
            if e.is_integral() {
                return None;
            }
            if e.is_positive() {
                let w = e.doubled(); // odd
                if (w + 1) % 4 != 0 {
                    sign = -sign;
                }
            }
        }
    }
    Some(sign)
}

/// Run the decision pipeline.
///
/// Self-dual: equidistribution holds iff some exponent is odd or exceeds
/// `N`; otherwise the counts carry an alternating bias of sign
/// `(-1)^{sum_v k_v / 2}` relative to the archimedean factor.
///
/// Conjugate: the hypotheses require a valid conductor (0-valid when the
/// archimedean character is trivial) — otherwise blocked; equidistribution
/// holds iff some ramified exponent is half-integral or exceeds `N/2`;
/// otherwise the expected bias has sign `prod_v (-1)^{k_v}`, conjectural.
pub fn predict(s: &Scenario) -> Result<PredictionReport> {
    if s.n % 2 != 0 {
        return Err(Error::OutOfScope(
            "odd rank: the method addresses even N only".to_string(),
        ));
    }
    s.validate()?;
    let mut conditions = Vec::new();
    match s.case {
        Case::SelfDual => {
            let positivity =
                c_positivity(TraceCase::SelfDual, s.n, &s.conductor, &s.places, false, &BTreeMap::new())?;
            let lam = lambda_sign(s.trace_case(), s.n, &s.conductor, &s.places, &s.omega)?;
            for c in &lam.conditions {
                conditions.push(Condition { rule: c.clone(), clause: clause_text(c) });
            }
            let archimedean = ArchimedeanFactor {
                convention_dependent: true,
                conventional_sign: conventional_archimedean_sign(&s.infchar),
            };
            if lam.vanishes {
                Ok(PredictionReport {
                    case: s.case,
                    n: s.n,
                    equidistributes: Verdict::Yes,
                    bias_sign: None,
                    bias_factors: vec![],
                    archimedean,
                    sign_conjectural: None,
                    c_positivity: positivity,
                    conditions,
                })
            } else {
                let factors = per_place_signs_selfdual(&s.conductor);
                Ok(PredictionReport {
                    case: s.case,
                    n: s.n,
                    equidistributes: Verdict::No,
                    bias_sign: lam.sign,
                    bias_factors: factors,
                    archimedean,
                    sign_conjectural: Some(false),
                    c_positivity: positivity,
                    conditions,
                })
            }
        }
        Case::ConjugateSelfDual => {
            if s.n < 4 {
                return Err(Error::OutOfScope(
                    "conjugate prediction needs even N at least 4".to_string(),
                ));
            }
            let positivity = c_positivity(
                s.trace_case(),
                s.n,
                &s.conductor,
                &s.places,
                s.omega.infinity_nontrivial,
                &BTreeMap::new(),
            )?;
            let archimedean = ArchimedeanFactor { convention_dependent: true, conventional_sign: None };
            if !positivity.holds {
                conditions.push(Condition {
                    rule: "conj-hypotheses-fail".to_string(),
                    clause: "the conductor validity hypotheses of the counting theorem fail".to_string(),
                });
                return Ok(PredictionReport {
                    case: s.case,
                    n: s.n,
                    equidistributes: Verdict::Blocked,
                    bias_sign: None,
                    bias_factors: vec![],
                    archimedean,
                    sign_conjectural: None,
                    c_positivity: positivity,
                    conditions,
                });
            }
            let lam = lambda_sign(s.trace_case(), s.n, &s.conductor, &s.places, &s.omega)?;
            for c in &lam.conditions {
                conditions.push(Condition { rule: c.clone(), clause: clause_text(c) });
            }
            if lam.vanishes {
                Ok(PredictionReport {
                    case: s.case,
                    n: s.n,
                    equidistributes: Verdict::Yes,
                    bias_sign: None,
                    bias_factors: vec![],
                    archimedean,
                    sign_conjectural: None,
                    c_positivity: positivity,
                    conditions,
                })
            } else {
                let factors = per_place_signs_conj(&s.conductor);
                Ok(PredictionReport {
                    case: s.case,
                    n: s.n,
                    equidistributes: Verdict::ConjecturalNo,
                    bias_sign: lam.sign,
                    bias_factors: factors,
                    archimedean,
                    sign_conjectural: Some(lam.conjectural),
                    c_positivity: positivity,
                    conditions,
                })
            }
        }
    }
}

fn per_place_signs_selfdual(c: &Conductor) -> Vec<BiasFactor> {
    c.iter()
        .map(|(id, k)| BiasFactor {
            place: id.clone(),
            sign: if (k.as_int().unwrap_or(0) / 2) % 2 == 0 { 1 } else { -1 },
        })
        .collect()
}

fn per_place_signs_conj(c: &Conductor) -> Vec<BiasFactor> {
    c.iter()
        .map(|(id, k)| BiasFactor {
            place: id.clone(),
            sign: if k.as_int().unwrap_or(0) % 2 == 0 { 1 } else { -1 },
        })
        .collect()
}

fn clause_text(rule: &str) -> String {
    let base = rule.split('@').next().unwrap_or(rule);
    match base {
        "selfdual-odd-exponent" => "a conductor exponent is odd".to_string(),
        "selfdual-exponent-exceeds-rank" => "a conductor exponent exceeds the rank".to_string(),
        "selfdual-binomial-vanishing" => "the binomial transfer product vanishes".to_string(),
        "selfdual-alternating-product" => {
            "all exponents even and at most the rank: alternating binomial product".to_string()
        }
        "conj-ramified-halfintegral" => "a ramified exponent is half-integral".to_string(),
        "conj-ramified-exponent-above-half-rank" => {
            "a ramified exponent exceeds half the rank".to_string()
        }
        "conj-alternating-product" => "the transferred sum has sign alternating in the exponents".to_string(),
        "conj-omega-exact-level" => {
            "the central character is trivial at exactly the unramified level".to_string()
        }
        "conj-omega-unverified-expected-nonvanishing" => {
            "central-character constraints unverified; nonvanishing is the expected case".to_string()
        }
        other => other.to_string(),
    }
}

// --- scenario JSON ---

#[derive(Deserialize)]
struct ScenarioJson {
    case: Case,
    #[serde(rename = "N")]
    n: u32,
    places: Vec<PlaceJson>,
    #[serde(default)]
    conductor: Vec<ExponentJson>,
    #[serde(default)]
    infchar: Option<Vec<Vec<HalfInt>>>,
    #[serde(default)]
    omega_pattern: Option<OmegaJson>,
}

#[derive(Deserialize)]
struct PlaceJson {
    id: String,
    p: u64,
    f: u32,
    splitting: Splitting,
    j: HalfInt,
    b: i64,
    d_exp: u32,
}

#[derive(Deserialize)]
struct ExponentJson {
    place: String,
    exp: HalfInt,
}

#[derive(Deserialize)]
struct OmegaJson {
    #[serde(default)]
    infinity: Option<String>,
    #[serde(default)]
    min_trivial: Option<Vec<ExponentJson>>,
}

impl Scenario {
    pub fn from_json(data: &str) -> Result<Scenario> {
        let raw: ScenarioJson =
            serde_json::from_str(data).map_err(|e| Error::invalid(format!("scenario parse error: {e}")))?;
        let places: Vec<PlaceData> = raw
            .places
            .into_iter()
            .map(|p| PlaceData::new(p.id, p.p, p.f, p.splitting, p.j, p.b, p.d_exp))
            .collect::<Result<_>>()?;
        let conductor =
            Conductor::from_pairs(raw.conductor.into_iter().map(|e| (e.place, e.exp)))?;
        let omega = match raw.omega_pattern {
            None => OmegaPattern::default(),
            Some(o) => {
                let infinity_nontrivial = match o.infinity.as_deref() {
                    None | Some("trivial") => false,
                    Some("nontrivial") => true,
                    Some(other) => {
                        return Err(Error::invalid(format!("unknown archimedean pattern {other:?}")))
                    }
                };
                let min_trivial = o
                    .min_trivial
                    .map(|v| Conductor::from_pairs(v.into_iter().map(|e| (e.place, e.exp))))
                    .transpose()?;
                OmegaPattern { infinity_nontrivial, min_trivial }
            }
        };
        let scenario = Scenario { case: raw.case, n: raw.n, places, conductor, infchar: raw.infchar, omega };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl PredictionReport {
    /// Canonical JSON rendering: pretty-printed with stable ordering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
