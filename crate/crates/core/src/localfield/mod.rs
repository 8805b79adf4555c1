//! Finite places of the base field relative to a quadratic extension,
//! conductors with half-integer exponents at ramified places, and the
//! residue-ring oracles for the local transfer lemmas.

mod oracles;
mod ring;

pub use oracles::{
    compute_j_invariant, matrix_witness_search, norm_one_image_phi, witness_predicate, NormOneImage,
    WitnessOutcome,
};
pub use ring::{QuadDatum, ResidueRing, RingElt, Splitting, TruncatedQuadRing, WildPreset};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::HalfInt;
use crate::error::{Error, Result};

/// One finite place of `F` with its behavior in the quadratic extension and
/// the local invariants consumed by the conductor predicates.
///
/// `b` is an input: it depends on the global roots of unity, which this
/// module does not model. Use [`PlaceData::b_for_trivial_unit_obstruction`]
/// when the intersection of the roots of unity with `1 + D` is trivial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceData {
    pub id: String,
    pub p: u64,
    /// Residue degree of `F_v`.
    pub f: u32,
    pub splitting: Splitting,
    /// Ramification depth invariant (1/2 at unramified places).
    pub j: HalfInt,
    /// Central-character globalization invariant, at least -2.
    pub b: i64,
    /// Valuation of the different in `p_w`.
    pub d_exp: u32,
}

impl PlaceData {
    pub fn new(
        id: impl Into<String>,
        p: u64,
        f: u32,
        splitting: Splitting,
        j: HalfInt,
        b: i64,
        d_exp: u32,
    ) -> Result<Self> {
        let place = PlaceData { id: id.into(), p, f, splitting, j, b, d_exp };
        place.validate()?;
        Ok(place)
    }

    pub fn validate(&self) -> Result<()> {
        if self.f == 0 {
            return Err(Error::invalid(format!("place {}: residue degree must be positive", self.id)));
        }
        if self.b < -2 {
            return Err(Error::invalid(format!("place {}: b must be at least -2", self.id)));
        }
        match self.splitting {
            Splitting::Split | Splitting::Inert => {
                if self.d_exp != 0 || self.j != HalfInt::HALF {
                    return Err(Error::invalid(format!(
                        "place {}: unramified places need d_exp = 0 and j = 1/2",
                        self.id
                    )));
                }
            }
            Splitting::TameRamified => {
                if self.p == 2 || self.d_exp != 1 || self.j != HalfInt::ONE {
                    return Err(Error::invalid(format!(
                        "place {}: tame places need odd p, d_exp = 1, j = 1",
                        self.id
                    )));
                }
            }
            Splitting::WildRamified => {
                if self.p != 2 || self.j < HalfInt::ONE {
                    return Err(Error::invalid(format!(
                        "place {}: wild places need p = 2 and j >= 1",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ramification_index(&self) -> u32 {
        self.splitting.ramification_index()
    }

    pub fn is_ramified(&self) -> bool {
        self.splitting.is_ramified()
    }

    /// The value of `b` when the caller asserts that the global roots of
    /// unity meet `1 + D` trivially.
    pub fn b_for_trivial_unit_obstruction() -> i64 {
        -2
    }
}

/// A finite formal product `prod_v p_v^{k_v}` with positive exponents,
/// half-integral only at ramified places (globally indexed).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Conductor {
    exponents: BTreeMap<String, HalfInt>,
}

impl Conductor {
    pub fn new() -> Self {
        Conductor::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, HalfInt)>,
        S: Into<String>,
    {
        let mut c = Conductor::new();
        for (id, k) in pairs {
            c.set(id, k)?;
        }
        Ok(c)
    }

    pub fn set(&mut self, id: impl Into<String>, k: HalfInt) -> Result<()> {
        if !k.is_positive() {
            return Err(Error::invalid("conductor exponents must be positive"));
        }
        self.exponents.insert(id.into(), k);
        Ok(())
    }

    /// Exponent at a place, zero when absent.
    pub fn exponent(&self, id: &str) -> HalfInt {
        self.exponents.get(id).copied().unwrap_or(HalfInt::ZERO)
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &HalfInt)> {
        self.exponents.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &String> {
        self.exponents.keys()
    }

    /// Check exponent shapes against declared places: every supported place
    /// must be declared, and half-integral exponents may only occur at
    /// ramified places.
    pub fn validate_against(&self, places: &[PlaceData]) -> Result<()> {
        for (id, k) in self.exponents.iter() {
            let place = find_place(places, id)?;
            if !k.is_integral() && !place.is_ramified() {
                return Err(Error::invalid(format!(
                    "place {id}: half-integral exponent at an unramified place"
                )));
            }
        }
        Ok(())
    }

    /// The divisor supported on non-ramified places.
    pub fn unramified_part(&self, places: &[PlaceData]) -> Result<Conductor> {
        let mut out = Conductor::new();
        for (id, k) in self.exponents.iter() {
            if !find_place(places, id)?.is_ramified() {
                out.set(id.clone(), *k)?;
            }
        }
        Ok(out)
    }

    /// Does `self` divide `other` (componentwise)?
    pub fn divides(&self, other: &Conductor) -> bool {
        self.exponents.iter().all(|(id, k)| *k <= other.exponent(id))
    }
}

pub fn find_place<'a>(places: &'a [PlaceData], id: &str) -> Result<&'a PlaceData> {
    places
        .iter()
        .find(|p| p.id == id)
        .ok_or_else(|| Error::invalid(format!("undeclared place {id:?}")))
}

/// Resolve global vs local conductor indexing: the local index is `k_v` at
/// split/inert places and `2 k_v` at ramified ones, always an integer.
pub fn local_exponent(c: &Conductor, v: &PlaceData) -> Result<i64> {
    let k = c.exponent(&v.id);
    if v.is_ramified() {
        Ok(k.doubled())
    } else {
        k.as_int()
            .ok_or_else(|| Error::invalid(format!("place {}: half-integral exponent at an unramified place", v.id)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityMode {
    Valid,
    ZeroValid,
}

/// Outcome of the conductor validity predicates, with the witnessing or
/// failing places.
#[derive(Clone, Debug, Serialize)]
pub struct ValidityReport {
    pub holds: bool,
    pub mode: ValidityMode,
    /// Wildly ramified places violating their exponent window.
    pub wild_failures: Vec<String>,
    /// Places witnessing the globalization clause (valid mode only).
    pub witnesses: Vec<String>,
}

/// The per-place inequalities under which the unweighted-count transfer is
/// provably positive.
///
/// `mode = Valid`: every wildly ramified `v` has `k_v <= N/4` or
/// `k_v > 2 j_v - 1`, and the shifted exponents `max{floor(k_v - (j_v - 1/2)), 0}`
/// admit one place `>= b_v + 2/e_v` or two places `>= b_v + 1/e_v`.
///
/// `mode = ZeroValid`: every wildly ramified `v` has `k_v <= N/4` or
/// `k_v > 4 j_v - 2`.
///
/// Witness places are drawn from the declared place set; absent conductor
/// exponents are read as zero.
pub fn valid_conductor(
    c: &Conductor,
    places: &[PlaceData],
    n: u32,
    mode: ValidityMode,
) -> Result<ValidityReport> {
    if n % 2 != 0 {
        return Err(Error::invalid("validity predicates need even N"));
    }
    c.validate_against(places)?;
    let mut wild_failures = Vec::new();
    for v in places.iter().filter(|v| v.splitting == Splitting::WildRamified) {
        let k = c.exponent(&v.id);
        // k <= N/4
        let small = k.cmp_fraction(n as i64, 4) != std::cmp::Ordering::Greater;
        let big = match mode {
            // k > 2j - 1
            ValidityMode::Valid => k > v.j * 2 - HalfInt::ONE,
            // k > 4j - 2
            ValidityMode::ZeroValid => k > v.j * 4 - HalfInt::from_int(2),
        };
        if !(small || big) {
            wild_failures.push(v.id.clone());
        }
    }
    let mut witnesses = Vec::new();
    let holds = match mode {
        ValidityMode::ZeroValid => wild_failures.is_empty(),
        ValidityMode::Valid => {
            let mut strong = Vec::new();
            let mut weak = Vec::new();
            for v in places {
                let shifted = shifted_exponent(c, v);
                let e = v.ramification_index() as i64;
                // shifted >= b + 2/e  <=>  e*shifted >= e*b + 2
                if e * shifted >= e * v.b + 2 {
                    strong.push(v.id.clone());
                }
                if e * shifted >= e * v.b + 1 {
                    weak.push(v.id.clone());
                }
            }
            let clause = !strong.is_empty() || weak.len() >= 2;
            witnesses = if !strong.is_empty() { strong } else { weak };
            if !clause {
                witnesses.clear();
            }
            wild_failures.is_empty() && clause
        }
    };
    Ok(ValidityReport { holds, mode, wild_failures, witnesses })
}

/// `max{floor(k_v - (j_v - 1/2)), 0}`, the exponent of the shifted conductor.
pub fn shifted_exponent(c: &Conductor, v: &PlaceData) -> i64 {
    let k = c.exponent(&v.id);
    (k - (v.j - HalfInt::HALF)).floor().max(0)
}

/// Whether a central character of conductor exactly `c` can be globalized:
/// (i) all exponents integral, and (ii) one place with `k_v >= b_v + 2/e_v`
/// or two places with `k_v >= b_v + 1/e_v`.
///
/// The witness quantifier runs over the declared place set, with absent
/// exponents read as zero.
pub fn cchar_globalization_check(c: &Conductor, places: &[PlaceData]) -> Result<bool> {
    c.validate_against(places)?;
    if c.iter().any(|(_, k)| !k.is_integral()) {
        return Ok(false);
    }
    let mut strong = 0usize;
    let mut weak = 0usize;
    for v in places {
        let k = c.exponent(&v.id);
        let e = v.ramification_index() as i64;
        if k.doubled() * e >= 2 * (e * v.b + 2) {
            strong += 1;
        }
        if k.doubled() * e >= 2 * (e * v.b + 1) {
            weak += 1;
        }
    }
    Ok(strong >= 1 || weak >= 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inert_place(id: &str, p: u64, b: i64) -> PlaceData {
        PlaceData::new(id, p, 1, Splitting::Inert, HalfInt::HALF, b, 0).unwrap()
    }

    fn tame_place(id: &str, p: u64, b: i64) -> PlaceData {
        PlaceData::new(id, p, 1, Splitting::TameRamified, HalfInt::ONE, b, 1).unwrap()
    }

    fn wild_place(id: &str, j: i64, b: i64, d_exp: u32) -> PlaceData {
        PlaceData::new(id, 2, 1, Splitting::WildRamified, HalfInt::from_int(j), b, d_exp).unwrap()
    }

    #[test]
    fn place_invariants() {
        assert!(PlaceData::new("v", 3, 1, Splitting::Inert, HalfInt::ONE, -2, 0).is_err());
        assert!(PlaceData::new("v", 2, 1, Splitting::TameRamified, HalfInt::ONE, -2, 1).is_err());
        assert!(PlaceData::new("v", 3, 1, Splitting::WildRamified, HalfInt::ONE, -2, 2).is_err());
        assert!(PlaceData::new("v", 5, 1, Splitting::TameRamified, HalfInt::ONE, -2, 1).is_ok());
    }

    #[test]
    fn local_exponent_examples() {
        let ram = tame_place("v", 5, -2);
        let inert = inert_place("w", 3, -2);
        let c = Conductor::from_pairs([("v", HalfInt::from_doubled(3)), ("w", HalfInt::from_int(2))]).unwrap();
        assert_eq!(local_exponent(&c, &ram).unwrap(), 3);
        assert_eq!(local_exponent(&c, &inert).unwrap(), 2);
        let absent = inert_place("z", 7, -2);
        assert_eq!(local_exponent(&c, &absent).unwrap(), 0);

        let bad = Conductor::from_pairs([("w", HalfInt::from_doubled(3))]).unwrap();
        assert!(local_exponent(&bad, &inert).is_err());
    }

    #[test]
    fn valid_conductor_examples() {
        // all places unramified with b = -2: any nonempty conductor is valid
        let places = vec![inert_place("v", 3, -2), inert_place("w", 5, -2)];
        let c = Conductor::from_pairs([("v", HalfInt::from_int(1))]).unwrap();
        assert!(valid_conductor(&c, &places, 4, ValidityMode::Valid).unwrap().holds);

        // single wild place, j = 2, k = 2, N = 4: 2 > 1 and 2 <= 6 fails 0-valid
        let places = vec![wild_place("u", 2, -2, 3)];
        let c = Conductor::from_pairs([("u", HalfInt::from_int(2))]).unwrap();
        let rep = valid_conductor(&c, &places, 4, ValidityMode::ZeroValid).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.wild_failures, vec!["u".to_string()]);

        // empty conductor over an empty declared place set: no witnessing place
        let rep = valid_conductor(&Conductor::new(), &[], 4, ValidityMode::Valid).unwrap();
        assert!(!rep.holds);
    }

    #[test]
    fn cchar_globalization_examples() {
        // integral conductor with one inert place k = 1, b = -2
        let places = vec![inert_place("v", 3, -2)];
        let c = Conductor::from_pairs([("v", HalfInt::from_int(1))]).unwrap();
        assert!(cchar_globalization_check(&c, &places).unwrap());

        // half-integral ramified exponent fails condition (i)
        let places = vec![tame_place("v", 5, -2)];
        let c = Conductor::from_pairs([("v", HalfInt::from_doubled(3))]).unwrap();
        assert!(!cchar_globalization_check(&c, &places).unwrap());

        // empty conductor with all b = 0: no witnessing place
        let places = vec![inert_place("v", 3, 0), inert_place("w", 5, 0)];
        assert!(!cchar_globalization_check(&Conductor::new(), &places).unwrap());
    }

    #[test]
    fn valid_implies_cchar_on_shifted() {
        let place_sets = vec![
            vec![inert_place("a", 3, -2), tame_place("b", 5, -2)],
            vec![inert_place("a", 3, 0), tame_place("b", 7, -1)],
            vec![wild_place("w", 1, -2, 2), inert_place("a", 3, -2)],
        ];
        for places in place_sets {
            for da in 0..=6i64 {
                for db in 0..=6i64 {
                    let mut c = Conductor::new();
                    if da > 0 {
                        c.set(places[0].id.clone(), HalfInt::from_int(da)).unwrap();
                    }
                    if db > 0 {
                        c.set(places[1].id.clone(), HalfInt::from_doubled(db)).unwrap();
                    }
                    if c.validate_against(&places).is_err() {
                        continue;
                    }
                    let rep = valid_conductor(&c, &places, 4, ValidityMode::Valid).unwrap();
                    if rep.holds {
                        let mut shifted = Conductor::new();
                        for v in &places {
                            let s = shifted_exponent(&c, v);
                            if s > 0 {
                                shifted.set(v.id.clone(), HalfInt::from_int(s)).unwrap();
                            }
                        }
                        assert!(
                            cchar_globalization_check(&shifted, &places).unwrap(),
                            "valid conductor {c:?} must pass the globalization check on its shift"
                        );
                    }
                }
            }
        }
    }
}
