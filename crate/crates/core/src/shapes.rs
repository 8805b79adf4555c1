//! Infinitesimal characters as generating functions, integrality
//! classification, endoscopic group assignment for refined shapes, Weyl
//! dimension formulas, and the dimension-norm comparison.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::combinatorics::{HalfInt, LaurentPoly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryCase {
    SelfDual,
    ConjugateSelfDual,
}

/// An infinitesimal character: one generating function per archimedean
/// place, all of the same total mass (the rank).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfChar {
    places: Vec<LaurentPoly>,
}

impl InfChar {
    pub fn new(places: Vec<LaurentPoly>) -> Result<Self> {
        if places.is_empty() {
            return Err(Error::invalid("an infinitesimal character needs at least one place"));
        }
        let mass = places[0].mass();
        for p in &places {
            if !p.all_coeffs_nonnegative() {
                return Err(Error::invalid("coefficients must be non-negative"));
            }
            if p.mass() != mass {
                return Err(Error::invalid("all places must have the same total mass"));
            }
        }
        Ok(InfChar { places })
    }

    pub fn single(poly: LaurentPoly) -> Result<Self> {
        InfChar::new(vec![poly])
    }

    pub fn rank(&self) -> Result<u32> {
        u32::try_from(self.places[0].mass())
            .map_err(|_| Error::invalid("rank does not fit the supported range"))
    }

    pub fn place(&self, i: usize) -> &LaurentPoly {
        &self.places[i]
    }

    pub fn places(&self) -> &[LaurentPoly] {
        &self.places
    }
}

/// `lambda[d]`: multiply each place by the ladder `sum_l X^{(d+1)/2 - l}`.
pub fn lambda_bracket_d(lam: &InfChar, d: u32) -> InfChar {
    let ladder = LaurentPoly::ladder(d);
    InfChar {
        places: lam.places.iter().map(|p| p * &ladder).collect(),
    }
}

/// The dual-side coefficient pattern a single-place generating function
/// matches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralPattern {
    /// `1 +` symmetric 0/1 integer pattern (odd mass): symplectic group side.
    SymplecticGroup,
    /// Symmetric 0/1 half-integer pattern (even mass): odd orthogonal side.
    OddOrthogonal,
    /// Symmetric integer pattern, constant coefficient 0 or 2: even
    /// orthogonal side.
    EvenOrthogonal,
    /// Conjugate case: half-integer 0/1 pattern (odd rank).
    UnitaryOddRank,
    /// Conjugate case: integer 0/1 pattern (even rank).
    UnitaryEvenRank,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralityReport {
    pub integral: bool,
    pub regular: bool,
    /// The matched pattern, identical at every place; `None` when not
    /// integral or when places disagree.
    pub pattern: Option<IntegralPattern>,
    pub per_place: Vec<Option<IntegralPattern>>,
}

fn classify_place(case: SymmetryCase, p: &LaurentPoly) -> Option<IntegralPattern> {
    let zero_coeff = p.coeff(HalfInt::ZERO);
    let coeffs_01_off_zero = p
        .iter()
        .all(|(e, c)| *e == HalfInt::ZERO || c == &BigInt::one());
    match case {
        SymmetryCase::SelfDual => {
            if !p.is_symmetric() || !coeffs_01_off_zero {
                return None;
            }
            if p.all_exponents_strictly_half() {
                return Some(IntegralPattern::OddOrthogonal);
            }
            if !p.all_exponents_integral() {
                return None;
            }
            if zero_coeff == BigInt::one() {
                Some(IntegralPattern::SymplecticGroup)
            } else if zero_coeff.is_zero() || zero_coeff == BigInt::from(2) {
                Some(IntegralPattern::EvenOrthogonal)
            } else {
                None
            }
        }
        SymmetryCase::ConjugateSelfDual => {
            let ok01 = p.iter().all(|(_, c)| c == &BigInt::one());
            if !ok01 {
                return None;
            }
            if p.all_exponents_strictly_half() {
                Some(IntegralPattern::UnitaryOddRank)
            } else if p.all_exponents_integral() {
                Some(IntegralPattern::UnitaryEvenRank)
            } else {
                None
            }
        }
    }
}

fn place_is_regular(pattern: Option<IntegralPattern>, p: &LaurentPoly) -> bool {
    p.iter().all(|(e, c)| {
        if *e == HalfInt::ZERO && pattern == Some(IntegralPattern::EvenOrthogonal) {
            c <= &BigInt::from(2)
        } else {
            c <= &BigInt::one()
        }
    })
}

/// Which integral pattern the character matches, per place and combined,
/// with the regularity flag (coefficients at most 1, at most 2 at the
/// constant term where the even orthogonal pattern allows it).
pub fn classify_integral(case: SymmetryCase, lam: &InfChar) -> IntegralityReport {
    let per_place: Vec<Option<IntegralPattern>> =
        lam.places.iter().map(|p| classify_place(case, p)).collect();
    let pattern = match per_place.split_first() {
        Some((first, rest)) if first.is_some() && rest.iter().all(|p| p == first) => *first,
        _ => None,
    };
    // mass parity must match the pattern's rank parity
    let pattern = pattern.filter(|pat| {
        let mass = lam.places[0].mass();
        let odd = (&mass % BigInt::from(2)) == BigInt::one();
        match pat {
            IntegralPattern::SymplecticGroup | IntegralPattern::UnitaryOddRank => odd,
            _ => !odd,
        }
    });
    let regular = lam
        .places
        .iter()
        .zip(&per_place)
        .all(|(p, pat)| place_is_regular(*pat, p));
    IntegralityReport { integral: pattern.is_some(), regular, pattern, per_place }
}

/// Quadratic character label: a formal product of order-2 generators, so
/// products are symmetric differences. Empty means trivial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EtaChar(pub BTreeSet<String>);

impl EtaChar {
    pub fn trivial() -> Self {
        EtaChar::default()
    }

    pub fn labeled(label: impl Into<String>) -> Self {
        EtaChar([label.into()].into_iter().collect())
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self, other: &EtaChar) -> EtaChar {
        EtaChar(self.0.symmetric_difference(&other.0).cloned().collect())
    }
}

/// Central-character tag of one shape summand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EtaTag {
    /// Self-dual case: a quadratic character label.
    Quadratic(EtaChar),
    /// Conjugate case: a sign.
    Sign(i8),
}

#[derive(Clone, Debug)]
pub struct ShapeSummand {
    pub t: u32,
    pub d: u32,
    pub lambda: InfChar,
    pub eta: EtaTag,
}

/// A refined shape: summands `(T_i, d_i, lambda_i, eta_i)` with multiset
/// semantics.
#[derive(Clone, Debug)]
pub struct RefinedShape {
    pub case: SymmetryCase,
    pub summands: Vec<ShapeSummand>,
}

impl RefinedShape {
    pub fn total_rank(&self) -> Result<u32> {
        let mut n = 0u32;
        for s in &self.summands {
            if s.lambda.rank()? != s.t {
                return Err(Error::invalid("summand character rank must equal T"));
            }
            if s.d == 0 || s.t == 0 {
                return Err(Error::invalid("summand parameters must be positive"));
            }
            n += s.t * s.d;
        }
        Ok(n)
    }

    /// Total infinitesimal character `sum_i lambda_i[d_i]`.
    pub fn total_infchar(&self) -> Result<InfChar> {
        let n_places = self.summands[0].lambda.places().len();
        let mut acc = vec![LaurentPoly::zero(); n_places];
        for s in &self.summands {
            let bracketed = lambda_bracket_d(&s.lambda, s.d);
            if bracketed.places().len() != n_places {
                return Err(Error::invalid("summands must share the set of places"));
            }
            for (a, b) in acc.iter_mut().zip(bracketed.places()) {
                *a = &*a + b;
            }
        }
        InfChar::new(acc)
    }
}

/// The families of simple twisted endoscopic groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupFamily {
    /// `Sp_{N-1}` for odd GL-rank N.
    Sp,
    /// `SO_{N+1}` for even GL-rank N.
    SoOdd,
    /// `SO_N^eta` for even GL-rank N.
    SoEven,
    /// Quasisplit unitary of the given GL-rank, plus embedding.
    UPlus,
    /// Quasisplit unitary, minus embedding.
    UMinus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupDescriptor {
    pub family: GroupFamily,
    /// The GL-rank N of the summand the group is attached to.
    pub gl_rank: u32,
    pub eta: EtaChar,
}

impl GroupDescriptor {
    pub fn group_rank(&self) -> u32 {
        match self.family {
            GroupFamily::Sp => (self.gl_rank - 1) / 2,
            GroupFamily::SoOdd | GroupFamily::SoEven => self.gl_rank / 2,
            GroupFamily::UPlus | GroupFamily::UMinus => self.gl_rank,
        }
    }

    /// `P_G = (dim G - rank G) / 2`, the number of positive roots.
    pub fn positive_root_count(&self) -> u64 {
        let n = self.group_rank() as u64;
        match self.family {
            GroupFamily::Sp | GroupFamily::SoOdd => n * n,
            GroupFamily::SoEven => n * (n - 1).max(0),
            GroupFamily::UPlus | GroupFamily::UMinus => n * (n.saturating_sub(1)) / 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssignedGroup {
    pub factors: Vec<GroupDescriptor>,
}

impl AssignedGroup {
    pub fn positive_root_count(&self) -> u64 {
        self.factors.iter().map(GroupDescriptor::positive_root_count).sum()
    }
}

/// Orthogonal/symplectic image of a self-dual summand: the type of the
/// character pattern, flipped when `d` is even (the extra [d] factor is
/// symplectic for even d).
fn selfdual_summand_type(pattern: IntegralPattern, d: u32) -> Result<bool /* symplectic image */> {
    let base_symplectic = match pattern {
        IntegralPattern::OddOrthogonal => true,
        IntegralPattern::SymplecticGroup | IntegralPattern::EvenOrthogonal => false,
        _ => return Err(Error::invalid("conjugate pattern in a self-dual shape")),
    };
    Ok(if d % 2 == 0 { !base_symplectic } else { base_symplectic })
}

/// Assign the endoscopic group of a refined shape, or `None` when the
/// shape's constraints exclude any parameter (an odd orthogonal family
/// summand with nontrivial eta, or inconsistent conjugate signs).
pub fn assign_group(shape: &RefinedShape) -> Result<Option<AssignedGroup>> {
    let n = shape.total_rank()?;
    match shape.case {
        SymmetryCase::SelfDual => {
            let mut n_symp = 0u32;
            let mut n_orth = 0u32;
            let mut eta = EtaChar::trivial();
            for s in &shape.summands {
                let rep = classify_integral(SymmetryCase::SelfDual, &s.lambda);
                let Some(pattern) = rep.pattern else {
                    return Err(Error::invalid("non-integral summand character"));
                };
                let EtaTag::Quadratic(eta_i) = &s.eta else {
                    return Err(Error::invalid("self-dual summands carry quadratic tags"));
                };
                if pattern == IntegralPattern::OddOrthogonal && !eta_i.is_trivial() {
                    // symplectic-image cuspidal support forces trivial eta
                    return Ok(None);
                }
                if selfdual_summand_type(pattern, s.d)? {
                    n_symp += s.t * s.d;
                } else {
                    n_orth += s.t * s.d;
                    if s.d % 2 == 1 {
                        eta = eta.product(eta_i);
                    }
                }
            }
            let mut factors = Vec::new();
            if n_symp > 0 {
                factors.push(GroupDescriptor {
                    family: GroupFamily::SoOdd,
                    gl_rank: n_symp,
                    eta: EtaChar::trivial(),
                });
            }
            if n_orth > 0 {
                let family = if n_orth % 2 == 1 { GroupFamily::Sp } else { GroupFamily::SoEven };
                factors.push(GroupDescriptor { family, gl_rank: n_orth, eta });
            }
            Ok(Some(AssignedGroup { factors }))
        }
        SymmetryCase::ConjugateSelfDual => {
            let mut sigma: Option<i8> = None;
            for s in &shape.summands {
                let rep = classify_integral(SymmetryCase::ConjugateSelfDual, &s.lambda);
                if rep.pattern.is_none() {
                    return Err(Error::invalid("non-integral summand character"));
                }
                let EtaTag::Sign(eta_i) = s.eta else {
                    return Err(Error::invalid("conjugate summands carry sign tags"));
                };
                if eta_i.abs() != 1 {
                    return Err(Error::invalid("conjugate eta is a sign"));
                }
                let s_i = if s.d % 2 == 1 { eta_i } else { -eta_i };
                match sigma {
                    None => sigma = Some(s_i),
                    Some(prev) if prev != s_i => return Ok(None),
                    _ => {}
                }
            }
            let sigma = sigma.ok_or_else(|| Error::invalid("empty shape"))?;
            let kappa = if n % 2 == 1 { sigma } else { -sigma };
            let family = if kappa == 1 { GroupFamily::UPlus } else { GroupFamily::UMinus };
            Ok(Some(AssignedGroup {
                factors: vec![GroupDescriptor { family, gl_rank: n, eta: EtaChar::trivial() }],
            }))
        }
    }
}

/// Dominant coordinates of a single-place character for the group's root
/// system, extracted from the exponent multiset of the dual-side semisimple
/// class. Errors when the multiset does not fit the family's pattern or is
/// singular.
fn dominant_coordinates(g: &GroupDescriptor, p: &LaurentPoly) -> Result<Vec<HalfInt>> {
    let exps = p.exponent_multiset_desc()?;
    let fail = |msg: &str| Err(Error::invalid(format!("{msg} for {:?} of GL-rank {}", g.family, g.gl_rank)));
    if exps.len() != g.gl_rank as usize {
        return fail("character rank mismatch");
    }
    match g.family {
        GroupFamily::UPlus | GroupFamily::UMinus => {
            let mut coords = exps;
            for w in coords.windows(2) {
                if w[0] == w[1] {
                    return fail("singular character");
                }
            }
            coords.sort_by(|a, b| b.cmp(a));
            Ok(coords)
        }
        GroupFamily::Sp => {
            // {0} plus symmetric pairs of distinct positive integers
            let mut pos: Vec<HalfInt> = exps.iter().copied().filter(|e| e.is_positive()).collect();
            let neg: Vec<HalfInt> = exps.iter().copied().filter(|e| e.doubled() < 0).map(|e| -e).collect();
            let zeros = exps.iter().filter(|e| **e == HalfInt::ZERO).count();
            pos.sort_by(|a, b| b.cmp(a));
            let mut neg_sorted = neg.clone();
            neg_sorted.sort_by(|a, b| b.cmp(a));
            if zeros != 1 || pos != neg_sorted {
                return fail("expected a symmetric pattern with a single zero");
            }
            if pos.iter().any(|e| !e.is_integral()) {
                return fail("expected integer exponents");
            }
            for w in pos.windows(2) {
                if w[0] == w[1] {
                    return fail("singular character");
                }
            }
            Ok(pos)
        }
        GroupFamily::SoOdd => {
            let mut pos: Vec<HalfInt> = exps.iter().copied().filter(|e| e.is_positive()).collect();
            let neg: Vec<HalfInt> = exps.iter().copied().filter(|e| e.doubled() < 0).map(|e| -e).collect();
            pos.sort_by(|a, b| b.cmp(a));
            let mut neg_sorted = neg;
            neg_sorted.sort_by(|a, b| b.cmp(a));
            if pos != neg_sorted || pos.len() * 2 != exps.len() {
                return fail("expected a symmetric half-integral pattern");
            }
            if pos.iter().any(|e| e.is_integral()) {
                return fail("expected strictly half-integral exponents");
            }
            for w in pos.windows(2) {
                if w[0] == w[1] {
                    return fail("singular character");
                }
            }
            Ok(pos)
        }
        GroupFamily::SoEven => {
            let mut pos: Vec<HalfInt> = exps.iter().copied().filter(|e| e.is_positive()).collect();
            let neg: Vec<HalfInt> = exps.iter().copied().filter(|e| e.doubled() < 0).map(|e| -e).collect();
            let zeros = exps.iter().filter(|e| **e == HalfInt::ZERO).count();
            pos.sort_by(|a, b| b.cmp(a));
            let mut neg_sorted = neg;
            neg_sorted.sort_by(|a, b| b.cmp(a));
            if pos != neg_sorted || zeros > 2 || zeros % 2 != 0 {
                return fail("expected a symmetric integer pattern");
            }
            if pos.iter().any(|e| !e.is_integral()) {
                return fail("expected integer exponents");
            }
            for w in pos.windows(2) {
                if w[0] == w[1] {
                    return fail("singular character");
                }
            }
            let mut coords = pos;
            if zeros == 2 {
                coords.push(HalfInt::ZERO);
            }
            Ok(coords)
        }
    }
}

fn halfint_rational(h: HalfInt) -> BigRational {
    BigRational::new(BigInt::from(h.doubled()), BigInt::from(2))
}

/// `<alpha^vee, .>` over the positive coroots of the family, evaluated at
/// the coordinate vector. The dimension ratio is insensitive to the
/// root-vs-coroot choice (the length normalizations cancel per factor), but
/// the norm minimum is taken over coroots: type-C singles are `a_i`, type-B
/// singles are `2 a_i`.
fn positive_coroot_pairings(family: GroupFamily, coords: &[HalfInt]) -> Vec<BigRational> {
    let n = coords.len();
    let mut out = Vec::new();
    let val = |h: HalfInt| halfint_rational(h);
    match family {
        GroupFamily::UPlus | GroupFamily::UMinus => {
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push(val(coords[i] - coords[j]));
                }
            }
        }
        GroupFamily::Sp => {
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push(val(coords[i] - coords[j]));
                    out.push(val(coords[i] + coords[j]));
                }
            }
            for &c in coords {
                out.push(val(c));
            }
        }
        GroupFamily::SoOdd => {
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push(val(coords[i] - coords[j]));
                    out.push(val(coords[i] + coords[j]));
                }
            }
            for &c in coords {
                out.push(val(c * 2));
            }
        }
        GroupFamily::SoEven => {
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push(val(coords[i] - coords[j]));
                    out.push(val(coords[i] + coords[j]));
                }
            }
        }
    }
    out
}

fn rho_coordinates(family: GroupFamily, n: usize) -> Vec<HalfInt> {
    match family {
        GroupFamily::Sp => (1..=n).rev().map(|i| HalfInt::from_int(i as i64)).collect(),
        GroupFamily::SoOdd => (1..=n).rev().map(|i| HalfInt::from_doubled(2 * i as i64 - 1)).collect(),
        GroupFamily::SoEven => (0..n).rev().map(|i| HalfInt::from_int(i as i64)).collect(),
        GroupFamily::UPlus | GroupFamily::UMinus => {
            (0..n).rev().map(|i| HalfInt::from_int(i as i64)).collect()
        }
    }
}

/// Weyl dimension of the finite-dimensional representation with regular
/// integral infinitesimal character `p`, normalized so the value at rho is 1:
/// the ratio of positive-root pairing products.
pub fn weyl_dim(g: &GroupDescriptor, p: &LaurentPoly) -> Result<BigRational> {
    let coords = dominant_coordinates(g, p)?;
    let numer = positive_coroot_pairings(g.family, &coords);
    if numer.iter().any(|x| x.is_zero()) {
        return Err(Error::invalid("singular character"));
    }
    let rho = rho_coordinates(g.family, coords.len());
    let denom = positive_coroot_pairings(g.family, &rho);
    let num: BigRational = numer.into_iter().product();
    let den: BigRational = denom.into_iter().product();
    Ok((num / den).abs())
}

/// Product of `<alpha^vee, rho>` over the positive coroots: the
/// denominator constant of the rho-normalized dimension.
pub fn rho_pairing_product(g: &GroupDescriptor) -> BigRational {
    let rho = rho_coordinates(g.family, g.group_rank() as usize);
    positive_coroot_pairings(g.family, &rho).into_iter().product()
}

/// Minimum of `<alpha^vee, lambda>` over the positive coroots.
pub fn m_norm(g: &GroupDescriptor, p: &LaurentPoly) -> Result<BigRational> {
    let coords = dominant_coordinates(g, p)?;
    let pairings = positive_coroot_pairings(g.family, &coords);
    pairings
        .into_iter()
        .map(|x| x.abs())
        .min()
        .ok_or_else(|| Error::invalid("rank too small for a positive root"))
}

/// Summand tag of an unrefined shape: in the self-dual case the forgotten
/// character keeps its integral-vs-half-integral parity, folded into the
/// tag next to the quadratic character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BoxEta {
    SelfDual { eta: EtaChar, half_integral: bool },
    Sign(i8),
}

/// An unrefined shape: the summand data with the characters forgotten
/// except for their parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnrefinedShape {
    pub case: SymmetryCase,
    pub summands: Vec<(u32, u32, BoxEta)>,
}

impl UnrefinedShape {
    pub fn total_rank(&self) -> u32 {
        self.summands.iter().map(|(t, d, _)| t * d).sum()
    }

    /// The group of one summand, determined by the box data alone.
    pub fn summand_descriptor(&self, i: usize) -> Result<Option<GroupDescriptor>> {
        let (t, d, eta) = &self.summands[i];
        let gl_rank = t * d;
        match (self.case, eta) {
            (SymmetryCase::SelfDual, BoxEta::SelfDual { eta, half_integral }) => {
                if *half_integral && !eta.is_trivial() {
                    return Ok(None);
                }
                let symp = if d % 2 == 0 { !half_integral } else { *half_integral };
                let family = if symp {
                    GroupFamily::SoOdd
                } else if gl_rank % 2 == 1 {
                    GroupFamily::Sp
                } else {
                    GroupFamily::SoEven
                };
                let eta_out = if symp { EtaChar::trivial() } else { eta.clone() };
                Ok(Some(GroupDescriptor { family, gl_rank, eta: eta_out }))
            }
            (SymmetryCase::ConjugateSelfDual, BoxEta::Sign(_)) => {
                Ok(Some(GroupDescriptor { family: GroupFamily::UPlus, gl_rank, eta: EtaChar::trivial() }))
            }
            _ => Err(Error::invalid("summand tag does not match the case")),
        }
    }
}

/// All ways to split the exponent multiset of `p` into per-summand ladder
/// stacks: summand `(T, d)` receives `T` ladders of length `d`.
fn decompositions(p: &LaurentPoly, summands: &[(u32, u32, BoxEta)]) -> Result<Vec<Vec<LaurentPoly>>> {
    let exps = p.exponent_multiset_desc()?;
    let mut remaining: Vec<HalfInt> = exps;
    remaining.sort();
    let mut capacity: Vec<u32> = summands.iter().map(|(t, _, _)| *t).collect();
    let mut centers: Vec<Vec<HalfInt>> = vec![Vec::new(); summands.len()];
    let mut out = Vec::new();
    fn rec(
        remaining: &mut Vec<HalfInt>,
        summands: &[(u32, u32, BoxEta)],
        capacity: &mut Vec<u32>,
        centers: &mut Vec<Vec<HalfInt>>,
        out: &mut Vec<Vec<LaurentPoly>>,
    ) {
        if remaining.is_empty() {
            if capacity.iter().all(|&c| c == 0) {
                out.push(
                    centers
                        .iter()
                        .map(|cs| LaurentPoly::from_exponents(cs.iter().copied()))
                        .collect(),
                );
            }
            return;
        }
        let lowest = remaining[0];
        for i in 0..summands.len() {
            if capacity[i] == 0 {
                continue;
            }
            let d = summands[i].1;
            // the lowest remaining exponent must be the bottom of a ladder
            let ladder: Vec<HalfInt> =
                (0..d).map(|r| lowest + HalfInt::from_int(r as i64)).collect();
            let mut work = remaining.clone();
            let mut ok = true;
            for e in &ladder {
                if let Ok(pos) = work.binary_search(e) {
                    work.remove(pos);
                } else {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            capacity[i] -= 1;
            // ladder center
            centers[i].push(lowest + HalfInt::from_doubled(d as i64 - 1));
            std::mem::swap(remaining, &mut work);
            rec(remaining, summands, capacity, centers, out);
            std::mem::swap(remaining, &mut work);
            centers[i].pop();
            capacity[i] += 1;
        }
    }
    rec(&mut remaining, summands, &mut capacity, &mut centers, &mut out);
    Ok(out)
}

/// Whether a candidate summand character matches the box tag: integral
/// pattern of the declared parity (self-dual) or the conjugate pattern.
fn summand_character_fits(case: SymmetryCase, eta: &BoxEta, lambda_i: &LaurentPoly) -> bool {
    match (case, eta) {
        (SymmetryCase::SelfDual, BoxEta::SelfDual { half_integral, .. }) => {
            match classify_place(SymmetryCase::SelfDual, lambda_i) {
                Some(IntegralPattern::OddOrthogonal) => *half_integral,
                Some(IntegralPattern::SymplecticGroup) | Some(IntegralPattern::EvenOrthogonal) => {
                    !half_integral
                }
                _ => false,
            }
        }
        (SymmetryCase::ConjugateSelfDual, BoxEta::Sign(_)) => {
            classify_place(SymmetryCase::ConjugateSelfDual, lambda_i).is_some()
        }
        _ => false,
    }
}

/// `dim_box`: the maximum over refined shapes in the box with total
/// character `p` of the product of summand dimensions; 0 when the box is
/// empty over `p`. Asserts the norm bound against the ambient group.
pub fn dim_box(g: &GroupDescriptor, shape: &UnrefinedShape, p: &LaurentPoly) -> Result<BigRational> {
    let exps = p.exponent_multiset_desc()?;
    if exps.len() != shape.total_rank() as usize || exps.len() != g.gl_rank as usize {
        return Err(Error::invalid("rank mismatch between box, character, and ambient group"));
    }
    if exps.len() > 16 {
        return Err(Error::BudgetExceeded("box enumeration is limited to rank 16".to_string()));
    }
    // conjugate sign consistency is independent of the characters
    if shape.case == SymmetryCase::ConjugateSelfDual {
        let mut sigma = None;
        for (_, d, eta) in &shape.summands {
            let BoxEta::Sign(e) = eta else {
                return Err(Error::invalid("conjugate summands carry sign tags"));
            };
            let s = if d % 2 == 1 { *e } else { -*e };
            match sigma {
                None => sigma = Some(s),
                Some(prev) if prev != s => return Ok(BigRational::zero()),
                _ => {}
            }
        }
    }
    let mut best = BigRational::zero();
    for decomposition in decompositions(p, &shape.summands)? {
        let mut product = BigRational::one();
        let mut ok = true;
        for (i, ((_, d, eta), lambda_i)) in shape.summands.iter().zip(&decomposition).enumerate() {
            if !summand_character_fits(shape.case, eta, lambda_i) {
                ok = false;
                break;
            }
            let Some(gi) = shape.summand_descriptor(i)? else {
                ok = false;
                break;
            };
            let total_i = lambda_i * &LaurentPoly::ladder(*d);
            match weyl_dim(&gi, &total_i) {
                Ok(dim) => product *= dim,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && product > best {
            best = product;
        }
    }
    // norm bound on the raw coroot products: the rho-normalization
    // constants of the ambient and reduced groups do not cancel, so the
    // comparable quantities are dim * C with C the rho-pairing product
    if !best.is_zero() {
        let bound = dim_box_bound(g, shape, p)?;
        debug_assert!(best <= bound, "norm bound violated: {best} > {bound}");
    }
    Ok(best)
}

/// `P_{G_F}` of the reduced group of the box: the sum of the summand
/// groups' positive-root counts, determined by the box data alone.
pub fn reduced_group_roots(shape: &UnrefinedShape) -> Result<u64> {
    let mut total = 0u64;
    for i in 0..shape.summands.len() {
        match shape.summand_descriptor(i)? {
            Some(g) => total += g.positive_root_count(),
            None => return Ok(0),
        }
    }
    Ok(total)
}

/// The constant-corrected norm bound for `dim_box`:
/// `dim(lambda) * m(lambda)^{P_{G_F} - P_G} * C_G / C_{G_F}` with `C` the
/// rho-pairing products. On raw coroot products this is the factor-subset
/// inequality of the dimension formula.
pub fn dim_box_bound(g: &GroupDescriptor, shape: &UnrefinedShape, p: &LaurentPoly) -> Result<BigRational> {
    let dim = weyl_dim(g, p)?;
    let m = m_norm(g, p)?;
    let p_g = g.positive_root_count() as i64;
    let p_f = reduced_group_roots(shape)? as i64;
    let mut c_ratio = rho_pairing_product(g);
    for i in 0..shape.summands.len() {
        if let Some(gi) = shape.summand_descriptor(i)? {
            c_ratio /= rho_pairing_product(&gi);
        }
    }
    Ok(dim * rational_pow(&m, p_f - p_g) * c_ratio)
}

pub fn rational_pow(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow::pow(x.clone(), e as usize)
    } else {
        num_traits::pow::pow(x.clone(), (-e) as usize).recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(exps: &[i64]) -> LaurentPoly {
        LaurentPoly::from_exponents(exps.iter().map(|&e| HalfInt::from_int(e)))
    }

    fn poly_halves(doubled: &[i64]) -> LaurentPoly {
        LaurentPoly::from_exponents(doubled.iter().map(|&e| HalfInt::from_doubled(e)))
    }

    #[test]
    fn bracket_examples() {
        // d = 1 identity
        let lam = InfChar::single(poly_halves(&[1, -1])).unwrap();
        assert_eq!(lambda_bracket_d(&lam, 1), lam);

        // X^0 of rank 1, d = 2
        let lam = InfChar::single(poly(&[0])).unwrap();
        let out = lambda_bracket_d(&lam, 2);
        assert_eq!(out.place(0), &poly_halves(&[1, -1]));

        // (X + X^{-1})[3] = X^2 + X + 2 + X^{-1} + X^{-2}
        let lam = InfChar::single(poly(&[1, -1])).unwrap();
        let out = lambda_bracket_d(&lam, 3);
        let expect = poly(&[2, 1, 0, 0, -1, -2]);
        assert_eq!(out.place(0), &expect);
    }

    #[test]
    fn bracket_mass_and_symmetry() {
        let lam = InfChar::single(poly_halves(&[3, 1, -1, -3])).unwrap();
        for d in 1..=4u32 {
            let out = lambda_bracket_d(&lam, d);
            assert_eq!(out.place(0).mass(), BigInt::from(4 * d as i64));
            assert!(out.place(0).is_symmetric());
        }
    }

    #[test]
    fn classify_examples() {
        // half-integral symmetric: odd orthogonal side (symplectic image)
        let lam = InfChar::single(poly_halves(&[3, 1, -1, -3])).unwrap();
        let rep = classify_integral(SymmetryCase::SelfDual, &lam);
        assert!(rep.integral);
        assert_eq!(rep.pattern, Some(IntegralPattern::OddOrthogonal));
        assert!(rep.regular);

        // coefficient 2 off zero: not integral
        let mut p = poly(&[1, -1, 0]);
        p.add_term(HalfInt::from_int(1), BigInt::one());
        let lam = InfChar::single(p).unwrap();
        assert!(!classify_integral(SymmetryCase::SelfDual, &lam).integral);

        // conjugate, rank 2 integer exponents
        let lam = InfChar::single(poly(&[1, -1])).unwrap();
        let rep = classify_integral(SymmetryCase::ConjugateSelfDual, &lam);
        assert_eq!(rep.pattern, Some(IntegralPattern::UnitaryEvenRank));
    }

    fn simple_shape(case: SymmetryCase, lam: InfChar, eta: EtaTag) -> RefinedShape {
        let t = lam.rank().unwrap();
        RefinedShape { case, summands: vec![ShapeSummand { t, d: 1, lambda: lam, eta }] }
    }

    #[test]
    fn assign_group_simple_shapes() {
        // N odd: Sp family
        let lam = InfChar::single(poly(&[1, 0, -1])).unwrap();
        let shape = simple_shape(SymmetryCase::SelfDual, lam, EtaTag::Quadratic(EtaChar::labeled("u")));
        let g = assign_group(&shape).unwrap().unwrap();
        assert_eq!(g.factors.len(), 1);
        assert_eq!(g.factors[0].family, GroupFamily::Sp);
        assert_eq!(g.factors[0].gl_rank, 3);
        assert_eq!(g.factors[0].eta, EtaChar::labeled("u"));

        // N even, half-integral: SO odd family with trivial eta
        let lam = InfChar::single(poly_halves(&[3, 1, -1, -3])).unwrap();
        let shape = simple_shape(SymmetryCase::SelfDual, lam.clone(), EtaTag::Quadratic(EtaChar::trivial()));
        let g = assign_group(&shape).unwrap().unwrap();
        assert_eq!(g.factors[0].family, GroupFamily::SoOdd);

        // same with nontrivial eta: excluded
        let shape = simple_shape(SymmetryCase::SelfDual, lam, EtaTag::Quadratic(EtaChar::labeled("u")));
        assert!(assign_group(&shape).unwrap().is_none());

        // N even, integral: SO even family
        let lam = InfChar::single(poly(&[2, 1, -1, -2])).unwrap();
        let shape = simple_shape(SymmetryCase::SelfDual, lam, EtaTag::Quadratic(EtaChar::labeled("u")));
        let g = assign_group(&shape).unwrap().unwrap();
        assert_eq!(g.factors[0].family, GroupFamily::SoEven);
        assert_eq!(g.factors[0].eta, EtaChar::labeled("u"));
    }

    #[test]
    fn assign_group_compound_and_conj() {
        // (2,1) half-integral + (1,2): the [2] factor makes the character
        // block symplectic-image from an orthogonal character
        let a = ShapeSummand {
            t: 2,
            d: 1,
            lambda: InfChar::single(poly_halves(&[3, -3])).unwrap(),
            eta: EtaTag::Quadratic(EtaChar::trivial()),
        };
        let b = ShapeSummand {
            t: 1,
            d: 2,
            lambda: InfChar::single(poly(&[0])).unwrap(),
            eta: EtaTag::Quadratic(EtaChar::labeled("r")),
        };
        let shape = RefinedShape { case: SymmetryCase::SelfDual, summands: vec![a, b] };
        let g = assign_group(&shape).unwrap().unwrap();
        // both summands are symplectic-image: single SO_{4+1}-side factor
        assert_eq!(g.factors.len(), 1);
        assert_eq!(g.factors[0].family, GroupFamily::SoOdd);
        assert_eq!(g.factors[0].gl_rank, 4);

        // conjugate: signs must agree after the d-flip
        let mk = |d: u32, eta: i8, lam: LaurentPoly| ShapeSummand {
            t: lam.mass().try_into().unwrap(),
            d,
            lambda: InfChar::single(lam).unwrap(),
            eta: EtaTag::Sign(eta),
        };
        let shape = RefinedShape {
            case: SymmetryCase::ConjugateSelfDual,
            summands: vec![mk(1, -1, poly(&[2, -2])), mk(2, -1, poly_halves(&[1]))],
        };
        // sigma_1 = -1, sigma_2 = -eta_2 = +1: inconsistent
        assert!(assign_group(&shape).unwrap().is_none());

        let shape = RefinedShape {
            case: SymmetryCase::ConjugateSelfDual,
            summands: vec![mk(1, -1, poly(&[2, -2])), mk(2, 1, poly_halves(&[1]))],
        };
        // sigma_1 = -1 and sigma_2 = -eta_2 = -1: consistent; N = 4: kappa = -sigma = +1
        let g = assign_group(&shape).unwrap().unwrap();
        assert_eq!(g.factors[0].family, GroupFamily::UPlus);
        assert_eq!(g.factors[0].gl_rank, 4);
    }

    fn sp4() -> GroupDescriptor {
        GroupDescriptor { family: GroupFamily::Sp, gl_rank: 5, eta: EtaChar::trivial() }
    }

    fn so5() -> GroupDescriptor {
        GroupDescriptor { family: GroupFamily::SoOdd, gl_rank: 4, eta: EtaChar::trivial() }
    }

    #[test]
    fn weyl_dim_rho_is_one() {
        // Sp_4: rho = (2,1) embedded as {0, +-2, +-1}
        assert_eq!(weyl_dim(&sp4(), &poly(&[2, 1, 0, -1, -2])).unwrap(), BigRational::one());
        // SO_5: rho = (3/2, 1/2)
        assert_eq!(weyl_dim(&so5(), &poly_halves(&[3, 1, -1, -3])).unwrap(), BigRational::one());
        // U_3: rho = (1, 0, -1)
        let u3 = GroupDescriptor { family: GroupFamily::UPlus, gl_rank: 3, eta: EtaChar::trivial() };
        assert_eq!(weyl_dim(&u3, &poly(&[1, 0, -1])).unwrap(), BigRational::one());
        // SO_4: rho = (1, 0)
        let so4 = GroupDescriptor { family: GroupFamily::SoEven, gl_rank: 4, eta: EtaChar::trivial() };
        assert_eq!(weyl_dim(&so4, &poly(&[1, 0, 0, -1])).unwrap(), BigRational::one());
    }

    #[test]
    fn weyl_dim_standard_reps() {
        // rho + first fundamental weight
        assert_eq!(weyl_dim(&sp4(), &poly(&[3, 1, 0, -1, -3])).unwrap(), BigRational::from(BigInt::from(4)));
        assert_eq!(weyl_dim(&so5(), &poly_halves(&[5, 1, -1, -5])).unwrap(), BigRational::from(BigInt::from(5)));
    }

    #[test]
    fn m_norm_and_root_counts() {
        // m(rho) = 1 for the unitary (simply-laced) family
        let u3 = GroupDescriptor { family: GroupFamily::UPlus, gl_rank: 3, eta: EtaChar::trivial() };
        assert_eq!(m_norm(&u3, &poly(&[1, 0, -1])).unwrap(), BigRational::one());
        assert_eq!(sp4().positive_root_count(), 4);
        let u5 = GroupDescriptor { family: GroupFamily::UPlus, gl_rank: 5, eta: EtaChar::trivial() };
        assert_eq!(u5.positive_root_count(), 10);
        assert_eq!(so5().positive_root_count(), 4);
        let so6 = GroupDescriptor { family: GroupFamily::SoEven, gl_rank: 6, eta: EtaChar::trivial() };
        assert_eq!(so6.positive_root_count(), 6);
    }

    #[test]
    fn dim_box_cases() {
        // single-summand box: dim_box = dim
        let lam = poly_halves(&[5, 1, -1, -5]);
        let shape = UnrefinedShape {
            case: SymmetryCase::SelfDual,
            summands: vec![(4, 1, BoxEta::SelfDual { eta: EtaChar::trivial(), half_integral: true })],
        };
        let d = dim_box(&so5(), &shape, &lam).unwrap();
        assert_eq!(d, weyl_dim(&so5(), &lam).unwrap());

        // box with a rank-1 [2] summand: toral factors give 1 on compatible lambda
        let lam = poly_halves(&[1, -1]);
        let shape = UnrefinedShape {
            case: SymmetryCase::SelfDual,
            summands: vec![(1, 2, BoxEta::SelfDual { eta: EtaChar::labeled("u"), half_integral: false })],
        };
        let amb = GroupDescriptor { family: GroupFamily::SoOdd, gl_rank: 2, eta: EtaChar::trivial() };
        assert_eq!(dim_box(&amb, &shape, &lam).unwrap(), BigRational::one());

        // incompatible parity: empty box
        let lam = poly(&[1, -1]);
        let amb = GroupDescriptor { family: GroupFamily::SoEven, gl_rank: 2, eta: EtaChar::trivial() };
        assert_eq!(dim_box(&amb, &shape, &lam).unwrap(), BigRational::zero());
    }

    #[test]
    fn dim_box_two_so3_summands() {
        // two odd-orthogonal-side rank-2 summands inside SO_5
        let lam = poly_halves(&[3, 1, -1, -3]);
        let shape = UnrefinedShape {
            case: SymmetryCase::SelfDual,
            summands: vec![
                (2, 1, BoxEta::SelfDual { eta: EtaChar::trivial(), half_integral: true }),
                (2, 1, BoxEta::SelfDual { eta: EtaChar::trivial(), half_integral: true }),
            ],
        };
        // decompositions: {±3/2} with {±1/2}; dims 2*(3/2)=3 and 2*(1/2)=1
        let d = dim_box(&so5(), &shape, &lam).unwrap();
        assert_eq!(d, BigRational::from(BigInt::from(3)));
    }
}
