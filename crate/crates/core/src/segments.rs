//! Segment calculus for local representations presented by their blocks:
//! conductors, root numbers, constancy of the root number across a component
//! at fixed conductor, and the existence constructors for prescribed
//! (conductor, central character, type) data.
//!
//! Supercuspidal blocks carry conductor, root number, ramification flag, and
//! central-character data as axioms; the module never constructs
//! supercuspidals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::localfield::{PlaceData, Splitting};

/// Quadratic-character data: triviality and conductor exponent. Two distinct
/// nontrivial quadratic characters cannot be multiplied without label data,
/// so witnesses carry at most one nontrivial quadratic per product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadCharData {
    pub nontrivial: bool,
    pub conductor: u32,
}

impl QuadCharData {
    pub const TRIVIAL: QuadCharData = QuadCharData { nontrivial: false, conductor: 0 };

    pub fn unramified_nontrivial() -> Self {
        QuadCharData { nontrivial: true, conductor: 0 }
    }
}

/// Duality pairing of a block: self-paired, or one half of a dual pair
/// sharing a tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pairing {
    SelfPaired,
    Partner(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Block {
    /// A supercuspidal constituent (rank-1 blocks are characters).
    Supercuspidal {
        rank: u32,
        conductor: u32,
        root_number: i8,
        ramified: bool,
        pairing: Pairing,
        /// Central character of the block; dual pairs contribute trivially
        /// regardless of this field.
        central: QuadCharData,
    },
    /// A Steinberg block of the given size, packaging that many unramified
    /// constituents; conductor `size - 1`, root number `(-1)^{size-1}`,
    /// trivial central character.
    Steinberg { size: u32 },
}

impl Block {
    pub fn rank(&self) -> u32 {
        match self {
            Block::Supercuspidal { rank, .. } => *rank,
            Block::Steinberg { size } => *size,
        }
    }

    pub fn unramified_char(central: QuadCharData) -> Block {
        Block::Supercuspidal {
            rank: 1,
            conductor: 0,
            root_number: 1,
            ramified: false,
            pairing: Pairing::SelfPaired,
            central,
        }
    }

    pub fn ramified_char(conductor: u32, root_number: i8, central: QuadCharData, pairing: Pairing) -> Block {
        Block::Supercuspidal { rank: 1, conductor, root_number, ramified: true, pairing, central }
    }
}

/// A multiset of blocks describing a local representation of total rank `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentData {
    pub n: u32,
    pub blocks: Vec<Block>,
}

impl SegmentData {
    pub fn new(n: u32, blocks: Vec<Block>) -> Result<Self> {
        let s = SegmentData { n, blocks };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let total: u32 = self.blocks.iter().map(Block::rank).sum();
        if total != self.n {
            return Err(Error::invalid(format!("block ranks sum to {total}, expected {}", self.n)));
        }
        let mut tags: std::collections::BTreeMap<u32, Vec<&Block>> = Default::default();
        for b in &self.blocks {
            match b {
                Block::Steinberg { size } => {
                    if *size < 2 {
                        return Err(Error::invalid("Steinberg blocks have size at least 2"));
                    }
                }
                Block::Supercuspidal { rank, conductor, root_number, ramified, pairing, central } => {
                    if root_number.abs() != 1 {
                        return Err(Error::invalid("root numbers are +-1"));
                    }
                    if !*ramified {
                        if *rank != 1 || *conductor != 0 || central.conductor != 0 {
                            return Err(Error::invalid(
                                "unramified supercuspidal blocks are conductor-0 characters",
                            ));
                        }
                    } else if *conductor < (*rank).max(1) {
                        return Err(Error::invalid(
                            "ramified supercuspidal conductor must be at least the rank",
                        ));
                    }
                    if let Pairing::Partner(t) = pairing {
                        tags.entry(*t).or_default().push(b);
                    }
                }
            }
        }
        for (t, members) in tags {
            if members.len() != 2 {
                return Err(Error::invalid(format!("pairing tag {t} must appear exactly twice")));
            }
            let key = |b: &Block| match b {
                Block::Supercuspidal { rank, conductor, ramified, .. } => (*rank, *conductor, *ramified),
                _ => unreachable!(),
            };
            if key(members[0]) != key(members[1]) {
                return Err(Error::invalid(format!(
                    "pairing tag {t}: dual partners must share rank, conductor, and ramification"
                )));
            }
        }
        Ok(())
    }

    fn steinbergs(&self) -> impl Iterator<Item = u32> + '_ {
        self.blocks.iter().filter_map(|b| match b {
            Block::Steinberg { size } => Some(*size),
            _ => None,
        })
    }
}

/// `c(pi) = sum over Steinberg blocks of (size - 1) plus the supercuspidal
/// conductors` (unramified characters contribute 0).
pub fn segment_conductor(s: &SegmentData) -> Result<u32> {
    s.validate()?;
    let st: u32 = s.steinbergs().map(|t| t - 1).sum();
    let sc: u32 = s
        .blocks
        .iter()
        .filter_map(|b| match b {
            Block::Supercuspidal { conductor, .. } => Some(*conductor),
            _ => None,
        })
        .sum();
    Ok(st + sc)
}

/// The root number: `(-1)^{size-1}` per Steinberg block times the
/// supercuspidal root numbers.
pub fn segment_root_number(s: &SegmentData) -> Result<i8> {
    s.validate()?;
    let mut sign = 1i8;
    for b in &s.blocks {
        match b {
            Block::Steinberg { size } => {
                if (size - 1) % 2 == 1 {
                    sign = -sign;
                }
            }
            Block::Supercuspidal { root_number, .. } => sign *= root_number,
        }
    }
    Ok(sign)
}

/// Product of the central characters: trivial from Steinberg blocks and dual
/// pairs, the block's own datum from self-paired blocks. Errors when two
/// nontrivial quadratics would have to be multiplied (label data would be
/// needed to resolve the product).
pub fn segment_central_char(s: &SegmentData) -> Result<QuadCharData> {
    s.validate()?;
    let mut acc = QuadCharData::TRIVIAL;
    for b in &s.blocks {
        if let Block::Supercuspidal { pairing: Pairing::SelfPaired, central, .. } = b {
            if central.nontrivial {
                if acc.nontrivial {
                    return Err(Error::invalid(
                        "central character product of two nontrivial quadratics is indeterminate without labels",
                    ));
                }
                acc = *central;
            }
        }
    }
    Ok(acc)
}

/// A Bernstein component presented by its supercuspidal support:
/// supercuspidal blocks (no Steinbergs), with unramified members as rank-1
/// conductor-0 blocks.
#[derive(Clone, Debug, Serialize)]
pub struct BernsteinComponent {
    pub blocks: Vec<Block>,
}

impl BernsteinComponent {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        for b in &blocks {
            if matches!(b, Block::Steinberg { .. }) {
                return Err(Error::invalid("components are given by supercuspidal data only"));
            }
        }
        Ok(BernsteinComponent { blocks })
    }

    pub fn total_rank(&self) -> u32 {
        self.blocks.iter().map(Block::rank).sum()
    }

    pub fn unramified_count(&self) -> u32 {
        self.blocks
            .iter()
            .filter(|b| matches!(b, Block::Supercuspidal { ramified: false, .. }))
            .count() as u32
    }

    pub fn ramified_blocks(&self) -> Vec<Block> {
        self.blocks
            .iter()
            .filter(|b| matches!(b, Block::Supercuspidal { ramified: true, .. }))
            .cloned()
            .collect()
    }

    pub fn ramified_conductor_sum(&self) -> u32 {
        self.blocks
            .iter()
            .filter_map(|b| match b {
                Block::Supercuspidal { ramified: true, conductor, .. } => Some(*conductor),
                _ => None,
            })
            .sum()
    }

    pub fn root_number_product(&self) -> i8 {
        self.blocks
            .iter()
            .map(|b| match b {
                Block::Supercuspidal { root_number, .. } => *root_number,
                _ => 1,
            })
            .product()
    }
}

/// The constant value of the root number on conductor-`k` members of a
/// component: `(-1)^{k - sum c_rho} prod eps(rho_i)`. `None` when
/// `k < sum c_rho`, where no member can exist.
pub fn bernstein_constant(component: &BernsteinComponent, k: u32) -> Option<i8> {
    let base = component.ramified_conductor_sum();
    if k < base {
        return None;
    }
    let swing = if (k - base) % 2 == 0 { 1 } else { -1 };
    Some(swing * component.root_number_product())
}

/// All members of the component with conductor `k`, enumerated as segment
/// data: the unramified constituents are partitioned into Steinberg blocks
/// (size-1 blocks stay plain characters) with total conductor matching.
pub fn enumerate_component_members(component: &BernsteinComponent, k: u32) -> Result<Vec<SegmentData>> {
    let n = component.total_rank();
    let u = component.unramified_count();
    let base = component.ramified_conductor_sum();
    if k < base {
        return Ok(vec![]);
    }
    let excess = k - base; // = u - (number of parts)
    if u == 0 {
        return if excess == 0 {
            Ok(vec![SegmentData::new(n, component.blocks.clone())?])
        } else {
            Ok(vec![])
        };
    }
    if excess >= u {
        return Ok(vec![]);
    }
    let parts = (u - excess) as usize;
    let unram_members: Vec<&Block> = component
        .blocks
        .iter()
        .filter(|b| matches!(b, Block::Supercuspidal { ramified: false, .. }))
        .collect();
    let mut out = Vec::new();
    for partition in partitions_into_parts(u, parts) {
        let mut blocks = component.ramified_blocks();
        let mut plain = 0usize;
        for t in partition {
            if t == 1 {
                blocks.push((*unram_members[plain]).clone());
                plain += 1;
            } else {
                blocks.push(Block::Steinberg { size: t });
            }
        }
        out.push(SegmentData::new(n, blocks)?);
    }
    Ok(out)
}

/// Partitions of `total` into exactly `parts` positive parts, descending.
fn partitions_into_parts(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, parts: usize, max: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if total == 0 {
                out.push(acc.clone());
            }
            return;
        }
        let lo = total.div_ceil(parts as u32);
        let hi = max.min(total - (parts as u32 - 1));
        for t in (lo.max(1)..=hi).rev() {
            acc.push(t);
            rec(total - t, parts - 1, t, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(total, parts, total, &mut Vec::new(), &mut out);
    out
}

/// The case table for conjugate self-dual characters of prescribed sign and
/// LOCAL conductor: sign +1 needs an unramified place or even conductor;
/// sign -1 needs an unramified place, or conductor exactly `2j - 1`, or even
/// conductor at least `2j`.
pub fn character_existence_conj(v: &PlaceData, k: u32, kappa: i8) -> Result<bool> {
    if v.splitting == Splitting::Split {
        return Err(Error::invalid("character existence table applies at nonsplit places"));
    }
    if kappa.abs() != 1 {
        return Err(Error::invalid("kappa is a sign"));
    }
    if !v.is_ramified() {
        return Ok(true);
    }
    let two_j_minus_one = v.j.doubled() - 1; // j is integral at ramified places
    let k = k as i64;
    Ok(if kappa == 1 {
        k % 2 == 0
    } else {
        k == two_j_minus_one || (k % 2 == 0 && k >= two_j_minus_one + 1)
    })
}

/// Construction recipe tag for an achievable (conductor, central-character
/// conductor) rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipeTag {
    Rank2PrincipalSeries,
    Rank4PrincipalSeries,
    Steinberg,
    Trivial,
}

/// How the central-character conductor is determined from `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralRule {
    /// `l = max{k - (2j-1), 0}`, rounded down to the largest even value at
    /// ramified places.
    ShiftedMax,
    /// `l = 0`.
    Zero,
    /// Split places: every `l <= k`.
    AllUpToK,
}

/// Window of applicable `k` values for a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KWindow {
    All,
    Exactly(u32),
    Odd,
    EvenAtLeast(u32),
    Range { min: u32, max: u32 },
    AtLeast(u32),
}

impl KWindow {
    pub fn contains(&self, k: u32) -> bool {
        match *self {
            KWindow::All => true,
            KWindow::Exactly(v) => k == v,
            KWindow::Odd => k % 2 == 1,
            KWindow::EvenAtLeast(v) => k % 2 == 0 && k >= v,
            KWindow::Range { min, max } => k >= min && k <= max,
            KWindow::AtLeast(v) => k >= v,
        }
    }
}

/// One achievable-pair rule: for `k` in the window, the listed central rule
/// is realized by the tagged recipe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AchievableRule {
    pub central: CentralRule,
    pub window: KWindow,
    pub recipe: RecipeTag,
}

impl AchievableRule {
    /// The central-character conductor this rule offers at `k`, if any.
    pub fn offer(&self, v: &PlaceData, k: u32) -> Option<CentralOffer> {
        if !self.window.contains(k) {
            return None;
        }
        match self.central {
            CentralRule::Zero => Some(CentralOffer::Exactly(0)),
            CentralRule::AllUpToK => Some(CentralOffer::UpTo(k)),
            CentralRule::ShiftedMax => {
                let shift = (v.j.doubled() - 1).max(0);
                let raw = (k as i64 - shift).max(0) as u32;
                let l = if v.is_ramified() { raw - raw % 2 } else { raw };
                Some(CentralOffer::Exactly(l))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CentralOffer {
    Exactly(u32),
    UpTo(u32),
}

/// The rule families for conductor/central-character pairs at a place, for
/// even rank at least 4. Split places route to the all-pairs rule.
pub fn achievable_pairs_conj(v: &PlaceData, n: u32) -> Result<Vec<AchievableRule>> {
    if n % 2 != 0 || n < 4 {
        return Err(Error::OutOfScope(
            "achievable-pair rules are stated for even N at least 4 (N = 2 needs extra congruence conditions)"
                .to_string(),
        ));
    }
    if v.splitting == Splitting::Split {
        return Ok(vec![AchievableRule {
            central: CentralRule::AllUpToK,
            window: KWindow::All,
            recipe: RecipeTag::Rank2PrincipalSeries,
        }]);
    }
    let mut rules = Vec::new();
    let shifted_window = match v.splitting {
        Splitting::WildRamified => {
            let j = v.j.as_int().expect("wild depth is integral") as u32;
            // k <= N/2 or k > 4j - 2
            rules.push(AchievableRule {
                central: CentralRule::ShiftedMax,
                window: KWindow::Range { min: 0, max: n / 2 },
                recipe: RecipeTag::Rank2PrincipalSeries,
            });
            KWindow::AtLeast(4 * j - 1)
        }
        _ => KWindow::All,
    };
    rules.push(AchievableRule {
        central: CentralRule::ShiftedMax,
        window: shifted_window,
        recipe: RecipeTag::Rank2PrincipalSeries,
    });
    // central conductor 0 family
    rules.push(AchievableRule { central: CentralRule::Zero, window: KWindow::Exactly(0), recipe: RecipeTag::Trivial });
    match v.splitting {
        Splitting::Inert => {
            rules.push(AchievableRule { central: CentralRule::Zero, window: KWindow::Odd, recipe: RecipeTag::Steinberg });
            rules.push(AchievableRule {
                central: CentralRule::Zero,
                window: KWindow::EvenAtLeast(2),
                recipe: RecipeTag::Rank2PrincipalSeries,
            });
        }
        Splitting::TameRamified => {
            rules.push(AchievableRule { central: CentralRule::Zero, window: KWindow::Odd, recipe: RecipeTag::Steinberg });
            rules.push(AchievableRule {
                central: CentralRule::Zero,
                window: KWindow::EvenAtLeast(2),
                recipe: RecipeTag::Rank2PrincipalSeries,
            });
        }
        Splitting::WildRamified => {
            let j = v.j.as_int().expect("wild depth is integral") as u32;
            rules.push(AchievableRule {
                central: CentralRule::Zero,
                window: KWindow::Range { min: 1, max: n / 2 },
                recipe: RecipeTag::Steinberg,
            });
            rules.push(AchievableRule {
                central: CentralRule::Zero,
                window: KWindow::AtLeast(8 * j - 4),
                recipe: RecipeTag::Rank4PrincipalSeries,
            });
        }
        _ => unreachable!(),
    }
    Ok(rules)
}

/// Evaluate the rule set: the central-character conductors achievable at `k`.
pub fn achievable_central_conductors(rules: &[AchievableRule], v: &PlaceData, k: u32) -> Vec<u32> {
    let mut out = std::collections::BTreeSet::new();
    for r in rules {
        match r.offer(v, k) {
            Some(CentralOffer::Exactly(l)) => {
                out.insert(l);
            }
            Some(CentralOffer::UpTo(max)) => {
                out.extend(0..=max);
            }
            None => {}
        }
    }
    out.into_iter().collect()
}

/// Endoscopic target of a self-dual existence request.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GroupTarget {
    /// Symplectic-image parameters (odd orthogonal group side); even rank,
    /// trivial central character.
    SympDual,
    /// Orthogonal-image parameters on the symplectic group side; odd rank,
    /// central character `eta`.
    OrthDualOddRank { eta: QuadCharData },
    /// Orthogonal-image parameters on the even orthogonal group side; even
    /// rank, central character `eta`.
    OrthDualEvenRank { eta: QuadCharData },
}

impl GroupTarget {
    fn eta(&self) -> QuadCharData {
        match self {
            GroupTarget::SympDual => QuadCharData::TRIVIAL,
            GroupTarget::OrthDualOddRank { eta } | GroupTarget::OrthDualEvenRank { eta } => *eta,
        }
    }
}

/// A realized existence request together with the witnessing segment data.
#[derive(Clone, Debug, Serialize)]
pub struct ExistenceWitness {
    pub n: u32,
    pub k: u32,
    pub target: GroupTarget,
    pub root_sign: i8,
    pub segments: SegmentData,
}

impl ExistenceWitness {
    /// Recompute conductor, central character, and root number from the
    /// segment data and compare with the request.
    pub fn round_trips(&self) -> Result<bool> {
        let c = segment_conductor(&self.segments)?;
        let cc = segment_central_char(&self.segments)?;
        let eps = segment_root_number(&self.segments)?;
        Ok(c == self.k && cc == self.target.eta() && eps == self.root_sign)
    }
}

/// Build a self-dual witness of rank `n`, conductor `k`, for the requested
/// target and (optionally) root-number sign, following the isobaric recipe
/// `chi_1 + ... + sigma_m + ... + chi_1^{-1}`. Returns `Ok(None)` when the
/// request is excluded (with the exclusion reflecting the parity and
/// conductor-floor constraints of the construction).
pub fn construct_selfdual_witness(
    n: u32,
    k: u32,
    target: GroupTarget,
    root_sign: Option<i8>,
) -> Result<Option<ExistenceWitness>> {
    if n == 0 {
        return Err(Error::invalid("rank must be positive"));
    }
    let eta = target.eta();
    match (&target, n % 2) {
        (GroupTarget::SympDual, 1) | (GroupTarget::OrthDualEvenRank { .. }, 1) => {
            return Err(Error::invalid("even-rank target with odd rank"));
        }
        (GroupTarget::OrthDualOddRank { .. }, 0) => {
            return Err(Error::invalid("odd-rank target with even rank"));
        }
        _ => {}
    }

    // rank 1: self-dual characters have conductor at most the quadratic bound
    if n == 1 {
        if k > 1 {
            return Ok(None);
        }
        if k != eta.conductor {
            return Ok(None);
        }
        let sign = root_sign.unwrap_or(1);
        let (block, achieved) = if k == 0 {
            (Block::unramified_char(eta), 1)
        } else {
            (Block::ramified_char(k, sign, eta, Pairing::SelfPaired), sign)
        };
        let w = ExistenceWitness { n, k, target, root_sign: achieved, segments: SegmentData::new(1, vec![block])? };
        return finish(w, root_sign);
    }

    // middle block options for the rank-2-or-1 core, then pad with dual pairs
    let m = if n % 2 == 0 { 2 } else { 1 };
    let pair_slots = (n - m) / 2;
    let core = match &target {
        GroupTarget::SympDual => build_symplectic_core(n, k, pair_slots)?,
        GroupTarget::OrthDualOddRank { eta } => build_odd_orth_core(k, *eta, pair_slots),
        GroupTarget::OrthDualEvenRank { eta } => build_even_orth_core(n, k, *eta, pair_slots)?,
    };
    let Some(core) = core else { return Ok(None) };

    let mut blocks = core.blocks;
    let remaining = k - core.consumed;
    debug_assert!(remaining % 2 == 0);
    let mut pair_budget = remaining / 2;
    let mut sign_free = core.sign_selectable;
    let mut sign = core.sign;
    let mut tag = 100u32;
    for _ in 0..pair_slots {
        let c = pair_budget; // put the whole budget on the first pair
        pair_budget = 0;
        if c == 0 {
            blocks.push(Block::unramified_char(QuadCharData::TRIVIAL));
            blocks.push(Block::unramified_char(QuadCharData::TRIVIAL));
        } else {
            // a ramified dual pair contributes a selectable chi(-1)
            sign_free = true;
            blocks.push(Block::ramified_char(c, 1, QuadCharData::TRIVIAL, Pairing::Partner(tag)));
            blocks.push(Block::ramified_char(c, 1, QuadCharData::TRIVIAL, Pairing::Partner(tag)));
            tag += 1;
        }
    }
    if pair_budget > 0 {
        // no pair slot could absorb the remaining conductor (n = 2)
        return Ok(None);
    }

    // realize a requested sign through the selectable contribution
    if let Some(want) = root_sign {
        if sign != want {
            if !sign_free {
                return Ok(None);
            }
            flip_one_selectable(&mut blocks)?;
            sign = -sign;
        }
        debug_assert_eq!(sign, want);
    }
    let segments = SegmentData::new(n, blocks)?;
    let w = ExistenceWitness { n, k, target, root_sign: sign, segments };
    finish(w, root_sign)
}

fn finish(w: ExistenceWitness, requested: Option<i8>) -> Result<Option<ExistenceWitness>> {
    if let Some(want) = requested {
        if w.root_sign != want {
            return Ok(None);
        }
    }
    debug_assert!(w.round_trips()?);
    Ok(Some(w))
}

struct CoreBlocks {
    blocks: Vec<Block>,
    consumed: u32,
    sign: i8,
    sign_selectable: bool,
}

/// Symplectic middle block of rank 2 with trivial central character:
/// unramified pair (k = 0), Steinberg (k = 1), ramified pair (even k), or a
/// supercuspidal axiom block (odd k >= 3).
fn build_symplectic_core(n: u32, k: u32, pair_slots: u32) -> Result<Option<CoreBlocks>> {
    debug_assert!(n >= 2 && n % 2 == 0);
    let core = if k % 2 == 0 {
        // absorb everything through pairs when possible; the middle is the
        // unramified pair
        CoreBlocks {
            blocks: vec![
                Block::unramified_char(QuadCharData::TRIVIAL),
                Block::unramified_char(QuadCharData::TRIVIAL),
            ],
            consumed: 0,
            sign: 1,
            sign_selectable: false,
        }
    } else if k == 1 {
        CoreBlocks { blocks: vec![Block::Steinberg { size: 2 }], consumed: 1, sign: -1, sign_selectable: false }
    } else {
        // odd k >= 3: rank-2 ramified supercuspidal with trivial central
        // character and selectable sign
        CoreBlocks {
            blocks: vec![Block::Supercuspidal {
                rank: 2,
                conductor: k,
                root_number: 1,
                ramified: true,
                pairing: Pairing::SelfPaired,
                central: QuadCharData::TRIVIAL,
            }],
            consumed: k,
            sign: 1,
            sign_selectable: true,
        }
    };
    // even k with no pair slots (n = 2): carry the conductor on a ramified pair core
    if k % 2 == 0 && k > 0 && pair_slots == 0 {
        return Ok(Some(CoreBlocks {
            blocks: vec![
                Block::ramified_char(k / 2, 1, QuadCharData::TRIVIAL, Pairing::Partner(1)),
                Block::ramified_char(k / 2, 1, QuadCharData::TRIVIAL, Pairing::Partner(1)),
            ],
            consumed: k,
            sign: 1,
            sign_selectable: true,
        }));
    }
    Ok(Some(core))
}

/// Odd-rank middle block: the central character itself, a rank-1 block; the
/// remaining conductor must be even.
fn build_odd_orth_core(k: u32, eta: QuadCharData, _pair_slots: u32) -> Option<CoreBlocks> {
    if k < eta.conductor || (k - eta.conductor) % 2 != 0 {
        return None;
    }
    let block = if eta.conductor == 0 {
        Block::unramified_char(eta)
    } else {
        Block::ramified_char(eta.conductor, 1, eta, Pairing::SelfPaired)
    };
    let selectable = eta.conductor > 0;
    Some(CoreBlocks { blocks: vec![block], consumed: eta.conductor, sign: 1, sign_selectable: selectable })
}

/// Even-rank orthogonal middle block of rank 2 with central character `eta`.
fn build_even_orth_core(n: u32, k: u32, eta: QuadCharData, pair_slots: u32) -> Result<Option<CoreBlocks>> {
    debug_assert!(n >= 2 && n % 2 == 0);
    if k < eta.conductor {
        return Ok(None);
    }
    if !eta.nontrivial {
        // trivial eta: orthogonal members need even conductor
        if k % 2 != 0 {
            return Ok(None);
        }
        if k > 0 && pair_slots == 0 {
            return Ok(Some(CoreBlocks {
                blocks: vec![
                    Block::ramified_char(k / 2, 1, QuadCharData::TRIVIAL, Pairing::Partner(1)),
                    Block::ramified_char(k / 2, 1, QuadCharData::TRIVIAL, Pairing::Partner(1)),
                ],
                consumed: k,
                sign: 1,
                sign_selectable: true,
            }));
        }
        return Ok(Some(CoreBlocks {
            blocks: vec![
                Block::unramified_char(QuadCharData::TRIVIAL),
                Block::unramified_char(QuadCharData::TRIVIAL),
            ],
            consumed: 0,
            sign: 1,
            sign_selectable: false,
        }));
    }
    // nontrivial eta: the eta-carrier paired with a trivial character when
    // the leftover conductor can go to dual pairs, otherwise a rank-2
    // supercuspidal axiom block of matching parity carries eta
    let carrier_route = (k - eta.conductor) % 2 == 0 && (pair_slots >= 1 || k == eta.conductor);
    if carrier_route {
        let carrier = if eta.conductor == 0 {
            Block::unramified_char(eta)
        } else {
            Block::ramified_char(eta.conductor, 1, eta, Pairing::SelfPaired)
        };
        let selectable = eta.conductor > 0;
        return Ok(Some(CoreBlocks {
            blocks: vec![carrier, Block::unramified_char(QuadCharData::TRIVIAL)],
            consumed: eta.conductor,
            sign: 1,
            sign_selectable: selectable,
        }));
    }
    let min_sc = (eta.conductor + 1).max(2);
    let c_sc = if pair_slots == 0 {
        k // no room for leftover: the supercuspidal carries everything
    } else {
        let mut c = min_sc;
        if c % 2 != k % 2 {
            c += 1;
        }
        c
    };
    if c_sc < min_sc || c_sc > k || c_sc % 2 != k % 2 {
        return Ok(None);
    }
    Ok(Some(CoreBlocks {
        blocks: vec![Block::Supercuspidal {
            rank: 2,
            conductor: c_sc,
            root_number: 1,
            ramified: true,
            pairing: Pairing::SelfPaired,
            central: eta,
        }],
        consumed: c_sc,
        sign: 1,
        sign_selectable: true,
    }))
}

/// Flip the sign carried by one selectable block (a ramified pair member, a
/// supercuspidal axiom block, or a ramified rank-1 carrier).
fn flip_one_selectable(blocks: &mut [Block]) -> Result<()> {
    for b in blocks.iter_mut() {
        if let Block::Supercuspidal { ramified: true, root_number, .. } = b {
            *root_number = -*root_number;
            return Ok(());
        }
    }
    Err(Error::invalid("no selectable sign carrier in the witness"))
}
