//! Concrete truncations `O_E / p_w^M` of quadratic extensions with their
//! conjugation involution, the substrate of the brute-force oracles.
//!
//! Elements are stored on an integral basis with exact modular arithmetic:
//! split places as a product of two copies of `Z/p^M` with coordinate swap,
//! inert places as `(Z/p^M)[x]/(x^2 + a1 x + a0)` with `x -> -a1 - x`, and
//! ramified places as `a + b*w` with `w^2 = A w + B` Eisenstein and
//! `w -> A - w`.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    Split,
    Inert,
    TameRamified,
    WildRamified,
}

impl Splitting {
    pub fn is_ramified(self) -> bool {
        matches!(self, Splitting::TameRamified | Splitting::WildRamified)
    }

    pub fn ramification_index(self) -> u32 {
        if self.is_ramified() {
            2
        } else {
            1
        }
    }
}

/// Defining datum for the quadratic part of a truncated ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadDatum {
    /// Split: product ring, no extra data.
    Split,
    /// Inert: `x^2 + a1 x + a0` irreducible mod p.
    Inert { a1: i64, a0: i64 },
    /// Ramified: `w^2 = A w + B` with `p | A` and `v_p(B) = 1`.
    Eisenstein { a: i64, b: i64 },
}

/// Named wild quadratic extensions of Q_2 accepted by the builders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WildPreset {
    /// Q_2(i), uniformizer 1+i, w^2 = 2w - 2
    Q2I,
    /// Q_2(sqrt(2)), w^2 = 2
    Q2Sqrt2,
    /// Q_2(sqrt(-2)), w^2 = -2
    Q2SqrtM2,
    /// Q_2(sqrt(-5)), uniformizer 1+sqrt(-5), w^2 = 2w - 6
    Q2SqrtM5,
    /// Q_2(sqrt(10)), w^2 = 10
    Q2Sqrt10,
    /// Q_2(sqrt(-10)), w^2 = -10
    Q2SqrtM10,
}

impl WildPreset {
    pub fn datum(self) -> QuadDatum {
        match self {
            WildPreset::Q2I => QuadDatum::Eisenstein { a: 2, b: -2 },
            WildPreset::Q2Sqrt2 => QuadDatum::Eisenstein { a: 0, b: 2 },
            WildPreset::Q2SqrtM2 => QuadDatum::Eisenstein { a: 0, b: -2 },
            WildPreset::Q2SqrtM5 => QuadDatum::Eisenstein { a: 2, b: -6 },
            WildPreset::Q2Sqrt10 => QuadDatum::Eisenstein { a: 0, b: 10 },
            WildPreset::Q2SqrtM10 => QuadDatum::Eisenstein { a: 0, b: -10 },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct RingElt {
    pub c0: u64,
    pub c1: u64,
}

#[derive(Clone, Debug)]
enum Model {
    Split,
    Inert { a1: u64, a0: u64 },
    Ramified { a: u64, b: u64 },
}

/// The quotient `O_E / p_w^M` with conjugation.
#[derive(Clone, Debug)]
pub struct TruncatedQuadRing {
    p: u64,
    w_level: u32,
    splitting: Splitting,
    model: Model,
    hi_mod: u64,
    lo_mod: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_u64(base: u64, exp: u32) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).expect("truncation modulus overflow");
    }
    acc
}

fn is_square_mod_p(a: u64, p: u64) -> bool {
    (0..p).any(|t| (t * t) % p == a % p)
}

impl TruncatedQuadRing {
    /// Build `O_E / p_w^{e*m}` where `m` counts powers of `p_v`.
    pub fn build(p: u64, m: u32, splitting: Splitting, datum: QuadDatum) -> Result<Self> {
        let e = splitting.ramification_index();
        Self::with_w_level(p, e * m, splitting, datum)
    }

    /// Build `O_E / p_w^{w_level}` directly.
    pub fn with_w_level(p: u64, w_level: u32, splitting: Splitting, datum: QuadDatum) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if w_level == 0 {
            return Err(Error::invalid("truncation level must be at least 1"));
        }
        let (hi, lo) = if splitting.is_ramified() {
            ((w_level + 1) / 2, w_level / 2)
        } else {
            (w_level, w_level)
        };
        let hi_mod = pow_u64(p, hi);
        let lo_mod = pow_u64(p, lo);
        let model = match (splitting, datum) {
            (Splitting::Split, QuadDatum::Split) => Model::Split,
            (Splitting::Inert, QuadDatum::Inert { a1, a0 }) => {
                let a1m = a1.rem_euclid(p as i64) as u64;
                let a0m = a0.rem_euclid(p as i64) as u64;
                let irreducible = if p == 2 {
                    a1m == 1 && a0m == 1
                } else {
                    let disc = (a1m * a1m + 4 * (p - a0m % p)) % p;
                    !is_square_mod_p(disc, p)
                };
                if !irreducible {
                    return Err(Error::invalid("inert datum must be irreducible mod p"));
                }
                Model::Inert {
                    a1: a1.rem_euclid(hi_mod as i64) as u64,
                    a0: a0.rem_euclid(hi_mod as i64) as u64,
                }
            }
            (Splitting::TameRamified, QuadDatum::Eisenstein { a, b }) => {
                if p == 2 {
                    return Err(Error::invalid("tame ramification needs odd p"));
                }
                Self::check_eisenstein(p, a, b)?;
                Model::Ramified {
                    a: a.rem_euclid(hi_mod as i64) as u64,
                    b: b.rem_euclid(hi_mod as i64) as u64,
                }
            }
            (Splitting::WildRamified, QuadDatum::Eisenstein { a, b }) => {
                if p != 2 {
                    return Err(Error::invalid("wild places are restricted to p = 2"));
                }
                Self::check_eisenstein(p, a, b)?;
                Model::Ramified {
                    a: a.rem_euclid(hi_mod as i64) as u64,
                    b: b.rem_euclid(hi_mod as i64) as u64,
                }
            }
            _ => return Err(Error::invalid("splitting type does not match the supplied datum")),
        };
        Ok(TruncatedQuadRing { p, w_level, splitting, model, hi_mod, lo_mod })
    }

    fn check_eisenstein(p: u64, a: i64, b: i64) -> Result<()> {
        let pi = p as i64;
        if a.rem_euclid(pi) != 0 {
            return Err(Error::invalid("Eisenstein datum needs p | A"));
        }
        if b.rem_euclid(pi) != 0 || b.rem_euclid(pi * pi) == 0 {
            return Err(Error::invalid("Eisenstein datum needs v_p(B) = 1"));
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn w_level(&self) -> u32 {
        self.w_level
    }

    pub fn splitting(&self) -> Splitting {
        self.splitting
    }

    /// Total number of elements.
    pub fn size(&self) -> u64 {
        self.hi_mod * self.lo_mod
    }

    /// Modulus of the `O_F`-line inside the ring (`p_w^M` intersected with `O_F`).
    pub fn f_mod(&self) -> u64 {
        self.hi_mod
    }

    pub fn zero(&self) -> RingElt {
        RingElt { c0: 0, c1: 0 }
    }

    pub fn one(&self) -> RingElt {
        match self.model {
            Model::Split => RingElt { c0: 1, c1: 1 },
            _ => RingElt { c0: 1, c1: 0 },
        }
    }

    pub fn from_int(&self, n: i64) -> RingElt {
        match self.model {
            Model::Split => {
                let v = n.rem_euclid(self.hi_mod as i64) as u64;
                RingElt { c0: v, c1: v }
            }
            _ => RingElt {
                c0: n.rem_euclid(self.hi_mod as i64) as u64,
                c1: 0,
            },
        }
    }

    fn reduce(&self, c0: u128, c1: u128) -> RingElt {
        RingElt {
            c0: (c0 % self.hi_mod as u128) as u64,
            c1: (c1 % self.lo_mod as u128) as u64,
        }
    }

    pub fn add(&self, x: RingElt, y: RingElt) -> RingElt {
        self.reduce(x.c0 as u128 + y.c0 as u128, x.c1 as u128 + y.c1 as u128)
    }

    pub fn neg(&self, x: RingElt) -> RingElt {
        RingElt {
            c0: (self.hi_mod - x.c0) % self.hi_mod,
            c1: (self.lo_mod - x.c1 % self.lo_mod) % self.lo_mod,
        }
    }

    pub fn sub(&self, x: RingElt, y: RingElt) -> RingElt {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: RingElt, y: RingElt) -> RingElt {
        let (a, b, c, d) = (x.c0 as u128, x.c1 as u128, y.c0 as u128, y.c1 as u128);
        match self.model {
            Model::Split => self.reduce(a * c, b * d),
            Model::Inert { a1, a0 } => {
                // (a + bx)(c + dx) with x^2 = -a1 x - a0
                let m = self.hi_mod as u128;
                let bd = b * d % m;
                let c0 = (a * c % m + (m - a0 as u128 % m) * bd) % m;
                let c1 = (a * d + b * c + (m - a1 as u128 % m) * bd) % m;
                self.reduce(c0, c1)
            }
            Model::Ramified { a: aa, b: bb } => {
                // (a + bw)(c + dw) with w^2 = A w + B
                let m = self.hi_mod as u128;
                let bd = b * d % m;
                let c0 = (a * c % m + bd * (bb as u128) % m) % m;
                let c1 = (a * d + b * c + bd * (aa as u128) % m) % m;
                self.reduce(c0, c1)
            }
        }
    }

    pub fn conj(&self, x: RingElt) -> RingElt {
        match self.model {
            Model::Split => RingElt { c0: x.c1, c1: x.c0 },
            Model::Inert { a1, .. } => {
                // x -> -a1 - x on the generator
                let m = self.hi_mod as u128;
                let c0 = (x.c0 as u128 + (m - a1 as u128 % m) * (x.c1 as u128)) % m;
                let c1 = (m - x.c1 as u128 % m) % m;
                self.reduce(c0, c1)
            }
            Model::Ramified { a, .. } => {
                // w -> A - w
                let m = self.hi_mod as u128;
                let c0 = (x.c0 as u128 + (a as u128) * (x.c1 as u128)) % m;
                let c1 = (self.lo_mod as u128 - x.c1 as u128 % self.lo_mod as u128) % self.lo_mod as u128;
                self.reduce(c0, c1)
            }
        }
    }

    fn vp(v: u64, p: u64, cap: u32) -> u32 {
        if v == 0 {
            return cap;
        }
        let mut v = v;
        let mut k = 0;
        while v % p == 0 && k < cap {
            v /= p;
            k += 1;
        }
        k
    }

    /// `p_w`-adic valuation, capped at the truncation level.
    pub fn val(&self, x: RingElt) -> u32 {
        let cap = self.w_level;
        match self.model {
            Model::Split => {
                let v0 = Self::vp(x.c0, self.p, cap);
                let v1 = Self::vp(x.c1, self.p, cap);
                v0.min(v1)
            }
            Model::Inert { .. } => {
                let v0 = Self::vp(x.c0, self.p, cap);
                let v1 = Self::vp(x.c1, self.p, cap);
                v0.min(v1)
            }
            Model::Ramified { .. } => {
                let v0 = 2 * Self::vp(x.c0, self.p, cap);
                let v1 = 2 * Self::vp(x.c1, self.p, cap) + 1;
                v0.min(v1).min(cap)
            }
        }
    }

    pub fn is_unit(&self, x: RingElt) -> bool {
        self.val(x) == 0
    }

    pub fn is_zero(&self, x: RingElt) -> bool {
        self.val(x) >= self.w_level
    }

    pub fn eq(&self, x: RingElt, y: RingElt) -> bool {
        self.is_zero(self.sub(x, y))
    }

    pub fn uniformizer(&self) -> RingElt {
        match self.model {
            Model::Ramified { .. } => self.reduce(0, 1),
            _ => self.from_int(self.p as i64),
        }
    }

    /// `w^j` as a ring element.
    pub fn uniformizer_pow(&self, j: u32) -> RingElt {
        let mut acc = self.one();
        let u = self.uniformizer();
        for _ in 0..j {
            acc = self.mul(acc, u);
        }
        acc
    }

    /// Multiplicative inverse of a unit (Newton lifting from the residue level).
    pub fn inv(&self, x: RingElt) -> Result<RingElt> {
        if !self.is_unit(x) {
            return Err(Error::invalid("not a unit"));
        }
        let mut inv = self.residue_inverse(x)?;
        // quadratic convergence; w_level <= 64 always
        let iterations = 7 + 1;
        for _ in 0..iterations {
            let two = self.from_int(2);
            inv = self.mul(inv, self.sub(two, self.mul(x, inv)));
        }
        debug_assert!(self.eq(self.mul(x, inv), self.one()));
        Ok(inv)
    }

    fn residue_inverse(&self, x: RingElt) -> Result<RingElt> {
        let p = self.p;
        let inv_mod_p = |v: u64| -> u64 {
            let v = v % p;
            (1..p).find(|&t| (t * v) % p == 1).expect("unit mod p")
        };
        match self.model {
            Model::Split => Ok(RingElt { c0: inv_mod_p(x.c0), c1: inv_mod_p(x.c1) }),
            Model::Ramified { .. } => Ok(RingElt { c0: inv_mod_p(x.c0), c1: 0 }),
            Model::Inert { .. } => {
                // 1/x = conj(x) / (x conj(x)) computed at the residue level
                let n = self.mul(x, self.conj(x));
                let ninv = inv_mod_p(n.c0 % p);
                let cx = self.conj(x);
                Ok(self.reduce(cx.c0 as u128 * ninv as u128, cx.c1 as u128 * ninv as u128))
            }
        }
    }

    /// `x / conj(x)` for a unit `x`.
    pub fn phi(&self, x: RingElt) -> Result<RingElt> {
        Ok(self.mul(x, self.inv(self.conj(x))?))
    }

    /// `x * conj(x)` as a value on the `O_F`-line, reduced mod `f_mod`.
    pub fn norm_f(&self, x: RingElt) -> u64 {
        let n = self.mul(x, self.conj(x));
        match self.model {
            Model::Split => debug_assert_eq!(n.c0, n.c1),
            _ => debug_assert_eq!(n.c1, 0),
        }
        n.c0 % self.f_mod()
    }

    /// The exponent of the different ideal in `p_w` (0 for split/inert).
    pub fn different_exponent(&self) -> u32 {
        match self.model {
            Model::Ramified { a, .. } => {
                // v_w(f'(w)) = v_w(2w - A)
                let two_w = self.mul(self.from_int(2), self.uniformizer());
                let fp = self.sub(two_w, self.from_int(a as i64));
                self.val(fp)
            }
            _ => 0,
        }
    }

    /// All elements of the ring. Only sensible for small truncations.
    pub fn elements(&self) -> Vec<RingElt> {
        let mut out = Vec::with_capacity((self.hi_mod * self.lo_mod) as usize);
        for c0 in 0..self.hi_mod {
            for c1 in 0..self.lo_mod {
                out.push(RingElt { c0, c1 });
            }
        }
        out
    }

    /// Cardinality of `1 + p_w^k` (all units for k = 0).
    pub fn one_plus_level_size(&self, k: u32) -> u64 {
        assert!(k <= self.w_level);
        if k == 0 {
            return self.unit_count();
        }
        // |p_w^k / p_w^M|
        let mut acc = 1u64;
        for j in k..self.w_level {
            acc *= self.level_quotient_size(j);
        }
        acc
    }

    fn level_quotient_size(&self, _j: u32) -> u64 {
        match self.model {
            Model::Ramified { .. } => self.p,
            _ => self.p * self.p,
        }
    }

    pub fn unit_count(&self) -> u64 {
        let total: u64 = (0..self.w_level).map(|j| self.level_quotient_size(j)).product();
        let residue_units = match self.model {
            Model::Split => (self.p - 1) * (self.p - 1),
            Model::Inert { .. } => self.p * self.p - 1,
            Model::Ramified { .. } => self.p - 1,
        };
        total / self.level_quotient_size(0) * residue_units
    }

    /// A generating set of the group `1 + p_w^k` (all units when k = 0),
    /// built from the level filtration.
    pub fn one_plus_level_generators(&self, k: u32) -> Vec<RingElt> {
        let mut gens = Vec::new();
        if k == 0 {
            // residue-level unit representatives
            match self.model {
                Model::Split => {
                    for t in 1..self.p {
                        for u in 1..self.p {
                            gens.push(RingElt { c0: t, c1: u });
                        }
                    }
                }
                Model::Inert { .. } => {
                    for t in 0..self.p {
                        for u in 0..self.p {
                            if t != 0 || u != 0 {
                                gens.push(RingElt { c0: t, c1: u });
                            }
                        }
                    }
                }
                Model::Ramified { .. } => {
                    for t in 1..self.p {
                        gens.push(self.from_int(t as i64));
                    }
                }
            }
        }
        let start = k.max(1);
        for j in start..self.w_level {
            let wj = self.uniformizer_pow(j);
            match self.model {
                Model::Ramified { .. } => {
                    for t in 1..self.p {
                        gens.push(self.add(self.one(), self.mul(self.from_int(t as i64), wj)));
                    }
                }
                _ => {
                    for t in 0..self.p {
                        for u in 0..self.p {
                            if t == 0 && u == 0 {
                                continue;
                            }
                            let r = RingElt { c0: t, c1: u };
                            gens.push(self.add(self.one(), self.mul(r, wj)));
                        }
                    }
                }
            }
        }
        gens
    }

    /// Closure of a generating set under ring multiplication (a finite
    /// subgroup of the units, so inverses come for free).
    pub fn subgroup_closure(&self, gens: &[RingElt]) -> HashSet<RingElt> {
        let mut seen: HashSet<RingElt> = HashSet::new();
        let mut queue: VecDeque<RingElt> = VecDeque::new();
        seen.insert(self.one());
        queue.push_back(self.one());
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.mul(x, *g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Closure of a set of `O_F`-line values under multiplication mod `f_mod`.
    pub fn f_subgroup_closure(&self, gens: &[u64]) -> HashSet<u64> {
        let m = self.f_mod();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(1u64 % m);
        queue.push_back(1u64 % m);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = ((x as u128 * *g as u128) % m as u128) as u64;
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Residue-level view (the quotient by `p_w`) used by the matrix search.
    pub fn residue(&self) -> ResidueRing {
        let model = match self.model {
            Model::Split => Model::Split,
            Model::Inert { a1, a0 } => Model::Inert { a1: a1 % self.p, a0: a0 % self.p },
            Model::Ramified { .. } => Model::Ramified { a: 0, b: 0 },
        };
        ResidueRing { p: self.p, model }
    }

    pub fn reduce_to_residue(&self, x: RingElt) -> RingElt {
        match self.model {
            Model::Ramified { .. } => RingElt { c0: x.c0 % self.p, c1: 0 },
            _ => RingElt { c0: x.c0 % self.p, c1: x.c1 % self.p },
        }
    }
}

/// The residue field (or product of fields) `O_E / p_w` with induced conjugation.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    p: u64,
    model: Model,
}

impl ResidueRing {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn elements(&self) -> Vec<RingElt> {
        match self.model {
            Model::Ramified { .. } => (0..self.p).map(|c0| RingElt { c0, c1: 0 }).collect(),
            _ => {
                let mut out = Vec::new();
                for c0 in 0..self.p {
                    for c1 in 0..self.p {
                        out.push(RingElt { c0, c1 });
                    }
                }
                out
            }
        }
    }

    pub fn size(&self) -> u64 {
        match self.model {
            Model::Ramified { .. } => self.p,
            _ => self.p * self.p,
        }
    }

    pub fn zero(&self) -> RingElt {
        RingElt { c0: 0, c1: 0 }
    }

    pub fn one(&self) -> RingElt {
        match self.model {
            Model::Split => RingElt { c0: 1, c1: 1 },
            _ => RingElt { c0: 1, c1: 0 },
        }
    }

    pub fn add(&self, x: RingElt, y: RingElt) -> RingElt {
        RingElt { c0: (x.c0 + y.c0) % self.p, c1: (x.c1 + y.c1) % self.p }
    }

    pub fn neg(&self, x: RingElt) -> RingElt {
        RingElt { c0: (self.p - x.c0 % self.p) % self.p, c1: (self.p - x.c1 % self.p) % self.p }
    }

    pub fn mul(&self, x: RingElt, y: RingElt) -> RingElt {
        let p = self.p as u128;
        let (a, b, c, d) = (x.c0 as u128, x.c1 as u128, y.c0 as u128, y.c1 as u128);
        match self.model {
            Model::Split => RingElt { c0: ((a * c) % p) as u64, c1: ((b * d) % p) as u64 },
            Model::Inert { a1, a0 } => {
                let bd = b * d % p;
                let c0 = (a * c % p + (p - a0 as u128 % p) * bd) % p;
                let c1 = (a * d + b * c + (p - a1 as u128 % p) * bd) % p;
                RingElt { c0: c0 as u64, c1: c1 as u64 }
            }
            Model::Ramified { .. } => RingElt { c0: ((a * c) % p) as u64, c1: 0 },
        }
    }

    pub fn conj(&self, x: RingElt) -> RingElt {
        match self.model {
            Model::Split => RingElt { c0: x.c1, c1: x.c0 },
            Model::Inert { a1, .. } => {
                let p = self.p;
                RingElt {
                    c0: (x.c0 + (p - a1 % p) * x.c1 % p) % p,
                    c1: (p - x.c1 % p) % p,
                }
            }
            Model::Ramified { .. } => x,
        }
    }

    pub fn is_unit(&self, x: RingElt) -> bool {
        match self.model {
            Model::Split => x.c0 % self.p != 0 && x.c1 % self.p != 0,
            Model::Inert { .. } => x.c0 % self.p != 0 || x.c1 % self.p != 0,
            Model::Ramified { .. } => x.c0 % self.p != 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> TruncatedQuadRing {
        TruncatedQuadRing::build(3, 1, Splitting::Inert, QuadDatum::Inert { a1: 0, a0: 1 }).unwrap()
    }

    fn tame5(m: u32) -> TruncatedQuadRing {
        TruncatedQuadRing::build(5, m, Splitting::TameRamified, QuadDatum::Eisenstein { a: 0, b: 5 }).unwrap()
    }

    fn q2i(m: u32) -> TruncatedQuadRing {
        TruncatedQuadRing::build(2, m, Splitting::WildRamified, WildPreset::Q2I.datum()).unwrap()
    }

    #[test]
    fn build_examples() {
        let r = f9();
        assert_eq!(r.size(), 9);
        // conjugation is the Frobenius x -> x^3 on F_9
        let x = RingElt { c0: 0, c1: 1 };
        let x3 = r.mul(r.mul(x, x), x);
        assert_eq!(r.conj(x), x3);

        let r = tame5(2);
        assert_eq!(r.size(), 625);
        assert_eq!(r.different_exponent(), 1);

        let r = q2i(3);
        assert_eq!(r.size(), 64);
        assert_eq!(r.different_exponent(), 2);
        // i = w - 1 conjugates to -i
        let i = r.sub(r.uniformizer(), r.one());
        assert!(r.eq(r.conj(i), r.neg(i)));
        assert!(r.eq(r.mul(i, i), r.from_int(-1)));
    }

    #[test]
    fn conjugation_is_involution_and_ring_map() {
        for ring in [f9(), tame5(2), q2i(2)] {
            for x in ring.elements() {
                assert!(ring.eq(ring.conj(ring.conj(x)), x));
            }
            let xs = ring.elements();
            for &x in xs.iter().take(20) {
                for &y in xs.iter().take(20) {
                    assert!(ring.eq(ring.conj(ring.mul(x, y)), ring.mul(ring.conj(x), ring.conj(y))));
                    assert!(ring.eq(ring.conj(ring.add(x, y)), ring.add(ring.conj(x), ring.conj(y))));
                }
            }
        }
    }

    #[test]
    fn split_model_is_product_with_swap() {
        let r = TruncatedQuadRing::build(3, 2, Splitting::Split, QuadDatum::Split).unwrap();
        let x = RingElt { c0: 4, c1: 7 };
        assert_eq!(r.conj(x), RingElt { c0: 7, c1: 4 });
        assert_eq!(r.norm_f(x), 28 % 9);
    }

    #[test]
    fn valuation_and_units() {
        let r = tame5(2);
        assert_eq!(r.val(r.uniformizer()), 1);
        assert_eq!(r.val(r.from_int(5)), 2);
        assert_eq!(r.val(r.from_int(3)), 0);
        assert_eq!(r.val(r.zero()), 4);
        let unit_count = r.elements().iter().filter(|&&x| r.is_unit(x)).count() as u64;
        assert_eq!(unit_count, r.unit_count());
        assert_eq!(r.one_plus_level_size(1), r.elements().iter().filter(|&&x| r.val(r.sub(x, r.one())) >= 1).count() as u64);
    }

    #[test]
    fn inversion() {
        for ring in [f9(), tame5(2), q2i(3)] {
            for x in ring.elements() {
                if ring.is_unit(x) {
                    let inv = ring.inv(x).unwrap();
                    assert!(ring.eq(ring.mul(x, inv), ring.one()));
                }
            }
        }
    }

    #[test]
    fn phi_lands_in_norm_one() {
        for ring in [f9(), tame5(2), q2i(3)] {
            for x in ring.elements() {
                if ring.is_unit(x) {
                    let y = ring.phi(x).unwrap();
                    assert_eq!(ring.norm_f(y), 1 % ring.f_mod());
                }
            }
        }
    }

    #[test]
    fn generators_generate() {
        let r = tame5(1);
        let gens = r.one_plus_level_generators(0);
        let closure = r.subgroup_closure(&gens);
        assert_eq!(closure.len() as u64, r.unit_count());
        let gens1 = r.one_plus_level_generators(1);
        let closure1 = r.subgroup_closure(&gens1);
        assert_eq!(closure1.len() as u64, r.one_plus_level_size(1));
    }
}
