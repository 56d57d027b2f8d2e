//! Norm pairs `(a, d)`: the `U_i` filtration, power lemmas, the pair order,
//! minimality conditions, interpolated vectors and the translation between
//! `a` and the norm invariants `b`.

use crate::error::{Error, Result};
use crate::groupring::{pow_mod, GroupRingParams};
use crate::report::{Check, CheckList, Status};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// An entry of `{-∞} ∪ N`. `NegInf` sorts below every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormEntry {
    NegInf,
    Finite(u32),
}

impl NormEntry {
    pub fn finite(self) -> Option<u32> {
        match self {
            NormEntry::NegInf => None,
            NormEntry::Finite(v) => Some(v),
        }
    }

    pub fn is_neg_inf(self) -> bool {
        self == NormEntry::NegInf
    }

    /// `self + k`, with `-∞ + k = -∞`.
    pub fn plus(self, k: u32) -> Self {
        match self {
            NormEntry::NegInf => NormEntry::NegInf,
            NormEntry::Finite(v) => NormEntry::Finite(v + k),
        }
    }

    /// `p^self`, with `p^{-∞} = 0`.
    pub fn p_power(self, p: u64) -> u64 {
        self.finite().map_or(0, |v| p.pow(v))
    }
}

impl fmt::Display for NormEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormEntry::NegInf => f.write_str("-inf"),
            NormEntry::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for NormEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" | "−∞" | "-∞" => Ok(NormEntry::NegInf),
            t => t.parse().map(NormEntry::Finite).map_err(|_| Error::Parse(format!("bad entry `{t}`"))),
        }
    }
}

/// An element of `N ∪ {∞}`. `Infinity` sorts above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNat {
    Finite(u32),
    Infinity,
}

impl ExtNat {
    pub fn finite(self) -> Option<u32> {
        match self {
            ExtNat::Finite(v) => Some(v),
            ExtNat::Infinity => None,
        }
    }

    /// `min(self, m)` as a plain integer.
    pub fn min_with(self, m: u32) -> u32 {
        self.finite().map_or(m, |v| v.min(m))
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(v) => write!(f, "{v}"),
            ExtNat::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtNat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" => Ok(ExtNat::Infinity),
            t => t.parse().map(ExtNat::Finite).map_err(|_| Error::Parse(format!("bad value `{t}`"))),
        }
    }
}

/// A vector over `{-∞} ∪ N`, written `(0,-inf,3)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormVector(Vec<NormEntry>);

impl NormVector {
    pub fn new(entries: Vec<NormEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::BadVector("vectors have length at least 1".into()));
        }
        Ok(Self(entries))
    }

    pub fn neg_inf(len: usize) -> Self {
        Self(vec![NormEntry::NegInf; len.max(1)])
    }

    pub fn entries(&self) -> &[NormEntry] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> NormEntry {
        self.0[i]
    }

    /// Entries within `[0, n]` and `a_0 < n`.
    pub fn check_range(&self, n: u32) -> Result<()> {
        for (i, e) in self.0.iter().enumerate() {
            if let NormEntry::Finite(v) = e {
                if *v > n {
                    return Err(Error::BadVector(format!("a_{i} = {v} exceeds n = {n}")));
                }
            }
        }
        if let NormEntry::Finite(v) = self.0[0] {
            if v >= n {
                return Err(Error::BadVector(format!("a_0 = {v} must be below n = {n}")));
            }
        }
        Ok(())
    }

    /// Whether `{a_j - j}` is strictly increasing over the finite entries.
    pub fn has_increasing_gaps(&self) -> bool {
        let finite: Vec<(usize, u32)> =
            self.0.iter().enumerate().filter_map(|(i, e)| e.finite().map(|v| (i, v))).collect();
        finite.windows(2).all(|w| w[0].1 as i64 + ((w[1].0 - w[0].0) as i64) < w[1].1 as i64)
    }
}

impl fmt::Display for NormVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for NormVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("vector `{t}` must be parenthesised")))?;
        let entries = inner.split(',').map(str::parse).collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

/// A candidate norm pair `(a, d)`; `d` is kept as an integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormPair {
    pub a: NormVector,
    pub d: i64,
}

impl NormPair {
    pub fn new(a: NormVector, d: i64) -> Self {
        Self { a, d }
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn check_twist(&self, p: u64) -> Result<()> {
        if self.d.rem_euclid(p as i64) != 1 {
            return Err(Error::BadTwist(self.d.to_string()));
        }
        Ok(())
    }
}

impl fmt::Display for NormPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.d)
    }
}

impl FromStr for NormPair {
    type Err = Error;

    /// Parses `((a_0,...,a_{m-1}),d)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("pair `{t}` must be parenthesised")))?;
        let (a, d) = inner
            .rsplit_once(',')
            .ok_or_else(|| Error::Parse(format!("pair `{t}` needs a twist")))?;
        let d = d.trim().parse().map_err(|_| Error::Parse(format!("bad twist `{d}`")))?;
        Ok(Self { a: a.parse()?, d })
    }
}

/// The invariants `b_0, b_1, ...` together with `ν` and the value used for
/// `b_ν` (normally `n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BVector {
    pub entries: Vec<NormEntry>,
    pub nu: ExtNat,
    pub b_nu: NormEntry,
}

impl BVector {
    /// `b` with the standard convention `b_ν = n`.
    pub fn new(entries: Vec<NormEntry>, nu: ExtNat, n: u32) -> Self {
        Self { entries, nu, b_nu: NormEntry::Finite(n) }
    }

    /// `b_i`, if known.
    pub fn get(&self, i: usize) -> Option<NormEntry> {
        if self.nu == ExtNat::Finite(i as u32) {
            return Some(self.b_nu);
        }
        self.entries.get(i).copied()
    }
}

impl fmt::Display for BVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Root-of-unity data `ω <= ν` of a tower of degree `p^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TowerConstants {
    pub p: u64,
    pub n: u32,
    pub omega: ExtNat,
    pub nu: ExtNat,
}

impl TowerConstants {
    pub fn new(p: u64, n: u32, omega: ExtNat, nu: ExtNat) -> Result<Self> {
        if omega < ExtNat::Finite(1) || omega > nu {
            return Err(Error::InvalidParams(format!("need 1 <= omega <= nu, got {omega}, {nu}")));
        }
        let tc = Self { p, n, omega, nu };
        if tc.is_excluded() {
            return Err(Error::ExcludedCase);
        }
        Ok(tc)
    }

    pub fn is_excluded(&self) -> bool {
        self.p == 2 && self.omega == ExtNat::Finite(1) && self.nu > ExtNat::Finite(1)
    }
}

fn big_p_power(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

fn valuation(x: &BigInt, p: u64) -> u32 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

/// Largest `i` with `d ∈ U_i = 1 + p^i Z`; infinite iff `d = 1`.
pub fn u_level(d: &BigInt, p: u64) -> ExtNat {
    let x = d - BigInt::one();
    if x.is_zero() {
        ExtNat::Infinity
    } else {
        ExtNat::Finite(valuation(&x, p))
    }
}

pub fn u_level_i64(d: i64, p: u64) -> ExtNat {
    u_level(&BigInt::from(d), p)
}

fn check_u1(d: &BigInt, p: u64) -> Result<()> {
    if d.mod_floor(&BigInt::from(p)) != BigInt::one() {
        return Err(Error::NotInU1(d.to_string()));
    }
    Ok(())
}

/// `u_level(d^{p^j})`, computed with exact integers.
pub fn power_u_level(d: &BigInt, p: u64, j: u32) -> Result<ExtNat> {
    check_u1(d, p)?;
    let e = p.checked_pow(j).and_then(|e| u32::try_from(e).ok()).ok_or_else(|| {
        Error::InvalidParams(format!("exponent {p}^{j} too large"))
    })?;
    Ok(u_level(&d.pow(e), p))
}

/// The level of `d^{p^j}` predicted by the case table of the power lemma:
/// `i + j` in general, `∞` for `d = -1` with `p = 2, j > 0`, and `v + j`
/// for `d ∈ -U_v \ -U_{v+1}` when `p = 2` and `d ∉ U_2`.
pub fn predicted_power_level(d: &BigInt, p: u64, j: u32) -> Result<ExtNat> {
    check_u1(d, p)?;
    let ExtNat::Finite(i) = u_level(d, p) else {
        return Ok(ExtNat::Infinity);
    };
    if p > 2 || i > 1 || j == 0 {
        return Ok(ExtNat::Finite(i + j));
    }
    let plus_one = d + BigInt::one();
    if plus_one.is_zero() {
        return Ok(ExtNat::Infinity);
    }
    Ok(ExtNat::Finite(valuation(&plus_one, 2) + j))
}

/// Integer witnesses for the expansion of `d^{p^j}` with `d = 1 + p^i x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PowerWitness {
    /// `j = 0`: `d = 1 + p^i x` itself.
    Trivial { x: BigInt },
    /// `p > 2`: `d^{p^j} = 1 + p^{i+j} x (1 + f x p^i + g x p^{i+1})`.
    Odd { x: BigInt, f: BigInt, g: BigInt },
    /// `p = 2`: `d^{2^j} = 1 + 2^{i+j} x (1 + 2^{i-1} x + 2^i x c)`.
    Binary { x: BigInt, c: BigInt },
}

impl PowerWitness {
    /// Right-hand side of the expansion.
    pub fn evaluate(&self, p: u64, i: u32, j: u32) -> BigInt {
        let one = BigInt::one();
        let pi = big_p_power(p, i);
        match self {
            PowerWitness::Trivial { x } => &one + &pi * x,
            PowerWitness::Odd { x, f, g } => {
                let inner = &one + f * x * &pi + g * x * &pi * BigInt::from(p);
                &one + big_p_power(p, i + j) * x * inner
            }
            PowerWitness::Binary { x, c } => {
                let inner = &one + big_p_power(2, i - 1) * x + &pi * x * c;
                &one + big_p_power(2, i + j) * x * inner
            }
        }
    }

    /// Whether the expansion holds exactly for `d`.
    pub fn verify(&self, d: &BigInt, p: u64, i: u32, j: u32) -> bool {
        let e = p.pow(j) as u32;
        self.evaluate(p, i, j) == d.pow(e)
    }
}

/// Solves for the witnesses of the power expansion of `d^{p^j}`.
pub fn expand_power(d: &BigInt, p: u64, i: u32, j: u32) -> Result<PowerWitness> {
    if i == 0 {
        return Err(Error::BadShape("the expansion needs i >= 1".into()));
    }
    let pi = big_p_power(p, i);
    let (x, r) = (d - BigInt::one()).div_mod_floor(&pi);
    if !r.is_zero() {
        return Err(Error::BadShape(format!("{d} is not 1 mod {p}^{i}")));
    }
    if j == 0 {
        return Ok(PowerWitness::Trivial { x });
    }
    if x.is_zero() {
        return Ok(if p == 2 {
            PowerWitness::Binary { x, c: BigInt::zero() }
        } else {
            PowerWitness::Odd { x, f: BigInt::zero(), g: BigInt::zero() }
        });
    }
    let e = u32::try_from(p.pow(j)).map_err(|_| Error::BadShape("exponent too large".into()))?;
    let no_expansion = || Error::BadShape(format!("no integer expansion for d={d}, i={i}, j={j}"));
    let exact = |num: &BigInt, den: &BigInt| {
        let (q, r) = num.div_mod_floor(den);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(no_expansion())
        }
    };
    let head = exact(&(d.pow(e) - BigInt::one()), &(big_p_power(p, i + j) * &x))?;
    let xpi = &x * &pi;
    if p == 2 {
        let rest = head - BigInt::one() - big_p_power(2, i - 1) * &x;
        let c = exact(&rest, &xpi)?;
        Ok(PowerWitness::Binary { x, c })
    } else {
        let quotient = exact(&(head - BigInt::one()), &xpi)?;
        let (g, f) = quotient.div_mod_floor(&BigInt::from(p));
        Ok(PowerWitness::Odd { x, f, g })
    }
}

/// Result of comparing two norm pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOrder {
    Lt,
    Gt,
    /// Identical pairs.
    Eq,
    /// Distinct pairs with each `<=` the other.
    Equiv,
}

impl fmt::Display for PairOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairOrder::Lt => "LT",
            PairOrder::Gt => "GT",
            PairOrder::Eq => "EQ",
            PairOrder::Equiv => "EQUIV",
        })
    }
}

/// Lexicographic on `a`; on equal `a`, `(a,d) <= (a,d')` iff
/// `min(v_p(d'-1), m) <= min(v_p(d-1), m)`.
pub fn compare_norm_pairs(x: &NormPair, y: &NormPair, m: u32, p: u64) -> Result<PairOrder> {
    if x.a.len() != y.a.len() {
        return Err(Error::LengthMismatch(x.a.len(), y.a.len()));
    }
    match x.a.entries().cmp(y.a.entries()) {
        Ordering::Less => return Ok(PairOrder::Lt),
        Ordering::Greater => return Ok(PairOrder::Gt),
        Ordering::Equal => {}
    }
    let tx = u_level_i64(x.d, p).min_with(m);
    let ty = u_level_i64(y.d, p).min_with(m);
    Ok(match ty.cmp(&tx) {
        Ordering::Less => PairOrder::Lt,
        Ordering::Greater => PairOrder::Gt,
        Ordering::Equal if x.d == y.d => PairOrder::Eq,
        Ordering::Equal => PairOrder::Equiv,
    })
}

/// `max{0 <= j <= i : a_j ≠ -∞}`, or `None` for `-∞`.
pub fn last_nonneg_index(a: &NormVector, i: usize) -> Result<Option<usize>> {
    if i >= a.len() {
        return Err(Error::IndexRange(format!("index {i} outside length {}", a.len())));
    }
    Ok((0..=i).rev().find(|&j| !a.get(j).is_neg_inf()))
}

/// `ã_i = a_{i*} + (i - i*)`, or `-∞` when `i* = -∞`.
pub fn interpolate(a: &NormVector) -> NormVector {
    let mut out = Vec::with_capacity(a.len());
    let mut last: Option<(usize, u32)> = None;
    for (i, e) in a.entries().iter().enumerate() {
        if let NormEntry::Finite(v) = e {
            last = Some((i, *v));
        }
        out.push(match last {
            None => NormEntry::NegInf,
            Some((j, v)) => NormEntry::Finite(v + (i - j) as u32),
        });
    }
    NormVector(out)
}

/// Inverse of [`interpolate`] on strictly increasing interpolated vectors.
pub fn recover_from_interpolated(at: &NormVector) -> Result<NormVector> {
    let mut out = vec![at.get(0)];
    for i in 1..at.len() {
        let prev_next = at.get(i - 1).plus(1);
        let cur = at.get(i);
        out.push(match cur.cmp(&prev_next) {
            Ordering::Equal => NormEntry::NegInf,
            Ordering::Greater => cur,
            Ordering::Less => {
                return Err(Error::NotInterpolated(format!("entry {i}: {cur} after {}", at.get(i - 1))))
            }
        });
    }
    Ok(NormVector(out))
}

/// Checks the necessary conditions for minimality that only involve `(a, d)`.
/// The freeness condition on `⟨[δ_i]_1⟩` needs field data and is reported as
/// not checked.
pub fn check_minimality_conditions(pair: &NormPair, params: GroupRingParams) -> Result<CheckList> {
    let p = params.p();
    let m = params.m() as usize;
    pair.check_twist(p)?;
    if p == 2 && pair.d.rem_euclid(4) != 1 {
        return Err(Error::Hypothesis2Violated(pair.d.to_string()));
    }
    if pair.a.len() != m {
        return Err(Error::LengthMismatch(pair.a.len(), m));
    }
    pair.a.check_range(params.n())?;
    let a = pair.a.entries();
    let mut report = CheckList::default();

    let mut bad = Vec::new();
    for (i, e) in a.iter().enumerate() {
        let modulus = p.pow(i as u32 + 1);
        let d = pair.d.rem_euclid(modulus as i64) as u64;
        let power = pow_mod(d, e.p_power(p), modulus);
        if power != 1 % modulus {
            bad.push(format!("d^(p^{e}) not in U_{}", i + 1));
        }
    }
    report.push(Check::from_bool("(1) d^(p^a_i) in U_(i+1)", bad.is_empty(), bad.join("; ")));

    let mut bad = Vec::new();
    for i in 0..m {
        for k in i + 1..m {
            if let (NormEntry::Finite(lo), NormEntry::Finite(hi)) = (a[i], a[k]) {
                if lo as usize + (k - i) >= hi as usize {
                    bad.push(format!("a_{i} + {} >= a_{k}", k - i));
                }
            }
        }
    }
    report.push(Check::from_bool("(2) a_i + j < a_(i+j)", bad.is_empty(), bad.join("; ")));

    let mut bad = Vec::new();
    if let ExtNat::Finite(t) = u_level_i64(pair.d, p) {
        let t = t as usize;
        for k in 0..m.saturating_sub(t) {
            if let NormEntry::Finite(v) = a[t + k] {
                if v as usize <= k {
                    bad.push(format!("d in U_{t} \\ U_{}, a_{} = {v} <= {k}", t + 1, t + k));
                }
            }
        }
    }
    report.push(Check::from_bool("(3) a_(t+k) > k for d in U_t \\ U_(t+1)", bad.is_empty(), bad.join("; ")));

    report.push(Check::new(
        "(4) <[delta_i]_1> free over F_p G_(a_i)",
        Status::NotChecked,
        "needs field data",
    ));
    Ok(report)
}

/// Whether `pair` meets the constraints a tower with invariant `nu >= m`
/// imposes on minimal pairs: `a_i <= n + i - ν` and `d^{p^n} ≡ 1 mod p^m`.
pub fn tower_constraints_hold(pair: &NormPair, params: GroupRingParams, nu: u32) -> bool {
    let n = params.n();
    let bounds = pair.a.entries().iter().enumerate().all(|(i, e)| match e.finite() {
        None => true,
        Some(v) => v + nu <= n + i as u32,
    });
    let q = params.modulus();
    let d = params.reduce(pair.d as i128);
    bounds && pow_mod(d, params.order(n) as u64, q) == 1 % q
}

/// Recovers `a` from `b`: `a_0 = b_0`, then `a_i = b_i` if `b_i > b_{i-1}+1`
/// and `i <= ν`, and `-∞` if `b_i = b_{i-1}+1` or `i > ν`.
pub fn a_from_b(b: &BVector, m: usize) -> Result<NormVector> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        if ExtNat::Finite(i as u32) > b.nu {
            out.push(NormEntry::NegInf);
            continue;
        }
        let missing = || Error::IndexRange(format!("b_{i} is not given"));
        let cur = b.get(i).ok_or_else(missing)?;
        if i == 0 {
            out.push(cur);
            continue;
        }
        let prev = b.get(i - 1).ok_or_else(missing)?;
        out.push(match cur.cmp(&prev.plus(1)) {
            Ordering::Greater => cur,
            Ordering::Equal => NormEntry::NegInf,
            Ordering::Less => return Err(Error::ImpossibleBPattern(i)),
        });
    }
    NormVector::new(out)
}

/// Checks the upper bounds on `a` and the congruences on `d` that the tower
/// constants force on a minimal pair. `cyclotomic` enables the equality
/// clause, which is only claimed for non-cyclotomic towers.
pub fn a_bounds_report(a: &NormVector, tc: &TowerConstants, d: i64, cyclotomic: Option<bool>) -> Result<CheckList> {
    if tc.is_excluded() {
        return Err(Error::ExcludedCase);
    }
    let m = a.len() as u32;
    let n = tc.n;
    let p = tc.p;
    let mut report = CheckList::default();
    let within = |i: usize, shift: u32| -> bool {
        match a.get(i) {
            NormEntry::NegInf => true,
            NormEntry::Finite(v) => v + shift <= n + i as u32,
        }
    };
    let star = |k: u32| -> Option<usize> {
        let k = (k as usize).min(a.len() - 1);
        last_nonneg_index(a, k).ok().flatten()
    };
    let equality_iff_star = |limit: usize, shift: u32, k: u32| -> Vec<String> {
        let target = star(k);
        (0..limit)
            .filter(|&i| {
                let equal = a.get(i).finite().is_some_and(|v| v + shift == n + i as u32);
                equal != (Some(i) == target)
            })
            .map(|i| format!("i = {i}"))
            .collect()
    };

    match tc.nu {
        ExtNat::Infinity => {
            let ok = a.entries().iter().all(|e| e.is_neg_inf());
            report.push(Check::from_bool("a_i <= n + i - nu (nu infinite: all -inf)", ok, ""));
        }
        ExtNat::Finite(nu) => {
            let bad: Vec<String> = (0..a.len()).filter(|&i| !within(i, nu)).map(|i| format!("a_{i} = {}", a.get(i))).collect();
            report.push(Check::from_bool(format!("a_i <= n + i - nu = n + i - {nu}"), bad.is_empty(), bad.join("; ")));
            if m > nu {
                match cyclotomic {
                    Some(false) => {
                        let bad = equality_iff_star(a.len(), nu, nu);
                        report.push(Check::from_bool("equality in a_i <= n + i - nu iff i = nu*", bad.is_empty(), bad.join("; ")));
                    }
                    Some(true) => report.push(Check::new("equality clause", Status::NotChecked, "cyclotomic tower")),
                    None => report.push(Check::new("equality clause", Status::NotChecked, "cyclotomic flag not given")),
                }
            }
        }
    }

    if let ExtNat::Finite(omega) = tc.omega {
        let level = u_level_i64(d, p);
        let need = omega.min(m);
        report.push(Check::from_bool(
            format!("d in U_min(omega,m) = U_{need}"),
            level >= ExtNat::Finite(need),
            format!("u-level of {d} is {level}"),
        ));
        let bad: Vec<String> =
            (0..need as usize).filter(|&i| !within(i, omega)).map(|i| format!("a_{i} = {}", a.get(i))).collect();
        report.push(Check::from_bool("a_i <= n + i - omega for i < min(omega,m)", bad.is_empty(), bad.join("; ")));
        if tc.nu == ExtNat::Finite(omega) && omega < m {
            let bad = equality_iff_star(need as usize, omega, omega);
            report.push(Check::from_bool("nu = omega < m: equality iff i = nu*", bad.is_empty(), bad.join("; ")));
        }
        if ExtNat::Finite(omega) < tc.nu && tc.nu <= ExtNat::Finite(m) {
            let limit = (omega as usize + 1).min(a.len());
            let bad: Vec<String> =
                (0..limit).filter(|&i| !within(i, omega + 1)).map(|i| format!("a_{i} = {}", a.get(i))).collect();
            report.push(Check::from_bool("a_i <= n + i - (omega+1) for i <= omega", bad.is_empty(), bad.join("; ")));
            report.push(Check::from_bool(
                format!("d not in U_{}", omega + 1),
                level < ExtNat::Finite(omega + 1),
                format!("u-level of {d} is {level}"),
            ));
        }
        if tc.nu == ExtNat::Finite(omega) {
            report.push(Check::from_bool(
                format!("omega = nu forces d = 1 mod p^{m}"),
                level >= ExtNat::Finite(m),
                format!("u-level of {d} is {level}"),
            ));
        }
    } else {
        let ok = u_level_i64(d, p) >= ExtNat::Finite(m);
        report.push(Check::from_bool(format!("omega = nu = inf forces d = 1 mod p^{m}"), ok, ""));
    }
    Ok(report)
}

/// The embedding-problem statement encoded by the value `b_i`. `big_i` is
/// the exponent with `p^I = [K : F(ξ_{p^{i+1}})]`.
pub fn embedding_statement(b_i: NormEntry, i: u32, n: u32, big_i: u32) -> String {
    match b_i {
        NormEntry::NegInf => format!(
            "Z/p^{} ↠ Z/p^{} over K/F(ξ_{{p^{}}}) is solvable",
            big_i + i,
            big_i,
            i + 1
        ),
        NormEntry::Finite(s) if s >= n => format!(
            "b_{i} = {s} = n: no layer K/K_(s+1) with s < n gives a solvable problem (degenerate: the tower K/K_(n+1) is trivial)"
        ),
        NormEntry::Finite(s) => format!(
            "min s with Z/p^({n}-s-1+{i}) ↠ Z/p^({n}-s-1) over K/K_(s+1) solvable is {s}: Z/p^{} ↠ Z/p^{} over K/K_{} is solvable, and no smaller s works",
            n - s - 1 + i,
            n - s - 1,
            s + 1
        ),
    }
}

/// `|d| <= bound` helper for grids of integer twists.
pub fn twists_up_to(p: u64, bound: i64) -> impl Iterator<Item = i64> {
    (-bound..=bound).filter(move |d| d.rem_euclid(p as i64) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> NormVector {
        s.parse().unwrap()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn params(p: u64, n: u32, m: u32) -> GroupRingParams {
        GroupRingParams::new(p, n, m).unwrap()
    }

    #[test]
    fn parsing_and_display() {
        assert_eq!(v("(0,-inf,3)").to_string(), "(0,-inf,3)");
        assert_eq!(v("( -inf , 2 )").entries(), &[NormEntry::NegInf, NormEntry::Finite(2)]);
        assert!("(0,x)".parse::<NormVector>().is_err());
        assert!("()".parse::<NormVector>().is_err());
        let pair: NormPair = "((-inf,1),4)".parse().unwrap();
        assert_eq!(pair.d, 4);
        assert_eq!(pair.a, v("(-inf,1)"));
        assert_eq!(pair.to_string(), "((-inf,1),4)");
    }

    #[test]
    fn u_level_examples() {
        assert_eq!(u_level_i64(4, 3), ExtNat::Finite(1));
        assert_eq!(u_level_i64(1, 7), ExtNat::Infinity);
        assert_eq!(u_level_i64(17, 2), ExtNat::Finite(4));
    }

    #[test]
    fn power_level_examples() {
        assert_eq!(power_u_level(&big(4), 3, 1).unwrap(), ExtNat::Finite(2));
        assert_eq!(power_u_level(&big(-1), 2, 1).unwrap(), ExtNat::Infinity);
        assert_eq!(power_u_level(&big(9), 2, 2).unwrap(), ExtNat::Finite(5));
        assert!(matches!(power_u_level(&big(2), 3, 1), Err(Error::NotInU1(_))));
    }

    #[test]
    fn predicted_level_matches_exact_small() {
        for p in [2u64, 3, 5] {
            for d in twists_up_to(p, 200) {
                for j in 0..=2 {
                    let d = big(d);
                    assert_eq!(predicted_power_level(&d, p, j).unwrap(), power_u_level(&d, p, j).unwrap(), "p={p} d={d} j={j}");
                }
            }
        }
    }

    #[test]
    fn expansion_examples() {
        let w = expand_power(&big(4), 3, 1, 1).unwrap();
        assert_eq!(w, PowerWitness::Odd { x: big(1), f: big(2), g: big(0) });
        let w = expand_power(&big(5), 2, 2, 1).unwrap();
        assert_eq!(w, PowerWitness::Binary { x: big(1), c: big(0) });
        let w = expand_power(&big(10), 3, 2, 0).unwrap();
        assert_eq!(w, PowerWitness::Trivial { x: big(1) });
        assert!(matches!(expand_power(&big(4), 3, 2, 1), Err(Error::BadShape(_))));
    }

    #[test]
    fn expansions_verify() {
        for p in [2u64, 3, 5] {
            for i in 1..=3 {
                for j in 0..=3 {
                    for x in -10i64..=10 {
                        let d = big(1) + big_p_power(p, i) * big(x);
                        let w = expand_power(&d, p, i, j).unwrap();
                        assert!(w.verify(&d, p, i, j), "p={p} i={i} j={j} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn comparison_examples() {
        let d = 4;
        let lt = compare_norm_pairs(&NormPair::new(v("(-inf,0)"), d), &NormPair::new(v("(0,0)"), d), 2, 3).unwrap();
        assert_eq!(lt, PairOrder::Lt);
        let a = v("(0,1)");
        let eq = compare_norm_pairs(&NormPair::new(a.clone(), 4), &NormPair::new(a.clone(), 4 + 9), 2, 3).unwrap();
        assert_eq!(eq, PairOrder::Equiv);
        let ord = compare_norm_pairs(&NormPair::new(a.clone(), 1), &NormPair::new(a.clone(), 4), 2, 3).unwrap();
        assert_eq!(ord, PairOrder::Lt);
        assert_eq!(compare_norm_pairs(&NormPair::new(a.clone(), 4), &NormPair::new(a.clone(), 1), 2, 3).unwrap(), PairOrder::Gt);
        assert_eq!(compare_norm_pairs(&NormPair::new(a.clone(), 4), &NormPair::new(a, 4), 2, 3).unwrap(), PairOrder::Eq);
        let err = compare_norm_pairs(&NormPair::new(v("(0)"), 4), &NormPair::new(v("(0,1)"), 4), 2, 3);
        assert_eq!(err, Err(Error::LengthMismatch(1, 2)));
    }

    #[test]
    fn index_and_interpolation_examples() {
        let a = v("(0,-inf,3)");
        assert_eq!(last_nonneg_index(&a, 1).unwrap(), Some(0));
        assert_eq!(last_nonneg_index(&a, 2).unwrap(), Some(2));
        assert_eq!(last_nonneg_index(&v("(-inf,-inf)"), 1).unwrap(), None);
        assert!(last_nonneg_index(&a, 3).is_err());
        assert_eq!(interpolate(&a), v("(0,1,3)"));
        assert_eq!(interpolate(&v("(-inf,-inf)")), v("(-inf,-inf)"));
        assert_eq!(interpolate(&v("(1,-inf,-inf)")), v("(1,2,3)"));
        assert_eq!(recover_from_interpolated(&v("(0,1,3)")).unwrap(), a);
        assert_eq!(recover_from_interpolated(&v("(-inf,-inf)")).unwrap(), v("(-inf,-inf)"));
        assert_eq!(recover_from_interpolated(&v("(1,2,3)")).unwrap(), v("(1,-inf,-inf)"));
        assert!(recover_from_interpolated(&v("(2,2)")).is_err());
        assert!(recover_from_interpolated(&v("(2,-inf)")).is_err());
    }

    #[test]
    fn minimality_examples() {
        let pr = params(3, 2, 2);
        let r = check_minimality_conditions(&NormPair::new(v("(0,0)"), 1), pr).unwrap();
        assert_eq!(r.checks[1].status, Status::Fail);
        let r = check_minimality_conditions(&NormPair::new(v("(-inf,0)"), 4), pr).unwrap();
        assert_eq!(r.checks[2].status, Status::Fail);
        let r = check_minimality_conditions(&NormPair::new(v("(-inf,-inf)"), 1), pr).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks[3].status, Status::NotChecked);
        let pr2 = params(2, 2, 2);
        let err = check_minimality_conditions(&NormPair::new(v("(-inf,-inf)"), 3), pr2);
        assert!(matches!(err, Err(Error::Hypothesis2Violated(_))));
        let err = check_minimality_conditions(&NormPair::new(v("(-inf,-inf)"), 2), pr);
        assert!(matches!(err, Err(Error::BadTwist(_))));
    }

    #[test]
    fn condition_one_uses_levels() {
        // p = 3, d = 4 in U_1 \ U_2: d^(p^0) = 4 is not in U_2, so a_1 = 0 fails (1).
        let pr = params(3, 2, 2);
        let r = check_minimality_conditions(&NormPair::new(v("(-inf,0)"), 4), pr).unwrap();
        assert_eq!(r.checks[0].status, Status::Fail);
        let r = check_minimality_conditions(&NormPair::new(v("(-inf,1)"), 4), pr).unwrap();
        assert_eq!(r.checks[0].status, Status::Pass);
    }

    #[test]
    fn b_translation_examples() {
        let b = BVector::new(vec![NormEntry::NegInf, NormEntry::Finite(2), NormEntry::Finite(3)], ExtNat::Finite(3), 3);
        assert_eq!(a_from_b(&b, 3).unwrap(), v("(-inf,2,-inf)"));
        let b = BVector::new(vec![NormEntry::NegInf; 3], ExtNat::Infinity, 2);
        assert_eq!(a_from_b(&b, 3).unwrap(), v("(-inf,-inf,-inf)"));
        let b = BVector::new(vec![NormEntry::NegInf], ExtNat::Finite(1), 2);
        assert_eq!(a_from_b(&b, 4).unwrap(), v("(-inf,2,-inf,-inf)"));
        let bad = BVector::new(vec![NormEntry::Finite(1), NormEntry::Finite(1)], ExtNat::Finite(3), 3);
        assert_eq!(a_from_b(&bad, 2), Err(Error::ImpossibleBPattern(1)));
    }

    #[test]
    fn bounds_examples() {
        let tc = TowerConstants::new(3, 2, ExtNat::Finite(1), ExtNat::Finite(3)).unwrap();
        let r = a_bounds_report(&v("(0,-inf)"), &tc, 4, Some(false)).unwrap();
        assert!(!r.passed());
        let tc = TowerConstants::new(3, 2, ExtNat::Finite(1), ExtNat::Finite(1)).unwrap();
        let r = a_bounds_report(&v("(-inf,-inf)"), &tc, 4, Some(false)).unwrap();
        assert!(r.failures().any(|c| c.label.contains("forces d = 1")));
        let tc = TowerConstants::new(3, 2, ExtNat::Finite(1), ExtNat::Finite(3)).unwrap();
        assert!(a_bounds_report(&v("(-inf,-inf)"), &tc, 4, Some(true)).unwrap().passed());
        assert_eq!(TowerConstants::new(2, 1, ExtNat::Finite(1), ExtNat::Finite(3)), Err(Error::ExcludedCase));
    }

    #[test]
    fn embedding_statements() {
        assert_eq!(embedding_statement(NormEntry::NegInf, 1, 3, 2), "Z/p^3 ↠ Z/p^2 over K/F(ξ_{p^2}) is solvable");
        let s = embedding_statement(NormEntry::Finite(0), 1, 2, 0);
        assert!(s.starts_with("min s with Z/p^(2-s-1+1)"));
        assert!(s.contains("is 0"));
        assert!(embedding_statement(NormEntry::Finite(2), 1, 2, 0).contains("degenerate"));
    }

    proptest::proptest! {
        #[test]
        fn order_is_a_preorder(
            a in proptest::collection::vec(proptest::option::of(0u32..3), 2),
            b in proptest::collection::vec(proptest::option::of(0u32..3), 2),
            ds in proptest::collection::vec(-30i64..30, 3),
        ) {
            let to_vec = |x: &Vec<Option<u32>>| NormVector::new(x.iter().map(|e| e.map_or(NormEntry::NegInf, NormEntry::Finite)).collect()).unwrap();
            let d: Vec<i64> = ds.iter().map(|x| 3 * x + 1).collect();
            let pairs = [NormPair::new(to_vec(&a), d[0]), NormPair::new(to_vec(&b), d[1]), NormPair::new(to_vec(&a), d[2])];
            let le = |x: &NormPair, y: &NormPair| matches!(compare_norm_pairs(x, y, 2, 3).unwrap(), PairOrder::Lt | PairOrder::Eq | PairOrder::Equiv);
            for x in &pairs {
                proptest::prop_assert!(le(x, x));
                for y in &pairs {
                    proptest::prop_assert!(le(x, y) || le(y, x));
                    for z in &pairs {
                        if le(x, y) && le(y, z) {
                            proptest::prop_assert!(le(x, z));
                        }
                    }
                }
            }
            let shifted = NormPair::new(to_vec(&a), d[0] + 9 * ds[1]);
            proptest::prop_assert!(matches!(compare_norm_pairs(&pairs[0], &shifted, 2, 3).unwrap(), PairOrder::Eq | PairOrder::Equiv));
        }
    }
}
