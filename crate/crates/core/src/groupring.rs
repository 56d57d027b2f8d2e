//! Exact arithmetic in `R_m G_i = (Z/p^m)[Z/p^i]` and the operator
//! polynomials `P(i,j)`, `Q_d(i,j)` and `T_d(i)`.
//!
//! An element of level `i` is stored densely: `coeffs[k]` is the coefficient
//! of `σ^k` for `0 <= k < p^i`, reduced to `[0, p^m)`.

use crate::error::{Error, Result};
use crate::syntax;
use num_integer::Integer;
use num_traits::ToPrimitive;
use std::fmt;

/// A residue modulo `p^m`, always reduced to `[0, p^m)`.
pub type Residue = u64;

/// Largest modulus `p^m` accepted; keeps products of two residues in `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| p % q != 0)
}

/// The triple `(p, n, m)`: `G = Z/p^n` and coefficients in `Z/p^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupRingParams {
    p: u64,
    n: u32,
    m: u32,
}

impl GroupRingParams {
    pub fn new(p: u64, n: u32, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        let fits = |e: u32, bound: u64| p.checked_pow(e).is_some_and(|v| v <= bound);
        if !fits(m, MAX_MODULUS) {
            return Err(Error::InvalidParams(format!("p^m = {p}^{m} is too large")));
        }
        if !fits(n, 1 << 16) {
            return Err(Error::InvalidParams(format!("p^n = {p}^{n} is too large")));
        }
        Ok(Self { p, n, m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `p^m`.
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    /// `|G_level| = p^level`.
    pub fn order(&self, level: u32) -> usize {
        self.p.pow(level) as usize
    }

    /// Same `p` and `n` with a different coefficient exponent.
    pub fn with_m(&self, m: u32) -> Result<Self> {
        Self::new(self.p, self.n, m)
    }

    pub fn reduce(&self, x: i128) -> Residue {
        x.rem_euclid(self.modulus() as i128) as Residue
    }

    pub fn pow_mod(&self, base: Residue, exp: u64) -> Residue {
        pow_mod(base, exp, self.modulus())
    }

    /// Whether the integer `d` lies in `U_1 = 1 + pZ`.
    pub fn in_u1(&self, d: i128) -> bool {
        d.rem_euclid(self.p as i128) == 1
    }

    fn check_level(&self, level: u32) -> Result<()> {
        if level > self.n {
            return Err(Error::IndexOrder(format!("level {level} exceeds n = {}", self.n)));
        }
        Ok(())
    }
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % modulus;
        }
        b = b * b % modulus;
        exp >>= 1;
    }
    acc
}

/// An element of `R_m G_level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    params: GroupRingParams,
    level: u32,
    coeffs: Vec<Residue>,
}

impl GroupRingElement {
    pub fn zero(params: GroupRingParams, level: u32) -> Result<Self> {
        params.check_level(level)?;
        Ok(Self { params, level, coeffs: vec![0; params.order(level)] })
    }

    pub fn constant(params: GroupRingParams, level: u32, c: i128) -> Result<Self> {
        Self::monomial(params, level, 0, c)
    }

    pub fn one(params: GroupRingParams, level: u32) -> Result<Self> {
        Self::constant(params, level, 1)
    }

    /// `c·σ^exp`, with the exponent taken mod `p^level`.
    pub fn monomial(params: GroupRingParams, level: u32, exp: i64, c: i128) -> Result<Self> {
        let mut x = Self::zero(params, level)?;
        let k = exp.rem_euclid(x.coeffs.len() as i64) as usize;
        x.coeffs[k] = params.reduce(c);
        Ok(x)
    }

    /// Builds an element from integer coefficients of `σ^0, σ^1, ...`; the
    /// list may be longer than `p^level` and wraps around.
    pub fn from_coeffs(params: GroupRingParams, level: u32, coeffs: &[i128]) -> Result<Self> {
        let mut x = Self::zero(params, level)?;
        let len = x.coeffs.len();
        let q = params.modulus();
        for (k, &c) in coeffs.iter().enumerate() {
            let slot = &mut x.coeffs[k % len];
            *slot = (*slot + params.reduce(c)) % q;
        }
        Ok(x)
    }

    /// `σ^exp - c`.
    pub fn sigma_power_minus(params: GroupRingParams, level: u32, exp: u64, c: i128) -> Result<Self> {
        let s = Self::monomial(params, level, exp as i64, 1)?;
        s.sub(&Self::constant(params, level, c)?)
    }

    pub fn params(&self) -> GroupRingParams {
        self.params
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[Residue] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch(format!("{} vs {}", self.level, other.level)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let q = self.params.modulus();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % q).collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let q = self.params.modulus();
        let coeffs = self.coeffs.iter().map(|&a| (q - a) % q).collect();
        self.with_coeffs(coeffs)
    }

    /// Multiplication by the scalar `c`.
    pub fn scale(&self, c: i128) -> Self {
        let q = self.params.modulus();
        let c = self.params.reduce(c);
        let coeffs = self.coeffs.iter().map(|&a| a * c % q).collect();
        self.with_coeffs(coeffs)
    }

    /// Cyclic convolution, using `σ^{p^level} = 1`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let q = self.params.modulus();
        let len = self.coeffs.len();
        let mut out = vec![0u64; len];
        for (a_idx, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (b_idx, &b) in other.coeffs.iter().enumerate() {
                let k = (a_idx + b_idx) % len;
                out[k] = (out[k] + a * b) % q;
            }
        }
        Ok(self.with_coeffs(out))
    }

    /// Multiplication by `σ^shift`.
    pub fn shift(&self, shift: usize) -> Self {
        let len = self.coeffs.len();
        let mut out = vec![0; len];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[(k + shift) % len] = c;
        }
        self.with_coeffs(out)
    }

    /// The same representative polynomial read at a higher level. This is a
    /// coefficient embedding, not a ring map.
    pub fn embed(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::IndexOrder(format!("cannot embed level {} into {level}", self.level)));
        }
        let mut x = Self::zero(self.params, level)?;
        x.coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        Ok(x)
    }

    /// Every coefficient divisible by `p^e`.
    pub fn divisible_by_p_power(&self, e: u32) -> bool {
        if e >= self.params.m {
            return self.is_zero();
        }
        let pe = self.params.p.pow(e);
        self.coeffs.iter().all(|&c| c % pe == 0)
    }

    /// Parses `c0 + c1*s + c2*s^2 + ...` (`σ` is accepted for `s`).
    pub fn parse(params: GroupRingParams, level: u32, text: &str) -> Result<Self> {
        let mut x = Self::zero(params, level)?;
        for (c, e) in syntax::parse_terms(text, &["s", "σ"])? {
            if !c.is_integer() {
                return Err(Error::Parse(format!("non-integer coefficient {c}")));
            }
            let c = c.to_integer().mod_floor(&(params.modulus().into()));
            let term = Self::monomial(params, level, e, c.to_i128().unwrap_or(0))?;
            x = x.add(&term)?;
        }
        Ok(x)
    }

    fn with_coeffs(&self, coeffs: Vec<Residue>) -> Self {
        Self { params: self.params, level: self.level, coeffs }
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let var = match k {
                0 => String::new(),
                1 => "s".to_string(),
                _ => format!("s^{k}"),
            };
            parts.push(match (c, k) {
                (_, 0) => c.to_string(),
                (1, _) => var,
                _ => format!("{c}*{var}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn check_indices(params: GroupRingParams, i: u32, j: u32) -> Result<()> {
    if j > i || i > params.n {
        return Err(Error::IndexOrder(format!("need 0 <= j <= i <= n, got j={j}, i={i}, n={}", params.n)));
    }
    Ok(())
}

/// `P(i,j) = Σ_{k < p^{i-j}} σ^{k p^j}` as an element of `R_m G_level`.
pub fn poly_p_at(params: GroupRingParams, i: u32, j: u32, level: u32) -> Result<GroupRingElement> {
    check_indices(params, i, j)?;
    let mut x = GroupRingElement::zero(params, level)?;
    let len = x.coeffs.len();
    let q = params.modulus();
    let step = params.order(j);
    for k in 0..params.order(i - j) {
        let slot = &mut x.coeffs[(k * step) % len];
        *slot = (*slot + 1) % q;
    }
    Ok(x)
}

/// `P(i,j)` in `R_m G_i`.
pub fn poly_p(params: GroupRingParams, i: u32, j: u32) -> Result<GroupRingElement> {
    poly_p_at(params, i, j, i)
}

/// `Q_d(i,j) = Σ_{k < p^{i-j}} (d^{p^j})^{p^{i-j}-1-k} σ^{k p^j}` in `R_m G_level`.
pub fn poly_q_at(
    params: GroupRingParams,
    d: i128,
    i: u32,
    j: u32,
    level: u32,
    unit_check: bool,
) -> Result<GroupRingElement> {
    check_indices(params, i, j)?;
    if unit_check && !params.in_u1(d) {
        return Err(Error::NotInU1(d.to_string()));
    }
    let mut x = GroupRingElement::zero(params, level)?;
    let len = x.coeffs.len();
    let q = params.modulus();
    let dj = params.pow_mod(params.reduce(d), params.order(j) as u64);
    let step = params.order(j);
    let terms = params.order(i - j);
    for k in 0..terms {
        let c = params.pow_mod(dj, (terms - 1 - k) as u64);
        let slot = &mut x.coeffs[(k * step) % len];
        *slot = (*slot + c) % q;
    }
    Ok(x)
}

/// `Q_d(i,j)` in `R_m G_i`, with the `d ∈ U_1` check switched on.
pub fn poly_q(params: GroupRingParams, d: i128, i: u32, j: u32) -> Result<GroupRingElement> {
    poly_q_at(params, d, i, j, i, true)
}

/// `T_d(i) = Σ_{s=1}^{p^i-1} Σ_{k<s} d^k σ^{s-1-k}` in `R_m G_level`.
///
/// The coefficient of `σ^e` is `1 + d + ... + d^{p^i - 2 - e}`.
pub fn poly_t_at(params: GroupRingParams, d: i128, i: u32, level: u32) -> Result<GroupRingElement> {
    params.check_level(i)?;
    let mut x = GroupRingElement::zero(params, level)?;
    let len = x.coeffs.len();
    let q = params.modulus();
    let d = params.reduce(d);
    let top = params.order(i);
    let mut partial = 0u64;
    let mut power = 1u64;
    // Walk e downwards so the geometric partial sums can be accumulated.
    for e in (0..top.saturating_sub(1)).rev() {
        partial = (partial + power) % q;
        power = power * d % q;
        let slot = &mut x.coeffs[e % len];
        *slot = (*slot + partial) % q;
    }
    Ok(x)
}

/// `T_d(i)` in `R_m G_i`.
pub fn poly_t(params: GroupRingParams, d: i128, i: u32) -> Result<GroupRingElement> {
    poly_t_at(params, d, i, i)
}

/// `φ_d`: evaluation `σ ↦ d`, defined on `R_m G_level` when `d^{p^level} ≡ 1`.
pub fn eval_phi(x: &GroupRingElement, d: i128) -> Result<Residue> {
    let params = x.params;
    let d = params.reduce(d);
    if params.pow_mod(d, x.coeffs.len() as u64) != 1 % params.modulus() {
        return Err(Error::IllDefined(format!(
            "{d}^{} is not 1 mod {}",
            x.coeffs.len(),
            params.modulus()
        )));
    }
    let q = params.modulus();
    let mut acc = 0;
    let mut power = 1 % q;
    for &c in &x.coeffs {
        acc = (acc + c * power) % q;
        power = power * d % q;
    }
    Ok(acc)
}

/// The quotient map `R_m G_level → R_m G_j`.
pub fn project(x: &GroupRingElement, j: u32) -> Result<GroupRingElement> {
    if j > x.level {
        return Err(Error::IndexOrder(format!("cannot project level {} to {j}", x.level)));
    }
    let mut y = GroupRingElement::zero(x.params, j)?;
    let len = y.coeffs.len();
    let q = x.params.modulus();
    for (k, &c) in x.coeffs.iter().enumerate() {
        let slot = &mut y.coeffs[k % len];
        *slot = (*slot + c) % q;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(p: u64, n: u32, m: u32) -> GroupRingParams {
        GroupRingParams::new(p, n, m).unwrap()
    }

    fn el(pr: GroupRingParams, level: u32, c: &[i128]) -> GroupRingElement {
        GroupRingElement::from_coeffs(pr, level, c).unwrap()
    }

    /// Naive oracle: `T_d(i)` straight from the double sum.
    fn t_oracle(pr: GroupRingParams, d: i128, i: u32) -> GroupRingElement {
        let top = pr.order(i) as i128;
        let mut coeffs = vec![0i128; top as usize];
        for s in 1..top {
            for k in 0..s {
                coeffs[(s - 1 - k) as usize] += d.pow(k as u32);
            }
        }
        el(pr, i, &coeffs)
    }

    #[test]
    fn rejects_bad_params() {
        assert!(GroupRingParams::new(4, 1, 1).is_err());
        assert!(GroupRingParams::new(3, 1, 0).is_err());
        assert!(GroupRingParams::new(2, 1, 40).is_err());
    }

    #[test]
    fn addition_examples() {
        let pr = params(2, 1, 2);
        let x = el(pr, 1, &[1, 1]);
        assert_eq!(x.add(&x).unwrap(), el(pr, 1, &[2, 2]));
        assert_eq!(x.add(&GroupRingElement::zero(pr, 1).unwrap()).unwrap(), x);
        assert!(el(pr, 1, &[3, 1]).add(&el(pr, 1, &[1, 3])).unwrap().is_zero());
    }

    #[test]
    fn mismatched_operands() {
        let pr = params(2, 2, 2);
        let a = GroupRingElement::one(pr, 1).unwrap();
        let b = GroupRingElement::one(pr, 2).unwrap();
        assert!(matches!(a.add(&b), Err(Error::LevelMismatch(_))));
        let c = GroupRingElement::one(params(2, 2, 3), 1).unwrap();
        assert_eq!(a.mul(&c), Err(Error::ParamsMismatch));
    }

    #[test]
    fn multiplication_examples() {
        let pr = params(2, 1, 2);
        let lhs = el(pr, 1, &[-3, 1]);
        let rhs = el(pr, 1, &[3, 1]);
        assert!(lhs.mul(&rhs).unwrap().is_zero());
        let one = GroupRingElement::one(pr, 1).unwrap();
        assert_eq!(rhs.mul(&one).unwrap(), rhs);
        let x = el(pr, 1, &[1, 1]);
        assert_eq!(x.mul(&x).unwrap(), el(pr, 1, &[2, 2]));
    }

    #[test]
    fn p_examples() {
        let pr = params(2, 2, 2);
        assert_eq!(poly_p(pr, 2, 1).unwrap(), el(pr, 2, &[1, 0, 1, 0]));
        assert_eq!(poly_p(pr, 2, 0).unwrap(), el(pr, 2, &[1, 1, 1, 1]));
        assert_eq!(poly_p(pr, 1, 1).unwrap(), GroupRingElement::one(pr, 1).unwrap());
        assert!(matches!(poly_p(pr, 1, 2), Err(Error::IndexOrder(_))));
        assert!(matches!(poly_p(pr, 3, 0), Err(Error::IndexOrder(_))));
    }

    #[test]
    fn q_examples() {
        let pr = params(2, 1, 2);
        assert_eq!(poly_q(pr, 3, 1, 0).unwrap(), el(pr, 1, &[3, 1]));
        assert_eq!(poly_q(pr, 3, 1, 1).unwrap(), GroupRingElement::one(pr, 1).unwrap());
        let pr3 = params(3, 1, 3);
        assert_eq!(poly_q(pr3, 4, 1, 0).unwrap(), el(pr3, 1, &[16, 4, 1]));
        assert!(matches!(poly_q(pr3, 2, 1, 0), Err(Error::NotInU1(_))));
        assert!(poly_q_at(pr3, 2, 1, 0, 1, false).is_ok());
    }

    #[test]
    fn t_examples() {
        for p in [2, 3, 5] {
            let pr = params(p, 1, 2);
            assert!(poly_t(pr, 1 + p as i128, 0).unwrap().is_zero());
        }
        let pr = params(2, 1, 3);
        for d in [-1, 1, 3, 5] {
            assert_eq!(poly_t(pr, d, 1).unwrap(), GroupRingElement::one(pr, 1).unwrap());
        }
        let pr3 = params(3, 1, 2);
        assert_eq!(poly_t(pr3, 1, 1).unwrap(), el(pr3, 1, &[2, 1]));
    }

    #[test]
    fn t_matches_double_sum() {
        for (p, n) in [(2, 3), (3, 2), (5, 1)] {
            let pr = params(p, n, 3);
            for d in -3..12 {
                for i in 0..=n {
                    assert_eq!(poly_t(pr, d, i).unwrap(), t_oracle(pr, d, i));
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        for (p, n, m) in [(2, 2, 3), (3, 1, 2), (5, 1, 1)] {
            let pr = params(p, n, m);
            let v = eval_phi(&poly_p(pr, n, 0).unwrap(), 1).unwrap();
            assert_eq!(v, pr.reduce(p.pow(n) as i128));
        }
        let pr = params(2, 1, 2);
        assert_eq!(eval_phi(&el(pr, 1, &[1, 1]), 3).unwrap(), 0);
        let pr27 = params(3, 1, 3);
        assert!(matches!(eval_phi(&el(pr27, 1, &[1, 1]), 4), Err(Error::IllDefined(_))));
    }

    #[test]
    fn project_examples() {
        let pr = params(2, 2, 2);
        let x = project(&poly_p(pr, 2, 0).unwrap(), 1).unwrap();
        assert_eq!(x, el(pr, 1, &[2, 2]));
        let pr = params(2, 3, 3);
        for i in 1..=3 {
            let t = project(&poly_t(pr, -1, i).unwrap(), 0).unwrap();
            assert_eq!(t, GroupRingElement::constant(pr, 0, 1 << (i - 1)).unwrap());
        }
        let y = poly_q(pr, 5, 3, 1).unwrap();
        assert_eq!(project(&y, 3).unwrap(), y);
        assert!(project(&y, 4).is_err());
    }

    #[test]
    fn display_and_parse() {
        let pr = params(2, 2, 2);
        assert_eq!(poly_p(pr, 2, 1).unwrap().to_string(), "1 + s^2");
        assert_eq!(el(pr, 1, &[2, 2]).to_string(), "2 + 2*s");
        assert_eq!(GroupRingElement::zero(pr, 1).unwrap().to_string(), "0");
        let x = GroupRingElement::parse(pr, 2, "3 - s + 2*s^5 + s^-1").unwrap();
        assert_eq!(x, el(pr, 2, &[3, 1, 0, 1]));
        let round = GroupRingElement::parse(pr, 2, &x.to_string()).unwrap();
        assert_eq!(round, x);
        assert!(GroupRingElement::parse(pr, 2, "1/2").is_err());
    }

    fn arb_element(pr: GroupRingParams, level: u32) -> impl Strategy<Value = GroupRingElement> {
        let len = pr.order(level);
        prop::collection::vec(0..pr.modulus() as i128, len)
            .prop_map(move |c| GroupRingElement::from_coeffs(pr, level, &c).unwrap())
    }

    proptest! {
        #[test]
        fn ring_axioms(
            (x, y, z) in (arb_element(params(3, 2, 2), 2), arb_element(params(3, 2, 2), 2), arb_element(params(3, 2, 2), 2))
        ) {
            prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
            prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
            let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
            let rhs = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn phi_is_multiplicative(x in arb_element(params(2, 2, 3), 2), y in arb_element(params(2, 2, 3), 2), k in 0i128..4) {
            // d ≡ 1 mod 2 with d^4 ≡ 1 mod 8 holds for every odd d.
            let d = 2 * k + 1;
            let xy = x.mul(&y).unwrap();
            let q = 8;
            prop_assert_eq!(eval_phi(&xy, d).unwrap(), eval_phi(&x, d).unwrap() * eval_phi(&y, d).unwrap() % q);
        }

        #[test]
        fn projection_is_a_ring_map(x in arb_element(params(3, 2, 2), 2), y in arb_element(params(3, 2, 2), 2), j in 0u32..=2) {
            let lhs = project(&x.mul(&y).unwrap(), j).unwrap();
            let rhs = project(&x, j).unwrap().mul(&project(&y, j).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
