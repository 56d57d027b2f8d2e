//! Exact arithmetic in cyclotomic fields `Q(ζ_M)`, norms down a cyclic
//! `p`-power tower `K = Q(ζ_M) ⊇ F`, and the explicit cyclotomic witnesses
//! for norm pairs.
//!
//! All interfaces use multiplicative notation: the additive `0` of `K^×`
//! is the field element `1`, `x + y` is `x·y` and `c·x` is `x^c`.

use crate::error::{Error, Result};
use crate::groupring::pow_mod;
use crate::normpair::{BVector, ExtNat, NormEntry, NormPair, NormVector, TowerConstants};
use crate::syntax;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

type Poly = Vec<BigRational>;

fn cyclotomic_memo() -> &'static RwLock<HashMap<u64, Arc<Vec<i64>>>> {
    static MEMO: OnceLock<RwLock<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients of `Φ_M`, lowest degree first.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<i64>> {
    if let Some(c) = cyclotomic_memo().read().expect("memo lock").get(&m) {
        return c.clone();
    }
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in (1..m).filter(|d| m % d == 0) {
        num = exact_div(&num, &cyclotomic_polynomial(d));
    }
    let phi = Arc::new(num);
    cyclotomic_memo().write().expect("memo lock").entry(m).or_insert(phi).clone()
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (j, &b) in den.iter().enumerate() {
            rem[k + j] -= c * b;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `Σ c_k ζ_M^k`, stored reduced modulo `Φ_M`.
#[derive(Clone, Debug)]
pub struct CycloNumber {
    conductor: u64,
    coeffs: Poly,
}

impl CycloNumber {
    /// Reduces `Σ c_k ζ^k` (any number of terms) into canonical form.
    pub fn from_coeffs(conductor: u64, coeffs: &[BigRational]) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::InvalidParams("conductor must be positive".into()));
        }
        let mut folded = vec![BigRational::zero(); conductor as usize];
        for (k, c) in coeffs.iter().enumerate() {
            folded[k % conductor as usize] += c;
        }
        Ok(Self::reduce(conductor, folded))
    }

    pub fn from_integers(conductor: u64, coeffs: &[i64]) -> Result<Self> {
        let c: Poly = coeffs.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        Self::from_coeffs(conductor, &c)
    }

    pub fn rational(r: BigRational) -> Self {
        Self { conductor: 1, coeffs: vec![r] }
    }

    pub fn integer(x: i64) -> Self {
        Self::rational(BigRational::from_integer(x.into()))
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    /// `ζ_M^k`.
    pub fn root_of_unity(conductor: u64, k: i64) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::InvalidParams("conductor must be positive".into()));
        }
        let mut c = vec![BigRational::zero(); conductor as usize];
        c[k.rem_euclid(conductor as i64) as usize] = BigRational::one();
        Ok(Self::reduce(conductor, c))
    }

    /// A primitive `p^k`-th root of unity inside `Q(ζ_M)`, if there is one.
    pub fn prime_power_root(conductor: u64, p: u64, k: u32) -> Option<Self> {
        let order = p.checked_pow(k)?;
        if conductor % order == 0 {
            Self::root_of_unity(conductor, (conductor / order) as i64).ok()
        } else if order == 2 {
            Some(Self::integer(-1))
        } else {
            None
        }
    }

    fn reduce(conductor: u64, mut c: Poly) -> Self {
        let phi = cyclotomic_polynomial(conductor);
        let deg = phi.len() - 1;
        for top in (deg..c.len()).rev() {
            if c[top].is_zero() {
                continue;
            }
            let lead = c[top].clone();
            for (j, &b) in phi.iter().enumerate() {
                if b != 0 {
                    c[top - deg + j] -= &lead * BigRational::from_integer(b.into());
                }
            }
        }
        c.truncate(deg);
        Self { conductor, coeffs: c }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Coefficients of `1, ζ, ..., ζ^{φ(M)-1}`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// The same value written over `Q(ζ_target)`; `target` must be a multiple.
    pub fn promote(&self, target: u64) -> Result<Self> {
        if target == 0 || target % self.conductor != 0 {
            return Err(Error::InvalidParams(format!("{} does not divide {target}", self.conductor)));
        }
        let step = (target / self.conductor) as usize;
        let mut c = vec![BigRational::zero(); target as usize];
        for (k, x) in self.coeffs.iter().enumerate() {
            c[(k * step) % target as usize] += x;
        }
        Ok(Self::reduce(target, c))
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = lcm(self.conductor, other.conductor);
        (self.promote(m).expect("divides lcm"), other.promote(m).expect("divides lcm"))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Self { conductor: a.conductor, coeffs }
    }

    pub fn neg(&self) -> Self {
        Self { conductor: self.conductor, coeffs: self.coeffs.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let m = a.conductor as usize;
        let mut c = vec![BigRational::zero(); m];
        for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                c[(i + j) % m] += x * y;
            }
        }
        Self::reduce(a.conductor, c)
    }

    /// Multiplicative inverse by the extended Euclidean algorithm in `Q[x]`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let phi: Poly =
            cyclotomic_polynomial(self.conductor).iter().map(|&b| BigRational::from_integer(b.into())).collect();
        let (g, s) = poly_ext_gcd(trim(self.coeffs.clone()), phi);
        debug_assert_eq!(g.len(), 1);
        let scale = g[0].recip();
        let c: Poly = s.into_iter().map(|x| x * &scale).collect();
        Self::from_coeffs(self.conductor, &c)
    }

    /// `x^e`, with negative exponents through [`CycloNumber::inv`].
    pub fn pow(&self, e: &BigInt) -> Result<Self> {
        let base = if e.is_negative() { self.inv()? } else { self.clone() };
        let mut e = e.abs();
        let mut acc = Self::one();
        let mut b = base;
        let two = BigInt::from(2);
        while !e.is_zero() {
            if e.is_odd() {
                acc = acc.mul(&b);
            }
            e /= &two;
            if !e.is_zero() {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    pub fn pow_i64(&self, e: i64) -> Result<Self> {
        self.pow(&BigInt::from(e))
    }

    /// Whether `x` is a root of unity of order exactly `k`.
    pub fn is_primitive_root(&self, k: u64) -> bool {
        if self.pow_i64(k as i64).map(|x| !x.is_one()).unwrap_or(true) {
            return false;
        }
        let mut f = k;
        let mut d = 2;
        let mut primes = Vec::new();
        while d * d <= f {
            if f % d == 0 {
                primes.push(d);
                while f % d == 0 {
                    f /= d;
                }
            }
            d += 1;
        }
        if f > 1 {
            primes.push(f);
        }
        primes.iter().all(|&q| !self.pow_i64((k / q) as i64).map(|x| x.is_one()).unwrap_or(true))
    }

    /// The automorphism `ζ ↦ ζ^e` of `Q(ζ_M)`.
    pub fn galois_act(&self, e: i64) -> Result<Self> {
        let m = self.conductor;
        if gcd(e.rem_euclid(m as i64) as u64, m) != 1 {
            return Err(Error::NotCoprime(e, m));
        }
        let e = e.rem_euclid(m as i64) as usize;
        let mut c = vec![BigRational::zero(); m as usize];
        for (k, x) in self.coeffs.iter().enumerate() {
            c[(k * e) % m as usize] += x;
        }
        Ok(Self::reduce(m, c))
    }

    /// Parses `c0 + c1*z + ...` with `z = ζ_M`.
    pub fn parse(conductor: u64, text: &str) -> Result<Self> {
        let mut acc = Self::from_coeffs(conductor, &[])?;
        for (c, e) in syntax::parse_terms(text, &["z", "ζ"])? {
            acc = acc.add(&Self::root_of_unity(conductor, e)?.mul(&Self::rational(c)));
        }
        acc.promote(conductor)
    }

    /// Coefficients as strings, for JSON.
    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| Value::String(c.to_string())).collect())
    }

    pub fn from_json(conductor: u64, v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("coefficient list expected".into()))?;
        let coeffs = arr.iter().map(json_rational).collect::<Result<Poly>>()?;
        Self::from_coeffs(conductor, &coeffs)
    }
}

fn json_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|x| BigRational::from_integer(x.into()))
            .ok_or_else(|| Error::Parse(format!("non-integer number {n}; use a string like \"1/2\""))),
        Value::String(s) => syntax::parse_rational(s),
        other => Err(Error::Parse(format!("bad coefficient {other}"))),
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNumber {}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(BigRational::zero());
    }
    p
}

fn poly_divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let b = trim(b.clone());
    let mut r = trim(a.clone());
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![BigRational::zero()], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lead = b[db].clone();
    for k in (0..q.len()).rev() {
        let c = &r[k + db] / &lead;
        for (j, y) in b.iter().enumerate() {
            r[k + j] -= &c * y;
        }
        q[k] = c;
    }
    (trim(q), trim(r))
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut c = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    trim(c)
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trim((0..n).map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).collect())
}

/// `(g, s)` with `g = s·a mod b`, `g = gcd(a, b)`.
fn poly_ext_gcd(a: Poly, b: Poly) -> (Poly, Poly) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (vec![BigRational::one()], vec![BigRational::zero()]);
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

/// `K = Q(ζ_M)` with `σ: ζ_M ↦ ζ_M^a` of order `p^n`; `F` is the fixed field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TowerSpec {
    p: u64,
    conductor: u64,
    sigma: u64,
    n: u32,
}

/// The tower file format `{"p": 3, "conductor": 27, "sigma": 4, "m": 2}`.
#[derive(Clone, Debug, Deserialize)]
pub struct TowerFile {
    pub p: u64,
    pub conductor: u64,
    pub sigma: i64,
    #[serde(default)]
    pub m: Option<u32>,
}

impl TowerSpec {
    pub fn new(p: u64, conductor: u64, sigma: i64) -> Result<Self> {
        if !crate::groupring::is_prime(p) {
            return Err(Error::InvalidParams(format!("{p} is not prime")));
        }
        if conductor < 2 {
            return Err(Error::InvalidParams("conductor must be at least 2".into()));
        }
        let a = sigma.rem_euclid(conductor as i64) as u64;
        if gcd(a, conductor) != 1 {
            return Err(Error::NotCoprime(sigma, conductor));
        }
        let mut order = 1u64;
        let mut x = a;
        while x != 1 % conductor {
            x = x * a % conductor;
            order += 1;
        }
        let mut n = 0;
        let mut rest = order;
        while rest % p == 0 {
            rest /= p;
            n += 1;
        }
        if rest != 1 || n == 0 {
            return Err(Error::InvalidParams(format!("order of {a} mod {conductor} is {order}, not a positive power of {p}")));
        }
        Ok(Self { p, conductor, sigma: a, n })
    }

    pub fn from_json(text: &str) -> Result<(Self, Option<u32>)> {
        let file: TowerFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok((Self::new(file.p, file.conductor, file.sigma)?, file.m))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The exponent `e` with `σ^k: ζ ↦ ζ^e`.
    pub fn sigma_power(&self, k: u64) -> i64 {
        pow_mod(self.sigma, k, self.conductor) as i64
    }

    fn in_field(&self, x: &CycloNumber) -> Result<CycloNumber> {
        x.promote(self.conductor)
    }

    /// Whether `x ∈ K_level`, i.e. `x` is fixed by `σ^{p^level}`.
    pub fn in_level(&self, x: &CycloNumber, level: u32) -> Result<bool> {
        let x = self.in_field(x)?;
        if level >= self.n {
            return Ok(true);
        }
        Ok(x.galois_act(self.sigma_power(self.p.pow(level)))? == x)
    }
}

/// `N_{K_from/K_to}(x)`: the product of the `σ^{k·p^to}`-conjugates of `x`.
pub fn norm(tower: &TowerSpec, x: &CycloNumber, from_level: u32, to_level: u32) -> Result<CycloNumber> {
    if to_level > from_level || from_level > tower.n {
        return Err(Error::IndexOrder(format!("need {to_level} <= {from_level} <= {}", tower.n)));
    }
    let x = tower.in_field(x)?;
    if !tower.in_level(&x, from_level)? {
        return Err(Error::NotInLevel(from_level));
    }
    let step = tower.p.pow(to_level);
    let count = tower.p.pow(from_level - to_level);
    let mut acc = CycloNumber::one();
    for k in 0..count {
        acc = acc.mul(&x.galois_act(tower.sigma_power(k * step))?);
    }
    tower.in_field(&acc)
}

/// Root-of-unity invariants of a tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TowerData {
    pub n: u32,
    pub omega: u32,
    pub nu: u32,
    pub cyclo_character: u64,
    pub is_cyclotomic: bool,
}

impl TowerData {
    pub fn constants(&self, p: u64) -> TowerConstants {
        TowerConstants { p, n: self.n, omega: ExtNat::Finite(self.omega), nu: ExtNat::Finite(self.nu) }
    }
}

/// Computes `ω`, `ν`, the cyclotomic character mod `p^ν` and whether
/// `K = F(ζ_{p^ν})`, by fixed-point tests on roots of unity.
pub fn tower_data(tower: &TowerSpec) -> Result<TowerData> {
    let p = tower.p;
    let m2 = lcm(2, tower.conductor);
    let mut nu = 0;
    while m2 % p.pow(nu + 1) == 0 {
        nu += 1;
    }
    let root = |k: u32| CycloNumber::prime_power_root(tower.conductor, p, k).expect("k <= nu");
    let fixed = |k: u32| -> Result<bool> {
        let z = root(k);
        Ok(z.galois_act(tower.sigma as i64)? == z)
    };
    let mut omega = 0;
    while omega < nu && fixed(omega + 1)? {
        omega += 1;
    }
    if omega == 0 {
        return Err(Error::InvalidParams("F does not contain a primitive p-th root of unity".into()));
    }
    let tc = TowerConstants::new(p, tower.n, ExtNat::Finite(omega), ExtNat::Finite(nu))?;
    debug_assert!(!tc.is_excluded());
    let z = root(nu);
    let image = z.galois_act(tower.sigma as i64)?;
    let modulus = p.pow(nu);
    let mut character = None;
    for d in 0..modulus {
        if gcd(d, p) == 1 && z.pow_i64(d as i64)? == image {
            character = Some(d);
            break;
        }
    }
    let cyclo_character = character.expect("σ permutes p^ν-th roots of unity");
    let moved = z.galois_act(tower.sigma_power(p.pow(tower.n - 1)))? != z;
    Ok(TowerData { n: tower.n, omega, nu, cyclo_character, is_cyclotomic: moved })
}

/// `(α, δ_0, ..., δ_m)` together with level tags: `δ_i ∈ K_{levels[i]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTuple {
    pub alpha: CycloNumber,
    pub deltas: Vec<CycloNumber>,
    pub levels: Vec<NormEntry>,
}

impl WitnessTuple {
    /// `{"conductor": M, "alpha": [...], "deltas": [[...], ...], "levels": ["-inf", 2]}`.
    pub fn to_json(&self, conductor: u64) -> Value {
        let level = |e: &NormEntry| match e {
            NormEntry::NegInf => json!("-inf"),
            NormEntry::Finite(v) => json!(v),
        };
        json!({
            "conductor": conductor,
            "alpha": self.alpha.promote(conductor).map(|x| x.to_json()).unwrap_or(Value::Null),
            "deltas": self.deltas.iter().map(|d| d.promote(conductor).map(|x| x.to_json()).unwrap_or(Value::Null)).collect::<Vec<_>>(),
            "levels": self.levels.iter().map(level).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let conductor =
            v.get("conductor").and_then(Value::as_u64).ok_or_else(|| Error::Parse("missing conductor".into()))?;
        let alpha = CycloNumber::from_json(conductor, v.get("alpha").unwrap_or(&Value::Null))?;
        let deltas = v
            .get("deltas")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing deltas".into()))?
            .iter()
            .map(|d| CycloNumber::from_json(conductor, d))
            .collect::<Result<Vec<_>>>()?;
        let levels = v
            .get("levels")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing levels".into()))?
            .iter()
            .map(|l| match l {
                Value::String(s) => s.parse(),
                Value::Number(n) => n
                    .as_u64()
                    .map(|x| NormEntry::Finite(x as u32))
                    .ok_or_else(|| Error::Parse(format!("bad level {n}"))),
                other => Err(Error::Parse(format!("bad level {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if levels.len() != deltas.len() {
            return Err(Error::LengthMismatch(levels.len(), deltas.len()));
        }
        Ok(Self { alpha, deltas, levels })
    }
}

/// Checks both defining equations of a norm pair exactly:
/// `σ(α) = α^d·δ_0·δ_1^p⋯δ_m^{p^m}` and
/// `N_{K/F}(α)^{(d-1)/p}·N_{K_{n-1}/F}(δ_0)·∏_{i≥1} N_{K/F}(δ_i)^{p^{i-1}}`
/// is a primitive `p`-th root of unity.
pub fn verify_norm_pair(tower: &TowerSpec, w: &WitnessTuple, pair: &NormPair) -> Result<bool> {
    let p = tower.p;
    let n = tower.n;
    pair.check_twist(p)?;
    let m = pair.m();
    if w.deltas.len() != m + 1 || w.levels.len() != m + 1 {
        return Err(Error::LengthMismatch(w.deltas.len(), m + 1));
    }
    pair.a.check_range(n)?;
    for (i, (delta, &level)) in w.deltas.iter().zip(&w.levels).enumerate() {
        let expected = if i < m { pair.a.get(i) } else { NormEntry::Finite(n) };
        if level != expected {
            return Err(Error::LevelMismatch(format!("delta_{i} tagged {level}, pair needs {expected}")));
        }
        let ok = match level {
            NormEntry::NegInf => delta.is_one(),
            NormEntry::Finite(l) => tower.in_level(delta, l)?,
        };
        if !ok {
            return Err(Error::LevelMismatch(format!("delta_{i} does not lie in K_{level}")));
        }
    }
    let alpha = tower.in_field(&w.alpha)?;
    if alpha.is_zero() || w.deltas.iter().any(CycloNumber::is_zero) {
        return Ok(false);
    }

    let mut rhs = alpha.pow_i64(pair.d)?;
    for (i, delta) in w.deltas.iter().enumerate() {
        rhs = rhs.mul(&delta.pow(&BigInt::from(p).pow(i as u32))?);
    }
    if alpha.galois_act(tower.sigma as i64)? != rhs {
        return Ok(false);
    }

    let e = (pair.d - 1) / p as i64;
    let mut xi = norm(tower, &alpha, n, 0)?.pow_i64(e)?;
    xi = xi.mul(&norm(tower, &w.deltas[0], n - 1, 0)?);
    for (i, delta) in w.deltas.iter().enumerate().skip(1) {
        xi = xi.mul(&norm(tower, delta, n, 0)?.pow(&BigInt::from(p).pow(i as u32 - 1))?);
    }
    Ok(xi.is_primitive_root(p))
}

fn require_cyclotomic(tower: &TowerSpec) -> Result<TowerData> {
    let data = tower_data(tower)?;
    if !data.is_cyclotomic {
        return Err(Error::NotCyclotomic);
    }
    Ok(data)
}

/// `α = ζ_{p^ν}`, all `δ_i = 1`, representing `((-∞, ..., -∞), d)` with `d`
/// the cyclotomic character.
pub fn cyclopair_witness(tower: &TowerSpec, m: usize) -> Result<(WitnessTuple, NormPair)> {
    if m == 0 {
        return Err(Error::InvalidParams("length must be positive".into()));
    }
    let data = require_cyclotomic(tower)?;
    let alpha = CycloNumber::prime_power_root(tower.conductor, tower.p, data.nu).expect("nu from conductor");
    let mut levels = vec![NormEntry::NegInf; m];
    levels.push(NormEntry::Finite(tower.n));
    let w = WitnessTuple { alpha, deltas: vec![CycloNumber::one(); m + 1], levels };
    Ok((w, NormPair::new(NormVector::neg_inf(m), data.cyclo_character as i64)))
}

/// Truncates a representative of a length-`len` pair to length `k >= 1`,
/// folding `δ_k, ..., δ_len` into `δ'_k = ∏ δ_i^{p^{i-k}}`.
fn truncate(tower: &TowerSpec, w: &WitnessTuple, pair: &NormPair, k: usize) -> Result<(WitnessTuple, NormPair)> {
    let mut folded = CycloNumber::one();
    for (i, delta) in w.deltas.iter().enumerate().skip(k) {
        folded = folded.mul(&delta.pow(&BigInt::from(tower.p).pow((i - k) as u32))?);
    }
    let mut deltas = w.deltas[..k].to_vec();
    deltas.push(folded);
    let mut levels = w.levels[..k].to_vec();
    levels.push(NormEntry::Finite(tower.n));
    let a = NormVector::new(pair.a.entries()[..k].to_vec())?;
    Ok((WitnessTuple { alpha: w.alpha.clone(), deltas, levels }, NormPair::new(a, pair.d)))
}

/// From a representative of `(a, d)` of length at least `s - 1`, builds one
/// of `((a_0, ..., a_{s-2}, n), d + p^{s-1}x)` by setting
/// `δ̌_{s-1} = δ_{s-1}·α^{-x}` and `δ̌_s = 1`. Requires `2 <= s <= len + 1`.
pub fn shift_representative(
    tower: &TowerSpec,
    w: &WitnessTuple,
    pair: &NormPair,
    s: usize,
    x: i64,
) -> Result<(WitnessTuple, NormPair)> {
    if s < 2 || s > pair.m() + 1 {
        return Err(Error::IndexRange(format!("shift index {s} outside 2..={}", pair.m() + 1)));
    }
    if !verify_norm_pair(tower, w, pair)? {
        return Err(Error::NotARepresentative);
    }
    let (mut cut, cut_pair) = truncate(tower, w, pair, s - 1)?;
    let alpha = tower.in_field(&w.alpha)?;
    cut.deltas[s - 1] = cut.deltas[s - 1].mul(&alpha.pow_i64(-x)?);
    cut.deltas.push(CycloNumber::one());
    cut.levels.push(NormEntry::Finite(tower.n));
    let mut a = cut_pair.a.entries().to_vec();
    a.push(NormEntry::Finite(tower.n));
    let step = (tower.p as i64).checked_pow(s as u32 - 1).ok_or(Error::InvalidParams("shift too large".into()))?;
    let shifted = NormPair::new(NormVector::new(a)?, pair.d + step * x);
    if !verify_norm_pair(tower, &cut, &shifted)? {
        return Err(Error::NotARepresentative);
    }
    Ok((cut, shifted))
}

/// `ξ_{p^{i+1}} = N_{K/K_level}(gamma)` with `K_level = F(ξ_{p^{i+1}})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormCertificate {
    pub i: u32,
    pub level: u32,
    pub gamma: CycloNumber,
    pub image: CycloNumber,
}

/// Checks that `N_{K/K_level}(gamma)` is a primitive `p^{i+1}`-th root of unity.
pub fn verify_norm_certificate(tower: &TowerSpec, cert: &NormCertificate) -> Result<bool> {
    let image = norm(tower, &cert.gamma, tower.n, cert.level)?;
    Ok(image == cert.image && image.is_primitive_root(tower.p.pow(cert.i + 1)))
}

/// The `b`-vector of a cyclotomic tower: every `b_i` with `i <= min(ν, m)` is
/// `-∞`, each certified by a root of unity whose norm is `ξ_{p^{i+1}}`.
pub fn b_vector_cyclotomic(tower: &TowerSpec, m: usize) -> Result<(BVector, Vec<NormCertificate>)> {
    let data = require_cyclotomic(tower)?;
    let upto = (data.nu as usize).min(m);
    let mut certs = Vec::new();
    for i in 0..upto as u32 {
        let level = (i + 1).saturating_sub(data.omega);
        let order = i + 1 + tower.n - level;
        let gamma = CycloNumber::prime_power_root(tower.conductor, tower.p, order).expect("order <= nu");
        let image = norm(tower, &gamma, tower.n, level)?;
        let cert = NormCertificate { i, level, gamma, image };
        if !verify_norm_certificate(tower, &cert)? {
            return Err(Error::NotARepresentative);
        }
        certs.push(cert);
    }
    let b = BVector { entries: vec![NormEntry::NegInf; upto], nu: ExtNat::Finite(data.nu), b_nu: NormEntry::NegInf };
    Ok((b, certs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normpair::a_from_b;
    use proptest::prelude::*;

    fn z(m: u64, k: i64) -> CycloNumber {
        CycloNumber::root_of_unity(m, k).unwrap()
    }

    fn tower(p: u64, m: u64, a: i64) -> TowerSpec {
        TowerSpec::new(p, m, a).unwrap()
    }

    fn pair(s: &str) -> NormPair {
        s.parse().unwrap()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        let phi105 = cyclotomic_polynomial(105);
        assert_eq!(phi105.len() - 1, 48);
        assert_eq!(phi105[7], -2);
    }

    #[test]
    fn arithmetic_examples() {
        let w = z(3, 1);
        assert!(w.mul(&w).mul(&w).is_one());
        assert!(CycloNumber::one().add(&w).add(&w.mul(&w)).is_zero());
        assert_eq!(z(9, 1).inv().unwrap(), z(9, 8));
        assert_eq!(z(3, 1), z(9, 3));
        assert_eq!(z(4, 1).mul(&z(4, 1)), CycloNumber::integer(-1));
        assert_eq!(CycloNumber::from_coeffs(5, &[]).unwrap().inv(), Err(Error::DivisionByZero));
        let half = CycloNumber::parse(8, "1/2 + z^3").unwrap();
        assert!(half.mul(&half.inv().unwrap()).is_one());
        assert_eq!(half.to_string(), "1/2 + z^3");
    }

    #[test]
    fn galois_examples() {
        assert_eq!(z(27, 1).galois_act(4).unwrap(), z(27, 4));
        let mut x = CycloNumber::parse(27, "2 + z - 3*z^5").unwrap();
        let start = x.clone();
        for _ in 0..9 {
            x = x.galois_act(4).unwrap();
        }
        assert_eq!(x, start);
        let r = CycloNumber::rational(BigRational::new(3.into(), 7.into())).promote(27).unwrap();
        assert_eq!(r.galois_act(4).unwrap(), r);
        assert_eq!(z(27, 1).galois_act(3), Err(Error::NotCoprime(3, 27)));
    }

    #[test]
    fn norm_examples() {
        let t = tower(3, 27, 4);
        let n = norm(&t, &z(27, 1), 2, 1).unwrap();
        assert_eq!(n, z(27, 30));
        assert!(n.is_primitive_root(9));
        assert_eq!(norm(&t, &z(27, 1), 2, 0).unwrap(), z(3, 1));
        let x = CycloNumber::parse(27, "1 + z^2").unwrap();
        assert_eq!(norm(&t, &x, 2, 2).unwrap(), x);
        assert_eq!(norm(&t, &z(27, 1), 1, 0), Err(Error::NotInLevel(1)));
        assert!(matches!(norm(&t, &x, 1, 2), Err(Error::IndexOrder(_))));
    }

    /// The exponent sum `Σ_{k<9} 4^k` reduced mod 27.
    #[test]
    fn full_norm_exponent() {
        let e: u64 = (0..9).map(|k| 4u64.pow(k)).sum();
        assert_eq!(e, 87381);
        assert_eq!(e % 27, 9);
    }

    #[test]
    fn tower_data_examples() {
        let d = tower_data(&tower(3, 27, 4)).unwrap();
        assert_eq!((d.n, d.omega, d.nu, d.cyclo_character, d.is_cyclotomic), (2, 1, 3, 4, true));
        let d = tower_data(&tower(2, 16, 9)).unwrap();
        assert!(d.omega >= 2);
        assert_eq!(tower_data(&tower(2, 8, 3)), Err(Error::ExcludedCase));
        let d = tower_data(&tower(3, 21, 16)).unwrap();
        assert_eq!((d.omega, d.nu, d.is_cyclotomic), (1, 1, false));
        assert!(TowerSpec::new(3, 27, 2).is_err());
        assert!(TowerSpec::new(3, 27, 3).is_err());
    }

    #[test]
    fn verify_examples() {
        let t = tower(3, 27, 4);
        let w = WitnessTuple {
            alpha: z(27, 1),
            deltas: vec![CycloNumber::one(), CycloNumber::one()],
            levels: vec![NormEntry::NegInf, NormEntry::Finite(2)],
        };
        assert!(verify_norm_pair(&t, &w, &pair("((-inf),4)")).unwrap());
        assert!(!verify_norm_pair(&t, &w, &pair("((-inf),7)")).unwrap());
        assert!(matches!(verify_norm_pair(&t, &w, &pair("((-inf),5)")), Err(Error::BadTwist(_))));
        let mut bad = w.clone();
        bad.levels[0] = NormEntry::Finite(0);
        bad.deltas[0] = z(27, 1);
        assert!(matches!(verify_norm_pair(&t, &bad, &pair("((0),4)")), Err(Error::LevelMismatch(_))));
        assert!(matches!(verify_norm_pair(&t, &w, &pair("((0),4)")), Err(Error::LevelMismatch(_))));
    }

    #[test]
    fn witness_json_roundtrip() {
        let t = tower(3, 27, 4);
        let (w, _) = cyclopair_witness(&t, 2).unwrap();
        let text = w.to_json(27).to_string();
        assert_eq!(WitnessTuple::from_json(&text).unwrap(), w);
        let (spec, m) = TowerSpec::from_json(r#"{"p":3,"conductor":27,"sigma":4,"m":2}"#).unwrap();
        assert_eq!((spec, m), (t, Some(2)));
    }

    #[test]
    fn cyclopair_examples() {
        let t = tower(3, 27, 4);
        for m in 1..=3 {
            let (w, p) = cyclopair_witness(&t, m).unwrap();
            assert_eq!(p.d, 4);
            assert!(p.a.entries().iter().all(|e| e.is_neg_inf()));
            assert_eq!(w.alpha, z(27, 1));
            assert!(verify_norm_pair(&t, &w, &p).unwrap());
        }
        assert_eq!(cyclopair_witness(&tower(3, 21, 16), 1).unwrap_err(), Error::NotCyclotomic);
    }

    #[test]
    fn cyclopair_twist_is_sharp() {
        // The witness verifies for (−∞, d') exactly when d' ≡ d mod p^ν.
        for (p, m, a) in [(3, 27, 4), (5, 25, 6), (2, 16, 5)] {
            let t = tower(p, m, a);
            let data = tower_data(&t).unwrap();
            let (w, base) = cyclopair_witness(&t, 1).unwrap();
            let modulus = p.pow(data.nu) as i64;
            for d in (0..modulus * p as i64).filter(|d| d.rem_euclid(p as i64) == 1) {
                let probe = NormPair::new(base.a.clone(), d);
                let expected = (d - base.d).rem_euclid(modulus) == 0;
                assert_eq!(verify_norm_pair(&t, &w, &probe).unwrap(), expected, "p={p} d={d}");
            }
        }
    }

    #[test]
    fn shift_examples() {
        let t = tower(3, 27, 4);
        let (w, p) = cyclopair_witness(&t, 2).unwrap();
        let (w2, p2) = shift_representative(&t, &w, &p, 2, 1).unwrap();
        assert_eq!(p2, pair("((-inf,2),7)"));
        assert!(verify_norm_pair(&t, &w2, &p2).unwrap());
        let (w0, p0) = shift_representative(&t, &w, &p, 3, 0).unwrap();
        assert_eq!(p0.d, p.d);
        assert_eq!(&w0.deltas[..3], &w.deltas[..]);
        assert!(matches!(shift_representative(&t, &w, &p, 1, 1), Err(Error::IndexRange(_))));
        assert!(matches!(shift_representative(&t, &w, &p, 4, 1), Err(Error::IndexRange(_))));
        let wrong = NormPair::new(p.a.clone(), 7);
        assert_eq!(shift_representative(&t, &w, &wrong, 2, 1).unwrap_err(), Error::NotARepresentative);
    }

    #[test]
    fn b_vector_examples() {
        let t = tower(3, 27, 4);
        let (b, certs) = b_vector_cyclotomic(&t, 3).unwrap();
        assert_eq!(b.entries, vec![NormEntry::NegInf; 3]);
        assert_eq!(certs.len(), 3);
        assert_eq!(a_from_b(&b, 3).unwrap(), NormVector::neg_inf(3));
        let (b1, _) = b_vector_cyclotomic(&t, 1).unwrap();
        assert_eq!(b1.entries, vec![NormEntry::NegInf]);
        assert_eq!(b_vector_cyclotomic(&tower(3, 21, 16), 1).unwrap_err(), Error::NotCyclotomic);
    }

    /// Degree-`p` steps `Q(ζ_M)/Q(ζ_M)^⟨τ⟩` with `τ` of order `p`: the norm of a
    /// primitive `p^s`-th root is a primitive `p^{s-1}`-th root.
    #[test]
    fn norm_of_root_of_unity_at_scale() {
        for p in [2u64, 3, 5] {
            for conductor in (2..=200u64).filter(|c| c % p == 0 || p == 2) {
                let Ok(order_p) = (1..conductor).filter(|&e| gcd(e, conductor) == 1).try_fold(Vec::new(), |mut acc, e| {
                    if e != 1 && pow_mod(e, p, conductor) == 1 {
                        acc.push(e);
                    }
                    Ok::<_, ()>(acc)
                }) else {
                    continue;
                };
                for tau in order_p.into_iter().take(3) {
                    for s in 1..=4u32 {
                        let Some(xi) = CycloNumber::prime_power_root(conductor, p, s) else { continue };
                        if p == 2 && s > 1 && !(conductor % 4 == 0 && tau % 4 == 1) {
                            continue;
                        }
                        let mut acc = CycloNumber::one();
                        let mut e = 1u64;
                        for _ in 0..p {
                            acc = acc.mul(&xi.promote(conductor).unwrap().galois_act(e as i64).unwrap());
                            e = e * tau % conductor;
                        }
                        assert!(acc.is_primitive_root(p.pow(s - 1)), "p={p} M={conductor} tau={tau} s={s}");
                    }
                }
            }
        }
    }

    fn arb_number(conductor: u64) -> impl Strategy<Value = CycloNumber> {
        proptest::collection::vec(-3i64..=3, conductor as usize)
            .prop_map(move |c| CycloNumber::from_integers(conductor, &c).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn field_axioms(x in arb_number(9), y in arb_number(9), w in arb_number(12)) {
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            prop_assert_eq!(x.mul(&y.add(&w)), x.mul(&y).add(&x.mul(&w)));
            if !x.is_zero() {
                prop_assert!(x.mul(&x.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn norm_is_transitive(x in arb_number(27)) {
            let t = tower(3, 27, 4);
            let direct = norm(&t, &x, 2, 0).unwrap();
            let staged = norm(&t, &norm(&t, &x, 2, 1).unwrap(), 1, 0).unwrap();
            prop_assert_eq!(&direct, &staged);
            for k in 0..=2u32 {
                let y = norm(&t, &x, 2, k).unwrap();
                prop_assert!(t.in_level(&y, k).unwrap());
            }
        }

        #[test]
        fn galois_is_a_ring_map(x in arb_number(16), y in arb_number(16), e in prop::sample::select(vec![3i64, 5, 7, 9, 11, 13, 15])) {
            prop_assert_eq!(x.mul(&y).galois_act(e).unwrap(), x.galois_act(e).unwrap().mul(&y.galois_act(e).unwrap()));
            prop_assert_eq!(x.add(&y).galois_act(e).unwrap(), x.galois_act(e).unwrap().add(&y.galois_act(e).unwrap()));
        }
    }
}
