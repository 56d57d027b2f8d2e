//! Finitely presented `R_m G`-modules, the exceptional module `X(a, d)`, and
//! the eigenmodule, property `P(H)`, triviality and freeness tests.
//!
//! Every decision procedure unfolds a module on `r` generators into the
//! `Z/p^m`-module `(Z/p^m)^{r·p^n}` modulo the span of all `σ^t·relation`
//! rows, and answers by chain-ring linear algebra.

use crate::error::{Error, Result};
use crate::groupring::{GroupRingElement, GroupRingParams, Residue};
use crate::ideals::{ring_of, IdealPresentation};
use crate::linalg::{left_kernel, ChainRing, Echelon};
use crate::normpair::NormVector;
use std::fmt;
use std::sync::OnceLock;

/// The subgroup `H_t = ⟨σ^{p^t}⟩` of `G`, of order `p^{n-t}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupSpec {
    exponent: u32,
}

impl SubgroupSpec {
    pub fn new(params: GroupRingParams, exponent: u32) -> Result<Self> {
        if exponent > params.n() {
            return Err(Error::InvalidParams(format!("subgroup exponent {exponent} exceeds n = {}", params.n())));
        }
        Ok(Self { exponent })
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `log_p |H|`.
    pub fn log_order(&self, params: GroupRingParams) -> u32 {
        params.n() - self.exponent
    }
}

/// Generators and relation rows; each row lists one ring element per generator.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    params: GroupRingParams,
    gens: Vec<String>,
    relations: Vec<Vec<GroupRingElement>>,
    span: OnceLock<Echelon>,
}

impl PartialEq for ModulePresentation {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.gens == other.gens && self.relations == other.relations
    }
}

impl Eq for ModulePresentation {}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

impl ModulePresentation {
    /// Builds a presentation; relation rows are sparse `(generator, element)` lists.
    pub fn new(
        params: GroupRingParams,
        gens: Vec<String>,
        relations: Vec<Vec<(String, GroupRingElement)>>,
    ) -> Result<Self> {
        for (k, g) in gens.iter().enumerate() {
            if !valid_name(g) {
                return Err(Error::Parse(format!("bad generator name `{g}`")));
            }
            if gens[..k].contains(g) {
                return Err(Error::Parse(format!("duplicate generator `{g}`")));
            }
        }
        let zero = GroupRingElement::zero(params, params.n())?;
        let mut dense = Vec::with_capacity(relations.len());
        for row in relations {
            let mut r = vec![zero.clone(); gens.len()];
            for (name, x) in row {
                if x.params() != params {
                    return Err(Error::ParamsMismatch);
                }
                if x.level() != params.n() {
                    return Err(Error::LevelMismatch(format!("relation entry at level {}, need {}", x.level(), params.n())));
                }
                let k = gens.iter().position(|g| *g == name).ok_or(Error::UnknownGenerator(name))?;
                r[k] = r[k].add(&x)?;
            }
            dense.push(r);
        }
        Ok(Self { params, gens, relations: dense, span: OnceLock::new() })
    }

    /// `⊕_k R_m G/(σ^{p^{k}} - 1)` on generators `w0, w1, ...`.
    pub fn free_quotient_sum(params: GroupRingParams, exponents: &[u32]) -> Result<Self> {
        let n = params.n();
        let gens: Vec<String> = (0..exponents.len()).map(|k| format!("w{k}")).collect();
        let mut rels = Vec::new();
        for (g, &k) in gens.iter().zip(exponents) {
            if k > n {
                return Err(Error::InvalidParams(format!("exponent {k} exceeds n = {n}")));
            }
            let rel = GroupRingElement::sigma_power_minus(params, n, params.p().pow(k), 1)?;
            rels.push(vec![(g.clone(), rel)]);
        }
        Self::new(params, gens, rels)
    }

    pub fn params(&self) -> GroupRingParams {
        self.params
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn relations(&self) -> &[Vec<GroupRingElement>] {
        &self.relations
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.gens.iter().position(|g| g == name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    fn block(&self) -> usize {
        self.params.order(self.params.n())
    }

    fn cols(&self) -> usize {
        self.gens.len() * self.block()
    }

    fn ring(&self) -> ChainRing {
        ring_of(self.params)
    }

    fn flatten(&self, coords: &[GroupRingElement]) -> Vec<u64> {
        coords.iter().flat_map(|x| x.coeffs().iter().copied()).collect()
    }

    /// All rows `σ^t·r` for relation rows `r`.
    fn relation_rows(&self) -> Vec<Vec<u64>> {
        let mut rows = Vec::new();
        for r in &self.relations {
            let flat = self.flatten(r);
            for t in 0..self.block() {
                rows.push(self.rotate(&flat, t));
            }
        }
        rows
    }

    fn relation_span(&self) -> &Echelon {
        self.span.get_or_init(|| Echelon::new(self.ring(), self.cols(), &self.relation_rows()))
    }

    /// `σ^shift·v` on the unfolded coordinates.
    fn rotate(&self, v: &[u64], shift: usize) -> Vec<u64> {
        let len = self.block();
        let mut out = vec![0; v.len()];
        for (b, chunk) in v.chunks(len).enumerate() {
            for (j, &c) in chunk.iter().enumerate() {
                out[b * len + (j + shift) % len] = c;
            }
        }
        out
    }

    /// `(σ^shift - c)·v`.
    fn sigma_minus(&self, v: &[u64], shift: usize, c: u64) -> Vec<u64> {
        let q = self.params.modulus();
        self.rotate(v, shift).iter().zip(v).map(|(&a, &b)| (a + q - c * b % q) % q).collect()
    }

    fn unit_vector(&self, idx: usize) -> Vec<u64> {
        let mut v = vec![0; self.cols()];
        v[idx] = 1;
        v
    }

    fn scaled_unit(&self, idx: usize, c: u64) -> Vec<u64> {
        let mut v = vec![0; self.cols()];
        v[idx] = c % self.params.modulus();
        v
    }

    /// Shift realizing `τ^{p^s}` for `τ` generating `H`.
    fn tau_shift(&self, h: SubgroupSpec, s: u32) -> usize {
        let e = h.exponent + s;
        if e >= self.params.n() {
            0
        } else {
            self.params.p().pow(e) as usize
        }
    }

    fn in_relations(&self, v: &[u64]) -> bool {
        self.relation_span().contains(v)
    }

    /// `log_p |M|`.
    pub fn log_size(&self) -> u32 {
        self.params.m() * self.cols() as u32 - self.relation_span().log_size()
    }

    /// Parses the text format: a `gens:` line followed by one relation per line.
    pub fn parse(params: GroupRingParams, text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("missing `gens:` line".into()))?;
        let list = header.strip_prefix("gens:").ok_or_else(|| Error::Parse("first line must start with `gens:`".into()))?;
        let gens: Vec<String> =
            list.split(',').map(|g| g.trim().to_string()).filter(|g| !g.is_empty()).collect();
        let mut relations = Vec::new();
        for line in lines {
            relations.push(parse_row(params, line)?);
        }
        Self::new(params, gens, relations)
    }
}

fn parse_row(params: GroupRingParams, line: &str) -> Result<Vec<(String, GroupRingElement)>> {
    let mut row = Vec::new();
    for part in line.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, expr) = part.split_once(':').ok_or_else(|| Error::Parse(format!("expected `gen: element` in `{part}`")))?;
        row.push((name.trim().to_string(), GroupRingElement::parse(params, params.n(), expr)?));
    }
    Ok(row)
}

fn write_row(f: &mut fmt::Formatter<'_>, gens: &[String], row: &[GroupRingElement]) -> fmt::Result {
    let parts: Vec<String> =
        gens.iter().zip(row).filter(|(_, x)| !x.is_zero()).map(|(g, x)| format!("{g}: {x}")).collect();
    if parts.is_empty() {
        write!(f, "0")
    } else {
        write!(f, "{}", parts.join("; "))
    }
}

impl fmt::Display for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gens: {}", self.gens.join(", "))?;
        for r in &self.relations {
            if r.iter().all(GroupRingElement::is_zero) {
                continue;
            }
            write_row(f, &self.gens, r)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

/// An element `Σ x_g·g` of a presented module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleElement {
    params: GroupRingParams,
    gens: Vec<String>,
    coords: Vec<GroupRingElement>,
}

impl ModuleElement {
    pub fn zero(module: &ModulePresentation) -> Self {
        let z = GroupRingElement::zero(module.params, module.params.n()).expect("level n");
        Self { params: module.params, gens: module.gens.clone(), coords: vec![z; module.gens.len()] }
    }

    pub fn generator(module: &ModulePresentation, name: &str) -> Result<Self> {
        let k = module.generator_index(name)?;
        let mut x = Self::zero(module);
        x.coords[k] = GroupRingElement::one(module.params, module.params.n())?;
        Ok(x)
    }

    pub fn from_coords(module: &ModulePresentation, coords: Vec<(String, GroupRingElement)>) -> Result<Self> {
        let mut x = Self::zero(module);
        for (name, c) in coords {
            let k = module.generator_index(&name)?;
            if c.params() != module.params || c.level() != module.params.n() {
                return Err(Error::ParamsMismatch);
            }
            x.coords[k] = x.coords[k].add(&c)?;
        }
        Ok(x)
    }

    /// Parses `gen: element; gen: element`.
    pub fn parse(module: &ModulePresentation, text: &str) -> Result<Self> {
        if text.trim() == "0" {
            return Ok(Self::zero(module));
        }
        Self::from_coords(module, parse_row(module.params, text)?)
    }

    fn from_vector(module: &ModulePresentation, v: &[u64]) -> Self {
        let coords = v
            .chunks(module.block())
            .map(|c| {
                let c: Vec<i128> = c.iter().map(|&a| a as i128).collect();
                GroupRingElement::from_coeffs(module.params, module.params.n(), &c).expect("level n")
            })
            .collect();
        Self { params: module.params, gens: module.gens.clone(), coords }
    }

    fn to_vector(&self) -> Vec<u64> {
        self.coords.iter().flat_map(|x| x.coeffs().iter().copied()).collect()
    }

    pub fn coords(&self) -> &[GroupRingElement] {
        &self.coords
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(Self { coords, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { coords: self.coords.iter().map(GroupRingElement::neg).collect(), ..self.clone() }
    }

    /// `r·x` for a ring element `r ∈ R_m G`.
    pub fn act(&self, r: &GroupRingElement) -> Result<Self> {
        let coords = self.coords.iter().map(|c| r.mul(c)).collect::<Result<_>>()?;
        Ok(Self { coords, ..self.clone() })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.params != other.params || self.gens != other.gens {
            return Err(Error::PresentationMismatch);
        }
        Ok(())
    }

    fn check(&self, module: &ModulePresentation) -> Result<()> {
        if self.params != module.params || self.gens != module.gens {
            return Err(Error::PresentationMismatch);
        }
        Ok(())
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_row(f, &self.gens, &self.coords)
    }
}

/// Whether `x - y` lies in the relation span.
pub fn element_equal(module: &ModulePresentation, x: &ModuleElement, y: &ModuleElement) -> Result<bool> {
    x.check(module)?;
    y.check(module)?;
    Ok(module.in_relations(&x.sub(y)?.to_vector()))
}

/// `X(a, d)`: generators `alpha, delta0, ...` with `(σ - d)α = Σ p^i δ_i` and
/// `(σ^{p^{a_i}} - 1)δ_i = 0`; `δ_i` is omitted when `a_i = -∞`.
pub fn exceptional_module(params: GroupRingParams, a: &NormVector, d: i128) -> Result<ModulePresentation> {
    if a.len() != params.m() as usize {
        return Err(Error::BadVector(format!("length {} but m = {}", a.len(), params.m())));
    }
    a.check_range(params.n())?;
    let n = params.n();
    let p = params.p();
    let mut gens = vec!["alpha".to_string()];
    let mut first = vec![("alpha".to_string(), GroupRingElement::sigma_power_minus(params, n, 1, d)?)];
    let mut rels = Vec::new();
    for (i, e) in a.entries().iter().enumerate() {
        let Some(ai) = e.finite() else { continue };
        let name = format!("delta{i}");
        gens.push(name.clone());
        first.push((name.clone(), GroupRingElement::constant(params, n, -(p.pow(i as u32) as i128))?));
        rels.push(vec![(name, GroupRingElement::sigma_power_minus(params, n, p.pow(ai), 1)?)]);
    }
    rels.insert(0, first);
    ModulePresentation::new(params, gens, rels)
}

/// `dim_{F_p} M/pM`.
pub fn fp_dimension(module: &ModulePresentation) -> usize {
    let ring = ChainRing::new(module.params.p(), 1);
    let p = module.params.p();
    let rows: Vec<Vec<u64>> =
        module.relation_rows().into_iter().map(|r| r.into_iter().map(|c| c % p).collect()).collect();
    module.cols() - Echelon::new(ring, module.cols(), &rows).log_size() as usize
}

/// The smallest `c ∈ [0, p^m)` with `(τ - c)M = 0`, if any.
pub fn is_eigenmodule(module: &ModulePresentation, h: SubgroupSpec) -> Option<Residue> {
    let shift = module.tau_shift(h, 0);
    (0..module.params.modulus()).find(|&c| {
        (0..module.gens.len()).all(|g| {
            let e = module.unit_vector(g * module.block());
            module.in_relations(&module.sigma_minus(&e, shift, c))
        })
    })
}

/// Whether `(τ - 1)M = 0`.
pub fn is_trivial_under(module: &ModulePresentation, h: SubgroupSpec) -> bool {
    trivial_shift(module, module.tau_shift(h, 0))
}

fn trivial_shift(module: &ModulePresentation, shift: usize) -> bool {
    (0..module.gens.len()).all(|g| {
        let e = module.unit_vector(g * module.block());
        module.in_relations(&module.sigma_minus(&e, shift, 1))
    })
}

/// A solution of `(τ^{p^s} - 1)y = p^{m-1}z` with `y, z ∉ (τ^{p^s} - 1, p)M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyPCertificate {
    pub s: u32,
    pub y: ModuleElement,
    pub z: ModuleElement,
}

/// Linear data attached to one value of `s`.
struct PSlice<'a> {
    module: &'a ModulePresentation,
    shift: usize,
    excluded: Echelon,
}

impl<'a> PSlice<'a> {
    fn new(module: &'a ModulePresentation, h: SubgroupSpec, s: u32) -> Self {
        let shift = module.tau_shift(h, s);
        let p = module.params.p();
        let mut rows = module.relation_span().rows().to_vec();
        for idx in 0..module.cols() {
            let e = module.unit_vector(idx);
            rows.push(module.sigma_minus(&e, shift, 1));
            rows.push(module.scaled_unit(idx, p));
        }
        let excluded = Echelon::new(module.ring(), module.cols(), &rows);
        Self { module, shift, excluded }
    }

    fn excluded(&self, v: &[u64]) -> bool {
        self.excluded.contains(v)
    }

    /// Rows `p^{m-1}e_i` followed by the relation span.
    fn top_rows(&self) -> Vec<Vec<u64>> {
        let module = self.module;
        let top = module.params.p().pow(module.params.m() - 1);
        let mut rows: Vec<Vec<u64>> = (0..module.cols()).map(|i| module.scaled_unit(i, top)).collect();
        rows.extend(module.relation_span().rows().iter().cloned());
        rows
    }
}

fn check_m(module: &ModulePresentation) -> Result<()> {
    if module.params.m() < 2 {
        return Err(Error::MTooSmall);
    }
    Ok(())
}

fn s_range(module: &ModulePresentation, h: SubgroupSpec) -> std::ops::RangeInclusive<u32> {
    0..=h.log_order(module.params)
}

/// Supports of size `1..=bound` over `0..cols`, in lexicographic order.
fn supports(cols: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(cur) = stack.pop() {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == bound {
            continue;
        }
        let start = cur.last().map_or(0, |&l| l + 1);
        for idx in (start..cols).rev() {
            let mut next = cur.clone();
            next.push(idx);
            stack.push(next);
        }
    }
    out.sort_by_key(Vec::len);
    out
}

/// Bounded search for a property `P(H)` certificate: `y` runs over sums of at
/// most `search_bound` distinct terms `σ^k·g`, in order of increasing `s`.
/// A `None` answer is not a disproof; see [`decide_property_p`].
pub fn has_property_p(
    module: &ModulePresentation,
    h: SubgroupSpec,
    search_bound: usize,
) -> Result<Option<PropertyPCertificate>> {
    check_m(module)?;
    let q = module.params.modulus();
    let candidates = supports(module.cols(), search_bound);
    for s in s_range(module, h) {
        let slice = PSlice::new(module, h, s);
        let top = slice.top_rows();
        let solver = Echelon::with_transform(module.ring(), module.cols(), &top);
        let kernel: Vec<Vec<u64>> =
            left_kernel(module.ring(), module.cols(), &top).into_iter().map(|k| k[..module.cols()].to_vec()).collect();
        for support in &candidates {
            let mut y = vec![0; module.cols()];
            for &idx in support {
                y[idx] = 1;
            }
            if slice.excluded(&y) {
                continue;
            }
            let w = module.sigma_minus(&y, slice.shift, 1);
            let Some(coeffs) = solver.solve(&w) else { continue };
            let z0 = coeffs[..module.cols()].to_vec();
            let z = std::iter::once(z0.clone())
                .chain(kernel.iter().map(|k| z0.iter().zip(k).map(|(a, b)| (a + b) % q).collect()))
                .find(|z| !slice.excluded(z));
            if let Some(z) = z {
                return Ok(Some(PropertyPCertificate {
                    s,
                    y: ModuleElement::from_vector(module, &y),
                    z: ModuleElement::from_vector(module, &z),
                }));
            }
        }
    }
    Ok(None)
}

/// Solutions `(y, z)` of `(τ^{p^s} - 1)y ≡ p^{m-1}z` modulo relations, as
/// generators of a subgroup of `M × M`.
fn solution_generators(slice: &PSlice<'_>) -> Vec<(Vec<u64>, Vec<u64>)> {
    let module = slice.module;
    let cols = module.cols();
    let q = module.params.modulus();
    let top = module.params.p().pow(module.params.m() - 1);
    let mut rows = Vec::new();
    for idx in 0..cols {
        rows.push(module.sigma_minus(&module.unit_vector(idx), slice.shift, 1));
    }
    for idx in 0..cols {
        rows.push(module.scaled_unit(idx, q - top));
    }
    rows.extend(module.relation_span().rows().iter().cloned());
    left_kernel(module.ring(), cols, &rows)
        .into_iter()
        .map(|k| (k[..cols].to_vec(), k[cols..2 * cols].to_vec()))
        .collect()
}

/// Exact decision of property `P(H)`. The solutions form a group `A`; a pair
/// with both entries outside the excluded submodule exists iff neither
/// coordinate condition holds on all of `A`, since a group is never the union
/// of two proper subgroups.
pub fn decide_property_p(module: &ModulePresentation, h: SubgroupSpec) -> Result<Option<PropertyPCertificate>> {
    check_m(module)?;
    let q = module.params.modulus();
    for s in s_range(module, h) {
        let slice = PSlice::new(module, h, s);
        let gens = solution_generators(&slice);
        let y_out = gens.iter().find(|(y, _)| !slice.excluded(y));
        let z_out = gens.iter().find(|(_, z)| !slice.excluded(z));
        let (Some(a), Some(b)) = (y_out, z_out) else { continue };
        let pick = if !slice.excluded(&a.1) {
            a.clone()
        } else if !slice.excluded(&b.0) {
            b.clone()
        } else {
            let add = |u: &[u64], v: &[u64]| u.iter().zip(v).map(|(x, y)| (x + y) % q).collect::<Vec<u64>>();
            (add(&a.0, &b.0), add(&a.1, &b.1))
        };
        return Ok(Some(PropertyPCertificate {
            s,
            y: ModuleElement::from_vector(module, &pick.0),
            z: ModuleElement::from_vector(module, &pick.1),
        }));
    }
    Ok(None)
}

/// The structural refutation: for every `s`, each solution of
/// `(τ^{p^s} - 1)y = p^{m-1}z` has `z ∈ (τ^{p^s} - 1, p)M`.
pub fn refute_property_p(module: &ModulePresentation, h: SubgroupSpec) -> Result<bool> {
    check_m(module)?;
    Ok(s_range(module, h).all(|s| {
        let slice = PSlice::new(module, h, s);
        solution_generators(&slice).iter().all(|(_, z)| slice.excluded(z))
    }))
}

pub fn verify_property_p_certificate(
    module: &ModulePresentation,
    h: SubgroupSpec,
    cert: &PropertyPCertificate,
) -> Result<bool> {
    check_m(module)?;
    cert.y.check(module)?;
    cert.z.check(module)?;
    let slice = PSlice::new(module, h, cert.s);
    let q = module.params.modulus();
    let top = module.params.p().pow(module.params.m() - 1);
    let y = cert.y.to_vector();
    let z = cert.z.to_vector();
    let lhs = module.sigma_minus(&y, slice.shift, 1);
    let diff: Vec<u64> = lhs.iter().zip(&z).map(|(&l, &r)| (l + q - top * r % q) % q).collect();
    Ok(module.in_relations(&diff) && !slice.excluded(&y) && !slice.excluded(&z))
}

/// The rank of `M` as a free `R_m(H/S)`-module, if it is one.
pub fn free_rank_over_quotient(module: &ModulePresentation, h: SubgroupSpec, s: SubgroupSpec) -> Result<Option<usize>> {
    if s.exponent < h.exponent {
        return Err(Error::SubgroupOrder(format!("H_{} is not contained in H_{}", s.exponent, h.exponent)));
    }
    if !trivial_shift(module, module.tau_shift(s, 0)) {
        return Ok(None);
    }
    let p = module.params.p();
    let shift = module.tau_shift(h, 0);
    let mut rows: Vec<Vec<u64>> = module.relation_rows();
    for idx in 0..module.cols() {
        rows.push(module.sigma_minus(&module.unit_vector(idx), shift, 1));
    }
    let rows: Vec<Vec<u64>> = rows.into_iter().map(|r| r.into_iter().map(|c| c % p).collect()).collect();
    let mu = module.cols() - Echelon::new(ChainRing::new(p, 1), module.cols(), &rows).log_size() as usize;
    let quotient_order = p.pow(s.exponent - h.exponent) as usize;
    let free_log = mu * quotient_order * module.params.m() as usize;
    Ok((module.log_size() as usize == free_log).then_some(mu))
}

pub fn is_free_over_quotient(module: &ModulePresentation, h: SubgroupSpec, s: SubgroupSpec) -> Result<bool> {
    Ok(free_rank_over_quotient(module, h, s)?.is_some())
}

/// `{c ∈ R_m : c·g ∈ ⟨others⟩}` as an ideal `⟨p^k⟩` of `R_m`.
pub fn scalar_conductor(module: &ModulePresentation, g: &str, others: &[&str]) -> Result<IdealPresentation> {
    let gi = module.generator_index(g)?;
    let mut rows = module.relation_span().rows().to_vec();
    for o in others {
        let oi = module.generator_index(o)?;
        let e = module.unit_vector(oi * module.block());
        for t in 0..module.block() {
            rows.push(module.rotate(&e, t));
        }
    }
    let sub = Echelon::new(module.ring(), module.cols(), &rows);
    let p = module.params.p();
    let k = (0..=module.params.m())
        .find(|&k| sub.contains(&module.scaled_unit(gi * module.block(), p.pow(k))))
        .expect("p^m g = 0");
    let c = GroupRingElement::constant(module.params, 0, p.pow(k) as i128)?;
    IdealPresentation::new(module.params, 0, vec![c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupring::poly_q_at;
    use crate::normpair::{interpolate, NormEntry};
    use proptest::prelude::*;

    fn params(p: u64, n: u32, m: u32) -> GroupRingParams {
        GroupRingParams::new(p, n, m).unwrap()
    }

    fn v(s: &str) -> NormVector {
        s.parse().unwrap()
    }

    fn sub(pr: GroupRingParams, t: u32) -> SubgroupSpec {
        SubgroupSpec::new(pr, t).unwrap()
    }

    /// All elements of a small module as distinct residue classes, by
    /// enumerating coordinate vectors and reducing modulo the relation span.
    fn brute_size(module: &ModulePresentation) -> usize {
        let q = module.params.modulus() as usize;
        let cols = module.cols();
        let mut seen = std::collections::BTreeSet::new();
        for code in 0..q.pow(cols as u32) {
            let v: Vec<u64> = (0..cols).map(|k| (code / q.pow(k as u32) % q) as u64).collect();
            seen.insert(module.relation_span().reduce(&v));
        }
        seen.len()
    }

    #[test]
    fn exceptional_module_examples() {
        let pr = params(2, 1, 1);
        let x = exceptional_module(pr, &v("(-inf)"), 1).unwrap();
        assert_eq!(x.generators(), &["alpha".to_string()]);
        assert!(is_trivial_under(&x, sub(pr, 0)));
        assert_eq!(fp_dimension(&x), 1);

        for d in [1, 3, 5] {
            let x = exceptional_module(params(2, 2, 1), &v("(0)"), d).unwrap();
            assert_eq!(fp_dimension(&x), 2);
        }
        let x = exceptional_module(params(3, 1, 1), &v("(1)"), 1);
        assert!(matches!(x, Err(Error::BadVector(_))));
        let x = exceptional_module(params(3, 2, 1), &v("(1)"), 4).unwrap();
        assert_eq!(fp_dimension(&x), 4);
        assert!(matches!(exceptional_module(params(3, 2, 1), &v("(3)"), 1), Err(Error::BadVector(_))));
        assert!(matches!(exceptional_module(params(3, 2, 2), &v("(0)"), 1), Err(Error::BadVector(_))));
    }

    #[test]
    fn dimension_formula_against_brute_force() {
        let pr = params(2, 2, 2);
        let x = exceptional_module(pr, &v("(0,2)"), 1).unwrap();
        assert_eq!(fp_dimension(&x), 6);
        let pr = params(2, 1, 1);
        for a in ["(-inf)", "(0)"] {
            let x = exceptional_module(pr, &v(a), 1).unwrap();
            assert_eq!(brute_size(&x), 1 << fp_dimension(&x), "{a}");
        }
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let pr = params(3, 1, 2);
        let x = exceptional_module(pr, &v("(0,-inf)"), 4).unwrap();
        let text = x.to_string();
        assert_eq!(text, "gens: alpha, delta0\nalpha: 5 + s; delta0: 8\ndelta0: 8 + s\n");
        assert_eq!(ModulePresentation::parse(pr, &text).unwrap(), x);
        assert!(matches!(ModulePresentation::parse(pr, "gens: a\nb: 1"), Err(Error::UnknownGenerator(_))));
        assert!(ModulePresentation::parse(pr, "a: 1").is_err());
    }

    #[test]
    fn eigenmodule_examples() {
        let pr = params(3, 2, 2);
        let x = exceptional_module(pr, &v("(-inf,-inf)"), 4).unwrap();
        assert_eq!(is_eigenmodule(&x, sub(pr, 0)), Some(4));
        assert_eq!(is_eigenmodule(&x, sub(pr, 2)), Some(1));
        let free = ModulePresentation::free_quotient_sum(pr, &[2]).unwrap();
        assert_eq!(is_eigenmodule(&free, sub(pr, 0)), None);
        assert!(!is_trivial_under(&free, sub(pr, 0)));
        assert!(is_trivial_under(&free, sub(pr, 2)));
    }

    #[test]
    fn eigenvalue_scan_is_exact() {
        let pr = params(2, 1, 2);
        let x = exceptional_module(pr, &v("(-inf,-inf)"), 1).unwrap();
        let alpha = ModuleElement::generator(&x, "alpha").unwrap();
        for c in 0..4 {
            let t = GroupRingElement::sigma_power_minus(pr, 1, 1, c).unwrap();
            let kills = element_equal(&x, &alpha.act(&t).unwrap(), &ModuleElement::zero(&x)).unwrap();
            assert_eq!(kills, c == 1);
        }
    }

    #[test]
    fn freeness_examples() {
        let pr = params(2, 2, 2);
        let g = ModulePresentation::new(pr, vec!["g".into()], vec![]).unwrap();
        assert_eq!(free_rank_over_quotient(&g, sub(pr, 0), sub(pr, 2)).unwrap(), Some(1));
        let pr1 = params(2, 1, 1);
        let x = exceptional_module(pr1, &v("(0)"), 1).unwrap();
        assert!(!is_free_over_quotient(&x, sub(pr1, 0), sub(pr1, 0)).unwrap());
        let trivial = ModulePresentation::free_quotient_sum(pr, &[0]).unwrap();
        assert!(is_free_over_quotient(&trivial, sub(pr, 1), sub(pr, 1)).unwrap());
        assert!(matches!(is_free_over_quotient(&g, sub(pr, 1), sub(pr, 0)), Err(Error::SubgroupOrder(_))));
        let sum = ModulePresentation::free_quotient_sum(pr, &[1, 1]).unwrap();
        assert_eq!(free_rank_over_quotient(&sum, sub(pr, 0), sub(pr, 1)).unwrap(), Some(2));
        assert_eq!(free_rank_over_quotient(&sum, sub(pr, 0), sub(pr, 2)).unwrap(), None);
    }

    #[test]
    fn element_equality_examples() {
        let pr = params(3, 2, 2);
        let x = exceptional_module(pr, &v("(0,1)"), 4).unwrap();
        let alpha = ModuleElement::generator(&x, "alpha").unwrap();
        let lhs = alpha.act(&GroupRingElement::sigma_power_minus(pr, 2, 1, 4).unwrap()).unwrap();
        let rhs = ModuleElement::parse(&x, "delta0: 1; delta1: 3").unwrap();
        assert!(element_equal(&x, &lhs, &rhs).unwrap());
        assert!(!element_equal(&x, &alpha, &ModuleElement::zero(&x)).unwrap());
        assert!(element_equal(&x, &alpha, &alpha).unwrap());
        let other = exceptional_module(pr, &v("(0,-inf)"), 4).unwrap();
        let beta = ModuleElement::generator(&other, "alpha").unwrap();
        assert_eq!(element_equal(&x, &alpha, &beta), Err(Error::PresentationMismatch));
    }

    #[test]
    fn conductor_examples() {
        let pr = params(2, 1, 1);
        let x = exceptional_module(pr, &v("(-inf)"), 1).unwrap();
        let zero = IdealPresentation::new(pr, 0, vec![]).unwrap();
        assert!(crate::ideals::ideal_equal(&scalar_conductor(&x, "alpha", &[]).unwrap(), &zero).unwrap());
        let x = exceptional_module(pr, &v("(0)"), 1).unwrap();
        assert!(crate::ideals::ideal_equal(&scalar_conductor(&x, "alpha", &["delta0"]).unwrap(), &zero).unwrap());
        let unit = IdealPresentation::unit(pr, 0).unwrap();
        let c = scalar_conductor(&x, "alpha", &["alpha"]).unwrap();
        assert!(crate::ideals::ideal_equal(&c, &unit).unwrap());
        assert!(matches!(scalar_conductor(&x, "beta", &[]), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn conductor_matches_scalar_scan() {
        let pr = params(3, 1, 2);
        for a in ["(-inf,-inf)", "(0,-inf)", "(-inf,0)", "(0,1)"] {
            for d in [1i128, 4, 7] {
                let x = exceptional_module(pr, &v(a), d).unwrap();
                let others: Vec<&str> = x.generators()[1..].iter().map(String::as_str).collect();
                let ideal = scalar_conductor(&x, "alpha", &others).unwrap();
                let mut sub_rows = x.relation_span().rows().to_vec();
                for o in 1..x.generators().len() {
                    for t in 0..x.block() {
                        sub_rows.push(x.unit_vector(o * x.block() + t));
                    }
                }
                let sub = Echelon::new(x.ring(), x.cols(), &sub_rows);
                for c in 0..9u64 {
                    let member = sub.contains(&x.scaled_unit(0, c));
                    let in_ideal =
                        crate::ideals::ideal_membership(&GroupRingElement::constant(pr, 0, c as i128).unwrap(), &ideal)
                            .unwrap();
                    assert_eq!(member, in_ideal, "a = {a}, d = {d}, c = {c}");
                }
            }
        }
    }

    #[test]
    fn property_p_certificate_for_exceptional_module() {
        let pr = params(2, 2, 2);
        let a = v("(0,-inf)");
        let x = exceptional_module(pr, &a, 1).unwrap();
        let at = interpolate(&a);
        let NormEntry::Finite(t) = at.get(1) else { panic!() };
        let h = sub(pr, t);
        let cert = has_property_p(&x, h, 1).unwrap().expect("certificate");
        assert_eq!(cert.s, 0);
        assert_eq!(cert.y, ModuleElement::generator(&x, "alpha").unwrap());
        assert!(verify_property_p_certificate(&x, h, &cert).unwrap());
        let zero = ModuleElement::zero(&x);
        let bad = PropertyPCertificate { s: 0, y: zero.clone(), z: zero };
        assert!(!verify_property_p_certificate(&x, h, &bad).unwrap());
        let alpha = ModuleElement::generator(&x, "alpha").unwrap();
        let two_alpha = alpha.act(&GroupRingElement::constant(pr, 2, 2).unwrap()).unwrap();
        let in_p = PropertyPCertificate { s: 0, y: two_alpha, z: cert.z.clone() };
        assert!(!verify_property_p_certificate(&x, h, &in_p).unwrap());
        assert!(decide_property_p(&x, h).unwrap().is_some());
        assert!(!refute_property_p(&x, h).unwrap());
    }

    #[test]
    fn proof_certificate_verifies() {
        // (σ^2 - 1)α = (σ + 1)δ_0 = 2·Q_1(0,0)δ_0
        let pr = params(2, 2, 2);
        let x = exceptional_module(pr, &v("(0,-inf)"), 1).unwrap();
        let h = sub(pr, 1);
        let alpha = ModuleElement::generator(&x, "alpha").unwrap();
        let q = poly_q_at(pr, 1, 0, 0, 2, true).unwrap();
        let w = ModuleElement::from_coords(&x, vec![("delta0".into(), q)]).unwrap();
        let cert = PropertyPCertificate { s: 0, y: alpha, z: w };
        assert!(verify_property_p_certificate(&x, h, &cert).unwrap());
    }

    #[test]
    fn property_p_needs_m_at_least_two() {
        let pr = params(2, 1, 1);
        let x = exceptional_module(pr, &v("(0)"), 1).unwrap();
        assert_eq!(has_property_p(&x, sub(pr, 0), 1), Err(Error::MTooSmall));
        assert_eq!(refute_property_p(&x, sub(pr, 0)), Err(Error::MTooSmall));
    }

    #[test]
    fn free_modules_are_refuted() {
        for (p, n, m) in [(2, 1, 2), (2, 2, 2), (3, 1, 2), (2, 1, 3)] {
            let pr = params(p, n, m);
            for k in 0..=n {
                for other in 0..=n {
                    let module = ModulePresentation::free_quotient_sum(pr, &[k, other]).unwrap();
                    for t in 0..=n {
                        let h = sub(pr, t);
                        assert!(has_property_p(&module, h, 1).unwrap().is_none());
                        assert!(decide_property_p(&module, h).unwrap().is_none());
                        assert!(refute_property_p(&module, h).unwrap(), "p={p} n={n} m={m} k={k},{other} t={t}");
                    }
                }
            }
        }
    }

    /// Cyclic modules `R_m G/(r1, r2)` over tiny rings: an eigenmodule that is
    /// free over some `R_m(H/S)` and nonzero is trivial with `H = S`.
    #[test]
    fn eigen_and_free_forces_trivial() {
        for (p, n, m) in [(2, 1, 1), (2, 1, 2), (2, 2, 1), (3, 1, 1)] {
            let pr = params(p, n, m);
            let q = pr.modulus() as i128;
            let len = pr.order(n) as u32;
            let elements: Vec<GroupRingElement> = (0..q.pow(len))
                .map(|code| {
                    let c: Vec<i128> = (0..len).map(|k| code / q.pow(k) % q).collect();
                    GroupRingElement::from_coeffs(pr, n, &c).unwrap()
                })
                .collect();
            for (i, r1) in elements.iter().enumerate() {
                for r2 in &elements[i..] {
                    let rels = vec![vec![("w".to_string(), r1.clone())], vec![("w".to_string(), r2.clone())]];
                    let module = ModulePresentation::new(pr, vec!["w".into()], rels).unwrap();
                    if module.log_size() == 0 {
                        continue;
                    }
                    for h in 0..=n {
                        let hs = sub(pr, h);
                        if is_eigenmodule(&module, hs).is_none() {
                            continue;
                        }
                        for s in h..=n {
                            if is_free_over_quotient(&module, hs, sub(pr, s)).unwrap() {
                                assert_eq!(s, h);
                                assert!(is_trivial_under(&module, hs));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn supports_are_ordered() {
        assert_eq!(supports(3, 2), vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    fn arb_module() -> impl Strategy<Value = (ModulePresentation, Vec<u64>, Vec<u64>, Vec<u64>)> {
        let pr = params(3, 1, 2);
        (proptest::collection::vec(0u64..9, 6), proptest::collection::vec(0u64..9, 6), proptest::collection::vec(0u64..9, 6), proptest::collection::vec(0u64..9, 6))
            .prop_map(move |(r, a, b, c)| {
                let el = |s: &[u64]| {
                    GroupRingElement::from_coeffs(pr, 1, &s.iter().map(|&x| x as i128).collect::<Vec<_>>()).unwrap()
                };
                let rel = vec![("u".to_string(), el(&r[..3])), ("v".to_string(), el(&r[3..]))];
                let module = ModulePresentation::new(pr, vec!["u".into(), "v".into()], vec![rel]).unwrap();
                (module, a, b, c)
            })
    }

    proptest! {
        #[test]
        fn element_equality_is_a_congruence((module, a, b, c) in arb_module()) {
            let x = ModuleElement::from_vector(&module, &a);
            let y = ModuleElement::from_vector(&module, &b);
            let rel = ModuleElement::from_vector(&module, &module.flatten(&module.relations()[0]));
            let shifted = y.add(&rel).unwrap();
            prop_assert!(element_equal(&module, &y, &shifted).unwrap());
            prop_assert_eq!(element_equal(&module, &x, &y).unwrap(), element_equal(&module, &y, &x).unwrap());
            let r = GroupRingElement::from_coeffs(module.params(), 1, &c[..3].iter().map(|&t| t as i128).collect::<Vec<_>>()).unwrap();
            prop_assert!(element_equal(&module, &y.act(&r).unwrap(), &shifted.act(&r).unwrap()).unwrap());
            if element_equal(&module, &x, &y).unwrap() {
                let z = x.add(&rel.act(&r).unwrap()).unwrap();
                prop_assert!(element_equal(&module, &z, &y).unwrap());
            }
        }

        #[test]
        fn decision_agrees_with_bounded_search((module, _a, _b, _c) in arb_module()) {
            let pr = module.params();
            for t in 0..=1 {
                let h = sub(pr, t);
                let found = has_property_p(&module, h, 2).unwrap();
                let decided = decide_property_p(&module, h).unwrap();
                if let Some(cert) = &found {
                    prop_assert!(verify_property_p_certificate(&module, h, cert).unwrap());
                    prop_assert!(decided.is_some());
                }
                if let Some(cert) = &decided {
                    prop_assert!(verify_property_p_certificate(&module, h, cert).unwrap());
                }
                if refute_property_p(&module, h).unwrap() {
                    prop_assert!(decided.is_none());
                }
            }
        }
    }
}
