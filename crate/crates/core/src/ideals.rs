//! Ideals of `R_m G_i`: membership, equality and annihilators.

use crate::error::{Error, Result};
use crate::groupring::{GroupRingElement, GroupRingParams};
use crate::linalg::{left_kernel, ChainRing, Echelon};
use std::fmt;

pub use crate::linalg::{canonical_form, ResidueMatrix};

/// The ideal of `R_m G_level` generated by `generators`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealPresentation {
    params: GroupRingParams,
    level: u32,
    generators: Vec<GroupRingElement>,
}

impl IdealPresentation {
    pub fn new(params: GroupRingParams, level: u32, generators: Vec<GroupRingElement>) -> Result<Self> {
        GroupRingElement::zero(params, level)?;
        for g in &generators {
            if g.params() != params {
                return Err(Error::ParamsMismatch);
            }
            if g.level() != level {
                return Err(Error::LevelMismatch(format!("generator at level {}, ideal at {level}", g.level())));
            }
        }
        Ok(Self { params, level, generators })
    }

    pub fn unit(params: GroupRingParams, level: u32) -> Result<Self> {
        Self::new(params, level, vec![GroupRingElement::one(params, level)?])
    }

    pub fn params(&self) -> GroupRingParams {
        self.params
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn generators(&self) -> &[GroupRingElement] {
        &self.generators
    }

    /// Howell form of the ideal as a `Z/p^m`-module.
    pub fn span(&self) -> Echelon {
        let rows: Vec<Vec<u64>> = self.generators.iter().flat_map(action_rows).collect();
        Echelon::new(ring_of(self.params), self.params.order(self.level), &rows)
    }

    /// `log_p` of the number of elements of the ideal.
    pub fn log_size(&self) -> u32 {
        self.span().log_size()
    }

    fn check(&self, params: GroupRingParams, level: u32) -> Result<()> {
        if self.params != params {
            return Err(Error::ParamsMismatch);
        }
        if self.level != level {
            return Err(Error::LevelMismatch(format!("{} vs {level}", self.level)));
        }
        Ok(())
    }
}

impl fmt::Display for IdealPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(ToString::to_string).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

pub(crate) fn ring_of(params: GroupRingParams) -> ChainRing {
    ChainRing::new(params.p(), params.m())
}

/// Rows `σ^k·x` for `0 <= k < p^level`: the matrix of multiplication by `x`.
pub(crate) fn action_rows(x: &GroupRingElement) -> Vec<Vec<u64>> {
    (0..x.coeffs().len()).map(|k| x.shift(k).coeffs().to_vec()).collect()
}

pub fn ideal_membership(x: &GroupRingElement, ideal: &IdealPresentation) -> Result<bool> {
    ideal.check(x.params(), x.level())?;
    Ok(ideal.span().contains(x.coeffs()))
}

pub fn ideal_equal(a: &IdealPresentation, b: &IdealPresentation) -> Result<bool> {
    a.check(b.params, b.level)?;
    Ok(a.span().same_span(&b.span()))
}

/// `{y : y·x = 0}`, returned with a minimal generating set.
pub fn annihilator(x: &GroupRingElement) -> IdealPresentation {
    let params = x.params();
    let level = x.level();
    if x.is_zero() {
        return IdealPresentation::unit(params, level).expect("valid level");
    }
    let ring = ring_of(params);
    let len = params.order(level);
    let kernel = left_kernel(ring, len, &action_rows(x));
    let to_element = |v: &[u64]| {
        let c: Vec<i128> = v.iter().map(|&a| a as i128).collect();
        GroupRingElement::from_coeffs(params, level, &c).expect("valid level")
    };
    let mut gens: Vec<GroupRingElement> = Vec::new();
    let mut span = Echelon::new(ring, len, &[]);
    for v in &kernel {
        if span.contains(v) {
            continue;
        }
        gens.push(to_element(v));
        let rows: Vec<Vec<u64>> = gens.iter().flat_map(action_rows).collect();
        span = Echelon::new(ring, len, &rows);
    }
    prune(params, level, gens)
}

/// Drops every generator that lies in the ideal generated by the others.
pub fn prune(params: GroupRingParams, level: u32, mut gens: Vec<GroupRingElement>) -> IdealPresentation {
    let mut idx = 0;
    while idx < gens.len() {
        let others: Vec<GroupRingElement> =
            gens.iter().enumerate().filter(|&(k, _)| k != idx).map(|(_, g)| g.clone()).collect();
        let rest = IdealPresentation::new(params, level, others).expect("same level");
        if rest.span().contains(gens[idx].coeffs()) {
            gens.remove(idx);
        } else {
            idx += 1;
        }
    }
    IdealPresentation::new(params, level, gens).expect("same level")
}
