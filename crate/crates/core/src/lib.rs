//! Exact computations around the power classes `K^×/K^{×p^m}` of a cyclic
//! `p`-power extension `K/F`: group-ring arithmetic in `(Z/p^m)[Z/p^n]`,
//! chain-ring linear algebra, finitely presented modules, norm pairs and
//! cyclotomic towers.

pub mod cyclotower;
pub mod error;
pub mod fpmod;
pub mod groupring;
pub mod ideals;
pub mod linalg;
pub mod normpair;
pub mod report;
pub mod suites;
mod syntax;

pub use error::{Error, Result};
