//! Weber class invariants, Yui-Zagier resultants and the machinery behind
//! their factorization: Weil representations on finite quadratic modules,
//! Borcherds products as exact q-series, and big CM value coefficients.

pub mod arith;
pub mod bigcomplex;
pub mod classpoly;
pub mod cyclo;
pub mod error;
pub mod modeval;
pub mod qseries;
pub mod quadratic;
pub mod report;
pub mod weilrep;
pub mod yzlocal;

pub use error::{Error, Result};
