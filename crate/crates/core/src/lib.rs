pub mod binfty;
pub mod cache;
pub mod cli;
pub mod error;
pub mod frobmono;
pub mod orders;
pub mod polytopes;
pub mod quiverdeg;
pub mod rootsys;
pub mod suite;
pub mod syntax;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/crystals.md")]
    mod crystals {}
    #[doc = include_str!("../../../book/src/polytopes.md")]
    mod polytopes {}
    #[doc = include_str!("../../../book/src/orders.md")]
    mod orders {}
    #[doc = include_str!("../../../book/src/quivers.md")]
    mod quivers {}
    #[doc = include_str!("../../../book/src/frobenius.md")]
    mod frobenius {}
    #[doc = include_str!("../../../book/src/delta.md")]
    mod delta {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
