//! The guide under `book/`, one module per chapter. Every `rust` block in the
//! chapters runs as a doc-test of this crate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/parameter-box.md")]
pub mod parameter_box {}
#[doc = include_str!("../../../book/src/generator.md")]
pub mod generator {}
#[doc = include_str!("../../../book/src/riccati.md")]
pub mod riccati {}
#[doc = include_str!("../../../book/src/pde.md")]
pub mod pde {}
#[doc = include_str!("../../../book/src/monte-carlo.md")]
pub mod monte_carlo {}
#[doc = include_str!("../../../book/src/pricing.md")]
pub mod pricing {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
