pub mod error;
pub mod figures;
pub mod generator;
pub mod io;
pub mod params;
pub mod payoff;
pub mod pdesolver;
pub mod pricing;
pub mod riccati;
pub mod simulate;

pub use error::{Error, Result};
