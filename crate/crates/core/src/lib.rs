//! Limit laws, exact path simulation and statistical verification for
//! reflected Lévy processes under Cramér's condition.

pub mod config;
pub mod error;
pub mod ladder;
pub mod limits;
pub mod model;
mod poly;
pub mod report;
pub mod sim;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use ladder::{factorize, wh_factorize, LadderFactorization, RationalBernstein};
pub use limits::LimitLawSet;
pub use model::{CramerData, ExpJumps, LevyModel};
