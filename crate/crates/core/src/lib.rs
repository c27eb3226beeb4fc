//! Chern class formulas for splitting loci of vector bundles on P^1-bundles.

pub mod cache;
pub mod context;
pub mod determinantal;
pub mod document;
pub mod error;
pub mod gysin;
pub mod kclass;
pub mod modular;
pub mod oracle;
pub mod par;
pub mod partition;
pub mod poly;
pub mod rational;
pub mod splitting;
pub mod verify;

pub use context::{BundleContext, GradedVar};
pub use error::{Error, Result};
pub use poly::{ChernSeries, GradedPoly};
pub use rational::Rat;
