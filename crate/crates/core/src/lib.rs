//! Transaction-level simulation of individual insurance claims with case
//! estimates of incurred loss, plus the aggregation and reserving tools used
//! to study the resulting data.
//!
//! The pipeline per claim is: paid-loss history ([`claims`]), major and minor
//! revisions of the case estimate ([`major`], [`minor`]), a backward
//! consolidation anchored at settlement ([`consolidate`]), and finally base
//! inflation. [`simulate`] runs it for a whole portfolio.

pub mod chainladder;
pub mod claims;
pub mod config;
pub mod consolidate;
pub mod csv_io;
pub mod dataset;
pub mod diagnostics;
pub mod error;
pub mod inflation;
pub mod major;
pub mod minor;
pub mod rng;
pub mod simulate;
pub mod timeline;
pub mod triangle;

pub use config::{Preset, SimulationConfig};
pub use error::{Error, Result};
