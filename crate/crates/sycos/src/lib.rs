//! Finds all non-overlapping time windows in which two synchronous series
//! are correlated, at any scale, using k-NN mutual information.
//!
//! Entry points: [`run_td`] / [`run_bu`] for the two search strategies,
//! [`select`] to pick one automatically from a sampled profile, and
//! [`run_parallel`] to fan a search out over overlapping chunks. See the
//! `examples/` directory for end-to-end usage.

pub mod bu;
pub mod datagen;
pub mod engine;
pub mod error;
pub mod incremental;
pub mod io;
pub mod ksg;
pub mod noise;
pub mod parallel;
pub mod selector;
pub mod td;
pub mod types;

pub use bu::{run_bu, run_bu_traced};
pub use error::{Error, Result};
pub use incremental::MiState;
pub use ksg::{digamma, estimate_mi, normalized_mi, MarginalConvention, MiEstimate};
pub use noise::{check_noise, NoiseVerdict};
pub use parallel::{plan_chunks, run_method, run_parallel, Method};
pub use selector::{select, SelectionReport};
pub use td::{run_td, LayerSchedule};
pub use types::{
    CorrelatedWindow, MethodTag, ResultSet, SearchOptions, SearchParams, SearchStats,
    TimeSeriesPair, Window,
};
