//! File formats, reports and the suite driver around [`spectral_poisson_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub use spectral_poisson_core as core;

pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod report;
pub mod suites;

pub use config::{SuiteConfig, SuiteParams, Tolerances};
pub use error::{AppError, AppResult};
pub use report::{Check, Report};
