//! Statistical engine for estimating footballer market values with multiple
//! linear regression.
//!
//! The pipeline runs [`ingest`] → [`features`] → [`ols`] → [`diagnostics`] /
//! [`selection`], with [`numcore`] and [`distributions`] underneath.

pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod features;
pub mod ingest;
pub mod numcore;
pub mod ols;
pub mod selection;

pub use error::{Error, Result};
