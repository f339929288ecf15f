//! Finite-degree verification of a flat connection on configuration spaces
//! of points on a Schottky-uniformized curve.

pub mod error;
pub mod config;
pub mod connection;
pub mod fmod;
pub mod holonomy;
pub mod lie;
pub mod linalg;
pub mod quad;
pub mod report;
pub mod schottky;
pub mod suites;
pub mod tgn;

pub use error::{Error, Result};
