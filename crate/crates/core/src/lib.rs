pub mod bootstrap;
pub mod classify;
pub mod config;
pub mod data;
pub mod error;
pub mod linalg;
pub mod mediation;
pub mod pls;
pub mod predict;
pub mod psychometrics;
pub mod report;
pub mod spec;
pub mod split_test;
pub mod structural;
pub mod synth;

pub use error::{Error, Result};
