//! Exact formal-integrability analysis for linear constant-coefficient PDE
//! systems and relative connections.

pub mod cli;
pub mod error;
pub mod format;
pub mod jetpde;
pub mod ratlin;
pub mod relconn;
pub mod report;
pub mod spencer;
pub mod tableau;
pub mod tensorspace;

pub use error::{Error, Result};
