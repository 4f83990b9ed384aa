//! Serialization, export, and family-resolution layer behind the `qcopula`
//! binary: versioned circuit JSON, OpenQASM 2.0 with exact decomposition,
//! CSV and PGM writers, and command-line family parsing.

pub mod csvout;
pub mod families;
pub mod json;
pub mod pgm;
pub mod qasm;
