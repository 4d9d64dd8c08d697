//! Limits of first-order theories along chains of finite structures.
//!
//! The crate evaluates sentences in finite structures, tabulates their truth
//! along a chain, and reads off horizon-relative limsup/liminf
//! classifications. Alongside sit an automorphism search used to check the
//! automorphism criteria for limit existence, Ehrenfeucht–Fraïssé games, and
//! closed-form oracles for families whose members are infinite.

pub mod automorphism;
pub mod ef;
pub mod eval;
pub mod families;
pub mod homogeneity;
pub mod io;
pub mod limit;
pub mod oracle;
pub mod structure;
pub mod syntax;

pub use eval::{evaluate, tabulate, TruthMatrix};
pub use limit::{limit_report, LimitReport};
pub use structure::{ChainFamily, FiniteStructure, Signature};
