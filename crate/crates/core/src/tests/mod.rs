//! Cross-module tests: dense-oracle equivalence, physical invariants, and
//! the command line. Kept in the library so they run ahead of the
//! acceptance target.

#[path = "../../tests/common/mod.rs"]
mod common;
