//! Command-line front end for the `scalewave` library: scenario files in,
//! CSV/PGM artifacts out.
//!
//! The binary is organized as a thin layer over the library — every command
//! is "parse a scenario, call one or two library operations, serialize the
//! result". All numeric output is written with full `f64` precision so that
//! repeated runs of the same scenario are byte-identical.
//!
//! Exit codes: `0` success, `1` configuration or I/O problems, `2` a
//! requested numeric tolerance was not met.

pub mod commands;
pub mod formats;
pub mod scenario;
