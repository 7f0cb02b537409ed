//! Image files, field exports, parallel evaluation and the `dipole` command
//! line on top of [`dipole_core`].

pub mod cli;
pub mod imgio;
pub mod parallel;

pub use dipole_core;
