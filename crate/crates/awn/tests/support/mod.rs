//! Shared fixtures and independent oracles, also used by the acceptance run.
#![allow(dead_code)]

pub mod sos;
pub mod oracles;
pub mod algebra;
