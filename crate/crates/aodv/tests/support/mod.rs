//! Fixtures and independent oracles shared by the integration tests and the
//! acceptance run.
#![allow(dead_code)]

pub mod tables;

use std::path::PathBuf;

use awn_aodv::Scenario;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

pub fn scenario(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}
