//! Independent oracles shared by the integration tests. None of these use the
//! floating-point reflection representation of the library.
#![allow(dead_code)]

pub mod braid;
pub mod exact;
pub mod gram;

use cox_core::system::{parse_system, CoxeterSystem};

pub const FIXTURES: &[&str] = &[
    "fig1",
    "dihedral-inf",
    "a2",
    "triangle333",
    "dinf-x-a1",
    "b3",
    "h3",
    "a1xa1",
];

pub fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{name}.cox", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> CoxeterSystem {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_system(&text).unwrap()
}
