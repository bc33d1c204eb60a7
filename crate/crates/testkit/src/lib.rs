//! Test support shared by the integration and acceptance suites.
//!
//! [`oracle`] is an LP solver that shares no code with the simplex in
//! `gpdb_core::lp`: it enumerates every basic solution of the polytope and
//! takes the best feasible one. [`gen`] produces small random programs,
//! constraint systems and formula functions from a caller-supplied RNG.

pub mod gen;
pub mod oracle;

use std::path::PathBuf;

/// Absolute path of a file in the workspace `fixtures/` directory.
pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Contents of a fixture file.
pub fn fixture(name: &str) -> String {
    let path = fixture_path(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Every `.gp` fixture name, sorted.
pub fn fixture_names() -> Vec<String> {
    let dir = fixture_path("");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .filter_map(|entry| {
            let name = entry.ok()?.file_name().into_string().ok()?;
            name.ends_with(".gp").then_some(name)
        })
        .collect();
    names.sort();
    names
}
