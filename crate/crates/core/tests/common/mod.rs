#![allow(dead_code)]

use std::path::{Path, PathBuf};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// argv for the mock provider with extra flags.
pub fn mock(flags: &[&str]) -> Vec<String> {
    let mut cmd = vec!["python3".to_owned(), fixture("mock_provider.py").display().to_string()];
    cmd.extend(flags.iter().map(|s| s.to_string()));
    cmd
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_nvsbench"))
}
pub mod oracles;
