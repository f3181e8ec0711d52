#![allow(dead_code)]

use std::path::PathBuf;

pub const SAMPLE_STATEMENT: &str = "Conceived and designed the experiments: EG ES JD. Performed the experiments: ES JD MH JP MS. Analyzed the data: EG ES FC JD JP MS. Contributed reagents/materials/analysis tools: ES JD MH JP MS. Wrote the paper: EG ES.";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}
