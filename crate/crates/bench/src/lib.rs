//! Shared fixtures for the criterion benchmarks under `benches/`.

use convspec_core::{Family, ModelSpec};

/// One representative parameter point per family.
pub fn representatives() -> Vec<Family> {
    convspec_core::polynomials::FAMILY_NAMES
        .iter()
        .map(|n| Family::sample_grid(n).expect("known family")[0])
        .collect()
}

pub fn model(f: Family) -> ModelSpec {
    ModelSpec::family(f).expect("sample points are valid")
}
