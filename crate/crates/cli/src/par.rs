//! Rayon drivers over the sequential core. Results are reduced in a fixed
//! order, so they match the sequential functions exactly.

use rayon::prelude::*;
use sidon_core::alpha_lab::{sweep_alpha, AlphaGrid, SweepRow};
use sidon_core::infinite::Catalog;
use sidon_core::precision::DyadicRational;
use sidon_core::verifier::{SidonReport, SumIndex, VerifyOptions};
use sidon_core::BigUint;

/// Sidon check with the hash passes spread over threads.
pub fn check_sidon(set: &[BigUint]) -> SidonReport {
    check_sidon_with(set, VerifyOptions::default())
}

pub fn check_sidon_with(set: &[BigUint], opts: VerifyOptions) -> SidonReport {
    let index = SumIndex::new(set, opts);
    let outcomes: Vec<_> = (0..index.pass_count()).into_par_iter().map(|k| index.run_pass(k)).collect();
    index.finish(outcomes)
}

pub fn sweep(catalog: &Catalog, grid: &AlphaGrid) -> Vec<SweepRow> {
    let points: Vec<DyadicRational> = grid.points().collect();
    points.par_iter().flat_map_iter(|&alpha| sweep_alpha(catalog, alpha)).collect()
}
