//! Fixtures shared by the benchmarks.

use northcott_core::heights::Weight;
use northcott_core::tower::{build_tower, BuildOptions, TowerSpec};
use northcott_core::LogLinear;

/// The `w = 1`, `c = log 2`, `N = 1` tower.
pub fn unweighted_tower(levels: usize) -> TowerSpec {
    build_tower(&LogLinear::ln_u64(2), 1, &Weight::constant(1), levels, &BuildOptions::default())
        .expect("unweighted tower builds")
}

/// The `w(d) = d^(1/2)` tower.
pub fn sqrt_tower(levels: usize) -> TowerSpec {
    build_tower(&LogLinear::ln_u64(2), 1, &Weight::gamma(1, 2), levels, &BuildOptions::default())
        .expect("sqrt tower builds")
}
