//! Fixed inputs shared by the benchmarks.

use projconvex::catalog::{load_example, CatalogEntry};
use projconvex::{ConvexBody, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn example(name: &str) -> CatalogEntry {
    load_example(name).expect("catalog example")
}

/// `n` interior chart points, reproducible.
pub fn interior_points(body: &ConvexBody, n: usize) -> Vec<Vector> {
    body.sample_interior(&mut ChaCha8Rng::seed_from_u64(7), n)
}
