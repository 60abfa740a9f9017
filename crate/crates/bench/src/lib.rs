//! Fixtures shared by the benchmarks in `benches/`.

use hgrowth::{Cell, PointSet, YoungDiagram};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bernoulli(`density`) points in an `n × m` box, reproducible from `seed`.
pub fn random_points(n: usize, m: usize, density: f64, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..n)
        .flat_map(|u| (0..m).map(move |v| Cell::new(u, v)))
        .filter(|_| rng.random_bool(density))
        .collect();
    PointSet::new(n, m, cells).expect("cells lie in the box")
}

/// `k` distinct random points in an `n × m` box.
pub fn random_subset(n: usize, m: usize, k: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: Vec<Cell> = (0..n).flat_map(|u| (0..m).map(move |v| Cell::new(u, v))).collect();
    let k = k.min(cells.len());
    for i in 0..k {
        let j = rng.random_range(i..cells.len());
        cells.swap(i, j);
    }
    cells.truncate(k);
    PointSet::new(n, m, cells).expect("cells lie in the box")
}

/// Zero-sets used across the benchmarks, smallest first.
pub fn zero_sets() -> Vec<(&'static str, YoungDiagram)> {
    vec![
        ("T2", YoungDiagram::triangle(2)),
        ("R22", YoungDiagram::rectangle(2, 2)),
        ("T3", YoungDiagram::triangle(3)),
        ("T4", YoungDiagram::triangle(4)),
    ]
}
