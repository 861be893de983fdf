//! Fixtures shared by the benchmarks.

use bandkh::morse::{random_diagram, MorseOptions};
use bandkh::{Diagram, SurfaceModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn catalogue() -> Vec<SurfaceModel> {
    vec![
        SurfaceModel::disk(),
        SurfaceModel::annulus(),
        SurfaceModel::planar_holes(2).unwrap(),
        SurfaceModel::orientable(1, 1).unwrap(),
        SurfaceModel::moebius_band(),
    ]
}

/// A seeded diagram on `surface` with exactly `crossings` crossings.
pub fn diagram_with(surface: &SurfaceModel, crossings: usize, seed: u64) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = MorseOptions { max_crossings: crossings, ..Default::default() };
    loop {
        let d = random_diagram(surface, &opts, &mut rng).diagram;
        if d.crossing_count() == crossings {
            return d;
        }
    }
}
