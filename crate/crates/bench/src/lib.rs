//! Shared inputs for the criterion benchmarks.

use exclusion_bounds::applications::{symmetric_partition, PartitionSpec, TrapPotential};
use exclusion_bounds::DensityProfile;

/// Smooth multi-bump profile on [0, 1] with `cells` cells and total mass `mass`.
pub fn bumpy_density(cells: usize, mass: f64) -> DensityProfile {
    let raw: Vec<f64> = (0..cells)
        .map(|i| {
            let x = (i as f64 + 0.5) / cells as f64;
            let s = (7.0 * std::f64::consts::PI * x).sin();
            s * s * (1.0 + 3.0 * x) + 0.05
        })
        .collect();
    let total: f64 = raw.iter().sum::<f64>() / cells as f64;
    DensityProfile::new(0.0, 1.0, raw.iter().map(|v| v * mass / total).collect()).expect("valid profile")
}

/// Symmetric harmonic-trap partition with `per_side` intervals on each side.
pub fn harmonic_partition(per_side: usize, n: u64) -> PartitionSpec {
    symmetric_partition(&TrapPotential::Harmonic { omega: 1.0 }, 0.5, per_side, 2.0, n).expect("valid partition")
}
