//! Oracle comparison grid shared by the oracle and acceptance tests.

use isophonon::oscillator::{overlap_table, quadrature_overlap_table, GridSpec, OscillatorPair};
use rayon::prelude::*;

pub const GRID_ENERGIES: [f64; 6] = [20.0, 33.0, 100.0, 262.0, 359.0, 400.0];
pub const GRID_DISPLACEMENTS: [f64; 6] = [0.0, 0.001, 0.1, 0.5, 0.734, 1.0];
pub const GRID_N_MAX: usize = 30;

/// Overlaps below this are under the oracle's double-double resolution
/// (absolute noise ~1e-30) and cannot be compared in relative terms.
pub const ORACLE_RESOLUTION: f64 = 1e-20;

pub fn agree(analytic: f64, oracle: f64) -> bool {
    if analytic.abs().max(oracle.abs()) < ORACLE_RESOLUTION {
        (analytic - oracle).abs() <= 1e-28
    } else {
        (analytic - oracle).abs() <= 1e-8 * analytic.abs().max(oracle.abs())
    }
}

/// Every (ħΩ_e, ħΩ_g, ΔQ) combination of the grid.
pub fn grid_cases() -> Vec<(f64, f64, f64)> {
    GRID_ENERGIES
        .iter()
        .flat_map(|&ei| GRID_ENERGIES.iter().map(move |&ef| (ei, ef)))
        .flat_map(|(ei, ef)| GRID_DISPLACEMENTS.iter().map(move |&d| (ei, ef, d)))
        .collect()
}

/// Compares m ∈ {0, 1}, n ≤ 30 over the grid; returns a line per mismatch
/// and the number of values compared.
pub fn grid_mismatches() -> (Vec<String>, usize) {
    let cases = grid_cases();
    let failures = cases
        .par_iter()
        .flat_map_iter(|&(ei, ef, d)| {
            let pair = OscillatorPair::new(ei, ef, d).unwrap();
            let analytic = overlap_table(&pair, GRID_N_MAX).unwrap();
            let oracle =
                quadrature_overlap_table(1, GRID_N_MAX, &pair, &GridSpec::default()).unwrap();
            let mut bad = Vec::new();
            for (m, row) in oracle.iter().enumerate() {
                for (n, &q) in row.iter().enumerate() {
                    let a = analytic.get(m, n);
                    if !agree(a, q) {
                        bad.push(format!(
                            "Ωe={ei} Ωg={ef} ΔQ={d} m={m} n={n}: {a:e} vs {q:e}"
                        ));
                    }
                }
            }
            bad
        })
        .collect();
    (failures, cases.len() * 2 * (GRID_N_MAX + 1))
}
