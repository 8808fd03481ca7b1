//! Reference runs on the unit square: the nine `(α, δ)` pairs with published
//! energy ratios, and the `δ`-halving sequence at `ᾱ`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::energy_model::{Alpha, ALPHA_BAR};
use crate::error::Result;
use crate::geometry::ConvexPolygon;
use crate::lloyd_solver::{best_of, Init, SolveResult, SolverConfig};
use crate::quantization::rescale_volume;

/// `(α, δ, published ratio)`
pub const TABLE1: [(f64, f64, f64); 9] = [
    (0.1, 0.0022433361900, 1.025664680453751),
    (0.1, 0.0001302910000, 1.012634927464421),
    (0.1, 7.5672376050508e-6, 1.00616678974522),
    (ALPHA_BAR, 0.0147231527000, 1.015173622346968),
    (ALPHA_BAR, 0.0017628730000, 1.007372522192174),
    (ALPHA_BAR, 2.1107719443098e-4, 1.003575800389361),
    (0.9, 0.1273904500000, 1.004506412114665),
    (0.9, 0.0245228180000, 1.002133746895388),
    (0.9, 0.004720672550584, 1.001028468127525),
];

/// Standard deviation of the lattice jitter, in units of the rescaled
/// (unit cell area) frame.
pub const LATTICE_SIGMA: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub alpha: f64,
    pub delta: f64,
    pub computed_ratio: f64,
    pub paper_ratio: Option<f64>,
    pub n_final: usize,
    pub runtime_ms: u64,
}

/// Start configurations for one `(α, δ)`: even slots are jittered lattices,
/// odd slots are uniform random with `N` cycling through `round(V) − 1`,
/// `round(V)`, `round(V) + 1`.
pub fn mixed_starts(alpha: Alpha, delta: f64, starts: usize, seed: u64) -> Vec<SolverConfig> {
    let v = rescale_volume(alpha, delta);
    let base = v.round().max(1.0) as usize;
    (0..starts)
        .map(|k| {
            let init = if k % 2 == 0 {
                Init::LatticePerturbed { sigma: LATTICE_SIGMA }
            } else {
                let n = match (k / 2) % 3 {
                    0 => base,
                    1 => base.saturating_sub(1).max(1),
                    _ => base + 1,
                };
                Init::RandomUniform { n }
            };
            SolverConfig { seed: seed.wrapping_add(k as u64), ..SolverConfig::new(alpha, delta, init) }
        })
        .collect()
}

/// Best of `starts` mixed runs on the unit square.
pub fn best_unit_square(alpha: Alpha, delta: f64, starts: usize, seed: u64) -> Result<SolveResult> {
    best_of(&mixed_starts(alpha, delta, starts, seed), &ConvexPolygon::unit_square())
}

pub fn run_table1_row(alpha: f64, delta: f64, paper_ratio: Option<f64>, starts: usize, seed: u64) -> Result<(Table1Row, SolveResult)> {
    let clock = Instant::now();
    let best = best_unit_square(Alpha::new(alpha)?, delta, starts, seed)?;
    let row = Table1Row {
        alpha,
        delta,
        computed_ratio: best.energy.rescaled_ratio,
        paper_ratio,
        n_final: best.n_final(),
        runtime_ms: clock.elapsed().as_millis() as u64,
    };
    Ok((row, best))
}

pub fn run_table1(starts: usize, seed: u64) -> Result<Vec<(Table1Row, SolveResult)>> {
    TABLE1
        .iter()
        .map(|&(a, d, r)| run_table1_row(a, d, Some(r), starts, seed))
        .collect()
}

/// `δ₀, δ₀/2, …, δ₀/2^halvings`
pub fn halving_sequence(delta0: f64, halvings: usize) -> Vec<f64> {
    (0..=halvings).map(|k| delta0 / 2f64.powi(k as i32)).collect()
}
