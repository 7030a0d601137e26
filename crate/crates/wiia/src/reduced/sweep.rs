//! Phase-diagram sweeps of the reduced collision model.
//!
//! Two samplers cover the `(mu1, mu2)` parameter plane near the organizing
//! center:
//!
//! * [`sweep_ring`] walks a polar ring of fixed radius.  Cells are *centered*
//!   between the ring's equal-angle grid lines (`theta_k = 2*pi*(k+1/2)/n`) so
//!   that no sample lands exactly on a sector-boundary ray, where one of the
//!   linear rates vanishes and the orbit converges to nothing in particular.
//! * [`sweep_grid`] samples a rectangular grid, row-major in the first
//!   coordinate.
//!
//! Every cell runs the standard classification protocol
//! ([`classify`](super::classify::classify)) independently, so the sweep is
//! embarrassingly parallel: with the `parallel` feature the cells are
//! dispatched through rayon, and the sequential fallback produces bitwise
//! identical results (the per-cell work is untouched; only the scheduling
//! changes).
//!
//! [`ring_sector_runs`] compresses a classified ring into its run-length
//! sector summary, merging the seam at `theta = 0` so a sector that straddles
//! the positive `mu1` axis counts once.

use crate::numerics::NumericsError;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::classify::{classify, Outcome};
use super::params::ReducedParams;
use super::regions::{region_id, Region};

/// Largest admissible distance from the organizing center: beyond this the
/// cubic truncation behind the reduced model is no longer trustworthy.
pub const MAX_SWEEP_RADIUS: f64 = 0.01;

/// One classified cell of a polar-ring sweep.
#[derive(Clone, Copy, Debug)]
pub struct RingCell {
    /// Angular position of the cell center, in `[0, 2*pi)`.
    pub theta: f64,
    /// First unfolding coordinate at the cell center.
    pub mu1: f64,
    /// Second unfolding coordinate at the cell center.
    pub mu2: f64,
    /// Collision outcome of the standard protocol at this cell.
    pub outcome: Outcome,
    /// Linear-analysis sector the cell center falls in.
    pub region: Option<Region>,
}

/// One maximal arc of equal outcomes on a classified ring.
#[derive(Clone, Copy, Debug)]
pub struct SectorRun {
    /// The shared outcome of the arc.
    pub outcome: Outcome,
    /// Index (into the ring's cell vector) of the arc's first cell; for an
    /// arc merged across the seam this is the index of its first cell *before*
    /// `theta = 2*pi`.
    pub start: usize,
    /// Number of cells in the arc.
    pub len: usize,
    /// Cell-center angle where the arc begins.
    pub theta_start: f64,
    /// Cell-center angle where the arc ends (less than `theta_start` for an
    /// arc merged across the seam).
    pub theta_end: f64,
}

/// Rectangular-grid sweep result; `outcomes` is row-major over
/// (`mu1` index, `mu2` index).
#[derive(Clone, Debug)]
pub struct PhaseDiagram {
    /// Grid values of the first unfolding coordinate.
    pub mu1: Vec<f64>,
    /// Grid values of the second unfolding coordinate.
    pub mu2: Vec<f64>,
    /// Outcome per cell, row-major: `outcomes[i * mu2.len() + j]` pairs
    /// `mu1[i]` with `mu2[j]`.
    pub outcomes: Vec<Outcome>,
}

impl PhaseDiagram {
    /// Outcome at (`mu1[i]`, `mu2[j]`).
    pub fn outcome(&self, i: usize, j: usize) -> Outcome {
        self.outcomes[i * self.mu2.len() + j]
    }
}

fn classify_cells(
    base: &ReducedParams,
    mu: &[(f64, f64)],
) -> Result<Vec<Outcome>, NumericsError> {
    let run_one = |&(m1, m2): &(f64, f64)| -> Result<Outcome, NumericsError> {
        Ok(classify(&base.with_mu(m1, m2))?.outcome)
    };
    #[cfg(feature = "parallel")]
    {
        mu.par_iter().map(run_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        mu.iter().map(run_one).collect()
    }
}

/// Classify every cell of a polar ring of radius `radius` with `n`
/// equal-width cells, centered at `theta_k = 2*pi*(k + 1/2)/n`.
///
/// # Panics
///
/// If `n == 0`, or `radius` is outside `(0, MAX_SWEEP_RADIUS]`.
pub fn sweep_ring(
    base: &ReducedParams,
    radius: f64,
    n: usize,
) -> Result<Vec<RingCell>, NumericsError> {
    assert!(n > 0, "ring must have at least one cell");
    assert!(
        radius > 0.0 && radius <= MAX_SWEEP_RADIUS,
        "ring radius {radius} outside the validity range (0, {MAX_SWEEP_RADIUS}]"
    );
    let thetas: Vec<f64> = (0..n)
        .map(|k| std::f64::consts::TAU * (k as f64 + 0.5) / n as f64)
        .collect();
    let mu: Vec<(f64, f64)> = thetas
        .iter()
        .map(|&th| (radius * th.cos(), radius * th.sin()))
        .collect();
    let outcomes = classify_cells(base, &mu)?;
    Ok(thetas
        .iter()
        .zip(&mu)
        .zip(&outcomes)
        .map(|((&theta, &(m1, m2)), &outcome)| RingCell {
            theta,
            mu1: m1,
            mu2: m2,
            outcome,
            region: region_id(m1, m2, base),
        })
        .collect())
}

/// Classify every cell of the rectangular grid
/// `mu1_values x mu2_values`.
///
/// # Panics
///
/// If either axis is empty or contains a value larger than
/// `MAX_SWEEP_RADIUS` in magnitude.
pub fn sweep_grid(
    base: &ReducedParams,
    mu1_values: &[f64],
    mu2_values: &[f64],
) -> Result<PhaseDiagram, NumericsError> {
    assert!(!mu1_values.is_empty() && !mu2_values.is_empty());
    for &m in mu1_values.iter().chain(mu2_values) {
        assert!(
            m.abs() <= MAX_SWEEP_RADIUS,
            "grid value {m} outside the validity range"
        );
    }
    let mu: Vec<(f64, f64)> = mu1_values
        .iter()
        .flat_map(|&m1| mu2_values.iter().map(move |&m2| (m1, m2)))
        .collect();
    let outcomes = classify_cells(base, &mu)?;
    Ok(PhaseDiagram {
        mu1: mu1_values.to_vec(),
        mu2: mu2_values.to_vec(),
        outcomes,
    })
}

/// Compress a classified ring into its maximal equal-outcome arcs, in
/// circular order starting from the first cell, with the seam at
/// `theta = 0` merged (a last arc matching the first arc's outcome is
/// folded into it).
pub fn ring_sector_runs(cells: &[RingCell]) -> Vec<SectorRun> {
    let mut runs: Vec<SectorRun> = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        match runs.last_mut() {
            Some(run) if run.outcome == cell.outcome => {
                run.len += 1;
                run.theta_end = cell.theta;
            }
            _ => runs.push(SectorRun {
                outcome: cell.outcome,
                start: i,
                len: 1,
                theta_start: cell.theta,
                theta_end: cell.theta,
            }),
        }
    }
    if runs.len() >= 2 {
        let first = runs[0];
        let last = *runs.last().unwrap();
        if first.outcome == last.outcome {
            runs[0].start = last.start;
            runs[0].theta_start = last.theta_start;
            runs[0].len += last.len;
            runs.pop();
        }
    }
    runs
}
