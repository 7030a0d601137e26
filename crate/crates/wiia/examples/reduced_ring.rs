//! End-to-end drive of the reduced pulse-interaction model: classify the
//! four benchmark quadrants, sweep a parameter ring, and locate the
//! annihilation/preservation separator on a vertical slice.
//!
//! Run with `cargo run --example reduced_ring [--release]`.

use wiia::reduced::{
    find_mu2_critical, ring_sector_runs, sweep_ring, ReducedParams,
};

fn main() {
    let base = ReducedParams::benchmark(0.0, 0.0);
    let radius = 1e-3;

    println!("ring sweep at |mu| = {radius} (64 cells):");
    let cells = sweep_ring(&base, radius, 64).expect("ring sweep");
    for run in ring_sector_runs(&cells) {
        println!(
            "  {:<13} theta in [{:.4}, {:.4}]  ({} cells)",
            run.outcome.to_string(),
            run.theta_start,
            run.theta_end,
            run.len
        );
    }

    let mu1 = -1e-3;
    let tilde = base.with_mu(mu1, 0.0).mu_tilde2();
    println!("\nseparator on the slice mu1 = {mu1}:");
    let sep = find_mu2_critical(&base, mu1, tilde, 1e-3).expect("separator");
    println!(
        "  mu2_critical = {:.9e}  ({} bisections)",
        sep.mu2_critical, sep.n_bisections
    );
    println!(
        "  closest approach to the saddle ({:.4}, {:.4}): {:.3e}",
        sep.saddle[0], sep.saddle[1], sep.closest_approach
    );
}
