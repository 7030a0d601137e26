//! Scratch pipeline probe (not part of the deliverable; removed before commit).

use wiia::grid::Grid1;
use wiia::models::Fhn3;
use wiia::pulse::{
    continue_branch, detect_bifurcations, locate_dh_point, profile_from_solution,
    standing_pulse_from_bump, ContinuationOptions,
};

#[test]
#[ignore]
fn probe_drift_crossing_and_dh() {
    let grid = Grid1::periodic(0.25, 500);
    let tau = 1200.0;
    let fam = move |k4: f64| Fhn3::baseline(k4, tau);
    let start = standing_pulse_from_bump(&fam(3.0), &grid, 0.125, 2.0, 0.02).expect("pulse");

    let t0 = std::time::Instant::now();
    let opts = ContinuationOptions {
        ds0: 5e-3,
        ds_max: 1e-2,
        ..ContinuationOptions::default()
    };
    let branch = continue_branch(&fam, &start, 3.0, (3.0, 2.95), &opts).expect("branch");
    println!("branch: {} points in {:?}", branch.points.len(), t0.elapsed());
    for pt in &branch.points {
        println!(
            "  k4 {:.5}  amp {:.3}  lT {:?}  ldrift {:?} (odd {:?})  lhopf {:?}",
            pt.param,
            pt.amplitude,
            pt.lambda_translation.map(|l| l.re),
            pt.lambda_drift.map(|l| l.re),
            pt.drift_odd,
            pt.lambda_hopf,
        );
    }

    let t0 = std::time::Instant::now();
    let bifs = detect_bifurcations(&fam, &branch, 0.19);
    println!("bifurcations in {:?}:", t0.elapsed());
    for b in &bifs {
        println!(
            "  {:?} at k4 = {:.6} (lambda = {}, odd {:?}, achieved {:.2e})",
            b.kind, b.param, b.lambda, b.mode_odd, b.achieved
        );
    }

    let t0 = std::time::Instant::now();
    let warm = branch
        .points
        .iter()
        .min_by(|a, b| {
            (a.param - 2.97)
                .abs()
                .total_cmp(&(b.param - 2.97).abs())
        })
        .expect("nonempty branch");
    let seedp = profile_from_solution(
        &Fhn3::baseline(warm.param, tau),
        &grid,
        warm.state.clone(),
        0.0,
    )
    .expect("seed profile");
    let fam2 = |k4: f64, t: f64| Fhn3::baseline(k4, t);
    match locate_dh_point(
        &fam2,
        &seedp,
        (warm.param, tau),
        ((2.90, 3.05), (1100.0, 1350.0)),
        0.19,
    ) {
        Ok(dh) => println!(
            "DH at (k4, tau) = ({:.5}, {:.2})  omega = {:.4}  rates ({:.2e}, {:.2e})  evals {} in {:?}",
            dh.params.0,
            dh.params.1,
            dh.omega,
            dh.drift_rate,
            dh.oscillatory_rate,
            dh.evaluations,
            t0.elapsed()
        ),
        Err(e) => println!("DH search failed: {e}"),
    }
}
