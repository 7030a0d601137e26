//! Sectors of the `(mu1, mu2)` unfolding plane.
//!
//! Four rays through the origin cut the plane into six sectors, numbered
//! counterclockwise from the positive `mu1` axis:
//!
//! * the Hopf line `mu2 = 0` (rays at angle 0 and pi),
//! * the transcritical line T1 `mu1 = (p12/p22) mu2, mu2 > 0`,
//! * the drift line `mu1 = 0` (rays at pi/2 and 3 pi/2),
//! * the transcritical line T2 `mu2 = (p21/p11) mu1, mu1 < 0`.
//!
//! With positive cubic coefficients the rays are ordered
//! `0 < theta_T1 < pi/2 < pi < theta_T2 < 3 pi/2`, so the sectors are
//!
//! ```text
//! (i)   [0, theta_T1)        (iv)  [pi, theta_T2)
//! (ii)  [theta_T1, pi/2)     (v)   [theta_T2, 3 pi/2)
//! (iii) [pi/2, pi)           (vi)  [3 pi/2, 2 pi)
//! ```
//!
//! Sectors are half-open on the counterclockwise side, so a point exactly
//! on a boundary ray belongs to the counterclockwise-next sector. Points
//! within rounding error of T1 or T2 may land on either side (the angles
//! are computed in floating point); the axes `mu1 = 0+` and `mu2 = 0` are
//! exact because `atan2` is exact on them. The origin belongs to no
//! sector.

use super::params::ReducedParams;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

/// Sector label, counterclockwise from the positive `mu1` axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Region {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Region::I => "(i)",
            Region::II => "(ii)",
            Region::III => "(iii)",
            Region::IV => "(iv)",
            Region::V => "(v)",
            Region::VI => "(vi)",
        };
        f.write_str(name)
    }
}

/// Sector containing `(mu1, mu2)`, or `None` for the origin.
#[must_use]
pub fn region_id(mu1: f64, mu2: f64, p: &ReducedParams) -> Option<Region> {
    if mu1 == 0.0 && mu2 == 0.0 {
        return None;
    }
    let mut theta = mu2.atan2(mu1);
    if theta < 0.0 {
        theta += TAU;
    }
    let bounds = [
        (p.theta_t1(), Region::I),
        (FRAC_PI_2, Region::II),
        (PI, Region::III),
        (p.theta_t2(), Region::IV),
        (1.5 * PI, Region::V),
        (TAU, Region::VI),
    ];
    for (upper, region) in bounds {
        if theta < upper {
            return Some(region);
        }
    }
    // theta == TAU can only appear through rounding of atan2 + TAU; treat
    // it as the positive axis.
    Some(Region::I)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench() -> ReducedParams {
        ReducedParams::benchmark(0.0, 0.0)
    }

    #[test]
    fn published_ray_at_1_8_radians_lies_in_region_iii() {
        let p = bench();
        let r = 1.0e-3;
        let (mu1, mu2) = (r * 1.8f64.cos(), r * 1.8f64.sin());
        assert!(mu1 < 0.0 && mu2 > 0.0, "({mu1}, {mu2})");
        assert_eq!(region_id(mu1, mu2, &p), Some(Region::III));
    }

    #[test]
    fn fourth_quadrant_lies_in_region_vi() {
        let p = bench();
        assert_eq!(region_id(1.0e-6, -1.0e-6, &p), Some(Region::VI));
    }

    #[test]
    fn between_t2_and_the_negative_hopf_axis_lies_region_iv() {
        let p = bench();
        // mu2 = 0.5 * (p21/p11) * mu1 with mu1 < 0: halfway between the
        // negative mu1 axis and T2.
        let mu1 = -1.0e-3;
        let mu2 = 0.5 * p.mu_tilde2();
        assert_eq!(region_id(mu1, mu2, &p), Some(Region::IV));
    }

    #[test]
    fn boundary_rays_belong_to_the_counterclockwise_next_sector() {
        let p = bench();
        // Positive mu1 axis: angle exactly 0 -> sector (i).
        assert_eq!(region_id(2.0e-3, 0.0, &p), Some(Region::I));
        // Positive mu2 axis: angle exactly pi/2 -> sector (iii).
        assert_eq!(region_id(0.0, 2.0e-3, &p), Some(Region::III));
        // Negative mu1 axis: angle exactly pi -> sector (iv).
        assert_eq!(region_id(-2.0e-3, 0.0, &p), Some(Region::IV));
        // T1 by exact power-of-two scaling of its direction (p12, p22).
        let c = 2.0f64.powi(-12);
        assert_eq!(region_id(p.p12 * c, p.p22 * c, &p), Some(Region::II));
    }

    #[test]
    fn origin_belongs_to_no_sector() {
        assert_eq!(region_id(0.0, 0.0, &bench()), None);
    }

    #[test]
    fn interior_points_on_both_sides_of_every_ray_are_separated() {
        let p = bench();
        let eps = 1.0e-2; // angular offset, far beyond rounding
        let cases = [
            (p.theta_t1(), Region::I, Region::II),
            (FRAC_PI_2, Region::II, Region::III),
            (PI, Region::III, Region::IV),
            (p.theta_t2(), Region::IV, Region::V),
            (1.5 * PI, Region::V, Region::VI),
        ];
        for (theta, below, above) in cases {
            let r = 1.0e-3;
            let low = region_id(r * (theta - eps).cos(), r * (theta - eps).sin(), &p);
            let high = region_id(r * (theta + eps).cos(), r * (theta + eps).sin(), &p);
            assert_eq!(low, Some(below), "just below ray at {theta}");
            assert_eq!(high, Some(above), "just above ray at {theta}");
        }
    }
}
