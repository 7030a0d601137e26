//! Least-squares helpers: straight-line fits and the log-linear exponential
//! tail fit used to measure pulse decay rates and tail amplitudes.

use super::NumericsError;

/// Result of fitting `y = intercept + slope * x` by least squares.
#[derive(Clone, Copy, Debug)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 means a perfect line.
    pub r2: f64,
}

/// Ordinary least squares for a line through `(x, y)` samples.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit, NumericsError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(NumericsError::DimensionMismatch {
            what: format!("line fit needs >= 2 paired samples, got {} and {}", x.len(), y.len()),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx < 1e-300 {
        return Err(NumericsError::DimensionMismatch {
            what: "degenerate abscissae in line fit".to_string(),
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy < 1e-300 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(LineFit { slope, intercept, r2 })
}

/// Exponential tail fit `f(x) ~ amplitude * exp(-rate * x)` obtained from a
/// log-linear fit of `|f - offset|`. The sign of the tail is reported
/// separately so signed amplitudes survive the log.
#[derive(Clone, Copy, Debug)]
pub struct ExpTailFit {
    /// Decay rate (positive for a decaying tail).
    pub rate: f64,
    /// Signed prefactor: `f(x) - offset ~ amplitude * exp(-rate * x)`.
    pub amplitude: f64,
    pub r2: f64,
    /// Number of samples that survived the magnitude floor.
    pub n_used: usize,
}

/// Fit a decaying exponential to `f - offset` over the samples `(x, f)`.
/// Samples with `|f - offset|` below `floor` are discarded (they are noise
/// or have crossed into roundoff).
pub fn fit_exp_tail(
    x: &[f64],
    f: &[f64],
    offset: f64,
    floor: f64,
) -> Result<ExpTailFit, NumericsError> {
    let mut xs = Vec::with_capacity(x.len());
    let mut logs = Vec::with_capacity(x.len());
    let mut signs = 0i64;
    for (&xi, &fi) in x.iter().zip(f) {
        let d = fi - offset;
        if d.abs() > floor {
            xs.push(xi);
            logs.push(d.abs().ln());
            signs += if d > 0.0 { 1 } else { -1 };
        }
    }
    if xs.len() < 4 {
        return Err(NumericsError::DimensionMismatch {
            what: format!(
                "exponential tail fit needs >= 4 usable samples above floor {floor:.3e}, got {}",
                xs.len()
            ),
        });
    }
    let line = linear_fit(&xs, &logs)?;
    let sign = if signs >= 0 { 1.0 } else { -1.0 };
    Ok(ExpTailFit {
        rate: -line.slope,
        amplitude: sign * line.intercept.exp(),
        r2: line.r2,
        n_used: xs.len(),
    })
}

/// Fit only the amplitude of `f - offset ~ amplitude * exp(-rate * x)` with
/// the rate held fixed (used to extract tail prefactors of several fields
/// at one shared decay rate). Least squares in log space reduces to the
/// mean of `log|f - offset| + rate * x`.
pub fn fit_exp_amplitude_fixed_rate(
    x: &[f64],
    f: &[f64],
    offset: f64,
    rate: f64,
    floor: f64,
) -> Result<f64, NumericsError> {
    let mut acc = 0.0;
    let mut count = 0usize;
    let mut signs = 0i64;
    for (&xi, &fi) in x.iter().zip(f) {
        let d = fi - offset;
        if d.abs() > floor {
            acc += d.abs().ln() + rate * xi;
            count += 1;
            signs += if d > 0.0 { 1 } else { -1 };
        }
    }
    if count < 4 {
        return Err(NumericsError::DimensionMismatch {
            what: format!("amplitude fit needs >= 4 usable samples, got {count}"),
        });
    }
    let sign = if signs >= 0 { 1.0 } else { -1.0 };
    Ok(sign * (acc / count as f64).exp())
}
