use alloc::vec::Vec;

/// Outcome of comparing an analytic gradient against central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    /// Coordinate with the largest relative error.
    pub worst_coordinate: Option<usize>,
    pub checked: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Gradients smaller than this in sum are treated as agreeing (0/0 case).
const NEGLIGIBLE: f64 = 1e-12;

/// `|a − n| / (|a| + |n|)`, or 0 when both are negligible.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let denom = analytic.abs() + numeric.abs();
    if denom < NEGLIGIBLE {
        0.0
    } else {
        (analytic - numeric).abs() / denom
    }
}

/// Checks `loss_and_grad` at `params` on the given coordinates using
/// `(f(θ + h·eᵢ) − f(θ − h·eᵢ)) / 2h`.
pub fn grad_check<F>(
    mut loss_and_grad: F,
    params: &[f64],
    coordinates: &[usize],
    h: f64,
    tolerance: f64,
) -> GradCheckReport
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let (_, analytic) = loss_and_grad(params);
    let mut theta = params.to_vec();
    let mut worst = None;
    let mut max_err = 0.0f64;
    for &i in coordinates {
        let original = theta[i];
        theta[i] = original + h;
        let plus = loss_and_grad(&theta).0;
        theta[i] = original - h;
        let minus = loss_and_grad(&theta).0;
        theta[i] = original;
        let numeric = (plus - minus) / (2.0 * h);
        let err = relative_error(analytic[i], numeric);
        if worst.is_none() || err > max_err {
            max_err = err;
            worst = Some(i);
        }
    }
    GradCheckReport {
        max_relative_error: max_err,
        worst_coordinate: worst,
        checked: coordinates.len(),
        tolerance,
        passed: max_err <= tolerance,
    }
}
