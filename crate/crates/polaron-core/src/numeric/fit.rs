//! Small weighted least-squares fits.

/// Weighted straight-line fit y = slope·x + intercept.
///
/// Weights are inverse variances. Returns (slope, intercept, var(slope),
/// var(intercept), chi² per degree of freedom; NaN when dof = 0).
pub fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), w.len());
    assert!(x.len() >= 2);
    let sw: f64 = w.iter().sum();
    let swx: f64 = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum();
    let swy: f64 = w.iter().zip(y).map(|(wi, yi)| wi * yi).sum();
    let swxx: f64 = w.iter().zip(x).map(|(wi, xi)| wi * xi * xi).sum();
    let swxy: f64 = w
        .iter()
        .zip(x)
        .zip(y)
        .map(|((wi, xi), yi)| wi * xi * yi)
        .sum();
    let det = sw * swxx - swx * swx;
    let slope = (sw * swxy - swx * swy) / det;
    let intercept = (swxx * swy - swx * swxy) / det;
    let var_slope = sw / det;
    let var_intercept = swxx / det;
    let dof = x.len() as f64 - 2.0;
    let chi2: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((xi, yi), wi)| wi * (yi - slope * xi - intercept).powi(2))
        .sum();
    let chi2_red = if dof > 0.0 { chi2 / dof } else { f64::NAN };
    (slope, intercept, var_slope, var_intercept, chi2_red)
}

/// Unweighted proportional fit y = c·x; returns (c, max relative residual).
///
/// The residual is measured against max|y| so that a flat y ≈ 0 input does
/// not inflate it.
pub fn proportional(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let c = sxy / sxx;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let resid = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - c * a).abs())
        .fold(0.0f64, f64::max)
        / scale;
    (c, resid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn line_fit_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 0.75).collect();
        let w = [1.0; 4];
        let (s, b, _, _, chi2) = weighted_line(&x, &y, &w);
        assert_abs_diff_eq!(s, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b, -0.75, epsilon = 1e-12);
        assert!(chi2 < 1e-20);
    }

    #[test]
    fn proportional_fit_flags_curvature() {
        let x = [1.0, 4.0, 9.0];
        let y = [1.0, 4.0, 9.5];
        let (_, resid) = proportional(&x, &y);
        assert!(resid > 1e-3);
    }
}
