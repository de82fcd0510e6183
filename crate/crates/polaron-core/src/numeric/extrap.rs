//! Sequence extrapolation: Richardson tables and Aitken Δ².

/// Richardson extrapolation for a quantity with an h² error expansion,
/// sampled at h, h/2, h/4, ... (vals[j] belongs to h/2^j).
///
/// Returns the extrapolated value and an error estimate (difference of the
/// last two table entries along the diagonal).
pub fn richardson_h2(vals: &[f64]) -> (f64, f64) {
    assert!(!vals.is_empty());
    let mut col: Vec<f64> = vals.to_vec();
    let mut best = *col.last().unwrap();
    let mut prev_best = best;
    for j in 1..vals.len() {
        let factor = 4.0f64.powi(j as i32);
        for i in 0..vals.len() - j {
            col[i] = (factor * col[i + 1] - col[i]) / (factor - 1.0);
        }
        col.truncate(vals.len() - j);
        // The most accurate entry combines the finest steps: the last one.
        prev_best = best;
        best = *col.last().unwrap();
    }
    let err = if vals.len() > 1 {
        (best - prev_best).abs()
    } else {
        f64::NAN
    };
    (best, err)
}

/// Aitken Δ² applied to the tail of a sequence; returns the accelerated
/// limit estimate, or the last element when the transform is unstable.
pub fn aitken_limit(seq: &[f64]) -> f64 {
    let n = seq.len();
    if n < 3 {
        return *seq.last().expect("non-empty sequence");
    }
    let (a0, a1, a2) = (seq[n - 3], seq[n - 2], seq[n - 1]);
    let d1 = a1 - a0;
    let d2 = a2 - a1;
    let dd = d2 - d1;
    if dd.abs() <= 1e-3 * f64::EPSILON * (a2.abs() + 1.0) {
        return a2;
    }
    a2 - d2 * d2 / dd
}

/// Successive-difference ratios |Δ_{i+1}/Δ_i| of a sequence; empty when fewer
/// than three elements. Used for convergence-order diagnostics.
pub fn difference_ratios(seq: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for w in seq.windows(3) {
        let d1 = w[1] - w[0];
        let d2 = w[2] - w[1];
        if d1.abs() > 0.0 {
            out.push((d2 / d1).abs());
        }
    }
    out
}
