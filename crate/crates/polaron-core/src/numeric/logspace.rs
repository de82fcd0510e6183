//! Log-domain arithmetic for semigroup matrix elements.
//!
//! Quantities of the form <v, e^{-tH} w> span hundreds of orders of magnitude
//! over a scaling ladder; they are carried as (ln|x|, sign) pairs and only
//! exponentiated after ratios are formed.

/// ln Σ e^{x_i}, stable against overflow; -inf for an empty slice.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|x| (x - m).exp()).sum();
    m + s.ln()
}

/// A signed value stored as ln|x| and sign(x). sign = 0 encodes exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogVal {
    pub ln_abs: f64,
    pub sign: i8,
}

impl LogVal {
    pub const ZERO: LogVal = LogVal {
        ln_abs: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn from_value(v: f64) -> LogVal {
        if v == 0.0 {
            LogVal::ZERO
        } else {
            LogVal {
                ln_abs: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    /// (ln_scale, v) representing v·e^{ln_scale}.
    pub fn from_scaled(ln_scale: f64, v: f64) -> LogVal {
        if v == 0.0 {
            LogVal::ZERO
        } else {
            LogVal {
                ln_abs: ln_scale + v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn mul(self, rhs: LogVal) -> LogVal {
        if self.sign == 0 || rhs.sign == 0 {
            return LogVal::ZERO;
        }
        LogVal {
            ln_abs: self.ln_abs + rhs.ln_abs,
            sign: self.sign * rhs.sign,
        }
    }

    pub fn div(self, rhs: LogVal) -> LogVal {
        assert!(rhs.sign != 0, "division by exact zero");
        if self.sign == 0 {
            return LogVal::ZERO;
        }
        LogVal {
            ln_abs: self.ln_abs - rhs.ln_abs,
            sign: self.sign * rhs.sign,
        }
    }

    /// Signed sum of log-valued terms (stable two-bucket logsumexp).
    pub fn sum(terms: &[LogVal]) -> LogVal {
        let pos: Vec<f64> = terms
            .iter()
            .filter(|t| t.sign > 0)
            .map(|t| t.ln_abs)
            .collect();
        let neg: Vec<f64> = terms
            .iter()
            .filter(|t| t.sign < 0)
            .map(|t| t.ln_abs)
            .collect();
        let lp = logsumexp(&pos);
        let ln = logsumexp(&neg);
        if lp == f64::NEG_INFINITY && ln == f64::NEG_INFINITY {
            return LogVal::ZERO;
        }
        if ln == f64::NEG_INFINITY {
            return LogVal { ln_abs: lp, sign: 1 };
        }
        if lp == f64::NEG_INFINITY {
            return LogVal {
                ln_abs: ln,
                sign: -1,
            };
        }
        let (hi, lo, sign) = if lp >= ln { (lp, ln, 1) } else { (ln, lp, -1) };
        let diff = 1.0 - (lo - hi).exp();
        if diff <= 0.0 {
            return LogVal::ZERO;
        }
        LogVal {
            ln_abs: hi + diff.ln(),
            sign,
        }
    }

    pub fn value(self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }
}
