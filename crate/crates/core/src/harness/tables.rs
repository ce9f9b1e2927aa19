use std::fmt::Write as _;

use super::HarnessError;
use crate::theory::{compute_beta, variance_ratio_bound};

fn header(first: &str, sigmas: &[f64]) -> String {
    let mut h = first.to_string();
    for s in sigmas {
        let _ = write!(h, ",sigma={s}");
    }
    h.push('\n');
    h
}

/// β for each `m` (rows) and `σ` (columns).
pub fn beta_table(sigmas: &[f64], ms: &[usize]) -> Result<String, HarnessError> {
    let mut out = header("m", sigmas);
    for &m in ms {
        let _ = write!(out, "{m}");
        for &s in sigmas {
            let _ = write!(out, ",{}", compute_beta(s, m)?.beta_closed);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Variance-reduction bound for each order `n` (rows) and `σ` (columns).
pub fn var_bound_table(
    orders: &[usize],
    sigmas: &[f64],
    m: usize,
    kappa: f64,
) -> Result<String, HarnessError> {
    let mut out = header("n", sigmas);
    for &n in orders {
        let _ = write!(out, "{n}");
        for &s in sigmas {
            let _ = write!(out, ",{}", variance_ratio_bound(n, s, m, kappa)?.bound);
        }
        out.push('\n');
    }
    Ok(out)
}
