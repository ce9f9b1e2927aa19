use std::fmt::Write as _;

use super::HarnessError;
use crate::problems::{hopf_lax_envelope_from, EnvelopeQuery, NormSin, Problem, ProblemError};

#[derive(Debug, Clone, PartialEq)]
pub struct SliceRow {
    pub radius: f64,
    pub t: f64,
    pub u: f64,
    pub converged: bool,
}

/// Envelope of [`NormSin`] in `dim` dimensions along `w = r·e₁`.
///
/// For each radius the times are visited in ascending order and each inner
/// solve is warm-started at the previous minimizer, so `u` cannot increase
/// with `t`. Inner failures are kept as rows with `converged = false`, valued
/// at the best iterate.
pub fn envelope_slice(
    dim: usize,
    t_values: &[f64],
    sigma: f64,
    radii: &[f64],
) -> Result<Vec<SliceRow>, HarnessError> {
    let f = NormSin::new(dim)?;
    let mut times = t_values.to_vec();
    times.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(times.len() * radii.len());
    for &r in radii {
        let mut w = vec![0.0; dim];
        w[0] = r;
        let mut start = w.clone();
        for &t in &times {
            let query = EnvelopeQuery::new(t, sigma);
            match hopf_lax_envelope_from(&f, &w, &query, &start) {
                Ok(res) => {
                    rows.push(SliceRow {
                        radius: r,
                        t,
                        u: res.value,
                        converged: true,
                    });
                    start = res.argmin;
                }
                Err(ProblemError::NonConvergence { best, .. }) => {
                    let u = envelope_objective(&f, &w, &best, t, sigma)?;
                    rows.push(SliceRow {
                        radius: r,
                        t,
                        u,
                        converged: false,
                    });
                    start = best;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(rows)
}

fn envelope_objective(
    f: &NormSin,
    w: &[f64],
    v: &[f64],
    t: f64,
    sigma: f64,
) -> Result<f64, HarnessError> {
    let plan = crate::smoothing::SmootherPlan::new(w.len(), 1, sigma)?;
    let d: Vec<f64> = v.iter().zip(w).map(|(a, b)| a - b).collect();
    let ad = plan.apply_forward(&d)?;
    Ok(f.value(v) + d.iter().zip(&ad).map(|(a, b)| a * b).sum::<f64>() / (2.0 * t))
}

pub fn slice_to_csv(rows: &[SliceRow]) -> String {
    let mut out = String::from("radius,t,u,converged\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.radius, r.t, r.u, r.converged);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_shape() {
        let radii: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let rows = envelope_slice(5, &[1.0, 1e-6, 0.1], 1.0, &radii).unwrap();
        assert_eq!(rows.len(), 63);
        for chunk in rows.chunks(3) {
            assert!(chunk[0].t < chunk[1].t && chunk[1].t < chunk[2].t);
            let f = NormSin::radial(chunk[0].radius);
            assert!((chunk[0].u - f).abs() < 1e-3);
            assert!(chunk[1].u <= chunk[0].u && chunk[2].u <= chunk[1].u);
        }
        assert!(rows.iter().filter(|r| r.radius == 0.0).all(|r| r.u == 0.0));
        assert!(slice_to_csv(&rows[..1]).starts_with("radius,t,u,converged\n0,0.000001,0,true"));
    }
}
