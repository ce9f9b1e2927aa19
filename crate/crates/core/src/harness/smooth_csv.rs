use std::fmt::Write as _;

use super::HarnessError;
use crate::smoothing::SmootherPlan;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothOutput {
    pub values: Vec<f64>,
    pub input_sum: f64,
    pub output_sum: f64,
}

/// One number per line; blank lines are skipped.
pub fn parse_vector_csv(text: &str) -> Result<Vec<f64>, HarnessError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        let v: f64 = field.parse().map_err(|_| HarnessError::Csv {
            line: i + 1,
            message: format!("not a number: {field:?}"),
        })?;
        if !v.is_finite() {
            return Err(HarnessError::Csv {
                line: i + 1,
                message: format!("not finite: {field:?}"),
            });
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(HarnessError::Csv {
            line: 0,
            message: "no values".into(),
        });
    }
    Ok(out)
}

pub fn vector_to_csv(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20);
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    out
}

/// Applies `(Aⁿ_σ)⁻¹` to the vector in `text`, reporting the sums before and after.
pub fn smooth_csv(text: &str, order: usize, sigma: f64) -> Result<SmoothOutput, HarnessError> {
    let g = parse_vector_csv(text)?;
    let plan = SmootherPlan::new(g.len(), order, sigma)?;
    let values = plan.apply_inverse(&g)?;
    Ok(SmoothOutput {
        input_sum: g.iter().sum(),
        output_sum: values.iter().sum(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let out = smooth_csv("1\n0\n0\n0\n", 1, 1.0).unwrap();
        let expect = [7.0 / 15.0, 0.2, 2.0 / 15.0, 0.2];
        assert!(out
            .values
            .iter()
            .zip(expect)
            .all(|(a, b)| (a - b).abs() < 1e-15));
        assert!((out.input_sum - out.output_sum).abs() < 1e-15);
        let c = smooth_csv("2.5\n2.5\n\n2.5\n2.5\n2.5\n", 2, 3.0).unwrap();
        assert!(c.values.iter().all(|v| (v - 2.5).abs() < 1e-14));
        let id = smooth_csv("0.1\n-3\n7\n", 1, 0.0).unwrap();
        assert_eq!(id.values, vec![0.1, -3.0, 7.0]);
        assert_eq!(
            parse_vector_csv(&vector_to_csv(&id.values)).unwrap(),
            id.values
        );
    }

    #[test]
    fn malformed() {
        match smooth_csv("1\nabc\n", 1, 1.0) {
            Err(HarnessError::Csv { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(smooth_csv("", 1, 1.0).is_err());
        assert!(smooth_csv("1\nNaN\n", 1, 1.0).is_err());
    }
}
