use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// `β_K(t)` on a uniform time grid for one `(N, K)` run.
#[derive(Debug, Clone, Serialize)]
pub struct BetaSeries {
    pub label: String,
    pub n: usize,
    pub cutoff: f64,
    pub times: Vec<f64>,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeViolation {
    pub label: String,
    pub t: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GronwallFit {
    /// smallest `C` with `|β'| ≤ C(1+t²)(β + K/N + 1/K)` at every sample
    pub c_fit: f64,
    /// samples where either the differential bound or the integrated
    /// envelope `β(t) ≤ (β(0) + K/N + 1/K) e^{C(1+t)³}` fails
    pub violations: Vec<EnvelopeViolation>,
    /// `(label, t)` where the finite-difference error estimate exceeds 10%
    /// of the bound
    pub coarse: Vec<(String, f64)>,
}

const RELATIVE_SLACK: f64 = 1e-12;

/// Second-order differences, one-sided at the ends, and a first-order
/// estimate whose distance to them serves as the error estimate.
fn derivatives(b: &[f64], h: f64) -> Vec<(f64, f64)> {
    let n = b.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                ((-3.0 * b[0] + 4.0 * b[1] - b[2]) / (2.0 * h), (b[1] - b[0]) / h)
            } else if i == n - 1 {
                (
                    (3.0 * b[i] - 4.0 * b[i - 1] + b[i - 2]) / (2.0 * h),
                    (b[i] - b[i - 1]) / h,
                )
            } else {
                let fwd = (b[i + 1] - b[i]) / h;
                ((b[i + 1] - b[i - 1]) / (2.0 * h), fwd)
            }
        })
        .collect()
}

fn step(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 samples, got {}",
            times.len()
        )));
    }
    let h = times[1] - times[0];
    if !(h > 0.0) {
        return Err(invalid("times", "must increase"));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0) {
            return Err(invalid("times", "grid must be uniform"));
        }
    }
    Ok(h)
}

pub fn fit_gronwall_envelope(series: &[BetaSeries]) -> Result<GronwallFit> {
    let mut samples = Vec::new();
    for s in series {
        if s.times.len() != s.beta.len() {
            return Err(invalid("series", "times and beta differ in length"));
        }
        if s.n == 0 || !(s.cutoff > 0.0) {
            return Err(invalid("series", "need N >= 1 and K > 0"));
        }
        let h = step(&s.times)?;
        let offset = s.cutoff / s.n as f64 + 1.0 / s.cutoff;
        for ((&t, &b), (d2, d1)) in s.times.iter().zip(&s.beta).zip(derivatives(&s.beta, h)) {
            let weight = (1.0 + t * t) * (b + offset);
            samples.push((s, t, b, d2, (d2 - d1).abs(), weight, offset));
        }
    }
    let c_fit = samples
        .iter()
        .map(|x| x.3.abs() / x.5)
        .fold(0.0, f64::max);
    let mut violations = Vec::new();
    let mut coarse = Vec::new();
    for &(s, t, b, d2, err, weight, offset) in &samples {
        let bound = c_fit * weight;
        if d2.abs() > bound * (1.0 + RELATIVE_SLACK) {
            violations.push(EnvelopeViolation {
                label: format!("{}:derivative", s.label),
                t,
                value: d2.abs(),
                bound,
            });
        }
        let envelope = (s.beta[0] + offset) * (c_fit * (1.0 + t).powi(3)).exp();
        if b > envelope * (1.0 + RELATIVE_SLACK) {
            violations.push(EnvelopeViolation {
                label: format!("{}:envelope", s.label),
                t,
                value: b,
                bound: envelope,
            });
        }
        if err > 0.1 * bound && bound > 0.0 {
            coarse.push((s.label.clone(), t));
        }
    }
    Ok(GronwallFit {
        c_fit,
        violations,
        coarse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(beta: impl Fn(f64) -> f64, n: usize) -> BetaSeries {
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        BetaSeries {
            label: "s".into(),
            n: 2,
            cutoff: 1.0,
            beta: times.iter().map(|&t| beta(t)).collect(),
            times,
        }
    }

    #[test]
    fn constant_zero_series_has_zero_constant() {
        let fit = fit_gronwall_envelope(&[series(|_| 0.0, 10)]).unwrap();
        assert_eq!(fit.c_fit, 0.0);
        assert!(fit.violations.is_empty());
    }

    #[test]
    fn quadratic_series_recovers_exact_ratio() {
        // β = t²: second-order differences are exact, ratio 2t/((1+t²)(t²+1.5))
        let fit = fit_gronwall_envelope(&[series(|t| t * t, 40)]).unwrap();
        let exact = (0..=4000)
            .map(|i| {
                let t = i as f64 / 4000.0;
                2.0 * t / ((1.0 + t * t) * (t * t + 1.5))
            })
            .fold(0.0, f64::max);
        assert!((fit.c_fit - exact).abs() < 1e-3 * exact, "{} vs {exact}", fit.c_fit);
        assert!(fit.violations.is_empty());
    }

    #[test]
    fn rejects_short_or_irregular_grids() {
        let mut s = series(|t| t, 1);
        assert!(fit_gronwall_envelope(&[s.clone()]).is_err());
        s = series(|t| t, 4);
        s.times[2] += 0.01;
        assert!(fit_gronwall_envelope(&[s]).is_err());
    }
}
