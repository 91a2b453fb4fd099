use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::{invalid_arg, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub dof: f64,
    /// Two-sided.
    pub p_value: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Welch's unequal-variance t-test with Satterthwaite degrees of freedom.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<WelchResult> {
    if a.len() < 2 || b.len() < 2 {
        return invalid_arg("Welch test needs at least two values per sample");
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let p = if ma == mb { 1.0 } else { 0.0 };
        let t = if ma == mb { 0.0 } else { (ma - mb).signum() * f64::INFINITY };
        return Ok(WelchResult { t, dof: f64::NAN, p_value: p });
    }
    let t = (ma - mb) / se2.sqrt();
    let dof = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof).expect("positive dof");
    let p = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(WelchResult { t, dof, p_value: p })
}

/// McNemar test on discordant counts: exact two-sided binomial below 25
/// discordant pairs, continuity-corrected χ² otherwise.
pub fn mcnemar(b01: u64, b10: u64) -> f64 {
    let n = b01 + b10;
    if n == 0 {
        return 1.0;
    }
    if n < 25 {
        let k = b01.max(b10);
        let mut coef = 1.0f64;
        let mut tail = 0.0;
        // Accumulate C(n, i) for i = 0..=n, adding the upper tail.
        for i in 0..=n {
            if i >= k {
                tail += coef;
            }
            coef = coef * (n - i) as f64 / (i + 1) as f64;
        }
        return (2.0 * tail / 2f64.powi(n as i32)).min(1.0);
    }
    let d = (b01 as f64 - b10 as f64).abs() - 1.0;
    let stat = d.max(0.0).powi(2) / n as f64;
    ChiSquared::new(1.0).expect("dof").sf(stat)
}
