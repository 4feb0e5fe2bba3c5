//! Goodness-of-fit instruments: one-sample Kolmogorov-Smirnov against a
//! known CDF, and the chi-square test on binned counts.

use statrs::function::gamma::gamma_ur;

/// One-sample KS statistic D = sup |F̂(x) − F(x)| and its asymptotic
/// p-value.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    assert!(samples.len() >= 2, "need at least two samples");
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    (d, ks_pvalue(xs.len(), d))
}

/// Asymptotic KS p-value with the Stephens small-sample correction:
/// Q((√n + 0.12 + 0.11/√n)·D).
pub fn ks_pvalue(n: usize, d: f64) -> f64 {
    let sn = (n as f64).sqrt();
    kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)
}

/// Survival function of the Kolmogorov distribution,
/// Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-8 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Pearson chi-square statistic Σ (O−E)²/E and p-value with `bins − 1`
/// degrees of freedom.
pub fn chi_square_test(observed: &[f64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() >= 2, "need at least two bins");
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| {
            debug_assert!(*e > 0.0, "expected counts must be positive");
            (o - e) * (o - e) / e
        })
        .sum();
    (stat, chi_square_pvalue(stat, observed.len() - 1))
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_pvalue(stat: f64, df: usize) -> f64 {
    gamma_ur(df as f64 / 2.0, stat / 2.0)
}
