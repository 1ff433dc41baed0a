//! Paired two-sample t-test machinery.
//!
//! The t distribution is evaluated through the regularized incomplete beta
//! function (continued fraction), its inverse by bisection. Results carry
//! every field a spreadsheet-style paired t-test report prints: means,
//! variances, observation count, Pearson correlation, degrees of freedom,
//! t statistic, one- and two-tail p values and critical values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("correlation undefined: input column is constant")]
    ConstantInput,
    #[error("degenerate paired test: differences have zero variance")]
    DegenerateDifferences,
    #[error("degrees of freedom must be at least 1")]
    BadDf,
    #[error("probability {0} outside (0,1)")]
    BadProbability(f64),
    #[error("alpha {0} outside (0,1)")]
    BadAlpha(f64),
}

/// Complete record of one paired two-sample t-test for means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub n: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    /// Pearson correlation of the two columns; `None` when a column is constant.
    pub pearson_r: Option<f64>,
    pub df: usize,
    pub t_stat: f64,
    pub p_one_tail: f64,
    pub p_two_tail: f64,
    pub t_crit_one: f64,
    pub t_crit_two: f64,
}

/// Sample Pearson correlation coefficient.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(StatsError::TooFewObservations { needed: 2, got: a.len() });
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - mean_a) * (y - mean_b);
        var_a += (x - mean_a) * (x - mean_a);
        var_b += (y - mean_b) * (y - mean_b);
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    Ok(cov / (var_a.sqrt() * var_b.sqrt()))
}

fn sample_mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Paired two-sample t-test for means on the elementwise differences a - b.
///
/// One-tail p is P(T >= |t|), the direction-of-observation convention
/// spreadsheets print; two-tail doubles it. Critical values come from the
/// inverse CDF at 1-alpha and 1-alpha/2.
pub fn paired_t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<TTestResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(StatsError::TooFewObservations { needed: 2, got: n });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::BadAlpha(alpha));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    let (mean_d, var_d) = sample_mean_var(&d);
    if var_d == 0.0 {
        return Err(StatsError::DegenerateDifferences);
    }
    let df = n - 1;
    let t_stat = mean_d / (var_d.sqrt() / (n as f64).sqrt());
    let p_one_tail = 1.0 - t_cdf(t_stat.abs(), df)?;
    let (mean_a, var_a) = sample_mean_var(a);
    let (mean_b, var_b) = sample_mean_var(b);
    Ok(TTestResult {
        n,
        mean_a,
        mean_b,
        var_a,
        var_b,
        pearson_r: pearson_correlation(a, b).ok(),
        df,
        t_stat,
        p_one_tail,
        p_two_tail: 2.0 * p_one_tail,
        t_crit_one: t_inverse_cdf(1.0 - alpha, df)?,
        t_crit_two: t_inverse_cdf(1.0 - alpha / 2.0, df)?,
    })
}

/// CDF of Student's t distribution with `df` degrees of freedom.
pub fn t_cdf(t: f64, df: usize) -> Result<f64, StatsError> {
    if df < 1 {
        return Err(StatsError::BadDf);
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    // Evaluate the beta argument in whichever orientation keeps it <= 0.5.
    // Forming v/(v + t*t) near t = 0 rounds to exactly 1.0 and flattens the
    // cdf; forming the tail as 0.5 * (1 - I) for large |t| caps its relative
    // precision at the 1e-16 lost to the subtraction.
    let v = df as f64;
    let t2 = t * t;
    let tail = if t2 >= v {
        0.5 * reg_inc_beta(0.5 * v, 0.5, v / (v + t2))
    } else {
        0.5 * (1.0 - reg_inc_beta(0.5, 0.5 * v, t2 / (v + t2)))
    };
    Ok(if t < 0.0 { tail } else { 1.0 - tail })
}

/// Inverse of [`t_cdf`] in `t`, by bisection to 1e-10.
pub fn t_inverse_cdf(p: f64, df: usize) -> Result<f64, StatsError> {
    if df < 1 {
        return Err(StatsError::BadDf);
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::BadProbability(p));
    }
    // Doubles just below 1.0 are 2^52 times sparser than doubles near 0, so
    // solve upper-tail probabilities through the mirrored lower tail; 1 - p
    // is exact here (Sterbenz) and the symmetry of the distribution is exact.
    if p > 0.5 {
        return Ok(-bisect_t_cdf(1.0 - p, df)?);
    }
    bisect_t_cdf(p, df)
}

fn bisect_t_cdf(p: f64, df: usize) -> Result<f64, StatsError> {
    let mut hi = 1.0f64;
    while t_cdf(hi, df)? < p && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lo = -1.0f64;
    while t_cdf(lo, df)? > p && lo > -1e300 {
        lo *= 2.0;
    }
    for _ in 0..500 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-10 {
            break;
        }
        if t_cdf(mid, df)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Natural log of the gamma function (Lanczos approximation, g=7).
fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if z < 0.5 {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * z).sin().abs().ln()
            - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut sum = 0.999_999_999_999_809_9;
    for (i, &c) in COEFFS.iter().enumerate() {
        sum += c / (z + i as f64 + 1.0);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// Regularized incomplete beta function I_x(a, b).
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cont_frac(a, b, x) / a
    } else {
        1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta function, evaluated with the
/// modified Lentz method.
fn beta_cont_frac(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference comparison columns with externally verified statistics,
    // used as regression fixtures for the full t-test record.
    pub const F1_BASELINE: [f64; 11] =
        [26.9, 55.1, 39.6, 39.8, 48.7, 24.5, 37.2, 37.3, 23.7, 0.0, 0.0];
    pub const F1_PCA: [f64; 11] =
        [44.6, 41.4, 32.1, 39.2, 43.25, 23.1, 37.3, 32.1, 6.3, 21.2, 2.0];
    pub const F1_CLUSTER: [f64; 11] =
        [44.7, 50.1, 42.5, 49.8, 51.2, 33.7, 38.5, 34.9, 36.3, 30.0, 1.9];
    pub const KAPPA_BASELINE: [f64; 11] =
        [0.03, 0.364, 0.19, 0.282, 0.348, 0.155, 0.018, 0.149, 0.137, 0.0, 0.0];
    pub const KAPPA_PCA: [f64; 11] =
        [0.242, 0.214, 0.049, 0.264, 0.292, 0.136, 0.021, 0.067, 0.042, 0.135, 0.014];
    pub const KAPPA_CLUSTER: [f64; 11] =
        [0.249, 0.281, 0.171, 0.368, 0.365, 0.228, -0.003, 0.132, 0.232, 0.199, 0.013];

    #[test]
    fn t_cdf_is_half_at_zero() {
        for df in [1, 2, 5, 10, 100] {
            assert_eq!(t_cdf(0.0, df).unwrap(), 0.5);
        }
    }

    #[test]
    fn t_cdf_reference_points() {
        assert!((t_cdf(2.228138842, 10).unwrap() - 0.975).abs() < 1e-6);
        assert!((t_cdf(-3.269866894, 10).unwrap() - 0.0042161).abs() < 1e-6);
    }

    #[test]
    fn t_cdf_symmetry() {
        for df in [1usize, 3, 10, 25] {
            for i in 0..200 {
                let t = -10.0 + i as f64 * 0.1;
                let s = t_cdf(t, df).unwrap() + t_cdf(-t, df).unwrap();
                assert!((s - 1.0).abs() < 1e-12, "df={df} t={t}: {s}");
            }
        }
    }

    #[test]
    fn inverse_cdf_round_trips() {
        // Past |t| ~ 8 at df = 30 the cdf is so close to 1 that a double
        // cannot hold enough of the tail to steer the inverse back within
        // 1e-8, so the heavy-df grid stops there.
        for (df, reach) in [(1usize, 10.0f64), (2, 10.0), (5, 10.0), (10, 10.0), (30, 8.0)] {
            let steps = (reach * 4.0) as i32;
            for i in -steps..=steps {
                let t = i as f64 * 0.25;
                let p = t_cdf(t, df).unwrap();
                let back = t_inverse_cdf(p, df).unwrap();
                assert!((back - t).abs() < 1e-8, "df={df} t={t} back={back}");
            }
        }
    }

    #[test]
    fn critical_values_df_10() {
        assert!((t_inverse_cdf(0.95, 10).unwrap() - 1.812461102).abs() < 1e-6);
        assert!((t_inverse_cdf(0.975, 10).unwrap() - 2.228138842).abs() < 1e-6);
    }

    #[test]
    fn pearson_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b: Vec<f64> = a.iter().map(|x| 2.0 * x + 3.0).collect();
        assert!((pearson_correlation(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson_correlation(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(
            pearson_correlation(&[1.0, 1.0], &[1.0, 2.0]),
            Err(StatsError::ConstantInput)
        ));
    }

    #[test]
    fn pearson_reference_columns() {
        let r = pearson_correlation(&F1_BASELINE, &F1_CLUSTER).unwrap();
        assert!((r - 0.824050686).abs() < 1e-6);
    }

    #[test]
    fn paired_t_test_hand_example() {
        let res = paired_t_test(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], 0.05).unwrap();
        assert_eq!(res.df, 2);
        assert!((res.t_stat + 2.0 / (1.0 / 3.0f64.sqrt())).abs() < 1e-12);
        assert!((res.t_stat + 3.464101615137754).abs() < 1e-12);
        assert!((res.p_one_tail - 0.037089950114).abs() < 1e-9);
        assert!((res.p_two_tail - 0.074179900227).abs() < 1e-9);
    }

    #[test]
    fn paired_t_test_f1_baseline_vs_cluster() {
        let res = paired_t_test(&F1_BASELINE, &F1_CLUSTER, 0.05).unwrap();
        assert_eq!(res.n, 11);
        assert_eq!(res.df, 10);
        assert!((res.mean_a - 30.25454545).abs() < 1e-6);
        assert!((res.mean_b - 37.6).abs() < 1e-9);
        assert!((res.var_a - 315.186727273).abs() < 5e-4);
        assert!((res.var_b - 192.172).abs() < 5e-4);
        assert!((res.pearson_r.unwrap() - 0.824050686).abs() < 1e-6);
        assert!((res.t_stat + 2.415233157).abs() < 1e-6);
        assert!((res.p_one_tail - 0.018178345).abs() < 1e-6);
        assert!((res.p_two_tail - 0.036356689).abs() < 1e-6);
        assert!((res.t_crit_one - 1.812461102).abs() < 1e-6);
        assert!((res.t_crit_two - 2.228138842).abs() < 1e-6);
    }

    #[test]
    fn paired_t_test_f1_pca_vs_cluster() {
        let res = paired_t_test(&F1_PCA, &F1_CLUSTER, 0.05).unwrap();
        assert!((res.mean_a - 29.322727273).abs() < 1e-6);
        assert!((res.var_a - 213.112681818).abs() < 5e-4);
        assert!((res.pearson_r.unwrap() - 0.827185965).abs() < 1e-6);
        assert!((res.t_stat + 3.269866894).abs() < 1e-6);
        assert!((res.p_one_tail - 0.0042161).abs() < 1e-6);
        assert!((res.p_two_tail - 0.008432199).abs() < 1e-6);
    }

    #[test]
    fn paired_t_test_f1_baseline_vs_pca() {
        let res = paired_t_test(&F1_BASELINE, &F1_PCA, 0.05).unwrap();
        assert!((res.pearson_r.unwrap() - 0.756261858).abs() < 1e-6);
        assert!((res.t_stat - 0.264720359).abs() < 1e-6);
        assert!((res.p_one_tail - 0.398300577).abs() < 1e-6);
        assert!((res.p_two_tail - 0.796601154).abs() < 1e-6);
    }

    #[test]
    fn paired_t_test_kappa_baseline_vs_pca() {
        let res = paired_t_test(&KAPPA_BASELINE, &KAPPA_PCA, 0.05).unwrap();
        assert!((res.mean_a - 0.152090909).abs() < 1e-6);
        assert!((res.mean_b - 0.134181818).abs() < 1e-6);
        assert!((res.var_a - 0.018099491).abs() < 5e-7);
        assert!((res.var_b - 0.010727964).abs() < 5e-7);
        assert!((res.pearson_r.unwrap() - 0.597357168).abs() < 1e-6);
        assert!((res.t_stat - 0.538209984).abs() < 1e-6);
        assert!((res.p_one_tail - 0.301102379).abs() < 1e-6);
        assert!((res.p_two_tail - 0.602204758).abs() < 1e-6);
    }

    #[test]
    fn paired_t_test_kappa_pca_vs_cluster() {
        let res = paired_t_test(&KAPPA_PCA, &KAPPA_CLUSTER, 0.05).unwrap();
        assert!((res.mean_a - 0.134181818).abs() < 1e-6);
        assert!((res.mean_b - 0.203181818).abs() < 1e-6);
        assert!((res.pearson_r.unwrap() - 0.867250764).abs() < 1e-6);
        assert!((res.t_stat + 3.779732369).abs() < 1e-6);
        assert!((res.p_one_tail - 0.001801770).abs() < 1e-6);
        assert!((res.p_two_tail - 0.003603540).abs() < 1e-6);
    }

    #[test]
    fn constant_differences_are_degenerate() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b: Vec<f64> = a.iter().map(|x| x + 2.5).collect();
        assert!(matches!(
            paired_t_test(&a, &b, 0.05),
            Err(StatsError::DegenerateDifferences)
        ));
    }

    #[test]
    fn swapping_inputs_flips_t_sign_only() {
        let a = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0];
        let b = [2.0, 7.0, 1.0, 8.0, 2.0, 8.0];
        let ab = paired_t_test(&a, &b, 0.05).unwrap();
        let ba = paired_t_test(&b, &a, 0.05).unwrap();
        assert!((ab.t_stat + ba.t_stat).abs() < 1e-12);
        assert!((ab.p_one_tail - ba.p_one_tail).abs() < 1e-12);
        assert!((ab.p_two_tail - ba.p_two_tail).abs() < 1e-12);
    }

    #[test]
    fn two_tail_doubles_one_tail() {
        let res = paired_t_test(&F1_BASELINE, &F1_CLUSTER, 0.05).unwrap();
        assert_eq!(res.p_two_tail, 2.0 * res.p_one_tail);
    }

    #[test]
    fn ln_gamma_matches_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-12);
        assert!((ln_gamma(2.0)).abs() < 1e-12);
        assert!((ln_gamma(5.0) - 24.0f64.ln()).abs() < 1e-10);
        assert!((ln_gamma(0.5) - (std::f64::consts::PI.sqrt()).ln()).abs() < 1e-10);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(matches!(
            paired_t_test(&[1.0, 2.0], &[1.0], 0.05),
            Err(StatsError::LengthMismatch(2, 1))
        ));
    }
}
