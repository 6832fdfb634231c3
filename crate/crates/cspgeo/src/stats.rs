//! Small statistics toolkit: chi-square goodness of fit, binomial
//! intervals, binned total variation with Freedman-Diaconis widths, and
//! a label-permutation test.

use crate::rng::Rng;

/// ln Gamma(x) for x > 0 (Lanczos approximation, g = 7, 9 coefficients;
/// absolute error below 1e-13 on the range used here).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEFFS[0];
    let t = x + 7.5;
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma P(a, x), by series for x < a+1 and
/// continued fraction otherwise.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let ln_ga = ln_gamma(a);
    if x < a + 1.0 {
        // series
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-15 {
                break;
            }
        }
        (sum.ln() + a * x.ln() - x - ln_ga).exp()
    } else {
        // Lentz continued fraction for Q(a, x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-15 {
                break;
            }
        }
        let q = (a * x.ln() - x - ln_ga).exp() * h;
        1.0 - q
    }
}

/// Survival function of the chi-square distribution with `df` degrees of
/// freedom: P[X >= x].
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    1.0 - gamma_p(df / 2.0, x / 2.0)
}

/// Pearson chi-square statistic and p-value against given expected counts.
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() > 1);
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            assert!(e > 0.0, "expected counts must be positive");
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    (stat, chi_square_sf(stat, df))
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Summary order statistics.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let at = |q: f64| -> f64 {
        let pos = q * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        v[lo] * (1.0 - frac) + v[hi] * frac
    };
    Some(Quartiles { q1: at(0.25), median: at(0.5), q3: at(0.75) })
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Shared binning of two samples with the Freedman-Diaconis width rule
/// over the pooled data. A degenerate pool (zero IQR or constant data)
/// collapses to a single bin.
#[derive(Clone, Debug)]
pub struct Binning {
    pub low: f64,
    pub width: f64,
    pub bins: usize,
}

impl Binning {
    pub fn freedman_diaconis(pooled: &[f64]) -> Binning {
        let lo = pooled.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let q = quartiles(pooled).expect("non-empty pool");
        let iqr = q.q3 - q.q1;
        let width = 2.0 * iqr / (pooled.len() as f64).cbrt();
        if !(width > 0.0) || hi <= lo {
            return Binning { low: lo, width: 1.0, bins: 1 };
        }
        let bins = (((hi - lo) / width).ceil() as usize).clamp(1, 10_000);
        Binning { low: lo, width: (hi - lo) / bins as f64, bins }
    }

    pub fn index(&self, x: f64) -> usize {
        if self.bins == 1 {
            return 0;
        }
        (((x - self.low) / self.width).floor() as isize).clamp(0, self.bins as isize - 1) as usize
    }

    pub fn histogram(&self, values: &[f64]) -> Vec<u64> {
        let mut h = vec![0u64; self.bins];
        for &x in values {
            h[self.index(x)] += 1;
        }
        h
    }
}

/// Total variation distance between two empirical distributions over a
/// shared binning.
pub fn binned_total_variation(a: &[f64], b: &[f64], binning: &Binning) -> f64 {
    let ha = binning.histogram(a);
    let hb = binning.histogram(b);
    let na = a.len() as f64;
    let nb = b.len() as f64;
    0.5 * ha
        .iter()
        .zip(&hb)
        .map(|(&x, &y)| (x as f64 / na - y as f64 / nb).abs())
        .sum::<f64>()
}

/// Permutation test for the binned TV statistic: the p-value is the
/// fraction of label permutations with TV at least as large as observed.
pub fn permutation_p_value(
    a: &[f64],
    b: &[f64],
    binning: &Binning,
    permutations: usize,
    seed: u64,
) -> f64 {
    let observed = binned_total_variation(a, b, binning);
    let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let mut rng = Rng::new(seed);
    let mut hits = 0usize;
    for _ in 0..permutations {
        rng.shuffle(&mut pooled);
        let (pa, pb) = pooled.split_at(a.len());
        if binned_total_variation(pa, pb, binning) >= observed - 1e-15 {
            hits += 1;
        }
    }
    (hits + 1) as f64 / (permutations + 1) as f64
}
