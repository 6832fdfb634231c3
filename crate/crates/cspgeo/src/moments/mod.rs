//! Closed-form and numerically optimized moment quantities: expected
//! solution counts (exact and asymptotic), the epsilon root and the
//! lower-bound rate Lambda_b for k-SAT, pair/overlap exponents for both
//! ensembles, and a constrained maximizer for the coloring overlap
//! exponent.
//!
//! Everything is evaluated in the log domain; exact integer paths use
//! big integers and stay exact until the final logarithm.

use crate::error::{Error, Result};
use crate::rng::Rng;
use num_bigint::BigUint;
use serde::Serialize;
use std::fmt::Write as _;

// ---------------------------------------------------------------------------
// log-domain and exact-integer helpers
// ---------------------------------------------------------------------------

/// ln C(n, m) for real n >= m (falls back to -inf when the coefficient
/// vanishes). Direct product summation: exact to ~1e-13 relative for the
/// m <= 1e6 range this crate uses.
pub fn ln_binomial(n: f64, m: u64) -> f64 {
    if n < m as f64 {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for i in 0..m {
        acc += (n - i as f64).ln() - (i as f64 + 1.0).ln();
    }
    acc
}

/// Exact binomial coefficient.
pub fn big_binomial(n: u64, m: u64) -> BigUint {
    if m > n {
        return BigUint::from(0u32);
    }
    let m = m.min(n - m);
    let mut acc = BigUint::from(1u32);
    for i in 0..m {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// ln of a big integer via its top bits; exact to one ulp of f64 for any
/// magnitude. ln 0 = -inf.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        let v: u64 = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).ln();
    }
    let shift = bits - 53;
    let top: BigUint = x >> shift;
    let mant: u64 = top.iter_u64_digits().next().unwrap();
    (mant as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

// ---------------------------------------------------------------------------
// epsilon root and Lambda_b
// ---------------------------------------------------------------------------

/// Closed-form bracket for the small root: (2^{1-k} + k 4^{-k},
/// 2^{1-k} + 3 k 4^{-k}).
pub fn eps_bounds(k: u32) -> (f64, f64) {
    let base = 2f64.powi(1 - k as i32);
    let quad = k as f64 * 4f64.powi(-(k as i32));
    (base + quad, base + 3.0 * quad)
}

/// The root in (0, 1] of eps (2 - eps)^(k-1) = 1, by bisection on
/// (0, 2/k) where the map is strictly increasing. k = 2 gives exactly 1
/// (a double root at the boundary). Fails if the residual cannot be
/// brought under `tolerance` within the iteration cap.
pub fn solve_eps(k: u32, tolerance: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::parameter("k must be at least 2"));
    }
    if tolerance <= 0.0 {
        return Err(Error::parameter("tolerance must be positive"));
    }
    if k == 2 {
        return Ok(1.0);
    }
    let f = |e: f64| e * (2.0 - e).powi(k as i32 - 1) - 1.0;
    let mut lo = 0.0f64;
    let mut hi = 2.0 / k as f64;
    debug_assert!(f(hi) > 0.0);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() < tolerance {
            return Ok(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(mid).abs() < tolerance {
        Ok(mid)
    } else {
        Err(Error::numeric(format!(
            "epsilon root for k = {k} did not reach tolerance {tolerance}"
        )))
    }
}

/// Lambda_b(1/2, k, r) = 4 [((1 - eps/2)^k - 2^-k)^2 / (1 - eps)^k]^r,
/// carried in the log domain.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LambdaB {
    pub k: u32,
    pub r: f64,
    pub eps: f64,
    pub ln_value: f64,
    /// (ln Lambda_b) / 2: the per-variable rate of the satisfying-
    /// assignment lower bound Lambda_b^{n/2}.
    pub half_ln: f64,
}

pub fn lambda_b(k: u32, r: f64) -> Result<LambdaB> {
    if r < 0.0 {
        return Err(Error::parameter("r must be non-negative"));
    }
    let eps = solve_eps(k, 1e-13)?;
    let inner = (1.0 - eps / 2.0).powi(k as i32) - 2f64.powi(-(k as i32));
    if inner <= 0.0 {
        return Err(Error::numeric("degenerate inner term in Lambda_b"));
    }
    let ln_ratio = 2.0 * inner.ln() - k as f64 * (1.0 - eps).ln();
    let ln_value = 4f64.ln() + r * ln_ratio;
    Ok(LambdaB { k, r, eps, ln_value, half_ln: ln_value / 2.0 })
}

// ---------------------------------------------------------------------------
// k-SAT exponents
// ---------------------------------------------------------------------------

/// Per-variable log-probability that two assignments at normalized
/// Hamming distance alpha both satisfy a random formula of density r:
/// r ln(1 - 2^{1-k} + 2^{-k} (1 - alpha)^k).
pub fn sat_pair_exponent(k: u32, r: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::parameter("alpha must lie in [0, 1]"));
    }
    let ki = k as i32;
    Ok(r * (1.0 - 2f64.powi(1 - ki) + 2f64.powi(-ki) * (1.0 - alpha).powi(ki)).ln())
}

/// Per-variable log of the expected number of near-satisfying
/// assignments at distance alpha from a planted satisfying assignment:
///
///   -alpha ln alpha - (1-alpha) ln(1-alpha)
///     + r [ ln(1 - (1 - (1-alpha)^k) / (2^k - 1)) + Psi ].
///
/// Psi is the caller's low-energy correction; 0 is the lambda -> 0 limit.
pub fn sat_overlap_exponent(k: u32, r: f64, alpha: f64, psi: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::parameter("alpha must lie strictly inside (0, 1)"));
    }
    let entropy = -alpha * alpha.ln() - (1.0 - alpha) * (1.0 - alpha).ln();
    let ki = k as i32;
    let clause = 1.0 - (1.0 - (1.0 - alpha).powi(ki)) / (2f64.powi(ki) - 1.0);
    Ok(entropy + r * (clause.ln() + psi))
}

/// The distinguished evaluation point alpha* = 1 / (k ln k), with the
/// exponent value there.
pub fn sat_overlap_exponent_at_alpha_star(k: u32, r: f64, psi: f64) -> Result<(f64, f64)> {
    let alpha = 1.0 / (k as f64 * (k as f64).ln());
    Ok((alpha, sat_overlap_exponent(k, r, alpha, psi)?))
}

// ---------------------------------------------------------------------------
// coloring overlap exponent and its maximizer
// ---------------------------------------------------------------------------

/// The near-diagonal overlap profile a_ii = 1/k - h, a_ij = h/(k-1):
/// each row and column sums to 1/k; entries stay non-negative for
/// h <= 1/k.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OverlapAnsatz {
    pub k: u32,
    pub h: f64,
}

impl OverlapAnsatz {
    pub fn new(k: u32, h: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::parameter("k must be at least 2"));
        }
        if !(0.0..=1.0 / k as f64).contains(&h) {
            return Err(Error::parameter("need 0 <= h <= 1/k for non-negative entries"));
        }
        Ok(OverlapAnsatz { k, h })
    }

    /// Row-major k x k matrix of entries.
    pub fn matrix(&self) -> Vec<f64> {
        let k = self.k as usize;
        let diag = 1.0 / k as f64 - self.h;
        let off = self.h / (k as f64 - 1.0);
        let mut a = vec![off; k * k];
        for i in 0..k {
            a[i * k + i] = diag;
        }
        a
    }

    /// Sum of squared entries.
    pub fn frobenius(&self) -> f64 {
        let k = self.k as f64;
        k * (1.0 / k - self.h).powi(2) + k * self.h * self.h / (k - 1.0)
    }

    /// The h whose profile hits a given sum of squares x, when one exists
    /// with h in [0, 1/k].
    pub fn from_frobenius(k: u32, x: f64) -> Result<Self> {
        let kf = k as f64;
        // x(h) = 1/k - 2h + k^2 h^2 / (k-1); take the small root
        let a = kf * kf / (kf - 1.0);
        let disc = 1.0 - a * (1.0 / kf - x);
        if disc < 0.0 {
            return Err(Error::parameter("no ansatz matches this Frobenius value"));
        }
        let h = (1.0 - disc.sqrt()) / a;
        OverlapAnsatz::new(k, h)
    }
}

/// n^-1 ln F(A): the exponential rate of the expected number of
/// assignments with overlap profile A against a planted balanced
/// coloring of density r = m/n:
///
///   -ln k - sum a_ij ln a_ij + r ln((1 - 2/k + sum a_ij^2)/(1 - 1/k)) + psi
///
/// with 0 ln 0 = 0. Entries must be non-negative and sum to 1.
pub fn coloring_overlap_exponent(a: &[f64], k: u32, r: f64, psi: f64) -> Result<f64> {
    let kk = (k * k) as usize;
    if a.len() != kk {
        return Err(Error::parameter(format!("matrix must have {kk} entries")));
    }
    if a.iter().any(|&x| x < -1e-12) {
        return Err(Error::parameter("matrix entries must be non-negative"));
    }
    let total: f64 = a.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::parameter(format!("entries sum to {total}, expected 1")));
    }
    let kf = k as f64;
    let entropy: f64 = -a
        .iter()
        .map(|&x| if x > 0.0 { x * x.ln() } else { 0.0 })
        .sum::<f64>();
    let frob: f64 = a.iter().map(|&x| x * x).sum();
    Ok(-kf.ln() + entropy + r * ((1.0 - 2.0 / kf + frob) / (1.0 - 1.0 / kf)).ln() + psi)
}

/// The annealed per-variable exponent: ln k + r ln(1 - 1/k).
pub fn annealed_coloring_exponent(k: u32, r: f64) -> f64 {
    let kf = k as f64;
    kf.ln() + r * (1.0 - 1.0 / kf).ln()
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximizeResult {
    /// Best profile found (row-major k x k).
    pub matrix: Vec<f64>,
    pub value: f64,
    /// Exponent at the matching near-diagonal profile: a certified lower
    /// bound on the constrained maximum.
    pub ansatz_value: Option<f64>,
    pub restarts: usize,
}

/// Maximize the overlap exponent over profiles with column sums exactly
/// 1/k and fixed sum of squares x, by projected gradient ascent from
/// several deterministic starts. Feasible x lies in (1/k^2, 1/k).
///
/// With the sum of squares pinned, the r-term is constant over the
/// feasible set, so this is a maximum-entropy problem; the gradient
/// steps move inside the column-sum-zero subspace and are renormalized
/// onto the sphere ||A - U||^2 = x - 1/k^2 around the uniform profile U.
pub fn maximize_coloring_exponent(
    k: u32,
    r: f64,
    x: f64,
    psi: f64,
    seed: u64,
) -> Result<MaximizeResult> {
    let kf = k as f64;
    let kk = (k * k) as usize;
    let lo = 1.0 / (kf * kf);
    let hi = 1.0 / kf;
    if x == lo {
        // the uniform profile is the unique feasible point
        let matrix = vec![lo; kk];
        let value = coloring_overlap_exponent(&matrix, k, r, psi)?;
        return Ok(MaximizeResult { matrix, value, ansatz_value: Some(value), restarts: 0 });
    }
    if !(x > lo && x < hi) {
        return Err(Error::parameter(format!(
            "x = {x} outside the feasible interval ({lo}, {hi})"
        )));
    }
    let radius = (x - lo).sqrt();
    let uniform = 1.0 / (kf * kf);

    // One pass onto the affine column-sum subspace, then the sphere
    // ||A - U|| = radius around the uniform profile U.
    let center_and_rescale = |a: &mut [f64]| {
        let k = k as usize;
        for j in 0..k {
            let mean: f64 = (0..k).map(|i| a[i * k + j] - uniform).sum::<f64>() / kf;
            for i in 0..k {
                a[i * k + j] -= mean;
            }
        }
        let norm: f64 = a
            .iter()
            .map(|&v| (v - uniform) * (v - uniform))
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 {
            for v in a.iter_mut() {
                *v = uniform + (*v - uniform) * radius / norm;
            }
        }
    };

    // Alternate constraint passes with clipping until all three
    // constraints hold; reports whether the point ended up feasible.
    let repair = |a: &mut [f64]| -> bool {
        for _ in 0..80 {
            center_and_rescale(a);
            let mut clipped = false;
            for v in a.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                    clipped = true;
                }
            }
            if !clipped {
                break;
            }
        }
        let k_us = k as usize;
        let cols_ok = (0..k_us).all(|j| {
            let s: f64 = (0..k_us).map(|i| a[i * k_us + j]).sum();
            (s - 1.0 / kf).abs() < 1e-9
        });
        let frob: f64 = a.iter().map(|&v| v * v).sum();
        cols_ok && a.iter().all(|&v| v >= 0.0) && (frob - x).abs() < 1e-9
    };

    let objective = |a: &[f64]| -> f64 {
        // entropy only; the r-term is fixed by x on the feasible set
        -a.iter().map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 }).sum::<f64>()
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Ok(ansatz) = OverlapAnsatz::from_frobenius(k, x) {
        starts.push(ansatz.matrix());
    }
    {
        // cyclically shifted diagonal profile, projected onto the sphere
        let k_us = k as usize;
        let mut shifted = vec![1.0 / (kf * kf); kk];
        for i in 0..k_us {
            shifted[i * k_us + (i + 1) % k_us] = 1.0 / kf - 1.0 / (kf * kf) * (kf - 1.0);
        }
        starts.push(shifted);
    }
    let mut rng = Rng::new(seed);
    for _ in 0..4 {
        let mut a: Vec<f64> = (0..kk).map(|_| rng.next_f64()).collect();
        let s: f64 = a.iter().sum();
        for v in a.iter_mut() {
            *v /= s;
        }
        starts.push(a);
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    let restarts = starts.len();
    for mut a in starts {
        if !repair(&mut a) {
            continue;
        }
        let mut step = 0.5 / kf;
        let mut value = objective(&a);
        for _ in 0..2000 {
            // entropy gradient, projected onto the tangent space
            let mut grad: Vec<f64> = a
                .iter()
                .map(|&v| -(v.max(1e-300).ln() + 1.0))
                .collect();
            let k_us = k as usize;
            for j in 0..k_us {
                let mean: f64 = (0..k_us).map(|i| grad[i * k_us + j]).sum::<f64>() / kf;
                for i in 0..k_us {
                    grad[i * k_us + j] -= mean;
                }
            }
            let mut trial: Vec<f64> = a.iter().zip(&grad).map(|(&v, &g)| v + step * g).collect();
            let feasible = repair(&mut trial);
            let trial_value = objective(&trial);
            if feasible && trial_value > value + 1e-14 {
                a = trial;
                value = trial_value;
                step *= 1.2;
            } else {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
        }
        if best.as_ref().is_none_or(|&(_, bv)| value > bv) {
            best = Some((a, value));
        }
    }
    let (matrix, _) =
        best.ok_or_else(|| Error::numeric("no feasible start point for the optimizer"))?;
    let value = coloring_overlap_exponent(&matrix, k, r, psi)?;
    let ansatz_value = OverlapAnsatz::from_frobenius(k, x)
        .ok()
        .map(|ans| coloring_overlap_exponent(&ans.matrix(), k, r, psi))
        .transpose()?;
    Ok(MaximizeResult { matrix, value, ansatz_value, restarts })
}

// ---------------------------------------------------------------------------
// expected solution counts
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ColoringMomentReport {
    /// Exact ln E|S| for the distinct-edge ensemble.
    pub log_expected: f64,
    /// Asymptotic form n (ln k + r ln(1 - 1/k)) with r = m/n.
    pub asymptotic: f64,
}

/// Exact ln of the expected number of proper k-colorings of a uniform
/// n-vertex, m-edge graph:
///
///   ln sum_sigma C(N(sigma), m) - ln C(C(n,2), m),
///
/// where N(sigma) counts bichromatic pairs. The sum runs over class-size
/// compositions weighted by multinomial coefficients and is carried in
/// exact big-integer arithmetic until the final logarithm.
pub fn expected_solutions_coloring_exact(n: usize, m: usize, k: u8) -> Result<ColoringMomentReport> {
    if k < 2 {
        return Err(Error::parameter("k must be at least 2"));
    }
    let max_edges = n as u64 * (n as u64 - 1) / 2;
    if (m as u64) > max_edges {
        return Err(Error::parameter("m exceeds C(n,2)"));
    }
    let compositions = big_binomial((n + k as usize - 1) as u64, (k - 1) as u64);
    if compositions > BigUint::from(2_000_000u64) {
        return Err(Error::resource(
            "class-size composition count too large for the exact path",
        ));
    }

    let mut total = BigUint::from(0u32);
    let mut sizes = vec![0u64; k as usize];
    sum_over_compositions(n as u64, 0, &mut sizes, m as u64, &mut total);
    let log_expected = ln_big(&total) - ln_big(&big_binomial(max_edges, m as u64));
    let r = m as f64 / n as f64;
    let asymptotic = n as f64 * annealed_coloring_exponent(k as u32, r);
    Ok(ColoringMomentReport { log_expected, asymptotic })
}

fn sum_over_compositions(
    remaining: u64,
    class: usize,
    sizes: &mut Vec<u64>,
    m: u64,
    total: &mut BigUint,
) {
    let k = sizes.len();
    if class == k - 1 {
        sizes[class] = remaining;
        let n: u64 = sizes.iter().sum();
        let bichromatic = (n * n - sizes.iter().map(|&s| s * s).sum::<u64>()) / 2;
        let graphs = big_binomial(bichromatic, m);
        if graphs != BigUint::from(0u32) {
            // multinomial(n; sizes)
            let mut ways = BigUint::from(1u32);
            let mut left = n;
            for &s in sizes.iter() {
                ways *= big_binomial(left, s);
                left -= s;
            }
            *total += ways * graphs;
        }
        return;
    }
    for s in 0..=remaining {
        sizes[class] = s;
        sum_over_compositions(remaining - s, class + 1, sizes, m, total);
    }
}

/// ln E|S| for random k-SAT. The independent-clause model gives
/// mu = 2^n (1 - 2^-k)^m; the exact distinct-clause version is
/// ln [2^n C((2^k - 1) C(n,k), m) / C(2^k C(n,k), m)], computed in the
/// log domain, and returns -inf when m distinct satisfied clauses
/// cannot coexist.
pub fn expected_solutions_sat(n: usize, m: usize, k: usize, exact: bool) -> Result<f64> {
    if k > n || k == 0 {
        return Err(Error::parameter("need 1 <= k <= n"));
    }
    let ki = k as i32;
    if !exact {
        return Ok(n as f64 * 2f64.ln() + m as f64 * (1.0 - 2f64.powi(-ki)).ln());
    }
    let subsets = ln_big(&big_binomial(n as u64, k as u64)).exp();
    let sat_per_sigma = subsets * (2f64.powi(ki) - 1.0);
    let all = subsets * 2f64.powi(ki);
    let ln_num = ln_binomial(sat_per_sigma, m as u64);
    let ln_den = ln_binomial(all, m as u64);
    Ok(n as f64 * 2f64.ln() + ln_num - ln_den)
}

/// Exact ln E|S| for NAE hypergraph 2-coloring (distinct-edge model):
/// sum over the count of ones in sigma.
pub fn expected_solutions_nae_exact(n: usize, m: usize, k: usize) -> Result<f64> {
    if k > n || k == 0 {
        return Err(Error::parameter("need 1 <= k <= n"));
    }
    let all_edges = big_binomial(n as u64, k as u64);
    let all_edges_u64: u64 = all_edges
        .clone()
        .try_into()
        .map_err(|_| Error::resource("edge universe exceeds u64"))?;
    let mut total = BigUint::from(0u32);
    for ones in 0..=n as u64 {
        let admissible = crate::instances::nonmono_subset_count(n, ones as usize, k);
        let compatible = big_binomial(admissible, m as u64);
        if compatible != BigUint::from(0u32) {
            total += big_binomial(n as u64, ones) * compatible;
        }
    }
    Ok(ln_big(&total) - ln_big(&big_binomial(all_edges_u64, m as u64)))
}

// ---------------------------------------------------------------------------
// upper-bound cross-check
// ---------------------------------------------------------------------------

/// Side-by-side evaluation of the quoted near-solution upper bound.
/// The literal right-hand side ln 2 + r (1 - 2^-k) - 2 exp(k 2^{3-k})
/// is dimensionally odd next to its neighbors; the log variant replaces
/// r (1 - 2^-k) with r ln(1 - 2^-k). Both are reported, no correction
/// is applied silently.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UpperBoundCheck {
    pub literal_rhs: f64,
    pub log_variant_rhs: f64,
    /// max over a [0.01, 1/3] grid of the overlap exponent at psi = 0.
    pub grid_max: f64,
    pub literal_holds: bool,
    pub log_variant_holds: bool,
}

pub fn upper_bound_check(k: u32, r: f64) -> Result<UpperBoundCheck> {
    let ki = k as i32;
    let tail = 2.0 * (k as f64 * 2f64.powi(3 - ki)).exp();
    let literal_rhs = 2f64.ln() + r * (1.0 - 2f64.powi(-ki)) - tail;
    let log_variant_rhs = 2f64.ln() + r * (1.0 - 2f64.powi(-ki)).ln() - tail;
    let mut grid_max = f64::NEG_INFINITY;
    let points = 200;
    for i in 0..=points {
        let alpha = 0.01 + (1.0 / 3.0 - 0.01) * i as f64 / points as f64;
        grid_max = grid_max.max(sat_overlap_exponent(k, r, alpha, 0.0)?);
    }
    Ok(UpperBoundCheck {
        literal_rhs,
        log_variant_rhs,
        grid_max,
        literal_holds: grid_max < literal_rhs,
        log_variant_holds: grid_max < log_variant_rhs,
    })
}

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

/// A sampled exponent curve on a strictly increasing grid.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl ExponentCurve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.is_empty() {
            return Err(Error::parameter("grid and values must match and be non-empty"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::parameter("grid must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::parameter("curve values must be finite"));
        }
        Ok(ExponentCurve { grid, values })
    }

    pub fn to_csv(&self, x_name: &str, y_name: &str) -> String {
        let mut out = format!("{x_name},{y_name}\n");
        for (x, y) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{x},{y}");
        }
        out
    }
}
