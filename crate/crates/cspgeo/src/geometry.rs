//! Shattering metrics, rigid/loose variable classification, and the
//! overlap functional with its histogram.

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::landscape::{path_height, state_space_size, ClusterDecomposition, SolutionSet};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Exact finite-n shattering measurements over a cluster decomposition.
///
/// Regions are reported at cluster granularity (the finest region
/// partition); coarser groupings only improve separation and barrier
/// numbers, so this is the conservative report.
#[derive(Clone, Debug, Serialize)]
pub struct ShatterReport {
    pub region_count: usize,
    /// ln(region_count) / n.
    pub log_region_count_per_n: f64,
    /// Largest region's share of all solutions, in (0, 1].
    pub max_region_fraction: f64,
    /// Min Hamming distance between regions, / n. None for < 2 regions.
    pub min_interregion_distance_per_n: Option<f64>,
    /// Min bottleneck path height between regions, / n. None for < 2 regions.
    pub min_barrier_per_n: Option<f64>,
    pub adjacency_radius: usize,
    /// True when the barrier was minimized over every region pair;
    /// false when only the closest pair was probed.
    pub barrier_exact: bool,
}

impl ShatterReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Cluster-pair cap below which the barrier is minimized over all pairs.
pub const EXACT_BARRIER_CLUSTER_CAP: usize = 64;

/// Exact shattering metrics for a decomposed solution set.
pub fn shatter_report(
    set: &SolutionSet,
    decomposition: &ClusterDecomposition,
    instance: &Instance,
    barrier_budget: u64,
) -> Result<ShatterReport> {
    if set.is_empty() || decomposition.empty_input {
        return Err(Error::undefined("shatter report needs a non-empty solution set"));
    }
    if decomposition.cluster_of.len() != set.len() {
        return Err(Error::parameter("decomposition does not match solution set"));
    }
    let n = set.num_variables();
    let regions = decomposition.cluster_count();
    let max_size = *decomposition.sizes.iter().max().unwrap();
    let mut report = ShatterReport {
        region_count: regions,
        log_region_count_per_n: (regions as f64).ln() / n as f64,
        max_region_fraction: max_size as f64 / set.len() as f64,
        min_interregion_distance_per_n: None,
        min_barrier_per_n: None,
        adjacency_radius: decomposition.adjacency_radius,
        barrier_exact: true,
    };
    if regions < 2 {
        return Ok(report);
    }

    // closest member pair per cluster pair
    let mut closest: BTreeMap<(u32, u32), (usize, usize, usize)> = BTreeMap::new();
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let (ci, cj) = (decomposition.cluster_of[i], decomposition.cluster_of[j]);
            if ci == cj {
                continue;
            }
            let key = (ci.min(cj), ci.max(cj));
            let d = set.distance(i, j);
            match closest.get(&key) {
                Some(&(_, _, old)) if old <= d => {}
                _ => {
                    closest.insert(key, (i, j, d));
                }
            }
        }
    }
    let global_min = closest.values().map(|&(_, _, d)| d).min().unwrap();
    report.min_interregion_distance_per_n = Some(global_min as f64 / n as f64);

    // Within a cluster every pair is joined at height 0, so one
    // representative pair gives the exact barrier between two clusters.
    let pairs: Vec<(usize, usize)> = if regions <= EXACT_BARRIER_CLUSTER_CAP {
        closest.values().map(|&(i, j, _)| (i, j)).collect()
    } else {
        report.barrier_exact = false;
        let (&_, &(i, j, _)) = closest
            .iter()
            .min_by_key(|(_, &(_, _, d))| d)
            .expect("at least one cluster pair");
        vec![(i, j)]
    };
    let mut min_barrier = u32::MAX;
    for (i, j) in pairs {
        let h = path_height(instance, &set.get(i), &set.get(j), barrier_budget)?;
        min_barrier = min_barrier.min(h);
    }
    report.min_barrier_per_n = Some(min_barrier as f64 / n as f64);
    Ok(report)
}

/// Per-variable rigidity/looseness radii measured exactly against a
/// solution set.
///
/// `rigid_distance[v]`: least Hamming distance from sigma to a solution
/// that changes v (None when no solution does). `loose_radius[v]`: least
/// f such that every domain value for v is reachable within distance f
/// (None when some value is unreachable).
#[derive(Clone, Debug, Serialize)]
pub struct VariableStatus {
    pub rigid_distance: Vec<Option<u32>>,
    pub loose_radius: Vec<Option<u32>>,
}

impl VariableStatus {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Scan S(I) once and report each variable's rigidity and looseness radii.
pub fn classify_variables(set: &SolutionSet, sigma: &Assignment) -> Result<VariableStatus> {
    if set.position(sigma).is_none() {
        return Err(Error::parameter("sigma is not a member of the solution set"));
    }
    let n = set.num_variables();
    let k = set.domain_size() as usize;
    // min distance to a solution with tau(v) = j
    let mut min_dist = vec![u32::MAX; n * k];
    for idx in 0..set.len() {
        let tau = set.get(idx);
        let d = sigma.hamming_distance(&tau) as u32;
        for v in 0..n {
            let cell = &mut min_dist[v * k + tau.value(v) as usize];
            if d < *cell {
                *cell = d;
            }
        }
    }
    let mut rigid = Vec::with_capacity(n);
    let mut loose = Vec::with_capacity(n);
    for v in 0..n {
        let own = sigma.value(v) as usize;
        let nearest_changing = (0..k)
            .filter(|&j| j != own)
            .map(|j| min_dist[v * k + j])
            .min()
            .unwrap_or(u32::MAX);
        rigid.push((nearest_changing != u32::MAX).then_some(nearest_changing));
        let worst = (0..k).map(|j| min_dist[v * k + j]).max().unwrap();
        loose.push((worst != u32::MAX).then_some(worst));
    }
    Ok(VariableStatus { rigid_distance: rigid, loose_radius: loose })
}

/// k x k overlap matrix between two assignments over [k]^n:
/// entry (i, j) is |sigma^-1(i) ∩ tau^-1(j)| / n.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix {
    pub k: u8,
    pub n: usize,
    /// Integer intersection counts, row-major (row = sigma class).
    pub counts: Vec<u64>,
}

impl OverlapMatrix {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.counts[i * self.k as usize + j] as f64 / self.n as f64
    }

    /// Row sums = sigma's class fractions.
    pub fn row_sums(&self) -> Vec<f64> {
        let k = self.k as usize;
        (0..k)
            .map(|i| (0..k).map(|j| self.counts[i * k + j]).sum::<u64>() as f64 / self.n as f64)
            .collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let k = self.k as usize;
        (0..k)
            .map(|j| (0..k).map(|i| self.counts[i * k + j]).sum::<u64>() as f64 / self.n as f64)
            .collect()
    }

    /// Exact numerator of n^2 * f: the integer sum of squared counts.
    pub fn frobenius_numerator(&self) -> u64 {
        self.counts.iter().map(|&c| c * c).sum()
    }
}

/// Exact overlap matrix of two equal-length assignments with values < k.
pub fn overlap_matrix(sigma: &Assignment, tau: &Assignment, k: u8) -> Result<OverlapMatrix> {
    if sigma.len() != tau.len() || sigma.is_empty() {
        return Err(Error::parameter("assignments must share a positive length"));
    }
    if sigma.values().iter().chain(tau.values()).any(|&v| v >= k) {
        return Err(Error::parameter("assignment value out of range for k"));
    }
    let mut counts = vec![0u64; k as usize * k as usize];
    for (&a, &b) in sigma.values().iter().zip(tau.values()) {
        counts[a as usize * k as usize + b as usize] += 1;
    }
    Ok(OverlapMatrix { k, n: sigma.len(), counts })
}

/// f_sigma(tau): the squared Frobenius norm of the overlap matrix.
pub fn frobenius_overlap(m: &OverlapMatrix) -> f64 {
    m.frobenius_numerator() as f64 / (m.n as f64 * m.n as f64)
}

/// Exact histogram of the overlap functional over low-energy assignments:
/// counts of tau in [k]^n with H(tau) <= floor(lambda * n), keyed by the
/// exact integer n^2 * f_sigma(tau) (so equal overlap values never
/// collide through floats).
pub fn overlap_histogram(
    instance: &Instance,
    sigma: &Assignment,
    lambda: f64,
    budget: u64,
) -> Result<BTreeMap<u64, u64>> {
    if lambda < 0.0 {
        return Err(Error::parameter("lambda must be non-negative"));
    }
    let n = instance.num_variables();
    let k = instance.domain_size();
    if sigma.len() != n || sigma.domain_size() != k {
        return Err(Error::parameter("sigma does not match the instance"));
    }
    state_space_size(n, k, budget)?;
    let allowed = (lambda * n as f64).floor() as usize;

    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut tau = vec![0u8; n];
    // overlap counts maintained incrementally across the odometer scan
    let kk = k as usize;
    let mut counts = vec![0u64; kk * kk];
    for v in 0..n {
        counts[sigma.value(v) as usize * kk] += 1; // tau starts all-zero
    }
    let mut key: u64 = counts.iter().map(|&c| c * c).sum();
    loop {
        if instance.violated_count_raw(&tau) <= allowed {
            *hist.entry(key).or_insert(0) += 1;
        }
        // odometer increment, updating counts and key per changed digit
        let mut v = 0;
        loop {
            if v == n {
                return Ok(hist);
            }
            let row = sigma.value(v) as usize * kk;
            let old = tau[v] as usize;
            let new = if old + 1 == kk { 0 } else { old + 1 };
            // remove old cell, add new cell; key tracks sum of squares
            let co = counts[row + old];
            key -= co * co;
            counts[row + old] = co - 1;
            key += (co - 1) * (co - 1);
            let cn = counts[row + new];
            key -= cn * cn;
            counts[row + new] = cn + 1;
            key += (cn + 1) * (cn + 1);
            tau[v] = new as u8;
            if new != 0 {
                break;
            }
            v += 1; // carried
        }
    }
}

/// CSV export: `x_numerator,x_denominator,count` with x = numerator / n^2.
pub fn histogram_csv(hist: &BTreeMap<u64, u64>, n: usize) -> String {
    let mut out = String::from("x_numerator,x_denominator,count\n");
    let den = (n * n) as u64;
    for (&num, &count) in hist {
        let _ = writeln!(out, "{num},{den},{count}");
    }
    out
}

/// Alternative region assembly by overlap peeling: repeatedly take the
/// first remaining solution sigma (canonical order) and split off
/// C_sigma = remaining tau with f_sigma(tau) > y2. No equivalence with
/// the cluster decomposition is claimed; this mirrors the iterative
/// removal construction and is exposed for side-by-side comparison.
///
/// Returns regions as ordinal lists; every solution lands in exactly one.
pub fn peel_regions(set: &SolutionSet, y2: f64) -> Vec<Vec<usize>> {
    let k = set.domain_size();
    let n = set.num_variables();
    let mut remaining: Vec<usize> = (0..set.len()).collect();
    let mut regions = Vec::new();
    while let Some(&seed) = remaining.first() {
        let sigma = set.get(seed);
        let (region, rest): (Vec<usize>, Vec<usize>) = remaining.iter().partition(|&&i| {
            let m = overlap_matrix(&sigma, &set.get(i), k).expect("same shape");
            m.frobenius_numerator() as f64 > y2 * (n * n) as f64
        });
        if region.is_empty() {
            // sigma itself always satisfies f_sigma(sigma) >= 1/k; only a
            // y2 >= f_sigma(sigma) can strand it, then it stands alone
            let mut rest = rest;
            rest.retain(|&i| i != seed);
            regions.push(vec![seed]);
            remaining = rest;
        } else {
            regions.push(region);
            remaining = rest;
        }
    }
    regions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{GraphInstance, Instance};
    use crate::landscape::{cluster_decomposition, enumerate_solutions};

    fn k3() -> Instance {
        Instance::Coloring(GraphInstance { n: 3, k: 3, edges: vec![(0, 1), (0, 2), (1, 2)] })
    }

    #[test]
    fn k3_shatter_fixture() {
        let inst = k3();
        let s = enumerate_solutions(&inst, 1 << 20).unwrap();
        let d = cluster_decomposition(&s, 1);
        let r = shatter_report(&s, &d, &inst, 1 << 20).unwrap();
        assert_eq!(r.region_count, 6);
        assert!((r.max_region_fraction - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(r.min_interregion_distance_per_n, Some(2.0 / 3.0));
        assert_eq!(r.min_barrier_per_n, Some(1.0 / 3.0));
        assert!(r.barrier_exact);
    }

    #[test]
    fn single_region_report() {
        let inst = Instance::Coloring(GraphInstance { n: 3, k: 2, edges: vec![] });
        let s = enumerate_solutions(&inst, 1 << 20).unwrap();
        let d = cluster_decomposition(&s, 1);
        let r = shatter_report(&s, &d, &inst, 1 << 20).unwrap();
        assert_eq!(r.region_count, 1);
        assert_eq!(r.min_interregion_distance_per_n, None);
        assert_eq!(r.min_barrier_per_n, None);
    }

    #[test]
    fn classify_on_empty_graph() {
        let inst = Instance::Coloring(GraphInstance { n: 4, k: 3, edges: vec![] });
        let s = enumerate_solutions(&inst, 1 << 20).unwrap();
        let sigma = Assignment::new(vec![0, 1, 2, 0], 3).unwrap();
        let st = classify_variables(&s, &sigma).unwrap();
        assert!(st.rigid_distance.iter().all(|&d| d == Some(1)));
        assert!(st.loose_radius.iter().all(|&d| d == Some(1)));
    }

    #[test]
    fn classify_on_k3() {
        let inst = k3();
        let s = enumerate_solutions(&inst, 1 << 20).unwrap();
        let sigma = Assignment::new(vec![0, 1, 2], 3).unwrap();
        let st = classify_variables(&s, &sigma).unwrap();
        // nearest solution changing any vertex is a transposition
        assert!(st.rigid_distance.iter().all(|&d| d == Some(2)));
        assert!(st.loose_radius.iter().all(|&d| d == Some(2)));
        // sigma not in S is a parameter error
        let bad = Assignment::new(vec![0, 0, 1], 3).unwrap();
        assert!(classify_variables(&s, &bad).is_err());
    }

    #[test]
    fn unconstrained_variable_is_barely_rigid() {
        // vertex 3 touches no edge
        let inst = Instance::Coloring(GraphInstance {
            n: 4,
            k: 3,
            edges: vec![(0, 1), (0, 2), (1, 2)],
        });
        let s = enumerate_solutions(&inst, 1 << 20).unwrap();
        let sigma = Assignment::new(vec![0, 1, 2, 0], 3).unwrap();
        let st = classify_variables(&s, &sigma).unwrap();
        assert_eq!(st.rigid_distance[3], Some(1));
        assert_eq!(st.loose_radius[3], Some(1));
        assert_eq!(st.rigid_distance[0], Some(2));
    }

    #[test]
    fn overlap_matrix_examples() {
        let s = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let t = Assignment::new(vec![0, 1, 0, 1], 2).unwrap();
        let m = overlap_matrix(&s, &t, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.entry(i, j) - 0.25).abs() < 1e-15);
            }
        }
        assert!((frobenius_overlap(&m) - 0.25).abs() < 1e-15);
        // row sums equal sigma's class fractions
        assert_eq!(m.row_sums(), vec![0.5, 0.5]);

        // tau = sigma with balanced classes: diagonal 1/k, f = 1/k
        let m2 = overlap_matrix(&s, &s, 2).unwrap();
        assert!((m2.entry(0, 0) - 0.5).abs() < 1e-15);
        assert!((m2.entry(0, 1)).abs() < 1e-15);
        assert!((frobenius_overlap(&m2) - 0.5).abs() < 1e-15);

        // length mismatch is a parameter error
        let short = Assignment::new(vec![0], 2).unwrap();
        assert!(overlap_matrix(&s, &short, 2).is_err());
    }

    #[test]
    fn histogram_tiny_example() {
        // empty graph, n=2, k=2, sigma=(0,0), lambda=0:
        // f=1 for (0,0),(1,1); f=1/2 for (0,1),(1,0)
        let inst = Instance::Coloring(GraphInstance { n: 2, k: 2, edges: vec![] });
        let sigma = Assignment::new(vec![0, 0], 2).unwrap();
        let hist = overlap_histogram(&inst, &sigma, 0.0, 1 << 20).unwrap();
        assert_eq!(hist.get(&4), Some(&2)); // n^2 f = 4 => f = 1
        assert_eq!(hist.get(&2), Some(&2)); // n^2 f = 2 => f = 1/2
        assert_eq!(hist.values().sum::<u64>(), 4);
    }

    #[test]
    fn histogram_counts_everything_at_high_lambda() {
        let inst = k3();
        let sigma = Assignment::new(vec![0, 1, 2], 3).unwrap();
        let hist = overlap_histogram(&inst, &sigma, 1.0, 1 << 20).unwrap();
        assert_eq!(hist.values().sum::<u64>(), 27);
        // monotone in lambda
        let h0 = overlap_histogram(&inst, &sigma, 0.0, 1 << 20).unwrap();
        let h1 = overlap_histogram(&inst, &sigma, 1.0 / 3.0, 1 << 20).unwrap();
        assert!(h0.values().sum::<u64>() <= h1.values().sum::<u64>());
        assert!(h1.values().sum::<u64>() <= 27);
    }

    #[test]
    fn histogram_keys_match_direct_evaluation() {
        let inst = k3();
        let sigma = Assignment::new(vec![0, 1, 2], 3).unwrap();
        let hist = overlap_histogram(&inst, &sigma, 2.0, 1 << 20).unwrap();
        // rebuild by direct scan
        let mut direct: BTreeMap<u64, u64> = BTreeMap::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    let tau = Assignment::new(vec![a, b, c], 3).unwrap();
                    let m = overlap_matrix(&sigma, &tau, 3).unwrap();
                    *direct.entry(m.frobenius_numerator()).or_insert(0) += 1;
                }
            }
        }
        assert_eq!(hist, direct);
    }

    #[test]
    fn frobenius_continuity_under_single_flip() {
        // |f(tau) - f(tau')| <= 4/n when dist(tau, tau') = 1
        let mut rng = crate::rng::Rng::new(5);
        let n = 12;
        for _ in 0..200 {
            let sigma = Assignment::new((0..n).map(|_| rng.below(3) as u8).collect(), 3).unwrap();
            let mut tau = Assignment::new((0..n).map(|_| rng.below(3) as u8).collect(), 3).unwrap();
            let f1 = frobenius_overlap(&overlap_matrix(&sigma, &tau, 3).unwrap());
            let v = rng.below_usize(n);
            let shift = 1 + rng.below(2) as u8;
            tau.set(v, (tau.value(v) + shift) % 3);
            let f2 = frobenius_overlap(&overlap_matrix(&sigma, &tau, 3).unwrap());
            assert!((f1 - f2).abs() <= 4.0 / n as f64 + 1e-12);
        }
    }

    #[test]
    fn loose_radius_dominates_rigid_distance() {
        // loose_radius maximizes the witness distance over every target
        // value while rigid_distance minimizes it over the changed ones,
        // so whenever both are finite the ordering holds, and the
        // nearest changed-value witness is exactly the rigidity radius.
        for seed in 0..20u64 {
            let (g, sigma) = crate::instances::gen_planted_coloring(9, 10, 3, seed).unwrap();
            let inst = Instance::Coloring(g);
            let set = enumerate_solutions(&inst, 1 << 20).unwrap();
            let status = classify_variables(&set, &sigma).unwrap();
            for v in 0..9 {
                if let (Some(r), Some(l)) = (status.rigid_distance[v], status.loose_radius[v]) {
                    assert!(l >= r, "vertex {v}: loose {l} < rigid {r}");
                }
                // direct witness recomputation
                let nearest_changing = set
                    .iter()
                    .filter(|t| t.value(v) != sigma.value(v))
                    .map(|t| sigma.hamming_distance(&t) as u32)
                    .min();
                assert_eq!(status.rigid_distance[v], nearest_changing);
            }
        }
    }

    #[test]
    fn oversaturated_sat_flags_empty_solution_set() {
        // 3-SAT at n=16, r=5.2 sits far above the satisfiability
        // threshold; the empty solution set is flagged, never silently
        // turned into a report.
        let f = crate::instances::gen_uniform_cnf(16, 83, 3, 0x5A7).unwrap();
        let inst = Instance::Sat(f);
        let set = enumerate_solutions(&inst, 1 << 22).unwrap();
        assert!(set.is_empty());
        let d = cluster_decomposition(&set, 1);
        assert!(d.empty_input);
        assert!(shatter_report(&set, &d, &inst, 1 << 22).is_err());
    }

    #[test]
    fn peeling_regions_partition_and_match_symmetry() {
        let inst = k3();
        let s = enumerate_solutions(&inst, 1 << 20).unwrap();
        // every pair of rainbow colorings of K3 has overlap counts in
        // {0,1}, so f is exactly 1/3 throughout: at y2 = 1/3 nothing
        // exceeds the threshold and peeling yields singletons
        let regions = peel_regions(&s, 1.0 / 3.0);
        assert_eq!(regions.len(), 6);
        let total: usize = regions.iter().map(|r| r.len()).sum();
        assert_eq!(total, 6);
        // just below 1/3 everything coalesces into one region
        let coarse = peel_regions(&s, 1.0 / 3.0 - 1e-9);
        assert_eq!(coarse.len(), 1);
        assert_eq!(coarse[0].len(), 6);
    }

    #[test]
    fn frobenius_relabeling_multiset_stability() {
        // Relabeling sigma's colors permutes which tau-relabelings hit
        // which overlap value, so the multiset over all k! relabelings
        // of tau is unchanged. Checked exhaustively at k <= 4.
        fn permutations(k: u8) -> Vec<Vec<u8>> {
            fn rec(prefix: &mut Vec<u8>, left: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
                if left.is_empty() {
                    out.push(prefix.clone());
                    return;
                }
                for i in 0..left.len() {
                    let x = left.remove(i);
                    prefix.push(x);
                    rec(prefix, left, out);
                    prefix.pop();
                    left.insert(i, x);
                }
            }
            let mut out = Vec::new();
            rec(&mut Vec::new(), &mut (0..k).collect(), &mut out);
            out
        }
        let mut rng = crate::rng::Rng::new(77);
        for k in [2u8, 3, 4] {
            let n = 9;
            let sigma =
                Assignment::new((0..n).map(|_| rng.below(k as u64) as u8).collect(), k).unwrap();
            let tau =
                Assignment::new((0..n).map(|_| rng.below(k as u64) as u8).collect(), k).unwrap();
            let relabel = |a: &Assignment, p: &[u8]| {
                Assignment::new(a.values().iter().map(|&v| p[v as usize]).collect(), k).unwrap()
            };
            let multiset = |s: &Assignment| -> Vec<u64> {
                let mut keys: Vec<u64> = permutations(k)
                    .iter()
                    .map(|p| {
                        overlap_matrix(s, &relabel(&tau, p), k).unwrap().frobenius_numerator()
                    })
                    .collect();
                keys.sort_unstable();
                keys
            };
            let base = multiset(&sigma);
            // identical simultaneous relabeling leaves f fixed entirely
            for p in permutations(k) {
                let f1 = overlap_matrix(&sigma, &tau, k).unwrap().frobenius_numerator();
                let f2 = overlap_matrix(&relabel(&sigma, &p), &relabel(&tau, &p), k)
                    .unwrap()
                    .frobenius_numerator();
                assert_eq!(f1, f2);
                // relabeling sigma alone permutes the multiset only
                assert_eq!(multiset(&relabel(&sigma, &p)), base);
            }
        }
    }

    #[test]
    fn classify_cross_check_against_violated_count() {
        // rigid_distance >= 2 iff every radius-1 change of v breaks sigma
        let (g, sigma) = crate::instances::gen_planted_coloring(8, 12, 3, 3).unwrap();
        let inst = Instance::Coloring(g);
        let s = enumerate_solutions(&inst, 1 << 20).unwrap();
        let st = classify_variables(&s, &sigma).unwrap();
        for v in 0..8 {
            let all_neighbors_break = (0..3u8)
                .filter(|&d| d != sigma.value(v))
                .all(|d| {
                    let mut t = sigma.clone();
                    t.set(v, d);
                    inst.violated_count(&t).unwrap() > 0
                });
            let rigid_ge_2 = st.rigid_distance[v].map_or(true, |r| r >= 2);
            assert_eq!(all_neighbors_break, rigid_ge_2);
        }
    }
}
