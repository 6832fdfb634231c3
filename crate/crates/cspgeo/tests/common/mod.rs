//! Brute-force oracles for the acceptance suite. Everything here scans
//! the full assignment space directly and shares no code path with the
//! implementations it checks.

use cspgeo::assignment::Assignment;
use cspgeo::instances::Instance;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

/// All k^n assignments in lexicographic (odometer) order.
pub fn all_assignments(n: usize, k: u8) -> Vec<Assignment> {
    let mut out = Vec::new();
    let mut values = vec![0u8; n];
    loop {
        out.push(Assignment::new(values.clone(), k).unwrap());
        let mut v = 0;
        loop {
            if v == n {
                return out;
            }
            values[v] += 1;
            if values[v] < k {
                break;
            }
            values[v] = 0;
            v += 1;
        }
    }
}

/// Naive S(I): scan the full space, keep the zero-violation points, and
/// sort into the canonical lexicographic order the implementation
/// promises.
pub fn naive_enumerate(instance: &Instance) -> Vec<Assignment> {
    let mut out: Vec<Assignment> =
        all_assignments(instance.num_variables(), instance.domain_size())
            .into_iter()
            .filter(|a| instance.violated_count(a).unwrap() == 0)
            .collect();
    out.sort_by(|a, b| a.values().cmp(b.values()));
    out
}

/// Naive clustering: BFS over the solution list with explicit
/// neighbor-ball generation, grouped as sets of digit strings.
pub fn naive_clusters(solutions: &[Assignment], radius: usize) -> Vec<HashSet<String>> {
    let index: HashMap<&Assignment, usize> =
        solutions.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut seen = vec![false; solutions.len()];
    let mut clusters = Vec::new();
    for start in 0..solutions.len() {
        if seen[start] {
            continue;
        }
        let mut group = HashSet::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            group.insert(solutions[i].to_digit_string());
            for j in neighbors_within(&solutions[i], radius, &index) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        clusters.push(group);
    }
    clusters
}

fn neighbors_within(
    a: &Assignment,
    radius: usize,
    index: &HashMap<&Assignment, usize>,
) -> Vec<usize> {
    let mut found = Vec::new();
    let mut scratch = a.clone();
    fn recurse(
        scratch: &mut Assignment,
        from: usize,
        remaining: usize,
        index: &HashMap<&Assignment, usize>,
        found: &mut Vec<usize>,
    ) {
        if remaining == 0 {
            return;
        }
        let n = scratch.len();
        let k = scratch.domain_size();
        for v in from..n {
            let saved = scratch.value(v);
            for d in 0..k {
                if d == saved {
                    continue;
                }
                scratch.set(v, d);
                if let Some(&j) = index.get(&*scratch) {
                    found.push(j);
                }
                recurse(scratch, v + 1, remaining - 1, index, found);
            }
            scratch.set(v, saved);
        }
    }
    recurse(&mut scratch, 0, radius, index, &mut found);
    found
}

/// Naive bottleneck path height: binary search on the allowed height
/// with a BFS reachability check over the full space.
pub fn naive_path_height(instance: &Instance, sigma: &Assignment, tau: &Assignment) -> u32 {
    let n = instance.num_variables();
    let k = instance.domain_size() as u64;
    let h_sigma = instance.violated_count(sigma).unwrap() as u32;
    let h_tau = instance.violated_count(tau).unwrap() as u32;
    let mut lo = h_sigma.max(h_tau);
    let mut hi = instance.num_constraints() as u32;
    let rank = |a: &Assignment| -> u64 {
        a.values().iter().rev().fold(0u64, |acc, &v| acc * k + v as u64)
    };
    let reachable = |limit: u32| -> bool {
        let total: u64 = k.pow(n as u32);
        let mut seen = vec![false; total as usize];
        let start = rank(sigma);
        let goal = rank(tau);
        let mut queue = VecDeque::from([sigma.clone()]);
        seen[start as usize] = true;
        while let Some(state) = queue.pop_front() {
            if rank(&state) == goal {
                return true;
            }
            for v in 0..n {
                let saved = state.value(v);
                for d in 0..k as u8 {
                    if d == saved {
                        continue;
                    }
                    let mut next = state.clone();
                    next.set(v, d);
                    let r = rank(&next) as usize;
                    if !seen[r] && instance.violated_count(&next).unwrap() as u32 <= limit {
                        seen[r] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        false
    };
    while lo < hi {
        let mid = (lo + hi) / 2;
        if reachable(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Naive per-variable rigidity/looseness radii straight from the
/// definitions, scanning the provided solution list.
pub fn naive_classify(
    solutions: &[Assignment],
    sigma: &Assignment,
) -> (Vec<Option<u32>>, Vec<Option<u32>>) {
    let n = sigma.len();
    let k = sigma.domain_size();
    let mut rigid = Vec::with_capacity(n);
    let mut loose = Vec::with_capacity(n);
    for v in 0..n {
        let mut nearest_changing: Option<u32> = None;
        let mut worst_target: Option<u32> = Some(0);
        for j in 0..k {
            let best = solutions
                .iter()
                .filter(|t| t.value(v) == j)
                .map(|t| sigma.hamming_distance(t) as u32)
                .min();
            if j != sigma.value(v) {
                if let Some(d) = best {
                    nearest_changing = Some(nearest_changing.map_or(d, |x| x.min(d)));
                }
            }
            worst_target = match (worst_target, best) {
                (Some(w), Some(d)) => Some(w.max(d)),
                _ => None,
            };
        }
        rigid.push(nearest_changing);
        loose.push(worst_target);
    }
    (rigid, loose)
}

/// Naive overlap histogram: full-space scan with from-scratch
/// intersection counts.
pub fn naive_histogram(instance: &Instance, sigma: &Assignment, lambda: f64) -> BTreeMap<u64, u64> {
    let n = instance.num_variables();
    let k = instance.domain_size() as usize;
    let allowed = (lambda * n as f64).floor() as usize;
    let mut hist = BTreeMap::new();
    for tau in all_assignments(n, instance.domain_size()) {
        if instance.violated_count(&tau).unwrap() > allowed {
            continue;
        }
        let mut counts = vec![0u64; k * k];
        for (a, b) in sigma.values().iter().zip(tau.values()) {
            counts[*a as usize * k + *b as usize] += 1;
        }
        let key: u64 = counts.iter().map(|&c| c * c).sum();
        *hist.entry(key).or_insert(0) += 1;
    }
    hist
}
