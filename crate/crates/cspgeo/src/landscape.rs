//! The energy landscape H over D^n: exact solution enumeration, cluster
//! decomposition under Hamming adjacency, bottleneck path heights, and
//! inter-cluster distances.
//!
//! Everything here is exact; budgets are hard limits and exceeding one is
//! an error, never a silent approximation.

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instances::Instance;
use std::collections::HashMap;
use std::fmt::Write as _;

/// Default cap on k^n for full-space operations (enumeration,
/// bottleneck search, histogram scans).
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 26;

/// Returns k^n when it fits the budget, else a resource error.
pub fn state_space_size(n: usize, k: u8, budget: u64) -> Result<u64> {
    let mut size: u128 = 1;
    for _ in 0..n {
        size *= k as u128;
        if size > budget as u128 {
            return Err(Error::resource(format!(
                "k^n = {k}^{n} exceeds budget {budget}"
            )));
        }
    }
    Ok(size as u64)
}

// ---------------------------------------------------------------------------
// SolutionSet: packed storage plus a membership index
// ---------------------------------------------------------------------------

/// The exact solution set S(I), stored as packed fixed-width digit
/// vectors in canonical (lexicographic) order, with a hash index from
/// assignment to ordinal.
pub struct SolutionSet {
    n: usize,
    domain_size: u8,
    bits: u32,
    words_per: usize,
    packed: Vec<u64>,
    index: HashMap<Vec<u64>, u32>,
}

impl SolutionSet {
    fn bits_for(domain_size: u8) -> u32 {
        8 - (domain_size - 1).leading_zeros()
    }

    fn new_empty(n: usize, domain_size: u8) -> Self {
        let bits = Self::bits_for(domain_size);
        let words_per = (n as u32 * bits).div_ceil(64).max(1) as usize;
        SolutionSet {
            n,
            domain_size,
            bits,
            words_per,
            packed: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn pack_into(&self, values: &[u8], out: &mut [u64]) {
        out.iter_mut().for_each(|w| *w = 0);
        for (i, &v) in values.iter().enumerate() {
            let bit = i as u32 * self.bits;
            out[(bit / 64) as usize] |= (v as u64) << (bit % 64);
            // digits never straddle a word boundary only when bits divides 64;
            // handle the general split explicitly
            let rem = bit % 64;
            if rem + self.bits > 64 {
                out[(bit / 64 + 1) as usize] |= (v as u64) >> (64 - rem);
            }
        }
    }

    fn unpack_digit(&self, ordinal: usize, var: usize) -> u8 {
        let base = ordinal * self.words_per;
        let bit = var as u32 * self.bits;
        let rem = bit % 64;
        let mut raw = self.packed[base + (bit / 64) as usize] >> rem;
        if rem + self.bits > 64 {
            raw |= self.packed[base + (bit / 64 + 1) as usize] << (64 - rem);
        }
        (raw & ((1u64 << self.bits) - 1)) as u8
    }

    fn push(&mut self, values: &[u8]) {
        let mut words = vec![0u64; self.words_per];
        self.pack_into(values, &mut words);
        let ordinal = self.len() as u32;
        self.packed.extend_from_slice(&words);
        self.index.insert(words, ordinal);
    }

    pub fn len(&self) -> usize {
        if self.words_per == 0 {
            0
        } else {
            self.packed.len() / self.words_per
        }
    }

    pub fn is_empty(&self) -> bool {
        self.packed.is_empty()
    }

    pub fn num_variables(&self) -> usize {
        self.n
    }

    pub fn domain_size(&self) -> u8 {
        self.domain_size
    }

    /// The `i`-th solution in canonical order.
    pub fn get(&self, i: usize) -> Assignment {
        let values = (0..self.n).map(|v| self.unpack_digit(i, v)).collect();
        Assignment::new(values, self.domain_size).unwrap()
    }

    /// Ordinal of an assignment, if it is a solution.
    pub fn position(&self, a: &Assignment) -> Option<usize> {
        if a.len() != self.n || a.domain_size() != self.domain_size {
            return None;
        }
        let mut words = vec![0u64; self.words_per];
        self.pack_into(a.values(), &mut words);
        self.index.get(words.as_slice()).map(|&i| i as usize)
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        self.position(a).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = Assignment> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Hamming distance between stored solutions `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> usize {
        (0..self.n)
            .filter(|&v| self.unpack_digit(i, v) != self.unpack_digit(j, v))
            .count()
    }

    /// Build from explicit assignments (validated, deduplicated, sorted
    /// into canonical order). Used by tests and by callers that already
    /// hold S(I).
    pub fn from_assignments(
        n: usize,
        domain_size: u8,
        mut assignments: Vec<Assignment>,
    ) -> Result<Self> {
        for a in &assignments {
            if a.len() != n || a.domain_size() != domain_size {
                return Err(Error::parameter("assignment shape mismatch"));
            }
        }
        assignments.sort_by(|a, b| a.values().cmp(b.values()));
        assignments.dedup();
        let mut set = SolutionSet::new_empty(n, domain_size);
        for a in &assignments {
            set.push(a.values());
        }
        Ok(set)
    }

    /// One digit-string per line.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        for a in self.iter() {
            let _ = writeln!(out, "{}", a.to_digit_string());
        }
        out
    }
}

// ---------------------------------------------------------------------------
// exact enumeration
// ---------------------------------------------------------------------------

/// Exhaustively enumerate S(I) by depth-first search over variables in
/// index order, pruning a partial assignment as soon as a constraint with
/// all variables assigned is violated. Output is in canonical
/// (lexicographic) order.
pub fn enumerate_solutions(instance: &Instance, budget: u64) -> Result<SolutionSet> {
    let n = instance.num_variables();
    let k = instance.domain_size();
    state_space_size(n, k, budget)?;

    // Constraints become checkable once their largest variable is assigned.
    let mut by_last_var: Vec<Vec<usize>> = vec![Vec::new(); n.max(1)];
    for c in 0..instance.num_constraints() {
        let vars = instance.constraint_vars(c);
        let last = *vars.iter().max().unwrap() as usize;
        by_last_var[last].push(c);
    }

    let mut set = SolutionSet::new_empty(n, k);
    if n == 0 {
        return Ok(set);
    }
    let mut values = vec![0u8; n];
    // iterative DFS: depth = next variable to branch on
    let mut depth = 0usize;
    let mut choice = vec![0u8; n + 1];
    loop {
        if choice[depth] >= k {
            // backtrack
            if depth == 0 {
                break;
            }
            depth -= 1;
            choice[depth] += 1;
            continue;
        }
        values[depth] = choice[depth];
        let ok = by_last_var[depth]
            .iter()
            .all(|&c| !instance.constraint_violated(c, &values));
        if !ok {
            choice[depth] += 1;
            continue;
        }
        if depth + 1 == n {
            set.push(&values);
            choice[depth] += 1;
        } else {
            depth += 1;
            choice[depth] = 0;
        }
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// cluster decomposition
// ---------------------------------------------------------------------------

/// Partition of a solution set into connected components under
/// "Hamming distance <= radius" adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterDecomposition {
    pub adjacency_radius: usize,
    /// Cluster id per solution ordinal; ids numbered by first appearance.
    pub cluster_of: Vec<u32>,
    pub sizes: Vec<u64>,
    /// Set when the decomposition was requested on an empty solution set.
    pub empty_input: bool,
}

impl ClusterDecomposition {
    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn export_csv(&self) -> String {
        let mut out = String::from("solution_index,cluster_id\n");
        for (i, c) in self.cluster_of.iter().enumerate() {
            let _ = writeln!(out, "{i},{c}");
        }
        out
    }
}

struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Connected components of the solution set under distance <= radius,
/// computed by union-find with Hamming-ball probes against the
/// membership index.
pub fn cluster_decomposition(set: &SolutionSet, adjacency_radius: usize) -> ClusterDecomposition {
    assert!(adjacency_radius >= 1, "adjacency radius must be >= 1");
    if set.is_empty() {
        return ClusterDecomposition {
            adjacency_radius,
            cluster_of: Vec::new(),
            sizes: Vec::new(),
            empty_input: true,
        };
    }
    let n = set.num_variables();
    let k = set.domain_size();
    let mut dsu = Dsu::new(set.len());
    let mut scratch: Vec<u8> = Vec::with_capacity(n);
    let mut words = vec![0u64; set.words_per];
    for i in 0..set.len() {
        scratch.clear();
        scratch.extend((0..n).map(|v| set.unpack_digit(i, v)));
        probe_ball(
            set, &mut dsu, i as u32, &mut scratch, &mut words, 0, adjacency_radius, k,
        );
    }
    // renumber components in order of first appearance
    let mut relabel: HashMap<u32, u32> = HashMap::new();
    let mut cluster_of = Vec::with_capacity(set.len());
    let mut sizes: Vec<u64> = Vec::new();
    for i in 0..set.len() {
        let root = dsu.find(i as u32);
        let next = relabel.len() as u32;
        let id = *relabel.entry(root).or_insert(next);
        if id as usize == sizes.len() {
            sizes.push(0);
        }
        sizes[id as usize] += 1;
        cluster_of.push(id);
    }
    ClusterDecomposition { adjacency_radius, cluster_of, sizes, empty_input: false }
}

/// Recursively flip up to `remaining` positions starting at `from`,
/// and union with any solution found in the ball.
#[allow(clippy::too_many_arguments)]
fn probe_ball(
    set: &SolutionSet,
    dsu: &mut Dsu,
    origin: u32,
    values: &mut Vec<u8>,
    words: &mut [u64],
    from: usize,
    remaining: usize,
    k: u8,
) {
    if remaining == 0 {
        return;
    }
    let n = values.len();
    for v in from..n {
        let saved = values[v];
        for d in 0..k {
            if d == saved {
                continue;
            }
            values[v] = d;
            set.pack_into(values, words);
            if let Some(&j) = set.index.get(&words[..]) {
                dsu.union(origin, j);
            }
            probe_ball(set, dsu, origin, values, words, v + 1, remaining - 1, k);
        }
        values[v] = saved;
    }
}

// ---------------------------------------------------------------------------
// bottleneck paths
// ---------------------------------------------------------------------------

/// Minimum over all radius-1 paths from `sigma` to `tau` of the maximum
/// H along the path, endpoints included. Bottleneck shortest path by
/// best-first search with a bucket queue (H values are small integers).
pub fn path_height(
    instance: &Instance,
    sigma: &Assignment,
    tau: &Assignment,
    budget: u64,
) -> Result<u32> {
    let n = instance.num_variables();
    let k = instance.domain_size();
    let h_sigma = instance.violated_count(sigma)? as u32;
    let h_tau = instance.violated_count(tau)? as u32;
    if sigma == tau {
        return Ok(h_sigma);
    }
    let states = state_space_size(n, k, budget)?;

    let rank = |values: &[u8]| -> u64 {
        let mut r = 0u64;
        for &v in values.iter().rev() {
            r = r * k as u64 + v as u64;
        }
        r
    };
    let target = rank(tau.values());

    // per-variable constraint adjacency for delta-evaluation of H
    let mut adjacent: Vec<Vec<usize>> = vec![Vec::new(); n];
    for c in 0..instance.num_constraints() {
        for v in instance.constraint_vars(c) {
            adjacent[v as usize].push(c);
        }
    }

    let mut best: Vec<u32> = vec![u32::MAX; states as usize];
    let max_h = instance.num_constraints() as u32;
    let mut buckets: Vec<Vec<u64>> = vec![Vec::new(); (max_h + 1) as usize];
    let start_key = h_sigma;
    best[rank(sigma.values()) as usize] = start_key;
    buckets[start_key as usize].push(rank(sigma.values()));

    let mut values = vec![0u8; n];
    let mut level = start_key as usize;
    loop {
        while level < buckets.len() && buckets[level].is_empty() {
            level += 1; // keys are monotone, no rewind needed
        }
        if level >= buckets.len() {
            unreachable!("target state is always reachable in a finite full space");
        }
        let state = buckets[level].pop().unwrap();
        if (best[state as usize] as usize) < level {
            continue; // stale entry
        }
        if state == target {
            return Ok((level as u32).max(h_tau));
        }
        // unpack
        let mut r = state;
        for v in values.iter_mut() {
            *v = (r % k as u64) as u8;
            r /= k as u64;
        }
        let h_here = instance.violated_count_raw(&values) as i64;
        let mut power = 1u64;
        for var in 0..n {
            let old = values[var];
            for d in 0..k {
                if d == old {
                    continue;
                }
                let neighbor = state
                    .wrapping_add((d as u64).wrapping_sub(old as u64).wrapping_mul(power));
                let mut h_n = h_here;
                for &c in &adjacent[var] {
                    values[var] = old;
                    let was = instance.constraint_violated(c, &values);
                    values[var] = d;
                    let now = instance.constraint_violated(c, &values);
                    h_n += now as i64 - was as i64;
                }
                values[var] = old;
                let key = level.max(h_n as usize);
                if (key as u32) < best[neighbor as usize] {
                    best[neighbor as usize] = key as u32;
                    buckets[key].push(neighbor);
                }
            }
            power *= k as u64;
        }
    }
}

/// Minimum Hamming distance between solutions in distinct clusters.
pub fn min_intercluster_distance(
    set: &SolutionSet,
    decomposition: &ClusterDecomposition,
) -> Result<usize> {
    if decomposition.cluster_count() < 2 {
        return Err(Error::undefined(
            "inter-cluster distance needs at least two clusters",
        ));
    }
    let floor = decomposition.adjacency_radius + 1;
    let mut best = usize::MAX;
    'outer: for i in 0..set.len() {
        for j in i + 1..set.len() {
            if decomposition.cluster_of[i] == decomposition.cluster_of[j] {
                continue;
            }
            let d = set.distance(i, j);
            if d < best {
                best = d;
                if best == floor {
                    break 'outer;
                }
            }
        }
    }
    Ok(best)
}
