//! The three CSP ensembles and their instance generators.
//!
//! Supported ensembles:
//! - graph k-coloring (`GraphInstance`): binary constraints, k-ary domain;
//! - random k-SAT (`CnfInstance`): k-ary signed clauses, Boolean domain;
//! - k-uniform hypergraph NAE 2-coloring (`HypergraphInstance`): unsigned
//!   hyperedges, Boolean domain, violated when monochromatic.
//!
//! Every generator is a pure function of `(parameters, seed)`. Constraints
//! are sampled without replacement by default; an independent-inclusion
//! mode (each admissible constraint kept with probability p) is available
//! through [`ConstraintSampling`]. Planted generators first draw an
//! assignment and then sample only constraints it satisfies, so the
//! planted assignment always has zero violations on the emitted instance.

mod serialize;

pub use serialize::{parse_instance, to_dimacs, write_instance};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::rng::{derive, Rng};

/// How a generator turns the admissible-constraint universe into an
/// instance: a fixed count of distinct constraints, or each constraint
/// independently with probability p.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstraintSampling {
    Distinct(usize),
    IndependentProb(f64),
}

/// How planted generators draw the hidden assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PlantedPartition {
    /// A uniformly random function into the domain (the default).
    #[default]
    Uniform,
    /// Uniform among assignments whose class sizes are as equal as
    /// possible (sizes differ by at most one).
    ExactlyBalanced,
}

/// Retry budget when a sampled planted assignment admits fewer
/// compatible constraints than requested.
pub const MAX_PLANT_RETRIES: usize = 100;

/// A literal: variable index plus negation flag.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    /// True under `assignment`?
    #[inline]
    pub fn satisfied_by(&self, values: &[u8]) -> bool {
        (values[self.var as usize] == 1) != self.negated
    }
}

/// A clause: k distinct variables, each with a sign. Kept sorted by
/// variable index so clause equality is signed-set equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn new(mut literals: Vec<Literal>) -> Self {
        literals.sort_unstable();
        Clause { literals }
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn satisfied_by(&self, values: &[u8]) -> bool {
        self.literals.iter().any(|l| l.satisfied_by(values))
    }
}

/// Graph instance for k-coloring: n vertices, undirected distinct edges.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphInstance {
    pub n: usize,
    pub k: u8,
    /// Edges as (u, v) with u < v, sorted, no duplicates.
    pub edges: Vec<(u32, u32)>,
}

/// k-CNF instance: n Boolean variables, m distinct signed clauses.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CnfInstance {
    pub n: usize,
    pub k: usize,
    pub clauses: Vec<Clause>,
}

/// k-uniform hypergraph for NAE 2-coloring: m distinct k-subsets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HypergraphInstance {
    pub n: usize,
    pub k: usize,
    /// Each edge sorted ascending; edge list sorted, no duplicates.
    pub edges: Vec<Vec<u32>>,
}

/// A tagged constraint set from one of the three ensembles.
#[derive(Clone, PartialEq, Debug)]
pub enum Instance {
    Coloring(GraphInstance),
    Sat(CnfInstance),
    Nae(HypergraphInstance),
}

impl Instance {
    pub fn num_variables(&self) -> usize {
        match self {
            Instance::Coloring(g) => g.n,
            Instance::Sat(f) => f.n,
            Instance::Nae(h) => h.n,
        }
    }

    pub fn domain_size(&self) -> u8 {
        match self {
            Instance::Coloring(g) => g.k,
            Instance::Sat(_) | Instance::Nae(_) => 2,
        }
    }

    pub fn num_constraints(&self) -> usize {
        match self {
            Instance::Coloring(g) => g.edges.len(),
            Instance::Sat(f) => f.clauses.len(),
            Instance::Nae(h) => h.edges.len(),
        }
    }

    pub fn ensemble_name(&self) -> &'static str {
        match self {
            Instance::Coloring(_) => "coloring",
            Instance::Sat(_) => "sat",
            Instance::Nae(_) => "nae",
        }
    }

    /// Variables of constraint `c`, in ascending order.
    pub fn constraint_vars(&self, c: usize) -> Vec<u32> {
        match self {
            Instance::Coloring(g) => {
                let (u, v) = g.edges[c];
                vec![u, v]
            }
            Instance::Sat(f) => f.clauses[c].literals.iter().map(|l| l.var).collect(),
            Instance::Nae(h) => h.edges[c].clone(),
        }
    }

    /// Is constraint `c` violated under `values`?
    #[inline]
    pub fn constraint_violated(&self, c: usize, values: &[u8]) -> bool {
        match self {
            Instance::Coloring(g) => {
                let (u, v) = g.edges[c];
                values[u as usize] == values[v as usize]
            }
            Instance::Sat(f) => !f.clauses[c].satisfied_by(values),
            Instance::Nae(h) => {
                let first = values[h.edges[c][0] as usize];
                h.edges[c].iter().all(|&v| values[v as usize] == first)
            }
        }
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.num_variables() {
            return Err(Error::parameter(format!(
                "assignment length {} != variable count {}",
                a.len(),
                self.num_variables()
            )));
        }
        if a.domain_size() != self.domain_size() {
            return Err(Error::parameter(format!(
                "assignment domain {} != instance domain {}",
                a.domain_size(),
                self.domain_size()
            )));
        }
        Ok(())
    }

    /// H(a): the number of violated constraints. Zero iff `a` is a solution.
    pub fn violated_count(&self, a: &Assignment) -> Result<usize> {
        self.check_assignment(a)?;
        Ok(self.violated_count_raw(a.values()))
    }

    /// As `violated_count` but over a raw value slice, skipping the
    /// dimension checks. Callers own the precondition.
    #[inline]
    pub fn violated_count_raw(&self, values: &[u8]) -> usize {
        (0..self.num_constraints())
            .filter(|&c| self.constraint_violated(c, values))
            .count()
    }

    pub fn is_solution(&self, a: &Assignment) -> Result<bool> {
        Ok(self.violated_count(a)? == 0)
    }
}

// ---------------------------------------------------------------------------
// combinatorial unranking helpers
// ---------------------------------------------------------------------------

/// Binomial coefficient as u128, or None on overflow.
pub(crate) fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

fn binomial_u64(n: u64, k: u64) -> Result<u64> {
    let b = binomial_u128(n, k)
        .ok_or_else(|| Error::resource(format!("binomial({n},{k}) overflows u128")))?;
    u64::try_from(b).map_err(|_| Error::resource(format!("binomial({n},{k}) exceeds u64")))
}

/// Unrank a pair {u, v} with u < v < n from the colex order
/// (0,1), (0,2), (1,2), (0,3), ...: rank = C(v,2) + u.
fn unrank_pair(rank: u64) -> (u32, u32) {
    // v = largest integer with C(v,2) <= rank
    let mut v = ((2.0 * rank as f64).sqrt() as u64).max(1);
    while v * (v - 1) / 2 > rank {
        v -= 1;
    }
    while (v + 1) * v / 2 <= rank {
        v += 1;
    }
    let u = rank - v * (v - 1) / 2;
    (u as u32, v as u32)
}

/// Unrank a k-subset of {0..n-1} in colex order: rank = sum C(c_i, i+1)
/// over ascending elements c_1 < .. < c_k.
fn unrank_subset(mut rank: u64, n: u64, k: u64) -> Vec<u32> {
    let mut out = vec![0u32; k as usize];
    let mut c = n;
    for i in (1..=k).rev() {
        // largest c with C(c, i) <= rank
        while binomial_u128(c, i).is_none_or(|b| b > rank as u128) {
            c -= 1;
        }
        out[i as usize - 1] = c as u32;
        rank -= binomial_u128(c, i).unwrap() as u64;
    }
    out
}

fn sample_ranks(rng: &mut Rng, universe: u64, mode: ConstraintSampling) -> Result<Vec<u64>> {
    match mode {
        ConstraintSampling::Distinct(m) => {
            if (m as u64) > universe {
                return Err(Error::parameter(format!(
                    "m = {m} exceeds the {universe} admissible constraints"
                )));
            }
            Ok(rng.distinct_sorted(universe, m as u64))
        }
        ConstraintSampling::IndependentProb(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::parameter("inclusion probability outside [0,1]"));
            }
            Ok(rng.independent_sorted(universe, p))
        }
    }
}

// ---------------------------------------------------------------------------
// uniform generators
// ---------------------------------------------------------------------------

/// Uniform graph with m distinct edges on n vertices (Erdos-Renyi G(n,m)).
pub fn gen_uniform_graph(n: usize, m: usize, k: u8, seed: u64) -> Result<GraphInstance> {
    gen_uniform_graph_mode(n, k, ConstraintSampling::Distinct(m), seed)
}

pub fn gen_uniform_graph_mode(
    n: usize,
    k: u8,
    mode: ConstraintSampling,
    seed: u64,
) -> Result<GraphInstance> {
    if k < 2 {
        return Err(Error::parameter("k must be at least 2"));
    }
    let universe = binomial_u64(n as u64, 2)?;
    let mut rng = Rng::new(seed);
    let mut edges: Vec<(u32, u32)> = sample_ranks(&mut rng, universe, mode)?
        .into_iter()
        .map(unrank_pair)
        .collect();
    edges.sort_unstable();
    Ok(GraphInstance { n, k, edges })
}

/// Uniform k-CNF with m distinct signed clauses on n variables.
pub fn gen_uniform_cnf(n: usize, m: usize, k: usize, seed: u64) -> Result<CnfInstance> {
    gen_uniform_cnf_mode(n, k, ConstraintSampling::Distinct(m), seed)
}

pub fn gen_uniform_cnf_mode(
    n: usize,
    k: usize,
    mode: ConstraintSampling,
    seed: u64,
) -> Result<CnfInstance> {
    if k > n || k == 0 {
        return Err(Error::parameter("need 1 <= k <= n"));
    }
    if k >= 63 {
        return Err(Error::parameter("clause width too large"));
    }
    let subsets = binomial_u64(n as u64, k as u64)?;
    let signs = 1u64 << k;
    let universe = subsets
        .checked_mul(signs)
        .ok_or_else(|| Error::resource("clause universe exceeds u64"))?;
    let mut rng = Rng::new(seed);
    let clauses = sample_ranks(&mut rng, universe, mode)?
        .into_iter()
        .map(|rank| {
            let subset = unrank_subset(rank / signs, n as u64, k as u64);
            let pattern = rank % signs;
            clause_from_parts(&subset, pattern)
        })
        .collect();
    Ok(CnfInstance { n, k, clauses })
}

fn clause_from_parts(vars: &[u32], pattern: u64) -> Clause {
    Clause::new(
        vars.iter()
            .enumerate()
            .map(|(i, &var)| Literal { var, negated: pattern >> i & 1 == 1 })
            .collect(),
    )
}

/// Uniform k-uniform hypergraph with m distinct edges on n vertices.
pub fn gen_uniform_hypergraph(n: usize, m: usize, k: usize, seed: u64) -> Result<HypergraphInstance> {
    gen_uniform_hypergraph_mode(n, k, ConstraintSampling::Distinct(m), seed)
}

pub fn gen_uniform_hypergraph_mode(
    n: usize,
    k: usize,
    mode: ConstraintSampling,
    seed: u64,
) -> Result<HypergraphInstance> {
    if k > n || k == 0 {
        return Err(Error::parameter("need 1 <= k <= n"));
    }
    let universe = binomial_u64(n as u64, k as u64)?;
    let mut rng = Rng::new(seed);
    let mut edges: Vec<Vec<u32>> = sample_ranks(&mut rng, universe, mode)?
        .into_iter()
        .map(|rank| unrank_subset(rank, n as u64, k as u64))
        .collect();
    edges.sort_unstable();
    Ok(HypergraphInstance { n, k, edges })
}

// ---------------------------------------------------------------------------
// planted generators
// ---------------------------------------------------------------------------

fn sample_partition(rng: &mut Rng, n: usize, k: u8, mode: PlantedPartition) -> Assignment {
    match mode {
        PlantedPartition::Uniform => {
            let values = (0..n).map(|_| rng.below(k as u64) as u8).collect();
            Assignment::new(values, k).unwrap()
        }
        PlantedPartition::ExactlyBalanced => {
            // n = q*k + r: r classes of size q+1, chosen uniformly, then a
            // uniform shuffle of the label multiset over the vertices.
            let q = n / k as usize;
            let r = n % k as usize;
            let mut big: Vec<u8> = (0..k).collect();
            rng.shuffle(&mut big);
            let big = &big[..r];
            let mut labels = Vec::with_capacity(n);
            for c in 0..k {
                let size = q + usize::from(big.contains(&c));
                labels.extend(std::iter::repeat_n(c, size));
            }
            rng.shuffle(&mut labels);
            Assignment::new(labels, k).unwrap()
        }
    }
}

/// Number of unordered bichromatic pairs under sigma:
/// (n^2 - sum_i |class_i|^2) / 2.
pub fn bichromatic_pair_count(sigma: &Assignment) -> u64 {
    let n = sigma.len() as u64;
    let mut class_sq = 0u64;
    let mut counts = vec![0u64; sigma.domain_size() as usize];
    for &v in sigma.values() {
        counts[v as usize] += 1;
    }
    for c in counts {
        class_sq += c * c;
    }
    (n * n - class_sq) / 2
}

/// Planted k-coloring: sigma uniform over [k]^n, then m distinct edges
/// uniform among the pairs bicolored under sigma. Retried fresh sigmas
/// (up to [`MAX_PLANT_RETRIES`]) when sigma admits fewer than m pairs.
pub fn gen_planted_coloring(
    n: usize,
    m: usize,
    k: u8,
    seed: u64,
) -> Result<(GraphInstance, Assignment)> {
    gen_planted_coloring_mode(
        n,
        k,
        ConstraintSampling::Distinct(m),
        PlantedPartition::Uniform,
        seed,
    )
}

pub fn gen_planted_coloring_mode(
    n: usize,
    k: u8,
    mode: ConstraintSampling,
    partition: PlantedPartition,
    seed: u64,
) -> Result<(GraphInstance, Assignment)> {
    if k < 2 {
        return Err(Error::parameter("k must be at least 2"));
    }
    for attempt in 0..MAX_PLANT_RETRIES {
        let mut rng = Rng::new(derive(seed, attempt as u64));
        let sigma = sample_partition(&mut rng, n, k, partition);
        let universe = bichromatic_pair_count(&sigma);
        if let ConstraintSampling::Distinct(m) = mode {
            if (m as u64) > universe {
                continue; // resample sigma
            }
        }
        // Unranking for bichromatic pairs: class members listed per color,
        // ordered class pairs (i<j) laid out as blocks of size |Vi|*|Vj|.
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); k as usize];
        for (v, &c) in sigma.values().iter().enumerate() {
            members[c as usize].push(v as u32);
        }
        let mut blocks = Vec::new(); // (i, j, block_size), cumulative
        let mut total = 0u64;
        for i in 0..k as usize {
            for j in i + 1..k as usize {
                let size = members[i].len() as u64 * members[j].len() as u64;
                if size > 0 {
                    blocks.push((i, j, total));
                    total += size;
                }
            }
        }
        debug_assert_eq!(total, universe);
        let ranks = sample_ranks(&mut rng, universe, mode)?;
        let mut edges: Vec<(u32, u32)> = ranks
            .into_iter()
            .map(|rank| {
                let idx = match blocks.binary_search_by(|&(_, _, start)| start.cmp(&rank)) {
                    Ok(i) => i,
                    Err(i) => i - 1,
                };
                let (i, j, start) = blocks[idx];
                let off = rank - start;
                let a = members[i][(off / members[j].len() as u64) as usize];
                let b = members[j][(off % members[j].len() as u64) as usize];
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        return Ok((GraphInstance { n, k, edges }, sigma));
    }
    Err(Error::parameter(format!(
        "no sampled partition admitted the requested edge count after {MAX_PLANT_RETRIES} attempts"
    )))
}

/// Planted k-SAT: sigma uniform over {0,1}^n, then m distinct clauses
/// uniform among the (2^k - 1) * C(n, k) clauses satisfied by sigma.
pub fn gen_planted_cnf(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
) -> Result<(CnfInstance, Assignment)> {
    gen_planted_cnf_mode(n, k, ConstraintSampling::Distinct(m), PlantedPartition::Uniform, seed)
}

pub fn gen_planted_cnf_mode(
    n: usize,
    k: usize,
    mode: ConstraintSampling,
    partition: PlantedPartition,
    seed: u64,
) -> Result<(CnfInstance, Assignment)> {
    if k > n || k == 0 {
        return Err(Error::parameter("need 1 <= k <= n"));
    }
    if k >= 63 {
        return Err(Error::parameter("clause width too large"));
    }
    let mut rng = Rng::new(derive(seed, 0));
    let sigma = sample_partition(&mut rng, n, 2, partition);
    let subsets = binomial_u64(n as u64, k as u64)?;
    let signs_ok = (1u64 << k) - 1; // per subset, all patterns but the falsifying one
    let universe = subsets
        .checked_mul(signs_ok)
        .ok_or_else(|| Error::resource("clause universe exceeds u64"))?;
    let clauses = sample_ranks(&mut rng, universe, mode)?
        .into_iter()
        .map(|rank| {
            let subset = unrank_subset(rank / signs_ok, n as u64, k as u64);
            // The unique pattern falsified by sigma negates exactly the
            // variables sigma sets true; skip over it when unranking.
            let forbidden: u64 = subset
                .iter()
                .enumerate()
                .map(|(i, &v)| ((sigma.value(v as usize) == 1) as u64) << i)
                .sum();
            let mut t = rank % signs_ok;
            if t >= forbidden {
                t += 1;
            }
            clause_from_parts(&subset, t)
        })
        .collect();
    Ok((CnfInstance { n, k, clauses }, sigma))
}

/// Number of k-subsets non-monochromatic under a Boolean sigma.
pub fn nonmono_subset_count(n: usize, ones: usize, k: usize) -> u64 {
    let all = binomial_u128(n as u64, k as u64).unwrap_or(u128::MAX);
    let mono0 = binomial_u128((n - ones) as u64, k as u64).unwrap_or(0);
    let mono1 = binomial_u128(ones as u64, k as u64).unwrap_or(0);
    (all - mono0 - mono1) as u64
}

/// Planted NAE 2-coloring: sigma uniform over {0,1}^n, then m distinct
/// k-subsets uniform among those containing both colors under sigma.
pub fn gen_planted_nae(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
) -> Result<(HypergraphInstance, Assignment)> {
    gen_planted_nae_mode(n, k, ConstraintSampling::Distinct(m), PlantedPartition::Uniform, seed)
}

pub fn gen_planted_nae_mode(
    n: usize,
    k: usize,
    mode: ConstraintSampling,
    partition: PlantedPartition,
    seed: u64,
) -> Result<(HypergraphInstance, Assignment)> {
    if k > n || k == 0 {
        return Err(Error::parameter("need 1 <= k <= n"));
    }
    let all_subsets = binomial_u64(n as u64, k as u64)?;
    if all_subsets > 1 << 26 {
        return Err(Error::resource(
            "planted NAE generation enumerates the subset universe; C(n,k) too large",
        ));
    }
    for attempt in 0..MAX_PLANT_RETRIES {
        let mut rng = Rng::new(derive(seed, attempt as u64));
        let sigma = sample_partition(&mut rng, n, 2, partition);
        let ones = sigma.values().iter().filter(|&&v| v == 1).count();
        let universe = nonmono_subset_count(n, ones, k);
        if let ConstraintSampling::Distinct(m) = mode {
            if (m as u64) > universe {
                continue;
            }
        }
        // The non-monochromatic subsets have no convenient direct unranking,
        // so rank them by filtering the full colex order. Cheap because the
        // whole subset universe is enumerable at desk scale; for the
        // independent mode, thin the admissible list instead.
        let is_mono = |subset: &[u32]| {
            let first = sigma.value(subset[0] as usize);
            subset.iter().all(|&v| sigma.value(v as usize) == first)
        };
        let admissible: Vec<u64> = (0..all_subsets)
            .filter(|&r| !is_mono(&unrank_subset(r, n as u64, k as u64)))
            .collect();
        debug_assert_eq!(admissible.len() as u64, universe);
        let picks = sample_ranks(&mut rng, universe, mode)?;
        let mut edges: Vec<Vec<u32>> = picks
            .into_iter()
            .map(|r| unrank_subset(admissible[r as usize], n as u64, k as u64))
            .collect();
        edges.sort_unstable();
        return Ok((HypergraphInstance { n, k, edges }, sigma));
    }
    Err(Error::parameter(format!(
        "no sampled assignment admitted the requested edge count after {MAX_PLANT_RETRIES} attempts"
    )))
}
