//! Constructive processes over planted/typical solutions: the recoloring
//! (looseness) process, the coloring rigid-core stripping process, the
//! k-SAT support-core process, and the subset-density check that links
//! cores to rigidity.

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instances::{CnfInstance, GraphInstance, Instance};
use crate::rng::Rng;
use serde::Serialize;
use std::collections::VecDeque;

/// Default list length for the recoloring process.
pub const DEFAULT_RECOLOR_Q: u8 = 5;

/// Default cascade threshold for the stripping process ("at least this
/// many neighbors already removed drags a vertex in").
pub const DEFAULT_Z_THRESHOLD: usize = 10;

/// Node cap for the list-coloring backtracker inside the recoloring
/// process; exceeding it is a resource error, never a fake "infeasible".
pub const LIST_COLOR_NODE_CAP: u64 = 10_000_000;

// ---------------------------------------------------------------------------
// recoloring process
// ---------------------------------------------------------------------------

/// One killed vertex together with the color list recorded for it.
#[derive(Clone, Debug, Serialize)]
pub struct DeadRecord {
    pub vertex: usize,
    /// Recorded colors c_1..c_q (just the target for the seed vertex).
    pub colors: Vec<u8>,
    /// True when the vertex had >= q colors free of neighbors and so
    /// woke nobody.
    pub had_free_colors: bool,
}

#[derive(Clone, Debug, Serialize)]
pub enum RecolorOutcome {
    /// A proper coloring that gives the target vertex its target color,
    /// differing from sigma only on the dead set.
    Recolored(Vec<u8>),
    /// The dead-set list-coloring attempt proved infeasible.
    ListColoringInfeasible,
}

/// Full trace of a recoloring run, exportable as JSON for replay.
#[derive(Clone, Debug, Serialize)]
pub struct RecolorTrace {
    pub target_vertex: usize,
    pub target_color: u8,
    pub k: u8,
    /// Dead vertices in kill order; the target vertex is always first.
    pub dead: Vec<DeadRecord>,
    pub outcome: RecolorOutcome,
}

impl RecolorTrace {
    pub fn recolored(&self) -> Option<Assignment> {
        match &self.outcome {
            RecolorOutcome::Recolored(values) => {
                Some(Assignment::new(values.clone(), self.k).unwrap())
            }
            RecolorOutcome::ListColoringInfeasible => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Clone, Copy, PartialEq)]
enum VertexState {
    Asleep,
    Awake,
    Dead,
}

/// Run the awake/dead/asleep recoloring process from a proper coloring
/// `sigma`, trying to hand `target_color` to `v0` while changing only a
/// small set of vertices.
///
/// Each step kills the oldest awake vertex w (FIFO). If w has at least q
/// colors with no neighbor, q of them are recorded and nobody wakes;
/// otherwise q random colors are recorded and w's sleeping neighbors in
/// those classes wake up. On termination the dead set is list-colored by
/// exact backtracking with lists {c_1(w)..c_q(w)} minus the target color
/// (the seed vertex's list is just the target color).
pub fn recolor_process(
    graph: &GraphInstance,
    sigma: &Assignment,
    v0: usize,
    target_color: u8,
    q: u8,
    seed: u64,
) -> Result<RecolorTrace> {
    let inst = Instance::Coloring(graph.clone());
    if inst.violated_count(sigma)? != 0 {
        return Err(Error::parameter("sigma must be a proper coloring"));
    }
    let k = graph.k;
    if v0 >= graph.n || target_color >= k {
        return Err(Error::parameter("target vertex or color out of range"));
    }
    if target_color == sigma.value(v0) {
        return Err(Error::parameter("target color must differ from sigma(v0)"));
    }
    if q < 2 {
        return Err(Error::parameter("q must be at least 2"));
    }

    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); graph.n];
    for &(u, v) in &graph.edges {
        adjacency[u as usize].push(v);
        adjacency[v as usize].push(u);
    }

    let mut rng = Rng::new(seed);
    let mut state = vec![VertexState::Asleep; graph.n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    state[v0] = VertexState::Dead;
    for &u in &adjacency[v0] {
        if sigma.value(u as usize) == target_color {
            state[u as usize] = VertexState::Awake;
            queue.push_back(u as usize);
        }
    }
    let mut dead = vec![DeadRecord { vertex: v0, colors: vec![target_color], had_free_colors: false }];

    while let Some(w) = queue.pop_front() {
        state[w] = VertexState::Dead;
        // colors in which w has no neighbor at all (its own class always
        // qualifies under a proper sigma)
        let mut has_neighbor = vec![false; k as usize];
        for &u in &adjacency[w] {
            has_neighbor[sigma.value(u as usize) as usize] = true;
        }
        let free: Vec<u8> = (0..k).filter(|&c| !has_neighbor[c as usize]).collect();
        // For k <= q a full list of q distinct colors cannot exist; the
        // process still runs (with the whole palette) and failure of the
        // final list-coloring is a legal outcome.
        let want = (q as usize).min(k as usize);
        let (colors, had_free) = if free.len() >= q as usize {
            (rng.sample_from(&free, want), true)
        } else {
            let all: Vec<u8> = (0..k).collect();
            (rng.sample_from(&all, want), false)
        };
        if !had_free {
            for &c in &colors {
                for &u in &adjacency[w] {
                    let u = u as usize;
                    if sigma.value(u) == c && state[u] == VertexState::Asleep {
                        state[u] = VertexState::Awake;
                        queue.push_back(u);
                    }
                }
            }
        }
        dead.push(DeadRecord { vertex: w, colors, had_free_colors: had_free });
    }

    // list-color the dead-induced subgraph
    let dead_ids: Vec<usize> = dead.iter().map(|d| d.vertex).collect();
    let mut dead_pos = vec![usize::MAX; graph.n];
    for (i, &v) in dead_ids.iter().enumerate() {
        dead_pos[v] = i;
    }
    let lists: Vec<Vec<u8>> = dead
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            if i == 0 {
                vec![target_color]
            } else {
                let mut l: Vec<u8> = rec
                    .colors
                    .iter()
                    .copied()
                    .filter(|&c| c != target_color)
                    .collect();
                l.dedup();
                l
            }
        })
        .collect();
    let sub_adj: Vec<Vec<usize>> = dead_ids
        .iter()
        .map(|&v| {
            adjacency[v]
                .iter()
                .filter_map(|&u| {
                    let p = dead_pos[u as usize];
                    (p != usize::MAX).then_some(p)
                })
                .collect()
        })
        .collect();

    let outcome = match list_color(&lists, &sub_adj)? {
        Some(choice) => {
            let mut values = sigma.values().to_vec();
            for (i, &v) in dead_ids.iter().enumerate() {
                values[v] = choice[i];
            }
            debug_assert_eq!(inst.violated_count_raw(&values), 0);
            RecolorOutcome::Recolored(values)
        }
        None => RecolorOutcome::ListColoringInfeasible,
    };
    Ok(RecolorTrace { target_vertex: v0, target_color, k, dead, outcome })
}

/// Exact list-coloring by backtracking, branching on shortest lists
/// first. Returns a per-vertex color choice, or None when provably
/// infeasible.
fn list_color(lists: &[Vec<u8>], adjacency: &[Vec<usize>]) -> Result<Option<Vec<u8>>> {
    let n = lists.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| lists[v].len());
    let mut chosen: Vec<Option<u8>> = vec![None; n];
    let mut nodes = 0u64;

    fn dfs(
        pos: usize,
        order: &[usize],
        lists: &[Vec<u8>],
        adjacency: &[Vec<usize>],
        chosen: &mut Vec<Option<u8>>,
        nodes: &mut u64,
    ) -> Result<bool> {
        if pos == order.len() {
            return Ok(true);
        }
        *nodes += 1;
        if *nodes > LIST_COLOR_NODE_CAP {
            return Err(Error::resource("list-coloring search exceeded its node cap"));
        }
        let v = order[pos];
        for &c in &lists[v] {
            if adjacency[v].iter().any(|&u| chosen[u] == Some(c)) {
                continue;
            }
            chosen[v] = Some(c);
            if dfs(pos + 1, order, lists, adjacency, chosen, nodes)? {
                return Ok(true);
            }
            chosen[v] = None;
        }
        Ok(false)
    }

    if dfs(0, &order, lists, adjacency, &mut chosen, &mut nodes)? {
        Ok(Some(chosen.into_iter().map(|c| c.unwrap()).collect()))
    } else {
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// core stripping
// ---------------------------------------------------------------------------

/// Phase that removed a variable from the core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RemovalPhase {
    /// Low cross-class degree (coloring step 1).
    W,
    /// Too many edges into W (coloring step 2).
    U,
    /// Cascade (coloring step 3 / SAT step 2).
    Z,
    /// Low support (SAT step 1).
    Z0,
}

/// Result of a stripping run: the surviving core, the removal log, and
/// the per-survivor verification of the core property.
#[derive(Clone, Debug, Serialize)]
pub struct CoreResult {
    pub survivors: Vec<usize>,
    pub removals: Vec<(usize, RemovalPhase)>,
    pub gamma: f64,
    /// Verification threshold parameter (gamma/2 for coloring, gamma for SAT).
    pub beta: f64,
    /// Per-survivor outcome of the recorded core property.
    pub per_variable_ok: Vec<(usize, bool)>,
    /// All survivors passed (vacuously true for an empty core).
    pub verified: bool,
}

impl CoreResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn core_fraction(&self, n: usize) -> f64 {
        self.survivors.len() as f64 / n as f64
    }
}

/// Deterministic stripping process for a planted/proper coloring:
///
/// 1. W: vertices with fewer than gamma*ln k neighbors in some other
///    color class (strict inequality, real-valued threshold);
/// 2. U: vertices with more than (gamma/2)*ln k edges into some W_i;
/// 3. Z: close U under "has at least `z_threshold` neighbors in Z";
/// 4. core = V minus W minus Z.
///
/// The returned result records, for every survivor v and every color
/// i != sigma(v), whether v keeps at least (gamma/2)*ln k core neighbors
/// colored i.
pub fn strip_core_coloring(
    graph: &GraphInstance,
    sigma: &Assignment,
    gamma: f64,
) -> Result<CoreResult> {
    strip_core_coloring_with(graph, sigma, gamma, DEFAULT_Z_THRESHOLD)
}

pub fn strip_core_coloring_with(
    graph: &GraphInstance,
    sigma: &Assignment,
    gamma: f64,
    z_threshold: usize,
) -> Result<CoreResult> {
    let inst = Instance::Coloring(graph.clone());
    if inst.violated_count(sigma)? != 0 {
        return Err(Error::parameter("sigma must be a proper coloring"));
    }
    if gamma <= 0.0 {
        return Err(Error::parameter("gamma must be positive"));
    }
    let n = graph.n;
    let k = graph.k as usize;
    let w_threshold = gamma * (k as f64).ln();
    let u_threshold = gamma / 2.0 * (k as f64).ln();

    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v) in &graph.edges {
        adjacency[u as usize].push(v);
        adjacency[v as usize].push(u);
    }
    // cross_count[v][j]: neighbors of v with color j
    let mut cross_count = vec![0u32; n * k];
    for (v, adj) in adjacency.iter().enumerate() {
        for &u in adj {
            cross_count[v * k + sigma.value(u as usize) as usize] += 1;
        }
    }

    // step 1: W_ij = { v in V_i : e(v, V_j) < gamma ln k }, j != i
    let mut in_w = vec![false; n];
    for v in 0..n {
        let own = sigma.value(v) as usize;
        in_w[v] = (0..k)
            .filter(|&j| j != own)
            .any(|j| (cross_count[v * k + j] as f64) < w_threshold);
    }
    // step 2: U_il = { v in V_l : e(v, W_i) > (gamma/2) ln k }, i != l
    let mut w_edges = vec![0u32; n * k]; // edges from v into W ∩ V_i
    for v in 0..n {
        for &u in &adjacency[v] {
            if in_w[u as usize] {
                w_edges[v * k + sigma.value(u as usize) as usize] += 1;
            }
        }
    }
    let mut in_u = vec![false; n];
    for v in 0..n {
        let own = sigma.value(v) as usize;
        in_u[v] = (0..k)
            .filter(|&i| i != own)
            .any(|i| (w_edges[v * k + i] as f64) > u_threshold);
    }
    // step 3: Z = U closed under the neighbor cascade (least fixpoint,
    // independent of scan order)
    let mut in_z = in_u.clone();
    loop {
        let mut changed = false;
        for v in 0..n {
            if in_z[v] {
                continue;
            }
            let z_neighbors = adjacency[v].iter().filter(|&&u| in_z[u as usize]).count();
            if z_neighbors >= z_threshold {
                in_z[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut removals = Vec::new();
    let mut survivors = Vec::new();
    for v in 0..n {
        if in_w[v] {
            removals.push((v, RemovalPhase::W));
        } else if in_u[v] {
            removals.push((v, RemovalPhase::U));
        } else if in_z[v] {
            removals.push((v, RemovalPhase::Z));
        } else {
            survivors.push(v);
        }
    }

    // verification: every survivor keeps >= (gamma/2) ln k core
    // neighbors in every other color class
    let in_core = {
        let mut c = vec![false; n];
        for &v in &survivors {
            c[v] = true;
        }
        c
    };
    let beta = gamma / 2.0;
    let verify_threshold = beta * (k as f64).ln();
    let per_variable_ok: Vec<(usize, bool)> = survivors
        .iter()
        .map(|&v| {
            let own = sigma.value(v) as usize;
            let mut core_cross = vec![0u32; k];
            for &u in &adjacency[v] {
                if in_core[u as usize] {
                    core_cross[sigma.value(u as usize) as usize] += 1;
                }
            }
            let ok = (0..k)
                .filter(|&i| i != own)
                .all(|i| core_cross[i] as f64 >= verify_threshold);
            (v, ok)
        })
        .collect();
    let verified = per_variable_ok.iter().all(|&(_, ok)| ok);
    Ok(CoreResult { survivors, removals, gamma, beta, per_variable_ok, verified })
}

// ---------------------------------------------------------------------------
// SAT support core
// ---------------------------------------------------------------------------

/// Number of clauses in which `variable`'s literal is the unique true
/// literal under `sigma`.
pub fn support_count(cnf: &CnfInstance, sigma: &Assignment, variable: usize) -> Result<usize> {
    let counts = support_counts(cnf, sigma)?;
    counts
        .get(variable)
        .copied()
        .ok_or_else(|| Error::parameter("variable out of range"))
}

/// Per-variable support counts; errors unless sigma satisfies the formula.
pub fn support_counts(cnf: &CnfInstance, sigma: &Assignment) -> Result<Vec<usize>> {
    let inst = Instance::Sat(cnf.clone());
    if inst.violated_count(sigma)? != 0 {
        return Err(Error::parameter("sigma must satisfy the formula"));
    }
    let mut counts = vec![0usize; cnf.n];
    for clause in &cnf.clauses {
        if let Some(var) = unique_true_literal(clause, sigma) {
            counts[var] += 1;
        }
    }
    Ok(counts)
}

fn unique_true_literal(clause: &crate::instances::Clause, sigma: &Assignment) -> Option<usize> {
    let mut found = None;
    for l in &clause.literals {
        if l.satisfied_by(sigma.values()) {
            if found.is_some() {
                return None;
            }
            found = Some(l.var as usize);
        }
    }
    found
}

/// Two-step support-core process over the uniquely satisfied clauses:
///
/// 1. Z0: variables supporting fewer than 2*gamma*ln k clauses;
/// 2. Z: close under "supports at least gamma*ln k uniquely satisfied
///    clauses containing a Z variable";
/// 3. core U = V minus Z.
///
/// Verification records, per survivor, whether it supports at least
/// gamma*ln k uniquely satisfied clauses whose variables all lie in U.
/// (A supported clause is uniquely satisfied by definition, so the
/// restriction to uniquely satisfied clauses is implied.)
pub fn support_core_sat(cnf: &CnfInstance, sigma: &Assignment, gamma: f64) -> Result<CoreResult> {
    if gamma <= 0.0 {
        return Err(Error::parameter("gamma must be positive"));
    }
    let counts = support_counts(cnf, sigma)?; // also checks sigma satisfies
    let n = cnf.n;
    let kf = (cnf.k as f64).ln();
    let z0_threshold = 2.0 * gamma * kf;
    let z_threshold = gamma * kf;

    // supporter and variable sets of each uniquely satisfied clause
    let xi: Vec<(usize, Vec<usize>)> = cnf
        .clauses
        .iter()
        .filter_map(|c| {
            unique_true_literal(c, sigma)
                .map(|s| (s, c.literals.iter().map(|l| l.var as usize).collect()))
        })
        .collect();

    let mut in_z = vec![false; n];
    for v in 0..n {
        if (counts[v] as f64) < z0_threshold {
            in_z[v] = true;
        }
    }
    let z0 = in_z.clone();
    loop {
        let mut changed = false;
        for v in 0..n {
            if in_z[v] {
                continue;
            }
            let supported_touching_z = xi
                .iter()
                .filter(|(s, vars)| *s == v && vars.iter().any(|&u| in_z[u]))
                .count();
            if supported_touching_z as f64 >= z_threshold {
                in_z[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut removals = Vec::new();
    let mut survivors = Vec::new();
    for v in 0..n {
        if z0[v] {
            removals.push((v, RemovalPhase::Z0));
        } else if in_z[v] {
            removals.push((v, RemovalPhase::Z));
        } else {
            survivors.push(v);
        }
    }
    let in_core = {
        let mut c = vec![false; n];
        for &v in &survivors {
            c[v] = true;
        }
        c
    };
    let per_variable_ok: Vec<(usize, bool)> = survivors
        .iter()
        .map(|&v| {
            let fully_inside = xi
                .iter()
                .filter(|(s, vars)| *s == v && vars.iter().all(|&u| in_core[u]))
                .count();
            (v, fully_inside as f64 >= z_threshold)
        })
        .collect();
    let verified = per_variable_ok.iter().all(|&(_, ok)| ok);
    Ok(CoreResult { survivors, removals, gamma, beta: gamma, per_variable_ok, verified })
}

// ---------------------------------------------------------------------------
// sparsity check
// ---------------------------------------------------------------------------

/// Outcome of the subset-density search: either no subset up to the size
/// bound spans `|S| * edge_factor` constraints, or a witness subset.
#[derive(Clone, Debug, Serialize)]
pub enum SparsityOutcome {
    Pass {
        /// True when the search enumerated every candidate subset.
        exhaustive: bool,
    },
    Witness {
        subset: Vec<usize>,
        /// Constraints with at least two variables inside the subset.
        spanned: usize,
        exhaustive: bool,
    },
}

impl SparsityOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, SparsityOutcome::Pass { .. })
    }

    pub fn is_exhaustive(&self) -> bool {
        match self {
            SparsityOutcome::Pass { exhaustive } | SparsityOutcome::Witness { exhaustive, .. } => {
                *exhaustive
            }
        }
    }
}

/// Variable count up to which the sparsity check enumerates all subsets.
pub const SPARSITY_EXACT_LIMIT: usize = 20;

/// Look for a subset S with |S| <= `subset_size_bound` spanning at least
/// |S| * `edge_factor` constraints, where a constraint is spanned when at
/// least two of its variables lie in S. Exhaustive for n <= 20; a seeded
/// randomized greedy search (flagged non-exhaustive) beyond that.
pub fn sparsity_check(
    instance: &Instance,
    subset_size_bound: usize,
    edge_factor: f64,
    seed: u64,
) -> Result<SparsityOutcome> {
    if subset_size_bound == 0 || edge_factor <= 0.0 {
        return Err(Error::parameter("bounds must be positive"));
    }
    let n = instance.num_variables();
    let bound = subset_size_bound.min(n);
    let membership: Vec<Vec<usize>> = (0..instance.num_constraints())
        .map(|c| instance.constraint_vars(c).iter().map(|&v| v as usize).collect())
        .collect();

    let spanned_by = |in_set: &[bool]| -> usize {
        membership
            .iter()
            .filter(|vars| vars.iter().filter(|&&v| in_set[v]).count() >= 2)
            .count()
    };

    if n <= SPARSITY_EXACT_LIMIT {
        let mut best: Option<(Vec<usize>, usize, f64)> = None;
        let mut in_set = vec![false; n];
        for mask in 1u32..1 << n {
            let size = mask.count_ones() as usize;
            if size > bound {
                continue;
            }
            for (v, flag) in in_set.iter_mut().enumerate() {
                *flag = mask >> v & 1 == 1;
            }
            let spanned = spanned_by(&in_set);
            if (spanned as f64) < size as f64 * edge_factor {
                continue;
            }
            let density = spanned as f64 / size as f64;
            if best.as_ref().is_none_or(|&(_, _, d)| density > d) {
                let subset = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                best = Some((subset, spanned, density));
            }
        }
        return Ok(match best {
            Some((subset, spanned, _)) => {
                SparsityOutcome::Witness { subset, spanned, exhaustive: true }
            }
            None => SparsityOutcome::Pass { exhaustive: true },
        });
    }

    // randomized greedy: grow from a random constraint, keep the densest
    // violating subset found
    let mut rng = Rng::new(seed);
    let mut best: Option<(Vec<usize>, usize, f64)> = None;
    let restarts = 200;
    for _ in 0..restarts {
        if membership.is_empty() {
            break;
        }
        let mut in_set = vec![false; n];
        let mut members: Vec<usize> = Vec::new();
        let start = &membership[rng.below_usize(membership.len())];
        for &v in start.iter().take(bound) {
            if !in_set[v] {
                in_set[v] = true;
                members.push(v);
            }
        }
        while members.len() < bound {
            // add the vertex spanning the most new constraints
            let mut best_gain = 0usize;
            let mut best_v = None;
            let current = spanned_by(&in_set);
            for c in &membership {
                let inside = c.iter().filter(|&&v| in_set[v]).count();
                if inside == 0 {
                    continue;
                }
                for &v in c {
                    if in_set[v] {
                        continue;
                    }
                    in_set[v] = true;
                    let gain = spanned_by(&in_set) - current;
                    in_set[v] = false;
                    if gain > best_gain || (gain == best_gain && best_v.is_none()) {
                        best_gain = gain;
                        best_v = Some(v);
                    }
                }
            }
            let Some(v) = best_v else { break };
            in_set[v] = true;
            members.push(v);
            let spanned = spanned_by(&in_set);
            if spanned as f64 >= members.len() as f64 * edge_factor {
                let density = spanned as f64 / members.len() as f64;
                if best.as_ref().is_none_or(|&(_, _, d)| density > d) {
                    let mut subset = members.clone();
                    subset.sort_unstable();
                    best = Some((subset, spanned, density));
                }
            }
        }
    }
    Ok(match best {
        Some((subset, spanned, _)) => SparsityOutcome::Witness { subset, spanned, exhaustive: false },
        None => SparsityOutcome::Pass { exhaustive: false },
    })
}
