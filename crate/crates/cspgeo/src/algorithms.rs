//! The reference heuristics whose empirical failure density tracks the
//! dynamical transition: the unit-clause rule for k-SAT and the
//! fewest-available-colors greedy rule for coloring. Both are run
//! verbatim with no backtracking; failure is an outcome, not an error.

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instances::{
    gen_uniform_cnf, gen_uniform_graph, gen_uniform_hypergraph, CnfInstance, GraphInstance,
    Instance,
};
use crate::rng::{derive2, Rng};
use crate::stats::wilson_interval;
use serde::Serialize;
use std::fmt::Write as _;

/// Work-unit ceiling multiplier: both heuristics touch each literal/edge
/// O(1) times, so total work stays below `WORK_CEILING_FACTOR * (n + m)`
/// elementary steps (debug-asserted).
pub const WORK_CEILING_FACTOR: usize = 64;

/// Where a run failed, when it did.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FailurePoint {
    /// A clause ran out of literals (all falsified).
    EmptyClause { clause: usize, step: usize },
    /// An uncolored vertex ran out of available colors.
    NoAvailableColor { vertex: usize, step: usize },
}

/// Outcome of a single heuristic run.
#[derive(Clone, Debug, Serialize)]
pub struct HeuristicOutcome {
    pub success: bool,
    #[serde(skip)]
    pub assignment: Option<Assignment>,
    /// Assignments made before termination.
    pub steps: usize,
    pub failure_point: Option<FailurePoint>,
}

/// The unit-clause rule: while variables remain, satisfy the
/// lowest-indexed unit clause if one exists, otherwise give a random
/// unassigned variable a random value. Simplifies after each
/// assignment; fails on an empty clause; never backtracks.
pub fn unit_clause_solve(cnf: &CnfInstance, seed: u64) -> HeuristicOutcome {
    let n = cnf.n;
    let m = cnf.clauses.len();
    let mut rng = Rng::new(seed);

    let mut assigned: Vec<Option<bool>> = vec![None; n];
    let mut satisfied = vec![false; m];
    let mut open_count: Vec<u32> = cnf.clauses.iter().map(|c| c.width() as u32).collect();
    // XOR of the codes of still-open literals: when one remains, the
    // code identifies it directly
    let code = |var: u32, negated: bool| -> u64 { (var as u64) << 1 | negated as u64 };
    let mut open_xor: Vec<u64> = cnf
        .clauses
        .iter()
        .map(|c| c.literals.iter().fold(0, |acc, l| acc ^ code(l.var, l.negated)))
        .collect();
    let mut occurrences: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (ci, c) in cnf.clauses.iter().enumerate() {
        for l in &c.literals {
            occurrences[l.var as usize].push(ci as u32);
        }
    }
    // unit queue in clause-index order (lazy deletions)
    let mut units = std::collections::BinaryHeap::new();
    for ci in 0..m {
        if open_count[ci] == 1 {
            units.push(std::cmp::Reverse(ci as u32));
        }
    }
    // random free-variable pool with O(1) removal
    let mut free: Vec<u32> = (0..n as u32).collect();
    let mut free_pos: Vec<usize> = (0..n).collect();
    let mut work = 0usize;

    let mut steps = 0usize;
    let mut result_failure: Option<FailurePoint> = None;
    'solve: while steps < n {
        // pick the assignment dictated by the lowest unit clause, else random
        let (var, value) = loop {
            match units.pop() {
                Some(std::cmp::Reverse(ci)) => {
                    let ci = ci as usize;
                    if satisfied[ci] || open_count[ci] != 1 {
                        continue; // stale
                    }
                    let lit = open_xor[ci];
                    break ((lit >> 1) as usize, lit & 1 == 0);
                }
                None => {
                    let pick = rng.below_usize(free.len());
                    break (free[pick] as usize, rng.chance(0.5));
                }
            }
        };
        debug_assert!(assigned[var].is_none());
        assigned[var] = Some(value);
        steps += 1;
        // remove from the free pool
        let pos = free_pos[var];
        let last = *free.last().unwrap() as usize;
        free.swap_remove(pos);
        if pos < free.len() {
            free_pos[last] = pos;
        }
        // propagate
        for &ci in &occurrences[var] {
            let ci = ci as usize;
            work += 1;
            if satisfied[ci] {
                continue;
            }
            let lit = cnf.clauses[ci]
                .literals
                .iter()
                .find(|l| l.var as usize == var)
                .unwrap();
            if lit.negated != value {
                satisfied[ci] = true;
            } else {
                open_count[ci] -= 1;
                open_xor[ci] ^= code(lit.var, lit.negated);
                match open_count[ci] {
                    0 => {
                        result_failure = Some(FailurePoint::EmptyClause { clause: ci, step: steps });
                        break 'solve;
                    }
                    1 => units.push(std::cmp::Reverse(ci as u32)),
                    _ => {}
                }
            }
        }
    }
    debug_assert!(work <= WORK_CEILING_FACTOR * (n + m + 1));

    match result_failure {
        Some(fp) => HeuristicOutcome { success: false, assignment: None, steps, failure_point: Some(fp) },
        None => {
            // any leftover variables are unconstrained; default them false
            let values: Vec<u8> = assigned.iter().map(|a| a.unwrap_or(false) as u8).collect();
            let a = Assignment::new(values, 2).unwrap();
            debug_assert_eq!(Instance::Sat(cnf.clone()).violated_count(&a).unwrap(), 0);
            HeuristicOutcome { success: true, assignment: Some(a), steps, failure_point: None }
        }
    }
}

/// Greedy coloring: repeatedly pick a uniformly random vertex among the
/// uncolored ones with the fewest available colors, give it a uniformly
/// random available color, and withdraw that color from its uncolored
/// neighbors. Fails as soon as an uncolored vertex has no color left.
pub fn greedy_color(graph: &GraphInstance, seed: u64) -> Result<HeuristicOutcome> {
    let n = graph.n;
    let k = graph.k;
    if k == 0 || k > 64 {
        return Err(Error::parameter("k must be in 1..=64"));
    }
    let mut rng = Rng::new(seed);
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v) in &graph.edges {
        adjacency[u as usize].push(v);
        adjacency[v as usize].push(u);
    }
    let full: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut avail = vec![full; n];
    let mut color: Vec<Option<u8>> = vec![None; n];
    let mut steps = 0usize;

    let mut argmin: Vec<u32> = Vec::with_capacity(n);
    for _ in 0..n {
        // uniformly random vertex among the uncolored with minimum choice
        let mut min = u32::MAX;
        argmin.clear();
        for v in 0..n {
            if color[v].is_some() {
                continue;
            }
            let c = avail[v].count_ones();
            if c < min {
                min = c;
                argmin.clear();
            }
            if c == min {
                argmin.push(v as u32);
            }
        }
        let v = argmin[rng.below_usize(argmin.len())] as usize;
        if avail[v] == 0 {
            return Ok(HeuristicOutcome {
                success: false,
                assignment: None,
                steps,
                failure_point: Some(FailurePoint::NoAvailableColor { vertex: v, step: steps }),
            });
        }
        // random set bit
        let pick = rng.below(avail[v].count_ones() as u64);
        let mut mask = avail[v];
        for _ in 0..pick {
            mask &= mask - 1;
        }
        let c = mask.trailing_zeros() as u8;
        color[v] = Some(c);
        steps += 1;
        for &u in &adjacency[v] {
            let u = u as usize;
            if color[u].is_none() {
                avail[u] &= !(1u64 << c);
                if avail[u] == 0 {
                    return Ok(HeuristicOutcome {
                        success: false,
                        assignment: None,
                        steps,
                        failure_point: Some(FailurePoint::NoAvailableColor { vertex: u, step: steps }),
                    });
                }
            }
        }
    }
    let values: Vec<u8> = color.into_iter().map(|c| c.unwrap()).collect();
    let a = Assignment::new(values, k).unwrap();
    debug_assert_eq!(Instance::Coloring(graph.clone()).violated_count(&a).unwrap(), 0);
    Ok(HeuristicOutcome { success: true, assignment: Some(a), steps, failure_point: None })
}

// ---------------------------------------------------------------------------
// density sweep
// ---------------------------------------------------------------------------

/// Which ensemble and heuristic a sweep exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SweepEnsemble {
    /// Graph coloring; density is the average degree d = 2m/n.
    Coloring,
    /// k-SAT; density is the clause ratio r = m/n.
    Sat,
    /// NAE hypergraph 2-coloring; density is r = m/n. Solved with the
    /// unit-clause rule on the NAE-encoded CNF.
    Nae,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub density: f64,
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub ensemble: SweepEnsemble,
    pub n: usize,
    pub k: usize,
    pub points: Vec<SweepPoint>,
}

/// Per grid point: fraction of fresh uniform instances the matching
/// heuristic solves, with a Wilson 95% interval. Deterministic under
/// the seed; trial seeds are derived as (seed, point index, trial index).
pub fn density_sweep(
    ensemble: SweepEnsemble,
    n: usize,
    k: usize,
    density_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<SweepTable> {
    if density_grid.is_empty() {
        return Err(Error::parameter("density grid is empty"));
    }
    if trials == 0 {
        return Err(Error::parameter("trials must be at least 1"));
    }
    let mut points = Vec::with_capacity(density_grid.len());
    for (pi, &density) in density_grid.iter().enumerate() {
        if density < 0.0 {
            return Err(Error::parameter("densities must be non-negative"));
        }
        let m = match ensemble {
            SweepEnsemble::Coloring => (density * n as f64 / 2.0).round() as usize,
            SweepEnsemble::Sat | SweepEnsemble::Nae => (density * n as f64).round() as usize,
        };
        // trials fan out over worker threads; each draws its own seed, so
        // the outcome is independent of scheduling
        let outcomes = crate::parallel::run_trials(trials, |t| -> Result<bool> {
            let s = derive2(seed, pi as u64, t as u64);
            Ok(match ensemble {
                SweepEnsemble::Coloring => {
                    let g = gen_uniform_graph(n, m, k as u8, s)?;
                    greedy_color(&g, derive2(s, 1, 0))?.success
                }
                SweepEnsemble::Sat => {
                    let f = gen_uniform_cnf(n, m, k, s)?;
                    unit_clause_solve(&f, derive2(s, 1, 0)).success
                }
                SweepEnsemble::Nae => {
                    let h = gen_uniform_hypergraph(n, m, k, s)?;
                    let f = nae_to_cnf(&h);
                    unit_clause_solve(&f, derive2(s, 1, 0)).success
                }
            })
        });
        let mut successes = 0usize;
        for outcome in outcomes {
            successes += outcome? as usize;
        }
        let rate = successes as f64 / trials as f64;
        let (ci_low, ci_high) = wilson_interval(successes, trials, 1.96);
        points.push(SweepPoint { density, m, trials, successes, rate, ci_low, ci_high });
    }
    Ok(SweepTable { ensemble, n, k, points })
}

/// NAE constraints as clause pairs: "some literal true" and "some
/// literal false".
fn nae_to_cnf(h: &crate::instances::HypergraphInstance) -> CnfInstance {
    let mut clauses = Vec::with_capacity(2 * h.edges.len());
    for e in &h.edges {
        clauses.push(crate::instances::Clause::new(
            e.iter().map(|&var| crate::instances::Literal { var, negated: false }).collect(),
        ));
        clauses.push(crate::instances::Clause::new(
            e.iter().map(|&var| crate::instances::Literal { var, negated: true }).collect(),
        ));
    }
    CnfInstance { n: h.n, k: h.k, clauses }
}

/// CSV export: ensemble,n,k,density,trials,successes,ci_low,ci_high.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::from("ensemble,n,k,density,trials,successes,ci_low,ci_high\n");
    let name = match table.ensemble {
        SweepEnsemble::Coloring => "coloring",
        SweepEnsemble::Sat => "sat",
        SweepEnsemble::Nae => "nae",
    };
    for p in &table.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{:.6}",
            name, table.n, table.k, p.density, p.trials, p.successes, p.ci_low, p.ci_high
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{Clause, Literal};

    fn lit(var: u32, negated: bool) -> Literal {
        Literal { var, negated }
    }

    #[test]
    fn single_clause_always_succeeds() {
        let f = CnfInstance {
            n: 3,
            k: 3,
            clauses: vec![Clause::new(vec![lit(0, false), lit(1, false), lit(2, false)])],
        };
        for seed in 0..50 {
            let out = unit_clause_solve(&f, seed);
            assert!(out.success);
            let a = out.assignment.unwrap();
            assert_eq!(Instance::Sat(f.clone()).violated_count(&a).unwrap(), 0);
        }
    }

    #[test]
    fn contradicting_units_fail_within_two_steps() {
        let f = CnfInstance {
            n: 1,
            k: 1,
            clauses: vec![
                Clause::new(vec![lit(0, false)]),
                Clause::new(vec![lit(0, true)]),
            ],
        };
        for seed in 0..10 {
            let out = unit_clause_solve(&f, seed);
            assert!(!out.success);
            assert!(out.steps <= 2);
            assert!(matches!(out.failure_point, Some(FailurePoint::EmptyClause { .. })));
        }
    }

    #[test]
    fn consistent_unit_formula_always_succeeds() {
        let f = CnfInstance {
            n: 4,
            k: 1,
            clauses: vec![
                Clause::new(vec![lit(0, false)]),
                Clause::new(vec![lit(1, true)]),
                Clause::new(vec![lit(2, false)]),
            ],
        };
        for seed in 0..20 {
            let out = unit_clause_solve(&f, seed);
            assert!(out.success);
            let a = out.assignment.unwrap();
            assert_eq!(a.value(0), 1);
            assert_eq!(a.value(1), 0);
            assert_eq!(a.value(2), 1);
        }
    }

    #[test]
    fn greedy_on_empty_graph_always_succeeds() {
        let g = GraphInstance { n: 5, k: 2, edges: vec![] };
        for seed in 0..20 {
            assert!(greedy_color(&g, seed).unwrap().success);
        }
    }

    #[test]
    fn greedy_on_k4_with_three_colors_always_fails() {
        let g = GraphInstance {
            n: 4,
            k: 3,
            edges: vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        };
        for seed in 0..60 {
            let out = greedy_color(&g, seed).unwrap();
            assert!(!out.success);
            assert!(matches!(out.failure_point, Some(FailurePoint::NoAvailableColor { .. })));
        }
    }

    #[test]
    fn greedy_on_k3_with_three_colors_always_succeeds() {
        let g = GraphInstance { n: 3, k: 3, edges: vec![(0, 1), (0, 2), (1, 2)] };
        for seed in 0..60 {
            let out = greedy_color(&g, seed).unwrap();
            assert!(out.success);
            let a = out.assignment.unwrap();
            assert_eq!(Instance::Coloring(g.clone()).violated_count(&a).unwrap(), 0);
        }
    }

    #[test]
    fn outcomes_are_seed_deterministic() {
        let f = gen_uniform_cnf(40, 160, 3, 9).unwrap();
        let a = unit_clause_solve(&f, 123);
        let b = unit_clause_solve(&f, 123);
        assert_eq!(a.success, b.success);
        assert_eq!(a.steps, b.steps);
        assert_eq!(a.failure_point, b.failure_point);

        let g = gen_uniform_graph(30, 60, 3, 4).unwrap();
        let x = greedy_color(&g, 5).unwrap();
        let y = greedy_color(&g, 5).unwrap();
        assert_eq!(x.success, y.success);
        assert_eq!(x.steps, y.steps);
    }

    #[test]
    fn sweep_trivial_cases() {
        // density 0 solves always, for both heuristics
        let t = density_sweep(SweepEnsemble::Sat, 20, 3, &[0.0], 5, 1).unwrap();
        assert_eq!(t.points[0].rate, 1.0);
        let t = density_sweep(SweepEnsemble::Coloring, 20, 3, &[0.0], 5, 1).unwrap();
        assert_eq!(t.points[0].rate, 1.0);
        // trials=1 on an always-solvable instance
        let t = density_sweep(SweepEnsemble::Coloring, 10, 3, &[0.2], 1, 7).unwrap();
        assert_eq!(t.points[0].rate, 1.0);
        // parameter errors
        assert!(density_sweep(SweepEnsemble::Sat, 10, 3, &[], 5, 0).is_err());
        assert!(density_sweep(SweepEnsemble::Sat, 10, 3, &[1.0], 0, 0).is_err());
    }

    #[test]
    fn sweep_csv_shape() {
        let t = density_sweep(SweepEnsemble::Sat, 12, 3, &[0.5, 1.0], 4, 3).unwrap();
        let csv = sweep_csv(&t);
        assert!(csv.starts_with("ensemble,n,k,density,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
