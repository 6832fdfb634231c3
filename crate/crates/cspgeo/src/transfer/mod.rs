//! Uniform and planted instance-solution pair samplers, incidence-matrix
//! balance statistics, empirical distribution comparison between the two
//! models, and the concentration check for ln |S|.

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instances::{
    bichromatic_pair_count, gen_planted_cnf, gen_planted_coloring, gen_planted_nae,
    gen_uniform_cnf, gen_uniform_graph, gen_uniform_hypergraph, nonmono_subset_count, Instance,
};
use crate::landscape::enumerate_solutions;
use crate::moments::{
    big_binomial, expected_solutions_coloring_exact, expected_solutions_nae_exact,
    expected_solutions_sat, ln_big,
};
use crate::rng::{derive, derive2, Rng};
use crate::stats::{binned_total_variation, permutation_p_value, quartiles, Binning, Quartiles};
use serde::Serialize;

/// Ensemble selector shared by the pair samplers and the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Coloring,
    Sat,
    Nae,
}

/// Parameters of one ensemble slice.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnsembleParams {
    pub kind: EnsembleKind,
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

impl EnsembleParams {
    pub fn generate_uniform(&self, seed: u64) -> Result<Instance> {
        Ok(match self.kind {
            EnsembleKind::Coloring => {
                Instance::Coloring(gen_uniform_graph(self.n, self.m, self.k as u8, seed)?)
            }
            EnsembleKind::Sat => Instance::Sat(gen_uniform_cnf(self.n, self.m, self.k, seed)?),
            EnsembleKind::Nae => {
                Instance::Nae(gen_uniform_hypergraph(self.n, self.m, self.k, seed)?)
            }
        })
    }

    pub fn generate_planted(&self, seed: u64) -> Result<(Instance, Assignment)> {
        Ok(match self.kind {
            EnsembleKind::Coloring => {
                let (g, s) = gen_planted_coloring(self.n, self.m, self.k as u8, seed)?;
                (Instance::Coloring(g), s)
            }
            EnsembleKind::Sat => {
                let (f, s) = gen_planted_cnf(self.n, self.m, self.k, seed)?;
                (Instance::Sat(f), s)
            }
            EnsembleKind::Nae => {
                let (h, s) = gen_planted_nae(self.n, self.m, self.k, seed)?;
                (Instance::Nae(h), s)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Uniform,
    Planted,
}

/// An instance together with one of its solutions and how the pair was drawn.
#[derive(Clone, Debug)]
pub struct PairSample {
    pub instance: Instance,
    pub solution: Assignment,
    pub provenance: Provenance,
    pub seed: u64,
}

/// A uniform draw can land on an unsatisfiable instance; that outcome is
/// reported, never silently resampled.
#[derive(Clone, Debug)]
pub enum UniformPairOutcome {
    Pair(PairSample),
    Unsatisfiable { instance: Instance, seed: u64 },
}

/// Uniform instance, then (when solutions exist) a uniform member of the
/// exactly enumerated S(I).
pub fn sample_uniform_pair(
    params: &EnsembleParams,
    seed: u64,
    budget: u64,
) -> Result<UniformPairOutcome> {
    let instance = params.generate_uniform(derive(seed, 0))?;
    let set = enumerate_solutions(&instance, budget)?;
    if set.is_empty() {
        return Ok(UniformPairOutcome::Unsatisfiable { instance, seed });
    }
    let mut rng = Rng::new(derive(seed, 1));
    let pick = rng.below(set.len() as u64) as usize;
    Ok(UniformPairOutcome::Pair(PairSample {
        instance,
        solution: set.get(pick),
        provenance: Provenance::Uniform,
        seed,
    }))
}

/// Planted pair; the solution is the planted assignment.
pub fn sample_planted_pair(params: &EnsembleParams, seed: u64) -> Result<PairSample> {
    let (instance, solution) = params.generate_planted(seed)?;
    Ok(PairSample { instance, solution, provenance: Provenance::Planted, seed })
}

// ---------------------------------------------------------------------------
// incidence balance
// ---------------------------------------------------------------------------

/// Row/column weight statistics of the assignment-instance incidence
/// matrix: row weight = number of instances an assignment solves
/// (closed form, verified by counting in exact mode); column weight =
/// |S(I)| per instance.
#[derive(Clone, Debug, Serialize)]
pub struct IncidenceBalance {
    pub params: EnsembleParams,
    /// Per-assignment row weights (exact mode) in assignment rank order.
    pub row_weights: Vec<f64>,
    pub row_weight_total: f64,
    pub column_mean: f64,
    pub column_variance: f64,
    /// Fraction of instances with |S| >= c * mean for c in {0.1, 0.5, 1}.
    pub column_fraction_above: [(f64, f64); 3],
    pub column_weight_total: f64,
    /// True when every instance and assignment was enumerated.
    pub exact: bool,
    pub instances_seen: u64,
}

/// Closed-form row weight: the number of m-constraint instances solved
/// by a fixed assignment.
pub fn row_weight_closed_form(params: &EnsembleParams, sigma: &Assignment) -> f64 {
    let m = params.m as u64;
    match params.kind {
        EnsembleKind::Coloring => {
            ln_big_to_count(&big_binomial(bichromatic_pair_count(sigma), m))
        }
        EnsembleKind::Sat => {
            let per_sigma =
                big_binomial(params.n as u64, params.k as u64) * ((1u64 << params.k) - 1);
            ln_big_to_count(&crate::moments::big_binomial(
                u64::try_from(per_sigma).expect("desk-scale universe"),
                m,
            ))
        }
        EnsembleKind::Nae => {
            let ones = sigma.values().iter().filter(|&&v| v == 1).count();
            ln_big_to_count(&big_binomial(
                nonmono_subset_count(params.n, ones, params.k),
                m,
            ))
        }
    }
}

fn ln_big_to_count(b: &num_bigint::BigUint) -> f64 {
    // counts used at exact-mode scales fit f64 exactly
    ln_big(b).exp()
}

/// Exact-mode incidence balance: enumerate every m-subset of the
/// constraint universe and every assignment. The budget bounds
/// (number of instances) x (number of assignments).
pub fn incidence_balance(params: &EnsembleParams, budget: u64) -> Result<IncidenceBalance> {
    let universe = constraint_universe(params)?;
    let instance_count = big_binomial(universe.len() as u64, params.m as u64);
    let assignments = (params.domain() as u128).pow(params.n as u32);
    let total_work = instance_count.clone() * assignments;
    if total_work > num_bigint::BigUint::from(budget) {
        return Err(Error::resource(format!(
            "exact incidence balance needs {total_work} instance-assignment pairs"
        )));
    }

    // row weights: verified count per assignment
    let n_assignments = assignments as usize;
    let mut row_counted = vec![0u64; n_assignments];
    let mut column_weights: Vec<u64> = Vec::new();
    let mut combo: Vec<usize> = (0..params.m).collect();
    let mut values = vec![0u8; params.n];
    loop {
        // count solutions of this instance
        let mut column = 0u64;
        for a in 0..n_assignments {
            unrank_assignment(a as u64, params.domain(), &mut values);
            let violated = combo
                .iter()
                .any(|&c| universe_constraint_violated(params, &universe[c], &values));
            if !violated {
                column += 1;
                row_counted[a] += 1;
            }
        }
        column_weights.push(column);
        if !next_combination(&mut combo, universe.len()) {
            break;
        }
    }

    // verify the closed form against the counted rows
    let mut row_weights = Vec::with_capacity(n_assignments);
    for a in 0..n_assignments {
        unrank_assignment(a as u64, params.domain(), &mut values);
        let sigma = Assignment::new(values.clone(), params.domain()).unwrap();
        let closed = row_weight_closed_form(params, &sigma);
        debug_assert!(
            (closed - row_counted[a] as f64).abs() < 1e-6,
            "closed form {closed} vs counted {}",
            row_counted[a]
        );
        row_weights.push(row_counted[a] as f64);
    }

    let col_mean = column_weights.iter().sum::<u64>() as f64 / column_weights.len() as f64;
    let col_var = column_weights
        .iter()
        .map(|&c| (c as f64 - col_mean) * (c as f64 - col_mean))
        .sum::<f64>()
        / column_weights.len() as f64;
    let frac = |c: f64| {
        column_weights.iter().filter(|&&w| w as f64 >= c * col_mean).count() as f64
            / column_weights.len() as f64
    };
    Ok(IncidenceBalance {
        params: *params,
        row_weight_total: row_weights.iter().sum(),
        row_weights,
        column_mean: col_mean,
        column_variance: col_var,
        column_fraction_above: [(0.1, frac(0.1)), (0.5, frac(0.5)), (1.0, frac(1.0))],
        column_weight_total: column_weights.iter().sum::<u64>() as f64,
        exact: true,
        instances_seen: column_weights.len() as u64,
    })
}

impl EnsembleParams {
    fn domain(&self) -> u8 {
        match self.kind {
            EnsembleKind::Coloring => self.k as u8,
            _ => 2,
        }
    }
}

enum UniverseConstraint {
    Edge(u32, u32),
    Clause(Vec<(u32, bool)>),
    HyperEdge(Vec<u32>),
}

fn constraint_universe(params: &EnsembleParams) -> Result<Vec<UniverseConstraint>> {
    let n = params.n as u32;
    let k = params.k;
    Ok(match params.kind {
        EnsembleKind::Coloring => (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| UniverseConstraint::Edge(u, v)))
            .collect(),
        EnsembleKind::Sat => {
            let mut out = Vec::new();
            let mut subset: Vec<u32> = Vec::new();
            enumerate_subsets(n, k as u32, 0, &mut subset, &mut |vars| {
                for pattern in 0..1u64 << k {
                    out.push(UniverseConstraint::Clause(
                        vars.iter()
                            .enumerate()
                            .map(|(i, &v)| (v, pattern >> i & 1 == 1))
                            .collect(),
                    ));
                }
            });
            out
        }
        EnsembleKind::Nae => {
            let mut out = Vec::new();
            let mut subset: Vec<u32> = Vec::new();
            enumerate_subsets(n, k as u32, 0, &mut subset, &mut |vars| {
                out.push(UniverseConstraint::HyperEdge(vars.to_vec()));
            });
            out
        }
    })
}

fn enumerate_subsets(
    n: u32,
    k: u32,
    from: u32,
    current: &mut Vec<u32>,
    emit: &mut impl FnMut(&[u32]),
) {
    if current.len() == k as usize {
        emit(current);
        return;
    }
    for v in from..n {
        current.push(v);
        enumerate_subsets(n, k, v + 1, current, emit);
        current.pop();
    }
}

fn universe_constraint_violated(
    _params: &EnsembleParams,
    c: &UniverseConstraint,
    values: &[u8],
) -> bool {
    match c {
        UniverseConstraint::Edge(u, v) => values[*u as usize] == values[*v as usize],
        UniverseConstraint::Clause(lits) => lits
            .iter()
            .all(|&(var, neg)| (values[var as usize] == 1) == neg),
        UniverseConstraint::HyperEdge(vars) => {
            let first = values[vars[0] as usize];
            vars.iter().all(|&v| values[v as usize] == first)
        }
    }
}

fn unrank_assignment(mut rank: u64, domain: u8, out: &mut [u8]) {
    for v in out.iter_mut() {
        *v = (rank % domain as u64) as u8;
        rank /= domain as u64;
    }
}

fn next_combination(combo: &mut [usize], universe: usize) -> bool {
    let m = combo.len();
    if m == 0 {
        return false;
    }
    let mut i = m;
    while i > 0 {
        i -= 1;
        if combo[i] < universe - (m - i) {
            combo[i] += 1;
            for j in i + 1..m {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// statistic comparison
// ---------------------------------------------------------------------------

/// Comparison of one scalar statistic between uniform and planted pairs:
/// binned total variation plus a permutation p-value.
#[derive(Clone, Debug, Serialize)]
pub struct StatisticSummary {
    pub statistic_name: String,
    pub samples_per_side: usize,
    pub uniform_values: Vec<f64>,
    pub planted_values: Vec<f64>,
    /// Attempted uniform draws that landed on unsatisfiable instances.
    pub unsatisfiable_draws: usize,
    pub bins: usize,
    pub bin_width: f64,
    pub total_variation: f64,
    pub permutation_p_value: f64,
    /// Constant pooled statistic: TV is 0 by convention, p is 1.
    pub degenerate: bool,
}

/// Number of label permutations in the permutation test.
pub const PERMUTATIONS: usize = 400;

/// Draw equal-size uniform and planted samples and compare the statistic.
/// Uniform draws that hit unsatisfiable instances are counted and
/// redrawn (the conditioning rate is part of the report).
pub fn compare_statistic(
    statistic: impl Fn(&PairSample) -> f64,
    statistic_name: &str,
    params: &EnsembleParams,
    samples: usize,
    seed: u64,
    budget: u64,
) -> Result<StatisticSummary> {
    if samples < 100 {
        return Err(Error::parameter("need at least 100 samples per side"));
    }
    let mut uniform_values = Vec::with_capacity(samples);
    let mut unsat = 0usize;
    let mut attempt = 0u64;
    while uniform_values.len() < samples {
        if attempt > 100 * samples as u64 {
            return Err(Error::resource(
                "too many unsatisfiable uniform draws; lower the density",
            ));
        }
        let s = derive2(seed, 0, attempt);
        attempt += 1;
        match sample_uniform_pair(params, s, budget)? {
            UniformPairOutcome::Pair(p) => uniform_values.push(statistic(&p)),
            UniformPairOutcome::Unsatisfiable { .. } => unsat += 1,
        }
    }
    let planted_values: Vec<f64> = (0..samples)
        .map(|i| {
            let s = derive2(seed, 1, i as u64);
            sample_planted_pair(params, s).map(|p| statistic(&p))
        })
        .collect::<Result<_>>()?;

    let pooled: Vec<f64> = uniform_values
        .iter()
        .chain(planted_values.iter())
        .copied()
        .collect();
    let binning = Binning::freedman_diaconis(&pooled);
    let degenerate = binning.bins == 1;
    let tv = binned_total_variation(&uniform_values, &planted_values, &binning);
    let p = if degenerate {
        1.0
    } else {
        permutation_p_value(
            &uniform_values,
            &planted_values,
            &binning,
            PERMUTATIONS,
            derive(seed, 2),
        )
    };
    Ok(StatisticSummary {
        statistic_name: statistic_name.to_string(),
        samples_per_side: samples,
        uniform_values,
        planted_values,
        unsatisfiable_draws: unsat,
        bins: binning.bins,
        bin_width: binning.width,
        total_variation: tv,
        permutation_p_value: p,
        degenerate,
    })
}

// ---------------------------------------------------------------------------
// concentration of ln |S|
// ---------------------------------------------------------------------------

/// Empirical distribution of n^-1 ln |S| over uniform instances,
/// against the exact analytic ln E|S|, with the SAT one-sided
/// lower-bound violation rate.
#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub params: EnsembleParams,
    pub trials: usize,
    /// Trials with at least one solution.
    pub satisfiable_trials: usize,
    /// n^-1 ln |S| for each satisfiable trial.
    pub log_density: Vec<f64>,
    pub mean: f64,
    pub quartiles: Option<Quartiles>,
    /// Exact n^-1 ln E|S| from the moment formulas.
    pub analytic_rate: f64,
    /// SAT only: fraction of satisfiable trials violating
    /// |S| >= mu exp(-k 2^{3-k} n).
    pub lower_bound_violation_rate: Option<f64>,
}

pub fn concentration_check(
    params: &EnsembleParams,
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<ConcentrationReport> {
    if trials == 0 {
        return Err(Error::parameter("trials must be positive"));
    }
    let n = params.n;
    let mut log_density = Vec::with_capacity(trials);
    let mut sat_bound_violations = 0usize;
    let sat_bound = match params.kind {
        EnsembleKind::Sat => {
            let mu = expected_solutions_sat(n, params.m, params.k, false)?;
            let ki = params.k as i32;
            Some(mu - params.k as f64 * 2f64.powi(3 - ki) * n as f64)
        }
        _ => None,
    };
    let solution_counts = crate::parallel::run_trials(trials, |t| -> Result<usize> {
        let inst = params.generate_uniform(derive2(seed, 7, t as u64))?;
        Ok(enumerate_solutions(&inst, budget)?.len())
    });
    for count in solution_counts {
        let count = count?;
        if count == 0 {
            continue;
        }
        let ln_s = (count as f64).ln();
        log_density.push(ln_s / n as f64);
        if let Some(bound) = sat_bound {
            if ln_s < bound {
                sat_bound_violations += 1;
            }
        }
    }
    let analytic_rate = match params.kind {
        EnsembleKind::Coloring => {
            expected_solutions_coloring_exact(n, params.m, params.k as u8)?.log_expected / n as f64
        }
        EnsembleKind::Sat => expected_solutions_sat(n, params.m, params.k, true)? / n as f64,
        EnsembleKind::Nae => expected_solutions_nae_exact(n, params.m, params.k)? / n as f64,
    };
    let satisfiable = log_density.len();
    Ok(ConcentrationReport {
        params: *params,
        trials,
        satisfiable_trials: satisfiable,
        mean: if satisfiable > 0 {
            crate::stats::mean(&log_density)
        } else {
            f64::NAN
        },
        quartiles: quartiles(&log_density),
        analytic_rate,
        lower_bound_violation_rate: sat_bound.map(|_| {
            if satisfiable == 0 {
                0.0
            } else {
                sat_bound_violations as f64 / satisfiable as f64
            }
        }),
        log_density,
    })
}

/// Per-trial CSV of a concentration report, for external plotting.
pub fn concentration_csv(report: &ConcentrationReport) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("trial,log_solutions_per_n\n");
    for (i, v) in report.log_density.iter().enumerate() {
        let _ = writeln!(out, "{i},{v}");
    }
    out
}

/// Per-sample CSV of a statistic comparison, for external plotting.
pub fn statistic_csv(summary: &StatisticSummary) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("provenance,sample,value\n");
    for (i, v) in summary.uniform_values.iter().enumerate() {
        let _ = writeln!(out, "uniform,{i},{v}");
    }
    for (i, v) in summary.planted_values.iter().enumerate() {
        let _ = writeln!(out, "planted,{i},{v}");
    }
    out
}
