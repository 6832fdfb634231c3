//! Experiment configuration, execution, result persistence, and replay.
//!
//! A config is a single JSON document (schema-versioned). Running it
//! produces CSV/JSON summary files plus a `record.json` that embeds the
//! config, so any record regenerates bit-identically from itself on the
//! same artifact version. All randomness flows from the config seed via
//! the documented derivation: experiment -> grid point -> trial ->
//! operation.

use crate::algorithms::{density_sweep, sweep_csv, SweepEnsemble};
use crate::error::{Error, Result};
use crate::geometry::{classify_variables, shatter_report};
use crate::instances::write_instance;
use crate::landscape::{cluster_decomposition, enumerate_solutions, DEFAULT_ENUMERATION_BUDGET};
use crate::moments::{eps_bounds, lambda_b, solve_eps, ExponentCurve};
use crate::processes::{recolor_process, strip_core_coloring_with};
use crate::rng::{derive, derive2};
use crate::transfer::{compare_statistic, concentration_check, EnsembleKind, EnsembleParams};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub use crate::parallel::{run_trials, WORKERS_ENV};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ShatterScan,
    RigidityScan,
    LoosenessScan,
    HeuristicSweep,
    TransferCompare,
    MomentCurves,
    Concentration,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    pub enumeration: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { enumeration: DEFAULT_ENUMERATION_BUDGET }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ProcessParams {
    pub gamma: f64,
    pub q: u8,
    pub lambda: f64,
    pub adjacency_radius: usize,
    pub z_threshold: usize,
}

impl Default for ProcessParams {
    fn default() -> Self {
        ProcessParams {
            gamma: 0.5,
            q: crate::processes::DEFAULT_RECOLOR_Q,
            lambda: 0.0,
            adjacency_radius: 1,
            z_threshold: crate::processes::DEFAULT_Z_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub ensemble: EnsembleKind,
    pub n: usize,
    pub k: usize,
    /// Average degree for coloring; constraints-per-variable otherwise.
    pub density_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub process: ProcessParams,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Canonical hash: serialize through a sorted-key JSON value so the
    /// on-disk field order never matters. FNV-1a over the canonical text.
    pub fn canonical_hash(&self) -> String {
        let value: serde_json::Value =
            serde_json::to_value(self).expect("config serializes");
        let canonical = canonical_json(&value);
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canonical.as_bytes() {
            hash ^= *b as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
        }
        format!("{hash:016x}")
    }

    fn m_for(&self, density: f64) -> usize {
        match self.ensemble {
            EnsembleKind::Coloring => (density * self.n as f64 / 2.0).round() as usize,
            _ => (density * self.n as f64).round() as usize,
        }
    }

    fn params_for(&self, density: f64) -> EnsembleParams {
        EnsembleParams {
            kind: self.ensemble,
            n: self.n,
            m: self.m_for(density),
            k: self.k,
        }
    }
}

fn canonical_json(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            let inner: Vec<String> = keys
                .iter()
                .map(|k| format!("{}:{}", k, canonical_json(&map[*k])))
                .collect();
            format!("{{{}}}", inner.join(","))
        }
        serde_json::Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(canonical_json).collect();
            format!("[{}]", inner.join(","))
        }
        other => other.to_string(),
    }
}

/// One structured validation complaint.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

/// Check budgets, ranges, and grid shape without running anything.
pub fn validate_config(config: &ExperimentConfig) -> Vec<ConfigIssue> {
    let mut issues = Vec::new();
    let mut push = |field: &str, message: String| {
        issues.push(ConfigIssue { field: field.to_string(), message });
    };
    if config.schema_version != SCHEMA_VERSION {
        push("schema_version", format!("expected {SCHEMA_VERSION}"));
    }
    if config.k < 2 {
        push("k", "k must be at least 2".into());
    }
    if config.n == 0 {
        push("n", "n must be positive".into());
    }
    if config.trials == 0 {
        push("trials", "trials must be at least 1".into());
    }
    if config.density_grid.is_empty() {
        push("density_grid", "grid must be non-empty".into());
    }
    if config.density_grid.iter().any(|&d| d < 0.0) {
        push("density_grid", "densities must be non-negative".into());
    }
    if config.density_grid.windows(2).any(|w| w[0] >= w[1]) {
        push("density_grid", "grid must be strictly increasing".into());
    }
    if config.process.gamma <= 0.0 {
        push("process.gamma", "gamma must be positive".into());
    }
    if config.process.q < 2 {
        push("process.q", "q must be at least 2".into());
    }
    if config.process.adjacency_radius == 0 {
        push("process.adjacency_radius", "radius must be at least 1".into());
    }
    let needs_enumeration = matches!(
        config.kind,
        ExperimentKind::ShatterScan
            | ExperimentKind::RigidityScan
            | ExperimentKind::TransferCompare
            | ExperimentKind::Concentration
    );
    if needs_enumeration {
        let domain = match config.ensemble {
            EnsembleKind::Coloring => config.k as f64,
            _ => 2.0,
        };
        let states = (config.n as f64) * domain.ln();
        let limit = (config.budgets.enumeration as f64).ln();
        if states > limit {
            push(
                "n",
                format!(
                    "k^n exceeds the enumeration budget {} for this experiment",
                    config.budgets.enumeration
                ),
            );
        }
    }
    issues
}

/// A finished run: where it wrote, what it wrote, and which trials failed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config: serde_json::Value,
    pub config_hash: String,
    pub artifact_version: String,
    pub summary_files: Vec<String>,
    pub failures: Vec<TrialFailure>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialFailure {
    pub grid_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub message: String,
}

impl ResultRecord {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Run every trial of an experiment, write summaries and the record.
/// Partial results are preserved: trial errors land in the failure
/// manifest instead of aborting the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultRecord> {
    let issues = validate_config(config);
    if !issues.is_empty() {
        let text = issues
            .iter()
            .map(|i| format!("{}: {}", i.field, i.message))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::Config(text));
    }
    std::fs::create_dir_all(&config.output_dir)?;
    let mut failures: Vec<TrialFailure> = Vec::new();
    let summary = match config.kind {
        ExperimentKind::ShatterScan => run_shatter_scan(config, &mut failures)?,
        ExperimentKind::RigidityScan => run_rigidity_scan(config, &mut failures)?,
        ExperimentKind::LoosenessScan => run_looseness_scan(config, &mut failures)?,
        ExperimentKind::HeuristicSweep => run_heuristic_sweep(config)?,
        ExperimentKind::TransferCompare => run_transfer_compare(config)?,
        ExperimentKind::MomentCurves => run_moment_curves(config)?,
        ExperimentKind::Concentration => run_concentration(config)?,
    };
    let mut summary_files = Vec::new();
    for (name, content) in summary {
        let path = config.output_dir.join(&name);
        std::fs::write(&path, content)?;
        summary_files.push(name);
    }
    if let Some(script) = gnuplot_script(config, &summary_files) {
        std::fs::write(config.output_dir.join("plot.gp"), script)?;
        summary_files.push("plot.gp".into());
    }
    let record = ResultRecord {
        config: serde_json::to_value(config)?,
        config_hash: config.canonical_hash(),
        artifact_version: ARTIFACT_VERSION.to_string(),
        summary_files,
        failures,
    };
    std::fs::write(
        config.output_dir.join("record.json"),
        serde_json::to_string_pretty(&record)?,
    )?;
    Ok(record)
}

type Summaries = Vec<(String, String)>;

/// A ready-to-run gnuplot script for the experiments that emit a single
/// x-vs-y CSV; other experiments get no script.
fn gnuplot_script(config: &ExperimentConfig, files: &[String]) -> Option<String> {
    let (csv, ylabel, xcol, ycol) = match config.kind {
        ExperimentKind::HeuristicSweep => ("heuristic_sweep.csv", "successes", 4, 6),
        ExperimentKind::ShatterScan => ("shatter_scan.csv", "mean region count", 1, 5),
        ExperimentKind::Concentration => ("concentration.csv", "mean ln|S|/n", 1, 5),
        ExperimentKind::LoosenessScan => ("looseness_scan.csv", "recoloring success rate", 1, 4),
        _ => return None,
    };
    if !files.iter().any(|f| f == csv) {
        return None;
    }
    Some(format!(
        "set datafile separator ','\n\
         set key off\n\
         set xlabel 'density'\n\
         set ylabel '{ylabel}'\n\
         plot '{csv}' using {xcol}:{ycol} skip 1 with linespoints\n\
         pause -1\n"
    ))
}

fn run_shatter_scan(
    config: &ExperimentConfig,
    failures: &mut Vec<TrialFailure>,
) -> Result<Summaries> {
    let mut csv = String::from(
        "density,m,trials,satisfiable,mean_region_count,mean_log_regions_per_n,\
         mean_max_fraction,mean_min_distance_per_n,mean_min_barrier_per_n\n",
    );
    for (gi, &density) in config.density_grid.iter().enumerate() {
        let params = config.params_for(density);
        let results = run_trials(
            config.trials,
            |t| -> Result<Option<crate::geometry::ShatterReport>> {
                let seed = derive2(config.seed, gi as u64, t as u64);
                let inst = params.generate_uniform(seed)?;
                let set = enumerate_solutions(&inst, config.budgets.enumeration)?;
                if set.is_empty() {
                    return Ok(None);
                }
                let decomposition = cluster_decomposition(&set, config.process.adjacency_radius);
                let report =
                    shatter_report(&set, &decomposition, &inst, config.budgets.enumeration)?;
                Ok(Some(report))
            },
        );
        let mut ok = Vec::new();
        for (t, r) in results.into_iter().enumerate() {
            match r {
                Ok(Some(rep)) => ok.push(rep),
                Ok(None) => {}
                Err(e) => failures.push(TrialFailure {
                    grid_index: gi,
                    trial: t,
                    seed: derive2(config.seed, gi as u64, t as u64),
                    message: e.to_string(),
                }),
            }
        }
        let satisfiable = ok.len();
        let mean = |f: &dyn Fn(&crate::geometry::ShatterReport) -> Option<f64>| -> f64 {
            let vals: Vec<f64> = ok.iter().filter_map(f).collect();
            if vals.is_empty() {
                f64::NAN
            } else {
                vals.iter().sum::<f64>() / vals.len() as f64
            }
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            density,
            params.m,
            config.trials,
            satisfiable,
            mean(&|r| Some(r.region_count as f64)),
            mean(&|r| Some(r.log_region_count_per_n)),
            mean(&|r| Some(r.max_region_fraction)),
            mean(&|r| r.min_interregion_distance_per_n),
            mean(&|r| r.min_barrier_per_n),
        );
    }
    Ok(vec![("shatter_scan.csv".into(), csv)])
}

fn run_rigidity_scan(
    config: &ExperimentConfig,
    failures: &mut Vec<TrialFailure>,
) -> Result<Summaries> {
    let mut csv = String::from(
        "density,m,trials,mean_fraction_rigid_ge2,mean_core_fraction,core_verified_rate\n",
    );
    for (gi, &density) in config.density_grid.iter().enumerate() {
        let params = config.params_for(density);
        type RigidityRow = (f64, Option<crate::processes::CoreResult>);
        let results = run_trials(config.trials, |t| -> Result<RigidityRow> {
            let seed = derive2(config.seed, gi as u64, t as u64);
            let (inst, sigma) = params.generate_planted(seed)?;
            let set = enumerate_solutions(&inst, config.budgets.enumeration)?;
            let status = classify_variables(&set, &sigma)?;
            let rigid_ge2 = status
                .rigid_distance
                .iter()
                .filter(|d| d.is_none_or(|x| x >= 2))
                .count() as f64
                / config.n as f64;
            let core = match &inst {
                crate::instances::Instance::Coloring(g) => Some(strip_core_coloring_with(
                    g,
                    &sigma,
                    config.process.gamma,
                    config.process.z_threshold,
                )?),
                crate::instances::Instance::Sat(f) => {
                    Some(crate::processes::support_core_sat(f, &sigma, config.process.gamma)?)
                }
                crate::instances::Instance::Nae(_) => None,
            };
            Ok((rigid_ge2, core))
        });
        let mut rigid_fractions = Vec::new();
        let mut core_fractions = Vec::new();
        let mut verified = 0usize;
        let mut with_core = 0usize;
        for (t, r) in results.into_iter().enumerate() {
            match r {
                Ok((rigid, core)) => {
                    rigid_fractions.push(rigid);
                    if let Some(core) = core {
                        with_core += 1;
                        core_fractions.push(core.core_fraction(config.n));
                        verified += core.verified as usize;
                    }
                }
                Err(e) => failures.push(TrialFailure {
                    grid_index: gi,
                    trial: t,
                    seed: derive2(config.seed, gi as u64, t as u64),
                    message: e.to_string(),
                }),
            }
        }
        let mean = |v: &[f64]| {
            if v.is_empty() {
                f64::NAN
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            density,
            params.m,
            config.trials,
            mean(&rigid_fractions),
            mean(&core_fractions),
            if with_core == 0 { f64::NAN } else { verified as f64 / with_core as f64 },
        );
    }
    Ok(vec![("rigidity_scan.csv".into(), csv)])
}

fn run_looseness_scan(
    config: &ExperimentConfig,
    failures: &mut Vec<TrialFailure>,
) -> Result<Summaries> {
    if config.ensemble != EnsembleKind::Coloring {
        return Err(Error::Config(
            "looseness-scan runs on the coloring ensemble".into(),
        ));
    }
    let mut csv = String::from(
        "density,m,trials,success_rate,mean_dead_fraction,max_dead_fraction\n",
    );
    for (gi, &density) in config.density_grid.iter().enumerate() {
        let params = config.params_for(density);
        let results = run_trials(config.trials, |t| -> Result<(bool, f64)> {
            let seed = derive2(config.seed, gi as u64, t as u64);
            let (inst, sigma) = params.generate_planted(seed)?;
            let crate::instances::Instance::Coloring(g) = &inst else { unreachable!() };
            let mut pick = crate::rng::Rng::new(derive(seed, 1));
            let v0 = pick.below_usize(config.n);
            let shift = 1 + pick.below(config.k as u64 - 1) as u8;
            let target = (sigma.value(v0) + shift) % config.k as u8;
            let trace =
                recolor_process(g, &sigma, v0, target, config.process.q, derive(seed, 2))?;
            let dead_fraction = trace.dead.len() as f64 / config.n as f64;
            Ok((trace.recolored().is_some(), dead_fraction))
        });
        let mut successes = 0usize;
        let mut dead = Vec::new();
        let mut completed = 0usize;
        for (t, r) in results.into_iter().enumerate() {
            match r {
                Ok((ok, frac)) => {
                    completed += 1;
                    successes += ok as usize;
                    dead.push(frac);
                }
                Err(e) => failures.push(TrialFailure {
                    grid_index: gi,
                    trial: t,
                    seed: derive2(config.seed, gi as u64, t as u64),
                    message: e.to_string(),
                }),
            }
        }
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            density,
            params.m,
            config.trials,
            if completed == 0 { f64::NAN } else { successes as f64 / completed as f64 },
            if dead.is_empty() { f64::NAN } else { dead.iter().sum::<f64>() / dead.len() as f64 },
            dead.iter().copied().fold(f64::NAN, f64::max),
        );
    }
    Ok(vec![("looseness_scan.csv".into(), csv)])
}

fn run_heuristic_sweep(config: &ExperimentConfig) -> Result<Summaries> {
    let ensemble = match config.ensemble {
        EnsembleKind::Coloring => SweepEnsemble::Coloring,
        EnsembleKind::Sat => SweepEnsemble::Sat,
        EnsembleKind::Nae => SweepEnsemble::Nae,
    };
    let table = density_sweep(
        ensemble,
        config.n,
        config.k,
        &config.density_grid,
        config.trials,
        derive(config.seed, 0),
    )?;
    Ok(vec![("heuristic_sweep.csv".into(), sweep_csv(&table))])
}

fn run_transfer_compare(config: &ExperimentConfig) -> Result<Summaries> {
    // statistic: number of 1-loose variables of the sampled pair
    let budget = config.budgets.enumeration;
    let mut out = String::new();
    for (gi, &density) in config.density_grid.iter().enumerate() {
        let params = config.params_for(density);
        let summary = compare_statistic(
            |pair| {
                let set = enumerate_solutions(&pair.instance, budget).expect("within budget");
                let status = classify_variables(&set, &pair.solution).expect("solution in set");
                status
                    .loose_radius
                    .iter()
                    .filter(|r| matches!(r, Some(1)))
                    .count() as f64
            },
            "one_loose_variables",
            &params,
            config.trials,
            derive2(config.seed, 3, gi as u64),
            budget,
        )?;
        if gi == 0 {
            out.push_str(
                "density,m,samples,unsatisfiable_draws,bins,total_variation,permutation_p\n",
            );
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            density,
            params.m,
            summary.samples_per_side,
            summary.unsatisfiable_draws,
            summary.bins,
            summary.total_variation,
            summary.permutation_p_value,
        );
    }
    Ok(vec![("transfer_compare.csv".into(), out)])
}

fn run_moment_curves(config: &ExperimentConfig) -> Result<Summaries> {
    let k = config.k as u32;
    let eps = solve_eps(k, 1e-13)?;
    let (lo, hi) = eps_bounds(k);
    let mut eps_txt = String::from("quantity,value\n");
    let _ = writeln!(eps_txt, "eps,{eps}");
    let _ = writeln!(eps_txt, "eps_lower_bound,{lo}");
    let _ = writeln!(eps_txt, "eps_upper_bound,{hi}");

    let grid = &config.density_grid;
    let lambda_values: Vec<f64> = grid
        .iter()
        .map(|&r| lambda_b(k, r).map(|l| l.half_ln))
        .collect::<Result<_>>()?;
    let lambda_curve = ExponentCurve::new(grid.clone(), lambda_values)?;

    let pair_values: Vec<f64> = grid
        .iter()
        .map(|&r| crate::moments::sat_pair_exponent(k, r, 1.0 / (k as f64 * (k as f64).ln())))
        .collect::<Result<_>>()?;
    let pair_curve = ExponentCurve::new(grid.clone(), pair_values)?;

    Ok(vec![
        ("eps.csv".into(), eps_txt),
        ("lambda_b_half_log.csv".into(), lambda_curve.to_csv("r", "half_ln_lambda_b")),
        ("pair_exponent_at_alpha_star.csv".into(), pair_curve.to_csv("r", "exponent")),
    ])
}

fn run_concentration(config: &ExperimentConfig) -> Result<Summaries> {
    let mut csv = String::from(
        "density,m,trials,satisfiable,mean_log_density,q1,median,q3,analytic_rate,\
         sat_lower_bound_violation_rate\n",
    );
    for (gi, &density) in config.density_grid.iter().enumerate() {
        let params = config.params_for(density);
        let rep = concentration_check(
            &params,
            config.trials,
            derive2(config.seed, 9, gi as u64),
            config.budgets.enumeration,
        )?;
        let q = rep.quartiles;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            density,
            params.m,
            rep.trials,
            rep.satisfiable_trials,
            rep.mean,
            q.map_or(f64::NAN, |q| q.q1),
            q.map_or(f64::NAN, |q| q.median),
            q.map_or(f64::NAN, |q| q.q3),
            rep.analytic_rate,
            rep.lower_bound_violation_rate.unwrap_or(f64::NAN),
        );
    }
    Ok(vec![("concentration.csv".into(), csv)])
}

/// Re-run a record's embedded config into a scratch directory and
/// byte-compare every summary file. Returns the mismatched file names.
pub fn replay(record_path: &Path, scratch_dir: &Path) -> Result<Vec<String>> {
    let record = ResultRecord::load(record_path)?;
    if record.artifact_version != ARTIFACT_VERSION {
        return Err(Error::Config(format!(
            "record was produced by version {}, this is {}",
            record.artifact_version, ARTIFACT_VERSION
        )));
    }
    let mut config: ExperimentConfig = serde_json::from_value(record.config.clone())?;
    let original_dir = config.output_dir.clone();
    config.output_dir = scratch_dir.to_path_buf();
    let rerun = run_experiment(&config)?;
    let mut mismatches = Vec::new();
    for name in &record.summary_files {
        let old = std::fs::read(original_dir.join(name))?;
        let new = std::fs::read(scratch_dir.join(name))?;
        if old != new {
            mismatches.push(name.clone());
        }
    }
    if rerun.summary_files != record.summary_files {
        mismatches.push("(summary file list)".into());
    }
    Ok(mismatches)
}

/// Convenience for tooling: write a sample instance next to a config,
/// mostly to document the text format.
pub fn write_sample_instance(config: &ExperimentConfig, density: f64, path: &Path) -> Result<()> {
    let params = config.params_for(density);
    let inst = params.generate_uniform(derive(config.seed, 0xFACE))?;
    std::fs::write(path, write_instance(&inst))?;
    Ok(())
}
