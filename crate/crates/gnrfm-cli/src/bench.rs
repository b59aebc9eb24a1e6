//! Benchmark sweeps: run seeded end-to-end pipelines (generate/load → solve →
//! affinity → cluster → score) over a list of experiment configurations,
//! average the trials, and emit CSV plus a Markdown table with the
//! `Time(s) | Ite | Acc(%) | NMI` column layout.
//!
//! Trials are independent and run on a bounded worker pool (`GNRFM_THREADS`
//! caps the width; that environment variable is the only runtime knob that is
//! not a flag). Every per-trial quantity is deterministic given the config,
//! so two runs of the same sweep produce byte-identical CSV output except for
//! the `time_s` column.

use crate::commands::{ensure_dir, segment, write_trace_csv, AffinityMode};
use crate::io;
use crate::CliError;
use gnrfm::metrics::{accuracy, nmi};
use gnrfm::solver::{solve, InnerMode, SolveReport, SolverConfig};
use gnrfm::synth::generate;
use gnrfm::{Matrix, SyntheticSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

/// Where an experiment's data comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// Generate fresh data each trial; the spec's own `seed` is replaced by
    /// the experiment's `seed + trial_index`.
    Synthetic(SyntheticSpec),
    /// Load a fixed matrix (columns are samples). Accuracy/NMI need `labels`;
    /// without them the metric columns stay empty. Only the clustering seed
    /// varies across trials here — the solve itself is deterministic.
    External {
        x: PathBuf,
        #[serde(default)]
        labels: Option<PathBuf>,
    },
}

fn default_trials() -> usize {
    3
}

fn default_rank_tol() -> f64 {
    1e-8
}

/// One benchmark cell: a data source, a solver configuration, and a
/// clustering setup, averaged over `trials` seeded runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Row label in the output tables; derived from the spec when omitted.
    #[serde(default)]
    pub id: Option<String>,
    pub spec: DataSource,
    #[serde(default)]
    pub solver: SolverConfig,
    pub k_clusters: usize,
    #[serde(default)]
    pub affinity: AffinityMode,
    /// Relative singular-value cutoff when `affinity` is `squared`.
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Base seed; trial i runs with `seed + i`.
    #[serde(default)]
    pub seed: u64,
    /// Also run the inner-iteration comparison: one-step with and without
    /// pruning, five fixed passes, and run-to-convergence.
    #[serde(default)]
    pub compare_inner_modes: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::usage("trials must be >= 1"));
        }
        if self.k_clusters < 2 {
            return Err(CliError::usage(format!(
                "k_clusters must be >= 2, got {}",
                self.k_clusters
            )));
        }
        if !(self.rank_tol > 0.0 && self.rank_tol < 1.0) {
            return Err(CliError::usage(format!(
                "rank_tol must lie in (0,1), got {}",
                self.rank_tol
            )));
        }
        self.solver.validate()?;
        if let DataSource::Synthetic(s) = &self.spec {
            s.validate()?;
        }
        Ok(())
    }

    /// Table row label: the explicit `id`, or one derived from the source.
    pub fn effective_id(&self, index: usize) -> String {
        if let Some(id) = &self.id {
            return id.clone();
        }
        match &self.spec {
            DataSource::Synthetic(s) => format!(
                "s{}p{}d{}r{}_sig{}_muv{}",
                s.s, s.p, s.d_tilde, s.r_tilde, s.sigma, self.solver.mu_v
            ),
            DataSource::External { x, .. } => x
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("exp{}", index + 1)),
        }
    }
}

/// One averaged result line.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub method: String,
    /// Mean seconds of solver + segmentation compute; file I/O and data
    /// generation are excluded from the timer.
    pub time_s: f64,
    /// Mean outer-iteration count.
    pub iterations: f64,
    /// Mean accuracy in percent (in [0,100]); NaN marks "no ground truth" or
    /// "all trials failed" and renders as an em dash in the Markdown table.
    pub acc_percent: f64,
    /// Mean NMI (in [0,1]); NaN as above.
    pub nmi: f64,
    pub trials_ok: usize,
    pub trials_failed: usize,
    /// First failure message, when any trial failed.
    pub error: Option<String>,
}

fn method_tag(cfg: &SolverConfig) -> String {
    let mode = match cfg.inner_mode {
        InnerMode::OneStep => "aalm".to_string(),
        InnerMode::Fixed(l) => format!("alm_fixed{l}"),
        InnerMode::Converge(_) => "alm_converge".to_string(),
    };
    if cfg.prune {
        mode
    } else {
        format!("{mode}_noprune")
    }
}

/// The solver variants a config expands to. Without the comparison flag this
/// is just the configured solver; with it, the four convergence-trace lines:
/// one-step with pruning, one-step without, five fixed inner passes, and
/// inner iterations run to convergence.
pub fn variant_configs(base: &SolverConfig, compare: bool) -> Vec<(String, SolverConfig)> {
    if !compare {
        return vec![(method_tag(base), base.clone())];
    }
    let mk = |mode: InnerMode, prune: bool| {
        let mut c = base.clone();
        c.inner_mode = mode;
        c.prune = prune;
        c
    };
    [
        mk(InnerMode::OneStep, true),
        mk(InnerMode::OneStep, false),
        mk(InnerMode::Fixed(5), true),
        mk(InnerMode::Converge(1e-6), true),
    ]
    .into_iter()
    .map(|c| (method_tag(&c), c))
    .collect()
}

struct SharedData {
    x: Matrix,
    labels: Option<Vec<usize>>,
}

enum JobData {
    Synthetic(SyntheticSpec),
    Shared(Arc<SharedData>),
}

struct Job {
    row_index: usize,
    data: JobData,
    solver: SolverConfig,
    k: usize,
    affinity: AffinityMode,
    rank_tol: f64,
    seed: u64,
    keep_report: bool,
}

struct TrialResult {
    time_s: f64,
    iterations: usize,
    acc: Option<f64>,
    nmi: Option<f64>,
    report: Option<Box<SolveReport>>,
}

fn run_job(job: &Job) -> Result<TrialResult, CliError> {
    // Materialize the data outside the timer: generation and file reads are
    // not part of the method being measured.
    let generated;
    let (x, truth): (&Matrix, Option<&[usize]>) = match &job.data {
        JobData::Synthetic(spec) => {
            generated = generate(spec)?;
            (&generated.x, Some(&generated.labels))
        }
        JobData::Shared(d) => (&d.x, d.labels.as_deref()),
    };
    let t0 = Instant::now();
    let report = solve(x, &job.solver)?;
    let pred = segment(x, &report, job.k, job.affinity, job.rank_tol, job.seed)?;
    let time_s = t0.elapsed().as_secs_f64();
    let (acc, mi) = match truth {
        Some(t) => (Some(accuracy(t, &pred)? * 100.0), Some(nmi(t, &pred)?)),
        None => (None, None),
    };
    Ok(TrialResult {
        time_s,
        iterations: report.iterations,
        acc,
        nmi: mi,
        report: if job.keep_report {
            Some(Box::new(report))
        } else {
            None
        },
    })
}

/// Worker pool honoring `GNRFM_THREADS` (unset means rayon's default width).
pub fn build_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("GNRFM_THREADS") {
        let n = raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                CliError::usage(format!(
                    "GNRFM_THREADS must be a positive integer, got {raw:?}"
                ))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::usage(format!("cannot build worker pool: {e}")))
}

/// Everything a sweep produces: averaged rows plus, when requested, the
/// trial-0 solve report of each row for trace emission.
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    pub reports: Vec<(usize, Box<SolveReport>)>,
}

/// Run every experiment. A failing trial (or an unreadable external data
/// file) is recorded on its row and the sweep keeps going; only invalid
/// configs abort up front.
pub fn run_bench(
    configs: &[ExperimentConfig],
    keep_reports: bool,
) -> Result<BenchOutput, CliError> {
    for c in configs {
        c.validate()?;
    }
    let mut row_meta: Vec<(String, String)> = Vec::new();
    let mut preset_errors: BTreeMap<usize, String> = BTreeMap::new();
    let mut row_trials: Vec<usize> = Vec::new();
    let mut jobs: Vec<Job> = Vec::new();

    for (ci, cfg) in configs.iter().enumerate() {
        let id = cfg.effective_id(ci);
        let shared = match &cfg.spec {
            DataSource::Synthetic(_) => Ok(None),
            DataSource::External { x, labels } => (|| {
                let xm = io::read_matrix_csv(x)?;
                let lm = labels
                    .as_ref()
                    .map(|p| io::read_labels_csv(p))
                    .transpose()?;
                if let Some(l) = &lm {
                    if l.len() != xm.cols() {
                        return Err(CliError::usage(format!(
                            "{}: {} labels for {} columns",
                            x.display(),
                            l.len(),
                            xm.cols()
                        )));
                    }
                }
                Ok(Some(Arc::new(SharedData { x: xm, labels: lm })))
            })(),
        };
        for (tag, solver) in variant_configs(&cfg.solver, cfg.compare_inner_modes) {
            let row_index = row_meta.len();
            row_meta.push((id.clone(), tag));
            row_trials.push(cfg.trials);
            match &shared {
                Err(e) => {
                    preset_errors.insert(row_index, e.to_string());
                }
                Ok(shared) => {
                    for trial in 0..cfg.trials {
                        let seed = cfg.seed + trial as u64;
                        let data = match (&cfg.spec, shared) {
                            (DataSource::Synthetic(s), _) => {
                                JobData::Synthetic(SyntheticSpec { seed, ..s.clone() })
                            }
                            (_, Some(d)) => JobData::Shared(Arc::clone(d)),
                            _ => unreachable!("external source always loads shared data"),
                        };
                        jobs.push(Job {
                            row_index,
                            data,
                            solver: solver.clone(),
                            k: cfg.k_clusters,
                            affinity: cfg.affinity,
                            rank_tol: cfg.rank_tol,
                            seed,
                            keep_report: keep_reports && trial == 0,
                        });
                    }
                }
            }
        }
    }

    let pool = build_pool()?;
    let results: Vec<Result<TrialResult, CliError>> =
        pool.install(|| jobs.par_iter().map(run_job).collect());

    let mut per_row: Vec<Vec<Result<TrialResult, CliError>>> =
        row_meta.iter().map(|_| Vec::new()).collect();
    for (job, result) in jobs.iter().zip(results) {
        per_row[job.row_index].push(result);
    }

    let mut rows = Vec::with_capacity(row_meta.len());
    let mut reports = Vec::new();
    for (row_index, ((instance, method), outcomes)) in row_meta.into_iter().zip(per_row).enumerate()
    {
        let mut ok: Vec<TrialResult> = Vec::new();
        let mut failed = 0usize;
        let mut first_err = preset_errors.remove(&row_index);
        if first_err.is_some() {
            failed = row_trials[row_index];
        }
        for outcome in outcomes {
            match outcome {
                Ok(t) => ok.push(t),
                Err(e) => {
                    failed += 1;
                    if first_err.is_none() {
                        first_err = Some(e.to_string());
                    }
                }
            }
        }
        let mean = |vals: Vec<f64>| vals.iter().sum::<f64>() / vals.len() as f64;
        let metric_mean = |get: fn(&TrialResult) -> Option<f64>| {
            if !ok.is_empty() && ok.iter().all(|t| get(t).is_some()) {
                mean(ok.iter().map(|t| get(t).unwrap()).collect())
            } else {
                f64::NAN
            }
        };
        let row = BenchRow {
            instance,
            method,
            time_s: mean(ok.iter().map(|t| t.time_s).collect()),
            iterations: mean(ok.iter().map(|t| t.iterations as f64).collect()),
            acc_percent: metric_mean(|t| t.acc),
            nmi: metric_mean(|t| t.nmi),
            trials_ok: ok.len(),
            trials_failed: failed,
            error: first_err,
        };
        for t in &mut ok {
            if let Some(r) = t.report.take() {
                reports.push((row_index, r));
            }
        }
        rows.push(row);
    }
    Ok(BenchOutput { rows, reports })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Results as CSV (header line included; NaN means "not available").
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(
        "instance,method,time_s,iterations,acc_percent,nmi,trials_ok,trials_failed,error\n",
    );
    for r in rows {
        s.push_str(&format!(
            "{},{},{:.4},{:.2},{:.2},{:.4},{},{},{}\n",
            csv_field(&r.instance),
            csv_field(&r.method),
            r.time_s,
            r.iterations,
            r.acc_percent,
            r.nmi,
            r.trials_ok,
            r.trials_failed,
            csv_field(r.error.as_deref().unwrap_or("")),
        ));
    }
    s
}

fn md_cell(v: f64, decimals: usize) -> String {
    if v.is_nan() {
        "—".to_string()
    } else {
        format!("{v:.decimals$}")
    }
}

/// Results as a Markdown table in the `Time(s) | Ite | Acc(%) | NMI` layout,
/// with one footnote line per row that had failing trials.
pub fn bench_markdown(rows: &[BenchRow]) -> String {
    let mut s = String::from(
        "| Instance | Method | Time(s) | Ite | Acc(%) | NMI |\n|---|---|---:|---:|---:|---:|\n",
    );
    for r in rows {
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            r.instance,
            r.method,
            md_cell(r.time_s, 2),
            md_cell(r.iterations, 1),
            md_cell(r.acc_percent, 2),
            md_cell(r.nmi, 4),
        ));
    }
    let failures: Vec<&BenchRow> = rows.iter().filter(|r| r.trials_failed > 0).collect();
    if !failures.is_empty() {
        s.push_str("\nFailures:\n");
        for r in failures {
            s.push_str(&format!(
                "- `{}/{}`: {}/{} trials failed: {}\n",
                r.instance,
                r.method,
                r.trials_failed,
                r.trials_ok + r.trials_failed,
                r.error.as_deref().unwrap_or("unknown"),
            ));
        }
    }
    s
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Parse the experiment list (a JSON array, or a single object for
/// convenience).
pub fn read_config(path: &Path) -> Result<Vec<ExperimentConfig>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    match serde_json::from_str::<Vec<ExperimentConfig>>(&text) {
        Ok(v) => Ok(v),
        Err(list_err) => serde_json::from_str::<ExperimentConfig>(&text)
            .map(|c| vec![c])
            .map_err(|_| CliError::usage(format!("{}: {list_err}", path.display()))),
    }
}

/// `bench`: run the sweep described by `config_path`, write `bench.csv` and
/// `bench.md` under `out`, plus one `trace_<instance>_<method>.csv` per row
/// when `traces` is set.
pub fn cmd_bench(config_path: &Path, out: &Path, traces: bool) -> Result<String, CliError> {
    let configs = read_config(config_path)?;
    if configs.is_empty() {
        return Err(CliError::usage("config lists no experiments"));
    }
    let output = run_bench(&configs, traces)?;
    ensure_dir(out)?;
    let csv_path = out.join("bench.csv");
    fs::write(&csv_path, bench_csv(&output.rows))
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", csv_path.display())))?;
    let md_path = out.join("bench.md");
    fs::write(&md_path, bench_markdown(&output.rows))
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", md_path.display())))?;
    for (row_index, report) in &output.reports {
        let row = &output.rows[*row_index];
        let name = format!(
            "trace_{}_{}.csv",
            sanitize(&row.instance),
            sanitize(&row.method)
        );
        write_trace_csv(&out.join(name), report)?;
    }
    let failed_rows = output.rows.iter().filter(|r| r.trials_failed > 0).count();
    Ok(format!(
        "{} rows ({} with failures) -> {}",
        output.rows.len(),
        failed_rows,
        out.display()
    ))
}
