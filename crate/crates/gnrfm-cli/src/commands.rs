//! One function per subcommand. Each returns the text the binary prints on
//! success, so the integration tests can exercise the exact user-visible
//! behavior without spawning a process.

use crate::io;
use crate::CliError;
use gnrfm::metrics::{accuracy, nmi};
use gnrfm::segmentation::{build_affinity_abs, build_affinity_squared, ncut_cluster, recover_z};
use gnrfm::solver::{solve, SolveReport};
use gnrfm::synth::generate;
use gnrfm::{Matrix, SolverConfig, SyntheticSpec};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

/// Which affinity to build from the recovered representation Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AffinityMode {
    /// W_ij = (m_i·m_j)² from row-normalized U√Σ of the skinny SVD of Z.
    #[default]
    Squared,
    /// W = (|Z| + |Zᵀ|)/2.
    Abs,
}

pub(crate) fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", path.display())))
}

/// `gen`: write X.csv, labels.csv, E0.csv, meta.json under `out`.
pub fn cmd_gen(spec: &SyntheticSpec, out: &Path, shape_comments: bool) -> Result<String, CliError> {
    spec.validate()?;
    let inst = generate(spec)?;
    ensure_dir(out)?;
    io::write_matrix_csv(&out.join("X.csv"), &inst.x, shape_comments)?;
    io::write_labels_csv(&out.join("labels.csv"), &inst.labels)?;
    io::write_matrix_csv(&out.join("E0.csv"), &inst.e0, shape_comments)?;
    let meta = io::GenMeta {
        spec: spec.clone(),
        rng: io::RNG_ID.to_string(),
    };
    io::write_json(&out.join("meta.json"), &meta)?;
    Ok(format!(
        "wrote {}x{} instance ({} subspaces of dimension {}) to {}",
        inst.x.rows(),
        inst.x.cols(),
        spec.s,
        spec.r_tilde,
        out.display()
    ))
}

/// Solve run summary saved as report.json. Histories are per outer iteration;
/// `residual_history` is the relative constraint residual (take log10 for a
/// convergence plot), `time_history` is cumulative seconds from solve entry.
#[derive(Debug, Serialize, Deserialize)]
pub struct SolveReportFile {
    pub iterations: usize,
    pub converged: bool,
    pub final_rank: usize,
    pub relative_residual: f64,
    pub wall_time_s: f64,
    pub init_time_s: f64,
    pub residual_history: Vec<f64>,
    pub rank_history: Vec<usize>,
    pub objective_history: Vec<f64>,
    pub time_history: Vec<f64>,
}

impl SolveReportFile {
    pub fn from_report(r: &SolveReport) -> Self {
        SolveReportFile {
            iterations: r.iterations,
            converged: r.converged,
            final_rank: r.final_state.width(),
            relative_residual: r.residual_history.last().copied().unwrap_or(f64::NAN),
            wall_time_s: r.wall_time_s,
            init_time_s: r.init_time_s,
            residual_history: r.residual_history.clone(),
            rank_history: r.rank_history.clone(),
            objective_history: r.objective_history.clone(),
            time_history: r.time_history.clone(),
        }
    }
}

/// Write a per-iteration `(iter, time_s, log10_residual, rank)` trace. The
/// residual is floored at 1e-320 so the log never produces `-inf`.
pub fn write_trace_csv(path: &Path, report: &SolveReport) -> Result<(), CliError> {
    let mut text = String::from("# iter time_s log10_residual rank\n");
    for (t, &r) in report.residual_history.iter().enumerate() {
        let time = report.time_history.get(t).copied().unwrap_or(f64::NAN);
        let rank = report.rank_history.get(t).copied().unwrap_or(0);
        text.push_str(&format!(
            "{},{:.6},{:.12},{}\n",
            t + 1,
            time,
            r.max(1e-320).log10(),
            rank
        ));
    }
    fs::write(path, text)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

/// `solve`: factor the matrix at `data` and write U.csv, V.csv, E.csv,
/// report.json (and trace.csv if asked) under `out`.
pub fn cmd_solve(
    data: &Path,
    cfg: &SolverConfig,
    out: &Path,
    trace: bool,
    shape_comments: bool,
) -> Result<String, CliError> {
    cfg.validate()?;
    let x = io::read_matrix_csv(data)?;
    let report = solve(&x, cfg)?;
    ensure_dir(out)?;
    io::write_matrix_csv(&out.join("U.csv"), &report.final_state.u, shape_comments)?;
    io::write_matrix_csv(&out.join("V.csv"), &report.final_state.v, shape_comments)?;
    io::write_matrix_csv(&out.join("E.csv"), &report.final_state.e, shape_comments)?;
    io::write_json(
        &out.join("report.json"),
        &SolveReportFile::from_report(&report),
    )?;
    if trace {
        write_trace_csv(&out.join("trace.csv"), &report)?;
    }
    Ok(format!(
        "{} in {} iterations ({:.3}s): relative residual {:.3e}, active width {}",
        if report.converged {
            "converged"
        } else {
            "stopped"
        },
        report.iterations,
        report.wall_time_s,
        report.residual_history.last().copied().unwrap_or(f64::NAN),
        report.final_state.width()
    ))
}

/// `cluster`: rebuild Z from saved factors, form the affinity, cut it into
/// `k` groups; write labels.csv, affinity.csv (and affinity.pgm if asked).
#[allow(clippy::too_many_arguments)]
pub fn cmd_cluster(
    data: &Path,
    factors: &Path,
    k: usize,
    mode: AffinityMode,
    rank_tol: f64,
    seed: u64,
    out: &Path,
    heatmap: bool,
) -> Result<String, CliError> {
    let x = io::read_matrix_csv(data)?;
    let u = io::read_matrix_csv(&factors.join("U.csv"))?;
    let v = io::read_matrix_csv(&factors.join("V.csv"))?;
    let z = recover_z(&x, &u, &v)?;
    let w = match mode {
        AffinityMode::Squared => build_affinity_squared(&z, rank_tol)?,
        AffinityMode::Abs => build_affinity_abs(&z)?,
    };
    let labels = ncut_cluster(&w, k, seed)?;
    ensure_dir(out)?;
    io::write_labels_csv(&out.join("labels.csv"), &labels)?;
    io::write_matrix_csv(&out.join("affinity.csv"), w.as_matrix(), false)?;
    if heatmap {
        io::write_pgm(&out.join("affinity.pgm"), w.as_matrix())?;
    }
    Ok(format!(
        "clustered {} points into {} groups -> {}",
        labels.len(),
        k,
        out.display()
    ))
}

/// `eval`: score predicted labels against ground truth; the returned string
/// is a JSON object with `acc_percent` and `nmi`.
pub fn cmd_eval(pred: &Path, truth: &Path) -> Result<String, CliError> {
    let p = io::read_labels_csv(pred)?;
    let t = io::read_labels_csv(truth)?;
    if p.len() != t.len() {
        return Err(CliError::usage(format!(
            "label files disagree on length: {} has {}, {} has {}",
            pred.display(),
            p.len(),
            truth.display(),
            t.len()
        )));
    }
    let acc = accuracy(&t, &p)? * 100.0;
    let mi = nmi(&t, &p)?;
    Ok(serde_json::json!({ "acc_percent": acc, "nmi": mi }).to_string())
}

/// Shared plumbing for bench: run the post-solve segmentation pipeline.
pub fn segment(
    x: &Matrix,
    report: &SolveReport,
    k: usize,
    mode: AffinityMode,
    rank_tol: f64,
    seed: u64,
) -> Result<Vec<usize>, CliError> {
    let z = recover_z(x, &report.final_state.u, &report.final_state.v)?;
    let w = match mode {
        AffinityMode::Squared => build_affinity_squared(&z, rank_tol)?,
        AffinityMode::Abs => build_affinity_abs(&z)?,
    };
    Ok(ncut_cluster(&w, k, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> SyntheticSpec {
        SyntheticSpec {
            s: 2,
            p: 3,
            d_tilde: 4,
            r_tilde: 1,
            sigma: 0.0,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn gen_writes_expected_shapes_and_meta() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("data");
        cmd_gen(&tiny_spec(), &out, false).unwrap();
        let x = io::read_matrix_csv(&out.join("X.csv")).unwrap();
        assert_eq!((x.rows(), x.cols()), (4, 6));
        let e0 = io::read_matrix_csv(&out.join("E0.csv")).unwrap();
        assert_eq!((e0.rows(), e0.cols()), (4, 6));
        assert_eq!(
            io::read_labels_csv(&out.join("labels.csv")).unwrap(),
            vec![0, 0, 0, 1, 1, 1]
        );
        let meta: io::GenMeta = io::read_json(&out.join("meta.json")).unwrap();
        assert_eq!(meta.spec, tiny_spec());
        assert_eq!(meta.rng, "chacha8");
    }

    #[test]
    fn gen_rejects_invalid_spec() {
        let dir = tempfile::tempdir().unwrap();
        let bad = SyntheticSpec {
            r_tilde: 9,
            d_tilde: 4,
            ..tiny_spec()
        };
        let err = cmd_gen(&bad, dir.path(), false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn solve_then_cluster_then_eval_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("data");
        let spec = SyntheticSpec {
            s: 2,
            p: 6,
            d_tilde: 12,
            r_tilde: 1,
            sigma: 0.0,
            seed: 3,
            ..Default::default()
        };
        cmd_gen(&spec, &data, true).unwrap();

        let fac = dir.path().join("fac");
        let msg = cmd_solve(
            &data.join("X.csv"),
            &SolverConfig::default(),
            &fac,
            true,
            false,
        )
        .unwrap();
        assert!(msg.starts_with("converged"), "{msg}");
        let report: SolveReportFile = io::read_json(&fac.join("report.json")).unwrap();
        assert!(report.converged);
        assert_eq!(report.residual_history.len(), report.iterations);
        assert!(fac.join("trace.csv").exists());

        let seg = dir.path().join("seg");
        cmd_cluster(
            &data.join("X.csv"),
            &fac,
            2,
            AffinityMode::Squared,
            1e-8,
            0,
            &seg,
            true,
        )
        .unwrap();
        let pgm = fs::read(seg.join("affinity.pgm")).unwrap();
        assert!(pgm.starts_with(b"P5\n12 12\n255\n"));
        assert_eq!(pgm.len(), "P5\n12 12\n255\n".len() + 144);

        let json = cmd_eval(&seg.join("labels.csv"), &data.join("labels.csv")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["acc_percent"].as_f64().unwrap(), 100.0);
        assert_eq!(v["nmi"].as_f64().unwrap(), 1.0);
    }

    #[test]
    fn solve_rejects_invalid_config_before_touching_data() {
        let cfg = SolverConfig {
            mu_u: 0.0,
            ..Default::default()
        };
        let err = cmd_solve(
            Path::new("/nonexistent.csv"),
            &cfg,
            Path::new("/tmp"),
            false,
            false,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("mu_u"));
    }

    #[test]
    fn eval_rejects_length_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        io::write_labels_csv(&a, &[0, 1, 1]).unwrap();
        io::write_labels_csv(&b, &[0, 1]).unwrap();
        let err = cmd_eval(&a, &b).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("length"));
    }

    #[test]
    fn eval_is_permutation_invariant() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        io::write_labels_csv(&a, &[0, 0, 1, 1, 2, 2]).unwrap();
        io::write_labels_csv(&b, &[2, 2, 0, 0, 1, 1]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&cmd_eval(&a, &b).unwrap()).unwrap();
        assert_eq!(v["acc_percent"].as_f64().unwrap(), 100.0);
        assert_eq!(v["nmi"].as_f64().unwrap(), 1.0);
    }
}
