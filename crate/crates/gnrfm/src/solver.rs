//! Augmented-Lagrangian solvers for the group-norm regularized factorization
//!
//! ```text
//! min ‖E‖₂,₁ + μ_U‖U‖₂,₁ + (μ_V/2)‖V‖²_F   s.t.  X = UV + E
//! ```
//!
//! One outer iteration updates V (a ridge least-squares solve), U (a
//! linearized proximal step, i.e. gradient step + column soft threshold),
//! then E (column soft threshold of the constraint gap), then the multiplier
//! Y and penalty β. The accelerated variant runs the (V,U) pair once per
//! outer iteration and deletes the columns of U that the threshold zeroed —
//! once a column is exactly zero it stays exactly zero, so deletion is free.
//! The classical variant re-runs (V,U) until an inner criterion is met.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_spd, spectral_norm_sq, svd};
use crate::matrix::Matrix;
use crate::prox::{column_soft_threshold, group_norm_21};

/// Inner (V,U)-loop policy for one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMode {
    /// Single pass — the accelerated algorithm.
    OneStep,
    /// A fixed number of passes.
    Fixed(usize),
    /// Pass until |‖U^{l+1}V^{l+1}‖_F / ‖U^l V^l‖_F − 1| < eps_inner.
    Converge(f64),
}

/// Hyperparameters and loop policy. `Default` gives the accelerated solver
/// with the experiment-section settings (β₀ = 1, β_max = 1e5, ρ = 2,
/// ε = 1e-5) and the mildest regularization pair (μ_U = 1, μ_V = 10).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Group-norm weight on U; drives columns of U to exact zero.
    pub mu_u: f64,
    /// Frobenius weight on V.
    pub mu_v: f64,
    /// Initial overestimated factor width K; `None` means min(m, n). Values
    /// above min(m, n) are clamped with a warning (the SVD initialization
    /// cannot produce more independent columns than that).
    pub init_rank: Option<usize>,
    /// Initial penalty β₀.
    pub beta0: f64,
    /// Penalty cap, applied after the growth rule.
    pub beta_max: f64,
    /// Penalty growth factor ρ.
    pub rho: f64,
    /// Residual-decrease factor ζ: β is kept when the constraint residual
    /// shrank by at least this factor, otherwise grown.
    pub zeta: f64,
    /// Exponent ν in the ‖Y‖^{1+ν} growth term.
    pub nu: f64,
    /// Stopping tolerance on ‖UV+E−X‖_F/‖X‖_F.
    pub eps: f64,
    pub max_outer: usize,
    pub inner_mode: InnerMode,
    /// Safety cap on `Converge` inner passes.
    pub max_inner: usize,
    /// Delete exactly-zero U columns (and the matching V rows) every outer
    /// iteration.
    pub prune: bool,
    /// Build the U gradient step entirely from the freshly updated V
    /// (product term, trailing transpose, and step size ξ alike). The
    /// default instead linearizes around the previous iterate: the product
    /// term and ξ stay at the old V, and only the trailing transpose uses
    /// the fresh one in one-step mode (multi-pass inner modes keep the old V
    /// everywhere, a plain Jacobi sweep). The all-new variant shrinks far
    /// more aggressively on the first iterations — with a large `mu_v` it
    /// can wipe out every column before the penalty has warmed up — so it
    /// is off by default and kept only for comparing the two conventions.
    pub gradient_at_new_v: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mu_u: 1.0,
            mu_v: 10.0,
            init_rank: None,
            beta0: 1.0,
            beta_max: 1e5,
            rho: 2.0,
            zeta: 0.9,
            nu: 0.1,
            eps: 1e-5,
            max_outer: 200,
            inner_mode: InnerMode::OneStep,
            max_inner: 100,
            prune: true,
            gradient_at_new_v: false,
        }
    }
}

impl SolverConfig {
    // `!(x > 0.0)` rather than `x <= 0.0`: the negated form also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.mu_u > 0.0) {
            return bad(format!("mu_u must be > 0, got {}", self.mu_u));
        }
        if !(self.mu_v > 0.0) {
            return bad(format!("mu_v must be > 0, got {}", self.mu_v));
        }
        if self.init_rank == Some(0) {
            return bad("init_rank must be ≥ 1".into());
        }
        if !(self.beta0 > 0.0) {
            return bad(format!("beta0 must be > 0, got {}", self.beta0));
        }
        if !(self.beta_max >= self.beta0) {
            return bad(format!(
                "beta_max ({}) must be ≥ beta0 ({})",
                self.beta_max, self.beta0
            ));
        }
        if !(self.rho > 1.0) {
            return bad(format!("rho must be > 1, got {}", self.rho));
        }
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return bad(format!("zeta must lie in (0,1), got {}", self.zeta));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return bad(format!("nu must lie in (0,1), got {}", self.nu));
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps must be > 0, got {}", self.eps));
        }
        if self.max_outer == 0 {
            return bad("max_outer must be ≥ 1".into());
        }
        if self.max_inner == 0 {
            return bad("max_inner must be ≥ 1".into());
        }
        match self.inner_mode {
            InnerMode::Fixed(0) => bad("fixed inner mode needs L ≥ 1".into()),
            InnerMode::Converge(e) if !(e > 0.0) => {
                bad(format!("converge inner mode needs eps_inner > 0, got {e}"))
            }
            _ => Ok(()),
        }
    }
}

/// Solver iterate: X ≈ U·V + E with multiplier Y and penalty β.
#[derive(Debug, Clone)]
pub struct FactorState {
    /// m×K_t left factor (column-sparse).
    pub u: Matrix,
    /// K_t×n right factor.
    pub v: Matrix,
    /// m×n column-sparse error term.
    pub e: Matrix,
    /// m×n Lagrange multiplier.
    pub y: Matrix,
    pub beta: f64,
    /// Completed outer iterations.
    pub iter: usize,
}

impl FactorState {
    /// Active factor width K_t (= U.cols = V.rows).
    pub fn width(&self) -> usize {
        self.u.cols()
    }

    /// Number of U columns that are not exactly zero.
    pub fn nonzero_columns(&self) -> usize {
        (0..self.u.cols())
            .filter(|&j| !col_is_zero(&self.u, j))
            .count()
    }
}

/// Everything a solve run reports. Histories have one entry per completed
/// outer iteration.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub final_state: FactorState,
    pub iterations: usize,
    /// ‖U_tV_t+E_t−X‖_F/‖X‖_F after each outer iteration.
    pub residual_history: Vec<f64>,
    /// Active width K_t after each outer iteration.
    pub rank_history: Vec<usize>,
    /// Objective ‖E‖₂,₁ + μ_U‖U‖₂,₁ + (μ_V/2)‖V‖²_F after each outer iteration.
    pub objective_history: Vec<f64>,
    /// Cumulative wall-clock seconds at the end of each outer iteration
    /// (measured from solve entry, so the first entry includes init).
    pub time_history: Vec<f64>,
    /// Seconds spent in initialization (the SVD of X).
    pub init_time_s: f64,
    pub converged: bool,
    pub wall_time_s: f64,
}

/// Snapshot passed to a [`solve_monitored`] observer after each inner (V,U)
/// pass. On the final inner pass of an outer iteration, `e_step` carries the
/// E update as well. All matrices are copies taken at the moment described.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// Outer iteration index t (0-based).
    pub outer: usize,
    /// Inner pass index within the outer iteration (0-based).
    pub inner: usize,
    pub beta: f64,
    /// U entering the pass.
    pub u_before: Matrix,
    /// V entering the pass.
    pub v_before: Matrix,
    /// E and Y entering the pass (fixed across the inner loop).
    pub e_before: Matrix,
    pub y: Matrix,
    pub v_new: Matrix,
    /// Gradient-step matrix fed to the column soft threshold.
    pub q: Matrix,
    /// Shrinkage level μ_U/(β·ξ).
    pub u_threshold: f64,
    pub u_new: Matrix,
    pub e_step: Option<EStep>,
}

/// The E update of one outer iteration: `e_new` is the column soft threshold
/// of `target` at level `threshold`.
#[derive(Debug, Clone)]
pub struct EStep {
    pub target: Matrix,
    pub threshold: f64,
    pub e_new: Matrix,
}

/// Initial iterate from the thin SVD of X: U₀ the first K left singular
/// vectors, V₀ = diag(σ₁..σ_K)·(first K right singular vectors)ᵀ, E₀ = Y₀ = 0.
pub fn init_state(x: &Matrix, cfg: &SolverConfig) -> Result<FactorState> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::InvalidParameter(
            "cannot factor an empty matrix".into(),
        ));
    }
    if !x.all_finite() {
        return Err(Error::InvalidParameter(
            "data matrix contains NaN/Inf".into(),
        ));
    }
    let bound = x.rows().min(x.cols());
    let k = match cfg.init_rank {
        None => bound,
        Some(k) if k <= bound => k,
        Some(k) => {
            log::warn!("init_rank {k} exceeds min(m,n) = {bound}; clamping");
            bound
        }
    };
    let f = svd(x)?;
    let keep: Vec<usize> = (0..k).collect();
    let u = f.left.select_columns(&keep);
    let right_k = f.right.select_columns(&keep); // n×k
    let mut v = Matrix::zeros(k, x.cols());
    for i in 0..k {
        let s = f.singulars[i];
        for j in 0..x.cols() {
            v[(i, j)] = s * right_k[(j, i)];
        }
    }
    Ok(FactorState {
        u,
        v,
        e: Matrix::zeros(x.rows(), x.cols()),
        y: Matrix::zeros(x.rows(), x.cols()),
        beta: cfg.beta0,
        iter: 0,
    })
}

/// Ridge least-squares V update:
/// `V = (μ_V·I + β·UᵀU)⁻¹ · β·Uᵀ(X − E − Y/β)`.
pub fn update_v(state: &FactorState, x: &Matrix, cfg: &SolverConfig) -> Result<Matrix> {
    if state.width() == 0 {
        return Err(Error::InvalidParameter(
            "update_v on a width-0 factor".into(),
        ));
    }
    let beta = state.beta;
    let mut rhs = x - &state.e;
    rhs.axpy_in_place(-1.0 / beta, &state.y);
    let ut_rhs = state.u.transpose_dot(&rhs);
    let b = ut_rhs.scale(beta);
    let g = state.u.gram();
    let k = state.width();
    let a = Matrix::from_fn(k, k, |i, j| {
        let s = beta * g[(i, j)];
        if i == j {
            cfg.mu_v + s
        } else {
            s
        }
    });
    solve_spd(&a, &b)
}

/// Linearized proximal U update (gradient step on the smooth part, then a
/// column soft threshold). Applies the same V-role convention the full
/// solver uses for `cfg` (see [`SolverConfig::gradient_at_new_v`] and the
/// inner mode). Returns the new U; [`solve_monitored`] exposes the
/// intermediate Q and threshold through [`IterationRecord`].
pub fn update_u(
    state: &FactorState,
    x: &Matrix,
    cfg: &SolverConfig,
    v_new: &Matrix,
) -> Result<Matrix> {
    let (v_grad, v_xi, v_tr) = u_step_roles(cfg, &state.v, v_new);
    if v_xi.max_abs() == 0.0 {
        return Err(Error::InvalidParameter(
            "U update needs a nonzero V (step size ξ(V) would vanish)".into(),
        ));
    }
    Ok(u_step(
        &state.u, v_grad, v_xi, v_tr, &state.e, &state.y, state.beta, x, cfg.mu_u,
    )?
    .u_new)
}

/// Which V each piece of the U update sees: the gradient product term, the
/// step size ξ, and the trailing transpose, in that order.
fn u_step_roles<'a>(
    cfg: &SolverConfig,
    v_prev: &'a Matrix,
    v_new: &'a Matrix,
) -> (&'a Matrix, &'a Matrix, &'a Matrix) {
    if cfg.gradient_at_new_v {
        (v_new, v_new, v_new)
    } else {
        match cfg.inner_mode {
            InnerMode::OneStep => (v_prev, v_prev, v_new),
            InnerMode::Fixed(_) | InnerMode::Converge(_) => (v_prev, v_prev, v_prev),
        }
    }
}

struct UStep {
    q: Matrix,
    threshold: f64,
    u_new: Matrix,
}

#[allow(clippy::too_many_arguments)]
fn u_step(
    u: &Matrix,
    v_grad: &Matrix,
    v_xi: &Matrix,
    v_tr: &Matrix,
    e: &Matrix,
    y: &Matrix,
    beta: f64,
    x: &Matrix,
    mu_u: f64,
) -> Result<UStep> {
    // Step size ξ = 1.02·σ²_max(v_xi); the caller decides which iterate each
    // V role is evaluated at.
    let xi = 1.02 * spectral_norm_sq(v_xi);
    if xi == 0.0 {
        return Err(Error::InvalidParameter(
            "U update needs a nonzero V (step size ξ(V) would vanish)".into(),
        ));
    }
    // G = U·V + E − X + Y/β: the gradient of ½β‖UV+E−X+Y/β‖²_F in U is G·Vᵀ.
    let mut g = u.dot(v_grad);
    g.axpy_in_place(1.0, e);
    g.axpy_in_place(-1.0, x);
    g.axpy_in_place(1.0 / beta, y);
    let q = u - &g.dot_transpose(v_tr).scale(1.0 / xi);
    let threshold = mu_u / (beta * xi);
    let u_new = column_soft_threshold(&q, threshold)?;
    Ok(UStep {
        q,
        threshold,
        u_new,
    })
}

/// E update: column soft threshold of `X − U_new·V_new − Y/β` at level 1/β.
pub fn update_e(state: &FactorState, x: &Matrix, u_new: &Matrix, v_new: &Matrix) -> Result<Matrix> {
    let beta = state.beta;
    let mut target = x - &u_new.dot(v_new);
    target.axpy_in_place(-1.0 / beta, &state.y);
    column_soft_threshold(&target, 1.0 / beta)
}

/// Multiplier and penalty update:
/// `Y⁺ = Y + β·(UV+E−X)`; β is kept when the constraint residual decreased by
/// the factor ζ (except on the very first iteration), otherwise
/// `β⁺ = min(β_max, max(ρ·β, ‖Y⁺‖_F^{1+ν}))`.
///
/// `prev_residual_norm` is the *absolute* Frobenius residual of the previous
/// outer iteration (`f64::INFINITY` works for "none", though the t = 0 branch
/// never consults it).
pub fn update_multiplier_penalty(
    state: &FactorState,
    x: &Matrix,
    cfg: &SolverConfig,
    prev_residual_norm: f64,
) -> Result<(Matrix, f64)> {
    let mut r = state.u.dot(&state.v);
    r.axpy_in_place(1.0, &state.e);
    r.axpy_in_place(-1.0, x);
    let res_norm = r.frobenius_norm();
    let mut y_new = state.y.clone();
    y_new.axpy_in_place(state.beta, &r);
    let beta_new = next_beta(
        cfg,
        state.beta,
        state.iter,
        res_norm,
        prev_residual_norm,
        &y_new,
    );
    Ok((y_new, beta_new))
}

fn next_beta(
    cfg: &SolverConfig,
    beta: f64,
    t: usize,
    res_norm: f64,
    prev_res_norm: f64,
    y_new: &Matrix,
) -> f64 {
    if t > 0 && res_norm <= cfg.zeta * prev_res_norm {
        beta
    } else {
        let grown = (cfg.rho * beta).max(y_new.frobenius_norm().powf(1.0 + cfg.nu));
        grown.min(cfg.beta_max)
    }
}

/// Delete exactly-zero columns of U together with the same-index rows of V,
/// but only once the matching V row is exactly zero as well. The product U·V
/// is unchanged entry for entry, and because the step size ξ is evaluated at
/// V, waiting for the pair keeps the deletion bitwise invisible to every
/// later iterate: a freshly-died column's V row carries one more ridge
/// update (which zeroes it exactly) before the pair is dropped. Errors when
/// every pair is zero (the caller decides how to report the rank-0 outcome).
pub fn prune_zero_columns(state: &FactorState) -> Result<FactorState> {
    let keep: Vec<usize> = (0..state.u.cols())
        .filter(|&j| !(col_is_zero(&state.u, j) && row_is_zero(&state.v, j)))
        .collect();
    if keep.is_empty() {
        return Err(Error::Numerical(
            "every column of U shrank to zero (mu_u too aggressive for this data)".into(),
        ));
    }
    if keep.len() == state.u.cols() {
        return Ok(state.clone());
    }
    Ok(FactorState {
        u: state.u.select_columns(&keep),
        v: state.v.select_rows(&keep),
        e: state.e.clone(),
        y: state.y.clone(),
        beta: state.beta,
        iter: state.iter,
    })
}

/// The stopping quantity ‖UV+E−X‖_F / ‖X‖_F.
pub fn relative_residual(x: &Matrix, u: &Matrix, v: &Matrix, e: &Matrix) -> Result<f64> {
    let xn = x.frobenius_norm();
    if xn == 0.0 {
        return Err(Error::InvalidParameter(
            "relative residual undefined for zero X".into(),
        ));
    }
    let mut r = u.dot(v);
    r.axpy_in_place(1.0, e);
    r.axpy_in_place(-1.0, x);
    Ok(r.frobenius_norm() / xn)
}

/// Objective ‖E‖₂,₁ + μ_U‖U‖₂,₁ + (μ_V/2)‖V‖²_F (telemetry only).
pub fn objective_value(u: &Matrix, v: &Matrix, e: &Matrix, cfg: &SolverConfig) -> f64 {
    let v_sq: f64 = v.data().iter().map(|&x| x * x).sum();
    group_norm_21(e) + cfg.mu_u * group_norm_21(u) + 0.5 * cfg.mu_v * v_sq
}

/// Run the solver. Equivalent to [`solve_monitored`] without an observer.
pub fn solve(x: &Matrix, cfg: &SolverConfig) -> Result<SolveReport> {
    solve_monitored(x, cfg, None)
}

/// Run the solver, handing an [`IterationRecord`] to `monitor` after every
/// inner (V,U) pass. Monitoring costs extra copies but does not perturb the
/// iteration itself.
pub fn solve_monitored(
    x: &Matrix,
    cfg: &SolverConfig,
    mut monitor: Option<&mut dyn FnMut(&IterationRecord)>,
) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    let x_norm = x.frobenius_norm();
    if x_norm == 0.0 {
        return Err(Error::InvalidParameter(
            "cannot factor a zero matrix".into(),
        ));
    }
    let mut state = init_state(x, cfg)?;
    let init_time_s = start.elapsed().as_secs_f64();

    let mut residual_history = Vec::new();
    let mut rank_history = Vec::new();
    let mut objective_history = Vec::new();
    let mut time_history = Vec::new();
    let mut prev_res_abs = f64::INFINITY;
    let mut converged = false;
    let mut rank_collapsed = false;

    for t in 0..cfg.max_outer {
        let passes = match cfg.inner_mode {
            InnerMode::OneStep => 1,
            InnerMode::Fixed(l) => l,
            InnerMode::Converge(_) => cfg.max_inner,
        };
        let mut prev_prod_norm = match cfg.inner_mode {
            InnerMode::Converge(_) => Some(state.u.dot(&state.v).frobenius_norm()),
            _ => None,
        };

        // The record of an inner pass is flushed when the next pass starts,
        // so the last one of the outer iteration can carry the E step.
        let mut pending: Option<IterationRecord> = None;
        for l in 0..passes {
            let v_new = update_v(&state, x, cfg)?;
            let (v_grad, v_xi, v_tr) = u_step_roles(cfg, &state.v, &v_new);
            if v_xi.max_abs() == 0.0 {
                // ξ(0) is undefined; keep U, accept V = v_new, and move on.
                // When v_new itself is the zero culprit, further passes would
                // only reproduce it (U, E, Y unchanged), so stop the inner
                // loop; otherwise the next pass sees a nonzero previous V.
                log::warn!("outer {t}: step-size source V is zero; skipping the U update");
                let v_new_zero = v_new.max_abs() == 0.0;
                state.v = v_new;
                if v_new_zero {
                    break;
                }
                continue;
            }
            let step = u_step(
                &state.u, v_grad, v_xi, v_tr, &state.e, &state.y, state.beta, x, cfg.mu_u,
            )?;
            if let Some(cb) = monitor.as_mut() {
                if let Some(rec) = pending.take() {
                    cb(&rec);
                }
                pending = Some(IterationRecord {
                    outer: t,
                    inner: l,
                    beta: state.beta,
                    u_before: state.u.clone(),
                    v_before: state.v.clone(),
                    e_before: state.e.clone(),
                    y: state.y.clone(),
                    v_new: v_new.clone(),
                    q: step.q,
                    u_threshold: step.threshold,
                    u_new: step.u_new.clone(),
                    e_step: None,
                });
            }
            state.v = v_new;
            state.u = step.u_new;
            if let InnerMode::Converge(eps_inner) = cfg.inner_mode {
                let prod_norm = state.u.dot(&state.v).frobenius_norm();
                let prev = prev_prod_norm.replace(prod_norm).unwrap();
                let flat = if prev == 0.0 {
                    prod_norm == 0.0
                } else {
                    (prod_norm / prev - 1.0).abs() < eps_inner
                };
                if flat {
                    break;
                }
            }
        }

        if cfg.prune {
            match prune_zero_columns(&state) {
                Ok(next) => state = next,
                Err(_) => {
                    log::warn!("outer {t}: every U column pruned; reporting a rank-0 solution");
                    state.u = Matrix::zeros(x.rows(), 0);
                    state.v = Matrix::zeros(0, x.cols());
                    rank_collapsed = true;
                }
            }
        }

        // E update, then the residual it leaves behind.
        let prod = state.u.dot(&state.v);
        let mut target = x - &prod;
        target.axpy_in_place(-1.0 / state.beta, &state.y);
        let e_new = column_soft_threshold(&target, 1.0 / state.beta)?;
        if let Some(cb) = monitor.as_mut() {
            if let Some(mut rec) = pending.take() {
                rec.e_step = Some(EStep {
                    target: target.clone(),
                    threshold: 1.0 / state.beta,
                    e_new: e_new.clone(),
                });
                cb(&rec);
            }
        }
        state.e = e_new;

        let mut r = prod;
        r.axpy_in_place(1.0, &state.e);
        r.axpy_in_place(-1.0, x);
        let res_abs = r.frobenius_norm();

        state.y.axpy_in_place(state.beta, &r);
        let beta_next = next_beta(cfg, state.beta, t, res_abs, prev_res_abs, &state.y);

        let rel = res_abs / x_norm;
        let objective = objective_value(&state.u, &state.v, &state.e, cfg);
        // Safeguard: the augmented Lagrangian must stay finite and bounded.
        let lagrangian = objective
            + crate::matrix::dot_slices(state.y.data(), r.data())
            + 0.5 * state.beta * res_abs * res_abs;
        if !lagrangian.is_finite() || lagrangian.abs() > 1e30 {
            return Err(Error::Numerical(format!(
                "augmented Lagrangian diverged at outer iteration {t} (value {lagrangian:e})"
            )));
        }

        residual_history.push(rel);
        rank_history.push(state.width());
        objective_history.push(objective);
        time_history.push(start.elapsed().as_secs_f64());
        log::debug!(
            "outer {t}: rel residual {rel:.3e}, width {}, beta {:.3e}",
            state.width(),
            state.beta
        );

        state.beta = beta_next;
        state.iter = t + 1;
        prev_res_abs = res_abs;

        if rel < cfg.eps {
            converged = true;
            break;
        }
        if rank_collapsed {
            break;
        }
    }

    Ok(SolveReport {
        iterations: residual_history.len(),
        residual_history,
        rank_history,
        objective_history,
        time_history,
        init_time_s,
        converged,
        wall_time_s: start.elapsed().as_secs_f64(),
        final_state: state,
    })
}

fn col_is_zero(m: &Matrix, j: usize) -> bool {
    (0..m.rows()).all(|i| m[(i, j)] == 0.0)
}

fn row_is_zero(m: &Matrix, i: usize) -> bool {
    (0..m.cols()).all(|j| m[(i, j)] == 0.0)
}
