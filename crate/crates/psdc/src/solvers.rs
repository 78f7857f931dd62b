//! DCA and boosted-DCA outer loops over a DC form and a polyhedron.
//!
//! Every variant repeats the same convex step: freeze the gradient of the
//! concave half at the current point, solve the resulting strongly convex
//! subproblem on the dual ([`crate::fdpg`]), and inspect the displacement
//! `d = y - x`. Plain DCA moves to `y`; the boosted variants first push
//! further along `d` as long as the polyhedron allows, picking the step by
//! exact minimization of the one-dimensional restriction or by an Armijo
//! backtracking rule.

use std::time::Instant;

use ndarray::{Array1, ArrayView1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomp::DcForm;
use crate::error::{Error, Result};
use crate::fdpg::{fdpg_solve, spectral_norm, warm_start, SubproblemSpec};
use crate::linalg::{norm2, solve_dense};
use crate::linesearch::{curve_coeffs, exact_line_search};
use crate::polyhedron::Polyhedron;

/// Outer-loop parameters; the defaults match the experimental settings
/// used throughout the test suite.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Stop when `|y - x| / (1 + |x|)` drops below this.
    pub epsilon: f64,
    pub max_outer: usize,
    /// Overrides the form's strong-convexity modulus when set.
    pub rho: Option<f64>,
    /// Relative dual-change tolerance of the subproblem solver.
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    pub armijo_sigma: f64,
    pub armijo_beta: f64,
    pub armijo_max_backtracks: usize,
    /// Diagnostic switch: boosted variants skip the line search and take
    /// `t = 0`, which must reproduce plain DCA exactly.
    pub force_zero_step: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-5,
            max_outer: 2000,
            rho: None,
            inner_tol: 5e-5,
            inner_max_iter: 20_000,
            armijo_sigma: 1e-3,
            armijo_beta: 0.8,
            armijo_max_backtracks: 50,
            force_zero_step: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
}

/// One outer iteration. `f` is the objective at the incoming iterate,
/// `f_y` at the subproblem solution, `t` the boost step taken from it
/// (always 0 for plain DCA and on the terminal row), and `seconds` the
/// cumulative wall clock when the row was recorded.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub k: usize,
    pub f: f64,
    pub f_y: f64,
    pub dnorm: f64,
    pub t: f64,
    pub inner_iters: usize,
    pub inner_converged: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    pub status: SolveStatus,
    /// Objective at the returned point.
    pub f_final: f64,
    /// Outer iterations whose subproblem hit its iteration cap.
    pub inner_failures: usize,
}

impl SolveTrace {
    /// Number of convex subproblems solved.
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Fixed-column CSV: `k,f,dnorm,t,inner_iters,seconds`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,f,dnorm,t,inner_iters,seconds\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{},{:.6}\n",
                r.k, r.f, r.dnorm, r.t, r.inner_iters, r.seconds
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Strategy {
    None,
    Exact,
    Armijo,
}

/// Plain DCA: each iterate is the subproblem solution itself.
pub fn dca(
    dc: &DcForm,
    p: &Polyhedron,
    x0: ArrayView1<f64>,
    cfg: &SolverConfig,
) -> Result<(Array1<f64>, SolveTrace)> {
    drive(dc, p, x0, cfg, Strategy::None)
}

/// Boosted DCA with exact line search along the displacement.
pub fn bdca_exact(
    dc: &DcForm,
    p: &Polyhedron,
    x0: ArrayView1<f64>,
    cfg: &SolverConfig,
) -> Result<(Array1<f64>, SolveTrace)> {
    drive(dc, p, x0, cfg, Strategy::Exact)
}

/// Boosted DCA with Armijo backtracking along the displacement.
pub fn bdca_armijo(
    dc: &DcForm,
    p: &Polyhedron,
    x0: ArrayView1<f64>,
    cfg: &SolverConfig,
) -> Result<(Array1<f64>, SolveTrace)> {
    drive(dc, p, x0, cfg, Strategy::Armijo)
}

fn drive(
    dc: &DcForm,
    p: &Polyhedron,
    x0: ArrayView1<f64>,
    cfg: &SolverConfig,
    strategy: Strategy,
) -> Result<(Array1<f64>, SolveTrace)> {
    let mut form = dc.clone();
    if let Some(r) = cfg.rho {
        form.rho = r;
    }
    if form.rho <= 0.0 {
        return Err(Error::NonPositiveRho(form.rho));
    }
    if x0.len() != form.n || p.n() != form.n {
        return Err(Error::DimensionMismatch {
            expected: form.n,
            got: x0.len(),
        });
    }
    if !p.contains(x0, 1e-8) {
        return Err(Error::InfeasiblePoint);
    }
    let (a_plus, b_plus, powers) = form.stacked_plus();
    let lipschitz = if a_plus.nrows() > 0 {
        (1.01 * spectral_norm(a_plus.view())).powi(2) / form.rho
    } else {
        1.0
    };

    let start = Instant::now();
    let mut x = x0.to_owned();
    let mut records = Vec::new();
    let mut inner_failures = 0usize;
    let mut status = SolveStatus::MaxIterations;

    for k in 0..cfg.max_outer {
        let c = form.grad_h(x.view());
        let y0 = warm_start(a_plus.view(), b_plus.view(), &powers, x.view());
        let spec = SubproblemSpec {
            a_plus: a_plus.view(),
            b_plus: b_plus.view(),
            powers: &powers,
            rho: form.rho,
            c,
            polyhedron: p,
            lipschitz,
        };
        let res = fdpg_solve(&spec, y0.view(), cfg.inner_tol, cfg.inner_max_iter)?;
        if !res.converged {
            inner_failures += 1;
        }
        let y = res.u;
        let d = &y - &x;
        let dnorm = norm2(&d);
        let fx = form.eval_f(x.view());
        let fy = form.eval_f(y.view());

        if dnorm / (1.0 + norm2(&x)) < cfg.epsilon {
            records.push(IterationRecord {
                k,
                f: fx,
                f_y: fy,
                dnorm,
                t: 0.0,
                inner_iters: res.iterations,
                inner_converged: res.converged,
                seconds: start.elapsed().as_secs_f64(),
            });
            status = SolveStatus::Converged;
            break;
        }

        let mut t = 0.0;
        let mut x_next = y.clone();
        if strategy != Strategy::None && !cfg.force_zero_step && dnorm > 0.0 {
            let dir = equality_safeguard(p, d);
            let dirnorm = norm2(&dir);
            if dirnorm > 0.0 {
                let t_bar = p.max_step(y.view(), dir.view())?;
                if t_bar > 0.0 {
                    t = match strategy {
                        Strategy::Exact => exact_line_search(&form, y.view(), dir.view(), t_bar),
                        Strategy::Armijo => armijo_search(&form, y.view(), dir.view(), t_bar, cfg),
                        Strategy::None => unreachable!(),
                    };
                }
                if t > 0.0 {
                    x_next = &y + &(&dir * t);
                }
            }
        }

        records.push(IterationRecord {
            k,
            f: fx,
            f_y: fy,
            dnorm,
            t,
            inner_iters: res.iterations,
            inner_converged: res.converged,
            seconds: start.elapsed().as_secs_f64(),
        });
        x = x_next;
    }

    let f_final = form.eval_f(x.view());
    Ok((
        x,
        SolveTrace {
            records,
            status,
            f_final,
            inner_failures,
        },
    ))
}

/// Removes the equality-space component that accumulates from inexact
/// subproblem solves; directions true to the constraints pass unchanged.
fn equality_safeguard(p: &Polyhedron, d: Array1<f64>) -> Array1<f64> {
    let r = p.num_equalities();
    if r == 0 {
        return d;
    }
    let e = p.e();
    let dnorm = norm2(&d);
    let viol = e
        .rows()
        .into_iter()
        .map(|row| row.dot(&d).abs())
        .fold(0.0, f64::max);
    if viol <= 1e-9 * (1.0 + dnorm) {
        return d;
    }
    let mut gram = ndarray::Array2::zeros((r, r));
    for i in 0..r {
        for j in 0..r {
            gram[(i, j)] = e.row(i).dot(&e.row(j));
        }
    }
    let ed = e.dot(&d);
    match solve_dense(gram, ed) {
        Ok(nu) => &d - &e.t().dot(&nu),
        // redundant equalities: give up on boosting this iteration
        Err(_) => Array1::zeros(d.len()),
    }
}

/// Backtracking step: starts at `min(t_bar, sqrt(2)/|d|)` and halves by
/// `beta` until the quadratic decrease test passes, else returns 0.
fn armijo_search(
    form: &DcForm,
    y: ArrayView1<f64>,
    d: ArrayView1<f64>,
    t_bar: f64,
    cfg: &SolverConfig,
) -> f64 {
    let dnorm2 = d.dot(&d);
    if dnorm2 == 0.0 {
        return 0.0;
    }
    let curve = curve_coeffs(form, y, d);
    let f_y = curve.eval(0.0);
    let mut t = t_bar.min(2f64.sqrt() / dnorm2.sqrt());
    if !t.is_finite() || t <= 0.0 {
        return 0.0;
    }
    for _ in 0..cfg.armijo_max_backtracks {
        if curve.eval(t) - f_y <= -cfg.armijo_sigma * t * t * dnorm2 {
            return t;
        }
        t *= cfg.armijo_beta;
    }
    0.0
}

/// Certificate that `x` is (approximately) a critical point: the largest
/// normalized violation of `<grad f(x), v - x> >= 0` over sampled feasible
/// `v`, combined with the fixed-point residual of a projected gradient
/// step whenever the set projects cleanly.
pub fn stationarity_residual(
    dc: &DcForm,
    p: &Polyhedron,
    x: ArrayView1<f64>,
    samples: usize,
) -> f64 {
    let n = dc.n;
    let grad = dc.grad_f(x);
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    let mut worst = 0.0f64;
    for s in 0..samples {
        // alternate between neighborhoods of x and of the origin so both
        // local and global geometry get sampled
        let raw = if s % 2 == 0 {
            Array1::from_iter((0..n).map(|i| x[i] + rng.random_range(-1.0..1.0)))
        } else {
            Array1::from_iter((0..n).map(|_| rng.random_range(-1.0..1.0)))
        };
        let Ok(v) = p.project(raw.view()) else {
            continue;
        };
        let diff = &v - &x;
        let dist = norm2(&diff);
        if dist <= 1e-9 {
            continue;
        }
        worst = worst.max(-grad.dot(&diff) / dist);
    }
    let step = &x.to_owned() - &grad;
    if let Ok(px) = p.project(step.view()) {
        let fp = &px - &x;
        worst = worst.max(norm2(&fp));
    }
    worst
}
