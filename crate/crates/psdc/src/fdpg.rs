//! Fast dual proximal-gradient solver for the convex subproblems.
//!
//! Each DCA-type outer iteration minimizes
//! `sum_i (a_i.x + b_i)^{p_i} + rho/2 |x|^2 - <c, x>` over a polyhedron.
//! Dualizing the affine forms gives a problem whose gradient step needs one
//! projection and one scalar prox per row; FISTA momentum on the dual gives
//! the fast rate, and strong convexity of the primal recovers the solution
//! from any dual point.

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polyhedron::Polyhedron;

/// One convex subproblem: minimize
/// `sum_i phi_i(a_i.x) + rho/2 |x|^2 - <c, x>` over `polyhedron`, with
/// `phi_i(t) = (t + b_i)^{powers_i}`.
#[derive(Debug)]
pub struct SubproblemSpec<'a> {
    pub a_plus: ArrayView2<'a, f64>,
    pub b_plus: ArrayView1<'a, f64>,
    /// Per-row even powers, each >= 2.
    pub powers: &'a [u32],
    /// Strong-convexity modulus, > 0.
    pub rho: f64,
    /// Linear term, typically the frozen gradient of the concave half.
    pub c: Array1<f64>,
    pub polyhedron: &'a Polyhedron,
    /// Dual gradient Lipschitz bound, >= |A|^2 / rho.
    pub lipschitz: f64,
}

/// Outcome of a dual solve; `u` is always feasible because it is produced
/// by a projection.
#[derive(Debug)]
pub struct FdpgResult {
    pub u: Array1<f64>,
    pub y: Array1<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// FISTA momentum update; starting from 1.0 the sequence dominates
/// `(k + 2) / 2`, which is what the fast rate rests on.
pub fn fista_momentum(s: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * s * s).sqrt())
}

/// Scalar prox of `phi(t) = (t + b)^p`: the unique root of
/// `v + l p (v + b)^(p-1) = s`. Closed form for p = 2, otherwise Newton
/// safeguarded by a geometrically grown bisection bracket.
pub fn prox_phi(s: f64, l: f64, b: f64, p: u32) -> f64 {
    debug_assert!(p >= 2 && p % 2 == 0, "prox needs an even power >= 2");
    debug_assert!(l > 0.0);
    if p == 2 {
        return (s - 2.0 * l * b) / (1.0 + 2.0 * l);
    }
    let g = |v: f64| v + l * p as f64 * (v + b).powi(p as i32 - 1) - s;
    // g is strictly increasing, so a sign-changing bracket always exists
    let mut lo = s.min(-b) - 1.0;
    let mut hi = s.max(-b) + 1.0;
    let mut width = hi - lo;
    while g(lo) > 0.0 {
        lo -= width;
        width *= 2.0;
    }
    while g(hi) < 0.0 {
        hi += width;
        width *= 2.0;
    }
    let tol = 1e-12 * (1.0 + s.abs());
    let mut v = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gv = g(v);
        if gv.abs() <= tol {
            return v;
        }
        if gv > 0.0 {
            hi = v;
        } else {
            lo = v;
        }
        let dg = 1.0 + l * (p * (p - 1)) as f64 * (v + b).powi(p as i32 - 2);
        let newton = v - gv / dg;
        v = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    v
}

/// Largest singular value via power iteration on `A^T A`, from a fixed
/// seeded start. The Rayleigh-style estimate `|A v|` with `|v| = 1` is a
/// lower bound by construction; callers inflating it (e.g. by 1.01 when
/// setting a Lipschitz constant) stay on the safe side.
pub fn spectral_norm(a: ArrayView2<f64>) -> f64 {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bee);
    let mut v = Array1::from_iter((0..n).map(|_| rng.random_range(-1.0..1.0f64)));
    let vnorm = v.dot(&v).sqrt();
    if vnorm == 0.0 {
        return 0.0;
    }
    v /= vnorm;
    let mut sigma_prev = 0.0;
    for _ in 0..5000 {
        let av = a.dot(&v);
        let sigma = av.dot(&av).sqrt();
        if sigma <= 1e-300 {
            return 0.0;
        }
        if (sigma - sigma_prev).abs() <= 1e-8 * sigma {
            return sigma;
        }
        sigma_prev = sigma;
        let z = a.t().dot(&av);
        let znorm = z.dot(&z).sqrt();
        if znorm == 0.0 {
            return sigma;
        }
        v = z / znorm;
    }
    sigma_prev
}

/// Dual warm start `y_i = -p_i (a_i.x + b_i)^(p_i - 1)`, the multiplier a
/// primal point `x` would be optimal for.
pub fn warm_start(
    a: ArrayView2<f64>,
    b: ArrayView1<f64>,
    powers: &[u32],
    x: ArrayView1<f64>,
) -> Array1<f64> {
    Array1::from_iter(
        a.rows()
            .into_iter()
            .zip(b.iter())
            .zip(powers.iter())
            .map(|((row, &bi), &p)| {
                -(p as f64) * (row.dot(&x) + bi).powi(p as i32 - 1)
            }),
    )
}

/// Runs the dual method from `y0`, recording the per-iteration primal
/// candidates in `trace` when given. Stops when successive dual iterates
/// change by at most `tol` relative, or flags `converged = false` at
/// `max_iter`.
pub fn fdpg_solve_traced(
    spec: &SubproblemSpec,
    y0: ArrayView1<f64>,
    tol: f64,
    max_iter: usize,
    mut trace: Option<&mut Vec<Array1<f64>>>,
) -> Result<FdpgResult> {
    let m = spec.a_plus.nrows();
    if spec.rho <= 0.0 {
        return Err(Error::NonPositiveRho(spec.rho));
    }
    if y0.len() != m || spec.b_plus.len() != m || spec.powers.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: y0.len(),
        });
    }
    if m == 0 {
        // no dual variables: the subproblem is a single projection
        let u = spec.polyhedron.project((&spec.c / spec.rho).view())?;
        return Ok(FdpgResult {
            u,
            y: Array1::zeros(0),
            iterations: 0,
            converged: true,
        });
    }
    let l = spec.lipschitz;
    debug_assert!(l > 0.0, "lipschitz bound must be positive");

    let primal = |w: &Array1<f64>| -> Result<Array1<f64>> {
        let z = (&spec.c + &spec.a_plus.t().dot(w)) / spec.rho;
        spec.polyhedron.project(z.view())
    };

    let mut y = y0.to_owned();
    let mut w = y.clone();
    let mut s = 1.0;
    let mut u = Array1::zeros(spec.a_plus.ncols());
    for k in 0..max_iter {
        u = primal(&w)?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(u.clone());
        }
        let au = spec.a_plus.dot(&u);
        let mut y_next = Array1::zeros(m);
        for i in 0..m {
            let v = prox_phi(au[i] - l * w[i], l, spec.b_plus[i], spec.powers[i]);
            y_next[i] = w[i] - (au[i] - v) / l;
        }
        let s_next = fista_momentum(s);
        let diff = &y_next - &y;
        let change = diff.dot(&diff).sqrt() / (1.0 + y.dot(&y).sqrt());
        w = &y_next + &(&diff * ((s - 1.0) / s_next));
        y = y_next;
        s = s_next;
        if change <= tol {
            let u_final = primal(&y)?;
            return Ok(FdpgResult {
                u: u_final,
                y,
                iterations: k + 1,
                converged: true,
            });
        }
    }
    Ok(FdpgResult {
        u,
        y,
        iterations: max_iter,
        converged: false,
    })
}

/// Untraced entry point; see [`fdpg_solve_traced`].
pub fn fdpg_solve(
    spec: &SubproblemSpec,
    y0: ArrayView1<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<FdpgResult> {
    fdpg_solve_traced(spec, y0, tol, max_iter, None)
}
