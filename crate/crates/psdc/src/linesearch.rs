//! Exact line search along the boosted step direction.
//!
//! Restricting a DC form to a ray `y + t d` gives a univariate polynomial:
//! each affine row `(a.x + b)^p` expands binomially in `t` around its value
//! at `y`. Minimizing the restriction over a feasible interval then reduces
//! to isolating the real roots of its derivative, which recursive
//! derivative splitting does exactly for the low degrees that occur here.

use ndarray::ArrayView1;

use crate::decomp::DcForm;
use crate::poly::binomial;

/// Steps beyond this never help in practice; unbounded rays get clipped.
pub const T_MAX_CAP: f64 = 1e8;

/// Dense univariate polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariatePoly {
    coeffs: Vec<f64>,
}

impl UnivariatePoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs at least one coefficient");
        UnivariatePoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Sum of absolute monomial magnitudes at `t`; the natural scale for
    /// deciding whether a computed value is "zero".
    fn eval_abs(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc: f64, &c| acc * t.abs() + c.abs())
    }

    pub fn derivative(&self) -> UnivariatePoly {
        if self.coeffs.len() <= 1 {
            return UnivariatePoly::new(vec![0.0]);
        }
        UnivariatePoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| j as f64 * c)
                .collect(),
        )
    }

    /// Degree after discarding leading coefficients that are negligible
    /// relative to the largest one; `None` for the (near-)zero polynomial.
    fn effective_degree(&self) -> Option<usize> {
        let scale = self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return None;
        }
        self.coeffs
            .iter()
            .rposition(|&c| c.abs() > 1e-13 * scale)
    }
}

/// Coefficients of `t -> f(y + t d)` for a DC form, including its scalar
/// constant. The rho halves cancel in `f` and do not appear.
pub fn curve_coeffs(dc: &DcForm, y: ArrayView1<f64>, d: ArrayView1<f64>) -> UnivariatePoly {
    let deg = dc.max_power() as usize;
    let mut coeffs = vec![0.0; deg + 1];
    coeffs[0] = dc.constant;
    for blk in &dc.blocks {
        let p = blk.power;
        for (sign, a, b) in [
            (1.0, &blk.a_plus, &blk.b_plus),
            (-1.0, &blk.a_minus, &blk.b_minus),
        ] {
            for (row, &off) in a.rows().into_iter().zip(b.iter()) {
                let base = row.dot(&y) + off;
                let slope = row.dot(&d);
                // (base + slope t)^p expanded binomially
                for j in 0..=p {
                    let bin = binomial(p as u128, j as u128).expect("small binomial") as f64;
                    coeffs[j as usize] +=
                        sign * bin * base.powi((p - j) as i32) * slope.powi(j as i32);
                }
            }
        }
    }
    UnivariatePoly::new(coeffs)
}

/// All real roots of `p` in `[lo, hi]`, deduplicated and ascending.
/// Multiple roots appear once; the degenerate zero polynomial returns
/// `{lo}` (every point is a root, the smallest is reported).
pub fn real_roots_in(p: &UnivariatePoly, lo: f64, hi: f64) -> Vec<f64> {
    assert!(lo <= hi, "empty interval");
    let Some(deg) = p.effective_degree() else {
        return vec![lo];
    };
    let coeffs = &p.coeffs()[..=deg];
    let mut roots = match deg {
        0 => Vec::new(),
        1 => {
            let r = -coeffs[0] / coeffs[1];
            if (lo..=hi).contains(&r) {
                vec![r]
            } else {
                Vec::new()
            }
        }
        2 => quadratic_roots(coeffs[0], coeffs[1], coeffs[2])
            .into_iter()
            .filter(|r| (lo..=hi).contains(r))
            .collect(),
        _ => {
            // monotone pieces between derivative roots each hold at most
            // one root, found by sign change
            let crit = real_roots_in(&p.derivative(), lo, hi);
            let mut cuts = Vec::with_capacity(crit.len() + 2);
            cuts.push(lo);
            cuts.extend(crit);
            cuts.push(hi);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let mut found = Vec::new();
            let near_zero =
                |t: f64| p.eval(t).abs() <= 1e-11 * (1.0 + p.eval_abs(t));
            for pair in cuts.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                if near_zero(a) {
                    found.push(a);
                    continue;
                }
                if p.eval(a) * p.eval(b) < 0.0 {
                    found.push(bisect_then_polish(p, a, b));
                }
            }
            if let Some(&last) = cuts.last() {
                if near_zero(last) {
                    found.push(last);
                }
            }
            found
        }
    };
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
    roots
}

/// Stable quadratic formula.
fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    if sq == 0.0 {
        return vec![-c1 / (2.0 * c2)];
    }
    let q = -0.5 * (c1 + c1.signum() * sq);
    let q = if q == 0.0 { -0.5 * (c1 - sq) } else { q };
    if q == 0.0 {
        // c1 == 0 and c0 == 0
        return vec![0.0];
    }
    vec![q / c2, c0 / q]
}

/// Bisection to a sign-stable interval, then a few Newton polishes kept
/// inside the bracket.
fn bisect_then_polish(p: &UnivariatePoly, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = p.eval(lo);
    debug_assert!(flo * p.eval(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if hi - lo <= 1e-14 * (1.0 + lo.abs()) {
            break;
        }
    }
    let dp = p.derivative();
    let mut t = 0.5 * (lo + hi);
    for _ in 0..4 {
        let slope = dp.eval(t);
        if slope == 0.0 {
            break;
        }
        let next = t - p.eval(t) / slope;
        if next < lo || next > hi {
            break;
        }
        t = next;
    }
    t
}

/// Minimizes `f(y + t d)` over `[0, min(t_bar, T_MAX_CAP)]` by evaluating
/// the endpoint candidates and the interior critical points. Values within
/// 1e-12 relative of the minimum tie, and ties resolve to the smallest `t`.
pub fn exact_line_search(
    dc: &DcForm,
    y: ArrayView1<f64>,
    d: ArrayView1<f64>,
    t_bar: f64,
) -> f64 {
    if !(t_bar > 0.0) {
        return 0.0;
    }
    let t_hi = t_bar.min(T_MAX_CAP);
    let curve = curve_coeffs(dc, y, d);
    let mut candidates = real_roots_in(&curve.derivative(), 0.0, t_hi);
    candidates.push(0.0);
    candidates.push(t_hi);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let values: Vec<f64> = candidates.iter().map(|&t| curve.eval(t)).collect();
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tie = 1e-12 * (1.0 + vmin.abs());
    for (t, v) in candidates.iter().zip(values.iter()) {
        if *v <= vmin + tie {
            return *t;
        }
    }
    0.0
}
