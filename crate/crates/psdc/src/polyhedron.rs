//! Polyhedra `{x : A x <= b, E x = q}` with structure-aware projections.
//!
//! The constructor classifies the constraint system once; projections then
//! dispatch to a closed-form routine (simplex sort, box clamp, affine
//! normal equations) and fall back to Dykstra's alternating method only for
//! genuinely general systems.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::solve_dense;

/// Structure detected at construction, used to pick the projection routine.
#[derive(Debug, Clone, PartialEq)]
pub enum PolyhedronKind {
    /// Standard simplex: `x >= 0`, `sum x = 1` (up to row scaling and
    /// permutation).
    Simplex,
    /// Pure coordinate bounds; entries may be infinite on either side.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Equalities only.
    AffineOnly,
    General,
}

#[derive(Debug, Clone)]
pub struct Polyhedron {
    a: Array2<f64>,
    b: Array1<f64>,
    e: Array2<f64>,
    q: Array1<f64>,
    kind: PolyhedronKind,
}

/// Sweep cap and successive-change tolerance for the Dykstra fallback.
const DYKSTRA_MAX_SWEEPS: usize = 10_000;
const DYKSTRA_TOL: f64 = 1e-10;

impl Polyhedron {
    /// Builds a polyhedron from inequality rows `a x <= b` and equality
    /// rows `e x = q`, classifying its structure. Zero rows are rejected.
    pub fn new(a: Array2<f64>, b: Array1<f64>, e: Array2<f64>, q: Array1<f64>) -> Result<Self> {
        let n = a.ncols().max(e.ncols());
        if a.ncols() != n && a.nrows() > 0 {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.ncols(),
            });
        }
        if e.ncols() != n && e.nrows() > 0 {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: e.ncols(),
            });
        }
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        if e.nrows() != q.len() {
            return Err(Error::DimensionMismatch {
                expected: e.nrows(),
                got: q.len(),
            });
        }
        if n == 0 {
            return Err(Error::invalid("polyhedron needs at least one variable"));
        }
        for row in a.rows() {
            if row.iter().all(|&v| v == 0.0) {
                return Err(Error::invalid("zero inequality row"));
            }
        }
        for row in e.rows() {
            if row.iter().all(|&v| v == 0.0) {
                return Err(Error::invalid("zero equality row"));
            }
        }
        let kind = classify(a.view(), b.view(), e.view(), q.view())?;
        Ok(Polyhedron { a, b, e, q, kind })
    }

    /// The standard simplex in `n` variables.
    pub fn simplex(n: usize) -> Self {
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            a[(i, i)] = -1.0;
        }
        let b = Array1::zeros(n);
        let e = Array2::ones((1, n));
        let q = Array1::ones(1);
        Polyhedron::new(a, b, e, q).expect("simplex construction is valid")
    }

    /// Axis-aligned box `lower <= x <= upper`; use infinities for
    /// unbounded sides.
    pub fn bounded_box(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        let n = lower.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..n {
            if upper[i].is_finite() {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                rows.push(r);
                rhs.push(upper[i]);
            }
            if lower[i].is_finite() {
                let mut r = vec![0.0; n];
                r[i] = -1.0;
                rows.push(r);
                rhs.push(-lower[i]);
            }
        }
        let m = rows.len();
        let mut a = Array2::zeros((m, n));
        for (r, row) in rows.into_iter().enumerate() {
            a.row_mut(r).assign(&Array1::from(row));
        }
        Polyhedron::new(a, Array1::from(rhs), Array2::zeros((0, n)), Array1::zeros(0))
    }

    pub fn n(&self) -> usize {
        self.a.ncols().max(self.e.ncols())
    }

    pub fn num_inequalities(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_equalities(&self) -> usize {
        self.e.nrows()
    }

    pub fn kind(&self) -> &PolyhedronKind {
        &self.kind
    }

    pub fn a(&self) -> ArrayView2<'_, f64> {
        self.a.view()
    }

    pub fn b(&self) -> ArrayView1<'_, f64> {
        self.b.view()
    }

    pub fn e(&self) -> ArrayView2<'_, f64> {
        self.e.view()
    }

    pub fn q(&self) -> ArrayView1<'_, f64> {
        self.q.view()
    }

    /// Membership within an absolute slack tolerance (1e-9 is the
    /// conventional choice).
    pub fn contains(&self, x: ArrayView1<f64>, tol: f64) -> bool {
        assert_eq!(x.len(), self.n());
        for (row, &bi) in self.a.rows().into_iter().zip(self.b.iter()) {
            if row.dot(&x) - bi > tol {
                return false;
            }
        }
        for (row, &qi) in self.e.rows().into_iter().zip(self.q.iter()) {
            if (row.dot(&x) - qi).abs() > tol {
                return false;
            }
        }
        true
    }

    /// Whether a positive step along `d` from `y` stays feasible: every
    /// inequality row with `<a_i, d> > 0` must have strictly positive slack
    /// at `y`, and `d` must lie in the nullspace of the equalities.
    pub fn feasible_direction(&self, y: ArrayView1<f64>, d: ArrayView1<f64>) -> Result<bool> {
        if !self.contains(y, 1e-7) {
            return Err(Error::InfeasiblePoint);
        }
        let dnorm = d.dot(&d).sqrt();
        for row in self.e.rows() {
            if row.dot(&d).abs() > 1e-9 * (1.0 + dnorm) {
                return Ok(false);
            }
        }
        for (row, &bi) in self.a.rows().into_iter().zip(self.b.iter()) {
            if row.dot(&d) > 0.0 && bi - row.dot(&y) <= 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest step along `d` from `y` that stays feasible; infinite when
    /// no inequality row increases along `d`. Negative slacks from
    /// round-off clamp to a zero step rather than going backwards.
    pub fn max_step(&self, y: ArrayView1<f64>, d: ArrayView1<f64>) -> Result<f64> {
        if !self.contains(y, 1e-7) {
            return Err(Error::InfeasiblePoint);
        }
        let dnorm = d.dot(&d).sqrt();
        for row in self.e.rows() {
            if row.dot(&d).abs() > 1e-9 * (1.0 + dnorm) {
                return Err(Error::EqualityViolated);
            }
        }
        let mut t = f64::INFINITY;
        for (row, &bi) in self.a.rows().into_iter().zip(self.b.iter()) {
            let rate = row.dot(&d);
            if rate > 0.0 {
                let slack = (bi - row.dot(&y)).max(0.0);
                t = t.min(slack / rate);
            }
        }
        Ok(t)
    }

    /// Euclidean projection onto the polyhedron.
    pub fn project(&self, z: ArrayView1<f64>) -> Result<Array1<f64>> {
        assert_eq!(z.len(), self.n());
        match &self.kind {
            PolyhedronKind::Simplex => Ok(project_simplex(z)),
            PolyhedronKind::Box { lower, upper } => {
                Ok(Array1::from_iter(z.iter().enumerate().map(|(i, &v)| {
                    v.clamp(lower[i], upper[i])
                })))
            }
            PolyhedronKind::AffineOnly => match self.project_affine(z) {
                Ok(x) => Ok(x),
                // redundant equality rows make the Gram matrix singular
                Err(_) => self.project_dykstra(z),
            },
            PolyhedronKind::General => self.project_dykstra(z),
        }
    }

    /// Normal equations for equalities only:
    /// `x = z - E^T (E E^T)^{-1} (E z - q)`.
    fn project_affine(&self, z: ArrayView1<f64>) -> Result<Array1<f64>> {
        let r = self.e.nrows();
        let mut gram = Array2::zeros((r, r));
        for i in 0..r {
            for j in 0..r {
                gram[(i, j)] = self.e.row(i).dot(&self.e.row(j));
            }
        }
        let resid = self.e.dot(&z) - &self.q;
        let nu = solve_dense(gram, resid)?;
        Ok(&z - &self.e.t().dot(&nu))
    }

    /// Dykstra's alternating projections over every halfspace and
    /// hyperplane. Exact for polyhedra; stops when a full sweep moves the
    /// iterate by at most `DYKSTRA_TOL` in max-norm.
    fn project_dykstra(&self, z: ArrayView1<f64>) -> Result<Array1<f64>> {
        let n = self.n();
        let m = self.a.nrows();
        let r = self.e.nrows();
        let pieces = m + r;
        if pieces == 0 {
            return Ok(z.to_owned());
        }
        let mut x = z.to_owned();
        let mut corrections = vec![Array1::<f64>::zeros(n); pieces];
        for _sweep in 0..DYKSTRA_MAX_SWEEPS {
            let x_before = x.clone();
            for p in 0..pieces {
                let y = &x + &corrections[p];
                let proj = if p < m {
                    let row = self.a.row(p);
                    let viol = row.dot(&y) - self.b[p];
                    if viol > 0.0 {
                        &y - &(&row * (viol / row.dot(&row)))
                    } else {
                        y.clone()
                    }
                } else {
                    let row = self.e.row(p - m);
                    let viol = row.dot(&y) - self.q[p - m];
                    &y - &(&row * (viol / row.dot(&row)))
                };
                corrections[p] = &y - &proj;
                x = proj;
            }
            let change = x
                .iter()
                .zip(x_before.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if change <= DYKSTRA_TOL {
                return Ok(x);
            }
        }
        Err(Error::ProjectionStalled {
            sweeps: DYKSTRA_MAX_SWEEPS,
        })
    }

    /// Parses the line-oriented constraint format: `le a1 .. an b` for an
    /// inequality, `eq p1 .. pn q` for an equality, or a single line
    /// `simplex n`. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut ineq: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut eq: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut simplex_n: Option<usize> = None;
        let mut data_lines = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            data_lines += 1;
            let mut tokens = line.split_whitespace();
            let tag = tokens.next().expect("non-empty line");
            match tag {
                "simplex" => {
                    let n: usize = tokens
                        .next()
                        .ok_or_else(|| Error::parse(lineno, "simplex needs a dimension"))?
                        .parse()
                        .map_err(|_| Error::parse(lineno, "bad simplex dimension"))?;
                    if n == 0 {
                        return Err(Error::parse(lineno, "simplex dimension must be >= 1"));
                    }
                    simplex_n = Some(n);
                }
                "le" | "eq" => {
                    let vals: Vec<f64> = tokens
                        .map(|t| {
                            t.parse()
                                .map_err(|_| Error::parse(lineno, format!("bad number '{t}'")))
                        })
                        .collect::<Result<_>>()?;
                    if vals.len() < 2 {
                        return Err(Error::parse(lineno, "constraint needs coefficients and a bound"));
                    }
                    let (coef, bound) = vals.split_at(vals.len() - 1);
                    if tag == "le" {
                        ineq.push((coef.to_vec(), bound[0]));
                    } else {
                        eq.push((coef.to_vec(), bound[0]));
                    }
                }
                other => {
                    return Err(Error::parse(lineno, format!("unknown constraint tag '{other}'")));
                }
            }
        }
        if let Some(n) = simplex_n {
            if data_lines != 1 {
                return Err(Error::invalid(
                    "'simplex n' must be the only constraint line",
                ));
            }
            return Ok(Polyhedron::simplex(n));
        }
        if ineq.is_empty() && eq.is_empty() {
            return Err(Error::invalid("constraint file has no constraints"));
        }
        let n = ineq
            .first()
            .map(|(c, _)| c.len())
            .or_else(|| eq.first().map(|(c, _)| c.len()))
            .expect("nonempty");
        for (c, _) in ineq.iter().chain(eq.iter()) {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.len(),
                });
            }
        }
        let pack = |rows: Vec<(Vec<f64>, f64)>| {
            let m = rows.len();
            let mut a = Array2::zeros((m, n));
            let mut b = Array1::zeros(m);
            for (r, (coef, bound)) in rows.into_iter().enumerate() {
                a.row_mut(r).assign(&Array1::from(coef));
                b[r] = bound;
            }
            (a, b)
        };
        let (a, b) = pack(ineq);
        let (e, q) = pack(eq);
        Polyhedron::new(a, b, e, q)
    }
}

/// Sort-based projection onto the standard simplex.
fn project_simplex(z: ArrayView1<f64>) -> Array1<f64> {
    let mut u: Vec<f64> = z.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    z.mapv(|v| (v - theta).max(0.0))
}

fn classify(
    a: ArrayView2<f64>,
    b: ArrayView1<f64>,
    e: ArrayView2<f64>,
    q: ArrayView1<f64>,
) -> Result<PolyhedronKind> {
    let n = a.ncols().max(e.ncols());
    let m = a.nrows();
    let r = e.nrows();

    if m == 0 && r > 0 {
        return Ok(PolyhedronKind::AffineOnly);
    }

    // single-nonzero test per inequality row, tolerant to row scaling
    let single_nonzero = |row: ArrayView1<f64>| -> Option<(usize, f64)> {
        let scale = row.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut found = None;
        for (i, &v) in row.iter().enumerate() {
            if v.abs() > 1e-12 * scale {
                if found.is_some() {
                    return None;
                }
                found = Some((i, v));
            }
        }
        found
    };

    if r == 0 && m > 0 {
        // box: every row bounds one coordinate
        let mut lower = vec![f64::NEG_INFINITY; n];
        let mut upper = vec![f64::INFINITY; n];
        let mut all_single = true;
        for (row, &bi) in a.rows().into_iter().zip(b.iter()) {
            match single_nonzero(row) {
                Some((i, v)) if v > 0.0 => upper[i] = upper[i].min(bi / v),
                Some((i, v)) => lower[i] = lower[i].max(bi / v),
                None => {
                    all_single = false;
                    break;
                }
            }
        }
        if all_single {
            for i in 0..n {
                if lower[i] > upper[i] {
                    return Err(Error::invalid("empty box: lower bound above upper"));
                }
            }
            return Ok(PolyhedronKind::Box { lower, upper });
        }
        return Ok(PolyhedronKind::General);
    }

    if r == 1 && m == n {
        // simplex: each row is a scaled -x_i <= 0, each coordinate once,
        // and the equality normalizes the coordinate sum to one
        let mut covered = vec![false; n];
        let mut ok = true;
        for (row, &bi) in a.rows().into_iter().zip(b.iter()) {
            match single_nonzero(row) {
                Some((i, v)) if v < 0.0 && bi == 0.0 && !covered[i] => covered[i] = true,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && covered.iter().all(|&c| c) {
            let row = e.row(0);
            let p0 = row[0];
            let uniform = p0 != 0.0
                && row.iter().all(|&v| (v - p0).abs() <= 1e-12 * p0.abs())
                && (q[0] - p0).abs() <= 1e-12 * p0.abs();
            if uniform {
                return Ok(PolyhedronKind::Simplex);
            }
        }
    }

    Ok(PolyhedronKind::General)
}
