//! Power-sum difference-of-convex decompositions.
//!
//! A homogeneous polynomial of even degree d in n variables can be written
//! as a weighted sum of d-th powers of the linear forms `<alpha, x>`, with
//! alpha ranging over the degree-d exponent vectors. Splitting the weights
//! by sign yields a difference of two convex power sums. [`tpsdc`] applies
//! the split per homogeneous part (lifting odd parts by one auxiliary
//! variable), [`hdpsdc`] homogenizes the whole polynomial to a single even
//! degree first.

use std::collections::{BTreeMap, HashMap};

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::poly::{index_set_size, multi_index_set, multinomial, MultiIndex, SparsePolynomial};

/// Change of basis between d-th powers of linear forms and monomials,
/// stored column-compressed. Entry (i, j) equals
/// `multinomial(d; alpha_j) * alpha_i ^ alpha_j` (with `0^0 = 1`), which is
/// nonzero exactly when `supp(alpha_j)` is contained in `supp(alpha_i)`.
#[derive(Debug, Clone)]
pub struct BasisMatrix {
    d: u32,
    indices: Vec<MultiIndex>,
    /// cols[j] holds (row, value) pairs sorted by row.
    cols: Vec<Vec<(usize, f64)>>,
}

impl BasisMatrix {
    /// Side length; rows and columns are both indexed by the degree-d set.
    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    /// Exponent vectors indexing rows and columns, in graded-lex order.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Fraction of structurally nonzero entries.
    pub fn density(&self) -> f64 {
        let s = self.size();
        self.nnz() as f64 / (s as f64 * s as f64)
    }

    /// `D^T x`; component j is the column-j dot product.
    pub fn transpose_apply(&self, x: ArrayView1<f64>) -> Array1<f64> {
        assert_eq!(x.len(), self.size());
        Array1::from_iter(
            self.cols
                .iter()
                .map(|col| col.iter().map(|&(i, v)| v * x[i]).sum()),
        )
    }

    /// Dense copy, for small sizes and tests.
    pub fn to_dense(&self) -> Array2<f64> {
        let s = self.size();
        let mut m = Array2::zeros((s, s));
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Builds the degree-d change-of-basis matrix in n variables.
///
/// Column j is assembled by enumerating exactly the rows whose support
/// contains `supp(alpha_j)`: those are `1_supp + beta` with beta of degree
/// `d - |supp|`, so no structural zero is ever touched.
pub fn build_d(n: usize, d: u32) -> Result<BasisMatrix> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("basis matrix needs n >= 1 and d >= 1"));
    }
    let indices = multi_index_set(n, d)?;
    index_set_size(n, d)?;
    let pos: HashMap<&MultiIndex, usize> =
        indices.iter().enumerate().map(|(i, a)| (a, i)).collect();
    // degree-(d-k) index sets reused across all columns of support size k
    let mut pads: HashMap<u32, Vec<MultiIndex>> = HashMap::new();
    let mut cols = Vec::with_capacity(indices.len());
    for alpha_j in &indices {
        let supp = alpha_j.support();
        let k = supp.len() as u32;
        let mono = multinomial(&alpha_j.0);
        let pad = pads
            .entry(d - k)
            .or_insert_with(|| multi_index_set(n, d - k).expect("subset of checked size"));
        let mut col = Vec::with_capacity(pad.len());
        for beta in pad.iter() {
            let mut row_idx = beta.0.clone();
            for &t in &supp {
                row_idx[t] += 1;
            }
            let row_idx = MultiIndex(row_idx);
            let i = pos[&row_idx];
            let mut val = mono;
            for &t in &supp {
                val *= (row_idx.0[t] as f64).powi(alpha_j.0[t] as i32);
            }
            col.push((i, val));
        }
        col.sort_unstable_by_key(|e| e.0);
        cols.push(col);
    }
    Ok(BasisMatrix { d, indices, cols })
}

/// Weights lambda with `f(x) = sum_alpha lambda_alpha <alpha, x>^d`.
#[derive(Debug, Clone)]
pub struct PowerSum {
    pub n: usize,
    pub degree: u32,
    /// Degree-d exponent vectors in graded-lex order, matching `weights`.
    pub indices: Vec<MultiIndex>,
    pub weights: Array1<f64>,
}

impl PowerSum {
    pub fn eval(&self, x: ArrayView1<f64>) -> f64 {
        self.indices
            .iter()
            .zip(self.weights.iter())
            .map(|(a, &w)| w * a.dot(x).powi(self.degree as i32))
            .sum()
    }

    /// Expands back into the monomial basis by repeated symbolic
    /// multiplication. Independent of the basis-matrix construction, so
    /// tests can use it as an oracle.
    pub fn expand(&self) -> Result<SparsePolynomial> {
        let mut out = SparsePolynomial::zero(self.n);
        for (alpha, &w) in self.indices.iter().zip(self.weights.iter()) {
            if w == 0.0 {
                continue;
            }
            let form = linear_form_power(alpha, self.degree)?;
            out.add_scaled(&form, w)?;
        }
        Ok(out)
    }
}

/// `<alpha, x> ^ d` as an explicit polynomial, by repeated multiplication.
pub fn linear_form_power(alpha: &MultiIndex, d: u32) -> Result<SparsePolynomial> {
    let n = alpha.len();
    let linear = SparsePolynomial::from_terms(
        n,
        alpha.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| {
            let mut idx = vec![0u32; n];
            idx[i] = 1;
            (MultiIndex(idx), e as f64)
        }),
    )?;
    let mut acc = SparsePolynomial::from_terms(n, [(MultiIndex(vec![0; n]), 1.0)])?;
    for _ in 0..d {
        acc = poly_mul(&acc, &linear)?;
    }
    Ok(acc)
}

fn poly_mul(a: &SparsePolynomial, b: &SparsePolynomial) -> Result<SparsePolynomial> {
    let mut out = SparsePolynomial::zero(a.n());
    for (ia, ca) in a.terms() {
        for (ib, cb) in b.terms() {
            let idx: Vec<u32> = ia.0.iter().zip(ib.0.iter()).map(|(&x, &y)| x + y).collect();
            out.add_term(MultiIndex(idx), ca * cb)?;
        }
    }
    Ok(out)
}

/// Solves `D^T lambda = c` for a homogeneous coefficient vector c.
///
/// Column j of D only involves rows whose support contains supp(alpha_j),
/// so grouping indices by exact support and sweeping support sizes from
/// largest to smallest makes the system block upper-triangular with tiny
/// dense diagonal blocks. One sweep is exact up to rounding; the caller
/// checks the residual and refines if needed.
fn block_solve(dm: &BasisMatrix, rhs: ArrayView1<f64>) -> Result<Array1<f64>> {
    let size = dm.size();
    let mut groups: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for (j, idx) in dm.indices.iter().enumerate() {
        let supp = idx.support();
        groups.entry((supp.len(), supp)).or_default().push(j);
    }
    let mut lam = Array1::zeros(size);
    let mut solved = vec![false; size];
    for ((_, _), members) in groups.iter().rev() {
        let m = members.len();
        let block_pos: HashMap<usize, usize> =
            members.iter().enumerate().map(|(t, &j)| (j, t)).collect();
        let mut mat = Array2::zeros((m, m));
        let mut b = Array1::zeros(m);
        for (r, &j) in members.iter().enumerate() {
            b[r] = rhs[j];
            for &(i, v) in &dm.cols[j] {
                match block_pos.get(&i) {
                    Some(&t) => mat[(r, t)] = v,
                    None => {
                        debug_assert!(solved[i], "larger supports are solved first");
                        b[r] -= v * lam[i];
                    }
                }
            }
        }
        let sol = solve_dense(mat, b)?;
        for (t, &j) in members.iter().enumerate() {
            lam[j] = sol[t];
            solved[j] = true;
        }
    }
    Ok(lam)
}

/// Power-sum weights of a homogeneous polynomial of even degree >= 2.
///
/// Solves `D^T lambda = c` and verifies the residual to 1e-9 relative,
/// applying up to two rounds of iterative refinement before giving up.
pub fn power_sum_weights(f: &SparsePolynomial) -> Result<PowerSum> {
    let n = f.n();
    let d = f.degree();
    if f.is_zero() || d == 0 {
        return Err(Error::invalid(
            "power-sum weights need a nonconstant homogeneous polynomial",
        ));
    }
    if d % 2 != 0 {
        return Err(Error::OddDegree(d));
    }
    for (idx, _) in f.terms() {
        if idx.degree() != d {
            return Err(Error::NotHomogeneous {
                expected: d,
                found: idx.degree(),
            });
        }
    }
    let dm = build_d(n, d)?;
    let pos: HashMap<&MultiIndex, usize> = dm
        .indices
        .iter()
        .enumerate()
        .map(|(i, a)| (a, i))
        .collect();
    let mut c = Array1::zeros(dm.size());
    for (idx, coeff) in f.terms() {
        c[pos[idx]] = coeff;
    }

    let tol = 1e-9 * (1.0 + c.iter().map(|v| v.abs()).fold(0.0, f64::max));
    let mut lam = block_solve(&dm, c.view())?;
    let mut residual = f64::INFINITY;
    for _ in 0..3 {
        let r = &dm.transpose_apply(lam.view()) - &c;
        residual = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if residual <= tol {
            return Ok(PowerSum {
                n,
                degree: d,
                indices: dm.indices,
                weights: lam,
            });
        }
        let delta = block_solve(&dm, r.view())?;
        lam -= &delta;
    }
    Err(Error::ResidualTooLarge { residual, tol })
}

/// One layer of a DC form: a difference of two sums of even powers of
/// affine forms, all rows sharing the same exponent.
#[derive(Debug, Clone)]
pub struct DcBlock {
    /// Even exponent, >= 2.
    pub power: u32,
    pub a_plus: Array2<f64>,
    pub b_plus: Array1<f64>,
    pub a_minus: Array2<f64>,
    pub b_minus: Array1<f64>,
}

impl DcBlock {
    fn sum(a: &Array2<f64>, b: &Array1<f64>, power: u32, x: ArrayView1<f64>) -> f64 {
        let mut acc = 0.0;
        for (row, &off) in a.rows().into_iter().zip(b.iter()) {
            acc += (row.dot(&x) + off).powi(power as i32);
        }
        acc
    }

    fn grad_sum(
        a: &Array2<f64>,
        b: &Array1<f64>,
        power: u32,
        x: ArrayView1<f64>,
        out: &mut Array1<f64>,
    ) {
        for (row, &off) in a.rows().into_iter().zip(b.iter()) {
            let s = power as f64 * (row.dot(&x) + off).powi(power as i32 - 1);
            out.scaled_add(s, &row);
        }
    }
}

/// Difference-of-convex representation
/// `f(x) = g(x) - h(x) + constant`, where
/// `g = sum of plus power sums + rho/2 |x|^2` and
/// `h = sum of minus power sums + rho/2 |x|^2`.
#[derive(Debug, Clone)]
pub struct DcForm {
    pub n: usize,
    /// Distinct even powers, ascending.
    pub blocks: Vec<DcBlock>,
    /// Strong-convexity shift shared by both halves; 0 until a solver
    /// policy sets it.
    pub rho: f64,
    pub constant: f64,
}

impl DcForm {
    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    /// Objective value; the rho terms cancel and are skipped.
    pub fn eval_f(&self, x: ArrayView1<f64>) -> f64 {
        let mut acc = self.constant;
        for blk in &self.blocks {
            acc += DcBlock::sum(&blk.a_plus, &blk.b_plus, blk.power, x);
            acc -= DcBlock::sum(&blk.a_minus, &blk.b_minus, blk.power, x);
        }
        acc
    }

    /// Convex majorant half `g`.
    pub fn eval_g(&self, x: ArrayView1<f64>) -> f64 {
        let mut acc = 0.5 * self.rho * x.dot(&x);
        for blk in &self.blocks {
            acc += DcBlock::sum(&blk.a_plus, &blk.b_plus, blk.power, x);
        }
        acc
    }

    /// Convex subtracted half `h`; `f = g - h + constant`.
    pub fn eval_h(&self, x: ArrayView1<f64>) -> f64 {
        let mut acc = 0.5 * self.rho * x.dot(&x);
        for blk in &self.blocks {
            acc += DcBlock::sum(&blk.a_minus, &blk.b_minus, blk.power, x);
        }
        acc
    }

    /// Analytic gradient of `h`.
    pub fn grad_h(&self, x: ArrayView1<f64>) -> Array1<f64> {
        let mut g = x.to_owned() * self.rho;
        for blk in &self.blocks {
            DcBlock::grad_sum(&blk.a_minus, &blk.b_minus, blk.power, x, &mut g);
        }
        g
    }

    /// Analytic gradient of `f`; the rho terms cancel.
    pub fn grad_f(&self, x: ArrayView1<f64>) -> Array1<f64> {
        let mut g = Array1::zeros(self.n);
        for blk in &self.blocks {
            DcBlock::grad_sum(&blk.a_plus, &blk.b_plus, blk.power, x, &mut g);
        }
        let mut gm = Array1::zeros(self.n);
        for blk in &self.blocks {
            DcBlock::grad_sum(&blk.a_minus, &blk.b_minus, blk.power, x, &mut gm);
        }
        g - gm
    }

    pub fn max_power(&self) -> u32 {
        self.blocks.iter().map(|b| b.power).max().unwrap_or(0)
    }

    pub fn num_plus_rows(&self) -> usize {
        self.blocks.iter().map(|b| b.a_plus.nrows()).sum()
    }

    pub fn num_minus_rows(&self) -> usize {
        self.blocks.iter().map(|b| b.a_minus.nrows()).sum()
    }

    /// All plus rows stacked into one matrix with per-row powers; this is
    /// the shape the convex subproblem solver consumes.
    pub fn stacked_plus(&self) -> (Array2<f64>, Array1<f64>, Vec<u32>) {
        let m = self.num_plus_rows();
        let mut a = Array2::zeros((m, self.n));
        let mut b = Array1::zeros(m);
        let mut powers = Vec::with_capacity(m);
        let mut r = 0;
        for blk in &self.blocks {
            for (row, &off) in blk.a_plus.rows().into_iter().zip(blk.b_plus.iter()) {
                a.row_mut(r).assign(&row);
                b[r] = off;
                powers.push(blk.power);
                r += 1;
            }
        }
        (a, b, powers)
    }
}

/// Accumulates folded rows per power while a decomposition is assembled.
#[derive(Default)]
struct RowAccumulator {
    plus: Vec<(Vec<f64>, f64)>,
    minus: Vec<(Vec<f64>, f64)>,
}

/// Folds `lambda * <alpha, x-hat> ^ d` rows into affine rows
/// `sign(lambda) * (a.x + b) ^ d` with `a = |lambda|^(1/d) alpha_{1..n}`.
/// Rows whose `a` part vanishes are pure constants `b^d` and are folded
/// into the scalar constant instead. Weights below 1e-12 of the largest
/// magnitude are dropped.
fn fold_rows(
    ps: &PowerSum,
    n: usize,
    lifted: bool,
    acc: &mut BTreeMap<u32, RowAccumulator>,
    constant: &mut f64,
) {
    let d = ps.degree;
    let maxw = ps.weights.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let drop_tol = 1e-12 * maxw;
    let entry = acc.entry(d).or_default();
    for (alpha, &lam) in ps.indices.iter().zip(ps.weights.iter()) {
        if lam.abs() <= drop_tol {
            continue;
        }
        let w = lam.abs().powf(1.0 / d as f64);
        let a: Vec<f64> = alpha.0[..n].iter().map(|&e| w * e as f64).collect();
        let b = if lifted { w * alpha.0[n] as f64 } else { 0.0 };
        if a.iter().all(|&v| v == 0.0) {
            let value = b.powi(d as i32);
            *constant += if lam > 0.0 { value } else { -value };
            continue;
        }
        if lam > 0.0 {
            entry.plus.push((a, b));
        } else {
            entry.minus.push((a, b));
        }
    }
}

fn assemble(n: usize, acc: BTreeMap<u32, RowAccumulator>, constant: f64) -> DcForm {
    let mut blocks = Vec::new();
    for (power, rows) in acc {
        if rows.plus.is_empty() && rows.minus.is_empty() {
            continue;
        }
        let pack = |rows: Vec<(Vec<f64>, f64)>| {
            let m = rows.len();
            let mut a = Array2::zeros((m, n));
            let mut b = Array1::zeros(m);
            for (r, (ar, br)) in rows.into_iter().enumerate() {
                a.row_mut(r).assign(&Array1::from(ar));
                b[r] = br;
            }
            (a, b)
        };
        let (a_plus, b_plus) = pack(rows.plus);
        let (a_minus, b_minus) = pack(rows.minus);
        debug_assert!(power >= 2 && power % 2 == 0);
        blocks.push(DcBlock {
            power,
            a_plus,
            b_plus,
            a_minus,
            b_minus,
        });
    }
    DcForm {
        n,
        blocks,
        rho: 0.0,
        constant,
    }
}

/// Term-wise decomposition: splits per homogeneous part, lifting each odd
/// part by one auxiliary variable to the next even degree. Parts of equal
/// resulting power share a block.
pub fn tpsdc(f: &SparsePolynomial) -> Result<DcForm> {
    let n = f.n();
    if n == 0 {
        return Err(Error::invalid("decomposition needs n >= 1"));
    }
    let parts = f.homogeneous_parts();
    let mut constant = parts[0].coeff(&MultiIndex(vec![0; n]));
    let mut acc: BTreeMap<u32, RowAccumulator> = BTreeMap::new();
    for (k, part) in parts.iter().enumerate().skip(1) {
        if part.is_zero() {
            continue;
        }
        if k % 2 == 0 {
            let ps = power_sum_weights(part)?;
            fold_rows(&ps, n, false, &mut acc, &mut constant);
        } else {
            let lifted = lift_by_one(part)?;
            let ps = power_sum_weights(&lifted)?;
            fold_rows(&ps, n, true, &mut acc, &mut constant);
        }
    }
    Ok(assemble(n, acc, constant))
}

/// Multiplies every term by the new last variable, turning a homogeneous
/// odd part into an even one in n + 1 variables.
fn lift_by_one(part: &SparsePolynomial) -> Result<SparsePolynomial> {
    let mut out = SparsePolynomial::zero(part.n() + 1);
    for (idx, c) in part.terms() {
        let mut e = idx.0.clone();
        e.push(1);
        out.add_term(MultiIndex(e), c)?;
    }
    Ok(out)
}

/// Homogenized decomposition: lifts the whole polynomial to a single even
/// degree in n + 1 variables and splits once, yielding one block.
pub fn hdpsdc(f: &SparsePolynomial) -> Result<DcForm> {
    let n = f.n();
    if n == 0 {
        return Err(Error::invalid("decomposition needs n >= 1"));
    }
    let deg = f.degree();
    if deg == 0 {
        let constant = f.coeff(&MultiIndex(vec![0; n]));
        return Ok(DcForm {
            n,
            blocks: Vec::new(),
            rho: 0.0,
            constant,
        });
    }
    let d_f = deg + deg % 2;
    let fh = f.homogenize(d_f)?;
    let ps = power_sum_weights(&fh)?;
    let mut constant = 0.0;
    let mut acc: BTreeMap<u32, RowAccumulator> = BTreeMap::new();
    fold_rows(&ps, n, true, &mut acc, &mut constant);
    Ok(assemble(n, acc, constant))
}
