//! Sparse multivariate polynomials in the monomial basis.
//!
//! Exponent vectors are kept in graded lexicographic order: lower total
//! degree first, and within a degree the first entry descending, recursively.
//! Every enumeration in the crate (basis matrices, weight vectors) relies on
//! this one ordering, so it is fixed here and nowhere else.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};

/// Exponent vector of a monomial, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Positions of the nonzero exponents.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `<alpha, x>` treating the exponents as a real vector.
    pub fn dot(&self, x: ArrayView1<f64>) -> f64 {
        self.0
            .iter()
            .zip(x.iter())
            .map(|(&e, &xi)| e as f64 * xi)
            .sum()
    }
}

/// Graded lexicographic: degree first, then first entry descending.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Binomial coefficient with overflow checking.
pub(crate) fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is exactly divisible by (i + 1) at each step
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Multinomial coefficient `d! / prod(alpha_k!)` for `|alpha| = d`.
pub(crate) fn multinomial(alpha: &[u32]) -> f64 {
    let mut acc: u128 = 1;
    let mut rem: u128 = alpha.iter().map(|&e| e as u128).sum();
    for &e in alpha {
        acc *= binomial(rem, e as u128).expect("multinomial overflow");
        rem -= e as u128;
    }
    acc as f64
}

/// Cardinality of the degree-d monomial basis in n variables, `C(n+d-1, d)`.
pub fn index_set_size(n: usize, d: u32) -> Result<usize> {
    let c = binomial((n as u128) + (d as u128) - 1, d as u128)
        .ok_or(Error::SizeOverflow { n, d })?;
    usize::try_from(c).map_err(|_| Error::SizeOverflow { n, d })
}

/// All exponent vectors of total degree exactly `d` in `n` variables,
/// in graded lexicographic order.
pub fn multi_index_set(n: usize, d: u32) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(Error::invalid("multi_index_set needs n >= 1"));
    }
    let size = index_set_size(n, d)?;
    let mut out = Vec::with_capacity(size);
    let mut cur = vec![0u32; n];
    fill_indices(&mut out, &mut cur, 0, d);
    debug_assert_eq!(out.len(), size);
    Ok(out)
}

fn fill_indices(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, rem: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(MultiIndex(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for v in (0..=rem).rev() {
        cur[pos] = v;
        fill_indices(out, cur, pos + 1, rem - v);
    }
    cur[pos] = 0;
}

/// Polynomial stored as a map from exponent vector to coefficient.
/// Zero coefficients are never stored; iteration order is graded-lex.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePolynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl SparsePolynomial {
    /// The zero polynomial in `n` variables.
    pub fn zero(n: usize) -> Self {
        SparsePolynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut p = SparsePolynomial::zero(n);
        for (idx, c) in terms {
            p.add_term(idx, c)?;
        }
        Ok(p)
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `c * x^idx`, merging with an existing term if present.
    pub fn add_term(&mut self, idx: MultiIndex, c: f64) -> Result<()> {
        if idx.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: idx.len(),
            });
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if c != 0.0 {
                    e.insert(c);
                }
            }
        }
        Ok(())
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &SparsePolynomial, s: f64) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        for (idx, &c) in &other.terms {
            self.add_term(idx.clone(), s * c)?;
        }
        Ok(())
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn coeff(&self, idx: &MultiIndex) -> f64 {
        self.terms.get(idx).copied().unwrap_or(0.0)
    }

    /// Evaluates at `x`; `0^0 = 1` so constant terms survive at the origin.
    pub fn eval(&self, x: ArrayView1<f64>) -> f64 {
        assert_eq!(x.len(), self.n, "eval: point dimension mismatch");
        self.terms
            .iter()
            .map(|(idx, &c)| {
                let mono: f64 = idx
                    .0
                    .iter()
                    .zip(x.iter())
                    .map(|(&e, &xi)| xi.powi(e as i32))
                    .product();
                c * mono
            })
            .sum()
    }

    /// Analytic gradient at `x`.
    pub fn grad(&self, x: ArrayView1<f64>) -> Array1<f64> {
        assert_eq!(x.len(), self.n, "grad: point dimension mismatch");
        let mut g = Array1::zeros(self.n);
        for (idx, &c) in &self.terms {
            for (i, &e) in idx.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut part = c * e as f64 * x[i].powi(e as i32 - 1);
                for (j, &ej) in idx.0.iter().enumerate() {
                    if j != i {
                        part *= x[j].powi(ej as i32);
                    }
                }
                g[i] += part;
            }
        }
        g
    }

    /// Central-difference gradient with stepsize `delta` (1e-3 is the
    /// conventional choice throughout the crate).
    pub fn fd_grad(&self, x: ArrayView1<f64>, delta: f64) -> Array1<f64> {
        assert!(delta > 0.0, "fd_grad: delta must be positive");
        let mut g = Array1::zeros(self.n);
        let mut xp = x.to_owned();
        for i in 0..self.n {
            let xi = x[i];
            xp[i] = xi + delta;
            let fp = self.eval(xp.view());
            xp[i] = xi - delta;
            let fm = self.eval(xp.view());
            xp[i] = xi;
            g[i] = (fp - fm) / (2.0 * delta);
        }
        g
    }

    /// Lifts to `n + 1` variables, padding each term with the last variable
    /// so every term reaches degree `target`.
    pub fn homogenize(&self, target: u32) -> Result<SparsePolynomial> {
        let deg = self.degree();
        if target < deg {
            return Err(Error::TargetDegreeTooLow {
                target,
                degree: deg,
            });
        }
        let mut out = SparsePolynomial::zero(self.n + 1);
        for (idx, &c) in &self.terms {
            let mut e = idx.0.clone();
            e.push(target - idx.degree());
            out.add_term(MultiIndex(e), c)?;
        }
        Ok(out)
    }

    /// Substitutes 1 for the last variable, dropping back to `n - 1`
    /// variables. Terms that collide after the substitution merge.
    pub fn dehomogenize(&self) -> Result<SparsePolynomial> {
        if self.n == 0 {
            return Err(Error::invalid("dehomogenize needs at least one variable"));
        }
        let mut out = SparsePolynomial::zero(self.n - 1);
        for (idx, &c) in &self.terms {
            let e = idx.0[..self.n - 1].to_vec();
            out.add_term(MultiIndex(e), c)?;
        }
        Ok(out)
    }

    /// Splits into homogeneous parts; entry `k` collects the degree-`k`
    /// terms, so the result has `degree() + 1` entries and re-sums to `self`.
    pub fn homogeneous_parts(&self) -> Vec<SparsePolynomial> {
        let deg = self.degree();
        let mut parts = vec![SparsePolynomial::zero(self.n); deg as usize + 1];
        for (idx, &c) in &self.terms {
            parts[idx.degree() as usize]
                .add_term(idx.clone(), c)
                .expect("parts share n");
        }
        parts
    }

    /// Parses the line-oriented text format: one term per line, coefficient
    /// followed by one exponent per variable. Blank lines and `#` comments
    /// are skipped; repeated exponent vectors accumulate.
    pub fn from_text(text: &str) -> Result<SparsePolynomial> {
        let mut poly: Option<SparsePolynomial> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let c_tok = tokens.next().expect("non-empty line has a token");
            let c: f64 = c_tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad coefficient '{c_tok}'")))?;
            let exps: Vec<u32> = tokens
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::parse(lineno, format!("bad exponent '{t}'")))
                })
                .collect::<Result<_>>()?;
            let p = poly.get_or_insert_with(|| SparsePolynomial::zero(exps.len()));
            if exps.len() != p.n {
                return Err(Error::parse(
                    lineno,
                    format!("expected {} exponents, got {}", p.n, exps.len()),
                ));
            }
            if p.n == 0 {
                return Err(Error::parse(lineno, "term needs at least one exponent"));
            }
            p.add_term(MultiIndex(exps), c)?;
        }
        poly.ok_or_else(|| Error::invalid("polynomial file has no terms"))
    }

    /// Writes the text format; terms appear in graded-lex order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (idx, &c) in &self.terms {
            out.push_str(&format!("{c}"));
            for &e in &idx.0 {
                out.push_str(&format!(" {e}"));
            }
            out.push('\n');
        }
        out
    }
}
