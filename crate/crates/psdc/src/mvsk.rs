//! Mean-variance-skewness-kurtosis portfolio objectives built from return
//! samples.
//!
//! Central co-moments up to order four are stored once per sorted index
//! tuple; symmetry multiplicities are applied when the tensors are
//! contracted against a weight vector or expanded into a polynomial. The
//! resulting quartic `f = w1(-mean) + w2 var - w3 skew + w4 kurt` is what
//! the solvers minimize over the unit simplex.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{multinomial, MultiIndex, SparsePolynomial};

/// Population central co-moments of orders 2..4, plus the sample mean.
/// Tuples are sorted; each carries the raw expectation without symmetry
/// multiplicity.
#[derive(Debug, Clone)]
pub struct MomentSet {
    n: usize,
    mu: Array1<f64>,
    m2: Vec<(Vec<usize>, f64)>,
    m3: Vec<(Vec<usize>, f64)>,
    m4: Vec<(Vec<usize>, f64)>,
}

/// Sorted index tuples of length `k` over `0..n`, lexicographic.
fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    loop {
        out.push(cur.clone());
        // advance the rightmost entry that can still grow, reset the tail
        let mut pos = k;
        while pos > 0 && cur[pos - 1] == n - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        cur[pos - 1] += 1;
        let v = cur[pos - 1];
        for entry in cur.iter_mut().skip(pos) {
            *entry = v;
        }
    }
}

/// Distinct permutations of a sorted tuple.
fn multiplicity(tuple: &[usize]) -> f64 {
    let mut counts: Vec<u32> = Vec::new();
    let mut prev = usize::MAX;
    for &i in tuple {
        if i == prev {
            *counts.last_mut().unwrap() += 1;
        } else {
            counts.push(1);
            prev = i;
        }
    }
    multinomial(&counts)
}

fn exponent(n: usize, tuple: &[usize]) -> MultiIndex {
    let mut e = vec![0u32; n];
    for &i in tuple {
        e[i] += 1;
    }
    MultiIndex(e)
}

/// Population (1/T-normalized) central co-moments of a T-by-n sample.
pub fn moments(returns: ArrayView2<f64>) -> Result<MomentSet> {
    let (t, n) = returns.dim();
    if n == 0 {
        return Err(Error::invalid("empty return matrix"));
    }
    if t < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 sample rows, got {t}"
        )));
    }
    let mu = returns.mean_axis(ndarray::Axis(0)).unwrap();
    let centered = &returns - &mu;
    let tf = t as f64;

    let moment = |tuple: &[usize]| -> f64 {
        let mut acc = 0.0;
        for row in centered.rows() {
            let mut prod = 1.0;
            for &i in tuple {
                prod *= row[i];
            }
            acc += prod;
        }
        acc / tf
    };

    let collect = |k: usize| -> Vec<(Vec<usize>, f64)> {
        tuples(n, k)
            .into_iter()
            .map(|tp| {
                let v = moment(&tp);
                (tp, v)
            })
            .collect()
    };

    Ok(MomentSet {
        n,
        mu,
        m2: collect(2),
        m3: collect(3),
        m4: collect(4),
    })
}

impl MomentSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> ArrayView1<'_, f64> {
        self.mu.view()
    }

    fn order(&self, k: u32) -> &[(Vec<usize>, f64)] {
        match k {
            2 => &self.m2,
            3 => &self.m3,
            4 => &self.m4,
            _ => panic!("central co-moments are stored for orders 2..4"),
        }
    }

    /// `E[(z' x)^k]` by tensor contraction, `k` in 2..4.
    pub fn contraction(&self, k: u32, x: ArrayView1<f64>) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut acc = 0.0;
        for (tuple, v) in self.order(k) {
            let mut prod = multiplicity(tuple) * v;
            for &i in tuple {
                prod *= x[i];
            }
            acc += prod;
        }
        acc
    }
}

/// Assembles the quartic objective
/// `-w1 mu'x + w2 E(z'x)^2 - w3 E(z'x)^3 + w4 E(z'x)^4`.
/// Weights must be nonnegative.
pub fn mvsk_polynomial(ms: &MomentSet, omega: [f64; 4]) -> Result<SparsePolynomial> {
    if omega.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::invalid(format!(
            "moment weights must be finite and nonnegative, got {omega:?}"
        )));
    }
    let n = ms.n;
    let mut f = SparsePolynomial::zero(n);
    for i in 0..n {
        let mut e = vec![0u32; n];
        e[i] = 1;
        f.add_term(MultiIndex(e), -omega[0] * ms.mu[i])?;
    }
    let signs = [omega[1], -omega[2], omega[3]];
    for (k, &s) in (2u32..=4).zip(signs.iter()) {
        if s == 0.0 {
            continue;
        }
        for (tuple, v) in ms.order(k) {
            let coeff = s * multiplicity(tuple) * v;
            if coeff != 0.0 {
                f.add_term(exponent(n, tuple), coeff)?;
            }
        }
    }
    Ok(f)
}

/// Named weight presets: `seeking`, `averse`, `neutral`.
pub fn omega_preset(name: &str) -> Option<[f64; 4]> {
    match name {
        "seeking" => Some([10.0, 1.0, 10.0, 1.0]),
        "averse" => Some([1.0, 10.0, 1.0, 10.0]),
        "neutral" => Some([10.0, 10.0, 10.0, 10.0]),
        _ => None,
    }
}

/// Splits a table line on commas and whitespace, dropping empty cells so
/// "a, b" and "a b" tokenize alike.
fn table_fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parses a return table: a header line of asset names, then one row of
/// values per period, comma or whitespace separated. Blank lines and `#`
/// comments are skipped.
pub fn load_returns(text: &str) -> Result<(Vec<String>, Array2<f64>)> {
    let mut names: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = lineno + 1;
        match &names {
            None => {
                let hdr: Vec<String> = table_fields(line)
                    .into_iter()
                    .map(str::to_owned)
                    .collect();
                if hdr.iter().any(|h| h.parse::<f64>().is_ok()) {
                    return Err(Error::parse(
                        lineno,
                        "first line must name the assets, not contain numbers",
                    ));
                }
                names = Some(hdr);
            }
            Some(hdr) => {
                let fields = table_fields(line);
                if fields.len() != hdr.len() {
                    return Err(Error::parse(
                        lineno,
                        format!("expected {} columns, got {}", hdr.len(), fields.len()),
                    ));
                }
                let mut row = Vec::with_capacity(fields.len());
                for (col, field) in fields.iter().enumerate() {
                    let v: f64 = field.parse().map_err(|_| {
                        Error::parse(lineno, format!("column {}: bad number {field:?}", col + 1))
                    })?;
                    row.push(v);
                }
                rows.push(row);
            }
        }
    }
    let names = names.ok_or_else(|| Error::invalid("no header line found"))?;
    if rows.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 return rows, got {}",
            rows.len()
        )));
    }
    let t = rows.len();
    let n = names.len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let data = Array2::from_shape_vec((t, n), flat).expect("row lengths were checked");
    Ok((names, data))
}

/// Seeded factor-model sample at monthly return scales: one common normal
/// factor, one skewed factor derived from it, and per-asset noise.
pub fn synthetic_returns(n: usize, t: usize, seed: u64) -> Array2<f64> {
    assert!(n >= 1 && t >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = move |rng: &mut ChaCha8Rng| -> f64 {
        let u1: f64 = rng.random_range(1e-12..1.0);
        let u2: f64 = rng.random_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let drift: Vec<f64> = (0..n).map(|_| rng.random_range(0.002..0.012)).collect();
    let beta: Vec<f64> = (0..n).map(|_| rng.random_range(0.4..1.6)).collect();
    let gamma: Vec<f64> = (0..n).map(|_| rng.random_range(-0.6..0.6)).collect();
    let sigma: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..0.03)).collect();
    let mut data = Array2::zeros((t, n));
    for ti in 0..t {
        let g = gauss(&mut rng);
        // zero-mean, unit-variance, right-skewed transform of the factor
        let s = (g * g - 1.0) / 2f64.sqrt();
        for i in 0..n {
            let e = gauss(&mut rng);
            data[(ti, i)] = drift[i] + 0.03 * beta[i] * g + 0.02 * gamma[i] * s + sigma[i] * e;
        }
    }
    data
}
