//! Shared instance builders for the criterion benches.

use ndarray::Array1;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use psdc::mvsk::{moments, mvsk_polynomial, synthetic_returns};
use psdc::poly::{multi_index_set, SparsePolynomial};
use psdc::Polyhedron;

/// Sparse random polynomial with small integer coefficients, every total
/// degree from 1 to `d` represented, and a guaranteed degree-`d` term.
pub fn random_poly(n: usize, d: u32, seed: u64) -> SparsePolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SparsePolynomial::zero(n);
    for k in 1..=d {
        for idx in multi_index_set(n, k).unwrap() {
            if rng.random_bool(0.5) {
                let c = loop {
                    let c = rng.random_range(-10..=10);
                    if c != 0 {
                        break c;
                    }
                };
                f.add_term(idx, c as f64).unwrap();
            }
        }
    }
    if f.degree() < d {
        let top = multi_index_set(n, d).unwrap().swap_remove(0);
        f.add_term(top, 1.0).unwrap();
    }
    f
}

/// Quartic moment objective on the simplex from a synthetic market.
pub fn mvsk_instance(n: usize, t: usize, seed: u64) -> (SparsePolynomial, Polyhedron) {
    let data = synthetic_returns(n, t, seed);
    let ms = moments(data.view()).unwrap();
    let f = mvsk_polynomial(&ms, [10.0, 10.0, 10.0, 10.0]).unwrap();
    (f, Polyhedron::simplex(n))
}

/// Gaussian-ish point with entries in (-1, 1), deterministic per seed.
pub fn sample_point(n: usize, seed: u64) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array1::from_iter((0..n).map(|_| rng.random_range(-1.0..1.0)))
}
