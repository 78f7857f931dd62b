//! Small dense kernels shared across modules. Systems here are tiny
//! (basis-solve diagonal blocks, equality Gram matrices), so plain
//! elimination with partial pivoting is enough.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Gaussian elimination with partial pivoting. Consumes its inputs;
/// errors on a vanishing pivot.
pub(crate) fn solve_dense(mut a: Array2<f64>, mut b: Array1<f64>) -> Result<Array1<f64>> {
    let m = b.len();
    assert_eq!(a.nrows(), m);
    assert_eq!(a.ncols(), m);
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .expect("nonempty range");
        if a[(piv, col)].abs() < 1e-300 {
            return Err(Error::invalid("singular dense system"));
        }
        if piv != col {
            for k in 0..m {
                a.swap((col, k), (piv, k));
            }
            b.swap(col, piv);
        }
        for row in col + 1..m {
            let factor = a[(row, col)] / a[(col, col)];
            if factor == 0.0 {
                continue;
            }
            for k in col..m {
                a[(row, k)] -= factor * a[(col, k)];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = Array1::zeros(m);
    for col in (0..m).rev() {
        let mut acc = b[col];
        for k in col + 1..m {
            acc -= a[(col, k)] * x[k];
        }
        x[col] = acc / a[(col, col)];
    }
    Ok(x)
}

pub(crate) fn norm2(x: &Array1<f64>) -> f64 {
    x.dot(x).sqrt()
}
