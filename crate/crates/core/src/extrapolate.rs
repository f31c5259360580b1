//! Extrapolation of sampled limits: Richardson (Neville at zero) and
//! least-squares polynomial fits.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    pub error: f64,
    pub order: usize,
}

/// Polynomial extrapolation of `values[i] ≈ L + Σ_k c_k·h[i]^k` to `h = 0`.
///
/// The tableau column whose last two entries (and neighbouring column) agree
/// best is reported, with that disagreement as the error estimate.
pub fn richardson(h: &[f64], values: &[f64]) -> Result<Extrapolation> {
    let n = h.len();
    if n != values.len() || n < 2 {
        return Err(Error::InvalidInput("richardson needs at least two matched samples".into()));
    }
    let mut table: Vec<Vec<f64>> = vec![values.to_vec()];
    for k in 1..n {
        let prev = &table[k - 1];
        let mut col = Vec::with_capacity(n - k);
        for i in 0..n - k {
            let (hi, hj) = (h[i], h[i + k]);
            // prev[i] uses h[i..=i+k-1], prev[i+1] uses h[i+1..=i+k]
            col.push((hi * prev[i + 1] - hj * prev[i]) / (hi - hj));
        }
        table.push(col);
    }
    let mut best = Extrapolation { value: values[n - 1], error: (values[n - 1] - values[n - 2]).abs(), order: 0 };
    // entry (k, i) combines h[i..=i+k]; it is judged against its neighbour
    // in the same column and against both of its parents
    for k in 1..n - 1 {
        let col = &table[k];
        let parents = &table[k - 1];
        for i in 1..col.len() {
            let v = col[i];
            let err = (v - col[i - 1]).abs().max((v - parents[i]).abs()).max((v - parents[i + 1]).abs());
            if err < best.error {
                best = Extrapolation { value: v, error: err, order: k };
            }
        }
    }
    Ok(best)
}

/// Least-squares coefficients `c_0..c_deg` of `Σ c_k·basis_k(x)` for the
/// given basis functions.
pub fn least_squares<F: Fn(f64) -> Vec<f64>>(xs: &[f64], ys: &[f64], basis: F) -> Result<Vec<f64>> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::InvalidInput("least squares needs matched samples".into()));
    }
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| basis(x)).collect();
    let m = rows[0].len();
    if xs.len() < m {
        return Err(Error::InvalidInput("fewer samples than unknowns".into()));
    }
    let a = DMatrix::from_fn(xs.len(), m, |i, j| rows[i][j]);
    // column scaling keeps the normal problem well conditioned
    let norms: Vec<f64> = (0..m).map(|j| a.column(j).norm().max(1e-300)).collect();
    let scaled = DMatrix::from_fn(xs.len(), m, |i, j| a[(i, j)] / norms[j]);
    let b = DVector::from_column_slice(ys);
    let svd = scaled.svd(true, true);
    let sol = svd.solve(&b, 1e-14).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok((0..m).map(|j| sol[j] / norms[j]).collect())
}

/// Least-squares polynomial fit of degree `deg`; returns `c_0..c_deg`.
pub fn polyfit(xs: &[f64], ys: &[f64], deg: usize) -> Result<Vec<f64>> {
    least_squares(xs, ys, |x| (0..=deg).map(|k| x.powi(k as i32)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_recovers_polynomial_limit() {
        let h: Vec<f64> = (0..10).map(|j| 0.5f64.powi(j)).collect();
        let v: Vec<f64> = h.iter().map(|x| 1.25 + 3.0 * x - 2.0 * x * x + 0.5 * x.powi(3)).collect();
        let r = richardson(&h, &v).unwrap();
        assert!((r.value - 1.25).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn richardson_on_analytic_tail() {
        let h: Vec<f64> = (8..=20).map(|j| 0.5f64.powi(j)).collect();
        let v: Vec<f64> = h.iter().map(|x| (1.0 + x).ln() / x).collect();
        let r = richardson(&h, &v).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12 && r.error < 1e-9, "{r:?}");
    }

    #[test]
    fn polyfit_exact_cubic() {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 / 11.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - x + 4.0 * x * x * x).collect();
        let c = polyfit(&xs, &ys, 3).unwrap();
        for (got, want) in c.iter().zip([2.0, -1.0, 0.0, 4.0]) {
            assert!((got - want).abs() < 1e-10);
        }
    }
}
