//! Second-order finite-difference stencils on uniform grids.
//!
//! Interior samples use central differences; the first and last samples fall
//! back to one-sided second-order formulas.

use nalgebra::DVector;

use crate::error::{GeomError, Result};

/// Weights `(index, w)` such that `f'(x_i) ≈ Σ w f_index / h`.
pub fn first_weights(i: usize, n: usize) -> [(usize, f64); 3] {
    debug_assert!(n >= 3 && i < n);
    if i == 0 {
        [(0, -1.5), (1, 2.0), (2, -0.5)]
    } else if i == n - 1 {
        [(n - 1, 1.5), (n - 2, -2.0), (n - 3, 0.5)]
    } else {
        [(i - 1, -0.5), (i, 0.0), (i + 1, 0.5)]
    }
}

/// Weights such that `f''(x_i) ≈ Σ w f_index / h²`. One-sided ends need four points.
pub fn second_weights(i: usize, n: usize) -> [(usize, f64); 4] {
    debug_assert!(n >= 4 && i < n);
    if i == 0 {
        [(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)]
    } else if i == n - 1 {
        [(n - 1, 2.0), (n - 2, -5.0), (n - 3, 4.0), (n - 4, -1.0)]
    } else {
        [(i - 1, 1.0), (i, -2.0), (i + 1, 1.0), (i, 0.0)]
    }
}

/// True when sample `i` of `n` sits on a one-sided stencil.
pub fn is_boundary(i: usize, n: usize) -> bool {
    i == 0 || i + 1 == n
}

pub fn derivative(series: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 3 {
        return Err(GeomError::Stencil(format!(
            "need at least 3 samples to differentiate, got {n}"
        )));
    }
    Ok((0..n)
        .map(|i| {
            first_weights(i, n)
                .iter()
                .map(|&(j, w)| w * series[j])
                .sum::<f64>()
                / h
        })
        .collect())
}

pub fn vector_derivative_at(values: &[DVector<f64>], i: usize, h: f64) -> DVector<f64> {
    let n = values.len();
    let mut out = DVector::zeros(values[i].len());
    for (j, w) in first_weights(i, n) {
        if w != 0.0 {
            out.axpy(w / h, &values[j], 1.0);
        }
    }
    out
}

pub fn vector_second_derivative_at(values: &[DVector<f64>], i: usize, h: f64) -> DVector<f64> {
    let n = values.len();
    let mut out = DVector::zeros(values[i].len());
    let h2 = h * h;
    for (j, w) in second_weights(i, n) {
        if w != 0.0 {
            out.axpy(w / h2, &values[j], 1.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quadratics() {
        let h = 0.1;
        let f: Vec<f64> = (0..6).map(|i| 3.0 * (i as f64 * h).powi(2) - (i as f64 * h)).collect();
        let d = derivative(&f, h).unwrap();
        for (i, di) in d.iter().enumerate() {
            let x = i as f64 * h;
            assert!((di - (6.0 * x - 1.0)).abs() < 1e-12, "i={i}");
        }
        let v: Vec<DVector<f64>> = f.iter().map(|&y| DVector::from_vec(vec![y])).collect();
        for i in 0..6 {
            let dd = vector_second_derivative_at(&v, i, h)[0];
            assert!((dd - 6.0).abs() < 1e-9, "i={i} dd={dd}");
        }
    }

    #[test]
    fn too_short_series_is_rejected() {
        assert!(matches!(derivative(&[1.0, 2.0], 0.1), Err(GeomError::Stencil(_))));
    }

    #[test]
    fn second_order_convergence() {
        let err = |h: f64| {
            let f: Vec<f64> = (0..40).map(|i| (i as f64 * h).sin()).collect();
            let d = derivative(&f, h).unwrap();
            d.iter()
                .enumerate()
                .map(|(i, di)| (di - (i as f64 * h).cos()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.02) / err(0.01);
        assert!(ratio > 3.5, "ratio {ratio}");
    }
}
