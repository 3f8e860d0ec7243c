//! Shared dense least-squares solver.

use nalgebra::{DMatrix, DVector};

#[derive(Debug)]
pub(crate) struct LstsqFit {
    /// Solution in the original column order of `a`.
    pub coeffs: Vec<f64>,
    /// Residual sum of squares at the solution.
    pub rss: f64,
}

/// Minimizes `||a x - b||` via column-pivoted QR.
///
/// Returns `Err(j)` with the index of a numerically dependent column of `a`
/// when the matrix is rank-deficient.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LstsqFit, usize> {
    let (rows, cols) = a.shape();
    assert!(rows >= cols, "lstsq needs at least as many rows as columns");
    assert_eq!(rows, b.len());

    let qr = a.clone().col_piv_qr();
    let r = qr.r();

    // Rank check on the pivoted R diagonal.
    let tol = f64::EPSILON * rows.max(cols) as f64 * r[(0, 0)].abs().max(1e-300);
    let mut bad_pivot = None;
    for k in 0..cols {
        if r[(k, k)].abs() <= tol {
            bad_pivot = Some(k);
            break;
        }
    }
    if let Some(k) = bad_pivot {
        // Map the pivoted position back to the original column index.
        let mut idx = DVector::from_iterator(cols, (0..cols).map(|i| i as f64));
        qr.p().permute_rows(&mut idx);
        return Err(idx[k] as usize);
    }

    // a * P = Q * R  =>  solve R z = Q^T b, then x = P z.
    let mut z = qr.q().transpose() * b;
    for k in (0..cols).rev() {
        for j in k + 1..cols {
            let zj = z[j];
            z[k] -= r[(k, j)] * zj;
        }
        z[k] /= r[(k, k)];
    }
    qr.p().inv_permute_rows(&mut z);

    let residual = b - a * &z;
    let rss = residual.iter().map(|v| v * v).sum();
    Ok(LstsqFit {
        coeffs: z.iter().cloned().collect(),
        rss,
    })
}
