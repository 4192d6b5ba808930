//! Guard against a miscomputing LAPACK backend.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Solve, SVD};

use crate::error::{Error, Result};

/// Solves and decomposes a fixed well-conditioned 64×64 system and checks the
/// residuals. Fails with a hint when the BLAS kernels are unreliable.
pub fn self_check() -> Result<()> {
    let k = 64;
    let a = Array2::from_shape_fn((k, k), |(r, c)| ((r * 7 + c * 13) % 17) as f64 + if r == c { 40.0 } else { 0.0 });
    let b = Array1::from_shape_fn(k, |i| i as f64);
    let x = a.solve(&b).map_err(|e| Error::Numerical(e.to_string()))?;
    let solve_res = (a.dot(&x) - &b).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (u, s, vt) = a.svd(true, true).map_err(|e| Error::Numerical(e.to_string()))?;
    let (u, vt) = (u.expect("u requested"), vt.expect("vt requested"));
    let svd_res = (u.dot(&Array2::from_diag(&s)).dot(&vt) - &a).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if solve_res > 1e-9 || svd_res > 1e-9 {
        return Err(Error::Numerical(format!(
            "LAPACK self-check failed (solve residual {solve_res:e}, SVD residual {svd_res:e}); \
             try OPENBLAS_CORETYPE=Haswell"
        )));
    }
    Ok(())
}
