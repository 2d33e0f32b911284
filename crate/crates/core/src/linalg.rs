use nalgebra::DMatrix;

use crate::error::{Error, Result};

const JITTER_START: f64 = 1e-14;
const JITTER_MAX: f64 = 1e-10;

/// Lower Cholesky factor and the relative jitter that was needed (0 if none).
pub(crate) fn cholesky_with_jitter(cov: DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let n = cov.nrows();
    if let Some(c) = cov.clone().cholesky() {
        return Ok((c.unpack(), 0.0));
    }
    let mean_diag = cov.trace() / n as f64;
    let mut eps = JITTER_START;
    while eps <= JITTER_MAX {
        let mut m = cov.clone();
        for i in 0..n {
            m[(i, i)] += eps * mean_diag;
        }
        if let Some(c) = m.cholesky() {
            return Ok((c.unpack(), eps));
        }
        eps *= 2.0;
    }
    Err(Error::Numerical(format!(
        "Cholesky factorization of {n}x{n} covariance failed with jitter up to {JITTER_MAX:e}·trace/n"
    )))
}
