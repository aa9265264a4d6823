//! Logistic-regression baseline with L2 regularization, trained by
//! full-batch gradient descent with backtracking line search. Serves as
//! the linear-separability reference for the spiking models and as the
//! oracle for the synthetic data generator.

use alloc::format;

use crate::data::{Dataset, FEATURE_COUNT};
use crate::eval::FoldModel;
use crate::{Error, Result};

/// Inverse regularization grid published for the baseline.
pub const C_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRegModel {
    pub w: [f64; FEATURE_COUNT],
    pub b: f64,
    /// Inverse regularization strength C.
    pub c: f64,
}

impl LogRegModel {
    pub fn decision(&self, features: &[f64; FEATURE_COUNT]) -> f64 {
        let mut z = self.b;
        for (wj, xj) in self.w.iter().zip(features) {
            z += wj * xj;
        }
        z
    }

    pub fn weight_norm(&self) -> f64 {
        libm::sqrt(self.w.iter().map(|v| v * v).sum::<f64>())
    }
}

impl FoldModel for LogRegModel {
    /// Predicts 1 iff w.x + b > 0; the boundary itself goes to class 0.
    fn predict(&self, features: &[f64; FEATURE_COUNT]) -> u8 {
        u8::from(self.decision(features) > 0.0)
    }
}

/// Training outcome; non-convergence within `max_iter` is reported, not
/// fatal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRegFit {
    pub model: LogRegModel,
    pub converged: bool,
    pub iterations: usize,
    pub final_loss: f64,
    pub grad_norm: f64,
}

/// Mean logistic loss plus `||w||^2 / (2 c n)`; the bias is unregularized.
pub fn logreg_loss(ds: &Dataset, w: &[f64; FEATURE_COUNT], b: f64, c: f64) -> f64 {
    let n = ds.len() as f64;
    let mut loss = 0.0;
    for r in &ds.records {
        let f = r.features();
        let mut z = b;
        for (wj, xj) in w.iter().zip(&f) {
            z += wj * xj;
        }
        // Stable softplus(z) - y z.
        let softplus = if z > 0.0 { z } else { 0.0 } + libm::log(1.0 + libm::exp(-libm::fabs(z)));
        loss += softplus - r.label as f64 * z;
    }
    loss / n + w.iter().map(|v| v * v).sum::<f64>() / (2.0 * c * n)
}

/// Analytic gradient of [`logreg_loss`] in (w, b).
pub fn logreg_gradient(
    ds: &Dataset,
    w: &[f64; FEATURE_COUNT],
    b: f64,
    c: f64,
) -> ([f64; FEATURE_COUNT], f64) {
    let n = ds.len() as f64;
    let mut gw = [0.0f64; FEATURE_COUNT];
    let mut gb = 0.0f64;
    for r in &ds.records {
        let f = r.features();
        let mut z = b;
        for (wj, xj) in w.iter().zip(&f) {
            z += wj * xj;
        }
        let p = sigmoid(z);
        let err = p - r.label as f64;
        for (g, xj) in gw.iter_mut().zip(&f) {
            *g += err * xj;
        }
        gb += err;
    }
    for (g, wj) in gw.iter_mut().zip(w) {
        *g = *g / n + wj / (c * n);
    }
    (gw, gb / n)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// Full-batch gradient descent with Armijo backtracking. Accepted steps
/// never increase the loss; converged when the gradient norm drops below
/// `tol`.
pub fn train_logreg(ds: &Dataset, c: f64, max_iter: usize, tol: f64) -> Result<LogRegFit> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let counts = ds.class_counts();
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::ClassTooSmall {
            class: u8::from(counts[1] == 0),
            count: 0,
            k: 1,
        });
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParam {
            context: format!("C must be positive, got {c}"),
        });
    }

    let mut w = [0.0f64; FEATURE_COUNT];
    let mut b = 0.0f64;
    let mut loss = logreg_loss(ds, &w, b, c);
    let mut converged = false;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;

    for iter in 0..max_iter {
        iterations = iter + 1;
        let (gw, gb) = logreg_gradient(ds, &w, b, c);
        let g2: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
        grad_norm = libm::sqrt(g2);
        if grad_norm < tol {
            converged = true;
            iterations = iter;
            break;
        }
        let mut step = 1.0f64;
        loop {
            let mut wc = w;
            for (wj, gj) in wc.iter_mut().zip(&gw) {
                *wj -= step * gj;
            }
            let bc = b - step * gb;
            let candidate = logreg_loss(ds, &wc, bc, c);
            if candidate <= loss - 1e-4 * step * g2 {
                w = wc;
                b = bc;
                loss = candidate;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                // Flat to machine precision; treat as converged.
                converged = true;
                break;
            }
        }
        if converged {
            break;
        }
    }

    Ok(LogRegFit {
        model: LogRegModel { w, b, c },
        converged,
        iterations,
        final_loss: loss,
        grad_norm,
    })
}
