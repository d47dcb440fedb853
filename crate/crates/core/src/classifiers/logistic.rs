//! Logistic regression fitted by maximum likelihood.
//!
//! Deterministic full-batch Newton updates with step halving, a small ridge
//! penalty on the non-intercept coefficients for conditioning, and an
//! infinity-norm gradient stopping rule. The analytic likelihood and
//! gradient are exposed for finite-difference verification.

use crate::dataset::{Dataset, FeatureDef, Value};
use crate::error::ModelError;

use super::encode::OneHotEncoder;

/// The logistic function `1 / (1 + e^-x)`.
pub fn logistic_fn(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub features: Vec<FeatureDef>,
    pub encoder: OneHotEncoder,
    /// Intercept first, then one coefficient per encoded column.
    pub beta: Vec<f64>,
    pub converged: bool,
}

/// Ridge-penalized Bernoulli log-likelihood. `beta[0]` is the intercept and
/// is not penalized; `xs` rows carry no intercept column.
pub fn log_likelihood(xs: &[Vec<f64>], ys: &[f64], beta: &[f64], ridge: f64) -> f64 {
    let mut ll = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let z = linear(beta, x);
        // y*ln(p) + (1-y)*ln(1-p) = y*z - ln(1 + e^z), stably.
        ll += y * z - softplus(z);
    }
    let penalty: f64 = beta[1..].iter().map(|b| b * b).sum();
    ll - 0.5 * ridge * penalty
}

/// Analytic gradient of [`log_likelihood`].
pub fn log_likelihood_gradient(xs: &[Vec<f64>], ys: &[f64], beta: &[f64], ridge: f64) -> Vec<f64> {
    let mut grad = vec![0.0; beta.len()];
    for (x, &y) in xs.iter().zip(ys) {
        let r = y - logistic_fn(linear(beta, x));
        grad[0] += r;
        for (g, v) in grad[1..].iter_mut().zip(x) {
            *g += r * v;
        }
    }
    for (g, b) in grad[1..].iter_mut().zip(&beta[1..]) {
        *g -= ridge * b;
    }
    grad
}

fn linear(beta: &[f64], x: &[f64]) -> f64 {
    beta[0] + beta[1..].iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Newton/IRLS fit on encoded rows. Returns the coefficient vector
/// (intercept first) and whether the gradient tolerance was reached.
pub fn fit_logistic_raw(
    xs: &[Vec<f64>],
    ys: &[f64],
    ridge: f64,
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, bool) {
    let dim = xs.first().map_or(0, Vec::len) + 1;
    let mut beta = vec![0.0; dim];
    let mut ll = log_likelihood(xs, ys, &beta, ridge);

    for _ in 0..max_iter {
        let grad = log_likelihood_gradient(xs, ys, &beta, ridge);
        if inf_norm(&grad) <= tol {
            return (beta, true);
        }

        // Negated Hessian: X'WX + ridge on the non-intercept diagonal.
        let mut hess = vec![vec![0.0; dim]; dim];
        for x in xs {
            let p = logistic_fn(linear(&beta, x));
            let w = p * (1.0 - p);
            for a in 0..dim {
                let xa = if a == 0 { 1.0 } else { x[a - 1] };
                for b in a..dim {
                    let xb = if b == 0 { 1.0 } else { x[b - 1] };
                    hess[a][b] += w * xa * xb;
                }
            }
        }
        for a in 1..dim {
            hess[a][a] += ridge;
        }
        for a in 0..dim {
            for b in 0..a {
                hess[a][b] = hess[b][a];
            }
        }

        let Some(step) = solve_spd(hess, grad) else {
            // Singular even after jitter; keep the best iterate.
            return (beta, false);
        };

        // Step halving: accept the first step that does not decrease the
        // penalized likelihood.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let candidate: Vec<f64> =
                beta.iter().zip(&step).map(|(b, s)| b + scale * s).collect();
            let cand_ll = log_likelihood(xs, ys, &candidate, ridge);
            if cand_ll >= ll - 1e-12 {
                beta = candidate;
                ll = cand_ll;
                accepted = true;
                break;
            }
            scale /= 2.0;
        }
        if !accepted {
            return (beta, false);
        }
    }
    let converged = inf_norm(&log_likelihood_gradient(xs, ys, &beta, ridge)) <= tol;
    (beta, converged)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Cholesky solve of a symmetric positive-definite system, with progressive
/// diagonal jitter on failure.
fn solve_spd(a: Vec<Vec<f64>>, b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let mut jitter = 0.0;
    for attempt in 0..6 {
        if attempt > 0 {
            jitter = if jitter == 0.0 { 1e-10 } else { jitter * 100.0 };
        }
        let mut l = a.clone();
        for i in 0..n {
            l[i][i] += jitter;
        }
        if cholesky(&mut l).is_some() {
            // forward substitution: L y = b
            let mut y = vec![0.0; n];
            for i in 0..n {
                let mut s = b[i];
                for j in 0..i {
                    s -= l[i][j] * y[j];
                }
                y[i] = s / l[i][i];
            }
            // back substitution: L' x = y
            let mut x = vec![0.0; n];
            for i in (0..n).rev() {
                let mut s = y[i];
                for j in i + 1..n {
                    s -= l[j][i] * x[j];
                }
                x[i] = s / l[i][i];
            }
            return Some(x);
        }
    }
    None
}

/// In-place lower Cholesky; `None` if not positive definite.
fn cholesky(a: &mut [Vec<f64>]) -> Option<()> {
    let n = a.len();
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                a[i][j] = s.sqrt();
            } else {
                a[i][j] = s / a[j][j];
            }
        }
        for j in i + 1..n {
            a[i][j] = 0.0;
        }
    }
    Some(())
}

pub fn fit_logistic(
    train: &Dataset,
    ridge: f64,
    max_iter: usize,
    tol: f64,
) -> Result<LogisticModel, ModelError> {
    if ridge < 0.0 || tol <= 0.0 {
        return Err(ModelError::InvalidHyperparameter(
            "ridge must be non-negative and tol positive".into(),
        ));
    }
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingData);
    }
    let (n_good, n_bad) = train.class_counts();
    if n_good == 0 || n_bad == 0 {
        return Err(ModelError::SingleClass);
    }
    let encoder = OneHotEncoder::fit(train);
    let (xs, ys) = encoder.encode_dataset(train);
    let (beta, converged) = fit_logistic_raw(&xs, &ys, ridge, max_iter, tol);
    Ok(LogisticModel {
        features: train.schema().features.clone(),
        encoder,
        beta,
        converged,
    })
}

impl LogisticModel {
    pub fn score(&self, values: &[Value]) -> Result<f64, ModelError> {
        super::check_input(&self.features, values)?;
        let x = self.encoder.encode(values);
        Ok(logistic_fn(linear(&self.beta, &x)))
    }
}
