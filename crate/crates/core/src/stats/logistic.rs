//! Ridge-penalized logistic regression by iteratively reweighted least
//! squares (Newton steps on the penalized log-likelihood) with step halving.

use serde::Serialize;

use super::linalg::{cholesky, cholesky_inverse, cholesky_solve};
use super::{DesignMatrix, StatsError};
use crate::Scalar;

pub const DEFAULT_RIDGE: f64 = 1e-6;
pub const GRADIENT_TOLERANCE: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 100;
const MAX_HALVINGS: usize = 40;
/// Coefficients larger than this in magnitude usually mean (quasi-)separation.
pub const LARGE_COEFFICIENT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogisticConfig<F> {
    pub ridge_lambda: F,
    pub tolerance: F,
    pub max_iterations: usize,
}

impl<F: Scalar> Default for LogisticConfig<F> {
    fn default() -> Self {
        LogisticConfig {
            ridge_lambda: F::of(DEFAULT_RIDGE),
            tolerance: F::of(GRADIENT_TOLERANCE),
            max_iterations: MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticFit<F> {
    pub names: Vec<String>,
    pub coefficients: Vec<F>,
    pub standard_errors: Vec<F>,
    pub iterations: usize,
    pub converged: bool,
    pub ridge_lambda: F,
    /// Max-norm of the penalized gradient at the returned coefficients.
    pub gradient_max_norm: F,
    /// Penalized log-likelihood at the start and after every accepted step.
    pub log_likelihood_trace: Vec<F>,
    pub warnings: Vec<String>,
}

impl<F: Scalar> LogisticFit<F> {
    pub fn z_values(&self) -> Vec<F> {
        self.coefficients
            .iter()
            .zip(&self.standard_errors)
            .map(|(b, se)| *b / *se)
            .collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<F> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
    }

    pub fn ensure_converged(&self) -> Result<&Self, StatsError> {
        if self.converged {
            Ok(self)
        } else {
            Err(StatsError::NotConverged {
                iterations: self.iterations,
                gradient: self.gradient_max_norm.to_f64_lossy(),
            })
        }
    }
}

/// `log(1 + e^x)` without overflow.
fn softplus<F: Scalar>(x: F) -> F {
    x.max(F::zero()) + (-x.abs()).exp().ln_1p()
}

fn sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

fn linear<F: Scalar>(row: &[F], beta: &[F]) -> F {
    row.iter().zip(beta).map(|(x, b)| *x * *b).sum()
}

/// Name of the unpenalized column.
pub const INTERCEPT: &str = "intercept";

/// Per-coefficient ridge weights; the intercept column is unpenalized.
fn penalty<F: Scalar>(x: &DesignMatrix<F>, lambda: F) -> Vec<F> {
    x.names
        .iter()
        .map(|n| if n == INTERCEPT { F::zero() } else { lambda })
        .collect()
}

/// `sum_i [y_i eta_i - log(1 + e^eta_i)] - lambda/2 * sum_{j>0} beta_j^2`.
pub fn penalized_log_likelihood<F: Scalar>(
    x: &DesignMatrix<F>,
    y: &[F],
    beta: &[F],
    lambda: F,
) -> F {
    let ll: F = x
        .rows
        .iter()
        .zip(y)
        .map(|(row, yi)| {
            let eta = linear(row, beta);
            *yi * eta - softplus(eta)
        })
        .sum();
    let pen: F = beta
        .iter()
        .zip(penalty(x, lambda))
        .map(|(b, w)| w * *b * *b)
        .sum();
    ll - F::of(0.5) * pen
}

/// Gradient of [`penalized_log_likelihood`] with respect to `beta`.
pub fn penalized_gradient<F: Scalar>(
    x: &DesignMatrix<F>,
    y: &[F],
    beta: &[F],
    lambda: F,
) -> Vec<F> {
    let mut g: Vec<F> = beta
        .iter()
        .zip(penalty(x, lambda))
        .map(|(b, w)| -w * *b)
        .collect();
    for (row, yi) in x.rows.iter().zip(y) {
        let r = *yi - sigmoid(linear(row, beta));
        for (gj, xj) in g.iter_mut().zip(row) {
            *gj += r * *xj;
        }
    }
    g
}

/// Penalized observed information `X^T W X + lambda * I_pen`.
fn information<F: Scalar>(x: &DesignMatrix<F>, beta: &[F], lambda: F) -> Vec<Vec<F>> {
    let p = x.p();
    let mut h = vec![vec![F::zero(); p]; p];
    for row in &x.rows {
        let mu = sigmoid(linear(row, beta));
        let w = mu * (F::one() - mu);
        for a in 0..p {
            let wa = w * row[a];
            for b in 0..=a {
                h[a][b] += wa * row[b];
            }
        }
    }
    let pen = penalty(x, lambda);
    for a in 0..p {
        h[a][a] += pen[a];
        for b in 0..a {
            h[b][a] = h[a][b];
        }
    }
    h
}

fn max_norm<F: Scalar>(v: &[F]) -> F {
    v.iter().fold(F::zero(), |m, x| m.max(x.abs()))
}

pub fn fit_logistic<F: Scalar>(
    x: &DesignMatrix<F>,
    y: &[F],
    config: &LogisticConfig<F>,
) -> Result<LogisticFit<F>, StatsError> {
    let (n, p) = (x.n(), x.p());
    if y.len() != n {
        return Err(StatsError::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    if let Some(row) = x.rows.iter().find(|r| r.len() != p) {
        return Err(StatsError::DimensionMismatch {
            expected: p,
            got: row.len(),
        });
    }
    if n <= p {
        return Err(StatsError::TooFewSamples { n, p });
    }
    if y.iter().any(|v| *v != F::zero() && *v != F::one()) {
        return Err(StatsError::InvalidResponse);
    }
    if x.rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteInput);
    }
    let lambda = config.ridge_lambda;
    let mut beta = vec![F::zero(); p];
    let mut pll = penalized_log_likelihood(x, y, &beta, lambda);
    let mut grad = penalized_gradient(x, y, &beta, lambda);
    let mut trace = vec![pll];
    let mut iterations = 0;
    let mut converged = max_norm(&grad) < config.tolerance;
    while !converged && iterations < config.max_iterations {
        let l = cholesky(&information(x, &beta, lambda)).ok_or(StatsError::SingularInformation)?;
        let step = cholesky_solve(&l, &grad);
        let mut t = F::one();
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand: Vec<F> = beta.iter().zip(&step).map(|(b, s)| *b + t * *s).collect();
            let cand_pll = penalized_log_likelihood(x, y, &cand, lambda);
            if cand_pll >= pll {
                accepted = Some((cand, cand_pll));
                break;
            }
            t *= F::of(0.5);
        }
        iterations += 1;
        let Some((cand, cand_pll)) = accepted else {
            // No ascent along the Newton direction at any step length; the
            // objective is flat to working precision here.
            break;
        };
        beta = cand;
        pll = cand_pll;
        trace.push(pll);
        grad = penalized_gradient(x, y, &beta, lambda);
        converged = max_norm(&grad) < config.tolerance;
    }

    let l = cholesky(&information(x, &beta, lambda)).ok_or(StatsError::SingularInformation)?;
    let cov = cholesky_inverse(&l);
    let standard_errors: Vec<F> = (0..p).map(|j| cov[j][j].sqrt()).collect();
    let mut warnings = Vec::new();
    for (name, b) in x.names.iter().zip(&beta) {
        if b.abs() > F::of(LARGE_COEFFICIENT) {
            warnings.push(format!(
                "coefficient `{name}` = {b} is large in magnitude; the data may be (quasi-)separable"
            ));
        }
    }
    if !converged {
        warnings.push(format!(
            "not converged after {iterations} iterations (gradient max-norm {})",
            max_norm(&grad)
        ));
    }
    Ok(LogisticFit {
        names: x.names.clone(),
        coefficients: beta,
        standard_errors,
        iterations,
        converged,
        ridge_lambda: lambda,
        gradient_max_norm: max_norm(&grad),
        log_likelihood_trace: trace,
        warnings,
    })
}

/// Fitted probability for one design row, strictly inside `(0, 1)`.
pub fn predict_probability<F: Scalar>(fit: &LogisticFit<F>, row: &[F]) -> Result<F, StatsError> {
    if row.len() != fit.coefficients.len() {
        return Err(StatsError::DimensionMismatch {
            expected: fit.coefficients.len(),
            got: row.len(),
        });
    }
    let p = sigmoid(linear(row, &fit.coefficients));
    let eps = F::epsilon();
    Ok(p.max(eps).min(F::one() - eps))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    pub standard_error: f64,
    pub z_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionReport {
    pub response: String,
    pub n: usize,
    pub positives: usize,
    pub ridge_lambda: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_max_norm: f64,
    pub penalized_log_likelihood: f64,
    pub coefficients: Vec<CoefficientRow>,
    pub warnings: Vec<String>,
}

impl RegressionReport {
    pub fn new<F: Scalar>(response: &str, fit: &LogisticFit<F>, y: &[F]) -> Self {
        let z = fit.z_values();
        RegressionReport {
            response: response.to_string(),
            n: y.len(),
            positives: y.iter().filter(|v| **v == F::one()).count(),
            ridge_lambda: fit.ridge_lambda.to_f64_lossy(),
            converged: fit.converged,
            iterations: fit.iterations,
            gradient_max_norm: fit.gradient_max_norm.to_f64_lossy(),
            penalized_log_likelihood: fit
                .log_likelihood_trace
                .last()
                .map_or(f64::NAN, |v| v.to_f64_lossy()),
            coefficients: fit
                .names
                .iter()
                .enumerate()
                .map(|(j, name)| CoefficientRow {
                    name: name.clone(),
                    estimate: fit.coefficients[j].to_f64_lossy(),
                    standard_error: fit.standard_errors[j].to_f64_lossy(),
                    z_value: z[j].to_f64_lossy(),
                })
                .collect(),
            warnings: fit.warnings.clone(),
        }
    }
}
