//! Diagonal-covariance Gaussian mixture fitted by expectation-maximization.

use serde::Serialize;

use super::ScoringError;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GmmConfig<F> {
    pub components: usize,
    pub variance_floor: F,
    /// Stop when the log-likelihood gain per sample drops below this.
    pub tolerance: F,
    pub max_iterations: usize,
}

impl<F: Scalar> Default for GmmConfig<F> {
    fn default() -> Self {
        GmmConfig {
            components: 3,
            variance_floor: F::of(1e-6),
            tolerance: F::of(1e-8),
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GmmModel<F> {
    pub weights: Vec<F>,
    pub means: Vec<Vec<F>>,
    pub variances: Vec<Vec<F>>,
    /// `component_rank[k]` is component k's position when components are
    /// sorted by the mean of their mean vector (ascending, ties by index).
    pub component_rank: Vec<usize>,
    /// Total log-likelihood after initialization and after each accepted
    /// EM step; non-decreasing.
    pub log_likelihood_trace: Vec<F>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeScore<F> {
    pub value: F,
    pub posteriors: Vec<F>,
}

#[derive(Clone)]
struct Params<F> {
    weights: Vec<F>,
    means: Vec<Vec<F>>,
    variances: Vec<Vec<F>>,
}

fn log_gaussian_diag<F: Scalar>(x: &[F], mean: &[F], var: &[F]) -> F {
    let two_pi = F::of(std::f64::consts::TAU);
    let half = F::of(0.5);
    x.iter()
        .zip(mean)
        .zip(var)
        .map(|((&xi, &m), &v)| {
            let d = xi - m;
            -half * ((two_pi * v).ln() + d * d / v)
        })
        .sum()
}

fn log_sum_exp<F: Scalar>(v: &[F]) -> F {
    let max = v.iter().copied().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    max + v.iter().map(|&a| (a - max).exp()).sum::<F>().ln()
}

impl<F: Scalar> Params<F> {
    fn joint_log(&self, x: &[F]) -> Vec<F> {
        self.weights
            .iter()
            .zip(self.means.iter().zip(&self.variances))
            .map(|(&w, (m, v))| w.ln() + log_gaussian_diag(x, m, v))
            .collect()
    }

    /// Total log-likelihood and responsibilities.
    fn e_step(&self, data: &[Vec<F>]) -> (F, Vec<Vec<F>>) {
        let mut ll = F::zero();
        let resp = data
            .iter()
            .map(|x| {
                let lj = self.joint_log(x);
                let lse = log_sum_exp(&lj);
                ll += lse;
                lj.into_iter().map(|l| (l - lse).exp()).collect()
            })
            .collect();
        (ll, resp)
    }

    fn m_step(&self, data: &[Vec<F>], resp: &[Vec<F>], floor: F) -> Params<F> {
        let n = F::of(data.len() as f64);
        let d = data[0].len();
        let mut next = self.clone();
        for k in 0..self.weights.len() {
            let nk: F = resp.iter().map(|r| r[k]).sum();
            next.weights[k] = nk / n;
            if !(nk > F::zero()) {
                // Empty component: keep its shape, it carries no weight.
                continue;
            }
            let mut mean = vec![F::zero(); d];
            for (x, r) in data.iter().zip(resp) {
                for j in 0..d {
                    mean[j] += r[k] * x[j];
                }
            }
            mean.iter_mut().for_each(|m| *m /= nk);
            let mut var = vec![F::zero(); d];
            for (x, r) in data.iter().zip(resp) {
                for j in 0..d {
                    let dx = x[j] - mean[j];
                    var[j] += r[k] * dx * dx;
                }
            }
            var.iter_mut().for_each(|v| *v = (*v / nk).max(floor));
            next.means[k] = mean;
            next.variances[k] = var;
        }
        next
    }
}

fn rank_components<F: Scalar>(means: &[Vec<F>]) -> Vec<usize> {
    let centre = |m: &Vec<F>| m.iter().copied().sum::<F>() / F::of(m.len() as f64);
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| centre(&means[a]).partial_cmp(&centre(&means[b])).unwrap());
    let mut rank = vec![0; means.len()];
    for (pos, k) in order.into_iter().enumerate() {
        rank[k] = pos;
    }
    rank
}

/// Row indices used to seed the component means: evenly spaced quantiles of
/// the first feature from 10% to 90% (the median for a single component).
pub fn initial_rows<F: Scalar>(data: &[Vec<F>], k: usize) -> Vec<usize> {
    let n = data.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| data[a][0].partial_cmp(&data[b][0]).unwrap());
    let mut picks = Vec::with_capacity(k);
    for c in 0..k {
        let q = if k == 1 {
            0.5
        } else {
            0.1 + 0.8 * c as f64 / (k - 1) as f64
        };
        let mut pos = (q * (n - 1) as f64).round() as usize;
        // Distinct, increasing positions that leave room for the rest.
        if let Some(&prev) = picks.last() {
            pos = pos.max(prev + 1);
        }
        pos = pos.min(n - k + c);
        picks.push(pos);
    }
    picks.into_iter().map(|p| order[p]).collect()
}

pub fn fit_gmm<F: Scalar>(
    data: &[Vec<F>],
    config: &GmmConfig<F>,
) -> Result<GmmModel<F>, ScoringError> {
    let k = config.components;
    let n = data.len();
    if k == 0 {
        return Err(ScoringError::InvalidConfig("zero components".into()));
    }
    if n < k {
        return Err(ScoringError::TooFewSamples { n, k });
    }
    let d = data[0].len();
    if d == 0 {
        return Err(ScoringError::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    if let Some(row) = data.iter().find(|r| r.len() != d) {
        return Err(ScoringError::DimensionMismatch {
            expected: d,
            got: row.len(),
        });
    }
    if data.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ScoringError::NonFiniteInput);
    }

    let nf = F::of(n as f64);
    let mut global_var = vec![F::zero(); d];
    for j in 0..d {
        let mean = data.iter().map(|r| r[j]).sum::<F>() / nf;
        let var = data
            .iter()
            .map(|r| (r[j] - mean) * (r[j] - mean))
            .sum::<F>()
            / nf;
        global_var[j] = var.max(config.variance_floor);
    }
    let mut params = Params {
        weights: vec![F::one() / F::of(k as f64); k],
        means: initial_rows(data, k)
            .into_iter()
            .map(|i| data[i].clone())
            .collect(),
        variances: vec![global_var; k],
    };

    let (mut ll, mut resp) = params.e_step(data);
    let mut trace = vec![ll];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        let candidate = params.m_step(data, &resp, config.variance_floor);
        let (next_ll, next_resp) = candidate.e_step(data);
        // A step that fails to improve (rounding at the optimum) is not taken.
        if !(next_ll >= ll) {
            converged = true;
            break;
        }
        let gain = (next_ll - ll) / nf;
        params = candidate;
        ll = next_ll;
        resp = next_resp;
        trace.push(ll);
        iterations += 1;
        if gain < config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(GmmModel {
        component_rank: rank_components(&params.means),
        weights: params.weights,
        means: params.means,
        variances: params.variances,
        log_likelihood_trace: trace,
        iterations,
        converged,
    })
}

impl<F: Scalar> GmmModel<F> {
    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn dimension(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    /// Component posteriors for one point.
    pub fn posteriors(&self, x: &[F]) -> Result<Vec<F>, ScoringError> {
        if x.len() != self.dimension() {
            return Err(ScoringError::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        let params = Params {
            weights: self.weights.clone(),
            means: self.means.clone(),
            variances: self.variances.clone(),
        };
        let lj = params.joint_log(x);
        let lse = log_sum_exp(&lj);
        Ok(lj.into_iter().map(|l| (l - lse).exp()).collect())
    }

    /// The model with its components reordered; `perm[i]` is the old index
    /// of new component i.
    pub fn permuted(&self, perm: &[usize]) -> GmmModel<F> {
        let means: Vec<_> = perm.iter().map(|&i| self.means[i].clone()).collect();
        GmmModel {
            weights: perm.iter().map(|&i| self.weights[i]).collect(),
            variances: perm.iter().map(|&i| self.variances[i].clone()).collect(),
            component_rank: rank_components(&means),
            means,
            log_likelihood_trace: self.log_likelihood_trace.clone(),
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

/// Posterior-weighted component rank, scaled to `[0, 1]`. A one-component
/// model has no ordering and scores 0.5.
pub fn composite_score<F: Scalar>(
    model: &GmmModel<F>,
    x: &[F],
) -> Result<CompositeScore<F>, ScoringError> {
    let posteriors = model.posteriors(x)?;
    let k = model.components();
    let value = if k == 1 {
        F::of(0.5)
    } else {
        let top = F::of((k - 1) as f64);
        posteriors
            .iter()
            .zip(&model.component_rank)
            .map(|(&g, &r)| g * F::of(r as f64) / top)
            .sum::<F>()
            .max(F::zero())
            .min(F::one())
    };
    Ok(CompositeScore { value, posteriors })
}
