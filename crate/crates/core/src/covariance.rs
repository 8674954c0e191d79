//! Delta-method covariance of a set of measure estimates.
//!
//! Each target `k` gets an influence vector `H_k,i = d1 z_i a_k,i + d2 a_k,i
//! + d3 z_i` with the gradient evaluated at the sample moments. `V` is the
//! (n - 1)-denominator sample covariance of those vectors. The blurred
//! estimate adds `D_kk = |dg_k|^2 z^2 / (2n)` with `z = Phi^-1(1 - alpha/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measure::{GradientTriple, MeasureSpec, MomentTriple};
use crate::moments::{count_columns, BinaryDataset, EvaluationTarget};
use crate::quantile::inv_norm_cdf;

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceVector {
    pub values: Vec<f64>,
    pub target: EvaluationTarget,
    pub moments: MomentTriple,
    pub estimate: f64,
    pub gradient: GradientTriple,
}

/// Plug-in influence values of `measure` applied to `target.rule`.
pub fn influence(
    data: &BinaryDataset,
    target: &EvaluationTarget,
    measure: &MeasureSpec,
) -> Result<InfluenceVector> {
    let rule = data.rule_index(&target.rule)?;
    let z = data.truth();
    let a = data.predictions_at(rule);
    let moments = count_columns(z, a).triple();
    let estimate = measure.evaluate(&moments)?;
    let gradient = measure.gradient(&moments)?;
    let GradientTriple { d_za, d_a, d_z } = gradient;
    let values = z
        .iter()
        .zip(a)
        .map(|(&zi, &ai)| {
            let (zi, ai) = (zi as f64, ai as f64);
            d_za * zi * ai + d_a * ai + d_z * zi
        })
        .collect();
    Ok(InfluenceVector {
        values,
        target: target.clone(),
        moments,
        estimate,
        gradient,
    })
}

/// `V` (or `V + D` when `corrected`) for an ordered list of targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub v: Matrix,
    pub corrected: bool,
    pub d_diag: Vec<f64>,
    pub n: usize,
    pub targets: Vec<EvaluationTarget>,
    pub gradients: Vec<GradientTriple>,
}

impl CovarianceEstimate {
    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    pub fn variance(&self, k: usize) -> f64 {
        self.v[(k, k)]
    }

    /// The estimate restricted to targets `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim()) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: bad + 1,
            });
        }
        Ok(Self {
            v: self.v.submatrix(indices),
            corrected: self.corrected,
            d_diag: indices.iter().map(|&i| self.d_diag[i]).collect(),
            n: self.n,
            targets: indices.iter().map(|&i| self.targets[i].clone()).collect(),
            gradients: indices.iter().map(|&i| self.gradients[i]).collect(),
        })
    }
}

fn mean(values: &[f64]) -> f64 {
    // Constant vectors get their exact value so that their variance is 0.
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return first;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Uncorrected covariance from influence vectors of equal length `n >= 2`.
pub fn covariance_matrix(influences: &[InfluenceVector]) -> Result<CovarianceEstimate> {
    let n = influences.first().map_or(0, |h| h.values.len());
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    if let Some(h) = influences.iter().find(|h| h.values.len() != n) {
        return Err(Error::LengthMismatch {
            what: format!("influence vector of `{}`", h.target),
            expected: n,
            found: h.values.len(),
        });
    }
    let centered: Vec<Vec<f64>> = influences
        .iter()
        .map(|h| {
            let mu = mean(&h.values);
            h.values.iter().map(|v| v - mu).collect()
        })
        .collect();

    let k = influences.len();
    let mut v = Matrix::zeros(k);
    let denom = (n - 1) as f64;
    for i in 0..k {
        for j in i..k {
            let s: f64 = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(x, y)| x * y)
                .sum();
            v[(i, j)] = s / denom;
            v[(j, i)] = v[(i, j)];
        }
    }
    Ok(CovarianceEstimate {
        v,
        corrected: false,
        d_diag: vec![0.0; k],
        n,
        targets: influences.iter().map(|h| h.target.clone()).collect(),
        gradients: influences.iter().map(|h| h.gradient).collect(),
    })
}

/// Diagonal of the blurring matrix `D`.
pub fn blurring_matrix(gradients: &[GradientTriple], alpha: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha {alpha} is outside (0, 1)"
        )));
    }
    let z = inv_norm_cdf(1.0 - alpha / 2.0)?;
    let half_z2 = z * z / 2.0;
    Ok(gradients
        .iter()
        .map(|g| g.norm_sq() * half_z2 / n as f64)
        .collect())
}

/// `V + D`.
pub fn correct(estimate: &CovarianceEstimate, alpha: f64) -> Result<CovarianceEstimate> {
    if estimate.corrected {
        return Err(Error::InvalidArgument(
            "covariance estimate is already corrected".into(),
        ));
    }
    let d_diag = blurring_matrix(&estimate.gradients, alpha, estimate.n)?;
    let mut out = estimate.clone();
    for (k, d) in d_diag.iter().enumerate() {
        out.v[(k, k)] += d;
    }
    out.d_diag = d_diag;
    out.corrected = true;
    Ok(out)
}

/// A valid correlation matrix: symmetric, unit diagonal, entries in [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    r: Matrix,
}

impl CorrelationMatrix {
    pub fn new(r: Matrix) -> Result<Self> {
        let dim = r.dim();
        if dim == 0 {
            return Err(Error::InvalidCorrelation("matrix is empty".into()));
        }
        if !r.is_symmetric(1e-12) {
            return Err(Error::InvalidCorrelation("matrix is not symmetric".into()));
        }
        for i in 0..dim {
            if (r[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidCorrelation(format!(
                    "diagonal entry {} is {}, expected 1",
                    i,
                    r[(i, i)]
                )));
            }
            for j in 0..dim {
                let x = r[(i, j)];
                if !x.is_finite() || x.abs() > 1.0 {
                    return Err(Error::InvalidCorrelation(format!(
                        "entry ({i}, {j}) = {x} is outside [-1, 1]"
                    )));
                }
            }
        }
        Ok(Self { r })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            r: Matrix::identity(dim),
        }
    }

    /// Equicorrelated matrix with off-diagonal `rho`.
    pub fn exchangeable(dim: usize, rho: f64) -> Result<Self> {
        let mut r = Matrix::filled(dim, rho);
        for i in 0..dim {
            r[(i, i)] = 1.0;
        }
        Self::new(r)
    }

    pub fn dim(&self) -> usize {
        self.r.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.r
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.r[(i, j)]
    }

    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self {
            r: self.r.submatrix(indices),
        }
    }
}

/// `R_jk = V_jk / sqrt(V_jj V_kk)`, clamped to [-1, 1].
pub fn correlation(estimate: &CovarianceEstimate) -> Result<CorrelationMatrix> {
    let v = &estimate.v;
    let k = v.dim();
    if let Some(bad) = (0..k).find(|&i| !(v[(i, i)] > 0.0)) {
        return Err(Error::SingularVariance(bad));
    }
    let mut r = Matrix::identity(k);
    for i in 0..k {
        for j in 0..i {
            let x = (v[(i, j)] / (v[(i, i)] * v[(j, j)]).sqrt()).clamp(-1.0, 1.0);
            r[(i, j)] = x;
            r[(j, i)] = x;
        }
    }
    Ok(CorrelationMatrix { r })
}
