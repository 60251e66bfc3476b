use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Relative pivot tolerance below which a design is treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Row-major predictor matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DesignMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, AnalysisError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(AnalysisError::Dimension("ragged design rows".into()));
        }
        Ok(DesignMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn mul_vec(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(beta).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Xᵀ v`.
    pub fn t_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate().take(self.rows) {
            for (o, &x) in out.iter_mut().zip(self.row(i)) {
                *o += x * vi;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    /// `None` when `y` is constant.
    pub r_squared: Option<f64>,
    pub n: usize,
}

/// Least squares via Householder QR of `X`; the solution satisfies the
/// normal equations `XᵀX β = Xᵀy`.
///
/// Fails with [`AnalysisError::RankDeficient`] when the smallest diagonal
/// entry of `R` is below `1e-10` times the largest.
pub fn ols_fit(y: &[f64], x: &DesignMatrix) -> Result<OlsFit, AnalysisError> {
    let (m, p) = (x.rows, x.cols);
    if y.len() != m {
        return Err(AnalysisError::Dimension(format!(
            "y has {} rows, X has {m}",
            y.len()
        )));
    }
    if p == 0 || m < p {
        return Err(AnalysisError::Dimension(format!(
            "need rows ≥ columns ≥ 1, got {m}×{p}"
        )));
    }

    // Column-major working copy of X, and Qᵀy accumulated alongside.
    let mut a: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..m).map(|i| x.get(i, j)).collect())
        .collect();
    let mut qty = y.to_vec();
    let mut diag = vec![0.0; p];
    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(AnalysisError::RankDeficient);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        diag[k] = alpha;
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(k + 1) {
                let dot: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, vi) in col[k..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&qty[k..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in qty[k..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        a[k][k] = alpha;
    }

    let largest = diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    let smallest = diag.iter().fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
    if smallest <= RANK_TOLERANCE * largest {
        return Err(AnalysisError::RankDeficient);
    }

    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let tail: f64 = ((k + 1)..p).map(|j| a[j][k] * beta[j]).sum();
        beta[k] = (qty[k] - tail) / diag[k];
    }

    let fitted = x.mul_vec(&beta);
    let my = y.iter().sum::<f64>() / m as f64;
    let ss_res: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let r_squared = (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot);
    Ok(OlsFit {
        coefficients: beta,
        r_squared,
        n: m,
    })
}
