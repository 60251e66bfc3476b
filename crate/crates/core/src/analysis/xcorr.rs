use serde::{Deserialize, Serialize, Serializer};

use super::{pearson, AnalysisError, Correlation, UndefinedReason};

/// Sign convention of every lag reported by this crate.
pub const LAG_CONVENTION: &str =
    "r(k) = corr(x[t], y[t+k]); x = supply, y = demand; k > 0 means demand lags supply by k weeks";

/// Correlations closer than this are tied when picking the peak.
pub const PEAK_TIE_TOLERANCE: f64 = 1e-12;

/// Pearson correlation at every lag in `-max_lag..=max_lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagCorrelation {
    pub lags: Vec<i32>,
    pub r: Vec<Correlation>,
    /// `(lag, r)` of the maximum defined correlation.
    pub peak: Option<(i32, f64)>,
}

impl LagCorrelation {
    pub fn at(&self, lag: i32) -> Option<Correlation> {
        self.lags.iter().position(|&k| k == lag).map(|i| self.r[i])
    }

    pub fn peak_lag(&self) -> Option<i32> {
        self.peak.map(|(k, _)| k)
    }

    pub fn peak_r(&self) -> Option<f64> {
        self.peak.map(|(_, r)| r)
    }
}

/// `r(k)` pairs `x[t]` with `y[t + k]` over the overlap of length `n - |k|`.
///
/// The peak is the largest defined `r`; ties (within [`PEAK_TIE_TOLERANCE`]) go to the smaller `|k|`, then to
/// the negative lag.
pub fn cross_correlation(
    x: &[f64],
    y: &[f64],
    max_lag: usize,
) -> Result<LagCorrelation, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::AlignmentError(format!(
            "lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(AnalysisError::TooShort(n));
    }
    if max_lag + 2 >= n {
        return Err(AnalysisError::InvalidLag { max_lag, n });
    }
    let max_lag = max_lag as i64;
    let mut lags = Vec::with_capacity(2 * max_lag as usize + 1);
    let mut r = Vec::with_capacity(lags.capacity());
    for k in -max_lag..=max_lag {
        let overlap = n - k.unsigned_abs() as usize;
        let c = if overlap < 3 {
            Correlation::Undefined(UndefinedReason::ShortOverlap)
        } else if k >= 0 {
            let k = k as usize;
            pearson(&x[..n - k], &y[k..])
        } else {
            let k = (-k) as usize;
            pearson(&x[k..], &y[..n - k])
        };
        lags.push(k as i32);
        r.push(c);
    }
    let peak = lags
        .iter()
        .zip(&r)
        .filter_map(|(&k, c)| c.value().map(|v| (k, v)))
        .fold(None, |best: Option<(i32, f64)>, (k, v)| match best {
            None => Some((k, v)),
            Some((bk, bv)) => {
                let tied = (v - bv).abs() <= PEAK_TIE_TOLERANCE;
                let better = (!tied && v > bv)
                    || (tied && (k.abs() < bk.abs() || (k.abs() == bk.abs() && k < bk)));
                Some(if better { (k, v) } else { (bk, bv) })
            }
        });
    Ok(LagCorrelation { lags, r, peak })
}

#[derive(Serialize, Deserialize)]
struct LagEntry {
    lag: i32,
    r: Option<crate::fmt::Fixed6>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    reason: Option<UndefinedReason>,
}

impl Serialize for LagCorrelation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<LagEntry> = self
            .lags
            .iter()
            .zip(&self.r)
            .map(|(&lag, c)| LagEntry {
                lag,
                r: c.value().map(crate::fmt::Fixed6),
                reason: c.reason(),
            })
            .collect();
        let mut s = serializer.serialize_struct("LagCorrelation", 4)?;
        s.serialize_field("convention", LAG_CONVENTION)?;
        s.serialize_field("peak_lag", &self.peak_lag())?;
        s.serialize_field("peak_r", &self.peak_r().map(crate::fmt::Fixed6))?;
        s.serialize_field("lags", &entries)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for LagCorrelation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            peak_lag: Option<i32>,
            peak_r: Option<crate::fmt::Fixed6>,
            lags: Vec<LagEntry>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let peak = repr.peak_lag.zip(repr.peak_r.map(|f| f.0));
        let mut lags = Vec::new();
        let mut r = Vec::new();
        for e in repr.lags {
            lags.push(e.lag);
            r.push(match (e.r, e.reason) {
                (Some(v), _) => Correlation::Defined(v.0),
                (None, Some(reason)) => Correlation::Undefined(reason),
                (None, None) => Correlation::Undefined(UndefinedReason::ZeroVariance),
            });
        }
        Ok(LagCorrelation { lags, r, peak })
    }
}
