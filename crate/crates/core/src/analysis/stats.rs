use super::{Correlation, UndefinedReason};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn is_constant(xs: &[f64]) -> bool {
    xs.iter().all(|&v| v == xs[0])
}

/// Pearson correlation over paired samples (two-pass, centered).
pub fn pearson(x: &[f64], y: &[f64]) -> Correlation {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len().min(y.len());
    if n < 3 {
        return Correlation::Undefined(UndefinedReason::ShortOverlap);
    }
    let (x, y) = (&x[..n], &y[..n]);
    if is_constant(x) || is_constant(y) {
        return Correlation::Undefined(UndefinedReason::ZeroVariance);
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let da = a - mx;
        let db = b - my;
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Correlation::Undefined(UndefinedReason::ZeroVariance);
    }
    Correlation::Defined((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let r = |y: &[f64]| pearson(&x, y).value().unwrap();
        assert!((r(&[2.0, 4.0, 6.0, 8.0]) - 1.0).abs() < 1e-15);
        assert!((r(&[8.0, 6.0, 4.0, 2.0]) + 1.0).abs() < 1e-15);
        // r = 0.8 for this textbook pair
        let r = pearson(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0])
            .value()
            .unwrap();
        assert!((r - 0.8).abs() < 1e-12);
        assert_eq!(
            pearson(&x, &[0.1, 0.1, 0.1, 0.1]),
            Correlation::Undefined(UndefinedReason::ZeroVariance)
        );
        assert_eq!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Correlation::Undefined(UndefinedReason::ShortOverlap)
        );
    }
}
