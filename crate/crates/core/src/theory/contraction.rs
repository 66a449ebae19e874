use serde::{Deserialize, Serialize};

use crate::dist::CumulantSummary;

/// First-order prediction of the standardized cumulants of `p_a · p_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionPrediction {
    /// `σa² / (σa² + σb²)`
    pub w_a: f64,
    /// `σb² / (σa² + σb²)`
    pub w_b: f64,
    /// predicted κ̂3..κ̂6
    pub predicted: [f64; 4],
    pub observed: Option<[f64; 4]>,
    pub abs_error: Option<[f64; 4]>,
}

/// `κ̂n,c = w_b^(n/2) κ̂n,a + w_a^(n/2) κ̂n,b` for `n = 3..=6`.
pub fn predict_product_cumulants(a: &CumulantSummary, b: &CumulantSummary) -> ContractionPrediction {
    assert!(a.var > 0.0 && b.var > 0.0, "variances must be positive");
    let total = a.var + b.var;
    let w_a = a.var / total;
    let w_b = b.var / total;
    let (ka, kb) = (a.standardized(), b.standardized());
    let mut predicted = [0.0; 4];
    for (i, p) in predicted.iter_mut().enumerate() {
        let half_n = (i + 3) as f64 / 2.0;
        *p = w_b.powf(half_n) * ka[i] + w_a.powf(half_n) * kb[i];
    }
    ContractionPrediction {
        w_a,
        w_b,
        predicted,
        observed: None,
        abs_error: None,
    }
}

impl ContractionPrediction {
    /// Attaches the measured cumulants of the product.
    pub fn with_observed(mut self, c: &CumulantSummary) -> Self {
        let obs = c.standardized();
        let mut err = [0.0; 4];
        for i in 0..4 {
            err[i] = (obs[i] - self.predicted[i]).abs();
        }
        self.observed = Some(obs);
        self.abs_error = Some(err);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(var: f64, k: [f64; 4]) -> CumulantSummary {
        CumulantSummary {
            mu: 0.0,
            var,
            skew: k[0],
            exkurt: k[1],
            std5: k[2],
            std6: k[3],
            eps: k.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            kl_gauss: 0.0,
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn equal_variances() {
        let eps = 0.1;
        let a = summary(2.0, [eps, 0.0, 0.0, 0.0]);
        let p = predict_product_cumulants(&a, &a);
        assert_eq!((p.w_a, p.w_b), (0.5, 0.5));
        assert!((p.predicted[0] - 2.0 * 0.5f64.powf(1.5) * eps).abs() < 1e-15);
        assert!((p.predicted[0] - 0.7071 * eps).abs() < 1e-5);
    }

    #[test]
    fn vague_gaussian_changes_nothing() {
        let a = summary(1.0, [0.3, -0.2, 0.1, 0.05]);
        let b = summary(1e12, [0.0; 4]);
        let p = predict_product_cumulants(&a, &b);
        for i in 0..4 {
            assert!((p.predicted[i] - a.standardized()[i]).abs() < 1e-9);
        }
        assert!((p.w_a + p.w_b - 1.0).abs() < 1e-15);
    }
}
