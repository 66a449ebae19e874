use serde::{Deserialize, Serialize};

/// Steady state of a homogeneous chain with a prior on every variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorAnalysis {
    /// pairwise kernel variance
    pub sigma_e2: f64,
    /// prior variance
    pub sigma_p2: f64,
    /// steady-state belief variance
    pub sigma_ss2: f64,
    /// `sigma_ss2 / (sigma_ss2 + sigma_e2)`
    pub lambda_retention: f64,
    /// `sigma_p2 / sigma_e2`
    pub r: f64,
    /// `sigma_e / sigma_ss`
    pub z: f64,
    /// `((1 - λ)^1.5 + λ³ z³) / λ³`; above 1 the prior and pairwise terms
    /// outweigh the memory term for skewness.
    pub dominance: f64,
    /// `r <= R_crit`
    pub anchored: bool,
}

/// Positive root `s` of `s² + s σe² - σe² σp² = 0` and derived quantities.
pub fn solve_steady_state(sigma_e2: f64, sigma_p2: f64) -> AnchorAnalysis {
    assert!(sigma_e2 > 0.0 && sigma_p2 > 0.0, "variances must be positive");
    // 2c / (b + sqrt(b² + 4c)) avoids cancellation when σp² is small
    let c = sigma_e2 * sigma_p2;
    let s = 2.0 * c / (sigma_e2 + (sigma_e2 * sigma_e2 + 4.0 * c).sqrt());
    let lambda = s / (s + sigma_e2);
    let z = (sigma_e2 / s).sqrt();
    let dominance = ((1.0 - lambda).powf(1.5) + lambda.powi(3) * z.powi(3)) / lambda.powi(3);
    let r = sigma_p2 / sigma_e2;
    AnchorAnalysis {
        sigma_e2,
        sigma_p2,
        sigma_ss2: s,
        lambda_retention: lambda,
        r,
        z,
        dominance,
        anchored: r <= critical_threshold().r_crit,
    }
}

/// Both sides of `1 + (1 + u)^1.5 = u^-1.5`.
pub fn strong_prior_lhs_rhs(u: f64) -> (f64, f64) {
    (1.0 + (1.0 + u).powf(1.5), u.powf(-1.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalThreshold {
    /// critical `z²`
    pub u_star: f64,
    /// `(1/u)(1/u + 1)`
    pub r_crit: f64,
    /// `|LHS - RHS|` at `u_star`
    pub residual: f64,
}

/// Bisection for the critical noise ratio on `u ∈ (0.01, 10)`.
pub fn critical_threshold() -> CriticalThreshold {
    let f = |u: f64| {
        let (l, r) = strong_prior_lhs_rhs(u);
        l - r
    };
    let (mut lo, mut hi) = (0.01, 10.0);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    // f' is about 10 near the root, so the bracket has to be well under the
    // 1e-9 residual target
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    CriticalThreshold {
        u_star: u,
        r_crit: (1.0 / u) * (1.0 / u + 1.0),
        residual: f(u).abs(),
    }
}
