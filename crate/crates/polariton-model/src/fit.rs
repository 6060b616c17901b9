use crate::{ModelError, Result};

/// Closed-form (upper, lower) eigenvalues of one photon–vibration sector.
pub fn sector_eigenvalues(omega: f64, omega_0: f64, g: f64) -> (f64, f64) {
    let mid = 0.5 * (omega + omega_0);
    let r = ((0.5 * (omega - omega_0)).powi(2) + g * g).sqrt();
    (mid + r, mid - r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingFit {
    /// Coupling in cm⁻¹.
    pub g: f64,
    /// Sum of squared frequency residuals, cm⁻².
    pub residual: f64,
    pub iterations: usize,
}

const MAX_ITER: usize = 200;

/// Least-squares coupling from observed `[UP_A, UP_B, LP_A, LP_B]` in cm⁻¹.
pub fn fit_coupling(observed: [f64; 4], omega_a: f64, omega_b: f64, omega_0: f64) -> Result<CouplingFit> {
    let [up_a, up_b, lp_a, lp_b] = observed;
    if observed.iter().any(|x| !x.is_finite()) || up_a < lp_a || up_b < lp_b {
        return Err(ModelError::InvalidParam {
            key: "observed",
            reason: "need finite frequencies with UP_i >= LP_i".into(),
        });
    }
    let cost = |g: f64| {
        let (ua, la) = sector_eigenvalues(omega_a, omega_0, g);
        let (ub, lb) = sector_eigenvalues(omega_b, omega_0, g);
        (ua - up_a).powi(2) + (ub - up_b).powi(2) + (la - lp_a).powi(2) + (lb - lp_b).powi(2)
    };
    // the cost is smooth and unimodal in g >= 0 once g exceeds every splitting
    let hi = (up_a - lp_a).max(up_b - lp_b).max(1.0) + (omega_a - omega_0).abs() + (omega_b - omega_0).abs();
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0f64, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for it in 0..MAX_ITER {
        if b - a < 1e-12 * hi.max(1.0) {
            let mut g = 0.5 * (a + b);
            let mut best = cost(g);
            if cost(0.0) <= best {
                g = 0.0;
                best = cost(0.0);
            }
            return Ok(CouplingFit {
                g,
                residual: best,
                iterations: it,
            });
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = cost(d);
        }
    }
    Err(ModelError::FitFailed(MAX_ITER))
}
