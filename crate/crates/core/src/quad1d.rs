//! One-dimensional adaptive quadrature (double-exponential rules) with a
//! divergence check, used for the reduced oracles.

use quadrature::double_exponential;

use crate::error::{Error, Result};

/// `∫_a^b f`, failing when the error estimate exceeds `rel_tol · max(1, |I|)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let out = double_exponential::integrate(&f, a, b, rel_tol * 1e-3);
    if !out.integral.is_finite() || out.error_estimate > rel_tol * out.integral.abs().max(1.0) {
        return Err(Error::NonConvergence(format!(
            "∫ over [{a}, {b}]: estimate {} with error {:e}",
            out.integral, out.error_estimate
        )));
    }
    Ok(out.integral)
}

/// `∫_a^∞ f` through `u = a + x²`, `x = t/(1 − t)`; the square removes
/// algebraic endpoint singularities of order `(u − a)^{−1/2}`.
///
/// Partial integrals over `[a + ε, a + X]` are compared for `(ε, X) =
/// (10⁻⁶, 10⁴)` and `(10⁻¹², 10⁸)`; a relative change above `1e-2` is
/// reported as divergence (tail or endpoint mass that does not settle).
pub fn integrate_semi_infinite(f: impl Fn(f64) -> f64, a: f64, rel_tol: f64) -> Result<f64> {
    let g = |t: f64| {
        let d = 1.0 - t;
        if d <= 0.0 || t <= 0.0 {
            return 0.0;
        }
        let x = t / d;
        2.0 * x * f(a + x * x) / (d * d)
    };
    let t_of = |du: f64| {
        let x = du.sqrt();
        x / (1.0 + x)
    };
    let partial = |eps: f64, x: f64| integrate(g, t_of(eps), t_of(x), rel_tol.max(1e-8));
    let p1 = partial(1e-6, 1e4);
    let p2 = partial(1e-12, 1e8);
    match (p1, p2) {
        (Ok(p1), Ok(p2)) => {
            if (p2 - p1).abs() > 1e-2 * p2.abs().max(1e-300) && (p2 - p1).abs() > 1e-300 {
                return Err(Error::Divergence(format!(
                    "partial integrals keep growing: {p1} -> {p2}"
                )));
            }
        }
        (Err(e), _) | (_, Err(e)) => {
            return Err(Error::Divergence(format!("partial integrals failed: {e}")));
        }
    }
    // Split at u = a + 1 so the endpoint and the tail each get their own rule.
    Ok(integrate(g, 0.0, 0.5, rel_tol)? + integrate(g, 0.5, 1.0, rel_tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_interval() {
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_integral_e1_of_two() {
        // E₁(2) = ∫₁^∞ e^{−2u}/u du.
        let v = integrate_semi_infinite(|u| (-2.0 * u).exp() / u, 1.0, 1e-12).unwrap();
        assert!((v - 0.048_900_510_708_061_12).abs() < 1e-13, "{v}");
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀^∞ u^{1/2} e^{−2u} du = Γ(3/2)/2^{3/2}.
        let want = 0.5 * std::f64::consts::PI.sqrt() / 2f64.powf(1.5);
        let v = integrate_semi_infinite(|u| u.sqrt() * (-2.0 * u).exp(), 0.0, 1e-12).unwrap();
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn divergent_tails_are_reported() {
        assert!(matches!(
            integrate_semi_infinite(|u| 1.0 / u, 1.0, 1e-10),
            Err(Error::Divergence(_))
        ));
        assert!(matches!(
            integrate_semi_infinite(|u| u.powf(-1.5) * (-u).exp(), 0.0, 1e-10),
            Err(Error::Divergence(_))
        ));
    }
}
