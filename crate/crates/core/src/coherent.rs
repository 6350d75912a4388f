//! Sections through the phase-space quotient, coherent-state families on the
//! upper hyperboloid and the upper cone, admissibility constants and the
//! resolution-of-identity check.
//!
//! Hyperboloid, principal section:
//!
//! ```text
//! η_{σ(q,p)}(k) = e^{i k·Λ_q p} e^{−inθ} η((k Λ_q⁻¹)₀),    (k Λ_q⁻¹)₀ = k·q / m
//! ```
//!
//! Cone, generalized principal section with exponent `μ`, in the projection
//! coordinates `k = τ(1, cos φ, sin φ)`, `q = λ(1, cos θ, sin θ)`:
//!
//! ```text
//! η_{σ(q,p)}(k) = e^{i⟨k; p̂⟩} e^{−itρ} η(λ^{2μ} τ),    p̂ = λ^μ R_{μθ} (p₁, p₂)
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{
    boost_to_hyperboloid_point, cone_projection_params, metric, minkowski_dot, ConeDilation,
    GroupElement, LorentzMatrix, RowVec3, Vec3,
};
use crate::measures::{
    angular_nodes, monte_carlo, radial_rule, DecayClass, Grid, Manifold, MonteCarloSpec,
    OrbitFunction, QuadratureSpec,
};
use crate::quad1d;
use crate::uir::{cocycle_h0_cone, cocycle_h0_hyp, ConeRep, HypRep};

/// Relative change allowed when the node count is doubled before an
/// admissibility value is reported as divergent.
pub const DOUBLING_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "mu", rename_all = "kebab-case")]
pub enum Section {
    Galilean,
    Principal,
    GeneralizedPrincipal(i64),
}

impl Section {
    pub fn generalized(mu: i64) -> Result<Self> {
        if mu == 0 {
            return Err(Error::InvalidInput(
                "generalized principal section needs μ ≠ 0".into(),
            ));
        }
        Ok(Section::GeneralizedPrincipal(mu))
    }
}

/// `Λ_q`: the symmetric boost on the hyperboloid, the `k·a` factor
/// `exp(J2, ln λ) exp(J0, −θ)` on the cone.
pub fn lambda_q(man: &Manifold, q: &RowVec3) -> Result<LorentzMatrix> {
    match man {
        Manifold::HyperboloidUpper { mass } => boost_to_hyperboloid_point(q, *mass),
        Manifold::ConeUpper => Ok(ConeDilation::of_point(q)?.lorentz()),
    }
}

/// The group element `(Λ, v)` a section assigns to `(q, p)`, with `p = (0, p₁, p₂)`.
///
/// Galilean: `(Λ_q, p)`. Principal: `(Λ_q, Λ_q p)`. Generalized principal
/// (cone only): `(Λ_q^{−2μ}, Λ_q^{μ} p)`, with powers taken in the `(θ, λ)`
/// parameterization.
pub fn section_element(
    sec: Section,
    q: &RowVec3,
    p: [f64; 2],
    man: &Manifold,
) -> Result<GroupElement> {
    let pv = Vec3::new(0.0, p[0], p[1]);
    match sec {
        Section::Galilean => Ok(GroupElement::new(lambda_q(man, q)?, pv)),
        Section::Principal => {
            let l = lambda_q(man, q)?;
            Ok(GroupElement::new(l, l.apply(&pv)))
        }
        Section::GeneralizedPrincipal(mu) => {
            if !matches!(man, Manifold::ConeUpper) {
                return Err(Error::InvalidInput(
                    "the generalized principal section lives on the cone".into(),
                ));
            }
            if mu == 0 {
                return Err(Error::InvalidInput("μ must be nonzero".into()));
            }
            let d = ConeDilation::of_point(q)?;
            let ph = d.pow(mu as f64).act(p);
            Ok(GroupElement::new(
                d.pow(-2.0 * mu as f64).lorentz(),
                Vec3::new(0.0, ph[0], ph[1]),
            ))
        }
    }
}

/// Radial profiles `u ↦ η(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum Profile {
    /// `e^{−u}`.
    Exp,
    /// `u e^{−u}`.
    #[serde(rename = "u-exp")]
    LinearExp,
    /// `1`; never admissible.
    Constant,
    /// `(u − a)(b − u)` on `[a, b]`, zero elsewhere.
    Bump { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub profile: Profile,
    pub amplitude: f64,
}

impl Envelope {
    pub fn new(profile: Profile) -> Self {
        Self {
            profile,
            amplitude: 1.0,
        }
    }

    pub fn exp() -> Self {
        Self::new(Profile::Exp)
    }

    pub fn linear_exp() -> Self {
        Self::new(Profile::LinearExp)
    }

    pub fn constant() -> Self {
        Self::new(Profile::Constant)
    }

    pub fn bump(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bump support [{a}, {b}] is empty"
            )));
        }
        Ok(Self::new(Profile::Bump { a, b }))
    }

    /// Default fiducial envelope for a manifold.
    pub fn default_for(man: &Manifold) -> Self {
        match man {
            Manifold::HyperboloidUpper { .. } => Self::exp(),
            Manifold::ConeUpper => Self::linear_exp(),
        }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn id(&self) -> String {
        match self.profile {
            Profile::Exp => "exp".into(),
            Profile::LinearExp => "u-exp".into(),
            Profile::Constant => "constant".into(),
            Profile::Bump { a, b } => format!("bump:{a}:{b}"),
        }
    }

    pub fn decay(&self) -> Option<DecayClass> {
        match self.profile {
            Profile::Exp | Profile::LinearExp => Some(DecayClass::Exponential),
            Profile::Constant => None,
            Profile::Bump { .. } => Some(DecayClass::Compact),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.amplitude
            * match self.profile {
                Profile::Exp => (-u).exp(),
                Profile::LinearExp => u * (-u).exp(),
                Profile::Constant => 1.0,
                Profile::Bump { a, b } => {
                    if u > a && u < b {
                        (u - a) * (b - u)
                    } else {
                        0.0
                    }
                }
            }
    }

    /// `∫_lo^∞ |η(u)|² w(u) du` by 1D adaptive quadrature.
    fn weighted_square(&self, lo: f64, w: impl Fn(f64) -> f64) -> Result<f64> {
        let g = |u: f64| self.eval(u).powi(2) * w(u);
        match self.profile {
            Profile::Bump { a, b } => {
                if b <= lo {
                    return Ok(0.0);
                }
                quad1d::integrate(g, a.max(lo), b, 1e-10)
            }
            _ if self.amplitude == 0.0 => Ok(0.0),
            _ => quad1d::integrate_semi_infinite(g, lo, 1e-10),
        }
    }
}

impl fmt::Display for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amplitude == 1.0 {
            f.write_str(&self.id())
        } else {
            write!(f, "{}*{}", self.amplitude, self.id())
        }
    }
}

impl FromStr for Envelope {
    type Err = Error;

    /// `exp`, `u-exp`, `constant`, `bump` (support `[2, 3]`) or `bump:a:b`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["exp"] => Ok(Self::exp()),
            ["u-exp"] => Ok(Self::linear_exp()),
            ["constant"] => Ok(Self::constant()),
            ["bump"] => Self::bump(2.0, 3.0),
            ["bump", a, b] => {
                let parse = |x: &str| {
                    x.parse::<f64>()
                        .map_err(|_| Error::InvalidInput(format!("bad bump bound {x:?}")))
                };
                Self::bump(parse(a)?, parse(b)?)
            }
            _ => Err(Error::InvalidInput(format!("unknown envelope {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Hyperboloid {
        m: f64,
        n: i64,
        /// `Λ_q` and its inverse.
        lq: LorentzMatrix,
        lq_inv: LorentzMatrix,
        p_hat: Vec3,
    },
    Cone {
        mu: i64,
        t: f64,
        /// `λ^{2μ}`.
        dilation: f64,
        p_hat: [f64; 2],
        /// Inverse of the Lorentz part of the section element.
        s_inv: LorentzMatrix,
    },
}

/// One coherent state `η_{σ(q,p)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentState {
    pub section: Section,
    pub q: RowVec3,
    pub p: [f64; 2],
    pub envelope: Envelope,
    family: Family,
}

impl CoherentState {
    /// Time component of the envelope argument at `k`.
    pub fn envelope_argument(&self, k: &RowVec3) -> Result<f64> {
        match &self.family {
            Family::Hyperboloid { lq_inv, .. } => Ok(lq_inv.apply_row(k)[0]),
            Family::Cone { dilation, .. } => Ok(dilation * cone_projection_params(k)?.1),
        }
    }

    pub fn eval(&self, k: &RowVec3) -> Result<Complex64> {
        let env = self.envelope.eval(self.envelope_argument(k)?);
        if env == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let phase = match &self.family {
            Family::Hyperboloid {
                m, n, lq, p_hat, ..
            } => {
                let mut ph = minkowski_dot(k, p_hat);
                if *n != 0 {
                    ph -= *n as f64 * cocycle_h0_hyp(lq, k, *m)?;
                }
                ph
            }
            Family::Cone {
                t, p_hat, s_inv, ..
            } => {
                let mut ph = k[1] * p_hat[0] + k[2] * p_hat[1];
                if *t != 0.0 {
                    ph -= t * cocycle_h0_cone(s_inv, k)?;
                }
                ph
            }
        };
        Ok(Complex64::from_polar(env, phase))
    }

    pub fn to_orbit_function(&self) -> OrbitFunction {
        let cs = *self;
        let decay = self.envelope.decay().unwrap_or(DecayClass::Exponential);
        OrbitFunction::new(decay, move |k| cs.eval(k))
    }
}

/// Hyperboloid coherent state for the principal or Galilean section.
pub fn cs_hyp(q: &RowVec3, p: [f64; 2], rep: HypRep, env: Envelope) -> Result<CoherentState> {
    cs_hyp_section(Section::Principal, q, p, rep, env)
}

/// Hyperboloid coherent state for an explicit section.
pub fn cs_hyp_section(
    section: Section,
    q: &RowVec3,
    p: [f64; 2],
    rep: HypRep,
    env: Envelope,
) -> Result<CoherentState> {
    let man = rep.manifold();
    let g = section_element(section, q, p, &man)?;
    Ok(CoherentState {
        section,
        q: *q,
        p,
        envelope: env,
        family: Family::Hyperboloid {
            m: rep.mass,
            n: rep.n,
            lq: g.lambda,
            lq_inv: g.lambda.inverse(),
            p_hat: g.v,
        },
    })
}

/// Cone coherent state for the generalized principal section with exponent `μ`.
pub fn cs_cone(
    q: &RowVec3,
    p: [f64; 2],
    rep: ConeRep,
    mu: i64,
    env: Envelope,
) -> Result<CoherentState> {
    let section = Section::generalized(mu)?;
    let g = section_element(section, q, p, &Manifold::ConeUpper)?;
    let (_, lambda) = cone_projection_params(q)?;
    Ok(CoherentState {
        section,
        q: *q,
        p,
        envelope: env,
        family: Family::Cone {
            mu,
            t: rep.t,
            dilation: lambda.powf(2.0 * mu as f64),
            p_hat: [g.v[1], g.v[2]],
            s_inv: g.lambda.inverse(),
        },
    })
}

/// `X(k) = k Λ_q⁻¹`.
pub fn x_map(k: &RowVec3, q: &RowVec3, m: f64) -> Result<RowVec3> {
    Ok(boost_to_hyperboloid_point(q, m)?.inverse().apply_row(k))
}

/// `|∂(X₁, X₂)/∂(k₁, k₂)| = q·k / (m k₀)`.
pub fn x_jacobian(k: &RowVec3, q: &RowVec3, m: f64) -> f64 {
    minkowski_dot(q, k) / (m * k[0])
}

fn two_pi_sq() -> f64 {
    4.0 * PI * PI
}

/// Quadrature value plus the doubled-rule value; fails when they differ by
/// more than [`DOUBLING_TOL`].
fn doubled_grid_sum<F>(man: &Manifold, spec: &QuadratureSpec, g: F) -> Result<f64>
where
    F: Fn(&RowVec3) -> Result<f64> + Sync,
{
    let a = Grid::new(man, spec)?
        .sum(|q| Ok(Complex64::new(g(q)?, 0.0)))?
        .re;
    let b = Grid::new(man, &spec.doubled())?
        .sum(|q| Ok(Complex64::new(g(q)?, 0.0)))?
        .re;
    if (a - b).abs() > DOUBLING_TOL * b.abs().max(1e-300) {
        return Err(Error::Divergence(format!(
            "admissibility integral unstable under node doubling: {a} -> {b}"
        )));
    }
    Ok(a)
}

/// `𝒜(k) = (2π)² ∫ |η((k Λ_q⁻¹)₀)|² · m/(q·k) dν(q)` over the hyperboloid.
pub fn admissibility_hyp(
    env: &Envelope,
    m: f64,
    k: &RowVec3,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let man = Manifold::hyperboloid(m)?;
    if man.residual(k) > 1e-10 {
        return Err(Error::OffManifold(format!(
            "k = {k:?} is off the hyperboloid"
        )));
    }
    let c = two_pi_sq();
    doubled_grid_sum(&man, spec, |q| {
        let arg = x_map(k, q, m)?[0];
        Ok(c * env.eval(arg).powi(2) * m / minkowski_dot(q, k))
    })
}

/// `(2π)³ ∫_m^∞ |η(u)|²/u du`.
pub fn admissibility_hyp_oracle(env: &Envelope, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InvalidInput(format!(
            "mass must be positive, got {m}"
        )));
    }
    Ok((2.0 * PI).powi(3) * env.weighted_square(m, |u| 1.0 / u)?)
}

/// `𝒜(k) = (2π)² ∫ |η(λ^{2μ} τ)|² λ^{−2μ} τ⁻¹ dλ dθ` over the cone.
pub fn admissibility_cone(
    env: &Envelope,
    mu: i64,
    k: &RowVec3,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if mu == 0 {
        return Err(Error::InvalidInput("μ must be nonzero".into()));
    }
    let man = Manifold::ConeUpper;
    if man.residual(k) > 1e-10 {
        return Err(Error::OffManifold(format!("k = {k:?} is off the cone")));
    }
    let tau = cone_projection_params(k)?.1;
    let c = two_pi_sq();
    let e = 2.0 * mu as f64;
    doubled_grid_sum(&man, spec, |q| {
        let lambda = cone_projection_params(q)?.1;
        let d = lambda.powf(e);
        Ok(c * env.eval(d * tau).powi(2) / (d * tau))
    })
}

/// `(2π)³ |α|⁻¹ τ^{1/α} ∫₀^∞ |η(u)|² u^{−2−1/α} du`, the substitution
/// `u = λ^{−α} τ` applied to the cone integral.
pub fn admissibility_cone_oracle(env: &Envelope, alpha: i64, tau: f64) -> Result<f64> {
    if alpha == 0 || !(tau > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need α ≠ 0 and τ > 0, got {alpha}, {tau}"
        )));
    }
    let a = alpha as f64;
    let i = env.weighted_square(0.0, |u| u.powf(-2.0 - 1.0 / a))?;
    Ok((2.0 * PI).powi(3) / a.abs() * tau.powf(1.0 / a) * i)
}

/// Least-squares fit of `y = c x^e` in log-log space: `(e, c, R²)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput(
            "power-law fit needs at least two points".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidInput(
            "power-law fit needs positive data".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("power-law fit needs distinct x".into()));
    }
    let e = sxy / sxx;
    let c = (my - e * mx).exp();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok((e, c, r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KValue {
    pub k: [f64; 3],
    #[serde(rename = "A")]
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub manifold: String,
    pub mu: Option<i64>,
    pub envelope_id: String,
    pub k_grid: Vec<KValue>,
    /// Oracle at the first grid point.
    pub oracle: f64,
    /// `(max A − min A) / min A` over the grid.
    pub spread: f64,
    /// Fitted exponent of `A ∝ k₀^e` (cone only).
    pub fitted_exponent: Option<f64>,
    pub r_squared: Option<f64>,
    /// Largest `|A(k)/oracle(k) − 1|` over the grid.
    pub oracle_rel_error: f64,
    /// Whether `A` is constant over the grid to within `constancy_tol`.
    pub constant_in_k: bool,
    pub constancy_tol: f64,
}

/// Deterministic hyperboloid points: the vertex, then rapidities up to
/// `max_rapidity` at spread-out angles.
pub fn hyperboloid_k_grid(m: f64, n: usize, max_rapidity: f64) -> Vec<RowVec3> {
    (0..n)
        .map(|j| {
            let chi = if n > 1 {
                max_rapidity * j as f64 / (n - 1) as f64
            } else {
                0.0
            };
            let phi = 2.399_963_229_728_653 * j as f64;
            RowVec3::new(
                m * chi.cosh(),
                m * chi.sinh() * phi.cos(),
                m * chi.sinh() * phi.sin(),
            )
        })
        .collect()
}

/// Deterministic cone points with `τ` log-spaced over `[lo, hi]`.
pub fn cone_k_grid(lo: f64, hi: f64, n: usize) -> Vec<RowVec3> {
    (0..n)
        .map(|j| {
            let s = if n > 1 {
                j as f64 / (n - 1) as f64
            } else {
                0.0
            };
            let tau = lo * (hi / lo).powf(s);
            let phi = 2.399_963_229_728_653 * j as f64;
            RowVec3::new(tau, tau * phi.cos(), tau * phi.sin())
        })
        .collect()
}

fn spread(vals: &[f64]) -> f64 {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / lo
}

pub fn admissibility_report_hyp(
    env: &Envelope,
    m: f64,
    ks: &[RowVec3],
    spec: &QuadratureSpec,
    constancy_tol: f64,
) -> Result<AdmissibilityReport> {
    let oracle = admissibility_hyp_oracle(env, m)?;
    let k_grid = ks
        .iter()
        .map(|k| {
            Ok(KValue {
                k: [k[0], k[1], k[2]],
                a: admissibility_hyp(env, m, k, spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let vals: Vec<f64> = k_grid.iter().map(|v| v.a).collect();
    let base = vals[0];
    let worst = vals
        .iter()
        .map(|a| (a / base - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(AdmissibilityReport {
        manifold: "hyperboloid".into(),
        mu: None,
        envelope_id: env.id(),
        oracle,
        spread: spread(&vals),
        fitted_exponent: None,
        r_squared: None,
        oracle_rel_error: vals
            .iter()
            .map(|a| (a / oracle - 1.0).abs())
            .fold(0.0, f64::max),
        constant_in_k: worst <= constancy_tol,
        constancy_tol,
        k_grid,
    })
}

pub fn admissibility_report_cone(
    env: &Envelope,
    mu: i64,
    ks: &[RowVec3],
    spec: &QuadratureSpec,
    constancy_tol: f64,
) -> Result<AdmissibilityReport> {
    let alpha = -2 * mu;
    let mut k_grid = Vec::with_capacity(ks.len());
    let mut worst_oracle: f64 = 0.0;
    for k in ks {
        let a = admissibility_cone(env, mu, k, spec)?;
        let o = admissibility_cone_oracle(env, alpha, k[0])?;
        worst_oracle = worst_oracle.max((a / o - 1.0).abs());
        k_grid.push(KValue {
            k: [k[0], k[1], k[2]],
            a,
        });
    }
    let vals: Vec<f64> = k_grid.iter().map(|v| v.a).collect();
    let taus: Vec<f64> = ks.iter().map(|k| k[0]).collect();
    let (fitted_exponent, r_squared) = if taus.iter().any(|t| (t - taus[0]).abs() > 1e-12) {
        let (e, _, r2) = fit_power_law(&taus, &vals)?;
        (Some(e), Some(r2))
    } else {
        (None, None)
    };
    let base = vals[0];
    let worst = vals
        .iter()
        .map(|a| (a / base - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(AdmissibilityReport {
        manifold: "cone".into(),
        mu: Some(mu),
        envelope_id: env.id(),
        oracle: admissibility_cone_oracle(env, alpha, ks[0][0])?,
        spread: spread(&vals),
        fitted_exponent,
        r_squared,
        oracle_rel_error: worst_oracle,
        constant_in_k: worst <= constancy_tol,
        constancy_tol,
        k_grid,
    })
}

/// Outcome of a resolution-of-identity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoiReport {
    /// Monte Carlo estimate of `∫ ⟨φ, η_σ⟩⟨η_σ, ψ⟩ dμ` with `η` normalized by `√𝒜`.
    pub estimate: [f64; 2],
    pub std_error: f64,
    /// `⟨φ, ψ⟩`.
    pub expected: [f64; 2],
    /// The admissibility constant used for normalization.
    pub admissibility: f64,
    /// `|I − ⟨φ,ψ⟩| / (‖φ‖ ‖ψ‖)`.
    pub rel_error: f64,
    /// `|I − ⟨φ,ψ⟩| / std_error`.
    pub z_score: f64,
    pub samples: u64,
}

impl RoiReport {
    pub fn passes(&self, rel_tol: f64, sigmas: f64) -> bool {
        self.rel_error <= rel_tol && self.z_score <= sigmas
    }
}

/// Resolution-of-identity check over the four-dimensional orbit.
///
/// `(q, p)` is sampled by [`monte_carlo`]; each inner product is a sum over
/// the `inner` grid, which should cover the support of `φ` and `ψ`. The
/// envelope is normalized by the oracle constant (taken at `τ = 1` on the
/// cone), so the resolution of identity reads `I ≈ ⟨φ, ψ⟩`.
pub fn roi_check(
    man: &Manifold,
    sec: Section,
    env: &Envelope,
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    inner: &QuadratureSpec,
    mc: &MonteCarloSpec,
) -> Result<RoiReport> {
    let admissibility = match (man, sec) {
        (Manifold::HyperboloidUpper { mass }, Section::Principal) => {
            admissibility_hyp_oracle(env, *mass)?
        }
        (Manifold::ConeUpper, Section::GeneralizedPrincipal(mu)) => {
            admissibility_cone_oracle(env, -2 * mu, 1.0)?
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "no admissibility constant for {sec:?} on {man}"
            )))
        }
    };
    let env_n = env.scaled(1.0 / admissibility.sqrt());
    let nodes = inner_nodes(man, inner)?;
    let phi_w: Vec<Complex64> = nodes
        .iter()
        .map(|(k, w)| Ok(phi.eval(k)?.conj() * *w))
        .collect::<Result<_>>()?;
    let psi_v: Vec<Complex64> = nodes
        .iter()
        .map(|(k, _)| psi.eval(k))
        .collect::<Result<_>>()?;
    let psi_w: Vec<Complex64> = psi_v.iter().zip(&nodes).map(|(v, (_, w))| v * *w).collect();
    let expected: Complex64 = crate::measures::pairwise_sum(
        &phi_w
            .iter()
            .zip(&psi_v)
            .map(|(a, b)| a * b)
            .collect::<Vec<_>>(),
    );
    let norm_phi = phi_w
        .iter()
        .zip(&nodes)
        .map(|(a, (_, w))| a.norm_sqr() / w)
        .sum::<f64>()
        .sqrt();
    let norm_psi = psi_v
        .iter()
        .zip(&nodes)
        .map(|(a, (_, w))| a.norm_sqr() * w)
        .sum::<f64>()
        .sqrt();

    let make = |q: &RowVec3, p: [f64; 2]| -> Result<CoherentState> {
        match (man, sec) {
            (Manifold::HyperboloidUpper { mass }, _) => cs_hyp(q, p, HypRep::new(*mass, 0)?, env_n),
            (_, Section::GeneralizedPrincipal(mu)) => cs_cone(q, p, ConeRep { t: 0.0 }, mu, env_n),
            _ => unreachable!(),
        }
    };
    let stats = monte_carlo(man, mc, |s| {
        let cs = make(&s.q, s.p)?;
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for (j, (k, _)) in nodes.iter().enumerate() {
            let e = cs.eval(k)?;
            a += phi_w[j] * e;
            b += e.conj() * psi_w[j];
        }
        Ok(a * b * s.weight)
    })?;
    let diff = (stats.mean - expected).norm();
    let se = stats.std_error();
    Ok(RoiReport {
        estimate: [stats.mean.re, stats.mean.im],
        std_error: se,
        expected: [expected.re, expected.im],
        admissibility,
        rel_error: diff / (norm_phi * norm_psi),
        z_score: if se > 0.0 { diff / se } else { f64::INFINITY },
        samples: stats.n,
    })
}

/// Flattened quadrature nodes `(k, w)` of a grid.
fn inner_nodes(man: &Manifold, spec: &QuadratureSpec) -> Result<Vec<(RowVec3, f64)>> {
    spec.validate()?;
    let radial = radial_rule(man, spec)?;
    let angles = angular_nodes(spec.angular_nodes);
    let wa = 2.0 * PI / spec.angular_nodes as f64;
    Ok(radial
        .iter()
        .flat_map(|&(u, wu)| {
            angles
                .iter()
                .map(move |&t| (man.polar_point(u, t), wu * wa))
        })
        .collect())
}

/// `ηΛη`: the matrix through which the row-convention representation
/// realizes the column-convention element `Λ`.
pub fn row_realization(l: &LorentzMatrix) -> LorentzMatrix {
    let eta = metric();
    LorentzMatrix::new(eta * l.matrix() * eta).expect("conjugation by η preserves the metric")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{cone_point, exp_generator, GeneratorId, Mat3};
    use crate::measures::inner_product;
    use crate::uir::apply_uir_hyp;
    use proptest::prelude::*;
    use statrs::function::gamma::gamma;

    const E1_OF_2: f64 = 0.048_900_510_708_061_12;

    fn hyp_point(m: f64, a: f64, b: f64) -> RowVec3 {
        RowVec3::new((m * m + a * a + b * b).sqrt(), a, b)
    }

    #[test]
    fn section_examples() {
        let h = Manifold::hyperboloid(1.0).unwrap();
        let v = RowVec3::new(1.0, 0.0, 0.0);
        let g = section_element(Section::Principal, &v, [0.3, -0.7], &h).unwrap();
        assert!((g.lambda.matrix() - Mat3::identity()).norm() < 1e-15);
        assert_eq!(g.v, Vec3::new(0.0, 0.3, -0.7));

        let c = Manifold::ConeUpper;
        let a = RowVec3::new(1.0, 1.0, 0.0);
        let g = section_element(Section::GeneralizedPrincipal(1), &a, [0.3, -0.7], &c).unwrap();
        assert!((g.lambda.matrix() - Mat3::identity()).norm() < 1e-15);
        assert!((g.v - Vec3::new(0.0, 0.3, -0.7)).norm() < 1e-15);

        let q = hyp_point(1.0, 0.4, -1.1);
        let g = section_element(Section::Galilean, &q, [1.0, 2.0], &h).unwrap();
        assert_eq!(g.v, Vec3::new(0.0, 1.0, 2.0));
        assert!((RowVec3::new(1.0, 0.0, 0.0) * g.lambda.matrix() - q).norm() < 1e-14);

        assert!(Section::generalized(0).is_err());
        assert!(section_element(Section::GeneralizedPrincipal(1), &q, [0.0, 0.0], &h).is_err());
    }

    #[test]
    fn envelope_parsing_and_ids() {
        for s in ["exp", "u-exp", "constant", "bump:2:3"] {
            assert_eq!(s.parse::<Envelope>().unwrap().id(), s);
        }
        assert_eq!(
            "bump".parse::<Envelope>().unwrap(),
            Envelope::bump(2.0, 3.0).unwrap()
        );
        assert!("gauss".parse::<Envelope>().is_err());
        assert!("bump:3:2".parse::<Envelope>().is_err());
        let j = serde_json::to_string(&Envelope::linear_exp()).unwrap();
        assert_eq!(j, r#"{"profile":{"id":"u-exp"},"amplitude":1.0}"#);
        let e: Envelope = serde_json::from_str(&j).unwrap();
        assert_eq!(e, Envelope::linear_exp());
    }

    #[test]
    fn hyperboloid_cs_examples() {
        let rep = HypRep::new(1.0, 0).unwrap();
        let v = RowVec3::new(1.0, 0.0, 0.0);
        let cs = cs_hyp(&v, [0.0, 0.0], rep, Envelope::exp()).unwrap();
        for k in [hyp_point(1.0, 0.3, 0.2), hyp_point(1.0, -2.0, 1.0)] {
            let z = cs.eval(&k).unwrap();
            assert!((z - Complex64::new((-k[0]).exp(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn hyperboloid_cs_is_the_represented_section() {
        let m = 1.3;
        let q = hyp_point(m, 0.8, -0.5);
        let p = [0.6, 1.4];
        let eta0 = OrbitFunction::total(DecayClass::Exponential, |k: &RowVec3| {
            Complex64::new((-k[0]).exp(), 0.0)
        });
        for n in [0, 2] {
            let rep = HypRep::new(m, n).unwrap();
            let cs = cs_hyp(&q, p, rep, Envelope::exp()).unwrap();
            let g = section_element(Section::Principal, &q, p, &rep.manifold()).unwrap();
            let realized = GroupElement::new(row_realization(&g.lambda), metric() * g.v);
            let u = apply_uir_hyp(&realized, rep, &eta0);
            for k in [
                hyp_point(m, 0.1, 0.2),
                hyp_point(m, -1.5, 0.7),
                hyp_point(m, 2.0, -2.0),
            ] {
                let (a, b) = (cs.eval(&k).unwrap(), u.eval(&k).unwrap());
                assert!((a - b).norm() < 1e-12, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn cone_cs_examples() {
        let a = RowVec3::new(1.0, 1.0, 0.0);
        let cs = cs_cone(
            &a,
            [0.0, 0.0],
            ConeRep { t: 0.0 },
            1,
            Envelope::linear_exp(),
        )
        .unwrap();
        let k = cone_point(0.7, 1.8);
        assert!((cs.eval(&k).unwrap().re - 1.8 * (-1.8f64).exp()).abs() < 1e-15);

        let q = cone_point(0.4, 2.0);
        let cs = cs_cone(
            &q,
            [0.3, 0.1],
            ConeRep { t: 0.0 },
            1,
            Envelope::linear_exp(),
        )
        .unwrap();
        let k = cone_point(-1.0, 1.0);
        assert!((cs.envelope_argument(&k).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn jacobian_examples() {
        let m = 1.0;
        let v = RowVec3::new(1.0, 0.0, 0.0);
        let k = hyp_point(m, 0.3, -0.9);
        assert!((x_map(&k, &v, m).unwrap() - k).norm() < 1e-15);
        assert!((x_jacobian(&k, &v, m) - 1.0).abs() < 1e-15);
        let q = hyp_point(2.0, 1.0, 0.5);
        assert!((x_jacobian(&q, &q, 2.0) - 2.0 / q[0]).abs() < 1e-15);
    }

    #[test]
    fn hyperboloid_oracle_examples() {
        let v = admissibility_hyp_oracle(&Envelope::exp(), 1.0).unwrap();
        assert!((v / ((2.0 * PI).powi(3) * E1_OF_2) - 1.0).abs() < 1e-10);
        assert!((v - 12.13).abs() < 0.01);
        assert!(matches!(
            admissibility_hyp_oracle(&Envelope::constant(), 1.0),
            Err(Error::Divergence(_))
        ));
        // ∫₂³ (u−2)²(3−u)²/u du = 36 ln(3/2) − 175/12 by polynomial division.
        let closed = 36.0 * 1.5f64.ln() - 175.0 / 12.0;
        let v = admissibility_hyp_oracle(&Envelope::bump(2.0, 3.0).unwrap(), 1.0).unwrap();
        assert!(
            (v / ((2.0 * PI).powi(3) * closed) - 1.0).abs() < 1e-9,
            "{v}"
        );
    }

    #[test]
    fn cone_oracle_examples() {
        let want = (2.0 * PI).powi(3) * 0.5 * gamma(1.5) / 2f64.powf(1.5);
        let v = admissibility_cone_oracle(&Envelope::linear_exp(), -2, 1.0).unwrap();
        assert!((v / want - 1.0).abs() < 1e-10);
        assert!((v - 38.86).abs() < 0.01);
        assert_eq!(
            admissibility_cone_oracle(&Envelope::linear_exp().scaled(0.0), -2, 1.0).unwrap(),
            0.0
        );
        assert!(admissibility_cone_oracle(&Envelope::exp(), -2, 1.0).is_err());
        assert!(admissibility_cone_oracle(&Envelope::constant(), -2, 1.0).is_err());
    }

    #[test]
    fn hyperboloid_admissibility_is_constant_and_matches_oracle() {
        let env = Envelope::exp();
        let spec = QuadratureSpec::new(64, 48);
        let oracle = admissibility_hyp_oracle(&env, 1.0).unwrap();
        for k in hyperboloid_k_grid(1.0, 4, 1.2) {
            let a = admissibility_hyp(&env, 1.0, &k, &spec).unwrap();
            assert!((a / oracle - 1.0).abs() < 1e-2, "{k:?}: {a} vs {oracle}");
        }
        let k = hyp_point(1.0, 0.5, 0.2);
        let a = admissibility_hyp(&env, 1.0, &k, &spec).unwrap();
        let b = admissibility_hyp(&env.scaled(3.0), 1.0, &k, &spec).unwrap();
        assert!((b / a - 9.0).abs() < 1e-10);
        assert!(admissibility_hyp(&Envelope::constant(), 1.0, &k, &spec).is_err());
    }

    #[test]
    fn cone_admissibility_tracks_the_tau_power_law() {
        let env = Envelope::linear_exp();
        let spec = QuadratureSpec::new(64, 16);
        for mu in [1, 2, -1] {
            for k in cone_k_grid(0.5, 2.0, 3) {
                let a = admissibility_cone(&env, mu, &k, &spec).unwrap();
                let o = admissibility_cone_oracle(&env, -2 * mu, k[0]).unwrap();
                assert!((a / o - 1.0).abs() < 1e-2, "μ={mu}, τ={}: {a} vs {o}", k[0]);
            }
        }
        let r = admissibility_report_cone(&env, 1, &cone_k_grid(0.5, 2.0, 5), &spec, 1e-2).unwrap();
        assert!((r.fitted_exponent.unwrap() + 0.5).abs() < 1e-3);
        assert!(r.r_squared.unwrap() > 0.999);
        assert!(!r.constant_in_k);
    }

    #[test]
    fn power_law_fit_recovers_exact_laws() {
        let xs = [0.5, 1.0, 1.7, 2.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.75)).collect();
        let (e, c, r2) = fit_power_law(&xs, &ys).unwrap();
        assert!((e + 0.75).abs() < 1e-12 && (c - 3.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        assert!(fit_power_law(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn report_serializes_with_expected_keys() {
        let spec = QuadratureSpec::new(32, 16);
        let r = admissibility_report_hyp(
            &Envelope::exp(),
            1.0,
            &hyperboloid_k_grid(1.0, 2, 0.5),
            &spec,
            1e-2,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in [
            "manifold",
            "mu",
            "envelope_id",
            "k_grid",
            "oracle",
            "spread",
            "fitted_exponent",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["k_grid"][0].get("A").is_some());
    }

    #[test]
    fn roi_diagonal_is_positive() {
        let man = Manifold::hyperboloid(1.0).unwrap();
        let phi = OrbitFunction::total(DecayClass::Gaussian, |k: &RowVec3| {
            Complex64::new((-(k[1] * k[1] + k[2] * k[2])).exp(), 0.0)
        });
        let inner = QuadratureSpec::new(12, 12).with_truncation(4.0);
        let mc = MonteCarloSpec::new(2000, 5);
        let r = roi_check(
            &man,
            Section::Principal,
            &Envelope::exp(),
            &phi,
            &phi,
            &inner,
            &mc,
        )
        .unwrap();
        assert!(r.estimate[0] > 0.0);
        assert!(r.expected[0] > 0.0);
        let direct = inner_product(&man, &phi, &phi, &inner).unwrap();
        assert!((direct.re - r.expected[0]).abs() < 1e-12);
        assert!(roi_check(
            &man,
            Section::Galilean,
            &Envelope::exp(),
            &phi,
            &phi,
            &inner,
            &mc
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn hyperboloid_envelope_argument(a in prop::array::uniform2(-3.0f64..3.0), b in prop::array::uniform2(-3.0f64..3.0), p in prop::array::uniform2(-5.0f64..5.0), n in -3i64..3) {
            let m = 1.0;
            let (k, q) = (hyp_point(m, a[0], a[1]), hyp_point(m, b[0], b[1]));
            let cs = cs_hyp(&q, p, HypRep::new(m, n).unwrap(), Envelope::exp()).unwrap();
            let arg = cs.envelope_argument(&k).unwrap();
            prop_assert!((arg - minkowski_dot(&k, &q) / m).abs() <= 1e-10 * arg.max(1.0));
            let z = cs.eval(&k).unwrap();
            prop_assert!((z.norm() - (-arg).exp()).abs() <= 1e-14);
        }

        #[test]
        fn jacobian_matches_finite_differences(a in prop::array::uniform2(-2.0f64..2.0), b in prop::array::uniform2(-2.0f64..2.0), m in 0.5f64..2.0) {
            let (k, q) = (hyp_point(m, a[0], a[1]), hyp_point(m, b[0], b[1]));
            let h = 1e-5;
            let x = |c1: f64, c2: f64| x_map(&hyp_point(m, c1, c2), &q, m).unwrap();
            let d1 = (x(a[0] + h, a[1]) - x(a[0] - h, a[1])) / (2.0 * h);
            let d2 = (x(a[0], a[1] + h) - x(a[0], a[1] - h)) / (2.0 * h);
            let det = d1[1] * d2[2] - d1[2] * d2[1];
            let j = x_jacobian(&k, &q, m);
            prop_assert!((det.abs() / j - 1.0).abs() <= 1e-6);
        }

        #[test]
        fn cone_cs_has_unit_phases(t in -3.0f64..3.0, l in 0.2f64..3.0, tk in -3.0f64..3.0, lk in 0.2f64..3.0, p in prop::array::uniform2(-4.0f64..4.0), mu in 1i64..3, tt in -1.0f64..1.0) {
            let (q, k) = (cone_point(t, l), cone_point(tk, lk));
            let env = Envelope::linear_exp();
            let arg = l.powi(2 * mu as i32) * lk;
            if let Ok(cs) = cs_cone(&q, p, ConeRep { t: tt }, mu, env) {
                if let Ok(z) = cs.eval(&k) {
                    prop_assert!((z.norm() - env.eval(arg)).abs() <= 1e-12 * env.eval(arg).max(1e-300));
                }
            }
        }

        #[test]
        fn dilation_powers_round_trip(t in -3.0f64..3.0, l in 0.1f64..5.0, a in -3i32..3) {
            let d = ConeDilation { theta: t, lambda: l };
            let r = d.pow(-(a as f64)).compose(&d.pow(a as f64));
            prop_assert!((r.lambda - 1.0).abs() <= 1e-12 && r.theta.abs() <= 1e-12);
            let anchor = RowVec3::new(1.0, 1.0, 0.0);
            let moved = d.pow(a as f64).lorentz().apply_row(&anchor);
            let want = cone_point(a as f64 * t, l.powi(a));
            prop_assert!((moved - want).norm() <= 1e-10 * want[0].max(1.0));
        }
    }

    #[test]
    fn boost_helpers_are_consistent() {
        let l = exp_generator(GeneratorId::J1, 0.4).unwrap();
        let r = row_realization(&l);
        assert!((r.matrix() - l.inverse().matrix()).norm() < 1e-14);
    }
}
