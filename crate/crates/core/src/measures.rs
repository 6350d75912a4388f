//! Charts, invariant measures and the quadrature engines for the upper
//! hyperboloid and the upper cone.
//!
//! Integration uses the chart `(u, θ)` with `u = k₀` the time component; in
//! this chart the invariant measure is `du dθ` on both manifolds.

use std::f64::consts::PI;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{minkowski_dot, LorentzMatrix, RowVec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Manifold {
    HyperboloidUpper { mass: f64 },
    ConeUpper,
}

impl Manifold {
    pub fn hyperboloid(mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "mass must be positive, got {mass}"
            )));
        }
        Ok(Manifold::HyperboloidUpper { mass })
    }

    /// Lower end of the time component: `m` or `0`.
    pub fn u_min(&self) -> f64 {
        match self {
            Manifold::HyperboloidUpper { mass } => *mass,
            Manifold::ConeUpper => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Manifold::HyperboloidUpper { .. } => "hyperboloid",
            Manifold::ConeUpper => "cone",
        }
    }

    /// The point with time component `u` and spatial direction `θ`.
    pub fn polar_point(&self, u: f64, theta: f64) -> RowVec3 {
        let r = match self {
            Manifold::HyperboloidUpper { mass } => ((u - mass) * (u + mass)).max(0.0).sqrt(),
            Manifold::ConeUpper => u,
        };
        let (s, c) = theta.sin_cos();
        RowVec3::new(u, r * c, r * s)
    }

    /// Residual of the manifold equation, relative to `max(1, k₀²)`.
    pub fn residual(&self, k: &RowVec3) -> f64 {
        let target = match self {
            Manifold::HyperboloidUpper { mass } => mass * mass,
            Manifold::ConeUpper => 0.0,
        };
        (minkowski_dot(k, k) - target).abs() / k[0].powi(2).max(1.0)
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::HyperboloidUpper { mass } => write!(f, "hyperboloid(m={mass})"),
            Manifold::ConeUpper => f.write_str("cone"),
        }
    }
}

/// Hyperboloid chart `(q₁, q₂)`; cone chart `(θ, λ)`.
pub fn chart_point(man: &Manifold, c1: f64, c2: f64) -> Result<RowVec3> {
    match man {
        Manifold::HyperboloidUpper { mass } => Ok(RowVec3::new(
            (mass * mass + c1 * c1 + c2 * c2).sqrt(),
            c1,
            c2,
        )),
        Manifold::ConeUpper => {
            if !(c2 > 0.0) {
                return Err(Error::OffManifold(format!(
                    "cone chart needs λ > 0, got {c2}"
                )));
            }
            let (s, c) = c1.sin_cos();
            Ok(RowVec3::new(c2, c2 * c, c2 * s))
        }
    }
}

/// Density of the invariant measure: `1/k₀` against `dq₁dq₂` on the
/// hyperboloid, `1` against `dλdθ` on the cone.
pub fn measure_density(man: &Manifold, k: &RowVec3) -> f64 {
    match man {
        Manifold::HyperboloidUpper { .. } => 1.0 / k[0],
        Manifold::ConeUpper => 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayClass {
    Gaussian,
    Exponential,
    Compact,
}

type Evaluator = dyn Fn(&RowVec3) -> Result<Complex64> + Send + Sync;

/// A complex function on a manifold, held as an evaluator.
#[derive(Clone)]
pub struct OrbitFunction {
    f: Arc<Evaluator>,
    pub decay: DecayClass,
}

impl OrbitFunction {
    pub fn new<F>(decay: DecayClass, f: F) -> Self
    where
        F: Fn(&RowVec3) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            decay,
        }
    }

    /// Wraps an infallible evaluator.
    pub fn total<F>(decay: DecayClass, f: F) -> Self
    where
        F: Fn(&RowVec3) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(decay, move |k| Ok(f(k)))
    }

    pub fn zero() -> Self {
        Self::total(DecayClass::Compact, |_| Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, k: &RowVec3) -> Result<Complex64> {
        (self.f)(k)
    }

    /// `k ↦ f(k Λ)`.
    pub fn compose_row(&self, l: LorentzMatrix) -> Self {
        let f = self.clone();
        Self::new(self.decay, move |k| f.eval(&l.apply_row(k)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let f = self.clone();
        Self::new(self.decay, move |k| Ok(c * f.eval(k)?))
    }
}

impl fmt::Debug for OrbitFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrbitFunction")
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// When set, the radial rule is plain Gauss–Legendre on
    /// `[u_min, u_min + truncation]` instead of the semi-infinite map.
    #[serde(default)]
    pub truncation: Option<f64>,
}

impl QuadratureSpec {
    pub const fn new(radial_nodes: usize, angular_nodes: usize) -> Self {
        Self {
            radial_nodes,
            angular_nodes,
            truncation: None,
        }
    }

    /// The 128 × 64 rule all tolerances are quoted at.
    pub const fn reference() -> Self {
        Self::new(128, 64)
    }

    pub fn with_truncation(mut self, r: f64) -> Self {
        self.truncation = Some(r);
        self
    }

    pub fn doubled(&self) -> Self {
        Self {
            radial_nodes: 2 * self.radial_nodes,
            angular_nodes: 2 * self.angular_nodes,
            truncation: self.truncation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 4 || self.angular_nodes < 4 {
            return Err(Error::InvalidInput(format!(
                "quadrature needs at least 4 nodes per direction, got {} x {}",
                self.radial_nodes, self.angular_nodes
            )));
        }
        if let Some(r) = self.truncation {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidInput(format!("bad truncation radius {r}")));
            }
        }
        Ok(())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::reference()
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, ascending.
pub fn gauss_legendre_unit(n: usize) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(n).ok_or_else(|| Error::InvalidInput("zero nodes".into()))?;
    let mut v: Vec<(f64, f64)> = GaussLegendre::new(n)
        .iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(v)
}

/// Radial nodes `u` and weights for `∫_{u_min}^∞ g(u) du`.
pub fn radial_rule(man: &Manifold, spec: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    let base = gauss_legendre_unit(spec.radial_nodes)?;
    let u0 = man.u_min();
    Ok(match spec.truncation {
        Some(r) => base.into_iter().map(|(s, w)| (u0 + r * s, r * w)).collect(),
        None => base
            .into_iter()
            .map(|(s, w)| {
                let d = 1.0 - s;
                (u0 + s / d, w / (d * d))
            })
            .collect(),
    })
}

/// Midpoint angles `2π(j + ½)/N`; the ray `θ = π` is never a node for even `N`.
pub fn angular_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| 2.0 * PI * (j as f64 + 0.5) / n as f64)
        .collect()
}

/// Pairwise (cascade) summation in index order.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    match xs.len() {
        0 => T::default(),
        1 => xs[0],
        n if n <= 8 => xs.iter().fold(T::default(), |a, b| a + *b),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Quadrature grid over a manifold: points with their weights, row-major in
/// (radial, angular) order.
#[derive(Debug, Clone)]
pub struct Grid {
    pub rows: Vec<Vec<(RowVec3, f64)>>,
}

impl Grid {
    pub fn new(man: &Manifold, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let radial = radial_rule(man, spec)?;
        let angles = angular_nodes(spec.angular_nodes);
        let wa = 2.0 * PI / spec.angular_nodes as f64;
        let rows = radial
            .iter()
            .map(|&(u, wu)| {
                angles
                    .iter()
                    .map(|&t| (man.polar_point(u, t), wu * wa))
                    .collect()
            })
            .collect();
        Ok(Self { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Σ w g(k)`; rows are evaluated in parallel, sums are pairwise in node
    /// order so the value does not depend on the worker count.
    pub fn sum<F>(&self, g: F) -> Result<Complex64>
    where
        F: Fn(&RowVec3) -> Result<Complex64> + Sync,
    {
        let rows: Vec<Complex64> = self
            .rows
            .par_iter()
            .map(|row| {
                let terms = row
                    .iter()
                    .map(|(k, w)| g(k).map(|v| v * *w))
                    .collect::<Result<Vec<_>>>()?;
                Ok(pairwise_sum(&terms))
            })
            .collect::<Result<Vec<_>>>()?;
        let s = pairwise_sum(&rows);
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(Error::NonConvergence("non-finite quadrature sum".into()));
        }
        Ok(s)
    }

    /// Serial variant of [`Grid::sum`], for use inside already-parallel code.
    pub fn sum_serial<F>(&self, g: F) -> Result<Complex64>
    where
        F: Fn(&RowVec3) -> Result<Complex64>,
    {
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut terms = Vec::new();
        for row in &self.rows {
            terms.clear();
            for (k, w) in row {
                terms.push(g(k)? * *w);
            }
            rows.push(pairwise_sum(&terms));
        }
        Ok(pairwise_sum(&rows))
    }
}

/// `∫ f dν`.
pub fn integrate(man: &Manifold, f: &OrbitFunction, spec: &QuadratureSpec) -> Result<Complex64> {
    Grid::new(man, spec)?.sum(|k| f.eval(k))
}

/// Like [`integrate`], but also evaluates the doubled rule and fails when the
/// two disagree by more than `rel_tol` (relative to `max(|I|, abs_floor)`).
pub fn integrate_checked(
    man: &Manifold,
    f: &OrbitFunction,
    spec: &QuadratureSpec,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<Complex64> {
    let a = integrate(man, f, spec)?;
    let b = integrate(man, f, &spec.doubled())?;
    let diff = (a - b).norm();
    if diff > rel_tol * b.norm().max(abs_floor) {
        return Err(Error::NonConvergence(format!(
            "doubling nodes changed the integral by {diff:e}"
        )));
    }
    Ok(b)
}

/// `⟨φ, ψ⟩ = ∫ φ̄ ψ dν`.
pub fn inner_product(
    man: &Manifold,
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    Grid::new(man, spec)?.sum(|k| Ok(phi.eval(k)?.conj() * psi.eval(k)?))
}

pub fn norm(man: &Manifold, phi: &OrbitFunction, spec: &QuadratureSpec) -> Result<f64> {
    Ok(inner_product(man, phi, phi, spec)?.re.max(0.0).sqrt())
}

/// `|∫ f(k Λ⁻¹) dν − ∫ f dν| / |∫ f dν|`.
pub fn check_measure_invariance(
    man: &Manifold,
    l: &LorentzMatrix,
    f: &OrbitFunction,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let base = integrate(man, f, spec)?;
    let moved = integrate(man, &f.compose_row(l.inverse()), spec)?;
    if base.norm() == 0.0 {
        return Ok(moved.norm());
    }
    Ok((moved - base).norm() / base.norm())
}

/// Monte Carlo settings for phase-space integrals.
///
/// `q` is drawn with time component `u_min + Exp(q_rate)` and uniform angle;
/// each component of `p` is drawn from `N(0, p_sigma²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSpec {
    pub samples: u64,
    pub seed: u64,
    pub q_rate: f64,
    pub p_sigma: f64,
    pub chunk: u64,
}

impl MonteCarloSpec {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            q_rate: 1.0,
            p_sigma: 1.0,
            chunk: 4096,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.chunk == 0 {
            return Err(Error::InvalidInput("Monte Carlo needs samples ≥ 1".into()));
        }
        if !(self.q_rate > 0.0 && self.p_sigma > 0.0) {
            return Err(Error::InvalidInput(
                "q_rate and p_sigma must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A phase-space point drawn by the Monte Carlo sampler, with its inverse density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub q: RowVec3,
    pub p: [f64; 2],
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceEstimate {
    pub re: f64,
    pub im: f64,
    /// Standard error of the complex estimate (`√(var re + var im) / √N`); zero for product rules.
    pub std_error: f64,
    pub samples: u64,
}

impl PhaseSpaceEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Running `(n, mean, Σ|x − mean|²)`, merged with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexStats {
    pub n: u64,
    pub mean: Complex64,
    pub m2: f64,
}

impl ComplexStats {
    pub fn push(&mut self, x: Complex64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        let d2 = x - self.mean;
        self.m2 += d.re * d2.re + d.im * d2.im;
    }

    pub fn merge(&self, o: &Self) -> Self {
        if self.n == 0 {
            return *o;
        }
        if o.n == 0 {
            return *self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        let f = self.n as f64 * o.n as f64 / n as f64;
        Self {
            n,
            mean: self.mean + d * (o.n as f64 / n as f64),
            m2: self.m2 + o.m2 + d.norm_sqr() * f,
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

/// Draws the samples of chunk `c` (deterministic in `(seed, c)`).
pub fn phase_samples(man: &Manifold, mc: &MonteCarloSpec, c: u64) -> Vec<PhaseSample> {
    let start = c * mc.chunk;
    let end = (start + mc.chunk).min(mc.samples);
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    rng.set_stream(c);
    let exp = Exp::new(mc.q_rate).expect("positive rate");
    let ang = Uniform::new(0.0, 2.0 * PI);
    let normal = Normal::new(0.0, mc.p_sigma).expect("positive sigma");
    let u0 = man.u_min();
    let two_pi = 2.0 * PI;
    let s2 = mc.p_sigma * mc.p_sigma;
    (start..end)
        .map(|_| {
            let du: f64 = exp.sample(&mut rng);
            let theta = ang.sample(&mut rng);
            let p = [normal.sample(&mut rng), normal.sample(&mut rng)];
            let pdf_q = mc.q_rate * (-mc.q_rate * du).exp() / two_pi;
            let pdf_p = (-(p[0] * p[0] + p[1] * p[1]) / (2.0 * s2)).exp() / (two_pi * s2);
            PhaseSample {
                q: man.polar_point(u0 + du, theta),
                p,
                weight: 1.0 / (pdf_q * pdf_p),
            }
        })
        .collect()
}

/// How [`phase_space_integrate`] discretizes the four-dimensional orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PhaseSpaceRule {
    /// Orbit rule in `q` times Gauss–Legendre on `[−L, L]²` in `p`.
    Product {
        orbit: QuadratureSpec,
        p_nodes: usize,
        p_half_width: f64,
    },
    MonteCarlo(MonteCarloSpec),
}

/// `∫ F(q, p) dμ` with `dμ = dp₁dp₂ dν(q)`.
pub fn phase_space_integrate<F>(
    man: &Manifold,
    f: F,
    rule: &PhaseSpaceRule,
) -> Result<PhaseSpaceEstimate>
where
    F: Fn(&RowVec3, [f64; 2]) -> Result<Complex64> + Sync,
{
    match rule {
        PhaseSpaceRule::Product {
            orbit,
            p_nodes,
            p_half_width,
        } => {
            let grid = Grid::new(man, orbit)?;
            let l = *p_half_width;
            let pr: Vec<(f64, f64)> = gauss_legendre_unit(*p_nodes)?
                .into_iter()
                .map(|(s, w)| (l * (2.0 * s - 1.0), 2.0 * l * w))
                .collect();
            let v = grid.sum(|q| {
                let mut terms = Vec::with_capacity(pr.len() * pr.len());
                for &(a, wa) in &pr {
                    for &(b, wb) in &pr {
                        terms.push(f(q, [a, b])? * (wa * wb));
                    }
                }
                Ok(pairwise_sum(&terms))
            })?;
            Ok(PhaseSpaceEstimate {
                re: v.re,
                im: v.im,
                std_error: 0.0,
                samples: (grid.len() * pr.len() * pr.len()) as u64,
            })
        }
        PhaseSpaceRule::MonteCarlo(mc) => {
            let stats = monte_carlo(man, mc, |s| Ok(f(&s.q, s.p)? * s.weight))?;
            Ok(PhaseSpaceEstimate {
                re: stats.mean.re,
                im: stats.mean.im,
                std_error: stats.std_error(),
                samples: stats.n,
            })
        }
    }
}

/// Accumulates `g` over the Monte Carlo samples; chunks run in parallel and
/// are merged in chunk order.
pub fn monte_carlo<G>(man: &Manifold, mc: &MonteCarloSpec, g: G) -> Result<ComplexStats>
where
    G: Fn(&PhaseSample) -> Result<Complex64> + Sync,
{
    mc.validate()?;
    let chunks = mc.samples.div_ceil(mc.chunk);
    let parts: Vec<ComplexStats> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = ComplexStats::default();
            for sample in phase_samples(man, mc, c) {
                s.push(g(&sample)?);
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts
        .iter()
        .fold(ComplexStats::default(), |a, b| a.merge(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{exp_generator, GeneratorId};
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn chart_examples() {
        let h = Manifold::hyperboloid(1.3).unwrap();
        assert_eq!(
            chart_point(&h, 0.0, 0.0).unwrap(),
            RowVec3::new(1.3, 0.0, 0.0)
        );
        assert_eq!(
            chart_point(&Manifold::ConeUpper, 0.0, 1.0).unwrap(),
            RowVec3::new(1.0, 1.0, 0.0)
        );
        assert!(chart_point(&Manifold::ConeUpper, 0.3, 0.0).is_err());
    }

    #[test]
    fn density_examples() {
        let m = 1.5;
        let h = Manifold::hyperboloid(m).unwrap();
        assert_eq!(measure_density(&h, &RowVec3::new(m, 0.0, 0.0)), 1.0 / m);
        let k = chart_point(&h, (3.0f64).sqrt() * m, 0.0).unwrap();
        assert!((measure_density(&h, &k) - 1.0 / (2.0 * m)).abs() < 1e-15);
        let k = chart_point(&Manifold::ConeUpper, 0.4, 3.0).unwrap();
        assert_eq!(measure_density(&Manifold::ConeUpper, &k), 1.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre_unit(6).unwrap();
        let s: f64 = rule.iter().map(|(x, w)| w * x.powi(11)).sum();
        assert!((s - 1.0 / 12.0).abs() < 1e-15);
        assert!(rule.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn integrate_examples() {
        let spec = QuadratureSpec::reference();
        let h = Manifold::hyperboloid(1.0).unwrap();
        let f = OrbitFunction::total(DecayClass::Exponential, |k| c((-(k[0] - 1.0)).exp()));
        let v = integrate(&h, &f, &spec).unwrap();
        assert!((v.re / (2.0 * PI) - 1.0).abs() < 1e-10, "{v}");

        let f = OrbitFunction::total(DecayClass::Exponential, |k| c(k[0] * (-k[0]).exp()));
        let v = integrate(&Manifold::ConeUpper, &f, &spec).unwrap();
        assert!((v.re / (2.0 * PI) - 1.0).abs() < 1e-10, "{v}");

        assert_eq!(
            integrate(&h, &OrbitFunction::zero(), &spec).unwrap(),
            c(0.0)
        );
    }

    #[test]
    fn doubling_check_flags_unresolved_integrands() {
        let h = Manifold::hyperboloid(1.0).unwrap();
        let f = OrbitFunction::total(DecayClass::Gaussian, |k| c((-(k[0] - 1.0).powi(2)).exp()));
        assert!(integrate_checked(&h, &f, &QuadratureSpec::reference(), 1e-10, 1e-300).is_ok());
        let wiggly = OrbitFunction::total(DecayClass::Exponential, |k| {
            c((40.0 * k[0]).sin() * (-k[0]).exp())
        });
        assert!(matches!(
            integrate_checked(&h, &wiggly, &QuadratureSpec::new(8, 8), 1e-6, 1e-300),
            Err(Error::NonConvergence(_))
        ));
    }

    #[test]
    fn invariance_examples() {
        let spec = QuadratureSpec::reference();
        let h = Manifold::hyperboloid(1.0).unwrap();
        let f = OrbitFunction::total(DecayClass::Gaussian, |k| {
            c((-(k[0] - 1.0).powi(2) - 0.3 * k[1]).exp())
        });
        let r = check_measure_invariance(&h, &LorentzMatrix::identity(), &f, &spec).unwrap();
        assert_eq!(r, 0.0);
        let r =
            check_measure_invariance(&h, &exp_generator(GeneratorId::J0, 0.9).unwrap(), &f, &spec)
                .unwrap();
        assert!(r < 1e-12, "{r}");
        let r =
            check_measure_invariance(&h, &exp_generator(GeneratorId::J2, 1.0).unwrap(), &f, &spec)
                .unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn phase_space_examples() {
        let h = Manifold::hyperboloid(1.0).unwrap();
        let orbit = QuadratureSpec::new(64, 32);
        let rule = PhaseSpaceRule::Product {
            orbit,
            p_nodes: 48,
            p_half_width: 7.0,
        };
        let fq = |q: &RowVec3| (-(q[0] - 1.0).powi(2)).exp();
        let v = phase_space_integrate(
            &h,
            |q, p| Ok(c(fq(q) * (-(p[0] * p[0] + p[1] * p[1])).exp())),
            &rule,
        )
        .unwrap();
        let qpart = integrate(
            &h,
            &OrbitFunction::total(DecayClass::Gaussian, move |k| c(fq(k))),
            &orbit,
        )
        .unwrap()
        .re;
        assert!((v.re / (qpart * PI) - 1.0).abs() < 1e-10);

        let zero = phase_space_integrate(&h, |_, _| Ok(c(0.0)), &rule).unwrap();
        assert_eq!(zero.value(), c(0.0));

        // Box indicator in p: the product rule is exact on [−L, L]².
        let v = phase_space_integrate(&h, |q, _| Ok(c(fq(q))), &rule).unwrap();
        assert!((v.re / (qpart * 196.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_matches_product_rule_and_is_deterministic() {
        let h = Manifold::hyperboloid(1.0).unwrap();
        let f = |q: &RowVec3, p: [f64; 2]| {
            Ok(c((-(q[0] - 1.0) - 0.5 * (p[0] * p[0] + p[1] * p[1])).exp()))
        };
        let want = 2.0 * PI * 2.0 * PI;
        let mc = PhaseSpaceRule::MonteCarlo(MonteCarloSpec::new(200_000, 42));
        let a = phase_space_integrate(&h, f, &mc).unwrap();
        assert!((a.re - want).abs() < 4.0 * a.std_error + 1e-9, "{a:?}");
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| phase_space_integrate(&h, f, &mc).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn stats_merge_matches_single_pass() {
        let xs: Vec<Complex64> = (0..100)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut all = ComplexStats::default();
        xs.iter().for_each(|x| all.push(*x));
        let (mut a, mut b) = (ComplexStats::default(), ComplexStats::default());
        xs[..37].iter().for_each(|x| a.push(*x));
        xs[37..].iter().for_each(|x| b.push(*x));
        let m = a.merge(&b);
        assert!((m.mean - all.mean).norm() < 1e-14 && (m.m2 - all.m2).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn chart_points_lie_on_manifold(a in -5.0f64..5.0, b in -5.0f64..5.0, m in 0.1f64..3.0) {
            let h = Manifold::hyperboloid(m).unwrap();
            prop_assert!(h.residual(&chart_point(&h, a, b).unwrap()) <= 1e-12);
            let k = chart_point(&Manifold::ConeUpper, a, b.abs() + 1e-3).unwrap();
            prop_assert!(Manifold::ConeUpper.residual(&k) <= 1e-12);
        }

        #[test]
        fn rotation_invariant_reduction(a in 0.3f64..3.0, m in 0.5f64..2.0) {
            // ∫ f dν = 2π ∫ f(u) du for f depending on k₀ only.
            let h = Manifold::hyperboloid(m).unwrap();
            let f = OrbitFunction::total(DecayClass::Exponential, move |k| c((-a * (k[0] - m)).exp()));
            let v = integrate(&h, &f, &QuadratureSpec::reference()).unwrap();
            prop_assert!((v.re / (2.0 * PI / a) - 1.0).abs() <= 1e-8);
            let g = OrbitFunction::total(DecayClass::Gaussian, move |k| c(k[0] * (-a * k[0] * k[0]).exp()));
            let v = integrate(&Manifold::ConeUpper, &g, &QuadratureSpec::reference()).unwrap();
            prop_assert!((v.re / (PI / a) - 1.0).abs() <= 1e-8);
        }
    }
}
