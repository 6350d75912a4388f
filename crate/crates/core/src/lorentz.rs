//! Linear-algebra kernel for ℝ^{2,1}, SO₀(2,1) and G = ℝ^{2,1} ⋊ SO₀(2,1).
//!
//! Conventions used across the crate:
//!
//! * space vectors (translations `v`, algebra components) are columns ([`Vec3`])
//!   and are multiplied from the right: `Λ v`;
//! * dual vectors (momenta `k`, `q`, coadjoint components) are rows
//!   ([`RowVec3`]) and are multiplied from the left: `k Λ`;
//! * the metric is `η = diag(+1, −1, −1)`.
//!
//! Only the identity component is represented. Lower sheets and lower cones
//! are reached through the sign of the seed vector, never through time
//! reversal.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Matrix4, RowVector3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type RowVec3 = RowVector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Residual allowed on `Λ η Λᵗ = η` when validating an arbitrary matrix,
/// relative to `max(1, ‖Λ‖²)`.
pub const METRIC_TOL: f64 = 1e-10;

/// Tolerance for recognising the closed forms of the one-parameter subgroups.
pub const FORM_TOL: f64 = 1e-8;

/// Relative chart-singularity threshold for the cone boost.
pub const CONE_CHART_EPS: f64 = 1e-12;

pub fn metric() -> Mat3 {
    Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0))
}

/// The matrix `m̂ = diag(1, 1, −1)` entering the automorphism `Λ ↦ m̂ Λᵗ m̂`.
pub fn flip() -> Mat3 {
    Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0))
}

/// Anything that can be read as three components.
pub trait Components3 {
    fn comps(&self) -> [f64; 3];
}

impl Components3 for Vec3 {
    fn comps(&self) -> [f64; 3] {
        [self[0], self[1], self[2]]
    }
}

impl Components3 for RowVec3 {
    fn comps(&self) -> [f64; 3] {
        [self[0], self[1], self[2]]
    }
}

impl Components3 for [f64; 3] {
    fn comps(&self) -> [f64; 3] {
        *self
    }
}

/// `a₀b₀ − a₁b₁ − a₂b₂`.
pub fn minkowski_dot<A: Components3, B: Components3>(a: &A, b: &B) -> f64 {
    let (a, b) = (a.comps(), b.comps());
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

/// Plain dual pairing `k₀v₀ + k₁v₁ + k₂v₂`, no metric.
pub fn euclid_pair<A: Components3, B: Components3>(k: &A, v: &B) -> f64 {
    let (k, v) = (k.comps(), v.comps());
    k[0] * v[0] + k[1] * v[1] + k[2] * v[2]
}

/// `(k₀, −k₁, −k₂)`.
pub fn bar(k: &RowVec3) -> RowVec3 {
    RowVec3::new(k[0], -k[1], -k[2])
}

/// Normalize an angle to `(−π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// An element of SO₀(2,1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMatrix(Mat3);

impl LorentzMatrix {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Validates `Λ η Λᵗ = η`, `det Λ = 1` and `Λ₀₀ > 0`.
    pub fn new(m: Mat3) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotLorentz("non-finite entry".into()));
        }
        let scale = m.norm_squared().max(1.0);
        let g = metric();
        let res = (m * g * m.transpose() - g).norm();
        if res > METRIC_TOL * scale {
            return Err(Error::NotLorentz(format!("metric residual {res:e}")));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > METRIC_TOL * scale {
            return Err(Error::NotLorentz(format!("det = {det}")));
        }
        if m[(0, 0)] <= 0.0 {
            return Err(Error::NotLorentz("Λ₀₀ ≤ 0 (not orthochronous)".into()));
        }
        Ok(Self(m))
    }

    /// For closed forms that are Lorentz by construction.
    pub(crate) fn from_closed_form(m: Mat3) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// `Λ⁻¹ = η Λᵗ η`, exact for metric-preserving matrices.
    pub fn inverse(&self) -> Self {
        let g = metric();
        Self(g * self.0.transpose() * g)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// `Λ v` for a column vector.
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// `k Λ` for a row vector.
    pub fn apply_row(&self, k: &RowVec3) -> RowVec3 {
        k * self.0
    }

    /// Frobenius residual of `Λ η Λᵗ = η`.
    pub fn metric_residual(&self) -> f64 {
        let g = metric();
        (self.0 * g * self.0.transpose() - g).norm()
    }

    /// Frobenius residual of `Λᵗ η Λ = η`.
    pub fn metric_residual_transposed(&self) -> f64 {
        let g = metric();
        (self.0.transpose() * g * self.0 - g).norm()
    }
}

impl std::ops::Mul for LorentzMatrix {
    type Output = LorentzMatrix;
    fn mul(self, rhs: Self) -> Self {
        LorentzMatrix(self.0 * rhs.0)
    }
}

/// The eight named generators: three Lorentz generators, the two null
/// combinations `J± = J₀ ± J₁`, and three translations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneratorId {
    J0,
    J1,
    J2,
    Jplus,
    Jminus,
    P0,
    P1,
    P2,
}

impl GeneratorId {
    pub const ALL: [GeneratorId; 8] = [
        GeneratorId::J0,
        GeneratorId::J1,
        GeneratorId::J2,
        GeneratorId::Jplus,
        GeneratorId::Jminus,
        GeneratorId::P0,
        GeneratorId::P1,
        GeneratorId::P2,
    ];

    /// The six coordinate generators `{J0, J1, J2, P0, P1, P2}` in `(α, β)` order.
    pub const BASIS: [GeneratorId; 6] = [
        GeneratorId::J0,
        GeneratorId::J1,
        GeneratorId::J2,
        GeneratorId::P0,
        GeneratorId::P1,
        GeneratorId::P2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorId::J0 => "J0",
            GeneratorId::J1 => "J1",
            GeneratorId::J2 => "J2",
            GeneratorId::Jplus => "J+",
            GeneratorId::Jminus => "J-",
            GeneratorId::P0 => "P0",
            GeneratorId::P1 => "P1",
            GeneratorId::P2 => "P2",
        }
    }

    pub fn is_lorentz(self) -> bool {
        !matches!(self, GeneratorId::P0 | GeneratorId::P1 | GeneratorId::P2)
    }

    /// Coordinates in the six-dimensional `(α, β)` algebra basis.
    pub fn coords(self) -> [f64; 6] {
        match self {
            GeneratorId::J0 => [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            GeneratorId::J1 => [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            GeneratorId::J2 => [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            GeneratorId::Jplus => [1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            GeneratorId::Jminus => [1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
            GeneratorId::P0 => [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            GeneratorId::P1 => [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
            GeneratorId::P2 => [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        }
    }

    /// The 3×3 matrix of a Lorentz generator.
    pub fn matrix(self) -> Result<Mat3> {
        let j0 = Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        let j1 = Mat3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        let j2 = Mat3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        match self {
            GeneratorId::J0 => Ok(j0),
            GeneratorId::J1 => Ok(j1),
            GeneratorId::J2 => Ok(j2),
            GeneratorId::Jplus => Ok(j0 + j1),
            GeneratorId::Jminus => Ok(j0 - j1),
            other => Err(Error::TranslationGenerator(other.name())),
        }
    }

    /// The group element `exp(t E)` for any generator, Lorentz or translation.
    pub fn one_parameter(self, t: f64) -> GroupElement {
        match self {
            GeneratorId::P0 => GroupElement::translation(Vec3::new(t, 0.0, 0.0)),
            GeneratorId::P1 => GroupElement::translation(Vec3::new(0.0, t, 0.0)),
            GeneratorId::P2 => GroupElement::translation(Vec3::new(0.0, 0.0, t)),
            j => GroupElement::lorentz(exp_generator(j, t).expect("Lorentz generator")),
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Closed-form exponential of a Lorentz generator.
pub fn exp_generator(id: GeneratorId, t: f64) -> Result<LorentzMatrix> {
    let m = match id {
        GeneratorId::J0 => {
            let (s, c) = t.sin_cos();
            Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
        }
        GeneratorId::J1 => {
            let (sh, ch) = (t.sinh(), t.cosh());
            Mat3::new(ch, 0.0, sh, 0.0, 1.0, 0.0, sh, 0.0, ch)
        }
        GeneratorId::J2 => {
            let (sh, ch) = (t.sinh(), t.cosh());
            Mat3::new(ch, sh, 0.0, sh, ch, 0.0, 0.0, 0.0, 1.0)
        }
        GeneratorId::Jplus => {
            let h = 0.5 * t * t;
            Mat3::new(1.0 + h, h, t, -h, 1.0 - h, -t, t, t, 1.0)
        }
        GeneratorId::Jminus => {
            let h = 0.5 * t * t;
            Mat3::new(1.0 + h, -h, -t, h, 1.0 - h, -t, -t, t, 1.0)
        }
        other => return Err(Error::TranslationGenerator(other.name())),
    };
    Ok(LorentzMatrix(m))
}

/// `g = (Λ, v)`, acting on ℝ^{2,1} by `x ↦ Λx + v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub lambda: LorentzMatrix,
    pub v: Vec3,
}

impl GroupElement {
    pub fn new(lambda: LorentzMatrix, v: Vec3) -> Self {
        Self { lambda, v }
    }

    pub fn identity() -> Self {
        Self::new(LorentzMatrix::identity(), Vec3::zeros())
    }

    pub fn lorentz(lambda: LorentzMatrix) -> Self {
        Self::new(lambda, Vec3::zeros())
    }

    pub fn translation(v: Vec3) -> Self {
        Self::new(LorentzMatrix::identity(), v)
    }

    /// The 4×4 block form `[[Λ, v], [0, 1]]`.
    pub fn homogeneous(&self) -> Matrix4<f64> {
        let mut h = Matrix4::identity();
        h.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(self.lambda.matrix());
        h.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.v);
        h
    }
}

/// `(Λ₁Λ₂, Λ₁v₂ + v₁)`.
pub fn compose(g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    GroupElement {
        lambda: g1.lambda * g2.lambda,
        v: g1.lambda.apply(&g2.v) + g1.v,
    }
}

/// `(Λ⁻¹, −Λ⁻¹v)`.
pub fn inverse(g: &GroupElement) -> GroupElement {
    let li = g.lambda.inverse();
    GroupElement {
        lambda: li,
        v: -li.apply(&g.v),
    }
}

/// Which null-rotation subgroup plays the role of `n` in `k·a·n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NullRotation {
    Plus,
    #[default]
    Minus,
}

impl NullRotation {
    pub fn generator(self) -> GeneratorId {
        match self {
            NullRotation::Plus => GeneratorId::Jplus,
            NullRotation::Minus => GeneratorId::Jminus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IwasawaFactors {
    pub theta: f64,
    pub gamma: f64,
    pub rho: f64,
    pub null: NullRotation,
}

impl IwasawaFactors {
    /// `exp(J0, θ) · exp(J2, γ) · exp(J±, ρ)`.
    pub fn compose(&self) -> LorentzMatrix {
        let k = exp_generator(GeneratorId::J0, self.theta).unwrap();
        let a = exp_generator(GeneratorId::J2, self.gamma).unwrap();
        let n = exp_generator(self.null.generator(), self.rho).unwrap();
        k * a * n
    }
}

/// Decomposes `Λ = k a n` with `n` on the requested null rotation.
///
/// The null vector fixed by `n` (`(1, 1, 0)ᵗ` for `J−`, `(1, −1, 0)ᵗ` for `J+`)
/// is only rescaled by `a` and rotated by `k`, so `Λ` applied to it yields
/// `γ` from its time component and `θ` from its spatial direction.
pub fn iwasawa(lambda: &LorentzMatrix, null: NullRotation) -> Result<IwasawaFactors> {
    let m = lambda.matrix();
    let (theta, gamma) = match null {
        NullRotation::Minus => {
            let c = m * Vec3::new(1.0, 1.0, 0.0);
            if c[0] <= 0.0 {
                return Err(Error::NotLorentz("null image has c₀ ≤ 0".into()));
            }
            (normalize_angle(c[2].atan2(c[1])), c[0].ln())
        }
        NullRotation::Plus => {
            let c = m * Vec3::new(1.0, -1.0, 0.0);
            if c[0] <= 0.0 {
                return Err(Error::NotLorentz("null image has c₀ ≤ 0".into()));
            }
            (normalize_angle((-c[2]).atan2(-c[1])), -c[0].ln())
        }
    };
    let k_inv = exp_generator(GeneratorId::J0, -theta)?;
    let a_inv = exp_generator(GeneratorId::J2, -gamma)?;
    let n = a_inv * k_inv * *lambda;
    let rho = translation_param_unchecked(&n, null);
    let f = IwasawaFactors {
        theta,
        gamma,
        rho,
        null,
    };
    let res = (f.compose().matrix() - m).norm();
    if res > 1e-9 * m.norm().max(1.0) {
        return Err(Error::Iwasawa(res));
    }
    Ok(f)
}

/// Angle of a `J0` rotation, in `(−π, π]`.
pub fn rotation_angle(r: &LorentzMatrix) -> Result<f64> {
    rotation_angle_tol(r, FORM_TOL)
}

/// [`rotation_angle`] with an explicit residual tolerance, for matrices
/// obtained from ill-conditioned products.
pub fn rotation_angle_tol(r: &LorentzMatrix, tol: f64) -> Result<f64> {
    let m = r.matrix();
    let theta = normalize_angle(m[(2, 1)].atan2(m[(1, 1)]));
    let res = (exp_generator(GeneratorId::J0, theta)?.matrix() - m).norm();
    if res > tol {
        return Err(Error::NotRotation(res));
    }
    Ok(theta)
}

fn translation_param_unchecked(n: &LorentzMatrix, null: NullRotation) -> f64 {
    let m = n.matrix();
    // Average the four entries that are linear in the parameter.
    match null {
        NullRotation::Plus => 0.25 * (m[(0, 2)] - m[(1, 2)] + m[(2, 0)] + m[(2, 1)]),
        NullRotation::Minus => -0.25 * (m[(0, 2)] + m[(1, 2)] + m[(2, 0)] - m[(2, 1)]),
    }
}

/// Parameter of a null rotation `exp(J±, u)`.
pub fn translation_param(n: &LorentzMatrix, null: NullRotation) -> Result<f64> {
    translation_param_tol(n, null, FORM_TOL)
}

/// [`translation_param`] with an explicit tolerance (relative to `max(1, ‖N‖)`).
pub fn translation_param_tol(n: &LorentzMatrix, null: NullRotation, tol: f64) -> Result<f64> {
    let u = translation_param_unchecked(n, null);
    let res = (exp_generator(null.generator(), u)?.matrix() - n.matrix()).norm();
    if res > tol * n.matrix().norm().max(1.0) {
        return Err(Error::NotTranslation(res));
    }
    Ok(u)
}

fn check_hyperboloid_point(q: &RowVec3, m: f64) -> Result<()> {
    if !(m > 0.0) {
        return Err(Error::InvalidInput(format!(
            "mass must be positive, got {m}"
        )));
    }
    let res = minkowski_dot(q, q) - m * m;
    if res.abs() > 1e-8 * q[0].abs().powi(2).max(1.0) || !(q[0] > 0.0) {
        return Err(Error::OffManifold(format!(
            "q = {:?} is not on the upper hyperboloid of mass {m} (residual {res:e})",
            q.comps()
        )));
    }
    Ok(())
}

/// The symmetric pure boost `Λ_q` with `(m, 0, 0) Λ_q = q`.
pub fn boost_to_hyperboloid_point(q: &RowVec3, m: f64) -> Result<LorentzMatrix> {
    check_hyperboloid_point(q, m)?;
    let (q0, q1, q2) = (q[0], q[1], q[2]);
    let d = m + q0;
    let mm = Mat3::new(
        q0,
        q1,
        q2,
        q1,
        m + q1 * q1 / d,
        q1 * q2 / d,
        q2,
        q1 * q2 / d,
        m + q2 * q2 / d,
    ) / m;
    Ok(LorentzMatrix(mm))
}

fn check_cone_point(q: &RowVec3) -> Result<()> {
    let res = minkowski_dot(q, q);
    if !(q[0] > 0.0) || res.abs() > 1e-8 * q[0].powi(2).max(1.0) {
        return Err(Error::OffManifold(format!(
            "q = {:?} is not on the upper cone (residual {res:e})",
            q.comps()
        )));
    }
    Ok(())
}

/// The symmetric boost `Λ_q` with `(1, 1, 0) Λ_q = q` for `q` on the upper cone.
///
/// Singular on the ray `q₀ + q₁ = 0`.
pub fn boost_to_cone_point(q: &RowVec3) -> Result<LorentzMatrix> {
    check_cone_point(q)?;
    let (q0, q1, q2) = (q[0], q[1], q[2]);
    let s = q0 + q1;
    let threshold = CONE_CHART_EPS * q0;
    if s <= threshold {
        return Err(Error::ChartSingularity { sum: s, threshold });
    }
    let off = q0 * q1 - 1.0 - q0 + q1;
    let mm = Mat3::new(
        1.0 + q0 * q0 + q0 - q1,
        off,
        q2 * (1.0 + q0),
        off,
        1.0 + q1 * q1 + q0 - q1,
        -q2 * (1.0 - q1),
        q2 * (1.0 + q0),
        -q2 * (1.0 - q1),
        q0 + q1 + q2 * q2,
    ) / s;
    Ok(LorentzMatrix(mm))
}

/// `f(q)` with `Λ_q = exp(J+, f) · D(q)`, where `Λ_q` is [`boost_to_cone_point`]
/// and `D(q)` is [`ConeDilation::lorentz`]: `f = (1 + 1/λ) tan(θ/2)`.
///
/// Carries the whole singularity of the symmetric boost on the ray `θ = π`.
pub fn cone_section_shift(q: &RowVec3) -> Result<f64> {
    check_cone_point(q)?;
    let s = q[0] + q[1];
    let threshold = CONE_CHART_EPS * q[0];
    if s <= threshold {
        return Err(Error::ChartSingularity { sum: s, threshold });
    }
    Ok((1.0 + 1.0 / q[0]) * q[2] / s)
}

/// `q₀ / (q₀ + q₁)`: growth of the cone section near the ray `θ = π`.
///
/// Cocycle phases at `q` lose about this factor in relative accuracy.
pub fn cone_chart_condition(q: &RowVec3) -> f64 {
    q[0] / (q[0] + q[1]).max(f64::MIN_POSITIVE)
}

/// `(θ, λ)` with `λ = q₀` and `(q₁, q₂) = λ (cos θ, sin θ)`.
pub fn cone_projection_params(q: &RowVec3) -> Result<(f64, f64)> {
    if !(q[0] > 0.0) {
        return Err(Error::OffManifold(format!(
            "cone apex or lower cone excluded, q0 = {}",
            q[0]
        )));
    }
    Ok((normalize_angle(q[2].atan2(q[1])), q[0]))
}

/// Inverse of [`cone_projection_params`].
pub fn cone_point(theta: f64, lambda: f64) -> RowVec3 {
    let (s, c) = theta.sin_cos();
    RowVec3::new(lambda, lambda * c, lambda * s)
}

/// The rotation–dilation `λ R_θ` of the punctured plane, the abelian
/// parameterization of cone points used for the generalized sections.
///
/// Composition is `(θ, λ)(θ', λ') = (θ + θ', λλ')`, so real powers are exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeDilation {
    pub theta: f64,
    pub lambda: f64,
}

impl ConeDilation {
    pub fn identity() -> Self {
        Self {
            theta: 0.0,
            lambda: 1.0,
        }
    }

    pub fn of_point(q: &RowVec3) -> Result<Self> {
        let (theta, lambda) = cone_projection_params(q)?;
        Ok(Self { theta, lambda })
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            theta: self.theta + other.theta,
            lambda: self.lambda * other.lambda,
        }
    }

    pub fn pow(&self, a: f64) -> Self {
        Self {
            theta: a * self.theta,
            lambda: self.lambda.powf(a),
        }
    }

    /// `λ R_θ x` on a plane vector.
    pub fn act(&self, x: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [
            self.lambda * (c * x[0] - s * x[1]),
            self.lambda * (s * x[0] + c * x[1]),
        ]
    }

    /// The `k·a` Lorentz matrix `exp(J2, ln λ) exp(J0, −θ)`, which sends
    /// `(1, 1, 0)` to `λ (1, cos θ, sin θ)` under the row action.
    pub fn lorentz(&self) -> LorentzMatrix {
        let a = exp_generator(GeneratorId::J2, self.lambda.ln()).unwrap();
        let k = exp_generator(GeneratorId::J0, -self.theta).unwrap();
        a * k
    }
}
