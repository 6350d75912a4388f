//! The `(α, β)` algebra basis, adjoint and coadjoint actions, and invariants.

use nalgebra::{Matrix6, RowVector6, Vector6};
use serde::{Deserialize, Serialize};

use crate::lorentz::{
    flip, inverse, metric, GeneratorId, GroupElement, LorentzMatrix, Mat3, RowVec3, Vec3,
};

pub type Mat6 = Matrix6<f64>;

/// Finite-difference step for the tangent span.
pub const SPAN_STEP: f64 = 1e-6;

/// Relative singular-value threshold used for orbit dimensions.
pub const RANK_TOL: f64 = 1e-8;

/// Below this norm `β*` is treated as zero and `i3` is reported.
pub const BETA_ZERO_TOL: f64 = 1e-12;

/// `X = α·J + β·P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraElement {
    pub alpha: Vec3,
    pub beta: Vec3,
}

impl AlgebraElement {
    pub fn new(alpha: Vec3, beta: Vec3) -> Self {
        Self { alpha, beta }
    }

    pub fn from_column(c: &Vector6<f64>) -> Self {
        Self::new(Vec3::new(c[0], c[1], c[2]), Vec3::new(c[3], c[4], c[5]))
    }

    pub fn column(&self) -> Vector6<f64> {
        Vector6::new(
            self.alpha[0],
            self.alpha[1],
            self.alpha[2],
            self.beta[0],
            self.beta[1],
            self.beta[2],
        )
    }

    pub fn generator(id: GeneratorId) -> Self {
        Self::from_column(&Vector6::from_row_slice(&id.coords()))
    }
}

/// `X* = (α*, β*)`, paired with the algebra by `α*α + β*β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualElement {
    pub alpha_star: [f64; 3],
    pub beta_star: [f64; 3],
}

impl DualElement {
    pub fn new(alpha_star: RowVec3, beta_star: RowVec3) -> Self {
        Self {
            alpha_star: [alpha_star[0], alpha_star[1], alpha_star[2]],
            beta_star: [beta_star[0], beta_star[1], beta_star[2]],
        }
    }

    pub fn zero() -> Self {
        Self::new(RowVec3::zeros(), RowVec3::zeros())
    }

    /// The element `(0, k)` whose orbit is the cotangent bundle over the orbit of `k`.
    pub fn momentum(k: RowVec3) -> Self {
        Self::new(RowVec3::zeros(), k)
    }

    pub fn from_slice(x: &[f64; 6]) -> Self {
        Self::new(
            RowVec3::new(x[0], x[1], x[2]),
            RowVec3::new(x[3], x[4], x[5]),
        )
    }

    pub fn alpha(&self) -> RowVec3 {
        RowVec3::from_row_slice(&self.alpha_star)
    }

    pub fn beta(&self) -> RowVec3 {
        RowVec3::from_row_slice(&self.beta_star)
    }

    pub fn row(&self) -> RowVector6<f64> {
        let (a, b) = (self.alpha_star, self.beta_star);
        RowVector6::new(a[0], a[1], a[2], b[0], b[1], b[2])
    }

    pub fn from_row(r: &RowVector6<f64>) -> Self {
        Self::from_slice(&[r[0], r[1], r[2], r[3], r[4], r[5]])
    }

    pub fn pair(&self, x: &AlgebraElement) -> f64 {
        (self.row() * x.column())[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CasimirValues {
    pub i1: f64,
    pub i2: f64,
    pub i3: Option<f64>,
}

/// `J·v = [[0, v₂, v₁], [−v₂, 0, v₀], [v₁, v₀, 0]]`.
pub fn j_dot_v(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, v[2], v[1], -v[2], 0.0, v[0], v[1], v[0], 0.0)
}

/// `Λ̂ = m̂ Λᵗ m̂`.
///
/// Note that `hat` reverses products, `hat(Λ₁Λ₂) = hat(Λ₂) hat(Λ₁)`, so the
/// group automorphism is `Λ ↦ Λ̂⁻¹`.
pub fn hat(l: &LorentzMatrix) -> LorentzMatrix {
    let f = flip();
    LorentzMatrix::from_closed_form(f * l.matrix().transpose() * f)
}

/// `Λ̂⁻¹ = m̂ (Λ⁻¹)ᵗ m̂`.
pub fn hat_inverse(l: &LorentzMatrix) -> LorentzMatrix {
    hat(&l.inverse())
}

fn blocks(a: &Mat3, b: &Mat3, c: &Mat3, d: &Mat3) -> Mat6 {
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(c);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(d);
    m
}

/// `M(g) = [[Λ̂⁻¹, 0], [−(J·v)Λ̂⁻¹, Λ]]`, acting on `(α, β)` columns.
pub fn adjoint_matrix(g: &GroupElement) -> Mat6 {
    let hi = *hat_inverse(&g.lambda).matrix();
    blocks(
        &hi,
        &Mat3::zeros(),
        &(-j_dot_v(&g.v) * hi),
        g.lambda.matrix(),
    )
}

pub fn ad(g: &GroupElement, x: &AlgebraElement) -> AlgebraElement {
    let hi = hat_inverse(&g.lambda);
    let alpha = hi.apply(&x.alpha);
    let beta = g.lambda.apply(&x.beta) - j_dot_v(&g.v) * alpha;
    AlgebraElement::new(alpha, beta)
}

/// `(α*Λ̂ + β*Λ⁻¹(J·v), β*Λ⁻¹)`.
pub fn coad(g: &GroupElement, x: &DualElement) -> DualElement {
    let h = hat(&g.lambda);
    let li = g.lambda.inverse();
    let b = x.beta();
    let alpha = x.alpha() * h.matrix() + b * li.matrix() * j_dot_v(&g.v);
    DualElement::new(alpha, b * li.matrix())
}

/// `‖(J·(Λ⁻¹v))Λ̂ − Λ⁻¹(J·v)‖_F`.
pub fn verify_intertwining_identity(l: &LorentzMatrix, v: &Vec3) -> f64 {
    let li = l.inverse();
    let lhs = j_dot_v(&li.apply(v)) * hat(l).matrix();
    let rhs = li.matrix() * j_dot_v(v);
    (lhs - rhs).norm()
}

pub fn casimirs(x: &DualElement) -> CasimirValues {
    let (a, b) = (x.alpha(), x.beta());
    let i1 = (b * metric() * b.transpose())[0];
    let i2 = (a * flip() * b.transpose())[0];
    let i3 = (b.norm() <= BETA_ZERO_TOL).then(|| (a * metric() * a.transpose())[0]);
    CasimirValues { i1, i2, i3 }
}

/// Rows are the central differences of `t ↦ coad(exp(tEᵢ), X*)` at `t = 0`
/// over the basis generators `J0, J1, J2, P0, P1, P2`.
pub fn infinitesimal_coad_span(x: &DualElement) -> Mat6 {
    let mut m = Mat6::zeros();
    for (i, id) in GeneratorId::BASIS.iter().enumerate() {
        let row = infinitesimal_coad(x, &AlgebraElement::generator(*id));
        m.set_row(i, &row);
    }
    m
}

/// Central difference of the coadjoint action along an arbitrary algebra direction.
pub fn infinitesimal_coad(x: &DualElement, dir: &AlgebraElement) -> RowVector6<f64> {
    let t = SPAN_STEP;
    let plus = coad(&exp_algebra(dir, t), x).row();
    let minus = coad(&exp_algebra(dir, -t), x).row();
    (plus - minus) / (2.0 * t)
}

/// Group element `exp(tX)` through the 4×4 series; used for small steps and
/// for directions that mix Lorentz and translation generators.
pub fn exp_algebra(x: &AlgebraElement, t: f64) -> GroupElement {
    let j = algebra_lorentz_part(&x.alpha) * t;
    let b = x.beta * t;
    // exp([[A, b], [0, 0]]) = [[e^A, φ(A) b], [0, 1]] with φ(A) = Σ Aᵏ/(k+1)!.
    let norm = j.norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scale = 2f64.powi(-squarings);
    let (a, bs) = (j * scale, b * scale);
    let mut e = Mat3::identity();
    let mut phi = Mat3::identity();
    let mut term = Mat3::identity();
    for k in 1..24 {
        term = term * a / k as f64;
        e += term;
        phi += term / (k + 1) as f64;
    }
    let mut g = GroupElement::new(LorentzMatrix::from_closed_form(e), phi * bs);
    for _ in 0..squarings {
        g = crate::lorentz::compose(&g, &g);
    }
    g
}

/// `α₀J₀ + α₁J₁ + α₂J₂`.
pub fn algebra_lorentz_part(alpha: &Vec3) -> Mat3 {
    GeneratorId::J0.matrix().unwrap() * alpha[0]
        + GeneratorId::J1.matrix().unwrap() * alpha[1]
        + GeneratorId::J2.matrix().unwrap() * alpha[2]
}

/// Numerical rank by singular values with the relative threshold [`RANK_TOL`].
pub fn numerical_rank(m: &Mat6) -> usize {
    let sv = m.singular_values();
    let smax = sv.max();
    if smax <= 1e-300 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_TOL * smax).count()
}

/// Coadjoint orbit dimension at `X*`.
pub fn orbit_dimension(x: &DualElement) -> usize {
    let span = infinitesimal_coad_span(x);
    // The scale of the span is set by ‖X*‖; an absolute floor keeps the
    // origin at rank 0.
    if span.norm() <= 1e-9 {
        return 0;
    }
    numerical_rank(&span)
}

/// `coad` realized through the 6×6 matrix, `X* M(g⁻¹)`.
pub fn coad_via_matrix(g: &GroupElement, x: &DualElement) -> DualElement {
    DualElement::from_row(&(x.row() * adjoint_matrix(&inverse(g))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{compose, exp_generator, GeneratorId as G};
    use nalgebra::Matrix4;
    use proptest::prelude::*;

    fn lorentz_word(p: &[f64; 4]) -> LorentzMatrix {
        exp_generator(G::J0, p[0]).unwrap()
            * exp_generator(G::J1, p[1]).unwrap()
            * exp_generator(G::J2, p[2]).unwrap()
            * exp_generator(G::Jminus, p[3]).unwrap()
    }

    /// Embeds `(α, β)` as the 4×4 matrix `[[α·J, β], [0, 0]]`.
    fn embed(x: &AlgebraElement) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        let j = x.alpha[0] * G::J0.matrix().unwrap()
            + x.alpha[1] * G::J1.matrix().unwrap()
            + x.alpha[2] * G::J2.matrix().unwrap();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&j);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&x.beta);
        m
    }

    fn extract(m: &Matrix4<f64>) -> AlgebraElement {
        AlgebraElement::new(
            Vec3::new(m[(2, 1)], m[(0, 2)], m[(0, 1)]),
            Vec3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)]),
        )
    }

    #[test]
    fn j_dot_v_examples() {
        assert_eq!(j_dot_v(&Vec3::zeros()), Mat3::zeros());
        let want = Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0);
        assert_eq!(j_dot_v(&Vec3::new(1.0, 0.0, 0.0)), want);
        let (a, b) = (Vec3::new(0.3, -1.0, 2.0), Vec3::new(1.5, 0.2, -0.7));
        assert!((j_dot_v(&(a + b)) - j_dot_v(&a) - j_dot_v(&b)).norm() < 1e-15);
    }

    #[test]
    fn hat_examples() {
        assert_eq!(*hat(&LorentzMatrix::identity()).matrix(), Mat3::identity());
        let a = exp_generator(G::J2, 0.9).unwrap();
        assert!((hat(&a).matrix() - a.matrix()).norm() < 1e-15);
        let r = exp_generator(G::J0, 0.4).unwrap();
        assert!((hat(&r).matrix() - r.matrix()).norm() < 1e-15);
        // The two null rotations are exchanged.
        let np = exp_generator(G::Jplus, 0.6).unwrap();
        let nm = exp_generator(G::Jminus, 0.6).unwrap();
        assert!((hat(&np).matrix() - nm.matrix()).norm() < 1e-15);
    }

    #[test]
    fn adjoint_matrix_examples() {
        assert_eq!(adjoint_matrix(&GroupElement::identity()), Mat6::identity());
        let v = Vec3::new(0.5, -1.0, 2.0);
        let m = adjoint_matrix(&GroupElement::translation(v));
        let want = blocks(
            &Mat3::identity(),
            &Mat3::zeros(),
            &-j_dot_v(&v),
            &Mat3::identity(),
        );
        assert!((m - want).norm() < 1e-15);
    }

    #[test]
    fn ad_examples() {
        let x = AlgebraElement::new(Vec3::new(0.1, 0.2, 0.3), Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(ad(&GroupElement::identity(), &x), x);
        let l = lorentz_word(&[0.3, -0.2, 0.5, 1.1]);
        let y = ad(
            &GroupElement::lorentz(l),
            &AlgebraElement::new(Vec3::zeros(), x.beta),
        );
        assert!(y.alpha.norm() == 0.0 && (y.beta - l.apply(&x.beta)).norm() < 1e-14);
    }

    #[test]
    fn coad_examples() {
        let x = DualElement::from_slice(&[0.2, -0.1, 0.4, 1.0, 0.5, -0.3]);
        assert_eq!(coad(&GroupElement::identity(), &x), x);
        let k0 = RowVec3::new(1.0, 0.2, -0.4);
        let v = Vec3::new(0.7, 1.2, -2.0);
        let y = coad(&GroupElement::translation(v), &DualElement::momentum(k0));
        assert!((y.alpha() - k0 * j_dot_v(&v)).norm() < 1e-14);
        assert_eq!(y.beta(), k0);
    }

    #[test]
    fn intertwining_examples() {
        let v = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(
            verify_intertwining_identity(&LorentzMatrix::identity(), &v),
            0.0
        );
        let r = exp_generator(G::J0, 0.3).unwrap();
        assert!(verify_intertwining_identity(&r, &v) <= 1e-12);
    }

    #[test]
    fn casimir_examples() {
        let m = 1.7;
        let c = casimirs(&DualElement::momentum(RowVec3::new(m, 0.0, 0.0)));
        assert!((c.i1 - m * m).abs() < 1e-15 && c.i2 == 0.0);
        for s in [1.0, -1.0] {
            let c = casimirs(&DualElement::new(
                RowVec3::new(s, 1.0, 0.0),
                RowVec3::zeros(),
            ));
            assert_eq!((c.i1, c.i2, c.i3), (0.0, 0.0, Some(0.0)));
        }
        let c = casimirs(&DualElement::new(
            RowVec3::new(0.0, m, 0.0),
            RowVec3::zeros(),
        ));
        assert!((c.i3.unwrap() + m * m).abs() < 1e-15);
    }

    #[test]
    fn span_rank_examples() {
        assert_eq!(orbit_dimension(&DualElement::zero()), 0);
        let x = DualElement::new(RowVec3::new(2.0, 0.0, 0.0), RowVec3::zeros());
        assert_eq!(orbit_dimension(&x), 2);
        assert_eq!(
            orbit_dimension(&DualElement::momentum(RowVec3::new(2.0, 0.0, 0.0))),
            4
        );
    }

    #[test]
    fn exp_algebra_matches_closed_forms() {
        for id in G::ALL {
            let g = exp_algebra(&AlgebraElement::generator(id), 0.8);
            let want = id.one_parameter(0.8);
            assert!(
                (g.homogeneous() - want.homogeneous()).norm() < 1e-12,
                "{id}"
            );
        }
    }

    fn group() -> impl Strategy<Value = GroupElement> {
        (
            prop::array::uniform4(-2.0f64..2.0),
            prop::array::uniform3(-3.0f64..3.0),
        )
            .prop_map(|(p, v)| GroupElement::new(lorentz_word(&p), Vec3::new(v[0], v[1], v[2])))
    }

    fn dual() -> impl Strategy<Value = DualElement> {
        prop::array::uniform6(-2.0f64..2.0).prop_map(|x| DualElement::from_slice(&x))
    }

    fn algebra() -> impl Strategy<Value = AlgebraElement> {
        prop::array::uniform6(-2.0f64..2.0)
            .prop_map(|x| AlgebraElement::from_column(&Vector6::from_row_slice(&x)))
    }

    proptest! {
        #[test]
        fn adjoint_is_homomorphism(g1 in group(), g2 in group()) {
            let lhs = adjoint_matrix(&compose(&g1, &g2));
            let rhs = adjoint_matrix(&g1) * adjoint_matrix(&g2);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
            let inv = adjoint_matrix(&inverse(&g1));
            let minv = adjoint_matrix(&g1).try_inverse().unwrap();
            prop_assert!((inv - minv).norm() <= 1e-10 * inv.norm().max(1.0));
        }

        #[test]
        fn adjoint_matches_conjugation(g in group(), x in algebra()) {
            let h = g.homogeneous();
            let hinv = inverse(&g).homogeneous();
            let want = extract(&(h * embed(&x) * hinv));
            let got = ad(&g, &x);
            let scale = want.column().norm().max(1.0);
            prop_assert!((got.column() - want.column()).norm() <= 1e-10 * scale);
            prop_assert!((adjoint_matrix(&g) * x.column() - want.column()).norm() <= 1e-10 * scale);
        }

        #[test]
        fn coad_is_left_action_and_preserves_pairing(g1 in group(), g2 in group(), x in dual(), y in algebra()) {
            let lhs = coad(&compose(&g1, &g2), &x).row();
            let rhs = coad(&g1, &coad(&g2, &x)).row();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
            let via = coad_via_matrix(&g1, &x).row();
            let direct = coad(&g1, &x).row();
            prop_assert!((via - direct).norm() <= 1e-10 * direct.norm().max(1.0));
            let before = x.pair(&y);
            let after = coad(&g1, &x).pair(&ad(&g1, &y));
            prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before.abs()) * adjoint_matrix(&g1).norm());
        }

        #[test]
        fn intertwining_identity(p in prop::array::uniform4(-2.0f64..2.0), v in prop::array::uniform3(-3.0f64..3.0)) {
            let l = lorentz_word(&p);
            let r = verify_intertwining_identity(&l, &Vec3::new(v[0], v[1], v[2]));
            prop_assert!(r <= 1e-12 * l.matrix().norm_squared().max(1.0));
        }

        #[test]
        fn hat_reverses_products(a in prop::array::uniform4(-2.0f64..2.0), b in prop::array::uniform4(-2.0f64..2.0)) {
            let (l1, l2) = (lorentz_word(&a), lorentz_word(&b));
            prop_assert!((hat(&hat(&l1)).matrix() - l1.matrix()).norm() <= 1e-12);
            let prod = hat(&(l1 * l2));
            let rev = hat(&l2) * hat(&l1);
            prop_assert!((prod.matrix() - rev.matrix()).norm() <= 1e-12 * prod.matrix().norm());
            let auto = hat_inverse(&(l1 * l2));
            let fwd = hat_inverse(&l1) * hat_inverse(&l2);
            prop_assert!((auto.matrix() - fwd.matrix()).norm() <= 1e-12 * auto.matrix().norm());
        }

        #[test]
        fn casimirs_are_invariant(g in group(), x in dual()) {
            let (c0, c1) = (casimirs(&x), casimirs(&coad(&g, &x)));
            let scale = x.row().norm_squared().max(1.0) * adjoint_matrix(&g).norm_squared();
            prop_assert!((c0.i1 - c1.i1).abs() <= 1e-10 * scale);
            prop_assert!((c0.i2 - c1.i2).abs() <= 1e-10 * scale);
        }
    }
}
