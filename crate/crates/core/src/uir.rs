//! Induced unitary representations on the upper hyperboloid and the upper cone.
//!
//! Dual points are rows and `s ∈ SO₀(2,1)` acts on them by `s·k = k s⁻¹`.
//! The section `B(k) = Λ_k⁻¹` satisfies `B(k)·k₀ = k`, and the cocycle
//!
//! ```text
//! h₀(s, p) = B(s·p)⁻¹ s B(p) = Λ_{s·p} s Λ_p⁻¹
//! ```
//!
//! lies in the little group of the anchor point: a `J0` rotation on the
//! hyperboloid, a `J+` null rotation on the cone.
//!
//! ```text
//! (U(v, s) φ)(k) = e^{i⟨k;v⟩} L(h₀(s⁻¹, k))⁻¹ φ(k s)
//! ```
//!
//! with `L(R_θ) = e^{inθ}` or `L(n_ρ) = e^{itρ}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{
    boost_to_cone_point, boost_to_hyperboloid_point, cone_section_shift, euclid_pair,
    rotation_angle_tol, translation_param_tol, ConeDilation, GroupElement, LorentzMatrix,
    NullRotation, RowVec3, Vec3, FORM_TOL,
};
use crate::measures::{Manifold, OrbitFunction};

/// The null rotation fixing the cone anchor `(1, 1, 0)` under the row action.
pub const CONE_LITTLE_GROUP: NullRotation = NullRotation::Plus;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypRep {
    pub mass: f64,
    pub n: i64,
}

impl HypRep {
    pub fn new(mass: f64, n: i64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "mass must be positive, got {mass}"
            )));
        }
        Ok(Self { mass, n })
    }

    pub fn manifold(&self) -> Manifold {
        Manifold::HyperboloidUpper { mass: self.mass }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeRep {
    pub t: f64,
}

/// `χ(v) = exp(−i⟨k₀; v⟩)`.
pub fn character(k0: &RowVec3, v: &Vec3) -> Complex64 {
    Complex64::from_polar(1.0, -euclid_pair(k0, v))
}

/// `s·k = k s⁻¹`.
pub fn act_point(s: &LorentzMatrix, k: &RowVec3) -> RowVec3 {
    s.inverse().apply_row(k)
}

/// Form tolerance for a product of three factors: rounding grows with the
/// size of the boosts, so the check is relative to `‖Λ_{s·p}‖ ‖s‖ ‖Λ_p‖`.
fn product_tol(a: &LorentzMatrix, s: &LorentzMatrix, b: &LorentzMatrix) -> f64 {
    let scale = a.matrix().norm() * s.matrix().norm() * b.matrix().norm() / 3f64.powf(1.5);
    FORM_TOL * scale.max(1.0)
}

fn cocycle_hyp(s: &LorentzMatrix, p: &RowVec3, m: f64) -> Result<(LorentzMatrix, f64)> {
    let lp = boost_to_hyperboloid_point(p, m)?;
    let lsp = boost_to_hyperboloid_point(&act_point(s, p), m)?;
    Ok((lsp * *s * lp.inverse(), product_tol(&lsp, s, &lp)))
}

/// `Λ_{s·p} s Λ_p⁻¹` on the hyperboloid of mass `m`.
pub fn cocycle_matrix_hyp(s: &LorentzMatrix, p: &RowVec3, m: f64) -> Result<LorentzMatrix> {
    Ok(cocycle_hyp(s, p, m)?.0)
}

/// Rotation angle of `h₀(s, p)`.
pub fn cocycle_h0_hyp(s: &LorentzMatrix, p: &RowVec3, m: f64) -> Result<f64> {
    let (h, tol) = cocycle_hyp(s, p, m)?;
    rotation_angle_tol(&h, tol)
}

/// `Λ_{s·p} s Λ_p⁻¹` on the cone.
pub fn cocycle_matrix_cone(s: &LorentzMatrix, p: &RowVec3) -> Result<LorentzMatrix> {
    let lp = boost_to_cone_point(p)?;
    let lsp = boost_to_cone_point(&act_point(s, p))?;
    Ok(lsp * *s * lp.inverse())
}

/// Null-rotation parameter of `h₀(s, p)`.
///
/// Splitting `Λ_p = exp(J+, f(p)) D(p)` with the rotation–dilation `D`
/// gives `ρ = f(s·p) − f(p) + ρ_D(s, p)`; the large terms near the singular
/// ray cancel as scalars instead of inside a matrix product.
pub fn cocycle_h0_cone(s: &LorentzMatrix, p: &RowVec3) -> Result<f64> {
    let sp = act_point(s, p);
    let (fp, fsp) = (cone_section_shift(p)?, cone_section_shift(&sp)?);
    let (dp, dsp) = (
        ConeDilation::of_point(p)?.lorentz(),
        ConeDilation::of_point(&sp)?.lorentz(),
    );
    let h = dsp * *s * dp.inverse();
    let rho_d = translation_param_tol(&h, CONE_LITTLE_GROUP, product_tol(&dsp, s, &dp))?;
    Ok(fsp - fp + rho_d)
}

/// `U(g)φ` on the upper hyperboloid.
pub fn apply_uir_hyp(g: &GroupElement, rep: HypRep, phi: &OrbitFunction) -> OrbitFunction {
    let (s, v) = (g.lambda, g.v);
    let s_inv = s.inverse();
    let phi = phi.clone();
    OrbitFunction::new(phi.decay, move |k| {
        let mut phase = euclid_pair(k, &v);
        if rep.n != 0 {
            phase -= rep.n as f64 * cocycle_h0_hyp(&s_inv, k, rep.mass)?;
        }
        Ok(Complex64::from_polar(1.0, phase) * phi.eval(&s.apply_row(k))?)
    })
}

/// `U(g)φ` on the upper cone.
pub fn apply_uir_cone(g: &GroupElement, rep: ConeRep, phi: &OrbitFunction) -> OrbitFunction {
    let (s, v) = (g.lambda, g.v);
    let s_inv = s.inverse();
    let phi = phi.clone();
    OrbitFunction::new(phi.decay, move |k| {
        let mut phase = euclid_pair(k, &v);
        if rep.t != 0.0 {
            phase -= rep.t * cocycle_h0_cone(&s_inv, k)?;
        }
        Ok(Complex64::from_polar(1.0, phase) * phi.eval(&s.apply_row(k))?)
    })
}
