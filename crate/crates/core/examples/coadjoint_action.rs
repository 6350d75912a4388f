//! Adjoint matrices, the coadjoint action, and its invariants.

use poincare21::coadjoint::{adjoint_matrix, casimirs, coad, coad_via_matrix, DualElement};
use poincare21::lorentz::{exp_generator, inverse, GeneratorId, GroupElement, RowVec3, Vec3};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l = exp_generator(GeneratorId::J1, 0.5)? * exp_generator(GeneratorId::J0, -1.0)?;
    let g = GroupElement::new(l, Vec3::new(0.3, -1.0, 2.0));

    let m = adjoint_matrix(&g);
    let m_inv = adjoint_matrix(&inverse(&g));
    println!("M(g) =\n{m:.4}");
    println!(
        "|M(g⁻¹) M(g) − 1| = {:.2e}",
        (m_inv * m - nalgebra::Matrix6::identity()).norm()
    );

    let x = DualElement::new(RowVec3::new(0.2, 1.0, -0.5), RowVec3::new(2.0, 0.5, 0.0));
    let y = coad(&g, &x);
    let z = coad_via_matrix(&g, &x);
    println!("coad(g, X*) = {:?} {:?}", y.alpha_star, y.beta_star);
    println!(
        "closed form vs M(g⁻¹)ᵗ: {:?} {:?}",
        z.alpha_star, z.beta_star
    );

    let (c0, c1) = (casimirs(&x), casimirs(&y));
    println!("i1: {:.12} -> {:.12}", c0.i1, c1.i1);
    println!("i2: {:.12} -> {:.12}", c0.i2, c1.i2);
    Ok(())
}
