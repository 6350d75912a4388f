//! Unitary representations induced from the little groups of the hyperboloid and the cone.

use num_complex::Complex64;
use poincare21::lorentz::{
    compose, cone_point, exp_generator, GeneratorId, GroupElement, RowVec3, Vec3,
};
use poincare21::measures::{inner_product, DecayClass, Manifold, OrbitFunction, QuadratureSpec};
use poincare21::uir::{apply_uir_cone, apply_uir_hyp, ConeRep, HypRep};

fn bump(c: [f64; 2]) -> OrbitFunction {
    OrbitFunction::total(DecayClass::Gaussian, move |k: &RowVec3| {
        let r2 = (k[1] - c[0]).powi(2) + (k[2] - c[1]).powi(2);
        Complex64::from_polar((-r2).exp(), 0.3 * k[1])
    })
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::reference();
    let g1 = GroupElement::new(
        exp_generator(GeneratorId::J1, 0.4)? * exp_generator(GeneratorId::J0, 0.9)?,
        Vec3::new(0.5, -0.2, 1.0),
    );
    let g2 = GroupElement::new(
        exp_generator(GeneratorId::J2, -0.6)?,
        Vec3::new(0.0, 0.7, 0.1),
    );
    let g12 = compose(&g1, &g2);
    let (phi, psi) = (bump([0.0, 0.0]), bump([0.4, -0.3]));

    // massive, spin n = 2
    let rep = HypRep::new(1.0, 2)?;
    let man = rep.manifold();
    let before = inner_product(&man, &phi, &psi, &spec)?;
    let after = inner_product(
        &man,
        &apply_uir_hyp(&g1, rep, &phi),
        &apply_uir_hyp(&g1, rep, &psi),
        &spec,
    )?;
    println!("hyperboloid  <φ,ψ> = {before:.10}");
    println!("hyperboloid <Uφ,Uψ> = {after:.10}");
    let k = man.polar_point(1.7, 0.4);
    let lhs = apply_uir_hyp(&g1, rep, &apply_uir_hyp(&g2, rep, &phi)).eval(&k)?;
    let rhs = apply_uir_hyp(&g12, rep, &phi).eval(&k)?;
    println!(
        "hyperboloid U(g1)U(g2)φ − U(g1g2)φ at k: {:.2e}",
        (lhs - rhs).norm()
    );

    // massless, continuous parameter t
    let rep = ConeRep { t: 0.8 };
    let man = Manifold::ConeUpper;
    let before = inner_product(&man, &phi, &psi, &spec)?;
    let after = inner_product(
        &man,
        &apply_uir_cone(&g1, rep, &phi),
        &apply_uir_cone(&g1, rep, &psi),
        &spec,
    )?;
    println!("cone  <φ,ψ> = {before:.10}");
    println!("cone <Uφ,Uψ> = {after:.10}");
    let k = cone_point(0.9, 1.3);
    let lhs = apply_uir_cone(&g1, rep, &apply_uir_cone(&g2, rep, &phi)).eval(&k)?;
    let rhs = apply_uir_cone(&g12, rep, &phi).eval(&k)?;
    println!(
        "cone U(g1)U(g2)φ − U(g1g2)φ at k: {:.2e}",
        (lhs - rhs).norm()
    );
    Ok(())
}
