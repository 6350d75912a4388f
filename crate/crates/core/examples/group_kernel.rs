//! One-parameter subgroups, their products, and the Iwasawa factorization.

use poincare21::lorentz::{
    compose, exp_generator, inverse, iwasawa, GeneratorId, GroupElement, NullRotation, Vec3,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let boost = exp_generator(GeneratorId::J1, 0.7)?;
    let rot = exp_generator(GeneratorId::J0, 1.2)?;
    let null = exp_generator(GeneratorId::Jplus, -0.4)?;
    let l = rot * boost * null;
    println!("Λ = {}", l.matrix());
    println!("|ΛηΛᵗ − η| = {:.2e}", l.metric_residual());

    for n in [NullRotation::Plus, NullRotation::Minus] {
        let f = iwasawa(&l, n)?;
        let back = f.compose();
        println!(
            "{n:?}: θ = {:+.6}, γ = {:+.6}, ρ = {:+.6}, recomposition error {:.2e}",
            f.theta,
            f.gamma,
            f.rho,
            (back.matrix() - l.matrix()).norm()
        );
    }

    // the full group acts on (2+1)-vectors by (v, Λ)
    let g = GroupElement::new(l, Vec3::new(1.0, 0.0, -2.0));
    let h = GroupElement::new(
        exp_generator(GeneratorId::J2, 0.3)?,
        Vec3::new(0.0, 1.0, 0.0),
    );
    let gh = compose(&g, &h);
    let e = compose(&gh, &inverse(&gh));
    println!("g h = {:?}", gh.v);
    println!("(gh)(gh)⁻¹ translation = {:?}", e.v);
    Ok(())
}
