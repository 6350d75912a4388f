//! Integrate over the mass hyperboloid and the cone, and check Lorentz invariance.

use num_complex::Complex64;
use poincare21::lorentz::{exp_generator, GeneratorId, RowVec3};
use poincare21::measures::{
    check_measure_invariance, integrate, DecayClass, Manifold, OrbitFunction, QuadratureSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::reference();
    let boost = exp_generator(GeneratorId::J1, 0.8)? * exp_generator(GeneratorId::J0, 0.3)?;

    for man in [Manifold::hyperboloid(1.0)?, Manifold::ConeUpper] {
        // e^{-k0}: ∫ dk/k0 = 2π e^{-m} on the hyperboloid and 2π on the cone
        let f = OrbitFunction::total(DecayClass::Exponential, |k: &RowVec3| {
            Complex64::new((-k[0]).exp(), 0.0)
        });
        let i = integrate(&man, &f, &spec)?;
        let exact = 2.0 * std::f64::consts::PI * (-man.u_min()).exp();
        println!("{man}: ∫ e^(-k0) dν = {:.12} (exact {exact:.12})", i.re);

        let g = OrbitFunction::total(DecayClass::Gaussian, |k: &RowVec3| {
            Complex64::new((-(k[1] - 0.5).powi(2) - k[2].powi(2)).exp(), 0.0)
        });
        println!(
            "{man}: relative change under a boost {:.2e}",
            check_measure_invariance(&man, &boost, &g, &spec)?
        );
    }
    Ok(())
}
