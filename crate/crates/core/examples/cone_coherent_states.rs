//! Coherent states on the light cone and how their admissibility constant scales with k.

use poincare21::coherent::{
    admissibility_cone, admissibility_cone_oracle, cone_k_grid, cs_cone, fit_power_law, Envelope,
};
use poincare21::lorentz::cone_point;
use poincare21::measures::QuadratureSpec;
use poincare21::uir::ConeRep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let env = Envelope::linear_exp();
    let cs = cs_cone(
        &cone_point(0.5, 1.2),
        [0.3, 0.1],
        ConeRep { t: 0.8 },
        1,
        env,
    )?;
    let k = cone_point(-0.4, 2.0);
    println!("η(k) = {:.8}", cs.eval(&k)?);

    let spec = QuadratureSpec::reference();
    for mu in [1, 2, -1] {
        let ks = cone_k_grid(0.5, 2.0, 7);
        let mut taus = Vec::new();
        let mut vals = Vec::new();
        for k in &ks {
            let a = admissibility_cone(&env, mu, k, &spec)?;
            let o = admissibility_cone_oracle(&env, -2 * mu, k[0])?;
            println!("μ = {mu:+}  τ = {:.3}  A = {a:.8}  oracle = {o:.8}", k[0]);
            taus.push(k[0]);
            vals.push(a);
        }
        let (e, c, r2) = fit_power_law(&taus, &vals)?;
        println!(
            "μ = {mu:+}: A ≈ {c:.6} τ^{e:.6}  (R² = {r2:.8}, expected exponent {:.4})",
            -1.0 / (2.0 * mu as f64)
        );
    }
    println!("A depends on τ = k0, so it is not constant along the cone");
    Ok(())
}
