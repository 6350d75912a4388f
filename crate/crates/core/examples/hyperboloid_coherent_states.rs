//! Coherent states on the mass hyperboloid and their admissibility constant.

use poincare21::coherent::{
    admissibility_hyp, admissibility_hyp_oracle, cs_hyp, hyperboloid_k_grid, x_jacobian, Envelope,
};
use poincare21::measures::{Manifold, QuadratureSpec};
use poincare21::uir::HypRep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = 1.0;
    let man = Manifold::hyperboloid(m)?;
    let env = Envelope::exp();
    let q = man.polar_point(1.5, 0.3);
    let cs = cs_hyp(&q, [0.2, -0.4], HypRep::new(m, 0)?, env)?;

    println!("η_(q,p)(k) at a few k:");
    for (u, th) in [(1.0, 0.0), (1.5, 0.3), (2.5, -1.0), (4.0, 2.0)] {
        let k = man.polar_point(u, th);
        println!(
            "  k = ({:.3}, {:+.3}, {:+.3})  η = {:.6}  |x Jacobian| = {:.6}",
            k[0],
            k[1],
            k[2],
            cs.eval(&k)?,
            x_jacobian(&k, &q, m)
        );
    }

    // the constant in front of the resolution of identity, at several k
    let spec = QuadratureSpec::reference();
    let oracle = admissibility_hyp_oracle(&env, m)?;
    println!("1D oracle: {oracle:.10}");
    for k in hyperboloid_k_grid(m, 5, 1.5) {
        let a = admissibility_hyp(&env, m, &k, &spec)?;
        println!("  k0 = {:.4}: A = {a:.10}", k[0]);
    }
    Ok(())
}
