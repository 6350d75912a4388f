//! Monte Carlo check of the resolution of identity for hyperboloid coherent states.
//!
//! Pass the sample count as the first argument (default 100000).

use poincare21::coherent::{roi_check, Envelope, Section};
use poincare21::measures::{Manifold, MonteCarloSpec, QuadratureSpec};
use poincare21::verify::roi_pairs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(100_000);
    let man = Manifold::hyperboloid(1.0)?;
    let inner = QuadratureSpec::new(20, 24).with_truncation(5.0);
    let mc = MonteCarloSpec::new(samples, 20_240_601);

    for (name, phi, psi) in roi_pairs() {
        let r = roi_check(
            &man,
            Section::Principal,
            &Envelope::exp(),
            &phi,
            &psi,
            &inner,
            &mc,
        )?;
        println!(
            "{name:<10} I = ({:+.5}, {:+.5}) ± {:.5}   <φ,ψ> = ({:+.5}, {:+.5})   rel {:.3}  z {:.2}",
            r.estimate[0], r.estimate[1], r.std_error, r.expected[0], r.expected[1], r.rel_error, r.z_score
        );
    }
    Ok(())
}
