//! Classify the seven representative coadjoint vectors and list their stabilizers.

use poincare21::orbits::{classify_coadjoint, stabilizer_probe, table_seeds};

fn main() {
    println!("{:<18} {:<24} {:>3}  stabilizer", "seed", "orbit", "dim");
    for (name, x) in table_seeds(1.0) {
        let class = classify_coadjoint(&x);
        let stab = stabilizer_probe(&x);
        println!(
            "{:<18} {:<24} {:>3}  {}{}",
            name,
            class.label(),
            class.dimension,
            stab.labels().join(", "),
            if stab.spans_kernel {
                ""
            } else {
                "  (incomplete)"
            }
        );
    }
}
