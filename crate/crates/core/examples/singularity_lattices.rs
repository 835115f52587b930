// Whether the Borel singularities of the free energy form a lattice.

use resurgence::models::singularity_discreteness;

pub fn run_example() -> resurgence::Result<()> {
    for k in 3..=12 {
        let v = singularity_discreteness(k)?;
        let w = &v.witness;
        println!(
            "k = {k:>2}: rotation order {:>2}, discrete {:<5}  box minima {:?} (witness agrees: {})",
            v.rotation_order,
            v.discrete,
            w.minima.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>(),
            w.agrees
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> resurgence::Result<()> {
    run_example()
}
