//! Largest empty cube of the dual lattice of a box against the surface measure band.

use spectral_gaps::domains::{surface_measure, DomainSpec};
use spectral_gaps::spectra::{max_empty_cube, Cube, SpectrumSpec};

fn main() -> spectral_gaps::Result<()> {
    for sides in [vec![1.0, 1.0], vec![2.0, 0.5], vec![8.0, 0.125], vec![2.0, 1.0, 0.5]] {
        let d = DomainSpec::boxed(&sides);
        let DomainSpec::Box { sides } = &d else { unreachable!() };
        let s = SpectrumSpec::dual_of_box(sides);
        let a_n = *sides.last().unwrap();
        let gap = max_empty_cube(&s, &Cube::centered(sides.len(), 2.0 / a_n), 1e-3)?;
        let r = 0.5 * gap.side;
        let n = sides.len() as f64;
        println!(
            "sides {sides:?}: 2R = {} (1/a_n = {}), R/|dD| = {:.4} in [{:.4}, 0.25]",
            gap.side,
            1.0 / a_n,
            r / surface_measure(&d)?,
            0.25 / n
        );
    }
    Ok(())
}
