//! Sawtooth domains: the same spectrum and gap for every tooth count, growing boundaries.

use spectral_gaps::bounds::shift_difference_check;
use spectral_gaps::domains::{boundary_dimension, diameter, surface_measure, DomainSpec, Profile};
use spectral_gaps::frames::orthobasis_residual;
use spectral_gaps::spectra::{max_empty_cube, Cube, SpectrumSpec};

fn main() -> spectral_gaps::Result<()> {
    let z2 = SpectrumSpec::integer_lattice(2);
    let gap = max_empty_cube(&z2, &Cube::centered(2, 4.0), 1e-3)?;
    println!("largest empty cube of Z^2: {}", gap.side);
    let hs = vec![vec![1e-3, 0.0], vec![0.0, 1e-3]];
    for k in [1, 2, 4, 8, 16] {
        let d = DomainSpec::graph(Profile::sawtooth(k));
        let residual = orthobasis_residual(&d, &z2, &Cube::centered(2, 3.0))?;
        let rep = shift_difference_check(&d, &hs, &boundary_dimension(&d)?)?;
        println!(
            "k = {k:>2}: residual {residual:.1e}, |dD| {:.4}, diameter {:.4}, shift ratios horizontal {:.3} vertical {:.3}",
            surface_measure(&d)?,
            diameter(&d)?,
            rep.rows[0].one_sided_ratio,
            rep.rows[1].one_sided_ratio
        );
    }
    Ok(())
}
