//! Orthogonality of the digit spectrum of the base-4 Cantor measure and its growing gaps.

use spectral_gaps::domains::DomainSpec;
use spectral_gaps::fourier::{cantor_mhat, CANTOR_DEPTH};
use spectral_gaps::frames::orthobasis_residual;
use spectral_gaps::spectra::{cantor_gap_growth, cantor_points, Cube, SpectrumSpec};

fn main() -> spectral_gaps::Result<()> {
    for t in [0.0, 1.0, 3.0, 4.0, 2.5] {
        let z = cantor_mhat(t, CANTOR_DEPTH)?;
        println!("m^({t}) = {:+.3e} {:+.3e}i (bound {:.1e})", z.re, z.im, z.abs_error_bound);
    }
    let top = *cantor_points(6).last().unwrap();
    let residual = orthobasis_residual(
        &DomainSpec::CantorMeasure4 {},
        &SpectrumSpec::CantorDigits { max_digits: 6 },
        &Cube::new(vec![0.5 * top], 0.5 * top + 1.0),
    )?;
    println!("64-point Gram residual {residual:.1e}");
    for (d, gap) in cantor_gap_growth(8)? {
        println!("{d} digits: largest gap {gap}");
    }
    Ok(())
}
