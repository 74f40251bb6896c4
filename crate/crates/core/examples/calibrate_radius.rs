//! Calibrates the radius constant on known gaps and checks the mass inside Q_R beyond it.

use spectral_gaps::bounds::{calibrate_constant, central_inequality_check, gap_radius, shell_sums, CalibrationCase};
use spectral_gaps::domains::{boundary_dimension, volume, DomainSpec};
use spectral_gaps::spectra::SpectrumSpec;

fn case(name: &str, d: &DomainSpec, frame: f64, r_empirical: f64) -> spectral_gaps::Result<CalibrationCase> {
    let bd = boundary_dimension(d)?;
    Ok(CalibrationCase {
        name: name.into(),
        a: frame,
        b: frame,
        content: bd.content,
        vol: volume(d)?,
        n: d.dim(),
        alpha: bd.alpha,
        r_empirical,
    })
}

fn main() -> spectral_gaps::Result<()> {
    let suite = vec![
        case("square", &DomainSpec::unit_square(), 1.0, 0.5)?,
        case("2 x 1/2 box", &DomainSpec::boxed(&[2.0, 0.5]), 1.0, 1.0)?,
        case("disk r = 1", &DomainSpec::disk(1.0), 4.0, 0.25)?,
    ];
    let c = calibrate_constant(&suite)?;
    println!("calibrated constant {c:.5}");
    let d = DomainSpec::disk(1.0);
    let s = SpectrumSpec::lattice(&[0.5, 0.5]);
    let bd = boundary_dimension(&d)?;
    let radius = gap_radius(4.0, 4.0, bd.content, volume(&d)?, 2, bd.alpha, c)?;
    let fit = shell_sums(&d, &s, 2, 7)?;
    for r in [0.5 * radius, radius, 2.0 * radius, 4.0 * radius, 8.0 * radius] {
        let k = r.log2().ceil() as i32 + 3;
        let check = central_inequality_check(&d, &s, 4.0, r, &fit, k)?;
        println!(
            "R = {r:.4}: inside {:.5}, bound {:.5}, margin {:+.5}",
            check.inside, check.bound, check.margin
        );
    }
    Ok(())
}
