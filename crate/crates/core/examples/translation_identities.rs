//! Transform of a shifted indicator against the transform of the overlap D ∩ (D + h).

use spectral_gaps::bounds::translation_identity_check;
use spectral_gaps::domains::DomainSpec;

fn main() -> spectral_gaps::Result<()> {
    let lambdas = vec![vec![1.0, 2.0], vec![-0.7, 3.3], vec![4.5, -0.25]];
    let cases = [
        (DomainSpec::unit_square(), vec![0.3, 0.0]),
        (DomainSpec::boxed(&[2.0, 0.5]), vec![-0.4, 0.1]),
        (DomainSpec::disk(1.0), vec![0.2, 0.0]),
        (DomainSpec::disk(1.0), vec![0.5, -0.6]),
    ];
    for (d, h) in cases {
        let defects = translation_identity_check(&d, &h, &lambdas)?;
        println!("{d:?}, h = {h:?}: max defect {:.2e}", defects.max());
    }
    Ok(())
}
