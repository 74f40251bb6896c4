//! The lattice (1/2r) Z^2 as a tight frame on the disk of radius r.

use spectral_gaps::domains::DomainSpec;
use spectral_gaps::frames::{disk_frame_options, frame_bounds_estimate, tight_frame_check, TestFamily};
use spectral_gaps::spectra::SpectrumSpec;

fn main() -> spectral_gaps::Result<()> {
    for r in [0.5, 1.0, 2.0] {
        let family = TestFamily::RandomCombos { count: 4, terms: 3, seed: 1 };
        let tight = tight_frame_check(r, &family, 40.0 / r)?;
        let est = frame_bounds_estimate(
            &DomainSpec::disk(r),
            &SpectrumSpec::lattice(&[0.5 / r, 0.5 / r]),
            &disk_frame_options(r, 1),
        )?;
        println!(
            "r = {r}: 4r^2 = {}, tight-frame defect {:.2e}, A_hat {:.5}, B_hat {:.5}, captured {:.4}",
            4.0 * r * r,
            tight.max_relative_defect,
            est.a_hat,
            est.b_hat,
            est.captured
        );
    }
    Ok(())
}
