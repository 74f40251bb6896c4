//! Mass of |chi_hat|^2 outside a ball against perimeter / (2 pi^2 R).
//!
//! The unit square stays below the bound; the two-tooth sawtooth exceeds it at moderate R.

use spectral_gaps::bounds::tail_integral_polygon;
use spectral_gaps::domains::{DomainSpec, Profile};

fn main() -> spectral_gaps::Result<()> {
    for d in [DomainSpec::unit_square(), DomainSpec::graph(Profile::sawtooth(2))] {
        println!("{d:?}");
        for r in [1.0, 2.0, 4.0, 8.0] {
            let t = tail_integral_polygon(&d, r)?;
            let verdict = if t.value <= t.bound { "below" } else { "above" };
            println!(
                "R = {r}: tail {:.6} {verdict} {:.6} (error estimate {:.1e})",
                t.value, t.bound, t.error_estimate
            );
        }
    }
    Ok(())
}
