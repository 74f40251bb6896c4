//! Dyadic shell sums of |chi_hat|^2 over a spectrum, their decay law and the tail they certify.

use spectral_gaps::bounds::{shell_sums, tail_sum};
use spectral_gaps::domains::DomainSpec;
use spectral_gaps::spectra::SpectrumSpec;

fn main() -> spectral_gaps::Result<()> {
    let d = DomainSpec::disk(1.0);
    let s = SpectrumSpec::lattice(&[0.5, 0.5]);
    let rep = shell_sums(&d, &s, 2, 8)?;
    println!("k,value,bound");
    for sum in &rep.sums {
        println!("{},{:.6e},{:.6e}", sum.k, sum.sum, rep.envelope(sum.k));
    }
    println!("fitted exponent {:?}, envelope constant {:.4}", rep.fitted_exponent, rep.fitted_c);
    for r in [4.0, 8.0, 16.0] {
        let t = tail_sum(&d, &s, r, &rep, 1e-4)?;
        println!(
            "R = {r}: tail {:.5e} (summed to 2^{}, remainder <= {:.1e}), shell bound {:.5e}",
            t.value, t.k_stop, t.remainder_bound, t.shell_bound
        );
    }
    Ok(())
}
