//! Tube fits of a dilated Weierstrass square and the resulting gap radius.

use spectral_gaps::bounds::gap_radius;
use spectral_gaps::cli::fractal_square;
use spectral_gaps::domains::{default_eps_grid, minkowski_estimate, DomainSpec};
use spectral_gaps::spectra::{max_empty_cube, Cube, SpectrumSpec};

fn main() -> spectral_gaps::Result<()> {
    for t in [1.0, 2.0, 4.0, 8.0] {
        let d = DomainSpec::scaled(fractal_square(), t);
        // the grid moves with t so every dilate is probed at the same relative scales
        let grid: Vec<f64> = default_eps_grid().iter().map(|e| e * t).collect();
        let fit = minkowski_estimate(&d, &grid)?;
        let vol = t * t;
        let bd = fit.dimension;
        let r = gap_radius(vol, vol, bd.content, vol, 2, bd.alpha, 1.0)?;
        let s = SpectrumSpec::lattice(&[1.0 / t, 1.0 / t]);
        let gap = max_empty_cube(&s, &Cube::centered(2, 4.0 / t), 1e-3)?;
        println!(
            "t = {t}: alpha {:.4}, content {:.4}, radius (C = 1) {:.4}, R t {:.4}, empirical 2R {}",
            bd.alpha,
            bd.content,
            r,
            r * t,
            gap.side
        );
    }
    Ok(())
}
