//! Cells of a dyadic shell and the shift assigned to each.

use spectral_gaps::bounds::shell_partition;

fn main() -> spectral_gaps::Result<()> {
    let part = shell_partition(3, 2)?;
    for c in &part.cells {
        println!(
            "axis {} sign {:+} |x| in ({}, {}]: h = {:?}, winding {}",
            c.axis, c.sign, c.lo, c.hi, c.h, c.winding
        );
    }
    let mut worst = f64::INFINITY;
    for x in -16..=16 {
        for y in -16..=16 {
            if let Some(g) = part.phase_gap(&[x as f64, y as f64]) {
                worst = worst.min(g);
            }
        }
    }
    println!("smallest |e^(2 pi i l.h) - 1| over integer shell points: {worst:.4}");
    Ok(())
}
