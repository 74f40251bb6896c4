//! Estimates behind the gap radius: translation identities for restricted transforms,
//! shift-difference volumes, the dyadic shell partition, shell sums and tails, the tail
//! integral for polygons, and the radius itself.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{
    double_shift_volume, nominal_alpha, surface_measure, symmetric_difference_volume,
    total_mass, volume, BoundaryDimension, DomainSpec,
};
use crate::error::{Error, Result};
use crate::fourier::{chi_hat, chi_hat_aabb, expi2pi_neg};
use crate::numeric::{fit_line, gauss16, pairwise_sum};
use crate::spectra::{enumerate_flat, Cube, PointSet, SpectrumSpec};

/// `|chi_hat(d, p)|^2` for every point, in point order.
pub fn transform_norms(d: &DomainSpec, points: &PointSet) -> Result<Vec<f64>> {
    points
        .coords
        .par_chunks(points.dim.max(1))
        .map(|p| Ok(chi_hat(d, p)?.norm_sqr()))
        .collect()
}

/// Deterministic `sum |chi_hat(d, p)|^2` over a point set.
pub fn transform_mass(d: &DomainSpec, points: &PointSet) -> Result<f64> {
    Ok(pairwise_sum(&transform_norms(d, points)?))
}

fn sup_norm(p: &[f64]) -> f64 {
    p.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Points of `s` with `inner < |λ|_inf <= outer`.
pub fn points_between(s: &SpectrumSpec, inner: f64, outer: f64) -> Result<PointSet> {
    let dim = s
        .dim()
        .ok_or_else(|| Error::InvalidInput("spectrum dimension is unknown".into()))?;
    let all = enumerate_flat(s, &Cube::centered(dim, outer))?;
    let coords = all
        .iter()
        .filter(|p| sup_norm(p) > inner)
        .flatten()
        .copied()
        .collect();
    Ok(PointSet { dim, coords })
}

// ---------------------------------------------------------------------------------------
// translation identities

/// Largest defect of each identity over the sampled frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationDefects {
    /// `F_D t_h chi_D(λ) = e^{2 pi i λ·h} chi_hat_{D ∩ (D+h)}(λ)`.
    pub shifted_forward: f64,
    /// `F_D t_{-h} chi_D(λ) = chi_hat_{D ∩ (D+h)}(λ)`.
    pub shifted_backward: f64,
    /// `F_D chi_D(λ) = chi_hat_D(λ)`.
    pub unshifted: f64,
}

impl TranslationDefects {
    pub fn max(&self) -> f64 {
        self.shifted_forward
            .max(self.shifted_backward)
            .max(self.unshifted)
    }
}

/// Evaluates both sides of the translation identities for restricted transforms.
///
/// `F_D t_h chi_D` is the transform of `D ∩ (D - h)`, integrated over that region directly;
/// the right-hand sides are computed on `D ∩ (D + h)` and, for the unshifted identity, from
/// the closed form. Boxes are exact; disks use lens quadrature.
pub fn translation_identity_check(
    d: &DomainSpec,
    h: &[f64],
    lambdas: &[Vec<f64>],
) -> Result<TranslationDefects> {
    let mut out = TranslationDefects {
        shifted_forward: 0.0,
        shifted_backward: 0.0,
        unshifted: 0.0,
    };
    let neg: Vec<f64> = h.iter().map(|v| -v).collect();
    for lam in lambdas {
        if lam.len() != d.dim() || h.len() != d.dim() {
            return Err(Error::DimensionMismatch {
                expected: d.dim(),
                got: lam.len().min(h.len()),
            });
        }
        let dot: f64 = lam.iter().zip(h).map(|(a, b)| a * b).sum();
        let (minus, plus, plus_centered, full) = match d {
            DomainSpec::Box { sides } => {
                let zero = vec![0.0; sides.len()];
                let minus = intersect_box(sides, &neg, lam);
                let plus = intersect_box(sides, h, lam);
                let lo: Vec<f64> = h.iter().map(|v| v.max(0.0)).collect();
                let widths: Vec<f64> = sides
                    .iter()
                    .zip(h)
                    .map(|(a, v)| (a - v.abs()).max(0.0))
                    .collect();
                let lo_dot: f64 = lo.iter().zip(lam).map(|(a, b)| a * b).sum();
                let centered = expi2pi_neg(lo_dot) * chi_hat_aabb(&zero, &widths, lam);
                let full = chi_hat_aabb(&zero, sides, lam);
                (minus, plus, centered, full)
            }
            DomainSpec::Disk { radius, center } => {
                let c = *center;
                let minus = lens_transform(*radius, c, [c[0] - h[0], c[1] - h[1]], lam);
                let plus = lens_transform(*radius, c, [c[0] + h[0], c[1] + h[1]], lam);
                // the lens is symmetric about its midpoint, so it is a phase times a real
                let mid = [c[0] + 0.5 * h[0], c[1] + 0.5 * h[1]];
                let sym = lens_transform(*radius, [-0.5 * h[0], -0.5 * h[1]], [0.5 * h[0], 0.5 * h[1]], lam);
                let centered = expi2pi_neg(mid[0] * lam[0] + mid[1] * lam[1]) * sym.re;
                let full = lens_transform(*radius, c, c, lam);
                (minus, plus, centered, full)
            }
            _ => {
                return Err(Error::Unsupported(
                    "translation identities are implemented for boxes and disks".into(),
                ))
            }
        };
        let phase = expi2pi_neg(-dot);
        let closed = chi_hat(d, lam)?.complex();
        out.shifted_forward = out.shifted_forward.max((minus - phase * plus).norm());
        out.shifted_backward = out.shifted_backward.max((plus - plus_centered).norm());
        out.unshifted = out.unshifted.max((full - closed).norm());
    }
    Ok(out)
}

/// Transform of `D ∩ (D + h)` for the box `D = [0, a]`.
fn intersect_box(sides: &[f64], h: &[f64], lam: &[f64]) -> Complex64 {
    let lo: Vec<f64> = h.iter().map(|v| v.max(0.0)).collect();
    let hi: Vec<f64> = sides.iter().zip(h).map(|(a, v)| a.min(a + v)).collect();
    chi_hat_aabb(&lo, &hi, lam)
}

/// Transform of the intersection of two radius-`r` disks centred at `c1` and `c2`.
///
/// In coordinates `u` along `c2 - c1` and `v` across it, the vertical extent is closed form
/// and the `u` integral is taken with the substitution `u = r cos θ` (or `d - r cos θ`),
/// which removes the square-root endpoint behaviour.
pub fn lens_transform(r: f64, c1: [f64; 2], c2: [f64; 2], lam: &[f64]) -> Complex64 {
    let dx = c2[0] - c1[0];
    let dy = c2[1] - c1[1];
    let dist = dx.hypot(dy);
    if dist >= 2.0 * r {
        return Complex64::new(0.0, 0.0);
    }
    let (ex, ey) = if dist > 0.0 {
        (dx / dist, dy / dist)
    } else {
        (1.0, 0.0)
    };
    let lu = lam[0] * ex + lam[1] * ey;
    let lv = -lam[0] * ey + lam[1] * ex;
    let strip = |w: f64| -> f64 {
        if lv == 0.0 {
            2.0 * w
        } else {
            (2.0 * PI * lv * w).sin() / (PI * lv)
        }
    };
    let theta0 = (dist / (2.0 * r)).acos();
    let panels = (16.0 * (1.0 + r * (lu.abs() + lv.abs()))).ceil() as usize;
    let rule = gauss16();
    let width = theta0 / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = p as f64 * width;
        acc += rule.integrate(a, a + width, |th: f64| {
            let w = r * th.sin();
            let jac = r * th.sin();
            let far = r * th.cos();
            let near = dist - r * th.cos();
            (expi2pi_neg(lu * far) + expi2pi_neg(lu * near)) * (strip(w) * jac)
        });
    }
    expi2pi_neg(lam[0] * c1[0] + lam[1] * c1[1]) * acc
}

// ---------------------------------------------------------------------------------------
// shift differences

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftDifferenceRow {
    pub h: Vec<f64>,
    /// `∫_D |chi_D(x) - chi_D(x - h)|^2 = |D \ (D + h)|`.
    pub one_sided: f64,
    /// `∫_D |chi_D(x + h) - chi_D(x - h)|^2`.
    pub double_shift: f64,
    pub one_sided_ratio: f64,
    pub double_shift_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftDifferenceReport {
    pub rows: Vec<ShiftDifferenceRow>,
    /// Largest ratio to `|h|^{n - alpha}` over both integrals.
    pub constant: f64,
    pub content: f64,
    /// `constant / content`.
    pub relative_constant: f64,
}

/// Divides both shift-difference integrals by `|h|^{n - alpha}`; zero shifts are skipped.
pub fn shift_difference_check(
    d: &DomainSpec,
    hs: &[Vec<f64>],
    boundary: &BoundaryDimension,
) -> Result<ShiftDifferenceReport> {
    let n = d.dim() as f64;
    let exponent = n - boundary.alpha;
    let mut rows = Vec::with_capacity(hs.len());
    let mut constant: f64 = 0.0;
    for h in hs {
        let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        let one_sided = symmetric_difference_volume(d, h)?.one_sided;
        let double_shift = double_shift_volume(d, h)?;
        let scale = norm.powf(exponent);
        let (r1, r2) = if norm > 0.0 {
            (one_sided / scale, double_shift / scale)
        } else {
            (0.0, 0.0)
        };
        constant = constant.max(r1).max(r2);
        rows.push(ShiftDifferenceRow {
            h: h.clone(),
            one_sided,
            double_shift,
            one_sided_ratio: r1,
            double_shift_ratio: r2,
        });
    }
    Ok(ShiftDifferenceReport {
        rows,
        constant,
        content: boundary.content,
        relative_constant: constant / boundary.content,
    })
}

// ---------------------------------------------------------------------------------------
// shell partition

/// One cell of a dyadic shell: points whose largest coordinate (first on ties) is `axis`,
/// with the given sign, and whose size falls in the `third`-th third of `(2^k, 2^{k+1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellCell {
    pub axis: usize,
    pub sign: i8,
    pub third: u8,
    /// Range `(lo, hi]` of `sign * λ_axis`.
    pub lo: f64,
    pub hi: f64,
    pub h: Vec<f64>,
    /// The integer `N` with `λ_axis * |h|` in `[N + 1/6, N + 5/6]` across the cell.
    pub winding: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellPartition {
    pub k: i32,
    pub dim: usize,
    pub cells: Vec<ShellCell>,
}

impl ShellPartition {
    /// Index of the cell holding `λ`, or `None` outside the shell.
    pub fn locate(&self, lam: &[f64]) -> Option<usize> {
        let lower = 2f64.powi(self.k);
        let top = sup_norm(lam);
        if !(top > lower && top <= 2.0 * lower) {
            return None;
        }
        let axis = lam.iter().position(|x| x.abs() == top)?;
        let sign: i8 = if lam[axis] > 0.0 { 1 } else { -1 };
        self.cells
            .iter()
            .position(|c| c.axis == axis && c.sign == sign && top > c.lo && top <= c.hi)
    }

    /// `|e^{2 pi i λ·h} - 1|` for the cell assigned to `λ`.
    pub fn phase_gap(&self, lam: &[f64]) -> Option<f64> {
        let cell = &self.cells[self.locate(lam)?];
        let dot: f64 = lam.iter().zip(&cell.h).map(|(a, b)| a * b).sum();
        Some((expi2pi_neg(-dot) - 1.0).norm())
    }
}

/// Builds the `6n` cells of the shell `Q_{2^{k+1}} \ Q_{2^k}`.
///
/// On each cell `h = τ e_axis` with `τ = x 2^{-k}`, `x ∈ [1, 2]` picked so that `λ_axis τ`
/// stays within `[N + 1/6, N + 5/6]`, which keeps `|e^{2 pi i λ·h} - 1| = 2|sin(pi λ_axis τ)|`
/// at least one.
pub fn shell_partition(k: i32, dim: usize) -> Result<ShellPartition> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let base = 2f64.powi(k);
    let mut cells = Vec::with_capacity(6 * dim);
    for axis in 0..dim {
        for sign in [1i8, -1] {
            for third in 0..3u8 {
                let u_lo = 1.0 + third as f64 / 3.0;
                let u_hi = 1.0 + (third as f64 + 1.0) / 3.0;
                let (winding, x) = (1..=4u32)
                    .find_map(|nn| {
                        let n = nn as f64;
                        let x_lo = ((n + 1.0 / 6.0) / u_lo).max(1.0);
                        let x_hi = ((n + 5.0 / 6.0) / u_hi).min(2.0);
                        (x_lo <= x_hi).then(|| (nn, 0.5 * (x_lo + x_hi)))
                    })
                    .ok_or_else(|| {
                        Error::InconsistentGeometry(format!("no admissible shift for third {third}"))
                    })?;
                let mut h = vec![0.0; dim];
                h[axis] = sign as f64 * x / base;
                cells.push(ShellCell {
                    axis,
                    sign,
                    third,
                    lo: u_lo * base,
                    hi: u_hi * base,
                    h,
                    winding,
                });
            }
        }
    }
    Ok(ShellPartition { k, dim, cells })
}

/// Per-cell pieces of the triangle-inequality split of a shell sum (boxes only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSplit {
    pub cell: usize,
    pub cell_sum: f64,
    /// `(sum_cell |chi_hat_{D ∩ (D+h)}|^2)^{1/2}`.
    pub near: f64,
    /// `(sum_cell |chi_hat_D - chi_hat_{D ∩ (D+h)}|^2)^{1/2}`.
    pub far: f64,
    /// `B ∫_D |chi_D(x + h) - chi_D(x - h)|^2`, which bounds `near^2`.
    pub near_bound: f64,
    /// `B ∫_D |chi_D(x) - chi_D(x - h)|^2`, which bounds `far^2`.
    pub far_bound: f64,
}

impl CellSplit {
    pub fn holds(&self, rel: f64) -> bool {
        let slack = 1.0 + rel;
        self.cell_sum.sqrt() <= (self.near + self.far) * slack + 1e-300
            && self.near * self.near <= self.near_bound * slack
            && self.far * self.far <= self.far_bound * slack
    }
}

/// Splits each cell sum of shell `k` into the two pieces controlled by shift differences.
pub fn shell_cell_splits(
    sides: &[f64],
    s: &SpectrumSpec,
    k: i32,
    frame_upper: f64,
) -> Result<Vec<CellSplit>> {
    let d = DomainSpec::Box {
        sides: sides.to_vec(),
    };
    d.validate()?;
    let part = shell_partition(k, sides.len())?;
    let base = 2f64.powi(k);
    let pts = points_between(s, base, 2.0 * base)?;
    let mut out = Vec::with_capacity(part.cells.len());
    for (idx, cell) in part.cells.iter().enumerate() {
        let mut sum = Vec::new();
        let mut near = Vec::new();
        let mut far = Vec::new();
        for lam in pts.iter().filter(|p| part.locate(p) == Some(idx)) {
            let full = chi_hat(&d, lam)?.complex();
            let inter = intersect_box(sides, &cell.h, lam);
            sum.push(full.norm_sqr());
            near.push(inter.norm_sqr());
            far.push((full - inter).norm_sqr());
        }
        out.push(CellSplit {
            cell: idx,
            cell_sum: pairwise_sum(&sum),
            near: pairwise_sum(&near).sqrt(),
            far: pairwise_sum(&far).sqrt(),
            near_bound: frame_upper * double_shift_volume(&d, &cell.h)?,
            far_bound: frame_upper * symmetric_difference_volume(&d, &cell.h)?.one_sided,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------------------
// shell sums

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSum {
    pub k: i32,
    pub sum: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellReport {
    pub k_min: i32,
    pub k_max: i32,
    pub sums: Vec<ShellSum>,
    /// Shells with no points or a zero sum; left out of the fit.
    pub excluded: Vec<i32>,
    /// Least-squares slope of `log2(sum)` against `k`.
    pub fitted_exponent: Option<f64>,
    /// `2^{intercept}` of the least-squares line.
    pub ls_c: Option<f64>,
    pub residual: Option<f64>,
    /// Decay rate used for the envelope: `n - alpha` when known, else minus the slope.
    pub decay: f64,
    /// Smallest `C` with `sum_k <= C 2^{-k decay}` on every shell in range.
    pub fitted_c: f64,
}

impl ShellReport {
    /// Envelope bound `fitted_c 2^{-k decay}` for shell `k`.
    pub fn envelope(&self, k: i32) -> f64 {
        self.fitted_c * 2f64.powf(-(k as f64) * self.decay)
    }

    /// Envelope bound on `sum_{k >= k0}` of the shell sums.
    pub fn tail_bound(&self, k0: i32) -> f64 {
        if self.fitted_c == 0.0 {
            return 0.0;
        }
        self.envelope(k0) / (1.0 - 2f64.powf(-self.decay))
    }
}

/// Sums `|chi_hat_D(λ)|^2` over each shell `Q_{2^{k+1}} \ Q_{2^k}` and fits the decay.
pub fn shell_sums(d: &DomainSpec, s: &SpectrumSpec, k_min: i32, k_max: i32) -> Result<ShellReport> {
    if k_max < k_min {
        return Err(Error::InvalidInput("empty shell range".into()));
    }
    let mut sums = Vec::new();
    for k in k_min..=k_max {
        let base = 2f64.powi(k);
        let pts = points_between(s, base, 2.0 * base)?;
        let sum = transform_mass(d, &pts)?;
        sums.push(ShellSum {
            k,
            sum,
            count: pts.len(),
        });
    }
    Ok(fit_shells(d, k_min, k_max, sums))
}

fn fit_shells(d: &DomainSpec, k_min: i32, k_max: i32, sums: Vec<ShellSum>) -> ShellReport {
    let excluded: Vec<i32> = sums
        .iter()
        .filter(|s| s.count == 0 || s.sum <= 0.0)
        .map(|s| s.k)
        .collect();
    let used: Vec<&ShellSum> = sums.iter().filter(|s| !excluded.contains(&s.k)).collect();
    let xs: Vec<f64> = used.iter().map(|s| s.k as f64).collect();
    let ys: Vec<f64> = used.iter().map(|s| s.sum.log2()).collect();
    let fit = fit_line(&xs, &ys);
    let n = d.dim() as f64;
    let decay = match nominal_alpha(d) {
        Ok(alpha) => n - alpha,
        Err(_) => fit.map(|f| -f.slope).unwrap_or(1.0),
    };
    let fitted_c = used
        .iter()
        .map(|s| s.sum * 2f64.powf(s.k as f64 * decay))
        .fold(0.0, f64::max);
    ShellReport {
        k_min,
        k_max,
        sums,
        excluded,
        fitted_exponent: fit.map(|f| f.slope),
        ls_c: fit.map(|f| 2f64.powf(f.intercept)),
        residual: fit.map(|f| f.residual),
        decay,
        fitted_c,
    }
}

// ---------------------------------------------------------------------------------------
// tails

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSum {
    pub r: f64,
    /// `floor(log2 R)`, the shell holding the edge of `Q_R`.
    pub k0: i32,
    /// Outer cube `Q_{2^k_stop}` of the exact summation.
    pub k_stop: i32,
    /// `sum over Q_{2^k_stop} \ Q_R`.
    pub value: f64,
    /// Envelope bound on everything outside `Q_{2^k_stop}`.
    pub remainder_bound: f64,
    /// Envelope bound on the whole tail from shell `k0` on.
    pub shell_bound: f64,
    /// The remainder reached the requested tolerance before the point budget ran out.
    pub converged: bool,
}

/// Largest number of points summed when certifying a tail.
const TAIL_POINT_BUDGET: usize = 20_000_000;

/// `sum_{λ ∉ Q_R} |chi_hat_D(λ)|^2`, exact out to a dyadic cube and bounded beyond it by the
/// envelope of `fit`.
pub fn tail_sum(
    d: &DomainSpec,
    s: &SpectrumSpec,
    r: f64,
    fit: &ShellReport,
    tol: f64,
) -> Result<TailSum> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput("R must be positive".into()));
    }
    if fit.fitted_c > 0.0 && (fit.decay <= 0.0 || fit.fitted_exponent.is_some_and(|e| e >= 0.0)) {
        return Err(Error::NoDecay(format!(
            "shell sums do not decrease (exponent {:?})",
            fit.fitted_exponent
        )));
    }
    let dim = s
        .dim()
        .ok_or_else(|| Error::InvalidInput("spectrum dimension is unknown".into()))?;
    let k0 = r.log2().floor() as i32;
    let mut k_stop = k0 + 1;
    while fit.tail_bound(k_stop) >= tol {
        let next = estimated_count(s, 2f64.powi(k_stop + 1), dim);
        if next > TAIL_POINT_BUDGET as f64 {
            break;
        }
        k_stop += 1;
    }
    let remainder_bound = fit.tail_bound(k_stop);
    let pts = points_between(s, r, 2f64.powi(k_stop))?;
    Ok(TailSum {
        r,
        k0,
        k_stop,
        value: transform_mass(d, &pts)?,
        remainder_bound,
        shell_bound: fit.tail_bound(k0),
        converged: remainder_bound < tol,
    })
}

fn estimated_count(s: &SpectrumSpec, half: f64, dim: usize) -> f64 {
    match s {
        SpectrumSpec::DiagonalLattice { steps }
        | SpectrumSpec::TranslatedLattice {
            base: crate::spectra::Lattice { steps },
            ..
        } => steps.iter().map(|st| 2.0 * half / st + 1.0).product(),
        _ => (2.0 * half + 1.0).powi(dim as i32),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailIntegral {
    pub r: f64,
    /// `∫_{|t| >= R} |chi_hat_S(t)|^2 dt`.
    pub value: f64,
    /// `|boundary S| / (2 pi^2 R)`.
    pub bound: f64,
    /// Change of the value when the quadrature is refined.
    pub error_estimate: f64,
}

/// Tail of `|chi_hat_S|^2` outside the Euclidean ball of radius `R`, via Plancherel and
/// polar quadrature of the inside.
pub fn tail_integral_polygon(d: &DomainSpec, r: f64) -> Result<TailIntegral> {
    if d.dim() != 2 {
        return Err(Error::Unsupported("polygon tails are two-dimensional".into()));
    }
    let perimeter = surface_measure(d)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput("R must be positive".into()));
    }
    let area = volume(d)?;
    let coarse = disk_integral(d, r, 1)?;
    let fine = disk_integral(d, r, 2)?;
    let value = area - fine;
    let error_estimate = (fine - coarse).abs();
    if error_estimate > 0.1 * value.abs() {
        return Err(Error::InconsistentGeometry(format!(
            "tail quadrature error {error_estimate} exceeds 10% of {value}"
        )));
    }
    Ok(TailIntegral {
        r,
        value,
        bound: perimeter / (2.0 * PI * PI * r),
        error_estimate,
    })
}

/// `∫_{|t| < R} |chi_hat|^2` with Gauss panels in the radius and the trapezoid rule in angle.
fn disk_integral(d: &DomainSpec, r: f64, refine: usize) -> Result<f64> {
    let scale = crate::domains::diameter(d)?.max(1.0);
    let panels = ((8.0 * r * scale).ceil() as usize).max(8) * refine;
    let angles = ((64.0 * r * scale).ceil() as usize).max(128) * refine;
    let rule = gauss16();
    let width = r / panels as f64;
    let rows: Vec<Result<f64>> = (0..panels)
        .into_par_iter()
        .map(|p| {
            let a = p as f64 * width;
            let mut acc = 0.0;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let rho = a + 0.5 * width * (1.0 + x);
                let mut ring = 0.0;
                for j in 0..angles {
                    let th = 2.0 * PI * j as f64 / angles as f64;
                    ring += chi_hat(d, &[rho * th.cos(), rho * th.sin()])?.norm_sqr();
                }
                acc += w * 0.5 * width * rho * ring * 2.0 * PI / angles as f64;
            }
            Ok(acc)
        })
        .collect();
    let vals = rows.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&vals))
}

// ---------------------------------------------------------------------------------------
// gap radius

/// `C (B content / (A vol))^{1 / (n - alpha)}`.
pub fn gap_radius(
    a: f64,
    b: f64,
    content: f64,
    vol: f64,
    n: usize,
    alpha: f64,
    c: f64,
) -> Result<f64> {
    let exponent = n as f64 - alpha;
    if exponent <= 0.0 {
        return Err(Error::Degenerate(format!(
            "boundary dimension {alpha} is not below the ambient dimension {n}"
        )));
    }
    if vol <= 0.0 {
        return Err(Error::Degenerate(
            "the set has zero volume, so gaps of the spectrum are unbounded".into(),
        ));
    }
    if !(a > 0.0 && b >= a && content > 0.0 && c > 0.0) {
        return Err(Error::InvalidInput(
            "need 0 < A <= B, positive content and a positive constant".into(),
        ));
    }
    Ok(c * (b * content / (a * vol)).powf(1.0 / exponent))
}

/// One observed gap together with the quantities entering the radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCase {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub content: f64,
    pub vol: f64,
    pub n: usize,
    pub alpha: f64,
    /// Half the side of the largest empty cube.
    pub r_empirical: f64,
}

impl CalibrationCase {
    /// The constant that makes the radius equal the observed gap.
    pub fn ratio(&self) -> Result<f64> {
        let unit = gap_radius(self.a, self.b, self.content, self.vol, self.n, self.alpha, 1.0)?;
        Ok(self.r_empirical / unit)
    }
}

/// Smallest constant for which the radius dominates every observed gap in the suite.
pub fn calibrate_constant(suite: &[CalibrationCase]) -> Result<f64> {
    if suite.is_empty() {
        return Err(Error::InvalidInput("calibration suite is empty".into()));
    }
    suite
        .iter()
        .map(|c| c.ratio())
        .try_fold(0.0f64, |m, r| Ok(m.max(r?)))
}

// ---------------------------------------------------------------------------------------
// central inequality

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralCheck {
    pub r: f64,
    /// `sum_{λ in Q_R} |chi_hat_D(λ)|^2`.
    pub inside: f64,
    /// `A_hat |D| - tail bound`.
    pub bound: f64,
    pub margin: f64,
    /// Envelope bound on the tail from `floor(log2 R)` on.
    pub tail_bound: f64,
    /// `sum over Q_{2^truncation_k} \ Q_R`.
    pub outside: f64,
    /// `sum over Q_{2^truncation_k}`, computed in one pass.
    pub total: f64,
    /// `|inside + outside - total|`.
    pub decomposition_defect: f64,
}

/// Compares the mass of `|chi_hat_D|^2` inside `Q_R` with `A |D|` minus the shell-law tail.
///
/// The envelope constant of `fit` already carries the upper frame bound, so it is used as is.
pub fn central_inequality_check(
    d: &DomainSpec,
    s: &SpectrumSpec,
    a_hat: f64,
    r: f64,
    fit: &ShellReport,
    truncation_k: i32,
) -> Result<CentralCheck> {
    let dim = s
        .dim()
        .ok_or_else(|| Error::InvalidInput("spectrum dimension is unknown".into()))?;
    let outer = 2f64.powi(truncation_k);
    if outer <= r {
        return Err(Error::InvalidInput(
            "truncation cube must be larger than Q_R".into(),
        ));
    }
    let inside = transform_mass(d, &enumerate_flat(s, &Cube::centered(dim, r))?)?;
    let outside = transform_mass(d, &points_between(s, r, outer)?)?;
    let total = transform_mass(d, &enumerate_flat(s, &Cube::centered(dim, outer))?)?;
    let k0 = r.log2().floor() as i32;
    let tail_bound = fit.tail_bound(k0);
    let bound = a_hat * total_mass(d) - tail_bound;
    Ok(CentralCheck {
        r,
        inside,
        bound,
        margin: inside - bound,
        tail_bound,
        outside,
        total,
        decomposition_defect: (inside + outside - total).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{boundary_dimension, Profile};
    use crate::numeric::sin_pi;

    #[test]
    fn partition_has_admissible_shifts_everywhere() {
        for (dim, kmax) in [(2usize, 6), (3, 4)] {
            for k in 0..=kmax {
                let part = shell_partition(k, dim).unwrap();
                assert_eq!(part.cells.len(), 6 * dim);
                let base = 2f64.powi(k);
                for c in &part.cells {
                    let norm = c.h.iter().map(|v| v * v).sum::<f64>().sqrt();
                    assert!(norm >= 1.0 / base && norm <= 2.0 / base);
                }
                let pts = points_between(&SpectrumSpec::integer_lattice(dim), base, 2.0 * base)
                    .unwrap();
                for p in pts.iter() {
                    let gap = part.phase_gap(p).expect("every shell point has a cell");
                    assert!(gap >= 1.0 - 1e-12, "k {k} λ {p:?} gap {gap}");
                }
            }
        }
    }

    #[test]
    fn partition_covers_exactly_the_shell() {
        let part = shell_partition(2, 2).unwrap();
        let mut x: f64 = -9.0;
        while x <= 9.0 {
            let mut y: f64 = -9.0;
            while y <= 9.0 {
                let top = x.abs().max(y.abs());
                let inside = top > 4.0 && top <= 8.0;
                assert_eq!(part.locate(&[x, y]).is_some(), inside, "({x}, {y})");
                y += 0.125;
            }
            x += 0.125;
        }
    }

    #[test]
    fn box_translation_identities_are_exact() {
        let d = DomainSpec::unit_square();
        let lams = vec![vec![1.0, 2.0], vec![-0.3, 0.7], vec![0.0, 0.0]];
        let defects = translation_identity_check(&d, &[0.3, 0.0], &lams).unwrap();
        assert!(defects.max() < 1e-12, "{defects:?}");
        let zero = translation_identity_check(&d, &[0.0, 0.0], &lams).unwrap();
        assert!(zero.max() < 1e-15);
    }

    #[test]
    fn disk_translation_identities_by_quadrature() {
        let d = DomainSpec::disk(1.0);
        let mut lams = Vec::new();
        for i in -2..=2 {
            for j in -2..=2 {
                lams.push(vec![0.7 * i as f64, 0.45 * j as f64]);
            }
        }
        let defects = translation_identity_check(&d, &[0.2, 0.0], &lams).unwrap();
        assert!(defects.max() < 1e-6, "{defects:?}");
        let diag = translation_identity_check(&d, &[0.31, -0.52], &lams).unwrap();
        assert!(diag.max() < 1e-6, "{diag:?}");
    }

    #[test]
    fn lens_area_matches_closed_form() {
        let r = 1.3;
        let dist = 0.9;
        let area = lens_transform(r, [0.0, 0.0], [dist, 0.0], &[0.0, 0.0]).re;
        let exact = 2.0 * r * r * (dist / (2.0 * r)).acos()
            - 0.5 * dist * (4.0 * r * r - dist * dist).sqrt();
        assert!((area - exact).abs() < 1e-12);
    }

    #[test]
    fn shift_differences_for_boxes_and_disks() {
        let sq = DomainSpec::unit_square();
        let bd = boundary_dimension(&sq).unwrap();
        let hs: Vec<Vec<f64>> = [1e-3, 1e-2, 5e-2].iter().map(|&t| vec![t, 0.0]).collect();
        let rep = shift_difference_check(&sq, &hs, &bd).unwrap();
        for row in &rep.rows {
            assert!((row.one_sided_ratio - 1.0).abs() < 1e-12);
        }
        let zero = shift_difference_check(&sq, &[vec![0.0, 0.0]], &bd).unwrap();
        assert_eq!(zero.rows[0].one_sided, 0.0);
        // one-sided differences stay below content times |h| for small shifts
        for d in [sq, DomainSpec::disk(1.0), DomainSpec::boxed(&[2.0, 0.5])] {
            let content = boundary_dimension(&d).unwrap().content;
            for t in [0.01, 0.05, 0.099] {
                for h in [[t, 0.0], [0.0, t], [t / 2f64.sqrt(), t / 2f64.sqrt()]] {
                    let v = symmetric_difference_volume(&d, &h).unwrap().one_sided;
                    assert!(v <= content * t);
                }
            }
        }
    }

    #[test]
    fn cell_splits_respect_shift_bounds() {
        let s = SpectrumSpec::translated_lattice(&[1.0, 1.0], &[0.5, 0.5]);
        for k in 1..=4 {
            for split in shell_cell_splits(&[1.0, 1.0], &s, k, 1.0).unwrap() {
                assert!(split.holds(1e-9), "k {k}: {split:?}");
            }
        }
    }

    /// Half-integer lattice sum of sinc^2 products, summed axis by axis.
    fn shifted_square_shell(k: i32) -> f64 {
        let f = |x: f64| {
            let s = sin_pi(x) / (PI * x);
            s * s
        };
        let base = 2f64.powi(k);
        let coords = |lim: f64| -> Vec<f64> {
            let m = lim.floor() as i64;
            (-m - 1..=m)
                .map(|i| i as f64 + 0.5)
                .filter(|x| x.abs() <= lim)
                .collect()
        };
        let outer: f64 = coords(2.0 * base).iter().map(|&x| f(x)).sum();
        let inner: f64 = coords(base).iter().map(|&x| f(x)).sum();
        outer * outer - inner * inner
    }

    #[test]
    fn shifted_square_shells_match_separable_sum() {
        let d = DomainSpec::unit_square();
        let s = SpectrumSpec::translated_lattice(&[1.0, 1.0], &[0.5, 0.5]);
        let rep = shell_sums(&d, &s, 1, 5).unwrap();
        for sh in &rep.sums {
            let exact = shifted_square_shell(sh.k);
            assert!((sh.sum - exact).abs() < 1e-13, "k {}: {} vs {exact}", sh.k, sh.sum);
        }
        let e = rep.fitted_exponent.unwrap();
        assert!((e + 1.0).abs() < 0.15, "{e}");
        for sh in &rep.sums {
            assert!(sh.sum <= rep.envelope(sh.k) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn orthogonal_shells_are_empty() {
        let rep = shell_sums(
            &DomainSpec::unit_square(),
            &SpectrumSpec::integer_lattice(2),
            0,
            3,
        )
        .unwrap();
        assert_eq!(rep.excluded, vec![0, 1, 2, 3]);
        assert!(rep.fitted_exponent.is_none());
        assert_eq!(rep.fitted_c, 0.0);
    }

    #[test]
    fn disk_shells_decay_like_inverse_radius() {
        let d = DomainSpec::disk(1.0);
        let s = SpectrumSpec::lattice(&[0.5, 0.5]);
        let rep = shell_sums(&d, &s, 2, 6).unwrap();
        let e = rep.fitted_exponent.unwrap();
        assert!((e + 1.0).abs() < 0.15, "{e}");
        let half = shell_sums(&d, &s, 2, 4).unwrap();
        assert!((half.fitted_exponent.unwrap() - e).abs() < 0.1);
        // scaling: shells of 2D at level k are shells of D at level k + 1, times 2^4 / 2^2 ...
        let big = DomainSpec::scaled(d.clone(), 2.0);
        let fine = SpectrumSpec::lattice(&[0.25, 0.25]);
        let rb = shell_sums(&big, &fine, 1, 3).unwrap();
        let rd = shell_sums(&d, &s, 2, 4).unwrap();
        for (a, b) in rb.sums.iter().zip(&rd.sums) {
            // chi_hat_{2D}(λ) = 4 chi_hat_D(2λ) and 2λ runs over (1/2)Z^2 in shell k + 1
            assert!((a.sum - 16.0 * b.sum).abs() < 1e-10 * a.sum);
        }
    }

    #[test]
    fn tail_sum_is_below_the_envelope() {
        let d = DomainSpec::disk(1.0);
        let s = SpectrumSpec::lattice(&[0.5, 0.5]);
        let fit = shell_sums(&d, &s, 2, 6).unwrap();
        let t8 = tail_sum(&d, &s, 8.0, &fit, 0.05).unwrap();
        assert!(t8.value <= t8.shell_bound);
        let t16 = tail_sum(&d, &s, 16.0, &fit, 0.05).unwrap();
        let ratio = (t16.value + t16.remainder_bound) / (t8.value + t8.remainder_bound);
        assert!((ratio - 0.5).abs() < 0.1, "{ratio}");
        let flat = ShellReport {
            fitted_exponent: Some(0.2),
            decay: 1.0,
            fitted_c: 1.0,
            ..fit
        };
        assert!(matches!(tail_sum(&d, &s, 8.0, &flat, 0.1), Err(Error::NoDecay(_))));
    }

    #[test]
    fn unit_square_tail_integrals() {
        let sq = DomainSpec::unit_square();
        let mut last = f64::INFINITY;
        for r in [2.0, 4.0, 8.0] {
            let t = tail_integral_polygon(&sq, r).unwrap();
            assert!(t.value <= t.bound, "R {r}: {} vs {}", t.value, t.bound);
            assert!(t.value < last);
            last = t.value;
        }
        let small = tail_integral_polygon(&sq, 1e-3).unwrap();
        assert!((small.value - 1.0).abs() < 1e-4);
        let saw = DomainSpec::graph(Profile::sawtooth(2));
        assert!(tail_integral_polygon(&saw, 2.0).is_ok());
    }

    #[test]
    fn radius_formula() {
        let r = gap_radius(1.0, 1.0, 4.0, 1.0, 2, 1.0, 0.25).unwrap();
        assert_eq!(r, 1.0);
        let r2 = gap_radius(1.0, 1.0, 4.0, 1.0, 2, 1.0, 0.5).unwrap();
        assert_eq!(r2, 2.0);
        for t in [1.0f64, 2.0, 4.0] {
            let alpha = 1.5;
            let rt = gap_radius(1.0, 1.0, t.powf(alpha), t * t, 2, alpha, 1.0).unwrap();
            assert!((rt * t - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            gap_radius(1.0, 1.0, 1.0, 0.0, 1, 0.5, 1.0),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            gap_radius(1.0, 1.0, 1.0, 1.0, 2, 2.0, 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn calibration_uses_the_largest_ratio() {
        let case = |r: f64| CalibrationCase {
            name: "c".into(),
            a: 1.0,
            b: 1.0,
            content: 4.0,
            vol: 1.0,
            n: 2,
            alpha: 1.0,
            r_empirical: r,
        };
        assert!(calibrate_constant(&[]).is_err());
        assert_eq!(calibrate_constant(&[case(0.5)]).unwrap(), 0.125);
        assert_eq!(calibrate_constant(&[case(0.5), case(0.2)]).unwrap(), 0.125);
    }

    #[test]
    fn central_check_on_orthogonal_and_disk_cases() {
        let sq = DomainSpec::unit_square();
        let z2 = SpectrumSpec::integer_lattice(2);
        let fit = shell_sums(&sq, &z2, 0, 3).unwrap();
        let c = central_inequality_check(&sq, &z2, 1.0, 2.0, &fit, 4).unwrap();
        assert!(c.margin.abs() < 1e-15);
        assert_eq!(c.total, 1.0);

        let d = DomainSpec::disk(1.0);
        let s = SpectrumSpec::lattice(&[0.5, 0.5]);
        let fit = shell_sums(&d, &s, 2, 6).unwrap();
        let c = central_inequality_check(&d, &s, 4.0, 8.0, &fit, 7).unwrap();
        assert!(c.margin > 0.0, "{c:?}");
        assert!(c.decomposition_defect < 1e-12 * c.total);
    }
}
