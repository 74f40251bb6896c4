//! Domain and measure geometry: volumes, indicators, boundary tubes,
//! translates and their overlaps, diameters and Minkowski fits.
//!
//! Every Lebesgue domain here is either an axis-aligned box `[0, a_1] x ... x [0, a_n]`,
//! a disk, a *graph domain* `{(x, y) : s(x) <= y <= 1 + s(x), 0 <= x <= 1}` built from a
//! 1-periodic profile `s`, or a dilate of one of those. The graph construction has unit
//! vertical fibers, which is what makes the integer lattice an orthogonal spectrum for it.
//!
//! Boundary points belong to the domain.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{fit_line, gauss16};

fn default_amplitude() -> f64 {
    0.5
}

fn default_weierstrass_amplitude() -> f64 {
    0.25
}

fn origin2() -> [f64; 2] {
    [0.0, 0.0]
}

/// A 1-periodic profile `s` on `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Profile {
    /// Triangular wave with `tooth_count` teeth of height `amplitude`, `s(0) = 0`.
    Sawtooth {
        tooth_count: u32,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// Partial Weierstrass sum `amplitude * sum_{j < depth} b^{-gamma j} cos(2 pi b^j x)`.
    Weierstrass {
        gamma: f64,
        frequency_base: u32,
        depth: u32,
        #[serde(default = "default_weierstrass_amplitude")]
        amplitude: f64,
    },
}

impl Profile {
    pub fn sawtooth(tooth_count: u32) -> Self {
        Profile::Sawtooth {
            tooth_count,
            amplitude: 0.5,
        }
    }

    pub fn weierstrass(gamma: f64, frequency_base: u32, depth: u32) -> Self {
        Profile::Weierstrass {
            gamma,
            frequency_base,
            depth,
            amplitude: default_weierstrass_amplitude(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Profile::Sawtooth {
                tooth_count,
                amplitude,
            } => {
                if tooth_count == 0 || !(amplitude.is_finite() && amplitude >= 0.0) {
                    return Err(Error::InvalidInput(
                        "sawtooth needs tooth_count >= 1 and a finite amplitude >= 0".into(),
                    ));
                }
            }
            Profile::Weierstrass {
                gamma,
                frequency_base,
                depth,
                amplitude,
            } => {
                if !(gamma > 0.0 && gamma < 1.0) || frequency_base < 2 || depth == 0 {
                    return Err(Error::InvalidInput(
                        "weierstrass needs 0 < gamma < 1, frequency_base >= 2, depth >= 1".into(),
                    ));
                }
                if !amplitude.is_finite() {
                    return Err(Error::InvalidInput("weierstrass amplitude must be finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Sawtooth {
                tooth_count,
                amplitude,
            } => {
                let u = (tooth_count as f64 * x).rem_euclid(1.0);
                amplitude * (1.0 - (2.0 * u - 1.0).abs())
            }
            Profile::Weierstrass {
                gamma,
                frequency_base,
                depth,
                amplitude,
            } => {
                let b = frequency_base as f64;
                let mut freq = 1.0;
                let mut weight = 1.0;
                let decay = b.powf(-gamma);
                let mut sum = 0.0;
                for _ in 0..depth {
                    sum += weight * (2.0 * PI * (freq * x).rem_euclid(1.0)).cos();
                    freq *= b;
                    weight *= decay;
                }
                amplitude * sum
            }
        }
    }

    /// Upper bound on `|s'|`.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            Profile::Sawtooth {
                tooth_count,
                amplitude,
            } => 2.0 * amplitude.abs() * tooth_count as f64,
            Profile::Weierstrass {
                gamma,
                frequency_base,
                depth,
                amplitude,
            } => {
                let b = frequency_base as f64;
                (0..depth)
                    .map(|j| 2.0 * PI * b.powf((1.0 - gamma) * j as f64))
                    .sum::<f64>()
                    * amplitude.abs()
            }
        }
    }

    /// Upper bound on the total variation of `s` over one period.
    pub fn total_variation(&self) -> f64 {
        match *self {
            Profile::Sawtooth {
                tooth_count,
                amplitude,
            } => 2.0 * amplitude.abs() * tooth_count as f64,
            Profile::Weierstrass { .. } => self.lipschitz(),
        }
    }

    /// Length scale of the finest feature of the profile.
    pub fn feature_scale(&self) -> f64 {
        match *self {
            Profile::Sawtooth { tooth_count, .. } => 0.5 / tooth_count as f64,
            Profile::Weierstrass {
                frequency_base,
                depth,
                ..
            } => (frequency_base as f64).powi(-(depth as i32 - 1)),
        }
    }

    /// Kinks of `s` in `[a, b]` (sawtooth only; Weierstrass sums are smooth).
    pub fn kinks_in(&self, a: f64, b: f64) -> Vec<f64> {
        match *self {
            Profile::Sawtooth { tooth_count, .. } => {
                let step = 0.5 / tooth_count as f64;
                let first = (a / step).ceil() as i64;
                let last = (b / step).floor() as i64;
                (first..=last).map(|j| j as f64 * step).collect()
            }
            Profile::Weierstrass { .. } => Vec::new(),
        }
    }

    pub fn is_piecewise_linear(&self) -> bool {
        matches!(self, Profile::Sawtooth { .. })
    }

    /// Boundary vertices (sawtooth) or a dense sample (Weierstrass) of the lower curve.
    fn lower_curve_points(&self) -> Vec<(f64, f64)> {
        match *self {
            Profile::Sawtooth { tooth_count, .. } => {
                let m = 2 * tooth_count as usize;
                (0..=m)
                    .map(|j| {
                        let x = j as f64 / m as f64;
                        (x, self.eval(x))
                    })
                    .collect()
            }
            Profile::Weierstrass { .. } => {
                let m = ((8.0 / self.feature_scale()).ceil() as usize).clamp(2048, 1 << 16);
                (0..=m)
                    .map(|j| {
                        let x = j as f64 / m as f64;
                        (x, self.eval(x))
                    })
                    .collect()
            }
        }
    }

    /// Arc length of one period of the graph (sawtooth only).
    pub fn arc_length(&self) -> Result<f64> {
        match *self {
            Profile::Sawtooth {
                tooth_count,
                amplitude,
            } => {
                let k = tooth_count as f64;
                Ok((1.0 + 4.0 * amplitude * amplitude * k * k).sqrt())
            }
            Profile::Weierstrass { .. } => Err(Error::Unsupported(
                "a Weierstrass-type profile has no exact surface measure".into(),
            )),
        }
    }
}

/// Tagged description of a bounded domain or measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum DomainSpec {
    /// `[0, a_1] x ... x [0, a_n]`, sides sorted descending.
    Box { sides: Vec<f64> },
    Disk {
        radius: f64,
        #[serde(default = "origin2")]
        center: [f64; 2],
    },
    GraphDomain { profile: Profile },
    /// `t D`.
    ScaledDomain { base: Box<DomainSpec>, t: f64 },
    /// Self-similar probability measure on base-4 expansions with digits {0, 2}.
    CantorMeasure4 {},
}

impl DomainSpec {
    /// Box with the given sides, sorted into descending order.
    pub fn boxed(sides: &[f64]) -> Self {
        let mut sides = sides.to_vec();
        sides.sort_by(|a, b| b.total_cmp(a));
        DomainSpec::Box { sides }
    }

    pub fn unit_square() -> Self {
        DomainSpec::Box {
            sides: vec![1.0, 1.0],
        }
    }

    pub fn disk(radius: f64) -> Self {
        DomainSpec::Disk {
            radius,
            center: [0.0, 0.0],
        }
    }

    pub fn graph(profile: Profile) -> Self {
        DomainSpec::GraphDomain { profile }
    }

    pub fn scaled(base: DomainSpec, t: f64) -> Self {
        DomainSpec::ScaledDomain {
            base: Box::new(base),
            t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Box { sides } => {
                if sides.is_empty() {
                    return Err(Error::InvalidInput("box needs at least one side".into()));
                }
                if sides.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                    return Err(Error::InvalidInput("box sides must be positive".into()));
                }
                if sides.windows(2).any(|w| w[0] < w[1]) {
                    return Err(Error::InvalidInput(
                        "box sides must be sorted in descending order".into(),
                    ));
                }
                Ok(())
            }
            DomainSpec::Disk { radius, center } => {
                if !(radius.is_finite() && *radius > 0.0) || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput("disk needs a positive radius".into()));
                }
                Ok(())
            }
            DomainSpec::GraphDomain { profile } => profile.validate(),
            DomainSpec::ScaledDomain { base, t } => {
                if !(t.is_finite() && *t > 0.0) {
                    return Err(Error::InvalidInput("scale factor must be positive".into()));
                }
                base.validate()
            }
            DomainSpec::CantorMeasure4 {} => Ok(()),
        }
    }

    /// Ambient dimension (1 for the Cantor measure).
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Box { sides } => sides.len(),
            DomainSpec::Disk { .. } | DomainSpec::GraphDomain { .. } => 2,
            DomainSpec::ScaledDomain { base, .. } => base.dim(),
            DomainSpec::CantorMeasure4 {} => 1,
        }
    }

    pub fn is_measure(&self) -> bool {
        match self {
            DomainSpec::CantorMeasure4 {} => true,
            DomainSpec::ScaledDomain { base, .. } => base.is_measure(),
            _ => false,
        }
    }
}

/// Minkowski dimension and content of a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDimension {
    pub alpha: f64,
    /// Upper Minkowski content in the two-sided tube convention.
    pub content: f64,
    pub source: DimensionSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionSource {
    Analytic,
    Estimated,
}

fn check_dim(d: &DomainSpec, x: &[f64]) -> Result<()> {
    if x.len() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Lebesgue measure `|D|`.
pub fn volume(d: &DomainSpec) -> Result<f64> {
    match d {
        DomainSpec::Box { sides } => Ok(sides.iter().product()),
        DomainSpec::Disk { radius, .. } => Ok(PI * radius * radius),
        DomainSpec::GraphDomain { .. } => Ok(1.0),
        DomainSpec::ScaledDomain { base, t } => Ok(t.powi(base.dim() as i32) * volume(base)?),
        DomainSpec::CantorMeasure4 {} => Err(Error::ZeroVolume),
    }
}

/// Volume for Lebesgue domains, total mass (one) for the Cantor measure.
pub fn total_mass(d: &DomainSpec) -> f64 {
    volume(d).unwrap_or(1.0)
}

/// Membership test; boundary points count as inside.
pub fn indicator(d: &DomainSpec, x: &[f64]) -> Result<bool> {
    check_dim(d, x)?;
    Ok(match d {
        DomainSpec::Box { sides } => x.iter().zip(sides).all(|(xi, a)| *xi >= 0.0 && xi <= a),
        DomainSpec::Disk { radius, center } => {
            let dx = x[0] - center[0];
            let dy = x[1] - center[1];
            dx * dx + dy * dy <= radius * radius
        }
        DomainSpec::GraphDomain { profile } => {
            let s = profile.eval(x[0]);
            (0.0..=1.0).contains(&x[0]) && x[1] >= s && x[1] <= 1.0 + s
        }
        DomainSpec::ScaledDomain { base, t } => {
            let y: Vec<f64> = x.iter().map(|v| v / t).collect();
            indicator(base, &y)?
        }
        DomainSpec::CantorMeasure4 {} => in_cantor4(x[0]),
    })
}

/// Support of the Cantor measure: base-4 digits in {0, 2}, checked to 40 digits.
fn in_cantor4(mut x: f64) -> bool {
    for _ in 0..40 {
        if !(0.0..=2.0 / 3.0).contains(&x) {
            return false;
        }
        if x <= 1.0 / 6.0 {
            x *= 4.0;
        } else if x >= 0.5 {
            x = 4.0 * x - 2.0;
        } else {
            return false;
        }
    }
    true
}

/// Exact surface measure `|boundary D|` (boxes, disks, sawtooth polygons and their dilates).
pub fn surface_measure(d: &DomainSpec) -> Result<f64> {
    match d {
        DomainSpec::Box { sides } => {
            if sides.len() == 1 {
                return Ok(2.0);
            }
            let mut total = 0.0;
            for j in 0..sides.len() {
                let face: f64 = sides
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .map(|(_, a)| a)
                    .product();
                total += 2.0 * face;
            }
            Ok(total)
        }
        DomainSpec::Disk { radius, .. } => Ok(2.0 * PI * radius),
        DomainSpec::GraphDomain { profile } => Ok(2.0 * profile.arc_length()? + 2.0),
        DomainSpec::ScaledDomain { base, t } => {
            Ok(t.powi(base.dim() as i32 - 1) * surface_measure(base)?)
        }
        DomainSpec::CantorMeasure4 {} => Err(Error::ZeroVolume),
    }
}

/// Nominal boundary dimension `alpha` (the fractal dimension for Weierstrass profiles).
pub fn nominal_alpha(d: &DomainSpec) -> Result<f64> {
    match d {
        DomainSpec::Box { sides } => Ok(sides.len() as f64 - 1.0),
        DomainSpec::Disk { .. } => Ok(1.0),
        DomainSpec::GraphDomain { profile } => match profile {
            Profile::Sawtooth { .. } => Ok(1.0),
            Profile::Weierstrass { gamma, .. } => Ok(2.0 - gamma),
        },
        DomainSpec::ScaledDomain { base, .. } => nominal_alpha(base),
        DomainSpec::CantorMeasure4 {} => Err(Error::ZeroVolume),
    }
}

/// Closed-form boundary dimension and tube content where one exists.
///
/// The tube convention counts both sides of the boundary, so a rectifiable boundary has
/// content twice its surface measure.
pub fn boundary_dimension(d: &DomainSpec) -> Result<BoundaryDimension> {
    let alpha = nominal_alpha(d)?;
    if let DomainSpec::GraphDomain {
        profile: Profile::Weierstrass { .. },
    } = d
    {
        return Err(Error::Unsupported(
            "Weierstrass-type boundaries have no closed-form content; use minkowski_estimate"
                .into(),
        ));
    }
    if let DomainSpec::ScaledDomain { base, t } = d {
        let b = boundary_dimension(base)?;
        return Ok(BoundaryDimension {
            alpha: b.alpha,
            content: t.powf(b.alpha) * b.content,
            source: DimensionSource::Analytic,
        });
    }
    Ok(BoundaryDimension {
        alpha,
        content: 2.0 * surface_measure(d)?,
        source: DimensionSource::Analytic,
    })
}

/// Tube-limit content: closed form where available, otherwise a fit over the default grid.
pub fn minkowski_content(d: &DomainSpec) -> Result<BoundaryDimension> {
    match boundary_dimension(d) {
        Err(Error::Unsupported(_)) => Ok(minkowski_estimate(d, &default_eps_grid())?.dimension),
        other => other,
    }
}

/// Lower bound on the inradius; tubes at least this wide saturate the interior.
pub fn inradius_lower_bound(d: &DomainSpec) -> Result<f64> {
    match d {
        DomainSpec::Box { sides } => Ok(0.5 * sides.iter().cloned().fold(f64::INFINITY, f64::min)),
        DomainSpec::Disk { radius, .. } => Ok(*radius),
        DomainSpec::GraphDomain { profile } => {
            let l = profile.lipschitz();
            Ok(0.5 / (1.0 + l * l).sqrt())
        }
        DomainSpec::ScaledDomain { base, t } => Ok(t * inradius_lower_bound(base)?),
        DomainSpec::CantorMeasure4 {} => Err(Error::ZeroVolume),
    }
}

/// Volume of the two-sided tube `{x : dist(x, boundary D) < eps}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeVolume {
    pub volume: f64,
    /// `eps` reached the inradius bound, so the inner tube is saturated.
    pub saturated: bool,
    pub exact: bool,
    /// Column width of the sweep for graph domains (finest of the two passes).
    pub cell_size: Option<f64>,
}

pub fn boundary_neighborhood_volume(d: &DomainSpec, eps: f64) -> Result<TubeVolume> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let saturated = eps >= inradius_lower_bound(d)?;
    let mut cell_size = None;
    let (volume, exact) = match d {
        DomainSpec::Box { sides } => (box_tube(sides, eps), true),
        DomainSpec::Disk { radius, .. } => {
            let r = *radius;
            let inner = (r - eps).max(0.0);
            (PI * ((r + eps).powi(2) - inner * inner), true)
        }
        DomainSpec::GraphDomain { profile } => {
            cell_size = Some(eps / 16.0);
            (graph_tube(profile, eps), false)
        }
        DomainSpec::ScaledDomain { base, t } => {
            let b = boundary_neighborhood_volume(base, eps / t)?;
            cell_size = b.cell_size.map(|c| c * t);
            (t.powi(base.dim() as i32) * b.volume, b.exact)
        }
        DomainSpec::CantorMeasure4 {} => return Err(Error::ZeroVolume),
    };
    Ok(TubeVolume {
        volume,
        saturated,
        exact,
        cell_size,
    })
}

/// Volume of the unit k-ball.
fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(k - 2) * 2.0 * PI / k as f64,
    }
}

/// Steiner formula outside, product of shrunk sides inside.
fn box_tube(sides: &[f64], eps: f64) -> f64 {
    let n = sides.len();
    // elementary symmetric polynomials e_0..e_n of the sides
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for &a in sides {
        for m in (1..=n).rev() {
            e[m] += a * e[m - 1];
        }
    }
    let outer: f64 = (1..=n)
        .map(|k| unit_ball_volume(k) * eps.powi(k as i32) * e[n - k])
        .sum();
    let full: f64 = sides.iter().product();
    let shrunk: f64 = sides.iter().map(|a| (a - 2.0 * eps).max(0.0)).product();
    outer + full - shrunk
}

/// Column sweep with cells of width eps/8 and eps/16, Richardson-extrapolated.
fn graph_tube(profile: &Profile, eps: f64) -> f64 {
    let coarse = graph_tube_columns(profile, eps, eps / 8.0);
    let fine = graph_tube_columns(profile, eps, eps / 16.0);
    (4.0 * fine - coarse) / 3.0
}

/// Midpoint rule over columns of width `delta`. In each column the set of heights within
/// `eps` of one boundary curve is an interval (a continuous family of intervals over a
/// connected window), so each column reduces to a union of at most four intervals.
fn graph_tube_columns(profile: &Profile, eps: f64, delta: f64) -> f64 {
    let span = 1.0 + 2.0 * eps;
    let columns = (span / delta).ceil() as usize;
    let delta = span / columns as f64;

    let target = (eps / 64.0).min(profile.feature_scale() / 16.0);
    let samples = (1.0 / target).ceil() as usize;
    let hx = 1.0 / samples as f64;
    let s: Vec<f64> = (0..=samples).map(|j| profile.eval(j as f64 * hx)).collect();
    let s0 = s[0];

    let mut total = 0.0;
    let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(4);
    for i in 0..columns {
        let c = -eps + (i as f64 + 0.5) * delta;
        intervals.clear();

        let wa = (c - eps).max(0.0);
        let wb = (c + eps).min(1.0);
        if wa <= wb {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut visit = |x: f64, sx: f64| {
                let d = x - c;
                let w = (eps * eps - d * d).max(0.0).sqrt();
                lo = lo.min(sx - w);
                hi = hi.max(sx + w);
            };
            visit(wa, profile.eval(wa));
            visit(wb, profile.eval(wb));
            let j0 = (wa / hx).ceil() as usize;
            let j1 = ((wb / hx).floor() as usize).min(samples);
            for (j, sx) in s.iter().enumerate().take(j1 + 1).skip(j0) {
                visit(j as f64 * hx, *sx);
            }
            for x in profile.kinks_in(wa, wb) {
                visit(x, profile.eval(x));
            }
            intervals.push((lo, hi));
            intervals.push((lo + 1.0, hi + 1.0));
        }
        for edge in [0.0, 1.0] {
            let d = c - edge;
            if d.abs() < eps {
                let w = (eps * eps - d * d).sqrt();
                intervals.push((s0 - w, 1.0 + s0 + w));
            }
        }
        total += union_length(&mut intervals) * delta;
    }
    total
}

fn union_length(intervals: &mut [(f64, f64)]) -> f64 {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut len = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for &(a, b) in intervals.iter() {
        match current {
            Some((ca, cb)) if a <= cb => current = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                len += cb - ca;
                current = Some((a, b));
            }
            None => current = Some((a, b)),
        }
    }
    if let Some((ca, cb)) = current {
        len += cb - ca;
    }
    len
}

/// `|D \ (D + h)|` and `|D symmetric-difference (D + h)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricDifference {
    pub one_sided: f64,
    pub two_sided: f64,
}

pub fn symmetric_difference_volume(d: &DomainSpec, h: &[f64]) -> Result<SymmetricDifference> {
    check_dim(d, h)?;
    let vol = volume(d)?;
    if h.iter().all(|v| *v == 0.0) {
        return Ok(SymmetricDifference {
            one_sided: 0.0,
            two_sided: 0.0,
        });
    }
    let one_sided = (vol - shift_overlap(d, h)?).max(0.0);
    Ok(SymmetricDifference {
        one_sided,
        two_sided: 2.0 * one_sided,
    })
}

/// `|D ∩ (D + h)|`.
pub fn shift_overlap(d: &DomainSpec, h: &[f64]) -> Result<f64> {
    check_dim(d, h)?;
    match d {
        DomainSpec::Box { sides } => Ok(sides
            .iter()
            .zip(h)
            .map(|(a, hj)| (a - hj.abs()).max(0.0))
            .product()),
        DomainSpec::Disk { radius, .. } => Ok(lens_area(*radius, h[0].hypot(h[1]))),
        DomainSpec::GraphDomain { profile } => {
            let a = h[0].max(0.0);
            let b = (1.0 + h[0]).min(1.0);
            Ok(fiber_integral(profile, a, b, &[(0.0, 0.0), (h[0], h[1])]))
        }
        DomainSpec::ScaledDomain { base, t } => {
            let hb: Vec<f64> = h.iter().map(|v| v / t).collect();
            Ok(t.powi(base.dim() as i32) * shift_overlap(base, &hb)?)
        }
        DomainSpec::CantorMeasure4 {} => Err(Error::ZeroVolume),
    }
}

/// `|D ∩ (D + h) ∩ (D - h)|`.
pub fn double_shift_overlap(d: &DomainSpec, h: &[f64]) -> Result<f64> {
    check_dim(d, h)?;
    match d {
        DomainSpec::Box { sides } => Ok(sides
            .iter()
            .zip(h)
            .map(|(a, hj)| (a - 2.0 * hj.abs()).max(0.0))
            .product()),
        // the two outer disks already force |x| <= r
        DomainSpec::Disk { radius, .. } => Ok(lens_area(*radius, 2.0 * h[0].hypot(h[1]))),
        DomainSpec::GraphDomain { profile } => {
            let a = h[0].abs();
            let b = 1.0 - h[0].abs();
            Ok(fiber_integral(
                profile,
                a,
                b,
                &[(0.0, 0.0), (h[0], h[1]), (-h[0], -h[1])],
            ))
        }
        DomainSpec::ScaledDomain { base, t } => {
            let hb: Vec<f64> = h.iter().map(|v| v / t).collect();
            Ok(t.powi(base.dim() as i32) * double_shift_overlap(base, &hb)?)
        }
        DomainSpec::CantorMeasure4 {} => Err(Error::ZeroVolume),
    }
}

/// `∫_D |χ_D(x + h) − χ_D(x − h)|² dx = |D ∩ ((D − h) Δ (D + h))|`.
pub fn double_shift_volume(d: &DomainSpec, h: &[f64]) -> Result<f64> {
    if h.iter().all(|v| *v == 0.0) {
        check_dim(d, h)?;
        return Ok(0.0);
    }
    let single = shift_overlap(d, h)?;
    let triple = double_shift_overlap(d, h)?;
    Ok((2.0 * single - 2.0 * triple).max(0.0))
}

fn lens_area(r: f64, dist: f64) -> f64 {
    if dist >= 2.0 * r {
        return 0.0;
    }
    let q = dist / (2.0 * r);
    2.0 * r * r * q.acos() - 0.5 * dist * (4.0 * r * r - dist * dist).max(0.0).sqrt()
}

/// `∫_a^b max(0, 1 − spread(x)) dx` where `spread` is the range of the fiber lower ends
/// `s(x − dx_i) + dy_i`. Exact for piecewise-linear profiles.
fn fiber_integral(profile: &Profile, a: f64, b: f64, shifts: &[(f64, f64)]) -> f64 {
    if b <= a {
        return 0.0;
    }
    let overlap = |x: f64| -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(sx, sy) in shifts {
            let l = profile.eval(x - sx) + sy;
            lo = lo.min(l);
            hi = hi.max(l);
        }
        (1.0 - (hi - lo)).max(0.0)
    };
    if profile.is_piecewise_linear() {
        let mut cuts = vec![a, b];
        for &(sx, _) in shifts {
            cuts.extend(profile.kinks_in(a - sx, b - sx).into_iter().map(|k| k + sx));
        }
        cuts.retain(|x| *x >= a && *x <= b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            total += linear_piece_integral(profile, w[0], w[1], shifts);
        }
        total
    } else {
        let panels = ((b - a) * 64.0 / profile.feature_scale()).ceil().max(256.0) as usize;
        let rule = gauss16();
        let width = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let pa = a + p as f64 * width;
                rule.integrate(pa, pa + width, overlap)
            })
            .sum()
    }
}

/// On `[p, q]` every lower end is linear; split where two of them cross or differ by
/// exactly one, then every piece of the integrand is linear and the trapezoid rule is exact.
fn linear_piece_integral(profile: &Profile, p: f64, q: f64, shifts: &[(f64, f64)]) -> f64 {
    if q <= p {
        return 0.0;
    }
    // evaluate strictly inside to pick the correct linear branch at kinks
    let eps = (q - p) * 1e-9;
    let ends: Vec<(f64, f64)> = shifts
        .iter()
        .map(|&(sx, sy)| {
            let l0 = profile.eval(p + eps - sx) + sy;
            let l1 = profile.eval(q - eps - sx) + sy;
            let slope = (l1 - l0) / (q - p - 2.0 * eps);
            (l0 - slope * eps, slope)
        })
        .collect();
    let at = |x: f64| -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(v, m) in &ends {
            let l = v + m * (x - p);
            lo = lo.min(l);
            hi = hi.max(l);
        }
        (1.0 - (hi - lo)).max(0.0)
    };
    let mut cuts = vec![p, q];
    for i in 0..ends.len() {
        for j in (i + 1)..ends.len() {
            let dv = ends[i].0 - ends[j].0;
            let dm = ends[i].1 - ends[j].1;
            if dm != 0.0 {
                for target in [-1.0, 0.0, 1.0] {
                    let x = p + (target - dv) / dm;
                    if x > p && x < q {
                        cuts.push(x);
                    }
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|w| 0.5 * (w[1] - w[0]) * (at(w[0]) + at(w[1])))
        .sum()
}

/// Euclidean diameter.
pub fn diameter(d: &DomainSpec) -> Result<f64> {
    match d {
        DomainSpec::Box { sides } => Ok(sides.iter().map(|a| a * a).sum::<f64>().sqrt()),
        DomainSpec::Disk { radius, .. } => Ok(2.0 * radius),
        DomainSpec::GraphDomain { profile } => {
            let lower = profile.lower_curve_points();
            let mut pts = lower.clone();
            pts.extend(lower.iter().map(|&(x, y)| (x, y + 1.0)));
            let mut best: f64 = 0.0;
            for (i, p) in pts.iter().enumerate() {
                for q in &pts[i + 1..] {
                    best = best.max((p.0 - q.0).hypot(p.1 - q.1));
                }
            }
            Ok(best)
        }
        DomainSpec::ScaledDomain { base, t } => Ok(t * diameter(base)?),
        DomainSpec::CantorMeasure4 {} => Ok(2.0 / 3.0),
    }
}

/// One point of the tube-volume regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeSample {
    pub eps: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiFit {
    pub dimension: BoundaryDimension,
    /// Residual norm of the log-log fit.
    pub residual: f64,
    pub samples: Vec<TubeSample>,
}

/// Geometric sequence `2^-3, ..., 2^-12`.
pub fn default_eps_grid() -> Vec<f64> {
    (3..=12).map(|k| 2f64.powi(-k)).collect()
}

/// Fits `log |tube(eps)| = log(content) + (n − alpha) log(eps)`.
pub fn minkowski_estimate(d: &DomainSpec, eps_grid: &[f64]) -> Result<MinkowskiFit> {
    if eps_grid.len() < 4 {
        return Err(Error::InvalidInput("need at least 4 epsilon values".into()));
    }
    if eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0))
        || eps_grid.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidInput(
            "epsilon grid must be positive and strictly decreasing".into(),
        ));
    }
    if eps_grid[0] / eps_grid[eps_grid.len() - 1] < 100.0 {
        return Err(Error::InvalidInput(
            "epsilon grid must span at least two decades".into(),
        ));
    }
    let n = d.dim() as f64;
    let mut samples = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let tube = boundary_neighborhood_volume(d, eps)?;
        samples.push(TubeSample {
            eps,
            volume: tube.volume,
        });
    }
    for w in samples.windows(2) {
        if w[1].volume > w[0].volume * (1.0 + 1e-12) || w[1].volume <= 0.0 {
            return Err(Error::InconsistentGeometry(format!(
                "tube volume {} at eps {} exceeds {} at eps {}",
                w[1].volume, w[1].eps, w[0].volume, w[0].eps
            )));
        }
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.eps.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.volume.ln()).collect();
    let fit = fit_line(&xs, &ys)
        .ok_or_else(|| Error::InconsistentGeometry("degenerate regression".into()))?;
    let alpha = n - fit.slope;
    if !(alpha < n) {
        return Err(Error::InconsistentGeometry(format!(
            "fitted dimension {alpha} is not below the ambient dimension"
        )));
    }
    Ok(MinkowskiFit {
        dimension: BoundaryDimension {
            alpha,
            content: fit.intercept.exp(),
            source: DimensionSource::Estimated,
        },
        residual: fit.residual,
        samples,
    })
}
