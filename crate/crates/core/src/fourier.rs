//! Fourier transforms of indicator functions, `f^(xi) = ∫ e^{-2 pi i x·xi} f(x) dx`, and of
//! the base-4 Cantor measure.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::j1_over_z;
use crate::domains::{DomainSpec, Profile};
use crate::error::{Error, Result};
use crate::numeric::{cos_pi, gauss8, sin_pi};

/// Truncation depth used when the Cantor transform is reached through [`chi_hat`].
pub const CANTOR_DEPTH: u32 = 40;

/// A transform value with an enclosure radius for truncation and quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierValue {
    pub re: f64,
    pub im: f64,
    pub abs_error_bound: f64,
}

impl FourierValue {
    pub fn new(z: Complex64, abs_error_bound: f64) -> Self {
        FourierValue {
            re: z.re,
            im: z.im,
            abs_error_bound,
        }
    }

    pub fn exact(z: Complex64) -> Self {
        Self::new(z, 0.0)
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// `e^{-2 pi i x}` with exact reduction.
pub(crate) fn expi2pi_neg(x: f64) -> Complex64 {
    Complex64::new(cos_pi(2.0 * x), -sin_pi(2.0 * x))
}

/// `∫_0^a e^{-2 pi i x xi} dx = e^{-pi i a xi} sin(pi a xi) / (pi xi)`.
fn interval_factor(a: f64, xi: f64) -> Complex64 {
    if xi == 0.0 {
        return Complex64::new(a, 0.0);
    }
    expi2pi_neg(0.5 * a * xi) * (sin_pi(a * xi) / (PI * xi))
}

/// Transform of the box `[0, a_1] x ... x [0, a_n]`.
pub fn chi_hat_box(sides: &[f64], xi: &[f64]) -> Result<FourierValue> {
    if sides.len() != xi.len() {
        return Err(Error::DimensionMismatch {
            expected: sides.len(),
            got: xi.len(),
        });
    }
    let z = sides
        .iter()
        .zip(xi)
        .fold(Complex64::new(1.0, 0.0), |acc, (a, x)| acc * interval_factor(*a, *x));
    Ok(FourierValue::exact(z))
}

/// Transform of the box `[lo_1, hi_1] x ... x [lo_n, hi_n]`; empty if any `hi <= lo`.
pub fn chi_hat_aabb(lo: &[f64], hi: &[f64], xi: &[f64]) -> Complex64 {
    let mut z = Complex64::new(1.0, 0.0);
    for ((l, h), x) in lo.iter().zip(hi).zip(xi) {
        if h <= l {
            return Complex64::new(0.0, 0.0);
        }
        z *= expi2pi_neg(l * x) * interval_factor(h - l, *x);
    }
    z
}

/// Transform of the disk of radius `r` centred at the origin: `r J1(2 pi r |xi|) / |xi|`.
pub fn chi_hat_disk(r: f64, xi: &[f64]) -> Result<FourierValue> {
    chi_hat_disk_at(r, [0.0, 0.0], xi)
}

fn chi_hat_disk_at(r: f64, center: [f64; 2], xi: &[f64]) -> Result<FourierValue> {
    if xi.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: xi.len(),
        });
    }
    let rho = xi[0].hypot(xi[1]);
    let z = 2.0 * PI * r * rho;
    let radial = 2.0 * PI * r * r * j1_over_z(z);
    let phase = expi2pi_neg(center[0] * xi[0] + center[1] * xi[1]);
    Ok(FourierValue::exact(phase * radial))
}

/// `∫_s^{1+s} e^{-2 pi i eta y} dy / e^{-2 pi i eta s} = (1 - e^{-2 pi i eta}) / (2 pi i eta)`.
fn unit_fiber_factor(eta: f64) -> Complex64 {
    interval_factor(1.0, eta)
}

/// Transform of the graph domain `{s(x) <= y <= 1 + s(x), 0 <= x <= 1}`.
///
/// The fiber integral is done in closed form, leaving `∫_0^1 e^{-2 pi i (xi_1 x + xi_2 s(x))} dx`.
/// For a sawtooth the phase is linear between kinks and that integral is exact too; for a
/// Weierstrass sum it is done with Gauss panels and the error is the change under doubling.
pub fn chi_hat_graph(profile: &Profile, xi: &[f64]) -> Result<FourierValue> {
    if xi.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: xi.len(),
        });
    }
    let (x1, x2) = (xi[0], xi[1]);
    if x2 != 0.0 && x2.fract() == 0.0 {
        return Ok(FourierValue::exact(Complex64::new(0.0, 0.0)));
    }
    let fiber = unit_fiber_factor(x2);
    if x2 == 0.0 {
        return Ok(FourierValue::exact(interval_factor(1.0, x1)));
    }
    match *profile {
        Profile::Sawtooth { tooth_count, .. } => {
            let pieces = 2 * tooth_count as usize;
            let width = 1.0 / pieces as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..pieces {
                let p = j as f64 * width;
                let q = p + width;
                let phase_p = x1 * p + x2 * profile.eval(p);
                let phase_q = x1 * q + x2 * profile.eval(q);
                let slope = (phase_q - phase_p) / width;
                acc += expi2pi_neg(phase_p) * interval_factor(width, slope);
            }
            let z = fiber * acc;
            Ok(FourierValue::new(z, pieces as f64 * 4.0 * f64::EPSILON))
        }
        Profile::Weierstrass { frequency_base, depth, .. } => {
            let oscillations = x1.abs() + x2.abs() * profile.total_variation();
            let detail = 4.0 * (frequency_base as f64).powi(depth as i32 - 1);
            let panels = (8.0 * oscillations).max(detail).max(16.0).ceil() as usize;
            let coarse = graph_phase_integral(profile, x1, x2, panels);
            let fine = graph_phase_integral(profile, x1, x2, 2 * panels);
            let err = (fine - coarse).norm() * fiber.norm();
            Ok(FourierValue::new(fiber * fine, err))
        }
    }
}

fn graph_phase_integral(profile: &Profile, x1: f64, x2: f64, panels: usize) -> Complex64 {
    let rule = gauss8();
    let width = 1.0 / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = p as f64 * width;
        acc += rule.integrate(a, a + width, |x| {
            let phase = x1 * x + x2 * profile.eval(x);
            Complex64::from_polar(1.0, -2.0 * PI * phase)
        });
    }
    acc
}

/// Transform of the Cantor measure, `e^{-pi i (2/3) t} prod_{j=0}^{J} cos(pi t / (2 4^j))`.
///
/// The bound uses `|1 - prod cos x_j| <= sum x_j^2 / 2` over the omitted factors, which holds
/// once the first omitted `x_j` is below one; otherwise the trivial bound 2 is reported.
pub fn cantor_mhat(t: f64, truncation: u32) -> Result<FourierValue> {
    if truncation == 0 {
        return Err(Error::InvalidInput("truncation must be at least 1".into()));
    }
    let mut prod = 1.0;
    let mut scale = 0.5;
    for _ in 0..=truncation {
        prod *= cos_pi(t * scale);
        scale *= 0.25;
    }
    let next = PI * t.abs() * scale;
    let bound = if next < 1.0 {
        0.5 * next * next / (1.0 - 1.0 / 16.0)
    } else {
        2.0
    };
    let phase = expi2pi_neg(t / 3.0);
    Ok(FourierValue::new(phase * prod, bound))
}

/// Dispatches on the domain variant. Dilates use `chi_hat_{tD}(xi) = t^n chi_hat_D(t xi)`.
pub fn chi_hat(d: &DomainSpec, xi: &[f64]) -> Result<FourierValue> {
    if xi.len() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            got: xi.len(),
        });
    }
    match d {
        DomainSpec::Box { sides } => chi_hat_box(sides, xi),
        DomainSpec::Disk { radius, center } => chi_hat_disk_at(*radius, *center, xi),
        DomainSpec::GraphDomain { profile } => chi_hat_graph(profile, xi),
        DomainSpec::CantorMeasure4 {} => cantor_mhat(xi[0], CANTOR_DEPTH),
        DomainSpec::ScaledDomain { base, t } => {
            if base.is_measure() {
                return Err(Error::Unsupported(
                    "dilates of the Cantor measure are not implemented".into(),
                ));
            }
            let scaled: Vec<f64> = xi.iter().map(|v| v * t).collect();
            let v = chi_hat(base, &scaled)?;
            let factor = t.powi(base.dim() as i32);
            Ok(FourierValue::new(v.complex() * factor, v.abs_error_bound * factor))
        }
    }
}

/// `|chi_hat(d, xi)|^2`, skipping the error bookkeeping.
pub fn chi_hat_norm_sqr(d: &DomainSpec, xi: &[f64]) -> Result<f64> {
    Ok(chi_hat(d, xi)?.norm_sqr())
}
