//! Bessel function of the first kind, order one.
//!
//! Power series up to [`SERIES_LIMIT`], the trapezoid rule on Bessel's integral up to
//! [`INTEGRAL_LIMIT`], and the Hankel asymptotic expansion beyond. Neighbouring branches are
//! compared on overlap bands in the tests.

use std::f64::consts::PI;

/// Largest argument evaluated by the power series.
pub const SERIES_LIMIT: f64 = 4.0;
/// Largest argument evaluated by quadrature of Bessel's integral.
pub const INTEGRAL_LIMIT: f64 = 20.0;

/// Trapezoid intervals on `[0, pi]`; the aliasing error is about `2 |J_63(z)|`.
const INTEGRAL_PANELS: usize = 32;

/// `J1(z)`.
pub fn j1(z: f64) -> f64 {
    let a = z.abs();
    if a <= SERIES_LIMIT {
        z * j1_over_z_series(z)
    } else if a <= INTEGRAL_LIMIT {
        z.signum() * j1_integral(a)
    } else {
        z.signum() * j1_asymptotic(a)
    }
}

/// `J1(z) / z`, continuous at the origin where it equals 1/2.
pub fn j1_over_z(z: f64) -> f64 {
    let a = z.abs();
    if a <= SERIES_LIMIT {
        j1_over_z_series(z)
    } else if a <= INTEGRAL_LIMIT {
        j1_integral(a) / a
    } else {
        j1_asymptotic(a) / a
    }
}

/// `J1(z) = (1/pi) ∫_0^pi cos(τ - z sin τ) dτ` by the trapezoid rule, which converges
/// geometrically because the integrand extends to a smooth periodic function.
pub fn j1_integral(z: f64) -> f64 {
    let h = PI / INTEGRAL_PANELS as f64;
    let f = |tau: f64| (tau - z * tau.sin()).cos();
    let inner: f64 = (1..INTEGRAL_PANELS).map(|i| f(i as f64 * h)).sum();
    (inner + 0.5 * (f(0.0) + f(PI))) / INTEGRAL_PANELS as f64
}

/// Power series of `J1(z)/z = 1/2 sum (-z^2/4)^m / (m! (m+1)!)`.
pub fn j1_over_z_series(z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 0.5;
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= q / (m * (m + 1.0));
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) && m > 0.5 * z.abs() {
            break;
        }
        m += 1.0;
        if m > 400.0 {
            break;
        }
    }
    sum
}

/// Hankel expansion for `z > 0`, truncated at its smallest term.
pub fn j1_asymptotic(z: f64) -> f64 {
    let mu = 4.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    let mut k = 1;
    loop {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * z);
        let mag = term.abs();
        if mag >= prev || mag < 1e-17 {
            break;
        }
        prev = mag;
        // (-1)^{floor(k/2)} sign pattern of the P and Q series
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        k += 1;
        if k > 200 {
            break;
        }
    }
    let chi = z - 0.75 * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}
