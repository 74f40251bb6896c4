//! Empirical checks of the frame inequality `A ||f||^2 <= sum |f^(λ)|^2 <= B ||f||^2`:
//! Gram matrices, orthogonality residuals, the tight frame of the disk and finite-section
//! estimates of `A` and `B`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{points_between, shell_sums, transform_mass};
use crate::domains::{total_mass, DomainSpec};
use crate::error::{Error, Result};
use crate::fourier::{chi_hat, chi_hat_disk};
use crate::numeric::pairwise_sum;
use crate::spectra::{enumerate, enumerate_flat, Cube, SpectrumSpec};

/// Default number of random coefficient vectors.
pub const DEFAULT_TESTS: usize = 64;

/// Share of the transform mass a truncation must capture.
pub const REQUIRED_CAPTURE: f64 = 0.99;

/// `G[i][j] = <e_{p_j}, e_{p_i}>_{L^2(D)} = chi_hat_D(p_i - p_j)`.
pub fn gram_matrix(d: &DomainSpec, points: &[Vec<f64>]) -> Result<DMatrix<Complex64>> {
    let m = points.len();
    for (i, p) in points.iter().enumerate() {
        if points[..i].contains(p) {
            return Err(Error::InvalidInput(format!("duplicate point {p:?}")));
        }
    }
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (i..m)
                .map(|j| {
                    let diff: Vec<f64> = points[i]
                        .iter()
                        .zip(&points[j])
                        .map(|(a, b)| a - b)
                        .collect();
                    Ok(chi_hat(d, &diff)?.complex())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut g = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + off;
            if i == j {
                g[(i, i)] = Complex64::new(v.re, 0.0);
            } else {
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
    }
    Ok(g)
}

/// `max |G - mass I|` over the spectrum points inside the truncation cube.
pub fn orthobasis_residual(d: &DomainSpec, s: &SpectrumSpec, truncation: &Cube) -> Result<f64> {
    let pts = enumerate(s, truncation)?;
    let g = gram_matrix(d, &pts)?;
    let mass = total_mass(d);
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { mass } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------------------
// eigenvalues

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn gram_eigenvalues(g: &DMatrix<Complex64>) -> Vec<f64> {
    if g.nrows() == 0 {
        return Vec::new();
    }
    let mut eig: Vec<f64> = g.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

/// Smallest and largest eigenvalues.
pub fn extreme_eigenvalues(g: &DMatrix<Complex64>) -> (f64, f64) {
    let eig = gram_eigenvalues(g);
    match (eig.last(), eig.first()) {
        (Some(lo), Some(hi)) => (*lo, *hi),
        _ => (0.0, 0.0),
    }
}

// ---------------------------------------------------------------------------------------
// tight frame of the disk

/// Family of test functions `f = sum_ν c_ν e^{2 pi i ν·x}` restricted to the disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum TestFamily {
    Indicator,
    SingleExponential { nu: [f64; 2] },
    /// `count` functions with `terms` random frequencies in `[-1/r, 1/r]^2`.
    RandomCombos { count: usize, terms: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub frequencies: Vec<[f64; 2]>,
    pub coefficients: Vec<Complex64>,
}

impl TestFamily {
    pub fn expand(&self, r: f64) -> Vec<TestFunction> {
        match self {
            TestFamily::Indicator => vec![TestFunction {
                frequencies: vec![[0.0, 0.0]],
                coefficients: vec![Complex64::new(1.0, 0.0)],
            }],
            TestFamily::SingleExponential { nu } => vec![TestFunction {
                frequencies: vec![*nu],
                coefficients: vec![Complex64::new(1.0, 0.0)],
            }],
            TestFamily::RandomCombos { count, terms, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count)
                    .map(|_| TestFunction {
                        frequencies: (0..*terms)
                            .map(|_| [rng.gen_range(-1.0..1.0) / r, rng.gen_range(-1.0..1.0) / r])
                            .collect(),
                        coefficients: (0..*terms)
                            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                            .collect(),
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightFrameReport {
    pub r: f64,
    pub truncation: f64,
    /// `(2r)^2`, the frame constant of `(1/2r) Z^2` on the disk.
    pub target: f64,
    /// `sum_{|λ|_inf <= L} |f^(λ)|^2 / ||f||^2` per test function.
    pub ratios: Vec<f64>,
    /// Truncated mass relative to `(2r)^2 ||f||^2`, per test function.
    pub tail_bounds: Vec<f64>,
    pub max_relative_defect: f64,
}

/// Sums `|f^(λ)|^2` over `λ ∈ (1/2r) Z^2` with `|λ|_inf <= L` for each test function.
///
/// Since the disk sits inside a square of side `2r`, the full lattice sum equals
/// `(2r)^2 ||f||^2` exactly, so the defect is exactly the truncated tail.
pub fn tight_frame_check(r: f64, family: &TestFamily, truncation: f64) -> Result<TightFrameReport> {
    if !(r > 0.0 && truncation > 0.0) {
        return Err(Error::InvalidInput("radius and truncation must be positive".into()));
    }
    let target = 4.0 * r * r;
    let lattice = SpectrumSpec::lattice(&[0.5 / r, 0.5 / r]);
    let pts = enumerate_flat(&lattice, &Cube::centered(2, truncation))?;
    let mut ratios = Vec::new();
    let mut tails = Vec::new();
    for f in family.expand(r) {
        let mut norm = Complex64::new(0.0, 0.0);
        for (nu, c) in f.frequencies.iter().zip(&f.coefficients) {
            for (nu2, c2) in f.frequencies.iter().zip(&f.coefficients) {
                let g = chi_hat_disk(r, &[nu2[0] - nu[0], nu2[1] - nu[1]])?.complex();
                norm += c * c2.conj() * g;
            }
        }
        let norm = norm.re;
        if norm <= 0.0 {
            return Err(Error::InvalidInput("test function has zero norm".into()));
        }
        let vals: Vec<f64> = pts
            .coords
            .par_chunks(2)
            .map(|lam| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (nu, c) in f.frequencies.iter().zip(&f.coefficients) {
                    acc += c * chi_hat_disk(r, &[lam[0] - nu[0], lam[1] - nu[1]])?.complex();
                }
                Ok(acc.norm_sqr())
            })
            .collect::<Result<Vec<f64>>>()?;
        let partial = pairwise_sum(&vals);
        ratios.push(partial / norm);
        tails.push(((target * norm - partial) / (target * norm)).max(0.0));
    }
    let max_relative_defect = ratios
        .iter()
        .map(|q| (q - target).abs() / target)
        .fold(0.0, f64::max);
    Ok(TightFrameReport {
        r,
        truncation,
        target,
        ratios,
        tail_bounds: tails,
        max_relative_defect,
    })
}

// ---------------------------------------------------------------------------------------
// frame bound estimates

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameMethod {
    GramEigs,
    RandomTests,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameOptions {
    /// Cube holding the frequencies of the test functions.
    pub test_cube: Cube,
    /// Cube of `Λ` over which `sum |f^(λ)|^2` is taken.
    pub truncation: Cube,
    pub n_tests: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEstimate {
    pub a_hat: f64,
    pub b_hat: f64,
    pub lambda_truncation: Cube,
    pub test_cube: Cube,
    pub n_tests: usize,
    pub seed: u64,
    /// Which estimate produced `b_hat`.
    pub method: FrameMethod,
    /// Bound on `sum |chi_hat_D|^2` outside the truncation.
    pub tail_bound: f64,
    /// Share of the transform mass inside the truncation, per the tail bound.
    pub captured: f64,
    pub gram_min_eigenvalue: f64,
    pub gram_max_eigenvalue: f64,
    /// `b_hat` never exceeds `B`; `a_hat` only approximates `A` from above.
    pub lower_bound_certified: bool,
}

/// Share of `sum |chi_hat_D(λ - c)|^2` inside the truncation cube centred at `c`, bounded via
/// the shell envelope, together with the tail bound and the half-side needed for the target.
fn truncation_capture(d: &DomainSpec, s: &SpectrumSpec, truncation: &Cube) -> Result<(f64, f64, f64)> {
    let centered = s.translated(&truncation.center)?;
    let dim = truncation.dim();
    let half = truncation.half_side;
    let inside = transform_mass(d, &enumerate_flat(&centered, &Cube::centered(dim, half))?)?;
    let finite_and_covered = match s {
        SpectrumSpec::CantorDigits { .. } => true,
        SpectrumSpec::Explicit { window: None, .. } => true,
        _ => false,
    } && enumerate_flat(&centered, &Cube::centered(dim, half * 1e6))?.len()
        == enumerate_flat(&centered, &Cube::centered(dim, half))?.len();
    if finite_and_covered || inside == 0.0 {
        return Ok((1.0, 0.0, half));
    }
    let k_top = half.log2().floor() as i32;
    if k_top < 2 {
        return Err(Error::TruncationTooSmall {
            captured: f64::NAN,
            required_half_side: 4.0,
        });
    }
    let fit = shell_sums(d, &centered, (k_top - 4).max(0), k_top - 1)?;
    if fit.fitted_c > 0.0 && fit.fitted_exponent.is_some_and(|e| e >= 0.0) {
        return Err(Error::NoDecay("transform mass does not decay across shells".into()));
    }
    // everything beyond Q_{2^k_top} is covered by whole shells
    let beyond = fit.tail_bound(k_top);
    let between = transform_mass(d, &points_between(&centered, half, 2f64.powi(k_top + 1))?)?;
    let tail = beyond.max(between);
    let captured = inside / (inside + tail);
    let mut required = half;
    let mut k = k_top;
    while fit.tail_bound(k) > (1.0 - REQUIRED_CAPTURE) / REQUIRED_CAPTURE * inside && k < 60 {
        k += 1;
        required = 2f64.powi(k);
    }
    Ok((captured, tail, required))
}

/// Finite-section estimates of the frame bounds.
///
/// Test functions are `f = sum_{μ ∈ M} c_μ e_μ` on `D` with `M` the points of `Λ` in the test
/// cube, so `f^(λ) = (G_{TM} c)_λ` and `||f||^2 = c* G_{MM} c`. The largest Rayleigh quotient
/// and the largest eigenvalue of `G_{MM}` are both lower bounds on `B`; the smallest quotient
/// estimates `A` from above.
pub fn frame_bounds_estimate(d: &DomainSpec, s: &SpectrumSpec, opts: &FrameOptions) -> Result<FrameEstimate> {
    let tests = enumerate(s, &opts.test_cube)?;
    let outer = enumerate(s, &opts.truncation)?;
    let empty = FrameEstimate {
        a_hat: 0.0,
        b_hat: 0.0,
        lambda_truncation: opts.truncation.clone(),
        test_cube: opts.test_cube.clone(),
        n_tests: opts.n_tests,
        seed: opts.seed,
        method: FrameMethod::RandomTests,
        tail_bound: 0.0,
        captured: 1.0,
        gram_min_eigenvalue: 0.0,
        gram_max_eigenvalue: 0.0,
        lower_bound_certified: false,
    };
    if tests.is_empty() || outer.is_empty() {
        return Ok(empty);
    }
    let (captured, tail_bound, required) = truncation_capture(d, s, &opts.truncation)?;
    if captured < REQUIRED_CAPTURE {
        return Err(Error::TruncationTooSmall {
            captured,
            required_half_side: required,
        });
    }
    let gmm = gram_matrix(d, &tests)?;
    let m = tests.len();
    let cross: Vec<Vec<Complex64>> = outer
        .par_iter()
        .map(|lam| {
            tests
                .iter()
                .map(|mu| {
                    let diff: Vec<f64> = lam.iter().zip(mu).map(|(a, b)| a - b).collect();
                    Ok(chi_hat(d, &diff)?.complex())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let gtm = DMatrix::from_fn(outer.len(), m, |i, j| cross[i][j]);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut quotients = Vec::with_capacity(opts.n_tests);
    for _ in 0..opts.n_tests {
        let mut c = DVector::from_fn(m, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let norm = c.norm();
        c /= Complex64::new(norm, 0.0);
        let f_norm = c.dotc(&(&gmm * &c)).re;
        if f_norm <= 0.0 {
            continue;
        }
        let hat = &gtm * &c;
        quotients.push(hat.norm_squared() / f_norm);
    }
    let (lmin, lmax) = extreme_eigenvalues(&gmm);
    if lmin < -1e-10 * lmax.max(1.0) {
        return Err(Error::InconsistentGeometry(format!(
            "Gram matrix has a negative eigenvalue {lmin}"
        )));
    }
    let q_min = quotients.iter().cloned().fold(f64::INFINITY, f64::min);
    let q_max = quotients.iter().cloned().fold(0.0, f64::max);
    let (b_hat, method) = if lmax > q_max {
        (lmax, FrameMethod::GramEigs)
    } else {
        (q_max, FrameMethod::RandomTests)
    };
    Ok(FrameEstimate {
        a_hat: q_min.min(b_hat),
        b_hat,
        method,
        tail_bound,
        captured,
        gram_min_eigenvalue: lmin,
        gram_max_eigenvalue: lmax,
        ..empty
    })
}

/// Default options for the disk and its lattice `(1/2r) Z^2`: tests in `[-1/r, 1/r]^2`, sums
/// over `[-40/r, 40/r]^2`.
pub fn disk_frame_options(r: f64, seed: u64) -> FrameOptions {
    FrameOptions {
        test_cube: Cube::centered(2, 1.0 / r),
        truncation: Cube::centered(2, 40.0 / r),
        n_tests: DEFAULT_TESTS,
        seed,
    }
}
