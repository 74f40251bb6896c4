//! Candidate spectra: generation, enumeration in cubes, Beurling counts and the search for
//! the largest empty cube.
//!
//! All cubes are closed and axis-aligned. A cube that touches a point of the set is not
//! empty, so the largest empty cube is a supremum; reported sides are that supremum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed cube `{x : |x - center|_inf <= half_side}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cube {
    pub center: Vec<f64>,
    pub half_side: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, half_side: f64) -> Self {
        Cube { center, half_side }
    }

    pub fn centered(dim: usize, half_side: f64) -> Self {
        Cube::new(vec![0.0; dim], half_side)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn side(&self) -> f64 {
        2.0 * self.half_side
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.center)
            .all(|(xi, ci)| (xi - ci).abs() <= self.half_side)
    }

    pub fn contains_cube(&self, other: &Cube) -> bool {
        other
            .center
            .iter()
            .zip(&self.center)
            .all(|(o, c)| (o - c).abs() + other.half_side <= self.half_side)
    }

    fn validate(&self) -> Result<()> {
        if !(self.half_side.is_finite() && self.half_side > 0.0)
            || self.center.iter().any(|c| !c.is_finite())
        {
            return Err(Error::InvalidInput(
                "cube needs a positive half-side and a finite center".into(),
            ));
        }
        Ok(())
    }
}

/// `steps_1 Z x ... x steps_n Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lattice {
    pub steps: Vec<f64>,
}

/// Tagged description of a discrete frequency set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SpectrumSpec {
    DiagonalLattice {
        steps: Vec<f64>,
    },
    TranslatedLattice {
        base: Lattice,
        offset: Vec<f64>,
    },
    /// `{sum_{j < max_digits} b_j 4^j : b_j in {0, 1}}`.
    CantorDigits {
        max_digits: u32,
    },
    /// Finite list. With a `window` the list is the set restricted to that cube, and queries
    /// reaching outside it fail; without one the list is the whole set.
    Explicit {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        window: Option<Cube>,
    },
}

/// Points stored contiguously, `dim` coordinates each, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn iter(&self) -> std::slice::Chunks<'_, f64> {
        self.coords.chunks(self.dim.max(1))
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(|p| p.to_vec()).collect()
    }
}

impl SpectrumSpec {
    pub fn integer_lattice(dim: usize) -> Self {
        SpectrumSpec::DiagonalLattice {
            steps: vec![1.0; dim],
        }
    }

    pub fn lattice(steps: &[f64]) -> Self {
        SpectrumSpec::DiagonalLattice {
            steps: steps.to_vec(),
        }
    }

    pub fn translated_lattice(steps: &[f64], offset: &[f64]) -> Self {
        SpectrumSpec::TranslatedLattice {
            base: Lattice {
                steps: steps.to_vec(),
            },
            offset: offset.to_vec(),
        }
    }

    /// `prod_j (1 / a_j) Z`, the dual lattice of a box with sides `a`.
    pub fn dual_of_box(sides: &[f64]) -> Self {
        SpectrumSpec::DiagonalLattice {
            steps: sides.iter().map(|a| 1.0 / a).collect(),
        }
    }

    /// Ambient dimension; `None` for an empty explicit list without a window.
    pub fn dim(&self) -> Option<usize> {
        match self {
            SpectrumSpec::DiagonalLattice { steps } => Some(steps.len()),
            SpectrumSpec::TranslatedLattice { base, .. } => Some(base.steps.len()),
            SpectrumSpec::CantorDigits { .. } => Some(1),
            SpectrumSpec::Explicit { points, window } => points
                .first()
                .map(|p| p.len())
                .or_else(|| window.as_ref().map(|w| w.dim())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: &[f64]| v.iter().all(|s| s.is_finite() && *s > 0.0);
        match self {
            SpectrumSpec::DiagonalLattice { steps } => {
                if steps.is_empty() || !positive(steps) {
                    return Err(Error::InvalidInput("lattice steps must be positive".into()));
                }
            }
            SpectrumSpec::TranslatedLattice { base, offset } => {
                if base.steps.is_empty() || !positive(&base.steps) {
                    return Err(Error::InvalidInput("lattice steps must be positive".into()));
                }
                if offset.len() != base.steps.len() || offset.iter().any(|o| !o.is_finite()) {
                    return Err(Error::InvalidInput(
                        "offset must be finite and match the lattice dimension".into(),
                    ));
                }
            }
            SpectrumSpec::CantorDigits { max_digits } => {
                if *max_digits == 0 || *max_digits > 26 {
                    return Err(Error::InvalidInput("max_digits must be in 1..=26".into()));
                }
            }
            SpectrumSpec::Explicit { points, window } => {
                let dim = self.dim().unwrap_or(0);
                if points.iter().any(|p| p.len() != dim || p.iter().any(|c| !c.is_finite())) {
                    return Err(Error::InvalidInput(
                        "explicit points must be finite and of equal dimension".into(),
                    ));
                }
                if let Some(w) = window {
                    w.validate()?;
                    if w.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            got: w.dim(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn lattice_parts(&self) -> Option<(&[f64], Vec<f64>)> {
        match self {
            SpectrumSpec::DiagonalLattice { steps } => Some((steps, vec![0.0; steps.len()])),
            SpectrumSpec::TranslatedLattice { base, offset } => {
                Some((&base.steps, offset.clone()))
            }
            _ => None,
        }
    }

    pub fn is_lattice(&self) -> bool {
        self.lattice_parts().is_some()
    }

    /// `Λ - mu`.
    pub fn translated(&self, mu: &[f64]) -> Result<SpectrumSpec> {
        if let Some(dim) = self.dim() {
            if dim != mu.len() {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: mu.len(),
                });
            }
        }
        Ok(match self {
            SpectrumSpec::DiagonalLattice { .. } | SpectrumSpec::TranslatedLattice { .. } => {
                let (steps, offset) = self.lattice_parts().expect("lattice variant");
                SpectrumSpec::TranslatedLattice {
                    base: Lattice {
                        steps: steps.to_vec(),
                    },
                    offset: offset.iter().zip(mu).map(|(o, m)| o - m).collect(),
                }
            }
            SpectrumSpec::CantorDigits { max_digits } => SpectrumSpec::Explicit {
                points: cantor_points(*max_digits)
                    .into_iter()
                    .map(|p| vec![p - mu[0]])
                    .collect(),
                window: None,
            },
            SpectrumSpec::Explicit { points, window } => SpectrumSpec::Explicit {
                points: points
                    .iter()
                    .map(|p| p.iter().zip(mu).map(|(a, m)| a - m).collect())
                    .collect(),
                window: window.as_ref().map(|w| Cube {
                    center: w.center.iter().zip(mu).map(|(a, m)| a - m).collect(),
                    half_side: w.half_side,
                }),
            },
        })
    }
}

/// The `2^d` digit sums in increasing order.
pub fn cantor_points(max_digits: u32) -> Vec<f64> {
    let mut pts: Vec<u64> = (0u64..1 << max_digits)
        .map(|bits| {
            (0..max_digits)
                .filter(|j| bits >> j & 1 == 1)
                .map(|j| 4u64.pow(j))
                .sum()
        })
        .collect();
    pts.sort_unstable();
    pts.into_iter().map(|p| p as f64).collect()
}

/// Coordinates `offset + m * step` lying in `[lo, hi]`, ascending.
fn axis_coords(step: f64, offset: f64, lo: f64, hi: f64) -> Vec<f64> {
    let first = ((lo - offset) / step).floor() as i64 - 1;
    let last = ((hi - offset) / step).ceil() as i64 + 1;
    (first..=last)
        .map(|m| offset + m as f64 * step)
        .filter(|x| *x >= lo && *x <= hi)
        .collect()
}

fn check_query(s: &SpectrumSpec, cube: &Cube) -> Result<()> {
    cube.validate()?;
    if let Some(dim) = s.dim() {
        if dim != cube.dim() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: cube.dim(),
            });
        }
    }
    if let SpectrumSpec::Explicit {
        window: Some(w), ..
    } = s
    {
        if !w.contains_cube(cube) {
            return Err(Error::Unbounded);
        }
    }
    Ok(())
}

/// Points of `s` in the closed cube, lexicographic, stored flat.
pub fn enumerate_flat(s: &SpectrumSpec, cube: &Cube) -> Result<PointSet> {
    s.validate()?;
    check_query(s, cube)?;
    let dim = cube.dim();
    let h = cube.half_side;
    if let Some((steps, offset)) = s.lattice_parts() {
        let axes: Vec<Vec<f64>> = (0..dim)
            .map(|j| axis_coords(steps[j], offset[j], cube.center[j] - h, cube.center[j] + h))
            .collect();
        let total: usize = axes.iter().map(|a| a.len()).product();
        let mut coords = Vec::with_capacity(total * dim);
        if total > 0 {
            let mut idx = vec![0usize; dim];
            loop {
                coords.extend(idx.iter().enumerate().map(|(j, &i)| axes[j][i]));
                let mut j = dim;
                loop {
                    if j == 0 {
                        return Ok(PointSet { dim, coords });
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < axes[j].len() {
                        break;
                    }
                    idx[j] = 0;
                }
            }
        }
        return Ok(PointSet { dim, coords });
    }
    let mut pts: Vec<Vec<f64>> = match s {
        SpectrumSpec::CantorDigits { max_digits } => cantor_points(*max_digits)
            .into_iter()
            .map(|p| vec![p])
            .collect(),
        SpectrumSpec::Explicit { points, .. } => points.clone(),
        _ => unreachable!("lattices handled above"),
    };
    pts.retain(|p| cube.contains(p));
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pts.dedup();
    Ok(PointSet {
        dim,
        coords: pts.into_iter().flatten().collect(),
    })
}

/// Points of `s` in the closed cube, lexicographic.
pub fn enumerate(s: &SpectrumSpec, cube: &Cube) -> Result<Vec<Vec<f64>>> {
    Ok(enumerate_flat(s, cube)?.to_vecs())
}

/// Number of points in the closed cube.
pub fn count_in(s: &SpectrumSpec, cube: &Cube) -> Result<usize> {
    if let Some((steps, offset)) = s.lattice_parts() {
        s.validate()?;
        check_query(s, cube)?;
        let h = cube.half_side;
        return Ok((0..cube.dim())
            .map(|j| axis_coords(steps[j], offset[j], cube.center[j] - h, cube.center[j] + h).len())
            .product());
    }
    Ok(enumerate_flat(s, cube)?.len())
}

/// Upper and lower Beurling counts `max / min_x #(Λ ∩ Q_R(x))` over the given centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeurlingCounts {
    pub upper: usize,
    pub lower: usize,
}

pub fn beurling_counts(s: &SpectrumSpec, r: f64, centers: &[Vec<f64>]) -> Result<BeurlingCounts> {
    if centers.is_empty() {
        return Err(Error::InvalidInput("need at least one center".into()));
    }
    let counts = centers
        .par_iter()
        .map(|c| count_in(s, &Cube::new(c.clone(), r)))
        .collect::<Result<Vec<usize>>>()?;
    Ok(BeurlingCounts {
        upper: *counts.iter().max().expect("nonempty"),
        lower: *counts.iter().min().expect("nonempty"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Analytic,
    GridSearch,
}

/// Largest empty closed cube inside a search region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmptyCube {
    /// Supremum of the sides of empty cubes (`2R`).
    pub side: f64,
    pub witness_center: Vec<f64>,
    pub search_resolution: f64,
    pub method: SearchMethod,
    /// The region itself holds no point, so the answer is capped at the region size.
    pub saturated: bool,
}

/// Searches cubes contained in `region` for the largest one avoiding `s`.
///
/// Lattices are handled in closed form: a product lattice misses a cube exactly when one
/// coordinate interval falls between consecutive lattice coordinates, so the supremum is the
/// largest step. Other sets are scanned on a grid of centers plus midpoints between
/// neighbouring points, halving the grid until the answer moves by less than 1%.
pub fn max_empty_cube(s: &SpectrumSpec, region: &Cube, resolution: f64) -> Result<EmptyCube> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::InvalidInput("resolution must be positive".into()));
    }
    s.validate()?;
    check_query(s, region)?;
    let inside = enumerate_flat(s, region)?;
    if inside.is_empty() {
        return Ok(EmptyCube {
            side: region.side(),
            witness_center: region.center.clone(),
            search_resolution: resolution,
            method: SearchMethod::Analytic,
            saturated: true,
        });
    }
    let widest = s.lattice_parts().map(|(steps, offset)| {
        let (axis, step) = steps
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (j, &st)| if st > best.1 { (j, st) } else { best });
        (axis, step, offset)
    });
    // the closed form needs a whole gap of the widest axis to fit inside the region
    if let Some((axis, step, offset)) = widest.filter(|w| region.side() >= 2.0 * w.1) {
        let side = step;
        // gap midpoint nearest the region center along the widest axis
        let c = region.center[axis];
        let m = ((c - offset[axis]) / step - 0.5).round();
        let mut mid = offset[axis] + (m + 0.5) * step;
        let lim = region.half_side - 0.5 * side;
        if (mid - c).abs() > lim {
            mid += if mid > c { -step } else { step };
        }
        let mut witness = region.center.clone();
        witness[axis] = mid;
        let probe = Cube::new(witness.clone(), 0.5 * side * (1.0 - 1e-9));
        if count_in(s, &probe)? != 0 {
            return Err(Error::InconsistentGeometry(
                "lattice gap witness is not empty".into(),
            ));
        }
        return Ok(EmptyCube {
            side,
            witness_center: witness,
            search_resolution: resolution,
            method: SearchMethod::Analytic,
            saturated: false,
        });
    }
    let mut res = resolution;
    let mut best = grid_search(&inside, region, res);
    for _ in 0..8 {
        let next = grid_search(&inside, region, res / 2.0);
        let stable = (next.0 - best.0).abs() <= 0.01 * next.0.max(f64::MIN_POSITIVE);
        if next.0 > best.0 {
            best = next;
        }
        res /= 2.0;
        if stable {
            break;
        }
    }
    let (side, witness) = best;
    let probe = Cube::new(witness.clone(), 0.5 * side * (1.0 - 1e-9));
    if side > 0.0 && count_in(s, &probe)? != 0 {
        return Err(Error::InconsistentGeometry("gap witness is not empty".into()));
    }
    Ok(EmptyCube {
        side,
        witness_center: witness,
        search_resolution: res,
        method: SearchMethod::GridSearch,
        saturated: false,
    })
}

/// Side of the largest empty cube centred at `c` inside the region.
fn empty_side_at(points: &PointSet, region: &Cube, c: &[f64]) -> f64 {
    let wall = c
        .iter()
        .zip(&region.center)
        .map(|(x, rc)| region.half_side - (x - rc).abs())
        .fold(f64::INFINITY, f64::min);
    if wall < 0.0 {
        return 0.0;
    }
    let nearest = points
        .iter()
        .map(|p| {
            p.iter()
                .zip(c)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    2.0 * nearest.min(wall)
}

fn grid_search(points: &PointSet, region: &Cube, res: f64) -> (f64, Vec<f64>) {
    let dim = region.dim();
    let per_axis = (region.side() / res).floor() as usize + 1;
    let total = per_axis.pow(dim as u32);
    let lo: Vec<f64> = region.center.iter().map(|c| c - region.half_side).collect();
    let mut candidates: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .map(|mut flat| {
            (0..dim)
                .map(|j| {
                    let i = flat % per_axis;
                    flat /= per_axis;
                    (lo[j] + i as f64 * res).min(lo[j] + region.side())
                })
                .collect()
        })
        .collect();
    let pts: Vec<&[f64]> = points.iter().collect();
    for w in pts.windows(2) {
        candidates.push(w[0].iter().zip(w[1]).map(|(a, b)| 0.5 * (a + b)).collect());
    }
    candidates
        .par_iter()
        .map(|c| (empty_side_at(points, region, c), c.clone()))
        .reduce(
            || (f64::NEG_INFINITY, Vec::new()),
            |a, b| {
                // ties go to the lexicographically smaller center for determinism
                if b.0 > a.0 || (b.0 == a.0 && lex_less(&b.1, &a.1)) {
                    b
                } else {
                    a
                }
            },
        )
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    if b.is_empty() {
        return true;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .is_some_and(|o| o.is_lt())
}

/// Largest gap of the digit set for each number of digits `1..=max_digits`.
pub fn cantor_gap_growth(max_digits: u32) -> Result<Vec<(u32, f64)>> {
    (1..=max_digits)
        .map(|d| {
            let pts = cantor_points(d);
            let top = *pts.last().expect("nonempty");
            let region = Cube::new(vec![0.5 * top], 0.5 * top);
            let gap = max_empty_cube(&SpectrumSpec::CantorDigits { max_digits: d }, &region, 0.25)?;
            Ok((d, gap.side))
        })
        .collect()
}

/// Largest empty cube plus the theoretical radius it is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub gap_radius: f64,
    pub c_used: f64,
    pub empirical_side: f64,
    pub witness_center: Vec<f64>,
    pub search_resolution: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lattice_enumeration() {
        let z2 = SpectrumSpec::integer_lattice(2);
        let pts = enumerate(&z2, &Cube::centered(2, 1.5)).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![-1.0, -1.0]);
        assert_eq!(pts[1], vec![-1.0, 0.0]);
        let shifted = SpectrumSpec::translated_lattice(&[1.0, 1.0], &[0.5, 0.0]);
        assert!(enumerate(&shifted, &Cube::centered(2, 0.4)).unwrap().is_empty());
        // closed cubes keep boundary points
        assert_eq!(enumerate(&z2, &Cube::centered(2, 1.0)).unwrap().len(), 9);
    }

    #[test]
    fn cantor_enumeration() {
        let s = SpectrumSpec::CantorDigits { max_digits: 3 };
        let pts: Vec<f64> = enumerate(&s, &Cube::new(vec![10.5], 10.5))
            .unwrap()
            .into_iter()
            .map(|p| p[0])
            .collect();
        assert_eq!(pts, vec![0.0, 1.0, 4.0, 5.0, 16.0, 17.0, 20.0, 21.0]);
        assert_eq!(cantor_points(6).len(), 64);
    }

    #[test]
    fn explicit_window_is_enforced() {
        let s = SpectrumSpec::Explicit {
            points: vec![vec![0.0], vec![1.0]],
            window: Some(Cube::new(vec![0.0], 2.0)),
        };
        assert_eq!(enumerate(&s, &Cube::new(vec![0.0], 1.0)).unwrap().len(), 2);
        assert!(matches!(
            enumerate(&s, &Cube::new(vec![0.0], 3.0)),
            Err(Error::Unbounded)
        ));
        let empty = SpectrumSpec::Explicit {
            points: vec![],
            window: None,
        };
        let c = beurling_counts(&empty, 1.0, &[vec![0.0, 0.0]]).unwrap();
        assert_eq!((c.upper, c.lower), (0, 0));
    }

    #[test]
    fn beurling_counts_on_z2() {
        let z2 = SpectrumSpec::integer_lattice(2);
        let mut centers = Vec::new();
        for i in 0..=20 {
            for j in 0..=20 {
                centers.push(vec![i as f64 / 20.0 + 0.013, j as f64 / 20.0 + 0.013]);
            }
        }
        centers.push(vec![0.0, 0.0]);
        let c = beurling_counts(&z2, 1.0, &centers).unwrap();
        assert_eq!(c.upper, 9);
        assert_eq!(c.lower, 4);
        let big = beurling_counts(&z2, 50.3, &[vec![0.1, 0.2]]).unwrap();
        let ratio = big.lower as f64 / (2.0 * 50.3f64).powi(2);
        assert!((ratio - 1.0).abs() < 0.02);
    }

    #[test]
    fn lattice_gaps() {
        let s = SpectrumSpec::dual_of_box(&[2.0, 0.5]);
        let g = max_empty_cube(&s, &Cube::centered(2, 10.0), 0.1).unwrap();
        assert_eq!(g.side, 2.0);
        assert_eq!(g.method, SearchMethod::Analytic);
        for t in [1.0, 2.0, 4.0, 8.0] {
            let l = SpectrumSpec::lattice(&[1.0 / t, 1.0 / t]);
            let g = max_empty_cube(&l, &Cube::centered(2, 3.0), 0.01).unwrap();
            assert_eq!(g.side, 1.0 / t);
        }
        let far = max_empty_cube(
            &SpectrumSpec::integer_lattice(2),
            &Cube::centered(2, 0.2),
            0.05,
        )
        .unwrap();
        assert!(!far.saturated);
        let none = max_empty_cube(
            &SpectrumSpec::translated_lattice(&[1.0, 1.0], &[0.5, 0.5]),
            &Cube::centered(2, 0.2),
            0.05,
        )
        .unwrap();
        assert!(none.saturated);
        assert_eq!(none.side, 0.4);
    }

    #[test]
    fn grid_search_matches_lattice_formula() {
        // an explicit copy of (1/2) Z x Z near the origin
        let mut points = Vec::new();
        for i in -12..=12 {
            for j in -6..=6 {
                points.push(vec![i as f64 * 0.5, j as f64]);
            }
        }
        let s = SpectrumSpec::Explicit {
            points,
            window: None,
        };
        let g = max_empty_cube(&s, &Cube::centered(2, 4.0), 0.125).unwrap();
        assert_eq!(g.method, SearchMethod::GridSearch);
        assert!((g.side - 1.0).abs() <= 0.125, "{}", g.side);
    }

    #[test]
    fn cantor_gaps_grow_by_four() {
        let growth = cantor_gap_growth(6).unwrap();
        for &(d, gap) in &growth {
            // gap between (4^{d-1} - 1)/3 and 4^{d-1}
            let exact = (2.0 * 4f64.powi(d as i32 - 1) + 1.0) / 3.0;
            assert!((gap - exact).abs() < 1e-9, "d {d}: {gap} vs {exact}");
        }
    }

    #[test]
    fn serde_round_trip() {
        let s = SpectrumSpec::translated_lattice(&[1.0, 1.0], &[0.5, 0.0]);
        let text = toml::to_string(&s).unwrap();
        let back: SpectrumSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    proptest! {
        #[test]
        fn enumeration_matches_counts(
            cx in -3.0f64..3.0, cy in -3.0f64..3.0, h in 0.05f64..2.5,
            ox in -1.0f64..1.0, oy in -1.0f64..1.0,
        ) {
            let s = SpectrumSpec::translated_lattice(&[0.7, 1.3], &[ox, oy]);
            let cube = Cube::new(vec![cx, cy], h);
            let pts = enumerate(&s, &cube).unwrap();
            prop_assert_eq!(pts.len(), count_in(&s, &cube).unwrap());
            for p in &pts {
                prop_assert!(cube.contains(p));
            }
            let mut sorted = pts.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assert_eq!(sorted, pts);
        }

        #[test]
        fn gap_is_translation_equivariant(mx in -5.0f64..5.0, my in -5.0f64..5.0) {
            let s = SpectrumSpec::lattice(&[0.5, 0.25]);
            let region = Cube::centered(2, 4.0);
            let a = max_empty_cube(&s, &region, 0.05).unwrap();
            let moved = s.translated(&[mx, my]).unwrap();
            let b = max_empty_cube(&moved, &region, 0.05).unwrap();
            prop_assert_eq!(a.side, b.side);
        }
    }
}
