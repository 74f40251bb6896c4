//! Config-driven runs, example reproductions and report output.
//!
//! A run takes a domain, a spectrum and an ordered task list. Tasks share state: a
//! `frame_bounds` task feeds its bounds to later `gap` and `central` tasks, `minkowski` feeds
//! its fitted dimension and content, and `shell_sums` feeds its envelope to tail tasks.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{
    central_inequality_check, gap_radius, shell_sums, shift_difference_check, tail_integral_polygon,
    tail_sum, translation_identity_check, ShellReport,
};
use crate::domains::{
    boundary_dimension, default_eps_grid, diameter, minkowski_estimate, surface_measure, total_mass,
    BoundaryDimension, DomainSpec, Profile,
};
use crate::frames::{
    disk_frame_options, frame_bounds_estimate, orthobasis_residual, tight_frame_check, FrameOptions,
    TestFamily, DEFAULT_TESTS,
};
use crate::spectra::{cantor_gap_growth, cantor_points, max_empty_cube, Cube, GapReport, SpectrumSpec};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 7;
/// Tolerance for comparisons that are exact in exact arithmetic.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

// ---------------------------------------------------------------------------------------
// config

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub domain: DomainSpec,
    pub spectrum: SpectrumSpec,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Half-side of the frequency cube for finite sums.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
    pub tasks: Vec<Task>,
}

/// Overrides for the quantities entering the gap radius.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content: Option<f64>,
    /// The constant `C` of the radius; 1 when absent.
    #[serde(default, alias = "C", skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    /// Lower frame bound `A`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    /// Upper frame bound `B`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// Largest empty cube and the gap radius it is compared with.
    Gap {
        region_half_side: Option<f64>,
        resolution: Option<f64>,
        expected_side: Option<f64>,
    },
    FrameBounds {
        test_half_side: Option<f64>,
        n_tests: Option<usize>,
        expected: Option<f64>,
        relative_tolerance: Option<f64>,
    },
    ShellSums {
        k_min: i32,
        k_max: i32,
        expected_exponent: Option<f64>,
        exponent_tolerance: Option<f64>,
    },
    Minkowski {
        eps: Option<Vec<f64>>,
        /// Multiplies every eps of the grid.
        eps_scale: Option<f64>,
        expected_alpha: Option<f64>,
        alpha_tolerance: Option<f64>,
    },
    Orthobasis {
        max_residual: Option<f64>,
    },
    TailSum {
        r: f64,
        tolerance: Option<f64>,
    },
    Central {
        r: f64,
        truncation_k: Option<i32>,
        #[serde(default)]
        require_margin: bool,
    },
    TightFrame {
        family: Option<TestFamily>,
        max_defect: Option<f64>,
    },
    TranslationIdentity {
        h: Vec<f64>,
        lambdas: Vec<Vec<f64>>,
        max_defect: Option<f64>,
    },
    ShiftDifference {
        hs: Vec<Vec<f64>>,
    },
    TailIntegral {
        r: f64,
    },
    CantorGaps {
        max_digits: u32,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Gap { .. } => "gap",
            Task::FrameBounds { .. } => "frame_bounds",
            Task::ShellSums { .. } => "shell_sums",
            Task::Minkowski { .. } => "minkowski",
            Task::Orthobasis { .. } => "orthobasis",
            Task::TailSum { .. } => "tail_sum",
            Task::Central { .. } => "central",
            Task::TightFrame { .. } => "tight_frame",
            Task::TranslationIdentity { .. } => "translation_identity",
            Task::ShiftDifference { .. } => "shift_difference",
            Task::TailIntegral { .. } => "tail_integral",
            Task::CantorGaps { .. } => "cantor_gaps",
        }
    }
}

/// Parses a TOML config; errors name the offending line and field.
pub fn parse_config(text: &str) -> Result<Config> {
    let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported schema_version {}, expected {SCHEMA_VERSION}",
            cfg.schema_version
        )));
    }
    Ok(cfg)
}

// ---------------------------------------------------------------------------------------
// report

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    /// `|value - target| <= tolerance`.
    Near,
    /// `|value - target| <= tolerance |target|`.
    RelativeNear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, value: f64, relation: Relation, target: f64, tolerance: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= target + tolerance,
            Relation::AtLeast => value >= target - tolerance,
            Relation::Near => (value - target).abs() <= tolerance,
            Relation::RelativeNear => (value - target).abs() <= tolerance * target.abs(),
        };
        Check {
            name: name.to_string(),
            value,
            relation,
            target,
            tolerance,
            passed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Ok,
    Failed,
}

/// One plot-ready point: `x` is `k` for shell sums and `eps` for tube fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub task: String,
    pub variable: String,
    pub x: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub kind: String,
    pub status: TaskStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip)]
    pub csv: Vec<CsvRow>,
}

impl TaskResult {
    pub fn passed(&self) -> bool {
        self.status == TaskStatus::Ok && self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub tolerance: f64,
    pub truncation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    /// `example N` or `config`.
    pub source: String,
    pub inputs: Config,
    pub results: Vec<TaskResult>,
    pub provenance: Provenance,
    pub passed: bool,
}

impl Report {
    pub fn task(&self, kind: &str) -> Option<&TaskResult> {
        self.results.iter().find(|r| r.kind == kind)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn csv_rows(&self) -> Vec<&CsvRow> {
        self.results.iter().flat_map(|r| r.csv.iter()).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(e.to_string()))?;
        for row in self.csv_rows() {
            w.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the JSON report to `path` and, when there are plot points, a CSV next to it.
    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        if !self.csv_rows().is_empty() {
            self.write_csv(&path.with_extension("csv"))?;
        }
        Ok(())
    }

    /// Human-readable summary, one line per check.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<22} {:<34} {:>16} {:>13} {:>16} {:>9}  result",
            "task", "check", "value", "relation", "target", "tol"
        );
        for r in &self.results {
            if let Some(e) = &r.error {
                let _ = writeln!(out, "{:<22} error: {e}", r.kind);
                continue;
            }
            if r.checks.is_empty() {
                let _ = writeln!(out, "{:<22} (no checks)", r.kind);
            }
            for c in &r.checks {
                let rel = match c.relation {
                    Relation::AtMost => "<=",
                    Relation::AtLeast => ">=",
                    Relation::Near => "~abs",
                    Relation::RelativeNear => "~rel",
                };
                let _ = writeln!(
                    out,
                    "{:<22} {:<34} {:>16.9e} {:>13} {:>16.9e} {:>9.1e}  {}",
                    r.kind,
                    c.name,
                    c.value,
                    rel,
                    c.target,
                    c.tolerance,
                    if c.passed { "pass" } else { "FAIL" }
                );
            }
        }
        let _ = writeln!(out, "overall: {}", if self.passed { "pass" } else { "FAIL" });
        out
    }
}

// ---------------------------------------------------------------------------------------
// running

#[derive(Default)]
struct State {
    frame: Option<(f64, f64)>,
    boundary: Option<BoundaryDimension>,
    shells: Option<ShellReport>,
}

struct Ctx<'a> {
    d: &'a DomainSpec,
    s: &'a SpectrumSpec,
    params: &'a Parameters,
    seed: u64,
    tol: f64,
    truncation: Option<f64>,
}

fn max_step(s: &SpectrumSpec) -> f64 {
    match s {
        SpectrumSpec::DiagonalLattice { steps }
        | SpectrumSpec::TranslatedLattice {
            base: crate::spectra::Lattice { steps },
            ..
        } => steps.iter().cloned().fold(0.0, f64::max),
        _ => 1.0,
    }
}

/// Half-side and centre of a cube holding every point of a finite spectrum.
fn finite_extent(s: &SpectrumSpec) -> Option<(Vec<f64>, f64)> {
    match s {
        SpectrumSpec::CantorDigits { max_digits } => {
            let top = *cantor_points(*max_digits).last()?;
            Some((vec![0.5 * top], 0.5 * top))
        }
        SpectrumSpec::Explicit { points, window: None } if !points.is_empty() => {
            let dim = points[0].len();
            let lo: Vec<f64> = (0..dim)
                .map(|i| points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min))
                .collect();
            let hi: Vec<f64> = (0..dim)
                .map(|i| points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            let half = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).fold(0.0, f64::max);
            Some((lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect(), half))
        }
        _ => None,
    }
}

fn dim_of(ctx: &Ctx) -> usize {
    ctx.s.dim().unwrap_or_else(|| ctx.d.dim())
}

/// Cube for finite sums: the whole set when finite, otherwise the configured truncation.
fn sum_cube(ctx: &Ctx, default_half: f64) -> Cube {
    if let Some((center, half)) = finite_extent(ctx.s) {
        return Cube::new(center, half + 1.0);
    }
    Cube::centered(dim_of(ctx), ctx.truncation.unwrap_or(default_half))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn frame_constants(ctx: &Ctx, state: &State) -> (f64, f64, &'static str) {
    let mass = total_mass(ctx.d);
    match (ctx.params.lower_bound, ctx.params.upper_bound, state.frame) {
        (Some(a), Some(b), _) => (a, b, "override"),
        (a, b, Some((fa, fb))) => (a.unwrap_or(fa), b.unwrap_or(fb), "frame_bounds"),
        (a, b, None) => (a.unwrap_or(mass), b.unwrap_or(mass), "orthogonal"),
    }
}

fn boundary_for(ctx: &Ctx, state: &State) -> Result<BoundaryDimension> {
    let base = match state.boundary {
        Some(b) => Ok(b),
        None => boundary_dimension(ctx.d),
    };
    match (ctx.params.alpha, ctx.params.content, base) {
        (Some(alpha), Some(content), _) => Ok(BoundaryDimension {
            alpha,
            content,
            source: crate::domains::DimensionSource::Analytic,
        }),
        (alpha, content, Ok(b)) => Ok(BoundaryDimension {
            alpha: alpha.unwrap_or(b.alpha),
            content: content.unwrap_or(b.content),
            source: b.source,
        }),
        (_, _, Err(e)) => Err(e),
    }
}

fn shells_for(ctx: &Ctx, state: &mut State) -> Result<ShellReport> {
    if let Some(s) = &state.shells {
        return Ok(s.clone());
    }
    let rep = shell_sums(ctx.d, ctx.s, 2, 6)?;
    state.shells = Some(rep.clone());
    Ok(rep)
}

fn shell_csv(task: &str, rep: &ShellReport) -> Vec<CsvRow> {
    rep.sums
        .iter()
        .map(|s| CsvRow {
            task: task.into(),
            variable: "k".into(),
            x: s.k as f64,
            value: s.sum,
            bound: rep.envelope(s.k),
        })
        .collect()
}

type Outcome = (Vec<Check>, Value, Vec<CsvRow>);

fn run_task(ctx: &Ctx, state: &mut State, task: &Task) -> Result<Outcome> {
    use Relation::*;
    let mut checks = Vec::new();
    let mut csv = Vec::new();
    let data = match task {
        Task::Gap {
            region_half_side,
            resolution,
            expected_side,
        } => {
            let step = max_step(ctx.s);
            let region = match (region_half_side, finite_extent(ctx.s)) {
                (Some(h), _) => Cube::centered(dim_of(ctx), *h),
                (None, Some((center, half))) => Cube::new(center, half),
                (None, None) => Cube::centered(dim_of(ctx), 4.0 * step),
            };
            let res = resolution.unwrap_or(step / 64.0);
            let gap = max_empty_cube(ctx.s, &region, res)?;
            if let Some(e) = expected_side {
                checks.push(Check::new("empirical_side", gap.side, Near, *e, ctx.tol * e.max(1.0)));
            }
            let r_emp = 0.5 * gap.side;
            let c = ctx.params.constant.unwrap_or(1.0);
            let (a, b, frame_source) = frame_constants(ctx, state);
            let radius = boundary_for(ctx, state).and_then(|bd| {
                let r = gap_radius(a, b, bd.content, total_mass(ctx.d), ctx.d.dim(), bd.alpha, c)?;
                Ok((r, bd))
            });
            let mut data = json!({
                "empirical_side": gap.side,
                "empirical_radius": r_emp,
                "witness_center": gap.witness_center,
                "search_resolution": gap.search_resolution,
                "search_method": to_value(&gap.method),
                "saturated": gap.saturated,
                "region": to_value(&region),
                "frame_lower": a,
                "frame_upper": b,
                "frame_source": frame_source,
            });
            match radius {
                Ok((r, bd)) => {
                    data["gap_report"] = to_value(&GapReport {
                        gap_radius: r,
                        c_used: c,
                        empirical_side: gap.side,
                        witness_center: gap.witness_center.clone(),
                        search_resolution: gap.search_resolution,
                    });
                    data["boundary"] = to_value(&bd);
                    data["radius_over_empirical"] = json!(r / r_emp);
                }
                Err(e) => data["radius_error"] = json!(e.to_string()),
            }
            if let Ok(surface) = surface_measure(ctx.d) {
                data["surface_measure"] = json!(surface);
                if let DomainSpec::Box { sides } = ctx.d {
                    if *ctx.s == SpectrumSpec::dual_of_box(sides) {
                        let n = sides.len() as f64;
                        let ratio = r_emp / surface;
                        data["radius_over_surface"] = json!(ratio);
                        checks.push(Check::new("radius_over_surface_low", ratio, AtLeast, 0.25 / n, ctx.tol));
                        checks.push(Check::new("radius_over_surface_high", ratio, AtMost, 0.25, ctx.tol));
                    }
                }
            }
            if let Ok(diam) = diameter(ctx.d) {
                data["diameter"] = json!(diam);
            }
            data
        }
        Task::FrameBounds {
            test_half_side,
            n_tests,
            expected,
            relative_tolerance,
        } => {
            let opts = match ctx.d {
                DomainSpec::Disk { radius, .. } => {
                    let mut o = disk_frame_options(*radius, ctx.seed);
                    if let Some(l) = ctx.truncation {
                        o.truncation = Cube::centered(2, l);
                    }
                    if let Some(t) = test_half_side {
                        o.test_cube = Cube::centered(2, *t);
                    }
                    o.n_tests = n_tests.unwrap_or(DEFAULT_TESTS);
                    o
                }
                _ => {
                    let step = max_step(ctx.s);
                    let test_cube = match finite_extent(ctx.s) {
                        Some((center, half)) => Cube::new(center, half + 1.0),
                        None => Cube::centered(dim_of(ctx), test_half_side.unwrap_or(2.0 * step)),
                    };
                    FrameOptions {
                        truncation: sum_cube(ctx, 16.0 * step),
                        test_cube,
                        n_tests: n_tests.unwrap_or(DEFAULT_TESTS),
                        seed: ctx.seed,
                    }
                }
            };
            let est = frame_bounds_estimate(ctx.d, ctx.s, &opts)?;
            checks.push(Check::new("a_hat_le_b_hat", est.a_hat, AtMost, est.b_hat, ctx.tol * est.b_hat));
            checks.push(Check::new(
                "gram_min_eigenvalue",
                est.gram_min_eigenvalue,
                AtLeast,
                0.0,
                1e-10 * est.gram_max_eigenvalue.max(1.0),
            ));
            if let Some(e) = expected {
                let rel = relative_tolerance.unwrap_or(0.05);
                checks.push(Check::new("a_hat", est.a_hat, RelativeNear, *e, rel));
                checks.push(Check::new("b_hat", est.b_hat, RelativeNear, *e, rel));
            }
            state.frame = Some((est.a_hat, est.b_hat));
            to_value(&est)
        }
        Task::ShellSums {
            k_min,
            k_max,
            expected_exponent,
            exponent_tolerance,
        } => {
            let rep = shell_sums(ctx.d, ctx.s, *k_min, *k_max)?;
            let over = rep.sums.iter().filter(|s| s.sum > rep.envelope(s.k) * (1.0 + 1e-12)).count();
            checks.push(Check::new("shells_above_envelope", over as f64, AtMost, 0.0, 0.0));
            if let Some(e) = expected_exponent {
                let fitted = rep.fitted_exponent.unwrap_or(f64::NAN);
                checks.push(Check::new("fitted_exponent", fitted, Near, *e, exponent_tolerance.unwrap_or(0.15)));
            }
            csv = shell_csv("shell_sums", &rep);
            state.shells = Some(rep.clone());
            to_value(&rep)
        }
        Task::Minkowski {
            eps,
            eps_scale,
            expected_alpha,
            alpha_tolerance,
        } => {
            let scale = eps_scale.unwrap_or(1.0);
            let grid: Vec<f64> = eps
                .clone()
                .unwrap_or_else(default_eps_grid)
                .into_iter()
                .map(|e| e * scale)
                .collect();
            let fit = minkowski_estimate(ctx.d, &grid)?;
            if let Some(e) = expected_alpha {
                checks.push(Check::new("alpha", fit.dimension.alpha, Near, *e, alpha_tolerance.unwrap_or(0.1)));
            }
            let n = ctx.d.dim() as f64;
            csv = fit
                .samples
                .iter()
                .map(|s| CsvRow {
                    task: "minkowski".into(),
                    variable: "eps".into(),
                    x: s.eps,
                    value: s.volume,
                    bound: fit.dimension.content * s.eps.powf(n - fit.dimension.alpha),
                })
                .collect();
            state.boundary = Some(fit.dimension);
            to_value(&fit)
        }
        Task::Orthobasis { max_residual } => {
            let cube = sum_cube(ctx, 4.0 * max_step(ctx.s));
            let res = orthobasis_residual(ctx.d, ctx.s, &cube)?;
            checks.push(Check::new("residual", res, AtMost, max_residual.unwrap_or(1e-8), 0.0));
            json!({ "residual": res, "truncation": to_value(&cube), "mass": total_mass(ctx.d) })
        }
        Task::TailSum { r, tolerance } => {
            let fit = shells_for(ctx, state)?;
            let t = tail_sum(ctx.d, ctx.s, *r, &fit, tolerance.unwrap_or(1e-4))?;
            checks.push(Check::new("value_le_shell_bound", t.value, AtMost, t.shell_bound, 0.0));
            to_value(&t)
        }
        Task::Central {
            r,
            truncation_k,
            require_margin,
        } => {
            let fit = shells_for(ctx, state)?;
            let (a, _, source) = frame_constants(ctx, state);
            let k = truncation_k.unwrap_or(r.log2().ceil() as i32 + 2);
            let c = central_inequality_check(ctx.d, ctx.s, a, *r, &fit, k)?;
            checks.push(Check::new(
                "decomposition_defect",
                c.decomposition_defect,
                AtMost,
                0.0,
                ctx.tol * c.total.max(1.0),
            ));
            if *require_margin {
                checks.push(Check::new("margin", c.margin, AtLeast, 0.0, 0.0));
            }
            let mut v = to_value(&c);
            v["frame_lower"] = json!(a);
            v["frame_source"] = json!(source);
            v["truncation_k"] = json!(k);
            v
        }
        Task::TightFrame { family, max_defect } => {
            let DomainSpec::Disk { radius, .. } = ctx.d else {
                return Err(Error::Unsupported("tight_frame needs a disk domain".into()));
            };
            let family = family.clone().unwrap_or(TestFamily::Indicator);
            let l = ctx.truncation.unwrap_or(40.0 / radius);
            let rep = tight_frame_check(*radius, &family, l)?;
            checks.push(Check::new("max_relative_defect", rep.max_relative_defect, AtMost, max_defect.unwrap_or(0.01), 0.0));
            let mut v = to_value(&rep);
            v["family"] = to_value(&family);
            v
        }
        Task::TranslationIdentity { h, lambdas, max_defect } => {
            let defects = translation_identity_check(ctx.d, h, lambdas)?;
            let default = if matches!(ctx.d, DomainSpec::Box { .. }) { 1e-12 } else { 1e-6 };
            checks.push(Check::new("max_defect", defects.max(), AtMost, max_defect.unwrap_or(default), 0.0));
            to_value(&defects)
        }
        Task::ShiftDifference { hs } => {
            let bd = boundary_for(ctx, state)?;
            let rep = shift_difference_check(ctx.d, hs, &bd)?;
            to_value(&rep)
        }
        Task::TailIntegral { r } => {
            let t = tail_integral_polygon(ctx.d, *r)?;
            checks.push(Check::new("value_le_bound", t.value, AtMost, t.bound, 0.0));
            checks.push(Check::new("relative_error", t.error_estimate / t.value, AtMost, 0.1, 0.0));
            to_value(&t)
        }
        Task::CantorGaps { max_digits } => {
            let growth = cantor_gap_growth(*max_digits)?;
            let increasing = growth.windows(2).all(|w| w[1].1 > w[0].1);
            checks.push(Check::new("gaps_increasing", increasing as u8 as f64, Near, 1.0, 0.0));
            if let [.., a, b] = growth.as_slice() {
                checks.push(Check::new("last_growth_ratio", b.1 / a.1, AtLeast, 3.5, 0.0));
            }
            let rows: Vec<Value> = growth
                .iter()
                .map(|(d, g)| json!({ "digits": d, "gap": g }))
                .collect();
            json!({ "growth": rows })
        }
    };
    Ok((checks, data, csv))
}

/// Runs every task of `cfg` in order; a failing task is recorded and the batch continues.
pub fn run(cfg: &Config, source: &str) -> Result<Report> {
    cfg.domain.validate()?;
    cfg.spectrum.validate()?;
    if let Some(n) = cfg.spectrum.dim() {
        if n != cfg.domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: cfg.domain.dim(),
                got: n,
            });
        }
    }
    let ctx = Ctx {
        d: &cfg.domain,
        s: &cfg.spectrum,
        params: &cfg.parameters,
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        tol: cfg.tolerance.unwrap_or(DEFAULT_TOLERANCE),
        truncation: cfg.truncation,
    };
    let mut state = State::default();
    let results: Vec<TaskResult> = cfg
        .tasks
        .iter()
        .map(|task| match run_task(&ctx, &mut state, task) {
            Ok((checks, data, csv)) => TaskResult {
                kind: task.name().into(),
                status: TaskStatus::Ok,
                error: None,
                checks,
                data,
                csv,
            },
            Err(e) => TaskResult {
                kind: task.name().into(),
                status: TaskStatus::Failed,
                error: Some(e.to_string()),
                checks: Vec::new(),
                data: Value::Null,
                csv: Vec::new(),
            },
        })
        .collect();
    let passed = results.iter().all(|r| r.passed());
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        source: source.into(),
        inputs: cfg.clone(),
        results,
        provenance: Provenance {
            seed: ctx.seed,
            tolerance: ctx.tol,
            truncation: ctx.truncation,
        },
        passed,
    })
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Loads and runs a config file.
pub fn run_config(path: &Path) -> Result<Report> {
    run(&load_config(path)?, "config")
}

// ---------------------------------------------------------------------------------------
// examples

/// Parameter overrides for the built-in examples and for config runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Dilation factor of the fractal square.
    pub t: Option<f64>,
    /// Number of sawtooth teeth.
    pub k: Option<u32>,
    /// Disk radius.
    pub r: Option<f64>,
    /// Box sides.
    pub a: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub truncation: Option<f64>,
}

impl Overrides {
    /// Applies the run-wide settings to a config.
    pub fn apply(&self, cfg: &mut Config) {
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.tolerance.is_some() {
            cfg.tolerance = self.tolerance;
        }
        if self.truncation.is_some() {
            cfg.truncation = self.truncation;
        }
    }
}

/// The depth-6 Weierstrass square used for the scaling example.
pub fn fractal_square() -> DomainSpec {
    DomainSpec::graph(Profile::weierstrass(0.5, 4, 6))
}

fn config(domain: DomainSpec, spectrum: SpectrumSpec, tasks: Vec<Task>) -> Config {
    Config {
        schema_version: SCHEMA_VERSION,
        domain,
        spectrum,
        parameters: Parameters::default(),
        seed: None,
        tolerance: None,
        truncation: None,
        tasks,
    }
}

fn gap_task(expected_side: f64) -> Task {
    Task::Gap {
        region_half_side: None,
        resolution: None,
        expected_side: Some(expected_side),
    }
}

/// Config reproducing one of the built-in examples:
///
/// - 2: box `a` (default `(2, 1/2)`) with its dual lattice.
/// - 3: fractal square dilated by `t` (default 2) with `(1/t) Z^2`.
/// - 4: the base-4 Cantor measure with its six-digit spectrum.
/// - 5: sawtooth domain with `k` teeth (default 3) and `Z^2`.
/// - 6: disk of radius `r` (default 1) with `(1/2r) Z^2`.
pub fn example_config(id: u32, o: &Overrides) -> Result<Config> {
    let mut cfg = match id {
        2 => {
            let a = o.a.clone().unwrap_or_else(|| vec![2.0, 0.5]);
            let d = DomainSpec::boxed(&a);
            let DomainSpec::Box { sides } = &d else { unreachable!() };
            let s = SpectrumSpec::dual_of_box(sides);
            let vol: f64 = sides.iter().product();
            let smallest = *sides.last().expect("validated box");
            config(
                d.clone(),
                s,
                vec![
                    Task::Orthobasis { max_residual: None },
                    Task::FrameBounds {
                        test_half_side: None,
                        n_tests: None,
                        expected: Some(vol),
                        relative_tolerance: Some(1e-6),
                    },
                    gap_task(1.0 / smallest),
                ],
            )
        }
        3 => {
            let t = o.t.unwrap_or(2.0);
            config(
                DomainSpec::scaled(fractal_square(), t),
                SpectrumSpec::lattice(&[1.0 / t, 1.0 / t]),
                vec![
                    Task::Orthobasis { max_residual: None },
                    Task::Minkowski {
                        eps: None,
                        eps_scale: Some(t),
                        expected_alpha: None,
                        alpha_tolerance: None,
                    },
                    gap_task(1.0 / t),
                ],
            )
        }
        4 => config(
            DomainSpec::CantorMeasure4 {},
            SpectrumSpec::CantorDigits { max_digits: 6 },
            vec![
                Task::Orthobasis { max_residual: Some(1e-8) },
                Task::CantorGaps { max_digits: 6 },
                Task::Gap {
                    region_half_side: None,
                    resolution: Some(0.25),
                    expected_side: None,
                },
            ],
        ),
        5 => {
            let k = o.k.unwrap_or(3);
            config(
                DomainSpec::graph(Profile::sawtooth(k)),
                SpectrumSpec::integer_lattice(2),
                vec![
                    Task::Orthobasis { max_residual: Some(1e-10) },
                    gap_task(1.0),
                    Task::ShiftDifference {
                        hs: vec![vec![1e-3, 0.0], vec![1e-2, 0.0], vec![0.0, 1e-3], vec![0.0, 1e-2]],
                    },
                ],
            )
        }
        6 => {
            let r = o.r.unwrap_or(1.0);
            let target = 4.0 * r * r;
            config(
                DomainSpec::disk(r),
                SpectrumSpec::lattice(&[0.5 / r, 0.5 / r]),
                vec![
                    Task::TightFrame {
                        family: None,
                        max_defect: None,
                    },
                    Task::FrameBounds {
                        test_half_side: None,
                        n_tests: None,
                        expected: Some(target),
                        relative_tolerance: None,
                    },
                    gap_task(0.5 / r),
                ],
            )
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown example {other}; choose 2, 3, 4, 5 or 6"
            )))
        }
    };
    o.apply(&mut cfg);
    Ok(cfg)
}

/// Runs a built-in example.
pub fn run_example(id: u32, o: &Overrides) -> Result<Report> {
    run(&example_config(id, o)?, &format!("example {id}"))
}
