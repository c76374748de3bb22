//! The full run: window sweep, duplicate reduction, binding detection, and
//! the JSON report.

use std::collections::BTreeMap;
use std::path::Path;
#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
use std::time::Instant;

#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
use web_time::Instant;

use serde::{Deserialize, Serialize};

use crate::bindings::{self, Binding, BindingSummary};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::grid::{GridField, TestFunction};
use crate::kernels::{self, Kernel, KernelKind};
use crate::patch::{Baseline, PatchMatrix};
use crate::stationary::{self, Classification, SolverConfig, StationaryPoint, Sweep};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub kernel: KernelKind,
    /// Replaces the shape parameter derived from the grid spacing.
    pub alpha: Option<f64>,
    pub solver: SolverConfig,
    /// Worker threads for the sweep; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn new(kernel: KernelKind) -> Self {
        RunOptions {
            kernel,
            alpha: None,
            solver: SolverConfig::default(),
            threads: None,
        }
    }
}

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Timings {
    pub sweep: f64,
    pub reduce: f64,
    pub cluster: f64,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub kernel: Kernel,
    /// Shape parameter the grid spacing implies, whether or not it was used.
    pub default_alpha: f64,
    pub d: f64,
    pub delta_max: f64,
    pub sweep: Sweep,
    pub points: Vec<StationaryPoint>,
    pub bindings: Vec<Binding>,
    pub summary: BindingSummary,
    pub timings: Timings,
}

pub fn run(field: &GridField, opts: &RunOptions) -> Result<Run> {
    match opts.threads {
        None => run_here(field, opts),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Threads(e.to_string()))?;
            pool.install(|| run_here(field, opts))
        }
    }
}

fn run_here(field: &GridField, opts: &RunOptions) -> Result<Run> {
    let d = field.diag_step();
    let default_alpha = kernels::shape_parameter(opts.kernel, d)?;
    let kernel = Kernel::new(opts.kernel, opts.alpha.unwrap_or(default_alpha))?;

    let t = Instant::now();
    let matrix = PatchMatrix::build(kernel, field.dx(), field.dy())?;
    let sweep = stationary::sweep_with(field, &matrix, &opts.solver)?;
    let sweep_ms = elapsed_ms(t);

    let t = Instant::now();
    let positions: Vec<Vec2> = sweep.raw.iter().map(|r| r.position).collect();
    let merged = stationary::reduce(&positions, d);
    let points = stationary::describe(field, &matrix, &sweep.raw, &merged, opts.solver.baseline)?;
    let reduce_ms = elapsed_ms(t);

    let t = Instant::now();
    let delta_max = bindings::delta_max(d);
    let found = bindings::cluster_points(&points, delta_max);
    let summary = bindings::summarize(&found, &points);
    let cluster_ms = elapsed_ms(t);

    Ok(Run {
        kernel,
        default_alpha,
        d,
        delta_max,
        sweep,
        points,
        bindings: found,
        summary,
        timings: Timings {
            sweep: sweep_ms,
            reduce: reduce_ms,
            cluster: cluster_ms,
        },
    })
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Where the field came from and its geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub function: Option<TestFunction>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<String>,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin: Vec2,
}

impl InputDescriptor {
    pub fn for_function(tf: TestFunction, field: &GridField) -> Self {
        Self::geometry(field, Some(tf), None)
    }

    pub fn for_file(path: &Path, field: &GridField) -> Self {
        Self::geometry(field, None, Some(path.display().to_string()))
    }

    fn geometry(field: &GridField, function: Option<TestFunction>, path: Option<String>) -> Self {
        InputDescriptor {
            function,
            path,
            nx: field.nx(),
            ny: field.ny(),
            dx: field.dx(),
            dy: field.dy(),
            origin: field.origin(),
        }
    }

    /// Errors unless `field` has this geometry.
    pub fn check(&self, field: &GridField) -> Result<()> {
        let same = self.nx == field.nx()
            && self.ny == field.ny()
            && self.dx == field.dx()
            && self.dy == field.dy()
            && self.origin == field.origin();
        if same {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "report is for a {}x{} grid with spacing ({}, {}) at {:?}, field is {}x{} with spacing ({}, {}) at {:?}",
                self.nx,
                self.ny,
                self.dx,
                self.dy,
                self.origin,
                field.nx(),
                field.ny(),
                field.dx(),
                field.dy(),
                field.origin()
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub class: Classification,
    pub merged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub isolated: usize,
    pub curves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub patches: usize,
    pub raw_roots: usize,
    pub flat_patches: usize,
    pub seeds_per_axis: usize,
    pub baseline: Baseline,
}

/// Serializable result of a run.
///
/// Timings vary between runs, so they are only filled in on request; without
/// them the JSON is a pure function of the field and the options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input: InputDescriptor,
    pub kernel: KernelKind,
    pub alpha: f64,
    pub alpha_default: f64,
    pub alpha_overridden: bool,
    pub d: f64,
    pub delta_max: f64,
    pub counts: Counts,
    pub stationary_points: Vec<PointRecord>,
    pub bindings: Vec<Binding>,
    pub diagnostics: Diagnostics,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(input: InputDescriptor, opts: &RunOptions, run: &Run, with_timings: bool) -> Self {
        let mut timings_ms = BTreeMap::new();
        if with_timings {
            timings_ms.insert("sweep".to_string(), run.timings.sweep);
            timings_ms.insert("reduce".to_string(), run.timings.reduce);
            timings_ms.insert("cluster".to_string(), run.timings.cluster);
        }
        RunReport {
            input,
            kernel: run.kernel.kind(),
            alpha: run.kernel.alpha(),
            alpha_default: run.default_alpha,
            alpha_overridden: opts.alpha.is_some(),
            d: run.d,
            delta_max: run.delta_max,
            counts: Counts {
                isolated: run.summary.isolated,
                curves: run.summary.curves,
            },
            stationary_points: run
                .points
                .iter()
                .map(|p| PointRecord {
                    x: p.position.x,
                    y: p.position.y,
                    value: p.value,
                    class: p.classification,
                    merged: p.members_merged,
                })
                .collect(),
            bindings: run.bindings.clone(),
            diagnostics: Diagnostics {
                patches: run.sweep.patches,
                raw_roots: run.sweep.raw.len(),
                flat_patches: run.sweep.flat_patches.len(),
                seeds_per_axis: opts.solver.seeds_per_axis,
                baseline: opts.solver.baseline,
            },
            timings_ms,
        }
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.stationary_points
            .iter()
            .map(|p| Vec2::new(p.x, p.y))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: impl AsRef<Path>) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.as_ref().to_path_buf(),
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// Errors when member indices or counts disagree with the point list.
    pub fn validate(&self) -> Result<()> {
        let n = self.stationary_points.len();
        if let Some(k) = self
            .bindings
            .iter()
            .flat_map(|b| b.members.iter())
            .find(|&&k| k >= n)
        {
            return Err(Error::Mismatch(format!(
                "binding member {k} out of range for {n} stationary points"
            )));
        }
        let isolated = self
            .bindings
            .iter()
            .filter(|b| b.kind == bindings::BindingKind::Isolated)
            .count();
        let curves = self.bindings.len() - isolated;
        if isolated != self.counts.isolated || curves != self.counts.curves {
            return Err(Error::Mismatch(format!(
                "counts say {} isolated and {} curves, bindings list {isolated} and {curves}",
                self.counts.isolated, self.counts.curves
            )));
        }
        Ok(())
    }
}
