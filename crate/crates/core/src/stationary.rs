//! Piecewise search for stationary points and reduction of duplicates.
//!
//! Every 4x4 window of the grid is interpolated and the roots of the
//! interpolant's gradient are searched with multistart Newton inside a box
//! around the window centre. Neighbouring boxes overlap by one grid step, so a
//! stationary point of the data is usually reported by several windows; the
//! reduction replaces each such group by its centroid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Sym2, Vec2};
use crate::grid::GridField;
use crate::kernels::Kernel;
use crate::patch::{
    patch_samples, Baseline, PatchInterpolant, PatchMatrix, PATCH_NODES, PATCH_SIDE,
};

/// Axis-aligned box in which roots of one window are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchDomain {
    pub lo: Vec2,
    pub hi: Vec2,
}

impl SearchDomain {
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }
}

/// Search box of the window whose first node is `(row, col)` (zero-based).
///
/// Interior windows get their central cell widened by half a grid step on
/// every side. A side that lies on the edge of the dataset is pushed out to
/// the boundary nodes instead, so the boxes tile the whole grid rectangle.
pub fn patch_domain(grid: &GridField, row: usize, col: usize) -> Result<SearchDomain> {
    let last_row = grid.ny() - PATCH_SIDE;
    let last_col = grid.nx() - PATCH_SIDE;
    if row > last_row || col > last_col {
        return Err(Error::OutOfRange {
            row,
            col,
            nx: grid.nx(),
            ny: grid.ny(),
        });
    }
    let (hx, hy) = (0.5 * grid.dx(), 0.5 * grid.dy());
    let first = grid.node_unchecked(row, col);
    let last = grid.node_unchecked(row + PATCH_SIDE - 1, col + PATCH_SIDE - 1);
    let inset_min = Vec2::new(
        if col == 0 { 0.0 } else { hx },
        if row == 0 { 0.0 } else { hy },
    );
    let inset_max = Vec2::new(
        if col == last_col { 0.0 } else { hx },
        if row == last_row { 0.0 } else { hy },
    );
    // Interior sides are measured from the central nodes so that adjacent
    // boxes share exact edges.
    let lo = Vec2::new(
        if col == 0 {
            first.x
        } else {
            grid.node_unchecked(row, col + 1).x - inset_min.x
        },
        if row == 0 {
            first.y
        } else {
            grid.node_unchecked(row + 1, col).y - inset_min.y
        },
    );
    let hi = Vec2::new(
        if col == last_col {
            last.x
        } else {
            grid.node_unchecked(row, col + 2).x + inset_max.x
        },
        if row == last_row {
            last.y
        } else {
            grid.node_unchecked(row + 2, col).y + inset_max.y
        },
    );
    Ok(SearchDomain { lo, hi })
}

/// Tuning of the per-window root search.
///
/// Lengths are in units of the diagonal step `d`; the gradient tolerance is
/// relative to `range / d`, where `range` is the spread of the field values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seeds_per_axis: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub gradient_tolerance_rel: f64,
    pub dedup_radius: f64,
    pub flat_patch_threshold: f64,
    #[serde(default)]
    pub baseline: Baseline,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seeds_per_axis: 3,
            max_iterations: 30,
            step_tolerance: 1e-10,
            gradient_tolerance_rel: 1e-8,
            dedup_radius: 1e-3,
            flat_patch_threshold: 1e-13,
            baseline: Baseline::None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.step_tolerance,
            self.gradient_tolerance_rel,
            self.dedup_radius,
            self.flat_patch_threshold,
        ];
        if self.seeds_per_axis < 2 {
            return Err(Error::Domain(format!(
                "seeds per axis must be at least 2, got {}",
                self.seeds_per_axis
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Domain("max iterations must be positive".into()));
        }
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(format!(
                "solver tolerances must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Length and value scales of a field; they make the solver tolerances
/// dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldScale {
    /// Diagonal grid step.
    pub d: f64,
    /// `max - min` of the samples.
    pub range: f64,
}

impl FieldScale {
    pub fn of(grid: &GridField) -> Self {
        let (lo, hi) = grid.value_range();
        FieldScale {
            d: grid.diag_step(),
            range: hi - lo,
        }
    }

    pub fn gradient_tolerance(&self, cfg: &SolverConfig) -> f64 {
        cfg.gradient_tolerance_rel * self.range / self.d
    }

    /// Eigenvalues of the Hessian below this are treated as zero.
    pub fn curvature_floor(&self) -> f64 {
        1e-9 * self.range / (self.d * self.d)
    }
}

/// A gradient root of one window, before duplicates are merged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawStationaryPoint {
    pub position: Vec2,
    /// First node `(row, col)` of the window that produced the root.
    pub patch: (usize, usize),
    pub seed_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Minimum,
    Maximum,
    Saddle,
    Degenerate,
}

impl Classification {
    /// Classifies from the Hessian; eigenvalues within `floor` of zero make
    /// the point degenerate.
    pub fn from_hessian(h: &Sym2, floor: f64) -> Self {
        let (l0, l1) = h.eigenvalues();
        if l0.abs() < floor || l1.abs() < floor {
            Classification::Degenerate
        } else if l0 > 0.0 {
            Classification::Minimum
        } else if l1 < 0.0 {
            Classification::Maximum
        } else {
            Classification::Saddle
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Classification::Minimum => "minimum",
            Classification::Maximum => "maximum",
            Classification::Saddle => "saddle",
            Classification::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub position: Vec2,
    pub value: f64,
    pub classification: Classification,
    pub members_merged: usize,
}

/// Outcome of searching one window.
#[derive(Debug, Clone, PartialEq)]
pub enum PatchOutcome {
    /// The samples are constant to within the flat-patch threshold; every
    /// point would be stationary, so nothing is reported.
    Flat,
    Roots(Vec<RawStationaryPoint>),
}

/// Multistart Newton search for the gradient roots of `interp` inside `dom`.
///
/// Seeds form a uniform lattice strictly inside `dom`. Iterates may leave
/// `dom` but not the window's bounding box; converged roots are kept only if
/// they lie in `dom` and are not duplicates of an earlier root.
pub fn find_patch_stationary(
    interp: &PatchInterpolant,
    samples: &[f64; PATCH_NODES],
    patch: (usize, usize),
    dom: &SearchDomain,
    cfg: &SolverConfig,
    scale: FieldScale,
) -> PatchOutcome {
    let (hmin, hmax) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let spread = hmax - hmin;
    if spread == 0.0 || spread < cfg.flat_patch_threshold * scale.range {
        return PatchOutcome::Flat;
    }

    let tol_g = scale.gradient_tolerance(cfg);
    let tol_step = cfg.step_tolerance * scale.d;
    let dedup = cfg.dedup_radius * scale.d;
    let bbox = SearchDomain {
        lo: interp.origin(),
        hi: interp.far_corner(),
    };

    let n = cfg.seeds_per_axis;
    let mut roots: Vec<RawStationaryPoint> = Vec::new();
    for seed_index in 0..n * n {
        let (a, b) = (seed_index % n, seed_index / n);
        let seed = Vec2::new(
            dom.lo.x + (a as f64 + 0.5) / n as f64 * (dom.hi.x - dom.lo.x),
            dom.lo.y + (b as f64 + 0.5) / n as f64 * (dom.hi.y - dom.lo.y),
        );
        let Some(root) = newton(interp, seed, &bbox, cfg.max_iterations, tol_step, tol_g) else {
            continue;
        };
        if !dom.contains(root) {
            continue;
        }
        if roots.iter().any(|r| r.position.dist(root) < dedup) {
            continue;
        }
        roots.push(RawStationaryPoint {
            position: root,
            patch,
            seed_index,
        });
    }
    PatchOutcome::Roots(roots)
}

/// Newton iteration on `grad f = 0`, started at `seed`.
fn newton(
    interp: &PatchInterpolant,
    seed: Vec2,
    bbox: &SearchDomain,
    max_iterations: usize,
    tol_step: f64,
    tol_g: f64,
) -> Option<Vec2> {
    let mut x = seed;
    for _ in 0..max_iterations {
        let (g, jac) = interp.gradient_and_jacobian(x);
        let jn = jac.norm();
        if !(jac.det().abs() >= 1e-14 * jn * jn) {
            return None;
        }
        let step = jac.solve(g)?;
        x = x - step;
        if !x.is_finite() || !bbox.contains(x) {
            return None;
        }
        if step.norm() <= tol_step {
            let g = interp.gradient(x);
            return (g.norm() <= tol_g).then_some(x);
        }
    }
    let g = interp.gradient(x);
    // Converged to within the gradient tolerance even if the step criterion
    // was not met in time.
    (g.norm() <= tol_g).then_some(x)
}

/// Result of running the window search across a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Roots in window order `(row, col)`, then seed order.
    pub raw: Vec<RawStationaryPoint>,
    /// Windows skipped because their samples were constant.
    pub flat_patches: Vec<(usize, usize)>,
    pub patches: usize,
}

/// Runs the window search over all `(ny - 3)(nx - 3)` windows.
///
/// Windows are processed in parallel on the current rayon pool; the output
/// order does not depend on scheduling.
pub fn sweep(grid: &GridField, kernel: Kernel, cfg: &SolverConfig) -> Result<Sweep> {
    let matrix = PatchMatrix::build(kernel, grid.dx(), grid.dy())?;
    sweep_with(grid, &matrix, cfg)
}

pub fn sweep_with(grid: &GridField, matrix: &PatchMatrix, cfg: &SolverConfig) -> Result<Sweep> {
    cfg.validate()?;
    let scale = FieldScale::of(grid);
    let rows = grid.ny() - PATCH_SIDE + 1;
    let cols = grid.nx() - PATCH_SIDE + 1;

    let outcomes: Vec<PatchOutcome> = (0..rows * cols)
        .into_par_iter()
        .map(|k| {
            let (row, col) = (k / cols, k % cols);
            let samples = patch_samples(grid, row, col)?;
            let interp = matrix.fit(grid.node_unchecked(row, col), &samples, cfg.baseline)?;
            let dom = patch_domain(grid, row, col)?;
            Ok(find_patch_stationary(
                &interp,
                &samples,
                (row, col),
                &dom,
                cfg,
                scale,
            ))
        })
        .collect::<Result<_>>()?;

    let mut raw = Vec::new();
    let mut flat_patches = Vec::new();
    for (k, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            PatchOutcome::Flat => flat_patches.push((k / cols, k % cols)),
            PatchOutcome::Roots(roots) => raw.extend(roots),
        }
    }
    Ok(Sweep {
        raw,
        flat_patches,
        patches: rows * cols,
    })
}

/// A group of raw points merged into one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedPoint {
    /// Centroid of the group.
    pub position: Vec2,
    /// Index into the raw list of the point that anchored the group.
    pub anchor: usize,
    pub members: usize,
}

/// Merges near-duplicate raw points.
///
/// Repeatedly takes the first remaining point, gathers every remaining point
/// within distance `d` of it, and replaces the group by its centroid. Only
/// distances to the anchor count, so the result depends on the input order.
pub fn reduce(raw: &[Vec2], d: f64) -> Vec<MergedPoint> {
    let mut taken = vec![false; raw.len()];
    let mut out = Vec::new();
    for anchor in 0..raw.len() {
        if taken[anchor] {
            continue;
        }
        let s1 = raw[anchor];
        let mut sum = Vec2::ZERO;
        let mut members = 0usize;
        for k in anchor..raw.len() {
            if !taken[k] && raw[k].dist(s1) <= d {
                taken[k] = true;
                sum = sum + raw[k];
                members += 1;
            }
        }
        out.push(MergedPoint {
            position: sum * (1.0 / members as f64),
            anchor,
            members,
        });
    }
    out
}

/// Attaches value and classification to merged points, evaluated on the
/// window interpolant of each group's anchor.
pub fn describe(
    grid: &GridField,
    matrix: &PatchMatrix,
    raw: &[RawStationaryPoint],
    merged: &[MergedPoint],
    baseline: Baseline,
) -> Result<Vec<StationaryPoint>> {
    let scale = FieldScale::of(grid);
    merged
        .iter()
        .map(|m| {
            let (row, col) = raw[m.anchor].patch;
            let interp = matrix.interpolant_with(grid, row, col, baseline)?;
            let hess = interp.gradient_jacobian(m.position);
            Ok(StationaryPoint {
                position: m.position,
                value: interp.eval(m.position),
                classification: Classification::from_hessian(&hess, scale.curvature_floor()),
                members_merged: m.members,
            })
        })
        .collect()
}

/// Sweep, reduction and description in one call.
pub fn find_stationary_points(
    grid: &GridField,
    matrix: &PatchMatrix,
    cfg: &SolverConfig,
) -> Result<(Sweep, Vec<StationaryPoint>)> {
    let sweep = sweep_with(grid, matrix, cfg)?;
    let positions: Vec<Vec2> = sweep.raw.iter().map(|r| r.position).collect();
    let merged = reduce(&positions, grid.diag_step());
    let points = describe(grid, matrix, &sweep.raw, &merged, cfg.baseline)?;
    Ok((sweep, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelKind;

    fn unit_grid(n: usize) -> GridField {
        GridField::new(n, n, 1.0, 1.0, Vec2::ZERO, vec![0.0; n * n]).unwrap()
    }

    #[test]
    fn interior_domain() {
        let g = unit_grid(8);
        let dom = patch_domain(&g, 1, 1).unwrap();
        assert_eq!(dom.lo, Vec2::new(1.5, 1.5));
        assert_eq!(dom.hi, Vec2::new(3.5, 3.5));
    }

    #[test]
    fn corner_domain() {
        let g = unit_grid(6);
        let dom = patch_domain(&g, 0, 0).unwrap();
        assert_eq!(dom.lo, Vec2::new(0.0, 0.0));
        assert_eq!(dom.hi, Vec2::new(2.5, 2.5));
        let far = patch_domain(&g, 2, 2).unwrap();
        assert_eq!(far.lo, Vec2::new(2.5, 2.5));
        assert_eq!(far.hi, Vec2::new(5.0, 5.0));
    }

    #[test]
    fn adjacent_domains_overlap_by_one_step() {
        let g = GridField::new(10, 10, 0.5, 0.25, Vec2::new(-1.0, 2.0), vec![0.0; 100]).unwrap();
        let a = patch_domain(&g, 3, 2).unwrap();
        let b = patch_domain(&g, 3, 3).unwrap();
        assert!((a.hi.x - b.lo.x - 0.5).abs() < 1e-12);
        let c = patch_domain(&g, 4, 3).unwrap();
        assert!((b.hi.y - c.lo.y - 0.25).abs() < 1e-12);
    }

    #[test]
    fn domain_out_of_range() {
        let g = unit_grid(6);
        assert!(patch_domain(&g, 3, 0).is_err());
        assert!(patch_domain(&g, 0, 3).is_err());
    }

    #[test]
    fn domains_cover_the_grid() {
        // Along each axis the boxes, sorted by start, must chain without gaps
        // from the first node to the last.
        for (nx, ny) in [(4, 4), (5, 9), (11, 7)] {
            let g =
                GridField::new(nx, ny, 0.3, 0.7, Vec2::new(1.0, -2.0), vec![0.0; nx * ny]).unwrap();
            let far = g.upper_corner();
            let mut reach_x = g.origin().x;
            for col in 0..=nx - 4 {
                let d = patch_domain(&g, 0, col).unwrap();
                assert!(d.lo.x <= reach_x + 1e-12);
                reach_x = d.hi.x;
            }
            assert!((reach_x - far.x).abs() < 1e-12);
            let mut reach_y = g.origin().y;
            for row in 0..=ny - 4 {
                let d = patch_domain(&g, row, 0).unwrap();
                assert!(d.lo.y <= reach_y + 1e-12);
                reach_y = d.hi.y;
            }
            assert!((reach_y - far.y).abs() < 1e-12);
        }
    }

    #[test]
    fn reduce_hand_traces() {
        let sqrt2 = 2f64.sqrt();
        let out = reduce(&[Vec2::new(0.0, 0.0), Vec2::new(0.5, 0.0)], sqrt2);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].position, Vec2::new(0.25, 0.0));
        assert_eq!(out[0].members, 2);

        let out = reduce(&[Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0)], sqrt2);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].position, Vec2::new(0.0, 0.0));
        assert_eq!(out[1].position, Vec2::new(10.0, 0.0));

        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0),
        ];
        let out = reduce(&pts, 1.5);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].position, Vec2::new(0.5, 0.0));
        assert_eq!(out[0].members, 2);
        assert_eq!(out[1].position, Vec2::new(2.0, 0.0));
        assert_eq!(out[1].anchor, 2);
    }

    #[test]
    fn reduce_of_empty_is_empty() {
        assert!(reduce(&[], 1.0).is_empty());
    }

    #[test]
    fn classification_from_hessian() {
        let c = |xx, xy, yy| Classification::from_hessian(&Sym2 { xx, xy, yy }, 1e-6);
        assert_eq!(c(2.0, 0.0, 1.0), Classification::Minimum);
        assert_eq!(c(-2.0, 0.5, -1.0), Classification::Maximum);
        assert_eq!(c(2.0, 0.0, -1.0), Classification::Saddle);
        assert_eq!(c(1.0, 1.0, 1.0), Classification::Degenerate);
    }

    fn bump_patch(kind: KernelKind) -> (PatchInterpolant, [f64; 16], SearchDomain, FieldScale) {
        // 4x4 nodes centred on the origin, so the search box is centred there too.
        let h = 0.3;
        let grid = GridField::from_fn(4, 4, h, h, Vec2::new(-1.5 * h, -1.5 * h), |p| {
            (-p.dot(p)).exp()
        })
        .unwrap();
        let kernel = Kernel::for_diagonal_step(kind, grid.diag_step()).unwrap();
        let m = PatchMatrix::build(kernel, h, h).unwrap();
        let samples = patch_samples(&grid, 0, 0).unwrap();
        let interp = m.interpolant(&grid, 0, 0).unwrap();
        let dom = patch_domain(&grid, 0, 0).unwrap();
        (interp, samples, dom, FieldScale::of(&grid))
    }

    #[test]
    fn bump_has_single_root_at_centre() {
        for kind in KernelKind::ALL {
            let (interp, samples, dom, scale) = bump_patch(kind);
            let cfg = SolverConfig::default();
            let PatchOutcome::Roots(roots) =
                find_patch_stationary(&interp, &samples, (0, 0), &dom, &cfg, scale)
            else {
                panic!("not flat");
            };
            assert_eq!(roots.len(), 1, "{kind}: {roots:?}");
            assert!(roots[0].position.norm() <= 1e-6 * scale.d);
            let tol = scale.gradient_tolerance(&cfg);
            assert!(interp.gradient(roots[0].position).norm() <= tol);
        }
    }

    #[test]
    fn monotone_field_has_no_roots() {
        let grid = GridField::from_fn(4, 4, 0.1, 0.1, Vec2::ZERO, |p| p.x).unwrap();
        for kind in KernelKind::ALL {
            let kernel = Kernel::for_diagonal_step(kind, grid.diag_step()).unwrap();
            let m = PatchMatrix::build(kernel, 0.1, 0.1).unwrap();
            let interp = m.interpolant(&grid, 0, 0).unwrap();
            let dom = patch_domain(&grid, 0, 0).unwrap();
            // dense check that the interpolant really has no root in the box
            for a in 0..=50 {
                for b in 0..=50 {
                    let x = dom.lo + Vec2::new(a as f64 * 0.006, b as f64 * 0.006);
                    assert!(interp.gradient(x).norm() > 0.1);
                }
            }
            let samples = patch_samples(&grid, 0, 0).unwrap();
            let out = find_patch_stationary(
                &interp,
                &samples,
                (0, 0),
                &dom,
                &SolverConfig::default(),
                FieldScale::of(&grid),
            );
            assert_eq!(out, PatchOutcome::Roots(vec![]));
        }
    }

    #[test]
    fn flat_field_is_flagged() {
        let grid = GridField::new(5, 4, 1.0, 1.0, Vec2::ZERO, vec![3.0; 20]).unwrap();
        let s = sweep(
            &grid,
            Kernel::new(KernelKind::Gaussian, 0.2).unwrap(),
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(s.raw.is_empty());
        assert_eq!(s.flat_patches, vec![(0, 0), (0, 1)]);
        assert_eq!(s.patches, 2);
    }

    #[test]
    fn sweep_patch_counts() {
        let kernel = Kernel::new(KernelKind::Gaussian, 1.0).unwrap();
        let g4 = crate::grid::TestFunction::F2.sample(4, 4).unwrap();
        assert_eq!(
            sweep(&g4, kernel, &SolverConfig::default())
                .unwrap()
                .patches,
            1
        );
        let g = crate::grid::TestFunction::F2.sample(120, 120).unwrap();
        assert_eq!(
            sweep(&g, kernel, &SolverConfig::default()).unwrap().patches,
            13_689
        );
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = SolverConfig {
            seeds_per_axis: 1,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig {
            dedup_radius: 0.0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn matches_dense_multistart_on_a_coarse_grid() {
        use crate::geom::Sym2;
        use crate::grid::Domain;
        use crate::oracle::multistart_roots;

        let f = |p: Vec2| (3.0 * p.x).sin() * (3.0 * p.y).cos();
        let grad_hess = |p: Vec2| {
            let (sx, cx) = (3.0 * p.x).sin_cos();
            let (sy, cy) = (3.0 * p.y).sin_cos();
            (
                Vec2::new(3.0 * cx * cy, -3.0 * sx * sy),
                Sym2 {
                    xx: -9.0 * sx * cy,
                    xy: -9.0 * cx * sy,
                    yy: -9.0 * sx * cy,
                },
            )
        };
        let dom = Domain::new(-1.0, 1.0, -1.0, 1.0);
        let n = 20;
        let step = 2.0 / (n - 1) as f64;
        let grid = GridField::from_fn(n, n, step, step, dom.lo, f).unwrap();
        let d = grid.diag_step();
        let truth = multistart_roots(grad_hess, dom, 1000, 1e-6);
        assert!(!truth.is_empty());
        for kind in KernelKind::ALL {
            let kernel = Kernel::for_diagonal_step(kind, d).unwrap();
            let m = PatchMatrix::build(kernel, step, step).unwrap();
            let (_, pts) = find_stationary_points(&grid, &m, &SolverConfig::default()).unwrap();
            let near = |p: Vec2, set: &[Vec2]| set.iter().any(|q| q.dist(p) <= d);
            let found: Vec<Vec2> = pts.iter().map(|p| p.position).collect();
            for p in &found {
                assert!(near(*p, &truth), "{kind}: spurious {p:?}");
            }
            for q in &truth {
                assert!(near(*q, &found), "{kind}: missed {q:?}");
            }
        }
    }

    #[test]
    fn mean_baseline_shifts_values_not_roots_of_a_level_field() {
        let grid = crate::grid::TestFunction::F2.sample(30, 30).unwrap();
        let shifted = GridField::from_fn(30, 30, grid.dx(), grid.dy(), grid.origin(), |p| {
            crate::grid::TestFunction::F2.eval(p) + 100.0
        })
        .unwrap();
        let kernel = Kernel::for_diagonal_step(KernelKind::Wendland31, grid.diag_step()).unwrap();
        let m = PatchMatrix::build(kernel, grid.dx(), grid.dy()).unwrap();
        let cfg = SolverConfig {
            baseline: Baseline::Mean,
            ..SolverConfig::default()
        };
        let (_, a) = find_stationary_points(&grid, &m, &cfg).unwrap();
        let (_, b) = find_stationary_points(&shifted, &m, &cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert!(p.position.dist(q.position) < 1e-6 * grid.diag_step());
            assert!((q.value - p.value - 100.0).abs() < 1e-9);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn points() -> impl Strategy<Value = Vec<Vec2>> {
            prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 0..120)
                .prop_map(|v| v.into_iter().map(|(x, y)| Vec2::new(x, y)).collect())
        }

        proptest! {
            #[test]
            fn reduce_accounts_for_every_point(raw in points(), d in 0.01..2.0f64) {
                let out = reduce(&raw, d);
                prop_assert_eq!(out.iter().map(|m| m.members).sum::<usize>(), raw.len());
                let mut anchors: Vec<usize> = out.iter().map(|m| m.anchor).collect();
                let sorted = { let mut a = anchors.clone(); a.sort_unstable(); a };
                prop_assert_eq!(&anchors, &sorted);
                anchors.dedup();
                prop_assert_eq!(anchors.len(), out.len());
                for m in &out {
                    // a centroid of points within d of the anchor stays within d of it
                    prop_assert!(m.position.dist(raw[m.anchor]) <= d * (1.0 + 1e-12));
                }
            }

            #[test]
            fn reduce_is_idempotent_on_separated_output(raw in points(), d in 0.01..2.0f64) {
                let once: Vec<Vec2> = reduce(&raw, d).iter().map(|m| m.position).collect();
                let separated = once.iter().enumerate()
                    .all(|(i, p)| once[i + 1..].iter().all(|q| q.dist(*p) > d));
                prop_assume!(separated);
                let twice: Vec<Vec2> = reduce(&once, d).iter().map(|m| m.position).collect();
                prop_assert_eq!(once, twice);
            }
        }
    }
}
