//! 16-point RBF interpolation over a sliding 4x4 window.
//!
//! The interpolation matrix only depends on the distances between the window
//! nodes, so one factorization serves every window of the grid. Each window
//! then costs a single pair of triangular solves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Sym2, Vec2};
use crate::grid::GridField;
use crate::kernels::Kernel;
use crate::linalg::{self, Lu};

/// Nodes per patch side.
pub const PATCH_SIDE: usize = 4;
/// Nodes per patch.
pub const PATCH_NODES: usize = PATCH_SIDE * PATCH_SIDE;

/// Smallest pivot accepted, relative to the largest matrix entry.
pub const PIVOT_TOL: f64 = 1e-15;
/// Iterative-refinement steps per weight solve.
pub const REFINE_STEPS: usize = 1;

/// Offset of patch node `m` from the patch's first node. Nodes are numbered
/// row-major, `m = row * 4 + col`.
fn local_offset(m: usize, dx: f64, dy: f64) -> Vec2 {
    Vec2::new((m % PATCH_SIDE) as f64 * dx, (m / PATCH_SIDE) as f64 * dy)
}

/// Interpolation matrix of the canonical 4x4 layout, factorized once.
#[derive(Debug, Clone)]
pub struct PatchMatrix {
    kernel: Kernel,
    dx: f64,
    dy: f64,
    entries: [[f64; PATCH_NODES]; PATCH_NODES],
    lu: Lu<PATCH_NODES>,
}

impl PatchMatrix {
    pub fn build(kernel: Kernel, dx: f64, dy: f64) -> Result<Self> {
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::Domain(format!(
                "spacing must be positive, got dx={dx}, dy={dy}"
            )));
        }
        let offsets: [Vec2; PATCH_NODES] = std::array::from_fn(|m| local_offset(m, dx, dy));
        let entries = interpolation_matrix(&kernel, &offsets);
        let lu = Lu::factor(&entries, PIVOT_TOL).ok_or_else(|| Error::SingularMatrix {
            kernel: kernel.kind().to_string(),
            alpha: kernel.alpha(),
        })?;
        Ok(PatchMatrix {
            kernel,
            dx,
            dy,
            entries,
            lu,
        })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn entries(&self) -> &[[f64; PATCH_NODES]; PATCH_NODES] {
        &self.entries
    }

    /// Weights `c` with `A c = h`.
    pub fn solve_weights(&self, h: &[f64; PATCH_NODES]) -> Result<[f64; PATCH_NODES]> {
        if let Some(k) = h.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "patch value {k} is not finite: {}",
                h[k]
            )));
        }
        Ok(self.lu.solve_refined(&self.entries, h, REFINE_STEPS))
    }

    /// `A c`, for residual checks.
    pub fn apply(&self, c: &[f64; PATCH_NODES]) -> [f64; PATCH_NODES] {
        linalg::mat_vec(&self.entries, c)
    }

    /// Interpolant of the window whose first node is grid node `(row, col)`.
    pub fn interpolant(
        &self,
        grid: &GridField,
        row: usize,
        col: usize,
    ) -> Result<PatchInterpolant> {
        self.interpolant_with(grid, row, col, Baseline::None)
    }

    pub fn interpolant_with(
        &self,
        grid: &GridField,
        row: usize,
        col: usize,
        baseline: Baseline,
    ) -> Result<PatchInterpolant> {
        let samples = patch_samples(grid, row, col)?;
        self.fit(grid.node_unchecked(row, col), &samples, baseline)
    }

    /// Fits the window samples. With [`Baseline::Mean`] the kernel sum
    /// interpolates the deviations from the sample mean.
    pub fn fit(
        &self,
        origin: Vec2,
        samples: &[f64; PATCH_NODES],
        baseline: Baseline,
    ) -> Result<PatchInterpolant> {
        let offset = match baseline {
            Baseline::None => 0.0,
            Baseline::Mean => samples.iter().sum::<f64>() / PATCH_NODES as f64,
        };
        let h: [f64; PATCH_NODES] = std::array::from_fn(|m| samples[m] - offset);
        let mut p = self.with_weights(origin, self.solve_weights(&h)?);
        p.offset = offset;
        Ok(p)
    }

    /// Interpolant with the given weights, anchored at `origin`.
    pub fn with_weights(&self, origin: Vec2, weights: [f64; PATCH_NODES]) -> PatchInterpolant {
        PatchInterpolant {
            origin,
            offsets: std::array::from_fn(|m| local_offset(m, self.dx, self.dy)),
            weights,
            kernel: self.kernel,
            offset: 0.0,
        }
    }
}

/// Constant added to the kernel sum of a window.
///
/// The kernel sum alone does not reproduce constants, so its ripple grows
/// with the mean level of the samples. Subtracting the mean removes that
/// ripple around flat extrema, but it also removes the interpolation wiggle
/// that closes gaps along curves of stationary points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    #[default]
    None,
    Mean,
}

/// `A[i][j] = phi(|p_i - p_j|)`.
pub fn interpolation_matrix(
    kernel: &Kernel,
    nodes: &[Vec2; PATCH_NODES],
) -> [[f64; PATCH_NODES]; PATCH_NODES] {
    let mut a = [[0.0; PATCH_NODES]; PATCH_NODES];
    for i in 0..PATCH_NODES {
        a[i][i] = kernel.phi_unchecked(0.0);
        for j in (i + 1)..PATCH_NODES {
            let v = kernel.phi_unchecked(nodes[i].dist(nodes[j]));
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

/// The 16 samples of the window starting at `(row, col)`, row-major.
pub fn patch_samples(grid: &GridField, row: usize, col: usize) -> Result<[f64; PATCH_NODES]> {
    if row + PATCH_SIDE > grid.ny() || col + PATCH_SIDE > grid.nx() {
        return Err(Error::OutOfRange {
            row,
            col,
            nx: grid.nx(),
            ny: grid.ny(),
        });
    }
    Ok(std::array::from_fn(|m| {
        grid.value_unchecked(row + m / PATCH_SIDE, col + m % PATCH_SIDE)
    }))
}

/// Absolute positions of the window nodes starting at `(row, col)`.
pub fn patch_nodes(grid: &GridField, row: usize, col: usize) -> Result<[Vec2; PATCH_NODES]> {
    patch_samples(grid, row, col)?;
    Ok(std::array::from_fn(|m| {
        grid.node_unchecked(row + m / PATCH_SIDE, col + m % PATCH_SIDE)
    }))
}

/// `f(x) = sum_m c_m phi(|x - x_m|)` over one window.
///
/// Distances are taken in coordinates local to the window's first node.
#[derive(Debug, Clone)]
pub struct PatchInterpolant {
    origin: Vec2,
    offsets: [Vec2; PATCH_NODES],
    weights: [f64; PATCH_NODES],
    kernel: Kernel,
    offset: f64,
}

impl PatchInterpolant {
    pub fn weights(&self) -> &[f64; PATCH_NODES] {
        &self.weights
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn center(&self, m: usize) -> Vec2 {
        self.origin + self.offsets[m]
    }

    pub fn centers(&self) -> [Vec2; PATCH_NODES] {
        std::array::from_fn(|m| self.center(m))
    }

    /// Corner opposite `origin`.
    pub fn far_corner(&self) -> Vec2 {
        self.center(PATCH_NODES - 1)
    }

    pub fn eval(&self, x: Vec2) -> f64 {
        let local = x - self.origin;
        self.offset
            + self
                .offsets
                .iter()
                .zip(&self.weights)
                .map(|(&o, &c)| c * self.kernel.phi_unchecked(local.dist(o)))
                .sum::<f64>()
    }

    /// `sum_m c_m psi(r_m) (x - x_m)`.
    pub fn gradient(&self, x: Vec2) -> Vec2 {
        let local = x - self.origin;
        let mut g = Vec2::ZERO;
        for (&o, &c) in self.offsets.iter().zip(&self.weights) {
            let v = local - o;
            g = g + v * (c * self.kernel.psi_unchecked(v.norm()));
        }
        g
    }

    /// Jacobian of the gradient field, i.e. the Hessian of `f`:
    /// `sum_m c_m [eta(r_m) v v^T + psi(r_m) I]` with `v = x - x_m`.
    pub fn gradient_jacobian(&self, x: Vec2) -> Sym2 {
        self.gradient_and_jacobian(x).1
    }

    pub fn gradient_and_jacobian(&self, x: Vec2) -> (Vec2, Sym2) {
        let local = x - self.origin;
        let mut g = Vec2::ZERO;
        let mut h = Sym2::default();
        for (&o, &c) in self.offsets.iter().zip(&self.weights) {
            let v = local - o;
            let r = v.norm();
            let cpsi = c * self.kernel.psi_unchecked(r);
            let ceta = c * self.kernel.eta_unchecked(r);
            g = g + v * cpsi;
            h.xx += ceta * v.x * v.x + cpsi;
            h.xy += ceta * v.x * v.y;
            h.yy += ceta * v.y * v.y + cpsi;
        }
        (g, h)
    }
}
