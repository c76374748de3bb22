//! Stationary points of a scalar field sampled on a regular 2-D grid.
//!
//! The field is interpolated piecewise: every 4x4 window of nodes gets its own
//! radial-basis-function interpolant, whose gradient roots are searched inside
//! a small box around the window centre. Duplicate detections from overlapping
//! windows are merged, and the surviving points are grouped into bindings
//! (isolated points versus connected curves of stationary points).
//!
//! ```
//! use statpoints::{grid::TestFunction, kernels::KernelKind, pipeline};
//!
//! let field = TestFunction::F2.sample(40, 40).unwrap();
//! let run = pipeline::run(&field, &pipeline::RunOptions::new(KernelKind::Gaussian)).unwrap();
//! assert!(!run.points.is_empty());
//! ```

pub mod bindings;
pub mod error;
pub mod geom;
pub mod grid;
pub mod kernels;
pub mod linalg;
pub mod oracle;
pub mod patch;
pub mod pipeline;
pub mod plot;
pub mod stationary;

pub use error::{Error, Result};
pub use geom::Vec2;
