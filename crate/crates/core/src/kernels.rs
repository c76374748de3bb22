//! Radial basis functions and the shape-parameter rule.
//!
//! Each kernel is a function of the distance `r` from its centre, scaled by a
//! shape parameter `alpha` (units of 1/length). Besides `phi` and `phi'` the
//! gradient and Hessian of an RBF sum need two derived radial factors:
//!
//! * `psi(r) = phi'(r) / r`, so that `grad phi(|x|) = psi(|x|) x`;
//! * `eta(r) = (phi''(r) r - phi'(r)) / r^3 = psi'(r) / r`, so that
//!   `d/dx [psi(|x|) x] = eta(|x|) x x^T + psi(|x|) I`.
//!
//! Both are evaluated in closed forms that carry no `1/r` singularity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `exp(-(a r)^2)`
    Gaussian,
    /// `1 / (1 + (a r)^2)`
    #[serde(rename = "iq")]
    InverseQuadric,
    /// Wendland's compactly supported `(1 - a r)^4_+ (4 a r + 1)`
    Wendland31,
}

impl KernelKind {
    pub const ALL: [KernelKind; 3] = [
        KernelKind::Gaussian,
        KernelKind::InverseQuadric,
        KernelKind::Wendland31,
    ];

    /// `alpha * r` at the non-stationary inflection point of `phi`.
    pub fn omega(self) -> f64 {
        match self {
            KernelKind::Gaussian => std::f64::consts::FRAC_1_SQRT_2,
            KernelKind::InverseQuadric => 1.0 / 3f64.sqrt(),
            KernelKind::Wendland31 => 0.25,
        }
    }

    /// Short name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Gaussian => "gaussian",
            KernelKind::InverseQuadric => "iq",
            KernelKind::Wendland31 => "wendland",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" => Ok(KernelKind::Gaussian),
            "iq" | "inverse-quadric" | "inverse_quadric" => Ok(KernelKind::InverseQuadric),
            "wendland" | "wendland31" => Ok(KernelKind::Wendland31),
            _ => Err(Error::UnknownName {
                what: "kernel",
                given: s.to_string(),
                expected: "gaussian, iq, wendland".to_string(),
            }),
        }
    }
}

/// Shape parameter that puts the inflection radius of `phi` at `3d`, the
/// largest distance between two nodes of one 4x4 patch with diagonal step `d`.
pub fn shape_parameter(kind: KernelKind, d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!(
            "diagonal step must be positive, got {d}"
        )));
    }
    Ok(kind.omega() / (3.0 * d))
}

/// A radial basis function with a fixed shape parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    kind: KernelKind,
    alpha: f64,
}

impl Kernel {
    pub fn new(kind: KernelKind, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "shape parameter must be positive and finite, got {alpha}"
            )));
        }
        Ok(Kernel { kind, alpha })
    }

    /// Kernel with the default shape parameter for diagonal step `d`.
    pub fn for_diagonal_step(kind: KernelKind, d: f64) -> Result<Self> {
        Kernel::new(kind, shape_parameter(kind, d)?)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn check(r: f64) -> Result<()> {
        if r >= 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "radius must be non-negative, got {r}"
            )))
        }
    }

    pub fn phi(&self, r: f64) -> Result<f64> {
        Self::check(r)?;
        Ok(self.phi_unchecked(r))
    }

    pub fn phi_prime(&self, r: f64) -> Result<f64> {
        Self::check(r)?;
        Ok(self.phi_prime_unchecked(r))
    }

    pub fn phi_second(&self, r: f64) -> Result<f64> {
        Self::check(r)?;
        Ok(self.phi_second_unchecked(r))
    }

    pub fn psi(&self, r: f64) -> Result<f64> {
        Self::check(r)?;
        Ok(self.psi_unchecked(r))
    }

    pub fn eta(&self, r: f64) -> Result<f64> {
        Self::check(r)?;
        Ok(self.eta_unchecked(r))
    }

    // The *_unchecked variants are the hot path used by the patch interpolant,
    // where r is a Euclidean norm and cannot be negative.

    #[inline]
    pub(crate) fn phi_unchecked(&self, r: f64) -> f64 {
        let ar = self.alpha * r;
        match self.kind {
            KernelKind::Gaussian => (-ar * ar).exp(),
            KernelKind::InverseQuadric => 1.0 / (1.0 + ar * ar),
            KernelKind::Wendland31 => {
                let t = wendland_base(ar);
                t * t * t * t * (4.0 * ar + 1.0)
            }
        }
    }

    #[inline]
    pub(crate) fn phi_prime_unchecked(&self, r: f64) -> f64 {
        r * self.psi_unchecked(r)
    }

    #[inline]
    pub(crate) fn phi_second_unchecked(&self, r: f64) -> f64 {
        let a2 = self.alpha * self.alpha;
        let ar = self.alpha * r;
        match self.kind {
            KernelKind::Gaussian => (4.0 * a2 * ar * ar - 2.0 * a2) * (-ar * ar).exp(),
            KernelKind::InverseQuadric => {
                let q = 1.0 / (1.0 + ar * ar);
                (6.0 * a2 * ar * ar - 2.0 * a2) * q * q * q
            }
            KernelKind::Wendland31 => {
                let t = wendland_base(ar);
                -20.0 * a2 * t * t * (1.0 - 4.0 * ar)
            }
        }
    }

    /// `phi'(r) / r`, continuous at `r = 0`.
    #[inline]
    pub(crate) fn psi_unchecked(&self, r: f64) -> f64 {
        let a2 = self.alpha * self.alpha;
        let ar = self.alpha * r;
        match self.kind {
            KernelKind::Gaussian => -2.0 * a2 * (-ar * ar).exp(),
            KernelKind::InverseQuadric => {
                let q = 1.0 / (1.0 + ar * ar);
                -2.0 * a2 * q * q
            }
            KernelKind::Wendland31 => {
                let t = wendland_base(ar);
                -20.0 * a2 * t * t * t
            }
        }
    }

    /// `psi'(r) / r`.
    ///
    /// For the Wendland kernel this factor grows like `1/r` near the centre,
    /// while the Hessian term it multiplies, `eta(r) x x^T`, still tends to
    /// zero. At exactly `r = 0` that term vanishes, so 0 is returned there.
    #[inline]
    pub(crate) fn eta_unchecked(&self, r: f64) -> f64 {
        let a2 = self.alpha * self.alpha;
        let a4 = a2 * a2;
        let ar = self.alpha * r;
        match self.kind {
            KernelKind::Gaussian => 4.0 * a4 * (-ar * ar).exp(),
            KernelKind::InverseQuadric => {
                let q = 1.0 / (1.0 + ar * ar);
                8.0 * a4 * q * q * q
            }
            KernelKind::Wendland31 => {
                if r == 0.0 {
                    0.0
                } else {
                    let t = wendland_base(ar);
                    60.0 * a2 * self.alpha * t * t / r
                }
            }
        }
    }

    /// Radius beyond which `phi` is identically zero, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Wendland31 => Some(1.0 / self.alpha),
            _ => None,
        }
    }
}

#[inline]
fn wendland_base(ar: f64) -> f64 {
    (1.0 - ar).max(0.0)
}
