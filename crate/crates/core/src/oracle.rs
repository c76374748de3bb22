//! Exact stationary sets of the test functions.
//!
//! Closed forms for everything except Franke's function, whose five
//! stationary points come from a multistart Newton search on its analytic
//! gradient and are stored as constants.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::geom::{Sym2, Vec2};
use crate::grid::{Domain, TestFunction};

/// Stationary points of Franke's function on `[0,1]^2`, sorted by `x`.
/// Reproduced by [`multistart_roots`] in the unit tests.
pub const FRANKE_POINTS: [Vec2; 5] = [
    Vec2::new(0.2059915703805084, 0.2080501383429426),
    Vec2::new(0.4557103793185605, 0.7841906776136744),
    Vec2::new(0.556036904214419, 0.27737587202476144),
    Vec2::new(0.6160307592684094, 0.8571405567407937),
    Vec2::new(0.7547415545824386, 0.32633819470941006),
];

/// A curve of stationary points as a map from `t` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Curve {
    Segment {
        from: Vec2,
        to: Vec2,
    },
    /// `x = shift - y^2` for `y` in `[y0, y1]`.
    Parabola {
        shift: f64,
        y0: f64,
        y1: f64,
    },
    /// Circle of `radius` about the origin, angles in radians.
    Arc {
        radius: f64,
        theta0: f64,
        theta1: f64,
    },
}

impl Curve {
    pub fn at(&self, t: f64) -> Vec2 {
        match *self {
            Curve::Segment { from, to } => from + (to - from) * t,
            Curve::Parabola { shift, y0, y1 } => {
                let y = y0 + (y1 - y0) * t;
                Vec2::new(shift - y * y, y)
            }
            Curve::Arc {
                radius,
                theta0,
                theta1,
            } => {
                let th = theta0 + (theta1 - theta0) * t;
                Vec2::new(radius * th.cos(), radius * th.sin())
            }
        }
    }

    /// `n >= 2` points, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<Vec2> {
        let n = n.max(2);
        (0..n).map(|k| self.at(k as f64 / (n - 1) as f64)).collect()
    }

    pub fn is_closed(&self) -> bool {
        matches!(*self, Curve::Arc { theta0, theta1, .. } if (theta1 - theta0).abs() >= 2.0 * PI)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub isolated: Vec<Vec2>,
    pub curves: Vec<Curve>,
}

impl GroundTruth {
    /// Distance from `p` to the nearest isolated point or curve, with curves
    /// resolved by sampling at `samples_per_curve` points.
    pub fn distance(&self, p: Vec2, samples_per_curve: usize) -> f64 {
        let iso = self.isolated.iter().map(|q| q.dist(p));
        let curves = self
            .curves
            .iter()
            .flat_map(|c| c.sample(samples_per_curve))
            .map(|q| q.dist(p));
        iso.chain(curves).fold(f64::INFINITY, f64::min)
    }
}

pub fn ground_truth(tf: TestFunction) -> GroundTruth {
    match tf {
        TestFunction::F1 => GroundTruth {
            isolated: FRANKE_POINTS.to_vec(),
            curves: Vec::new(),
        },
        TestFunction::F2 => {
            let mut isolated = Vec::with_capacity(24);
            let odd = [-FRAC_PI_2, -PI / 6.0, PI / 6.0, FRAC_PI_2];
            let even = [-PI / 3.0, 0.0, PI / 3.0];
            for &x in &odd {
                for &y in &even {
                    isolated.push(Vec2::new(x, y));
                }
            }
            for &x in &even {
                for &y in &odd {
                    isolated.push(Vec2::new(x, y));
                }
            }
            GroundTruth {
                isolated,
                curves: Vec::new(),
            }
        }
        TestFunction::F11 => GroundTruth {
            isolated: Vec::new(),
            curves: vec![Curve::Segment {
                from: Vec2::new(-1.0, -1.0),
                to: Vec2::new(1.0, 1.0),
            }],
        },
        TestFunction::F12 => GroundTruth {
            isolated: Vec::new(),
            curves: parabola_pieces(tf.domain()),
        },
        TestFunction::F13 => {
            let mut curves: Vec<Curve> = [0.25, 7.0 / 12.0, 11.0 / 12.0]
                .iter()
                .map(|&radius| Curve::Arc {
                    radius,
                    theta0: 0.0,
                    theta1: 2.0 * PI,
                })
                .collect();
            // r = 5/4 leaves the square except near the corners, where
            // both |x| <= 1 and |y| <= 1 hold.
            let radius: f64 = 1.25;
            let lo = (1.0 / radius).acos();
            let hi = (1.0 / radius).asin();
            for q in 0..4 {
                let base = q as f64 * FRAC_PI_2;
                curves.push(Curve::Arc {
                    radius,
                    theta0: base + lo,
                    theta1: base + hi,
                });
            }
            GroundTruth {
                isolated: vec![Vec2::ZERO],
                curves,
            }
        }
        TestFunction::F14 => GroundTruth {
            isolated: Vec::new(),
            curves: vec![
                Curve::Segment {
                    from: Vec2::new(-1.0, -1.0),
                    to: Vec2::new(1.0, 1.0),
                },
                Curve::Segment {
                    from: Vec2::new(-1.0, 1.0),
                    to: Vec2::new(1.0, -1.0),
                },
            ],
        },
    }
}

/// Connected pieces of `cos(x + y^2) = 0` inside `dom`: the parabolas
/// `x = pi/2 + k pi - y^2`, clipped.
fn parabola_pieces(dom: Domain) -> Vec<Curve> {
    let mut out = Vec::new();
    let kmin = ((dom.lo.x - FRAC_PI_2) / PI).floor() as i64;
    let kmax =
        ((dom.hi.x + dom.hi.y.abs().max(dom.lo.y.abs()).powi(2) - FRAC_PI_2) / PI).ceil() as i64;
    for k in kmin..=kmax {
        let shift = FRAC_PI_2 + k as f64 * PI;
        // x in [lo.x, hi.x]  <=>  y^2 in [shift - hi.x, shift - lo.x]
        let s_lo = (shift - dom.hi.x).max(0.0);
        let s_hi = shift - dom.lo.x;
        if s_hi < 0.0 {
            continue;
        }
        let (a, b) = (s_lo.sqrt(), s_hi.sqrt());
        // the y-interval is [-b, -a] U [a, b], intersected with [lo.y, hi.y]
        let mut pieces = Vec::new();
        if a == 0.0 {
            pieces.push((-b, b));
        } else {
            pieces.push((-b, -a));
            pieces.push((a, b));
        }
        for (y0, y1) in pieces {
            let (y0, y1) = (y0.max(dom.lo.y), y1.min(dom.hi.y));
            if y1 > y0 {
                out.push(Curve::Parabola { shift, y0, y1 });
            }
        }
    }
    out
}

/// Analytic gradient of a test function. The cone tip of `f13` at the origin
/// has no gradient; it is reported as zero there.
pub fn gradient(tf: TestFunction, p: Vec2) -> Vec2 {
    let (x, y) = (p.x, p.y);
    match tf {
        TestFunction::F1 => franke_derivatives(p).0,
        TestFunction::F2 => Vec2::new(
            3.0 * (3.0 * x).cos() * (3.0 * y).cos(),
            -3.0 * (3.0 * x).sin() * (3.0 * y).sin(),
        ),
        TestFunction::F11 => Vec2::new(-2.0 * (x - y), 2.0 * (x - y)),
        TestFunction::F12 => {
            let c = (x + y * y).cos();
            Vec2::new(c, 2.0 * y * c)
        }
        TestFunction::F13 => {
            let r = x.hypot(y);
            if r == 0.0 {
                return Vec2::ZERO;
            }
            let dr = 3.0 * PI * (3.0 * PI * (r + 0.25)).cos();
            Vec2::new(dr * x / r, dr * y / r)
        }
        TestFunction::F14 => {
            let s = x * x - y * y;
            Vec2::new(-8.0 * x * s, 8.0 * y * s)
        }
    }
}

/// Gradient and Hessian of Franke's function.
pub fn franke_derivatives(p: Vec2) -> (Vec2, Sym2) {
    let (x, y) = (p.x, p.y);
    // each term is  a exp(q)  with q separable and quadratic or linear
    // per axis: (a, q_x, q_y, q_xx, q_yy)
    let terms = [
        (
            0.75,
            -4.5 * (9.0 * x - 2.0),
            -4.5 * (9.0 * y - 2.0),
            -40.5,
            -40.5,
        ),
        (
            0.75,
            -18.0 * (9.0 * x + 1.0) / 49.0,
            -0.9,
            -162.0 / 49.0,
            0.0,
        ),
        (
            0.5,
            -4.5 * (9.0 * x - 7.0),
            -4.5 * (9.0 * y - 3.0),
            -40.5,
            -40.5,
        ),
        (
            -0.2,
            -18.0 * (9.0 * x - 4.0),
            -18.0 * (9.0 * y - 7.0),
            -162.0,
            -162.0,
        ),
    ];
    let values = crate::grid::franke_terms(p);
    let mut g = Vec2::ZERO;
    let mut h = Sym2 {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };
    for ((_, qx, qy, qxx, qyy), t) in terms.into_iter().zip(values) {
        g = g + Vec2::new(t * qx, t * qy);
        h.xx += t * (qx * qx + qxx);
        h.xy += t * qx * qy;
        h.yy += t * (qy * qy + qyy);
    }
    (g, h)
}

/// Distinct zeros of a gradient field found by Newton's method from `starts`
/// points of a Halton sequence over `dom`. Converged iterates that leave the
/// domain are dropped; roots closer than `dedup` are merged into the first.
pub fn multistart_roots<F>(grad_hess: F, dom: Domain, starts: usize, dedup: f64) -> Vec<Vec2>
where
    F: Fn(Vec2) -> (Vec2, Sym2),
{
    let mut roots: Vec<Vec2> = Vec::new();
    for k in 1..=starts {
        let seed = Vec2::new(
            dom.lo.x + dom.width() * halton(k, 2),
            dom.lo.y + dom.height() * halton(k, 3),
        );
        let Some(root) = newton(&grad_hess, seed, dom) else {
            continue;
        };
        if roots.iter().all(|r| r.dist(root) > dedup) {
            roots.push(root);
        }
    }
    roots.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    roots
}

fn newton<F>(grad_hess: &F, mut p: Vec2, dom: Domain) -> Option<Vec2>
where
    F: Fn(Vec2) -> (Vec2, Sym2),
{
    for _ in 0..100 {
        let (g, h) = grad_hess(p);
        if g.norm() <= 1e-13 {
            return dom.contains(p, 0.0).then_some(p);
        }
        let step = h.solve(g)?;
        p = p - step;
        if !p.is_finite() || !dom.contains(p, 0.5 * dom.width().max(dom.height())) {
            return None;
        }
    }
    None
}

/// Radical inverse of `k` in `base`.
fn halton(mut k: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while k > 0 {
        f /= base as f64;
        r += f * (k % base) as f64;
        k /= base;
    }
    r
}
