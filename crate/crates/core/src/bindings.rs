//! Bindings between stationary points.
//!
//! Two reduced stationary points on the same curve of stationary points are
//! at most `4d` apart. Growing groups breadth-first under that distance
//! threshold splits the points into curves and isolated points.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::geom::Vec2;
use crate::stationary::StationaryPoint;

/// Largest spacing of consecutive reduced points on one curve.
pub fn delta_max(d: f64) -> f64 {
    4.0 * d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BindingKind {
    Isolated,
    Curve,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub kind: BindingKind,
    /// Sorted indices into the stationary-point list.
    pub members: Vec<usize>,
}

/// Uniform grid hash for fixed-radius queries.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    cell: f64,
    points: Vec<Vec2>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl NeighborIndex {
    /// Builds the index with square cells of side `radius`, so a query only
    /// has to visit the 3x3 block of cells around the query point.
    pub fn new(points: &[Vec2], radius: f64) -> Self {
        assert!(radius > 0.0, "query radius must be positive");
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (k, &p) in points.iter().enumerate() {
            buckets.entry(cell_of(p, radius)).or_default().push(k);
        }
        NeighborIndex {
            cell: radius,
            points: points.to_vec(),
            buckets,
        }
    }

    /// Indices of all points within `radius` (inclusive) of `q`, ascending.
    /// `radius` must not exceed the cell size the index was built with.
    pub fn within(&self, q: Vec2, radius: f64) -> Vec<usize> {
        debug_assert!(radius <= self.cell);
        let (cx, cy) = cell_of(q, self.cell);
        let mut out = Vec::new();
        for ix in cx - 1..=cx + 1 {
            for iy in cy - 1..=cy + 1 {
                if let Some(bucket) = self.buckets.get(&(ix, iy)) {
                    out.extend(
                        bucket
                            .iter()
                            .copied()
                            .filter(|&k| self.points[k].dist(q) <= radius),
                    );
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn cell_of(p: Vec2, cell: f64) -> (i64, i64) {
    ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
}

/// Groups points into bindings: the connected components of the graph that
/// links points at most `dmax` apart.
///
/// Points are visited in list order. Each unvisited point seeds a binding,
/// which grows by pulling in every point within `dmax` of any member.
pub fn cluster(points: &[Vec2], dmax: f64) -> Vec<Binding> {
    if points.is_empty() {
        return Vec::new();
    }
    let index = NeighborIndex::new(points, dmax);
    let mut assigned = vec![false; points.len()];
    let mut bindings = Vec::new();
    let mut queue = VecDeque::new();
    for seed in 0..points.len() {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        queue.push_back(seed);
        let mut members = Vec::new();
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for w in index.within(points[u], dmax) {
                if !assigned[w] {
                    assigned[w] = true;
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        let kind = if members.len() == 1 {
            BindingKind::Isolated
        } else {
            BindingKind::Curve
        };
        bindings.push(Binding { kind, members });
    }
    bindings
}

pub fn cluster_points(points: &[StationaryPoint], dmax: f64) -> Vec<Binding> {
    let positions: Vec<Vec2> = points.iter().map(|p| p.position).collect();
    cluster(&positions, dmax)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub members: usize,
    pub min: Vec2,
    pub max: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BindingSummary {
    pub isolated: usize,
    pub curves: usize,
    pub curve_details: Vec<CurveSummary>,
}

pub fn summarize(bindings: &[Binding], points: &[StationaryPoint]) -> BindingSummary {
    let mut summary = BindingSummary::default();
    for b in bindings {
        match b.kind {
            BindingKind::Isolated => summary.isolated += 1,
            BindingKind::Curve => {
                summary.curves += 1;
                let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
                let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for &k in &b.members {
                    let p = points[k].position;
                    min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
                    max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
                }
                summary.curve_details.push(CurveSummary {
                    members: b.members.len(),
                    min,
                    max,
                });
            }
        }
    }
    summary
}

/// Orders the members of a curve into a polyline by nearest-neighbour
/// chaining, starting from the member farthest from the centroid.
pub fn chain(points: &[Vec2], members: &[usize]) -> Vec<usize> {
    if members.len() <= 2 {
        return members.to_vec();
    }
    let n = members.len() as f64;
    let centroid = members.iter().fold(Vec2::ZERO, |acc, &k| acc + points[k]) * (1.0 / n);
    let start = members
        .iter()
        .copied()
        .max_by(|&a, &b| {
            points[a]
                .dist(centroid)
                .total_cmp(&points[b].dist(centroid))
                .then(b.cmp(&a))
        })
        .unwrap();
    let mut left: Vec<usize> = members.iter().copied().filter(|&k| k != start).collect();
    let mut order = vec![start];
    let mut cur = start;
    while !left.is_empty() {
        let (pos, _) = left
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| {
                points[a]
                    .dist(points[cur])
                    .total_cmp(&points[b].dist(points[cur]))
                    .then(a.cmp(&b))
            })
            .unwrap();
        cur = left.swap_remove(pos);
        order.push(cur);
    }
    order
}
