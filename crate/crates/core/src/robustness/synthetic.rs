//! Synthetic spatial networks standing in for surveyed street data.

use rand::Rng;
use rstar::{primitives::GeomWithData, RTree};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BusRoute, BusRouteSet, ComponentNotion, Edge, NodeId, Point2D, RoadNetwork};
use crate::seed;

/// Node ids are row-major: `row * cols + col`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SyntheticKind {
    Grid {
        cols: usize,
        rows: usize,
        spacing: f64,
    },
    /// A grid at least four times longer than wide with a few horizontal
    /// corridors whose segments cost `corridor_factor` of their length.
    /// Node positions are jittered by up to `jitter * spacing`.
    ElongatedGrid {
        cols: usize,
        rows: usize,
        spacing: f64,
        corridors: usize,
        corridor_factor: f64,
        jitter: f64,
    },
    RandomGeometric {
        n: usize,
        width: f64,
        height: f64,
        radius: f64,
    },
}

impl SyntheticKind {
    pub fn elongated(cols: usize, rows: usize, corridors: usize) -> Self {
        SyntheticKind::ElongatedGrid {
            cols,
            rows,
            spacing: 100.0,
            corridors,
            corridor_factor: 0.5,
            jitter: 0.1,
        }
    }
}

/// Rows carrying corridors: `round((c + 1) rows / (corridors + 1))`.
pub fn corridor_rows(rows: usize, corridors: usize) -> Vec<usize> {
    (0..corridors)
        .map(|c| (((c + 1) * rows) as f64 / (corridors + 1) as f64).round() as usize)
        .map(|r| r.min(rows - 1))
        .collect()
}

/// One route running the full length of each corridor, west to east.
pub fn corridor_routes(cols: usize, rows: usize, corridors: usize) -> Result<BusRouteSet> {
    let routes = corridor_rows(rows, corridors)
        .into_iter()
        .enumerate()
        .map(|(c, row)| BusRoute {
            route_id: format!("corridor-{}", c + 1),
            nodes: (0..cols).map(|col| NodeId((row * cols + col) as u64)).collect(),
        })
        .collect();
    BusRouteSet::new(routes)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive, got {v}")))
    }
}

fn lattice(cols: usize, rows: usize, length: impl Fn(usize, usize) -> f64) -> Vec<Edge> {
    let mut edges = Vec::with_capacity(4 * cols * rows);
    let mut link = |a: usize, b: usize| {
        let l = length(a, b);
        edges.push(Edge::new(a as u64, b as u64, l));
        edges.push(Edge::new(b as u64, a as u64, l));
    };
    for row in 0..rows {
        for col in 0..cols {
            let id = row * cols + col;
            if col + 1 < cols {
                link(id, id + 1);
            }
            if row + 1 < rows {
                link(id, id + cols);
            }
        }
    }
    edges
}

/// Builds a directed network with every street as two opposite edges.
/// Only the elongated grid and random-geometric kinds use `seed`.
pub fn synthetic_network(kind: &SyntheticKind, seed: u64) -> Result<RoadNetwork> {
    let net = match kind {
        SyntheticKind::Grid { cols, rows, spacing } => {
            let (cols, rows) = (*cols, *rows);
            if cols < 2 || rows < 2 {
                return Err(Error::param("grid dimensions must be at least 2"));
            }
            positive("spacing", *spacing)?;
            let nodes = (0..rows * cols).map(|id| {
                let p = Point2D::new((id % cols) as f64 * spacing, (id / cols) as f64 * spacing);
                (NodeId(id as u64), p)
            });
            let edges = lattice(cols, rows, |_, _| *spacing);
            RoadNetwork::new(format!("grid-{cols}x{rows}"), nodes, edges)?
        }
        SyntheticKind::ElongatedGrid {
            cols,
            rows,
            spacing,
            corridors,
            corridor_factor,
            jitter,
        } => {
            let (cols, rows, corridors) = (*cols, *rows, *corridors);
            if cols < 2 || rows < 2 {
                return Err(Error::param("grid dimensions must be at least 2"));
            }
            if cols < 4 * rows {
                return Err(Error::param(format!(
                    "elongated grid needs cols >= 4 rows, got {cols}x{rows}"
                )));
            }
            positive("spacing", *spacing)?;
            if corridors == 0 || corridors >= rows {
                return Err(Error::param(format!("corridor count must lie in 1..{rows}")));
            }
            if !(*corridor_factor > 0.0 && *corridor_factor <= 1.0) {
                return Err(Error::param("corridor factor must lie in (0, 1]"));
            }
            if !(0.0..0.5).contains(jitter) {
                return Err(Error::param("jitter must lie in [0, 0.5)"));
            }
            let mut rng = seed::stream(seed::stage_seed(seed, "elongated-grid"), 0);
            let positions: Vec<Point2D> = (0..rows * cols)
                .map(|id| {
                    let mut shift = || if *jitter > 0.0 { rng.gen_range(-jitter..=*jitter) * spacing } else { 0.0 };
                    let (dx, dy) = (shift(), shift());
                    Point2D::new((id % cols) as f64 * spacing + dx, (id / cols) as f64 * spacing + dy)
                })
                .collect();
            let mut is_corridor = vec![false; rows];
            for r in corridor_rows(rows, corridors) {
                is_corridor[r] = true;
            }
            let edges = lattice(cols, rows, |a, b| {
                let d = positions[a].distance(&positions[b]);
                let along_corridor = a / cols == b / cols && is_corridor[a / cols];
                if along_corridor {
                    d * corridor_factor
                } else {
                    d
                }
            });
            let nodes = positions.iter().enumerate().map(|(i, p)| (NodeId(i as u64), *p));
            RoadNetwork::new(format!("elongated-{cols}x{rows}"), nodes, edges)?
        }
        SyntheticKind::RandomGeometric {
            n,
            width,
            height,
            radius,
        } => {
            if *n < 2 {
                return Err(Error::param("random geometric network needs at least 2 nodes"));
            }
            positive("width", *width)?;
            positive("height", *height)?;
            positive("radius", *radius)?;
            let mut rng = seed::stream(seed::stage_seed(seed, "random-geometric"), 0);
            let positions: Vec<Point2D> = (0..*n)
                .map(|_| Point2D::new(rng.gen_range(0.0..*width), rng.gen_range(0.0..*height)))
                .collect();
            let tree = RTree::bulk_load(
                positions
                    .iter()
                    .enumerate()
                    .map(|(i, p)| GeomWithData::new([p.x, p.y], i))
                    .collect(),
            );
            let mut edges = Vec::new();
            for (i, p) in positions.iter().enumerate() {
                let mut near: Vec<usize> = tree
                    .locate_within_distance([p.x, p.y], radius * radius)
                    .map(|g| g.data)
                    .filter(|&j| j != i)
                    .collect();
                near.sort_unstable();
                for j in near {
                    let d = p.distance(&positions[j]);
                    if d > 0.0 {
                        edges.push(Edge::new(i as u64, j as u64, d));
                    }
                }
            }
            let nodes = positions.iter().enumerate().map(|(i, p)| (NodeId(i as u64), *p));
            RoadNetwork::new(format!("rgg-{n}"), nodes, edges)?
        }
    };
    let weak = crate::graph::component_sizes(&net, None, ComponentNotion::Weak).len();
    if weak > 1 {
        log::warn!("synthetic network {} has {weak} weak components", net.name());
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_grid() {
        let net = synthetic_network(&SyntheticKind::Grid { cols: 2, rows: 2, spacing: 10.0 }, 0).unwrap();
        assert_eq!(net.node_count(), 4);
        assert_eq!(net.edge_count(), 8);
        assert!(net.edges().iter().all(|e| e.length == 10.0));
    }

    #[test]
    fn radius_beyond_diagonal_is_complete() {
        let kind = SyntheticKind::RandomGeometric {
            n: 12,
            width: 100.0,
            height: 50.0,
            radius: 112.0,
        };
        let net = synthetic_network(&kind, 4).unwrap();
        assert_eq!(net.edge_count(), 12 * 11);
    }

    #[test]
    fn elongated_layout() {
        let net = synthetic_network(&SyntheticKind::elongated(50, 10, 2), 1).unwrap();
        assert_eq!(net.node_count(), 500);
        assert_eq!(net.edge_count(), 2 * (49 * 10 + 50 * 9));
        assert_eq!(corridor_rows(10, 2), vec![3, 7]);
        // corridor segments cost about half of a plain street
        let corridor = net.edges().iter().find(|e| e.source == NodeId(150) && e.target == NodeId(151)).unwrap();
        let plain = net.edges().iter().find(|e| e.source == NodeId(0) && e.target == NodeId(1)).unwrap();
        assert!(corridor.length < 0.75 * plain.length);
        assert_eq!(synthetic_network(&SyntheticKind::elongated(50, 10, 2), 1).unwrap(), net);
        assert!(synthetic_network(&SyntheticKind::elongated(30, 10, 2), 1).is_err());
        assert!(synthetic_network(&SyntheticKind::elongated(50, 10, 10), 1).is_err());
    }

    #[test]
    fn routes_follow_corridors() {
        let r = corridor_routes(50, 10, 2).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.routes()[0].nodes[0], NodeId(150));
        assert_eq!(r.routes()[1].nodes[49], NodeId(399));
    }
}
