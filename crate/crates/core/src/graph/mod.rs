//! Spatial road graph: intersections with planar coordinates joined by
//! directed street segments weighted by length in meters.

mod components;
mod io;
mod routes;
mod zone;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use components::{component_sizes, ComponentNotion};
pub use io::{ingest_network, read_edges, read_node_list, read_nodes, write_network};
pub use routes::{bus_crossing_index, read_routes, BusRoute, BusRouteSet};
pub use zone::{extract_zone, read_zones, read_zones_json, ZonePolygon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for NodeId {
    fn from(v: u64) -> Self {
        NodeId(v)
    }
}

/// Projected planar coordinate in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    /// Segment length in meters, strictly positive.
    pub length: f64,
    pub edge_id: Option<u64>,
}

impl Edge {
    pub fn new(source: impl Into<NodeId>, target: impl Into<NodeId>, length: f64) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
            length,
            edge_id: None,
        }
    }
}

/// Immutable spatially embedded multigraph.
///
/// Nodes are kept sorted by ascending [`NodeId`]; the position of a node in
/// that order is its dense index, used by every algorithm in the crate.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    name: String,
    directed: bool,
    ids: Vec<NodeId>,
    positions: Vec<Point2D>,
    lookup: HashMap<NodeId, usize>,
    edges: Vec<Edge>,
    endpoints: Vec<(usize, usize)>,
}

impl PartialEq for RoadNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.directed == other.directed
            && self.ids == other.ids
            && self.positions == other.positions
            && self.edges == other.edges
    }
}

impl RoadNetwork {
    /// Builds a directed network, validating every invariant.
    pub fn new(
        name: impl Into<String>,
        nodes: impl IntoIterator<Item = (NodeId, Point2D)>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        Self::build(name.into(), true, nodes, edges)
    }

    /// Builds a network whose edges are two-way. Only the shortest-path view
    /// and the betweenness/load conventions differ from the directed case.
    pub fn new_undirected(
        name: impl Into<String>,
        nodes: impl IntoIterator<Item = (NodeId, Point2D)>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        Self::build(name.into(), false, nodes, edges)
    }

    fn build(
        name: String,
        directed: bool,
        nodes: impl IntoIterator<Item = (NodeId, Point2D)>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let mut nodes: Vec<(NodeId, Point2D)> = nodes.into_iter().collect();
        nodes.sort_by_key(|(id, _)| *id);
        for w in nodes.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateNode {
                    id: w[0].0,
                    context: format!("network {name}"),
                });
            }
        }
        if let Some((id, p)) = nodes.iter().find(|(_, p)| !p.is_finite()) {
            return Err(Error::InvalidNetwork(format!(
                "node {id} has non-finite coordinates ({}, {})",
                p.x, p.y
            )));
        }
        let ids: Vec<NodeId> = nodes.iter().map(|(id, _)| *id).collect();
        let positions: Vec<Point2D> = nodes.iter().map(|(_, p)| *p).collect();
        let lookup: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();

        let mut endpoints = Vec::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            let s = *lookup.get(&e.source).ok_or_else(|| Error::UnknownNode {
                id: e.source,
                context: format!("source of edge #{k}"),
            })?;
            let t = *lookup.get(&e.target).ok_or_else(|| Error::UnknownNode {
                id: e.target,
                context: format!("target of edge #{k}"),
            })?;
            if s == t {
                return Err(Error::InvalidNetwork(format!(
                    "edge #{k} is a self-loop on node {}",
                    e.source
                )));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidNetwork(format!(
                    "edge #{k} ({} -> {}) has non-positive or non-finite length {}",
                    e.source, e.target, e.length
                )));
            }
            endpoints.push((s, t));
        }

        Ok(RoadNetwork {
            name,
            directed,
            ids,
            positions,
            lookup,
            edges,
            endpoints,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node ids in ascending order; the slice index is the dense index.
    pub fn node_ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn positions(&self) -> &[Point2D] {
        &self.positions
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Dense `(source, target)` indices, parallel to [`edges`](Self::edges).
    pub fn edge_endpoints(&self) -> &[(usize, usize)] {
        &self.endpoints
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.lookup.get(&id).copied()
    }

    pub fn position(&self, id: NodeId) -> Option<Point2D> {
        self.index_of(id).map(|i| self.positions[i])
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.lookup.contains_key(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, Point2D)> + '_ {
        self.ids.iter().copied().zip(self.positions.iter().copied())
    }

    /// Subgraph induced by the nodes for which `keep` is true, given by dense
    /// index. Edges survive iff both endpoints survive.
    pub fn induced_subgraph(&self, name: impl Into<String>, keep: &[bool]) -> RoadNetwork {
        assert_eq!(keep.len(), self.node_count(), "mask length must equal node count");
        let ids: Vec<NodeId> = (0..self.node_count()).filter(|&i| keep[i]).map(|i| self.ids[i]).collect();
        let positions: Vec<Point2D> = (0..self.node_count()).filter(|&i| keep[i]).map(|i| self.positions[i]).collect();
        let lookup: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut edges = Vec::new();
        let mut endpoints = Vec::new();
        for (e, &(s, t)) in self.edges.iter().zip(&self.endpoints) {
            if keep[s] && keep[t] {
                endpoints.push((lookup[&e.source], lookup[&e.target]));
                edges.push(e.clone());
            }
        }
        RoadNetwork {
            name: name.into(),
            directed: self.directed,
            ids,
            positions,
            lookup,
            edges,
            endpoints,
        }
    }

    pub fn summary(&self) -> NetworkSummary {
        NetworkSummary {
            name: self.name.clone(),
            nodes: self.node_count(),
            edges: self.edge_count(),
            weak_components: component_sizes(self, None, ComponentNotion::Weak).len(),
            strong_components: component_sizes(self, None, ComponentNotion::Strong).len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkSummary {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub weak_components: usize,
    pub strong_components: usize,
}

impl fmt::Display for NetworkSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} nodes, {} edges, {} weak components, {} strong components",
            self.name, self.nodes, self.edges, self.weak_components, self.strong_components
        )
    }
}
