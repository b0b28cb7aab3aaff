//! Node centrality indices on length-weighted directed (multi)graphs.
//!
//! Shortest paths use the minimum length among parallel edges, and all
//! co-optimal paths are counted. Closeness is the reciprocal of the mean
//! distance over the reachable set, `(r - 1) / sum(d)`, and its normalised
//! form applies the reachability factor `(r - 1) / (n - 1)`. Betweenness and
//! load exclude the endpoints of each pair; normalisation divides by
//! `(n - 1)(n - 2)` on directed networks.

mod paths;
mod sweep;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use paths::{Adjacency, SearchState, ShortestPathView, TIE_TOLERANCE};
use sweep::{sweep, Pass, SweepOutput};

use crate::error::{Error, Result};
use crate::graph::{bus_crossing_index, BusRouteSet, NodeId, RoadNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    Degree,
    InDegree,
    OutDegree,
    Closeness,
    Betweenness,
    Load,
    Bus,
}

impl IndexKind {
    /// Column order of the wide centrality table.
    pub const ALL: [IndexKind; 7] = [
        IndexKind::Degree,
        IndexKind::InDegree,
        IndexKind::OutDegree,
        IndexKind::Closeness,
        IndexKind::Betweenness,
        IndexKind::Load,
        IndexKind::Bus,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IndexKind::Degree => "degree",
            IndexKind::InDegree => "indegree",
            IndexKind::OutDegree => "outdegree",
            IndexKind::Closeness => "closeness",
            IndexKind::Betweenness => "betweenness",
            IndexKind::Load => "load",
            IndexKind::Bus => "bus",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IndexKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown centrality index '{s}'")))
    }
}

/// Per-node values of one index over a network's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityTable {
    kind: IndexKind,
    nodes: Vec<NodeId>,
    values: Vec<f64>,
    normalized: bool,
    n: usize,
}

impl CentralityTable {
    /// `nodes` must be strictly ascending; values finite and non-negative.
    pub fn new(kind: IndexKind, nodes: Vec<NodeId>, values: Vec<f64>, normalized: bool, n: usize) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::param(format!(
                "{kind}: {} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param(format!("{kind}: node ids must be strictly ascending")));
        }
        if let Some((id, v)) = nodes.iter().zip(&values).find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::param(format!("{kind}: value {v} for node {id} is not finite and non-negative")));
        }
        Ok(CentralityTable {
            kind,
            nodes,
            values,
            normalized,
            n,
        })
    }

    pub(crate) fn from_dense(kind: IndexKind, net: &RoadNetwork, values: Vec<f64>, normalized: bool) -> Self {
        debug_assert_eq!(values.len(), net.node_count());
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0), "{kind}: invalid value");
        CentralityTable {
            kind,
            nodes: net.node_ids().to_vec(),
            values,
            normalized,
            n: net.node_count(),
        }
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.as_str()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Node count used for normalisation.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, id: NodeId) -> Option<f64> {
        self.nodes.binary_search(&id).ok().map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.nodes.iter().copied().zip(self.values.iter().copied())
    }

    /// Writes `node_id,<index>` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node_id", self.name()])?;
        for (id, v) in self.iter() {
            w.write_record([id.to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<centrality csv>", e))?;
        Ok(())
    }
}

/// Writes `node_id,<index>,...` with one column per table, in the given
/// order. All tables must cover the same nodes.
pub fn write_wide_csv<W: Write>(tables: &[CentralityTable], out: W) -> Result<()> {
    let Some(first) = tables.first() else {
        return Err(Error::param("no centrality tables to write"));
    };
    if let Some(t) = tables.iter().find(|t| t.nodes != first.nodes) {
        return Err(Error::param(format!("table '{}' covers different nodes", t.name())));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node_id".to_string()];
    header.extend(tables.iter().map(|t| t.name().to_string()));
    w.write_record(&header)?;
    for (i, id) in first.nodes.iter().enumerate() {
        let mut row = vec![id.to_string()];
        row.extend(tables.iter().map(|t| t.values[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<centrality csv>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeDirection {
    #[default]
    Total,
    In,
    Out,
}

/// Which distances define closeness on a directed network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosenessDirection {
    /// Distances from every other node to the node.
    #[default]
    Inward,
    /// Distances from the node to every other node.
    Outward,
}

impl FromStr for ClosenessDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "inward" | "in" => Ok(ClosenessDirection::Inward),
            "outward" | "out" => Ok(ClosenessDirection::Outward),
            other => Err(Error::param(format!("unknown closeness direction '{other}'"))),
        }
    }
}

/// Incident edge counts; parallel edges count individually. On undirected
/// networks in- and out-degree coincide with degree.
pub fn degree_centrality(net: &RoadNetwork, direction: DegreeDirection, normalized: bool) -> Result<CentralityTable> {
    let n = net.node_count();
    if normalized && n < 2 {
        return Err(Error::param(format!("normalised degree needs at least 2 nodes, network has {n}")));
    }
    let mut indeg = vec![0.0; n];
    let mut outdeg = vec![0.0; n];
    for &(s, t) in net.edge_endpoints() {
        outdeg[s] += 1.0;
        indeg[t] += 1.0;
    }
    let (kind, mut values) = if net.is_directed() {
        match direction {
            DegreeDirection::Total => (IndexKind::Degree, indeg.iter().zip(&outdeg).map(|(a, b)| a + b).collect()),
            DegreeDirection::In => (IndexKind::InDegree, indeg),
            DegreeDirection::Out => (IndexKind::OutDegree, outdeg),
        }
    } else {
        let deg: Vec<f64> = indeg.iter().zip(&outdeg).map(|(a, b)| a + b).collect();
        let kind = match direction {
            DegreeDirection::Total => IndexKind::Degree,
            DegreeDirection::In => IndexKind::InDegree,
            DegreeDirection::Out => IndexKind::OutDegree,
        };
        (kind, deg)
    };
    if normalized {
        let scale = 1.0 / (n - 1) as f64;
        values.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(CentralityTable::from_dense(kind, net, values, normalized))
}

fn closeness_from(out: &SweepOutput, n: usize, normalized: bool) -> Vec<f64> {
    out.reach
        .iter()
        .zip(&out.distance_sum)
        .map(|(&r, &total)| {
            if r <= 1 || total <= 0.0 {
                return 0.0;
            }
            let others = (r - 1) as f64;
            let c = others / total;
            if normalized {
                c * (others / (n - 1) as f64)
            } else {
                c
            }
        })
        .collect()
}

fn require_nodes(net: &RoadNetwork, min: usize, what: &str) -> Result<()> {
    if net.node_count() < min {
        return Err(Error::param(format!(
            "{what} needs at least {min} nodes, network has {}",
            net.node_count()
        )));
    }
    Ok(())
}

pub fn closeness_centrality(net: &RoadNetwork, direction: ClosenessDirection, normalized: bool) -> Result<CentralityTable> {
    require_nodes(net, 2, "closeness")?;
    let view = ShortestPathView::new(net);
    let pass = match direction {
        ClosenessDirection::Inward => Pass::Reverse,
        ClosenessDirection::Outward => Pass::Forward,
    };
    let out = sweep(&view, pass, false);
    Ok(CentralityTable::from_dense(
        IndexKind::Closeness,
        net,
        closeness_from(&out, net.node_count(), normalized),
        normalized,
    ))
}

/// Turns ordered-pair sums into the reported index: halved on undirected
/// networks, divided by `(n-1)(n-2)` (directed) or `(n-1)(n-2)/2`
/// (undirected) when normalised. Both conventions give the same normalised
/// value.
fn scale_pair_sums(net: &RoadNetwork, mut sums: Vec<f64>, normalized: bool) -> Vec<f64> {
    let n = net.node_count() as f64;
    let mut scale = if net.is_directed() { 1.0 } else { 0.5 };
    if normalized {
        let pairs = (n - 1.0) * (n - 2.0);
        scale *= if net.is_directed() { 1.0 / pairs } else { 2.0 / pairs };
    }
    if scale != 1.0 {
        sums.iter_mut().for_each(|v| *v *= scale);
    }
    sums
}

fn pair_index(
    net: &RoadNetwork,
    view: &ShortestPathView,
    pass: Pass,
    kind: IndexKind,
    normalized: bool,
) -> Result<(CentralityTable, SweepOutput)> {
    if normalized {
        require_nodes(net, 3, &format!("normalised {kind}"))?;
    }
    let mut out = sweep(view, pass, true);
    let sums = out.pair_sums.take().expect("pair sums requested");
    let table = CentralityTable::from_dense(kind, net, scale_pair_sums(net, sums, normalized), normalized);
    Ok((table, out))
}

/// Shortest-path betweenness counting every co-optimal path.
pub fn betweenness_centrality(net: &RoadNetwork, normalized: bool) -> Result<CentralityTable> {
    let view = ShortestPathView::new(net);
    pair_index(net, &view, Pass::Forward, IndexKind::Betweenness, normalized).map(|(t, _)| t)
}

/// Load: every ordered pair sends a unit packet from source to target that
/// splits evenly over the next hops lying on shortest paths to the target.
/// A node's load is the total packet mass transiting it; the source and the
/// target of a pair do not count that pair.
pub fn load_centrality(net: &RoadNetwork, normalized: bool) -> Result<CentralityTable> {
    let view = ShortestPathView::new(net);
    pair_index(net, &view, Pass::Reverse, IndexKind::Load, normalized).map(|(t, _)| t)
}

/// Normalisation and direction choices for [`all_centralities`]. The
/// defaults follow the conventions of the published summary tables:
/// degree, closeness and betweenness normalised, load raw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CentralityOptions {
    pub closeness_direction: ClosenessDirection,
    pub normalize_degree: bool,
    pub normalize_closeness: bool,
    pub normalize_betweenness: bool,
    pub normalize_load: bool,
}

impl Default for CentralityOptions {
    fn default() -> Self {
        CentralityOptions {
            closeness_direction: ClosenessDirection::Inward,
            normalize_degree: true,
            normalize_closeness: true,
            normalize_betweenness: true,
            normalize_load: false,
        }
    }
}

/// Computes the seven tables in [`IndexKind::ALL`] order. The bus index is
/// all zeros when no routes are given. Two all-sources sweeps serve every
/// path-based index.
pub fn all_centralities(
    net: &RoadNetwork,
    routes: Option<&BusRouteSet>,
    opts: &CentralityOptions,
) -> Result<Vec<CentralityTable>> {
    require_nodes(net, 3, "the centrality suite")?;
    let view = ShortestPathView::new(net);
    let mut tables = vec![
        degree_centrality(net, DegreeDirection::Total, opts.normalize_degree)?,
        degree_centrality(net, DegreeDirection::In, opts.normalize_degree)?,
        degree_centrality(net, DegreeDirection::Out, opts.normalize_degree)?,
    ];
    log::info!("{}: betweenness sweep over {} nodes", net.name(), net.node_count());
    let (betweenness, forward) = pair_index(net, &view, Pass::Forward, IndexKind::Betweenness, opts.normalize_betweenness)?;
    log::info!("{}: load sweep over {} nodes", net.name(), net.node_count());
    let (load, reverse) = pair_index(net, &view, Pass::Reverse, IndexKind::Load, opts.normalize_load)?;
    let closeness_source = match opts.closeness_direction {
        ClosenessDirection::Inward => &reverse,
        ClosenessDirection::Outward => &forward,
    };
    tables.push(CentralityTable::from_dense(
        IndexKind::Closeness,
        net,
        closeness_from(closeness_source, net.node_count(), opts.normalize_closeness),
        opts.normalize_closeness,
    ));
    tables.push(betweenness);
    tables.push(load);
    let bus = match routes {
        Some(r) => bus_crossing_index(net, r)?,
        None => CentralityTable::from_dense(IndexKind::Bus, net, vec![0.0; net.node_count()], false),
    };
    tables.push(bus);
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Point2D};

    fn net(n: u64, edges: &[(u64, u64, f64)]) -> RoadNetwork {
        RoadNetwork::new(
            "t",
            (0..n).map(|i| (NodeId(i), Point2D::new(i as f64, 0.0))),
            edges.iter().map(|&(s, t, l)| Edge::new(s, t, l)).collect(),
        )
        .unwrap()
    }

    fn two_way(n: u64, edges: &[(u64, u64, f64)]) -> RoadNetwork {
        let mut all = Vec::new();
        for &(s, t, l) in edges {
            all.push((s, t, l));
            all.push((t, s, l));
        }
        net(n, &all)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn degree_on_directed_triangle() {
        let g = net(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]);
        let total = degree_centrality(&g, DegreeDirection::Total, false).unwrap();
        let indeg = degree_centrality(&g, DegreeDirection::In, false).unwrap();
        let outdeg = degree_centrality(&g, DegreeDirection::Out, false).unwrap();
        assert_eq!(total.values(), &[2.0; 3]);
        assert_eq!(indeg.values(), &[1.0; 3]);
        assert_eq!(outdeg.values(), &[1.0; 3]);
        let norm = degree_centrality(&g, DegreeDirection::Total, true).unwrap();
        assert_eq!(norm.values(), &[1.0; 3]);
    }

    #[test]
    fn degree_isolated_and_parallel() {
        let g = net(3, &[(0, 1, 1.0), (0, 1, 2.0)]);
        let d = degree_centrality(&g, DegreeDirection::Total, false).unwrap();
        assert_eq!(d.values(), &[2.0, 2.0, 0.0]);
        let single = net(1, &[]);
        assert!(degree_centrality(&single, DegreeDirection::Total, true).is_err());
        assert!(degree_centrality(&single, DegreeDirection::Total, false).is_ok());
    }

    #[test]
    fn closeness_star_center_is_one() {
        let g = two_way(5, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)]);
        for dir in [ClosenessDirection::Inward, ClosenessDirection::Outward] {
            let c = closeness_centrality(&g, dir, true).unwrap();
            assert_eq!(c.get(NodeId(0)), Some(1.0));
        }
    }

    #[test]
    fn closeness_unreachable_is_zero() {
        let g = net(2, &[]);
        let c = closeness_centrality(&g, ClosenessDirection::Inward, true).unwrap();
        assert_eq!(c.values(), &[0.0, 0.0]);
    }

    #[test]
    fn closeness_weighted_path() {
        // a-b-c-d with lengths 1, 2, 3
        let g = two_way(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0)]);
        let c = closeness_centrality(&g, ClosenessDirection::Inward, false).unwrap();
        // distance sums: a 1+3+6, b 1+2+5, c 3+2+3, d 6+5+3
        let expected = [3.0 / 10.0, 3.0 / 8.0, 3.0 / 8.0, 3.0 / 14.0];
        for (got, want) in c.values().iter().zip(expected) {
            assert!(close(*got, want), "{got} vs {want}");
        }
    }

    #[test]
    fn closeness_direction_differs_on_one_way_path() {
        // 0 -> 1 -> 2
        let g = net(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let inward = closeness_centrality(&g, ClosenessDirection::Inward, true).unwrap();
        let outward = closeness_centrality(&g, ClosenessDirection::Outward, true).unwrap();
        // node 2 is reached from 0 (d=2) and 1 (d=1): (2/3) * (2/2)
        assert!(close(inward.values()[2], 2.0 / 3.0));
        assert_eq!(inward.values()[0], 0.0);
        assert!(close(outward.values()[0], 2.0 / 3.0));
        assert_eq!(outward.values()[2], 0.0);
        // node 1 inward: reached from 0 only -> (1/1) * (1/2)
        assert!(close(inward.values()[1], 0.5));
    }

    #[test]
    fn betweenness_directed_cycle() {
        let g = net(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]);
        let raw = betweenness_centrality(&g, false).unwrap();
        assert_eq!(raw.values(), &[1.0; 3]);
        let norm = betweenness_centrality(&g, true).unwrap();
        assert_eq!(norm.values(), &[0.5; 3]);
    }

    #[test]
    fn betweenness_and_load_on_directed_path() {
        let g = net(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let b = betweenness_centrality(&g, false).unwrap();
        assert_eq!(b.values(), &[0.0, 1.0, 0.0]);
        assert_eq!(betweenness_centrality(&g, true).unwrap().values()[1], 0.5);
        let l = load_centrality(&g, false).unwrap();
        assert_eq!(l.values(), &[0.0, 1.0, 0.0]);
        assert!(!l.is_normalized());
    }

    #[test]
    fn complete_graph_has_no_transit() {
        let mut edges = Vec::new();
        for s in 0..5 {
            for t in 0..5 {
                if s != t {
                    edges.push((s, t, 1.0));
                }
            }
        }
        let g = net(5, &edges);
        assert!(betweenness_centrality(&g, true).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(load_centrality(&g, false).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tied_paths_split_evenly() {
        // 0-1-3-4 and 0-2-4 both have length 3
        let g = net(5, &[(0, 1, 1.0), (1, 3, 1.0), (3, 4, 1.0), (0, 2, 1.5), (2, 4, 1.5)]);
        let b = betweenness_centrality(&g, false).unwrap();
        let l = load_centrality(&g, false).unwrap();
        assert_eq!(b.values(), &[0.0, 1.5, 0.5, 1.5, 0.0]);
        assert_eq!(l.values(), &[0.0, 1.5, 0.5, 1.5, 0.0]);
    }

    #[test]
    fn load_splits_at_each_hop_not_per_path() {
        // from 0 to 5: via 1 there are two paths (1-3-5, 1-4-5), via 2 one
        // (2-6-5). Betweenness weights the branches 2/3 : 1/3 by path count,
        // the packet splits 1/2 : 1/2 at node 0.
        let g = net(
            7,
            &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (1, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0), (2, 6, 1.0), (6, 5, 1.0)],
        );
        let b = betweenness_centrality(&g, false).unwrap();
        let l = load_centrality(&g, false).unwrap();
        let third = 1.0 / 3.0;
        let want_b = [0.0, 2.0 + 2.0 * third, 1.0 + third, 0.5 + third, 0.5 + third, 0.0, 1.0 + third];
        let want_l = [0.0, 2.5, 1.5, 0.75, 0.75, 0.0, 1.5];
        for i in 0..7 {
            assert!(close(b.values()[i], want_b[i]), "betweenness {i}: {}", b.values()[i]);
            assert!(close(l.values()[i], want_l[i]), "load {i}: {}", l.values()[i]);
        }
    }

    #[test]
    fn undirected_normalisation_matches_directed_equivalent() {
        let edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 2.0), (1, 3, 2.5)];
        let und = RoadNetwork::new_undirected(
            "u",
            (0..4).map(|i| (NodeId(i), Point2D::new(i as f64, 0.0))),
            edges.iter().map(|&(s, t, l)| Edge::new(s, t, l)).collect(),
        )
        .unwrap();
        let dir = two_way(4, &edges);
        let bu = betweenness_centrality(&und, false).unwrap();
        let bd = betweenness_centrality(&dir, false).unwrap();
        for (u, d) in bu.values().iter().zip(bd.values()) {
            assert!(close(*u * 2.0, *d));
        }
        let nu = betweenness_centrality(&und, true).unwrap();
        let nd = betweenness_centrality(&dir, true).unwrap();
        for (u, d) in nu.values().iter().zip(nd.values()) {
            assert!(close(*u, *d));
        }
    }

    #[test]
    fn normalisation_needs_three_nodes() {
        let g = net(2, &[(0, 1, 1.0)]);
        assert!(betweenness_centrality(&g, true).is_err());
        assert!(betweenness_centrality(&g, false).is_ok());
    }

    #[test]
    fn suite_on_three_node_path() {
        let g = net(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let tables = all_centralities(&g, None, &CentralityOptions::default()).unwrap();
        assert_eq!(tables.len(), 7);
        let kinds: Vec<_> = tables.iter().map(|t| t.kind()).collect();
        assert_eq!(kinds, IndexKind::ALL);
        assert!(tables[6].values().iter().all(|&v| v == 0.0));
        assert_eq!(tables[4], betweenness_centrality(&g, true).unwrap());
        assert_eq!(tables[5], load_centrality(&g, false).unwrap());
        assert_eq!(tables[3], closeness_centrality(&g, ClosenessDirection::Inward, true).unwrap());
    }

    #[test]
    fn table_validation_and_csv() {
        assert!(CentralityTable::new(IndexKind::Load, vec![NodeId(1), NodeId(0)], vec![0.0, 0.0], false, 2).is_err());
        assert!(CentralityTable::new(IndexKind::Load, vec![NodeId(0)], vec![-1.0], false, 1).is_err());
        let t = CentralityTable::new(IndexKind::Load, vec![NodeId(0), NodeId(4)], vec![0.0, 2.5], false, 2).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "node_id,load\n0,0\n4,2.5\n");
        assert_eq!("Betweenness".parse::<IndexKind>().unwrap(), IndexKind::Betweenness);
        assert!("pagerank".parse::<IndexKind>().is_err());
    }
}
