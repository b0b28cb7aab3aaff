//! Bus routes and the per-node route crossing count.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use csv::{ReaderBuilder, Trim};

use super::{NodeId, RoadNetwork};
use crate::centrality::{CentralityTable, IndexKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BusRoute {
    pub route_id: String,
    pub nodes: Vec<NodeId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BusRouteSet {
    routes: Vec<BusRoute>,
}

impl BusRouteSet {
    pub fn new(routes: Vec<BusRoute>) -> Result<Self> {
        if let Some(r) = routes.iter().find(|r| r.nodes.len() < 2) {
            return Err(Error::param(format!(
                "route '{}' has {} node(s); at least 2 are required",
                r.route_id,
                r.nodes.len()
            )));
        }
        Ok(BusRouteSet { routes })
    }

    pub fn empty() -> Self {
        BusRouteSet::default()
    }

    pub fn routes(&self) -> &[BusRoute] {
        &self.routes
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    /// Errors on the first node that `net` does not contain.
    pub fn validate_against(&self, net: &RoadNetwork) -> Result<()> {
        for r in &self.routes {
            if let Some(id) = r.nodes.iter().find(|id| !net.contains(**id)) {
                return Err(Error::UnknownNode {
                    id: *id,
                    context: format!("bus route '{}'", r.route_id),
                });
            }
        }
        Ok(())
    }

    /// Keeps only the visits to nodes present in `net`; routes left with
    /// fewer than two visits are dropped. Used when restricting routes to a
    /// zone subgraph.
    pub fn restricted_to(&self, net: &RoadNetwork) -> BusRouteSet {
        let routes = self
            .routes
            .iter()
            .filter_map(|r| {
                let nodes: Vec<NodeId> = r.nodes.iter().copied().filter(|id| net.contains(*id)).collect();
                (nodes.len() >= 2).then(|| BusRoute {
                    route_id: r.route_id.clone(),
                    nodes,
                })
            })
            .collect();
        BusRouteSet { routes }
    }
}

/// Reads `route_id,seq,node_id` rows. Each route's nodes are ordered by
/// `seq`; routes are ordered by id.
pub fn read_routes(path: impl AsRef<Path>) -> Result<BusRouteSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = ReaderBuilder::new().has_headers(true).trim(Trim::All).from_reader(file);
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    if header != ["route_id", "seq", "node_id"] {
        return Err(parse_err(1, format!("header is '{}', expected 'route_id,seq,node_id'", header.join(","))));
    }
    let mut grouped: BTreeMap<String, Vec<(i64, NodeId, u64)>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let route_id = rec[0].to_string();
        let seq: i64 = rec[1]
            .parse()
            .map_err(|_| parse_err(line, format!("seq '{}' is not an integer", &rec[1])))?;
        let node: u64 = rec[2]
            .parse()
            .map_err(|_| parse_err(line, format!("node_id '{}' is not a non-negative integer", &rec[2])))?;
        grouped.entry(route_id).or_default().push((seq, NodeId(node), line));
    }
    let mut routes = Vec::with_capacity(grouped.len());
    for (route_id, mut stops) in grouped {
        stops.sort_by_key(|s| s.0);
        if let Some(w) = stops.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(parse_err(w[1].2, format!("route '{route_id}' repeats seq {}", w[1].0)));
        }
        routes.push(BusRoute {
            route_id,
            nodes: stops.into_iter().map(|s| s.1).collect(),
        });
    }
    BusRouteSet::new(routes)
}

/// Number of times any route visits each node. Repeated visits by the same
/// route count once per visit.
pub fn bus_crossing_index(net: &RoadNetwork, routes: &BusRouteSet) -> Result<CentralityTable> {
    routes.validate_against(net)?;
    let mut counts = vec![0.0; net.node_count()];
    for r in routes.routes() {
        for id in &r.nodes {
            let i = net.index_of(*id).expect("validated above");
            counts[i] += 1.0;
        }
    }
    Ok(CentralityTable::from_dense(IndexKind::Bus, net, counts, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Point2D};

    fn net() -> RoadNetwork {
        RoadNetwork::new(
            "n",
            (0..4).map(|i| (NodeId(i), Point2D::new(i as f64, 0.0))),
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 3, 1.0)],
        )
        .unwrap()
    }

    fn route(id: &str, nodes: &[u64]) -> BusRoute {
        BusRoute {
            route_id: id.into(),
            nodes: nodes.iter().map(|&n| NodeId(n)).collect(),
        }
    }

    #[test]
    fn no_routes_gives_zero() {
        let t = bus_crossing_index(&net(), &BusRouteSet::empty()).unwrap();
        assert!(t.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn counts_visits() {
        let routes = BusRouteSet::new(vec![route("a", &[0, 1, 2]), route("b", &[3, 2, 1, 2])]).unwrap();
        let t = bus_crossing_index(&net(), &routes).unwrap();
        assert_eq!(t.values(), &[1.0, 2.0, 3.0, 1.0]);
        let total: f64 = t.values().iter().sum();
        assert_eq!(total, 7.0);
    }

    #[test]
    fn unknown_node_and_short_route() {
        let routes = BusRouteSet::new(vec![route("a", &[0, 42])]).unwrap();
        assert!(matches!(
            bus_crossing_index(&net(), &routes),
            Err(Error::UnknownNode { id: NodeId(42), .. })
        ));
        assert!(BusRouteSet::new(vec![route("s", &[1])]).is_err());
    }

    #[test]
    fn reads_routes_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("routes.csv");
        std::fs::write(&p, "route_id,seq,node_id\nr2,2,3\nr1,1,0\nr1,2,1\nr2,1,2\n").unwrap();
        let set = read_routes(&p).unwrap();
        assert_eq!(set.routes(), &[route("r1", &[0, 1]), route("r2", &[2, 3])]);
        std::fs::write(&p, "route_id,seq,node_id\nr1,1,0\nr1,1,1\n").unwrap();
        assert!(read_routes(&p).is_err());
    }
}
