use std::fmt;
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::RoadNetwork;

/// Which connectivity defines a component on a directed network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentNotion {
    #[default]
    Weak,
    Strong,
}

impl fmt::Display for ComponentNotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentNotion::Weak => "weak",
            ComponentNotion::Strong => "strong",
        })
    }
}

impl FromStr for ComponentNotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "weak" => Ok(ComponentNotion::Weak),
            "strong" => Ok(ComponentNotion::Strong),
            other => Err(format!("unknown component notion '{other}' (expected weak or strong)")),
        }
    }
}

/// Sizes of the components of the subgraph induced by `alive` (all nodes when
/// `None`), sorted in descending order. Undirected networks have identical
/// weak and strong components.
pub fn component_sizes(net: &RoadNetwork, alive: Option<&[bool]>, notion: ComponentNotion) -> Vec<usize> {
    let n = net.node_count();
    let is_alive = |i: usize| alive.is_none_or(|a| a[i]);
    let mut sizes = match (notion, net.is_directed()) {
        (ComponentNotion::Strong, true) => {
            let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, net.edge_count());
            for _ in 0..n {
                g.add_node(());
            }
            for &(s, t) in net.edge_endpoints() {
                if is_alive(s) && is_alive(t) {
                    g.add_edge(NodeIndex::new(s), NodeIndex::new(t), ());
                }
            }
            tarjan_scc(&g)
                .into_iter()
                .filter(|c| is_alive(c[0].index()))
                .map(|c| c.len())
                .collect::<Vec<_>>()
        }
        _ => {
            let mut uf = UnionFind::<usize>::new(n);
            for &(s, t) in net.edge_endpoints() {
                if is_alive(s) && is_alive(t) {
                    uf.union(s, t);
                }
            }
            let mut counts = vec![0usize; n];
            for i in (0..n).filter(|&i| is_alive(i)) {
                counts[uf.find(i)] += 1;
            }
            counts.into_iter().filter(|&c| c > 0).collect()
        }
    };
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}
