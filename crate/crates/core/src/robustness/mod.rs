//! Divisive node-removal attacks. Nodes are removed in a fixed order taken
//! from the intact network and the largest connected component is tracked
//! against the original node count.

mod synthetic;

use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::centrality::CentralityTable;
use crate::error::{Error, Result};
use crate::graph::{component_sizes, ComponentNotion, NodeId, RoadNetwork};
use crate::seed;

pub use synthetic::{corridor_routes, corridor_rows, synthetic_network, SyntheticKind};

pub const DEFAULT_REPLICATES: usize = 20;
pub const DEFAULT_GRID_STEP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub enum AttackStrategy {
    /// Descending index value, ties by ascending node id. The table must
    /// come from the intact network; it is never recomputed.
    Ranked(CentralityTable),
    Random { replicates: usize, seed: u64 },
    /// User-supplied removal order, e.g. nodes inside a hazard zone.
    NodeList { label: String, nodes: Vec<NodeId> },
}

impl AttackStrategy {
    pub fn label(&self) -> String {
        match self {
            AttackStrategy::Ranked(t) => t.name().to_string(),
            AttackStrategy::Random { .. } => "random".to_string(),
            AttackStrategy::NodeList { label, .. } => label.clone(),
        }
    }

    /// Dense removal order for deterministic strategies.
    pub fn removal_order(&self, net: &RoadNetwork) -> Result<Vec<usize>> {
        match self {
            AttackStrategy::Ranked(table) => ranked_order(net, table),
            AttackStrategy::NodeList { label, nodes } => {
                let mut seen = vec![false; net.node_count()];
                nodes
                    .iter()
                    .map(|id| {
                        let i = net.index_of(*id).ok_or_else(|| Error::UnknownNode {
                            id: *id,
                            context: format!("node list '{label}'"),
                        })?;
                        if std::mem::replace(&mut seen[i], true) {
                            return Err(Error::DuplicateNode {
                                id: *id,
                                context: format!("node list '{label}'"),
                            });
                        }
                        Ok(i)
                    })
                    .collect()
            }
            AttackStrategy::Random { .. } => Err(Error::param("random strategy has no single removal order")),
        }
    }
}

fn ranked_order(net: &RoadNetwork, table: &CentralityTable) -> Result<Vec<usize>> {
    let values: Vec<f64> = net
        .node_ids()
        .iter()
        .map(|id| {
            table.get(*id).ok_or_else(|| Error::UnknownNode {
                id: *id,
                context: format!("missing from index table '{}'", table.name()),
            })
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..net.node_count()).collect();
    // dense index order is ascending node id, so a stable sort keeps the
    // id tie rule
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    Ok(order)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackCurve {
    pub strategy: String,
    pub fractions_removed: Vec<f64>,
    /// Mean over replicates for random attacks.
    pub lcc_fraction: Vec<f64>,
    pub lcc_min: Option<Vec<f64>>,
    pub lcc_max: Option<Vec<f64>>,
    pub component_notion: ComponentNotion,
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
}

impl AttackCurve {
    /// Trapezoid area under the LCC curve.
    pub fn auc(&self) -> f64 {
        self.fractions_removed
            .windows(2)
            .zip(self.lcc_fraction.windows(2))
            .map(|(f, v)| (f[1] - f[0]) * (v[0] + v[1]) / 2.0)
            .sum()
    }

    /// Value at the grid point nearest to `fraction`.
    pub fn value_at(&self, fraction: f64) -> Option<f64> {
        let i = self
            .fractions_removed
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - fraction).abs().total_cmp(&(b.1 - fraction).abs()))?
            .0;
        Some(self.lcc_fraction[i])
    }

    pub fn is_non_increasing(&self) -> bool {
        self.lcc_fraction.windows(2).all(|w| w[1] <= w[0])
    }
}

impl fmt::Display for AttackCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} points, auc {:.4}, {} components",
            self.strategy,
            self.fractions_removed.len(),
            self.auc(),
            self.component_notion
        )
    }
}

/// `strategy,fraction_removed,lcc_fraction[,lcc_min,lcc_max]`; the spread
/// columns appear when any curve carries them.
pub fn write_curves_csv<W: Write>(curves: &[AttackCurve], out: W) -> Result<()> {
    let spread = curves.iter().any(|c| c.lcc_min.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["strategy", "fraction_removed", "lcc_fraction"];
    if spread {
        header.extend(["lcc_min", "lcc_max"]);
    }
    w.write_record(&header)?;
    for c in curves {
        for (i, (f, v)) in c.fractions_removed.iter().zip(&c.lcc_fraction).enumerate() {
            let mut rec = vec![c.strategy.clone(), f.to_string(), v.to_string()];
            if spread {
                let cell = |s: &Option<Vec<f64>>| s.as_ref().map(|s| s[i].to_string()).unwrap_or_default();
                rec.push(cell(&c.lcc_min));
                rec.push(cell(&c.lcc_max));
            }
            w.write_record(&rec)?;
        }
    }
    w.flush().map_err(|e| Error::io("<attack csv>", e))?;
    Ok(())
}

/// `0, step, 2 step, ..., 1`; `1/step` must be a whole number.
pub fn fraction_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::param(format!("grid step must lie in (0, 1], got {step}")));
    }
    let m = (1.0 / step).round();
    if ((1.0 / step) - m).abs() > 1e-9 * m {
        return Err(Error::param(format!("grid step {step} does not divide 1")));
    }
    let m = m as usize;
    Ok((0..=m).map(|i| i as f64 / m as f64).collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param("empty fraction grid"));
    }
    if grid.iter().any(|f| !(0.0..=1.0).contains(f)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("fraction grid must be strictly ascending within [0, 1]"));
    }
    Ok(())
}

struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return self.size[a as usize];
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        self.size[a as usize]
    }
}

/// Undirected adjacency in CSR form, built once per attack.
struct Neighbours {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Neighbours {
    fn new(net: &RoadNetwork) -> Self {
        let n = net.node_count();
        let mut degree = vec![0usize; n + 1];
        for &(s, t) in net.edge_endpoints() {
            degree[s] += 1;
            degree[t] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for &(s, t) in net.edge_endpoints() {
            targets[fill[s]] = t as u32;
            fill[s] += 1;
            targets[fill[t]] = s as u32;
            fill[t] += 1;
        }
        Neighbours { offsets, targets }
    }

    fn of(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// Largest component size after removing each prefix `order[..k]`, for the
/// requested `ks` (ascending).
fn lcc_after_removals(
    net: &RoadNetwork,
    adj: &Neighbours,
    order: &[usize],
    ks: &[usize],
    notion: ComponentNotion,
) -> Vec<usize> {
    let n = net.node_count();
    match notion {
        ComponentNotion::Weak => {
            // add nodes back in reverse removal order, starting from the
            // nodes never removed
            let mut alive = vec![true; n];
            for &v in order {
                alive[v] = false;
            }
            let mut dsu = Dsu::new(n);
            let mut best = 0u32;
            for v in 0..n {
                if alive[v] {
                    best = best.max(1);
                    for &w in adj.of(v) {
                        if alive[w as usize] {
                            best = best.max(dsu.union(v as u32, w));
                        }
                    }
                }
            }
            let mut lcc = vec![0usize; order.len() + 1];
            lcc[order.len()] = best as usize;
            for k in (0..order.len()).rev() {
                let v = order[k];
                alive[v] = true;
                best = best.max(1);
                for &w in adj.of(v) {
                    if alive[w as usize] {
                        best = best.max(dsu.union(v as u32, w));
                    }
                }
                lcc[k] = best as usize;
            }
            ks.iter().map(|&k| lcc[k]).collect()
        }
        ComponentNotion::Strong => ks
            .iter()
            .map(|&k| {
                let mut alive = vec![true; n];
                for &v in &order[..k] {
                    alive[v] = false;
                }
                component_sizes(net, Some(&alive), notion).first().copied().unwrap_or(0)
            })
            .collect(),
    }
}

/// Runs one strategy. Fractions are of the original node count; sampled
/// removal counts are `round(f n)`. A node list shorter than the network is
/// only sampled up to its own length.
pub fn attack(
    net: &RoadNetwork,
    strategy: &AttackStrategy,
    grid: &[f64],
    notion: ComponentNotion,
) -> Result<AttackCurve> {
    if net.is_empty() {
        return Err(Error::InvalidNetwork("cannot attack an empty network".into()));
    }
    check_grid(grid)?;
    let n = net.node_count();
    let adj = Neighbours::new(net);
    let to_k = |f: f64| ((f * n as f64).round() as usize).min(n);

    if let AttackStrategy::Random { replicates, seed } = strategy {
        if *replicates == 0 {
            return Err(Error::param("random attack needs at least one replicate"));
        }
        let ks: Vec<usize> = grid.iter().map(|&f| to_k(f)).collect();
        let runs: Vec<Vec<usize>> = (0..*replicates)
            .into_par_iter()
            .map(|r| {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut seed::stream(*seed, r as u64));
                lcc_after_removals(net, &adj, &order, &ks, notion)
            })
            .collect();
        let nf = n as f64;
        let column = |j: usize| runs.iter().map(move |run| run[j]);
        let mean = (0..ks.len())
            .map(|j| column(j).sum::<usize>() as f64 / (*replicates as f64 * nf))
            .collect();
        let min = (0..ks.len()).map(|j| column(j).min().unwrap_or(0) as f64 / nf).collect();
        let max = (0..ks.len()).map(|j| column(j).max().unwrap_or(0) as f64 / nf).collect();
        return Ok(AttackCurve {
            strategy: strategy.label(),
            fractions_removed: grid.to_vec(),
            lcc_fraction: mean,
            lcc_min: Some(min),
            lcc_max: Some(max),
            component_notion: notion,
            replicates: Some(*replicates),
            seed: Some(*seed),
        });
    }

    let order = strategy.removal_order(net)?;
    let fractions: Vec<f64> = grid.iter().copied().filter(|&f| to_k(f) <= order.len()).collect();
    if fractions.is_empty() {
        return Err(Error::param(format!("no grid point within the {} listed nodes", order.len())));
    }
    let ks: Vec<usize> = fractions.iter().map(|&f| to_k(f)).collect();
    let sizes = lcc_after_removals(net, &adj, &order, &ks, notion);
    Ok(AttackCurve {
        strategy: strategy.label(),
        fractions_removed: fractions,
        lcc_fraction: sizes.iter().map(|&s| s as f64 / n as f64).collect(),
        lcc_min: None,
        lcc_max: None,
        component_notion: notion,
        replicates: None,
        seed: None,
    })
}

/// One curve per index table followed by the random baseline, all on the
/// same grid.
pub fn attack_suite(
    net: &RoadNetwork,
    tables: &[CentralityTable],
    replicates: usize,
    seed: u64,
    grid: &[f64],
    notion: ComponentNotion,
) -> Result<Vec<AttackCurve>> {
    let mut strategies: Vec<AttackStrategy> = tables.iter().cloned().map(AttackStrategy::Ranked).collect();
    strategies.push(AttackStrategy::Random { replicates, seed });
    strategies.iter().map(|s| attack(net, s, grid, notion)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::{betweenness_centrality, IndexKind};
    use crate::graph::{Edge, Point2D};

    fn path3() -> RoadNetwork {
        let nodes = (0..3).map(|i| (NodeId(i), Point2D::new(i as f64, 0.0)));
        RoadNetwork::new("p", nodes, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn removing_the_middle_of_a_path() {
        let net = path3();
        let b = betweenness_centrality(&net, false).unwrap();
        let strategy = AttackStrategy::Ranked(b);
        assert_eq!(strategy.removal_order(&net).unwrap()[0], 1);
        let c = attack(&net, &strategy, &[0.0, 1.0 / 3.0, 1.0], ComponentNotion::Weak).unwrap();
        assert_eq!(c.lcc_fraction, vec![1.0, 1.0 / 3.0, 0.0]);
        let strong = attack(&net, &strategy, &[0.0, 1.0 / 3.0, 1.0], ComponentNotion::Strong).unwrap();
        assert_eq!(strong.lcc_fraction, vec![1.0 / 3.0, 1.0 / 3.0, 0.0]);
    }

    #[test]
    fn ties_break_by_node_id() {
        let nodes: Vec<NodeId> = vec![NodeId(0), NodeId(1), NodeId(2)];
        let t = CentralityTable::new(IndexKind::Degree, nodes, vec![1.0, 2.0, 2.0], false, 3).unwrap();
        assert_eq!(AttackStrategy::Ranked(t).removal_order(&path3()).unwrap(), vec![1, 2, 0]);
    }

    #[test]
    fn table_must_cover_network() {
        let t = CentralityTable::new(IndexKind::Degree, vec![NodeId(0), NodeId(1)], vec![1.0, 2.0], false, 2).unwrap();
        let err = attack(&path3(), &AttackStrategy::Ranked(t), &[0.0, 1.0], ComponentNotion::Weak);
        assert!(matches!(err, Err(Error::UnknownNode { id: NodeId(2), .. })));
    }

    #[test]
    fn node_lists() {
        let net = path3();
        let s = AttackStrategy::NodeList {
            label: "zone".into(),
            nodes: vec![NodeId(1)],
        };
        let c = attack(&net, &s, &fraction_grid(0.5).unwrap(), ComponentNotion::Weak).unwrap();
        // k = round(0.5 * 3) = 2 exceeds the list
        assert_eq!(c.fractions_removed, vec![0.0]);
        let c = attack(&net, &s, &[0.0, 1.0 / 3.0], ComponentNotion::Weak).unwrap();
        assert_eq!(c.lcc_fraction, vec![1.0, 1.0 / 3.0]);
        let bad = AttackStrategy::NodeList {
            label: "zone".into(),
            nodes: vec![NodeId(7)],
        };
        assert!(attack(&net, &bad, &[0.0], ComponentNotion::Weak).is_err());
        let dup = AttackStrategy::NodeList {
            label: "zone".into(),
            nodes: vec![NodeId(1), NodeId(1)],
        };
        assert!(attack(&net, &dup, &[0.0], ComponentNotion::Weak).is_err());
    }

    #[test]
    fn grids() {
        let g = fraction_grid(0.01).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[10], 0.1);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(fraction_grid(0.3).is_err());
        assert!(fraction_grid(0.0).is_err());
        assert!(attack(&path3(), &AttackStrategy::Random { replicates: 2, seed: 0 }, &[0.5, 0.2], ComponentNotion::Weak).is_err());
    }

    #[test]
    fn auc_trapezoid() {
        let c = AttackCurve {
            strategy: "x".into(),
            fractions_removed: vec![0.0, 0.5, 1.0],
            lcc_fraction: vec![1.0, 0.5, 0.0],
            lcc_min: None,
            lcc_max: None,
            component_notion: ComponentNotion::Weak,
            replicates: None,
            seed: None,
        };
        assert_eq!(c.auc(), 0.5);
        assert_eq!(c.value_at(0.49), Some(0.5));
        let mut buf = Vec::new();
        write_curves_csv(&[c], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("strategy,fraction_removed,lcc_fraction\nx,0,1\n"));
    }

    #[test]
    fn random_curve_has_spread() {
        let net = path3();
        let c = attack(&net, &AttackStrategy::Random { replicates: 5, seed: 3 }, &[0.0, 1.0 / 3.0, 1.0], ComponentNotion::Weak).unwrap();
        assert_eq!(c.lcc_fraction[0], 1.0);
        assert_eq!(c.lcc_fraction[2], 0.0);
        let (lo, hi) = (c.lcc_min.as_ref().unwrap(), c.lcc_max.as_ref().unwrap());
        assert!(lo[1] <= c.lcc_fraction[1] && c.lcc_fraction[1] <= hi[1]);
        let mut buf = Vec::new();
        write_curves_csv(&[c], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("strategy,fraction_removed,lcc_fraction,lcc_min,lcc_max\n"));
    }
}
