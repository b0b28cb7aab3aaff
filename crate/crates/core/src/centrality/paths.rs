//! Shortest-path engine shared by closeness, betweenness and load.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::RoadNetwork;

/// Absolute tolerance (meters) under which two path lengths are co-optimal.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Compressed adjacency in both directions with parallel edges collapsed to
/// their minimum length. Undirected networks get both directions of every
/// edge.
#[derive(Debug, Clone)]
pub struct ShortestPathView {
    n: usize,
    forward: Csr,
    reverse: Csr,
}

#[derive(Debug, Clone)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    lengths: Vec<f64>,
}

impl Csr {
    /// `arcs` must be sorted by (from, to) and free of duplicates.
    fn from_sorted(n: usize, arcs: &[(u32, u32, f64)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Csr {
            offsets,
            targets: arcs.iter().map(|a| a.1).collect(),
            lengths: arcs.iter().map(|a| a.2).collect(),
        }
    }

    fn adjacency(&self) -> Adjacency<'_> {
        Adjacency {
            offsets: &self.offsets,
            targets: &self.targets,
            lengths: &self.lengths,
        }
    }
}

/// Borrowed view of one traversal direction.
#[derive(Debug, Clone, Copy)]
pub struct Adjacency<'a> {
    offsets: &'a [usize],
    targets: &'a [u32],
    lengths: &'a [f64],
}

impl<'a> Adjacency<'a> {
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + 'a {
        let r = self.offsets[u]..self.offsets[u + 1];
        self.targets[r.clone()].iter().map(|&t| t as usize).zip(self.lengths[r].iter().copied())
    }
}

impl ShortestPathView {
    pub fn new(net: &RoadNetwork) -> Self {
        let n = net.node_count();
        assert!(n < u32::MAX as usize, "node count exceeds u32 range");
        let mut arcs: Vec<(u32, u32, f64)> = Vec::with_capacity(net.edge_count() * if net.is_directed() { 1 } else { 2 });
        for (e, &(s, t)) in net.edges().iter().zip(net.edge_endpoints()) {
            arcs.push((s as u32, t as u32, e.length));
            if !net.is_directed() {
                arcs.push((t as u32, s as u32, e.length));
            }
        }
        let collapse = |arcs: &mut Vec<(u32, u32, f64)>| {
            arcs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
            // the minimum length of each (from, to) group comes first
            arcs.dedup_by(|later, first| later.0 == first.0 && later.1 == first.1);
        };
        collapse(&mut arcs);
        let forward = Csr::from_sorted(n, &arcs);
        let mut rev: Vec<(u32, u32, f64)> = arcs.iter().map(|&(s, t, l)| (t, s, l)).collect();
        collapse(&mut rev);
        let reverse = Csr::from_sorted(n, &rev);
        ShortestPathView { n, forward, reverse }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.forward.targets.len()
    }

    /// Out-arcs: traversal away from a source.
    pub fn forward(&self) -> Adjacency<'_> {
        self.forward.adjacency()
    }

    /// In-arcs: traversal towards a target.
    pub fn reverse(&self) -> Adjacency<'_> {
        self.reverse.adjacency()
    }

    /// Effective (minimum) length of the arc `u -> v`.
    pub fn length(&self, u: usize, v: usize) -> Option<f64> {
        self.forward().neighbors(u).find(|&(t, _)| t == v).map(|(_, l)| l)
    }
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // min-heap on distance, ties broken by node index
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

/// Single-source Dijkstra that records path counts and the full predecessor
/// DAG of co-optimal paths. Buffers are reused between runs.
const NONE: u32 = u32::MAX;

/// Reusable single-source search. Predecessors live in a flat arena of
/// singly linked lists so that repeated searches do not allocate.
#[derive(Debug)]
pub struct SearchState {
    pub dist: Vec<f64>,
    pub sigma: Vec<f64>,
    pub order: Vec<u32>,
    pred_head: Vec<u32>,
    pred_count: Vec<u32>,
    arena_node: Vec<u32>,
    arena_next: Vec<u32>,
    settled: Vec<bool>,
    heap: BinaryHeap<HeapEntry>,
}

/// Predecessors of one node on shortest paths from the root, most recently
/// found first.
pub struct Preds<'a> {
    state: &'a SearchState,
    cursor: u32,
}

impl Iterator for Preds<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cursor == NONE {
            return None;
        }
        let i = self.cursor as usize;
        self.cursor = self.state.arena_next[i];
        Some(self.state.arena_node[i] as usize)
    }
}

impl SearchState {
    pub fn new(n: usize) -> Self {
        SearchState {
            dist: vec![f64::INFINITY; n],
            sigma: vec![0.0; n],
            order: Vec::with_capacity(n),
            pred_head: vec![NONE; n],
            pred_count: vec![0; n],
            arena_node: Vec::new(),
            arena_next: Vec::new(),
            settled: vec![false; n],
            heap: BinaryHeap::new(),
        }
    }

    pub fn preds(&self, v: usize) -> Preds<'_> {
        Preds {
            state: self,
            cursor: self.pred_head[v],
        }
    }

    pub fn pred_count(&self, v: usize) -> usize {
        self.pred_count[v] as usize
    }

    fn reset(&mut self) {
        for &v in &self.order {
            let v = v as usize;
            self.dist[v] = f64::INFINITY;
            self.sigma[v] = 0.0;
            self.pred_head[v] = NONE;
            self.pred_count[v] = 0;
            self.settled[v] = false;
        }
        self.order.clear();
        self.heap.clear();
        self.arena_node.clear();
        self.arena_next.clear();
    }

    fn add_pred(&mut self, w: usize, v: u32) {
        self.arena_node.push(v);
        self.arena_next.push(self.pred_head[w]);
        self.pred_head[w] = (self.arena_node.len() - 1) as u32;
        self.pred_count[w] += 1;
    }

    pub fn run(&mut self, adj: Adjacency<'_>, root: usize) {
        self.reset();
        self.dist[root] = 0.0;
        self.sigma[root] = 1.0;
        self.heap.push(HeapEntry { dist: 0.0, node: root as u32 });
        while let Some(HeapEntry { node, .. }) = self.heap.pop() {
            let v = node as usize;
            if self.settled[v] {
                continue;
            }
            self.settled[v] = true;
            self.order.push(node);
            let dv = self.dist[v];
            let sv = self.sigma[v];
            for (w, len) in adj.neighbors(v) {
                if self.settled[w] {
                    continue;
                }
                let nd = dv + len;
                let dw = self.dist[w];
                if nd < dw - TIE_TOLERANCE {
                    self.dist[w] = nd;
                    self.sigma[w] = sv;
                    self.pred_head[w] = NONE;
                    self.pred_count[w] = 0;
                    self.add_pred(w, node);
                    self.heap.push(HeapEntry { dist: nd, node: w as u32 });
                } else if (nd - dw).abs() <= TIE_TOLERANCE {
                    self.sigma[w] += sv;
                    self.add_pred(w, node);
                }
            }
        }
    }
}
