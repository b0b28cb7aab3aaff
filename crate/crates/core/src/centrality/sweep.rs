//! All-sources sweep with an order-fixed reduction.
//!
//! Roots are processed in blocks; within a block the per-root searches may
//! run on any number of threads, but their contributions are always added to
//! the totals in ascending root order, so the floating-point result is the
//! same for every thread count.

use rayon::prelude::*;

use super::paths::{SearchState, ShortestPathView};

const BLOCK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pass {
    /// Searches leave each root along out-arcs: distances from the root,
    /// betweenness dependencies of the root as a source.
    Forward,
    /// Searches follow in-arcs: distances to the root, load flows towards
    /// the root as a target.
    Reverse,
}

#[derive(Debug, Clone)]
pub(crate) struct SweepOutput {
    /// Betweenness (forward) or load (reverse) over ordered pairs, unscaled.
    pub pair_sums: Option<Vec<f64>>,
    /// Nodes reached from each root, the root included.
    pub reach: Vec<usize>,
    /// Sum of shortest-path distances over the reached nodes.
    pub distance_sum: Vec<f64>,
}

struct Worker {
    search: SearchState,
    acc: Vec<f64>,
}

struct RootResult {
    reach: usize,
    distance_sum: f64,
    contrib: Vec<(u32, f64)>,
}

impl Worker {
    fn new(n: usize) -> Self {
        Worker {
            search: SearchState::new(n),
            acc: vec![0.0; n],
        }
    }

    fn process(&mut self, view: &ShortestPathView, pass: Pass, root: usize, pair_sums: bool) -> RootResult {
        let adj = match pass {
            Pass::Forward => view.forward(),
            Pass::Reverse => view.reverse(),
        };
        self.search.run(adj, root);
        let st = &self.search;
        let distance_sum: f64 = st.order.iter().map(|&v| st.dist[v as usize]).sum();
        let mut contrib = Vec::new();
        if pair_sums {
            contrib.reserve(st.order.len());
            let acc = &mut self.acc;
            match pass {
                Pass::Forward => {
                    // Brandes dependency accumulation
                    for &w in st.order.iter().rev() {
                        let w = w as usize;
                        let coeff = (1.0 + acc[w]) / st.sigma[w];
                        for v in st.preds(w) {
                            acc[v] += st.sigma[v] * coeff;
                        }
                        if w != root && acc[w] != 0.0 {
                            contrib.push((w as u32, acc[w]));
                        }
                    }
                }
                Pass::Reverse => {
                    // Every node that reaches the root emits one packet; a
                    // node's packets split evenly over its next hops.
                    for &v in st.order.iter().rev() {
                        let v = v as usize;
                        if v == root {
                            continue;
                        }
                        let share = (1.0 + acc[v]) / st.pred_count(v) as f64;
                        for x in st.preds(v) {
                            acc[x] += share;
                        }
                        if acc[v] != 0.0 {
                            contrib.push((v as u32, acc[v]));
                        }
                    }
                }
            }
            for &v in &st.order {
                acc[v as usize] = 0.0;
            }
        }
        RootResult {
            reach: st.order.len(),
            distance_sum,
            contrib,
        }
    }
}

pub(crate) fn sweep(view: &ShortestPathView, pass: Pass, pair_sums: bool) -> SweepOutput {
    let n = view.node_count();
    let mut sums = pair_sums.then(|| vec![0.0; n]);
    let mut reach = vec![0usize; n];
    let mut distance_sum = vec![0.0; n];
    // one worker per thread, reused for every block; each takes a
    // contiguous run of roots so the per-root results come back in order
    let mut workers: Vec<Worker> = (0..rayon::current_num_threads().max(1)).map(|_| Worker::new(n)).collect();
    let mut start = 0;
    while start < n {
        let end = (start + BLOCK).min(n);
        let per = (end - start).div_ceil(workers.len());
        let results: Vec<Vec<RootResult>> = workers
            .par_iter_mut()
            .enumerate()
            .map(|(i, w)| {
                let lo = (start + i * per).min(end);
                let hi = (lo + per).min(end);
                (lo..hi).map(|root| w.process(view, pass, root, pair_sums)).collect()
            })
            .collect();
        for (root, res) in (start..end).zip(results.into_iter().flatten()) {
            reach[root] = res.reach;
            distance_sum[root] = res.distance_sum;
            if let Some(sums) = sums.as_mut() {
                for (v, c) in res.contrib {
                    sums[v as usize] += c;
                }
            }
        }
        if end.is_multiple_of(BLOCK * 16) {
            log::debug!("{pass:?} sweep: {end}/{n} roots");
        }
        start = end;
    }
    SweepOutput {
        pair_sums: sums,
        reach,
        distance_sum,
    }
}
