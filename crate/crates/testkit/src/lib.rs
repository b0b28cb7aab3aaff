//! Brute-force reference computations for tests.
//!
//! Nothing here depends on the `roadnet` crate: graphs are plain arc lists
//! over dense node indices, and every quantity is computed the slow, direct
//! way.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TIE: f64 = 1e-9;

/// Arc list over nodes `0..n`.
#[derive(Debug, Clone)]
pub struct Digraph {
    pub n: usize,
    pub arcs: Vec<(usize, usize, f64)>,
}

impl Digraph {
    /// Random digraph with arc probability `p` and integer lengths in
    /// `1..=max_len` (integer lengths make tied shortest paths common).
    /// Roughly one arc in ten gets a longer parallel twin.
    pub fn random(n: usize, p: f64, max_len: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut arcs = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if s != t && rng.gen_bool(p) {
                    let len = rng.gen_range(1..=max_len) as f64;
                    arcs.push((s, t, len));
                    if rng.gen_bool(0.1) {
                        arcs.push((s, t, len + rng.gen_range(0..=2) as f64));
                    }
                }
            }
        }
        Digraph { n, arcs }
    }

    /// Minimum length per ordered pair, `INF` when there is no arc.
    pub fn weight_matrix(&self) -> Vec<Vec<f64>> {
        let mut w = vec![vec![f64::INFINITY; self.n]; self.n];
        for &(s, t, l) in &self.arcs {
            if l < w[s][t] {
                w[s][t] = l;
            }
        }
        w
    }
}

pub fn floyd_warshall(g: &Digraph) -> Vec<Vec<f64>> {
    let mut d = g.weight_matrix();
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for k in 0..g.n {
        for i in 0..g.n {
            if d[i][k].is_infinite() {
                continue;
            }
            for j in 0..g.n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE
}

/// `sigma[s][t]`: number of shortest s-t paths (1 on the diagonal).
pub fn path_counts(g: &Digraph, d: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let w = g.weight_matrix();
    let mut sigma = vec![vec![0.0; g.n]; g.n];
    for s in 0..g.n {
        let mut order: Vec<usize> = (0..g.n).filter(|&v| d[s][v].is_finite()).collect();
        order.sort_by(|&a, &b| d[s][a].total_cmp(&d[s][b]));
        sigma[s][s] = 1.0;
        for &v in &order {
            if v == s {
                continue;
            }
            sigma[s][v] = (0..g.n)
                .filter(|&u| u != v && w[u][v].is_finite() && d[s][u].is_finite() && tied(d[s][u] + w[u][v], d[s][v]))
                .map(|u| sigma[s][u])
                .sum();
        }
    }
    sigma
}

/// Raw ordered-pair betweenness: sum over s != i != t of
/// `sigma(s,i) sigma(i,t) / sigma(s,t)` for i on a shortest s-t path.
pub fn betweenness(g: &Digraph) -> Vec<f64> {
    let d = floyd_warshall(g);
    let sigma = path_counts(g, &d);
    let mut b = vec![0.0; g.n];
    for (i, bi) in b.iter_mut().enumerate() {
        for s in 0..g.n {
            for t in 0..g.n {
                if s == t || s == i || t == i || d[s][t].is_infinite() {
                    continue;
                }
                if d[s][i].is_finite() && d[i][t].is_finite() && tied(d[s][i] + d[i][t], d[s][t]) {
                    *bi += sigma[s][i] * sigma[i][t] / sigma[s][t];
                }
            }
        }
    }
    b
}

/// Raw load by simulating one unit packet per ordered pair, split evenly
/// over next hops on shortest paths towards the target.
pub fn load(g: &Digraph) -> Vec<f64> {
    let d = floyd_warshall(g);
    let w = g.weight_matrix();
    let mut load = vec![0.0; g.n];
    for t in 0..g.n {
        let mut order: Vec<usize> = (0..g.n).filter(|&v| v != t && d[v][t].is_finite()).collect();
        order.sort_by(|&a, &b| d[b][t].total_cmp(&d[a][t]));
        for s in order.iter().copied() {
            let mut mass = vec![0.0; g.n];
            mass[s] = 1.0;
            for &v in &order {
                if mass[v] == 0.0 {
                    continue;
                }
                if v != s {
                    load[v] += mass[v];
                }
                let hops: Vec<usize> = (0..g.n)
                    .filter(|&x| w[v][x].is_finite() && d[x][t].is_finite() && tied(w[v][x] + d[x][t], d[v][t]))
                    .collect();
                let share = mass[v] / hops.len() as f64;
                for x in hops {
                    mass[x] += share;
                }
            }
        }
    }
    load
}

/// Closeness from the distance matrix: `(r-1)/sum d`, optionally times
/// `(r-1)/(n-1)`. `inward` uses distances towards the node.
pub fn closeness(g: &Digraph, inward: bool, normalized: bool) -> Vec<f64> {
    let d = floyd_warshall(g);
    (0..g.n)
        .map(|i| {
            let dists: Vec<f64> = (0..g.n)
                .filter(|&j| j != i)
                .map(|j| if inward { d[j][i] } else { d[i][j] })
                .filter(|x| x.is_finite())
                .collect();
            let total: f64 = dists.iter().sum();
            if dists.is_empty() || total == 0.0 {
                return 0.0;
            }
            let r1 = dists.len() as f64;
            let c = r1 / total;
            if normalized {
                c * r1 / (g.n - 1) as f64
            } else {
                c
            }
        })
        .collect()
}

/// (in-degree, out-degree) counting parallel arcs.
pub fn degrees(g: &Digraph) -> (Vec<f64>, Vec<f64>) {
    let mut indeg = vec![0.0; g.n];
    let mut outdeg = vec![0.0; g.n];
    for &(s, t, _) in &g.arcs {
        outdeg[s] += 1.0;
        indeg[t] += 1.0;
    }
    (indeg, outdeg)
}

/// Kendall tau-b by enumerating all pairs.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut conc, mut disc, mut tx, mut ty) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                tx += 1.0;
                ty += 1.0;
            } else if dx == 0.0 {
                tx += 1.0;
            } else if dy == 0.0 {
                ty += 1.0;
            } else if (dx > 0.0) == (dy > 0.0) {
                conc += 1.0;
            } else {
                disc += 1.0;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as f64;
    (conc - disc) / ((n0 - tx) * (n0 - ty)).sqrt()
}

/// Exact two-sided Mann-Whitney p-value for tie-free samples, enumerating
/// every split of the pooled ranks.
pub fn mann_whitney_exact_p(x: &[f64], y: &[f64]) -> f64 {
    let (n1, n2) = (x.len(), y.len());
    let n = n1 + n2;
    let mut pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let rank = |v: f64| pooled.iter().position(|&p| p == v).unwrap() + 1;
    let r1: usize = x.iter().map(|&v| rank(v)).sum();
    let u_obs = r1 as f64 - (n1 * (n1 + 1) / 2) as f64;
    let mean = (n1 * n2) as f64 / 2.0;
    let dev = (u_obs - mean).abs();
    let (mut extreme, mut total) = (0u64, 0u64);
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let rs: usize = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).sum();
        let u = rs as f64 - (n1 * (n1 + 1) / 2) as f64;
        total += 1;
        if (u - mean).abs() >= dev - 1e-12 {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}

/// Midpoint rule over `[-1, 1]^2` with `m x m` cells.
pub fn integrate_unit_square(m: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let h = 2.0 / m as f64;
    let mut total = 0.0;
    for i in 0..m {
        let x = -1.0 + (i as f64 + 0.5) * h;
        for j in 0..m {
            let y = -1.0 + (j as f64 + 0.5) * h;
            total += f(x, y);
        }
    }
    total * h * h
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() <= 1e-300
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_sanity() {
        // directed path 0 -> 1 -> 2
        let g = Digraph { n: 3, arcs: vec![(0, 1, 1.0), (1, 2, 1.0)] };
        assert_eq!(betweenness(&g), vec![0.0, 1.0, 0.0]);
        assert_eq!(load(&g), vec![0.0, 1.0, 0.0]);
        assert_eq!(kendall_tau_b(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), -1.0);
        assert!((mann_whitney_exact_p(&[1.0, 2.0], &[3.0, 4.0]) - 1.0 / 3.0).abs() < 1e-15);
    }
}
