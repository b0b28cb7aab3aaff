//! Rank-based tests between centrality indices and between zones.

mod report;

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub use report::{
    format_sci, summary_table, tau_matrix, zone_comparison, SummaryRow, SummaryTable, TauMatrix, ZoneComparison,
    ZoneInput, SIGNIFICANCE_LEVEL,
};

/// Largest combined sample for which `auto` picks the exact test.
pub const EXACT_CUTOFF: usize = 16;
/// Upper bound on `n1 + n2` for an explicitly requested exact test.
const EXACT_LIMIT: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestMethod {
    TauBNormal,
    UNormal,
    UExact,
}

impl fmt::Display for TestMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestMethod::TauBNormal => "tau-b normal approximation",
            TestMethod::UNormal => "U normal approximation",
            TestMethod::UExact => "U exact",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: TestMethod,
    pub n1: usize,
    pub n2: usize,
}

impl TestResult {
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MwMode {
    #[default]
    Auto,
    Exact,
    Approx,
}

impl std::str::FromStr for MwMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(MwMode::Auto),
            "exact" => Ok(MwMode::Exact),
            "approx" => Ok(MwMode::Approx),
            other => Err(Error::param(format!("unknown Mann-Whitney mode '{other}'"))),
        }
    }
}

fn check_finite(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(Error::param(format!("{name} contains non-finite values")));
    }
    Ok(())
}

/// Sum over tie groups of `f(t)` where `t` is the group size; `sorted` must
/// be sorted.
fn tie_sum(sorted: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        total += f((j - i) as f64);
        i = j;
    }
    total
}

/// Counts inversions of `v` while merge-sorting it.
fn count_inversions(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = count_inversions(&mut v[..mid], buf) + count_inversions(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf.push(v[j]);
            inv += (mid - i) as u64;
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    inv
}

/// Kendall's tau-b with a two-sided p-value from the tie-adjusted normal
/// approximation. O(n log n).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<TestResult> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::param(format!("series lengths differ ({} vs {})", n, y.len())));
    }
    if n < 2 {
        return Err(Error::param("kendall tau needs at least 2 observations"));
    }
    check_finite("x", x)?;
    check_finite("y", y)?;

    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let pair_count = |t: f64| t * (t - 1.0) / 2.0;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let x_tie = tie_sum(&xs, pair_count);
    let mut joint_tie = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pairs[j] == pairs[i] {
            j += 1;
        }
        joint_tie += pair_count((j - i) as f64);
        i = j;
    }
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let discordant = count_inversions(&mut ys, &mut Vec::with_capacity(n)) as f64;
    let y_tie = tie_sum(&ys, pair_count);

    let nf = n as f64;
    let total = pair_count(nf);
    if x_tie == total || y_tie == total {
        return Err(Error::Degenerate("tau is undefined for a constant series".into()));
    }
    let s = total - x_tie - y_tie + joint_tie - 2.0 * discordant;
    let tau = (s / ((total - x_tie) * (total - y_tie)).sqrt()).clamp(-1.0, 1.0);

    let m = nf * (nf - 1.0);
    let v1 = |t: f64| t * (t - 1.0) * (2.0 * t + 5.0);
    let v2 = |t: f64| t * (t - 1.0) * (t - 2.0);
    let sorted_x = xs;
    let var = (m * (2.0 * nf + 5.0) - tie_sum(&sorted_x, v1) - tie_sum(&ys, v1)) / 18.0
        + 2.0 * x_tie * y_tie / m
        + if n > 2 {
            tie_sum(&sorted_x, v2) * tie_sum(&ys, v2) / (9.0 * m * (nf - 2.0))
        } else {
            0.0
        };
    let p = if var > 0.0 {
        erfc(s.abs() / var.sqrt() / std::f64::consts::SQRT_2).min(1.0)
    } else {
        1.0
    };
    Ok(TestResult {
        statistic: tau,
        p_value: p,
        method: TestMethod::TauBNormal,
        n1: n,
        n2: n,
    })
}

/// Midranks (1-based) of the concatenation `x ++ y`, plus the sorted pooled
/// sample.
fn midranks(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    let sorted = order.iter().map(|&k| pooled[k]).collect();
    (ranks, sorted)
}

/// Null distribution of `U` as counts indexed by `U`, built from the number
/// of `n1`-subsets of `{1..n1+n2}` with each rank sum.
fn u_distribution(n1: usize, n2: usize) -> Vec<f64> {
    let n = n1 + n2;
    let max_sum = n1 * n;
    // dp[k][s]: subsets of size k with rank sum s
    let mut dp = vec![vec![0.0f64; max_sum + 1]; n1 + 1];
    dp[0][0] = 1.0;
    for r in 1..=n {
        for k in (1..=n1.min(r)).rev() {
            let (lower, upper) = dp.split_at_mut(k);
            let prev = &lower[k - 1];
            let cur = &mut upper[0];
            for s in (r..=max_sum).rev() {
                if prev[s - r] != 0.0 {
                    cur[s] += prev[s - r];
                }
            }
        }
    }
    let offset = n1 * (n1 + 1) / 2;
    (0..=n1 * n2).map(|u| dp[n1][u + offset]).collect()
}

/// Two-sided Mann–Whitney U test of equal location. The statistic is `U`
/// for `x`.
pub fn mann_whitney(x: &[f64], y: &[f64], mode: MwMode) -> Result<TestResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Degenerate("Mann-Whitney needs two non-empty samples".into()));
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let (n1, n2) = (x.len(), y.len());
    let (ranks, sorted) = midranks(x, y);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    let has_ties = sorted.windows(2).any(|w| w[0] == w[1]);

    let exact = match mode {
        MwMode::Approx => false,
        MwMode::Auto => n1 + n2 <= EXACT_CUTOFF && !has_ties,
        MwMode::Exact => {
            if has_ties {
                return Err(Error::param("exact Mann-Whitney test requires tie-free samples"));
            }
            if n1 + n2 > EXACT_LIMIT {
                return Err(Error::param(format!(
                    "exact Mann-Whitney test limited to {EXACT_LIMIT} observations"
                )));
            }
            true
        }
    };

    let (nf1, nf2) = (n1 as f64, n2 as f64);
    let p = if exact {
        let counts = u_distribution(n1, n2);
        let total: f64 = counts.iter().sum();
        let k = u.round() as usize;
        let lower: f64 = counts[..=k].iter().sum();
        let upper: f64 = counts[k..].iter().sum();
        (2.0 * lower.min(upper) / total).min(1.0)
    } else {
        let nt = nf1 + nf2;
        let ties = tie_sum(&sorted, |t| t * t * t - t);
        let var = nf1 * nf2 / 12.0 * ((nt + 1.0) - ties / (nt * (nt - 1.0)).max(1.0));
        if var <= 0.0 {
            1.0
        } else {
            let z = ((u - nf1 * nf2 / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
            erfc(z / std::f64::consts::SQRT_2).min(1.0)
        }
    };
    Ok(TestResult {
        statistic: u,
        p_value: p,
        method: if exact { TestMethod::UExact } else { TestMethod::UNormal },
        n1,
        n2,
    })
}

/// Sample mean and `n - 1` standard deviation; `None` for the deviation
/// when fewer than two values.
pub fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (Some(mean), Some((ss / (n - 1.0)).sqrt()))
}

pub(crate) fn min_max(values: &[f64]) -> Option<(f64, f64)> {
    let mut it = values.iter().copied();
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
}
