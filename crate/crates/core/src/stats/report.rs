//! Tabular reports: per-zone summary statistics, the pairwise tau matrix and
//! zone-versus-zone location tests.

use std::io::Write;

use super::{kendall_tau, mann_whitney, mean_sd, min_max, MwMode, TestResult};
use crate::centrality::{CentralityTable, IndexKind};
use crate::error::{Error, Result};

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Three significant figures with a signed two-digit exponent, e.g.
/// `4.36E-03`. Zero prints as `0`.
pub fn format_sci(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.2E}");
    let (mantissa, exp) = s.split_once('E').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

fn star(r: &TestResult) -> &'static str {
    if r.is_significant(SIGNIFICANCE_LEVEL) {
        " *"
    } else {
        ""
    }
}

fn flush<W: Write>(w: csv::Writer<W>, what: &str) -> Result<()> {
    w.into_inner()
        .map_err(|e| Error::io(format!("<{what}>"), e.into_error()))?
        .flush()
        .map_err(|e| Error::io(format!("<{what}>"), e))
}

/// One zone's network size and centrality tables.
#[derive(Debug, Clone)]
pub struct ZoneInput {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub tables: Vec<CentralityTable>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub values: Vec<Option<f64>>,
}

/// Rows are `nodes`, `edges`, then `<index>.min|mean|max|sd` for every index
/// present in any zone; columns are zones.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub zones: Vec<String>,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn get(&self, label: &str, zone: &str) -> Option<f64> {
        let z = self.zones.iter().position(|n| n == zone)?;
        self.rows.iter().find(|r| r.label == label)?.values[z]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["statistic".to_string()];
        header.extend(self.zones.iter().cloned());
        w.write_record(&header)?;
        for row in &self.rows {
            let counts = row.label == "nodes" || row.label == "edges";
            let mut rec = vec![row.label.clone()];
            rec.extend(row.values.iter().map(|v| match v {
                None => String::new(),
                Some(v) if counts => format!("{}", *v as u64),
                Some(v) => format_sci(*v),
            }));
            w.write_record(&rec)?;
        }
        flush(w, "summary csv")
    }
}

pub fn summary_table(zones: &[ZoneInput]) -> Result<SummaryTable> {
    if zones.is_empty() {
        return Err(Error::param("summary table needs at least one zone"));
    }
    let kinds: Vec<IndexKind> = IndexKind::ALL
        .iter()
        .copied()
        .filter(|k| zones.iter().any(|z| z.tables.iter().any(|t| t.kind() == *k)))
        .collect();
    let mut rows = vec![
        SummaryRow {
            label: "nodes".into(),
            values: zones.iter().map(|z| Some(z.nodes as f64)).collect(),
        },
        SummaryRow {
            label: "edges".into(),
            values: zones.iter().map(|z| Some(z.edges as f64)).collect(),
        },
    ];
    for kind in kinds {
        let stats: Vec<[Option<f64>; 4]> = zones
            .iter()
            .map(|z| match z.tables.iter().find(|t| t.kind() == kind) {
                None => [None; 4],
                Some(t) => {
                    let mm = min_max(t.values());
                    let (mean, sd) = mean_sd(t.values());
                    [mm.map(|m| m.0), mean, mm.map(|m| m.1), sd]
                }
            })
            .collect();
        for (k, stat) in ["min", "mean", "max", "sd"].iter().enumerate() {
            rows.push(SummaryRow {
                label: format!("{}.{stat}", kind.as_str()),
                values: stats.iter().map(|s| s[k]).collect(),
            });
        }
    }
    Ok(SummaryTable {
        zones: zones.iter().map(|z| z.name.clone()).collect(),
        rows,
    })
}

/// Pairwise Kendall tau between indices over the same nodes. `results[i][j]`
/// is set for `i < j`; `None` where tau is undefined (a constant index).
#[derive(Debug, Clone, PartialEq)]
pub struct TauMatrix {
    pub names: Vec<String>,
    pub results: Vec<Vec<Option<TestResult>>>,
}

impl TauMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<TestResult> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.results[i][j]
    }

    /// Upper-triangle layout: cells read like `0.13 *`, `NA` when undefined.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (i, name) in self.names.iter().enumerate() {
            let mut rec = vec![name.clone()];
            for j in 0..self.names.len() {
                rec.push(if j <= i {
                    String::new()
                } else {
                    match &self.results[i][j] {
                        Some(r) => format!("{:.2}{}", r.statistic, star(r)),
                        None => "NA".into(),
                    }
                });
            }
            w.write_record(&rec)?;
        }
        flush(w, "tau csv")
    }

    /// Long form `index_a,index_b,tau,p_value,n`.
    pub fn write_pairs_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index_a", "index_b", "tau", "p_value", "n"])?;
        for i in 0..self.names.len() {
            for j in i + 1..self.names.len() {
                let (tau, p, n) = match &self.results[i][j] {
                    Some(r) => (r.statistic.to_string(), r.p_value.to_string(), r.n1.to_string()),
                    None => ("NA".into(), "NA".into(), String::new()),
                };
                w.write_record([self.names[i].clone(), self.names[j].clone(), tau, p, n])?;
            }
        }
        flush(w, "tau pairs csv")
    }
}

pub fn tau_matrix(tables: &[CentralityTable]) -> Result<TauMatrix> {
    let Some(first) = tables.first() else {
        return Err(Error::param("tau matrix needs at least one index"));
    };
    if let Some(t) = tables.iter().find(|t| t.nodes() != first.nodes()) {
        return Err(Error::param(format!("index '{}' covers different nodes", t.name())));
    }
    let k = tables.len();
    let mut results = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            results[i][j] = match kendall_tau(tables[i].values(), tables[j].values()) {
                Ok(r) => Some(r),
                Err(Error::Degenerate(_)) => None,
                Err(e) => return Err(e),
            };
        }
    }
    Ok(TauMatrix {
        names: tables.iter().map(|t| t.name().to_string()).collect(),
        results,
    })
}

/// Mann–Whitney p-values per index (rows) and zone pair (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneComparison {
    pub indices: Vec<String>,
    pub comparisons: Vec<String>,
    pub results: Vec<Vec<Option<TestResult>>>,
}

impl ZoneComparison {
    pub fn get(&self, index: &str, comparison: &str) -> Option<TestResult> {
        let i = self.indices.iter().position(|n| n == index)?;
        let j = self.comparisons.iter().position(|n| n == comparison)?;
        self.results[i][j]
    }

    /// `index,<A> vs. <B>,...` with p-values, starred below the
    /// significance level.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["index".to_string()];
        header.extend(self.comparisons.iter().cloned());
        w.write_record(&header)?;
        for (i, name) in self.indices.iter().enumerate() {
            let mut rec = vec![name.clone()];
            rec.extend(self.results[i].iter().map(|r| match r {
                Some(r) => format!("{}{}", format_sci(r.p_value), star(r)),
                None => "NA".into(),
            }));
            w.write_record(&rec)?;
        }
        flush(w, "zone comparison csv")
    }
}

/// Compares every index shared by both zones of each pair.
pub fn zone_comparison(zones: &[ZoneInput], pairs: &[(usize, usize)], mode: MwMode) -> Result<ZoneComparison> {
    if pairs.is_empty() {
        return Err(Error::param("no zone pairs to compare"));
    }
    if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= zones.len() || *b >= zones.len() || a == b) {
        return Err(Error::param(format!("invalid zone pair ({a}, {b})")));
    }
    let kinds: Vec<IndexKind> = IndexKind::ALL
        .iter()
        .copied()
        .filter(|k| zones.iter().any(|z| z.tables.iter().any(|t| t.kind() == *k)))
        .collect();
    let mut results = Vec::with_capacity(kinds.len());
    for kind in &kinds {
        let mut row = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let find = |z: &ZoneInput| z.tables.iter().find(|t| t.kind() == *kind).map(|t| t.values().to_vec());
            row.push(match (find(&zones[a]), find(&zones[b])) {
                (Some(x), Some(y)) => match mann_whitney(&x, &y, mode) {
                    Ok(r) => Some(r),
                    Err(Error::Degenerate(_)) => None,
                    Err(e) => return Err(e),
                },
                _ => None,
            });
        }
        results.push(row);
    }
    Ok(ZoneComparison {
        indices: kinds.iter().map(|k| k.as_str().to_string()).collect(),
        comparisons: pairs
            .iter()
            .map(|&(a, b)| format!("{} vs. {}", zones[a].name, zones[b].name))
            .collect(),
        results,
    })
}
