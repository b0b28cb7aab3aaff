//! Complete spatial randomness: G and F functions with Monte Carlo
//! pointwise envelopes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use rstar::RTree;
use serde::{Deserialize, Serialize};

use super::StudyWindow;
use crate::error::{Error, Result};
use crate::graph::Point2D;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctionKind {
    /// Event to nearest other event.
    G,
    /// Reference location to nearest event.
    F,
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionKind::G => "G",
            FunctionKind::F => "F",
        })
    }
}

impl FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "G" | "g" => Ok(FunctionKind::G),
            "F" | "f" => Ok(FunctionKind::F),
            other => Err(Error::param(format!("unknown function kind '{other}' (expected G or F)"))),
        }
    }
}

fn check_r_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::param("empty distance grid"));
    }
    if r_grid.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::param("distance grid values must be finite and non-negative"));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("distance grid must be strictly ascending"));
    }
    Ok(())
}

fn tree(points: &[Point2D]) -> RTree<[f64; 2]> {
    RTree::bulk_load(points.iter().map(|p| [p.x, p.y]).collect())
}

/// Empirical CDF of `dists` at each grid value.
fn ecdf(mut dists: Vec<f64>, r_grid: &[f64]) -> Vec<f64> {
    dists.sort_by(f64::total_cmp);
    let n = dists.len() as f64;
    r_grid
        .iter()
        .map(|&r| dists.partition_point(|&d| d <= r) as f64 / n)
        .collect()
}

fn nearest_neighbor_distances(points: &[Point2D]) -> Vec<f64> {
    let t = tree(points);
    points
        .iter()
        .map(|p| {
            // the first hit is the point itself (or a coincident duplicate)
            t.nearest_neighbor_iter_with_distance_2(&[p.x, p.y])
                .nth(1)
                .map(|(_, d2)| d2.sqrt())
                .expect("at least two points")
        })
        .collect()
}

fn empty_space_distances(points: &[Point2D], reference: &[Point2D]) -> Vec<f64> {
    let t = tree(points);
    reference
        .iter()
        .map(|q| {
            let nn = t.nearest_neighbor(&[q.x, q.y]).expect("non-empty pattern");
            (nn[0] - q.x).hypot(nn[1] - q.y)
        })
        .collect()
}

/// Fraction of events whose nearest other event lies within each `r`.
pub fn g_function(points: &[Point2D], r_grid: &[f64]) -> Result<Vec<f64>> {
    if points.len() < 2 {
        return Err(Error::Degenerate(format!("G function needs at least 2 points, got {}", points.len())));
    }
    check_r_grid(r_grid)?;
    Ok(ecdf(nearest_neighbor_distances(points), r_grid))
}

/// `ceil(sqrt(m))` squared grid of cell centres over the window's bounding
/// box, keeping those inside the window.
fn reference_grid(window: &StudyWindow, m_reference: usize) -> Result<Vec<Point2D>> {
    if m_reference < 100 {
        return Err(Error::param(format!("F function needs at least 100 reference points, got {m_reference}")));
    }
    let k = (m_reference as f64).sqrt().ceil() as usize;
    let (min, max) = window.bounds();
    let (dx, dy) = ((max.x - min.x) / k as f64, (max.y - min.y) / k as f64);
    let grid: Vec<Point2D> = (0..k)
        .flat_map(|j| (0..k).map(move |i| Point2D::new(min.x + (i as f64 + 0.5) * dx, min.y + (j as f64 + 0.5) * dy)))
        .filter(|p| window.contains(*p))
        .collect();
    if grid.is_empty() {
        return Err(Error::Degenerate("no reference point falls inside the window".into()));
    }
    Ok(grid)
}

/// Fraction of regular reference locations whose nearest event lies within
/// each `r`.
pub fn f_function(points: &[Point2D], window: &StudyWindow, r_grid: &[f64], m_reference: usize) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::Degenerate("F function of an empty point set".into()));
    }
    check_r_grid(r_grid)?;
    let reference = reference_grid(window, m_reference)?;
    Ok(ecdf(empty_space_distances(points, &reference), r_grid))
}

/// `1 - exp(-lambda pi r^2)`, the expectation of both G and F under CSR.
pub fn theoretical_curve(lambda: f64, r_grid: &[f64]) -> Vec<f64> {
    r_grid
        .iter()
        .map(|&r| -(-lambda * std::f64::consts::PI * r * r).exp_m1())
        .collect()
}

/// `steps` evenly spaced distances up to where the CSR curve reaches 0.99.
pub fn default_r_grid(lambda: f64, steps: usize) -> Vec<f64> {
    let r_max = ((100.0f64).ln() / (lambda * std::f64::consts::PI)).sqrt();
    (1..=steps).map(|i| r_max * i as f64 / steps as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsrOptions {
    pub n_sims: usize,
    pub seed: u64,
    /// Explicit distance grid; when absent [`default_r_grid`] is used.
    pub r_grid: Option<Vec<f64>>,
    pub r_steps: usize,
    pub m_reference: usize,
    /// Minimum fraction of the grid on which the empirical curve must lie
    /// inside the envelope for CSR not to be rejected.
    pub inside_threshold: f64,
}

impl Default for CsrOptions {
    fn default() -> Self {
        CsrOptions {
            n_sims: 99,
            seed: 0,
            r_grid: None,
            r_steps: 100,
            m_reference: 10_000,
            inside_threshold: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsrVerdict {
    pub fraction_inside: f64,
    pub fraction_above: f64,
    pub fraction_below: f64,
    pub threshold: f64,
    pub rejected: bool,
}

impl fmt::Display for CsrVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (inside {:.1}%, above {:.1}%, below {:.1}% of r values; threshold {:.1}%)",
            if self.rejected { "rejected" } else { "not rejected" },
            100.0 * self.fraction_inside,
            100.0 * self.fraction_above,
            100.0 * self.fraction_below,
            100.0 * self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeResult {
    pub kind: FunctionKind,
    pub r_grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub theoretical: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub n_points: usize,
    pub lambda: f64,
    pub n_simulations: usize,
    pub seed: u64,
    pub verdict: CsrVerdict,
}

impl EnvelopeResult {
    /// Writes `r,empirical,theoretical,lower,upper`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "empirical", "theoretical", "lower", "upper"])?;
        for i in 0..self.r_grid.len() {
            w.write_record([
                self.r_grid[i].to_string(),
                self.empirical[i].to_string(),
                self.theoretical[i].to_string(),
                self.lower[i].to_string(),
                self.upper[i].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<envelope csv>", e))?;
        Ok(())
    }
}

/// Compares the pattern's G or F function with pointwise min/max envelopes
/// of `n_sims` binomial patterns of the same size in the same window.
/// Simulation `i` draws from stream `i` of `opts.seed`.
pub fn csr_test(points: &[Point2D], window: &StudyWindow, kind: FunctionKind, opts: &CsrOptions) -> Result<EnvelopeResult> {
    if opts.n_sims < 19 {
        return Err(Error::param(format!("at least 19 simulations are required, got {}", opts.n_sims)));
    }
    if !(opts.inside_threshold > 0.0 && opts.inside_threshold <= 1.0) {
        return Err(Error::param("inside threshold must lie in (0, 1]"));
    }
    window.check_contains_all(points)?;
    let n = points.len();
    let lambda = window.intensity(n);
    let r_grid = match &opts.r_grid {
        Some(g) => g.clone(),
        None => {
            if opts.r_steps == 0 {
                return Err(Error::param("r_steps must be positive"));
            }
            default_r_grid(lambda, opts.r_steps)
        }
    };
    check_r_grid(&r_grid)?;

    let reference = match kind {
        FunctionKind::G => None,
        FunctionKind::F => Some(reference_grid(window, opts.m_reference)?),
    };
    let curve = |pts: &[Point2D]| -> Result<Vec<f64>> {
        match &reference {
            None => g_function(pts, &r_grid),
            Some(refs) => {
                if pts.is_empty() {
                    return Err(Error::Degenerate("F function of an empty point set".into()));
                }
                Ok(ecdf(empty_space_distances(pts, refs), &r_grid))
            }
        }
    };
    let empirical = curve(points)?;

    let sims: Vec<Vec<f64>> = (0..opts.n_sims)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::stream(opts.seed, i as u64);
            let pts: Vec<Point2D> = (0..n).map(|_| window.sample(&mut rng)).collect();
            curve(&pts)
        })
        .collect::<Result<_>>()?;

    let m = r_grid.len();
    let mut lower = vec![f64::INFINITY; m];
    let mut upper = vec![f64::NEG_INFINITY; m];
    for s in &sims {
        for j in 0..m {
            lower[j] = lower[j].min(s[j]);
            upper[j] = upper[j].max(s[j]);
        }
    }

    let above = (0..m).filter(|&j| empirical[j] > upper[j]).count();
    let below = (0..m).filter(|&j| empirical[j] < lower[j]).count();
    let inside = m - above - below;
    let fraction_inside = inside as f64 / m as f64;
    let verdict = CsrVerdict {
        fraction_inside,
        fraction_above: above as f64 / m as f64,
        fraction_below: below as f64 / m as f64,
        threshold: opts.inside_threshold,
        rejected: fraction_inside < opts.inside_threshold,
    };
    Ok(EnvelopeResult {
        kind,
        theoretical: theoretical_curve(lambda, &r_grid),
        r_grid,
        empirical,
        lower,
        upper,
        n_points: n,
        lambda,
        n_simulations: opts.n_sims,
        seed: opts.seed,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_two_points() {
        let pts = [Point2D::new(0.0, 0.0), Point2D::new(3.0, 4.0)];
        let g = g_function(&pts, &[1.0, 4.999, 5.0, 7.0]).unwrap();
        assert_eq!(g, vec![0.0, 0.0, 1.0, 1.0]);
        assert!(g_function(&pts[..1], &[1.0]).is_err());
    }

    #[test]
    fn g_regular_grid_steps_at_spacing() {
        let pts: Vec<Point2D> = (0..5)
            .flat_map(|i| (0..5).map(move |j| Point2D::new(i as f64 * 20.0, j as f64 * 20.0)))
            .collect();
        let g = g_function(&pts, &[19.9, 20.0, 30.0]).unwrap();
        assert_eq!(g, vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn f_single_central_point() {
        let w = StudyWindow::rectangle(Point2D::new(0.0, 0.0), Point2D::new(100.0, 100.0)).unwrap();
        let grid: Vec<f64> = (1..=10).map(|i| i as f64 * 5.0).collect();
        let f = f_function(&[Point2D::new(50.0, 50.0)], &w, &grid, 10_000).unwrap();
        assert!(f[0] > 0.0);
        assert!(f.windows(2).all(|p| p[1] >= p[0]));
        // disc of radius 50 covers pi/4 of the square
        assert!((f[9] - std::f64::consts::FRAC_PI_4).abs() < 0.01, "{}", f[9]);
        assert!(f_function(&[], &w, &grid, 10_000).is_err());
        assert!(f_function(&[Point2D::new(1.0, 1.0)], &w, &grid, 50).is_err());
    }

    #[test]
    fn f_events_on_reference_grid() {
        let w = StudyWindow::rectangle(Point2D::new(0.0, 0.0), Point2D::new(10.0, 10.0)).unwrap();
        let pts: Vec<Point2D> = (0..10)
            .flat_map(|j| (0..10).map(move |i| Point2D::new(i as f64 + 0.5, j as f64 + 0.5)))
            .collect();
        let f = f_function(&pts, &w, &[0.0, 1e-9, 1.0], 100).unwrap();
        assert_eq!(f, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn theoretical_median() {
        let lambda = 2e-4;
        let r = (std::f64::consts::LN_2 / (lambda * std::f64::consts::PI)).sqrt();
        let t = theoretical_curve(lambda, &[0.0, r]);
        assert_eq!(t[0], 0.0);
        assert!((t[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grid_and_sim_count() {
        let w = StudyWindow::rectangle(Point2D::new(0.0, 0.0), Point2D::new(10.0, 10.0)).unwrap();
        let pts = [Point2D::new(1.0, 1.0), Point2D::new(2.0, 2.0)];
        let mut opts = CsrOptions { n_sims: 18, ..CsrOptions::default() };
        assert!(csr_test(&pts, &w, FunctionKind::G, &opts).is_err());
        opts.n_sims = 19;
        opts.r_grid = Some(vec![2.0, 1.0]);
        assert!(csr_test(&pts, &w, FunctionKind::G, &opts).is_err());
        opts.r_grid = None;
        let outside = [Point2D::new(1.0, 1.0), Point2D::new(20.0, 2.0)];
        assert!(csr_test(&outside, &w, FunctionKind::G, &opts).is_err());
    }
}
