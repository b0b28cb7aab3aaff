//! Quartic kernel density rasters and hotspot extraction.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::StudyWindow;
use crate::error::{Error, Result};
use crate::graph::Point2D;

pub const DEFAULT_BANDWIDTH_M: f64 = 1000.0;
pub const DEFAULT_CELL_M: f64 = 100.0;

const QUARTIC_PEAK: f64 = 3.0 / std::f64::consts::PI;

/// `3/pi (1 - u'u)^2` on the open unit disc, zero elsewhere. Integrates to 1
/// over the plane.
pub fn quartic_kernel(u: [f64; 2]) -> f64 {
    let r2 = u[0] * u[0] + u[1] * u[1];
    if r2 < 1.0 {
        let a = 1.0 - r2;
        QUARTIC_PEAK * a * a
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KdeMode {
    /// `(1/h^2) sum w_i K((x - X_i)/h)`: a weighted intensity surface whose
    /// integral is the total weight.
    #[default]
    Weighted,
    /// `(1/(n h^2)) sum K((x - X_i)/h)`: a probability density, weights
    /// ignored.
    Density,
}

impl fmt::Display for KdeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KdeMode::Weighted => "weighted",
            KdeMode::Density => "density",
        })
    }
}

/// Regular grid of kernel density values evaluated at cell centres.
/// Row 0 is the southernmost row.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityRaster {
    /// Lower-left corner of the lower-left cell.
    pub origin: Point2D,
    pub cell_size: f64,
    pub n_cols: usize,
    pub n_rows: usize,
    pub bandwidth: f64,
    pub mode: KdeMode,
    pub weight_label: String,
    values: Vec<f64>,
}

impl DensityRaster {
    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    /// Row-major values, south to north.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point2D {
        Point2D::new(
            self.origin.x + (col as f64 + 0.5) * self.cell_size,
            self.origin.y + (row as f64 + 0.5) * self.cell_size,
        )
    }

    /// Sum of value times cell area.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_size * self.cell_size
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.weight_label = label.into();
        self
    }

    /// ESRI ASCII grid, rows written north to south.
    pub fn write_ascii_grid<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "ncols {}", self.n_cols)?;
        writeln!(out, "nrows {}", self.n_rows)?;
        writeln!(out, "xllcorner {}", self.origin.x)?;
        writeln!(out, "yllcorner {}", self.origin.y)?;
        writeln!(out, "cellsize {}", self.cell_size)?;
        writeln!(out, "NODATA_value -9999")?;
        for row in (0..self.n_rows).rev() {
            let line: Vec<String> = (0..self.n_cols).map(|c| self.value(c, row).to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Long format `col,row,x_center,y_center,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["col", "row", "x_center", "y_center", "value"])?;
        for row in 0..self.n_rows {
            for col in 0..self.n_cols {
                let c = self.cell_center(col, row);
                w.write_record([
                    col.to_string(),
                    row.to_string(),
                    c.x.to_string(),
                    c.y.to_string(),
                    self.value(col, row).to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io("<raster csv>", e))?;
        Ok(())
    }
}

/// Evaluates the quartic KDE on a grid covering the window's bounding box
/// padded by one bandwidth on every side.
pub fn kde_raster(
    points: &[(Point2D, f64)],
    window: &StudyWindow,
    bandwidth: f64,
    cell_size: f64,
    mode: KdeMode,
) -> Result<DensityRaster> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::param(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if !(cell_size.is_finite() && cell_size > 0.0) {
        return Err(Error::param(format!("cell size must be positive, got {cell_size}")));
    }
    if let Some((_, w)) = points.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::param(format!("weights must be finite and non-negative, got {w}")));
    }
    let locations: Vec<Point2D> = points.iter().map(|(p, _)| *p).collect();
    window.check_contains_all(&locations)?;
    if mode == KdeMode::Density && points.is_empty() {
        return Err(Error::Degenerate("density of an empty point set".into()));
    }

    let (min, max) = window.bounds();
    let origin = Point2D::new(min.x - bandwidth, min.y - bandwidth);
    let n_cols = (((max.x - min.x) + 2.0 * bandwidth) / cell_size).ceil().max(1.0) as usize;
    let n_rows = (((max.y - min.y) + 2.0 * bandwidth) / cell_size).ceil().max(1.0) as usize;
    let mut values = vec![0.0; n_cols * n_rows];

    let h2 = bandwidth * bandwidth;
    let scale = match mode {
        KdeMode::Weighted => 1.0 / h2,
        KdeMode::Density => 1.0 / (points.len() as f64 * h2),
    };
    let span = |lo: f64, hi: f64, start: f64, count: usize| {
        let a = ((lo - start) / cell_size - 0.5).floor().max(0.0) as usize;
        let b = (((hi - start) / cell_size - 0.5).ceil().max(0.0) as usize).min(count - 1);
        a..=b
    };
    for (p, w) in points {
        let weight = match mode {
            KdeMode::Weighted => *w,
            KdeMode::Density => 1.0,
        };
        if weight == 0.0 {
            continue;
        }
        for row in span(p.y - bandwidth, p.y + bandwidth, origin.y, n_rows) {
            let yc = origin.y + (row as f64 + 0.5) * cell_size;
            let uy = (yc - p.y) / bandwidth;
            for col in span(p.x - bandwidth, p.x + bandwidth, origin.x, n_cols) {
                let xc = origin.x + (col as f64 + 0.5) * cell_size;
                let k = quartic_kernel([(xc - p.x) / bandwidth, uy]);
                if k > 0.0 {
                    values[row * n_cols + col] += weight * k * scale;
                }
            }
        }
    }

    Ok(DensityRaster {
        origin,
        cell_size,
        n_cols,
        n_rows,
        bandwidth,
        mode,
        weight_label: String::new(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hotspots {
    pub percentile: f64,
    /// Nearest-rank percentile of the nonzero cell values.
    pub threshold: f64,
    /// `(col, row)` of every cell with value at or above the threshold.
    pub cells: Vec<(usize, usize)>,
}

pub fn hotspot_cells(raster: &DensityRaster, percentile: f64) -> Result<Hotspots> {
    if !(percentile > 0.0 && percentile < 100.0) {
        return Err(Error::param(format!("percentile must lie in (0, 100), got {percentile}")));
    }
    let mut nonzero: Vec<f64> = raster.values.iter().copied().filter(|&v| v > 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::Degenerate("raster is entirely zero".into()));
    }
    nonzero.sort_by(f64::total_cmp);
    let rank = ((percentile / 100.0) * nonzero.len() as f64).ceil().max(1.0) as usize;
    let threshold = nonzero[rank.min(nonzero.len()) - 1];
    let cells = (0..raster.n_rows)
        .flat_map(|row| (0..raster.n_cols).map(move |col| (col, row)))
        .filter(|&(c, r)| {
            let v = raster.value(c, r);
            v > 0.0 && v >= threshold
        })
        .collect();
    Ok(Hotspots {
        percentile,
        threshold,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(w: f64, h: f64) -> StudyWindow {
        StudyWindow::rectangle(Point2D::new(0.0, 0.0), Point2D::new(w, h)).unwrap()
    }

    #[test]
    fn kernel_peak_and_support() {
        assert_eq!(quartic_kernel([0.0, 0.0]), 3.0 / std::f64::consts::PI);
        assert_eq!(quartic_kernel([1.0, 0.0]), 0.0);
        assert_eq!(quartic_kernel([0.6, 0.8]), 0.0);
        assert!(quartic_kernel([0.5, 0.0]) > 0.0);
    }

    #[test]
    fn single_point_peak() {
        // window 100x100 with h = 1000 and cell 100: origin at -1000, the
        // cell centred on (50, 50) is col 10, row 10
        let pts = [(Point2D::new(50.0, 50.0), 1.0)];
        let r = kde_raster(&pts, &window(100.0, 100.0), 1000.0, 100.0, KdeMode::Weighted).unwrap();
        assert_eq!(r.n_cols, 21);
        assert_eq!(r.cell_center(10, 10), Point2D::new(50.0, 50.0));
        assert_eq!(r.value(10, 10), 3.0 / (std::f64::consts::PI * 1000.0 * 1000.0));
        // corners are farther than h from the point
        assert_eq!(r.value(0, 0), 0.0);
    }

    #[test]
    fn zero_weights_give_zero_raster() {
        let pts = [(Point2D::new(10.0, 10.0), 0.0), (Point2D::new(90.0, 40.0), 0.0)];
        let r = kde_raster(&pts, &window(100.0, 50.0), 200.0, 10.0, KdeMode::Weighted).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
        assert!(hotspot_cells(&r, 95.0).is_err());
    }

    #[test]
    fn parameter_validation() {
        let pts = [(Point2D::new(10.0, 10.0), 1.0)];
        let w = window(100.0, 100.0);
        assert!(kde_raster(&pts, &w, 0.0, 10.0, KdeMode::Weighted).is_err());
        assert!(kde_raster(&pts, &w, 10.0, -1.0, KdeMode::Weighted).is_err());
        assert!(kde_raster(&[(Point2D::new(1.0, 1.0), -2.0)], &w, 10.0, 1.0, KdeMode::Weighted).is_err());
        assert!(kde_raster(&[(Point2D::new(500.0, 1.0), 1.0)], &w, 10.0, 1.0, KdeMode::Weighted).is_err());
    }

    #[test]
    fn density_mode_integrates_to_one() {
        let pts: Vec<(Point2D, f64)> = (0..5).map(|i| (Point2D::new(100.0 + i as f64 * 37.0, 200.0), 9.0)).collect();
        let r = kde_raster(&pts, &window(400.0, 400.0), 60.0, 2.0, KdeMode::Density).unwrap();
        assert!((r.total_mass() - 1.0).abs() < 1e-3, "{}", r.total_mass());
    }

    #[test]
    fn hotspot_thresholds() {
        let pts = [(Point2D::new(50.0, 50.0), 1.0)];
        let r = kde_raster(&pts, &window(100.0, 100.0), 100.0, 10.0, KdeMode::Weighted).unwrap();
        let nonzero = r.values().iter().filter(|&&v| v > 0.0).count();
        let all = hotspot_cells(&r, 1e-9).unwrap();
        assert_eq!(all.cells.len(), nonzero);
        let top = hotspot_cells(&r, 99.0).unwrap();
        assert!(top.cells.len() < nonzero);
        assert!(top.cells.iter().all(|&(c, row)| r.value(c, row) >= top.threshold));
        assert!(hotspot_cells(&r, 100.0).is_err());
        assert!(hotspot_cells(&r, 0.0).is_err());
    }

    #[test]
    fn ascii_grid_rows_run_north_to_south() {
        let pts = [(Point2D::new(5.0, 1.0), 1.0)];
        let r = kde_raster(&pts, &window(10.0, 10.0), 2.0, 2.0, KdeMode::Weighted).unwrap();
        let mut buf = Vec::new();
        r.write_ascii_grid(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("ncols {}", r.n_cols));
        assert_eq!(lines[5], "NODATA_value -9999");
        assert_eq!(lines.len(), 6 + r.n_rows);
        // the point sits in the south: the last line carries the mass
        let last: f64 = lines.last().unwrap().split(' ').map(|v| v.parse::<f64>().unwrap()).sum();
        let first: f64 = lines[6].split(' ').map(|v| v.parse::<f64>().unwrap()).sum();
        assert_eq!(first, 0.0);
        assert!(last >= 0.0);
        let mut csv_buf = Vec::new();
        r.write_csv(&mut csv_buf).unwrap();
        assert!(String::from_utf8(csv_buf).unwrap().starts_with("col,row,x_center,y_center,value\n"));
    }
}
