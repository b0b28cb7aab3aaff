//! Zone polygons and induced zone subgraphs.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{Point2D, RoadNetwork};
use crate::error::{Error, Result};

/// Boundary tolerance in meters for point-in-polygon tests.
const ON_EDGE_TOLERANCE: f64 = 1e-9;

/// Simple polygon stored as an open ring (the closing vertex is implicit).
#[derive(Debug, Clone, PartialEq)]
pub struct ZonePolygon {
    pub name: String,
    ring: Vec<Point2D>,
}

impl ZonePolygon {
    /// Accepts either an open ring or one whose last vertex repeats the first.
    pub fn new(name: impl Into<String>, mut ring: Vec<Point2D>) -> Result<Self> {
        let name = name.into();
        if ring.len() >= 2 && ring.first() == ring.last() {
            ring.pop();
        }
        if ring.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon(format!("zone '{name}' has non-finite vertices")));
        }
        let mut distinct = ring.clone();
        distinct.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        distinct.dedup();
        if distinct.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "zone '{name}' needs at least 3 distinct vertices, got {}",
                distinct.len()
            )));
        }
        Ok(ZonePolygon { name, ring })
    }

    pub fn rectangle(name: impl Into<String>, min: Point2D, max: Point2D) -> Result<Self> {
        Self::new(
            name,
            vec![min, Point2D::new(max.x, min.y), max, Point2D::new(min.x, max.y)],
        )
    }

    pub fn ring(&self) -> &[Point2D] {
        &self.ring
    }

    /// Unsigned shoelace area in square meters.
    pub fn area(&self) -> f64 {
        let n = self.ring.len();
        let twice: f64 = (0..n)
            .map(|i| {
                let a = self.ring[i];
                let b = self.ring[(i + 1) % n];
                a.x * b.y - b.x * a.y
            })
            .sum();
        (twice / 2.0).abs()
    }

    pub fn bounds(&self) -> (Point2D, Point2D) {
        let mut min = Point2D::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2D::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.ring {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        (min, max)
    }

    fn segments(&self) -> impl Iterator<Item = (Point2D, Point2D)> + '_ {
        let n = self.ring.len();
        (0..n).map(move |i| (self.ring[i], self.ring[(i + 1) % n]))
    }

    /// Point-in-polygon test; points on the boundary count as inside.
    pub fn contains(&self, p: Point2D) -> bool {
        for (a, b) in self.segments() {
            if on_segment(p, a, b) {
                return true;
            }
        }
        // even-odd crossing number
        let mut inside = false;
        for (a, b) in self.segments() {
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

fn on_segment(p: Point2D, a: Point2D, b: Point2D) -> bool {
    let len = a.distance(&b);
    if len == 0.0 {
        return p.distance(&a) <= ON_EDGE_TOLERANCE;
    }
    let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross / len).abs() > ON_EDGE_TOLERANCE {
        return false;
    }
    let dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
    dot >= -ON_EDGE_TOLERANCE * len && dot <= len * len + ON_EDGE_TOLERANCE * len
}

/// Subgraph induced by the nodes inside `polygon` (boundary inclusive). The
/// result carries the polygon's name and may be empty.
pub fn extract_zone(net: &RoadNetwork, polygon: &ZonePolygon) -> Result<RoadNetwork> {
    if polygon.area() <= 0.0 {
        return Err(Error::InvalidPolygon(format!("zone '{}' has zero area", polygon.name)));
    }
    let keep: Vec<bool> = net.positions().iter().map(|p| polygon.contains(*p)).collect();
    Ok(net.induced_subgraph(polygon.name.clone(), &keep))
}

/// Reads zones from the plain-text format: each record is a name line
/// followed by one `x y` vertex per line; records are separated by blank
/// lines and `#` starts a comment line. Commas may replace the space.
pub fn read_zones(path: impl AsRef<Path>) -> Result<Vec<ZonePolygon>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_zones(path, &text)
}

fn parse_zones(path: &Path, text: &str) -> Result<Vec<ZonePolygon>> {
    let mut zones = Vec::new();
    let mut name: Option<(String, u64)> = None;
    let mut ring = Vec::new();
    let finish = |name: &mut Option<(String, u64)>, ring: &mut Vec<Point2D>, zones: &mut Vec<ZonePolygon>| -> Result<()> {
        if let Some((n, line)) = name.take() {
            let poly = ZonePolygon::new(n, std::mem::take(ring)).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            })?;
            zones.push(poly);
        }
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            finish(&mut name, &mut ring, &mut zones)?;
            continue;
        }
        if name.is_none() {
            name = Some((line.to_string(), line_no));
            continue;
        }
        let coords: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed: Option<Vec<f64>> = coords.iter().map(|s| s.parse::<f64>().ok()).collect();
        match parsed.as_deref() {
            Some([x, y]) => ring.push(Point2D::new(*x, *y)),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("expected 'x y' vertex, got '{line}'"),
                })
            }
        }
    }
    finish(&mut name, &mut ring, &mut zones)?;
    Ok(zones)
}

#[derive(Deserialize)]
struct JsonZone {
    name: String,
    ring: Vec<[f64; 2]>,
}

/// Reads zones from JSON: `[{"name": "North", "ring": [[x, y], ...]}, ...]`.
pub fn read_zones_json(path: impl AsRef<Path>) -> Result<Vec<ZonePolygon>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: Vec<JsonZone> = serde_json::from_str(&text)?;
    raw.into_iter()
        .map(|z| ZonePolygon::new(z.name, z.ring.into_iter().map(|[x, y]| Point2D::new(x, y)).collect()))
        .collect()
}
