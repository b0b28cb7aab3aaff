use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Point2D, ZonePolygon};

/// Region over which a point pattern is observed.
#[derive(Debug, Clone, PartialEq)]
pub enum StudyWindow {
    Rectangle { min: Point2D, max: Point2D },
    Polygon(ZonePolygon),
}

impl StudyWindow {
    pub fn rectangle(min: Point2D, max: Point2D) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max.x <= min.x || max.y <= min.y {
            return Err(Error::param(format!(
                "window ({}, {})-({}, {}) has no area",
                min.x, min.y, max.x, max.y
            )));
        }
        Ok(StudyWindow::Rectangle { min, max })
    }

    pub fn polygon(poly: ZonePolygon) -> Result<Self> {
        if poly.area() <= 0.0 {
            return Err(Error::InvalidPolygon(format!("window '{}' has zero area", poly.name)));
        }
        Ok(StudyWindow::Polygon(poly))
    }

    /// Bounding box of the points; the default window.
    pub fn bounding_box(points: &[Point2D]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Degenerate("bounding box of an empty point set".into()))?;
        let (mut min, mut max) = (*first, *first);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Self::rectangle(min, max)
    }

    pub fn area(&self) -> f64 {
        match self {
            StudyWindow::Rectangle { min, max } => (max.x - min.x) * (max.y - min.y),
            StudyWindow::Polygon(p) => p.area(),
        }
    }

    pub fn bounds(&self) -> (Point2D, Point2D) {
        match self {
            StudyWindow::Rectangle { min, max } => (*min, *max),
            StudyWindow::Polygon(p) => p.bounds(),
        }
    }

    /// Boundary inclusive.
    pub fn contains(&self, p: Point2D) -> bool {
        match self {
            StudyWindow::Rectangle { min, max } => p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y,
            StudyWindow::Polygon(poly) => poly.contains(p),
        }
    }

    /// Intensity estimate: events per square meter.
    pub fn intensity(&self, n_points: usize) -> f64 {
        n_points as f64 / self.area()
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Result<Self> {
        let shift = |p: &Point2D| Point2D::new(p.x + dx, p.y + dy);
        match self {
            StudyWindow::Rectangle { min, max } => Self::rectangle(shift(min), shift(max)),
            StudyWindow::Polygon(poly) => Self::polygon(ZonePolygon::new(
                poly.name.clone(),
                poly.ring().iter().map(shift).collect(),
            )?),
        }
    }

    pub(crate) fn check_contains_all(&self, points: &[Point2D]) -> Result<()> {
        if let Some(p) = points.iter().find(|p| !self.contains(**p)) {
            return Err(Error::param(format!("point ({}, {}) lies outside the study window", p.x, p.y)));
        }
        Ok(())
    }

    /// Uniform point in the window (rejection sampling for polygons).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2D {
        let (min, max) = self.bounds();
        loop {
            let p = Point2D::new(rng.gen_range(min.x..max.x), rng.gen_range(min.y..max.y));
            if self.contains(p) {
                return p;
            }
        }
    }
}
