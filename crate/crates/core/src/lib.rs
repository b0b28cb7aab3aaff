//! Analysis toolkit for spatially embedded road networks.
//!
//! The crate is organised around the stages of a robustness study:
//!
//! * [`graph`] ingests intersection/segment tables, extracts zone subgraphs and
//!   counts bus-route crossings.
//! * [`centrality`] computes degree, closeness, betweenness and load
//!   centralities over length-weighted shortest paths.
//! * [`spatial`] tests complete spatial randomness with G/F envelopes and
//!   builds quartic kernel density rasters.
//! * [`stats`] holds Kendall's tau-b, the Mann–Whitney U test and the
//!   per-zone summary table.
//! * [`robustness`] runs node-removal attacks and tracks the largest
//!   connected component, plus synthetic network generators.
//!
//! Coordinates are planar and in meters throughout; nothing here reprojects.

pub mod centrality;
pub mod error;
pub mod graph;
pub mod robustness;
pub mod seed;
pub mod spatial;
pub mod stats;

pub use centrality::{CentralityTable, IndexKind};
pub use error::{Error, Result};
pub use graph::{BusRouteSet, NodeId, Point2D, RoadNetwork, ZonePolygon};
