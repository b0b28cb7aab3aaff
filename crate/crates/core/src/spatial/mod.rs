//! Point-pattern statistics over node locations: complete spatial
//! randomness tests with nearest-neighbour G and empty-space F functions, and
//! quartic kernel density rasters.
//!
//! No edge correction is applied to either estimator, so values near the
//! window boundary are biased (G/F downward, KDE mass leaks outside).

mod csr;
mod kde;
mod window;

pub use csr::{
    csr_test, default_r_grid, f_function, g_function, theoretical_curve, CsrOptions, CsrVerdict, EnvelopeResult,
    FunctionKind,
};
pub use kde::{
    hotspot_cells, kde_raster, quartic_kernel, DensityRaster, Hotspots, KdeMode, DEFAULT_BANDWIDTH_M, DEFAULT_CELL_M,
};
pub use window::StudyWindow;
