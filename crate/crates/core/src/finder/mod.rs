//! Zero counting and localization for analytic functions in the lower
//! half-plane.

pub mod contour;
pub mod counting;
pub mod locate;

pub use contour::{winding, Analytic, Rect, Winding, DEFAULT_PHASE_STEP};
pub use counting::{
    counting_function, default_window, fit_slope, mode_map, radii_grid, slope_bound, CountingFit, CountingFunction,
    MappedZero,
};
pub use locate::{locate, Cluster, LocateOptions, LocatedZero, Region, ResonanceList};
