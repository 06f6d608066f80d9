//! Finite metric spaces under the logarithmic transform `d' = ln(1 + d)`.
//!
//! The crate computes, exactly on finite inputs:
//!
//! * Gromov products, the 4-point defect and the ultrametric defect
//!   ([`hyperbolicity`]);
//! * eccentricity, quasi-ball defect and weak eccentricity of regions such as
//!   ball intersections ([`ball_geometry`]);
//! * quasi-geodesic defects, piecewise-linear path lengths and the taming of
//!   plane quasi-geodesics ([`quasigeodesic`]);
//! * the lens family experiments in the plane ([`lens`]).
//!
//! Every metric value is an `f64` in the units of the space it was computed
//! in.

pub mod ball_geometry;
pub mod cloud;
pub mod error;
pub mod hyperbolicity;
mod index;
pub mod io;
pub mod lens;
pub mod metric;
pub mod quasigeodesic;
pub mod region;
pub mod table;

pub use ball_geometry::{
    covering_radius, eccentricity, inradius_at, intersect_balls, quasi_ball_defect,
    weak_ecc_defect, BallSpec, EccReport, QuasiBallReport,
};
pub use cloud::{MetricMode, PointCloud};
pub use error::{Error, Result};
pub use hyperbolicity::{
    four_point_delta, four_point_delta_fixed_base, ultrametric_delta, DeltaReport, UltraReport,
    FULL_SCAN_CAP,
};
pub use lens::{
    ecc_growth_experiment, grid_experiment, square_grid, lens_exact_stats, line_ultrametric_experiment,
    sample_lens, GridRow, GridScan, LensFamily, LensRow, LensSample, LensStats, LineUltra,
};
pub use metric::{
    ball, chain_length, gromov_product, hausdorff_distance, log_transform, validate_metric,
    validate_metric_with, Chain, FiniteMetricSpace, ValidationReport, Violation,
};
pub use quasigeodesic::{
    horizon, pl_length, qg_defect, qg_defect_path, tame, PlPath, QgDefect, QgParams,
    TameConstants, TameReport, Tamed,
};
pub use region::Region;
pub use table::{Cell, Format, Table};
