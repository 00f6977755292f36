//! Width dimension of l^p balls: closed-form bounds, explicit low-width
//! embeddings of simplex cones, Hadamard point sets, and a numerical search
//! for unit points with the origin in their hull and small diameter.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod embeddings;
pub mod error;
pub mod hadamard;
pub mod hemisphere;
pub mod hull;
pub mod lp;
pub mod rng;

pub use bounds::{
    b_lower, borsuk_ulam_floor, known_upper, urysohn_widths, wdim_cube, wdim_interval,
    wdim_interval_with, wdim_lp_ball_sup_metric, BoundKind, BoundRecord, IntervalOptions, Metric,
    Threshold, WdimInterval, WidthEstimate,
};
pub use embeddings::{
    cascade_projection, collapse_projection, conic_coordinates, dim3_set, empirical_c,
    hypothesis_check, regular_simplex, sample_fiber, skeleton_projection, EmbeddingSpec, MapKind,
};
pub use error::{Error, Result};
pub use hadamard::{hadamard, hadamard_order_available, hadamard_set, paley, sylvester, HadamardMatrix};
pub use hemisphere::{
    certify_against_bound, contains_origin_in_hull, linf_family, min_diameter_search,
    min_diameter_search_with, LinfVariant, SearchOptions, SearchResult,
};
pub use lp::{dual_exponent, lp_norm, radial_project, Exponent, LpVector, PointConfiguration, Tolerances};
