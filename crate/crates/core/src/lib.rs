//! Geometric inhomogeneous random graphs (GIRGs) with metric and non-metric
//! Boolean distance functions, baseline random graph models, parameter
//! fitting against target networks, graph feature extraction, and an
//! RBF-SVM based expressivity measurement (real vs. synthetic
//! misclassification rate).

// `!(x > 0.0)` is how parameter checks reject NaN along with bad values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classifier;
pub mod cleaning;
pub mod error;
pub mod features;
pub mod fitting;
pub mod geometry;
pub mod graph;
pub mod pipeline;
pub mod samplers;
pub mod seed;
pub mod stats;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{DistanceSpec, Point, Topology};
pub use graph::Graph;
pub use samplers::{EmbeddedGraph, GirgParams};
pub use weights::{PowerLawFit, WeightSequence};
