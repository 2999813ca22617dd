//! Edge configurations, open clusters, `R_n`, the fattened complement `X^F`,
//! and the good-path surface over a hyperplane.

mod clusters;
mod config;
mod fatten;
mod slab;

pub use clusters::{cluster_labels, has_crossing, radius, ClusterLabeling, Radius};
pub use config::{edge_offsets, Configuration, EdgeField, Exterior, ModelParams, RNG_ID};
pub use fatten::{compute_rn, finite_complement, rn_at, rn_box_radius, x_in_box, VertexMask};
pub use slab::{
    good_cube, good_path_cluster, hyperplane_surface, interior_boundary, project_phi, GoodPathCluster, PhiPoint, Slab,
};

pub(crate) use fatten::rn_from_reach;
