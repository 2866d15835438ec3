//! Concrete problem instances and synthetic data.

pub mod data;
pub mod logistic;
pub mod lp_box;
pub mod quadratic;
pub mod wire_mesh;

pub use data::{gen_logistic_data, two_region_image, Grid};
pub use logistic::{half_power_prox, make_lq_logistic, LqLogisticProblem, LqLogisticSpec};
pub use lp_box::{make_lp_box, LpBoxProblem, LpBoxSpec};
pub use quadratic::{make_quadratic, QuadraticConsensusSpec, QuadraticOracle, QuadraticProblem};
pub use wire_mesh::{edge_length_error, make_wire_mesh, WireMeshProblem, WireMeshSpec};
