//! Optimal quantization with a concave entropy penalty: geometry, Laguerre
//! diagrams, the generalized Lloyd solver and a numerical proof checker.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy_model;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod laguerre;
pub mod lloyd_solver;
pub mod proof_verifier;
pub mod quantization;
pub mod render;
pub mod stability;

pub use energy_model::{Alpha, Precision};
pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, HalfPlane, Moments, Point2};
pub use laguerre::{laguerre_diagram, voronoi_diagram, LaguerreDiagram, WeightedSite};
pub use lloyd_solver::{multistart, solve, Init, SolveResult, SolverConfig};
pub use proof_verifier::{run_all, Claim, VerificationReport};
pub use quantization::{Configuration, EnergyBreakdown, Frame, Particle};
pub use stability::{analyze, configuration_defect, StabilityReport};
