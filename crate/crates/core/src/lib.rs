//! Sampling-based planning for serial manipulators that keep one contact sliding on a
//! surface while another contact moves from a start surface to a goal surface.
//!
//! The pieces, bottom up:
//!
//! * [`geom`]: triangle meshes, point-to-mesh distance, segment collision checks.
//! * [`robot`]: revolute chains, forward kinematics, contact points.
//! * [`constraint`]: sliding and transition distance constraints, Jacobians, projection.
//! * [`sampler`]: uniform configurations plus uniformly drawn transition modes.
//! * [`planner`]: RRT and PRM over mode-annotated vertices, path validation.
//! * [`scenario`]: JSON scenario files and the built-in scenes.
//! * [`bench`]: repeated seeded runs, CSV output and summaries.

pub mod bench;
pub mod constraint;
pub mod error;
pub mod geom;
pub mod planner;
pub mod robot;
pub mod sampler;
pub mod scenario;

pub use constraint::{ConstraintSet, ContactSpec, Mode, ModeVector};
pub use error::{Error, Result};
pub use planner::{
    solve, validate_path, Path, PlanResult, PlanStatus, Planner, PlannerConfig, PlannerKind, PlannerVertex,
    PlanningProblem,
};
pub use robot::{Configuration, KinematicChain};
pub use scenario::Scenario;
