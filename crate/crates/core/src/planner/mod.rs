//! Constrained planning over mode-annotated configurations.
//!
//! Every planner vertex carries the mode vector it was sampled under. Edges between
//! vertices must respect the constraint graph (one contact changes at a time and only
//! through the free mode), and are checked by walking the straight joint-space segment
//! in small steps while projecting each step under the *destination* vertex's modes.

mod prm;
mod rrt;
mod validate;

pub use prm::Prm;
pub use rrt::Rrt;
pub use validate::{validate_path, PathViolation};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constraint::{max_abs, ConstraintSet, Mode, ModeVector};
use crate::error::{Error, Result};
use crate::geom::{segment_mesh_intersects, Ball, TriMesh};
use crate::robot::{Configuration, KinematicChain};
use crate::sampler::{rng_from_seed, PlannerRng};

/// Largest joint-space jump (radians) allowed between consecutive dense waypoints.
pub const MAX_WAYPOINT_GAP: f64 = 0.25;

/// Edge checks fail when the projected walk is longer than this multiple of the
/// straight-line distance.
pub const MAX_TRAVEL_RATIO: f64 = 3.0;

/// Default contact exemption radius as a fraction of the total arm length.
pub const EXEMPT_RADIUS_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerVertex {
    pub q: Configuration,
    pub modes: ModeVector,
}

impl PlannerVertex {
    pub fn new(q: Configuration, modes: ModeVector) -> Self {
        PlannerVertex { q, modes }
    }
}

/// A solution: the planner vertices it passes through and the dense, validated
/// waypoints between them (vertices included).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<PlannerVertex>,
    pub waypoints: Vec<PlannerVertex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Wall-clock budget in seconds.
    pub time_budget: f64,
    /// Joint-space radius around the goal configuration that counts as arrival.
    pub goal_tolerance: f64,
    /// Interpolation step for edge checks, radians.
    pub edge_step: f64,
    /// Probability that the RRT samples the goal instead of a constrained sample.
    pub goal_bias: f64,
    /// Neighbors a new PRM milestone tries to connect to.
    pub prm_neighbors: usize,
    /// Longest RRT extension, radians.
    pub max_extension: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            time_budget: 2.0,
            goal_tolerance: 0.05,
            edge_step: 0.02,
            goal_bias: 0.05,
            prm_neighbors: 10,
            max_extension: 0.5,
        }
    }
}

impl PlannerConfig {
    pub fn check(&self) -> Result<()> {
        let positive = [
            ("time_budget", self.time_budget),
            ("goal_tolerance", self.goal_tolerance),
            ("edge_step", self.edge_step),
            ("max_extension", self.max_extension),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidProblem(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err(Error::InvalidProblem(format!(
                "goal_bias must lie in [0, 1], got {}",
                self.goal_bias
            )));
        }
        if self.prm_neighbors == 0 {
            return Err(Error::InvalidProblem("prm_neighbors must be positive".into()));
        }
        Ok(())
    }
}

/// Everything a planner needs: robot, constraints, obstacles, endpoints.
#[derive(Debug, Clone)]
pub struct PlanningProblem {
    pub name: String,
    pub constraints: ConstraintSet,
    pub obstacles: Vec<Arc<TriMesh>>,
    pub start: PlannerVertex,
    pub goal: PlannerVertex,
    /// Radius of the collision carve-out around bound contact points, meters.
    pub exempt_radius: f64,
}

impl PlanningProblem {
    pub fn chain(&self) -> &Arc<KinematicChain> {
        self.constraints.chain()
    }
}

/// Why a vertex is not in the valid set.
#[derive(Debug, Clone, PartialEq)]
pub enum Invalidity {
    Dimension { expected: usize, got: usize },
    Modes(String),
    OutOfLimits,
    Residual { contact: usize, distance: f64 },
    Collision { link: usize, obstacle: String },
}

impl fmt::Display for Invalidity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invalidity::Dimension { expected, got } => {
                write!(f, "configuration has {got} angles, expected {expected}")
            }
            Invalidity::Modes(m) => write!(f, "bad mode vector: {m}"),
            Invalidity::OutOfLimits => write!(f, "joint limits violated"),
            Invalidity::Residual { contact, distance } => {
                write!(f, "contact {contact} is {distance:.3e} m off its surface")
            }
            Invalidity::Collision { link, obstacle } => {
                write!(f, "link {link} collides with `{obstacle}`")
            }
        }
    }
}

/// Constraint satisfaction plus collision freedom of every link outside the
/// exemption balls of bound contacts.
pub fn check_vertex(problem: &PlanningProblem, v: &PlannerVertex) -> Result<(), Invalidity> {
    let chain = problem.chain();
    let set = &problem.constraints;
    if v.q.dim() != chain.dof() {
        return Err(Invalidity::Dimension { expected: chain.dof(), got: v.q.dim() });
    }
    set.check_modes(&v.modes).map_err(|e| Invalidity::Modes(e.to_string()))?;
    if !chain.within_limits(&v.q) {
        return Err(Invalidity::OutOfLimits);
    }
    let residual = set
        .evaluate_with(&v.q, &v.modes)
        .map_err(|e| Invalidity::Modes(e.to_string()))?;
    if max_abs(&residual) > set.tolerance() {
        let (contact, distance) = residual
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |best, (i, d)| if d > best.1 { (i, d) } else { best });
        return Err(Invalidity::Residual { contact, distance });
    }

    let points = chain.contact_points_world(&v.q).expect("dimension checked");
    let exempt: Vec<Ball> = set
        .specs()
        .iter()
        .zip(&v.modes)
        .filter(|(s, &m)| s.surface_for(m).is_some())
        .map(|(s, _)| Ball { center: points[s.contact], radius: problem.exempt_radius })
        .collect();
    let segments = chain.collision_segments(&v.q).expect("dimension checked");
    for (link, seg) in segments.iter().enumerate() {
        for mesh in &problem.obstacles {
            if segment_mesh_intersects(seg, mesh, &exempt) {
                return Err(Invalidity::Collision { link, obstacle: mesh.name().to_string() });
            }
        }
    }
    Ok(())
}

pub fn is_valid(problem: &PlanningProblem, v: &PlannerVertex) -> bool {
    check_vertex(problem, v).is_ok()
}

/// True iff `a == b` or they differ in exactly one slot and one side of that slot is
/// [`Mode::Free`].
pub fn mode_edge_legal(a: &[Mode], b: &[Mode]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::ModeLengthMismatch(a.len(), b.len()));
    }
    Ok(mode_edge_legal_unchecked(a, b))
}

pub(crate) fn mode_edge_legal_unchecked(a: &[Mode], b: &[Mode]) -> bool {
    let mut diff = a.iter().zip(b).filter(|(x, y)| x != y);
    match (diff.next(), diff.next()) {
        (None, _) => true,
        (Some((&x, &y)), None) => x == Mode::Free || y == Mode::Free,
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Motion {
    pub ok: bool,
    /// Starts with `from` and, when `ok`, ends with `to`.
    pub waypoints: Vec<PlannerVertex>,
}

impl Motion {
    fn rejected(waypoints: Vec<PlannerVertex>) -> Self {
        Motion { ok: false, waypoints }
    }
}

/// Walks from `from.q` to `to.q` in steps of at most `edge_step`, projecting every
/// interpolant under `to.modes` and validating it.
pub fn check_motion(
    problem: &PlanningProblem,
    from: &PlannerVertex,
    to: &PlannerVertex,
    config: &PlannerConfig,
) -> Result<Motion> {
    if !mode_edge_legal(&from.modes, &to.modes)? {
        return Err(Error::IllegalModeEdge {
            from: from.modes.iter().map(|&m| m as u8).collect(),
            to: to.modes.iter().map(|&m| m as u8).collect(),
        });
    }
    let mut waypoints = vec![from.clone()];
    let straight = from.q.distance(&to.q);
    if straight == 0.0 && from.modes == to.modes {
        return Ok(Motion { ok: true, waypoints });
    }
    let steps = ((straight / config.edge_step).ceil() as usize).max(1);
    let mut travel = 0.0;
    let mut prev = from.q.clone();
    for i in 1..=steps {
        let target = if i == steps {
            to.q.clone()
        } else {
            from.q.lerp(&to.q, i as f64 / steps as f64)
        };
        let projected = problem.constraints.project_with(&target, &to.modes)?;
        if !projected.success {
            return Ok(Motion::rejected(waypoints));
        }
        let gap = projected.q.distance(&prev);
        travel += gap;
        if gap > MAX_WAYPOINT_GAP || travel > MAX_TRAVEL_RATIO * straight.max(config.edge_step) {
            return Ok(Motion::rejected(waypoints));
        }
        let w = PlannerVertex::new(projected.q, to.modes.clone());
        if !is_valid(problem, &w) {
            return Ok(Motion::rejected(waypoints));
        }
        prev = w.q.clone();
        waypoints.push(w);
    }
    let last = waypoints.last().expect("at least one step");
    // the final interpolant is `to` itself; a valid `to` projects onto itself
    let ok = last.q.distance(&to.q) <= config.goal_tolerance;
    if ok {
        *waypoints.last_mut().expect("non-empty") = to.clone();
    }
    Ok(Motion { ok, waypoints })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Solved,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub scenario: String,
    pub planner: String,
    pub seed: u64,
    pub status: PlanStatus,
    /// Wall-clock planning time in seconds.
    pub time_s: f64,
    pub iterations: usize,
    /// Tree or roadmap size when planning stopped.
    pub graph_size: usize,
    pub path: Option<Path>,
}

impl PlanResult {
    pub fn solved(&self) -> bool {
        self.status == PlanStatus::Solved
    }

    pub fn path_vertex_count(&self) -> usize {
        self.path.as_ref().map_or(0, |p| p.vertices.len())
    }
}

pub trait Planner {
    fn name(&self) -> &'static str;

    fn plan(
        &self,
        problem: &PlanningProblem,
        config: &PlannerConfig,
        rng: &mut PlannerRng,
    ) -> Result<PlanResult>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Rrt,
    Prm,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 2] = [PlannerKind::Rrt, PlannerKind::Prm];

    pub fn planner(self) -> Box<dyn Planner + Send + Sync> {
        match self {
            PlannerKind::Rrt => Box::new(Rrt),
            PlannerKind::Prm => Box::new(Prm),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Rrt => "rrt",
            PlannerKind::Prm => "prm",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rrt" => Ok(PlannerKind::Rrt),
            "prm" => Ok(PlannerKind::Prm),
            other => Err(Error::UnknownPlanner(other.to_string())),
        }
    }
}

/// Runs one planner with a fresh generator seeded by `seed`.
pub fn solve(
    problem: &PlanningProblem,
    kind: PlannerKind,
    config: &PlannerConfig,
    seed: u64,
) -> Result<PlanResult> {
    let mut rng = rng_from_seed(seed);
    let mut result = kind.planner().plan(problem, config, &mut rng)?;
    result.seed = seed;
    Ok(result)
}

/// Shared preconditions: valid config, valid endpoints.
pub(crate) fn check_endpoints(problem: &PlanningProblem, config: &PlannerConfig) -> Result<()> {
    config.check()?;
    for (label, v) in [("start", &problem.start), ("goal", &problem.goal)] {
        check_vertex(problem, v).map_err(|why| {
            Error::InvalidProblem(format!(
                "{label} configuration is invalid under modes {}: {why}",
                crate::constraint::format_modes(&v.modes)
            ))
        })?;
    }
    Ok(())
}

pub(crate) fn reached_goal(problem: &PlanningProblem, v: &PlannerVertex, tol: f64) -> bool {
    v.modes == problem.goal.modes && v.q.distance(&problem.goal.q) <= tol
}
