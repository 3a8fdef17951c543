//! Scenario files: a JSON document with `robot`, `obstacles`, `contacts`, `problem`
//! and `planner` sections, resolved into a ready-to-plan [`Scenario`].
//!
//! ```json
//! {
//!   "name": "example",
//!   "robot": {
//!     "base": { "position": [0, 0, 0], "rotation": [0, 0, 0] },
//!     "joints": [ { "axis": [0, 0, 1], "length": 1.0 } ],
//!     "contact_points": [ { "id": 0, "link": 0, "offset": [1, 0, 0] } ]
//!   },
//!   "obstacles": [ { "name": "floor", "box": { "center": [0, -1, 0], "half_extents": [2, 0.05, 0.2] } } ],
//!   "contacts": [ { "contact": 0, "transition": { "start": "floor", "goal": "floor" } } ],
//!   "problem": { "q_start": [-1.5708], "q_goal": [0], "start_modes": [1], "goal_modes": [0] }
//! }
//! ```
//!
//! Rotations are axis-angle vectors (axis times angle in radians). Obstacles are one of
//! `box`, `icosphere` or `off` (a mesh path, relative to the scenario file).

mod graph;

pub use graph::{build_constraint_graph, ConstraintGraph};

use std::collections::HashMap;
use std::path::Path as FsPath;
use std::sync::Arc;

use nalgebra::{Isometry3, Translation3, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::constraint::{format_modes, ConstraintSet, ContactSpec, Mode, ModeVector, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::geom::{make_box, make_icosphere, read_off, Point3, TriMesh, Vector3};
use crate::planner::{check_vertex, PlannerConfig, PlannerVertex, PlanningProblem, EXEMPT_RADIUS_FRACTION};
use crate::robot::{Configuration, ContactPointSpec, JointSpec, KinematicChain, LinkSpec, DEFAULT_LIMITS};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSection {
    #[serde(default)]
    pub position: [f64; 3],
    /// Axis-angle vector.
    #[serde(default)]
    pub rotation: [f64; 3],
}

impl PoseSection {
    fn isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(
            Translation3::from(Vector3::from(self.position)),
            UnitQuaternion::from_scaled_axis(Vector3::from(self.rotation)),
        )
    }
}

fn default_limits() -> [f64; 2] {
    DEFAULT_LIMITS
}

fn is_default_limits(l: &[f64; 2]) -> bool {
    *l == DEFAULT_LIMITS
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_identity(p: &PoseSection) -> bool {
    *p == PoseSection::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointSection {
    pub axis: [f64; 3],
    #[serde(default, skip_serializing_if = "is_identity")]
    pub origin: PoseSection,
    #[serde(default = "default_limits", skip_serializing_if = "is_default_limits")]
    pub limits: [f64; 2],
    /// Length of the link driven by this joint.
    pub length: f64,
    /// Capsule radius of that link; 0 means a bare segment.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactPointSection {
    pub id: usize,
    pub link: usize,
    pub offset: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSection {
    #[serde(default)]
    pub base: PoseSection,
    pub joints: Vec<JointSection>,
    pub contact_points: Vec<ContactPointSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxShape {
    pub center: [f64; 3],
    pub half_extents: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcosphereShape {
    pub center: [f64; 3],
    pub radius: f64,
    pub subdiv: usize,
}

/// Exactly one of `box`, `icosphere` and `off` must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSection {
    pub name: String,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub cuboid: Option<BoxShape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icosphere: Option<IcosphereShape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub off: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSection {
    pub start: String,
    pub goal: String,
}

/// Exactly one of `sliding` (a surface name) and `transition` must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactSection {
    pub contact: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sliding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<TransitionSection>,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub q_start: Vec<f64>,
    pub q_goal: Vec<f64>,
    pub start_modes: ModeVector,
    pub goal_modes: ModeVector,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Defaults to 2% of the total arm length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exempt_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub robot: RobotSection,
    pub obstacles: Vec<ObstacleSection>,
    pub contacts: Vec<ContactSection>,
    pub problem: ProblemSection,
    #[serde(default)]
    pub planner: PlannerConfig,
}

/// A loaded and validated scenario. Immutable; share it behind `&` or `Arc`.
#[derive(Debug, Clone)]
pub struct Scenario {
    file: ScenarioFile,
    chain: Arc<KinematicChain>,
    obstacles: Vec<Arc<TriMesh>>,
    constraints: ConstraintSet,
    start: PlannerVertex,
    goal: PlannerVertex,
    exempt_radius: f64,
}

pub const BUILTIN_NAMES: [&str; 5] =
    ["rect2dof", "rect7dof", "sphere3dof", "firstJointSliding", "lastJointSliding"];

fn builtin_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "rect2dof" => include_str!("../../scenarios/rect2dof.json"),
        "rect7dof" => include_str!("../../scenarios/rect7dof.json"),
        "sphere3dof" => include_str!("../../scenarios/sphere3dof.json"),
        "firstJointSliding" => include_str!("../../scenarios/firstJointSliding.json"),
        "lastJointSliding" => include_str!("../../scenarios/lastJointSliding.json"),
        _ => return None,
    })
}

fn check_finite(field: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::scenario(field, "values must be finite"))
    }
}

fn build_chain(robot: &RobotSection) -> Result<KinematicChain> {
    check_finite("robot.base.position", &robot.base.position)?;
    check_finite("robot.base.rotation", &robot.base.rotation)?;
    let mut joints = Vec::with_capacity(robot.joints.len());
    let mut links = Vec::with_capacity(robot.joints.len());
    for (i, j) in robot.joints.iter().enumerate() {
        let field = format!("robot.joints[{i}]");
        check_finite(&field, &j.axis)?;
        check_finite(&field, &j.origin.position)?;
        check_finite(&field, &j.origin.rotation)?;
        let axis = Vector3::from(j.axis);
        if axis.norm() < 1e-12 {
            return Err(Error::scenario(format!("{field}.axis"), "axis must be non-zero"));
        }
        joints.push(JointSpec {
            origin: j.origin.isometry(),
            limits: j.limits,
            ..JointSpec::revolute(axis)
        });
        links.push(LinkSpec { length: j.length, collision_radius: j.radius });
    }
    let contacts = robot
        .contact_points
        .iter()
        .map(|c| ContactPointSpec { id: c.id, link: c.link, offset: Point3::from(c.offset) })
        .collect();
    KinematicChain::new(robot.base.isometry(), joints, links, contacts)
        .map_err(|e| Error::scenario("robot", e.to_string()))
}

fn build_obstacle(o: &ObstacleSection, field: &str, base_dir: Option<&FsPath>) -> Result<TriMesh> {
    let mesh = match (&o.cuboid, &o.icosphere, &o.off) {
        (Some(b), None, None) => make_box(Point3::from(b.center), Vector3::from(b.half_extents)),
        (None, Some(s), None) => make_icosphere(Point3::from(s.center), s.radius, s.subdiv),
        (None, None, Some(path)) => {
            let full = match base_dir {
                Some(dir) => dir.join(path),
                None => path.into(),
            };
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Error::scenario(format!("{field}.off"), format!("{}: {e}", full.display())))?;
            read_off(&o.name, &text)
        }
        _ => {
            return Err(Error::scenario(field, "exactly one of `box`, `icosphere`, `off` is required"));
        }
    }
    .map_err(|e| Error::scenario(field, e.to_string()))?;
    Ok(mesh.with_name(&o.name))
}

impl Scenario {
    /// Resolves and validates a parsed file. `base_dir` anchors relative OFF paths.
    pub fn from_file(file: ScenarioFile, base_dir: Option<&FsPath>) -> Result<Self> {
        let chain = Arc::new(build_chain(&file.robot)?);

        let mut obstacles = Vec::with_capacity(file.obstacles.len());
        let mut by_name: HashMap<&str, Arc<TriMesh>> = HashMap::new();
        for (i, o) in file.obstacles.iter().enumerate() {
            let field = format!("obstacles[{i}]");
            let mesh = Arc::new(build_obstacle(o, &field, base_dir)?);
            if by_name.insert(o.name.as_str(), mesh.clone()).is_some() {
                return Err(Error::scenario(format!("{field}.name"), format!("duplicate name `{}`", o.name)));
            }
            obstacles.push(mesh);
        }

        let surface = |field: String, name: &str| -> Result<Arc<TriMesh>> {
            by_name
                .get(name)
                .cloned()
                .ok_or_else(|| Error::scenario(field, format!("unknown surface `{name}`")))
        };
        let mut specs = Vec::with_capacity(file.contacts.len());
        for (i, c) in file.contacts.iter().enumerate() {
            let field = format!("contacts[{i}]");
            let spec = match (&c.sliding, &c.transition) {
                (Some(s), None) => ContactSpec::sliding(c.contact, surface(format!("{field}.sliding"), s)?),
                (None, Some(t)) => ContactSpec::transition(
                    c.contact,
                    surface(format!("{field}.transition.start"), &t.start)?,
                    surface(format!("{field}.transition.goal"), &t.goal)?,
                ),
                _ => return Err(Error::scenario(field, "exactly one of `sliding`, `transition` is required")),
            };
            specs.push(spec);
        }

        let p = &file.problem;
        let constraints = ConstraintSet::new(chain.clone(), specs, p.tolerance)
            .map_err(|e| Error::scenario("contacts", e.to_string()))?;
        let dof = chain.dof();
        for (field, q) in [("problem.q_start", &p.q_start), ("problem.q_goal", &p.q_goal)] {
            if q.len() != dof {
                return Err(Error::scenario(field, format!("has {} angles, robot has {dof} joints", q.len())));
            }
            check_finite(field, q)?;
        }
        for (field, m) in [("problem.start_modes", &p.start_modes), ("problem.goal_modes", &p.goal_modes)] {
            constraints.check_modes(m).map_err(|e| Error::scenario(field, e.to_string()))?;
        }
        let graph = build_constraint_graph(constraints.len(), 2)?;
        let as_u8 = |m: &[Mode]| m.iter().map(|&x| x as u8).collect::<Vec<_>>();
        if graph.hops(&as_u8(&p.start_modes), &as_u8(&p.goal_modes)).is_none() {
            return Err(Error::scenario(
                "problem.goal_modes",
                format!(
                    "{} is unreachable from {}",
                    format_modes(&p.goal_modes),
                    format_modes(&p.start_modes)
                ),
            ));
        }
        file.planner.check().map_err(|e| Error::scenario("planner", e.to_string()))?;
        let exempt_radius = p.exempt_radius.unwrap_or(EXEMPT_RADIUS_FRACTION * chain.total_length());
        if !(exempt_radius >= 0.0 && exempt_radius.is_finite()) {
            return Err(Error::scenario("problem.exempt_radius", "must be a finite non-negative length"));
        }

        let mut constraints = constraints;
        constraints.set_modes(&p.start_modes)?;
        let scenario = Scenario {
            start: PlannerVertex::new(Configuration::new(p.q_start.clone()), p.start_modes.clone()),
            goal: PlannerVertex::new(Configuration::new(p.q_goal.clone()), p.goal_modes.clone()),
            chain,
            obstacles,
            constraints,
            exempt_radius,
            file,
        };
        let problem = scenario.problem();
        for (field, v) in [("problem.q_start", &scenario.start), ("problem.q_goal", &scenario.goal)] {
            check_vertex(&problem, v).map_err(|why| Error::scenario(field, why.to_string()))?;
        }
        Ok(scenario)
    }

    pub fn from_json(text: &str, base_dir: Option<&FsPath>) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Scenario::from_file(file, base_dir)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Scenario::from_json(&text, path.parent())
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let text = builtin_source(name).ok_or_else(|| Error::UnknownScenario {
            name: name.to_string(),
            valid: BUILTIN_NAMES.join(", "),
        })?;
        Scenario::from_json(text, None)
    }

    /// Pretty JSON of the source document, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.file).expect("scenario files always serialize");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn file(&self) -> &ScenarioFile {
        &self.file
    }

    pub fn chain(&self) -> &Arc<KinematicChain> {
        &self.chain
    }

    pub fn obstacles(&self) -> &[Arc<TriMesh>] {
        &self.obstacles
    }

    /// Constraint set with modes at the start modes.
    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn start(&self) -> &PlannerVertex {
        &self.start
    }

    pub fn goal(&self) -> &PlannerVertex {
        &self.goal
    }

    pub fn planner_config(&self) -> PlannerConfig {
        self.file.planner
    }

    pub fn seed(&self) -> u64 {
        self.file.problem.seed
    }

    pub fn exempt_radius(&self) -> f64 {
        self.exempt_radius
    }

    pub fn problem(&self) -> PlanningProblem {
        PlanningProblem {
            name: self.file.name.clone(),
            constraints: self.constraints.clone(),
            obstacles: self.obstacles.clone(),
            start: self.start.clone(),
            goal: self.goal.clone(),
            exempt_radius: self.exempt_radius,
        }
    }

    /// Constraint graph over this scenario's contacts with start and goal surfaces.
    pub fn constraint_graph(&self) -> ConstraintGraph {
        build_constraint_graph(self.constraints.len().max(1), 2).expect("small graph")
    }
}
