//! Browser bindings: pose inspection, constrained sampling and planning on the
//! built-in scenarios. Every call returns a JSON string.

use serde::Serialize;
use slideplan::constraint::Mode;
use slideplan::geom::Point3;
use slideplan::planner::{check_vertex, solve, validate_path, PlannerKind, PlannerVertex};
use slideplan::robot::Configuration;
use slideplan::sampler::{rng_from_seed, sample_constrained};
use slideplan::scenario::BUILTIN_NAMES;
use slideplan::Scenario;
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: usize = 2000;

#[derive(Serialize)]
struct Obstacle {
    name: String,
    /// Flat list of triangle corners, nine numbers per face.
    triangles: Vec<f64>,
}

#[derive(Serialize)]
struct SceneView {
    name: String,
    description: String,
    dof: usize,
    /// Indices of the two world axes to draw.
    view: [usize; 2],
    limits: Vec<[f64; 2]>,
    obstacles: Vec<Obstacle>,
    start: PoseView,
    goal: PoseView,
}

#[derive(Serialize)]
struct PoseView {
    q: Vec<f64>,
    modes: Vec<u8>,
    /// Joint positions from the base to the tip.
    points: Vec<[f64; 3]>,
    contacts: Vec<[f64; 3]>,
    residuals: Vec<f64>,
    valid: bool,
    problem: Option<String>,
}

#[derive(Serialize)]
struct PlanView {
    planner: String,
    seed: u64,
    solved: bool,
    time_s: f64,
    iterations: usize,
    graph_size: usize,
    vertices: usize,
    replay: Option<String>,
    frames: Vec<PoseView>,
}

fn xyz(p: &Point3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("view types serialize")
}

/// Core of the demo, usable without a browser.
pub struct Session {
    scenario: Scenario,
}

impl Session {
    pub fn new(name: &str) -> Result<Self, String> {
        Scenario::builtin(name).map(|scenario| Session { scenario }).map_err(|e| e.to_string())
    }

    fn pose_view(&self, q: &Configuration, modes: &[Mode]) -> Result<PoseView, String> {
        let chain = self.scenario.chain();
        let set = self.scenario.constraints();
        let mut points = vec![xyz(&Point3::from(chain.base().translation.vector))];
        points.extend(chain.collision_segments(q).map_err(|e| e.to_string())?.iter().map(|s| xyz(&s.p1)));
        let contacts = chain.contact_points_world(q).map_err(|e| e.to_string())?;
        let residuals = set.evaluate_with(q, modes).map_err(|e| e.to_string())?;
        let vertex = PlannerVertex::new(q.clone(), modes.to_vec());
        let check = check_vertex(&self.scenario.problem(), &vertex);
        Ok(PoseView {
            q: q.as_slice().to_vec(),
            modes: modes.iter().map(|&m| u8::from(m)).collect(),
            points,
            contacts: contacts.iter().map(xyz).collect(),
            residuals: residuals.iter().copied().collect(),
            valid: check.is_ok(),
            problem: check.err().map(|e| e.to_string()),
        })
    }

    pub fn scene(&self) -> Result<String, String> {
        let chain = self.scenario.chain();
        let planar = chain.joints().iter().all(|j| j.axis.x.abs() < 1e-9 && j.axis.y.abs() < 1e-9);
        let obstacles = self
            .scenario
            .obstacles()
            .iter()
            .map(|m| Obstacle {
                name: m.name().to_string(),
                triangles: m
                    .triangles()
                    .flat_map(|t| [t.a, t.b, t.c].into_iter().flat_map(|p| xyz(&p)))
                    .collect(),
            })
            .collect();
        let start = self.scenario.start();
        let goal = self.scenario.goal();
        Ok(to_json(&SceneView {
            name: self.scenario.name().to_string(),
            description: self.scenario.file().description.clone(),
            dof: chain.dof(),
            view: if planar { [0, 1] } else { [0, 2] },
            limits: chain.joints().iter().map(|j| j.limits).collect(),
            obstacles,
            start: self.pose_view(&start.q, &start.modes)?,
            goal: self.pose_view(&goal.q, &goal.modes)?,
        }))
    }

    pub fn pose(&self, q: &[f64], modes: &[u8]) -> Result<String, String> {
        let modes = modes
            .iter()
            .map(|&m| Mode::try_from(m))
            .collect::<Result<Vec<_>, _>>()?;
        let q = Configuration::new(q.to_vec());
        if q.dim() != self.scenario.chain().dof() {
            return Err(format!("expected {} angles, got {}", self.scenario.chain().dof(), q.dim()));
        }
        self.scenario.constraints().check_modes(&modes).map_err(|e| e.to_string())?;
        Ok(to_json(&self.pose_view(&q, &modes)?))
    }

    /// Constrained samples; only the converged ones are returned.
    pub fn sample(&self, count: usize, seed: u64) -> Result<String, String> {
        let mut set = self.scenario.constraints().clone();
        let mut rng = rng_from_seed(seed);
        let mut out = Vec::new();
        for _ in 0..count.min(MAX_SAMPLES) {
            let s = sample_constrained(&mut set, &mut rng).map_err(|e| e.to_string())?;
            if s.success {
                out.push(self.pose_view(&s.q, &s.modes)?);
            }
        }
        Ok(to_json(&out))
    }

    pub fn plan(&self, planner: &str, seed: u64, budget: f64) -> Result<String, String> {
        let kind: PlannerKind = planner.parse().map_err(|e: slideplan::Error| e.to_string())?;
        let mut config = self.scenario.planner_config();
        if budget > 0.0 {
            config.time_budget = budget;
        }
        let problem = self.scenario.problem();
        let result = solve(&problem, kind, &config, seed).map_err(|e| e.to_string())?;
        let mut view = PlanView {
            planner: kind.name().to_string(),
            seed,
            solved: result.solved(),
            time_s: result.time_s,
            iterations: result.iterations,
            graph_size: result.graph_size,
            vertices: result.path_vertex_count(),
            replay: None,
            frames: Vec::new(),
        };
        if let Some(path) = result.path.as_ref() {
            view.replay = validate_path(&problem, path, config.goal_tolerance).err().map(|v| v.to_string());
            for w in &path.waypoints {
                view.frames.push(self.pose_view(&w.q, &w.modes)?);
            }
        }
        Ok(to_json(&view))
    }
}

#[wasm_bindgen]
pub fn scenario_names() -> String {
    to_json(&BUILTIN_NAMES)
}

#[wasm_bindgen]
pub struct Demo {
    session: Session,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(name: &str) -> Result<Demo, JsValue> {
        Session::new(name).map(|session| Demo { session }).map_err(|e| JsValue::from_str(&e))
    }

    pub fn scene(&self) -> Result<String, JsValue> {
        self.session.scene().map_err(|e| JsValue::from_str(&e))
    }

    pub fn pose(&self, q: Vec<f64>, modes: Vec<u8>) -> Result<String, JsValue> {
        self.session.pose(&q, &modes).map_err(|e| JsValue::from_str(&e))
    }

    pub fn sample(&self, count: u32, seed: u32) -> Result<String, JsValue> {
        self.session.sample(count as usize, seed.into()).map_err(|e| JsValue::from_str(&e))
    }

    pub fn plan(&self, planner: &str, seed: u32, budget: f64) -> Result<String, JsValue> {
        self.session.plan(planner, seed.into(), budget).map_err(|e| JsValue::from_str(&e))
    }
}
