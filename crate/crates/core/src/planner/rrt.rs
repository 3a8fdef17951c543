//! Single-tree RRT over mode-annotated vertices with goal biasing.

use rand::Rng;
use web_time::Instant;

use super::{
    check_endpoints, check_motion, mode_edge_legal_unchecked, reached_goal, Path, PlanResult, PlanStatus,
    Planner, PlannerConfig, PlannerVertex, PlanningProblem,
};
use crate::constraint::{Mode, ModeVector};
use crate::error::Result;
use crate::sampler::{sample_constrained, PlannerRng};

#[derive(Debug, Clone, Copy, Default)]
pub struct Rrt;

struct Node {
    vertex: PlannerVertex,
    parent: Option<usize>,
    /// Dense waypoints from the parent, parent excluded.
    edge: Vec<PlannerVertex>,
}

fn nearest_legal(nodes: &[Node], target: &PlannerVertex) -> Option<usize> {
    nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| mode_edge_legal_unchecked(&n.vertex.modes, &target.modes))
        .map(|(i, n)| (i, n.vertex.q.distance(&target.q)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// Slot-wise: equal modes are kept, differing ones become free.
fn looser_modes(a: &[Mode], b: &[Mode]) -> ModeVector {
    a.iter().zip(b).map(|(&x, &y)| if x == y { x } else { Mode::Free }).collect()
}

fn extract(nodes: &[Node], mut leaf: usize) -> Path {
    let mut chain = vec![leaf];
    while let Some(p) = nodes[leaf].parent {
        chain.push(p);
        leaf = p;
    }
    chain.reverse();
    let mut path = Path::default();
    for &i in &chain {
        path.vertices.push(nodes[i].vertex.clone());
        if nodes[i].parent.is_none() {
            path.waypoints.push(nodes[i].vertex.clone());
        } else {
            path.waypoints.extend(nodes[i].edge.iter().cloned());
        }
    }
    path
}

impl Planner for Rrt {
    fn name(&self) -> &'static str {
        "rrt"
    }

    fn plan(&self, problem: &PlanningProblem, config: &PlannerConfig, rng: &mut PlannerRng) -> Result<PlanResult> {
        let clock = Instant::now();
        check_endpoints(problem, config)?;
        let mut set = problem.constraints.clone();
        let mut nodes = vec![Node { vertex: problem.start.clone(), parent: None, edge: Vec::new() }];
        let mut result = PlanResult {
            scenario: problem.name.clone(),
            planner: self.name().to_string(),
            seed: 0,
            status: PlanStatus::Timeout,
            time_s: 0.0,
            iterations: 0,
            graph_size: 1,
            path: None,
        };
        let mut solution = reached_goal(problem, &problem.start, config.goal_tolerance).then_some(0);

        while solution.is_none() && clock.elapsed().as_secs_f64() < config.time_budget {
            result.iterations += 1;
            let sample = if rng.gen::<f64>() < config.goal_bias {
                problem.goal.clone()
            } else {
                let s = sample_constrained(&mut set, rng)?;
                if !s.success {
                    continue;
                }
                PlannerVertex::new(s.q, s.modes)
            };
            let Some(near) = nearest_legal(&nodes, &sample) else {
                continue;
            };
            let from = &nodes[near].vertex;
            let d = from.q.distance(&sample.q);
            let target = if d > config.max_extension {
                // a step that falls short of the sample stays in the looser of the two modes
                let modes = looser_modes(&from.modes, &sample.modes);
                let stepped = from.q.lerp(&sample.q, config.max_extension / d);
                let p = problem.constraints.project_with(&stepped, &modes)?;
                if !p.success {
                    continue;
                }
                PlannerVertex::new(p.q, modes)
            } else {
                sample
            };
            let motion = check_motion(problem, from, &target, config)?;
            if !motion.ok {
                continue;
            }
            let mut edge = motion.waypoints;
            edge.remove(0);
            let reached = reached_goal(problem, &target, config.goal_tolerance);
            nodes.push(Node { vertex: target, parent: Some(near), edge });
            if reached {
                solution = Some(nodes.len() - 1);
            }
        }

        result.graph_size = nodes.len();
        if let Some(leaf) = solution {
            result.status = PlanStatus::Solved;
            result.path = Some(extract(&nodes, leaf));
        }
        result.time_s = clock.elapsed().as_secs_f64();
        Ok(result)
    }
}
