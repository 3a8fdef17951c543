//! Incremental PRM: constrained milestones, k-nearest legal connections, shortest path
//! once start and goal share a component.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use web_time::Instant;

use super::{
    check_endpoints, check_motion, is_valid, mode_edge_legal_unchecked, reached_goal, Path, PlanResult,
    PlanStatus, Planner, PlannerConfig, PlannerVertex, PlanningProblem,
};
use crate::error::Result;
use crate::sampler::{sample_constrained, PlannerRng};

#[derive(Debug, Clone, Copy, Default)]
pub struct Prm;

struct Edge {
    from: usize,
    to: usize,
    length: f64,
    /// Dense waypoints from `from` to `to`, both included.
    waypoints: Vec<PlannerVertex>,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn push(&mut self) {
        self.parent.push(self.parent.len());
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Roadmap {
    nodes: Vec<PlannerVertex>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    components: DisjointSets,
}

impl Roadmap {
    fn add_node(&mut self, v: PlannerVertex) -> usize {
        self.nodes.push(v);
        self.adjacency.push(Vec::new());
        self.components.push();
        self.nodes.len() - 1
    }

    fn add_edge(&mut self, from: usize, to: usize, waypoints: Vec<PlannerVertex>) {
        let length = self.nodes[from].q.distance(&self.nodes[to].q);
        let e = self.edges.len();
        self.edges.push(Edge { from, to, length, waypoints });
        self.adjacency[from].push(e);
        self.adjacency[to].push(e);
        self.components.union(from, to);
    }

    fn connect(
        &mut self,
        problem: &PlanningProblem,
        config: &PlannerConfig,
        node: usize,
    ) -> Result<()> {
        let v = &self.nodes[node];
        let mut candidates: Vec<(f64, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|&(i, n)| i != node && mode_edge_legal_unchecked(&n.modes, &v.modes))
            .map(|(i, n)| (n.q.distance(&v.q), i))
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, other) in candidates.iter().take(config.prm_neighbors) {
            if self.components.find(other) == self.components.find(node) {
                continue;
            }
            let motion = check_motion(problem, &self.nodes[other], &self.nodes[node], config)?;
            if motion.ok {
                self.add_edge(other, node, motion.waypoints);
            }
        }
        Ok(())
    }

    fn shortest_path(&self, source: usize, target: usize) -> Option<Path> {
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Frontier(0.0, source));
        while let Some(Frontier(d, u)) = heap.pop() {
            if u == target {
                break;
            }
            if d > dist[u] {
                continue;
            }
            for &e in &self.adjacency[u] {
                let edge = &self.edges[e];
                let w = if edge.from == u { edge.to } else { edge.from };
                let nd = d + edge.length;
                if nd < dist[w] {
                    dist[w] = nd;
                    via[w] = Some(e);
                    heap.push(Frontier(nd, w));
                }
            }
        }
        if !dist[target].is_finite() {
            return None;
        }

        let mut hops = Vec::new();
        let mut at = target;
        while at != source {
            let e = via[at].expect("reachable node has a predecessor");
            hops.push(e);
            let edge = &self.edges[e];
            at = if edge.to == at { edge.from } else { edge.to };
        }
        hops.reverse();

        let mut path = Path { vertices: vec![self.nodes[source].clone()], waypoints: vec![self.nodes[source].clone()] };
        let mut at = source;
        for e in hops {
            let edge = &self.edges[e];
            if edge.from == at {
                path.waypoints.extend(edge.waypoints.iter().skip(1).cloned());
                at = edge.to;
            } else {
                path.waypoints.extend(edge.waypoints.iter().rev().skip(1).cloned());
                at = edge.from;
            }
            path.vertices.push(self.nodes[at].clone());
        }
        Some(path)
    }
}

impl Planner for Prm {
    fn name(&self) -> &'static str {
        "prm"
    }

    fn plan(&self, problem: &PlanningProblem, config: &PlannerConfig, rng: &mut PlannerRng) -> Result<PlanResult> {
        let clock = Instant::now();
        check_endpoints(problem, config)?;
        let mut set = problem.constraints.clone();
        let mut map = Roadmap {
            nodes: Vec::new(),
            adjacency: Vec::new(),
            edges: Vec::new(),
            components: DisjointSets { parent: Vec::new() },
        };
        let start = map.add_node(problem.start.clone());
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

        let mut solved = false;
        if reached_goal(problem, &problem.start, config.goal_tolerance) {
            result.path = map.shortest_path(start, start);
            solved = true;
        } else {
            let goal = map.add_node(problem.goal.clone());
            map.connect(problem, config, goal)?;
            loop {
                if map.components.find(start) == map.components.find(goal) {
                    result.path = map.shortest_path(start, goal);
                    solved = result.path.is_some();
                    break;
                }
                if clock.elapsed().as_secs_f64() >= config.time_budget {
                    break;
                }
                result.iterations += 1;
                let s = sample_constrained(&mut set, rng)?;
                if !s.success {
                    continue;
                }
                let v = PlannerVertex::new(s.q, s.modes);
                if !is_valid(problem, &v) {
                    continue;
                }
                let node = map.add_node(v);
                map.connect(problem, config, node)?;
            }
        }

        result.graph_size = map.nodes.len();
        if solved {
            result.status = PlanStatus::Solved;
        }
        result.time_s = clock.elapsed().as_secs_f64();
        Ok(result)
    }
}
