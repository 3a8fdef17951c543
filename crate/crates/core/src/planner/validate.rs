//! Replays a stored path against a problem.

use std::fmt;

use super::{check_vertex, mode_edge_legal_unchecked, Invalidity, Path, PlannerVertex, PlanningProblem, MAX_WAYPOINT_GAP};
use crate::constraint::format_modes;

#[derive(Debug, Clone, PartialEq)]
pub enum PathViolation {
    /// A path with no waypoints is only accepted when start and goal coincide.
    Empty,
    WrongStart,
    WrongGoal,
    InvalidWaypoint { index: usize, why: Invalidity },
    IllegalModeChange { index: usize, from: String, to: String },
    Gap { index: usize, gap: f64 },
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathViolation::Empty => write!(f, "path is empty but start and goal differ"),
            PathViolation::WrongStart => write!(f, "first waypoint is not the start vertex"),
            PathViolation::WrongGoal => write!(f, "last waypoint is not within tolerance of the goal"),
            PathViolation::InvalidWaypoint { index, why } => write!(f, "waypoint {index}: {why}"),
            PathViolation::IllegalModeChange { index, from, to } => {
                write!(f, "waypoints {} -> {index}: illegal mode change {from} -> {to}", index - 1)
            }
            PathViolation::Gap { index, gap } => write!(
                f,
                "waypoints {} -> {index}: joint-space jump {gap:.3} rad exceeds {MAX_WAYPOINT_GAP}",
                index - 1
            ),
        }
    }
}

impl std::error::Error for PathViolation {}

fn near(a: &PlannerVertex, b: &PlannerVertex, tol: f64) -> bool {
    a.modes == b.modes && a.q.dim() == b.q.dim() && a.q.distance(&b.q) <= tol
}

/// Checks that the dense waypoints begin at the start, end within `goal_tolerance` of
/// the goal, are all valid, change modes only along constraint-graph edges, and never
/// jump more than [`MAX_WAYPOINT_GAP`] between neighbors.
pub fn validate_path(problem: &PlanningProblem, path: &Path, goal_tolerance: f64) -> Result<(), PathViolation> {
    let w = &path.waypoints;
    let (Some(first), Some(last)) = (w.first(), w.last()) else {
        return if near(&problem.start, &problem.goal, goal_tolerance) {
            Ok(())
        } else {
            Err(PathViolation::Empty)
        };
    };
    if !near(first, &problem.start, 1e-9) {
        return Err(PathViolation::WrongStart);
    }
    if !near(last, &problem.goal, goal_tolerance) {
        return Err(PathViolation::WrongGoal);
    }
    for (index, v) in w.iter().enumerate() {
        check_vertex(problem, v).map_err(|why| PathViolation::InvalidWaypoint { index, why })?;
    }
    for (i, pair) in w.windows(2).enumerate() {
        let index = i + 1;
        if !mode_edge_legal_unchecked(&pair[0].modes, &pair[1].modes) {
            return Err(PathViolation::IllegalModeChange {
                index,
                from: format_modes(&pair[0].modes),
                to: format_modes(&pair[1].modes),
            });
        }
        let gap = pair[0].q.distance(&pair[1].q);
        if gap > MAX_WAYPOINT_GAP {
            return Err(PathViolation::Gap { index, gap });
        }
    }
    Ok(())
}
