use std::collections::VecDeque;

use crate::error::{Error, Result};

/// All mode tuples for `contacts` contact points, each either free (0) or bound to one
/// of `surfaces` surfaces (1..=surfaces), with an edge wherever exactly one contact
/// changes and it passes through the free mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintGraph {
    contacts: usize,
    surfaces: u8,
    states: Vec<Vec<u8>>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

fn legal(a: &[u8], b: &[u8]) -> bool {
    let diffs: Vec<(u8, u8)> = a.iter().zip(b).filter(|(x, y)| x != y).map(|(x, y)| (*x, *y)).collect();
    matches!(diffs.as_slice(), [(x, y)] if *x == 0 || *y == 0)
}

pub fn build_constraint_graph(contacts: usize, surfaces: u8) -> Result<ConstraintGraph> {
    if contacts == 0 || surfaces == 0 {
        return Err(Error::InvalidConstraints(
            "constraint graph needs at least one contact and one surface".into(),
        ));
    }
    let base = surfaces as usize + 1;
    let count = base
        .checked_pow(contacts as u32)
        .filter(|&n| n <= 1 << 20)
        .ok_or_else(|| Error::InvalidConstraints(format!("{base}^{contacts} states is too many")))?;

    // states in lexicographic order, first contact most significant
    let states: Vec<Vec<u8>> = (0..count)
        .map(|mut n| {
            let mut s = vec![0u8; contacts];
            for slot in s.iter_mut().rev() {
                *slot = (n % base) as u8;
                n /= base;
            }
            s
        })
        .collect();

    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); count];
    for i in 0..count {
        for j in i + 1..count {
            if legal(&states[i], &states[j]) {
                edges.push((i, j));
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    Ok(ConstraintGraph { contacts, surfaces, states, edges, adjacency })
}

impl ConstraintGraph {
    pub fn contacts(&self) -> usize {
        self.contacts
    }

    pub fn surfaces(&self) -> u8 {
        self.surfaces
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    /// Undirected edges as index pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn state_index(&self, state: &[u8]) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    pub fn has_edge(&self, a: &[u8], b: &[u8]) -> bool {
        match (self.state_index(a), self.state_index(b)) {
            (Some(i), Some(j)) => self.adjacency[i].contains(&j),
            _ => false,
        }
    }

    /// True iff every consecutive pair of `states` is joined by an edge.
    pub fn contains_path(&self, states: &[&[u8]]) -> bool {
        states.iter().all(|s| self.state_index(s).is_some())
            && states.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }

    /// Fewest edges between two states, `None` if either is unknown or unreachable.
    pub fn hops(&self, from: &[u8], to: &[u8]) -> Option<usize> {
        let (s, t) = (self.state_index(from)?, self.state_index(to)?);
        let mut dist = vec![usize::MAX; self.states.len()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                return Some(dist[u]);
            }
            for &v in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    pub fn is_connected(&self) -> bool {
        let first = &self.states[0];
        self.states.iter().all(|s| self.hops(first, s).is_some())
    }
}
