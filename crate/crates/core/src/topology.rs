//! Interaction graphs, impact degrees, and neighborhood sets.
//!
//! Two cells that interact directly have impact degree 1; cohabitants are
//! pinned at degree 0; in general the degree from `a` to `b` is the least
//! number of interactions needed to get from `a` to `b`. For every cell `x`
//! the sets `A_k(x) = { y : degree(x, y) <= k }` are nested in `k`, which is
//! what lets the transition rules treat them as a neighborhood system.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("edge ({a}, {b}) references a cell outside 0..{cell_count}")]
    EdgeOutOfBounds { a: usize, b: usize, cell_count: usize },
    #[error("degree assignment ({from_cell}, {to_cell}) references a cell outside 0..{cell_count}")]
    AssignmentOutOfBounds {
        from_cell: usize,
        to_cell: usize,
        cell_count: usize,
    },
    #[error("pair ({from_cell}, {to_cell}) assigned two distinct degrees {first} and {second}")]
    ConflictingAssignment {
        from_cell: usize,
        to_cell: usize,
        first: u32,
        second: u32,
    },
    #[error("cell {cell} assigned nonzero self-degree {degree}")]
    NonzeroSelfDegree { cell: usize, degree: u32 },
    #[error("impact rate for degree {degree} is {rate}, outside [0, 1]")]
    RateOutOfRange { degree: u32, rate: f64 },
}

/// Undirected interaction graph over `cell_count` cells.
///
/// Self-loops are implicit (every cell is in contact with itself) and edges
/// are stored normalized, so symmetry holds by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    cell_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl InteractionGraph {
    pub fn new(cell_count: usize, edges: &[(usize, usize)]) -> Result<Self, TopologyError> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= cell_count || b >= cell_count {
                return Err(TopologyError::EdgeOutOfBounds { a, b, cell_count });
            }
            if a == b {
                continue; // implicit
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(InteractionGraph {
            cell_count,
            edges: set,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn are_linked(&self, a: usize, b: usize) -> bool {
        a == b || self.edges.contains(&(a.min(b), a.max(b)))
    }

    fn neighbors(&self, x: usize) -> Vec<usize> {
        // O(E) scan; graphs here are small and this is build-time only.
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == x {
                    Some(b)
                } else if b == x {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// All-pairs impact degrees.
///
/// `degree(x, y)` is `None` for unreachable pairs; such pairs belong to no
/// neighborhood set and exert no influence in the rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpactDegreeMap {
    cell_count: usize,
    // row-major (source, target); None = unreachable
    degrees: Vec<Option<u32>>,
    max_degree: u32,
}

impl ImpactDegreeMap {
    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    /// Largest finite degree present in the map.
    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Degree of impact from `source` on `target`.
    pub fn degree(&self, source: usize, target: usize) -> Option<u32> {
        self.degrees[source * self.cell_count + target]
    }

    /// The neighborhood set `A_k(x)`: all cells whose degree of impact with
    /// `x` is at most `k`. Always contains `x` itself.
    pub fn neighborhood_set(&self, x: usize, k: u32) -> BTreeSet<usize> {
        (0..self.cell_count)
            .filter(|&y| matches!(self.degree(x, y), Some(d) if d <= k))
            .collect()
    }

    fn from_matrix(cell_count: usize, degrees: Vec<Option<u32>>) -> Self {
        let max_degree = degrees.iter().flatten().copied().max().unwrap_or(0);
        ImpactDegreeMap {
            cell_count,
            degrees,
            max_degree,
        }
    }
}

/// Computes impact degrees as shortest-path lengths: 0 to self, 1 to direct
/// contacts, and the least interaction count in general.
pub fn compute_impact_degrees(graph: &InteractionGraph) -> ImpactDegreeMap {
    let n = graph.cell_count();
    let adjacency: Vec<Vec<usize>> = (0..n).map(|x| graph.neighbors(x)).collect();
    let mut degrees = vec![None; n * n];
    for source in 0..n {
        // BFS
        let mut dist = vec![None; n];
        dist[source] = Some(0u32);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &u in &adjacency[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        for (target, d) in dist.into_iter().enumerate() {
            degrees[source * n + target] = d;
        }
    }
    ImpactDegreeMap::from_matrix(n, degrees)
}

/// Builds a degree map from explicit per-pair assignments.
///
/// Assignments are ordered pairs and may be asymmetric. `degree(x, x) = 0`
/// is enforced regardless of input; a nonzero self-assignment is an error, as
/// is assigning two distinct degrees to the same ordered pair.
pub fn set_explicit_degrees(
    cell_count: usize,
    assignments: &[(usize, usize, u32)],
) -> Result<ImpactDegreeMap, TopologyError> {
    let mut degrees: Vec<Option<u32>> = vec![None; cell_count * cell_count];
    for x in 0..cell_count {
        degrees[x * cell_count + x] = Some(0);
    }
    for &(source, target, degree) in assignments {
        if source >= cell_count || target >= cell_count {
            return Err(TopologyError::AssignmentOutOfBounds {
                from_cell: source,
                to_cell: target,
                cell_count,
            });
        }
        if source == target {
            if degree != 0 {
                return Err(TopologyError::NonzeroSelfDegree {
                    cell: source,
                    degree,
                });
            }
            continue;
        }
        let slot = &mut degrees[source * cell_count + target];
        match *slot {
            Some(first) if first != degree => {
                return Err(TopologyError::ConflictingAssignment {
                    from_cell: source,
                    to_cell: target,
                    first,
                    second: degree,
                });
            }
            _ => *slot = Some(degree),
        }
    }
    Ok(ImpactDegreeMap::from_matrix(cell_count, degrees))
}

/// Impact rates `P(g)`: the probability weight a state change at degree `g`
/// carries. Values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactProfile {
    rates: BTreeMap<u32, f64>,
}

impl ImpactProfile {
    pub fn new(rates: impl IntoIterator<Item = (u32, f64)>) -> Result<Self, TopologyError> {
        let rates: BTreeMap<u32, f64> = rates.into_iter().collect();
        for (&degree, &rate) in &rates {
            if !(0.0..=1.0).contains(&rate) {
                return Err(TopologyError::RateOutOfRange { degree, rate });
            }
        }
        Ok(ImpactProfile { rates })
    }

    /// Rate for degree `g`, or 0 when the profile has no entry. Scenario
    /// validation rejects profiles that do not cover every degree of the
    /// population they are paired with.
    pub fn rate(&self, degree: u32) -> f64 {
        self.rates.get(&degree).copied().unwrap_or(0.0)
    }

    pub fn covers(&self, degree: u32) -> bool {
        self.rates.contains_key(&degree)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.rates.iter().map(|(&g, &r)| (g, r))
    }
}
