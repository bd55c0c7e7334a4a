//! Random geometric deployments in the unit square.

use std::collections::VecDeque;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_for};

/// Dense node identifier, assigned `0..n` in creation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Static node placement plus the symmetric unit-disk adjacency derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n: usize,
    radius: f64,
    seed: u64,
    positions: Vec<(f64, f64)>,
    adjacency: Vec<Vec<NodeId>>,
}

/// Upper bound on regeneration attempts in [`generate_connected`].
pub const MAX_CONNECT_ATTEMPTS: u32 = 10_000;

/// Places `n` nodes uniformly in `[0,1]²` and links every pair within `radius`.
pub fn generate_topology(n: usize, radius: f64, seed: u64) -> Result<Topology> {
    if n == 0 {
        return Err(Error::param("node count must be at least 1"));
    }
    if !(radius > 0.0 && radius <= SQRT_2) {
        return Err(Error::param(format!(
            "radius must be in (0, sqrt(2)], got {radius}"
        )));
    }
    let mut rng = rng_for(seed, "topology", &[]);
    let positions: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();

    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if distance(positions[i], positions[j]) <= radius {
                adjacency[i].push(NodeId::from(j));
                adjacency[j].push(NodeId::from(i));
            }
        }
    }
    // pushes happen in ascending order for both endpoints, so lists are sorted
    Ok(Topology {
        n,
        radius,
        seed,
        positions,
        adjacency,
    })
}

/// Regenerates with fresh derived seeds until the graph is connected.
///
/// Attempt 0 uses `seed` itself; attempt `i` uses a seed derived from
/// `(seed, i)`. Returns the topology and the number of rejected attempts.
pub fn generate_connected(n: usize, radius: f64, seed: u64) -> Result<(Topology, u32)> {
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let s = if attempt == 0 {
            seed
        } else {
            derive_seed(seed, "retry", &[u64::from(attempt)])
        };
        let t = generate_topology(n, radius, s)?;
        if t.is_connected() {
            return Ok((t, attempt));
        }
    }
    Err(Error::Disconnected {
        n,
        radius,
        attempts: MAX_CONNECT_ATTEMPTS,
    })
}

/// Radius giving an expected degree of about `2 ln n` away from the border.
pub fn connectivity_radius(n: usize) -> f64 {
    if n <= 1 {
        return SQRT_2;
    }
    let nf = n as f64;
    (2.0 * nf.ln() / (PI * (nf - 1.0))).sqrt().min(SQRT_2)
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt()
}

impl Topology {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Seed the placement was drawn from (after any connectivity retries).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn position(&self, id: NodeId) -> (f64, f64) {
        self.positions[id.index()]
    }

    /// Sorted neighbor ids of `id`.
    pub fn neighbors(&self, id: NodeId) -> Result<Vec<NodeId>> {
        self.adjacency
            .get(id.index())
            .cloned()
            .ok_or_else(|| Error::param(format!("node {id} out of range (n={})", self.n)))
    }

    /// Borrowing variant of [`Topology::neighbors`]; panics on an out-of-range id.
    pub fn adj(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id.index()]
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adjacency[id.index()].len()
    }

    pub fn degree_sum(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n).map(NodeId::from)
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if !seen[u.index()] {
                    seen[u.index()] = true;
                    reached += 1;
                    queue.push_back(u.index());
                }
            }
        }
        reached == self.n
    }

    /// Text dump: `n radius seed` header, then one `id x y` line per node.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {:.6} {}\n", self.n, self.radius, self.seed);
        for (i, (x, y)) in self.positions.iter().enumerate() {
            out.push_str(&format!("{i} {x:.6} {y:.6}\n"));
        }
        out
    }
}
