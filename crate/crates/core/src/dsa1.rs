//! Flooding + LT-coded storage baseline (a reconstruction of DSA-I).
//!
//! Every source packet is flooded network-wide: each node re-multicasts the
//! first copy it sees of every packet to all of its neighbors, and every
//! per-link delivery counts as one message. Each storage slot of a node draws
//! a degree `d` from the configured distribution and accepts every distinct
//! packet the node sees, in arrival order, with probability `d / N` until `d`
//! packets are taken. The slot stores the XOR of what it accepted. Slots that
//! accept nothing, or that repeat an id set already held, stay empty.

use std::collections::BTreeSet;

use rand::Rng;

use crate::engine::{Algorithm, EnergyModel, Ledger, SimReport};
use crate::error::{Error, Result};
use crate::lt::{DegreeDistribution, EncodedSymbol};
use crate::seed::rng_for;
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dsa1Node {
    pub id: NodeId,
    pub capacity: usize,
    pub symbols: Vec<EncodedSymbol>,
    /// Sources in the order their packets first reached this node.
    pub arrivals: Vec<NodeId>,
    pub alive: bool,
}

#[derive(Debug, Clone)]
pub struct Dsa1Dissemination {
    pub nodes: Vec<Dsa1Node>,
    pub report: SimReport,
}

/// Runs the flood and fills every node's storage slots.
///
/// `payloads[i]` is the sensed datum of node `i`; all must have equal length.
pub fn dsa1_disseminate(
    t: &Topology,
    capacity: usize,
    dist: &DegreeDistribution,
    payloads: &[Vec<u8>],
    seed: u64,
    energy: EnergyModel,
) -> Result<Dsa1Dissemination> {
    let n = t.n();
    if capacity == 0 {
        return Err(Error::param("buffer capacity must be at least 1"));
    }
    if payloads.len() != n {
        return Err(Error::param(format!("{} payloads for {n} nodes", payloads.len())));
    }
    if payloads.iter().any(|p| p.len() != payloads[0].len()) {
        return Err(Error::param("payloads must all have the same length"));
    }
    if !t.is_connected() {
        return Err(Error::param("flooding baseline needs a connected topology"));
    }

    let (arrivals, messages, rounds) = flood_all(t);

    let nodes: Vec<Dsa1Node> = t
        .ids()
        .map(|id| {
            let mut rng = rng_for(seed, "dsa1-node", &[u64::from(id.0)]);
            let seen = &arrivals[id.index()];
            let mut symbols: Vec<EncodedSymbol> = Vec::with_capacity(capacity);
            for _ in 0..capacity {
                let d = dist.sample(&mut rng);
                let p_accept = d as f64 / n as f64;
                let mut taken = Vec::with_capacity(d);
                for &src in seen {
                    if taken.len() == d {
                        break;
                    }
                    if rng.random::<f64>() < p_accept {
                        taken.push(src);
                    }
                }
                let sym = EncodedSymbol::combine(
                    taken.iter().map(|&s| (s, payloads[s.index()].as_slice())),
                );
                if let Some(sym) = sym {
                    if !symbols.iter().any(|s| s.id_set == sym.id_set) {
                        symbols.push(sym);
                    }
                }
            }
            Dsa1Node {
                id,
                capacity,
                symbols,
                arrivals: seen.clone(),
                alive: true,
            }
        })
        .collect();

    let used: Vec<usize> = nodes.iter().map(|v| v.symbols.len()).collect();
    let ledger = Ledger {
        flood_messages: messages,
        unicast_messages: 0,
        data_received: messages,
        init: Default::default(),
    };
    let report = SimReport::build(Algorithm::Dsa1, t, capacity, ledger, energy, used, rounds);
    Ok(Dsa1Dissemination { nodes, report })
}

/// Round-synchronous duplicate-suppressed flood of every source at once.
///
/// Deliveries within a round are processed in ascending
/// (receiver, sender, source) order. Returns per-node arrival order, the
/// number of per-link deliveries and the number of rounds including the
/// initial send.
fn flood_all(t: &Topology) -> (Vec<Vec<NodeId>>, u64, u32) {
    let n = t.n();
    let mut seen = vec![false; n * n];
    let mut arrivals: Vec<Vec<NodeId>> = vec![Vec::with_capacity(n); n];
    // sources each node saw for the first time in the previous round
    let mut fresh: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for v in t.ids() {
        seen[v.index() * n + v.index()] = true;
        arrivals[v.index()].push(v);
        fresh[v.index()].push(v);
    }
    let mut messages = 0u64;
    let mut rounds = 1;
    loop {
        let mut sent_any = false;
        for v in t.ids() {
            messages += (fresh[v.index()].len() * t.degree(v)) as u64;
            sent_any |= !fresh[v.index()].is_empty() && t.degree(v) > 0;
        }
        if !sent_any {
            break;
        }
        rounds += 1;
        let mut next: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for r in t.ids() {
            for &s in t.adj(r) {
                for &src in &fresh[s.index()] {
                    let cell = &mut seen[r.index() * n + src.index()];
                    if !*cell {
                        *cell = true;
                        arrivals[r.index()].push(src);
                        next[r.index()].push(src);
                    }
                }
            }
        }
        for list in &mut next {
            list.sort_unstable();
        }
        fresh = next;
    }
    (arrivals, messages, rounds)
}

/// Distinct symbols held by alive nodes in `query`.
pub fn gather_symbols(nodes: &[Dsa1Node], query: &[NodeId]) -> Result<Vec<EncodedSymbol>> {
    let mut seen: BTreeSet<&BTreeSet<NodeId>> = BTreeSet::new();
    let mut out = Vec::new();
    for &q in query {
        let node = nodes
            .get(q.index())
            .ok_or_else(|| Error::param(format!("queried node {q} out of range")))?;
        if !node.alive {
            return Err(Error::param(format!("queried node {q} is dead")));
        }
        for s in &node.symbols {
            if seen.insert(&s.id_set) {
                out.push(s.clone());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::sensed_payloads;
    use crate::lt::{ideal_soliton, robust_soliton, xor_into};
    use crate::topology::{connectivity_radius, generate_connected, generate_topology};

    #[test]
    fn single_node_stores_own_payload() {
        let t = generate_topology(1, 0.5, 1).unwrap();
        let payloads = sensed_payloads(1, 1, 16);
        let out = dsa1_disseminate(&t, 3, &ideal_soliton(1).unwrap(), &payloads, 1, EnergyModel::default())
            .unwrap();
        assert_eq!(out.report.data_messages, 0);
        assert_eq!(out.nodes[0].symbols.len(), 1);
        assert_eq!(out.nodes[0].symbols[0].payload, payloads[0]);
        assert_eq!(out.nodes[0].symbols[0].degree(), 1);
    }

    #[test]
    fn flood_reaches_everyone_and_counts_links() {
        for seed in 0..10 {
            let (t, _) = generate_connected(40, connectivity_radius(40), seed).unwrap();
            let payloads = sensed_payloads(seed, 40, 8);
            let dist = robust_soliton(40, 0.1, 0.5).unwrap();
            let out = dsa1_disseminate(&t, 4, &dist, &payloads, seed, EnergyModel::default()).unwrap();
            // every node re-multicasts each of the N packets exactly once
            assert_eq!(out.report.data_messages as usize, 40 * t.degree_sum());
            for v in &out.nodes {
                let set: BTreeSet<NodeId> = v.arrivals.iter().copied().collect();
                assert_eq!(set.len(), 40);
                assert_eq!(v.arrivals[0], v.id);
                assert!(v.symbols.len() <= 4);
                for s in &v.symbols {
                    let mut acc = vec![0u8; 8];
                    for id in &s.id_set {
                        xor_into(&mut acc, &payloads[id.index()]);
                    }
                    assert_eq!(acc, s.payload);
                }
            }
        }
    }

    #[test]
    fn arrival_order_follows_hop_distance() {
        let (t, _) = generate_connected(25, connectivity_radius(25), 4).unwrap();
        let payloads = sensed_payloads(4, 25, 4);
        let out = dsa1_disseminate(&t, 1, &ideal_soliton(25).unwrap(), &payloads, 4, EnergyModel::default())
            .unwrap();
        // BFS distances from each node must be non-decreasing along its arrival list
        for v in &out.nodes {
            let mut dist = vec![usize::MAX; 25];
            dist[v.id.index()] = 0;
            let mut q = std::collections::VecDeque::from([v.id]);
            while let Some(u) = q.pop_front() {
                for &w in t.adj(u) {
                    if dist[w.index()] == usize::MAX {
                        dist[w.index()] = dist[u.index()] + 1;
                        q.push_back(w);
                    }
                }
            }
            let d: Vec<usize> = v.arrivals.iter().map(|a| dist[a.index()]).collect();
            assert!(d.windows(2).all(|w| w[0] <= w[1]), "{d:?}");
        }
    }

    #[test]
    fn rejects_disconnected_topology() {
        let t = (0..)
            .map(|s| generate_topology(2, 0.01, s).unwrap())
            .find(|t| !t.is_connected())
            .unwrap();
        let r = dsa1_disseminate(&t, 2, &ideal_soliton(2).unwrap(), &sensed_payloads(0, 2, 4), 0, EnergyModel::default());
        assert!(matches!(r, Err(Error::Param(_))));
    }
}
