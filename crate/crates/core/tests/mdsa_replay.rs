//! MDSA runs checked against a from-scratch replay and against the protocol
//! invariants.

use std::collections::{BTreeMap, BTreeSet};

use mdsa_core::engine::{run_mdsa_traced, TraceRecord};
use mdsa_core::protocol::MessageKind;
use mdsa_core::seed::rng_for;
use mdsa_core::topology::generate_connected;
use mdsa_core::{run_mdsa, BufferSize, ForwardPolicy, NodeId, SimConfig};
use proptest::prelude::*;
use rand::seq::IndexedRandom;

struct ReplayOutcome {
    buffers: Vec<Vec<(u32, u32)>>, // (source, hops as stored)
    floods: u64,
    unicasts: u64,
}

/// Step-through of the store-and-forward rule with plain vectors.
fn replay(cfg: &SimConfig) -> ReplayOutcome {
    let (t, _) = generate_connected(cfg.n, cfg.radius(), cfg.seed).unwrap();
    let n = t.n();
    let cap = cfg.buffer_capacity();
    let adj: Vec<Vec<u32>> = (0..n)
        .map(|i| t.adj(NodeId(i as u32)).iter().map(|x| x.0).collect())
        .collect();
    let budget: Vec<u32> = adj
        .iter()
        .map(|a| if a.is_empty() { 0 } else { (n / a.len()) as u32 })
        .collect();
    let mut rngs: Vec<_> = (0..n).map(|i| rng_for(cfg.seed, "node", &[i as u64])).collect();
    let mut buffers: Vec<Vec<(u32, u32)>> = (0..n).map(|i| vec![(i as u32, budget[i])]).collect();

    // (receiver, sender, source, hops)
    let mut flight: Vec<(u32, u32, u32, u32)> = Vec::new();
    for i in 0..n {
        for &j in &adj[i] {
            flight.push((j, i as u32, i as u32, budget[i]));
        }
    }
    let floods = flight.len() as u64;
    let mut unicasts = 0;
    while !flight.is_empty() {
        flight.sort_by_key(|m| (m.0, m.1));
        let mut next = Vec::new();
        for (recv, from, src, hops) in flight {
            let r = recv as usize;
            let full = buffers[r].len() >= cap;
            let dup = buffers[r].iter().any(|(s, _)| *s == src);
            if !dup && !full {
                buffers[r].push((src, hops));
            }
            let allowed = !full || cfg.forward_policy == ForwardPolicy::Forward;
            if hops > 0 && allowed {
                let others: Vec<u32> = adj[r].iter().copied().filter(|&v| v != from).collect();
                let to = if others.is_empty() {
                    from
                } else {
                    *others.choose(&mut rngs[r]).unwrap()
                };
                next.push((to, recv, src, hops - 1));
                unicasts += 1;
            }
        }
        flight = next;
    }
    ReplayOutcome {
        buffers,
        floods,
        unicasts,
    }
}

#[test]
fn fifteen_node_run_matches_replay() {
    for seed in 0..10 {
        for policy in [ForwardPolicy::Drop, ForwardPolicy::Forward] {
            for buffer in [BufferSize::Auto, BufferSize::Slots(5), BufferSize::Slots(8)] {
                let cfg = SimConfig {
                    buffer,
                    forward_policy: policy,
                    ..SimConfig::with_n(15, seed)
                };
                let run = run_mdsa(&cfg).unwrap();
                let oracle = replay(&cfg);
                assert_eq!(run.report.flood_messages, oracle.floods);
                assert_eq!(run.report.unicast_messages, oracle.unicasts);
                for (v, expected) in run.nodes.iter().zip(&oracle.buffers) {
                    let got: Vec<(u32, u32)> = v
                        .buffer
                        .slots()
                        .iter()
                        .map(|p| (p.source_id.0, p.hop_count))
                        .collect();
                    assert_eq!(&got, expected, "seed {seed} node {}", v.id);
                }
                let sum_deg = run.topology.degree_sum() as u64;
                let bound: u64 = run
                    .nodes
                    .iter()
                    .map(|v| v.neighbor_ids.len() as u64 * u64::from(v.hop_budget))
                    .sum();
                assert!(run.report.data_messages >= sum_deg);
                assert!(run.report.data_messages <= sum_deg + bound);
            }
        }
    }
}

fn check_invariants(cfg: &SimConfig) -> Result<(), TestCaseError> {
    let mut trace: Vec<TraceRecord> = Vec::new();
    let run = run_mdsa_traced(cfg, &mut trace).unwrap();
    let t = &run.topology;
    let budgets: Vec<u32> = run.nodes.iter().map(|v| v.hop_budget).collect();
    let degrees: Vec<u64> = run.nodes.iter().map(|v| v.neighbor_ids.len() as u64).collect();

    // hop monotonicity and per-source forward bound
    let mut unicasts_per_source: BTreeMap<NodeId, u64> = BTreeMap::new();
    for rec in &trace {
        let p = rec.message.packet.as_ref().unwrap();
        prop_assert!(p.hop_count <= budgets[p.source_id.index()]);
        if rec.message.kind == MessageKind::Unicast {
            *unicasts_per_source.entry(p.source_id).or_default() += 1;
            // hops went down by exactly one since flooding: round 2 carries
            // the full budget, every later round one hop fewer
            prop_assert_eq!(p.hop_count + rec.round - 2, budgets[p.source_id.index()]);
        } else {
            prop_assert_eq!(rec.round, 2);
            prop_assert_eq!(p.hop_count, budgets[p.source_id.index()]);
        }
        prop_assert!(t.adj(rec.message.sender).contains(&rec.message.receiver));
    }
    for (src, count) in &unicasts_per_source {
        prop_assert!(*count <= degrees[src.index()] * u64::from(budgets[src.index()]));
    }
    let total_bound: u64 = degrees
        .iter()
        .zip(&budgets)
        .map(|(d, h)| d * (1 + u64::from(*h)))
        .sum();
    prop_assert!(run.report.data_messages <= total_bound);
    prop_assert_eq!(run.report.flood_messages, t.degree_sum() as u64);

    // buffer safety and slot-0 ownership
    for v in &run.nodes {
        prop_assert!(v.buffer.len() <= v.buffer.capacity());
        let ids: BTreeSet<NodeId> = v.buffer.slots().iter().map(|p| p.source_id).collect();
        prop_assert_eq!(ids.len(), v.buffer.len());
        prop_assert_eq!(v.buffer.slots()[0].source_id, v.id);
    }

    // termination
    let max_budget = budgets.iter().copied().max().unwrap_or(0);
    let delivery_rounds = run.report.rounds_to_quiescence - 1;
    prop_assert!(delivery_rounds <= max_budget + 1);

    // conservation
    let sent: u64 = run.nodes.iter().map(|v| v.data_sent).sum();
    let received: u64 = run.nodes.iter().map(|v| v.data_received).sum();
    prop_assert_eq!(sent, run.report.data_messages);
    prop_assert_eq!(received, sent);
    prop_assert_eq!(trace.len() as u64, received);

    // full-query recovery
    let all: Vec<NodeId> = t.ids().collect();
    prop_assert_eq!(mdsa_core::protocol::collect(&all, &run.nodes).unwrap().len(), t.n());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn protocol_invariants_hold(
        n in 1usize..80,
        seed in any::<u64>(),
        slots in proptest::option::of(1usize..12),
        forward in any::<bool>(),
    ) {
        let cfg = SimConfig {
            buffer: slots.map_or(BufferSize::Auto, BufferSize::Slots),
            forward_policy: if forward { ForwardPolicy::Forward } else { ForwardPolicy::Drop },
            ..SimConfig::with_n(n, seed)
        };
        check_invariants(&cfg)?;
    }

    #[test]
    fn runs_are_deterministic(n in 2usize..60, seed in any::<u64>()) {
        let cfg = SimConfig::with_n(n, seed);
        let a = run_mdsa(&cfg).unwrap();
        let b = run_mdsa(&cfg).unwrap();
        prop_assert_eq!(&a.report, &b.report);
        for (x, y) in a.nodes.iter().zip(&b.nodes) {
            prop_assert_eq!(&x.buffer, &y.buffer);
        }
    }
}
