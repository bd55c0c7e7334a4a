//! Round-synchronous simulation driver and accounting.
//!
//! A run executes neighbor discovery, packet preparation and flooding, then
//! delivers messages in rounds: everything sent in round `r` is processed in
//! round `r + 1`, sorted by `(receiver, sender)`. There is no loss model, so
//! every sent message is received exactly once.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::dsa1::{dsa1_disseminate, gather_symbols, Dsa1Node};
use crate::error::{Error, Result};
use crate::lt::{lt_decode, robust_soliton};
use crate::protocol::{
    collect, discover_neighbors, flood_packet, on_receive, prepare_packet, ForwardPolicy,
    InitCounts, Message, NodeState,
};
use crate::seed::rng_for;
use crate::topology::{connectivity_radius, generate_connected, NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Mdsa,
    Dsa1,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mdsa" => Ok(Algorithm::Mdsa),
            "dsa1" | "dsa-i" => Ok(Algorithm::Dsa1),
            other => Err(Error::param(format!(
                "unknown algorithm {other:?} (expected mdsa|dsa1)"
            ))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Mdsa => "mdsa",
            Algorithm::Dsa1 => "dsa1",
        })
    }
}

/// Buffer slots per node: fixed, or 10% of the network size (at least 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BufferSize {
    #[default]
    Auto,
    Slots(usize),
}

impl BufferSize {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            BufferSize::Auto => ((0.10 * n as f64).round() as usize).max(1),
            BufferSize::Slots(m) => m,
        }
    }
}

impl FromStr for BufferSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(BufferSize::Auto);
        }
        s.parse::<usize>()
            .map(BufferSize::Slots)
            .map_err(|_| Error::param(format!("buffer must be `auto` or a slot count, got {s:?}")))
    }
}

impl fmt::Display for BufferSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BufferSize::Auto => f.write_str("auto"),
            BufferSize::Slots(m) => write!(f, "{m}"),
        }
    }
}

/// Abstract energy units charged per message sent and per message received.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    pub tx: f64,
    pub rx: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        EnergyModel { tx: 1.0, rx: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    /// Communication radius; `None` picks [`connectivity_radius`].
    pub radius: Option<f64>,
    pub buffer: BufferSize,
    pub forward_policy: ForwardPolicy,
    pub failure_fraction: f64,
    pub seed: u64,
    pub energy_tx: f64,
    pub energy_rx: f64,
    pub payload_len: usize,
    pub lt_c: f64,
    pub lt_delta: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 50,
            radius: None,
            buffer: BufferSize::Auto,
            forward_policy: ForwardPolicy::Drop,
            failure_fraction: 0.0,
            seed: 1,
            energy_tx: 1.0,
            energy_rx: 0.5,
            payload_len: 16,
            lt_c: 0.1,
            lt_delta: 0.5,
        }
    }
}

impl SimConfig {
    pub fn with_n(n: usize, seed: u64) -> Self {
        SimConfig {
            n,
            seed,
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r <= std::f64::consts::SQRT_2) {
                return Err(Error::param(format!("radius must be in (0, sqrt(2)], got {r}")));
            }
        }
        if self.buffer == BufferSize::Slots(0) {
            return Err(Error::param("buffer must hold at least 1 slot"));
        }
        if !(0.0..1.0).contains(&self.failure_fraction) {
            return Err(Error::param(format!(
                "failure_fraction must be in [0, 1), got {}",
                self.failure_fraction
            )));
        }
        for (name, v) in [("energy_tx", self.energy_tx), ("energy_rx", self.energy_rx)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} must be a finite value >= 0, got {v}")));
            }
        }
        if self.payload_len == 0 {
            return Err(Error::param("payload_len must be at least 1"));
        }
        if !(self.lt_c > 0.0) {
            return Err(Error::param("lt_c must be positive"));
        }
        if !(self.lt_delta > 0.0 && self.lt_delta < 1.0) {
            return Err(Error::param("lt_delta must be in (0, 1)"));
        }
        Ok(())
    }

    pub fn buffer_capacity(&self) -> usize {
        self.buffer.resolve(self.n)
    }

    pub fn radius(&self) -> f64 {
        self.radius.unwrap_or_else(|| connectivity_radius(self.n))
    }

    pub fn energy(&self) -> EnergyModel {
        EnergyModel {
            tx: self.energy_tx,
            rx: self.energy_rx,
        }
    }
}

/// Message tallies gathered during a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Ledger {
    pub flood_messages: u64,
    pub unicast_messages: u64,
    pub data_received: u64,
    pub init: InitCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub algorithm: Algorithm,
    pub n: usize,
    pub radius: f64,
    pub topology_seed: u64,
    pub topology_retries: u32,
    pub buffer_capacity: usize,
    /// Flood + Unicast sends (per-link deliveries for the baseline).
    pub data_messages: u64,
    pub flood_messages: u64,
    pub unicast_messages: u64,
    pub data_received: u64,
    /// Query broadcasts plus replies.
    pub init_messages: u64,
    /// Query deliveries plus replies received.
    pub init_received: u64,
    pub energy_total: f64,
    pub buffer_used: Vec<usize>,
    pub percent_unused: f64,
    pub rounds_to_quiescence: u32,
}

impl SimReport {
    pub fn build(
        algorithm: Algorithm,
        t: &Topology,
        capacity: usize,
        ledger: Ledger,
        energy: EnergyModel,
        buffer_used: Vec<usize>,
        rounds: u32,
    ) -> Self {
        let data_messages = ledger.flood_messages + ledger.unicast_messages;
        let init_messages = ledger.init.queries + ledger.init.replies;
        let init_received = ledger.init.query_deliveries + ledger.init.replies;
        let energy_total = (data_messages + init_messages) as f64 * energy.tx
            + (ledger.data_received + init_received) as f64 * energy.rx;
        let total_slots = capacity * buffer_used.len();
        let free: usize = buffer_used.iter().map(|&u| capacity - u).sum();
        SimReport {
            algorithm,
            n: t.n(),
            radius: t.radius(),
            topology_seed: t.seed(),
            topology_retries: 0,
            buffer_capacity: capacity,
            data_messages,
            flood_messages: ledger.flood_messages,
            unicast_messages: ledger.unicast_messages,
            data_received: ledger.data_received,
            init_messages,
            init_received,
            energy_total,
            buffer_used,
            percent_unused: 100.0 * free as f64 / total_slots as f64,
            rounds_to_quiescence: rounds,
        }
    }
}

/// One delivered data message, rendered as
/// `round=<r> kind=<k> from=<i> to=<j> src=<s> hops=<h>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub round: u32,
    pub message: Message,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (src, hops) = self
            .message
            .packet
            .as_ref()
            .map(|p| (p.source_id.to_string(), p.hop_count.to_string()))
            .unwrap_or_else(|| ("-".into(), "-".into()));
        write!(
            f,
            "round={} kind={} from={} to={} src={} hops={}",
            self.round, self.message.kind, self.message.sender, self.message.receiver, src, hops
        )
    }
}

/// Deterministic sensed data: `len` bytes per node drawn from the run seed.
pub fn sensed_payloads(seed: u64, n: usize, len: usize) -> Vec<Vec<u8>> {
    (0..n)
        .map(|i| {
            let mut rng = rng_for(seed, "payload", &[i as u64]);
            (0..len).map(|_| rng.random::<u8>()).collect()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MdsaRun {
    pub topology: Topology,
    pub nodes: Vec<NodeState>,
    pub report: SimReport,
}

#[derive(Debug, Clone)]
pub struct Dsa1Run {
    pub topology: Topology,
    pub nodes: Vec<Dsa1Node>,
    pub report: SimReport,
}

pub fn run_mdsa(cfg: &SimConfig) -> Result<MdsaRun> {
    run_mdsa_inner(cfg, None)
}

/// Like [`run_mdsa`] but records every data delivery.
pub fn run_mdsa_traced(cfg: &SimConfig, trace: &mut Vec<TraceRecord>) -> Result<MdsaRun> {
    run_mdsa_inner(cfg, Some(trace))
}

fn run_mdsa_inner(cfg: &SimConfig, mut trace: Option<&mut Vec<TraceRecord>>) -> Result<MdsaRun> {
    cfg.validate()?;
    let (topology, retries) = generate_connected(cfg.n, cfg.radius(), cfg.seed)?;
    let run = disseminate_mdsa(&topology, cfg, trace.as_deref_mut())?;
    let mut report = run.1;
    report.topology_retries = retries;
    Ok(MdsaRun {
        topology,
        nodes: run.0,
        report,
    })
}

/// MDSA dissemination on a given topology.
pub fn disseminate_mdsa(
    topology: &Topology,
    cfg: &SimConfig,
    mut trace: Option<&mut Vec<TraceRecord>>,
) -> Result<(Vec<NodeState>, SimReport)> {
    let capacity = cfg.buffer_capacity();
    let payloads = sensed_payloads(cfg.seed, topology.n(), cfg.payload_len);
    let mut nodes = topology
        .ids()
        .zip(payloads)
        .map(|(id, payload)| {
            NodeState::new(id, capacity, payload, rng_for(cfg.seed, "node", &[u64::from(id.0)]))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ledger = Ledger::default();
    for node in nodes.iter_mut() {
        ledger.init += discover_neighbors(node, topology)?;
    }
    for node in nodes.iter_mut() {
        prepare_packet(node);
    }
    let mut in_flight: Vec<Message> = Vec::new();
    for node in nodes.iter_mut() {
        in_flight.extend(flood_packet(node));
    }
    ledger.flood_messages = in_flight.len() as u64;

    let max_budget = nodes.iter().map(|v| v.hop_budget).max().unwrap_or(0);
    let round_limit = max_budget + 2;
    let mut round = 1u32;
    while !in_flight.is_empty() {
        round += 1;
        if round > round_limit {
            return Err(Error::Invariant(format!(
                "messages still in flight after {round_limit} rounds"
            )));
        }
        in_flight.sort_by_key(|m| (m.receiver, m.sender));
        let mut next = Vec::new();
        for msg in in_flight.drain(..) {
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceRecord {
                    round,
                    message: msg.clone(),
                });
            }
            let receiver = msg.receiver.index();
            ledger.data_received += 1;
            if let Some(out) = on_receive(&mut nodes[receiver], msg, cfg.forward_policy)? {
                ledger.unicast_messages += 1;
                next.push(out);
            }
        }
        in_flight = next;
    }

    let used = nodes.iter().map(|v| v.buffer.len()).collect();
    let report = SimReport::build(
        Algorithm::Mdsa,
        topology,
        capacity,
        ledger,
        cfg.energy(),
        used,
        round,
    );
    Ok((nodes, report))
}

pub fn run_dsa1(cfg: &SimConfig) -> Result<Dsa1Run> {
    cfg.validate()?;
    let (topology, retries) = generate_connected(cfg.n, cfg.radius(), cfg.seed)?;
    let dist = robust_soliton(cfg.n, cfg.lt_c, cfg.lt_delta)?;
    let payloads = sensed_payloads(cfg.seed, cfg.n, cfg.payload_len);
    let out = dsa1_disseminate(
        &topology,
        cfg.buffer_capacity(),
        &dist,
        &payloads,
        cfg.seed,
        cfg.energy(),
    )?;
    let mut report = out.report;
    report.topology_retries = retries;
    Ok(Dsa1Run {
        topology,
        nodes: out.nodes,
        report,
    })
}

pub trait Liveness {
    fn is_alive(&self) -> bool;
    fn set_alive(&mut self, alive: bool);
}

impl Liveness for NodeState {
    fn is_alive(&self) -> bool {
        self.alive
    }
    fn set_alive(&mut self, alive: bool) {
        self.alive = alive;
    }
}

impl Liveness for Dsa1Node {
    fn is_alive(&self) -> bool {
        self.alive
    }
    fn set_alive(&mut self, alive: bool) {
        self.alive = alive;
    }
}

/// Marks `floor(fraction * n)` uniformly chosen nodes dead; returns them sorted.
pub fn apply_failures<T: Liveness>(nodes: &mut [T], fraction: f64, seed: u64) -> Result<Vec<NodeId>> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::param(format!("failure fraction must be in [0, 1), got {fraction}")));
    }
    let count = (fraction * nodes.len() as f64).floor() as usize;
    let mut rng = rng_for(seed, "failures", &[]);
    let mut dead: Vec<usize> = rand::seq::index::sample(&mut rng, nodes.len(), count).into_vec();
    dead.sort_unstable();
    for &i in &dead {
        nodes[i].set_alive(false);
    }
    Ok(dead.into_iter().map(NodeId::from).collect())
}

/// A disseminated network that can answer recovery queries.
pub trait StorageNetwork {
    fn node_count(&self) -> usize;
    fn alive_ids(&self) -> Vec<NodeId>;
    /// Number of distinct sources recoverable from the queried nodes.
    fn recovered_count(&self, query: &[NodeId]) -> Result<usize>;
}

impl StorageNetwork for MdsaRun {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }
    fn alive_ids(&self) -> Vec<NodeId> {
        self.nodes.iter().filter(|v| v.alive).map(|v| v.id).collect()
    }
    fn recovered_count(&self, query: &[NodeId]) -> Result<usize> {
        Ok(collect(query, &self.nodes)?.len())
    }
}

impl StorageNetwork for Dsa1Run {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }
    fn alive_ids(&self) -> Vec<NodeId> {
        self.nodes.iter().filter(|v| v.alive).map(|v| v.id).collect()
    }
    fn recovered_count(&self, query: &[NodeId]) -> Result<usize> {
        let symbols = gather_symbols(&self.nodes, query)?;
        Ok(lt_decode(&symbols, self.nodes.len())?.len())
    }
}

/// Nodes queried at `ratio`: `ceil(ratio * n)`, tolerant of float noise.
pub fn query_size(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64 - 1e-9).ceil().max(1.0) as usize).min(n)
}

/// Queries a uniform sample of alive nodes and returns the percentage of all
/// `n` sources that can be recovered from them.
pub fn measure_recovery<S: StorageNetwork>(net: &S, query_ratio: f64, seed: u64) -> Result<f64> {
    if !(query_ratio > 0.0 && query_ratio <= 1.0) {
        return Err(Error::param(format!("query ratio must be in (0, 1], got {query_ratio}")));
    }
    let n = net.node_count();
    let needed = query_size(n, query_ratio);
    let alive = net.alive_ids();
    if alive.len() < needed {
        return Err(Error::InsufficientAlive {
            needed,
            alive: alive.len(),
        });
    }
    let mut rng = rng_for(seed, "query", &[]);
    let mut query: Vec<NodeId> = rand::seq::index::sample(&mut rng, alive.len(), needed)
        .iter()
        .map(|i| alive[i])
        .collect();
    query.sort_unstable();
    Ok(100.0 * net.recovered_count(&query)? as f64 / n as f64)
}
