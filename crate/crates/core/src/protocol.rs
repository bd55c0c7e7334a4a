//! Per-node MDSA state machine: neighbor discovery, packet preparation,
//! flooding, and store-and-unicast forwarding.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;

use crate::error::{Error, Result};
use crate::seed::SimRng;
use crate::topology::{NodeId, Topology};

/// Freshness marker carried by every packet. Stored only; nothing in the
/// dissemination flow sets `Updated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Flag {
    #[default]
    Old,
    Updated,
}

impl Flag {
    pub fn bit(self) -> u8 {
        match self {
            Flag::Old => 0,
            Flag::Updated => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub source_id: NodeId,
    pub payload: Vec<u8>,
    /// Remaining unicast hops.
    pub hop_count: u32,
    pub flag: Flag,
}

impl fmt::Display for Packet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "src={} hops={} flag={} len={}",
            self.source_id,
            self.hop_count,
            self.flag.bit(),
            self.payload.len()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreOutcome {
    Stored,
    Duplicate,
    Full,
}

/// Fixed-slot packet store holding at most one packet per source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Buffer {
    capacity: usize,
    slots: Vec<Packet>,
}

impl Buffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::param("buffer capacity must be at least 1"));
        }
        Ok(Buffer {
            capacity,
            slots: Vec::with_capacity(capacity),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.slots.len() >= self.capacity
    }

    pub fn free(&self) -> usize {
        self.capacity - self.slots.len()
    }

    pub fn slots(&self) -> &[Packet] {
        &self.slots
    }

    pub fn contains(&self, source: NodeId) -> bool {
        self.slots.iter().any(|p| p.source_id == source)
    }

    pub fn try_store(&mut self, packet: Packet) -> StoreOutcome {
        if self.contains(packet.source_id) {
            StoreOutcome::Duplicate
        } else if self.is_full() {
            StoreOutcome::Full
        } else {
            self.slots.push(packet);
            StoreOutcome::Stored
        }
    }

    /// Puts `packet` in slot 0, evicting from the tail if that would overflow.
    fn put_first(&mut self, packet: Packet) {
        self.slots.retain(|p| p.source_id != packet.source_id);
        self.slots.insert(0, packet);
        self.slots.truncate(self.capacity);
    }
}

/// What to do with a forwardable packet that arrives at a full buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForwardPolicy {
    /// Cancel the whole operation: no store and no forward.
    #[default]
    Drop,
    /// Skip the store but still forward.
    Forward,
}

impl FromStr for ForwardPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "drop" => Ok(ForwardPolicy::Drop),
            "forward" => Ok(ForwardPolicy::Forward),
            other => Err(Error::param(format!(
                "unknown forward policy {other:?} (expected drop|forward)"
            ))),
        }
    }
}

impl fmt::Display for ForwardPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForwardPolicy::Drop => "drop",
            ForwardPolicy::Forward => "forward",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MessageKind {
    InitQuery,
    InitReply,
    Flood,
    Unicast,
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MessageKind::InitQuery => "init_query",
            MessageKind::InitReply => "init_reply",
            MessageKind::Flood => "flood",
            MessageKind::Unicast => "unicast",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub kind: MessageKind,
    pub sender: NodeId,
    pub receiver: NodeId,
    pub packet: Option<Packet>,
}

impl Message {
    pub fn flood(sender: NodeId, receiver: NodeId, packet: Packet) -> Self {
        Message {
            kind: MessageKind::Flood,
            sender,
            receiver,
            packet: Some(packet),
        }
    }

    pub fn unicast(sender: NodeId, receiver: NodeId, packet: Packet) -> Self {
        Message {
            kind: MessageKind::Unicast,
            sender,
            receiver,
            packet: Some(packet),
        }
    }

    pub fn is_data(&self) -> bool {
        matches!(self.kind, MessageKind::Flood | MessageKind::Unicast)
    }
}

/// Message tallies from one node's neighbor discovery.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InitCounts {
    /// Query broadcasts sent (one per node, even when nobody hears it).
    pub queries: u64,
    /// Per-link deliveries of the query broadcast.
    pub query_deliveries: u64,
    /// Replies received, one from each neighbor.
    pub replies: u64,
}

impl std::ops::AddAssign for InitCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.queries += rhs.queries;
        self.query_deliveries += rhs.query_deliveries;
        self.replies += rhs.replies;
    }
}

#[derive(Debug, Clone)]
pub struct NodeState {
    pub id: NodeId,
    pub neighbor_ids: Vec<NodeId>,
    pub buffer: Buffer,
    pub hop_budget: u32,
    /// The sensed datum this node disseminates.
    pub payload: Vec<u8>,
    pub rng: SimRng,
    pub alive: bool,
    pub data_sent: u64,
    pub data_received: u64,
}

impl NodeState {
    pub fn new(id: NodeId, capacity: usize, payload: Vec<u8>, rng: SimRng) -> Result<Self> {
        Ok(NodeState {
            id,
            neighbor_ids: Vec::new(),
            buffer: Buffer::new(capacity)?,
            hop_budget: 0,
            payload,
            rng,
            alive: true,
            data_sent: 0,
            data_received: 0,
        })
    }
}

/// `floor(n_total / n_neighbors)`, or 0 for an isolated node.
pub fn compute_hop_count(n_total: usize, n_neighbors: usize) -> Result<u32> {
    if n_total == 0 {
        return Err(Error::param("total node count must be at least 1"));
    }
    if n_neighbors == 0 {
        return Ok(0);
    }
    u32::try_from(n_total / n_neighbors).map_err(|_| Error::param("hop count overflows u32"))
}

/// Query broadcast and reply collection; fills in neighbors and the hop budget.
pub fn discover_neighbors(node: &mut NodeState, t: &Topology) -> Result<InitCounts> {
    node.neighbor_ids = t.neighbors(node.id)?;
    node.hop_budget = compute_hop_count(t.n(), node.neighbor_ids.len())?;
    let degree = node.neighbor_ids.len() as u64;
    Ok(InitCounts {
        queries: 1,
        query_deliveries: degree,
        replies: degree,
    })
}

/// Builds the node's own packet and stores it in slot 0.
pub fn prepare_packet(node: &mut NodeState) -> Packet {
    let packet = Packet {
        source_id: node.id,
        payload: node.payload.clone(),
        hop_count: node.hop_budget,
        flag: Flag::Old,
    };
    node.buffer.put_first(packet.clone());
    packet
}

/// One Flood message per neighbor, each carrying the node's own packet.
pub fn flood_packet(node: &mut NodeState) -> Vec<Message> {
    let packet = Packet {
        source_id: node.id,
        payload: node.payload.clone(),
        hop_count: node.hop_budget,
        flag: Flag::Old,
    };
    let out: Vec<Message> = node
        .neighbor_ids
        .iter()
        .map(|&to| Message::flood(node.id, to, packet.clone()))
        .collect();
    node.data_sent += out.len() as u64;
    out
}

/// Handles one Flood or Unicast delivery.
///
/// A packet is stored unless it duplicates a buffered source or the buffer is
/// full. It is forwarded to one random neighbor (other than the sender when
/// possible) with one hop fewer while it has hops left, unless the buffer was
/// full on arrival and the policy is [`ForwardPolicy::Drop`].
pub fn on_receive(
    node: &mut NodeState,
    msg: Message,
    policy: ForwardPolicy,
) -> Result<Option<Message>> {
    if !node.alive {
        return Err(Error::Invariant(format!(
            "delivery to dead node {}",
            node.id
        )));
    }
    if msg.receiver != node.id {
        return Err(Error::Invariant(format!(
            "message for {} delivered to {}",
            msg.receiver, node.id
        )));
    }
    let packet = match (msg.kind, msg.packet) {
        (MessageKind::Flood | MessageKind::Unicast, Some(p)) => p,
        (kind, _) => {
            return Err(Error::param(format!(
                "malformed data message of kind {kind} at node {}",
                node.id
            )))
        }
    };
    node.data_received += 1;

    let was_full = node.buffer.is_full();
    let hops = packet.hop_count;
    let forward_copy = (hops > 0 && (!was_full || policy == ForwardPolicy::Forward)).then(|| {
        Packet {
            hop_count: hops - 1,
            ..packet.clone()
        }
    });
    node.buffer.try_store(packet);

    let Some(fwd) = forward_copy else {
        return Ok(None);
    };
    let candidates: Vec<NodeId> = node
        .neighbor_ids
        .iter()
        .copied()
        .filter(|&v| v != msg.sender)
        .collect();
    let target = if candidates.is_empty() {
        msg.sender
    } else {
        *candidates
            .choose(&mut node.rng)
            .expect("candidate list is non-empty")
    };
    node.data_sent += 1;
    Ok(Some(Message::unicast(node.id, target, fwd)))
}

/// Union of the buffered `(source, payload)` pairs of the queried nodes.
pub fn collect(query_set: &[NodeId], nodes: &[NodeState]) -> Result<BTreeMap<NodeId, Vec<u8>>> {
    let mut recovered = BTreeMap::new();
    for &q in query_set {
        let node = nodes
            .get(q.index())
            .ok_or_else(|| Error::param(format!("queried node {q} out of range")))?;
        if !node.alive {
            return Err(Error::param(format!("queried node {q} is dead")));
        }
        for p in node.buffer.slots() {
            recovered
                .entry(p.source_id)
                .or_insert_with(|| p.payload.clone());
        }
    }
    Ok(recovered)
}
