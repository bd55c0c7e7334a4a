//! Simulation library for flood-then-unicast distributed storage (MDSA) in
//! wireless sensor networks, with a flooding + LT-coded baseline and the
//! experiment harness used to compare them.

pub mod dsa1;
pub mod engine;
pub mod error;
pub mod harness;
pub mod lt;
pub mod protocol;
pub mod seed;
pub mod topology;

pub use engine::{
    apply_failures, measure_recovery, run_dsa1, run_mdsa, Algorithm, BufferSize, MdsaRun,
    Dsa1Run, SimConfig, SimReport, StorageNetwork,
};
pub use error::{Error, Result};
pub use lt::{ideal_soliton, lt_decode, robust_soliton, DegreeDistribution, EncodedSymbol};
pub use protocol::{compute_hop_count, ForwardPolicy, Packet};
pub use topology::{generate_topology, NodeId, Topology};
