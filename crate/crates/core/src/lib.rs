//! Process mining toolkit: event logs, control-flow discovery, and
//! conformance checking.
//!
//! The crate covers the classic pipeline end to end:
//!
//! 1. [`event_log`] — XES import/export and the log object model.
//! 2. [`stats`] — control-flow statistics: activity frequencies,
//!    directly-follows relations, variants and variant-based filtering.
//! 3. [`discovery`] — alpha, alpha-plus, heuristic and inductive miners,
//!    all producing accepting Petri nets.
//! 4. [`petri`] — the Petri-net model with firing semantics, PNML and DOT
//!    export.
//! 5. [`conformance`] — token-based replay, fitness, precision, simplicity
//!    and generalization, plus a side-by-side evaluation of all miners.

pub mod conformance;
pub mod discovery;
pub mod error;
pub mod event_log;
pub mod petri;
pub mod stats;
mod xml;

pub use conformance::{
    evaluate, fitness, generalization, precision_escaping_edges, replay_sequence,
    simplicity_arc_degree, token_replay, trace_fitness, EvaluationReport, EvaluationRow,
    FiringStep, Metric, PrecisionParams, ReplayParams, ReplayResult, VariantReplay,
};
pub use discovery::{
    alpha_miner, alpha_plus_miner, footprint, heuristic_miner, heuristic_net_to_petri,
    inductive_miner, tree_to_petri, DependencyGraph, FootprintMatrix, Miner, MinerParams,
    ProcessTree, Relation,
};
pub use error::{Error, Result};
pub use event_log::{
    activity_sequence, log_to_json, parse_xes, parse_xes_bytes, parse_xes_file, write_xes,
    write_xes_gz, AttributeMap, AttributeValue, Classifier, Event, EventLog, EventStream,
    Extension, ParseMode, Timestamp, Trace, XesImport,
};
pub use petri::{AcceptingPetriNet, Marking, PetriNet};
