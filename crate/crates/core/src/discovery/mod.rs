//! Control-flow discovery: the footprint matrix and four miners (alpha,
//! alpha-plus, heuristic, inductive), all ultimately producing an accepting
//! Petri net.
//!
//! Every miner is a pure function of its inputs: identical logs and
//! parameters produce identical nets, including node identifiers.

mod alpha;
mod heuristic;
mod inductive;

pub use alpha::{alpha_miner, alpha_plus_miner};
pub use heuristic::{heuristic_miner, heuristic_net_to_petri, DependencyGraph};
pub use inductive::{inductive_miner, tree_to_petri, ProcessTree};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::event_log::{Classifier, EventLog};
use crate::petri::{AcceptingPetriNet, PetriNet};
use crate::stats::{directly_follows, DirectlyFollowsGraph};

/// How two activities relate in the footprint matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// a → b: b directly follows a, never the reverse.
    CausalRight,
    /// a ← b: a directly follows b, never the reverse.
    CausalLeft,
    /// a ∥ b: both directions observed.
    Parallel,
    /// a # b: neither direction observed.
    Unrelated,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::CausalRight => "→",
            Relation::CausalLeft => "←",
            Relation::Parallel => "∥",
            Relation::Unrelated => "#",
        }
    }
}

/// The footprint of a log: one of four relations per ordered activity pair,
/// derived from directly-follows counts, plus the observed start/end
/// activity sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FootprintMatrix {
    alphabet: Vec<String>,
    /// Row-major n×n; entry (i, j) relates alphabet[i] to alphabet[j].
    relations: Vec<Relation>,
    starts: BTreeSet<String>,
    ends: BTreeSet<String>,
}

/// Compute the footprint matrix of a log.
pub fn footprint(log: &EventLog, classifier: &Classifier) -> Result<FootprintMatrix> {
    Ok(FootprintMatrix::from_dfg(&directly_follows(log, classifier)?))
}

impl FootprintMatrix {
    pub fn from_dfg(dfg: &DirectlyFollowsGraph) -> FootprintMatrix {
        let alphabet: Vec<String> = dfg.activities.keys().cloned().collect();
        let n = alphabet.len();
        let mut relations = vec![Relation::Unrelated; n * n];
        for (i, a) in alphabet.iter().enumerate() {
            for (j, b) in alphabet.iter().enumerate() {
                let ab = dfg.edge(a, b) > 0;
                let ba = dfg.edge(b, a) > 0;
                relations[i * n + j] = match (ab, ba) {
                    (true, true) => Relation::Parallel,
                    (true, false) => Relation::CausalRight,
                    (false, true) => Relation::CausalLeft,
                    (false, false) => Relation::Unrelated,
                };
            }
        }
        FootprintMatrix {
            alphabet,
            relations,
            starts: dfg.starts.keys().cloned().collect(),
            ends: dfg.ends.keys().cloned().collect(),
        }
    }

    /// Sorted activity labels.
    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn index_of(&self, activity: &str) -> Option<usize> {
        self.alphabet.binary_search_by(|a| a.as_str().cmp(activity)).ok()
    }

    pub fn relation(&self, a: &str, b: &str) -> Option<Relation> {
        Some(self.relation_at(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn relation_at(&self, i: usize, j: usize) -> Relation {
        self.relations[i * self.alphabet.len() + j]
    }

    /// Activities observed as the first event of a trace.
    pub fn starts(&self) -> &BTreeSet<String> {
        &self.starts
    }

    /// Activities observed as the last event of a trace.
    pub fn ends(&self) -> &BTreeSet<String> {
        &self.ends
    }
}

impl fmt::Display for FootprintMatrix {
    /// Render the matrix as an aligned table, rows/columns in alphabet order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.alphabet.iter().map(|a| a.chars().count()).max().unwrap_or(1);
        write!(f, "{:width$}", "")?;
        for b in &self.alphabet {
            write!(f, " {b:>width$}")?;
        }
        writeln!(f)?;
        for (i, a) in self.alphabet.iter().enumerate() {
            write!(f, "{a:width$}")?;
            for j in 0..self.alphabet.len() {
                write!(f, " {:>width$}", self.relation_at(i, j).symbol())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Tunable miner parameters. Only the heuristic miner reads them today, but
/// they travel with every discovery call so the CLI has one knob surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinerParams {
    /// Minimum dependency measure for a heuristic edge to be kept.
    pub dependency_threshold: f64,
    /// Minimum AND-measure for two successors to count as concurrent.
    pub and_threshold: f64,
    /// Minimum length-two-loop measure for a loop pair to be kept.
    pub loop2_threshold: f64,
    /// Keep each activity's strongest incoming and outgoing dependency edge
    /// even below the threshold.
    pub all_connected: bool,
}

impl Default for MinerParams {
    fn default() -> Self {
        MinerParams {
            dependency_threshold: 0.5,
            and_threshold: 0.65,
            loop2_threshold: 0.5,
            all_connected: true,
        }
    }
}

impl MinerParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.dependency_threshold) {
            return Err(Error::InvalidInput(format!(
                "dependency_threshold must be in [0,1], got {}",
                self.dependency_threshold
            )));
        }
        Ok(())
    }
}

/// The four discovery algorithms, in canonical (evaluation-row) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Miner {
    Alpha,
    AlphaPlus,
    Inductive,
    Heuristic,
}

impl Miner {
    /// All miners in the fixed evaluation-row order.
    pub fn all() -> [Miner; 4] {
        [Miner::Alpha, Miner::AlphaPlus, Miner::Inductive, Miner::Heuristic]
    }

    pub fn name(self) -> &'static str {
        match self {
            Miner::Alpha => "alpha",
            Miner::AlphaPlus => "alpha-plus",
            Miner::Inductive => "inductive",
            Miner::Heuristic => "heuristic",
        }
    }

    /// Run the miner end to end, converting intermediate representations
    /// (dependency graph, process tree) into an accepting Petri net.
    pub fn discover(
        self,
        log: &EventLog,
        classifier: &Classifier,
        params: &MinerParams,
    ) -> Result<AcceptingPetriNet> {
        params.validate()?;
        match self {
            Miner::Alpha => alpha_miner(log, classifier),
            Miner::AlphaPlus => alpha_plus_miner(log, classifier),
            Miner::Inductive => Ok(tree_to_petri(&inductive_miner(log, classifier)?)),
            Miner::Heuristic => {
                heuristic_net_to_petri(&heuristic_miner(log, classifier, params)?)
            }
        }
    }
}

impl fmt::Display for Miner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Miner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Miner> {
        match s.to_ascii_lowercase().as_str() {
            "alpha" => Ok(Miner::Alpha),
            "alpha-plus" | "alpha+" | "alphaplus" => Ok(Miner::AlphaPlus),
            "inductive" => Ok(Miner::Inductive),
            "heuristic" | "heuristics" => Ok(Miner::Heuristic),
            other => Err(Error::InvalidInput(format!(
                "unknown miner {other:?}; valid miners: alpha, alpha-plus, heuristic, inductive"
            ))),
        }
    }
}

/// Pick `candidate` if free in `net`, else append underscores until unique.
/// Keeps generated node ids stable while tolerating activity labels that
/// collide with structural names like "source".
pub(crate) fn fresh_id(net: &PetriNet, candidate: String) -> String {
    let mut id = candidate;
    while net.is_place(&id) || net.is_transition(&id) {
        id.push('_');
    }
    id
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l1() -> EventLog {
        EventLog::from_activity_sequences(vec![
            vec!["a", "b", "d"],
            vec!["a", "c", "d"],
            vec!["a", "b", "d"],
            vec!["a", "c", "d"],
            vec!["a", "b", "d"],
        ])
    }

    #[test]
    fn footprint_of_l1_matches_hand_enumeration() {
        let fp = footprint(&l1(), &Classifier::default()).unwrap();
        assert_eq!(fp.alphabet(), ["a", "b", "c", "d"]);
        let expect = [
            ("a", "b", Relation::CausalRight),
            ("a", "c", Relation::CausalRight),
            ("b", "d", Relation::CausalRight),
            ("c", "d", Relation::CausalRight),
            ("b", "a", Relation::CausalLeft),
            ("c", "a", Relation::CausalLeft),
            ("d", "b", Relation::CausalLeft),
            ("d", "c", Relation::CausalLeft),
            ("b", "c", Relation::Unrelated),
            ("c", "b", Relation::Unrelated),
            ("a", "d", Relation::Unrelated),
            ("d", "a", Relation::Unrelated),
            ("a", "a", Relation::Unrelated),
            ("b", "b", Relation::Unrelated),
            ("c", "c", Relation::Unrelated),
            ("d", "d", Relation::Unrelated),
        ];
        for (a, b, want) in expect {
            assert_eq!(fp.relation(a, b), Some(want), "relation({a},{b})");
        }
        assert_eq!(fp.starts().iter().collect::<Vec<_>>(), ["a"]);
        assert_eq!(fp.ends().iter().collect::<Vec<_>>(), ["d"]);
    }

    #[test]
    fn footprint_parallel_when_both_orders_observed() {
        let log = EventLog::from_activity_sequences(vec![vec!["a", "b"], vec!["b", "a"]]);
        let fp = footprint(&log, &Classifier::default()).unwrap();
        assert_eq!(fp.relation("a", "b"), Some(Relation::Parallel));
        assert_eq!(fp.relation("b", "a"), Some(Relation::Parallel));
    }

    #[test]
    fn footprint_self_loop_is_parallel_with_itself() {
        let log = EventLog::from_activity_sequences(vec![vec!["a", "a"]]);
        let fp = footprint(&log, &Classifier::default()).unwrap();
        assert_eq!(fp.relation("a", "a"), Some(Relation::Parallel));
    }

    #[test]
    fn footprint_of_empty_log_is_empty() {
        let fp = footprint(&EventLog::new(), &Classifier::default()).unwrap();
        assert!(fp.alphabet().is_empty());
        assert!(fp.relation("a", "b").is_none());
    }

    #[test]
    fn footprint_display_is_a_matrix() {
        let fp = footprint(&l1(), &Classifier::default()).unwrap();
        let table = fp.to_string();
        assert_eq!(table.lines().count(), 5);
        assert!(table.contains('→'));
        assert!(table.contains('#'));
    }

    #[test]
    fn miner_names_round_trip() {
        for miner in Miner::all() {
            assert_eq!(miner.name().parse::<Miner>().unwrap(), miner);
        }
        assert_eq!("alpha+".parse::<Miner>().unwrap(), Miner::AlphaPlus);
        assert!("beta".parse::<Miner>().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(MinerParams::default().validate().is_ok());
        let bad = MinerParams { dependency_threshold: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
