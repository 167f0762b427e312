//! Token-based replay and the model-quality metrics built on top of it.
//!
//! Replay pushes each trace through an accepting Petri net, counting
//! produced (p), consumed (c), missing (m), and remaining (r) tokens.
//! Initial-marking tokens count into p and final-marking consumption into c,
//! so a perfectly fitting trace has m = r = 0 and fitness exactly 1.

mod evaluate;
mod metrics;
mod precision;

pub use evaluate::{evaluate, EvaluationReport, EvaluationRow, Metric};
pub use metrics::{
    generalization, generalization_from_replay, simplicity_arc_degree,
    simplicity_arc_degree_with, DEFAULT_SIMPLICITY_K,
};
pub use precision::{precision_escaping_edges, PrecisionParams};

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::event_log::{Classifier, EventLog};
use crate::petri::AcceptingPetriNet;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayParams {
    /// Maximum number of silent transitions fired in one enabling search.
    pub max_silent_depth: usize,
    /// Replay distinct variants concurrently. The aggregate is a sum over
    /// per-variant results either way, so the outcome is identical.
    pub parallel: bool,
}

impl Default for ReplayParams {
    fn default() -> Self {
        ReplayParams { max_silent_depth: 10, parallel: true }
    }
}

/// One entry in the firing transcript of a replayed variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiringStep {
    /// A transition fired normally for an event.
    Fired { transition: String },
    /// A silent transition fired during an enabling search.
    Silent { transition: String },
    /// The transition was not enabled and fired anyway; `missing` tokens
    /// were inserted.
    Forced { transition: String, missing: u64 },
    /// No transition in the net carries this label; the event was skipped.
    Unmatched { label: String },
}

/// Replay outcome for one distinct variant (unweighted counts).
#[derive(Debug, Clone, PartialEq)]
pub struct VariantReplay {
    pub sequence: Vec<String>,
    /// How many traces of the log have this variant.
    pub count: u64,
    pub produced: u64,
    pub consumed: u64,
    pub missing: u64,
    pub remaining: u64,
    /// True iff the variant replays without missing or remaining tokens.
    pub fits: bool,
    pub transcript: Vec<FiringStep>,
}

/// Whole-log replay: per-variant records plus count-weighted aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayResult {
    pub variants: Vec<VariantReplay>,
    pub produced: u64,
    pub consumed: u64,
    pub missing: u64,
    pub remaining: u64,
    /// Transition id → count-weighted number of firings (silent included).
    pub executions: BTreeMap<String, u64>,
}

impl ReplayResult {
    /// Share of traces that replay perfectly.
    pub fn fitting_traces(&self) -> u64 {
        self.variants.iter().filter(|v| v.fits).map(|v| v.count).sum()
    }
}

pub fn token_replay(
    log: &EventLog,
    classifier: &Classifier,
    apn: &AcceptingPetriNet,
    params: &ReplayParams,
) -> Result<ReplayResult> {
    let variants = stats::variants(log, classifier)?;
    let net = CompiledNet::new(apn);
    let replay_one = |v: &stats::Variant| {
        let (mut replay, exec) = replay_sequence_compiled(&net, &v.sequence, params.max_silent_depth);
        replay.count = v.count;
        (replay, exec)
    };
    let replayed: Vec<(VariantReplay, Vec<u64>)> = if params.parallel {
        variants.par_iter().map(replay_one).collect()
    } else {
        variants.iter().map(replay_one).collect()
    };

    let mut result = ReplayResult {
        variants: Vec::with_capacity(replayed.len()),
        produced: 0,
        consumed: 0,
        missing: 0,
        remaining: 0,
        executions: net
            .transitions
            .iter()
            .map(|t| (t.id.to_owned(), 0))
            .collect(),
    };
    for (replay, exec) in replayed {
        result.produced += replay.produced * replay.count;
        result.consumed += replay.consumed * replay.count;
        result.missing += replay.missing * replay.count;
        result.remaining += replay.remaining * replay.count;
        for (t, &n) in net.transitions.iter().zip(&exec) {
            if n > 0 {
                *result.executions.get_mut(t.id).expect("preseeded") += n * replay.count;
            }
        }
        result.variants.push(replay);
    }
    Ok(result)
}

/// Replay a single label sequence against the net (count = 1).
pub fn replay_sequence(
    apn: &AcceptingPetriNet,
    sequence: &[String],
    params: &ReplayParams,
) -> VariantReplay {
    let net = CompiledNet::new(apn);
    replay_sequence_compiled(&net, sequence, params.max_silent_depth).0
}

/// Fitness of a single trace: ½·(1 − m/c) + ½·(1 − r/p).
pub fn trace_fitness(
    apn: &AcceptingPetriNet,
    sequence: &[String],
    params: &ReplayParams,
) -> Result<f64> {
    let r = replay_sequence(apn, sequence, params);
    if r.consumed == 0 || r.produced == 0 {
        return Err(Error::Degenerate(
            "replay produced or consumed no tokens; fitness is undefined".into(),
        ));
    }
    Ok(0.5 * (1.0 - r.missing as f64 / r.consumed as f64)
        + 0.5 * (1.0 - r.remaining as f64 / r.produced as f64))
}

/// Log-level replay fitness: ½·(1 − M/C) + ½·(1 − R/P) over the aggregates.
pub fn fitness(rr: &ReplayResult) -> Result<f64> {
    if rr.consumed == 0 || rr.produced == 0 {
        return Err(Error::Degenerate(
            "replay produced or consumed no tokens; fitness is undefined".into(),
        ));
    }
    Ok(0.5 * (1.0 - rr.missing as f64 / rr.consumed as f64)
        + 0.5 * (1.0 - rr.remaining as f64 / rr.produced as f64))
}

/// Dense form of an accepting Petri net for replay: indices instead of ids,
/// transitions sorted by id so index order breaks ties deterministically.
pub(crate) struct CompiledNet<'a> {
    pub(crate) transitions: Vec<CompiledTransition<'a>>,
    by_label: HashMap<&'a str, Vec<usize>>,
    silents: Vec<usize>,
    initial: Vec<u64>,
    final_marking: Vec<u64>,
    num_places: usize,
}

pub(crate) struct CompiledTransition<'a> {
    pub(crate) id: &'a str,
    pub(crate) label: Option<&'a str>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl<'a> CompiledNet<'a> {
    pub(crate) fn new(apn: &'a AcceptingPetriNet) -> Self {
        let place_idx: HashMap<&str, usize> =
            apn.net.places().iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        let mut transitions = Vec::new();
        let mut by_label: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut silents = Vec::new();
        for (i, (id, label)) in apn.net.transitions().iter().enumerate() {
            let inputs = apn.net.preset(id).into_iter().map(|p| place_idx[p]).collect();
            let outputs = apn.net.postset(id).into_iter().map(|p| place_idx[p]).collect();
            transitions.push(CompiledTransition {
                id: id.as_str(),
                label: label.as_deref(),
                inputs,
                outputs,
            });
            match label {
                Some(l) => by_label.entry(l.as_str()).or_default().push(i),
                None => silents.push(i),
            }
        }
        let mut initial = vec![0u64; place_idx.len()];
        for (p, n) in apn.initial_marking.iter() {
            initial[place_idx[p]] = n;
        }
        let mut final_marking = vec![0u64; place_idx.len()];
        for (p, n) in apn.final_marking.iter() {
            final_marking[place_idx[p]] = n;
        }
        CompiledNet {
            transitions,
            by_label,
            silents,
            initial,
            final_marking,
            num_places: place_idx.len(),
        }
    }

    fn enabled(&self, marking: &[u64], t: usize) -> bool {
        self.transitions[t].inputs.iter().all(|&p| marking[p] > 0)
    }

    fn deficit(&self, marking: &[u64], t: usize) -> u64 {
        self.transitions[t].inputs.iter().filter(|&&p| marking[p] == 0).count() as u64
    }

    /// Fire `t`, inserting tokens where inputs are empty. Returns the number
    /// of inserted (missing) tokens.
    fn fire(&self, marking: &mut [u64], t: usize) -> u64 {
        let mut inserted = 0;
        for &p in &self.transitions[t].inputs {
            if marking[p] == 0 {
                inserted += 1;
            } else {
                marking[p] -= 1;
            }
        }
        for &p in &self.transitions[t].outputs {
            marking[p] += 1;
        }
        inserted
    }
}

/// Per-event replay step shared with the precision prefix walker.
pub(crate) struct StepOutcome {
    pub(crate) matched: bool,
    pub(crate) missing: u64,
    pub(crate) steps: Vec<FiringStep>,
    /// Indices of every transition fired, silent enablers included.
    pub(crate) fired: Vec<usize>,
}

/// Advance the marking over one event label: fire an enabled transition
/// with that label, else the shortest silent sequence enabling one, else
/// force the candidate needing the fewest inserted tokens.
pub(crate) fn step_label(
    net: &CompiledNet,
    marking: &mut Vec<u64>,
    label: &str,
    max_depth: usize,
) -> StepOutcome {
    let mut out = StepOutcome { matched: true, missing: 0, steps: Vec::new(), fired: Vec::new() };
    let Some(candidates) = net.by_label.get(label) else {
        out.matched = false;
        out.steps.push(FiringStep::Unmatched { label: label.to_owned() });
        return out;
    };
    let fire_normal = |net: &CompiledNet, marking: &mut Vec<u64>, t: usize, out: &mut StepOutcome| {
        net.fire(marking, t);
        out.fired.push(t);
        out.steps.push(FiringStep::Fired { transition: net.transitions[t].id.to_owned() });
    };
    if let Some(&t) = candidates.iter().find(|&&t| net.enabled(marking, t)) {
        fire_normal(net, marking, t, &mut out);
        return out;
    }
    if let Some((path, t)) = enabling_search(net, marking, candidates, max_depth) {
        for s in path {
            net.fire(marking, s);
            out.fired.push(s);
            out.steps.push(FiringStep::Silent { transition: net.transitions[s].id.to_owned() });
        }
        fire_normal(net, marking, t, &mut out);
        return out;
    }
    let &t = candidates
        .iter()
        .min_by_key(|&&t| (net.deficit(marking, t), t))
        .expect("label map entries are nonempty");
    let inserted = net.fire(marking, t);
    out.missing = inserted;
    out.fired.push(t);
    out.steps.push(FiringStep::Forced {
        transition: net.transitions[t].id.to_owned(),
        missing: inserted,
    });
    out
}

/// Breadth-first search over silent firings for the shortest sequence after
/// which some candidate is enabled; ties resolve to the earliest sequence in
/// transition-id order, then the smallest candidate id.
fn enabling_search(
    net: &CompiledNet,
    marking: &[u64],
    candidates: &[usize],
    max_depth: usize,
) -> Option<(Vec<usize>, usize)> {
    if net.silents.is_empty() || max_depth == 0 {
        return None;
    }
    let mut visited: HashSet<Vec<u64>> = HashSet::new();
    visited.insert(marking.to_vec());
    let mut queue: VecDeque<(Vec<u64>, Vec<usize>)> = VecDeque::new();
    queue.push_back((marking.to_vec(), Vec::new()));
    while let Some((m, path)) = queue.pop_front() {
        if path.len() == max_depth {
            continue;
        }
        for &s in &net.silents {
            if !net.enabled(&m, s) {
                continue;
            }
            let mut next = m.clone();
            net.fire(&mut next, s);
            if !visited.insert(next.clone()) {
                continue;
            }
            let mut next_path = path.clone();
            next_path.push(s);
            if let Some(&t) = candidates.iter().find(|&&t| net.enabled(&next, t)) {
                return Some((next_path, t));
            }
            queue.push_back((next, next_path));
        }
    }
    None
}

/// After the last event, fire the silent sequence that best matches the
/// final marking: minimal forced missing tokens, then minimal leftovers,
/// preferring shorter sequences.
fn closing_search(net: &CompiledNet, marking: &[u64], max_depth: usize) -> Vec<usize> {
    let score = |m: &[u64]| -> (u64, u64) {
        let mut deficit = 0;
        let mut leftover = 0;
        for p in 0..net.num_places {
            deficit += net.final_marking[p].saturating_sub(m[p]);
            leftover += m[p].saturating_sub(net.final_marking[p]);
        }
        (deficit, leftover)
    };
    let mut best_score = score(marking);
    let mut best_path: Vec<usize> = Vec::new();
    if best_score == (0, 0) || net.silents.is_empty() {
        return best_path;
    }
    let mut visited: HashSet<Vec<u64>> = HashSet::new();
    visited.insert(marking.to_vec());
    let mut queue: VecDeque<(Vec<u64>, Vec<usize>)> = VecDeque::new();
    queue.push_back((marking.to_vec(), Vec::new()));
    while let Some((m, path)) = queue.pop_front() {
        if path.len() == max_depth {
            continue;
        }
        for &s in &net.silents {
            if !net.enabled(&m, s) {
                continue;
            }
            let mut next = m.clone();
            net.fire(&mut next, s);
            if !visited.insert(next.clone()) {
                continue;
            }
            let mut next_path = path.clone();
            next_path.push(s);
            let sc = score(&next);
            // Breadth-first order makes the first strictly better marking
            // also the one with the shortest, id-smallest silent sequence.
            if sc < best_score {
                best_score = sc;
                best_path = next_path.clone();
                if sc == (0, 0) {
                    return best_path;
                }
            }
            queue.push_back((next, next_path));
        }
    }
    best_path
}

fn replay_sequence_compiled(
    net: &CompiledNet,
    sequence: &[String],
    max_depth: usize,
) -> (VariantReplay, Vec<u64>) {
    let mut marking = net.initial.clone();
    let mut exec = vec![0u64; net.transitions.len()];
    let mut replay = VariantReplay {
        sequence: sequence.to_vec(),
        count: 1,
        produced: net.initial.iter().sum(),
        consumed: 0,
        missing: 0,
        remaining: 0,
        fits: false,
        transcript: Vec::new(),
    };
    let book = |t: usize, replay: &mut VariantReplay, exec: &mut Vec<u64>| {
        replay.consumed += net.transitions[t].inputs.len() as u64;
        replay.produced += net.transitions[t].outputs.len() as u64;
        exec[t] += 1;
    };
    for label in sequence {
        let step = step_label(net, &mut marking, label, max_depth);
        replay.missing += step.missing;
        for &t in &step.fired {
            book(t, &mut replay, &mut exec);
        }
        replay.transcript.extend(step.steps);
    }
    for s in closing_search(net, &marking, max_depth) {
        net.fire(&mut marking, s);
        book(s, &mut replay, &mut exec);
        replay.transcript.push(FiringStep::Silent { transition: net.transitions[s].id.to_owned() });
    }
    for p in 0..net.num_places {
        replay.missing += net.final_marking[p].saturating_sub(marking[p]);
        replay.remaining += marking[p].saturating_sub(net.final_marking[p]);
    }
    replay.consumed += net.final_marking.iter().sum::<u64>();
    replay.fits = replay.missing == 0 && replay.remaining == 0;
    (replay, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::{alpha_miner, inductive_miner, tree_to_petri, Miner, MinerParams};

    fn l1() -> EventLog {
        EventLog::from_activity_sequences(vec![
            vec!["a", "b", "d"],
            vec!["a", "c", "d"],
            vec!["a", "b", "d"],
            vec!["a", "c", "d"],
            vec!["a", "b", "d"],
        ])
    }

    fn l1_net() -> AcceptingPetriNet {
        alpha_miner(&l1(), &Classifier::default()).unwrap()
    }

    fn seq(labels: &[&str]) -> Vec<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fitting_trace_has_no_deficit() {
        let r = replay_sequence(&l1_net(), &seq(&["a", "b", "d"]), &ReplayParams::default());
        assert!(r.fits);
        assert_eq!((r.produced, r.consumed, r.missing, r.remaining), (4, 4, 0, 0));
    }

    #[test]
    fn skipping_the_middle_costs_one_missing_and_one_remaining() {
        let r = replay_sequence(&l1_net(), &seq(&["a", "d"]), &ReplayParams::default());
        assert_eq!((r.produced, r.consumed, r.missing, r.remaining), (3, 3, 1, 1));
        assert!(!r.fits);
    }

    #[test]
    fn empty_trace_strands_the_source_token() {
        let r = replay_sequence(&l1_net(), &[], &ReplayParams::default());
        assert_eq!((r.produced, r.consumed, r.missing, r.remaining), (1, 1, 1, 1));
    }

    #[test]
    fn trace_fitness_of_the_skip_is_two_thirds() {
        let f = trace_fitness(&l1_net(), &seq(&["a", "d"]), &ReplayParams::default()).unwrap();
        assert!((f - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn whole_log_fitness_is_one_on_its_own_model() {
        let rr = token_replay(&l1(), &Classifier::default(), &l1_net(), &ReplayParams::default())
            .unwrap();
        assert_eq!(rr.missing, 0);
        assert_eq!(rr.remaining, 0);
        assert_eq!(fitness(&rr).unwrap(), 1.0);
        assert_eq!(rr.fitting_traces(), 5);
    }

    #[test]
    fn aggregates_are_count_weighted() {
        let rr = token_replay(&l1(), &Classifier::default(), &l1_net(), &ReplayParams::default())
            .unwrap();
        let p: u64 = rr.variants.iter().map(|v| v.produced * v.count).sum();
        assert_eq!(rr.produced, p);
        assert_eq!(rr.executions["a"], 5);
        assert_eq!(rr.executions["b"], 3);
        assert_eq!(rr.executions["c"], 2);
        assert_eq!(rr.executions["d"], 5);
    }

    #[test]
    fn unmatched_labels_are_skipped_not_forced() {
        let r = replay_sequence(&l1_net(), &seq(&["a", "z", "b", "d"]), &ReplayParams::default());
        assert!(r.transcript.contains(&FiringStep::Unmatched { label: "z".into() }));
        assert_eq!((r.missing, r.remaining), (0, 0), "z is ignored, rest fits");
    }

    #[test]
    fn parallel_and_sequential_replay_agree_exactly() {
        let log = l1();
        let apn = l1_net();
        let par = token_replay(
            &log,
            &Classifier::default(),
            &apn,
            &ReplayParams { parallel: true, ..Default::default() },
        )
        .unwrap();
        let seq = token_replay(
            &log,
            &Classifier::default(),
            &apn,
            &ReplayParams { parallel: false, ..Default::default() },
        )
        .unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn silent_transitions_are_searched_through() {
        // Model with a choice of tau or a, then b: trace ⟨b⟩ must route
        // through the silent branch and still fit.
        let log = EventLog::from_activity_sequences(vec![vec!["a", "b"], vec!["b"]]);
        let tree = inductive_miner(&log, &Classifier::default()).unwrap();
        let apn = tree_to_petri(&tree);
        let r = replay_sequence(&apn, &seq(&["b"]), &ReplayParams::default());
        assert!(r.fits, "transcript: {:?}", r.transcript);
    }

    #[test]
    fn closing_search_exits_loops_silently() {
        let log = EventLog::from_activity_sequences(vec![vec!["a"], vec!["a", "a"]]);
        let tree = inductive_miner(&log, &Classifier::default()).unwrap();
        let apn = tree_to_petri(&tree);
        for trace in [vec!["a"], vec!["a", "a"], vec!["a", "a", "a"]] {
            let r = replay_sequence(&apn, &seq(&trace), &ReplayParams::default());
            assert!(r.fits, "{trace:?} should fit, transcript: {:?}", r.transcript);
        }
    }

    #[test]
    fn inductive_models_fit_their_own_log_exactly() {
        let logs = vec![
            vec![vec!["a", "b", "d"], vec!["a", "c", "d"]],
            vec![vec!["a", "b"], vec!["b", "a"]],
            vec![vec!["a"], vec![]],
            vec![vec!["a", "b", "c"], vec!["c", "a"], vec!["b"]],
        ];
        for seqs in logs {
            let log = EventLog::from_activity_sequences(seqs);
            let apn = Miner::Inductive
                .discover(&log, &Classifier::default(), &MinerParams::default())
                .unwrap();
            let rr =
                token_replay(&log, &Classifier::default(), &apn, &ReplayParams::default()).unwrap();
            assert_eq!(fitness(&rr).unwrap(), 1.0);
        }
    }

    #[test]
    fn degenerate_replay_is_an_error() {
        let mut net = crate::petri::PetriNet::new();
        net.add_place("only").unwrap();
        let apn = AcceptingPetriNet::new(net, crate::petri::Marking::new(), crate::petri::Marking::new())
            .unwrap();
        let log = EventLog::from_activity_sequences(vec![vec!["a"]]);
        let rr = token_replay(&log, &Classifier::default(), &apn, &ReplayParams::default()).unwrap();
        assert!(fitness(&rr).is_err());
    }
}
