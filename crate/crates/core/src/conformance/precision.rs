//! Escaping-edge precision: compare what the model allows after each
//! observed prefix with what the log actually does next.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::{step_label, CompiledNet};
use crate::error::Result;
use crate::event_log::{Classifier, EventLog};
use crate::petri::AcceptingPetriNet;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionParams {
    /// Bound on silent firings both while reaching prefix markings and while
    /// collecting activable labels.
    pub max_silent_depth: usize,
    /// Drop prefixes whose replay needed missing-token repair (or hit an
    /// unmatched label) instead of scoring them at the repaired marking.
    pub skip_unfitting_prefixes: bool,
}

impl Default for PrecisionParams {
    fn default() -> Self {
        PrecisionParams { max_silent_depth: 10, skip_unfitting_prefixes: false }
    }
}

/// precision = 1 − Σ_prefix freq·|allowed ∖ observed| / Σ_prefix freq·|allowed|,
/// over every proper prefix of every trace (weighted by trace count), where
/// `allowed` is the set of labels activable from the prefix's marking via
/// the silent-transition closure and `observed` the labels actually
/// following that prefix in the log. An empty denominator scores 1.
pub fn precision_escaping_edges(
    log: &EventLog,
    classifier: &Classifier,
    apn: &AcceptingPetriNet,
    params: &PrecisionParams,
) -> Result<f64> {
    let variants = stats::variants(log, classifier)?;
    let net = CompiledNet::new(apn);

    // The observed prefix automaton: weight = how many traces pass through,
    // next = labels seen immediately afterwards. BTreeMap order guarantees
    // a parent prefix is visited before its extensions.
    #[derive(Default)]
    struct Prefix {
        weight: u64,
        next: BTreeSet<String>,
    }
    let mut prefixes: BTreeMap<Vec<String>, Prefix> = BTreeMap::new();
    for v in &variants {
        for i in 0..v.sequence.len() {
            let entry = prefixes.entry(v.sequence[..i].to_vec()).or_default();
            entry.weight += v.count;
            entry.next.insert(v.sequence[i].clone());
        }
    }

    // Walk the automaton reusing the parent's marking for each extension.
    #[derive(Clone)]
    struct State {
        marking: Vec<u64>,
        fitting: bool,
    }
    let mut states: BTreeMap<Vec<String>, State> = BTreeMap::new();
    let mut escaping_weight = 0u64;
    let mut allowed_weight = 0u64;
    for (prefix, info) in &prefixes {
        let state = match prefix.last() {
            None => State { marking: net.initial.clone(), fitting: true },
            Some(last) => {
                let parent = &states[&prefix[..prefix.len() - 1]];
                let mut marking = parent.marking.clone();
                let step = step_label(&net, &mut marking, last, params.max_silent_depth);
                State { marking, fitting: parent.fitting && step.matched && step.missing == 0 }
            }
        };
        if state.fitting || !params.skip_unfitting_prefixes {
            let allowed = activable_labels(&net, &state.marking, params.max_silent_depth);
            let escaping = allowed.iter().filter(|l| !info.next.contains(**l)).count() as u64;
            escaping_weight += info.weight * escaping;
            allowed_weight += info.weight * allowed.len() as u64;
        }
        states.insert(prefix.clone(), state);
    }

    if allowed_weight == 0 {
        Ok(1.0)
    } else {
        Ok(1.0 - escaping_weight as f64 / allowed_weight as f64)
    }
}

/// Labels of visible transitions enabled in the marking or in any marking
/// reachable from it by at most `max_depth` silent firings.
fn activable_labels<'a>(
    net: &CompiledNet<'a>,
    marking: &[u64],
    max_depth: usize,
) -> BTreeSet<&'a str> {
    let mut labels: BTreeSet<&str> = BTreeSet::new();
    let collect = |m: &[u64], labels: &mut BTreeSet<&'a str>| {
        for (t, ct) in net.transitions.iter().enumerate() {
            if let Some(l) = ct.label {
                if net.enabled(m, t) {
                    labels.insert(l);
                }
            }
        }
    };
    collect(marking, &mut labels);
    let mut visited: HashSet<Vec<u64>> = HashSet::new();
    visited.insert(marking.to_vec());
    let mut queue: VecDeque<(Vec<u64>, usize)> = VecDeque::new();
    queue.push_back((marking.to_vec(), 0));
    while let Some((m, depth)) = queue.pop_front() {
        if depth == max_depth {
            continue;
        }
        for &s in &net.silents {
            if !net.enabled(&m, s) {
                continue;
            }
            let mut next = m.clone();
            net.fire(&mut next, s);
            if visited.insert(next.clone()) {
                collect(&next, &mut labels);
                queue.push_back((next, depth + 1));
            }
        }
    }
    labels
}
