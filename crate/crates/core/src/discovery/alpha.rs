//! The alpha miner and its length-one-loop-aware extension.

use std::collections::{BTreeSet, HashSet, VecDeque};

use super::{footprint, fresh_id, FootprintMatrix, Relation};
use crate::error::{Error, Result};
use crate::event_log::{activity_sequence, Classifier, EventLog};
use crate::petri::{AcceptingPetriNet, Marking, PetriNet};
use crate::stats::directly_follows;

/// Canonical alpha construction: one place per maximal pair (A, B) with all
/// cross-relations causal and both sides internally unrelated, plus a unique
/// source place feeding the start activities and a sink place fed by the end
/// activities.
pub fn alpha_miner(log: &EventLog, classifier: &Classifier) -> Result<AcceptingPetriNet> {
    check_preconditions(log)?;
    let fp = footprint(log, classifier)?;
    Ok(net_from_footprint(&fp)?.0)
}

/// Alpha-plus, restricted to its length-one-loop repair: self-looping
/// activities are removed from the log, alpha runs on the projection, and
/// each removed activity is re-attached as a self-loop around the place(s)
/// matching its surrounding context.
pub fn alpha_plus_miner(log: &EventLog, classifier: &Classifier) -> Result<AcceptingPetriNet> {
    check_preconditions(log)?;
    let dfg = directly_follows(log, classifier)?;
    let loopers: BTreeSet<String> = dfg
        .edges
        .keys()
        .filter(|(a, b)| a == b)
        .map(|(a, _)| a.clone())
        .collect();
    if loopers.is_empty() {
        let fp = FootprintMatrix::from_dfg(&dfg);
        return Ok(net_from_footprint(&fp)?.0);
    }

    let mut projected: Vec<Vec<String>> = Vec::with_capacity(log.num_traces());
    for trace in &log.traces {
        let seq: Vec<String> = activity_sequence(trace, classifier)?
            .into_iter()
            .filter(|a| !loopers.contains(a))
            .collect();
        if !seq.is_empty() {
            projected.push(seq);
        }
    }
    if projected.is_empty() {
        return Err(Error::InvalidInput(
            "alpha-plus: every event belongs to a length-one loop; nothing remains after \
             projection"
                .into(),
        ));
    }
    let plog = EventLog::from_activity_sequences(projected);
    let fp = footprint(&plog, &Classifier::default())?;
    let (apn, contexts) = net_from_footprint(&fp)?;
    let AcceptingPetriNet { mut net, initial_marking, final_marking } = apn;

    for looper in &loopers {
        let mut preds: BTreeSet<&str> = BTreeSet::new();
        let mut succs: BTreeSet<&str> = BTreeSet::new();
        for ((a, b), _) in dfg.edges.iter().filter(|(_, &n)| n > 0) {
            if b == looper && a != looper && !loopers.contains(a) {
                preds.insert(a);
            }
            if a == looper && b != looper && !loopers.contains(b) {
                succs.insert(b);
            }
        }
        let before: BTreeSet<&str> = preds.difference(&succs).copied().collect();
        let after: BTreeSet<&str> = succs.difference(&preds).copied().collect();

        let tid = fresh_id(&net, looper.clone());
        net.add_transition(&tid, Some(looper))?;

        let homes: Vec<String> = if before.is_empty() || after.is_empty() {
            Vec::new()
        } else {
            contexts
                .iter()
                .filter(|c| {
                    before.iter().all(|a| c.inputs.contains(*a))
                        && after.iter().all(|b| c.outputs.contains(*b))
                })
                .map(|c| c.place.clone())
                .collect()
        };
        if homes.is_empty() {
            // No place of the reduced net surrounds this loop's context —
            // give the loop its own place so it stays connected.
            let place = fresh_id(&net, pair_place_id(&before, &after));
            net.add_place(&place)?;
            for a in &before {
                net.add_arc(*a, &place)?;
            }
            for b in &after {
                net.add_arc(&place, *b)?;
            }
            net.add_arc(&place, &tid)?;
            net.add_arc(&tid, &place)?;
        } else {
            for place in homes {
                net.add_arc(&place, &tid)?;
                net.add_arc(&tid, &place)?;
            }
        }
    }
    AcceptingPetriNet::new(net, initial_marking, final_marking)
}

fn check_preconditions(log: &EventLog) -> Result<()> {
    if log.traces.is_empty() {
        return Err(Error::InvalidInput("alpha miner requires a nonempty log".into()));
    }
    if let Some(i) = log.traces.iter().position(|t| t.is_empty()) {
        return Err(Error::InvalidInput(format!(
            "alpha miner requires nonempty traces; trace {i} is empty"
        )));
    }
    Ok(())
}

/// A constructed place with the activity sets it connects, kept so
/// alpha-plus can find the place surrounding a loop context.
pub(super) struct PlaceContext {
    pub place: String,
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
}

pub(super) fn net_from_footprint(
    fp: &FootprintMatrix,
) -> Result<(AcceptingPetriNet, Vec<PlaceContext>)> {
    if fp.alphabet().is_empty() {
        return Err(Error::InvalidInput("alpha miner found no activities".into()));
    }
    let mut net = PetriNet::new();
    for label in fp.alphabet() {
        net.add_transition(label.clone(), Some(label))?;
    }
    let source = fresh_id(&net, "source".to_owned());
    net.add_place(&source)?;
    let sink = fresh_id(&net, "sink".to_owned());
    net.add_place(&sink)?;

    let mut contexts = Vec::new();
    for (a_set, b_set) in maximal_pairs(fp) {
        let inputs: BTreeSet<String> =
            a_set.iter().map(|&i| fp.alphabet()[i].clone()).collect();
        let outputs: BTreeSet<String> =
            b_set.iter().map(|&j| fp.alphabet()[j].clone()).collect();
        let place = fresh_id(
            &net,
            pair_place_id(
                &inputs.iter().map(String::as_str).collect(),
                &outputs.iter().map(String::as_str).collect(),
            ),
        );
        net.add_place(&place)?;
        for a in &inputs {
            net.add_arc(a.clone(), &place)?;
        }
        for b in &outputs {
            net.add_arc(&place, b.clone())?;
        }
        contexts.push(PlaceContext { place, inputs, outputs });
    }

    for s in fp.starts() {
        net.add_arc(&source, s.clone())?;
    }
    for e in fp.ends() {
        net.add_arc(e.clone(), &sink)?;
    }

    let apn =
        AcceptingPetriNet::new(net, Marking::single(&source), Marking::single(&sink))?;
    Ok((apn, contexts))
}

fn pair_place_id(inputs: &BTreeSet<&str>, outputs: &BTreeSet<&str>) -> String {
    let ins: Vec<&str> = inputs.iter().copied().collect();
    let outs: Vec<&str> = outputs.iter().copied().collect();
    format!("p({{{}}},{{{}}})", ins.join(","), outs.join(","))
}

/// Enumerate all maximal (A, B) pairs over the footprint: A×B all causal
/// right, A and B internally (including reflexively) unrelated. Pairs grow
/// from causal seed pairs by adding one activity at a time; maximality is a
/// final dominance filter.
fn maximal_pairs(fp: &FootprintMatrix) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = fp.alphabet().len();
    let causal = |i: usize, j: usize| fp.relation_at(i, j) == Relation::CausalRight;
    let unrelated = |i: usize, j: usize| fp.relation_at(i, j) == Relation::Unrelated;

    let mut seen: HashSet<(Vec<usize>, Vec<usize>)> = HashSet::new();
    let mut queue: VecDeque<(Vec<usize>, Vec<usize>)> = VecDeque::new();
    for i in (0..n).filter(|&i| unrelated(i, i)) {
        for j in (0..n).filter(|&j| unrelated(j, j)) {
            if causal(i, j) {
                let pair = (vec![i], vec![j]);
                if seen.insert(pair.clone()) {
                    queue.push_back(pair);
                }
            }
        }
    }

    while let Some((a_set, b_set)) = queue.pop_front() {
        for x in (0..n).filter(|&x| unrelated(x, x)) {
            // Try x as an extra member of A.
            if !a_set.contains(&x)
                && a_set.iter().all(|&a| unrelated(a, x))
                && b_set.iter().all(|&b| causal(x, b))
            {
                let mut grown = a_set.clone();
                grown.push(x);
                grown.sort_unstable();
                let pair = (grown, b_set.clone());
                if seen.insert(pair.clone()) {
                    queue.push_back(pair);
                }
            }
            // Try x as an extra member of B.
            if !b_set.contains(&x)
                && b_set.iter().all(|&b| unrelated(b, x))
                && a_set.iter().all(|&a| causal(a, x))
            {
                let mut grown = b_set.clone();
                grown.push(x);
                grown.sort_unstable();
                let pair = (a_set.clone(), grown);
                if seen.insert(pair.clone()) {
                    queue.push_back(pair);
                }
            }
        }
    }

    let all: Vec<(Vec<usize>, Vec<usize>)> = seen.into_iter().collect();
    let mut maximal: Vec<(Vec<usize>, Vec<usize>)> = all
        .iter()
        .filter(|(a, b)| {
            !all.iter().any(|(a2, b2)| {
                (a2.len() + b2.len() > a.len() + b.len())
                    && is_subset(a, a2)
                    && is_subset(b, b2)
            })
        })
        .cloned()
        .collect();
    maximal.sort();
    maximal
}

/// Both slices sorted ascending.
fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}
