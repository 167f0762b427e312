//! Control-flow statistics over event logs: start/end activities, activity
//! frequencies, the directly-follows graph, variants, and variant-based
//! filtering.
//!
//! The count maps are ordered by descending count, ties broken by label, so
//! iterating (and serializing) them is deterministic and matches how such
//! tables are usually displayed.

use std::collections::{BTreeMap, HashMap, HashSet};

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::Result;
use crate::event_log::{activity_sequence, Classifier, EventLog};

/// Count of traces per first activity. Empty traces are skipped (with a log
/// warning).
pub fn start_activities(log: &EventLog, classifier: &Classifier) -> Result<IndexMap<String, u64>> {
    warn_empty_traces(log);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for trace in &log.traces {
        if let Some(event) = trace.events.first() {
            *counts.entry(classifier.label(event)?).or_insert(0) += 1;
        }
    }
    Ok(sorted_counts(counts))
}

/// Count of traces per last activity.
pub fn end_activities(log: &EventLog, classifier: &Classifier) -> Result<IndexMap<String, u64>> {
    warn_empty_traces(log);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for trace in &log.traces {
        if let Some(event) = trace.events.last() {
            *counts.entry(classifier.label(event)?).or_insert(0) += 1;
        }
    }
    Ok(sorted_counts(counts))
}

/// Count of events per activity label.
pub fn activity_frequencies(
    log: &EventLog,
    classifier: &Classifier,
) -> Result<IndexMap<String, u64>> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for trace in &log.traces {
        for event in &trace.events {
            *counts.entry(classifier.label(event)?).or_insert(0) += 1;
        }
    }
    Ok(sorted_counts(counts))
}

/// The directly-follows graph of a log: how often each activity is
/// immediately followed by another within a trace, plus per-activity totals
/// and start/end counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectlyFollowsGraph {
    /// (a, b) → number of times b directly follows a.
    pub edges: BTreeMap<(String, String), u64>,
    /// Activity → total occurrences.
    pub activities: BTreeMap<String, u64>,
    /// Activity → number of traces it starts.
    pub starts: BTreeMap<String, u64>,
    /// Activity → number of traces it ends.
    pub ends: BTreeMap<String, u64>,
}

impl DirectlyFollowsGraph {
    pub fn edge(&self, a: &str, b: &str) -> u64 {
        self.edges.get(&(a.to_owned(), b.to_owned())).copied().unwrap_or(0)
    }
}

pub fn directly_follows(log: &EventLog, classifier: &Classifier) -> Result<DirectlyFollowsGraph> {
    warn_empty_traces(log);
    let mut dfg = DirectlyFollowsGraph::default();
    for trace in &log.traces {
        let labels = activity_sequence(trace, classifier)?;
        if let Some(first) = labels.first() {
            *dfg.starts.entry(first.clone()).or_insert(0) += 1;
        }
        if let Some(last) = labels.last() {
            *dfg.ends.entry(last.clone()).or_insert(0) += 1;
        }
        for label in &labels {
            *dfg.activities.entry(label.clone()).or_insert(0) += 1;
        }
        for pair in labels.windows(2) {
            *dfg.edges.entry((pair[0].clone(), pair[1].clone())).or_insert(0) += 1;
        }
    }
    Ok(dfg)
}

/// One distinct activity sequence with its frequency and the indices of the
/// traces exhibiting it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub sequence: Vec<String>,
    pub count: u64,
    pub trace_indices: Vec<usize>,
}

/// Distinct activity sequences, most frequent first (ties: lexicographically
/// smaller sequence first). Empty traces produce an empty-sequence variant.
pub fn variants(log: &EventLog, classifier: &Classifier) -> Result<Vec<Variant>> {
    let mut groups: HashMap<Vec<String>, Vec<usize>> = HashMap::new();
    for (index, trace) in log.traces.iter().enumerate() {
        groups.entry(activity_sequence(trace, classifier)?).or_default().push(index);
    }
    let mut out: Vec<Variant> = groups
        .into_iter()
        .map(|(sequence, trace_indices)| Variant {
            sequence,
            count: trace_indices.len() as u64,
            trace_indices,
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.sequence.cmp(&b.sequence)));
    Ok(out)
}

/// Keep only traces whose activity sequence is in `keep`. Log metadata is
/// preserved; trace order is the original order.
pub fn filter_variants(
    log: &EventLog,
    keep: &HashSet<Vec<String>>,
    classifier: &Classifier,
) -> Result<EventLog> {
    let mut filtered = log.metadata_shell();
    for trace in &log.traces {
        if keep.contains(&activity_sequence(trace, classifier)?) {
            filtered.traces.push(trace.clone());
        }
    }
    Ok(filtered)
}

/// Keep only traces belonging to the `k` most frequent variants (ties broken
/// lexicographically, like [`variants`]).
pub fn top_k_variants(log: &EventLog, k: usize, classifier: &Classifier) -> Result<EventLog> {
    let keep: HashSet<Vec<String>> = variants(log, classifier)?
        .into_iter()
        .take(k)
        .map(|v| v.sequence)
        .collect();
    filter_variants(log, &keep, classifier)
}

/// One variant row in a [`StatsReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariantEntry {
    pub sequence: Vec<String>,
    pub count: u64,
}

/// Aggregate log statistics, shaped for direct JSON serialization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub start_activities: IndexMap<String, u64>,
    pub end_activities: IndexMap<String, u64>,
    pub activities: IndexMap<String, u64>,
    pub num_traces: usize,
    pub num_events: usize,
    pub num_variants: usize,
    pub variants: Vec<VariantEntry>,
}

/// Compute the full statistics report in one pass over the helpers above.
/// `max_variants` caps the variant list (`None` = all).
pub fn report(
    log: &EventLog,
    classifier: &Classifier,
    max_variants: Option<usize>,
) -> Result<StatsReport> {
    let all_variants = variants(log, classifier)?;
    let num_variants = all_variants.len();
    let shown = match max_variants {
        Some(k) => all_variants.into_iter().take(k).collect::<Vec<_>>(),
        None => all_variants,
    };
    Ok(StatsReport {
        start_activities: start_activities(log, classifier)?,
        end_activities: end_activities(log, classifier)?,
        activities: activity_frequencies(log, classifier)?,
        num_traces: log.num_traces(),
        num_events: log.num_events(),
        num_variants,
        variants: shown
            .into_iter()
            .map(|v| VariantEntry { sequence: v.sequence, count: v.count })
            .collect(),
    })
}

fn sorted_counts(counts: BTreeMap<String, u64>) -> IndexMap<String, u64> {
    let mut entries: Vec<(String, u64)> = counts.into_iter().collect();
    entries.sort_by(|(la, ca), (lb, cb)| cb.cmp(ca).then_with(|| la.cmp(lb)));
    entries.into_iter().collect()
}

fn warn_empty_traces(log: &EventLog) {
    let empty = log.traces.iter().filter(|t| t.is_empty()).count();
    if empty > 0 {
        ::log::warn!("{empty} empty trace(s) contribute nothing to control-flow statistics");
    }
}
