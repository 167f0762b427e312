//! Inductive miner: recursively cuts the directly-follows graph into
//! exclusive-choice, sequence, parallel, and loop blocks, falling back to a
//! flower model when no cut applies. The result is a process tree; every
//! trace of the input log fits the tree by construction.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use petgraph::graph::DiGraph;
use petgraph::unionfind::UnionFind;

use super::fresh_id;
use crate::error::{Error, Result};
use crate::event_log::{activity_sequence, Classifier, EventLog};
use crate::petri::{AcceptingPetriNet, Marking, PetriNet};

/// A block-structured process model. `Loop` children are the body followed
/// by the redo parts: the body runs first, and each redo part leads back
/// into another run of the body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProcessTree {
    Leaf(String),
    Silent,
    Sequence(Vec<ProcessTree>),
    Xor(Vec<ProcessTree>),
    Parallel(Vec<ProcessTree>),
    Loop(Vec<ProcessTree>),
}

impl fmt::Display for ProcessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn children(f: &mut fmt::Formatter<'_>, name: &str, cs: &[ProcessTree]) -> fmt::Result {
            write!(f, "{name}(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
        match self {
            ProcessTree::Leaf(l) => write!(f, "{l}"),
            ProcessTree::Silent => write!(f, "tau"),
            ProcessTree::Sequence(cs) => children(f, "sequence", cs),
            ProcessTree::Xor(cs) => children(f, "xor", cs),
            ProcessTree::Parallel(cs) => children(f, "parallel", cs),
            ProcessTree::Loop(cs) => children(f, "loop", cs),
        }
    }
}

/// Variants as index sequences with multiplicities; keys are unique so the
/// map form keeps recursion deterministic.
type Variants = BTreeMap<Vec<u32>, u64>;

pub fn inductive_miner(log: &EventLog, classifier: &Classifier) -> Result<ProcessTree> {
    if log.traces.is_empty() {
        return Err(Error::InvalidInput("inductive miner requires a nonempty log".into()));
    }
    let mut alphabet: BTreeSet<String> = BTreeSet::new();
    let mut sequences = Vec::with_capacity(log.traces.len());
    for trace in &log.traces {
        let labels = activity_sequence(trace, classifier)?;
        alphabet.extend(labels.iter().cloned());
        sequences.push(labels);
    }
    let alphabet: Vec<String> = alphabet.into_iter().collect();
    let index: HashMap<&str, u32> =
        alphabet.iter().enumerate().map(|(i, a)| (a.as_str(), i as u32)).collect();
    let mut variants: Variants = BTreeMap::new();
    for seq in &sequences {
        let key: Vec<u32> = seq.iter().map(|a| index[a.as_str()]).collect();
        *variants.entry(key).or_insert(0) += 1;
    }
    Ok(reduce(mine(&variants, &alphabet)))
}

fn mine(variants: &Variants, alphabet: &[String]) -> ProcessTree {
    let acts: BTreeSet<u32> = variants.keys().flatten().copied().collect();
    if acts.is_empty() {
        return ProcessTree::Silent;
    }
    if variants.contains_key(&Vec::new()) {
        let rest: Variants =
            variants.iter().filter(|(k, _)| !k.is_empty()).map(|(k, &n)| (k.clone(), n)).collect();
        return ProcessTree::Xor(vec![ProcessTree::Silent, mine(&rest, alphabet)]);
    }
    if acts.len() == 1 {
        let a = alphabet[*acts.first().unwrap() as usize].clone();
        return if variants.keys().all(|k| k.len() == 1) {
            ProcessTree::Leaf(a)
        } else {
            // Runs of a single activity: a, then optionally again.
            ProcessTree::Loop(vec![ProcessTree::Leaf(a), ProcessTree::Silent])
        };
    }

    let (edges, starts, ends) = dfg_of(variants);

    if let Some(parts) = xor_cut(&acts, &edges) {
        let children = split_xor(variants, &parts)
            .iter()
            .map(|v| mine(v, alphabet))
            .collect();
        return ProcessTree::Xor(children);
    }
    if let Some(parts) = sequence_cut(&acts, &edges) {
        let children = split_projecting(variants, &parts)
            .iter()
            .map(|v| mine(v, alphabet))
            .collect();
        return ProcessTree::Sequence(children);
    }
    if let Some(parts) = parallel_cut(&acts, &edges, &starts, &ends) {
        let children = split_projecting(variants, &parts)
            .iter()
            .map(|v| mine(v, alphabet))
            .collect();
        return ProcessTree::Parallel(children);
    }
    if let Some(parts) = loop_cut(&acts, &edges, &starts, &ends) {
        let children = split_loop(variants, &parts)
            .iter()
            .map(|v| mine(v, alphabet))
            .collect();
        return ProcessTree::Loop(children);
    }

    // Flower model: any interleaving of the activities seen here.
    let mut children = vec![ProcessTree::Silent];
    children.extend(acts.iter().map(|&a| ProcessTree::Leaf(alphabet[a as usize].clone())));
    ProcessTree::Loop(children)
}

fn dfg_of(variants: &Variants) -> (BTreeSet<(u32, u32)>, BTreeSet<u32>, BTreeSet<u32>) {
    let mut edges = BTreeSet::new();
    let mut starts = BTreeSet::new();
    let mut ends = BTreeSet::new();
    for seq in variants.keys() {
        if let (Some(&first), Some(&last)) = (seq.first(), seq.last()) {
            starts.insert(first);
            ends.insert(last);
        }
        for w in seq.windows(2) {
            edges.insert((w[0], w[1]));
        }
    }
    (edges, starts, ends)
}

/// Connected components of the undirected view; ≥ 2 components form an
/// exclusive-choice cut.
fn xor_cut(acts: &BTreeSet<u32>, edges: &BTreeSet<(u32, u32)>) -> Option<Vec<BTreeSet<u32>>> {
    let order: Vec<u32> = acts.iter().copied().collect();
    let pos: HashMap<u32, usize> = order.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut dsu: UnionFind<usize> = UnionFind::new(order.len());
    for (a, b) in edges {
        dsu.union(pos[a], pos[b]);
    }
    let parts = components(&order, &mut dsu);
    (parts.len() > 1).then_some(parts)
}

/// Strongly connected components merged where mutually unreachable, kept
/// only if the result is a totally ordered partition.
fn sequence_cut(acts: &BTreeSet<u32>, edges: &BTreeSet<(u32, u32)>) -> Option<Vec<BTreeSet<u32>>> {
    let order: Vec<u32> = acts.iter().copied().collect();
    let pos: HashMap<u32, usize> = order.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut graph: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<_> = order.iter().map(|_| graph.add_node(())).collect();
    for (a, b) in edges {
        graph.add_edge(nodes[pos[a]], nodes[pos[b]], ());
    }
    let sccs = petgraph::algo::tarjan_scc(&graph);
    let mut scc_of = vec![0usize; order.len()];
    for (id, scc) in sccs.iter().enumerate() {
        for &n in scc {
            scc_of[n.index()] = id;
        }
    }
    let k = sccs.len();
    if k < 2 {
        return None;
    }

    // Transitive reachability between components.
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for (a, b) in edges {
        let (ga, gb) = (scc_of[pos[a]], scc_of[pos[b]]);
        if ga != gb {
            succ[ga].insert(gb);
        }
    }
    let reach = |from: usize, succ: &[BTreeSet<usize>]| -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<usize> = succ[from].iter().copied().collect();
        while let Some(g) = queue.pop_front() {
            if seen.insert(g) {
                queue.extend(succ[g].iter().copied());
            }
        }
        seen
    };
    let reaches: Vec<BTreeSet<usize>> = (0..k).map(|g| reach(g, &succ)).collect();

    // Components with no order between them cannot be separated by a
    // sequence: merge them into one part.
    let mut dsu: UnionFind<usize> = UnionFind::new(k);
    for i in 0..k {
        for j in (i + 1)..k {
            if !reaches[i].contains(&j) && !reaches[j].contains(&i) {
                dsu.union(i, j);
            }
        }
    }
    let mut merged: BTreeMap<usize, (BTreeSet<u32>, BTreeSet<usize>)> = BTreeMap::new();
    for g in 0..k {
        let entry = merged.entry(dsu.find(g)).or_default();
        entry.0.extend(sccs[g].iter().map(|n| order[n.index()]));
        entry.1.insert(g);
    }
    if merged.len() < 2 {
        return None;
    }
    let merged: Vec<(BTreeSet<u32>, BTreeSet<usize>)> = merged.into_values().collect();
    let reaches_part = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| {
        a.iter().any(|&i| b.iter().any(|&j| reaches[i].contains(&j)))
    };
    let mut parts: Vec<(BTreeSet<u32>, BTreeSet<usize>)> = merged;
    let snapshot = parts_snapshot(&parts);
    parts.sort_by_key(|(_, groups)| parts_predecessors(groups, &snapshot, &reaches));
    // The merge must have produced a total order; bail out otherwise.
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            if !reaches_part(&parts[i].1, &parts[j].1) || reaches_part(&parts[j].1, &parts[i].1) {
                return None;
            }
        }
    }
    Some(parts.into_iter().map(|(acts, _)| acts).collect())
}

fn parts_snapshot(parts: &[(BTreeSet<u32>, BTreeSet<usize>)]) -> Vec<BTreeSet<usize>> {
    parts.iter().map(|(_, g)| g.clone()).collect()
}

fn parts_predecessors(
    groups: &BTreeSet<usize>,
    all: &[BTreeSet<usize>],
    reaches: &[BTreeSet<usize>],
) -> usize {
    all.iter()
        .filter(|other| {
            other != &groups
                && other.iter().any(|&i| groups.iter().any(|&j| reaches[i].contains(&j)))
        })
        .count()
}

/// Components of the graph connecting activities that are NOT mutually
/// directly-following; every part must contain a start and an end activity.
fn parallel_cut(
    acts: &BTreeSet<u32>,
    edges: &BTreeSet<(u32, u32)>,
    starts: &BTreeSet<u32>,
    ends: &BTreeSet<u32>,
) -> Option<Vec<BTreeSet<u32>>> {
    let order: Vec<u32> = acts.iter().copied().collect();
    let mut dsu: UnionFind<usize> = UnionFind::new(order.len());
    for (i, &a) in order.iter().enumerate() {
        for (j, &b) in order.iter().enumerate().skip(i + 1) {
            let mutual = edges.contains(&(a, b)) && edges.contains(&(b, a));
            if !mutual {
                dsu.union(i, j);
            }
        }
    }
    let parts = components(&order, &mut dsu);
    if parts.len() < 2 {
        return None;
    }
    let valid = parts
        .iter()
        .all(|p| p.iter().any(|a| starts.contains(a)) && p.iter().any(|a| ends.contains(a)));
    valid.then_some(parts)
}

/// Body = all start and end activities; the rest splits into redo
/// components, each entered only from ends and leaving only into starts.
fn loop_cut(
    acts: &BTreeSet<u32>,
    edges: &BTreeSet<(u32, u32)>,
    starts: &BTreeSet<u32>,
    ends: &BTreeSet<u32>,
) -> Option<Vec<BTreeSet<u32>>> {
    let body: BTreeSet<u32> = starts.union(ends).copied().collect();
    let rest: Vec<u32> = acts.difference(&body).copied().collect();
    if rest.is_empty() {
        return None;
    }
    let pos: HashMap<u32, usize> = rest.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut dsu: UnionFind<usize> = UnionFind::new(rest.len());
    for (a, b) in edges {
        if let (Some(&i), Some(&j)) = (pos.get(a), pos.get(b)) {
            dsu.union(i, j);
        }
    }
    let redo_parts = components(&rest, &mut dsu);

    // Boundary arcs may only leave the body at an end activity and re-enter
    // at a start activity.
    for (a, b) in edges {
        let a_body = body.contains(a);
        let b_body = body.contains(b);
        if a_body && !b_body && !ends.contains(a) {
            return None;
        }
        if !a_body && b_body && !starts.contains(b) {
            return None;
        }
    }
    // Each redo entry point must be reachable from every end, and each redo
    // exit point must reach every start, or the loop body would constrain
    // which iteration paths are allowed.
    for part in &redo_parts {
        for &r in part {
            if ends.iter().any(|&e| edges.contains(&(e, r)))
                && !ends.iter().all(|&e| edges.contains(&(e, r)))
            {
                return None;
            }
            if starts.iter().any(|&s| edges.contains(&(r, s)))
                && !starts.iter().all(|&s| edges.contains(&(r, s)))
            {
                return None;
            }
        }
    }

    let mut parts = vec![body];
    parts.extend(redo_parts);
    Some(parts)
}

fn components(order: &[u32], dsu: &mut UnionFind<usize>) -> Vec<BTreeSet<u32>> {
    let mut map: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
    for (i, &a) in order.iter().enumerate() {
        map.entry(dsu.find(i)).or_default().insert(a);
    }
    let mut parts: Vec<BTreeSet<u32>> = map.into_values().collect();
    parts.sort_by_key(|p| *p.first().unwrap());
    parts
}

/// Each variant goes, whole, to the part containing its activities.
fn split_xor(variants: &Variants, parts: &[BTreeSet<u32>]) -> Vec<Variants> {
    let mut out = vec![Variants::new(); parts.len()];
    for (seq, &n) in variants {
        let first = seq.first().expect("empty variants were peeled off");
        let k = parts.iter().position(|p| p.contains(first)).expect("partition covers acts");
        *out[k].entry(seq.clone()).or_insert(0) += n;
    }
    out
}

/// Project every variant onto each part's activities. For a sequence cut
/// the projection is exactly the contiguous segment; for a parallel cut it
/// is the part's interleaved subsequence.
fn split_projecting(variants: &Variants, parts: &[BTreeSet<u32>]) -> Vec<Variants> {
    let mut out = vec![Variants::new(); parts.len()];
    for (seq, &n) in variants {
        for (k, part) in parts.iter().enumerate() {
            let proj: Vec<u32> = seq.iter().copied().filter(|a| part.contains(a)).collect();
            *out[k].entry(proj).or_insert(0) += n;
        }
    }
    out
}

/// Cut each variant into maximal runs inside one part; body runs go to the
/// body child, redo runs to their component's child.
fn split_loop(variants: &Variants, parts: &[BTreeSet<u32>]) -> Vec<Variants> {
    let mut out = vec![Variants::new(); parts.len()];
    let part_of = |a: u32| parts.iter().position(|p| p.contains(&a)).expect("partition");
    for (seq, &n) in variants {
        let mut current = 0usize;
        let mut run: Vec<u32> = Vec::new();
        for &e in seq {
            let k = part_of(e);
            if k != current && !run.is_empty() {
                *out[current].entry(std::mem::take(&mut run)).or_insert(0) += n;
            }
            current = k;
            run.push(e);
        }
        *out[current].entry(run).or_insert(0) += n;
    }
    out
}

/// Language-preserving cleanups: flatten nested same-operator nodes, drop
/// silent children where they are the identity, collapse trivial operators.
fn reduce(tree: ProcessTree) -> ProcessTree {
    match tree {
        ProcessTree::Leaf(_) | ProcessTree::Silent => tree,
        ProcessTree::Sequence(cs) => {
            let mut out = Vec::new();
            for c in cs.into_iter().map(reduce) {
                match c {
                    ProcessTree::Sequence(inner) => out.extend(inner),
                    ProcessTree::Silent => {}
                    other => out.push(other),
                }
            }
            collapse(out, ProcessTree::Sequence)
        }
        ProcessTree::Parallel(cs) => {
            let mut out = Vec::new();
            for c in cs.into_iter().map(reduce) {
                match c {
                    ProcessTree::Parallel(inner) => out.extend(inner),
                    ProcessTree::Silent => {}
                    other => out.push(other),
                }
            }
            collapse(out, ProcessTree::Parallel)
        }
        ProcessTree::Xor(cs) => {
            let mut out: Vec<ProcessTree> = Vec::new();
            for c in cs.into_iter().map(reduce) {
                match c {
                    ProcessTree::Xor(inner) => {
                        for i in inner {
                            if !out.contains(&i) {
                                out.push(i);
                            }
                        }
                    }
                    other => {
                        if !out.contains(&other) {
                            out.push(other);
                        }
                    }
                }
            }
            collapse(out, ProcessTree::Xor)
        }
        ProcessTree::Loop(cs) => {
            let mut cs: Vec<ProcessTree> = cs.into_iter().map(reduce).collect();
            if cs.len() <= 1 {
                // No redo part: the loop runs its body exactly once.
                return cs.pop().unwrap_or(ProcessTree::Silent);
            }
            ProcessTree::Loop(cs)
        }
    }
}

fn collapse(mut children: Vec<ProcessTree>, op: fn(Vec<ProcessTree>) -> ProcessTree) -> ProcessTree {
    match children.len() {
        0 => ProcessTree::Silent,
        1 => children.pop().unwrap(),
        _ => op(children),
    }
}

/// Translate a process tree to an accepting Petri net with one source and
/// one sink place. Loops and parallel blocks are isolated behind silent
/// transitions so sibling branches cannot observe their internal tokens.
pub fn tree_to_petri(tree: &ProcessTree) -> AcceptingPetriNet {
    let mut b = Builder { net: PetriNet::new(), places: 0, taus: 0 };
    let source = b.place_named("source");
    let sink = b.place_named("sink");
    b.build(tree, &source, &sink);
    AcceptingPetriNet::new(b.net, Marking::single(&source), Marking::single(&sink))
        .expect("construction keeps markings on places")
}

struct Builder {
    net: PetriNet,
    places: usize,
    taus: usize,
}

impl Builder {
    fn place_named(&mut self, name: &str) -> String {
        let id = fresh_id(&self.net, name.to_owned());
        self.net.add_place(&id).expect("fresh place id");
        id
    }

    fn place(&mut self) -> String {
        let id = fresh_id(&self.net, format!("p{}", self.places));
        self.places += 1;
        self.net.add_place(&id).expect("fresh place id");
        id
    }

    fn tau(&mut self) -> String {
        let id = fresh_id(&self.net, format!("tau_{}", self.taus));
        self.taus += 1;
        self.net.add_transition(&id, None).expect("fresh transition id");
        id
    }

    fn visible(&mut self, label: &str) -> String {
        let id = fresh_id(&self.net, label.to_owned());
        self.net.add_transition(&id, Some(label)).expect("fresh transition id");
        id
    }

    fn arc(&mut self, from: &str, to: &str) {
        self.net.add_arc(from, to).expect("arcs connect existing fresh nodes");
    }

    fn build(&mut self, tree: &ProcessTree, entry: &str, exit: &str) {
        match tree {
            ProcessTree::Leaf(label) => {
                let t = self.visible(label);
                self.arc(entry, &t);
                self.arc(&t, exit);
            }
            ProcessTree::Silent => {
                let t = self.tau();
                self.arc(entry, &t);
                self.arc(&t, exit);
            }
            ProcessTree::Sequence(cs) if cs.is_empty() => self.build(&ProcessTree::Silent, entry, exit),
            ProcessTree::Sequence(cs) => {
                let mut current = entry.to_owned();
                for child in &cs[..cs.len() - 1] {
                    let mid = self.place();
                    self.build(child, &current, &mid);
                    current = mid;
                }
                self.build(cs.last().unwrap(), &current, exit);
            }
            ProcessTree::Xor(cs) if cs.is_empty() => self.build(&ProcessTree::Silent, entry, exit),
            ProcessTree::Xor(cs) => {
                for child in cs {
                    self.build(child, entry, exit);
                }
            }
            ProcessTree::Parallel(cs) if cs.is_empty() => {
                self.build(&ProcessTree::Silent, entry, exit)
            }
            ProcessTree::Parallel(cs) => {
                let fork = self.tau();
                let join = self.tau();
                self.arc(entry, &fork);
                self.arc(&join, exit);
                for child in cs {
                    let inp = self.place();
                    let out = self.place();
                    self.arc(&fork, &inp);
                    self.build(child, &inp, &out);
                    self.arc(&out, &join);
                }
            }
            ProcessTree::Loop(cs) if cs.is_empty() => self.build(&ProcessTree::Silent, entry, exit),
            ProcessTree::Loop(cs) => {
                let inp = self.place();
                let out = self.place();
                let enter = self.tau();
                let leave = self.tau();
                self.arc(entry, &enter);
                self.arc(&enter, &inp);
                self.arc(&out, &leave);
                self.arc(&leave, exit);
                self.build(&cs[0], &inp, &out);
                for redo in &cs[1..] {
                    self.build(redo, &out, &inp);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::is_workflow_net;

    fn mine_log(seqs: Vec<Vec<&str>>) -> ProcessTree {
        let log = EventLog::from_activity_sequences(seqs);
        inductive_miner(&log, &Classifier::default()).unwrap()
    }

    #[test]
    fn l1_tree_is_sequence_of_choice() {
        let tree = mine_log(vec![
            vec!["a", "b", "d"],
            vec!["a", "c", "d"],
            vec!["a", "b", "d"],
            vec!["a", "c", "d"],
            vec!["a", "b", "d"],
        ]);
        assert_eq!(tree.to_string(), "sequence(a, xor(b, c), d)");
        assert_eq!(
            tree,
            ProcessTree::Sequence(vec![
                ProcessTree::Leaf("a".into()),
                ProcessTree::Xor(vec![
                    ProcessTree::Leaf("b".into()),
                    ProcessTree::Leaf("c".into()),
                ]),
                ProcessTree::Leaf("d".into()),
            ])
        );
    }

    #[test]
    fn single_activity_becomes_a_leaf() {
        assert_eq!(mine_log(vec![vec!["a"]]), ProcessTree::Leaf("a".into()));
    }

    #[test]
    fn repeated_single_activity_becomes_a_loop() {
        let tree = mine_log(vec![vec!["a"], vec!["a", "a", "a"]]);
        assert_eq!(tree.to_string(), "loop(a, tau)");
    }

    #[test]
    fn empty_trace_adds_a_silent_choice() {
        let tree = mine_log(vec![vec!["a"], vec![]]);
        assert_eq!(tree.to_string(), "xor(tau, a)");
    }

    #[test]
    fn interleaving_becomes_parallel() {
        let tree = mine_log(vec![vec!["a", "b"], vec!["b", "a"]]);
        assert_eq!(tree.to_string(), "parallel(a, b)");
    }

    #[test]
    fn repeating_block_becomes_a_loop() {
        let tree = mine_log(vec![vec!["a"], vec!["a", "b", "a"]]);
        assert_eq!(tree.to_string(), "loop(a, b)");
    }

    #[test]
    fn unstructured_log_falls_back_to_a_flower() {
        let tree = mine_log(vec![vec!["a", "b", "c"], vec!["c", "a"], vec!["b"]]);
        assert_eq!(tree.to_string(), "loop(tau, a, b, c)");
    }

    #[test]
    fn empty_log_is_rejected() {
        let err = inductive_miner(&EventLog::new(), &Classifier::default());
        assert!(err.is_err());
    }

    #[test]
    fn only_empty_traces_mine_to_silent() {
        assert_eq!(mine_log(vec![vec![], vec![]]), ProcessTree::Silent);
    }

    #[test]
    fn l1_tree_converts_to_the_alpha_shaped_net() {
        let tree = mine_log(vec![
            vec!["a", "b", "d"],
            vec!["a", "c", "d"],
            vec!["a", "b", "d"],
            vec!["a", "c", "d"],
            vec!["a", "b", "d"],
        ]);
        let apn = tree_to_petri(&tree);
        assert_eq!(apn.net.num_places(), 4);
        assert_eq!(apn.net.num_transitions(), 4);
        assert_eq!(apn.net.num_arcs(), 8);
        assert!(is_workflow_net(&apn.net).is_workflow_net);
    }

    #[test]
    fn parallel_net_shape() {
        let apn = tree_to_petri(&ProcessTree::Parallel(vec![
            ProcessTree::Leaf("a".into()),
            ProcessTree::Leaf("b".into()),
        ]));
        assert_eq!(apn.net.num_places(), 6);
        assert_eq!(apn.net.num_transitions(), 4);
        assert_eq!(apn.net.num_arcs(), 10);
        assert!(is_workflow_net(&apn.net).is_workflow_net);
    }

    #[test]
    fn loop_net_shape() {
        let apn = tree_to_petri(&ProcessTree::Loop(vec![
            ProcessTree::Leaf("a".into()),
            ProcessTree::Leaf("b".into()),
        ]));
        assert_eq!(apn.net.num_places(), 4);
        assert_eq!(apn.net.num_transitions(), 4);
        assert_eq!(apn.net.num_arcs(), 8);
        assert!(is_workflow_net(&apn.net).is_workflow_net);
    }

    #[test]
    fn label_colliding_with_structural_ids_is_handled() {
        let tree = ProcessTree::Sequence(vec![
            ProcessTree::Leaf("source".into()),
            ProcessTree::Leaf("p0".into()),
        ]);
        let apn = tree_to_petri(&tree);
        assert!(is_workflow_net(&apn.net).is_workflow_net);
        let labels: Vec<&str> =
            apn.net.transitions().iter().filter_map(|(_, l)| l.as_deref()).collect();
        assert!(labels.contains(&"source") && labels.contains(&"p0"));
    }
}
