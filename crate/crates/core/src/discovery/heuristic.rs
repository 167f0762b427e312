//! Heuristic miner: dependency graph construction and its conversion to an
//! accepting Petri net.
//!
//! The dependency measure for a ≠ b is (|a>b| − |b>a|) / (|a>b| + |b>a| + 1);
//! length-one loops score |a>a| / (|a>a| + 1) and length-two loops
//! (|a>>b| + |b>>a|) / (|a>>b| + |b>>a| + 1), where a>>b counts the pattern
//! a,b,a. Edges are kept at or above the configured thresholds; with
//! `all_connected`, every activity additionally keeps its strongest incoming
//! and outgoing edge so the graph stays navigable on noisy logs.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petgraph::unionfind::UnionFind;

use super::{fresh_id, MinerParams};
use crate::error::{Error, Result};
use crate::event_log::{activity_sequence, Classifier, EventLog};
use crate::petri::{AcceptingPetriNet, Marking, PetriNet};
use crate::stats::directly_follows;

/// Dependency graph mined from a log: the raw measures plus the edge set
/// retained under the thresholds in `params`.
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyGraph {
    /// Activity → total occurrences.
    pub activities: BTreeMap<String, u64>,
    /// Directly-follows counts the measures derive from.
    pub dfg: BTreeMap<(String, String), u64>,
    /// (a, b) → dependency measure, both orientations, a ≠ b.
    pub dependency: BTreeMap<(String, String), f64>,
    /// a → length-one-loop measure (only activities with a > a observed).
    pub loop1: BTreeMap<String, f64>,
    /// (a, b) → length-two-loop measure, both orientations.
    pub loop2: BTreeMap<(String, String), f64>,
    /// Retained edges, including (a, a) self-loops and both directions of a
    /// retained length-two loop.
    pub edges: BTreeSet<(String, String)>,
    /// Activity → number of traces it starts.
    pub starts: BTreeMap<String, u64>,
    /// Activity → number of traces it ends.
    pub ends: BTreeMap<String, u64>,
    /// The thresholds the edge set was built with.
    pub params: MinerParams,
}

impl DependencyGraph {
    /// Dependency measure of (a, b); 0 when the pair was never observed in
    /// either direction.
    pub fn dependency(&self, a: &str, b: &str) -> f64 {
        self.dependency
            .get(&(a.to_owned(), b.to_owned()))
            .copied()
            .unwrap_or(0.0)
    }

    fn df(&self, a: &str, b: &str) -> u64 {
        self.dfg.get(&(a.to_owned(), b.to_owned())).copied().unwrap_or(0)
    }
}

pub fn heuristic_miner(
    log: &EventLog,
    classifier: &Classifier,
    params: &MinerParams,
) -> Result<DependencyGraph> {
    params.validate()?;
    if log.traces.is_empty() {
        return Err(Error::InvalidInput("heuristic miner requires a nonempty log".into()));
    }
    let dfg = directly_follows(log, classifier)?;

    // a >> b: occurrences of the length-two-loop pattern a,b,a.
    let mut triples: BTreeMap<(String, String), u64> = BTreeMap::new();
    for trace in &log.traces {
        let labels = activity_sequence(trace, classifier)?;
        for w in labels.windows(3) {
            if w[0] == w[2] && w[0] != w[1] {
                *triples.entry((w[0].clone(), w[1].clone())).or_insert(0) += 1;
            }
        }
    }

    let mut dependency: BTreeMap<(String, String), f64> = BTreeMap::new();
    for ((a, b), &ab) in &dfg.edges {
        if a == b {
            continue;
        }
        let ba = dfg.edge(b, a);
        let denom = (ab + ba + 1) as f64;
        dependency.insert((a.clone(), b.clone()), (ab as f64 - ba as f64) / denom);
        dependency.insert((b.clone(), a.clone()), (ba as f64 - ab as f64) / denom);
    }

    let mut loop1: BTreeMap<String, f64> = BTreeMap::new();
    for ((a, b), &n) in &dfg.edges {
        if a == b {
            loop1.insert(a.clone(), n as f64 / (n + 1) as f64);
        }
    }

    let mut loop2: BTreeMap<(String, String), f64> = BTreeMap::new();
    for (a, b) in triples.keys() {
        let aba = triples.get(&(a.clone(), b.clone())).copied().unwrap_or(0);
        let bab = triples.get(&(b.clone(), a.clone())).copied().unwrap_or(0);
        let v = (aba + bab) as f64 / (aba + bab + 1) as f64;
        loop2.insert((a.clone(), b.clone()), v);
        loop2.insert((b.clone(), a.clone()), v);
    }

    let mut edges: BTreeSet<(String, String)> = dependency
        .iter()
        .filter(|(_, &v)| v >= params.dependency_threshold)
        .map(|(k, _)| k.clone())
        .collect();
    for (a, &v) in &loop1 {
        if v >= params.dependency_threshold {
            edges.insert((a.clone(), a.clone()));
        }
    }
    for ((a, b), &v) in &loop2 {
        if v >= params.loop2_threshold {
            edges.insert((a.clone(), b.clone()));
        }
    }

    if params.all_connected {
        let activities: Vec<&String> = dfg.activities.keys().collect();
        for x in &activities {
            let strongest_out = dfg
                .edges
                .iter()
                .filter(|((a, b), _)| a == *x && b != *x)
                .map(|((_, b), _)| (dependency[&((*x).clone(), b.clone())], b))
                // Highest dependency wins; ties go to the smaller label, so
                // f64 comparison over finite measures is total here.
                .max_by(|(va, ba), (vb, bb)| va.partial_cmp(vb).unwrap().then(bb.cmp(ba)));
            if let Some((_, b)) = strongest_out {
                edges.insert(((*x).clone(), b.clone()));
            }
            let strongest_in = dfg
                .edges
                .iter()
                .filter(|((a, b), _)| b == *x && a != *x)
                .map(|((a, _), _)| (dependency[&(a.clone(), (*x).clone())], a))
                .max_by(|(va, aa), (vb, ab)| va.partial_cmp(vb).unwrap().then(ab.cmp(aa)));
            if let Some((_, a)) = strongest_in {
                edges.insert((a.clone(), (*x).clone()));
            }
        }
    }

    Ok(DependencyGraph {
        activities: dfg.activities.clone(),
        dfg: dfg.edges.clone(),
        dependency,
        loop1,
        loop2,
        edges,
        starts: dfg.starts.clone(),
        ends: dfg.ends.clone(),
        params: *params,
    })
}

/// A neighbour on one side of an activity: another activity, or the virtual
/// boundary (source on the input side, sink on the output side).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Peer {
    Act(String),
    Boundary,
}

/// Where one end of an edge plugs in: a transition (arc meets it directly)
/// or a place (arc attaches to the place).
#[derive(Debug, Clone)]
enum Endpoint {
    Trans(String),
    Place(String),
}

/// Convert a dependency graph to an accepting Petri net.
///
/// Each activity becomes a labeled transition. On each side of an activity
/// its neighbours are grouped into concurrent bundles by the AND-measure
/// (two successors b, c of a are concurrent when
/// (|b>c| + |c>b|) / (|a>b| + |a>c| + 1) ≥ and_threshold); distinct bundles
/// are exclusive alternatives sharing one choice place, while members of one
/// bundle are forked/joined, with silent transitions inserted where a
/// bundle has more than one member. Self-loops and the virtual source/sink
/// boundaries are singleton bundles.
pub fn heuristic_net_to_petri(dg: &DependencyGraph) -> Result<AcceptingPetriNet> {
    if dg.activities.is_empty() {
        return Err(Error::InvalidInput("dependency graph has no activities".into()));
    }
    check_connected(dg)?;

    let mut net = PetriNet::new();
    let mut trans_id: BTreeMap<&str, String> = BTreeMap::new();
    for a in dg.activities.keys() {
        let id = fresh_id(&net, a.clone());
        net.add_transition(&id, Some(a))?;
        trans_id.insert(a, id);
    }
    let source = fresh_id(&net, "source".to_owned());
    net.add_place(&source)?;
    let sink = fresh_id(&net, "sink".to_owned());
    net.add_place(&sink)?;

    let out_groups = side_groups(dg, Side::Out);
    let in_groups = side_groups(dg, Side::In);

    // Lazily created split/join structure per activity, memoized so every
    // edge of the same bundle shares it.
    let mut split_place: HashMap<String, String> = HashMap::new();
    let mut join_place: HashMap<String, String> = HashMap::new();
    let mut split_tau: HashMap<(String, usize), String> = HashMap::new();
    let mut join_tau: HashMap<(String, usize), String> = HashMap::new();

    // Every directed connection to wire, in deterministic order: activity
    // edges, then boundary edges.
    let mut connections: Vec<(Peer, Peer)> = Vec::new();
    for (a, b) in &dg.edges {
        connections.push((Peer::Act(a.clone()), Peer::Act(b.clone())));
    }
    for s in dg.starts.keys() {
        connections.push((Peer::Boundary, Peer::Act(s.clone())));
    }
    for e in dg.ends.keys() {
        connections.push((Peer::Act(e.clone()), Peer::Boundary));
    }

    for (from, to) in connections {
        let producer = match &from {
            Peer::Boundary => Endpoint::Place(source.clone()),
            Peer::Act(a) => {
                let groups = &out_groups[a.as_str()];
                if groups.len() == 1 {
                    Endpoint::Trans(trans_id[a.as_str()].clone())
                } else {
                    let gi = group_of(groups, &to);
                    let place = split_place.entry(a.clone()).or_insert_with(|| {
                        let id = fresh_id(&net, format!("p_split({a})"));
                        net.add_place(&id).expect("fresh place id");
                        net.add_arc(trans_id[a.as_str()].clone(), &id).expect("arc to split");
                        id
                    });
                    if groups[gi].len() == 1 {
                        Endpoint::Place(place.clone())
                    } else {
                        let place = place.clone();
                        let tau = split_tau.entry((a.clone(), gi)).or_insert_with(|| {
                            let id = fresh_id(
                                &net,
                                format!("tau_split({a},{})", group_name(&groups[gi])),
                            );
                            net.add_transition(&id, None).expect("fresh tau id");
                            net.add_arc(place, &id).expect("arc into split tau");
                            id
                        });
                        Endpoint::Trans(tau.clone())
                    }
                }
            }
        };
        let consumer = match &to {
            Peer::Boundary => Endpoint::Place(sink.clone()),
            Peer::Act(b) => {
                let groups = &in_groups[b.as_str()];
                if groups.len() == 1 {
                    Endpoint::Trans(trans_id[b.as_str()].clone())
                } else {
                    let gi = group_of(groups, &from);
                    let place = join_place.entry(b.clone()).or_insert_with(|| {
                        let id = fresh_id(&net, format!("p_join({b})"));
                        net.add_place(&id).expect("fresh place id");
                        net.add_arc(&id, trans_id[b.as_str()].clone()).expect("arc from join");
                        id
                    });
                    if groups[gi].len() == 1 {
                        Endpoint::Place(place.clone())
                    } else {
                        let place = place.clone();
                        let tau = join_tau.entry((b.clone(), gi)).or_insert_with(|| {
                            let id = fresh_id(
                                &net,
                                format!("tau_join({},{b})", group_name(&groups[gi])),
                            );
                            net.add_transition(&id, None).expect("fresh tau id");
                            net.add_arc(&id, place).expect("arc out of join tau");
                            id
                        });
                        Endpoint::Trans(tau.clone())
                    }
                }
            }
        };

        let from_name = peer_name(&from, &source);
        let to_name = peer_name(&to, &sink);
        match (producer, consumer) {
            (Endpoint::Trans(t1), Endpoint::Trans(t2)) => {
                let place = fresh_id(&net, format!("p({from_name},{to_name})"));
                net.add_place(&place)?;
                net.add_arc(t1, &place)?;
                net.add_arc(&place, t2)?;
            }
            (Endpoint::Trans(t), Endpoint::Place(p)) => net.add_arc(t, p)?,
            (Endpoint::Place(p), Endpoint::Trans(t)) => net.add_arc(p, t)?,
            (Endpoint::Place(p1), Endpoint::Place(p2)) => {
                let tau = fresh_id(&net, format!("tau({from_name},{to_name})"));
                net.add_transition(&tau, None)?;
                net.add_arc(p1, &tau)?;
                net.add_arc(&tau, p2)?;
            }
        }
    }

    AcceptingPetriNet::new(net, Marking::single(&source), Marking::single(&sink))
}

fn peer_name<'a>(peer: &'a Peer, boundary: &'a str) -> &'a str {
    match peer {
        Peer::Act(a) => a,
        Peer::Boundary => boundary,
    }
}

fn group_name(group: &[Peer]) -> String {
    let names: Vec<&str> = group
        .iter()
        .map(|m| match m {
            Peer::Act(a) => a.as_str(),
            Peer::Boundary => "#",
        })
        .collect();
    format!("{{{}}}", names.join(","))
}

fn group_of(groups: &[Vec<Peer>], member: &Peer) -> usize {
    groups
        .iter()
        .position(|g| g.contains(member))
        .expect("edge endpoint must be in one bundle")
}

enum Side {
    Out,
    In,
}

/// For every activity, the concurrency bundles on one side: its successors
/// (or predecessors) in the retained edge set, grouped by the AND-measure,
/// with self-loops and the boundary as singleton bundles.
fn side_groups<'a>(dg: &'a DependencyGraph, side: Side) -> BTreeMap<&'a str, Vec<Vec<Peer>>> {
    let mut out: BTreeMap<&str, Vec<Vec<Peer>>> = BTreeMap::new();
    for a in dg.activities.keys() {
        let mut peers: Vec<Peer> = Vec::new();
        for (x, y) in &dg.edges {
            match side {
                Side::Out if x == a => peers.push(Peer::Act(y.clone())),
                Side::In if y == a => peers.push(Peer::Act(x.clone())),
                _ => {}
            }
        }
        peers.sort();
        peers.dedup();
        let boundary = match side {
            Side::Out => dg.ends.contains_key(a),
            Side::In => dg.starts.contains_key(a),
        };
        if boundary {
            peers.push(Peer::Boundary);
        }

        // Union concurrent peers; self-loops and the boundary stay alone.
        let mut dsu: UnionFind<usize> = UnionFind::new(peers.len());
        for i in 0..peers.len() {
            for j in (i + 1)..peers.len() {
                let (Peer::Act(x), Peer::Act(y)) = (&peers[i], &peers[j]) else { continue };
                if x == a || y == a {
                    continue;
                }
                let pair = dg.df(x, y) + dg.df(y, x);
                let base = match side {
                    Side::Out => dg.df(a, x) + dg.df(a, y),
                    Side::In => dg.df(x, a) + dg.df(y, a),
                };
                let and_measure = pair as f64 / (base + 1) as f64;
                if and_measure >= dg.params.and_threshold {
                    dsu.union(i, j);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<Peer>> = BTreeMap::new();
        for (i, peer) in peers.iter().enumerate() {
            groups.entry(dsu.find(i)).or_default().push(peer.clone());
        }
        let mut groups: Vec<Vec<Peer>> = groups.into_values().collect();
        for g in &mut groups {
            g.sort();
        }
        groups.sort();
        out.insert(a.as_str(), groups);
    }
    out
}

/// Every activity must lie on a path from a start activity to an end
/// activity through the retained edges.
fn check_connected(dg: &DependencyGraph) -> Result<()> {
    let forward = closure(dg.starts.keys(), &dg.edges, false);
    let backward = closure(dg.ends.keys(), &dg.edges, true);
    let stranded: Vec<String> = dg
        .activities
        .keys()
        .filter(|a| !forward.contains(a.as_str()) || !backward.contains(a.as_str()))
        .cloned()
        .collect();
    if stranded.is_empty() {
        Ok(())
    } else {
        Err(Error::Disconnected { activities: stranded })
    }
}

fn closure<'a>(
    seeds: impl Iterator<Item = &'a String>,
    edges: &'a BTreeSet<(String, String)>,
    reverse: bool,
) -> BTreeSet<&'a str> {
    let mut seen: BTreeSet<&str> = seeds.map(String::as_str).collect();
    let mut queue: VecDeque<&str> = seen.iter().copied().collect();
    while let Some(node) = queue.pop_front() {
        for (x, y) in edges {
            let (from, to) = if reverse { (y, x) } else { (x, y) };
            if from == node && seen.insert(to) {
                queue.push_back(to);
            }
        }
    }
    seen
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

    fn mine(log: &EventLog) -> DependencyGraph {
        heuristic_miner(log, &Classifier::default(), &MinerParams::default()).unwrap()
    }

    #[test]
    fn dependency_values_on_l1() {
        let dg = mine(&l1());
        assert_eq!(dg.dependency("a", "b"), 0.75);
        assert_eq!(dg.dependency("b", "a"), -0.75);
        assert!((dg.dependency("a", "c") - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(dg.dependency("a", "d"), 0.0, "never adjacent");
    }

    #[test]
    fn zero_dependency_keeps_no_edge_at_threshold() {
        let log = EventLog::from_activity_sequences(vec![vec!["a", "b"], vec!["b", "a"]]);
        let params = MinerParams { all_connected: false, ..Default::default() };
        let dg = heuristic_miner(&log, &Classifier::default(), &params).unwrap();
        assert_eq!(dg.dependency("a", "b"), 0.0);
        assert!(dg.edges.is_empty());
    }

    #[test]
    fn l1_edges_retained_at_defaults() {
        let dg = mine(&l1());
        let want: BTreeSet<(String, String)> = [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]
            .into_iter()
            .map(|(a, b)| (a.to_owned(), b.to_owned()))
            .collect();
        assert_eq!(dg.edges, want);
    }

    #[test]
    fn loop_measures() {
        let log = EventLog::from_activity_sequences(vec![
            vec!["a", "a", "b", "c", "b", "c", "b"],
        ]);
        let dg = mine(&log);
        assert_eq!(dg.loop1["a"], 0.5);
        assert!(dg.edges.contains(&("a".to_owned(), "a".to_owned())), "l1 loop at 0.5 kept");
        // b,c,b twice plus c,b,c once: measure 3/4.
        assert_eq!(dg.loop2[&("b".to_owned(), "c".to_owned())], 0.75);
        assert!(dg.edges.contains(&("b".to_owned(), "c".to_owned())));
        assert!(dg.edges.contains(&("c".to_owned(), "b".to_owned())));
    }

    #[test]
    fn l1_converts_to_the_alpha_shaped_net() {
        let apn = heuristic_net_to_petri(&mine(&l1())).unwrap();
        assert_eq!(apn.net.num_places(), 4);
        assert_eq!(apn.net.num_transitions(), 4);
        assert_eq!(apn.net.num_arcs(), 8);
        assert!(crate::petri::is_workflow_net(&apn.net).is_workflow_net);
        // One choice place after a with two consumers, one merge place
        // before d with two producers.
        assert_eq!(apn.net.postset("p_split(a)"), vec!["b", "c"]);
        assert_eq!(apn.net.preset("p_join(d)"), vec!["b", "c"]);
    }

    #[test]
    fn single_activity_log_gives_three_nodes() {
        let log = EventLog::from_activity_sequences(vec![vec!["a"]]);
        let apn = heuristic_net_to_petri(&mine(&log)).unwrap();
        assert_eq!(apn.net.num_places(), 2);
        assert_eq!(apn.net.num_transitions(), 1);
        assert_eq!(apn.net.num_arcs(), 2);
    }

    #[test]
    fn concurrent_successors_share_one_bundle() {
        let mut seqs = Vec::new();
        for _ in 0..10 {
            seqs.push(vec!["a", "b", "c", "d"]);
            seqs.push(vec!["a", "c", "b", "d"]);
        }
        let log = EventLog::from_activity_sequences(seqs);
        let apn = heuristic_net_to_petri(&mine(&log)).unwrap();
        // a forks directly (no choice place), d joins directly: the net is
        // the standard parallel block with distinct places per branch.
        assert!(!apn.net.is_place("p_split(a)"));
        assert!(!apn.net.is_place("p_join(d)"));
        assert!(apn.net.is_place("p(a,b)"));
        assert!(apn.net.is_place("p(a,c)"));
        assert!(apn.net.is_place("p(b,d)"));
        assert!(apn.net.is_place("p(c,d)"));
        assert_eq!(apn.net.num_transitions(), 4, "no silent transitions needed");
    }

    #[test]
    fn disconnected_graph_is_reported() {
        // x only ever appears mid-trace, and its edges fall below the
        // threshold with repair off.
        let log = EventLog::from_activity_sequences(vec![
            vec!["a", "x", "b"],
            vec!["a", "b"],
            vec!["b", "x", "a"],
            vec!["b", "a"],
        ]);
        let params = MinerParams { all_connected: false, ..Default::default() };
        let dg = heuristic_miner(&log, &Classifier::default(), &params).unwrap();
        let err = heuristic_net_to_petri(&dg).unwrap_err();
        match err {
            Error::Disconnected { activities } => assert_eq!(activities, vec!["x"]),
            other => panic!("expected Disconnected, got {other:?}"),
        }
    }

    #[test]
    fn all_connected_repair_restores_reachability() {
        let log = EventLog::from_activity_sequences(vec![
            vec!["a", "x", "b"],
            vec!["a", "b"],
            vec!["b", "x", "a"],
            vec!["b", "a"],
        ]);
        let dg = mine(&log);
        assert!(heuristic_net_to_petri(&dg).is_ok());
    }

    #[test]
    fn empty_log_is_rejected() {
        let err = heuristic_miner(&EventLog::new(), &Classifier::default(), &Default::default());
        assert!(err.is_err());
    }
}
