//! Arc-degree simplicity and replay-based generalization.

use super::{token_replay, ReplayParams, ReplayResult};
use crate::error::{Error, Result};
use crate::event_log::{Classifier, EventLog};
use crate::petri::{AcceptingPetriNet, PetriNet};

/// Degree offset at which simplicity starts to decay: a strictly sequential
/// net has mean degree 2 and scores 1.0.
pub const DEFAULT_SIMPLICITY_K: f64 = 2.0;

/// simplicity = 1 / (1 + max(0, mean_degree − 2)).
pub fn simplicity_arc_degree(net: &PetriNet) -> Result<f64> {
    simplicity_arc_degree_with(net, DEFAULT_SIMPLICITY_K)
}

/// simplicity with a custom degree offset `k`.
pub fn simplicity_arc_degree_with(net: &PetriNet, k: f64) -> Result<f64> {
    if net.num_places() + net.num_transitions() == 0 {
        return Err(Error::Degenerate("simplicity of an empty net is undefined".into()));
    }
    let mean = net.degree_stats().mean_degree;
    Ok(1.0 / (1.0 + (mean - k).max(0.0)))
}

/// generalization = 1 − (Σ_t exec(t)^(−1/2)) / |visible transitions|, where
/// exec(t) counts firings of visible transition t over the whole log and a
/// never-fired transition contributes a full 1 to the sum. A net without
/// visible transitions scores 0.
pub fn generalization(
    log: &EventLog,
    classifier: &Classifier,
    apn: &AcceptingPetriNet,
    params: &ReplayParams,
) -> Result<f64> {
    let rr = token_replay(log, classifier, apn, params)?;
    Ok(generalization_from_replay(&rr, apn))
}

/// Generalization from an existing replay of the same log and net.
pub fn generalization_from_replay(rr: &ReplayResult, apn: &AcceptingPetriNet) -> f64 {
    let visible: Vec<&str> = apn
        .net
        .transitions()
        .iter()
        .filter(|(_, label)| label.is_some())
        .map(|(id, _)| id.as_str())
        .collect();
    if visible.is_empty() {
        return 0.0;
    }
    let sum: f64 = visible
        .iter()
        .map(|id| match rr.executions.get(*id).copied().unwrap_or(0) {
            0 => 1.0,
            n => 1.0 / (n as f64).sqrt(),
        })
        .sum();
    1.0 - sum / visible.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::alpha_miner;

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
    fn sequential_net_scores_one() {
        let apn = alpha_miner(&l1(), &Classifier::default()).unwrap();
        assert_eq!(apn.net.degree_stats().mean_degree, 2.0);
        assert_eq!(simplicity_arc_degree(&apn.net).unwrap(), 1.0);
    }

    #[test]
    fn dense_net_scores_by_excess_degree() {
        // 2 places, 2 transitions, full bipartite both ways: 8 arcs over 4
        // nodes gives mean degree 4 and simplicity 1/3.
        let mut net = PetriNet::new();
        for p in ["p1", "p2"] {
            net.add_place(p).unwrap();
        }
        for t in ["t1", "t2"] {
            net.add_transition(t, Some(t)).unwrap();
        }
        for p in ["p1", "p2"] {
            for t in ["t1", "t2"] {
                net.add_arc(p, t).unwrap();
                net.add_arc(t, p).unwrap();
            }
        }
        let s = simplicity_arc_degree(&net).unwrap();
        assert!((s - 1.0 / 3.0).abs() < 1e-12);
        // A larger offset k forgives the density.
        assert_eq!(simplicity_arc_degree_with(&net, 4.0).unwrap(), 1.0);
    }

    #[test]
    fn empty_net_is_an_error() {
        assert!(simplicity_arc_degree(&PetriNet::new()).is_err());
    }

    #[test]
    fn generalization_matches_the_execution_profile() {
        let apn = alpha_miner(&l1(), &Classifier::default()).unwrap();
        let g = generalization(&l1(), &Classifier::default(), &apn, &ReplayParams::default())
            .unwrap();
        // exec = {a:5, b:3, c:2, d:5}:
        // 1 − (5^-½ + 3^-½ + 2^-½ + 5^-½)/4
        let expected = 1.0
            - (5.0f64.powf(-0.5) + 3.0f64.powf(-0.5) + 2.0f64.powf(-0.5) + 5.0f64.powf(-0.5))
                / 4.0;
        assert!((g - expected).abs() < 1e-12);
        assert!((g - 0.455278939655977).abs() < 1e-12);
    }

    #[test]
    fn single_firing_everywhere_scores_zero() {
        let log = EventLog::from_activity_sequences(vec![vec!["a", "b", "d"]]);
        let apn = alpha_miner(
            &EventLog::from_activity_sequences(vec![vec!["a", "b", "d"]]),
            &Classifier::default(),
        )
        .unwrap();
        let g = generalization(&log, &Classifier::default(), &apn, &ReplayParams::default())
            .unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn unexecuted_transitions_penalize_fully() {
        // Replay only the b-variant: c never fires and contributes a full 1
        // while a, b, d each contribute 4^-½.
        let apn = alpha_miner(&l1(), &Classifier::default()).unwrap();
        let log = EventLog::from_activity_sequences(vec![vec!["a", "b", "d"]; 4]);
        let g = generalization(&log, &Classifier::default(), &apn, &ReplayParams::default())
            .unwrap();
        let expected = 1.0 - (0.5 + 0.5 + 1.0 + 0.5) / 4.0;
        assert!((g - expected).abs() < 1e-12);
    }
}
