//! The evaluation matrix: run a set of miners over one log and score every
//! resulting model on all four quality dimensions.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde_json::{json, Map, Value};

use super::{
    fitness, generalization_from_replay, precision_escaping_edges, simplicity_arc_degree,
    token_replay, PrecisionParams, ReplayParams,
};
use crate::discovery::{Miner, MinerParams};
use crate::error::Error;
use crate::event_log::{Classifier, EventLog};

/// One model-quality dimension of the evaluation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Fitness,
    Precision,
    Simplicity,
    Generalization,
}

impl Metric {
    pub fn all() -> [Metric; 4] {
        [Metric::Fitness, Metric::Precision, Metric::Simplicity, Metric::Generalization]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Fitness => "fitness",
            Metric::Precision => "precision",
            Metric::Simplicity => "simplicity",
            Metric::Generalization => "generalization",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "fitness" => Ok(Metric::Fitness),
            "precision" => Ok(Metric::Precision),
            "simplicity" => Ok(Metric::Simplicity),
            "generalization" => Ok(Metric::Generalization),
            other => Err(Error::InvalidInput(format!(
                "unknown metric '{other}' (expected fitness, precision, simplicity, or generalization)"
            ))),
        }
    }
}

/// One miner's scores. Metric fields are `None` when the step that computes
/// them failed; the first failure is recorded in `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRow {
    pub miner: String,
    pub fitness: Option<f64>,
    pub precision: Option<f64>,
    pub simplicity: Option<f64>,
    pub generalization: Option<f64>,
    pub places: Option<usize>,
    pub transitions: Option<usize>,
    pub arcs: Option<usize>,
    pub seconds: f64,
    pub error: Option<String>,
}

impl EvaluationRow {
    fn empty(miner: &str) -> Self {
        EvaluationRow {
            miner: miner.to_owned(),
            fitness: None,
            precision: None,
            simplicity: None,
            generalization: None,
            places: None,
            transitions: None,
            arcs: None,
            seconds: 0.0,
            error: None,
        }
    }

    pub fn metric(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Fitness => self.fitness,
            Metric::Precision => self.precision,
            Metric::Simplicity => self.simplicity,
            Metric::Generalization => self.generalization,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub rows: Vec<EvaluationRow>,
}

/// Discover a model with each requested miner and score it. Rows come out
/// in the fixed order alpha, alpha-plus, inductive, heuristic regardless of
/// the order (or duplication) of `miners`; a failing miner yields a row
/// carrying its error instead of aborting the rest.
pub fn evaluate(
    log: &EventLog,
    classifier: &Classifier,
    miners: &[Miner],
    params: &MinerParams,
) -> EvaluationReport {
    let rows = Miner::all()
        .into_iter()
        .filter(|m| miners.contains(m))
        .map(|miner| {
            let start = Instant::now();
            let mut row = EvaluationRow::empty(miner.name());
            let mut first_error: Option<String> = None;
            let record = |slot: &mut Option<String>, e: Error| {
                if slot.is_none() {
                    *slot = Some(e.to_string());
                }
            };
            match miner.discover(log, classifier, params) {
                Err(e) => record(&mut first_error, e),
                Ok(apn) => {
                    row.places = Some(apn.net.num_places());
                    row.transitions = Some(apn.net.num_transitions());
                    row.arcs = Some(apn.net.num_arcs());
                    match simplicity_arc_degree(&apn.net) {
                        Ok(v) => row.simplicity = Some(v),
                        Err(e) => record(&mut first_error, e),
                    }
                    match token_replay(log, classifier, &apn, &ReplayParams::default()) {
                        Ok(rr) => {
                            row.generalization = Some(generalization_from_replay(&rr, &apn));
                            match fitness(&rr) {
                                Ok(v) => row.fitness = Some(v),
                                Err(e) => record(&mut first_error, e),
                            }
                        }
                        Err(e) => record(&mut first_error, e),
                    }
                    match precision_escaping_edges(log, classifier, &apn, &PrecisionParams::default())
                    {
                        Ok(v) => row.precision = Some(v),
                        Err(e) => record(&mut first_error, e),
                    }
                }
            }
            row.error = first_error;
            row.seconds = start.elapsed().as_secs_f64();
            row
        })
        .collect();
    EvaluationReport { rows }
}

fn opt_f64(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

fn opt_usize(v: Option<usize>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

impl EvaluationReport {
    /// JSON form: {"rows":[{"miner":…, metrics…, "places":…, "transitions":…,
    /// "arcs":…}]}. Timing is included only on request so repeated runs stay
    /// byte-identical; error rows carry an "error" field.
    pub fn to_json(&self, metrics: &[Metric], include_seconds: bool) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                obj.insert("miner".into(), json!(row.miner));
                for m in metrics {
                    obj.insert(m.name().into(), opt_f64(row.metric(*m)));
                }
                obj.insert("places".into(), opt_usize(row.places));
                obj.insert("transitions".into(), opt_usize(row.transitions));
                obj.insert("arcs".into(), opt_usize(row.arcs));
                if include_seconds {
                    obj.insert("seconds".into(), json!(row.seconds));
                }
                if let Some(e) = &row.error {
                    obj.insert("error".into(), json!(e));
                }
                Value::Object(obj)
            })
            .collect();
        json!({ "rows": rows })
    }

    /// Aligned plain-text table, one row per miner.
    pub fn to_text(&self, metrics: &[Metric], include_seconds: bool) -> String {
        let mut header: Vec<String> = vec!["miner".into()];
        header.extend(metrics.iter().map(|m| m.name().to_owned()));
        header.extend(["places", "transitions", "arcs"].map(String::from));
        if include_seconds {
            header.push("seconds".into());
        }
        let fmt_metric = |v: Option<f64>| v.map_or("-".to_owned(), |x| format!("{x:.4}"));
        let fmt_size = |v: Option<usize>| v.map_or("-".to_owned(), |x| x.to_string());
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                let mut cells = vec![row.miner.clone()];
                cells.extend(metrics.iter().map(|m| fmt_metric(row.metric(*m))));
                cells.push(fmt_size(row.places));
                cells.push(fmt_size(row.transitions));
                cells.push(fmt_size(row.arcs));
                if include_seconds {
                    cells.push(format!("{:.3}", row.seconds));
                }
                cells
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(String::len).collect();
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let render = |cells: &[String], widths: &[usize], out: &mut String| {
            for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                if i == 0 {
                    out.push_str(&format!("{cell:<w$}"));
                } else {
                    out.push_str(&format!("{cell:>w$}"));
                }
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        };
        render(&header, &widths, &mut out);
        for (row, cells) in self.rows.iter().zip(&body) {
            render(cells, &widths, &mut out);
            if let Some(e) = &row.error {
                out.push_str(&format!("  {} failed: {e}\n", row.miner));
            }
        }
        out
    }
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
    fn alpha_on_its_own_log_scores_perfectly() {
        let report = evaluate(&l1(), &Classifier::default(), &[Miner::Alpha], &Default::default());
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        assert_eq!(row.miner, "alpha");
        assert_eq!(row.fitness, Some(1.0));
        assert_eq!(row.precision, Some(1.0));
        assert_eq!(row.simplicity, Some(1.0));
        assert_eq!((row.places, row.transitions, row.arcs), (Some(4), Some(4), Some(8)));
        assert!(row.error.is_none());
    }

    #[test]
    fn rows_come_out_in_fixed_order() {
        let report = evaluate(
            &l1(),
            &Classifier::default(),
            &[Miner::Heuristic, Miner::Alpha, Miner::Inductive, Miner::AlphaPlus],
            &Default::default(),
        );
        let names: Vec<&str> = report.rows.iter().map(|r| r.miner.as_str()).collect();
        assert_eq!(names, vec!["alpha", "alpha-plus", "inductive", "heuristic"]);
    }

    #[test]
    fn empty_miner_list_gives_empty_report() {
        let report = evaluate(&l1(), &Classifier::default(), &[], &Default::default());
        assert!(report.rows.is_empty());
    }

    #[test]
    fn failing_miner_is_recorded_without_aborting_others() {
        // Every activity self-loops, which alpha-plus cannot project away.
        let log = EventLog::from_activity_sequences(vec![vec!["a", "a"]]);
        let report = evaluate(
            &log,
            &Classifier::default(),
            &[Miner::Alpha, Miner::AlphaPlus],
            &Default::default(),
        );
        assert_eq!(report.rows.len(), 2);
        assert!(report.rows[0].error.is_none(), "{:?}", report.rows[0]);
        assert!(report.rows[1].error.is_some());
        assert_eq!(report.rows[1].fitness, None);
    }

    #[test]
    fn json_shape_and_column_selection() {
        let report = evaluate(&l1(), &Classifier::default(), &[Miner::Alpha], &Default::default());
        let v = report.to_json(&Metric::all(), false);
        let row = &v["rows"][0];
        let keys: Vec<&str> = row.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            vec!["miner", "fitness", "precision", "simplicity", "generalization", "places", "transitions", "arcs"]
        );
        let narrow = report.to_json(&[Metric::Simplicity, Metric::Precision], false);
        let row = narrow["rows"][0].as_object().unwrap();
        assert!(row.contains_key("simplicity") && !row.contains_key("fitness"));
        let timed = report.to_json(&Metric::all(), true);
        assert!(timed["rows"][0].as_object().unwrap().contains_key("seconds"));
    }

    #[test]
    fn text_table_is_aligned_and_stable() {
        let report = evaluate(&l1(), &Classifier::default(), &[Miner::Alpha], &Default::default());
        let text = report.to_text(&Metric::all(), false);
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("miner"));
        assert!(header.contains("generalization"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("alpha"));
        assert!(row.contains("1.0000"));
        // Rendering twice is byte-identical (no timing noise).
        assert_eq!(text, report.to_text(&Metric::all(), false));
    }
}
