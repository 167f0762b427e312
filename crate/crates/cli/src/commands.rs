//! Subcommand bodies: thin compositions of library calls plus I/O plumbing.

use std::collections::HashSet;
use std::ffi::OsStr;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use procmine::petri::{export_dot, parse_pnml_file, write_pnml};
use procmine::{
    evaluate, log_to_json, parse_xes_file, stats, write_xes, write_xes_gz, AcceptingPetriNet,
    Classifier, EventLog, Metric, Miner, ParseMode,
};

use crate::{output, Cli, Command, Failure, Format, MetricArg, MinerArg, ModelFormat, ThresholdArgs};

type CmdResult = Result<(), Failure>;

pub(crate) fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Stats { log, max_variants } => cmd_stats(cli, log, *max_variants),
        Command::Variants { log, count_only, top, write } => {
            cmd_variants(cli, log, *count_only, top.map(|k| k as usize), write.as_deref())
        }
        Command::Discover { log, miner, out, output, thresholds } => {
            cmd_discover(cli, log, (*miner).into(), *out, output.as_deref(), thresholds)
        }
        Command::Evaluate { log, miners, metrics, timings, thresholds } => {
            cmd_evaluate(cli, log, miners, metrics, *timings, thresholds)
        }
        Command::Convert { input, output } => cmd_convert(cli, input, output),
    }
}

fn cmd_stats(cli: &Cli, path: &Path, max_variants: Option<usize>) -> CmdResult {
    let log = load_log(path, cli.strict)?;
    let classifier = resolve_classifier(&log, cli.classifier.as_deref())?;
    let report = stats::report(&log, &classifier, max_variants)?;
    match cli.format {
        Format::Json => {
            let value = serde_json::to_value(&report).map_err(|e| Failure::Input(e.to_string()))?;
            output::print_json(&value)
        }
        Format::Text => output::emit(output::render_stats(&report).as_bytes()),
    }
}

fn cmd_variants(
    cli: &Cli,
    path: &Path,
    count_only: bool,
    top: Option<usize>,
    write: Option<&Path>,
) -> CmdResult {
    let log = load_log(path, cli.strict)?;
    let classifier = resolve_classifier(&log, cli.classifier.as_deref())?;
    let all = stats::variants(&log, &classifier)?;
    if count_only {
        return output::emit_line(&all.len().to_string());
    }
    let shown = match top {
        Some(k) => &all[..all.len().min(k)],
        None => &all[..],
    };
    if let Some(dest) = write {
        let keep: HashSet<Vec<String>> = shown.iter().map(|v| v.sequence.clone()).collect();
        let filtered = stats::filter_variants(&log, &keep, &classifier)?;
        write_log(&filtered, dest)?;
        log::info!("wrote {} trace(s) to {}", filtered.num_traces(), dest.display());
    }
    match cli.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = shown
                .iter()
                .map(|v| serde_json::json!({ "sequence": v.sequence, "count": v.count }))
                .collect();
            output::print_json(&serde_json::Value::Array(rows))
        }
        Format::Text => output::emit(output::render_variants(shown).as_bytes()),
    }
}

fn cmd_discover(
    cli: &Cli,
    path: &Path,
    miner: Miner,
    out: ModelFormat,
    output_path: Option<&Path>,
    thresholds: &ThresholdArgs,
) -> CmdResult {
    let log = load_log(path, cli.strict)?;
    let classifier = resolve_classifier(&log, cli.classifier.as_deref())?;
    let apn = miner.discover(&log, &classifier, &thresholds.to_params())?;
    log::info!(
        "{miner}: {} places, {} transitions, {} arcs",
        apn.net.places().len(),
        apn.net.transitions().len(),
        apn.net.arcs().len()
    );
    output::write_bytes(output_path, &render_model(&apn, out)?)
}

fn cmd_evaluate(
    cli: &Cli,
    path: &Path,
    miners: &[MinerArg],
    metrics: &[MetricArg],
    timings: bool,
    thresholds: &ThresholdArgs,
) -> CmdResult {
    let log = load_log(path, cli.strict)?;
    let classifier = resolve_classifier(&log, cli.classifier.as_deref())?;
    let miner_list: Vec<Miner> = miners.iter().map(|&m| m.into()).collect();
    let mut metric_list: Vec<Metric> = Vec::new();
    for &m in metrics {
        let metric = m.into();
        if !metric_list.contains(&metric) {
            metric_list.push(metric);
        }
    }
    let report = evaluate(&log, &classifier, &miner_list, &thresholds.to_params());
    match cli.format {
        Format::Json => output::print_json(&report.to_json(&metric_list, timings))?,
        Format::Text => output::emit(report.to_text(&metric_list, timings).as_bytes())?,
    }
    if !report.rows.is_empty() && report.rows.iter().all(|r| r.error.is_some()) {
        return Err(Failure::Input(format!("all {} miner(s) failed", report.rows.len())));
    }
    Ok(())
}

fn cmd_convert(cli: &Cli, input: &Path, output: &Path) -> CmdResult {
    let out_ext = extension(output);
    match extension(input).as_str() {
        "pnml" => {
            let apn = parse_pnml_file(input)
                .map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
            let format = match out_ext.as_str() {
                "pnml" => ModelFormat::Pnml,
                "dot" => ModelFormat::Dot,
                other => {
                    return Err(Failure::Usage(format!(
                        "cannot convert a Petri net to {other:?}; pick a .pnml or .dot output"
                    )))
                }
            };
            let mut file = create_file(output)?;
            file.write_all(&render_model(&apn, format)?)?;
            file.flush()?;
            Ok(())
        }
        "dot" => Err(Failure::Usage("DOT files cannot be read back; use a PNML input".into())),
        "json" => Err(Failure::Usage("JSON event logs cannot be read back; use an XES input".into())),
        _ => {
            let log = load_log(input, cli.strict)?;
            match out_ext.as_str() {
                "xes" | "gz" => write_log(&log, output),
                "json" => {
                    let mut file = create_file(output)?;
                    serde_json::to_writer_pretty(&mut file, &log_to_json(&log))
                        .map_err(|e| Failure::Input(e.to_string()))?;
                    file.write_all(b"\n")?;
                    file.flush()?;
                    Ok(())
                }
                "pnml" | "dot" => Err(Failure::Usage(
                    "converting a log into a model is discovery; use `procmine discover`".into(),
                )),
                other => Err(Failure::Usage(format!(
                    "unsupported output extension {other:?}; logs go to .xes, .xes.gz or .json"
                ))),
            }
        }
    }
}

fn load_log(path: &Path, strict: bool) -> Result<EventLog, Failure> {
    let mode = if strict { ParseMode::Strict } else { ParseMode::Lenient };
    let import = parse_xes_file(path, mode)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    for warning in &import.warnings {
        log::warn!("{}: {warning}", path.display());
    }
    Ok(import.log)
}

/// A classifier named in the log wins; otherwise the spec is read as a
/// comma-separated list of event attribute keys.
fn resolve_classifier(log: &EventLog, spec: Option<&str>) -> Result<Classifier, Failure> {
    let Some(spec) = spec else {
        return Ok(Classifier::default());
    };
    if let Some(keys) = log.classifiers.get(spec) {
        return Classifier::new(keys.clone()).map_err(|e| Failure::Usage(e.to_string()));
    }
    let keys: Vec<&str> = spec.split(',').map(str::trim).filter(|k| !k.is_empty()).collect();
    if keys.is_empty() {
        return Err(Failure::Usage(format!("--classifier {spec:?} names no attribute keys")));
    }
    Classifier::new(keys).map_err(|e| Failure::Usage(e.to_string()))
}

fn render_model(apn: &AcceptingPetriNet, format: ModelFormat) -> Result<Vec<u8>, Failure> {
    match format {
        ModelFormat::Pnml => {
            let mut buf = Vec::new();
            write_pnml(apn, &mut buf)?;
            Ok(buf)
        }
        ModelFormat::Dot => Ok(export_dot(apn, None).into_bytes()),
    }
}

/// Serialize a log as XES, gzip-compressed when the path ends in `.gz`.
fn write_log(log: &EventLog, path: &Path) -> CmdResult {
    let mut file = create_file(path)?;
    if extension(path) == "gz" {
        write_xes_gz(log, &mut file)?;
    } else {
        write_xes(log, &mut file)?;
    }
    file.flush()?;
    Ok(())
}

fn create_file(path: &Path) -> Result<BufWriter<File>, Failure> {
    let file = File::create(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn extension(path: &Path) -> String {
    path.extension().and_then(OsStr::to_str).unwrap_or_default().to_ascii_lowercase()
}
