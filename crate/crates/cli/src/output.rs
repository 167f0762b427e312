//! Rendering and output plumbing shared by the subcommands.

use std::env;
use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::Path;
use std::process;

use procmine::stats::{StatsReport, Variant};

use crate::Failure;

/// Styling is reserved for interactive terminals that have not opted out via
/// `NO_COLOR`; piped output stays plain so scripts can diff it byte for byte.
fn styled() -> bool {
    io::stdout().is_terminal() && env::var_os("NO_COLOR").is_none()
}

fn title(text: &str, styled: bool) -> String {
    if styled {
        format!("\x1b[1m{text}\x1b[0m")
    } else {
        text.to_owned()
    }
}

/// Write the report to standard output. A broken pipe (e.g. piping into
/// `head`) ends the process quietly instead of panicking.
pub(crate) fn emit(bytes: &[u8]) -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    match stdout.write_all(bytes).and_then(|()| stdout.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => process::exit(0),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn emit_line(text: &str) -> Result<(), Failure> {
    emit(format!("{text}\n").as_bytes())
}

pub(crate) fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("a Value always serializes");
    emit_line(&text)
}

pub(crate) fn render_stats(report: &StatsReport) -> String {
    let style = styled();
    let mut out = String::new();
    out.push_str(&format!("traces    {}\n", report.num_traces));
    out.push_str(&format!("events    {}\n", report.num_events));
    out.push_str(&format!("variants  {}\n", report.num_variants));
    count_block(&mut out, "start activities", report.start_activities.iter(), style);
    count_block(&mut out, "end activities", report.end_activities.iter(), style);
    count_block(&mut out, "activities", report.activities.iter(), style);

    out.push('\n');
    out.push_str(&title("variants", style));
    out.push('\n');
    out.push_str(&rows(report.variants.iter().map(|v| (v.sequence.join(","), v.count)), "  "));
    out
}

pub(crate) fn render_variants(variants: &[Variant]) -> String {
    rows(variants.iter().map(|v| (v.sequence.join(","), v.count)), "")
}

fn count_block<'a>(
    out: &mut String,
    name: &str,
    entries: impl Iterator<Item = (&'a String, &'a u64)>,
    style: bool,
) {
    out.push('\n');
    out.push_str(&title(name, style));
    out.push('\n');
    out.push_str(&rows(entries.map(|(label, &count)| (label.clone(), count)), "  "));
}

/// Two aligned columns: labels left-justified, counts right.
fn rows(entries: impl Iterator<Item = (String, u64)>, indent: &str) -> String {
    let entries: Vec<(String, u64)> = entries.collect();
    let label_width = entries.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0);
    let count_width = entries.iter().map(|(_, c)| c.to_string().len()).max().unwrap_or(0);
    let mut out = String::new();
    for (label, count) in &entries {
        let pad = label_width - label.chars().count();
        out.push_str(&format!("{indent}{label}{:pad$}  {count:>count_width$}\n", ""));
    }
    out
}

/// Write to the file, or—without a path—raw to standard output.
pub(crate) fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => emit(bytes),
    }
}
