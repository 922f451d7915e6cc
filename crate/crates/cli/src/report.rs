use std::fmt::Write;

use flexhe_archsim::workload::RunReport;

use crate::config::Format;
use crate::error::{CliError, Result};

pub fn render(report: &RunReport, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Other(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => csv(report),
        Format::Table => Ok(table(report)),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv(report: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Other(e.to_string());
    w.write_record(["index", "op", "level", "cycles", "instructions"]).map_err(fail)?;
    for s in &report.steps {
        w.write_record([s.index.to_string(), s.op.clone(), s.level.to_string(), opt(s.cycles), opt(s.instructions)]).map_err(fail)?;
    }
    if let Some(t) = &report.timing {
        w.write_record([String::new(), "total".into(), String::new(), t.total_cycles.to_string(), t.instructions.to_string()])
            .map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Other(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Other(e.to_string()))
}

fn table(report: &RunReport) -> String {
    let mut s = String::new();
    let backend = serde_json::to_value(report.backend).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let _ = writeln!(s, "workload {} on {} (seed {}, {backend})", report.workload, report.param_set, report.seed);
    match &report.timing {
        Some(t) => {
            let _ = writeln!(s, "{:<12} {:>6} {:>10} {:>12} {:>14} {:>8}", "op", "count", "cycles", "latency_us", "throughput/s", "instrs");
            for (name, o) in &t.per_op {
                let per = o.cycles as f64 / o.count as f64 / t.clock_mhz;
                let _ = writeln!(s, "{name:<12} {:>6} {:>10} {:>12.3} {:>14.3} {:>8}", o.count, o.cycles, per, 1e6 / per, o.instructions);
            }
            let through = t.throughput.map_or("-".into(), |x| format!("{x:.3}"));
            let _ = writeln!(s, "{:<12} {:>6} {:>10} {:>12.3} {:>14} {:>8}", "total", t.per_op.values().map(|o| o.count).sum::<usize>(), t.total_cycles, t.latency_us, through, t.instructions);
            let _ = writeln!(s, "clock {} MHz, memory high-water {} slots", t.clock_mhz, t.peak_slots);
        }
        None => {
            let _ = writeln!(s, "{} steps, not simulated", report.steps.len());
        }
    }
    for o in &report.outputs {
        let _ = writeln!(
            s,
            "output {}: level {}, scale 2^{:.3}, max abs error {:.3e}, max rel error {:.3e}",
            o.value, o.level, o.log2_scale, o.max_abs_error, o.max_rel_error
        );
    }
    s
}
