//! CSV artifacts. Every file has a fixed header, rows in a deterministic
//! order and reals written in scientific notation with 17 significant digits,
//! which round-trips `f64` exactly.

use std::io::{self, Write};

use argnn_core::dynamics::IterationRecord;
use argnn_core::experiment::{EigenTraceRow, RunRecord, TimingPoint, TimingTrace};
use argnn_core::stats::AggregateRow;
use argnn_core::{NetworkGraph, PruneEvent};

pub const GRAPH_HEADER: &str = "source,target,weight";
pub const TRAIN_LOG_HEADER: &str = "iter,error,edges_remaining";
pub const PRUNE_EVENTS_HEADER: &str = "step,executor,source,target,a_value";
pub const RESULTS_HEADER: &str = "gate,mode,hidden,run,seed,final_error,edges_initial,edges_pruned,pct_pruned,output_disconnected";
pub const SUMMARY_HEADER: &str = "gate,mode,hidden,runs,final_error_mean,final_error_std,edges_pruned_mean,edges_pruned_std,pct_pruned_mean,pct_pruned_std";
pub const TIMING_HEADER: &str = "mode,run,iter,error,pct_pruned";
pub const TIMING_SUMMARY_HEADER: &str = "mode,iter,runs,error_mean,error_std,pct_pruned_mean,pct_pruned_std";
pub const EIGENTRACE_HEADER: &str = "step,focal,node,re,im,event";

/// Real number with 17 significant digits.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_graph(out: &mut impl Write, graph: &NetworkGraph) -> io::Result<()> {
    writeln!(out, "{GRAPH_HEADER}")?;
    for e in graph.edges() {
        writeln!(out, "{},{},{}", e.source, e.target, real(e.weight))?;
    }
    Ok(())
}

pub fn write_train_log(out: &mut impl Write, log: &[IterationRecord]) -> io::Result<()> {
    writeln!(out, "{TRAIN_LOG_HEADER}")?;
    for r in log {
        writeln!(out, "{},{},{}", r.iter, real(r.error), r.edges_remaining)?;
    }
    Ok(())
}

pub fn write_prune_events(out: &mut impl Write, events: &[PruneEvent]) -> io::Result<()> {
    writeln!(out, "{PRUNE_EVENTS_HEADER}")?;
    for e in events {
        writeln!(out, "{},{},{},{},{}", e.step, e.executor, e.source, e.target, real(e.a_value))?;
    }
    Ok(())
}

pub fn write_results(out: &mut impl Write, records: &[RunRecord]) -> io::Result<()> {
    writeln!(out, "{RESULTS_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.gate.name(),
            r.mode.name(),
            r.hidden,
            r.run_index,
            r.seed,
            real(r.final_error),
            r.edges_initial,
            r.edges_pruned,
            real(r.pct_pruned),
            r.output_disconnected
        )?;
    }
    Ok(())
}

pub fn write_summary(out: &mut impl Write, rows: &[AggregateRow]) -> io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.gate.name(),
            r.mode.name(),
            r.hidden,
            r.runs,
            real(r.final_error.mean),
            real(r.final_error.std),
            real(r.edges_pruned.mean),
            real(r.edges_pruned.std),
            real(r.pct_pruned.mean),
            real(r.pct_pruned.std)
        )?;
    }
    Ok(())
}

pub fn write_timing(out: &mut impl Write, traces: &[TimingTrace]) -> io::Result<()> {
    writeln!(out, "{TIMING_HEADER}")?;
    for t in traces {
        for s in &t.samples {
            writeln!(out, "{},{},{},{},{}", t.mode.name(), t.run_index, s.iter, real(s.error), real(s.pct_pruned))?;
        }
    }
    Ok(())
}

pub fn write_timing_summary(out: &mut impl Write, points: &[TimingPoint]) -> io::Result<()> {
    writeln!(out, "{TIMING_SUMMARY_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.mode.name(),
            p.iter,
            p.runs,
            real(p.error.mean),
            real(p.error.std),
            real(p.pct_pruned.mean),
            real(p.pct_pruned.std)
        )?;
    }
    Ok(())
}

/// Prune steps are tagged `P(source->target)` on the executor's own row.
pub fn write_eigentrace(out: &mut impl Write, rows: &[EigenTraceRow]) -> io::Result<()> {
    writeln!(out, "{EIGENTRACE_HEADER}")?;
    for r in rows {
        let tag = r.event.map(|(s, t)| format!("P({s}->{t})")).unwrap_or_default();
        writeln!(out, "{},{},{},{},{},{}", r.step, r.focal, r.node, real(r.re), real(r.im), tag)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use argnn_core::NodeId;

    fn render(f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn reals_round_trip_with_enough_digits() {
        for v in [0.1, -0.7, 1.0 / 3.0, 1e-12, 123456.789, 0.0] {
            let s = real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
            assert!(digits >= 15, "{s}");
        }
    }

    #[test]
    fn graph_snapshot() {
        let mut g = NetworkGraph::empty(0);
        g.set_edge(NodeId(0), NodeId(2), 0.5).unwrap();
        g.set_edge(NodeId(1), NodeId(2), -0.25).unwrap();
        let text = render(|b| write_graph(b, &g));
        assert_eq!(
            text,
            "source,target,weight\n0,2,5.0000000000000000e-1\n1,2,-2.5000000000000000e-1\n"
        );
    }

    #[test]
    fn eigentrace_tags() {
        let rows = [
            EigenTraceRow {
                step: 4,
                focal: NodeId(2),
                node: NodeId(2),
                re: 1.0,
                im: 0.5,
                event: Some((NodeId(3), NodeId(2))),
            },
            EigenTraceRow {
                step: 4,
                focal: NodeId(2),
                node: NodeId(3),
                re: 1.0,
                im: -0.5,
                event: None,
            },
        ];
        let text = render(|b| write_eigentrace(b, &rows));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], EIGENTRACE_HEADER);
        assert!(lines[1].ends_with(",P(3->2)"));
        assert!(lines[2].ends_with(','));
    }
}
