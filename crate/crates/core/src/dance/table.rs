use std::fmt::Write;

use super::{DanceError, DancerId, MoveKind, Trace, VirtualRule};
use crate::codec::DiagramCode;

pub(crate) fn dancer_name(d: DancerId) -> String {
    if d < 26 {
        char::from(b'A' + d as u8).to_string()
    } else {
        format!("D{d}")
    }
}

/// Plain-text dance table: one column per passage of the code, one row per
/// time step (the initial row plus one per move). A dancer is listed in the
/// column of the passage it stands before. Crossing statuses follow the bar.
pub fn render_trace_table(code: &DiagramCode, trace: &Trace) -> Result<String, DanceError> {
    if trace.moves().is_empty() {
        return Err(DanceError::EmptyTrace);
    }
    let len = code.len();
    let smoothing = trace.rule().virtual_rule == VirtualRule::Smoothing;
    let mut positions = trace.config().starts().to_vec();
    let mut rows: Vec<(String, Vec<String>)> = Vec::with_capacity(trace.moves().len() + 1);

    let cells = |positions: &[usize]| -> Vec<String> {
        let mut cells = vec![String::new(); len];
        for (d, &p) in positions.iter().enumerate() {
            cells[p].push_str(&dancer_name(d));
        }
        cells.into_iter().map(|c| if c.is_empty() { ".".into() } else { c }).collect()
    };

    rows.push((String::new(), cells(&positions)));
    for m in trace.moves() {
        let label = match m.kind {
            MoveKind::Single { dancer, passage } => {
                positions[dancer] = (passage + 1) % len;
                format!("{} {}", dancer_name(dancer), code.passage(passage))
            }
            MoveKind::Rendezvous { first, second, crossing } => {
                let (p, q) = (positions[first], positions[second]);
                let (a, b) = if smoothing { (q, p) } else { (p, q) };
                positions[first] = (a + 1) % len;
                positions[second] = (b + 1) % len;
                format!("{}{} v{crossing}", dancer_name(first), dancer_name(second))
            }
        };
        rows.push((label, cells(&positions)));
    }

    let headers: Vec<String> = code.passages().iter().map(|p| p.to_string()).collect();
    let widths: Vec<usize> = (0..len)
        .map(|i| rows.iter().map(|(_, c)| c[i].len()).chain([headers[i].len()]).max().unwrap_or(1))
        .collect();
    let status_headers: Vec<String> = trace.crossings().iter().map(|c| format!("C{c}")).collect();
    let status_widths: Vec<usize> = status_headers
        .iter()
        .enumerate()
        .map(|(j, h)| trace.status_table().iter().map(|r| r[j].to_string().len()).chain([h.len()]).max().unwrap_or(1))
        .collect();
    let time_width = rows.len().saturating_sub(1).to_string().len().max(1);
    let move_width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(4);

    let mut out = String::new();
    let mut line = format!("{:>time_width$} | {:<move_width$} |", "t", "move");
    for (h, w) in headers.iter().zip(&widths) {
        let _ = write!(line, " {h:<w$}");
    }
    line.push_str(" |");
    for (h, w) in status_headers.iter().zip(&status_widths) {
        let _ = write!(line, " {h:>w$}");
    }
    out.push_str(line.trim_end());
    out.push('\n');

    for (t, (label, row)) in rows.iter().enumerate() {
        let mut line = format!("{t:>time_width$} | {label:<move_width$} |");
        for (c, w) in row.iter().zip(&widths) {
            let _ = write!(line, " {c:<w$}");
        }
        line.push_str(" |");
        for (s, w) in trace.status_table()[t].iter().zip(&status_widths) {
            let _ = write!(line, " {s:>w$}");
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    Ok(out)
}
