use std::fmt::Write as _;

use crate::bench::BenchRow;
use crate::config::{Format, Method};
use crate::BenchError;

pub fn emit_table(rows: &[BenchRow], format: Format) -> Result<String, BenchError> {
    match format {
        Format::Csv => csv_table(rows),
        Format::Json => {
            serde_json::to_string_pretty(rows).map_err(|e| BenchError::Io(e.to_string()))
        }
        Format::Md => Ok(markdown_table(rows)),
    }
}

fn csv_table(rows: &[BenchRow]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| BenchError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn first_seen<T: PartialEq + Copy>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn cell(row: &BenchRow) -> String {
    if row.converged {
        row.iterations.to_string()
    } else if row.diverged {
        format!("diverged ({})", row.iterations)
    } else {
        format!("not converged ({})", row.iterations)
    }
}

/// Sizes as rows, methods as columns, iteration counts in the cells.
fn markdown_table(rows: &[BenchRow]) -> String {
    let methods = first_seen(rows.iter().map(|r| r.method.as_str()));
    let sizes = first_seen(rows.iter().map(|r| r.n));
    let label = |m: &str| {
        m.parse::<Method>()
            .map(|m| m.label().to_string())
            .unwrap_or_else(|_| m.to_string())
    };

    let mut out = String::from("| n |");
    for m in &methods {
        write!(out, " {} |", label(m)).unwrap();
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(methods.len()));
    out.push('\n');
    for n in sizes {
        write!(out, "| {n} |").unwrap();
        for m in &methods {
            let text = rows
                .iter()
                .find(|r| r.n == n && r.method == *m)
                .map(cell)
                .unwrap_or_default();
            write!(out, " {text} |").unwrap();
        }
        out.push('\n');
    }
    out
}
