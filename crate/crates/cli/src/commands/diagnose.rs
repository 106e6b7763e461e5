use std::fs;

use serde::Serialize;

use proxmcmc::diagnostics::{
    acf_csv, autocorrelation, pixelwise_quantiles, summarize_trace, TraceSummary,
};
use proxmcmc::ScalarSummaryTrace;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Csv, OutputDir};

/// Columns skipped when `columns = all`.
const INDEX_COLUMNS: [&str; 4] = ["iteration", "sample", "lag", "accepted"];

#[derive(Clone, Debug, Serialize)]
pub struct DiagnoseReport {
    pub input: String,
    pub rows: usize,
    pub probs: Vec<f64>,
    pub columns: Vec<TraceSummary>,
}

/// A headed numeric CSV as named columns.
pub fn parse_chain_csv(text: &str) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::usage("input file is empty"))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(CliError::usage(format!(
                "row {} has {} fields, expected {}",
                i + 2,
                cells.len(),
                header.len()
            )));
        }
        for (col, cell) in cols.iter_mut().zip(cells) {
            let v: f64 = cell.trim().parse().map_err(|_| {
                CliError::usage(format!("row {}: '{}' is not a number", i + 2, cell.trim()))
            })?;
            col.push(v);
        }
    }
    if cols.first().is_none_or(|c| c.is_empty()) {
        return Err(CliError::usage("input file has no data rows"));
    }
    Ok((header, cols))
}

/// ACF, ESS and marginal quantiles for the chosen columns of a stored chain.
pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> CliResult<DiagnoseReport> {
    let input = cfg.raw("input")?.to_string();
    if input.is_empty() {
        return Err(CliError::usage(
            "diagnose needs an input file (--set input=PATH)",
        ));
    }
    let text = fs::read_to_string(&input).map_err(|e| CliError::usage(format!("{input}: {e}")))?;
    let (header, cols) = parse_chain_csv(&text)?;
    let selected: Vec<usize> = match cfg.raw("columns")? {
        "all" => (0..header.len())
            .filter(|&i| !INDEX_COLUMNS.contains(&header[i].as_str()))
            .collect(),
        _ => cfg
            .get_list::<String>("columns")?
            .iter()
            .map(|name| {
                header
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| CliError::usage(format!("no column named '{name}'")))
            })
            .collect::<CliResult<_>>()?,
    };
    if selected.is_empty() {
        return Err(CliError::usage("no columns to diagnose"));
    }
    let max_lag: usize = cfg.get("max_lag")?;
    let probs: Vec<f64> = cfg.get_list("probs")?;

    let mut summaries = Vec::new();
    for &c in &selected {
        let name = &header[c];
        let trace = ScalarSummaryTrace::new(name.clone(), cols[c].clone())?;
        let acf = autocorrelation(&trace, max_lag)?;
        out.text(&format!("acf_{name}.csv"), &acf_csv(&acf))?;
        summaries.push(summarize_trace(&trace)?);
    }

    let rows = cols[0].len();
    let samples: Vec<Vec<f64>> = (0..rows)
        .map(|r| selected.iter().map(|&c| cols[c][r]).collect())
        .collect();
    let q = pixelwise_quantiles(&samples, &probs)?;
    let names: Vec<String> = probs.iter().map(|p| format!("q{p}")).collect();
    let mut head = vec!["column"];
    head.extend(names.iter().map(String::as_str));
    let mut csv = Csv::new(&head);
    for (j, &c) in selected.iter().enumerate() {
        let mut cells = vec![Cell::S(&header[c])];
        cells.extend(q.iter().map(|row| Cell::F(row[j])));
        csv.row(&cells);
    }
    out.text("quantiles.csv", &csv.finish())?;
    let report = DiagnoseReport {
        input,
        rows,
        probs,
        columns: summaries,
    };
    out.json("diagnose.json", &report)?;
    Ok(report)
}
