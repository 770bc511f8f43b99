//! Fit samples read from CSV and evaluate the interpolant.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use msqi::grid::read_signal_csv;
use msqi::{GapSpec, Params, QuasiInterpolant, SampledSignal};

use crate::{fmt_num, CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum EvalTarget {
    /// Uniform grid with `n_e` steps over the data range.
    Uniform(usize),
    /// The sample abscissas.
    Nodes,
    /// Abscissas listed one per line (or in the first CSV column) of a file.
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct FitRequest {
    pub gaps: Vec<usize>,
    pub params: Params,
    pub target: EvalTarget,
    pub dump_covering: Option<PathBuf>,
    pub dump_interpolant: Option<PathBuf>,
}

fn read_points(path: &PathBuf) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() || field.starts_with('#') {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            // a non-numeric first line is a header
            Err(_) if i == 0 => continue,
            _ => {
                return Err(msqi::Error::Csv {
                    row: i + 1,
                    message: format!("'{field}' is not a finite number"),
                }
                .into())
            }
        }
    }
    Ok(out)
}

/// Builds the interpolant for `input` and writes `x,Q,extrapolated,in_gap` rows to `output`.
pub fn fit_and_eval<R: Read, W: Write>(input: R, request: &FitRequest, output: W) -> Result<QuasiInterpolant<f64>> {
    let signal: SampledSignal<f64> = read_signal_csv(input)?;
    let gaps = GapSpec::new(request.gaps.clone());
    let q = QuasiInterpolant::build(&signal, &gaps, &request.params)?;

    if let Some(path) = &request.dump_covering {
        let mut text = serde_json::to_string_pretty(q.covering())?;
        text.push('\n');
        fs::write(path, text)?;
    }
    if let Some(path) = &request.dump_interpolant {
        let mut text = serde_json::to_string_pretty(&q)?;
        text.push('\n');
        fs::write(path, text)?;
    }

    let xs: Vec<f64> = match &request.target {
        EvalTarget::Uniform(n_e) => msqi::error_analysis::EvaluationGrid::new(signal.a(), signal.b(), *n_e)?.points(),
        EvalTarget::Nodes => signal.nodes().to_vec(),
        EvalTarget::File(path) => read_points(path)?,
    };
    let mut w = csv::Writer::from_writer(output);
    w.write_record(["x", "Q", "extrapolated", "in_gap"])?;
    for p in q.eval_batch(&xs) {
        w.write_record([
            fmt_num(p.x),
            fmt_num(p.value),
            p.extrapolated.to_string(),
            p.in_gap.to_string(),
        ])?;
    }
    w.flush().map_err(CliError::Io)?;
    Ok(q)
}
