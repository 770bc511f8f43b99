//! The four benchmark experiments. Each one computes its rows in parallel,
//! collects them in input order and writes CSV, JSON and plot-ready `.dat` files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use msqi::error_analysis::{e_l1, e_max, e_max_at, EvaluationGrid};
use msqi::{GapSpec, NoiseSpec, Params, QuasiInterpolant, SampledSignal, TestFunction};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::{fmt_num, Result};

const L1_QUADRATURE_ORDER: usize = 20;
/// Points of the reconstruction profiles written next to the tables.
const PROFILE_POINTS: usize = 2000;

fn params(cfg: &ExperimentConfig, d: usize, k: usize) -> Params {
    Params {
        d,
        mu: cfg.mu,
        k,
        scheme: cfg.scheme,
        mode: cfg.mode,
        share_overlaps: None,
    }
}

fn build(
    f: TestFunction,
    n: usize,
    noise: Option<NoiseSpec>,
    params: &Params,
) -> Result<(SampledSignal<f64>, QuasiInterpolant<f64>)> {
    let (signal, gaps) = f.sample::<f64>(n, noise)?;
    let q = QuasiInterpolant::build(&signal, &gaps, params)?;
    Ok((signal, q))
}

fn cells(cfg: &ExperimentConfig) -> Vec<(TestFunction, usize, usize, usize)> {
    let mut out = Vec::new();
    for &f in &cfg.functions {
        for &d in &cfg.d {
            for &k in &cfg.k {
                for &n in &cfg.n {
                    out.push((f, d, k, n));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxErrorRow {
    pub function: TestFunction,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub n_e: usize,
    pub e_max: f64,
    pub argmax: f64,
    pub in_gap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1Row {
    pub function: TestFunction,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub e_l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseRow {
    pub function: TestFunction,
    pub seed: u64,
    pub amplitude: f64,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub points: usize,
    pub sup_deviation: f64,
    pub argmax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary<R> {
    pub config: ExperimentConfig,
    pub rows: Vec<R>,
}

/// Files written by a run, in creation order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

struct Sink<'a> {
    dir: &'a Path,
    written: Written,
}

impl<'a> Sink<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir,
            written: Written::default(),
        })
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        self.written.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text)?;
        self.written.files.push(path);
        Ok(())
    }

    /// Whitespace-separated columns with a `#` header line.
    fn dat(&mut self, name: &str, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut out = std::io::BufWriter::new(fs::File::create(&path)?);
        writeln!(out, "# {}", columns.join(" "))?;
        for r in rows {
            writeln!(out, "{}", r.join(" "))?;
        }
        out.flush()?;
        self.written.files.push(path);
        Ok(())
    }
}

fn profile_points() -> Vec<f64> {
    EvaluationGrid::new(-1.0, 1.0, PROFILE_POINTS)
        .expect("valid grid")
        .points()
}

/// Maximum error on nested evaluation grids for each function.
pub fn compute_experiment_1(cfg: &ExperimentConfig) -> Result<Vec<MaxErrorRow>> {
    let blocks = cells(cfg)
        .into_par_iter()
        .map(|(f, d, k, n)| -> Result<Vec<MaxErrorRow>> {
            let (_, q) = build(f, n, None, &params(cfg, d, k))?;
            cfg.n_e
                .iter()
                .map(|&n_e| {
                    let grid = EvaluationGrid::new(-1.0, 1.0, n_e)?;
                    let e = e_max(&q, |x| f.value(x), &grid);
                    Ok(MaxErrorRow {
                        function: f,
                        n,
                        d,
                        k,
                        n_e,
                        e_max: e.value,
                        argmax: e.argmax,
                        in_gap: e.in_gap,
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

fn max_error_csv_rows(rows: &[MaxErrorRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.function.to_string(),
                r.n.to_string(),
                r.d.to_string(),
                r.k.to_string(),
                r.n_e.to_string(),
                fmt_num(r.e_max),
                fmt_num(r.argmax),
                r.in_gap.to_string(),
            ]
        })
        .collect()
}

const MAX_ERROR_HEADER: [&str; 8] = ["function", "n", "d", "K", "n_e", "e_max", "argmax", "in_gap"];

pub fn run_experiment_1(cfg: &ExperimentConfig) -> Result<Written> {
    let rows = compute_experiment_1(cfg)?;
    let mut sink = Sink::new(&cfg.out_dir)?;
    sink.csv("exp1_emax.csv", &MAX_ERROR_HEADER, max_error_csv_rows(&rows))?;

    // one line per (function, n, d, K), one column per n_e
    let mut header = vec!["function".to_string(), "n".into(), "d".into(), "K".into()];
    header.extend(cfg.n_e.iter().map(|ne| format!("n_e={ne}")));
    let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
    let wide = rows.chunks(cfg.n_e.len()).map(|chunk| {
        let r = &chunk[0];
        let mut line = vec![r.function.to_string(), r.n.to_string(), r.d.to_string(), r.k.to_string()];
        line.extend(chunk.iter().map(|c| fmt_num(c.e_max)));
        line
    });
    sink.csv("exp1_table.csv", &header_ref, wide.collect::<Vec<_>>())?;

    let profiles = cells(cfg)
        .into_par_iter()
        .map(|(f, d, k, n)| -> Result<_> {
            let (_, q) = build(f, n, None, &params(cfg, d, k))?;
            let xs = profile_points();
            let vals = q.eval_batch(&xs);
            Ok(((f, d, k, n), vals))
        })
        .collect::<Result<Vec<_>>>()?;
    for ((f, d, k, n), vals) in profiles {
        sink.dat(
            &format!("exp1_{f}_n{n}_d{d}_K{k}_profile.dat"),
            &["x", "f", "Q", "in_gap"],
            vals.iter().map(|p| {
                vec![
                    fmt_num(p.x),
                    fmt_num(f.value(p.x)),
                    fmt_num(p.value),
                    u8::from(p.in_gap).to_string(),
                ]
            }),
        )?;
    }

    sink.json(
        "exp1_summary.json",
        &Summary {
            config: cfg.clone(),
            rows,
        },
    )?;
    Ok(sink.written)
}

/// L1 error series over the grid sizes.
pub fn compute_experiment_2(cfg: &ExperimentConfig) -> Result<Vec<L1Row>> {
    cells(cfg)
        .into_par_iter()
        .map(|(f, d, k, n)| {
            let (_, q) = build(f, n, None, &params(cfg, d, k))?;
            let v = e_l1(&q, |x| f.value(x), None, L1_QUADRATURE_ORDER)?;
            Ok(L1Row {
                function: f,
                n,
                d,
                k,
                e_l1: v,
            })
        })
        .collect()
}

pub fn run_experiment_2(cfg: &ExperimentConfig) -> Result<Written> {
    let rows = compute_experiment_2(cfg)?;
    let mut sink = Sink::new(&cfg.out_dir)?;
    sink.csv(
        "exp2_l1.csv",
        &["function", "n", "d", "K", "e_l1"],
        rows.iter().map(|r| {
            vec![
                r.function.to_string(),
                r.n.to_string(),
                r.d.to_string(),
                r.k.to_string(),
                fmt_num(r.e_l1),
            ]
        }),
    )?;
    for series in rows.chunks(cfg.n.len()) {
        let r = &series[0];
        sink.dat(
            &format!("exp2_{}_d{}_K{}.dat", r.function, r.d, r.k),
            &["n", "e_l1"],
            series.iter().map(|s| vec![s.n.to_string(), fmt_num(s.e_l1)]),
        )?;
    }
    sink.json(
        "exp2_summary.json",
        &Summary {
            config: cfg.clone(),
            rows,
        },
    )?;
    Ok(sink.written)
}

/// Points of the `n_e` grid on `[-1, 1]` outside every gap interval of `gaps`.
fn points_outside_gaps(signal: &SampledSignal<f64>, gaps: &GapSpec, n_e: usize) -> Result<Vec<f64>> {
    Ok(EvaluationGrid::new(-1.0, 1.0, n_e)?
        .points()
        .into_iter()
        .filter(|&x| !gaps.contains_abscissa(signal, x))
        .collect())
}

/// Reconstruction of noisy samples, one row per (function, seed, n, d, K).
pub fn compute_experiment_3(cfg: &ExperimentConfig) -> Result<Vec<NoiseRow>> {
    let mut jobs = Vec::new();
    for (f, d, k, n) in cells(cfg) {
        for &seed in &cfg.seeds {
            jobs.push((f, d, k, n, seed));
        }
    }
    let n_e = cfg.n_e[0];
    jobs.into_par_iter()
        .map(|(f, d, k, n, seed)| {
            let noise = NoiseSpec {
                amplitude: cfg.amplitude,
                seed,
            };
            let (signal, q) = build(f, n, Some(noise), &params(cfg, d, k))?;
            let pts = points_outside_gaps(&signal, q.gaps(), n_e)?;
            let e = e_max_at(&q, |x| f.value(x), &pts);
            Ok(NoiseRow {
                function: f,
                seed,
                amplitude: cfg.amplitude,
                n,
                d,
                k,
                points: pts.len(),
                sup_deviation: e.value,
                argmax: e.argmax,
            })
        })
        .collect()
}

pub fn run_experiment_3(cfg: &ExperimentConfig) -> Result<Written> {
    let rows = compute_experiment_3(cfg)?;
    let mut sink = Sink::new(&cfg.out_dir)?;
    sink.csv(
        "exp3_noise.csv",
        &["function", "seed", "amplitude", "n", "d", "K", "points", "sup_deviation", "argmax"],
        rows.iter().map(|r| {
            vec![
                r.function.to_string(),
                r.seed.to_string(),
                fmt_num(r.amplitude),
                r.n.to_string(),
                r.d.to_string(),
                r.k.to_string(),
                r.points.to_string(),
                fmt_num(r.sup_deviation),
                fmt_num(r.argmax),
            ]
        }),
    )?;
    for r in &rows {
        let noise = NoiseSpec {
            amplitude: r.amplitude,
            seed: r.seed,
        };
        let (signal, q) = build(r.function, r.n, Some(noise), &params(cfg, r.d, r.k))?;
        let stem = format!("exp3_{}_n{}_d{}_K{}_seed{}", r.function, r.n, r.d, r.k, r.seed);
        sink.dat(
            &format!("{stem}_samples.dat"),
            &["x", "y"],
            signal
                .nodes()
                .iter()
                .zip(signal.values())
                .map(|(&x, &y)| vec![fmt_num(x), fmt_num(y)]),
        )?;
        let xs = profile_points();
        sink.dat(
            &format!("{stem}_profile.dat"),
            &["x", "f", "Q", "in_gap"],
            q.eval_batch(&xs).iter().map(|p| {
                vec![
                    fmt_num(p.x),
                    fmt_num(r.function.value(p.x)),
                    fmt_num(p.value),
                    u8::from(p.in_gap).to_string(),
                ]
            }),
        )?;
    }
    sink.json(
        "exp3_summary.json",
        &Summary {
            config: cfg.clone(),
            rows,
        },
    )?;
    Ok(sink.written)
}

/// Maximum error series over the grid sizes, on the first `n_e` grid.
pub fn compute_experiment_4(cfg: &ExperimentConfig) -> Result<Vec<MaxErrorRow>> {
    let n_e = cfg.n_e[0];
    cells(cfg)
        .into_par_iter()
        .map(|(f, d, k, n)| {
            let (_, q) = build(f, n, None, &params(cfg, d, k))?;
            let e = e_max(&q, |x| f.value(x), &EvaluationGrid::new(-1.0, 1.0, n_e)?);
            Ok(MaxErrorRow {
                function: f,
                n,
                d,
                k,
                n_e,
                e_max: e.value,
                argmax: e.argmax,
                in_gap: e.in_gap,
            })
        })
        .collect()
}

pub fn run_experiment_4(cfg: &ExperimentConfig) -> Result<Written> {
    let rows = compute_experiment_4(cfg)?;
    let mut sink = Sink::new(&cfg.out_dir)?;
    sink.csv("exp4_emax.csv", &MAX_ERROR_HEADER, max_error_csv_rows(&rows))?;
    for series in rows.chunks(cfg.n.len()) {
        let r = &series[0];
        sink.dat(
            &format!("exp4_{}_d{}_K{}.dat", r.function, r.d, r.k),
            &["n", "e_max"],
            series.iter().map(|s| vec![s.n.to_string(), fmt_num(s.e_max)]),
        )?;
    }
    sink.json(
        "exp4_summary.json",
        &Summary {
            config: cfg.clone(),
            rows,
        },
    )?;
    Ok(sink.written)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Written> {
    match cfg.experiment {
        Experiment::Exp1 => run_experiment_1(cfg),
        Experiment::Exp2 => run_experiment_2(cfg),
        Experiment::Exp3 => run_experiment_3(cfg),
        Experiment::Exp4 => run_experiment_4(cfg),
    }
}
