//! ε-sweeps with one row per aperture and a trailing summary.

use std::collections::BTreeSet;

use capspec::eigen::{decay_exponent_estimate, find_eigenvalue_on, fourier_coefficient, MAX_MODE};
use capspec::gelfand::{lambda_star_bracket, IterationOptions, Nonlinearity};
use capspec::torsion::torsion_greens;
use log::{info, warn};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::cli::{parse_list, Format, SweepArgs};
use crate::commands::{build_grid, check_tol, parse_nonlinearity};
use crate::error::CliError;
use crate::output::{fmt_float, json_num, json_opt, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Output {
    Eigen,
    Torsion,
    Gelfand,
    Decay,
}

impl std::str::FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eigen" => Ok(Output::Eigen),
            "torsion" => Ok(Output::Torsion),
            "gelfand" => Ok(Output::Gelfand),
            "decay" => Ok(Output::Decay),
            _ => Err(format!("unknown output '{s}'")),
        }
    }
}

/// Validated sweep request.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub dim: usize,
    pub eps_values: Vec<f64>,
    pub modes: usize,
    pub nonlinearity: Nonlinearity,
    pub tol: f64,
    pub outputs: BTreeSet<Output>,
    pub grid: Option<usize>,
}

impl SweepSpec {
    pub fn from_args(args: &SweepArgs) -> Result<Self, CliError> {
        let eps_values: Vec<f64> = parse_list(&args.eps, "eps")?;
        if eps_values.is_empty() {
            return Err(CliError::usage("--eps needs at least one value"));
        }
        if eps_values.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(CliError::usage("every eps must lie in (0, 1)"));
        }
        if eps_values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CliError::usage("eps values must be strictly decreasing"));
        }
        if args.common.dim < 2 {
            return Err(CliError::usage(format!(
                "--dim must be at least 2 (got {})",
                args.common.dim
            )));
        }
        if !(1..=MAX_MODE).contains(&args.modes) {
            return Err(CliError::usage(format!("--modes must lie in 1..={MAX_MODE}")));
        }
        let outputs: BTreeSet<Output> = args
            .outputs
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(CliError::usage))
            .collect::<Result<_, _>>()?;
        if outputs.is_empty() {
            return Err(CliError::usage("--outputs must name at least one output"));
        }
        if outputs.contains(&Output::Decay) {
            if eps_values.len() < 3 {
                return Err(CliError::usage("decay fits need at least three eps values"));
            }
            if args.modes < 2 {
                return Err(CliError::usage("decay fits need --modes 2 or more"));
            }
        }
        let nonlinearity = parse_nonlinearity(&args.nonlinearity)?;
        if outputs.contains(&Output::Gelfand) {
            check_tol(args.tol)?;
        }
        if let Some(n) = args.common.grid {
            build_grid(args.common.dim, eps_values[0], Some(n))?;
        }
        Ok(Self {
            dim: args.common.dim,
            eps_values,
            modes: args.modes,
            nonlinearity,
            tol: args.tol,
            outputs,
            grid: args.common.grid,
        })
    }

    fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    fn wants_modes(&self) -> bool {
        self.wants(Output::Eigen) || self.wants(Output::Decay)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub error: Option<String>,
    pub lambda1: Option<f64>,
    pub w_max: Option<f64>,
    pub gap: Option<f64>,
    pub lambda_star_lo: Option<f64>,
    pub lambda_star_hi: Option<f64>,
    pub theorem_ratio: Option<f64>,
    /// (λ_j, (1, φ_j)) for j = 1..J.
    pub modes: Vec<(f64, f64)>,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn status(&self) -> String {
        match &self.error {
            None => "ok".into(),
            Some(e) => format!("error: {e}"),
        }
    }
}

fn run_row(spec: &SweepSpec, eps: f64) -> SweepRow {
    let mut row = SweepRow {
        eps,
        ..SweepRow::default()
    };
    if let Err(e) = fill_row(spec, &mut row) {
        warn!("eps = {eps}: {e}");
        row = SweepRow {
            eps,
            error: Some(e),
            ..SweepRow::default()
        };
    }
    row
}

fn fill_row(spec: &SweepSpec, row: &mut SweepRow) -> Result<(), String> {
    let grid = build_grid(spec.dim, row.eps, spec.grid).map_err(|e| e.to_string())?;
    let first = find_eigenvalue_on(&grid, 1).map_err(|e| e.to_string())?;
    row.lambda1 = Some(first.lambda);
    if spec.wants_modes() {
        row.modes.push((first.lambda, fourier_coefficient(&first)));
        for j in 2..=spec.modes {
            let pair = find_eigenvalue_on(&grid, j).map_err(|e| e.to_string())?;
            row.modes.push((pair.lambda, fourier_coefficient(&pair)));
        }
    }
    if spec.wants(Output::Torsion) {
        let w_max = torsion_greens(&grid).map_err(|e| e.to_string())?.max_value;
        let gap = w_max - 1.0 / first.lambda;
        if gap.is_nan() || gap <= 0.0 {
            return Err(format!("non-positive gap {gap}"));
        }
        row.w_max = Some(w_max);
        row.gap = Some(gap);
    }
    if spec.wants(Output::Gelfand) {
        let est = lambda_star_bracket(&grid, &spec.nonlinearity, spec.tol, &IterationOptions::default())
            .map_err(|e| e.to_string())?;
        row.lambda_star_lo = Some(est.bracket_lo);
        row.lambda_star_hi = Some(est.bracket_hi);
        row.theorem_ratio = Some(est.theorem_ratio());
    }
    let finite = [
        row.w_max,
        row.gap,
        row.lambda_star_lo,
        row.lambda_star_hi,
        row.theorem_ratio,
    ]
    .into_iter()
    .flatten()
    .chain(Some(first.lambda))
    .chain(row.modes.iter().flat_map(|&(l, c)| [l, c]))
    .all(f64::is_finite);
    if finite {
        Ok(())
    } else {
        Err("non-finite value".into())
    }
}

/// Fitted slope of log|(1, φ_j)| against log ε for each j ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub j: usize,
    pub slope: Result<f64, String>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub decay: Vec<DecayFit>,
}

impl SweepReport {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.ok()).count()
    }
}

pub fn run(spec: SweepSpec, jobs: usize) -> Result<SweepReport, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {jobs} workers: {e}")))?;
    let (rows, decay) = pool.install(|| {
        let rows: Vec<SweepRow> = spec.eps_values.par_iter().map(|&e| run_row(&spec, e)).collect();
        let decay: Vec<DecayFit> = if spec.wants(Output::Decay) {
            (2..=spec.modes)
                .into_par_iter()
                .map(|j| DecayFit {
                    j,
                    slope: decay_exponent_estimate(spec.dim, j, &spec.eps_values).map_err(|e| e.to_string()),
                })
                .collect()
        } else {
            Vec::new()
        };
        (rows, decay)
    });
    info!(
        "sweep finished: {} rows, {} failed",
        rows.len(),
        rows.iter().filter(|r| !r.ok()).count()
    );
    Ok(SweepReport { spec, rows, decay })
}

fn header(modes: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "eps",
        "status",
        "lambda1",
        "w_max",
        "gap",
        "lambda_star_lo",
        "lambda_star_hi",
        "theorem_ratio",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend((1..=modes).map(|j| format!("lambda_{j}")));
    h.extend((1..=modes).map(|j| format!("fourier_{j}")));
    h
}

fn summary_pairs(report: &SweepReport) -> Vec<(String, Value)> {
    let s = &report.spec;
    let outputs: Vec<&str> = s
        .outputs
        .iter()
        .map(|o| match o {
            Output::Eigen => "eigen",
            Output::Torsion => "torsion",
            Output::Gelfand => "gelfand",
            Output::Decay => "decay",
        })
        .collect();
    let mut pairs = vec![
        ("dim".to_string(), json!(s.dim)),
        ("modes".to_string(), json!(s.modes)),
        ("outputs".to_string(), json!(outputs.join(","))),
        ("f".to_string(), json!(s.nonlinearity.kind().to_string())),
        ("rows".to_string(), json!(report.rows.len())),
        ("failed".to_string(), json!(report.failed_rows())),
    ];
    for fit in &report.decay {
        let v = match &fit.slope {
            Ok(x) => json_num(*x),
            Err(e) => json!(format!("error: {e}")),
        };
        pairs.push((format!("decay_slope_{}", fit.j), v));
    }
    pairs
}

pub fn render(report: &SweepReport, format: Format) -> String {
    let modes = if report.spec.wants_modes() {
        report.spec.modes
    } else {
        0
    };
    let header = header(modes);
    match format {
        Format::Csv => {
            let mut t = Table::new(header);
            for r in &report.rows {
                let mut cells = vec![
                    Cell::Float(r.eps),
                    Cell::Text(r.status()),
                    Cell::opt(r.lambda1),
                    Cell::opt(r.w_max),
                    Cell::opt(r.gap),
                    Cell::opt(r.lambda_star_lo),
                    Cell::opt(r.lambda_star_hi),
                    Cell::opt(r.theorem_ratio),
                ];
                for i in 0..modes {
                    cells.push(Cell::opt(r.modes.get(i).map(|m| m.0)));
                }
                for i in 0..modes {
                    cells.push(Cell::opt(r.modes.get(i).map(|m| m.1)));
                }
                t.push(cells);
            }
            let mut out = t.to_csv();
            for (k, v) in summary_pairs(report) {
                let text = match v {
                    Value::Number(n) if n.is_f64() => fmt_float(n.as_f64().unwrap_or(f64::NAN)),
                    Value::String(s) => s,
                    other => other.to_string(),
                };
                out.push_str(&format!("# summary {k}={text}\n"));
            }
            out
        }
        Format::Json => {
            let mut out = String::new();
            for r in &report.rows {
                let mut obj = Map::new();
                let values = [
                    json_num(r.eps),
                    json!(r.status()),
                    json_opt(r.lambda1),
                    json_opt(r.w_max),
                    json_opt(r.gap),
                    json_opt(r.lambda_star_lo),
                    json_opt(r.lambda_star_hi),
                    json_opt(r.theorem_ratio),
                ];
                for (k, v) in header.iter().zip(values) {
                    obj.insert(k.clone(), v);
                }
                for i in 0..modes {
                    obj.insert(header[8 + i].clone(), json_opt(r.modes.get(i).map(|m| m.0)));
                }
                for i in 0..modes {
                    obj.insert(header[8 + modes + i].clone(), json_opt(r.modes.get(i).map(|m| m.1)));
                }
                out.push_str(&Value::Object(obj).to_string());
                out.push('\n');
            }
            let summary: Map<String, Value> = summary_pairs(report).into_iter().collect();
            out.push_str(&json!({ "summary": summary }).to_string());
            out.push('\n');
            out
        }
    }
}
