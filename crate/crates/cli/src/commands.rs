use std::sync::Arc;

use capspec::cap::{CapDomain, RadialGrid};
use capspec::eigen::{find_eigenvalue_on, fourier_coefficient, MAX_MODE};
use capspec::gelfand::{lambda_star_bracket, IterationOptions, Nonlinearity};
use capspec::specfun::{self, Hyp2F1Params, LegendreParams};
use capspec::torsion::{torsion_closed_form_on, torsion_greens, torsion_spectral, TorsionMethod};
use serde_json::{json, Map, Value};

use crate::cli::{Common, EigenArgs, Format, GelfandArgs, SpecfunAction, SpecfunArgs, TorsionArgs};
use crate::error::CliError;
use crate::output::{fmt_float, json_num, json_opt, Cell, Table};

pub fn build_grid(dim: usize, eps: f64, nodes: Option<usize>) -> Result<Arc<RadialGrid>, CliError> {
    let dom = CapDomain::new(dim, eps).map_err(CliError::usage)?;
    match nodes {
        None => Ok(RadialGrid::default_for(&dom)),
        Some(n) => RadialGrid::new(&dom, n).map_err(CliError::usage),
    }
}

pub fn check_modes(modes: usize) -> Result<(), CliError> {
    if (1..=MAX_MODE).contains(&modes) {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "--modes must lie in 1..={MAX_MODE} (got {modes})"
        )))
    }
}

pub fn parse_nonlinearity(raw: &str) -> Result<Nonlinearity, CliError> {
    raw.parse().map_err(CliError::usage)
}

pub fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol > 1e-4 && tol < 0.1 {
        Ok(())
    } else {
        Err(CliError::usage(format!("--tol must lie in (1e-4, 0.1) (got {tol})")))
    }
}

fn render_object(common: &Common, obj: Map<String, Value>) -> String {
    match common.format {
        Format::Json => format!("{}\n", Value::Object(obj)),
        Format::Csv => {
            let mut t = Table::new(obj.keys().cloned());
            t.push(obj.values().map(value_cell).collect());
            t.to_csv()
        }
    }
}

fn value_cell(v: &Value) -> Cell {
    match v {
        Value::Null => Cell::Empty,
        Value::Number(n) if n.is_f64() => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => Cell::Int(n.as_i64().unwrap_or_default()),
        Value::String(s) => Cell::Text(s.clone()),
        other => Cell::Text(other.to_string()),
    }
}

pub fn specfun(args: &SpecfunArgs) -> Result<String, CliError> {
    let SpecfunAction::Eval { name, args } = &args.action;
    let want = |n: usize| -> Result<(), CliError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(CliError::usage(format!(
                "{name} takes {n} arguments (got {})",
                args.len()
            )))
        }
    };
    let count = |x: f64| -> Result<u32, CliError> {
        if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
            Ok(x as u32)
        } else {
            Err(CliError::usage(format!("{name} needs a nonnegative integer, got {x}")))
        }
    };
    let a = args.as_slice();
    let value = match name.as_str() {
        "gamma" => {
            want(1)?;
            specfun::gamma(a[0]).and_then(|g| g.finite(a[0]))
        }
        "rgamma" => {
            want(1)?;
            Ok(specfun::rgamma(a[0]))
        }
        "digamma" => {
            want(1)?;
            specfun::digamma(a[0])
        }
        "factorial" => {
            want(1)?;
            Ok(specfun::factorial(count(a[0])?))
        }
        "pochhammer" => {
            want(2)?;
            Ok(specfun::pochhammer(a[0], count(a[1])? as usize))
        }
        "gamma_pole_limit" => {
            want(2)?;
            specfun::gamma_pole_limit(count(a[0])?, a[1])
        }
        "hyp2f1" | "hyp2f1_near_one" | "hyp2f1_auto" => {
            want(4)?;
            let p = Hyp2F1Params::new(a[0], a[1], a[2], a[3]);
            match name.as_str() {
                "hyp2f1" => specfun::hyp2f1(p),
                "hyp2f1_near_one" => specfun::hyp2f1_near_one(p),
                _ => specfun::hyp2f1_auto(p),
            }
        }
        "hyp_u" => {
            want(4)?;
            specfun::hyp_u(a[0], a[1], count(a[2])?, a[3])
        }
        "legendre_p" => {
            want(3)?;
            specfun::legendre_p(LegendreParams::new(a[0], a[1], a[2]))
        }
        "legendre_p_hat" => {
            want(3)?;
            specfun::legendre_p_hat(a[0], a[1], a[2])
        }
        "legendre_integral" => {
            want(3)?;
            specfun::legendre_definite_integral(a[0], a[1], a[2])
        }
        other => return Err(CliError::usage(format!("unknown function '{other}'"))),
    }
    .map_err(CliError::solver)?;
    Ok(format!("{}\n", fmt_float(value)))
}

pub fn eigen(args: &EigenArgs) -> Result<String, CliError> {
    let common = &args.common;
    check_modes(args.modes)?;
    let grid = build_grid(common.dim, args.eps, common.grid)?;
    let mut rows = Vec::with_capacity(args.modes);
    for j in 1..=args.modes {
        let pair = find_eigenvalue_on(&grid, j).map_err(CliError::solver)?;
        let fourier = fourier_coefficient(&pair);
        rows.push((j, pair.lambda, pair.nu, pair.k_norm, fourier));
    }
    Ok(match common.format {
        Format::Csv => {
            let mut t = Table::new(["j", "lambda", "nu", "K", "fourier"]);
            for &(j, lambda, nu, k, c) in &rows {
                t.push(vec![j.into(), lambda.into(), nu.into(), k.into(), c.into()]);
            }
            t.to_csv()
        }
        Format::Json => {
            let modes: Vec<Value> = rows
                .iter()
                .map(|&(j, lambda, nu, k, c)| {
                    json!({
                        "j": j,
                        "lambda": json_num(lambda),
                        "nu": json_num(nu),
                        "K": json_num(k),
                        "fourier": json_num(c),
                    })
                })
                .collect();
            let doc = json!({"dim": common.dim, "eps": json_num(args.eps), "modes": modes});
            format!("{doc}\n")
        }
    })
}

pub fn torsion(args: &TorsionArgs) -> Result<String, CliError> {
    let common = &args.common;
    let method: TorsionMethod = args.method.parse().map_err(CliError::usage)?;
    match method {
        TorsionMethod::ClosedForm if !(2..=3).contains(&common.dim) => {
            return Err(CliError::usage("closed-form torsion exists only for --dim 2 or 3"));
        }
        TorsionMethod::Spectral => check_modes(args.modes)?,
        _ => {}
    }
    let grid = build_grid(common.dim, args.eps, common.grid)?;
    let result = match method {
        TorsionMethod::ClosedForm => torsion_closed_form_on(&grid),
        TorsionMethod::GreensQuadrature => torsion_greens(&grid),
        TorsionMethod::Spectral => torsion_spectral(&grid, args.modes),
    }
    .map_err(CliError::solver)?;
    let lambda1 = find_eigenvalue_on(&grid, 1).map_err(CliError::solver)?.lambda;

    let mut obj = Map::new();
    obj.insert("dim".into(), json!(common.dim));
    obj.insert("eps".into(), json_num(args.eps));
    obj.insert("method".into(), json!(method.as_str()));
    obj.insert("w0".into(), json_num(result.max_value));
    obj.insert("lambda1".into(), json_num(lambda1));
    obj.insert("gap".into(), json_num(result.max_value - 1.0 / lambda1));
    obj.insert("residual".into(), json_opt(result.residual));
    obj.insert("tail_estimate".into(), json_opt(result.tail_estimate));
    if !args.profile {
        return Ok(render_object(common, obj));
    }

    let nodes = grid.nodes();
    let values = result.w.values();
    Ok(match common.format {
        Format::Json => {
            let profile: Vec<Value> = nodes
                .iter()
                .zip(values)
                .map(|(&t, &w)| json!({"theta": json_num(t), "w": json_num(w)}))
                .collect();
            obj.insert("profile".into(), Value::Array(profile));
            format!("{}\n", Value::Object(obj))
        }
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in &obj {
                let text = match value_cell(v) {
                    Cell::Float(x) => fmt_float(x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) => s,
                    Cell::Empty => String::new(),
                };
                out.push_str(&format!("# {k}={text}\n"));
            }
            let mut t = Table::new(["theta", "w"]);
            for (&th, &w) in nodes.iter().zip(values) {
                t.push(vec![th.into(), w.into()]);
            }
            out.push_str(&t.to_csv());
            out
        }
    })
}

pub fn gelfand(args: &GelfandArgs) -> Result<String, CliError> {
    let common = &args.common;
    let f = parse_nonlinearity(&args.nonlinearity)?;
    check_tol(args.tol)?;
    let grid = build_grid(common.dim, args.eps, common.grid)?;
    let est = lambda_star_bracket(&grid, &f, args.tol, &IterationOptions::default()).map_err(CliError::solver)?;

    let mut obj = Map::new();
    obj.insert("dim".into(), json!(common.dim));
    obj.insert("eps".into(), json_num(args.eps));
    obj.insert("f".into(), json!(f.kind().to_string()));
    obj.insert("a_star".into(), json_num(f.a_star()));
    obj.insert("s_star".into(), json_num(f.s_star()));
    obj.insert("lambda1".into(), json_num(est.lambda1));
    obj.insert("w_max".into(), json_num(est.w_max));
    obj.insert("lower_analytic".into(), json_num(est.lower_analytic));
    obj.insert("bracket_lo".into(), json_num(est.bracket_lo));
    obj.insert("bracket_hi".into(), json_num(est.bracket_hi));
    obj.insert("upper_analytic".into(), json_num(est.upper_analytic));
    obj.insert("theorem_ratio".into(), json_num(est.theorem_ratio()));
    obj.insert("tol".into(), json_num(est.tolerance));
    obj.insert("stalled".into(), json!(est.stalled));
    Ok(render_object(common, obj))
}
