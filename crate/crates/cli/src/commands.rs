use levykernel_core::fit::{grid, leading_coefficient_fit, power_law_fit};
use levykernel_core::radial::{registry, SymbolSpec};
use levykernel_core::stable::{envelope, sum_symbol_envelope_check, Approximation};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Cli, Command, CompareArgs, EnvelopeArgs, EvalArgs, GridArgs, MethodArg, OutputArgs, SweepArgs};
use crate::config::Config;
use crate::error::CliError;
use crate::kernel::{Evaluator, Kernel};
use crate::table::{Meta, Row, Summary, SweepTable};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = Config::resolve(cli.config.as_deref())?;
    match cli.command {
        Command::Eval(a) => {
            let text = eval(&a, &cfg)?;
            emit(&a.output, &text)
        }
        Command::Sweep(a) => {
            let table = sweep(&a, &cfg)?;
            let text = if a.output.json { to_json(&table) } else { table.to_csv() };
            emit(&a.output, &text)
        }
        Command::Compare(a) => {
            let report = compare(&a, &cfg)?;
            emit(&a.output, &to_json(&report))
        }
        Command::Envelope(a) => {
            let report = envelope_report(&a, &cfg)?;
            emit(&a.output, &to_json(&report))
        }
        Command::Symbols(a) => {
            let text = if a.output.json {
                to_json(&registry())
            } else {
                symbols_text()
            };
            emit(&a.output, &text)
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

pub fn radii(g: &GridArgs) -> Result<Vec<f64>, CliError> {
    if !(g.r_min >= 0.0 && g.r_min.is_finite() && g.r_max.is_finite()) || g.r_max < g.r_min {
        return Err(CliError::Usage(format!(
            "need 0 <= r-min <= r-max < inf, got r-min = {}, r-max = {}",
            g.r_min, g.r_max
        )));
    }
    if g.points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if g.log && g.r_min == 0.0 {
        return Err(CliError::Usage("--log needs r-min > 0".into()));
    }
    Ok(grid(g.r_min, g.r_max, g.points, g.log))
}

fn dedup(methods: &[MethodArg]) -> Vec<MethodArg> {
    let mut v = Vec::new();
    for m in methods {
        if !v.contains(m) {
            v.push(*m);
        }
    }
    v
}

/// `|a - b| / |b|`, and zero when the two agree exactly.
pub fn rel_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn kernel_meta(ev: &Evaluator) -> Vec<Meta> {
    vec![
        Meta {
            key: "levykernel".into(),
            value: env!("CARGO_PKG_VERSION").into(),
        },
        Meta {
            key: "kernel".into(),
            value: serde_json::to_string(&ev.kernel).expect("kernel serializes"),
        },
        Meta {
            key: "tol".into(),
            value: crate::table::fmt_f64(ev.tol),
        },
    ]
}

/// Every `(method, r)` pair, evaluated in parallel and returned in grid order.
fn evaluate_grid(ev: &Evaluator, methods: &[MethodArg], rs: &[f64]) -> Vec<Vec<Result<Approximation, CliError>>> {
    let jobs: Vec<(usize, usize)> = (0..methods.len())
        .flat_map(|m| (0..rs.len()).map(move |i| (m, i)))
        .collect();
    let mut flat: Vec<Result<Approximation, CliError>> =
        jobs.par_iter().map(|&(m, i)| ev.eval(rs[i], methods[m])).collect();
    let mut out = Vec::with_capacity(methods.len());
    for _ in methods {
        let rest = flat.split_off(rs.len());
        out.push(std::mem::replace(&mut flat, rest));
    }
    out
}

/// Upper half of the grid, where tail fits are taken.
fn upper_half(n: usize) -> std::ops::Range<usize> {
    n / 2..n
}

fn tail_fit(rs: &[f64], vals: &[Option<f64>]) -> Option<levykernel_core::fit::PowerFit> {
    let (r, v): (Vec<f64>, Vec<f64>) = upper_half(rs.len())
        .filter_map(|i| vals[i].map(|v| (rs[i], v)))
        .filter(|(r, v)| *r > 0.0 && *v != 0.0)
        .unzip();
    if r.len() < 2 {
        return None;
    }
    power_law_fit(&r, &v).ok()
}

fn eval(a: &EvalArgs, cfg: &Config) -> Result<String, CliError> {
    let ev = Evaluator::from_args(&a.kernel, cfg)?;
    let approx = ev.eval(a.r, a.method)?;
    let oracle = if a.verify {
        Some(ev.eval(a.r, MethodArg::Oracle)?)
    } else {
        None
    };
    if a.output.json {
        let mut v = json!({
            "kernel": ev.kernel,
            "r": a.r,
            "requested": a.method.as_str(),
            "result": approx,
        });
        if let Some(o) = &oracle {
            v["verify"] = json!({
                "oracle": o.value,
                "oracle_est_error": o.est_error,
                "rel_gap": rel_gap(approx.value, o.value),
            });
        }
        return Ok(to_json(&v));
    }
    let t = match ev.kernel {
        Kernel::Stable(s) => s.t,
        Kernel::Symbol { t, .. } => t,
    };
    let row = |x: &Approximation| Row {
        r: a.r,
        t,
        method: x.method.as_str().into(),
        value: x.value,
        est_error: x.est_error,
    };
    let mut table = SweepTable {
        meta: kernel_meta(&ev),
        rows: vec![row(&approx)],
        summary: Vec::new(),
    };
    if let Some(o) = &oracle {
        table.rows.push(row(o));
        table.summary.push(Summary {
            name: format!("rel_gap({},oracle)", a.method.as_str()),
            value: rel_gap(approx.value, o.value),
        });
    }
    Ok(table.to_csv())
}

pub fn sweep(a: &SweepArgs, cfg: &Config) -> Result<SweepTable, CliError> {
    let ev = Evaluator::from_args(&a.kernel, cfg)?;
    let rs = radii(&a.grid)?;
    let mut methods = dedup(&a.method);
    if a.verify && !methods.contains(&MethodArg::Oracle) {
        methods.push(MethodArg::Oracle);
    }
    for m in &methods {
        ev.check_method(*m)?;
    }
    let t = match ev.kernel {
        Kernel::Stable(s) => s.t,
        Kernel::Symbol { t, .. } => t,
    };
    let results = evaluate_grid(&ev, &methods, &rs);
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(methods.len());
    let mut cells: Vec<Vec<Approximation>> = Vec::with_capacity(methods.len());
    for col in results {
        let col = col.into_iter().collect::<Result<Vec<_>, _>>()?;
        values.push(col.iter().map(|x| x.value).collect());
        cells.push(col);
    }
    let mut rows = Vec::with_capacity(rs.len() * methods.len());
    for (i, &r) in rs.iter().enumerate() {
        for col in &cells {
            let x = &col[i];
            rows.push(Row {
                r,
                t,
                method: x.method.as_str().into(),
                value: x.value,
                est_error: x.est_error,
            });
        }
    }
    let mut summary = Vec::new();
    if let Some(o) = methods.iter().position(|m| *m == MethodArg::Oracle) {
        for (j, m) in methods.iter().enumerate().filter(|(j, _)| *j != o) {
            let gap = values[j]
                .iter()
                .zip(&values[o])
                .map(|(v, w)| rel_gap(*v, *w))
                .fold(0.0, f64::max);
            summary.push(Summary {
                name: format!("max_rel_gap({},oracle)", m.as_str()),
                value: gap,
            });
        }
    }
    if rs.len() >= 4 {
        for (j, m) in methods.iter().enumerate() {
            let vals: Vec<Option<f64>> = values[j].iter().map(|v| Some(*v)).collect();
            if let Some(fit) = tail_fit(&rs, &vals) {
                summary.push(Summary {
                    name: format!("tail_slope({})", m.as_str()),
                    value: fit.slope,
                });
            }
        }
    }
    Ok(SweepTable {
        meta: kernel_meta(&ev),
        rows,
        summary,
    })
}

pub fn compare(a: &CompareArgs, cfg: &Config) -> Result<Value, CliError> {
    let ev = Evaluator::from_args(&a.kernel, cfg)?;
    let rs = radii(&a.grid)?;
    let methods = if a.method.is_empty() {
        ev.applicable_methods()
    } else {
        dedup(&a.method)
    };
    for m in &methods {
        ev.check_method(*m)?;
    }
    let results = evaluate_grid(&ev, &methods, &rs);

    let mut failures = Vec::new();
    let mut first_error = None;
    let vals: Vec<Vec<Option<f64>>> = results
        .into_iter()
        .zip(&methods)
        .map(|(col, m)| {
            col.into_iter()
                .zip(&rs)
                .map(|(x, r)| match x {
                    Ok(x) => Some(x.value),
                    Err(e) => {
                        failures.push(json!({"method": m.as_str(), "r": r, "error": e.to_string()}));
                        first_error.get_or_insert(e);
                        None
                    }
                })
                .collect()
        })
        .collect();
    if vals.iter().flatten().all(Option::is_none) {
        return Err(first_error.expect("an empty grid is rejected earlier"));
    }

    let mut pairs = Vec::new();
    for i in 0..methods.len() {
        for j in i + 1..methods.len() {
            let mut worst = 0.0f64;
            let mut at = None;
            let mut points = 0;
            for (k, &r) in rs.iter().enumerate() {
                if let (Some(x), Some(y)) = (vals[i][k], vals[j][k]) {
                    points += 1;
                    let scale = x.abs().max(y.abs());
                    let gap = if x == y { 0.0 } else { (x - y).abs() / scale };
                    if at.is_none() || gap > worst {
                        worst = gap;
                        at = Some(r);
                    }
                }
            }
            pairs.push(json!({
                "a": methods[i].as_str(),
                "b": methods[j].as_str(),
                "points": points,
                "max_rel_diff": if points > 0 { Some(worst) } else { None },
                "at_r": at,
            }));
        }
    }

    let tails: Vec<Value> = methods
        .iter()
        .zip(&vals)
        .filter_map(|(m, v)| {
            tail_fit(&rs, v).map(|f| json!({"method": m.as_str(), "slope": f.slope, "coefficient": f.coefficient, "max_residual": f.max_residual}))
        })
        .collect();

    // the reference for the leading-term fit is the oracle when present
    let reference = methods.iter().position(|m| *m == MethodArg::Oracle).unwrap_or(0);
    let leading = ev.leading().map(|l| {
        let (r, v): (Vec<f64>, Vec<f64>) = upper_half(rs.len())
            .filter_map(|i| vals[reference][i].map(|v| (rs[i], v)))
            .filter(|(r, _)| *r > 0.0)
            .unzip();
        let fitted = leading_coefficient_fit(&r, &v, l.exponent, l.correction)
            .ok()
            .map(|(c, _)| c);
        json!({
            "reference": methods[reference].as_str(),
            "exponent": l.exponent,
            "expected_slope": -l.exponent,
            "coefficient": l.coefficient,
            "correction_exponent": l.correction,
            "fitted_coefficient": fitted,
            "rel_gap": fitted.map(|c| rel_gap(c, l.coefficient)),
        })
    });

    Ok(json!({
        "kernel": ev.kernel,
        "methods": methods.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
        "grid": rs,
        "pairs": pairs,
        "tail_fit": tails,
        "leading_term": leading,
        "failures": failures,
    }))
}

pub fn envelope_report(a: &EnvelopeArgs, cfg: &Config) -> Result<Value, CliError> {
    let ev = Evaluator::from_args(&a.kernel, cfg)?;
    let rs = radii(&a.grid)?;
    if rs.iter().any(|r| *r <= 0.0) || rs.len() < 2 {
        return Err(CliError::Usage("the envelope needs at least two positive radii".into()));
    }
    match ev.kernel {
        Kernel::Stable(spec) => {
            if spec.alpha >= 2.0 {
                return Err(CliError::Usage("the power-law envelope needs alpha < 2".into()));
            }
            let m = a.method.unwrap_or(MethodArg::Auto);
            ev.check_method(m)?;
            let col = evaluate_grid(&ev, &[m], &rs).pop().expect("one method");
            let absolute = spec.beta != 0.0 && !spec.beta_is_even();
            let mut rows = Vec::with_capacity(rs.len());
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (x, &r) in col.into_iter().zip(&rs) {
                let k = x?.value;
                let k = if absolute { k.abs() } else { k };
                let e = envelope(&spec, r);
                lo = lo.min(k / e);
                hi = hi.max(k / e);
                rows.push(json!({"r": r, "kernel": k, "envelope": e, "ratio": k / e}));
            }
            Ok(json!({
                "kernel": ev.kernel,
                "method": m.as_str(),
                "absolute": absolute,
                "min_ratio": lo,
                "max_ratio": hi,
                "holds": lo > 0.0 && hi.is_finite(),
                "rows": rows,
            }))
        }
        Kernel::Symbol {
            symbol: SymbolSpec::SumStable { a: sa, b: sb },
            d,
            beta,
            t,
        } => {
            if beta != 0.0 {
                return Err(CliError::Usage("the sum_stable envelope is for beta = 0".into()));
            }
            let m = a.method.unwrap_or(MethodArg::Oracle);
            ev.check_method(m)?;
            let col = evaluate_grid(&ev, &[m], &rs).pop().expect("one method");
            let values = col
                .into_iter()
                .map(|x| x.map(|x| x.value))
                .collect::<Result<Vec<_>, _>>()?;
            let lookup = |r: f64| {
                let i = rs.iter().position(|x| *x == r).expect("radius from the grid");
                Ok(values[i])
            };
            let report = sum_symbol_envelope_check(d, sa, sb, t, &rs, lookup)?;
            Ok(json!({
                "kernel": ev.kernel,
                "method": m.as_str(),
                "holds": report.holds,
                "min_ratio": report.min_ratio,
                "max_ratio": report.max_ratio,
                "small_time_branch": report.small_time_branch,
            }))
        }
        Kernel::Symbol { symbol, .. } => Err(CliError::Usage(format!(
            "no envelope is available for the {} symbol",
            symbol.kind()
        ))),
    }
}

fn symbols_text() -> String {
    let mut out = String::from("name          parameters      formula                            example\n");
    for e in registry() {
        out.push_str(&format!(
            "{:<13} {:<15} {:<34} {}\n",
            e.name,
            e.parameters.join(","),
            e.formula,
            serde_json::to_string(&e.example).expect("symbols serialize")
        ));
    }
    out
}
