use rayon::prelude::*;
use serde_json::{json, Value};

use crate::commands::{execute, CommandOutput};
use crate::config::RunConfig;
use crate::report::Status;
use crate::CliError;

fn apply(cfg: &mut RunConfig, name: &str, value: f64) -> Result<(), CliError> {
    let as_count = |v: f64| -> Result<usize, CliError> {
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(CliError::validation(format!(
                "`{name}` must be a nonnegative integer, got {v}"
            )))
        }
    };
    if let Some(field) = name.strip_prefix("map.") {
        let m = cfg
            .map
            .as_mut()
            .ok_or_else(|| CliError::validation("sweep over `map.*` needs a `map`"))?;
        return Ok(m.set_param(field, value)?);
    }
    if let Some(field) = name.strip_prefix("second_map.") {
        let m = cfg.second_map.as_mut().ok_or_else(|| {
            CliError::validation("sweep over `second_map.*` needs a `second_map`")
        })?;
        return Ok(m.set_param(field, value)?);
    }
    if let Some(i) = name.strip_prefix("point.") {
        let i: usize = i
            .parse()
            .map_err(|_| CliError::validation(format!("bad point index in `{name}`")))?;
        let dim = cfg.class.as_ref().map_or(i + 1, |c| c.entries.len());
        let p = cfg.point.get_or_insert_with(|| vec![0.0; dim]);
        if i >= p.len() {
            return Err(CliError::validation(format!("`{name}` is out of range")));
        }
        p[i] = value;
        return Ok(());
    }
    match name {
        "tolerance" => cfg.options.tolerance = Some(value),
        "grid" => cfg.options.grid = Some(as_count(value)?),
        "max_iterations" => cfg.options.max_iterations = Some(as_count(value)?),
        "segments" => cfg.options.segments = Some(as_count(value)?),
        "seed" => cfg.seed = as_count(value)? as u64,
        _ => {
            return Err(CliError::validation(format!(
                "parameter `{name}` cannot be swept"
            )))
        }
    }
    Ok(())
}

/// Columns: one per swept parameter, then `value`, `error_bound`, `verdict`, `iterations`.
pub fn run_sweep(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::validation("missing `sweep`"))?;
    let grids: Vec<Vec<f64>> = spec
        .parameters
        .iter()
        .map(|p| p.grid())
        .collect::<Result<_, _>>()?;
    let total = grids
        .iter()
        .try_fold(1usize, |acc, g| acc.checked_mul(g.len()))
        .filter(|&t| t <= spec.max_rows)
        .ok_or_else(|| {
            CliError::validation(format!("sweep exceeds the cap of {} rows", spec.max_rows))
        })?;
    let mut base = cfg.clone();
    base.command = Some(spec.target);
    base.sweep = None;

    let rows: Vec<(Vec<Value>, Status)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            // mixed radix with the first parameter varying slowest
            let mut rem = idx;
            let mut tuple = vec![0.0; grids.len()];
            for (k, g) in grids.iter().enumerate().rev() {
                tuple[k] = g[rem % g.len()];
                rem /= g.len();
            }
            let mut row: Vec<Value> = tuple.iter().map(|v| json!(v)).collect();
            let mut c = base.clone();
            let result = spec
                .parameters
                .iter()
                .zip(&tuple)
                .try_for_each(|(p, v)| apply(&mut c, &p.name, *v))
                .and_then(|_| c.validate())
                .and_then(|_| execute(&c));
            match result {
                Ok(out) => {
                    let s = out
                        .summary
                        .ok_or_else(|| CliError::validation("target has no scalar summary"));
                    match s {
                        Ok(s) => {
                            row.extend([
                                json!(s.value),
                                json!(s.error_bound),
                                json!(s.verdict),
                                json!(s.iterations),
                            ]);
                            (row, out.status)
                        }
                        Err(e) => {
                            row.extend([
                                Value::Null,
                                Value::Null,
                                json!(format!("error: {e}")),
                                Value::Null,
                            ]);
                            (row, e.status())
                        }
                    }
                }
                Err(e) => {
                    row.extend([
                        Value::Null,
                        Value::Null,
                        json!(format!("error: {e}")),
                        Value::Null,
                    ]);
                    (row, e.status())
                }
            }
        })
        .collect();
    let status = rows.iter().fold(Status::Ok, |s, r| s.max(r.1));
    let mut columns: Vec<String> = spec.parameters.iter().map(|p| p.name.clone()).collect();
    columns.extend(["value", "error_bound", "verdict", "iterations"].map(String::from));
    let mut out = CommandOutput::ok(
        json!({
            "target": spec.target.name(),
            "columns": columns,
            "rows": rows.into_iter().map(|r| r.0).collect::<Vec<_>>(),
        }),
        None,
    );
    out.status = status;
    Ok(out)
}
