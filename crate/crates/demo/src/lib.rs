//! Browser bindings. Every export returns a JSON string, or throws a string.

use std::sync::Arc;

use serde_json::json;
use wasm_bindgen::prelude::*;

use resistnet::graph::{BoundaryPolicy, ModelSpec, WeightedGraph};
use resistnet::solver::SolverOptions;
use resistnet::spectral::{build_deficiency_zplus, resolvent_delta};
use resistnet::walk::{kernel_from_graph, simulate, WalkConfig};

const MAX_DEPTH: usize = 400;
const MAX_TRIALS: usize = 200_000;

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn line_spec(model: &str, m: f64, depth: usize) -> Result<ModelSpec, JsValue> {
    match model {
        "half-line" => Ok(ModelSpec::half_line(m, depth)),
        "sym-line" => Ok(ModelSpec::sym_line(m, depth)),
        other => Err(err(format!("unknown model {other}"))),
    }
}

/// `(position, vertex)` for every vertex of a line model, left to right.
fn positions(g: &WeightedGraph, depth: usize) -> Vec<(i64, usize)> {
    let d = depth as i64;
    (-d..=d).filter_map(|x| g.line_index(x).map(|i| (x, i))).collect()
}

/// Deficiency solution `Δu = −u` on the half-line with `c(n−1, n) = Mⁿ`.
#[wasm_bindgen]
pub fn deficiency(m: f64, depth: usize) -> Result<String, JsValue> {
    if depth > MAX_DEPTH {
        return Err(err(format!("depth is capped at {MAX_DEPTH}")));
    }
    let d = build_deficiency_zplus(m, depth).map_err(err)?;
    Ok(json!({
        "xi": d.xi,
        "values": d.values,
        "energy_partial_sums": d.energy_partial_sums,
        "energy_class": d.energy_class,
        "l2_partial_sums": d.l2_partial_sums,
        "l2_verdict": d.l2_tail.verdict,
    })
    .to_string())
}

/// `(I + Δ)u = δ_x` on a truncated line with the frontier pinned to 0.
#[wasm_bindgen]
pub fn resolvent(model: &str, m: f64, depth: usize, x: i64) -> Result<String, JsValue> {
    if depth > MAX_DEPTH {
        return Err(err(format!("depth is capped at {MAX_DEPTH}")));
    }
    let mut g = line_spec(model, m, depth)?.build().map_err(err)?;
    g.set_policy(BoundaryPolicy::Absorbing);
    let g = Arc::new(g);
    let v = g.line_index(x).ok_or_else(|| err(format!("position {x} is outside the truncation")))?;
    let r = resolvent_delta(&g, v, &SolverOptions::default()).map_err(err)?;
    let (xs, us): (Vec<i64>, Vec<f64>) = positions(&g, depth).into_iter().map(|(p, i)| (p, r.vector.value(i))).unzip();
    Ok(json!({
        "positions": xs,
        "values": us,
        "l2_norm": r.l2_norm,
        "energy": r.energy,
        "residual": r.residual,
        "contractive": r.contractive,
    })
    .to_string())
}

/// Endpoint histogram of `trials` seeded walks of `steps` steps from `start`.
#[wasm_bindgen]
pub fn walk(model: &str, m: f64, depth: usize, start: i64, steps: usize, trials: usize, seed: u64) -> Result<String, JsValue> {
    if trials > MAX_TRIALS || depth > MAX_DEPTH {
        return Err(err(format!("at most {MAX_TRIALS} trials and depth {MAX_DEPTH}")));
    }
    let g = Arc::new(line_spec(model, m, depth)?.build().map_err(err)?);
    let from = g.line_index(start).ok_or_else(|| err(format!("position {start} is outside the truncation")))?;
    let kernel = kernel_from_graph(&g).map_err(err)?;
    let stats = simulate(&kernel, WalkConfig { start: from, steps, trials, seed }).map_err(err)?;
    let (xs, counts): (Vec<i64>, Vec<u64>) = positions(&g, depth).into_iter().map(|(p, i)| (p, stats.endpoints[i])).unzip();
    let right = g.line_index(start + 1).map_or(0.0, |y| kernel.probability(from, y));
    Ok(json!({
        "positions": xs,
        "endpoints": counts,
        "step_right_exact": right,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_produce_json() {
        let d: serde_json::Value = serde_json::from_str(&deficiency(2.0, 30).unwrap()).unwrap();
        assert_eq!(d["values"].as_array().unwrap().len(), 31);
        let r: serde_json::Value = serde_json::from_str(&resolvent("sym-line", 2.0, 20, 0).unwrap()).unwrap();
        assert_eq!(r["positions"].as_array().unwrap().len(), 41);
        assert_eq!(r["contractive"], true);
        let w: serde_json::Value = serde_json::from_str(&walk("half-line", 2.0, 20, 3, 4, 1000, 1).unwrap()).unwrap();
        let total: u64 = w["endpoints"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
        assert_eq!(total, 1000);
        assert!((w["step_right_exact"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }
}
