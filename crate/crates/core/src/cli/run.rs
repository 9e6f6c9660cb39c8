//! Resolved run configurations and their execution.
//!
//! A [`RunConfig`] holds every value that influences a result. It is echoed
//! into each output so that [`execute`] on the echo reproduces the run.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::embedding::{
    dyadic_pair, dyadic_pair_with_psi, solve_monopole, transport_monopole,
    tree_harmonic_energy_curve, transported_monopole_energy_curve, tree_harmonic_direct,
};
use crate::energy::{apply_laplacian, energy, EnergyVector};
use crate::exact::{format_rational, parse_rational};
use crate::graph::{BoundaryPolicy, ModelFamily, ModelSpec, WeightedGraph};
use crate::recursion::{
    check_identity_p, check_identity_q, check_repr_p, check_repr_p_shifted, check_repr_q,
    evaluate_pairs, growth_bounds_report, pair_sequence, product_formula_check, q_limit,
};
use crate::solver::SolverOptions;
use crate::spectral::{classify_model, resolvent_delta};
use crate::walk::{band_violations, empirical_csv, empirical_table, kernel_from_graph, simulate, WalkConfig};
use crate::{Error, Result};

/// Prefix of the config echo line in text outputs.
pub const CONFIG_PREFIX: &str = "# config ";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Polys(PolysConfig),
    Classify(ClassifyConfig),
    Walk(WalkRunConfig),
    Embed(EmbedConfig),
    Energy(EnergyConfig),
    Resolvent(ResolventConfig),
    Graph(GraphConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolysConfig {
    pub n_max: usize,
    /// Exact `num/den`; switches the table to evaluations at ξ.
    pub xi: Option<String>,
    pub check_identities: bool,
    /// X-order of the series identity checks.
    pub order: usize,
    pub q_limit: bool,
    pub q_tolerance: f64,
    pub q_cap: usize,
    pub growth: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub model: ModelSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkRunConfig {
    pub model: ModelSpec,
    /// Position on the model: line coordinate, or heap index on the tree.
    pub start: i64,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    pub depth: usize,
    pub trials: usize,
    pub seed: u64,
    /// Replace `ψ = 2^{|x|}` by `ψ ≡ 1`.
    pub wrong_psi: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    pub graph: PathBuf,
    pub vector: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventConfig {
    pub model: ModelSpec,
    pub boundary: BoundaryPolicy,
    pub vertex: i64,
    pub solver: SolverOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    pub model: ModelSpec,
}

/// Result of one run. `stdout` always starts with or contains the config echo.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    /// Full JSON report including the config echo.
    pub report: String,
    /// Curves or tables for plotting, when the command has any.
    pub csv: Option<String>,
    /// Human-readable lines for stderr.
    pub diagnostics: Vec<String>,
    /// False when a checked claim failed (exit status 2).
    pub claims_hold: bool,
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Reads a config echo from a JSON report or from a text output whose
    /// first line is `# config {...}`.
    pub fn from_echo(text: &str) -> Result<RunConfig> {
        let bad = |message: String| Error::Parse { line: 1, message };
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let value: Value = serde_json::from_str(trimmed).map_err(|e| bad(e.to_string()))?;
            let config = value
                .get("config")
                .ok_or_else(|| bad("report has no `config` field".into()))?;
            return serde_json::from_value(config.clone()).map_err(|e| bad(e.to_string()));
        }
        let line = trimmed
            .lines()
            .find_map(|l| l.strip_prefix(CONFIG_PREFIX))
            .ok_or_else(|| bad("no config echo found".into()))?;
        serde_json::from_str(line).map_err(|e| bad(e.to_string()))
    }
}

fn report_json(config: &RunConfig, body: Value) -> String {
    let mut map = serde_json::Map::new();
    map.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
    out.push('\n');
    out
}

fn json_outcome(config: &RunConfig, body: Value, csv: Option<String>, diagnostics: Vec<String>, ok: bool) -> Outcome {
    let report = report_json(config, body);
    Outcome {
        stdout: report.clone(),
        report,
        csv,
        diagnostics,
        claims_hold: ok,
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Vertex index of a model coordinate.
pub fn resolve_vertex(graph: &WeightedGraph, position: i64) -> Result<usize> {
    if let Some(i) = graph.line_index(position) {
        return Ok(i);
    }
    let len = graph.vertex_count();
    let is_line = graph
        .truncation()
        .is_some_and(|t| matches!(t.spec.family, ModelFamily::HalfLineGeom | ModelFamily::LineGeomSym | ModelFamily::LineAb));
    if !is_line && position >= 0 && (position as usize) < len {
        return Ok(position as usize);
    }
    Err(Error::InvalidParameter(format!(
        "position {position} is outside the truncation ({len} vertices)"
    )))
}

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    match config {
        RunConfig::Polys(c) => run_polys(config, c),
        RunConfig::Classify(c) => run_classify(config, c),
        RunConfig::Walk(c) => run_walk(config, c),
        RunConfig::Embed(c) => run_embed(config, c),
        RunConfig::Energy(c) => run_energy(config, c),
        RunConfig::Resolvent(c) => run_resolvent(config, c),
        RunConfig::Graph(c) => run_graph(config, c),
    }
}

fn run_polys(config: &RunConfig, c: &PolysConfig) -> Result<Outcome> {
    let mut table = format!("{CONFIG_PREFIX}{}\n", config.to_json());
    let xi = c.xi.as_deref().map(parse_rational).transpose()?;
    match &xi {
        None => {
            table.push_str("n,p_coeffs,q_coeffs\n");
            for pair in pair_sequence(c.n_max).iter().skip(1) {
                let _ = writeln!(table, "{},{},{}", pair.n, pair.p.to_semicolon_list(), pair.q.to_semicolon_list());
            }
        }
        Some(xi) => {
            let shown = format_rational(xi);
            table.push_str("n,xi,p,q\n");
            for (n, (p, q)) in evaluate_pairs(xi, c.n_max).iter().enumerate().skip(1) {
                let _ = writeln!(table, "{n},{shown},{},{}", format_rational(p), format_rational(q));
            }
        }
    }

    let mut body = serde_json::Map::new();
    let mut diagnostics = Vec::new();
    let mut ok = true;
    if c.check_identities {
        let identities = [check_identity_p(c.order), check_identity_q(c.order)];
        let gating = [check_repr_p_shifted(c.order, c.order)?, check_repr_q(c.order, c.order)?];
        let printed = check_repr_p(c.order, c.order)?;
        for check in &identities {
            diagnostics.push(format!("identity {}: {}", check.name, verdict(check.holds)));
            ok &= check.holds;
        }
        for check in &gating {
            diagnostics.push(format!("representation {}: {}", check.name, verdict(check.holds)));
            ok &= check.holds;
        }
        diagnostics.push(format!(
            "representation {}: {} (reported only; {} mismatching coefficients)",
            printed.name,
            verdict(printed.holds),
            printed.mismatches.len()
        ));
        body.insert("identities".into(), json!(identities));
        body.insert("representations".into(), json!(gating));
        body.insert("reported_only".into(), json!([printed]));
    }
    if c.growth || c.q_limit {
        let xi = xi
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("growth and q-limit need --xi".into()))?;
        if c.growth {
            let report = growth_bounds_report(xi, c.n_max)?;
            diagnostics.push(format!(
                "growth: lower bound {}, minimal exponent {:?}",
                verdict(report.lower_bound_holds),
                report.minimal_exponent
            ));
            ok &= report.lower_bound_holds && report.telescoping_holds && report.cubic_bound_holds != Some(false);
            body.insert("growth".into(), json!(report));
        }
        if c.q_limit {
            let limit = q_limit(xi, c.q_tolerance, c.q_cap)?;
            diagnostics.push(format!(
                "q limit: {:?} after {} steps, monotone {}",
                limit.value, limit.iterations, limit.monotone
            ));
            ok &= limit.monotone && limit.above_one && limit.within_bound;
            let xi_f = crate::exact::to_f64(xi);
            body.insert("q_limit".into(), json!(limit));
            body.insert("product_formula".into(), json!(product_formula_check(xi_f, 0.5)?));
        }
    }
    Ok(Outcome {
        stdout: table,
        report: report_json(config, Value::Object(body)),
        csv: None,
        diagnostics,
        claims_hold: ok,
    })
}

fn run_classify(config: &RunConfig, c: &ClassifyConfig) -> Result<Outcome> {
    let report = classify_model(&c.model)?;
    let ok = report.hard_expectations_hold();
    let diagnostics = report
        .expectations
        .iter()
        .map(|e| format!("{}: {}{}", e.name, verdict(e.holds), if e.hard { "" } else { " (reported only)" }))
        .collect();
    let csv = report.curves_csv();
    Ok(json_outcome(config, json!({ "report": report }), Some(csv), diagnostics, ok))
}

fn run_walk(config: &RunConfig, c: &WalkRunConfig) -> Result<Outcome> {
    let graph = Arc::new(c.model.build()?);
    let start = resolve_vertex(&graph, c.start)?;
    let kernel = kernel_from_graph(&graph)?;
    let stats = simulate(
        &kernel,
        WalkConfig {
            start,
            steps: c.steps,
            trials: c.trials,
            seed: c.seed,
        },
    )?;
    let rows = empirical_table(&kernel, &stats);
    let violations = band_violations(&rows);
    let tested = rows.iter().filter(|r| r.tested).count();
    let mut diagnostics = vec![format!("{tested} tested transitions, {violations} outside the 4 sigma band")];
    if tested == 0 {
        diagnostics.push("no vertex reached the minimum exit count; nothing was tested".into());
    }
    let body = json!({
        "start_vertex": start,
        "total_transitions": stats.total_transitions(),
        "band_violations": violations,
        "rows": rows,
        "stats": stats,
    });
    Ok(json_outcome(config, body, Some(empirical_csv(&rows)), diagnostics, violations == 0))
}

fn run_embed(config: &RunConfig, c: &EmbedConfig) -> Result<Outcome> {
    let options = SolverOptions::default();
    let mut diagnostics = Vec::new();
    if c.depth < 4 {
        diagnostics.push(format!(
            "warning: depth {} leaves only {} interior tree vertices; checks are weak",
            c.depth,
            (1usize << c.depth) - 1
        ));
    }
    let mut map = if c.wrong_psi {
        dyadic_pair_with_psi(c.depth, |_| 1.0)?
    } else {
        dyadic_pair(c.depth)?
    };
    let certificate = map.certify(c.trials, c.seed)?.clone();
    diagnostics.push(format!(
        "certificate: {} (isometry {:e}, intertwining {:e})",
        verdict(certificate.pass),
        certificate.isometry_max_error,
        certificate.intertwining_max_residual
    ));
    let mut ok = certificate.pass;
    let mut body = serde_json::Map::new();
    body.insert("certificate".into(), json!(certificate));

    if certificate.pass {
        let (w, _) = solve_monopole(map.target(), &options)?;
        let t = transport_monopole(&map, &w)?;
        let pass = t.residual <= 1e-8;
        ok &= pass;
        diagnostics.push(format!("monopole transport: {} (residual {:e})", verdict(pass), t.residual));
        body.insert(
            "monopole".into(),
            json!({
                "source_residual": t.source_residual,
                "residual": t.residual,
                "energy": energy(&t.vector),
                "pass": pass,
            }),
        );
        body.insert(
            "monopole_energy_curve".into(),
            json!(transported_monopole_energy_curve(2..=c.depth, &options)?),
        );
    } else {
        diagnostics.push("monopole transport skipped: certificate failed".into());
    }

    if c.depth >= 3 {
        let h = tree_harmonic_direct(1.0, c.depth, &options)?;
        body.insert(
            "tree_harmonic".into(),
            json!({
                "root_value": h.root_value,
                "antisymmetry_error": h.antisymmetry_error,
                "residual": h.residual,
                "energy": h.energy,
            }),
        );
        body.insert(
            "tree_harmonic_energy_curve".into(),
            json!(tree_harmonic_energy_curve(1.0, 3..=c.depth, &options)?),
        );
    } else {
        diagnostics.push("tree harmonic skipped: needs depth at least 3".into());
    }
    let csv = map.to_text();
    Ok(json_outcome(config, Value::Object(body), Some(csv), diagnostics, ok))
}

fn run_energy(config: &RunConfig, c: &EnergyConfig) -> Result<Outcome> {
    let graph = Arc::new(WeightedGraph::from_text(&std::fs::read_to_string(&c.graph)?)?);
    let u = EnergyVector::from_csv(Arc::clone(&graph), &std::fs::read_to_string(&c.vector)?)?;
    let lap = apply_laplacian(&u);
    let interior_max = graph
        .interior_vertices()
        .map(|x| lap.value(x).abs())
        .fold(0.0, f64::max);
    let body = json!({
        "vertices": graph.vertex_count(),
        "energy": energy(&u),
        "l2_norm": u.l2_norm(),
        "sup_norm": u.sup_norm(),
        "max_interior_laplacian": interior_max,
    });
    Ok(json_outcome(config, body, Some(lap.to_csv()), Vec::new(), true))
}

fn run_resolvent(config: &RunConfig, c: &ResolventConfig) -> Result<Outcome> {
    let mut graph = c.model.build()?;
    graph.set_policy(c.boundary);
    let graph = Arc::new(graph);
    let x = resolve_vertex(&graph, c.vertex)?;
    let r = resolvent_delta(&graph, x, &c.solver)?;
    let ok = r.stats.converged() && r.contractive;
    let diagnostics = vec![
        format!("solver: {:?}, residual {:e}", r.stats.method, r.residual),
        format!("l2 norm {:?}, contractive {}", r.l2_norm, r.contractive),
    ];
    let body = json!({
        "vertex": x,
        "stats": r.stats,
        "residual": r.residual,
        "punctured_residual": r.punctured_residual,
        "l2_norm": r.l2_norm,
        "contractive": r.contractive,
        "energy": r.energy,
        "interior_s2": r.interior_s2,
        "full_s2": r.full_s2,
        "energy_identity_residual": r.energy_identity_residual,
    });
    Ok(json_outcome(config, body, Some(r.vector.to_csv()), diagnostics, ok))
}

fn run_graph(config: &RunConfig, c: &GraphConfig) -> Result<Outcome> {
    let graph = c.model.build()?;
    let stdout = format!("{CONFIG_PREFIX}{}\n{}", config.to_json(), graph.to_text());
    let validation = graph.validate();
    Ok(Outcome {
        stdout,
        report: report_json(config, json!({ "validation": validation })),
        csv: None,
        diagnostics: Vec::new(),
        claims_hold: validation.is_valid(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polys(n_max: usize) -> RunConfig {
        RunConfig::Polys(PolysConfig {
            n_max,
            xi: None,
            check_identities: false,
            order: n_max,
            q_limit: false,
            q_tolerance: 1e-12,
            q_cap: 10_000,
            growth: false,
        })
    }

    #[test]
    fn echo_round_trips_through_text_and_json() {
        let config = polys(3);
        let out = execute(&config).unwrap();
        assert_eq!(RunConfig::from_echo(&out.stdout).unwrap(), config);
        assert_eq!(RunConfig::from_echo(&out.report).unwrap(), config);
    }

    #[test]
    fn polys_table_rows() {
        let out = execute(&polys(2)).unwrap();
        let rows: Vec<&str> = out.stdout.lines().skip(2).collect();
        assert_eq!(rows, ["1,1,1;1", "2,2;1,1;1;2;1"]);
    }

    #[test]
    fn tree_positions_are_heap_indices() {
        let graph = ModelSpec::dyadic_tree(1.0, 3).build().unwrap();
        assert_eq!(resolve_vertex(&graph, 5).unwrap(), 5);
        let line = ModelSpec::sym_line(2.0, 4).build().unwrap();
        assert_eq!(resolve_vertex(&line, -4).unwrap(), 0);
        assert!(resolve_vertex(&line, 5).is_err());
    }
}
