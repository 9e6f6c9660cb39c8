//! The reversible random walk `p(x,y) = c(x,y)/c(x)`, seeded Monte Carlo
//! simulation, and the transfer operator `(Tf)(x) = Σ_y p(x,y) f(y)`.
//!
//! At truncation frontier vertices the kernel is renormalized over the edges
//! that exist, so every row stays stochastic. Statistical and identity checks
//! skip those vertices.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{laplacian_at, EnergyVector};
use crate::graph::WeightedGraph;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct TransitionKernel {
    graph: Arc<WeightedGraph>,
    rows: Vec<Vec<(usize, f64)>>,
}

pub fn kernel_from_graph(graph: &Arc<WeightedGraph>) -> Result<TransitionKernel> {
    let rows = (0..graph.vertex_count())
        .map(|x| {
            let cx = graph.vertex_weight(x);
            if !(cx > 0.0) {
                return Err(Error::Structure(format!("vertex {x} has no outgoing conductance")));
            }
            Ok(graph.neighbors(x).iter().map(|&(y, c)| (y, c / cx)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitionKernel {
        graph: Arc::clone(graph),
        rows,
    })
}

impl TransitionKernel {
    pub fn graph(&self) -> &Arc<WeightedGraph> {
        &self.graph
    }

    pub fn row(&self, x: usize) -> &[(usize, f64)] {
        &self.rows[x]
    }

    pub fn probability(&self, x: usize, y: usize) -> f64 {
        self.rows[x]
            .iter()
            .find(|&&(z, _)| z == y)
            .map_or(0.0, |&(_, p)| p)
    }

    /// `max_x |Σ_y p(x,y) − 1|`.
    pub fn row_sum_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| (row.iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max |c(x)p(x,y) − c(y)p(y,x)| / c(x,y)` over edges.
    pub fn reversibility_deviation(&self) -> f64 {
        self.graph
            .edges()
            .iter()
            .map(|e| {
                let lhs = self.graph.vertex_weight(e.x) * self.probability(e.x, e.y);
                let rhs = self.graph.vertex_weight(e.y) * self.probability(e.y, e.x);
                (lhs - rhs).abs() / e.c
            })
            .fold(0.0, f64::max)
    }
}

/// `(Tf)(x) = Σ_y p(x,y) f(y)`.
pub fn apply_transfer(kernel: &TransitionKernel, f: &EnergyVector) -> Result<EnergyVector> {
    if !Arc::ptr_eq(kernel.graph(), f.graph()) {
        return Err(Error::GraphMismatch);
    }
    let values = transfer_values(kernel, f.values());
    EnergyVector::new(Arc::clone(&kernel.graph), values)
}

fn transfer_values(kernel: &TransitionKernel, f: &[f64]) -> Vec<f64> {
    kernel
        .rows
        .iter()
        .map(|row| row.iter().map(|&(y, p)| p * f[y]).sum())
        .collect()
}

/// Graph distance from each vertex to the nearest frontier vertex.
fn frontier_distance(graph: &WeightedGraph) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graph.vertex_count()];
    let mut queue = VecDeque::new();
    for x in graph.frontier_vertices() {
        dist[x] = 0;
        queue.push_back(x);
    }
    while let Some(x) = queue.pop_front() {
        for &(y, _) in graph.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    pub iterate: EnergyVector,
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm change over interior vertices at the last step.
    pub last_delta: f64,
    /// `T^k f ≥ T^{k−1} f` held at every vertex the frontier cannot yet reach.
    pub monotone: bool,
    pub monotone_checks: usize,
    /// `max |Δ(T^k f)|` over interior vertices.
    pub harmonicity_residual: f64,
}

/// Iterates `T` until the interior sup-norm change drops below `tol`.
pub fn transfer_iterate(kernel: &TransitionKernel, f: &EnergyVector, k_max: usize, tol: f64) -> Result<TransferReport> {
    if !Arc::ptr_eq(kernel.graph(), f.graph()) {
        return Err(Error::GraphMismatch);
    }
    let graph = kernel.graph();
    let reach = frontier_distance(graph);
    let interior: Vec<usize> = graph.interior_vertices().collect();
    let mut current = f.values().to_vec();
    let mut monotone = true;
    let mut monotone_checks = 0;
    let mut last_delta = f64::INFINITY;
    let mut iterations = 0;
    while iterations < k_max {
        let next = transfer_values(kernel, &current);
        iterations += 1;
        for x in 0..current.len() {
            if reach[x] >= iterations {
                monotone_checks += 1;
                if next[x] < current[x] - 1e-12 * current[x].abs() {
                    monotone = false;
                }
            }
        }
        last_delta = interior
            .iter()
            .map(|&x| (next[x] - current[x]).abs())
            .fold(0.0, f64::max);
        current = next;
        if last_delta < tol {
            break;
        }
    }
    let harmonicity_residual = interior
        .iter()
        .map(|&x| laplacian_at(graph, &current, x).abs())
        .fold(0.0, f64::max);
    Ok(TransferReport {
        iterate: EnergyVector::new(Arc::clone(graph), current)?,
        iterations,
        converged: last_delta < tol,
        last_delta,
        monotone,
        monotone_checks,
        harmonicity_residual,
    })
}

/// `max |(Tf)(x) − f(x) + (Δf)(x)/c(x)|` over interior vertices.
pub fn transfer_identity_residual(kernel: &TransitionKernel, f: &EnergyVector) -> Result<f64> {
    let tf = apply_transfer(kernel, f)?;
    let graph = kernel.graph();
    Ok(graph
        .interior_vertices()
        .map(|x| {
            let rhs = f.value(x) - laplacian_at(graph, f.values(), x) / graph.vertex_weight(x);
            (tf.value(x) - rhs).abs()
        })
        .fold(0.0, f64::max))
}

/// `max |(Tf)(x) − (1 + 1/c(x)) f(x)| / |f(x)|` over interior vertices; zero
/// for solutions of `Δf = −f`.
pub fn deficiency_relation_residual(kernel: &TransitionKernel, f: &EnergyVector) -> Result<f64> {
    let tf = apply_transfer(kernel, f)?;
    let graph = kernel.graph();
    Ok(graph
        .interior_vertices()
        .map(|x| {
            let expected = (1.0 + 1.0 / graph.vertex_weight(x)) * f.value(x);
            (tf.value(x) - expected).abs() / f.value(x).abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub start: usize,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCount {
    pub from: usize,
    pub to: usize,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStats {
    pub config: WalkConfig,
    /// Ordered-edge transition counts, sorted by `(from, to)`.
    pub transitions: Vec<EdgeCount>,
    /// Departures from each vertex; sums to `trials × steps`.
    pub departures: Vec<u64>,
    /// Number of walks ending at each vertex.
    pub endpoints: Vec<u64>,
}

impl WalkStats {
    pub fn total_transitions(&self) -> u64 {
        self.transitions.iter().map(|e| e.count).sum()
    }

    pub fn count(&self, from: usize, to: usize) -> u64 {
        self.transitions
            .iter()
            .find(|e| e.from == from && e.to == to)
            .map_or(0, |e| e.count)
    }
}

/// Runs `trials` independent walks of `steps` moves from `start`.
///
/// Trial `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so results do
/// not depend on the order in which trials run.
pub fn simulate(kernel: &TransitionKernel, config: WalkConfig) -> Result<WalkStats> {
    let v = kernel.graph.vertex_count();
    if config.start >= v {
        return Err(Error::VertexOutOfRange { vertex: config.start, len: v });
    }
    if config.steps == 0 || config.trials == 0 {
        return Err(Error::InvalidParameter("steps and trials must be at least 1".into()));
    }
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut departures = vec![0u64; v];
    let mut endpoints = vec![0u64; v];
    for trial in 0..config.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial as u64);
        let mut x = config.start;
        for _ in 0..config.steps {
            let y = sample(&kernel.rows[x], rng.random::<f64>());
            departures[x] += 1;
            *counts.entry((x, y)).or_insert(0) += 1;
            x = y;
        }
        endpoints[x] += 1;
    }
    Ok(WalkStats {
        config,
        transitions: counts
            .into_iter()
            .map(|((from, to), count)| EdgeCount { from, to, count })
            .collect(),
        departures,
        endpoints,
    })
}

fn sample(row: &[(usize, f64)], u: f64) -> usize {
    let mut acc = 0.0;
    for &(y, p) in row {
        acc += p;
        if u < acc {
            return y;
        }
    }
    row.last().map(|&(y, _)| y).expect("kernel rows are nonempty")
}

/// Minimum departures from a vertex before its frequencies are tested.
pub const MIN_EXITS: u64 = 1000;
/// Width of the acceptance band in binomial standard deviations.
pub const BAND_SIGMAS: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub from: usize,
    pub to: usize,
    pub count: u64,
    pub exits: u64,
    pub empirical: f64,
    pub exact: f64,
    pub sigma: f64,
    /// Whether this row is subject to the band test.
    pub tested: bool,
    pub within_band: bool,
}

/// Empirical versus exact transition probabilities for every edge leaving a
/// visited vertex.
pub fn empirical_table(kernel: &TransitionKernel, stats: &WalkStats) -> Vec<EmpiricalRow> {
    let mut rows = Vec::new();
    for (x, &exits) in stats.departures.iter().enumerate() {
        if exits == 0 {
            continue;
        }
        for &(y, p) in kernel.row(x) {
            let count = stats.count(x, y);
            let empirical = count as f64 / exits as f64;
            let sigma = (p * (1.0 - p) / exits as f64).sqrt();
            let tested = exits >= MIN_EXITS && kernel.graph.is_interior(x);
            rows.push(EmpiricalRow {
                from: x,
                to: y,
                count,
                exits,
                empirical,
                exact: p,
                sigma,
                tested,
                within_band: (empirical - p).abs() <= BAND_SIGMAS * sigma,
            });
        }
    }
    rows
}

pub fn band_violations(rows: &[EmpiricalRow]) -> usize {
    rows.iter().filter(|r| r.tested && !r.within_band).count()
}

/// CSV `from,to,count,exits,empirical,exact,sigma,tested,within_band`.
pub fn empirical_csv(rows: &[EmpiricalRow]) -> String {
    let mut out = String::from("from,to,count,exits,empirical,exact,sigma,tested,within_band\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:?},{:?},{:?},{},{}",
            r.from, r.to, r.count, r.exits, r.empirical, r.exact, r.sigma, r.tested, r.within_band
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_ab_line, build_half_line};

    #[test]
    fn half_line_kernel() {
        let g = Arc::new(build_half_line(2.0, 10).unwrap());
        let k = kernel_from_graph(&g).unwrap();
        assert!((k.probability(4, 5) - 2.0 / 3.0).abs() < 1e-15);
        assert!((k.probability(4, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(k.probability(0, 1), 1.0);
        assert!(k.row_sum_deviation() < 1e-12);
        assert!(k.reversibility_deviation() < 1e-12);
    }

    #[test]
    fn ab_kernel_at_origin() {
        let g = Arc::new(build_ab_line(2.0, 3.0, 5).unwrap());
        let k = kernel_from_graph(&g).unwrap();
        let o = g.line_index(0).unwrap();
        assert!((k.probability(o, g.line_index(1).unwrap()) - 0.4).abs() < 1e-15);
        assert!((k.probability(o, g.line_index(-1).unwrap()) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn forced_move_on_an_edge() {
        let g = Arc::new(WeightedGraph::from_edges(2, 0, [(0, 1, 3.5)]).unwrap());
        let k = kernel_from_graph(&g).unwrap();
        let s = simulate(&k, WalkConfig { start: 0, steps: 1, trials: 50, seed: 1 }).unwrap();
        assert_eq!(s.count(0, 1), 50);
        let s = simulate(&k, WalkConfig { start: 0, steps: 3, trials: 10, seed: 1 }).unwrap();
        assert_eq!(s.count(0, 1), 20);
        assert_eq!(s.count(1, 0), 10);
    }

    #[test]
    fn simulation_is_reproducible() {
        let g = Arc::new(build_half_line(2.0, 12).unwrap());
        let k = kernel_from_graph(&g).unwrap();
        let cfg = WalkConfig { start: 5, steps: 20, trials: 500, seed: 42 };
        let a = simulate(&k, cfg).unwrap();
        let b = simulate(&k, cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total_transitions(), 20 * 500);
        assert_eq!(a.departures.iter().sum::<u64>(), 20 * 500);
        let c = simulate(&k, WalkConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn transfer_of_constants_and_half_line_weights() {
        let g = Arc::new(build_half_line(2.0, 8).unwrap());
        let k = kernel_from_graph(&g).unwrap();
        let c = EnergyVector::constant(g.clone(), 2.5);
        assert_eq!(apply_transfer(&k, &c).unwrap().values(), c.values());
        let f = EnergyVector::from_fn(g.clone(), |x| (x * x) as f64);
        let tf = apply_transfer(&k, &f).unwrap();
        for x in 1..8 {
            let expect = f.value(x - 1) / 3.0 + 2.0 * f.value(x + 1) / 3.0;
            assert!((tf.value(x) - expect).abs() < 1e-12);
        }
        assert!(transfer_identity_residual(&k, &f).unwrap() < 1e-12);
    }

    #[test]
    fn iterate_stops_immediately_on_constants() {
        let g = Arc::new(build_half_line(2.0, 8).unwrap());
        let k = kernel_from_graph(&g).unwrap();
        let r = transfer_iterate(&k, &EnergyVector::constant(g.clone(), 1.0), 100, 1e-10).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
    }
}
