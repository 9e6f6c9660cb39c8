//! The energy form `𝓔(u) = Σ_{edges} c(x,y)|u(x) − u(y)|²`, the graph Laplacian
//! `(Δu)(x) = Σ_{y∼x} c(x,y)(u(x) − u(y))`, dipoles, and the Fin/Harm split.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::graph::WeightedGraph;
use crate::solver::{self, SolveStats, SolverOptions};
use crate::tail::{classify_increments, TailVerdict};
use crate::{Error, Result};

/// A real function on the vertices of a graph, read modulo constants when
/// energies are taken.
#[derive(Clone, Debug)]
pub struct EnergyVector {
    graph: Arc<WeightedGraph>,
    values: Vec<f64>,
    normalized: bool,
}

impl PartialEq for EnergyVector {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph) && self.values == other.values
    }
}

impl EnergyVector {
    pub fn new(graph: Arc<WeightedGraph>, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.vertex_count() {
            return Err(Error::InvalidParameter(format!(
                "vector has {} entries for {} vertices",
                values.len(),
                graph.vertex_count()
            )));
        }
        Ok(EnergyVector {
            graph,
            values,
            normalized: false,
        })
    }

    pub fn zeros(graph: Arc<WeightedGraph>) -> Self {
        let n = graph.vertex_count();
        EnergyVector {
            graph,
            values: vec![0.0; n],
            normalized: true,
        }
    }

    pub fn constant(graph: Arc<WeightedGraph>, value: f64) -> Self {
        let n = graph.vertex_count();
        EnergyVector {
            graph,
            values: vec![value; n],
            normalized: value == 0.0,
        }
    }

    /// The Dirac mass `δ_x`.
    pub fn delta(graph: Arc<WeightedGraph>, x: usize) -> Result<Self> {
        let n = graph.vertex_count();
        if x >= n {
            return Err(Error::VertexOutOfRange { vertex: x, len: n });
        }
        let mut values = vec![0.0; n];
        values[x] = 1.0;
        EnergyVector::new(graph, values)
    }

    pub fn from_fn(graph: Arc<WeightedGraph>, f: impl Fn(usize) -> f64) -> Self {
        let values = (0..graph.vertex_count()).map(f).collect();
        EnergyVector {
            graph,
            values,
            normalized: false,
        }
    }

    pub fn graph(&self) -> &Arc<WeightedGraph> {
        &self.graph
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Shifts by a constant so that the base vertex carries value 0.
    pub fn normalize(&self) -> EnergyVector {
        let shift = self.values[self.graph.base()];
        EnergyVector {
            graph: Arc::clone(&self.graph),
            values: self.values.iter().map(|v| v - shift).collect(),
            normalized: true,
        }
    }

    pub fn check_same_graph(&self, other: &EnergyVector) -> Result<()> {
        if Arc::ptr_eq(&self.graph, &other.graph) {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &EnergyVector, b: f64) -> Result<EnergyVector> {
        self.check_same_graph(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| a * u + b * v)
            .collect();
        EnergyVector::new(Arc::clone(&self.graph), values)
    }

    pub fn scale(&self, a: f64) -> EnergyVector {
        EnergyVector {
            graph: Arc::clone(&self.graph),
            values: self.values.iter().map(|v| a * v).collect(),
            normalized: self.normalized,
        }
    }

    pub fn energy(&self) -> f64 {
        energy(self)
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// CSV with header `vertex,value`; values printed in round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex,value\n");
        for (x, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{x},{v:?}");
        }
        out
    }

    pub fn from_csv(graph: Arc<WeightedGraph>, text: &str) -> Result<EnergyVector> {
        let mut values = vec![0.0; graph.vertex_count()];
        let mut seen = vec![false; graph.vertex_count()];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line == "vertex,value") {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 1, message };
            let (x, v) = line
                .split_once(',')
                .ok_or_else(|| err("expected `vertex,value`".into()))?;
            let x: usize = x.trim().parse().map_err(|e| err(format!("bad vertex: {e}")))?;
            let v: f64 = v.trim().parse().map_err(|e| err(format!("bad value: {e}")))?;
            if x >= values.len() {
                return Err(Error::VertexOutOfRange { vertex: x, len: values.len() });
            }
            values[x] = v;
            seen[x] = true;
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!("vector file has no value for vertex {x}")));
        }
        EnergyVector::new(graph, values)
    }
}

/// `Σ_{edges} c(x,y)|u(x) − u(y)|²` (each unordered edge once).
pub fn energy(u: &EnergyVector) -> f64 {
    u.graph
        .edges()
        .iter()
        .map(|e| {
            let d = u.values[e.x] - u.values[e.y];
            e.c * d * d
        })
        .sum()
}

/// `𝓔(u, v) = Σ_{edges} c(x,y)(u(x) − u(y))(v(x) − v(y))`.
pub fn energy_inner(u: &EnergyVector, v: &EnergyVector) -> Result<f64> {
    u.check_same_graph(v)?;
    Ok(u
        .graph
        .edges()
        .iter()
        .map(|e| e.c * (u.values[e.x] - u.values[e.y]) * (v.values[e.x] - v.values[e.y]))
        .sum())
}

/// `(Δu)(x)` at a single vertex, using the edges present in the graph.
pub fn laplacian_at(graph: &WeightedGraph, values: &[f64], x: usize) -> f64 {
    graph
        .neighbors(x)
        .iter()
        .map(|&(y, c)| c * (values[x] - values[y]))
        .sum()
}

pub fn apply_laplacian(u: &EnergyVector) -> EnergyVector {
    let values = (0..u.graph.vertex_count())
        .map(|x| laplacian_at(&u.graph, &u.values, x))
        .collect();
    EnergyVector {
        graph: Arc::clone(&u.graph),
        values,
        normalized: false,
    }
}

/// Sparse rows of `Δ`: diagonal `c(x)`, off-diagonal `−c(x,y)`.
#[derive(Clone, Debug)]
pub struct LaplaceOperator {
    graph: Arc<WeightedGraph>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl LaplaceOperator {
    pub fn new(graph: Arc<WeightedGraph>) -> Self {
        let rows = (0..graph.vertex_count())
            .map(|x| {
                let mut row: Vec<(usize, f64)> = graph.neighbors(x).iter().map(|&(y, c)| (y, -c)).collect();
                row.push((x, graph.vertex_weight(x)));
                row.sort_by_key(|&(y, _)| y);
                row
            })
            .collect();
        LaplaceOperator { graph, rows }
    }

    pub fn graph(&self) -> &Arc<WeightedGraph> {
        &self.graph
    }

    pub fn row(&self, x: usize) -> &[(usize, f64)] {
        &self.rows[x]
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.rows[x]
            .binary_search_by_key(&y, |&(z, _)| z)
            .map(|i| self.rows[x][i].1)
            .unwrap_or(0.0)
    }

    pub fn row_sum(&self, x: usize) -> f64 {
        self.rows[x].iter().map(|&(_, a)| a).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(x, row)| row.iter().all(|&(y, a)| self.entry(y, x) == a))
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(y, a)| a * u[y]).sum())
            .collect()
    }

    /// `uᵀΔu`.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        self.apply(u).iter().zip(u).map(|(a, b)| a * b).sum()
    }
}

/// Solves `Δv = δ_x − δ_o` with `v(o) = 0`.
pub fn solve_dipole(
    graph: &Arc<WeightedGraph>,
    x: usize,
    options: &SolverOptions,
) -> Result<(EnergyVector, SolveStats)> {
    let n = graph.vertex_count();
    let o = graph.base();
    if x >= n {
        return Err(Error::VertexOutOfRange { vertex: x, len: n });
    }
    if x == o {
        return Err(Error::InvalidParameter("dipole vertex must differ from the base vertex".into()));
    }
    let mut rhs = vec![0.0; n];
    rhs[x] = 1.0;
    rhs[o] = -1.0;
    let (values, stats) = solver::solve(graph, 0.0, &rhs, &[(o, 0.0)], options)?;
    let mut v = EnergyVector::new(Arc::clone(graph), values)?;
    v.normalized = true;
    Ok((v, stats))
}

/// `(Σ 1/c(x_{i−1}, x_i))^{1/2}` along an edge path from the base vertex to `x`.
/// Every `u` obeys `|u(x) − u(o)| ≤ bound · √𝓔(u)`.
pub fn distance_bound(graph: &WeightedGraph, x: usize, path: &[usize]) -> Result<f64> {
    let n = graph.vertex_count();
    if let Some(&bad) = path.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: bad, len: n });
    }
    if path.first() != Some(&graph.base()) || path.last() != Some(&x) {
        return Err(Error::BrokenPath {
            step: 0,
            from: path.first().copied().unwrap_or(usize::MAX),
            to: x,
        });
    }
    let mut resistance = 0.0;
    for (step, pair) in path.windows(2).enumerate() {
        let c = graph.conductance(pair[0], pair[1]).ok_or(Error::BrokenPath {
            step,
            from: pair[0],
            to: pair[1],
        })?;
        resistance += 1.0 / c;
    }
    Ok(resistance.sqrt())
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub fin: EnergyVector,
    pub harm: EnergyVector,
    pub coefficients: Vec<f64>,
    /// `|𝓔(v) − 𝓔(fin) − 𝓔(harm)| / 𝓔(v)`.
    pub pythagoras_residual: f64,
    pub gram_condition: f64,
}

/// Largest accepted condition number of the Gram matrix.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

/// Energy-orthogonal projection of `v` onto the span of `harm_basis`.
pub fn project_fin_harm(v: &EnergyVector, harm_basis: &[EnergyVector]) -> Result<Projection> {
    let k = harm_basis.len();
    if k == 0 {
        return Ok(Projection {
            fin: v.clone(),
            harm: EnergyVector::zeros(Arc::clone(&v.graph)),
            coefficients: Vec::new(),
            pythagoras_residual: 0.0,
            gram_condition: 1.0,
        });
    }
    for h in harm_basis {
        v.check_same_graph(h)?;
    }
    let mut gram = DMatrix::<f64>::zeros(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    for i in 0..k {
        rhs[i] = energy_inner(&harm_basis[i], v)?;
        for j in 0..k {
            gram[(i, j)] = energy_inner(&harm_basis[i], &harm_basis[j])?;
        }
    }
    let eigen = gram.clone().symmetric_eigen();
    let max_eig = eigen.eigenvalues.max();
    let min_eig = eigen.eigenvalues.min();
    let condition = if min_eig > 0.0 { max_eig / min_eig } else { f64::INFINITY };
    if !(condition <= GRAM_CONDITION_LIMIT) {
        return Err(Error::SingularGram { condition });
    }
    let coefficients = gram
        .cholesky()
        .ok_or(Error::SingularGram { condition })?
        .solve(&rhs);
    let mut harm = vec![0.0; v.values.len()];
    for (h, a) in harm_basis.iter().zip(coefficients.iter()) {
        for (acc, hv) in harm.iter_mut().zip(&h.values) {
            *acc += a * hv;
        }
    }
    let harm = EnergyVector::new(Arc::clone(&v.graph), harm)?;
    let fin = v.combine(1.0, &harm, -1.0)?;
    let total = energy(v);
    let pythagoras_residual = if total > 0.0 {
        (total - energy(&fin) - energy(&harm)).abs() / total
    } else {
        0.0
    };
    Ok(Projection {
        fin,
        harm,
        coefficients: coefficients.iter().copied().collect(),
        pythagoras_residual,
        gram_condition: condition,
    })
}

/// Relative tail tolerance for [`sum_s2`].
pub const S2_TAIL_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S2Report {
    pub total: f64,
    /// `(depth, Σ_{depth(x) ≤ depth} u(x)(Δu)(x))` at depths `N/2`, `3N/4`, `N`.
    pub checkpoints: Vec<(usize, f64)>,
    pub verdict: TailVerdict,
}

/// `S₂(u) = Σ_x u(x)(Δu)(x)` over the truncation with a growth diagnostic
/// based on depth shells around the base vertex.
pub fn sum_s2(u: &EnergyVector) -> S2Report {
    let lap = apply_laplacian(u);
    let depths = u.graph.depths();
    let max_depth = depths.iter().flatten().copied().max().unwrap_or(0);
    let mut shells = vec![0.0; max_depth + 1];
    for (x, d) in depths.iter().enumerate() {
        if let Some(d) = d {
            shells[*d] += u.values[x] * lap.values[x];
        }
    }
    let partial = |d: usize| shells[..=d.min(max_depth)].iter().sum::<f64>();
    let total: f64 = shells.iter().sum();
    let marks = [max_depth / 2, 3 * max_depth / 4, max_depth];
    let checkpoints: Vec<(usize, f64)> = marks.iter().map(|&d| (d, partial(d))).collect();
    let late = (checkpoints[2].1 - checkpoints[1].1).abs();
    let scale = checkpoints.iter().fold(0.0f64, |m, &(_, s)| m.max(s.abs()));
    let verdict = if late <= S2_TAIL_TOLERANCE * scale || scale == 0.0 {
        TailVerdict::Convergent
    } else {
        match classify_increments(&shells).verdict {
            TailVerdict::Convergent => TailVerdict::Inconclusive,
            other => other,
        }
    };
    S2Report {
        total,
        checkpoints,
        verdict,
    }
}
