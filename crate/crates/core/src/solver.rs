//! Linear solves for `(s·I + Δ) u = b` with some vertices held at fixed values.
//!
//! Fixed vertices are eliminated, which leaves a symmetric positive definite
//! system on the free vertices as long as every free component touches a
//! fixed vertex or `s > 0`. Small systems go through a diagonally scaled dense
//! Cholesky factorization with iterative refinement; larger ones through
//! Jacobi-preconditioned conjugate gradients.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::graph::WeightedGraph;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Acceptable residual, absolute or relative to the row magnitude.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Free-vertex count up to which the dense factorization is used.
    pub dense_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            max_iterations: 200_000,
            dense_limit: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    DenseCholesky,
    ConjugateGradient,
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub method: SolveMethod,
    pub iterations: usize,
    /// Max-norm of the residual over free vertices.
    pub residual: f64,
    /// Max over free vertices of |residual| / (row magnitude at the solution).
    pub relative_residual: f64,
    pub tolerance: f64,
}

impl SolveStats {
    pub fn converged(&self) -> bool {
        self.residual <= self.tolerance || self.relative_residual <= self.tolerance
    }
}

struct Reduced<'g> {
    graph: &'g WeightedGraph,
    shift: f64,
    free: Vec<usize>,
    slot: Vec<Option<usize>>,
}

impl Reduced<'_> {
    fn diagonal(&self, x: usize) -> f64 {
        self.shift + self.graph.vertex_weight(x)
    }

    fn apply(&self, z: &[f64], out: &mut [f64]) {
        for (i, &x) in self.free.iter().enumerate() {
            let mut acc = self.diagonal(x) * z[i];
            for &(y, c) in self.graph.neighbors(x) {
                if let Some(j) = self.slot[y] {
                    acc -= c * z[j];
                }
            }
            out[i] = acc;
        }
    }
}

/// Residual max-norm and relative residual of `(s·I + Δ)u = rhs` on free vertices.
pub fn residual_norms(
    graph: &WeightedGraph,
    shift: f64,
    u: &[f64],
    rhs: &[f64],
    free: impl Iterator<Item = usize>,
) -> (f64, f64) {
    let mut abs_max = 0.0f64;
    let mut rel_max = 0.0f64;
    for x in free {
        let diag = shift + graph.vertex_weight(x);
        let mut r = diag * u[x] - rhs[x];
        let mut scale = (diag * u[x]).abs() + rhs[x].abs();
        for &(y, c) in graph.neighbors(x) {
            r -= c * u[y];
            scale += (c * u[y]).abs();
        }
        abs_max = abs_max.max(r.abs());
        if scale > 0.0 {
            rel_max = rel_max.max(r.abs() / scale);
        }
    }
    (abs_max, rel_max)
}

/// Solves `(shift·I + Δ)u = rhs` at the free vertices with `u` pinned on `fixed`.
///
/// `rhs` is indexed by vertex; entries at fixed vertices are ignored.
pub fn solve(
    graph: &WeightedGraph,
    shift: f64,
    rhs: &[f64],
    fixed: &[(usize, f64)],
    options: &SolverOptions,
) -> Result<(Vec<f64>, SolveStats)> {
    let v = graph.vertex_count();
    if rhs.len() != v {
        return Err(Error::InvalidParameter(format!(
            "right-hand side has {} entries for {v} vertices",
            rhs.len()
        )));
    }
    if shift < 0.0 {
        return Err(Error::InvalidParameter("shift must be nonnegative".into()));
    }
    let mut u = vec![0.0; v];
    let mut is_fixed = vec![false; v];
    for &(x, value) in fixed {
        if x >= v {
            return Err(Error::VertexOutOfRange { vertex: x, len: v });
        }
        is_fixed[x] = true;
        u[x] = value;
    }
    let free: Vec<usize> = (0..v).filter(|&x| !is_fixed[x]).collect();
    let mut slot = vec![None; v];
    for (i, &x) in free.iter().enumerate() {
        slot[x] = Some(i);
    }
    if shift == 0.0 {
        check_anchored(graph, &is_fixed)?;
    }
    let system = Reduced { graph, shift, free, slot };

    let n = system.free.len();
    let mut b = vec![0.0; n];
    for (i, &x) in system.free.iter().enumerate() {
        b[i] = rhs[x];
        for &(y, c) in graph.neighbors(x) {
            if is_fixed[y] {
                b[i] += c * u[y];
            }
        }
    }

    let (z, method, iterations) = if n == 0 {
        (Vec::new(), SolveMethod::Trivial, 0)
    } else if n <= options.dense_limit {
        let (z, it) = dense_solve(&system, &b)?;
        (z, SolveMethod::DenseCholesky, it)
    } else {
        let (z, it) = pcg(&system, &b, rhs, &u, options)?;
        (z, SolveMethod::ConjugateGradient, it)
    };
    for (i, &x) in system.free.iter().enumerate() {
        u[x] = z[i];
    }
    let (residual, relative_residual) =
        residual_norms(graph, shift, &u, rhs, system.free.iter().copied());
    let stats = SolveStats {
        method,
        iterations,
        residual,
        relative_residual,
        tolerance: options.tolerance,
    };
    if !stats.converged() {
        return Err(Error::NotConverged {
            iterations,
            residual,
            tolerance: options.tolerance,
        });
    }
    Ok((u, stats))
}

/// Without a shift every connected piece of free vertices needs a pinned neighbor.
fn check_anchored(graph: &WeightedGraph, is_fixed: &[bool]) -> Result<()> {
    let v = graph.vertex_count();
    let mut seen = is_fixed.to_vec();
    let mut stack: Vec<usize> = (0..v).filter(|&x| is_fixed[x]).collect();
    while let Some(x) = stack.pop() {
        for &(y, _) in graph.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(x) => Err(Error::Structure(format!(
            "singular system: vertex {x} lies in a component with no pinned vertex"
        ))),
        None => Ok(()),
    }
}

fn dense_solve(system: &Reduced, b: &[f64]) -> Result<(Vec<f64>, usize)> {
    let n = system.free.len();
    let scale: Vec<f64> = system
        .free
        .iter()
        .map(|&x| 1.0 / system.diagonal(x).sqrt())
        .collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, &x) in system.free.iter().enumerate() {
        a[(i, i)] = 1.0;
        for &(y, c) in system.graph.neighbors(x) {
            if let Some(j) = system.slot[y] {
                a[(i, j)] = -c * scale[i] * scale[j];
            }
        }
    }
    let chol = a.cholesky().ok_or_else(|| {
        Error::Structure("system matrix is not positive definite".into())
    })?;
    let solve_scaled = |r: &[f64]| -> Vec<f64> {
        let rhs = DVector::from_iterator(n, r.iter().zip(&scale).map(|(v, s)| v * s));
        let y = chol.solve(&rhs);
        y.iter().zip(&scale).map(|(v, s)| v * s).collect()
    };
    let mut z = solve_scaled(b);
    let mut az = vec![0.0; n];
    let mut refinements = 0;
    for _ in 0..3 {
        system.apply(&z, &mut az);
        let r: Vec<f64> = b.iter().zip(&az).map(|(bi, ai)| bi - ai).collect();
        if r.iter().all(|v| *v == 0.0) {
            break;
        }
        let dz = solve_scaled(&r);
        for (zi, d) in z.iter_mut().zip(&dz) {
            *zi += d;
        }
        refinements += 1;
    }
    Ok((z, refinements))
}

fn pcg(
    system: &Reduced,
    b: &[f64],
    rhs: &[f64],
    pinned: &[f64],
    options: &SolverOptions,
) -> Result<(Vec<f64>, usize)> {
    let n = system.free.len();
    let inv_diag: Vec<f64> = system.free.iter().map(|&x| 1.0 / system.diagonal(x)).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut z = vec![0.0; n];
    let mut r = b.to_vec();
    let mut s: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = s.clone();
    let mut ap = vec![0.0; n];
    let mut rs = dot(&r, &s);
    let mut full = pinned.to_vec();
    let true_check = |z: &[f64], full: &mut Vec<f64>| {
        for (i, &x) in system.free.iter().enumerate() {
            full[x] = z[i];
        }
        let (abs, rel) = residual_norms(system.graph, system.shift, full, rhs, system.free.iter().copied());
        abs <= options.tolerance || rel <= options.tolerance
    };
    for it in 0..options.max_iterations {
        let r_max = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if r_max <= options.tolerance * 0.5 && true_check(&z, &mut full) {
            return Ok((z, it));
        }
        if it % 64 == 63 && true_check(&z, &mut full) {
            return Ok((z, it));
        }
        system.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rs / pap;
        for i in 0..n {
            z[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            s[i] = r[i] * inv_diag[i];
        }
        let rs_next = dot(&r, &s);
        let beta = rs_next / rs;
        rs = rs_next;
        for i in 0..n {
            p[i] = s[i] + beta * p[i];
        }
    }
    if true_check(&z, &mut full) {
        return Ok((z, options.max_iterations));
    }
    let (residual, _) = residual_norms(system.graph, system.shift, &full, rhs, system.free.iter().copied());
    Err(Error::NotConverged {
        iterations: options.max_iterations,
        residual,
        tolerance: options.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_dyadic_tree, build_half_line};

    fn path3() -> WeightedGraph {
        WeightedGraph::from_edges(3, 0, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn pinned_dipole_on_path() {
        // Δv = δ₁ − δ₀ with v(0) = 0 gives v = (0, 1, 1).
        let (u, stats) = solve(&path3(), 0.0, &[-1.0, 1.0, 0.0], &[(0, 0.0)], &SolverOptions::default()).unwrap();
        assert_eq!(stats.method, SolveMethod::DenseCholesky);
        for (a, b) in u.iter().zip([0.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn shifted_system_needs_no_pin() {
        let (u, stats) = solve(&path3(), 1.0, &[0.0, 1.0, 0.0], &[], &SolverOptions::default()).unwrap();
        assert!(stats.residual < 1e-14);
        for (a, b) in u.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn unanchored_system_is_rejected() {
        assert!(matches!(
            solve(&path3(), 0.0, &[0.0; 3], &[], &SolverOptions::default()),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn conjugate_gradient_matches_dense() {
        let g = build_dyadic_tree(1.0, 7).unwrap();
        let mut rhs = vec![0.0; g.vertex_count()];
        rhs[3] = 1.0;
        rhs[100] = -0.5;
        let dense = SolverOptions::default();
        let iterative = SolverOptions { dense_limit: 0, ..dense };
        let (a, _) = solve(&g, 1.0, &rhs, &[], &dense).unwrap();
        let (b, stats) = solve(&g, 1.0, &rhs, &[], &iterative).unwrap();
        assert_eq!(stats.method, SolveMethod::ConjugateGradient);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn geometric_conductances_stay_accurate() {
        let g = build_half_line(2.0, 30).unwrap();
        let mut rhs = vec![0.0; 31];
        rhs[5] = 1.0;
        let (_, stats) = solve(&g, 1.0, &rhs, &[], &SolverOptions::default()).unwrap();
        assert!(stats.converged());
    }
}
