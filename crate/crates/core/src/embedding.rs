//! Compatible pairs `(φ, ψ)` between weighted graphs and the pullback
//! `Tu = u ∘ φ`.
//!
//! A pair is compatible when `T` preserves energy and intertwines the
//! Laplacians as `(T Δ_H u)(x) = ψ(x)(Δ_G Tu)(x)`. The worked example maps the
//! constant-conductance binary tree onto the half-line with `c(n−1, n) = 2ⁿ`
//! by word length.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{apply_laplacian, energy, laplacian_at, EnergyVector};
use crate::graph::{build_dyadic_tree, build_half_line, tree_depth, WeightedGraph};
use crate::solver::{self, SolveStats, SolverOptions};
use crate::tail::{classify_increments, TailDiagnostic};
use crate::{Error, Result};

/// Default tolerance for isometry and intertwining checks.
pub const COMPATIBILITY_TOLERANCE: f64 = 1e-10;
/// Accepted source residual before transporting a solution.
pub const SOURCE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub vectors: usize,
    pub seed: u64,
    /// Max `|𝓔_G(Tu) − 𝓔_H(u)| / 𝓔_H(u)`.
    pub isometry_max_error: f64,
    /// Max over interior `x` of `|TΔ_H u − ψΔ_G Tu|(x)` divided by `max(1, |TΔ_H u(x)|)`.
    pub intertwining_max_residual: f64,
    /// Vertex where the worst intertwining residual occurred.
    pub intertwining_worst_vertex: Option<usize>,
    pub tolerance: f64,
    pub isometry_pass: bool,
    pub intertwining_pass: bool,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct GraphMap {
    source: Arc<WeightedGraph>,
    target: Arc<WeightedGraph>,
    phi: Vec<usize>,
    psi: Vec<f64>,
    certificate: Option<Certificate>,
}

impl GraphMap {
    pub fn new(
        source: Arc<WeightedGraph>,
        target: Arc<WeightedGraph>,
        phi: Vec<usize>,
        psi: Vec<f64>,
    ) -> Result<Self> {
        let n = source.vertex_count();
        if phi.len() != n || psi.len() != n {
            return Err(Error::Map(format!(
                "map needs one (phi, psi) entry per source vertex: {n} vertices, {} phi, {} psi",
                phi.len(),
                psi.len()
            )));
        }
        if let Some((x, &h)) = phi.iter().enumerate().find(|(_, &h)| h >= target.vertex_count()) {
            return Err(Error::Map(format!(
                "phi({x}) = {h} lies outside the target truncation of {} vertices; \
                 rebuild the target with depth at least {h}",
                target.vertex_count()
            )));
        }
        if let Some((x, &p)) = psi.iter().enumerate().find(|(_, &p)| !(p > 0.0 && p.is_finite())) {
            return Err(Error::Map(format!("psi({x}) = {p} must be a positive finite real")));
        }
        Ok(GraphMap {
            source,
            target,
            phi,
            psi,
            certificate: None,
        })
    }

    pub fn identity(graph: Arc<WeightedGraph>) -> Self {
        let n = graph.vertex_count();
        GraphMap {
            source: Arc::clone(&graph),
            target: graph,
            phi: (0..n).collect(),
            psi: vec![1.0; n],
            certificate: None,
        }
    }

    pub fn source(&self) -> &Arc<WeightedGraph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<WeightedGraph> {
        &self.target
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    /// Runs [`check_compatible`] and stores the certificate on the map.
    pub fn certify(&mut self, vectors: usize, seed: u64) -> Result<&Certificate> {
        let cert = check_compatible(self, vectors, seed)?;
        Ok(self.certificate.insert(cert))
    }

    /// Lines `map <g_vertex> <h_vertex> <psi>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (x, (&h, &p)) in self.phi.iter().zip(&self.psi).enumerate() {
            let _ = writeln!(out, "map {x} {h} {p:?}");
        }
        out
    }

    pub fn from_text(source: Arc<WeightedGraph>, target: Arc<WeightedGraph>, text: &str) -> Result<Self> {
        let n = source.vertex_count();
        let mut phi = vec![None; n];
        let mut psi = vec![0.0; n];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "map" {
                return Err(err("expected `map <g_vertex> <h_vertex> <psi>`".into()));
            }
            let x: usize = fields[1].parse().map_err(|e| err(format!("bad source vertex: {e}")))?;
            let h: usize = fields[2].parse().map_err(|e| err(format!("bad target vertex: {e}")))?;
            let p: f64 = fields[3].parse().map_err(|e| err(format!("bad psi: {e}")))?;
            if x >= n {
                return Err(Error::VertexOutOfRange { vertex: x, len: n });
            }
            phi[x] = Some(h);
            psi[x] = p;
        }
        let phi = phi
            .into_iter()
            .enumerate()
            .map(|(x, h)| h.ok_or_else(|| Error::Map(format!("no map line for source vertex {x}"))))
            .collect::<Result<Vec<_>>>()?;
        GraphMap::new(source, target, phi, psi)
    }
}

/// `(Tu)(x) = u(φ(x))`.
pub fn pullback(map: &GraphMap, u: &EnergyVector) -> Result<EnergyVector> {
    if !Arc::ptr_eq(u.graph(), &map.target) {
        return Err(Error::Map(
            "vector does not live on the target graph of the map; rebuild it on the same truncation".into(),
        ));
    }
    let values = map.phi.iter().map(|&h| u.value(h)).collect();
    EnergyVector::new(Arc::clone(&map.source), values)
}

/// `first` followed by `second`: `φ = φ₂ ∘ φ₁`, `ψ = ψ₁ · (ψ₂ ∘ φ₁)`, so the
/// pullback is `T₁ ∘ T₂`.
pub fn compose(first: &GraphMap, second: &GraphMap) -> Result<GraphMap> {
    if !Arc::ptr_eq(&first.target, &second.source) {
        return Err(Error::GraphMismatch);
    }
    let phi = first.phi.iter().map(|&h| second.phi[h]).collect();
    let psi = first
        .phi
        .iter()
        .zip(&first.psi)
        .map(|(&h, &p)| p * second.psi[h])
        .collect();
    GraphMap::new(Arc::clone(&first.source), Arc::clone(&second.target), phi, psi)
}

fn random_interior_vector(graph: &Arc<WeightedGraph>, rng: &mut ChaCha8Rng) -> EnergyVector {
    let values = (0..graph.vertex_count())
        .map(|x| {
            if graph.is_interior(x) {
                rng.random::<f64>() * 2.0 - 1.0
            } else {
                0.0
            }
        })
        .collect();
    EnergyVector::new(Arc::clone(graph), values).expect("length matches graph")
}

/// Checks energy preservation and intertwining on seeded random vectors.
pub fn check_compatible(map: &GraphMap, vectors: usize, seed: u64) -> Result<Certificate> {
    let g = &map.source;
    let mut isometry_max_error = 0.0f64;
    let mut intertwining_max_residual = 0.0f64;
    let mut worst = None;
    for i in 0..vectors {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let u = random_interior_vector(&map.target, &mut rng);
        let tu = pullback(map, &u)?;
        let e_h = energy(&u);
        let e_g = energy(&tu);
        if e_h > 0.0 {
            isometry_max_error = isometry_max_error.max((e_g - e_h).abs() / e_h);
        }
        let lap_h = apply_laplacian(&u);
        for x in g.interior_vertices() {
            if !map.target.is_interior(map.phi[x]) {
                continue;
            }
            let lhs = lap_h.value(map.phi[x]);
            let rhs = map.psi[x] * laplacian_at(g, tu.values(), x);
            let r = (lhs - rhs).abs() / lhs.abs().max(1.0);
            if r > intertwining_max_residual {
                intertwining_max_residual = r;
                worst = Some(x);
            }
        }
    }
    let isometry_pass = isometry_max_error <= COMPATIBILITY_TOLERANCE;
    let intertwining_pass = intertwining_max_residual <= COMPATIBILITY_TOLERANCE;
    Ok(Certificate {
        vectors,
        seed,
        isometry_max_error,
        intertwining_max_residual,
        intertwining_worst_vertex: worst,
        tolerance: COMPATIBILITY_TOLERANCE,
        isometry_pass,
        intertwining_pass,
        pass: isometry_pass && intertwining_pass,
    })
}

/// The tree-to-half-line pair: `φ(x) = |x|` (word length), `ψ(x) = 2^{|x|}`.
pub fn dyadic_pair(depth: usize) -> Result<GraphMap> {
    dyadic_pair_with_psi(depth, |n| 2f64.powi(n as i32))
}

/// The dyadic vertex map with an arbitrary weight `ψ(x) = psi(|x|)`.
pub fn dyadic_pair_with_psi(depth: usize, psi: impl Fn(usize) -> f64) -> Result<GraphMap> {
    let tree = Arc::new(build_dyadic_tree(1.0, depth)?);
    let line = Arc::new(build_half_line(2.0, depth)?);
    let phi: Vec<usize> = (0..tree.vertex_count()).map(tree_depth).collect();
    let psi = phi.iter().map(|&n| psi(n)).collect();
    GraphMap::new(tree, line, phi, psi)
}

#[derive(Clone, Debug)]
pub struct Transported {
    pub vector: EnergyVector,
    /// Residual of the source equation on the target graph `H`.
    pub source_residual: f64,
    /// Residual of the transported equation on `G`.
    pub residual: f64,
    /// `(max 1/ψ)·source_residual` plus rounding slack.
    pub bound: f64,
}

fn require_certificate(map: &GraphMap) -> Result<()> {
    match &map.certificate {
        Some(c) if c.pass => Ok(()),
        Some(_) => Err(Error::Map("compatibility certificate failed".into())),
        None => Err(Error::Map("map has no compatibility certificate; call certify first".into())),
    }
}

fn interior_max(graph: &WeightedGraph, f: impl Fn(usize) -> f64) -> f64 {
    graph.interior_vertices().map(|x| f(x).abs()).fold(0.0, f64::max)
}

/// Pulls back an `H`-harmonic function and measures harmonicity on `G`.
pub fn transport_harmonic(map: &GraphMap, u: &EnergyVector) -> Result<Transported> {
    require_certificate(map)?;
    let h = &map.target;
    let source_residual = interior_max(h, |y| laplacian_at(h, u.values(), y));
    if source_residual > SOURCE_TOLERANCE {
        return Err(Error::Map(format!("input is not harmonic on the target: residual {source_residual:e}")));
    }
    let tu = pullback(map, u)?;
    let g = &map.source;
    let residual = interior_max(g, |x| laplacian_at(g, tu.values(), x));
    let inv_psi = map.psi.iter().map(|p| 1.0 / p).fold(0.0, f64::max);
    Ok(Transported {
        vector: tu,
        source_residual,
        residual,
        bound: inv_psi * source_residual + 1e-12 * u.sup_norm().max(1.0),
    })
}

/// Pulls back a monopole (`Δ_H w = −δ_{o_H}`) and checks `Δ_G Tw = −ψ(o_G)δ_{o_G}`.
pub fn transport_monopole(map: &GraphMap, w: &EnergyVector) -> Result<Transported> {
    require_certificate(map)?;
    let (g, h) = (&map.source, &map.target);
    let (o_g, o_h) = (g.base(), h.base());
    if map.phi[o_g] != o_h {
        return Err(Error::Map(format!("phi maps the base vertex to {}, not {o_h}", map.phi[o_g])));
    }
    let delta = |o: usize, y: usize| if y == o { 1.0 } else { 0.0 };
    let source_residual = interior_max(h, |y| laplacian_at(h, w.values(), y) + delta(o_h, y));
    if source_residual > SOURCE_TOLERANCE {
        return Err(Error::Map(format!("input is not a monopole on the target: residual {source_residual:e}")));
    }
    let tw = pullback(map, w)?;
    let psi_o = map.psi[o_g];
    let residual = interior_max(g, |x| laplacian_at(g, tw.values(), x) + psi_o * delta(o_g, x));
    let inv_psi = map.psi.iter().map(|p| 1.0 / p).fold(0.0, f64::max);
    Ok(Transported {
        vector: tw,
        source_residual,
        residual,
        bound: inv_psi * source_residual + 1e-12 * w.sup_norm().max(1.0),
    })
}

/// Solves `Δw = −δ_o` with `w = 0` on the truncation frontier.
pub fn solve_monopole(graph: &Arc<WeightedGraph>, options: &SolverOptions) -> Result<(EnergyVector, SolveStats)> {
    let fixed: Vec<(usize, f64)> = graph.frontier_vertices().map(|x| (x, 0.0)).collect();
    if fixed.is_empty() {
        return Err(Error::Structure("monopole solve needs a truncation frontier".into()));
    }
    let mut rhs = vec![0.0; graph.vertex_count()];
    rhs[graph.base()] = -1.0;
    let (values, stats) = solver::solve(graph, 0.0, &rhs, &fixed, options)?;
    Ok((EnergyVector::new(Arc::clone(graph), values)?, stats))
}

#[derive(Clone, Debug)]
pub struct TreeHarmonic {
    pub vector: EnergyVector,
    pub stats: SolveStats,
    /// Max `|Δh|` over non-leaf vertices.
    pub residual: f64,
    pub root_value: f64,
    /// `|h(0) + h(1)|` for the two depth-one vertices.
    pub antisymmetry_error: f64,
    pub energy: f64,
}

/// Dirichlet problem on the depth-`N` tree: `Δh = 0` inside, `h = +1` on the
/// leaves below word `0` and `h = −1` on the leaves below word `1`.
pub fn tree_harmonic_direct(c: f64, depth: usize, options: &SolverOptions) -> Result<TreeHarmonic> {
    if depth < 3 {
        return Err(Error::InvalidParameter(format!("tree depth must be >= 3, got {depth}")));
    }
    let tree = Arc::new(build_dyadic_tree(c, depth)?);
    let first_leaf = (1usize << depth) - 1;
    let half = 1usize << (depth - 1);
    let fixed: Vec<(usize, f64)> = (0..1usize << depth)
        .map(|i| (first_leaf + i, if i < half { 1.0 } else { -1.0 }))
        .collect();
    let rhs = vec![0.0; tree.vertex_count()];
    let (values, stats) = solver::solve(&tree, 0.0, &rhs, &fixed, options)?;
    let vector = EnergyVector::new(Arc::clone(&tree), values)?;
    let residual = interior_max(&tree, |x| laplacian_at(&tree, vector.values(), x));
    Ok(TreeHarmonic {
        root_value: vector.value(0),
        antisymmetry_error: (vector.value(1) + vector.value(2)).abs(),
        energy: energy(&vector),
        residual,
        stats,
        vector,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCurve {
    pub depths: Vec<usize>,
    pub energies: Vec<f64>,
    /// Successive differences `E(N+1) − E(N)`.
    pub increments: Vec<f64>,
    /// `increment[k+1] / increment[k]`.
    pub increment_ratios: Vec<f64>,
    pub tail: TailDiagnostic,
}

impl EnergyCurve {
    pub fn from_points(depths: Vec<usize>, energies: Vec<f64>) -> Self {
        let increments: Vec<f64> = energies.windows(2).map(|w| w[1] - w[0]).collect();
        let increment_ratios = increments.windows(2).map(|w| w[1] / w[0]).collect();
        let tail = classify_increments(&increments);
        EnergyCurve {
            depths,
            energies,
            increments,
            increment_ratios,
            tail,
        }
    }
}

/// Energies of [`tree_harmonic_direct`] over a range of depths.
pub fn tree_harmonic_energy_curve(c: f64, depths: impl IntoIterator<Item = usize>, options: &SolverOptions) -> Result<EnergyCurve> {
    let depths: Vec<usize> = depths.into_iter().collect();
    let energies = depths
        .iter()
        .map(|&n| tree_harmonic_direct(c, n, options).map(|h| h.energy))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergyCurve::from_points(depths, energies))
}

/// Energies of the pulled-back half-line monopole on trees of the given depths.
pub fn transported_monopole_energy_curve(depths: impl IntoIterator<Item = usize>, options: &SolverOptions) -> Result<EnergyCurve> {
    let depths: Vec<usize> = depths.into_iter().collect();
    let mut energies = Vec::with_capacity(depths.len());
    for &n in &depths {
        let map = dyadic_pair(n)?;
        let (w, _) = solve_monopole(map.target(), options)?;
        energies.push(energy(&pullback(&map, &w)?));
    }
    Ok(EnergyCurve::from_points(depths, energies))
}
