//! Legendre polynomials, Gauss–Lobatto and Gauss–Legendre rules, and 1D
//! Lagrange bases with value/derivative tables.
//!
//! The Lagrange bases are stored as Legendre series, which gives analytic
//! first and second derivatives everywhere and exact moments against
//! Legendre polynomials (used by the vertex-edge-cell functionals and the
//! postprocessing operators).

use crate::dense::DenseLu;
use crate::error::{Error, Result};

/// Value and first derivative of the Legendre polynomial `L_p` at `t`,
/// via the three-term recurrence. Exact at the endpoints, `L_p(1) = 1`.
pub fn legendre_eval(p: usize, t: f64) -> (f64, f64) {
    let (v, d, _) = legendre_eval2(p, t);
    (v, d)
}

/// Value, first and second derivative of `L_p` at `t`.
pub fn legendre_eval2(p: usize, t: f64) -> (f64, f64, f64) {
    if p == 0 {
        return (1.0, 0.0, 0.0);
    }
    let (mut v0, mut d0, mut s0) = (1.0_f64, 0.0_f64, 0.0_f64);
    let (mut v1, mut d1, mut s1) = (t, 1.0_f64, 0.0_f64);
    for n in 1..p {
        let nf = n as f64;
        let a = (2.0 * nf + 1.0) / (nf + 1.0);
        let b = nf / (nf + 1.0);
        let v2 = a * t * v1 - b * v0;
        let d2 = a * (v1 + t * d1) - b * d0;
        let s2 = a * (2.0 * d1 + t * s1) - b * s0;
        (v0, d0, s0) = (v1, d1, s1);
        (v1, d1, s1) = (v2, d2, s2);
    }
    (v1, d1, s1)
}

/// Values (and derivatives) of `L_0 .. L_p` at `t`, one `[value, d1, d2]`
/// triple per degree.
pub(crate) fn legendre_sequence(p: usize, t: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(p + 1);
    out.push([1.0, 0.0, 0.0]);
    if p == 0 {
        return out;
    }
    out.push([t, 1.0, 0.0]);
    for n in 1..p {
        let nf = n as f64;
        let a = (2.0 * nf + 1.0) / (nf + 1.0);
        let b = nf / (nf + 1.0);
        let [v1, d1, s1] = out[n];
        let [v0, d0, s0] = out[n - 1];
        out.push([
            a * t * v1 - b * v0,
            a * (v1 + t * d1) - b * d0,
            a * (2.0 * d1 + t * s1) - b * s0,
        ]);
    }
    out
}

/// A 1D node set with quadrature weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct NodeSet1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl NodeSet1D {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Polynomial degree of the nodal space: one less than the node count.
    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Integrate `f` over `[-1, 1]` with this rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

fn newton_root<F: Fn(f64) -> (f64, f64)>(fdf: F, seed: f64) -> Option<f64> {
    let mut t = seed;
    for _ in 0..80 {
        let (f, df) = fdf(t);
        let step = f / df;
        t -= step;
        if step.abs() <= 1e-15 * (1.0 + t.abs()) {
            return Some(t);
        }
    }
    None
}

fn symmetrize(nodes: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let s = 0.5 * (nodes[i] - nodes[n - 1 - i]);
        nodes[i] = s;
        nodes[n - 1 - i] = -s;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

/// Gauss–Lobatto nodes and weights for degree `p >= 1`: the endpoints plus
/// the `p - 1` roots of `L_p'`, with weights `2 / (p (p+1) L_p(t_i)^2)`.
/// The rule is exact for polynomials of degree `2p - 1`.
pub fn gauss_lobatto_nodes(p: usize) -> Result<NodeSet1D> {
    assert!(p >= 1, "Gauss-Lobatto degree must be at least 1");
    let mut nodes = vec![0.0; p + 1];
    nodes[0] = -1.0;
    nodes[p] = 1.0;
    for k in 1..p {
        // Interior extrema of L_p interlace the Chebyshev extrema.
        let seed = -(std::f64::consts::PI * k as f64 / p as f64).cos();
        let root = newton_root(
            |t| {
                let (_, d, s) = legendre_eval2(p, t);
                (d, s)
            },
            seed,
        )
        .ok_or_else(|| {
            Error::Quadrature(format!(
                "Newton iteration for the interior Gauss-Lobatto node {k} of degree {p} did not converge"
            ))
        })?;
        nodes[k] = root;
    }
    symmetrize(&mut nodes);
    for i in 1..=p {
        if nodes[i] <= nodes[i - 1] {
            return Err(Error::Quadrature(format!(
                "Gauss-Lobatto nodes of degree {p} are not strictly increasing"
            )));
        }
    }
    let scale = 2.0 / (p as f64 * (p + 1) as f64);
    let weights = nodes
        .iter()
        .map(|&t| {
            let (v, _) = legendre_eval(p, t);
            scale / (v * v)
        })
        .collect();
    Ok(NodeSet1D { nodes, weights })
}

/// `n`-point Gauss–Legendre rule, exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre_rule(n: usize) -> NodeSet1D {
    assert!(n >= 1, "Gauss rule needs at least one point");
    let mut nodes = vec![0.0; n];
    for k in 1..=n {
        let seed = (std::f64::consts::PI * (k as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let root = newton_root(
            |t| {
                let (v, d) = legendre_eval(n, t);
                (v, d)
            },
            seed,
        )
        .expect("Newton iteration for Gauss-Legendre nodes converges from the classical seeds");
        nodes[n - k] = root; // seeds enumerate the roots in descending order
    }
    symmetrize(&mut nodes);
    let weights = nodes
        .iter()
        .map(|&t| {
            let (_, d) = legendre_eval(n, t);
            2.0 / ((1.0 - t * t) * d * d)
        })
        .collect();
    NodeSet1D { nodes, weights }
}

/// Lagrange basis on an arbitrary strictly increasing 1D node set, stored as
/// Legendre series so values and both derivatives evaluate analytically.
#[derive(Debug, Clone)]
pub struct LagrangeBasis1D {
    nodes: Vec<f64>,
    /// coeffs[j * n + k] = coefficient of `L_k` in basis function `j`
    coeffs: Vec<f64>,
}

impl LagrangeBasis1D {
    pub fn new(nodes: &[f64]) -> Self {
        let n = nodes.len();
        assert!(n >= 1);
        for i in 1..n {
            assert!(nodes[i] > nodes[i - 1], "nodes must be strictly increasing");
        }
        // Interpolation conditions: V c_j = e_j with V[i][k] = L_k(t_i).
        let mut v = vec![0.0; n * n];
        for (i, &t) in nodes.iter().enumerate() {
            let seq = legendre_sequence(n - 1, t);
            for k in 0..n {
                v[i * n + k] = seq[k][0];
            }
        }
        let lu = DenseLu::new(v, n).expect("the Legendre Vandermonde at distinct nodes is nonsingular");
        let mut coeffs = vec![0.0; n * n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            lu.solve_in_place(&mut e);
            coeffs[j * n..(j + 1) * n].copy_from_slice(&e);
        }
        Self {
            nodes: nodes.to_vec(),
            coeffs,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Legendre coefficient `k` of basis function `j`; gives exact moments
    /// `int_-1^1 l_j L_k = coeff(j, k) * 2 / (2k + 1)`.
    pub(crate) fn legendre_coeff(&self, j: usize, k: usize) -> f64 {
        self.coeffs[j * self.nodes.len() + k]
    }

    /// Values, first and second derivatives of every basis function at `t`.
    pub fn eval_all(&self, t: f64, val: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
        let n = self.nodes.len();
        let seq = legendre_sequence(n - 1, t);
        for j in 0..n {
            let row = &self.coeffs[j * n..(j + 1) * n];
            let (mut v, mut d, mut s) = (0.0, 0.0, 0.0);
            for (c, lk) in row.iter().zip(&seq) {
                v += c * lk[0];
                d += c * lk[1];
                s += c * lk[2];
            }
            val[j] = v;
            d1[j] = d;
            d2[j] = s;
        }
    }

    /// Tabulate the basis at a set of points.
    pub fn tabulate(&self, points: &[f64]) -> BasisTable {
        let n = self.nodes.len();
        let m = points.len();
        let mut table = BasisTable {
            n_points: m,
            n_basis: n,
            val: vec![0.0; m * n],
            d1: vec![0.0; m * n],
            d2: vec![0.0; m * n],
        };
        for (q, &t) in points.iter().enumerate() {
            let (a, b, c) = (
                &mut table.val[q * n..(q + 1) * n],
                &mut table.d1[q * n..(q + 1) * n],
                &mut table.d2[q * n..(q + 1) * n],
            );
            self.eval_all(t, a, b, c);
        }
        table
    }
}

/// Row-major tables of basis values and derivatives at a fixed point set.
#[derive(Debug, Clone)]
pub struct BasisTable {
    pub n_points: usize,
    pub n_basis: usize,
    val: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl BasisTable {
    #[inline]
    pub fn val(&self, q: usize, j: usize) -> f64 {
        self.val[q * self.n_basis + j]
    }

    #[inline]
    pub fn d1(&self, q: usize, j: usize) -> f64 {
        self.d1[q * self.n_basis + j]
    }

    #[inline]
    pub fn d2(&self, q: usize, j: usize) -> f64 {
        self.d2[q * self.n_basis + j]
    }

    #[inline]
    pub fn row_val(&self, q: usize) -> &[f64] {
        &self.val[q * self.n_basis..(q + 1) * self.n_basis]
    }

    #[inline]
    pub fn row_d1(&self, q: usize) -> &[f64] {
        &self.d1[q * self.n_basis..(q + 1) * self.n_basis]
    }

    #[inline]
    pub fn row_d2(&self, q: usize) -> &[f64] {
        &self.d2[q * self.n_basis..(q + 1) * self.n_basis]
    }
}

/// Equidistant reference nodes `-1 + 2i/p`, the point set of the pointwise
/// interpolant compared against Gauss-Lobatto interpolation in the studies.
pub fn uniform_nodes(p: usize) -> Vec<f64> {
    assert!(p >= 1);
    (0..=p).map(|i| -1.0 + 2.0 * i as f64 / p as f64).collect()
}
