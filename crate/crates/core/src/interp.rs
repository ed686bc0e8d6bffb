//! Interpolation operators into the discrete space.
//!
//! Three operators share the nodal Gauss-Lobatto representation:
//!  * pointwise interpolation at the Gauss-Lobatto nodes (plain coefficient
//!    assignment in this basis),
//!  * the vertex-edge-cell interpolant matching vertex values, edge moments
//!    against `P_{p-2}` and cell moments against `Q_{p-2}`,
//!  * pointwise interpolation at equidistant nodes, re-expressed in the
//!    nodal basis.
//!
//! The reference-element versions are exposed separately; on them the two
//! operator identities hold for every continuous function and are used as a
//! numerical cross-check of both implementations: the vertex-edge-cell
//! interpolant equals Gauss-Lobatto interpolation of the next-degree
//! vertex-edge-cell interpolant, and Gauss-Lobatto interpolation factors
//! through any Lagrange interpolation on the Gauss-Lobatto nodes plus one
//! extra node.

use crate::dense::DenseLu;
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre_rule, gauss_lobatto_nodes, uniform_nodes, LagrangeBasis1D, NodeSet1D};
use crate::space::{fill_from_fn, FEFunction, FESpace};

/// Polynomial on the reference square stored as values at the tensor
/// Gauss-Lobatto nodes of its degree.
#[derive(Debug, Clone)]
pub struct RefPoly {
    degree: usize,
    basis: LagrangeBasis1D,
    /// vals[b * (degree + 1) + a], x index fastest
    vals: Vec<f64>,
}

impl RefPoly {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodal_values(&self) -> &[f64] {
        &self.vals
    }

    pub fn eval(&self, xi: f64, eta: f64) -> f64 {
        let n = self.degree + 1;
        let mut bx = vec![0.0; n];
        let mut by = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        let mut scratch2 = vec![0.0; n];
        self.basis.eval_all(xi, &mut bx, &mut scratch, &mut scratch2);
        self.basis.eval_all(eta, &mut by, &mut scratch, &mut scratch2);
        let mut acc = 0.0;
        for b in 0..n {
            let mut row = 0.0;
            for a in 0..n {
                row += self.vals[b * n + a] * bx[a];
            }
            acc += row * by[b];
        }
        acc
    }
}

/// Vertex-edge-cell interpolation on the reference square `[-1, 1]^2`:
/// functionals are the 4 vertex values, `p - 1` Legendre moments per edge
/// and `(p - 1)^2` tensor Legendre moments over the cell. The functional
/// matrix is assembled exactly from the Legendre series of the nodal basis
/// and factored once per degree.
pub struct VertexEdgeCellRef {
    degree: usize,
    basis: LagrangeBasis1D,
    lu: DenseLu,
    quad: NodeSet1D,
    /// Legendre values at the quadrature nodes, `legq[q][m]`, `m <= p - 2`.
    legq: Vec<Vec<f64>>,
}

impl VertexEdgeCellRef {
    /// `n_quad` Gauss points per direction for the moment integrals of a
    /// general function; anything `>= degree + 1` integrates the polynomial
    /// side of every functional exactly.
    pub fn new(degree: usize, n_quad: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidConfig(format!(
                "vertex-edge-cell interpolation needs degree >= 2, got {degree}"
            )));
        }
        if n_quad < degree + 1 {
            return Err(Error::InvalidConfig(format!(
                "moment quadrature with {n_quad} points cannot be exact for degree {degree}"
            )));
        }
        let gl = gauss_lobatto_nodes(degree)?;
        let basis = LagrangeBasis1D::new(gl.nodes());
        let d = degree;
        let np = d + 1;
        let nfun = np * np;
        // exact edge moments of the 1D basis: int l_a L_m = coeff * 2/(2m+1)
        let edge_int = |a: usize, m: usize| basis.legendre_coeff(a, m) * 2.0 / (2.0 * m as f64 + 1.0);
        let at_minus = |a: usize| if a == 0 { 1.0 } else { 0.0 };
        let at_plus = |a: usize| if a == d { 1.0 } else { 0.0 };
        let mut mat = vec![0.0; nfun * nfun];
        for b in 0..np {
            for a in 0..np {
                let col = b * np + a;
                // vertices (-1,-1), (1,-1), (1,1), (-1,1)
                mat[col] = at_minus(a) * at_minus(b);
                mat[nfun + col] = at_plus(a) * at_minus(b);
                mat[2 * nfun + col] = at_plus(a) * at_plus(b);
                mat[3 * nfun + col] = at_minus(a) * at_plus(b);
                for m in 0..d - 1 {
                    // edges: bottom, right, top, left
                    let rows = [
                        4 + m,
                        4 + (d - 1) + m,
                        4 + 2 * (d - 1) + m,
                        4 + 3 * (d - 1) + m,
                    ];
                    mat[rows[0] * nfun + col] = edge_int(a, m) * at_minus(b);
                    mat[rows[1] * nfun + col] = at_plus(a) * edge_int(b, m);
                    mat[rows[2] * nfun + col] = edge_int(a, m) * at_plus(b);
                    mat[rows[3] * nfun + col] = at_minus(a) * edge_int(b, m);
                }
                for my in 0..d - 1 {
                    for mx in 0..d - 1 {
                        let row = 4 + 4 * (d - 1) + my * (d - 1) + mx;
                        mat[row * nfun + col] = edge_int(a, mx) * edge_int(b, my);
                    }
                }
            }
        }
        let lu = DenseLu::new(mat, nfun).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "vertex-edge-cell functional system of degree {degree} is singular (basis bug)"
            ))
        })?;
        let quad = gauss_legendre_rule(n_quad);
        let legq = quad
            .nodes()
            .iter()
            .map(|&t| {
                crate::quad::legendre_sequence(d.saturating_sub(2), t)
                    .iter()
                    .map(|v| v[0])
                    .collect()
            })
            .collect();
        Ok(Self {
            degree,
            basis,
            lu,
            quad,
            legq,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Interpolate a continuous function on the reference square.
    pub fn apply<G: Fn(f64, f64) -> f64>(&self, g: G) -> RefPoly {
        let d = self.degree;
        let np = d + 1;
        let nfun = np * np;
        let nq = self.quad.len();
        let qn = self.quad.nodes();
        let qw = self.quad.weights();
        let mut rhs = vec![0.0; nfun];
        rhs[0] = g(-1.0, -1.0);
        rhs[1] = g(1.0, -1.0);
        rhs[2] = g(1.0, 1.0);
        rhs[3] = g(-1.0, 1.0);
        // edge values once per quadrature node
        let mut bottom = vec![0.0; nq];
        let mut right = vec![0.0; nq];
        let mut top = vec![0.0; nq];
        let mut left = vec![0.0; nq];
        for q in 0..nq {
            bottom[q] = g(qn[q], -1.0);
            right[q] = g(1.0, qn[q]);
            top[q] = g(qn[q], 1.0);
            left[q] = g(-1.0, qn[q]);
        }
        for m in 0..d - 1 {
            let (mut sb, mut sr, mut st, mut sl) = (0.0, 0.0, 0.0, 0.0);
            for q in 0..nq {
                let wl = qw[q] * self.legq[q][m];
                sb += wl * bottom[q];
                sr += wl * right[q];
                st += wl * top[q];
                sl += wl * left[q];
            }
            rhs[4 + m] = sb;
            rhs[4 + (d - 1) + m] = sr;
            rhs[4 + 2 * (d - 1) + m] = st;
            rhs[4 + 3 * (d - 1) + m] = sl;
        }
        if d >= 2 {
            // cell moments: accumulate g on the tensor grid once
            let mut gv = vec![0.0; nq * nq];
            for (r, &eta) in qn.iter().enumerate() {
                for (q, &xi) in qn.iter().enumerate() {
                    gv[r * nq + q] = g(xi, eta);
                }
            }
            for my in 0..d - 1 {
                for mx in 0..d - 1 {
                    let mut s = 0.0;
                    for r in 0..nq {
                        let wy = qw[r] * self.legq[r][my];
                        let mut inner = 0.0;
                        for q in 0..nq {
                            inner += qw[q] * self.legq[q][mx] * gv[r * nq + q];
                        }
                        s += wy * inner;
                    }
                    rhs[4 + 4 * (d - 1) + my * (d - 1) + mx] = s;
                }
            }
        }
        self.lu.solve_in_place(&mut rhs);
        RefPoly {
            degree: d,
            basis: self.basis.clone(),
            vals: rhs,
        }
    }
}

/// Gauss-Lobatto interpolation on the reference square.
pub fn gl_interpolate_ref<G: Fn(f64, f64) -> f64>(degree: usize, g: G) -> Result<RefPoly> {
    let gl = gauss_lobatto_nodes(degree)?;
    let basis = LagrangeBasis1D::new(gl.nodes());
    let np = degree + 1;
    let mut vals = vec![0.0; np * np];
    for (b, &eta) in gl.nodes().iter().enumerate() {
        for (a, &xi) in gl.nodes().iter().enumerate() {
            vals[b * np + a] = g(xi, eta);
        }
    }
    Ok(RefPoly {
        degree,
        basis,
        vals,
    })
}

/// Global Gauss-Lobatto interpolant: coefficient assignment in the nodal
/// basis.
pub fn gl_interpolate<G: Fn(f64, f64) -> f64>(space: &FESpace, g: G) -> FEFunction {
    fill_from_fn(space, g)
}

/// Global vertex-edge-cell interpolant. `degree` must match the space
/// degree; the parameter mirrors that the same construction also serves the
/// next-degree operator on a degree-`p+1` space.
pub fn vec_interpolate<G: Fn(f64, f64) -> f64>(
    space: &FESpace,
    g: G,
    degree: usize,
) -> Result<FEFunction> {
    if degree != space.degree() {
        return Err(Error::Mismatch(format!(
            "vec_interpolate degree {degree} does not match the space degree {}",
            space.degree()
        )));
    }
    let op = VertexEdgeCellRef::new(degree, degree + 3)?;
    let mesh = space.mesh();
    let n = mesh.n();
    let np = degree + 1;
    let mut u = FEFunction::zero(space);
    let m = space.nodes_per_dir();
    for j in 1..=n {
        let (y0, y1) = (mesh.ys()[j - 1], mesh.ys()[j]);
        for i in 1..=n {
            let (x0, x1) = (mesh.xs()[i - 1], mesh.xs()[i]);
            let local = op.apply(|xi, eta| {
                g(
                    x0 + 0.5 * (xi + 1.0) * (x1 - x0),
                    y0 + 0.5 * (eta + 1.0) * (y1 - y0),
                )
            });
            // shared functionals make overlapping writes agree
            for b in 0..np {
                let (_, gs) = space.cell_node(i, j, 0, b);
                for a in 0..np {
                    let (gr, _) = space.cell_node(i, j, a, b);
                    u.coeffs_mut()[gs * m + gr] = local.nodal_values()[b * np + a];
                }
            }
        }
    }
    Ok(u)
}

/// Global interpolant at per-cell equidistant points, re-expressed in the
/// Gauss-Lobatto nodal basis.
pub fn equidistant_interpolate<G: Fn(f64, f64) -> f64>(space: &FESpace, g: G) -> Result<FEFunction> {
    let p = space.degree();
    let np = p + 1;
    let uni = uniform_nodes(p);
    let uni_basis = LagrangeBasis1D::new(&uni);
    let gl = gauss_lobatto_nodes(p)?;
    // transfer[r][a] = value of uniform basis a at Gauss-Lobatto node r
    let transfer = uni_basis.tabulate(gl.nodes());
    let mesh = space.mesh();
    let n = mesh.n();
    let m = space.nodes_per_dir();
    let mut u = FEFunction::zero(space);
    let mut sample = vec![0.0; np * np];
    let mut tmp = vec![0.0; np * np];
    for j in 1..=n {
        let (y0, y1) = (mesh.ys()[j - 1], mesh.ys()[j]);
        for i in 1..=n {
            let (x0, x1) = (mesh.xs()[i - 1], mesh.xs()[i]);
            for (b, &tb) in uni.iter().enumerate() {
                let y = y0 + 0.5 * (tb + 1.0) * (y1 - y0);
                for (a, &ta) in uni.iter().enumerate() {
                    sample[b * np + a] = g(x0 + 0.5 * (ta + 1.0) * (x1 - x0), y);
                }
            }
            // tmp[b][r] = sum_a sample[b][a] transfer(r, a)
            for b in 0..np {
                for r in 0..np {
                    let mut acc = 0.0;
                    for a in 0..np {
                        acc += sample[b * np + a] * transfer.val(r, a);
                    }
                    tmp[b * np + r] = acc;
                }
            }
            for s in 0..np {
                let (_, gs) = space.cell_node(i, j, 0, s);
                for r in 0..np {
                    let (gr, _) = space.cell_node(i, j, r, 0);
                    let mut acc = 0.0;
                    for b in 0..np {
                        acc += transfer.val(s, b) * tmp[b * np + r];
                    }
                    u.coeffs_mut()[gs * m + gr] = acc;
                }
            }
        }
    }
    Ok(u)
}

/// Check both reference-element operator identities for one function:
/// the vertex-edge-cell interpolant of degree `p` against Gauss-Lobatto
/// interpolation of the degree-`p+1` interpolant, and Gauss-Lobatto
/// interpolation against the vertex-edge-cell interpolant of the starred
/// Lagrange interpolant (Gauss-Lobatto nodes plus the extra node `t_star`).
/// Returns the larger of the two max-norm discrepancies on a 20 x 20 grid.
pub fn verify_lemma_identity<G: Fn(f64, f64) -> f64>(p: usize, g: G, t_star: f64) -> Result<f64> {
    assert!(
        t_star > -1.0 && t_star < 1.0,
        "the extra interpolation node must be interior"
    );
    // One shared moment rule for both degrees: the identity then cancels
    // the quadrature error exactly and holds to rounding for any g.
    let nq = p + 4;
    let op_p = VertexEdgeCellRef::new(p, nq)?;
    let op_p1 = VertexEdgeCellRef::new(p + 1, nq)?;

    let pi_p = op_p.apply(&g);
    let pi_p1 = op_p1.apply(&g);
    let gl_of_pi_p1 = gl_interpolate_ref(p, |x, y| pi_p1.eval(x, y))?;

    // starred interpolant: tensor Lagrange at GL(p) nodes plus t_star
    let gl = gauss_lobatto_nodes(p)?;
    let mut star_nodes = gl.nodes().to_vec();
    let pos = star_nodes.partition_point(|&t| t < t_star);
    assert!(
        star_nodes.iter().all(|&t| (t - t_star).abs() > 1e-12),
        "extra node collides with a Gauss-Lobatto node"
    );
    star_nodes.insert(pos, t_star);
    let star_basis = LagrangeBasis1D::new(&star_nodes);
    let ns = star_nodes.len();
    let mut star_vals = vec![0.0; ns * ns];
    for (b, &eta) in star_nodes.iter().enumerate() {
        for (a, &xi) in star_nodes.iter().enumerate() {
            star_vals[b * ns + a] = g(xi, eta);
        }
    }
    let star = RefPoly {
        degree: p + 1,
        basis: star_basis,
        vals: star_vals,
    };
    let gl_of_g = gl_interpolate_ref(p, &g)?;
    let pi_of_star = op_p.apply(|x, y| star.eval(x, y));

    let mut disc: f64 = 0.0;
    for r in 0..20 {
        let eta = -1.0 + 2.0 * r as f64 / 19.0;
        for q in 0..20 {
            let xi = -1.0 + 2.0 * q as f64 / 19.0;
            let d1 = (pi_p.eval(xi, eta) - gl_of_pi_p1.eval(xi, eta)).abs();
            let d2 = (gl_of_g.eval(xi, eta) - pi_of_star.eval(xi, eta)).abs();
            disc = disc.max(d1).max(d2);
        }
    }
    Ok(disc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_stype_mesh, MeshKind};
    use crate::space::build_space;
    use approx::assert_abs_diff_eq;

    fn mesh(kind: MeshKind, n: usize) -> crate::mesh::TensorMesh {
        build_stype_mesh(n, 5.0, 1e-6, 1.0, kind).unwrap()
    }

    #[test]
    fn vec_reference_reproduces_polynomials() {
        for p in [2usize, 3, 4] {
            let op = VertexEdgeCellRef::new(p, p + 3).unwrap();
            let g = |x: f64, y: f64| {
                (0..=p).map(|k| x.powi(k as i32)).sum::<f64>() * (1.0 + 0.5 * y.powi(p as i32))
            };
            let r = op.apply(g);
            for &(xi, eta) in &[(-1.0, -1.0), (0.3, -0.7), (0.9, 0.9), (0.0, 0.0)] {
                assert_abs_diff_eq!(r.eval(xi, eta), g(xi, eta), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn vec_edge_moments_vanish() {
        // int_e (pi g - g) q = 0 for q in the Legendre basis of P_{p-2}
        let p = 3;
        let op = VertexEdgeCellRef::new(p, p + 3).unwrap();
        let g = |x: f64, y: f64| (1.3 * x + 0.4).sin() * (0.9 * y - 0.2).cos();
        let r = op.apply(g);
        let rule = gauss_legendre_rule(p + 3);
        let edge_defect = |edge: usize, t: f64| -> f64 {
            match edge {
                0 => r.eval(t, -1.0) - g(t, -1.0),
                1 => r.eval(t, 1.0) - g(t, 1.0),
                2 => r.eval(-1.0, t) - g(-1.0, t),
                _ => r.eval(1.0, t) - g(1.0, t),
            }
        };
        for m in 0..=p - 2 {
            for edge in 0..4 {
                let moment = rule.integrate(|t| {
                    let (lm, _) = crate::quad::legendre_eval(m, t);
                    edge_defect(edge, t) * lm
                });
                assert!(moment.abs() <= 1e-10, "edge {edge} moment {m} = {moment:e}");
            }
        }
    }

    #[test]
    fn global_operators_reproduce_qp() {
        let m = mesh(MeshKind::Shishkin, 8);
        let p = 3;
        let space = build_space(&m, p).unwrap();
        let g = |x: f64, y: f64| (x * x * x - 0.2 * x) * (y * y + 0.7);
        let exact_nodes = gl_interpolate(&space, g);
        for (name, u) in [
            ("vec", vec_interpolate(&space, g, p).unwrap()),
            ("equi", equidistant_interpolate(&space, g).unwrap()),
        ] {
            let max_diff = u
                .coeffs()
                .iter()
                .zip(exact_nodes.coeffs())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(max_diff <= 1e-10, "{name}: nodal difference {max_diff:e}");
        }
    }

    #[test]
    fn vertex_values_match() {
        let m = mesh(MeshKind::BakhvalovShishkin, 8);
        let space = build_space(&m, 3).unwrap();
        let g = |x: f64, y: f64| (2.0 * x).sin() * (3.0 * y).cos() + x;
        let u = vec_interpolate(&space, g, 3).unwrap();
        for j in 0..=8 {
            for i in 0..=8 {
                let (x, y) = (m.xs()[i], m.ys()[j]);
                let (v, _) = u.eval(x, y);
                assert_abs_diff_eq!(v, g(x, y), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn shared_edge_writes_agree() {
        // applying the reference operator on two adjacent cells produces
        // identical values on the shared edge
        let m = mesh(MeshKind::BakhvalovShishkin, 8);
        let p = 3;
        let op = VertexEdgeCellRef::new(p, p + 3).unwrap();
        let g = |x: f64, y: f64| (1.1 * x).cos() * (1.7 * y + 0.3).sin();
        let map = |i: usize, j: usize| {
            let (x0, x1) = (m.xs()[i - 1], m.xs()[i]);
            let (y0, y1) = (m.ys()[j - 1], m.ys()[j]);
            move |xi: f64, eta: f64| {
                g(
                    x0 + 0.5 * (xi + 1.0) * (x1 - x0),
                    y0 + 0.5 * (eta + 1.0) * (y1 - y0),
                )
            }
        };
        let left = op.apply(map(3, 2));
        let right = op.apply(map(4, 2));
        for k in 0..=10 {
            let eta = -1.0 + 0.2 * k as f64;
            assert_abs_diff_eq!(left.eval(1.0, eta), right.eval(-1.0, eta), epsilon = 1e-11);
        }
    }

    #[test]
    fn operators_are_projections() {
        let m = mesh(MeshKind::Shishkin, 8);
        let p = 3;
        let space = build_space(&m, p).unwrap();
        let g = |x: f64, y: f64| (3.0 * x + 1.0).sin() * (2.0 * y).cos();

        let once = gl_interpolate(&space, g);
        let twice = gl_interpolate(&space, |x, y| once.eval(x, y).0);
        let d = max_coeff_diff(&once, &twice);
        assert!(d <= 1e-11, "gl projection defect {d:e}");

        let once = vec_interpolate(&space, g, p).unwrap();
        let twice = vec_interpolate(&space, |x, y| once.eval(x, y).0, p).unwrap();
        let d = max_coeff_diff(&once, &twice);
        assert!(d <= 1e-11, "vec projection defect {d:e}");

        let once = equidistant_interpolate(&space, g).unwrap();
        let twice = equidistant_interpolate(&space, |x, y| once.eval(x, y).0).unwrap();
        let d = max_coeff_diff(&once, &twice);
        assert!(d <= 1e-11, "equidistant projection defect {d:e}");
    }

    fn max_coeff_diff(a: &FEFunction, b: &FEFunction) -> f64 {
        a.coeffs()
            .iter()
            .zip(b.coeffs())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max)
    }

    #[test]
    fn lemma_identities_hold() {
        // polynomial of degree p: both sides are the identity
        let d = verify_lemma_identity(3, |x, y| x * x * x * y - 0.3 * y * y, 0.37).unwrap();
        assert!(d <= 1e-12, "polynomial discrepancy {d:e}");
        // smooth non-polynomial
        let d = verify_lemma_identity(3, |x, y| (3.0 * x + 1.0).sin() * (2.0 * y).cos(), 0.37).unwrap();
        assert!(d <= 1e-10, "smooth discrepancy {d:e}");
        // random-ish degree-2p polynomial, off-center extra node
        let d = verify_lemma_identity(
            3,
            |x, y| {
                let px = 0.3 + x * (0.9 + x * (-0.4 + x * (0.2 + x * (0.11 + x * (0.05 - 0.07 * x)))));
                let py = 1.0 + y * (0.5 + y * (0.25 + y * 0.125));
                px * py
            },
            0.37,
        )
        .unwrap();
        assert!(d <= 1e-10, "degree-2p discrepancy {d:e}");
    }

    #[test]
    fn equidistant_nodes_are_uniform() {
        let u = uniform_nodes(3);
        assert_eq!(u.len(), 4);
        assert_abs_diff_eq!(u[1], -1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn degree_mismatch_rejected() {
        let m = mesh(MeshKind::Shishkin, 8);
        let space = build_space(&m, 3).unwrap();
        assert!(vec_interpolate(&space, |x, _| x, 4).is_err());
    }
}
#[test]
fn debug_vec_ref() {
    use crate::quad::*;
    let p = 2usize;
    let op = crate::interp::VertexEdgeCellRef::new(p, p + 3).unwrap();
    let g = |x: f64, _y: f64| x * x;
    let r = op.apply(g);
    println!("nodal values (should be x^2 at GL nodes {{-1,0,1}} tensor):");
    for b in 0..=p {
        for a in 0..=p {
            print!("{:9.5} ", r.nodal_values()[b * (p + 1) + a]);
        }
        println!();
    }
    println!("eval(0.3,-0.7) = {} expect {}", r.eval(0.3, -0.7), 0.09);
    let gl = gauss_lobatto_nodes(p).unwrap();
    let basis = LagrangeBasis1D::new(gl.nodes());
    println!("legendre coeffs of basis:");
    for j in 0..=p {
        for k in 0..=p {
            print!("{:9.5} ", basis.legendre_coeff(j, k));
        }
        println!();
    }
}

#[test]
fn debug_dense_lu9() {
    use crate::dense::DenseLu;
    let c = [
        [1.0 / 6.0, -0.5, 1.0 / 3.0],
        [2.0 / 3.0, 0.0, -2.0 / 3.0],
        [1.0 / 6.0, 0.5, 1.0 / 3.0],
    ];
    let d = 2usize;
    let nfun = 9usize;
    let edge_int = |a: usize, m: usize| c[a][m] * 2.0 / (2.0 * m as f64 + 1.0);
    let at_m = |a: usize| if a == 0 { 1.0 } else { 0.0 };
    let at_p = |a: usize| if a == d { 1.0 } else { 0.0 };
    let mut mat = vec![0.0; 81];
    for b in 0..3usize {
        for a in 0..3usize {
            let col = b * 3 + a;
            mat[col] = at_m(a) * at_m(b);
            mat[nfun + col] = at_p(a) * at_m(b);
            mat[2 * nfun + col] = at_p(a) * at_p(b);
            mat[3 * nfun + col] = at_m(a) * at_p(b);
            for m in 0..d - 1 {
                mat[(4 + m) * nfun + col] = edge_int(a, m) * at_m(b);
                mat[(4 + (d - 1) + m) * nfun + col] = at_p(a) * edge_int(b, m);
                mat[(4 + 2 * (d - 1) + m) * nfun + col] = edge_int(a, m) * at_p(b);
                mat[(4 + 3 * (d - 1) + m) * nfun + col] = at_m(a) * edge_int(b, m);
            }
            mat[(4 + 4 * (d - 1)) * nfun + col] = edge_int(a, 0) * edge_int(b, 0);
        }
    }
    let lu = DenseLu::new(mat, 9).unwrap();
    let f = [1.0, 1.0, 1.0, 1.0, 2.0 / 3.0, 2.0, 2.0 / 3.0, 2.0, 4.0 / 3.0];
    let x = lu.solve(&f);
    println!("dense lu solution: {x:?}");
}
