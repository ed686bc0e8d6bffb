//! Superconvergent postprocessing: lift a `Q_p` FE function to a
//! continuous piecewise `Q_{p+1}` function on the 2x2 macro mesh.
//!
//! Two local operators per macro, extended by tensor products:
//!  * point-sampling at a `p+2`-subset of the ordered union of the two
//!    cells' Gauss-Lobatto points per direction (indices 0, 1, 3, ...,
//!    2p-3, 2p-1, 2p),
//!  * value matching at the three macro mesh points plus integral
//!    conditions: the full interval integral for p = 2; the two
//!    subinterval integrals for p >= 3, plus moments against Legendre
//!    polynomials of degree 2..=p-2 for p >= 4 (together exactly p+2
//!    independent conditions on `P_{p+1}` per direction).
//!
//! Both operators reproduce `Q_{p+1}` on the macro and are consistent with
//! their companion interpolants: sampling a Gauss-Lobatto interpolant gives
//! the same data as sampling the function, and the vertex-edge-cell
//! functionals imply the value/integral functionals used here.

use crate::dense::DenseLu;
use crate::error::{Error, Result};
use crate::mesh::{MacroMesh, TensorMesh};
use crate::norms::CellField;
use crate::quad::{gauss_legendre_rule, gauss_lobatto_nodes, legendre_eval, LagrangeBasis1D};
use crate::space::FEFunction;

/// Continuous piecewise `Q_{p+1}` function on the macro mesh, stored as
/// per-macro values at the tensor Gauss-Lobatto nodes of each macro.
#[derive(Debug, Clone)]
pub struct MacroFEFunction {
    mm: MacroMesh,
    degree: usize,
    basis: LagrangeBasis1D,
    /// blocks[(ky-1) * nm + (kx-1)], each `(degree+1)^2` values, x fastest
    blocks: Vec<Vec<f64>>,
}

impl MacroFEFunction {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn macro_mesh(&self) -> &MacroMesh {
        &self.mm
    }

    pub fn block(&self, kx: usize, ky: usize) -> &[f64] {
        &self.blocks[(ky - 1) * self.mm.n_per_dir() + (kx - 1)]
    }

    /// Largest nodal difference between two lifts on the same macro mesh.
    pub fn max_block_diff(a: &MacroFEFunction, b: &MacroFEFunction) -> f64 {
        assert_eq!(a.blocks.len(), b.blocks.len());
        let mut d: f64 = 0.0;
        for (x, y) in a.blocks.iter().zip(&b.blocks) {
            for (u, v) in x.iter().zip(y) {
                d = d.max((u - v).abs());
            }
        }
        d
    }

    pub fn eval(&self, x: f64, y: f64) -> (f64, (f64, f64)) {
        let mesh = self.mm.mesh();
        let kx = MacroMesh::macro_of_cell(mesh.cell_of_x(x));
        let ky = MacroMesh::macro_of_cell(mesh.cell_of_y(y));
        let (xl, _, xr) = self.mm.x_triple(kx);
        let (yl, _, yr) = self.mm.y_triple(ky);
        let xi = (2.0 * x - xl - xr) / (xr - xl);
        let eta = (2.0 * y - yl - yr) / (yr - yl);
        let n = self.degree + 1;
        let mut bx = vec![0.0; n];
        let mut dbx = vec![0.0; n];
        let mut s = vec![0.0; n];
        self.basis.eval_all(xi, &mut bx, &mut dbx, &mut s);
        let mut by = vec![0.0; n];
        let mut dby = vec![0.0; n];
        self.basis.eval_all(eta, &mut by, &mut dby, &mut s);
        let block = self.block(kx, ky);
        let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
        for b in 0..n {
            let (mut row_v, mut row_d) = (0.0, 0.0);
            for a in 0..n {
                let c = block[b * n + a];
                row_v += c * bx[a];
                row_d += c * dbx[a];
            }
            v += row_v * by[b];
            gx += row_d * by[b];
            gy += row_v * dby[b];
        }
        (v, (gx * 2.0 / (xr - xl), gy * 2.0 / (yr - yl)))
    }
}

impl CellField for MacroFEFunction {
    fn mesh(&self) -> &TensorMesh {
        self.mm.mesh()
    }

    fn min_error_quad(&self) -> usize {
        self.degree + 3
    }

    fn eval_cell_grid(
        &self,
        i: usize,
        j: usize,
        xi: &[f64],
        eta: &[f64],
        val: &mut [f64],
        dx: &mut [f64],
        dy: &mut [f64],
    ) {
        let kx = MacroMesh::macro_of_cell(i);
        let ky = MacroMesh::macro_of_cell(j);
        let ax = self.mm.a_x(kx);
        let ay = self.mm.a_y(ky);
        let map = |t: f64, a: f64, left: bool| {
            if left {
                -1.0 + 0.5 * (a + 1.0) * (t + 1.0)
            } else {
                a + 0.5 * (1.0 - a) * (t + 1.0)
            }
        };
        let mapped_x: Vec<f64> = xi.iter().map(|&t| map(t, ax, i % 2 == 1)).collect();
        let mapped_y: Vec<f64> = eta.iter().map(|&t| map(t, ay, j % 2 == 1)).collect();
        let tx = self.basis.tabulate(&mapped_x);
        let ty = self.basis.tabulate(&mapped_y);
        let (xl, _, xr) = self.mm.x_triple(kx);
        let (yl, _, yr) = self.mm.y_triple(ky);
        let (cx, cy) = (2.0 / (xr - xl), 2.0 / (yr - yl));
        let block = self.block(kx, ky);
        let n = self.degree + 1;
        let nqx = xi.len();
        for r in 0..eta.len() {
            for q in 0..nqx {
                let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
                for b in 0..n {
                    let (mut row_v, mut row_d) = (0.0, 0.0);
                    for a in 0..n {
                        let c = block[b * n + a];
                        row_v += c * tx.val(q, a);
                        row_d += c * tx.d1(q, a);
                    }
                    v += row_v * ty.val(r, b);
                    gx += row_d * ty.val(r, b);
                    gy += row_v * ty.d1(r, b);
                }
                let idx = r * nqx + q;
                val[idx] = v;
                dx[idx] = gx * cx;
                dy[idx] = gy * cy;
            }
        }
    }
}

/// Per-direction point subset for the Gauss-Lobatto lift: indices
/// `{0, 1, 3, 5, ..., 2p-3, 2p-1, 2p}` into the `2p+1` ordered union of
/// the two cells' Gauss-Lobatto points.
pub fn gl_subset_indices(p: usize) -> Vec<usize> {
    let mut idx = vec![0];
    idx.extend((1..=2 * p - 1).step_by(2));
    idx.push(2 * p);
    idx
}

/// The `2p+1` union points of one macro direction, in macro reference
/// coordinates, plus the physical coordinates.
fn union_points(
    triple: (f64, f64, f64),
    gl_nodes: &[f64],
    p: usize,
) -> (Vec<f64>, Vec<f64>) {
    let (l, m, r) = triple;
    let mut refs = Vec::with_capacity(2 * p + 1);
    let mut phys = Vec::with_capacity(2 * p + 1);
    let to_ref = |x: f64| (2.0 * x - l - r) / (r - l);
    for &t in &gl_nodes[..p] {
        let x = l + 0.5 * (t + 1.0) * (m - l);
        phys.push(x);
        refs.push(to_ref(x));
    }
    for &t in gl_nodes {
        let x = m + 0.5 * (t + 1.0) * (r - m);
        phys.push(x);
        refs.push(to_ref(x));
    }
    (refs, phys)
}

struct GlDirection {
    /// transfer[r * (p+2) + s]: value of subset-Lagrange basis `s` at
    /// Gauss-Lobatto node `r` of the macro
    transfer: Vec<f64>,
    phys: Vec<f64>,
}

fn gl_directions(mm: &MacroMesh, p: usize, y_dir: bool) -> Result<Vec<GlDirection>> {
    let gl_p = gauss_lobatto_nodes(p)?;
    let gl_lift = gauss_lobatto_nodes(p + 1)?;
    let subset = gl_subset_indices(p);
    let npp = p + 2;
    let mut out = Vec::with_capacity(mm.n_per_dir());
    for k in 1..=mm.n_per_dir() {
        let triple = if y_dir { mm.y_triple(k) } else { mm.x_triple(k) };
        let (refs, phys) = union_points(triple, gl_p.nodes(), p);
        let sref: Vec<f64> = subset.iter().map(|&s| refs[s]).collect();
        let sphys: Vec<f64> = subset.iter().map(|&s| phys[s]).collect();
        let basis = LagrangeBasis1D::new(&sref);
        let tab = basis.tabulate(gl_lift.nodes());
        let mut transfer = vec![0.0; npp * npp];
        for r in 0..npp {
            for s in 0..npp {
                transfer[r * npp + s] = tab.val(r, s);
            }
        }
        out.push(GlDirection {
            transfer,
            phys: sphys,
        });
    }
    Ok(out)
}

fn lift_blocks(
    mm: &MacroMesh,
    p: usize,
    mut sample: impl FnMut(usize, usize) -> Vec<f64>,
    combine: impl Fn(usize, usize, &[f64]) -> Vec<f64>,
) -> Result<MacroFEFunction> {
    let nm = mm.n_per_dir();
    let mut blocks = Vec::with_capacity(nm * nm);
    for ky in 1..=nm {
        for kx in 1..=nm {
            let data = sample(kx, ky);
            blocks.push(combine(kx, ky, &data));
        }
    }
    let gl_lift = gauss_lobatto_nodes(p + 1)?;
    Ok(MacroFEFunction {
        mm: mm.clone(),
        degree: p + 1,
        basis: LagrangeBasis1D::new(gl_lift.nodes()),
        blocks,
    })
}

/// Gauss-Lobatto lift of an FE function: the sampled points are nodes of
/// the fine space, so the data is read directly from the coefficients.
pub fn pgl_apply(mm: &MacroMesh, u: &FEFunction) -> Result<MacroFEFunction> {
    let space = u.space();
    if !space.mesh().same_grid(mm.mesh()) {
        return Err(Error::Mismatch(
            "macro mesh and FE function live on different grids".into(),
        ));
    }
    let p = space.degree();
    let subset = gl_subset_indices(p);
    let dirs_x = gl_directions(mm, p, false)?;
    let dirs_y = gl_directions(mm, p, true)?;
    let m = space.nodes_per_dir();
    let coeffs = u.coeffs();
    let npp = p + 2;
    lift_blocks(
        mm,
        p,
        |kx, ky| {
            let mut data = vec![0.0; npp * npp];
            for (sj, &uj) in subset.iter().enumerate() {
                let gs = p * (2 * ky - 2) + uj;
                for (si, &ui) in subset.iter().enumerate() {
                    let gr = p * (2 * kx - 2) + ui;
                    data[sj * npp + si] = coeffs[gs * m + gr];
                }
            }
            data
        },
        |kx, ky, data| apply_transfer(&dirs_x[kx - 1].transfer, &dirs_y[ky - 1].transfer, data, npp),
    )
}

/// Gauss-Lobatto lift applied directly to a continuous function's point
/// values at the fine degree-`p` node pattern.
pub fn pgl_apply_fn<G: Fn(f64, f64) -> f64>(
    mm: &MacroMesh,
    p: usize,
    g: G,
) -> Result<MacroFEFunction> {
    let dirs_x = gl_directions(mm, p, false)?;
    let dirs_y = gl_directions(mm, p, true)?;
    let npp = p + 2;
    lift_blocks(
        mm,
        p,
        |kx, ky| {
            let px = &dirs_x[kx - 1].phys;
            let py = &dirs_y[ky - 1].phys;
            let mut data = vec![0.0; npp * npp];
            for (sj, &y) in py.iter().enumerate() {
                for (si, &x) in px.iter().enumerate() {
                    data[sj * npp + si] = g(x, y);
                }
            }
            data
        },
        |kx, ky, data| apply_transfer(&dirs_x[kx - 1].transfer, &dirs_y[ky - 1].transfer, data, npp),
    )
}

/// `B = Tx S Ty^T` for `(p+2)`-square matrices stored row-major.
fn apply_transfer(tx: &[f64], ty: &[f64], s: &[f64], n: usize) -> Vec<f64> {
    let mut tmp = vec![0.0; n * n]; // tmp[sj][r] = sum_si s[sj][si] tx[r][si]
    for sj in 0..n {
        for r in 0..n {
            let mut acc = 0.0;
            for si in 0..n {
                acc += s[sj * n + si] * tx[r * n + si];
            }
            tmp[sj * n + r] = acc;
        }
    }
    let mut out = vec![0.0; n * n];
    for b in 0..n {
        for r in 0..n {
            let mut acc = 0.0;
            for sj in 0..n {
                acc += ty[b * n + sj] * tmp[sj * n + r];
            }
            out[b * n + r] = acc;
        }
    }
    out
}

struct VecDirection {
    lu: DenseLu,
    /// weights[i * ns + s]: functional i as a weighted sum of the samples
    weights: Vec<f64>,
    /// sample locations: 3 mesh points, then the two mapped Gauss blocks
    phys: Vec<f64>,
    n_samples: usize,
}

fn vec_directions(mm: &MacroMesh, p: usize, y_dir: bool) -> Result<Vec<VecDirection>> {
    let npp = p + 2;
    let gl_lift = gauss_lobatto_nodes(p + 1)?;
    let basis = LagrangeBasis1D::new(gl_lift.nodes());
    let gauss = gauss_legendre_rule(p + 2);
    let ng = gauss.len();
    let ns = 3 + 2 * ng;
    // int_{-1}^{x} L_k via the antiderivative (L_{k+1} - L_{k-1})/(2k+1)
    let leg_int = |k: usize, x: f64| -> f64 {
        if k == 0 {
            x + 1.0
        } else {
            let (lp, _) = legendre_eval(k + 1, x);
            let (lm, _) = legendre_eval(k - 1, x);
            (lp - lm) / (2.0 * k as f64 + 1.0)
        }
    };
    let mut out = Vec::with_capacity(mm.n_per_dir());
    for k in 1..=mm.n_per_dir() {
        let (l, mid, r) = if y_dir { mm.y_triple(k) } else { mm.x_triple(k) };
        let a = if y_dir { mm.a_y(k) } else { mm.a_x(k) };
        if a.abs() >= 1.0 - 1e-12 {
            return Err(Error::InvalidMesh(format!(
                "degenerate macro interior offset a = {a}"
            )));
        }
        // functional matrix on the nodal Q_{p+1} basis, exact via Legendre series
        let mut at_a = vec![0.0; npp];
        let mut scratch1 = vec![0.0; npp];
        let mut scratch2 = vec![0.0; npp];
        basis.eval_all(a, &mut at_a, &mut scratch1, &mut scratch2);
        let mut mat = vec![0.0; npp * npp];
        for c in 0..npp {
            mat[c] = if c == 0 { 1.0 } else { 0.0 };
            mat[npp + c] = at_a[c];
            mat[2 * npp + c] = if c == npp - 1 { 1.0 } else { 0.0 };
            let int_left: f64 = (0..npp)
                .map(|kk| basis.legendre_coeff(c, kk) * leg_int(kk, a))
                .sum();
            let int_full = basis.legendre_coeff(c, 0) * 2.0;
            if p == 2 {
                mat[3 * npp + c] = int_full;
            } else {
                mat[3 * npp + c] = int_left;
                mat[4 * npp + c] = int_full - int_left;
                for d in 2..=p.saturating_sub(2) {
                    mat[(3 + d) * npp + c] =
                        basis.legendre_coeff(c, d) * 2.0 / (2.0 * d as f64 + 1.0);
                }
            }
        }
        let lu = DenseLu::new(mat, npp).ok_or_else(|| {
            Error::InvalidMesh(format!(
                "postprocessing functional system is singular at macro {k} (a = {a})"
            ))
        })?;

        // sample locations and functional weights
        let mut phys = vec![l, mid, r];
        let mut refs_left = Vec::with_capacity(ng);
        let mut refs_right = Vec::with_capacity(ng);
        for &t in gauss.nodes() {
            let xi_l = -1.0 + 0.5 * (a + 1.0) * (t + 1.0);
            let xi_r = a + 0.5 * (1.0 - a) * (t + 1.0);
            refs_left.push(xi_l);
            refs_right.push(xi_r);
            phys.push(l + 0.5 * (xi_l + 1.0) * (r - l));
        }
        for &xi_r in &refs_right {
            phys.push(l + 0.5 * (xi_r + 1.0) * (r - l));
        }
        let (scale_l, scale_r) = (0.5 * (a + 1.0), 0.5 * (1.0 - a));
        let mut weights = vec![0.0; npp * ns];
        weights[0] = 1.0;
        weights[ns + 1] = 1.0;
        weights[2 * ns + 2] = 1.0;
        for q in 0..ng {
            let wl = gauss.weights()[q] * scale_l;
            let wr = gauss.weights()[q] * scale_r;
            if p == 2 {
                weights[3 * ns + 3 + q] = wl;
                weights[3 * ns + 3 + ng + q] = wr;
            } else {
                weights[3 * ns + 3 + q] = wl;
                weights[4 * ns + 3 + ng + q] = wr;
                for d in 2..=p - 2 {
                    let (ll, _) = legendre_eval(d, refs_left[q]);
                    let (lr, _) = legendre_eval(d, refs_right[q]);
                    weights[(3 + d) * ns + 3 + q] = wl * ll;
                    weights[(3 + d) * ns + 3 + ng + q] = wr * lr;
                }
            }
        }
        out.push(VecDirection {
            lu,
            weights,
            phys,
            n_samples: ns,
        });
    }
    Ok(out)
}

fn vec_lift_from_samples(
    mm: &MacroMesh,
    p: usize,
    dirs_x: &[VecDirection],
    dirs_y: &[VecDirection],
    mut value_at: impl FnMut(f64, f64) -> f64,
) -> Result<MacroFEFunction> {
    let npp = p + 2;
    lift_blocks(
        mm,
        p,
        |kx, ky| {
            let dx = &dirs_x[kx - 1];
            let dy = &dirs_y[ky - 1];
            let (nsx, nsy) = (dx.n_samples, dy.n_samples);
            let mut grid = vec![0.0; nsx * nsy];
            for (t, &y) in dy.phys.iter().enumerate() {
                for (s, &x) in dx.phys.iter().enumerate() {
                    grid[t * nsx + s] = value_at(x, y);
                }
            }
            // F[i][j] = sum_{s,t} Wx[i][s] G[s][t] Wy[j][t]
            let mut half = vec![0.0; npp * nsy]; // half[i][t]
            for i in 0..npp {
                for t in 0..nsy {
                    let mut acc = 0.0;
                    for s in 0..nsx {
                        acc += dx.weights[i * nsx + s] * grid[t * nsx + s];
                    }
                    half[i * nsy + t] = acc;
                }
            }
            let mut f = vec![0.0; npp * npp];
            for i in 0..npp {
                for jf in 0..npp {
                    let mut acc = 0.0;
                    for t in 0..nsy {
                        acc += dy.weights[jf * nsy + t] * half[i * nsy + t];
                    }
                    f[i * npp + jf] = acc;
                }
            }
            f
        },
        |kx, ky, f| {
            let dx = &dirs_x[kx - 1];
            let dy = &dirs_y[ky - 1];
            // solve Vx Z = F columnwise, then Vy on each row of Z
            let mut z = vec![0.0; npp * npp];
            let mut col = vec![0.0; npp];
            for jf in 0..npp {
                for i in 0..npp {
                    col[i] = f[i * npp + jf];
                }
                dx.lu.solve_in_place(&mut col);
                for r in 0..npp {
                    z[r * npp + jf] = col[r];
                }
            }
            let mut block = vec![0.0; npp * npp];
            let mut row = vec![0.0; npp];
            for r in 0..npp {
                row.copy_from_slice(&z[r * npp..(r + 1) * npp]);
                dy.lu.solve_in_place(&mut row);
                for (s, &v) in row.iter().enumerate() {
                    block[s * npp + r] = v;
                }
            }
            block
        },
    )
}

fn warn_on_large_ratio(mm: &MacroMesh) {
    let q = crate::mesh::mesh_ratio_q(mm.mesh());
    if q > 10.0 {
        eprintln!(
            "layerfem: mesh ratio q = {q:.2} is large; the integral-based lift may be poorly conditioned"
        );
    }
}

/// Value-and-integral lift of an FE function. All functionals of the
/// piecewise-polynomial input are integrated exactly by per-subinterval
/// Gauss rules with `p + 2` points.
pub fn pvec_apply(mm: &MacroMesh, u: &FEFunction) -> Result<MacroFEFunction> {
    let space = u.space();
    if !space.mesh().same_grid(mm.mesh()) {
        return Err(Error::Mismatch(
            "macro mesh and FE function live on different grids".into(),
        ));
    }
    warn_on_large_ratio(mm);
    let p = space.degree();
    let dirs_x = vec_directions(mm, p, false)?;
    let dirs_y = vec_directions(mm, p, true)?;
    vec_lift_from_samples(mm, p, &dirs_x, &dirs_y, |x, y| u.eval(x, y).0)
}

/// Value-and-integral lift applied directly to a continuous function.
pub fn pvec_apply_fn<G: Fn(f64, f64) -> f64>(
    mm: &MacroMesh,
    p: usize,
    g: G,
) -> Result<MacroFEFunction> {
    warn_on_large_ratio(mm);
    let dirs_x = vec_directions(mm, p, false)?;
    let dirs_y = vec_directions(mm, p, true)?;
    vec_lift_from_samples(mm, p, &dirs_x, &dirs_y, |x, y| g(x, y))
}
