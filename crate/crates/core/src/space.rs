//! Global `Q_p` finite element space on a tensor mesh.
//!
//! Degrees of freedom are values at the per-cell images of the Gauss-Lobatto
//! nodes, numbered lexicographically with x fastest. Adjacent cells share
//! their edge nodes, which makes the space H1-conforming and turns
//! Gauss-Lobatto interpolation into plain coefficient assignment.

use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::TensorMesh;
use crate::quad::{gauss_lobatto_nodes, LagrangeBasis1D, NodeSet1D};

#[derive(Debug)]
struct SpaceInner {
    mesh: TensorMesh,
    p: usize,
    gl: NodeSet1D,
    basis: LagrangeBasis1D,
    /// global node coordinates per direction, length p*N + 1
    gx: Vec<f64>,
    gy: Vec<f64>,
}

/// Shared handle to a `Q_p` space; cloning is cheap.
#[derive(Debug, Clone)]
pub struct FESpace {
    inner: Arc<SpaceInner>,
}

/// Build the `Q_p` space on `mesh` for `p >= 2`.
pub fn build_space(mesh: &TensorMesh, p: usize) -> Result<FESpace> {
    if p < 2 {
        return Err(Error::InvalidConfig(format!(
            "polynomial degree p = {p} must be at least 2"
        )));
    }
    let gl = gauss_lobatto_nodes(p)?;
    let basis = LagrangeBasis1D::new(gl.nodes());
    let build_dir = |coords: &[f64]| {
        let n = coords.len() - 1;
        let mut g = vec![0.0; p * n + 1];
        for cell in 0..n {
            let (a, b) = (coords[cell], coords[cell + 1]);
            for (k, &t) in gl.nodes().iter().enumerate().take(p) {
                g[p * cell + k] = a + 0.5 * (t + 1.0) * (b - a);
            }
            // shared node: take the mesh point itself, bit-exact
            g[p * cell] = a;
        }
        g[p * n] = coords[n];
        g
    };
    let gx = build_dir(mesh.xs());
    let gy = build_dir(mesh.ys());
    Ok(FESpace {
        inner: Arc::new(SpaceInner {
            mesh: mesh.clone(),
            p,
            gl,
            basis,
            gx,
            gy,
        }),
    })
}

impl FESpace {
    pub fn mesh(&self) -> &TensorMesh {
        &self.inner.mesh
    }

    pub fn degree(&self) -> usize {
        self.inner.p
    }

    /// Global nodes per direction, `p N + 1`.
    pub fn nodes_per_dir(&self) -> usize {
        self.inner.gx.len()
    }

    pub fn num_dofs(&self) -> usize {
        self.nodes_per_dir() * self.nodes_per_dir()
    }

    pub fn gl_nodes(&self) -> &NodeSet1D {
        &self.inner.gl
    }

    pub fn basis(&self) -> &LagrangeBasis1D {
        &self.inner.basis
    }

    /// Global x-coordinates of the node columns.
    pub fn gx(&self) -> &[f64] {
        &self.inner.gx
    }

    pub fn gy(&self) -> &[f64] {
        &self.inner.gy
    }

    #[inline]
    pub fn global_index(&self, r: usize, s: usize) -> usize {
        s * self.nodes_per_dir() + r
    }

    pub fn node_coords(&self, r: usize, s: usize) -> (f64, f64) {
        (self.inner.gx[r], self.inner.gy[s])
    }

    /// Whether node `(r, s)` lies on the boundary of the unit square.
    #[inline]
    pub fn is_boundary(&self, r: usize, s: usize) -> bool {
        let m = self.nodes_per_dir() - 1;
        r == 0 || r == m || s == 0 || s == m
    }

    pub fn boundary_dof_count(&self) -> usize {
        4 * self.nodes_per_dir() - 4
    }

    /// Global node indices of local node `(a, b)` of cell `(i, j)` (1-based cell).
    #[inline]
    pub fn cell_node(&self, i: usize, j: usize, a: usize, b: usize) -> (usize, usize) {
        (self.inner.p * (i - 1) + a, self.inner.p * (j - 1) + b)
    }

    /// Same `(N, p)` layout on bit-identical grids.
    pub fn compatible(&self, other: &FESpace) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.mesh.same_grid(&other.inner.mesh))
    }
}

/// An element of the discrete space: coefficients are values at the global
/// Gauss-Lobatto nodes.
#[derive(Debug, Clone)]
pub struct FEFunction {
    space: FESpace,
    coeffs: Vec<f64>,
}

impl FEFunction {
    pub fn zero(space: &FESpace) -> Self {
        Self {
            space: space.clone(),
            coeffs: vec![0.0; space.num_dofs()],
        }
    }

    pub fn from_coeffs(space: &FESpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.num_dofs() {
            return Err(Error::Mismatch(format!(
                "coefficient vector has length {}, space has {} dofs",
                coeffs.len(),
                space.num_dofs()
            )));
        }
        Ok(Self {
            space: space.clone(),
            coeffs,
        })
    }

    pub fn space(&self) -> &FESpace {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// `a - b`, rejecting functions from different spaces.
    pub fn difference(a: &FEFunction, b: &FEFunction) -> Result<FEFunction> {
        if !a.space.compatible(&b.space) {
            return Err(Error::Mismatch(
                "FE functions live on different spaces".into(),
            ));
        }
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x - y)
            .collect();
        Ok(FEFunction {
            space: a.space.clone(),
            coeffs,
        })
    }

    /// Local coefficient block of cell `(i, j)`: `out[b * (p+1) + a]`.
    pub fn local_coeffs(&self, i: usize, j: usize, out: &mut [f64]) {
        let p = self.space.degree();
        debug_assert_eq!(out.len(), (p + 1) * (p + 1));
        let m = self.space.nodes_per_dir();
        for b in 0..=p {
            let row = (p * (j - 1) + b) * m + p * (i - 1);
            out[b * (p + 1)..b * (p + 1) + p + 1].copy_from_slice(&self.coeffs[row..row + p + 1]);
        }
    }

    /// Value and gradient at a point of the closed unit square. Points on
    /// interior grid lines evaluate in the right/upper cell; the result is
    /// the same either way by continuity.
    pub fn eval(&self, x: f64, y: f64) -> (f64, (f64, f64)) {
        let mesh = self.space.mesh();
        let i = mesh.cell_of_x(x);
        let j = mesh.cell_of_y(y);
        let (x0, x1) = (mesh.xs()[i - 1], mesh.xs()[i]);
        let (y0, y1) = (mesh.ys()[j - 1], mesh.ys()[j]);
        let xi = 2.0 * (x - x0) / (x1 - x0) - 1.0;
        let eta = 2.0 * (y - y0) / (y1 - y0) - 1.0;
        let p = self.space.degree();
        let np = p + 1;
        let basis = self.space.basis();
        let mut bx = vec![0.0; np];
        let mut dbx = vec![0.0; np];
        let mut sx = vec![0.0; np];
        basis.eval_all(xi, &mut bx, &mut dbx, &mut sx);
        let mut by = vec![0.0; np];
        let mut dby = vec![0.0; np];
        let mut sy = vec![0.0; np];
        basis.eval_all(eta, &mut by, &mut dby, &mut sy);
        let mut local = vec![0.0; np * np];
        self.local_coeffs(i, j, &mut local);
        let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
        for b in 0..np {
            let (mut vx, mut dx) = (0.0, 0.0);
            for a in 0..np {
                let c = local[b * np + a];
                vx += c * bx[a];
                dx += c * dbx[a];
            }
            v += vx * by[b];
            gx += dx * by[b];
            gy += vx * dby[b];
        }
        let cx = 2.0 / (x1 - x0);
        let cy = 2.0 / (y1 - y0);
        (v, (gx * cx, gy * cy))
    }

    /// Text dump with an `(N, p, kind)` header; byte-stable across runs.
    pub fn dump<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let mesh = self.space.mesh();
        writeln!(w, "# layerfem fe-function")?;
        writeln!(w, "N={}", mesh.n())?;
        writeln!(w, "p={}", self.space.degree())?;
        writeln!(w, "kind={}", mesh.family_name())?;
        writeln!(w, "len={}", self.coeffs.len())?;
        for c in &self.coeffs {
            writeln!(w, "{c:.17e}")?;
        }
        Ok(())
    }
}

/// Fill coefficients by evaluating `g` at every global node: the
/// Gauss-Lobatto interpolant in this nodal basis.
pub(crate) fn fill_from_fn<F: Fn(f64, f64) -> f64>(space: &FESpace, g: F) -> FEFunction {
    let m = space.nodes_per_dir();
    let mut coeffs = vec![0.0; m * m];
    for s in 0..m {
        let y = space.gy()[s];
        for r in 0..m {
            coeffs[s * m + r] = g(space.gx()[r], y);
        }
    }
    FEFunction {
        space: space.clone(),
        coeffs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_stype_mesh, MeshKind};
    use approx::assert_abs_diff_eq;

    fn mesh8() -> TensorMesh {
        build_stype_mesh(8, 5.0, 1e-6, 1.0, MeshKind::Shishkin).unwrap()
    }

    #[test]
    fn dof_counts() {
        let m = mesh8();
        let s3 = build_space(&m, 3).unwrap();
        assert_eq!(s3.num_dofs(), 625);
        // perimeter of a 25x25 node grid
        assert_eq!(s3.boundary_dof_count(), 96);
        let mut count = 0;
        for s in 0..s3.nodes_per_dir() {
            for r in 0..s3.nodes_per_dir() {
                if s3.is_boundary(r, s) {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 96);
        let s2 = build_space(&m, 2).unwrap();
        assert_eq!(s2.num_dofs(), 289);
        assert!(build_space(&m, 1).is_err());
    }

    #[test]
    fn shared_edge_dofs() {
        let m = mesh8();
        let s = build_space(&m, 3).unwrap();
        // right edge of cell (1,1) == left edge of cell (2,1)
        for b in 0..=3 {
            assert_eq!(s.cell_node(1, 1, 3, b), s.cell_node(2, 1, 0, b));
        }
        // node coordinates on shared mesh lines are bit-exact mesh points
        assert_eq!(s.gx()[3], m.xs()[1]);
        assert_eq!(s.gy()[6], m.ys()[2]);
    }

    #[test]
    fn constant_reproduction() {
        let m = mesh8();
        let s = build_space(&m, 3).unwrap();
        let u = fill_from_fn(&s, |_, _| 1.0);
        for &(x, y) in &[(0.0, 0.0), (0.5, 0.5), (1e-7, 0.99), (1.0, 1.0)] {
            let (v, (dx, dy)) = u.eval(x, y);
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(dx, 0.0, epsilon = 1e-8);
            assert_abs_diff_eq!(dy, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn linear_reproduction() {
        let m = mesh8();
        let s = build_space(&m, 3).unwrap();
        let u = fill_from_fn(&s, |x, _| x);
        let (v, (dx, dy)) = u.eval(0.5, 0.5);
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(dx, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(dy, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn qp_reproduction() {
        // interpolate x^p y^p on a moderate mesh; evaluation is exact
        let m = build_stype_mesh(8, 5.0, 1e-4, 1.0, MeshKind::BakhvalovShishkin).unwrap();
        for p in [2usize, 3] {
            let s = build_space(&m, p).unwrap();
            let g = move |x: f64, y: f64| x.powi(p as i32) * y.powi(p as i32);
            let u = fill_from_fn(&s, g);
            for &(x, y) in &[(0.137, 0.81), (0.42, 0.333), (0.9991, 0.0501)] {
                let (v, _) = u.eval(x, y);
                assert_abs_diff_eq!(v, g(x, y), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let m = build_stype_mesh(8, 5.0, 1e-4, 1.0, MeshKind::Shishkin).unwrap();
        let s = build_space(&m, 3).unwrap();
        let u = fill_from_fn(&s, |x, y| (2.1 * x + 0.3).sin() * (1.7 * y).cos());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let i = rng.random_range(1..=8usize);
            let j = rng.random_range(1..=8usize);
            let xi = rng.random_range(-0.8..0.8);
            let eta = rng.random_range(-0.8..0.8);
            let (x0, x1) = (m.xs()[i - 1], m.xs()[i]);
            let (y0, y1) = (m.ys()[j - 1], m.ys()[j]);
            let x = x0 + 0.5 * (xi + 1.0) * (x1 - x0);
            let y = y0 + 0.5 * (eta + 1.0) * (y1 - y0);
            let hx = 1e-6 * (x1 - x0);
            let hy = 1e-6 * (y1 - y0);
            let (_, (dx, dy)) = u.eval(x, y);
            let fdx = (u.eval(x + hx, y).0 - u.eval(x - hx, y).0) / (2.0 * hx);
            let fdy = (u.eval(x, y + hy).0 - u.eval(x, y - hy).0) / (2.0 * hy);
            assert!(
                (dx - fdx).abs() <= 1e-4 * (1.0 + dx.abs()),
                "dx {dx} vs fd {fdx}"
            );
            assert!(
                (dy - fdy).abs() <= 1e-4 * (1.0 + dy.abs()),
                "dy {dy} vs fd {fdy}"
            );
        }
    }

    #[test]
    #[should_panic(expected = "outside")]
    fn eval_rejects_outside_points() {
        let m = mesh8();
        let s = build_space(&m, 2).unwrap();
        FEFunction::zero(&s).eval(1.5, 0.5);
    }

    #[test]
    fn dump_header() {
        let m = mesh8();
        let s = build_space(&m, 2).unwrap();
        let u = FEFunction::zero(&s);
        let mut buf = Vec::new();
        u.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# layerfem fe-function\nN=8\np=2\nkind=shishkin\nlen=289\n"));
    }
}
