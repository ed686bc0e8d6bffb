//! Assembly of the streamline-diffusion (and plain Galerkin) systems.
//!
//! The bilinear form is
//! `a_SD(v, w) = eps (grad v, grad w) + (c v - b v_x, w)
//!             + sum_tau delta_tau (eps Lap v + b v_x - c v, b w_x)_tau`
//! with right-hand side `f_SD(w) = (f, w) - sum_tau delta_tau (f, b w_x)_tau`.
//! The stabilization parameter is constant on each of the four subdomains.
//! Homogeneous Dirichlet rows and columns are eliminated by removal.

use crate::error::{Error, Result};
use crate::mesh::{SubdomainId, TensorMesh};
use crate::problem::ProblemData;
use crate::quad::gauss_legendre_rule;
use crate::space::{FEFunction, FESpace};
use crate::sparse::CsrMatrix;

/// Subdomain-wise streamline-diffusion parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizationParams {
    pub delta11: f64,
    pub delta12: f64,
    pub delta21: f64,
    pub delta22: f64,
}

impl StabilizationParams {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(d: f64) -> Self {
        assert!(d >= 0.0 && d.is_finite());
        Self {
            delta11: d,
            delta12: d,
            delta21: d,
            delta22: d,
        }
    }

    #[inline]
    pub fn for_subdomain(&self, s: SubdomainId) -> f64 {
        match s {
            SubdomainId::Omega11 => self.delta11,
            SubdomainId::Omega12 => self.delta12,
            SubdomainId::Omega21 => self.delta21,
            SubdomainId::Omega22 => self.delta22,
        }
    }
}

/// Parameters at the upper bounds that give the supercloseness estimate:
/// `delta11 = C/N`, `delta21 = C max{1, eps^{-1/2} w} w^2` with
/// `w = max|psi'| / N`, and `delta12 = delta22 = 0`.
pub fn stabilization_parameters(mesh: &TensorMesh, eps: f64, c: f64) -> StabilizationParams {
    assert!(c > 0.0);
    let n = mesh.n() as f64;
    let w = mesh.max_psi_prime() / n;
    StabilizationParams {
        delta11: c / n,
        delta12: 0.0,
        delta21: c * (eps.powf(-0.5) * w).max(1.0) * w * w,
        delta22: 0.0,
    }
}

/// The sharper variant `delta21 = C w^2` that removes the logarithmic
/// factor from the supercloseness bound.
pub fn stabilization_parameters_sharper(
    mesh: &TensorMesh,
    _eps: f64,
    c: f64,
) -> StabilizationParams {
    assert!(c > 0.0);
    let n = mesh.n() as f64;
    let w = mesh.max_psi_prime() / n;
    StabilizationParams {
        delta11: c / n,
        delta12: 0.0,
        delta21: c * w * w,
        delta22: 0.0,
    }
}

/// Discrete system over the interior degrees of freedom.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    nodes_per_dir: usize,
}

impl AssembledSystem {
    pub fn interior_dim(&self) -> usize {
        (self.nodes_per_dir - 2) * (self.nodes_per_dir - 2)
    }

    /// Expand an interior solution vector to the full coefficient vector
    /// (zeros on the boundary).
    pub fn expand_solution(&self, x: &[f64]) -> Vec<f64> {
        let m = self.nodes_per_dir;
        let mi = m - 2;
        assert_eq!(x.len(), mi * mi);
        let mut full = vec![0.0; m * m];
        for s in 0..mi {
            let src = &x[s * mi..(s + 1) * mi];
            full[(s + 1) * m + 1..(s + 1) * m + 1 + mi].copy_from_slice(src);
        }
        full
    }

    /// Restrict a full coefficient vector to the interior numbering.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let m = self.nodes_per_dir;
        let mi = m - 2;
        assert_eq!(full.len(), m * m);
        let mut x = vec![0.0; mi * mi];
        for s in 0..mi {
            x[s * mi..(s + 1) * mi]
                .copy_from_slice(&full[(s + 1) * m + 1..(s + 1) * m + 1 + mi]);
        }
        x
    }

    /// Solve and wrap the result as an FE function on `space`.
    pub fn solve(&self, space: &FESpace) -> Result<FEFunction> {
        let x = crate::sparse::solve(&self.matrix, &self.rhs)?;
        FEFunction::from_coeffs(space, self.expand_solution(&x))
    }
}

/// Assemble the streamline-diffusion system. `quad_order` is the number of
/// Gauss points per direction, at least `p + 2`.
pub fn assemble_sdfem(
    space: &FESpace,
    prob: &ProblemData,
    delta: &StabilizationParams,
    quad_order: usize,
) -> Result<AssembledSystem> {
    let p = space.degree();
    if quad_order < p + 2 {
        return Err(Error::InvalidConfig(format!(
            "quad_order = {quad_order} must be at least p + 2 = {}",
            p + 2
        )));
    }
    let mesh = space.mesh();
    let eps = prob.eps;
    let rule = gauss_legendre_rule(quad_order);
    let tab = space.basis().tabulate(rule.nodes());
    let n = mesh.n();
    let np = p + 1;
    let nloc = np * np;
    let m = space.nodes_per_dir();
    let mi = m - 2;
    let ndof = mi * mi;
    let nq = quad_order;

    let interior = |r: usize, s: usize| -> Option<usize> {
        if r == 0 || s == 0 || r == m - 1 || s == m - 1 {
            None
        } else {
            Some((s - 1) * mi + (r - 1))
        }
    };

    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(n * n * nloc * nloc / 2);
    let mut rhs = vec![0.0; ndof];

    let mut local = vec![0.0; nloc * nloc];
    let mut local_rhs = vec![0.0; nloc];
    let mut phi = vec![0.0; nloc];
    let mut phix = vec![0.0; nloc];
    let mut phiy = vec![0.0; nloc];
    let mut lap = vec![0.0; nloc];

    for j in 1..=n {
        let k = mesh.k(j);
        let y0 = mesh.ys()[j - 1];
        for i in 1..=n {
            let h = mesh.h(i);
            let x0 = mesh.xs()[i - 1];
            let d_tau = delta.for_subdomain(mesh.classify_cell(i, j));
            let cx = 2.0 / h;
            let cy = 2.0 / k;
            let jac = 0.25 * h * k;
            local.fill(0.0);
            local_rhs.fill(0.0);

            for qy in 0..nq {
                let y = y0 + 0.5 * (rule.nodes()[qy] + 1.0) * k;
                for qx in 0..nq {
                    let x = x0 + 0.5 * (rule.nodes()[qx] + 1.0) * h;
                    let w = rule.weights()[qx] * rule.weights()[qy] * jac;
                    let bv = (prob.b)(x, y);
                    let cv = (prob.c)(x, y);
                    let fv = (prob.f)(x, y);
                    for b in 0..np {
                        let (vy, dy, sy) = (tab.val(qy, b), tab.d1(qy, b), tab.d2(qy, b));
                        for a in 0..np {
                            let idx = b * np + a;
                            let (vx, dx, sx) = (tab.val(qx, a), tab.d1(qx, a), tab.d2(qx, a));
                            phi[idx] = vx * vy;
                            phix[idx] = cx * dx * vy;
                            phiy[idx] = cy * vx * dy;
                            lap[idx] = cx * cx * sx * vy + cy * cy * vx * sy;
                        }
                    }
                    for r in 0..nloc {
                        let stab_test = d_tau * bv * phix[r];
                        local_rhs[r] += w * fv * (phi[r] - stab_test);
                        let row = &mut local[r * nloc..(r + 1) * nloc];
                        let (tv, tx, ty) = (phi[r], phix[r], phiy[r]);
                        for c in 0..nloc {
                            let gal = eps * (phix[c] * tx + phiy[c] * ty)
                                + (cv * phi[c] - bv * phix[c]) * tv;
                            let stab = (eps * lap[c] + bv * phix[c] - cv * phi[c]) * stab_test;
                            row[c] += w * (gal + stab);
                        }
                    }
                }
            }

            for rb in 0..np {
                for ra in 0..np {
                    let (gr, gs) = space.cell_node(i, j, ra, rb);
                    let Some(ri) = interior(gr, gs) else { continue };
                    let r = rb * np + ra;
                    rhs[ri] += local_rhs[r];
                    for cb in 0..np {
                        for ca in 0..np {
                            let (gc, gd) = space.cell_node(i, j, ca, cb);
                            let Some(ci) = interior(gc, gd) else { continue };
                            triplets.push((ri, ci, local[r * nloc + cb * np + ca]));
                        }
                    }
                }
            }
        }
    }

    Ok(AssembledSystem {
        matrix: CsrMatrix::from_triplets(ndof, ndof, triplets),
        rhs,
        nodes_per_dir: m,
    })
}

/// Plain Galerkin system: the streamline-diffusion form with `delta = 0`.
pub fn assemble_galerkin(
    space: &FESpace,
    prob: &ProblemData,
    quad_order: usize,
) -> Result<AssembledSystem> {
    assemble_sdfem(space, prob, &StabilizationParams::zero(), quad_order)
}
