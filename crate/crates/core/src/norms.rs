//! Energy-norm computation, `||v||_E = (eps |v|_1^2 + gamma ||v||_0^2)^{1/2}`,
//! accumulated cell by cell with tensor Gauss quadrature. The layer-adapted
//! mesh resolves the layers, so no special quadrature is needed; saturation
//! is checked by the test suite.

use crate::error::{Error, Result};
use crate::mesh::TensorMesh;
use crate::problem::ExactSolution;
use crate::quad::gauss_legendre_rule;
use crate::space::FEFunction;

#[derive(Debug, Clone, Copy)]
pub struct EnergyNorm {
    pub eps: f64,
    pub gamma: f64,
}

impl EnergyNorm {
    pub fn new(eps: f64, gamma: f64) -> Self {
        assert!(eps > 0.0 && gamma > 0.0);
        Self { eps, gamma }
    }

    pub fn of_problem(prob: &crate::problem::ProblemData) -> Self {
        Self::new(prob.eps, prob.gamma)
    }
}

/// Piecewise field that can evaluate itself on the tensor quadrature grid
/// of a fine mesh cell.
pub trait CellField {
    fn mesh(&self) -> &TensorMesh;

    /// Minimum admissible quadrature points per direction for error
    /// integrals against a smooth function.
    fn min_error_quad(&self) -> usize;

    /// Values and physical gradients at the grid `(xi_q, eta_r)` of cell
    /// `(i, j)`; output layout `out[r * xi.len() + q]`.
    fn eval_cell_grid(
        &self,
        i: usize,
        j: usize,
        xi: &[f64],
        eta: &[f64],
        val: &mut [f64],
        dx: &mut [f64],
        dy: &mut [f64],
    );
}

impl CellField for FEFunction {
    fn mesh(&self) -> &TensorMesh {
        self.space().mesh()
    }

    fn min_error_quad(&self) -> usize {
        self.space().degree() + 3
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
        let space = self.space();
        let p = space.degree();
        let np = p + 1;
        let tx = space.basis().tabulate(xi);
        let ty = space.basis().tabulate(eta);
        let mut local = vec![0.0; np * np];
        self.local_coeffs(i, j, &mut local);
        let mesh = space.mesh();
        let cx = 2.0 / mesh.h(i);
        let cy = 2.0 / mesh.k(j);
        // tmp[b][q] = sum_a local[b][a] * tx(q, a) and the x-derivative analogue
        let nqx = xi.len();
        let mut tmp_v = vec![0.0; np * nqx];
        let mut tmp_d = vec![0.0; np * nqx];
        for b in 0..np {
            for q in 0..nqx {
                let (mut acc_v, mut acc_d) = (0.0, 0.0);
                for a in 0..np {
                    let c = local[b * np + a];
                    acc_v += c * tx.val(q, a);
                    acc_d += c * tx.d1(q, a);
                }
                tmp_v[b * nqx + q] = acc_v;
                tmp_d[b * nqx + q] = acc_d;
            }
        }
        for (r, _) in eta.iter().enumerate() {
            for q in 0..nqx {
                let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
                for b in 0..np {
                    v += tmp_v[b * nqx + q] * ty.val(r, b);
                    gx += tmp_d[b * nqx + q] * ty.val(r, b);
                    gy += tmp_v[b * nqx + q] * ty.d1(r, b);
                }
                let idx = r * nqx + q;
                val[idx] = v;
                dx[idx] = gx * cx;
                dy[idx] = gy * cy;
            }
        }
    }
}

/// Energy-norm distance between a discrete field and a smooth reference
/// given as `(value, d/dx, d/dy)` at a point.
pub fn energy_error_fn<U, G>(u_h: &U, reference: G, norm: EnergyNorm, nq: usize) -> f64
where
    U: CellField,
    G: Fn(f64, f64) -> (f64, f64, f64),
{
    assert!(
        nq >= u_h.min_error_quad(),
        "nq = {nq} below the minimum {} for this field",
        u_h.min_error_quad()
    );
    let mesh = u_h.mesh();
    let rule = gauss_legendre_rule(nq);
    let pts = rule.nodes();
    let n = mesh.n();
    let mut val = vec![0.0; nq * nq];
    let mut dx = vec![0.0; nq * nq];
    let mut dy = vec![0.0; nq * nq];
    let mut acc = 0.0;
    for j in 1..=n {
        let k = mesh.k(j);
        let y0 = mesh.ys()[j - 1];
        for i in 1..=n {
            let h = mesh.h(i);
            let x0 = mesh.xs()[i - 1];
            u_h.eval_cell_grid(i, j, pts, pts, &mut val, &mut dx, &mut dy);
            let jac = 0.25 * h * k;
            for r in 0..nq {
                let y = y0 + 0.5 * (pts[r] + 1.0) * k;
                for q in 0..nq {
                    let x = x0 + 0.5 * (pts[q] + 1.0) * h;
                    let (gv, gx, gy) = reference(x, y);
                    let idx = r * nq + q;
                    let ev = val[idx] - gv;
                    let ex = dx[idx] - gx;
                    let ey = dy[idx] - gy;
                    let w = rule.weights()[q] * rule.weights()[r] * jac;
                    acc += w * (norm.eps * (ex * ex + ey * ey) + norm.gamma * ev * ev);
                }
            }
        }
    }
    acc.sqrt()
}

/// Energy-norm error against an exact separable solution.
pub fn energy_error_exact<U: CellField>(
    u_h: &U,
    sol: &ExactSolution,
    norm: EnergyNorm,
    nq: usize,
) -> f64 {
    energy_error_fn(u_h, |x, y| sol.eval_grad(x, y), norm, nq)
}

/// Energy norm of a discrete field.
pub fn energy_norm_of<U: CellField>(u_h: &U, norm: EnergyNorm, nq: usize) -> f64 {
    energy_error_fn(u_h, |_, _| (0.0, 0.0, 0.0), norm, nq)
}

/// Energy norm of the difference of two functions in the same space;
/// the integrand is polynomial, so the quadrature is exact.
pub fn energy_diff_fe(a: &FEFunction, b: &FEFunction, norm: EnergyNorm, nq: usize) -> Result<f64> {
    if !a.space().compatible(b.space()) {
        return Err(Error::Mismatch(
            "energy_diff_fe: functions live on different spaces".into(),
        ));
    }
    let d = FEFunction::difference(a, b)?;
    Ok(energy_norm_of(&d, norm, nq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::gl_interpolate;
    use crate::mesh::{build_stype_mesh, MeshKind};
    use crate::problem::{ExactSolution, Factor1D};
    use crate::space::{build_space, FEFunction};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn mesh8() -> crate::mesh::TensorMesh {
        build_stype_mesh(8, 5.0, 1e-6, 1.0, MeshKind::Shishkin).unwrap()
    }

    #[test]
    fn constant_one_has_unit_norm() {
        let space = build_space(&mesh8(), 2).unwrap();
        let mut u = FEFunction::zero(&space);
        u.coeffs_mut().fill(1.0);
        let e = energy_norm_of(&u, EnergyNorm::new(1e-6, 1.0), 5);
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn interpolant_of_polynomial_has_zero_error() {
        let space = build_space(&mesh8(), 3).unwrap();
        // g = x^2 (1 + y), a Q_p polynomial: interpolation is exact
        let exact = ExactSolution::new(
            Factor1D::new(|x| x * x, |x| 2.0 * x, |_| 2.0),
            Factor1D::new(|y| 1.0 + y, |_| 1.0, |_| 0.0),
        );
        let u = gl_interpolate(&space, |x, y| x * x * (1.0 + y));
        let e = energy_error_exact(&u, &exact, EnergyNorm::new(1e-6, 1.0), 6);
        assert!(e <= 1e-10, "error {e:e}");
    }

    #[test]
    fn norm_homogeneity_and_triangle() {
        let space = build_space(&mesh8(), 2).unwrap();
        let norm = EnergyNorm::new(1e-6, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let rand_fn = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut u = FEFunction::zero(&space);
            for c in u.coeffs_mut() {
                *c = rng.random_range(-1.0..1.0);
            }
            u
        };
        for _ in 0..5 {
            let u = rand_fn(&mut rng);
            let alpha: f64 = rng.random_range(-3.0..3.0);
            let mut au = u.clone();
            for c in au.coeffs_mut() {
                *c *= alpha;
            }
            let eu = energy_norm_of(&u, norm, 5);
            let eau = energy_norm_of(&au, norm, 5);
            assert_abs_diff_eq!(eau, alpha.abs() * eu, epsilon = 1e-12 * (1.0 + eu));

            let b = rand_fn(&mut rng);
            let c = rand_fn(&mut rng);
            let ab = energy_diff_fe(&u, &b, norm, 5).unwrap();
            let bc = energy_diff_fe(&b, &c, norm, 5).unwrap();
            let ac = energy_diff_fe(&u, &c, norm, 5).unwrap();
            assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn rejects_space_mismatch() {
        let norm = EnergyNorm::new(1e-6, 1.0);
        let s8 = build_space(&mesh8(), 2).unwrap();
        let m16 = build_stype_mesh(16, 5.0, 1e-6, 1.0, MeshKind::Shishkin).unwrap();
        let s16 = build_space(&m16, 2).unwrap();
        let a = FEFunction::zero(&s8);
        let b = FEFunction::zero(&s16);
        assert!(energy_diff_fe(&a, &b, norm, 5).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]
        #[test]
        fn scaling_property(alpha in -5.0f64..5.0) {
            let space = build_space(&mesh8(), 2).unwrap();
            let norm = EnergyNorm::new(1e-6, 1.0);
            let mut u = FEFunction::zero(&space);
            for (i, c) in u.coeffs_mut().iter_mut().enumerate() {
                *c = ((i * 2654435761) % 1000) as f64 / 500.0 - 1.0;
            }
            let mut au = u.clone();
            for c in au.coeffs_mut() { *c *= alpha; }
            let eu = energy_norm_of(&u, norm, 5);
            let eau = energy_norm_of(&au, norm, 5);
            proptest::prop_assert!((eau - alpha.abs() * eu).abs() <= 1e-11 * (1.0 + eu));
        }
    }
}
