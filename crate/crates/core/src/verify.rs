//! Verification suites behind the `verify` CLI subcommand: the two
//! reference-element operator identities, the lift/interpolant consistency
//! identities on both mesh families, and quadrature exactness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::interp::{gl_interpolate, vec_interpolate, verify_lemma_identity};
use crate::mesh::{build_macro_mesh, build_stype_mesh, MeshKind};
use crate::post::{pgl_apply, pgl_apply_fn, pvec_apply, pvec_apply_fn, MacroFEFunction};
use crate::quad::{gauss_legendre_rule, gauss_lobatto_nodes};
use crate::space::build_space;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub max_discrepancy: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_discrepancy <= self.tolerance
    }
}

/// A deterministic family of smooth test functions.
fn random_smooth(rng: &mut ChaCha8Rng) -> impl Fn(f64, f64) -> f64 {
    let a: [f64; 6] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let w1 = rng.random_range(0.5..3.0);
    let w2 = rng.random_range(0.5..3.0);
    let ph1 = rng.random_range(0.0..3.0);
    let ph2 = rng.random_range(0.0..3.0);
    move |x: f64, y: f64| {
        a[0] + a[1] * x
            + a[2] * y
            + a[3] * x * y
            + a[4] * (w1 * x + ph1).sin() * (w2 * y + ph2).cos()
            + a[5] * (0.3 * (x + y)).exp()
    }
}

/// Reference-element identity suite: for each degree and each extra node,
/// both operator identities are checked for `n_funcs` random smooth
/// functions; the result carries the worst sampled discrepancy.
pub fn lemma_identity_suite(
    degrees: &[usize],
    n_funcs: usize,
    extra_nodes: &[f64],
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for &p in degrees {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p as u64) << 8);
        let mut worst: f64 = 0.0;
        for _ in 0..n_funcs {
            let g = random_smooth(&mut rng);
            for &t_star in extra_nodes {
                worst = worst.max(verify_lemma_identity(p, &g, t_star)?);
            }
        }
        out.push(CheckResult {
            name: format!("interpolation identities, degree {p}"),
            max_discrepancy: worst,
            tolerance: 1e-9,
        });
    }
    Ok(out)
}

/// Lift consistency suite: lifting the companion interpolant of `g` equals
/// lifting `g` itself, on both mesh families.
pub fn postprocess_consistency_suite(
    n_list: &[usize],
    n_funcs: usize,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let p = 3;
    let mut out = Vec::new();
    for kind in [MeshKind::Shishkin, MeshKind::BakhvalovShishkin] {
        let mut worst_gl: f64 = 0.0;
        let mut worst_vec: f64 = 0.0;
        for &n in n_list {
            let mesh = build_stype_mesh(n, 5.0, 1e-6, 1.0, kind)?;
            let mm = build_macro_mesh(&mesh);
            let space = build_space(&mesh, p)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64));
            for _ in 0..n_funcs {
                let g = random_smooth(&mut rng);
                let u = gl_interpolate(&space, &g);
                let d = MacroFEFunction::max_block_diff(
                    &pgl_apply(&mm, &u)?,
                    &pgl_apply_fn(&mm, p, &g)?,
                );
                worst_gl = worst_gl.max(d);
                let u = vec_interpolate(&space, &g, p)?;
                let d = MacroFEFunction::max_block_diff(
                    &pvec_apply(&mm, &u)?,
                    &pvec_apply_fn(&mm, p, &g)?,
                );
                worst_vec = worst_vec.max(d);
            }
        }
        out.push(CheckResult {
            name: format!("point lift consistency, {kind} mesh"),
            max_discrepancy: worst_gl,
            tolerance: 1e-10,
        });
        out.push(CheckResult {
            name: format!("integral lift consistency, {kind} mesh"),
            max_discrepancy: worst_vec,
            tolerance: 1e-10,
        });
    }
    Ok(out)
}

/// Quadrature exactness: Gauss-Lobatto rules up to `max_p` on monomials of
/// degree `2p - 1`, Gauss-Legendre rules up to `max_n` on degree `2n - 1`.
pub fn quadrature_exactness_suite(max_p: usize, max_n: usize) -> Result<Vec<CheckResult>> {
    let analytic = |k: usize| {
        if k % 2 == 0 {
            2.0 / (k as f64 + 1.0)
        } else {
            0.0
        }
    };
    let mut worst_gl: f64 = 0.0;
    for p in 1..=max_p {
        let rule = gauss_lobatto_nodes(p)?;
        for k in 0..=2 * p - 1 {
            let q = rule.integrate(|t| t.powi(k as i32));
            worst_gl = worst_gl.max((q - analytic(k)).abs());
        }
    }
    let mut worst_g: f64 = 0.0;
    for n in 1..=max_n {
        let rule = gauss_legendre_rule(n);
        for k in 0..=2 * n - 1 {
            let q = rule.integrate(|t| t.powi(k as i32));
            worst_g = worst_g.max((q - analytic(k)).abs());
        }
    }
    Ok(vec![
        CheckResult {
            name: format!("Gauss-Lobatto exactness to degree 2p-1, p <= {max_p}"),
            max_discrepancy: worst_gl,
            tolerance: 1e-13,
        },
        CheckResult {
            name: format!("Gauss-Legendre exactness to degree 2n-1, n <= {max_n}"),
            max_discrepancy: worst_g,
            tolerance: 1e-13,
        },
    ])
}

/// Everything the `verify` subcommand runs.
pub fn full_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut all = quadrature_exactness_suite(6, 8)?;
    all.extend(lemma_identity_suite(&[2, 3, 4], 10, &[-0.5, 0.37, 0.8], seed)?);
    all.extend(postprocess_consistency_suite(&[8], 5, seed)?);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_suite_passes() {
        for check in full_suite(2024).unwrap() {
            assert!(
                check.passed(),
                "{}: {:e} > {:e}",
                check.name,
                check.max_discrepancy,
                check.tolerance
            );
        }
    }
}
