//! Problem data for the convection-diffusion equation
//! `-eps Lap(u) - b u_x + c u = f` on the unit square with homogeneous
//! Dirichlet data, plus the manufactured solution used by the studies:
//! an exponential layer at x = 0 and characteristic layers at y = 0, 1.

use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// One separable factor with analytic derivatives.
#[derive(Clone)]
pub struct Factor1D {
    pub value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Factor1D {
    pub fn new<V, D, S>(value: V, d1: D, d2: S) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        }
    }
}

/// Separable exact solution `u(x, y) = X(x) Y(y)`.
#[derive(Clone)]
pub struct ExactSolution {
    pub x_factor: Factor1D,
    pub y_factor: Factor1D,
}

impl ExactSolution {
    pub fn new(x_factor: Factor1D, y_factor: Factor1D) -> Self {
        Self { x_factor, y_factor }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        (self.x_factor.value)(x) * (self.y_factor.value)(y)
    }

    /// `(u, u_x, u_y)` at a point.
    pub fn eval_grad(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let xv = (self.x_factor.value)(x);
        let yv = (self.y_factor.value)(y);
        let xd = (self.x_factor.d1)(x);
        let yd = (self.y_factor.d1)(y);
        (xv * yv, xd * yv, xv * yd)
    }

    pub fn laplacian(&self, x: f64, y: f64) -> f64 {
        (self.x_factor.d2)(x) * (self.y_factor.value)(y)
            + (self.x_factor.value)(x) * (self.y_factor.d2)(y)
    }

    /// The layered solution of the model problem for a given `eps`:
    /// `X(x) = cos(pi x / 2) - (e^{-x/eps} - e^{-1/eps}) / (1 - e^{-1/eps})`,
    /// `Y(y) = (1 - e^{-y/sqrt(eps)})(1 - e^{-(1-y)/sqrt(eps)}) / (1 - e^{-1/sqrt(eps)})`.
    /// Exponential underflow to zero away from the layers is exact enough;
    /// the denominators are kept so moderate-eps evaluations stay exact.
    pub fn layered(eps: f64) -> Self {
        assert!(eps > 0.0);
        let half_pi = 0.5 * std::f64::consts::PI;
        let e1 = (-1.0 / eps).exp();
        let den_x = 1.0 - e1;
        let x_factor = Factor1D::new(
            move |x: f64| (half_pi * x).cos() - ((-x / eps).exp() - e1) / den_x,
            move |x: f64| -half_pi * (half_pi * x).sin() + (-x / eps).exp() / (eps * den_x),
            move |x: f64| {
                -half_pi * half_pi * (half_pi * x).cos() - (-x / eps).exp() / (eps * eps * den_x)
            },
        );
        let s = eps.sqrt();
        let den_y = 1.0 - (-1.0 / s).exp();
        // Y = (1 - A - B + A B)/den with A = e^{-y/s}, B = e^{-(1-y)/s};
        // A B = e^{-1/s} is constant, so Y' = (A - B)/(s den), Y'' = -(A + B)/(s^2 den).
        let ab = (-1.0 / s).exp();
        let y_factor = Factor1D::new(
            move |y: f64| {
                let a = (-y / s).exp();
                let b = (-(1.0 - y) / s).exp();
                (1.0 - a - b + ab) / den_y
            },
            move |y: f64| {
                let a = (-y / s).exp();
                let b = (-(1.0 - y) / s).exp();
                (a - b) / (s * den_y)
            },
            move |y: f64| {
                let a = (-y / s).exp();
                let b = (-(1.0 - y) / s).exp();
                -(a + b) / (s * s * den_y)
            },
        );
        Self::new(x_factor, y_factor)
    }
}

/// Coefficients and data of one problem instance.
#[derive(Clone)]
pub struct ProblemData {
    pub eps: f64,
    pub b: ScalarField,
    pub c: ScalarField,
    pub f: ScalarField,
    /// Lower bound of the convection coefficient, `b >= beta > 0`.
    pub beta: f64,
    /// Energy-norm weight, `c + b_x / 2 >= gamma > 0`.
    pub gamma: f64,
    pub exact: Option<ExactSolution>,
}

impl ProblemData {
    /// Validates the claimed coefficient bounds on a 100 x 100 grid
    /// (`b_x` by central differences).
    pub fn new(
        eps: f64,
        b: ScalarField,
        c: ScalarField,
        f: ScalarField,
        beta: f64,
        gamma: f64,
        exact: Option<ExactSolution>,
    ) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidProblem(format!("eps = {eps} must be positive")));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "beta = {beta} must be positive"
            )));
        }
        if !(gamma > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "gamma = {gamma} must be positive"
            )));
        }
        let h = 1e-6;
        for iy in 0..100 {
            let y = (iy as f64 + 0.5) / 100.0;
            for ix in 0..100 {
                let x = (ix as f64 + 0.5) / 100.0;
                let bv = b(x, y);
                if bv < beta {
                    return Err(Error::InvalidProblem(format!(
                        "b({x:.3}, {y:.3}) = {bv} violates b >= beta = {beta}"
                    )));
                }
                let bx = (b(x + h, y) - b(x - h, y)) / (2.0 * h);
                let g = c(x, y) + 0.5 * bx;
                if g < gamma - 1e-9 {
                    return Err(Error::InvalidProblem(format!(
                        "c + b_x/2 = {g} at ({x:.3}, {y:.3}) violates the bound gamma = {gamma}"
                    )));
                }
            }
        }
        Ok(Self {
            eps,
            b,
            c,
            f,
            beta,
            gamma,
            exact,
        })
    }
}

/// The model problem `-eps Lap(u) - (2 - x) u_x + 3/2 u = f` with the
/// layered exact solution and `f` synthesized from its analytic
/// derivatives. `beta = 1` (minimum of `2 - x` on the square), `gamma = 1`
/// (from `c + b_x/2 = 3/2 - 1/2`).
pub fn model_problem(eps: f64) -> Result<ProblemData> {
    if !(eps > 0.0 && eps <= 1e-2) {
        return Err(Error::InvalidProblem(format!(
            "model problem expects 0 < eps <= 1e-2, got {eps}"
        )));
    }
    let exact = ExactSolution::layered(eps);
    let f_exact = exact.clone();
    let f: ScalarField = Arc::new(move |x: f64, y: f64| {
        let (u, ux, _) = f_exact.eval_grad(x, y);
        -eps * f_exact.laplacian(x, y) - (2.0 - x) * ux + 1.5 * u
    });
    ProblemData::new(
        eps,
        Arc::new(|x, _| 2.0 - x),
        Arc::new(|_, _| 1.5),
        f,
        1.0,
        1.0,
        Some(exact),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn model_gamma_and_boundary() {
        let prob = model_problem(1e-6).unwrap();
        assert_eq!(prob.gamma, 1.0);
        assert_eq!(prob.beta, 1.0);
        let u = prob.exact.as_ref().unwrap();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            assert_abs_diff_eq!(u.value(0.0, t), 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(u.value(1.0, t), 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(u.value(t, 0.0), 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(u.value(t, 1.0), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn center_value_away_from_layers() {
        let u = ExactSolution::layered(1e-6);
        let expect = (std::f64::consts::PI / 4.0).cos();
        assert_abs_diff_eq!(u.value(0.5, 0.5), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(u.value(1.0, 0.5), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn residual_vanishes_at_random_points() {
        let prob = model_problem(1e-6).unwrap();
        let u = prob.exact.as_ref().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x: f64 = rng.random();
            let y: f64 = rng.random();
            let (uv, ux, _) = u.eval_grad(x, y);
            let res = -prob.eps * u.laplacian(x, y) - (2.0 - x) * ux + 1.5 * uv;
            let f = (prob.f)(x, y);
            let scale = f.abs().max(1.0);
            assert!(
                ((res - f) / scale).abs() < 1e-9,
                "residual {res} vs f {f} at ({x}, {y})"
            );
        }
    }

    #[test]
    fn factor_derivatives_match_finite_differences() {
        let eps = 1e-4;
        let u = ExactSolution::layered(eps);
        // x factor: generic points plus points inside the layer (step ~ eps)
        for (t, h) in [(0.3, 1e-6), (0.77, 1e-6), (2.0 * eps, 1e-3 * eps)] {
            let fd = ((u.x_factor.value)(t + h) - (u.x_factor.value)(t - h)) / (2.0 * h);
            let d = (u.x_factor.d1)(t);
            assert!((fd - d).abs() <= 1e-5 * (1.0 + d.abs()), "X' {d} vs {fd}");
            let fd2 = ((u.x_factor.d1)(t + h) - (u.x_factor.d1)(t - h)) / (2.0 * h);
            let d2 = (u.x_factor.d2)(t);
            assert!((fd2 - d2).abs() <= 1e-5 * (1.0 + d2.abs()), "X'' {d2} vs {fd2}");
        }
        let s = eps.sqrt();
        for (t, h) in [(0.5, 1e-6), (2.0 * s, 1e-3 * s), (1.0 - 2.0 * s, 1e-3 * s)] {
            let fd = ((u.y_factor.value)(t + h) - (u.y_factor.value)(t - h)) / (2.0 * h);
            let d = (u.y_factor.d1)(t);
            assert!((fd - d).abs() <= 1e-5 * (1.0 + d.abs()), "Y' {d} vs {fd}");
            let fd2 = ((u.y_factor.d1)(t + h) - (u.y_factor.d1)(t - h)) / (2.0 * h);
            let d2 = (u.y_factor.d2)(t);
            assert!((fd2 - d2).abs() <= 1e-5 * (1.0 + d2.abs()), "Y'' {d2} vs {fd2}");
        }
    }

    #[test]
    fn layer_structure_is_present() {
        let eps = 1e-6;
        let u = ExactSolution::layered(eps);
        let near = u.value(10.0 * eps, 0.5) - u.value(100.0 * eps, 0.5);
        let far = u.value(0.4, 0.5) - u.value(0.5, 0.5);
        assert!(
            near.abs() > 10.0 * far.abs(),
            "layer variation {near} should dwarf smooth variation {far}"
        );
    }

    #[test]
    fn moderate_eps_denominators_kept() {
        // at eps = 0.1 the denominator 1 - e^{-1/eps} is visibly below 1
        let u = ExactSolution::layered(0.1);
        assert_abs_diff_eq!((u.x_factor.value)(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((u.x_factor.value)(1.0), (0.5 * std::f64::consts::PI).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!((u.y_factor.value)(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((u.y_factor.value)(1.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_nonpositive_gamma_setup() {
        // eps = 1, b = 1, c = 0: c + b_x/2 = 0, no positive gamma is valid
        let r = ProblemData::new(
            1.0,
            Arc::new(|_, _| 1.0),
            Arc::new(|_, _| 0.0),
            Arc::new(|_, _| 0.0),
            1.0,
            0.5,
            None,
        );
        assert!(r.is_err());
        assert!(model_problem(0.5).is_err());
    }
}
