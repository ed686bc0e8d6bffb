//! S-type tensor-product meshes for the convection-diffusion model problem:
//! exponentially fine toward the outflow boundary x = 0 and toward the two
//! characteristic boundaries y = 0, 1, piecewise uniform elsewhere.
//!
//! A mesh family is described by its generating function `phi` on [0, 1/2]
//! with `phi(0) = 0` and `phi(1/2) = ln N`; the characterising function is
//! `psi = exp(-phi)`. The two families used throughout are the piecewise
//! uniform Shishkin mesh, `phi(t) = 2 t ln N`, and the graded
//! Bakhvalov-Shishkin mesh, `phi(t) = -ln(1 - 2t(1 - 1/N))`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// The two named S-type mesh families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    Shishkin,
    BakhvalovShishkin,
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshKind::Shishkin => write!(f, "shishkin"),
            MeshKind::BakhvalovShishkin => write!(f, "bakhvalov-shishkin"),
        }
    }
}

impl FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "shishkin" | "s" => Ok(MeshKind::Shishkin),
            "bakhvalov-shishkin" | "bakhvalov_shishkin" | "bs" | "b-s" => {
                Ok(MeshKind::BakhvalovShishkin)
            }
            other => Err(Error::InvalidConfig(format!(
                "unknown mesh kind '{other}' (expected 'shishkin' or 'bakhvalov-shishkin')"
            ))),
        }
    }
}

/// Mesh-generating function `phi` with its characterising data.
#[derive(Clone)]
pub struct MeshGeneratingFunction {
    name: String,
    kind: Option<MeshKind>,
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    max_psi_prime: f64,
}

impl MeshGeneratingFunction {
    pub fn shishkin(n: usize) -> Self {
        let ln_n = (n as f64).ln();
        Self {
            name: MeshKind::Shishkin.to_string(),
            kind: Some(MeshKind::Shishkin),
            phi: Arc::new(move |t| 2.0 * t * ln_n),
            max_psi_prime: 2.0 * ln_n,
        }
    }

    pub fn bakhvalov_shishkin(n: usize) -> Self {
        let q = 1.0 - 1.0 / n as f64;
        Self {
            name: MeshKind::BakhvalovShishkin.to_string(),
            kind: Some(MeshKind::BakhvalovShishkin),
            phi: Arc::new(move |t| -(1.0 - 2.0 * t * q).ln()),
            max_psi_prime: 2.0 * q,
        }
    }

    pub fn for_kind(kind: MeshKind, n: usize) -> Self {
        match kind {
            MeshKind::Shishkin => Self::shishkin(n),
            MeshKind::BakhvalovShishkin => Self::bakhvalov_shishkin(n),
        }
    }

    /// A user-supplied generating function. `max_psi_prime` is the analytic
    /// maximum of `|psi'|` on [0, 1/2]; it enters the stabilization
    /// parameters, so it must be supplied, not sampled.
    pub fn custom<F>(name: impl Into<String>, phi: F, max_psi_prime: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            kind: None,
            phi: Arc::new(phi),
            max_psi_prime,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Option<MeshKind> {
        self.kind
    }

    pub fn phi(&self, t: f64) -> f64 {
        (self.phi)(t)
    }

    /// `psi = exp(-phi)`.
    pub fn psi(&self, t: f64) -> f64 {
        (-(self.phi)(t)).exp()
    }

    pub fn max_psi_prime(&self) -> f64 {
        self.max_psi_prime
    }
}

impl fmt::Debug for MeshGeneratingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeshGeneratingFunction")
            .field("name", &self.name)
            .field("max_psi_prime", &self.max_psi_prime)
            .finish()
    }
}

/// One of the four subdomains cut out by the transition lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubdomainId {
    /// Coarse in x, middle band in y.
    Omega11,
    /// Fine in x (exponential layer), middle band in y.
    Omega12,
    /// Coarse in x, characteristic-layer strips in y.
    Omega21,
    /// Fine in x and in y (corner regions).
    Omega22,
}

/// Tensor-product S-type mesh of the unit square.
///
/// Mesh points `xs[0..=N]`, `ys[0..=N]`; cell `(i, j)` with `1 <= i, j <= N`
/// is `[x_{i-1}, x_i] x [y_{j-1}, y_j]`.
#[derive(Debug, Clone)]
pub struct TensorMesh {
    n: usize,
    sigma: f64,
    eps: f64,
    beta: f64,
    kind: Option<MeshKind>,
    family: String,
    xs: Vec<f64>,
    ys: Vec<f64>,
    lambda_x: f64,
    lambda_y: f64,
    max_psi_prime: f64,
}

/// Build an S-type mesh for one of the named families.
pub fn build_stype_mesh(
    n: usize,
    sigma: f64,
    eps: f64,
    beta: f64,
    kind: MeshKind,
) -> Result<TensorMesh> {
    build_stype_mesh_with(n, sigma, eps, beta, &MeshGeneratingFunction::for_kind(kind, n))
}

/// Build an S-type mesh from an arbitrary generating function.
pub fn build_stype_mesh_with(
    n: usize,
    sigma: f64,
    eps: f64,
    beta: f64,
    gen: &MeshGeneratingFunction,
) -> Result<TensorMesh> {
    if n < 8 || n % 8 != 0 {
        return Err(Error::InvalidMesh(format!(
            "N = {n} must be at least 8 and divisible by 8"
        )));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidMesh(format!("sigma = {sigma} must be positive")));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidMesh(format!("beta = {beta} must be positive")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidMesh(format!("epsilon = {eps} must be positive")));
    }
    let ln_n = (n as f64).ln();
    let eps_max = 1.0 / (4.0 * sigma * ln_n).powi(2);
    if eps > eps_max {
        return Err(Error::InvalidMesh(format!(
            "epsilon = {eps:e} exceeds the layer-resolution threshold 1/(4 sigma ln N)^2 = {eps_max:e} \
             for N = {n}, sigma = {sigma}"
        )));
    }
    let lambda_x = sigma * eps / beta * ln_n;
    let lambda_y = sigma * eps.sqrt() * ln_n;
    if lambda_x > 0.5 {
        return Err(Error::InvalidMesh(format!(
            "transition parameter lambda_x = {lambda_x} exceeds 1/2"
        )));
    }
    if lambda_y > 0.25 {
        return Err(Error::InvalidMesh(format!(
            "transition parameter lambda_y = {lambda_y} exceeds 1/4"
        )));
    }

    let nf = n as f64;
    let mut xs = vec![0.0; n + 1];
    let sev = sigma * eps / beta;
    for i in 1..n / 2 {
        xs[i] = sev * gen.phi(i as f64 / nf);
    }
    xs[n / 2] = lambda_x;
    for i in n / 2 + 1..n {
        xs[i] = 1.0 - 2.0 * (1.0 - lambda_x) * (1.0 - i as f64 / nf);
    }
    xs[n] = 1.0;

    let mut ys = vec![0.0; n + 1];
    let ses = sigma * eps.sqrt();
    for j in 1..n / 4 {
        ys[j] = ses * gen.phi(2.0 * j as f64 / nf);
    }
    ys[n / 4] = lambda_y;
    for j in n / 4 + 1..3 * n / 4 {
        ys[j] = (1.0 - 2.0 * lambda_y) * (2.0 * j as f64 / nf - 1.0) + 0.5;
    }
    ys[3 * n / 4] = 1.0 - lambda_y;
    for j in 3 * n / 4 + 1..n {
        ys[j] = 1.0 - ses * gen.phi(2.0 * (n - j) as f64 / nf);
    }
    ys[n] = 1.0;

    for (name, v) in [("x", &xs), ("y", &ys)] {
        for i in 1..v.len() {
            if !(v[i] > v[i - 1]) {
                return Err(Error::InvalidMesh(format!(
                    "{name}-coordinates are not strictly increasing at index {i}; \
                     is the generating function monotone with phi(0)=0, phi(1/2)=ln N?"
                )));
            }
        }
    }

    Ok(TensorMesh {
        n,
        sigma,
        eps,
        beta,
        kind: gen.kind(),
        family: gen.name().to_string(),
        xs,
        ys,
        lambda_x,
        lambda_y,
        max_psi_prime: gen.max_psi_prime(),
    })
}

impl TensorMesh {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kind(&self) -> Option<MeshKind> {
        self.kind
    }

    pub fn family_name(&self) -> &str {
        &self.family
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn lambda_x(&self) -> f64 {
        self.lambda_x
    }

    pub fn lambda_y(&self) -> f64 {
        self.lambda_y
    }

    pub fn max_psi_prime(&self) -> f64 {
        self.max_psi_prime
    }

    /// Width of cell column `i`, `1 <= i <= N`.
    #[inline]
    pub fn h(&self, i: usize) -> f64 {
        self.xs[i] - self.xs[i - 1]
    }

    /// Height of cell row `j`, `1 <= j <= N`.
    #[inline]
    pub fn k(&self, j: usize) -> f64 {
        self.ys[j] - self.ys[j - 1]
    }

    /// Largest fine-region cell width, `max_{i <= N/2} h_i`.
    pub fn hbar(&self) -> f64 {
        (1..=self.n / 2).map(|i| self.h(i)).fold(0.0, f64::max)
    }

    /// Largest fine-region cell height, `max_{j <= N/4} k_j`.
    pub fn kbar(&self) -> f64 {
        (1..=self.n / 4).map(|j| self.k(j)).fold(0.0, f64::max)
    }

    /// Smallest fine-region cell width, `min_{i <= N/2} h_i`.
    pub fn h_min(&self) -> f64 {
        (1..=self.n / 2).map(|i| self.h(i)).fold(f64::INFINITY, f64::min)
    }

    /// Subdomain containing cell `(i, j)`, decided on the cell center so
    /// cells touching a transition line land deterministically.
    pub fn classify_cell(&self, i: usize, j: usize) -> SubdomainId {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "cell index ({i}, {j}) out of range 1..={}",
            self.n
        );
        let cx = 0.5 * (self.xs[i - 1] + self.xs[i]);
        let cy = 0.5 * (self.ys[j - 1] + self.ys[j]);
        let fine_x = cx < self.lambda_x;
        let layer_y = cy < self.lambda_y || cy > 1.0 - self.lambda_y;
        match (fine_x, layer_y) {
            (false, false) => SubdomainId::Omega11,
            (true, false) => SubdomainId::Omega12,
            (false, true) => SubdomainId::Omega21,
            (true, true) => SubdomainId::Omega22,
        }
    }

    /// 1-based index of the cell containing coordinate `v` along `coords`;
    /// points on interior grid lines belong to the right/upper cell.
    pub(crate) fn locate(coords: &[f64], v: f64) -> usize {
        let n = coords.len() - 1;
        assert!(
            v >= coords[0] && v <= coords[n],
            "coordinate {v} outside [{}, {}]",
            coords[0],
            coords[n]
        );
        // first index with coords[idx] > v
        let idx = coords.partition_point(|&c| c <= v);
        idx.clamp(1, n)
    }

    pub fn cell_of_x(&self, x: f64) -> usize {
        Self::locate(&self.xs, x)
    }

    pub fn cell_of_y(&self, y: f64) -> usize {
        Self::locate(&self.ys, y)
    }

    /// Two meshes are interchangeable when their points agree bit-for-bit.
    pub fn same_grid(&self, other: &TensorMesh) -> bool {
        self.n == other.n && self.xs == other.xs && self.ys == other.ys
    }

    /// Plain-text dump: header, then one coordinate per line in sections
    /// "X" and "Y".
    pub fn dump<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# layerfem mesh")?;
        writeln!(w, "N={}", self.n)?;
        writeln!(w, "sigma={:.17e}", self.sigma)?;
        writeln!(w, "epsilon={:.17e}", self.eps)?;
        writeln!(w, "kind={}", self.family)?;
        writeln!(w, "X")?;
        for x in &self.xs {
            writeln!(w, "{x:.17e}")?;
        }
        writeln!(w, "Y")?;
        for y in &self.ys {
            writeln!(w, "{y:.17e}")?;
        }
        Ok(())
    }
}

/// Worst adjacent-cell size ratio over the fine index ranges: pairs
/// `(h_i, h_{i+1})` for `i = 1..N/2-1` and the analogous `k`-pairs for
/// `j = 1..N/4-1` and `j = 3N/4+1..N-1`. Pairs straddling a transition
/// line are excluded, matching the macro construction.
pub fn mesh_ratio_q(mesh: &TensorMesh) -> f64 {
    let n = mesh.n();
    let mut q: f64 = 1.0;
    let mut take = |a: f64, b: f64| {
        q = q.max(a.max(b) / a.min(b));
    };
    for i in 1..n / 2 {
        take(mesh.h(i), mesh.h(i + 1));
    }
    for j in 1..n / 4 {
        take(mesh.k(j), mesh.k(j + 1));
    }
    for j in 3 * n / 4 + 1..n {
        take(mesh.k(j), mesh.k(j + 1));
    }
    q
}

/// Macro mesh for postprocessing: each macro pairs fine cells
/// `(2k-1, 2k)` per direction, so no macro crosses a transition line.
#[derive(Debug, Clone)]
pub struct MacroMesh {
    mesh: TensorMesh,
    ax: Vec<f64>,
    ay: Vec<f64>,
}

/// Group the fine cells of `mesh` into 2x2 macros. `N` divisible by 8
/// (enforced at mesh construction) guarantees the pairing respects the
/// transition indices N/2, N/4 and 3N/4.
pub fn build_macro_mesh(mesh: &TensorMesh) -> MacroMesh {
    let offset = |c: &[f64], k: usize| {
        let (l, m, r) = (c[2 * k - 2], c[2 * k - 1], c[2 * k]);
        (2.0 * m - l - r) / (r - l)
    };
    let nm = mesh.n() / 2;
    let ax = (1..=nm).map(|k| offset(mesh.xs(), k)).collect();
    let ay = (1..=nm).map(|k| offset(mesh.ys(), k)).collect();
    MacroMesh {
        mesh: mesh.clone(),
        ax,
        ay,
    }
}

impl MacroMesh {
    pub fn mesh(&self) -> &TensorMesh {
        &self.mesh
    }

    /// Number of macros per direction, N/2.
    pub fn n_per_dir(&self) -> usize {
        self.mesh.n() / 2
    }

    /// Reference offset of the interior mesh point of macro column `k`
    /// (1-based); 0 on piecewise uniform meshes.
    pub fn a_x(&self, k: usize) -> f64 {
        self.ax[k - 1]
    }

    pub fn a_y(&self, k: usize) -> f64 {
        self.ay[k - 1]
    }

    /// Physical `(left, mid, right)` of macro column `k`.
    pub fn x_triple(&self, k: usize) -> (f64, f64, f64) {
        let xs = self.mesh.xs();
        (xs[2 * k - 2], xs[2 * k - 1], xs[2 * k])
    }

    pub fn y_triple(&self, k: usize) -> (f64, f64, f64) {
        let ys = self.mesh.ys();
        (ys[2 * k - 2], ys[2 * k - 1], ys[2 * k])
    }

    /// Macro column/row containing fine cell index `i` (both 1-based).
    #[inline]
    pub fn macro_of_cell(i: usize) -> usize {
        (i + 1) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table1_mesh(kind: MeshKind) -> TensorMesh {
        build_stype_mesh(8, 5.0, 1e-6, 1.0, kind).unwrap()
    }

    #[test]
    fn shishkin_transition_parameters_and_uniform_fine_cells() {
        let m = table1_mesh(MeshKind::Shishkin);
        let ln8 = 8.0_f64.ln();
        assert_abs_diff_eq!(m.lambda_x(), 5e-6 * ln8, epsilon = 1e-20);
        assert_abs_diff_eq!(m.lambda_y(), 5e-3 * ln8, epsilon = 1e-17);
        assert_abs_diff_eq!(m.lambda_x(), 1.039_720_770_839_917_9e-5, epsilon = 1e-18);
        assert_eq!(m.xs()[4], m.lambda_x());
        assert_eq!(m.ys()[2], m.lambda_y());
        assert_eq!(m.ys()[6], 1.0 - m.lambda_y());
        let hf = 2.0 * m.lambda_x() / 8.0;
        for i in 1..=4 {
            assert_abs_diff_eq!(m.h(i), hf, epsilon = hf * 1e-14);
        }
        let kf = 4.0 * m.lambda_y() / 8.0;
        for j in 1..=2 {
            assert_abs_diff_eq!(m.k(j), kf, epsilon = kf * 1e-14);
        }
        for j in 7..=8 {
            assert_abs_diff_eq!(m.k(j), kf, epsilon = kf * 1e-14);
        }
    }

    #[test]
    fn coarse_parts_uniform_and_sum_to_one() {
        for kind in [MeshKind::Shishkin, MeshKind::BakhvalovShishkin] {
            for n in [8usize, 16, 24] {
                let m = build_stype_mesh(n, 5.0, 1e-6, 1.0, kind).unwrap();
                let hc = m.h(n / 2 + 1);
                for i in n / 2 + 1..=n {
                    assert_abs_diff_eq!(m.h(i), hc, epsilon = hc * 1e-14);
                }
                let kc = m.k(n / 4 + 1);
                for j in n / 4 + 1..=3 * n / 4 {
                    assert_abs_diff_eq!(m.k(j), kc, epsilon = kc * 1e-14);
                }
                let sx: f64 = (1..=n).map(|i| m.h(i)).sum();
                let sy: f64 = (1..=n).map(|j| m.k(j)).sum();
                assert_abs_diff_eq!(sx, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(sy, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bakhvalov_shishkin_is_graded() {
        let m = table1_mesh(MeshKind::BakhvalovShishkin);
        assert_abs_diff_eq!(m.xs()[4], m.lambda_x(), epsilon = 1e-16);
        assert!(m.h(1) < m.h(4), "fine cells should grow toward the transition");
        // x_1 = 5e-6 * (-ln(1 - 2*(1/8)*(7/8)))
        let x1 = 5e-6 * -(1.0 - 2.0 * 0.125 * 0.875_f64).ln();
        assert_abs_diff_eq!(m.xs()[1], x1, epsilon = 1e-20);
    }

    #[test]
    fn generating_function_identities() {
        for (n, kind) in [(8usize, MeshKind::Shishkin), (64, MeshKind::BakhvalovShishkin)] {
            let g = MeshGeneratingFunction::for_kind(kind, n);
            let ln_n = (n as f64).ln();
            assert_abs_diff_eq!(g.phi(0.0), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(g.phi(0.5), ln_n, epsilon = 1e-12);
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=50 {
                let t = 0.5 * k as f64 / 50.0;
                let p = g.phi(t);
                assert!(p >= prev, "phi must be monotone");
                prev = p;
                assert_abs_diff_eq!(g.psi(t), (-g.phi(t)).exp(), epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(
            MeshGeneratingFunction::shishkin(32).max_psi_prime(),
            2.0 * 32.0_f64.ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            MeshGeneratingFunction::bakhvalov_shishkin(32).max_psi_prime(),
            2.0 * (1.0 - 1.0 / 32.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn fine_cell_width_bound() {
        // h_i <= 5 eps N^-1 max|psi'| e^{beta x_i / (sigma eps)} on the fine range
        for kind in [MeshKind::Shishkin, MeshKind::BakhvalovShishkin] {
            for n in [8usize, 32] {
                let m = build_stype_mesh(n, 5.0, 1e-6, 1.0, kind).unwrap();
                for i in 1..=n / 2 {
                    let bound = 5.0 * m.eps() / n as f64
                        * m.max_psi_prime()
                        * (m.beta() * m.xs()[i] / (m.sigma() * m.eps())).exp();
                    assert!(
                        m.h(i) <= bound,
                        "{kind:?} N={n}: h_{i} = {:e} exceeds {bound:e}",
                        m.h(i)
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_stype_mesh(12, 5.0, 1e-6, 1.0, MeshKind::Shishkin).is_err());
        assert!(build_stype_mesh(4, 5.0, 1e-6, 1.0, MeshKind::Shishkin).is_err());
        // epsilon above the threshold 1/(4 sigma ln N)^2
        let err = build_stype_mesh(8, 5.0, 1e-2, 1.0, MeshKind::Shishkin).unwrap_err();
        assert!(err.to_string().contains("threshold"));
        // tiny beta pushes lambda_x past 1/2
        assert!(build_stype_mesh(8, 5.0, 5e-4, 3e-3, MeshKind::Shishkin).is_err());
    }

    #[test]
    fn cell_classification() {
        let m = table1_mesh(MeshKind::Shishkin);
        let n = m.n();
        assert_eq!(m.classify_cell(1, 1), SubdomainId::Omega22);
        assert_eq!(m.classify_cell(n, n / 2), SubdomainId::Omega11);
        assert_eq!(m.classify_cell(n / 2 + 1, 1), SubdomainId::Omega21);
        assert_eq!(m.classify_cell(2, n / 2), SubdomainId::Omega12);
        assert_eq!(m.classify_cell(1, n), SubdomainId::Omega22);
        // partition: every cell classified, counts add up
        let mut counts = [0usize; 4];
        for i in 1..=n {
            for j in 1..=n {
                match m.classify_cell(i, j) {
                    SubdomainId::Omega11 => counts[0] += 1,
                    SubdomainId::Omega12 => counts[1] += 1,
                    SubdomainId::Omega21 => counts[2] += 1,
                    SubdomainId::Omega22 => counts[3] += 1,
                }
            }
        }
        assert_eq!(counts.iter().sum::<usize>(), n * n);
        assert_eq!(counts[0], (n / 2) * (n / 2)); // coarse x, middle y
        assert_eq!(counts[3], (n / 2) * (n / 2)); // fine x, layer y
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn classify_rejects_out_of_range() {
        let m = table1_mesh(MeshKind::Shishkin);
        m.classify_cell(0, 1);
    }

    #[test]
    fn mesh_ratio_values() {
        let m = table1_mesh(MeshKind::Shishkin);
        assert_abs_diff_eq!(mesh_ratio_q(&m), 1.0, epsilon = 1e-12);

        for n in [8usize, 64] {
            let m = build_stype_mesh(n, 5.0, 1e-6, 1.0, MeshKind::BakhvalovShishkin).unwrap();
            assert!(mesh_ratio_q(&m) >= 1.0);
        }
        // The y-direction pairs sample phi at stride 2, so the worst ratio
        // tends to ln(5)/ln(9/5) ~ 2.7381; the x-direction alone tends to
        // ln(3)/ln(5/3) ~ 2.1507.
        let m = build_stype_mesh(512, 5.0, 1e-9, 1.0, MeshKind::BakhvalovShishkin).unwrap();
        let q = mesh_ratio_q(&m);
        assert!((q - 2.7381).abs() < 0.01, "q = {q}");
        let qx = (1..512 / 2)
            .map(|i| {
                let (a, b) = (m.h(i), m.h(i + 1));
                a.max(b) / a.min(b)
            })
            .fold(1.0_f64, f64::max);
        assert!((qx - 2.1507).abs() < 0.01, "qx = {qx}");
    }

    #[test]
    fn macro_mesh_structure() {
        let m = table1_mesh(MeshKind::Shishkin);
        let mm = build_macro_mesh(&m);
        assert_eq!(mm.n_per_dir(), 4);
        for k in 1..=4 {
            assert_abs_diff_eq!(mm.a_x(k), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(mm.a_y(k), 0.0, epsilon = 1e-12);
        }
        // no macro straddles a transition index
        for k in 1..=mm.n_per_dir() {
            let (l, _, r) = mm.x_triple(k);
            assert!(r <= m.lambda_x() + 1e-15 || l >= m.lambda_x() - 1e-15);
            let (l, _, r) = mm.y_triple(k);
            assert!(r <= m.lambda_y() + 1e-15 || l >= m.lambda_y() - 1e-15);
            assert!(r <= 1.0 - m.lambda_y() + 1e-15 || l >= 1.0 - m.lambda_y() - 1e-15);
        }

        let b = table1_mesh(MeshKind::BakhvalovShishkin);
        let mb = build_macro_mesh(&b);
        let (l, mid, r) = mb.x_triple(1);
        let expect = (2.0 * mid - l - r) / (r - l);
        assert_abs_diff_eq!(mb.a_x(1), expect, epsilon = 1e-15);
        assert!(mb.a_x(1).abs() > 1e-3, "graded mesh has off-center interior points");
        assert!(mb.a_x(1) > -1.0 && mb.a_x(1) < 1.0);
    }

    #[test]
    fn locate_uses_right_closed_cells() {
        let m = table1_mesh(MeshKind::Shishkin);
        assert_eq!(m.cell_of_x(0.0), 1);
        assert_eq!(m.cell_of_x(1.0), 8);
        assert_eq!(m.cell_of_x(m.xs()[4]), 5);
        assert_eq!(m.cell_of_y(m.ys()[2]), 3);
    }

    #[test]
    fn dump_is_stable() {
        let m = table1_mesh(MeshKind::Shishkin);
        let mut a = Vec::new();
        m.dump(&mut a).unwrap();
        let mut b = Vec::new();
        m.dump(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("# layerfem mesh\nN=8\n"));
        assert!(text.contains("\nX\n") && text.contains("\nY\n"));
        assert!(text.contains("kind=shishkin"));
    }
}
