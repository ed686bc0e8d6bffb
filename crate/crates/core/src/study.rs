//! Convergence-study orchestration: sweep over N, compute the requested
//! error columns against the manufactured solution, attach experimental
//! rates, and emit CSV or aligned-text reports.

use std::fmt;
use std::str::FromStr;

use crate::assemble::{
    assemble_galerkin, assemble_sdfem, stabilization_parameters, stabilization_parameters_sharper,
};
use crate::error::{Error, Result};
use crate::interp::{equidistant_interpolate, gl_interpolate, vec_interpolate};
use crate::mesh::{build_macro_mesh, build_stype_mesh, MeshKind};
use crate::norms::{energy_diff_fe, energy_error_exact, EnergyNorm};
use crate::post::{pgl_apply, pvec_apply};
use crate::problem::model_problem;
use crate::space::build_space;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Galerkin,
    Sdfem,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Galerkin => write!(f, "galerkin"),
            Method::Sdfem => write!(f, "sdfem"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "galerkin" => Ok(Method::Galerkin),
            "sdfem" | "sd" => Ok(Method::Sdfem),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (expected 'galerkin' or 'sdfem')"
            ))),
        }
    }
}

/// Report columns: the energy error of the solution, the three
/// supercloseness distances, and the two postprocessing errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Convergence,
    SuperclosenessVec,
    SuperclosenessGl,
    SuperclosenessEqui,
    PostVec,
    PostGl,
}

impl Column {
    pub const ALL: [Column; 6] = [
        Column::Convergence,
        Column::SuperclosenessVec,
        Column::SuperclosenessGl,
        Column::SuperclosenessEqui,
        Column::PostVec,
        Column::PostGl,
    ];
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Column::Convergence => "convergence",
            Column::SuperclosenessVec => "supercloseness-vec",
            Column::SuperclosenessGl => "supercloseness-gl",
            Column::SuperclosenessEqui => "supercloseness-equi",
            Column::PostVec => "post-vec",
            Column::PostGl => "post-gl",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "convergence" => Ok(Column::Convergence),
            "supercloseness-vec" => Ok(Column::SuperclosenessVec),
            "supercloseness-gl" => Ok(Column::SuperclosenessGl),
            "supercloseness-equi" => Ok(Column::SuperclosenessEqui),
            "post-vec" => Ok(Column::PostVec),
            "post-gl" => Ok(Column::PostGl),
            other => Err(Error::InvalidConfig(format!("unknown column '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportFormat::Text => write!(f, "text"),
            ReportFormat::Csv => write!(f, "csv"),
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown format '{other}' (expected 'text' or 'csv')"
            ))),
        }
    }
}

/// Full description of one study run.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub kind: MeshKind,
    pub p: usize,
    pub sigma: f64,
    pub eps: f64,
    /// Scale of the stabilization parameters.
    pub c_stab: f64,
    pub n_list: Vec<usize>,
    pub method: Method,
    pub sharper_delta21: bool,
    pub columns: Vec<Column>,
    /// Assembly Gauss points per direction; default `p + 2`.
    pub quad_order: Option<usize>,
    /// Error-integral Gauss points per direction; default `p + 3` for FE
    /// columns and `p + 4` for postprocessed columns.
    pub error_quad: Option<usize>,
    pub format: ReportFormat,
    /// Concurrency hint for independent N runs.
    pub threads: usize,
}

impl Default for StudyConfig {
    /// The configuration of the first convergence table: Shishkin mesh,
    /// p = 3, sigma = p + 2, eps = 1e-6, C = 1, SDFEM, all four
    /// convergence/supercloseness columns over N = 8..64.
    fn default() -> Self {
        StudyConfig {
            kind: MeshKind::Shishkin,
            p: 3,
            sigma: 5.0,
            eps: 1e-6,
            c_stab: 1.0,
            n_list: vec![8, 16, 32, 64],
            method: Method::Sdfem,
            sharper_delta21: false,
            columns: vec![
                Column::Convergence,
                Column::SuperclosenessVec,
                Column::SuperclosenessGl,
                Column::SuperclosenessEqui,
            ],
            quad_order: None,
            error_quad: None,
            format: ReportFormat::Text,
            threads: 1,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::InvalidConfig("p must be at least 2".into()));
        }
        if self.n_list.is_empty() {
            return Err(Error::InvalidConfig("empty N list".into()));
        }
        for w in self.n_list.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidConfig("N list must be ascending".into()));
            }
        }
        for &n in &self.n_list {
            if n < 8 || n % 8 != 0 {
                return Err(Error::InvalidConfig(format!(
                    "N = {n} must be at least 8 and divisible by 8"
                )));
            }
        }
        if self.columns.is_empty() {
            return Err(Error::InvalidConfig("no columns requested".into()));
        }
        if let Some(q) = self.quad_order {
            if q < self.p + 2 {
                return Err(Error::InvalidConfig(format!(
                    "quad-order {q} below the minimum p + 2 = {}",
                    self.p + 2
                )));
            }
        }
        if self.threads == 0 {
            return Err(Error::InvalidConfig("threads must be positive".into()));
        }
        Ok(())
    }

    /// Serialize as `key = value` lines; `from_config_text` reads them back.
    pub fn to_config_text(&self) -> String {
        let n: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        let cols: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
        let mut s = String::new();
        s.push_str(&format!("mesh = {}\n", self.kind));
        s.push_str(&format!("p = {}\n", self.p));
        s.push_str(&format!("sigma = {}\n", self.sigma));
        s.push_str(&format!("epsilon = {:e}\n", self.eps));
        s.push_str(&format!("C = {}\n", self.c_stab));
        s.push_str(&format!("N = {}\n", n.join(",")));
        s.push_str(&format!("method = {}\n", self.method));
        s.push_str(&format!("sharper-delta21 = {}\n", self.sharper_delta21));
        s.push_str(&format!("columns = {}\n", cols.join(",")));
        if let Some(q) = self.quad_order {
            s.push_str(&format!("quad-order = {q}\n"));
        }
        if let Some(q) = self.error_quad {
            s.push_str(&format!("error-quad = {q}\n"));
        }
        s.push_str(&format!("format = {}\n", self.format));
        s.push_str(&format!("threads = {}\n", self.threads));
        s
    }

    /// Parse `key = value` lines ('#' starts a comment). Unknown keys are
    /// rejected. Values left unspecified keep their defaults.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut cfg = StudyConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            cfg.set_key(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set_key(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_f64 = |name: &str, v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("{name}: cannot parse '{v}' as a number")))
        };
        let parse_usize = |name: &str, v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("{name}: cannot parse '{v}' as an integer")))
        };
        match key {
            "mesh" => self.kind = value.parse()?,
            "p" => self.p = parse_usize("p", value)?,
            "sigma" => self.sigma = parse_f64("sigma", value)?,
            "epsilon" => self.eps = parse_f64("epsilon", value)?,
            "C" => self.c_stab = parse_f64("C", value)?,
            "N" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    list.push(parse_usize("N", part.trim())?);
                }
                self.n_list = list;
            }
            "method" => self.method = value.parse()?,
            "sharper-delta21" => {
                self.sharper_delta21 = value.parse::<bool>().map_err(|_| {
                    Error::InvalidConfig(format!("sharper-delta21: expected true/false, got '{value}'"))
                })?
            }
            "columns" => {
                let mut cols = Vec::new();
                for part in value.split(',') {
                    cols.push(part.trim().parse()?);
                }
                self.columns = cols;
            }
            "quad-order" => self.quad_order = Some(parse_usize("quad-order", value)?),
            "error-quad" => self.error_quad = Some(parse_usize("error-quad", value)?),
            "format" => self.format = value.parse()?,
            "threads" => self.threads = parse_usize("threads", value)?,
            other => {
                return Err(Error::InvalidConfig(format!("unknown config key '{other}'")))
            }
        }
        Ok(())
    }
}

/// One row of a study report.
#[derive(Debug, Clone)]
pub struct StudyRow {
    pub n: usize,
    /// One error per requested column.
    pub errors: Vec<f64>,
    /// Rate toward the next row, per column; `None` on the last row.
    pub rates: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub columns: Vec<Column>,
    pub rows: Vec<StudyRow>,
}

/// Experimental convergence rate between the errors at `N` and `2N`:
/// `ln(e_N / e_2N) / ln(2 ln N / ln 2N)` on Shishkin meshes (model
/// `e_N = C (N^{-1} ln N)^r`) and `ln(e_N / e_2N) / ln 2` on
/// Bakhvalov-Shishkin meshes (model `e_N = C N^{-r}`).
pub fn convergence_rate(e_n: f64, e_2n: f64, n: usize, kind: MeshKind) -> f64 {
    assert!(e_n > 0.0 && e_2n > 0.0, "rates need positive errors");
    assert!(n >= 2);
    observed_rate(e_n, e_2n, n, 2 * n, kind)
}

/// Rate between arbitrary mesh sizes, reducing to `convergence_rate` for
/// doubling.
pub fn observed_rate(e1: f64, e2: f64, n1: usize, n2: usize, kind: MeshKind) -> f64 {
    assert!(e1 > 0.0 && e2 > 0.0, "rates need positive errors");
    assert!(n2 > n1 && n1 >= 2);
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let denom = match kind {
        MeshKind::Shishkin => ((n2f * n1f.ln()) / (n1f * n2f.ln())).ln(),
        MeshKind::BakhvalovShishkin => (n2f / n1f).ln(),
    };
    (e1 / e2).ln() / denom
}

struct SingleRun {
    errors: Vec<f64>,
}

fn run_single(cfg: &StudyConfig, n: usize) -> Result<SingleRun> {
    let prob = model_problem(cfg.eps)?;
    let mesh = build_stype_mesh(n, cfg.sigma, cfg.eps, prob.beta, cfg.kind)?;
    let space = build_space(&mesh, cfg.p)?;
    let quad = cfg.quad_order.unwrap_or(cfg.p + 2);
    let sys = match cfg.method {
        Method::Galerkin => assemble_galerkin(&space, &prob, quad)?,
        Method::Sdfem => {
            let delta = if cfg.sharper_delta21 {
                stabilization_parameters_sharper(&mesh, cfg.eps, cfg.c_stab)
            } else {
                stabilization_parameters(&mesh, cfg.eps, cfg.c_stab)
            };
            assemble_sdfem(&space, &prob, &delta, quad)?
        }
    };
    let u_h = sys.solve(&space)?;
    let exact = prob.exact.as_ref().expect("model problem has an exact solution");
    let norm = EnergyNorm::of_problem(&prob);
    let nq_fe = cfg.error_quad.unwrap_or(cfg.p + 3);
    let nq_macro = cfg.error_quad.unwrap_or(cfg.p + 4).max(cfg.p + 4);

    let needs_macro = cfg
        .columns
        .iter()
        .any(|c| matches!(c, Column::PostVec | Column::PostGl));
    let mm = needs_macro.then(|| build_macro_mesh(&mesh));

    let mut errors = Vec::with_capacity(cfg.columns.len());
    for col in &cfg.columns {
        let e = match col {
            Column::Convergence => energy_error_exact(&u_h, exact, norm, nq_fe),
            Column::SuperclosenessVec => {
                let pi = vec_interpolate(&space, |x, y| exact.value(x, y), cfg.p)?;
                energy_diff_fe(&pi, &u_h, norm, nq_fe)?
            }
            Column::SuperclosenessGl => {
                let gl = gl_interpolate(&space, |x, y| exact.value(x, y));
                energy_diff_fe(&gl, &u_h, norm, nq_fe)?
            }
            Column::SuperclosenessEqui => {
                let eq = equidistant_interpolate(&space, |x, y| exact.value(x, y))?;
                energy_diff_fe(&eq, &u_h, norm, nq_fe)?
            }
            Column::PostVec => {
                let lift = pvec_apply(mm.as_ref().unwrap(), &u_h)?;
                energy_error_exact(&lift, exact, norm, nq_macro)
            }
            Column::PostGl => {
                let lift = pgl_apply(mm.as_ref().unwrap(), &u_h)?;
                energy_error_exact(&lift, exact, norm, nq_macro)
            }
        };
        errors.push(e);
    }
    Ok(SingleRun { errors })
}

/// Run the sweep. Independent N runs execute concurrently when
/// `threads > 1`; each run is internally deterministic, so reports are
/// bit-identical regardless.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let mut results: Vec<Option<Result<SingleRun>>> = Vec::new();
    results.resize_with(cfg.n_list.len(), || None);
    if cfg.threads <= 1 || cfg.n_list.len() <= 1 {
        for (slot, &n) in results.iter_mut().zip(&cfg.n_list) {
            *slot = Some(run_single(cfg, n));
        }
    } else {
        std::thread::scope(|scope| {
            let mut pending: Vec<(usize, &usize)> = cfg.n_list.iter().enumerate().collect();
            // largest N first so the expensive solve is not the straggler
            pending.reverse();
            let mut handles = Vec::new();
            for chunk in pending.chunks((pending.len() + cfg.threads - 1) / cfg.threads) {
                let chunk: Vec<(usize, usize)> = chunk.iter().map(|&(i, &n)| (i, n)).collect();
                handles.push(scope.spawn(move || {
                    chunk
                        .into_iter()
                        .map(|(i, n)| (i, run_single(cfg, n)))
                        .collect::<Vec<_>>()
                }));
            }
            for h in handles {
                for (i, r) in h.join().expect("study worker panicked") {
                    results[i] = Some(r);
                }
            }
        });
    }

    let mut runs = Vec::with_capacity(results.len());
    for (r, &n) in results.into_iter().zip(&cfg.n_list) {
        match r.expect("every N was scheduled") {
            Ok(run) => runs.push(run),
            Err(e) => {
                return Err(Error::InvalidConfig(format!("run for N = {n} failed: {e}")))
            }
        }
    }

    let mut rows = Vec::with_capacity(runs.len());
    for (idx, run) in runs.iter().enumerate() {
        let rates = if idx + 1 < runs.len() {
            let (n1, n2) = (cfg.n_list[idx], cfg.n_list[idx + 1]);
            run.errors
                .iter()
                .zip(&runs[idx + 1].errors)
                .map(|(&e1, &e2)| {
                    (e1 > 0.0 && e2 > 0.0).then(|| observed_rate(e1, e2, n1, n2, cfg.kind))
                })
                .collect()
        } else {
            vec![None; run.errors.len()]
        };
        rows.push(StudyRow {
            n: cfg.n_list[idx],
            errors: run.errors.clone(),
            rates,
        });
    }
    Ok(StudyReport {
        config: cfg.clone(),
        columns: cfg.columns.clone(),
        rows,
    })
}

impl StudyReport {
    /// CSV with header `N,err_<col>...,rate_<col>...`; floats in scientific
    /// notation with six significant digits, empty rate cells on the last row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("N");
        for c in &self.columns {
            s.push_str(&format!(",err_{c}"));
        }
        for c in &self.columns {
            s.push_str(&format!(",rate_{c}"));
        }
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.n.to_string());
            for e in &row.errors {
                s.push_str(&format!(",{e:.5e}"));
            }
            for r in &row.rates {
                match r {
                    Some(v) => s.push_str(&format!(",{v:.5e}")),
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }

    /// Aligned table in the layout of the published convergence tables:
    /// one error/rate pair per column.
    pub fn to_text(&self) -> String {
        let rate_label = match self.config.kind {
            MeshKind::Shishkin => "rate_S",
            MeshKind::BakhvalovShishkin => "rate_B",
        };
        let mut s = format!(
            "# mesh={} p={} sigma={} epsilon={:e} C={} method={}{}\n",
            self.config.kind,
            self.config.p,
            self.config.sigma,
            self.config.eps,
            self.config.c_stab,
            self.config.method,
            if self.config.sharper_delta21 {
                " sharper-delta21"
            } else {
                ""
            }
        );
        s.push_str(&format!("{:>6}", "N"));
        for c in &self.columns {
            s.push_str(&format!("  {:>12} {:>7}", c.to_string(), rate_label));
        }
        s.push('\n');
        for row in &self.rows {
            s.push_str(&format!("{:>6}", row.n));
            for (e, r) in row.errors.iter().zip(&row.rates) {
                match r {
                    Some(v) => s.push_str(&format!("  {:>12.3e} {:>7.2}", e, v)),
                    None => s.push_str(&format!("  {:>12.3e} {:>7}", e, "")),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn render(&self) -> String {
        match self.config.format {
            ReportFormat::Text => self.to_text(),
            ReportFormat::Csv => self.to_csv(),
        }
    }

    pub fn column_index(&self, col: Column) -> Option<usize> {
        self.columns.iter().position(|c| *c == col)
    }

    /// Errors of one column in row order.
    pub fn column_errors(&self, col: Column) -> Option<Vec<f64>> {
        let idx = self.column_index(col)?;
        Some(self.rows.iter().map(|r| r.errors[idx]).collect())
    }

    /// Rates of one column in row order (without the final `None`).
    pub fn column_rates(&self, col: Column) -> Option<Vec<f64>> {
        let idx = self.column_index(col)?;
        Some(
            self.rows
                .iter()
                .filter_map(|r| r.rates[idx])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rate_formulas() {
        // ln(2 ln 8 / ln 16) = ln(3/2) because ln 8 = 3 ln 2
        let r = convergence_rate(2.270e-2, 7.926e-3, 8, MeshKind::Shishkin);
        assert_abs_diff_eq!(r, 2.5949, epsilon = 5e-4);
        let r = convergence_rate(1.0, 1.0 / 16.0, 32, MeshKind::BakhvalovShishkin);
        assert_abs_diff_eq!(r, 4.0, epsilon = 1e-12);
        let r = convergence_rate(3.7e-3, 3.7e-3, 8, MeshKind::Shishkin);
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
    }

    #[test]
    #[should_panic(expected = "positive")]
    fn rate_rejects_nonpositive() {
        convergence_rate(0.0, 1.0, 8, MeshKind::Shishkin);
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = StudyConfig::default();
        cfg.kind = MeshKind::BakhvalovShishkin;
        cfg.n_list = vec![8, 16];
        cfg.columns = vec![Column::Convergence, Column::PostGl];
        cfg.sharper_delta21 = true;
        cfg.quad_order = Some(6);
        cfg.format = ReportFormat::Csv;
        let text = cfg.to_config_text();
        let back = StudyConfig::from_config_text(&text).unwrap();
        assert_eq!(back.to_config_text(), text);
        assert!(back.validate().is_ok());
    }

    #[test]
    fn config_rejects_bad_values() {
        assert!(StudyConfig::from_config_text("mesh = nonsense\n").is_err());
        assert!(StudyConfig::from_config_text("frobnicate = 1\n").is_err());
        let mut cfg = StudyConfig::default();
        cfg.n_list = vec![16, 8];
        assert!(cfg.validate().is_err());
        cfg.n_list = vec![12];
        assert!(cfg.validate().is_err());
        cfg.n_list = vec![8];
        cfg.quad_order = Some(3);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn small_study_matches_published_errors() {
        let mut cfg = StudyConfig::default();
        cfg.n_list = vec![8, 16];
        cfg.columns = vec![Column::Convergence];
        let report = run_study(&cfg).unwrap();
        let errs = report.column_errors(Column::Convergence).unwrap();
        assert!(
            (errs[0] - 2.270e-2).abs() / 2.270e-2 < 0.05,
            "N=8 energy error {:.4e}",
            errs[0]
        );
        assert!(
            (errs[1] - 7.926e-3).abs() / 7.926e-3 < 0.05,
            "N=16 energy error {:.4e}",
            errs[1]
        );
        let rates = report.column_rates(Column::Convergence).unwrap();
        assert!((rates[0] - 2.60).abs() <= 0.1, "rate {:.3}", rates[0]);
        // monotone decay
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn determinism_bit_identical() {
        let mut cfg = StudyConfig::default();
        cfg.n_list = vec![8];
        cfg.columns = vec![Column::Convergence, Column::SuperclosenessGl];
        let a = run_study(&cfg).unwrap().to_csv();
        let b = run_study(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_layout() {
        let mut cfg = StudyConfig::default();
        cfg.n_list = vec![8, 16];
        cfg.columns = vec![Column::Convergence];
        let report = run_study(&cfg).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "N,err_convergence,rate_convergence");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "8");
        assert!(row[1].contains('e'));
        let last: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(last[2], "", "last row has an empty rate cell");
    }
}
