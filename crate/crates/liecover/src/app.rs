//! Subcommand orchestration: each step builds tables from the core crate,
//! then `run` writes them with the manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use liecover_core::bounds::{bound_curve, fit_bound_parameters, BoundParameters};
use liecover_core::counting::{counting_record, fit_weyl_exponent, geometric_grid, rank_bound};
use liecover_core::covering::{bracket_covering, BracketConfig, RowRole};
use liecover_core::group::enumerate_dual;
use liecover_core::quadrature::{haar_grid, sample_haar, sample_haar_with, verify_orthogonality};
use liecover_core::rkhs::{reproducing_residual, RkhsCoefficients};
use liecover_core::rng::{stream, StreamId};
use liecover_core::symbol::{check_hermitian_psd, classify_det_order, classify_trace_order, make_symbol, trace_norm};
use liecover_core::{Error, SymbolField, TruncatedKernel};

use crate::config::{config_echo, config_hash, RunConfig};
use crate::report::{flag, num, opt, write_manifest, write_table, write_text, Artifact, Manifest, Provenance, Step, Table};
use crate::symbol_io::{label_text, write_symbol};

pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const VALIDATION: u8 = 2;
    pub const CERTIFICATION: u8 = 3;
    pub const UNKNOWN_SUBCOMMAND: u8 = 64;
    pub const UNWRITABLE: u8 = 74;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Dual,
    Symbol,
    Kernel,
    Count,
    Bounds,
    Cover,
    All,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::Dual,
        Subcommand::Symbol,
        Subcommand::Kernel,
        Subcommand::Count,
        Subcommand::Bounds,
        Subcommand::Cover,
        Subcommand::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Dual => "dual",
            Subcommand::Symbol => "symbol",
            Subcommand::Kernel => "kernel",
            Subcommand::Count => "count",
            Subcommand::Bounds => "bounds",
            Subcommand::Cover => "cover",
            Subcommand::All => "all",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("validation failure: {0}")]
    Validation(String),
    #[error("certification failure: {0}")]
    Certification(String),
    #[error("cannot write to {path}: {source}")]
    Unwritable { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn code(&self) -> u8 {
        match self {
            RunError::Validation(_) => exit::VALIDATION,
            RunError::Certification(_) => exit::CERTIFICATION,
            RunError::Unwritable { .. } => exit::UNWRITABLE,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotCertified | Error::NotPositiveDefinite | Error::InadequateResolution { .. } => {
                RunError::Certification(e.to_string())
            }
            other => RunError::Validation(other.to_string()),
        }
    }
}

/// Output of one step before anything touches the disk.
#[derive(Debug, Default)]
pub struct StepOutput {
    pub tables: Vec<Table>,
    pub texts: Vec<(String, String)>,
    pub notes: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// Human-readable summary for stdout.
    pub summary: Vec<String>,
    /// Failed numerical checks; any makes the step exit with code 3.
    pub failures: Vec<String>,
}

/// What `run` produced.
#[derive(Debug)]
pub struct RunSummary {
    pub exit_code: u8,
    pub manifest: Manifest,
    pub summary: Vec<String>,
}

fn symbol_of(cfg: &RunConfig) -> Result<SymbolField, RunError> {
    Ok(make_symbol(cfg.group, cfg.family, cfg.truncation)?)
}

pub fn dual_step(cfg: &RunConfig) -> Result<StepOutput, RunError> {
    let labels = enumerate_dual(cfg.group, cfg.truncation)?;
    let mut t = Table::new("dual.csv", &["index", "label", "dim", "eigenvalue", "weight"]);
    let mut out = StepOutput::default();
    out.summary.push(format!("{:>5}  {:<10} {:>4}  {:>12}  {:>12}", "index", "label", "dim", "eigenvalue", "weight"));
    for (i, l) in labels.iter().enumerate() {
        t.push(vec![i.to_string(), label_text(l.index), l.dim.to_string(), num(l.eigenvalue), num(l.weight())]);
        out.summary.push(format!("{i:>5}  {:<10} {:>4}  {:>12.6}  {:>12.6}", label_text(l.index), l.dim, l.eigenvalue, l.weight()));
    }
    out.summary.push(format!("{} labels in A_Λ for {} at Λ = {}", labels.len(), cfg.group.name(), cfg.truncation));
    out.tables.push(t);
    Ok(out)
}

pub fn symbol_step(cfg: &RunConfig) -> Result<StepOutput, RunError> {
    let s = symbol_of(cfg)?;
    let d = check_hermitian_psd(&s);
    let mut out = StepOutput::default();
    let mut t = Table::new("symbol.csv", &["quantity", "value"]);
    let mut put = |k: &str, v: String| t.push(vec![k.into(), v]);
    put("min_eigenvalue", num(d.min_eigenvalue));
    put("max_op_norm", num(d.max_op_norm));
    put("partial_trace_norm", num(d.partial_trace_norm));
    put("tail_bound", opt(d.tail_bound));
    put("hermitian_defect", num(d.hermitian_defect));
    put("certified", flag(d.certified));
    match classify_trace_order(&s) {
        Ok(f) => {
            put("beta_hat", num(f.beta));
            put("b_hat", num(f.b));
        }
        Err(e) => {
            put("beta_hat", "NA".into());
            put("b_hat", "NA".into());
            out.warnings.push(format!("trace order: {e}"));
        }
    }
    match classify_det_order(&s) {
        Ok(f) => {
            put("gamma_hat", num(f.gamma));
            put("omega_hat", num(f.omega));
            put("a_hat", num(f.a));
            put("det_degenerate", flag(f.degenerate));
        }
        Err(e) => {
            for k in ["gamma_hat", "omega_hat", "a_hat", "det_degenerate"] {
                put(k, "NA".into());
            }
            out.warnings.push(format!("determinant order: {e}"));
        }
    }
    if !d.certified {
        out.failures.push(format!(
            "symbol not certified (hermitian defect {:e}, min eigenvalue {:e})",
            d.hermitian_defect, d.min_eigenvalue
        ));
    }
    out.summary.push(format!(
        "symbol {}: {} labels, partial trace norm {}, certified {}",
        crate::symbol_io::family_text(&s.family()),
        s.len(),
        d.partial_trace_norm,
        d.certified
    ));
    out.tables.push(t);
    out.texts.push(("symbol.txt".into(), write_symbol(&s)));
    Ok(out)
}

/// Tolerances of the kernel checks.
pub mod tol {
    pub const REPRODUCING: f64 = 1e-8;
    pub const DIAGONAL: f64 = 1e-10;
    pub const INVARIANCE: f64 = 1e-9;
    pub const SYMMETRY: f64 = 1e-10;
    pub const GRAM: f64 = 1e-8;
    pub const ORTHOGONALITY: f64 = 1e-8;
}

pub fn kernel_step(cfg: &RunConfig) -> Result<StepOutput, RunError> {
    let s = symbol_of(cfg)?;
    let kernel = TruncatedKernel::new(s);
    let mut out = StepOutput::default();
    if !kernel.is_certified() {
        out.failures.push("symbol not certified; kernel checks skipped".into());
        return Ok(out);
    }
    let g = cfg.group;
    let points = sample_haar(g, 10, cfg.seed);
    let (p, _) = trace_norm(kernel.symbol())?;
    let mut diag: f64 = 0.0;
    for y in &points {
        diag = diag.max((kernel.eval(y, y)? - p).norm() / p);
    }
    let mut rng = stream(cfg.seed, StreamId::Coefficients);
    let mut repro: f64 = 0.0;
    for i in 0..20 {
        let c = RkhsCoefficients::random_with(g, cfg.truncation, &mut rng)?;
        let r = reproducing_residual(&c, &kernel, &points[i % points.len()])?;
        repro = repro.max(r / (1.0 + c.norm()));
    }
    let mut prng = stream(cfg.seed, StreamId::Points);
    let raw = sample_haar_with(g, 101, &mut prng);
    let pairs: Vec<_> = raw[..100].chunks(2).map(|c| (c[0], c[1])).collect();
    let invariance = kernel.check_invariance(&pairs, &raw[100])?;
    let symmetry = kernel.symmetry_defect(&pairs)?;
    let (gram, min_eig) = kernel.gram(&raw[..20])?;
    let trace: f64 = gram.diagonal().iter().map(|z| z.re).sum();
    let gram_rel = (-min_eig / trace).max(0.0);

    let lam = cfg.lambda_sweep.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let labels = enumerate_dual(g, lam)?;
    let grid = haar_grid(g, cfg.grid_resolution)?;
    let ortho = match verify_orthogonality(g, &labels, &grid) {
        Ok(v) => Some(v),
        Err(e @ Error::InadequateResolution { .. }) => {
            out.warnings.push(format!("orthogonality not checked: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };

    let mut t = Table::new("kernel.csv", &["check", "value", "tolerance", "pass"]);
    let mut check = |name: &str, v: Option<f64>, tol: f64, out: &mut StepOutput| {
        let pass = v.is_none_or(|v| v <= tol);
        t.push(vec![name.into(), opt(v), num(tol), flag(pass)]);
        if !pass {
            out.failures.push(format!("{name} = {:e} exceeds {tol:e}", v.unwrap_or(f64::NAN)));
        }
        out.summary.push(format!("{name:<22} {:<24} tol {tol:e}  {}", opt(v), if pass { "ok" } else { "FAIL" }));
    };
    check("diagonal_identity", Some(diag), tol::DIAGONAL, &mut out);
    check("reproducing_residual", Some(repro), tol::REPRODUCING, &mut out);
    check("invariance", Some(invariance), tol::INVARIANCE, &mut out);
    check("symmetry_defect", Some(symmetry), tol::SYMMETRY, &mut out);
    check("gram_negativity", Some(gram_rel), tol::GRAM, &mut out);
    check("orthogonality", ortho, tol::ORTHOGONALITY, &mut out);
    out.notes.insert("lipschitz".into(), kernel.lipschitz());
    out.tables.push(t);
    Ok(out)
}

pub fn count_step(cfg: &RunConfig) -> Result<StepOutput, RunError> {
    let g = cfg.group;
    let mut out = StepOutput::default();
    let grid = geometric_grid(8.0, 64.0, 12);
    let fit = fit_weyl_exponent(g, 0.0, &grid)?;
    let mut w = Table::new("weyl.csv", &["alpha", "lambda_lo", "lambda_hi", "exponent", "constant", "dimension"]);
    w.push(vec![num(0.0), num(8.0), num(64.0), num(fit.exponent), num(fit.constant), g.dimension().to_string()]);
    out.summary.push(format!("Weyl exponent on [8, 64]: {} (dimension {})", fit.exponent, g.dimension()));
    let rec = counting_record(g, 0.0, &cfg.lambda_sweep, cfg.truncation)?;
    let mut c = Table::new("counting.csv", &["lambda", "head", "complement", "ratio", "rank"]);
    for r in &rec.rows {
        c.push(vec![num(r.lambda), num(r.head), num(r.complement), num(r.ratio), rank_bound(g, r.lambda)?.to_string()]);
    }
    let (lo, hi) = rec.ratio_band();
    out.notes.insert("ratio_band_lo".into(), lo);
    out.notes.insert("ratio_band_hi".into(), hi);
    out.tables.push(w);
    out.tables.push(c);
    Ok(out)
}

fn params_table(p: &BoundParameters) -> Result<Table, RunError> {
    let mut t = Table::new("bound_parameters.csv", &["parameter", "value"]);
    let mut put = |k: &str, v: String| t.push(vec![k.into(), v]);
    put("n", p.n.to_string());
    put("s1", num(p.s1));
    put("convention", p.convention.name().into());
    let u = p.upper;
    put("beta", opt(u.map(|u| u.beta)));
    put("b", opt(u.map(|u| u.b)));
    put("kappa", opt(u.map(|u| u.kappa)));
    put("c_n", opt(u.map(|u| u.c_n)));
    let l = p.lower;
    put("gamma", opt(l.map(|l| l.gamma)));
    put("omega", opt(l.map(|l| l.omega)));
    put("a", opt(l.map(|l| l.a)));
    put("mu", opt(l.map(|l| l.mu)));
    put("c0", opt(l.map(|l| l.c0)));
    put("upper_validity", num(p.upper_validity()));
    put("lower_validity", opt(p.lower.and_then(|_| p.lower_validity().ok())));
    Ok(t)
}

pub fn bounds_step(cfg: &RunConfig) -> Result<StepOutput, RunError> {
    let s = symbol_of(cfg)?;
    let params = fit_bound_parameters(&s, cfg.convention)?;
    let lam = cfg.lambda_sweep.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let curve = bound_curve(&params, &cfg.eps_grid, Some((&s, lam)));
    let mut out = StepOutput::default();
    let mut t = Table::new("bounds.csv", &["eps", "ln_upper", "ln_lower", "ln_det_lower", "valid_upper", "valid_lower"]);
    for i in 0..curve.eps.len() {
        t.push(vec![
            num(curve.eps[i]),
            opt(curve.ln_upper[i]),
            opt(curve.ln_lower[i]),
            opt(curve.ln_det_lower[i]),
            flag(curve.ln_upper[i].is_some()),
            flag(curve.ln_lower[i].is_some()),
        ]);
    }
    if curve.ln_upper.iter().chain(&curve.ln_lower).all(Option::is_none) {
        let w = "no ε of the grid lies in either validity range".to_string();
        t.warnings.push(w.clone());
        out.warnings.push(w);
    }
    if params.upper.is_none() {
        out.warnings.push("upper-bound hypotheses fail for this symbol".into());
    }
    if params.lower.is_none() {
        out.warnings.push("lower-bound hypotheses fail for this symbol".into());
    }
    let valid = curve.ln_upper.iter().filter(|v| v.is_some()).count() + curve.ln_lower.iter().filter(|v| v.is_some()).count();
    out.summary.push(format!("{} radii, {valid} valid bound values, S1 = {}", curve.eps.len(), params.s1));
    out.notes.insert("det_lambda".into(), lam);
    out.tables.push(t);
    out.tables.push(params_table(&params)?);
    Ok(out)
}

pub fn cover_step(cfg: &RunConfig) -> Result<StepOutput, RunError> {
    let s = symbol_of(cfg)?;
    let params = fit_bound_parameters(&s, cfg.convention).ok();
    let kernel = TruncatedKernel::new(s);
    let grid = haar_grid(cfg.group, cfg.grid_resolution)?;
    let lo = cfg.lambda_sweep.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cfg.lambda_sweep.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hi = if hi > lo { hi } else { cfg.truncation };
    let bc = BracketConfig { grid: &grid, cloud_size: cfg.cloud_size, seed: cfg.seed, slack: cfg.slack, params: params.as_ref() };
    let report = bracket_covering(&kernel, lo, hi, &cfg.eps_grid, &bc)?;
    let mut out = StepOutput::default();
    let mut t = Table::new(
        "covering.csv",
        &[
            "eps", "n_cover_est", "n_pack_lower", "ln_vol_lower", "ln_thm_upper", "ln_thm_lower", "valid_upper", "valid_lower",
            "bracket_ok", "seed", "lambda", "cloud_size",
        ],
    );
    for r in &report.rows {
        t.push(vec![
            num(r.eps),
            r.n_cover_est.to_string(),
            r.n_pack_lower.to_string(),
            opt(r.ln_vol_lower),
            opt(r.ln_thm_upper),
            opt(r.ln_thm_lower),
            flag(r.ln_thm_upper.is_some()),
            flag(r.ln_thm_lower.is_some()),
            r.bracket.name().into(),
            report.seed.to_string(),
            num(r.lambda),
            report.cloud_size.to_string(),
        ]);
        if r.n_pack_lower > r.n_cover_est {
            out.failures.push(format!("packing {} exceeds cover {} at ε = {}", r.n_pack_lower, r.n_cover_est, r.eps));
        }
    }
    if report.violations() > 0 {
        let w = format!("{} bracket violations", report.violations());
        t.warnings.push(w.clone());
        out.warnings.push(w);
    }
    if report.undefined() > 0 {
        let w = format!("{} radii at or below δ = {}: bracket undefined", report.undefined(), report.delta);
        t.warnings.push(w.clone());
        out.warnings.push(w);
    }
    out.notes.insert("delta".into(), report.delta);
    out.notes.insert("lambda_small".into(), report.lambda_small);
    out.notes.insert("lambda_large".into(), report.lambda_large);
    out.notes.insert("norm_q_a_small".into(), report.norm_small);
    out.notes.insert("norm_q_a_large".into(), report.norm_large);
    out.notes.insert("grid_tax".into(), report.grid_tax);
    for r in report.rows.iter().filter(|r| r.role == RowRole::Small) {
        out.summary.push(format!(
            "ε = {:<10.6} cover(λ={}) = {:<6} cover(λ={}) = {:<6} bracket {}",
            r.eps,
            report.lambda_small,
            r.n_cover_est,
            report.lambda_large,
            report.rows.iter().find(|x| x.role == RowRole::Large && x.eps == r.eps).map_or(0, |x| x.n_cover_est),
            r.bracket.name()
        ));
    }
    out.tables.push(t);
    Ok(out)
}

fn step_for(cmd: Subcommand, cfg: &RunConfig) -> Result<StepOutput, RunError> {
    match cmd {
        Subcommand::Dual => dual_step(cfg),
        Subcommand::Symbol => symbol_step(cfg),
        Subcommand::Kernel => kernel_step(cfg),
        Subcommand::Count => count_step(cfg),
        Subcommand::Bounds => bounds_step(cfg),
        Subcommand::Cover => cover_step(cfg),
        Subcommand::All => unreachable!("expanded by run"),
    }
}

fn unwritable(path: &Path) -> impl Fn(std::io::Error) -> RunError + '_ {
    move |source| RunError::Unwritable { path: path.to_path_buf(), source }
}

/// Run a subcommand and write its artifacts plus `run.json` into `out_dir`.
///
/// Validation errors abort before anything is written. Failed numerical
/// checks still write every artifact and yield exit code 3.
pub fn run(cmd: Subcommand, cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary, RunError> {
    crate::config::validate(cfg).map_err(|e| RunError::Validation(e.to_string()))?;
    let prov = Provenance { config_hash: config_hash(cfg), seed: cfg.seed };
    let steps: Vec<Subcommand> = if cmd == Subcommand::All { Subcommand::ALL[..6].to_vec() } else { vec![cmd] };
    std::fs::create_dir_all(out_dir).map_err(unwritable(out_dir))?;

    let mut artifacts: Vec<Artifact> = Vec::new();
    let mut step_log = Vec::new();
    let mut notes = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut summary = Vec::new();
    let mut exit_code = exit::SUCCESS;
    for s in steps {
        let start = Instant::now();
        let output = step_for(s, cfg)?;
        for t in &output.tables {
            artifacts.push(write_table(out_dir, t, &prov).map_err(unwritable(&out_dir.join(&t.file)))?);
        }
        for (file, text) in &output.texts {
            artifacts.push(write_text(out_dir, file, text).map_err(unwritable(&out_dir.join(file)))?);
        }
        let code = if output.failures.is_empty() { exit::SUCCESS } else { exit::CERTIFICATION };
        exit_code = exit_code.max(code);
        step_log.push(Step { name: s.name().into(), wall_ms: start.elapsed().as_secs_f64() * 1e3, exit_code: code });
        for (k, v) in output.notes {
            notes.insert(format!("{}.{k}", s.name()), v);
        }
        warnings.extend(output.warnings.into_iter().map(|w| format!("{}: {w}", s.name())));
        warnings.extend(output.failures.iter().map(|w| format!("{}: check failed: {w}", s.name())));
        summary.extend(output.summary);
    }
    let manifest = Manifest {
        tool: "liecover",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cmd.name().into(),
        config_hash: prov.config_hash.clone(),
        seed: cfg.seed,
        config: config_echo(cfg),
        artifacts,
        steps: step_log,
        notes,
        warnings,
        exit_code,
    };
    write_manifest(out_dir, &manifest).map_err(unwritable(&out_dir.join("run.json")))?;
    Ok(RunSummary { exit_code, manifest, summary })
}
