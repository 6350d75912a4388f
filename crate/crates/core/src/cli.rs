//! Batch interface behind the `poincare21` binary.
//!
//! Every command resolves a [`RunConfig`] from command-line flags, an optional
//! JSON config file and built-in defaults (in that order of precedence). The
//! resolved config, minus output paths, is hashed and embedded in each output
//! file together with the library version.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coadjoint::{CasimirValues, DualElement};
use crate::coherent::{
    admissibility_report_cone, admissibility_report_hyp, cone_k_grid, hyperboloid_k_grid,
    AdmissibilityReport, Envelope,
};
use crate::error::Error;
use crate::lorentz::{minkowski_dot, RowVec3};
use crate::measures::{Manifold, QuadratureSpec};
use crate::orbits::{
    classify_coadjoint, classify_momentum, momentum_orbit_dimension, sample_coadjoint_orbit,
    sample_repgen_orbit, stabilizer_probe,
};
use crate::verify::{run_suite, Suite, SuiteReport, VerifyConfig, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_MATH: i32 = 4;

/// Worker count for the global rayon pool.
pub const THREADS_ENV: &str = "POINCARE21_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Math(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Math(_) => EXIT_MATH,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
            CliError::Math(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(s) => CliError::Usage(s),
            Error::TranslationGenerator(g) => {
                CliError::Usage(format!("{g} has no 3x3 exponential"))
            }
            other => CliError::Math(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "poincare21",
    version,
    about = "Orbits, representations and coherent states of the (2+1)-dimensional Poincaré group"
)]
pub struct Cli {
    /// JSON config file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample an orbit and write it as CSV with a JSON sidecar.
    Sample(SampleArgs),
    /// Classify a coadjoint vector.
    Classify(ClassifyArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Admissibility constant over a grid of k.
    Admissibility(AdmissibilityArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Sample the momentum orbit through --k0.
    #[arg(long, conflicts_with = "coadjoint")]
    pub repgen: bool,
    /// Sample the coadjoint orbit through (--alpha, --beta).
    #[arg(long)]
    pub coadjoint: bool,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub k0: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub alpha: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub beta: Option<[f64; 3]>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV path; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Six components `α*₀,α*₁,α*₂,β*₀,β*₁,β*₂`.
    #[arg(value_parser = parse_vec6, allow_hyphen_values = true)]
    pub x: Option<[f64; 6]>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub alpha: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub beta: Option<[f64; 3]>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// group, coadjoint, orbits, measure, uir, cs-hyp, cs-cone or all.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub mc_samples: Option<u64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdmissibilityArgs {
    /// `hyperboloid` or `cone`.
    #[arg(long)]
    pub manifold: Option<String>,
    /// `exp`, `u-exp`, `constant` or `bump:a:b`.
    #[arg(long)]
    pub envelope: Option<String>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<i64>,
    /// Number of k-points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Relative tolerance for the constancy verdict.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    #[arg(long)]
    pub radial_nodes: Option<usize>,
    #[arg(long)]
    pub angular_nodes: Option<usize>,
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let v: f64 = t
                .trim()
                .parse()
                .map_err(|_| format!("not a number: {t:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("not finite: {t:?}"))
            }
        })
        .collect()
}

pub fn parse_vec3(s: &str) -> std::result::Result<[f64; 3], String> {
    parse_list(s)?
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 3 components, got {}", v.len()))
}

pub fn parse_vec6(s: &str) -> std::result::Result<[f64; 6], String> {
    parse_list(s)?
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 6 components, got {}", v.len()))
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
    pub truncation: Option<f64>,
    pub mc_samples: Option<u64>,
    pub n: Option<usize>,
    pub k0: Option<[f64; 3]>,
    pub alpha: Option<[f64; 3]>,
    pub beta: Option<[f64; 3]>,
    pub suite: Option<String>,
    pub manifold: Option<String>,
    pub envelope: Option<String>,
    pub mass: Option<f64>,
    pub mu: Option<i64>,
    pub points: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved parameters of one run. Output paths are kept out of it so
/// that the hash only depends on what determines the numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub samples: usize,
    pub tol: Option<f64>,
    pub quadrature: QuadratureSpec,
    pub mc_samples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
}

impl RunConfig {
    fn new(
        command: &str,
        file: &ConfigFile,
        seed: Option<u64>,
        tol: Option<f64>,
    ) -> CliResult<Self> {
        let d = VerifyConfig::default();
        let tol = tol.or(file.tol);
        if let Some(t) = tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!(
                    "tolerance must be positive, got {t}"
                )));
            }
        }
        let mut quadrature = d.quadrature;
        quadrature.radial_nodes = file.radial_nodes.unwrap_or(quadrature.radial_nodes);
        quadrature.angular_nodes = file.angular_nodes.unwrap_or(quadrature.angular_nodes);
        quadrature.truncation = file.truncation.or(quadrature.truncation);
        Ok(Self {
            command: command.into(),
            seed: seed.or(file.seed).unwrap_or(d.seed),
            samples: file.samples.unwrap_or(d.samples),
            tol,
            quadrature,
            mc_samples: file.mc_samples.unwrap_or(d.mc_samples),
            params: None,
        })
    }

    fn apply_quad(&mut self, q: &QuadArgs) -> CliResult<()> {
        if let Some(n) = q.radial_nodes {
            self.quadrature.radial_nodes = n;
        }
        if let Some(n) = q.angular_nodes {
            self.quadrature.angular_nodes = n;
        }
        self.quadrature.validate()?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON of the config plus the library version.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(VERSION.as_bytes());
        h.update(b"\n");
        h.update(
            serde_json::to_string(self)
                .expect("config serializes")
                .as_bytes(),
        );
        format!("{:x}", h.finalize())
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            seed: self.seed,
            samples: self.samples,
            tol: self.tol,
            quadrature: self.quadrature,
            mc_samples: self.mc_samples,
            ..VerifyConfig::default()
        }
    }
}

/// What every JSON output carries around its payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stamped<T> {
    pub version: String,
    pub config_hash: String,
    pub config: RunConfig,
    #[serde(flatten)]
    pub body: T,
}

fn wrap<T>(cfg: &RunConfig, body: T) -> Stamped<T> {
    Stamped {
        version: VERSION.into(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        body,
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    pub geometry: String,
    pub dimension: usize,
    pub casimirs: CasimirValues,
    pub stabilizer_generators: Vec<String>,
    pub stabilizer_spans: bool,
}

pub fn classify_report(x: &DualElement) -> ClassReport {
    let class = classify_coadjoint(x);
    let stab = stabilizer_probe(x);
    ClassReport {
        geometry: class.label(),
        dimension: class.dimension,
        casimirs: class.casimirs,
        stabilizer_generators: stab.labels().into_iter().map(String::from).collect(),
        stabilizer_spans: stab.spans_kernel,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub kind: String,
    pub rows: usize,
    pub csv: String,
    pub class: ClassReport,
    /// Largest deviation of the invariants along the sample.
    pub max_invariant_drift: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityOutput {
    pub report: AdmissibilityReport,
    /// Plain-language verdict on whether the constant is independent of k.
    pub constancy: String,
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn emit<T: Serialize>(out: Option<&Path>, v: &T) -> CliResult<()> {
    let text = to_json(v);
    match out {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn cmd_sample(a: SampleArgs, file: &ConfigFile) -> CliResult<i32> {
    let n =
        a.n.or(file.n)
            .ok_or_else(|| CliError::Usage("--n is required".into()))?;
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let out = a
        .out
        .or_else(|| file.out.clone())
        .ok_or_else(|| CliError::Usage("--out is required".into()))?;
    let coadjoint = a.coadjoint || (!a.repgen && (a.alpha.is_some() || a.beta.is_some()));
    let mut cfg = RunConfig::new("sample", file, a.seed, None)?;
    let mut csv = String::new();
    let sidecar;
    if coadjoint {
        let alpha = a.alpha.or(file.alpha).unwrap_or([0.0; 3]);
        let beta = a.beta.or(file.beta).unwrap_or([0.0; 3]);
        let x = DualElement::new(RowVec3::from(alpha), RowVec3::from(beta));
        cfg.params =
            Some(serde_json::json!({ "kind": "coadjoint", "n": n, "alpha": alpha, "beta": beta }));
        let s = sample_coadjoint_orbit(&x, n, cfg.seed);
        let c0 = crate::coadjoint::casimirs(&x);
        let mut drift: f64 = 0.0;
        writeln!(csv, "# poincare21 {VERSION} config={}", cfg.hash()).unwrap();
        csv.push_str("x0,x1,x2,a0,a1,a2\n");
        for p in &s.points {
            let c = crate::coadjoint::casimirs(p);
            drift = drift.max((c.i1 - c0.i1).abs()).max((c.i2 - c0.i2).abs());
            let row: Vec<String> = p
                .alpha_star
                .iter()
                .chain(&p.beta_star)
                .map(|v| fmt_f64(*v))
                .collect();
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        sidecar = SampleSidecar {
            kind: "coadjoint".into(),
            rows: n,
            csv: out.display().to_string(),
            class: classify_report(&x),
            max_invariant_drift: drift,
        };
    } else {
        let k0 =
            a.k0.or(file.k0)
                .ok_or_else(|| CliError::Usage("--k0 is required for --repgen".into()))?;
        let k0 = RowVec3::from(k0);
        cfg.params =
            Some(serde_json::json!({ "kind": "repgen", "n": n, "k0": [k0[0], k0[1], k0[2]] }));
        let s = sample_repgen_orbit(&k0, n, cfg.seed);
        let c0 = minkowski_dot(&k0, &k0);
        let mut drift: f64 = 0.0;
        writeln!(csv, "# poincare21 {VERSION} config={}", cfg.hash()).unwrap();
        csv.push_str("x0,x1,x2\n");
        for p in &s.points {
            drift = drift.max((minkowski_dot(p, p) - c0).abs());
            let row: Vec<String> = p.iter().map(|v| fmt_f64(*v)).collect();
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        let class = classify_momentum(&k0);
        sidecar = SampleSidecar {
            kind: "repgen".into(),
            rows: n,
            csv: out.display().to_string(),
            class: ClassReport {
                geometry: class.label().into(),
                dimension: momentum_orbit_dimension(&k0),
                casimirs: CasimirValues {
                    i1: c0,
                    i2: 0.0,
                    i3: None,
                },
                stabilizer_generators: Vec::new(),
                stabilizer_spans: false,
            },
            max_invariant_drift: drift,
        };
    }
    write_file(&out, &csv)?;
    write_file(&sidecar_path(&out), &to_json(&wrap(&cfg, sidecar)))?;
    Ok(EXIT_OK)
}

fn cmd_classify(a: ClassifyArgs, file: &ConfigFile) -> CliResult<i32> {
    let x = match (a.x, a.alpha.or(file.alpha), a.beta.or(file.beta)) {
        (Some(v), _, _) => DualElement::new(
            RowVec3::new(v[0], v[1], v[2]),
            RowVec3::new(v[3], v[4], v[5]),
        ),
        (None, Some(al), Some(be)) => DualElement::new(RowVec3::from(al), RowVec3::from(be)),
        _ => {
            return Err(CliError::Usage(
                "give six components or both --alpha and --beta".into(),
            ))
        }
    };
    let mut cfg = RunConfig::new("classify", file, None, None)?;
    cfg.params = Some(serde_json::json!({ "alpha": x.alpha_star, "beta": x.beta_star }));
    emit(
        a.out.or_else(|| file.out.clone()).as_deref(),
        &wrap(&cfg, classify_report(&x)),
    )?;
    Ok(EXIT_OK)
}

pub fn parse_suites(s: &str) -> CliResult<Vec<Suite>> {
    if s == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        Ok(vec![s.parse::<Suite>()?])
    }
}

fn cmd_verify(a: VerifyArgs, file: &ConfigFile) -> CliResult<i32> {
    let name = a
        .suite
        .or_else(|| file.suite.clone())
        .unwrap_or_else(|| "all".into());
    let suites = parse_suites(&name)?;
    let mut cfg = RunConfig::new("verify", file, a.seed, a.tol)?;
    if let Some(n) = a.samples {
        cfg.samples = n;
    }
    if let Some(n) = a.mc_samples {
        cfg.mc_samples = n;
    }
    if cfg.samples == 0 || cfg.mc_samples == 0 {
        return Err(CliError::Usage("sample counts must be positive".into()));
    }
    cfg.apply_quad(&a.quad)?;
    cfg.params = Some(serde_json::json!({ "suite": name }));
    let vc = cfg.verify_config();
    let reports = suites
        .into_iter()
        .map(|s| run_suite(s, &vc))
        .collect::<crate::Result<Vec<_>>>()?;
    let passed = reports.iter().all(SuiteReport::passed);
    emit(
        a.out.or_else(|| file.out.clone()).as_deref(),
        &wrap(
            &cfg,
            VerifyOutput {
                passed,
                suites: reports,
            },
        ),
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_admissibility(a: AdmissibilityArgs, file: &ConfigFile) -> CliResult<i32> {
    let manifold = a
        .manifold
        .or_else(|| file.manifold.clone())
        .unwrap_or_else(|| "hyperboloid".into());
    let mut cfg = RunConfig::new("admissibility", file, None, a.tol)?;
    cfg.apply_quad(&a.quad)?;
    let tol = cfg.tol.unwrap_or(1e-2);
    let envelope = a.envelope.or_else(|| file.envelope.clone());
    let report = match manifold.as_str() {
        "hyperboloid" => {
            let m = a.mass.or(file.mass).unwrap_or(1.0);
            let man = Manifold::hyperboloid(m)?;
            let env: Envelope = match &envelope {
                Some(s) => s.parse()?,
                None => Envelope::default_for(&man),
            };
            let points = a.points.or(file.points).unwrap_or(10);
            cfg.params = Some(
                serde_json::json!({ "manifold": manifold, "mass": m, "envelope": env.id(), "points": points }),
            );
            admissibility_report_hyp(
                &env,
                m,
                &hyperboloid_k_grid(m, points, 1.5),
                &cfg.quadrature,
                tol,
            )?
        }
        "cone" => {
            let mu = a.mu.or(file.mu).unwrap_or(1);
            let env: Envelope = match &envelope {
                Some(s) => s.parse()?,
                None => Envelope::default_for(&Manifold::ConeUpper),
            };
            let points = a.points.or(file.points).unwrap_or(7);
            cfg.params = Some(
                serde_json::json!({ "manifold": manifold, "mu": mu, "envelope": env.id(), "points": points }),
            );
            admissibility_report_cone(
                &env,
                mu,
                &cone_k_grid(0.5, 2.0, points),
                &cfg.quadrature,
                tol,
            )?
        }
        other => return Err(CliError::Usage(format!("unknown manifold {other:?}"))),
    };
    let constancy = match (report.constant_in_k, report.fitted_exponent) {
        (true, _) => format!("constant in k to within {tol}"),
        (false, Some(e)) => format!(
            "not constant in k: A scales like k0^{e:.4} (R^2 = {:.6})",
            report.r_squared.unwrap_or(f64::NAN)
        ),
        (false, None) => format!("not constant in k: spread {:.3e}", report.spread),
    };
    emit(
        a.out.or_else(|| file.out.clone()).as_deref(),
        &wrap(&cfg, AdmissibilityOutput { report, constancy }),
    )?;
    Ok(EXIT_OK)
}

/// Builds the global rayon pool from [`THREADS_ENV`] when it is set.
pub fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got {v:?}"
        ))
    })?;
    // a pool that already exists is fine: results do not depend on the worker count
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

pub fn execute(cli: Cli) -> CliResult<i32> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Sample(a) => cmd_sample(a, &file),
        Command::Classify(a) => cmd_classify(a, &file),
        Command::Verify(a) => cmd_verify(a, &file),
        Command::Admissibility(a) => cmd_admissibility(a, &file),
    }
}

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match init_threads().and_then(|_| execute(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("poincare21: {e}");
            e.exit_code()
        }
    }
}
