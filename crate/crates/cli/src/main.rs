//! `frobenius` — deterministic command-line reports over the toolkit.
//!
//! One report per process, printed to stdout.  The exit status is 0
//! exactly when the report is clean: a recorded violation or a
//! computation error exits 1, unusable input (missing files, malformed
//! flags) exits 2.  The same inputs and seed always produce
//! byte-identical JSON.
//!
//! The default tolerance is 1e-8; override with `FROBENIUS_TOL` or
//! `--tol`.  Checks resting on central differences (Euler fields,
//! direct-sum η-Jacobians) are gated no tighter than 1e-6, the
//! discretization floor of the second-order stencils.

mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use frobenius_core::algfile::algebra_from_text;
use frobenius_core::catalog;
use frobenius_core::dgbv::{
    check_dgbv, conditions_check, identity_suite, integral_check, DGBVAlgebra,
};
use frobenius_core::germ::{
    compare_germs, germ_from_text, germ_to_text, tensor, SemisimpleGerm,
};
use frobenius_core::mc::{
    cubic_directional_check, euler_check, flatness_check, metric, potential, solve_master,
    wdvv_check, FormalBase,
};
use frobenius_core::qc::{p2_generate, CorrelatorKey};
use frobenius_core::saito::{
    critical_data, direct_sum_verify, eta_jacobian_from_critical, euler_checks,
    flat_coordinates, special_v_matrix, verify_special_point, AnChart,
};
use frobenius_core::scalar::{rat_to_string, C64};
use frobenius_core::spectrum::{
    an_profile, betti, betti_bruteforce, gepner_total, integrality, poincare_check,
    tensor_profile,
};
use report::{
    c64_list, c64_value, check_value, cmatrix_value, count_value, f64_value, qmatrix_value,
    rat_list, rat_value, series_value, Report,
};
use serde_json::{Map, Value};

/// Central-difference checks cannot be verified tighter than this.
const FD_FLOOR: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "frobenius",
    version,
    about = "Frobenius-manifold constructions: spectra, A_n unfoldings, dGBV pipelines",
    long_about = None
)]
struct Cli {
    /// Numeric tolerance (default: FROBENIUS_TOL env var, else 1e-8)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for all randomized sampling; fully determines it
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Truncation order for formal power-series computations
    #[arg(long, global = true, default_value_t = 6)]
    order: usize,
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Resolved per-run settings shared by every subcommand.
struct RunConfig {
    tol: f64,
    seed: u64,
    order: usize,
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectrum, integrality, and Betti numbers of ⊗_k A_{n_k−1}
    Spectrum {
        /// Comma-separated ranks n_1,n_2,…  (profile of A_{n_k−1} models)
        #[arg(long, value_delimiter = ',', required = true)]
        an: Vec<usize>,
        /// Exit nonzero unless the spectrum satisfies the integrality test
        #[arg(long)]
        require_integral: bool,
        /// Cross-check the generating-function Betti counts against brute-force
        /// enumeration (needs ∏ n_k ≤ 10⁶)
        #[arg(long)]
        brute: bool,
    },
    /// Numeric A_n chart: critical data, η-Jacobian, special-point forms
    An {
        /// Number of unfolding coordinates (the singularity is A_n)
        n: usize,
        /// Chart coefficients a_1,…,a_n (real)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<f64>,
        /// Compute the special-point (u, η, v) data
        #[arg(long)]
        special: bool,
        /// Compare the numeric chain against the closed forms (chart must be
        /// (0,…,0,a_{n−1},a_n))
        #[arg(long)]
        verify_closed_form: bool,
        /// Flat coordinates by series inversion
        #[arg(long)]
        flat: bool,
        /// Euler-field checks by central differences
        #[arg(long)]
        euler: bool,
        /// Write the chart's semisimple germ (u, η, v) to a file
        #[arg(long, value_name = "FILE")]
        emit_germ: Option<PathBuf>,
    },
    /// Tensor product of two semisimple germ files
    Tensor {
        /// First germ file
        a: PathBuf,
        /// Second germ file
        b: PathBuf,
        /// Write the product germ to a file
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Compare the product against another germ file up to relabeling
        #[arg(long, value_name = "FILE")]
        compare: Option<PathBuf>,
    },
    /// Direct-sum framework verification for two A_n charts
    SumVerify {
        /// Rank of the first chart
        #[arg(long)]
        n_a: usize,
        /// Coefficients of the first chart
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs_a: Vec<f64>,
        /// Rank of the second chart
        #[arg(long)]
        n_b: usize,
        /// Coefficients of the second chart
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs_b: Vec<f64>,
        /// Write the direct-sum germ to a file
        #[arg(long, value_name = "FILE")]
        emit_germ: Option<PathBuf>,
        /// Compare the direct-sum germ against a germ file up to relabeling
        #[arg(long, value_name = "FILE")]
        compare: Option<PathBuf>,
    },
    /// dGBV algebra pipelines (axioms, δΔ-conditions, master equation)
    Dgbv {
        #[command(subcommand)]
        sub: DgbvCmd,
    },
    /// Rank-3 qc-type generator for the projective plane
    P2 {
        /// Largest curve degree to solve for
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Audit the divisor identity on the extended n ≤ 2 table
        #[arg(long)]
        audit_divisor: bool,
        /// Restrict to the integral spectrum block and re-verify
        #[arg(long)]
        hm: bool,
    },
}

/// Algebra arguments accept a file path (`catalog/p2-trivial.alg`, the
/// `.alg` suffix optional) or a built-in catalog name (`p2-trivial`).
#[derive(Subcommand)]
enum DgbvCmd {
    /// Axiom suite: exact identities plus seeded random sampling
    Check {
        algebra: String,
        /// Random element triples per identity
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// δΔ-conditions (A), (B), (C) with canonical homology bases;
    /// exits nonzero when (A) ∧ (B) fails
    Conditions { algebra: String },
    /// Solve the master equation to the truncation order and verify Γ
    Solve {
        algebra: String,
        /// Also verify flatness of the twisted differential mod exact terms
        #[arg(long)]
        flatness: bool,
    },
    /// Potential Φ with metric, Euler data, cubic identity, and WDVV residual
    Potential { algebra: String },
    /// WDVV residual report alone
    Wdvv { algebra: String },
}

/// Input problems exit 2 (stderr); math failures exit 1 (error report).
enum CmdError {
    Input(String),
    Math(String),
}

impl CmdError {
    fn math(e: impl std::fmt::Display) -> Self {
        CmdError::Math(format!("{e}"))
    }
}

type Body = Map<String, Value>;

struct Outcome {
    ok: bool,
    body: Body,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = cli.tol.unwrap_or_else(default_tol);
    let cfg = RunConfig {
        tol,
        seed: cli.seed,
        order: cli.order,
        format: cli.format,
    };
    let name = command_name(&cli.cmd);
    let result = run(&cfg, &cli.cmd);
    match result {
        Ok(out) => {
            emit(&cfg, Report::new(name, out.ok, out.body));
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CmdError::Math(msg)) => {
            let mut body = Body::new();
            body.insert("error".into(), Value::from(msg));
            emit(&cfg, Report::new(name, false, body));
            ExitCode::from(1)
        }
        Err(CmdError::Input(msg)) => {
            eprintln!("frobenius: {msg}");
            ExitCode::from(2)
        }
    }
}

fn default_tol() -> f64 {
    std::env::var("FROBENIUS_TOL")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(1e-8)
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Spectrum { .. } => "spectrum",
        Cmd::An { .. } => "an",
        Cmd::Tensor { .. } => "tensor",
        Cmd::SumVerify { .. } => "sum-verify",
        Cmd::Dgbv { sub } => match sub {
            DgbvCmd::Check { .. } => "dgbv check",
            DgbvCmd::Conditions { .. } => "dgbv conditions",
            DgbvCmd::Solve { .. } => "dgbv solve",
            DgbvCmd::Potential { .. } => "dgbv potential",
            DgbvCmd::Wdvv { .. } => "dgbv wdvv",
        },
        Cmd::P2 { .. } => "p2",
    }
}

fn emit(cfg: &RunConfig, report: Report) {
    let text = match cfg.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    print!("{text}");
}

fn run(cfg: &RunConfig, cmd: &Cmd) -> Result<Outcome, CmdError> {
    match cmd {
        Cmd::Spectrum {
            an,
            require_integral,
            brute,
        } => cmd_spectrum(an, *require_integral, *brute),
        Cmd::An {
            n,
            coeffs,
            special,
            verify_closed_form,
            flat,
            euler,
            emit_germ,
        } => cmd_an(
            cfg,
            *n,
            coeffs,
            *special,
            *verify_closed_form,
            *flat,
            *euler,
            emit_germ.as_deref(),
        ),
        Cmd::Tensor {
            a,
            b,
            out,
            compare,
        } => cmd_tensor(cfg, a, b, out.as_deref(), compare.as_deref()),
        Cmd::SumVerify {
            n_a,
            coeffs_a,
            n_b,
            coeffs_b,
            emit_germ,
            compare,
        } => cmd_sum_verify(
            cfg,
            *n_a,
            coeffs_a,
            *n_b,
            coeffs_b,
            emit_germ.as_deref(),
            compare.as_deref(),
        ),
        Cmd::Dgbv { sub } => cmd_dgbv(cfg, sub),
        Cmd::P2 {
            degree,
            audit_divisor,
            hm,
        } => cmd_p2(cfg, *degree, *audit_divisor, *hm),
    }
}

// ---------------------------------------------------------------- spectrum

fn cmd_spectrum(ns: &[usize], require_integral: bool, brute: bool) -> Result<Outcome, CmdError> {
    let (d, integral) = integrality(ns).map_err(CmdError::math)?;
    let h = betti(ns).map_err(CmdError::math)?;
    let mut prof = an_profile(ns[0]).map_err(CmdError::math)?;
    for &n in &ns[1..] {
        let p = an_profile(n).map_err(CmdError::math)?;
        prof = tensor_profile(&prof, &p);
    }

    let mut body = Body::new();
    let mut violations: Vec<String> = Vec::new();
    body.insert(
        "an".into(),
        Value::Array(ns.iter().map(|&n| Value::from(n as u64)).collect()),
    );
    body.insert("d".into(), rat_value(&d));
    body.insert("integral".into(), Value::Bool(integral));
    body.insert(
        "betti".into(),
        Value::Array(h.iter().map(|&b| count_value(b)).collect()),
    );
    body.insert("poincare_symmetric".into(), Value::Bool(poincare_check(&h)));
    body.insert(
        "total_multiplicity".into(),
        count_value(prof.total_multiplicity()),
    );
    body.insert("gepner_total".into(), count_value(gepner_total(ns)));
    body.insert("duality".into(), Value::Bool(prof.duality_check()));
    body.insert(
        "profile".into(),
        Value::Array(
            prof.entries
                .iter()
                .map(|(alpha, mult)| {
                    Value::Array(vec![rat_value(alpha), count_value(*mult)])
                })
                .collect(),
        ),
    );

    if brute {
        let product: u128 = ns.iter().map(|&n| n as u128).product();
        if product > 1_000_000 {
            return Err(CmdError::Input(format!(
                "brute-force cross-check needs ∏ n_k ≤ 10⁶, got {product}"
            )));
        }
        let hb = betti_bruteforce(ns).map_err(CmdError::math)?;
        let agrees = h == hb;
        body.insert("brute_agrees".into(), Value::Bool(agrees));
        if !agrees {
            violations.push(format!(
                "generating-function Betti {h:?} differ from brute-force {hb:?}"
            ));
        }
    }
    if require_integral && !integral {
        violations.push(format!(
            "spectrum is not integral: d = {}",
            rat_to_string(&d)
        ));
    }

    Ok(finish(body, violations))
}

// ---------------------------------------------------------------- an

#[allow(clippy::too_many_arguments)]
fn cmd_an(
    cfg: &RunConfig,
    n: usize,
    coeffs: &[f64],
    special: bool,
    verify_closed: bool,
    flat: bool,
    euler: bool,
    emit_germ: Option<&Path>,
) -> Result<Outcome, CmdError> {
    let a: Vec<C64> = coeffs.iter().map(|&x| C64::new(x, 0.0)).collect();
    let chart = AnChart::new(n, a).map_err(|e| CmdError::Input(format!("{e}")))?;
    let cd = critical_data(&chart, cfg.tol).map_err(CmdError::math)?;

    let mut body = Body::new();
    let mut violations: Vec<String> = Vec::new();
    body.insert("n".into(), Value::from(n as u64));
    body.insert(
        "coeffs".into(),
        Value::Array(coeffs.iter().map(|&x| f64_value(x)).collect()),
    );
    body.insert("tame".into(), Value::Bool(cd.tame));
    body.insert("u".into(), c64_list(&cd.u));
    body.insert("eta".into(), c64_list(&cd.eta));
    body.insert("sum_eta".into(), c64_value(cd.sum_eta()));

    if !cd.tame {
        violations.push("chart is not tame: critical points collide or critical values coincide".into());
        if special || verify_closed || euler || emit_germ.is_some() {
            return Err(CmdError::Math(
                "chart is not tame; (u, η, v) data is undefined here".into(),
            ));
        }
    }

    if special {
        let ej = eta_jacobian_from_critical(&cd).map_err(CmdError::math)?;
        let v = special_v_matrix(&cd, &ej);
        let sym = ej.symmetry_residual();
        let mut m = Body::new();
        m.insert("eta_jacobian".into(), cmatrix_value(&ej.mat));
        m.insert("symmetry_residual".into(), f64_value(sym));
        m.insert("v".into(), cmatrix_value(&v));
        body.insert("special".into(), Value::Object(m));
        if sym > cfg.tol {
            violations.push(format!(
                "η-Jacobian symmetry residual {sym:e} exceeds tolerance {:e}",
                cfg.tol
            ));
        }
    }

    if verify_closed {
        if n < 2 || coeffs[..n.saturating_sub(2)].iter().any(|&x| x != 0.0) {
            return Err(CmdError::Input(
                "closed forms are defined at charts (0,…,0,a_{n−1},a_n); lower coefficients must vanish"
                    .into(),
            ));
        }
        let rep = verify_special_point(
            n,
            C64::new(coeffs[n - 2], 0.0),
            C64::new(coeffs[n - 1], 0.0),
            cfg.tol,
        )
        .map_err(CmdError::math)?;
        let mut m = Body::new();
        m.insert("u_dev".into(), f64_value(rep.u_dev));
        m.insert("eta_dev".into(), f64_value(rep.eta_dev));
        m.insert("v_dev".into(), f64_value(rep.v_dev));
        m.insert("max_dev".into(), f64_value(rep.max_dev));
        m.insert(
            "permutation".into(),
            Value::Array(rep.permutation.iter().map(|&p| Value::from(p as u64)).collect()),
        );
        body.insert("closed_form".into(), Value::Object(m));
        if rep.max_dev > cfg.tol {
            violations.push(format!(
                "closed-form deviation {:e} exceeds tolerance {:e}",
                rep.max_dev, cfg.tol
            ));
        }
    }

    if flat {
        let xs = flat_coordinates(&chart, cfg.order);
        body.insert("flat".into(), c64_list(&xs));
    }

    if euler {
        let rep = euler_checks(&chart, cfg.tol).map_err(CmdError::math)?;
        let gate = cfg.tol.max(FD_FLOOR);
        let mut m = Body::new();
        m.insert("flat_eigen_dev".into(), f64_value(rep.flat_eigen_dev));
        m.insert("e_eta_dev".into(), f64_value(rep.e_eta_dev));
        m.insert("euler_eta_dev".into(), f64_value(rep.euler_eta_dev));
        m.insert("conformal_weight".into(), f64_value(rep.d_big));
        m.insert("max_dev".into(), f64_value(rep.max_dev));
        body.insert("euler".into(), Value::Object(m));
        if rep.max_dev > gate {
            violations.push(format!(
                "Euler-field deviation {:e} exceeds {gate:e}",
                rep.max_dev
            ));
        }
    }

    if let Some(path) = emit_germ {
        let ej = eta_jacobian_from_critical(&cd).map_err(CmdError::math)?;
        let v = special_v_matrix(&cd, &ej);
        let germ = SemisimpleGerm::new(cd.u.clone(), cd.eta.clone(), v).map_err(CmdError::math)?;
        fs::write(path, germ_to_text(&germ))
            .map_err(|e| CmdError::Input(format!("cannot write {}: {e}", path.display())))?;
        body.insert("germ_written".into(), Value::from(path.display().to_string()));
    }

    Ok(finish(body, violations))
}

// ---------------------------------------------------------------- germs

fn read_germ(path: &Path) -> Result<SemisimpleGerm, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))?;
    germ_from_text(&text).map_err(|e| CmdError::Input(format!("{}: {e}", path.display())))
}

fn germ_summary(g: &SemisimpleGerm) -> Value {
    let mut m = Body::new();
    m.insert("size".into(), Value::from(g.size() as u64));
    m.insert("u".into(), c64_list(g.u()));
    m.insert("min_u_gap".into(), f64_value(g.min_u_gap()));
    m.insert(
        "reciprocity_residual".into(),
        f64_value(g.reciprocity_residual()),
    );
    Value::Object(m)
}

fn compare_against(
    germ: &SemisimpleGerm,
    path: &Path,
    tol: f64,
    violations: &mut Vec<String>,
) -> Result<Value, CmdError> {
    let other = read_germ(path)?;
    let m = compare_germs(germ, &other, tol).map_err(CmdError::math)?;
    let mut obj = Body::new();
    obj.insert("file".into(), Value::from(path.display().to_string()));
    obj.insert("isomorphic".into(), Value::Bool(m.isomorphic));
    obj.insert("max_dev".into(), f64_value(m.max_dev));
    if let Some(p) = &m.permutation {
        obj.insert(
            "permutation".into(),
            Value::Array(p.iter().map(|&i| Value::from(i as u64)).collect()),
        );
    }
    if !m.isomorphic {
        violations.push(format!(
            "germ does not match {} within {tol:e} (best deviation {:e})",
            path.display(),
            m.max_dev
        ));
    }
    Ok(Value::Object(obj))
}

fn cmd_tensor(
    cfg: &RunConfig,
    a: &Path,
    b: &Path,
    out: Option<&Path>,
    compare: Option<&Path>,
) -> Result<Outcome, CmdError> {
    let ga = read_germ(a)?;
    let gb = read_germ(b)?;
    let gt = tensor(&ga, &gb, cfg.tol).map_err(CmdError::math)?;

    let mut body = Body::new();
    let mut violations = Vec::new();
    body.insert("factor_sizes".into(), {
        Value::Array(vec![
            Value::from(ga.size() as u64),
            Value::from(gb.size() as u64),
        ])
    });
    body.insert("product".into(), germ_summary(&gt));
    if let Some(path) = out {
        fs::write(path, germ_to_text(&gt))
            .map_err(|e| CmdError::Input(format!("cannot write {}: {e}", path.display())))?;
        body.insert("germ_written".into(), Value::from(path.display().to_string()));
    }
    if let Some(path) = compare {
        let v = compare_against(&gt, path, cfg.tol, &mut violations)?;
        body.insert("compare".into(), v);
    }
    Ok(finish(body, violations))
}

fn cmd_sum_verify(
    cfg: &RunConfig,
    n_a: usize,
    coeffs_a: &[f64],
    n_b: usize,
    coeffs_b: &[f64],
    emit_germ: Option<&Path>,
    compare: Option<&Path>,
) -> Result<Outcome, CmdError> {
    let chart = |n: usize, cs: &[f64]| -> Result<AnChart, CmdError> {
        let a: Vec<C64> = cs.iter().map(|&x| C64::new(x, 0.0)).collect();
        AnChart::new(n, a).map_err(|e| CmdError::Input(format!("{e}")))
    };
    let ca = chart(n_a, coeffs_a)?;
    let cb = chart(n_b, coeffs_b)?;
    let rep = direct_sum_verify(&ca, &cb, cfg.tol).map_err(CmdError::math)?;
    let gate = cfg.tol.max(FD_FLOOR);

    let mut body = Body::new();
    let mut violations = Vec::new();
    body.insert("u_dev".into(), f64_value(rep.u_dev));
    body.insert("eta_dev".into(), f64_value(rep.eta_dev));
    body.insert("eta_jac_dev".into(), f64_value(rep.eta_jac_dev));
    body.insert("block_zero_dev".into(), f64_value(rep.block_zero_dev));
    body.insert("max_dev".into(), f64_value(rep.max_dev));
    body.insert("germ".into(), germ_summary(&rep.germ));
    if rep.max_dev > gate {
        violations.push(format!(
            "direct-sum deviation {:e} exceeds {gate:e}",
            rep.max_dev
        ));
    }
    if let Some(path) = emit_germ {
        fs::write(path, germ_to_text(&rep.germ))
            .map_err(|e| CmdError::Input(format!("cannot write {}: {e}", path.display())))?;
        body.insert("germ_written".into(), Value::from(path.display().to_string()));
    }
    if let Some(path) = compare {
        let v = compare_against(&rep.germ, path, gate, &mut violations)?;
        body.insert("compare".into(), v);
    }
    Ok(finish(body, violations))
}

// ---------------------------------------------------------------- dgbv

fn load_algebra(spec: &str) -> Result<(DGBVAlgebra, String), CmdError> {
    let path = Path::new(spec);
    let mut candidates = vec![path.to_path_buf()];
    if path.extension().is_none() {
        candidates.push(path.with_extension("alg"));
    }
    for c in &candidates {
        if c.is_file() {
            let text = fs::read_to_string(c)
                .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", c.display())))?;
            let alg = algebra_from_text(&text)
                .map_err(|e| CmdError::Input(format!("{}: {e}", c.display())))?;
            return Ok((alg, c.display().to_string()));
        }
    }
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(spec);
    if let Some(alg) = catalog::by_name(stem) {
        return Ok((alg, format!("catalog:{stem}")));
    }
    Err(CmdError::Input(format!(
        "no algebra file or catalog entry named '{spec}'"
    )))
}

fn cmd_dgbv(cfg: &RunConfig, sub: &DgbvCmd) -> Result<Outcome, CmdError> {
    match sub {
        DgbvCmd::Check { algebra, samples } => {
            let (d, label) = load_algebra(algebra)?;
            let mut rep = check_dgbv(&d);
            rep.merge(integral_check(&d));
            rep.merge(identity_suite(&d, *samples, cfg.seed));
            let mut body = Body::new();
            body.insert("algebra".into(), Value::from(label));
            body.insert("dim".into(), Value::from(d.dim() as u64));
            body.insert("samples".into(), Value::from(*samples as u64));
            body.insert("seed".into(), Value::from(cfg.seed));
            body.insert("report".into(), check_value(&rep));
            Ok(finish(body, rep.violations))
        }
        DgbvCmd::Conditions { algebra } => {
            let (d, label) = load_algebra(algebra)?;
            let cr = conditions_check(&d).map_err(CmdError::math)?;
            let mut body = Body::new();
            let mut violations = Vec::new();
            body.insert("algebra".into(), Value::from(label));
            body.insert("condition_a".into(), Value::Bool(cr.condition_a));
            body.insert("condition_b".into(), Value::Bool(cr.condition_b));
            body.insert("condition_c".into(), Value::Bool(cr.condition_c));
            body.insert("homology_dims".into(), {
                let (x, y, z) = cr.homology_dims;
                Value::Array(vec![
                    Value::from(x as u64),
                    Value::from(y as u64),
                    Value::from(z as u64),
                ])
            });
            body.insert(
                "representatives".into(),
                Value::Array(cr.representatives.iter().map(|v| rat_list(v)).collect()),
            );
            for (name, okc) in [("A", cr.condition_a), ("B", cr.condition_b)] {
                if !okc {
                    violations.push(format!("δΔ-condition ({name}) fails"));
                }
            }
            Ok(finish(body, violations))
        }
        DgbvCmd::Solve { algebra, flatness } => {
            let (d, label) = load_algebra(algebra)?;
            let base = FormalBase::new(&d, cfg.order).map_err(CmdError::math)?;
            let sol = solve_master(&d, &base).map_err(CmdError::math)?;
            let ver = sol.verify(&d);
            let mut body = Body::new();
            let mut violations = ver.violations.clone();
            body.insert("algebra".into(), Value::from(label));
            body.insert("order".into(), Value::from(cfg.order as u64));
            body.insert("rank".into(), Value::from(base.rank() as u64));
            body.insert(
                "gamma_terms_per_degree".into(),
                Value::Array(
                    sol.per_degree
                        .iter()
                        .map(|g| Value::from(g.terms().count() as u64))
                        .collect(),
                ),
            );
            body.insert("verify".into(), check_value(&ver));
            if *flatness {
                let fl = flatness_check(&d, &sol, cfg.order).map_err(CmdError::math)?;
                violations.extend(fl.violations.iter().cloned());
                body.insert("flatness".into(), check_value(&fl));
            }
            Ok(finish(body, violations))
        }
        DgbvCmd::Potential { algebra } => {
            let (d, label) = load_algebra(algebra)?;
            let base = FormalBase::new(&d, cfg.order).map_err(CmdError::math)?;
            let sol = solve_master(&d, &base).map_err(CmdError::math)?;
            let g = metric(&d, &base).map_err(CmdError::math)?;
            let phi = potential(&d, &sol).map_err(CmdError::math)?;
            let w_order = cfg.order.saturating_sub(3).max(1);
            let wd = wdvv_check(&phi, &g, w_order).map_err(CmdError::math)?;
            let cub = cubic_directional_check(&d, &sol, &phi, 20, cfg.seed).map_err(CmdError::math)?;
            let eu = euler_check(&d, &base, &phi, &g);

            let mut body = Body::new();
            let mut violations = Vec::new();
            body.insert("algebra".into(), Value::from(label));
            body.insert("order".into(), Value::from(cfg.order as u64));
            body.insert("metric".into(), qmatrix_value(&g));
            body.insert("phi".into(), series_value(&phi));
            body.insert("phi_pretty".into(), Value::from(phi.render()));
            let mut wm = Body::new();
            wm.insert("order".into(), Value::from(w_order as u64));
            wm.insert("report".into(), check_value(&wd));
            body.insert("wdvv".into(), Value::Object(wm));
            body.insert("cubic_directional".into(), check_value(&cub));
            let mut em = Body::new();
            em.insert("applicable".into(), Value::Bool(eu.applicable));
            if eu.applicable {
                em.insert("d_charges".into(), rat_list(&eu.d_charges));
                if let Some(dw) = &eu.conformal_weight {
                    em.insert("conformal_weight".into(), rat_value(dw));
                }
                em.insert("report".into(), check_value(&eu.report));
            }
            body.insert("euler".into(), Value::Object(em));

            violations.extend(wd.violations.iter().cloned());
            violations.extend(cub.violations.iter().cloned());
            if eu.applicable {
                violations.extend(eu.report.violations.iter().cloned());
            }
            Ok(finish(body, violations))
        }
        DgbvCmd::Wdvv { algebra } => {
            let (d, label) = load_algebra(algebra)?;
            let base = FormalBase::new(&d, cfg.order).map_err(CmdError::math)?;
            let sol = solve_master(&d, &base).map_err(CmdError::math)?;
            let g = metric(&d, &base).map_err(CmdError::math)?;
            let phi = potential(&d, &sol).map_err(CmdError::math)?;
            let w_order = cfg.order.saturating_sub(3).max(1);
            let wd = wdvv_check(&phi, &g, w_order).map_err(CmdError::math)?;
            let mut body = Body::new();
            body.insert("algebra".into(), Value::from(label));
            body.insert("order".into(), Value::from(w_order as u64));
            body.insert("phi_pretty".into(), Value::from(phi.render()));
            body.insert("report".into(), check_value(&wd));
            Ok(finish(body, wd.violations))
        }
    }
}

// ---------------------------------------------------------------- p2

fn cmd_p2(cfg: &RunConfig, degree: usize, audit_divisor: bool, hm: bool) -> Result<Outcome, CmdError> {
    let qc = p2_generate(degree).map_err(CmdError::math)?;
    let table: &BTreeMap<CorrelatorKey, _> = qc.correlators();
    let numbers: Vec<Value> = (1..=degree)
        .map(|d| {
            let key = CorrelatorKey::new(vec![d as i64], vec![2; 3 * d - 1]);
            table
                .get(&key)
                .map(rat_value)
                .unwrap_or_else(|| Value::String("?".into()))
        })
        .collect();

    let series_order = 3 * degree + 1;
    let cmp_order = (3 * degree).saturating_sub(2).max(1);
    let phi = qc.potential_series(series_order);
    let g = qc.metric();
    let wd = wdvv_check(&phi, &g, cmp_order).map_err(CmdError::math)?;
    let split = qc.split_check(series_order);
    let fourier = qc.fourier_check(series_order);

    let mut body = Body::new();
    let mut violations = Vec::new();
    body.insert("degree".into(), Value::from(degree as u64));
    body.insert("n_values".into(), Value::Array(numbers));
    body.insert("frobenius_charges".into(), rat_list(&qc.frobenius_charges()));
    body.insert("conformal_weight".into(), rat_value(&qc.conformal_weight()));
    body.insert("metric".into(), qmatrix_value(&g));
    let mut wm = Body::new();
    wm.insert("order".into(), Value::from(cmp_order as u64));
    wm.insert("report".into(), check_value(&wd));
    body.insert("wdvv".into(), Value::Object(wm));
    body.insert("split".into(), check_value(&split));
    body.insert("fourier".into(), check_value(&fourier));
    violations.extend(wd.violations.iter().cloned());
    violations.extend(split.violations.iter().cloned());
    violations.extend(fourier.violations.iter().cloned());

    if audit_divisor {
        let (ext, rep) = qc.divisor_extend().map_err(CmdError::math)?;
        let mut m = Body::new();
        m.insert("extended_entries".into(), Value::from(ext.len() as u64));
        m.insert("report".into(), check_value(&rep));
        body.insert("divisor".into(), Value::Object(m));
        violations.extend(rep.violations.iter().cloned());
    }
    if hm {
        let hr = qc.hm_restrict(cfg.order).map_err(CmdError::math)?;
        let mut m = Body::new();
        m.insert("hypothesis".into(), Value::from(format!("{:?}", hr.hypothesis)));
        m.insert(
            "kept".into(),
            Value::Array(hr.kept.iter().map(|&i| Value::from(i as u64)).collect()),
        );
        m.insert(
            "dropped".into(),
            Value::Array(hr.dropped.iter().map(|&i| Value::from(i as u64)).collect()),
        );
        m.insert("report".into(), check_value(&hr.report));
        body.insert("hm".into(), Value::Object(m));
        violations.extend(hr.report.violations.iter().cloned());
    }

    Ok(finish(body, violations))
}

// ---------------------------------------------------------------- shared

fn finish(mut body: Body, violations: Vec<String>) -> Outcome {
    let ok = violations.is_empty();
    body.insert(
        "violations".into(),
        Value::Array(violations.into_iter().map(Value::from).collect()),
    );
    Outcome { ok, body }
}
