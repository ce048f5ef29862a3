use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman::expansion::a_series;
use bergman::io::{format_rational, parse_jet, CoefficientReport, ReportFlags};
use bergman::numeric::{
    cutoff_tail, fit_slope, geometric_grid, run_residual_scaling, unit_disk_samples,
    KernelReference, ScalingConfig, SlopeFit, DEFAULT_EPSILON, RESIDUAL_FLOOR,
};
use bergman::oracle::ModelKernel;
use bergman::potential::BochnerCheck;
use bergman::solver::{
    check_degree_bound, check_parity, find_degree_violation, find_parity_violation,
    solve_coefficients, verify_reproducing,
};
use bergman::{
    BidegreePolynomial, BigRational, Error, ExactJet, ExactSeries, Monomial, MultiIndex,
};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde_json::{json, Value};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_INSUFFICIENT_JET: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "bergman",
    version,
    about = "Near-diagonal Bergman kernel expansion coefficients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for c_0..c_N and write a coefficient report.
    Expand {
        #[arg(long)]
        jet: PathBuf,
        #[arg(long)]
        order: u32,
        #[arg(long)]
        out: PathBuf,
        /// Write the report even if a validation flag is false.
        #[arg(long)]
        force: bool,
    },
    /// Run the structural and reproducing checks.
    Verify {
        #[arg(long)]
        jet: PathBuf,
        #[arg(long)]
        order: u32,
        /// Largest test monomial degree for the reproducing check.
        #[arg(long)]
        max_degree: u32,
        /// Check these coefficients instead of solving for them.
        #[arg(long)]
        coefficients: Option<PathBuf>,
    },
    /// Print curvature at the origin (0-based indices).
    Curvature {
        #[arg(long)]
        jet: PathBuf,
    },
    /// Fit the decay rate of the local expansion error over a k grid.
    Scaling {
        #[arg(long)]
        jet: PathBuf,
        #[arg(long)]
        order: u32,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long)]
        k_min: u32,
        #[arg(long)]
        k_max: u32,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Residual)]
        metric: Metric,
    },
    /// Exact model kernels.
    Oracle {
        #[command(subcommand)]
        model: OracleModel,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    /// Reproducing residual of the cut-off local kernel.
    Residual,
    /// Distance to the exact CP^1 kernel; CP^1 jets only.
    Kernel,
}

#[derive(Subcommand)]
enum OracleModel {
    /// Bergman function of O(k) on CP^1 with the Fubini-Study metric.
    Cp1 {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Dimension { .. }
            | Error::UnsupportedDimension(_)
            | Error::Validation { .. }
            | Error::NotBochner { .. }
            | Error::Parse(_) => EXIT_VALIDATION,
            Error::InsufficientJet { .. } => EXIT_INSUFFICIENT_JET,
            Error::Resource(_) => EXIT_RESOURCE,
            Error::Domain(_) => EXIT_USAGE,
            Error::InvariantViolation(_) => EXIT_CHECK_FAILED,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Expand {
            jet,
            order,
            out,
            force,
        } => expand(&jet, order, &out, force),
        Command::Verify {
            jet,
            order,
            max_degree,
            coefficients,
        } => verify(&jet, order, max_degree, coefficients.as_deref()),
        Command::Curvature { jet } => curvature(&jet),
        Command::Scaling {
            jet,
            order,
            epsilon,
            k_min,
            k_max,
            points,
            out,
            metric,
        } => scaling(&jet, order, epsilon, k_min, k_max, points, &out, metric),
        Command::Oracle {
            model: OracleModel::Cp1 { k, samples },
        } => oracle_cp1(k, samples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bergman: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_jet(path: &Path) -> Result<ExactJet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::new(
            EXIT_VALIDATION,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    Ok(parse_jet(&text, BochnerCheck::Normal)?)
}

fn write_file(path: &Path, contents: &[u8]) -> Outcome {
    fs::write(path, contents).map_err(|e| {
        Failure::new(
            EXIT_RESOURCE,
            format!("cannot write {}: {e}", path.display()),
        )
    })
}

fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("json values serialize")
    );
}

fn expand(jet_path: &Path, order: u32, out: &Path, force: bool) -> Outcome {
    let jet = load_jet(jet_path)?;
    let a = a_series(&jet, order)?;
    let c = solve_coefficients(&a, order)?;
    let flags = ReportFlags {
        parity: check_parity(&c),
        degree_bound: check_degree_bound(&c, 2),
        hermitian: c.is_hermitian(),
        reproducing_verified: verify_reproducing(&c, &a, order, 2 * order + 2)?.passed,
    };
    let report = CoefficientReport::new(&jet, &c, flags);
    let all = flags.parity && flags.degree_bound && flags.hermitian && flags.reproducing_verified;
    if !all && !force {
        return Err(Failure::new(
            EXIT_CHECK_FAILED,
            format!("validation flags {flags:?}; rerun with --force to write the report anyway"),
        ));
    }
    let mut text = report.to_json();
    text.push('\n');
    write_file(out, text.as_bytes())?;
    print_json(&json!({
        "out": out.display().to_string(),
        "jet_fingerprint": report.jet_fingerprint,
        "order": order,
        "terms": report.terms.len(),
        "flags": {
            "parity": flags.parity,
            "degree_bound": flags.degree_bound,
            "hermitian": flags.hermitian,
            "reproducing_verified": flags.reproducing_verified,
        },
    }));
    Ok(())
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Value {
    json!({ "check": name, "passed": passed, "detail": detail.into() })
}

fn violation(found: Option<(u32, Monomial)>) -> String {
    match found {
        Some((m, mono)) => format!("order {m}, monomial {mono}"),
        None => "none".into(),
    }
}

fn verify(jet_path: &Path, order: u32, max_degree: u32, coefficients: Option<&Path>) -> Outcome {
    let jet = load_jet(jet_path)?;
    let a = a_series(&jet, order)?;
    let c: ExactSeries = match coefficients {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::new(
                    EXIT_VALIDATION,
                    format!("cannot read {}: {e}", path.display()),
                )
            })?;
            let report = CoefficientReport::from_json(&text)?;
            let expected = bergman::io::jet_fingerprint(&jet);
            if report.jet_fingerprint != expected {
                return Err(Failure::new(
                    EXIT_VALIDATION,
                    format!(
                        "coefficient report belongs to jet {}, not {expected}",
                        report.jet_fingerprint
                    ),
                ));
            }
            if report.order < order {
                return Err(Failure::new(
                    EXIT_USAGE,
                    format!(
                        "coefficient report has order {}, below {order}",
                        report.order
                    ),
                ));
            }
            report.series(jet.dim())?.truncate(order)
        }
        None => solve_coefficients(&a, order)?,
    };

    let n = jet.dim();
    let mut checks = Vec::new();
    let base = *c.coeff(0) == BidegreePolynomial::one(n) && (order < 1 || c.coeff(1).is_zero());
    checks.push(check("base", base, "c_0 = 1 and c_1 = 0"));
    let pa = find_parity_violation(&a);
    let pc = find_parity_violation(&c);
    checks.push(check(
        "parity",
        pa.is_none() && pc.is_none(),
        format!("a-series: {}; c-series: {}", violation(pa), violation(pc)),
    ));
    let da = find_degree_violation(&a, 2);
    let dc = find_degree_violation(&c, 2);
    checks.push(check(
        "degree_bound",
        da.is_none() && dc.is_none(),
        format!("a-series: {}; c-series: {}", violation(da), violation(dc)),
    ));
    checks.push(check(
        "hermitian",
        c.is_hermitian(),
        "c_j^{p,q} = conj c_j^{q,p}",
    ));
    if order >= 2 && jet.max_degree() >= 4 && jet.has_pure_quartic() {
        let closed = jet.curvature_at_origin()?.c2_closed_form();
        checks.push(check(
            "c2_closed_form",
            *c.coeff(2) == closed,
            "c_2 = rho/2 - 1/4 sum Rm u^i u^k vbar^j vbar^l",
        ));
    } else {
        checks.push(json!({
            "check": "c2_closed_form",
            "passed": Value::Null,
            "detail": "skipped: needs order >= 2 and a degree-4 part of pure bidegree (2,2)",
        }));
    }
    let r = verify_reproducing(&c, &a, order, max_degree)?;
    let detail = match r.first_failure {
        Some((l, t)) => format!("fails on v^{l} at order {t} after {} checks", r.checked),
        None => format!("{} (l, t) pairs with |l| <= {max_degree}", r.checked),
    };
    checks.push(check("reproducing", r.passed, detail));

    let passed = checks.iter().all(|c| c["passed"] != json!(false));
    print_json(&json!({
        "jet_fingerprint": bergman::io::jet_fingerprint(&jet),
        "order": order,
        "max_degree": max_degree,
        "passed": passed,
        "checks": checks,
    }));
    if passed {
        Ok(())
    } else {
        let first = checks
            .iter()
            .find(|c| c["passed"] == json!(false))
            .expect("a failing check exists");
        Err(Failure::new(
            EXIT_CHECK_FAILED,
            format!("check {} failed: {}", first["check"], first["detail"]),
        ))
    }
}

fn complex_json(z: &Complex<BigRational>) -> Value {
    json!({ "re": format_rational(&z.re), "im": format_rational(&z.im) })
}

fn curvature(jet_path: &Path) -> Outcome {
    let jet = load_jet(jet_path)?;
    let data = jet.curvature_at_origin()?;
    let n = data.dim();
    let mut riemann = Vec::new();
    let mut ricci = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let r = data.ricci(i, j);
            if !num_traits_is_zero(r) {
                ricci.push(json!({ "i": i, "j": j, "value": complex_json(r) }));
            }
            for k in 0..n {
                for l in 0..n {
                    let r = data.riemann(i, j, k, l);
                    if !num_traits_is_zero(r) {
                        riemann.push(
                            json!({ "i": i, "j": j, "k": k, "l": l, "value": complex_json(r) }),
                        );
                    }
                }
            }
        }
    }
    print_json(&json!({
        "dimension": n,
        "riemann": riemann,
        "ricci": ricci,
        "scalar": complex_json(data.scalar()),
        "symmetries": data.check_symmetries(),
    }));
    Ok(())
}

fn num_traits_is_zero(z: &Complex<BigRational>) -> bool {
    *z == Complex::new(
        BigRational::from_integer(0.into()),
        BigRational::from_integer(0.into()),
    )
}

/// True iff the jet is `log(1 + |z|^2)` truncated at its own degree.
fn is_cp1_jet(jet: &ExactJet) -> bool {
    if jet.dim() != 1 {
        return false;
    }
    let terms = (1..=jet.max_degree() / 2).map(|m| {
        let sign: i64 = if m % 2 == 1 { 1 } else { -1 };
        let e = MultiIndex::new(&[m]).expect("one entry");
        (
            Monomial { holo: e, anti: e },
            Complex::new(
                BigRational::new(sign.into(), (m as i64).into()),
                BigRational::from_integer(0.into()),
            ),
        )
    });
    match BidegreePolynomial::from_terms(1, terms) {
        Ok(p) => *jet.phi() == p,
        Err(_) => false,
    }
}

#[allow(clippy::too_many_arguments)]
fn scaling(
    jet_path: &Path,
    order: u32,
    epsilon: f64,
    k_min: u32,
    k_max: u32,
    points: usize,
    out: &Path,
    metric: Metric,
) -> Outcome {
    let jet = load_jet(jet_path)?;
    let grid = geometric_grid(k_min, k_max, points)?;
    let a = a_series(&jet, order)?;
    let c = solve_coefficients(&a, order)?.to_scalar::<f64>();
    let n = jet.dim();
    let threshold = n as f64 - (order as f64 + 1.0) / 2.0 + 0.35;

    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure::new(EXIT_RESOURCE, format!("csv: {e}"));
    let pairs = match metric {
        Metric::Residual => {
            let config = ScalingConfig::standard(n, order, epsilon, grid);
            let (rows, maxima) = run_residual_scaling(&jet, &c, &config)?;
            writer
                .write_record(["k", "N", "l", "u_re", "u_im", "residual", "norm"])
                .map_err(csv_err)?;
            for r in rows {
                let join = |f: fn(&Complex<f64>) -> f64| {
                    r.u.iter()
                        .map(|z| format!("{:e}", f(z)))
                        .collect::<Vec<_>>()
                        .join(";")
                };
                writer
                    .write_record([
                        r.k.to_string(),
                        r.order.to_string(),
                        r.l.to_string(),
                        join(|z| z.re),
                        join(|z| z.im),
                        format!("{:e}", r.residual),
                        format!("{:e}", r.norm),
                    ])
                    .map_err(csv_err)?;
            }
            maxima
        }
        Metric::Kernel => {
            if !is_cp1_jet(&jet) {
                return Err(Failure::new(
                    EXIT_VALIDATION,
                    "--metric kernel compares against the exact CP^1 kernel; the jet must be log(1 + |z|^2)",
                ));
            }
            let samples = unit_disk_samples();
            writer
                .write_record([
                    "k",
                    "N",
                    "u_re",
                    "u_im",
                    "v_re",
                    "v_im",
                    "error",
                    "exact_abs",
                ])
                .map_err(csv_err)?;
            let mut maxima = Vec::new();
            for &k in &grid {
                let reference = KernelReference::cp1(k, &samples)?;
                let mut worst = 0.0f64;
                for (u, v, err, exact) in reference.pair_errors(&c, order)? {
                    worst = worst.max(err);
                    writer
                        .write_record([
                            k.to_string(),
                            order.to_string(),
                            format!("{:e}", u.re),
                            format!("{:e}", u.im),
                            format!("{:e}", v.re),
                            format!("{:e}", v.im),
                            format!("{err:e}"),
                            format!("{exact:e}"),
                        ])
                        .map_err(csv_err)?;
                }
                maxima.push((k as f64, worst));
            }
            maxima
        }
    };
    let bytes = writer
        .into_inner()
        .map_err(|e| Failure::new(EXIT_RESOURCE, format!("csv: {e}")))?;
    write_file(out, &bytes)?;

    let SlopeFit {
        slope,
        floor_limited,
    } = fit_slope(&pairs)?;
    let passed = floor_limited || slope.is_some_and(|s| s <= threshold);
    let tail = match metric {
        Metric::Residual => cutoff_tail(pairs[0].0, epsilon),
        Metric::Kernel => 0.0,
    };
    let tail_limited = tail > RESIDUAL_FLOOR;
    if tail_limited {
        eprintln!(
            "bergman: warning: the cutoff tail at k = {} is {tail:.1e}; residuals mostly measure the cutoff, not the expansion (raise k or lower --epsilon)",
            pairs[0].0
        );
    }
    print_json(&json!({
        "metric": match metric { Metric::Residual => "residual", Metric::Kernel => "kernel" },
        "order": order,
        "epsilon": epsilon,
        "k": pairs.iter().map(|(k, _)| *k).collect::<Vec<_>>(),
        "max_error": pairs.iter().map(|(_, r)| *r).collect::<Vec<_>>(),
        "slope": slope,
        "threshold": threshold,
        "floor_limited": floor_limited,
        "cutoff_tail": tail,
        "tail_limited": tail_limited,
        "passed": passed,
        "out": out.display().to_string(),
    }));
    if passed {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_CHECK_FAILED,
            format!("fitted slope {slope:?} exceeds threshold {threshold}"),
        ))
    }
}

fn oracle_cp1(k: u32, samples: usize) -> Outcome {
    if samples == 0 {
        return Err(Failure::new(EXIT_USAGE, "--samples must be positive"));
    }
    let model = ModelKernel::cp1(k)?;
    let expected = k as f64 + 1.0;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..samples {
        // radii from 0 to 3 along a slowly turning ray
        let r = 3.0 * i as f64 / samples.max(2).saturating_sub(1) as f64;
        let z = Complex::from_polar(r, 0.7 * i as f64);
        let b = model.bergman_function(&[z])?;
        let rel = (b / expected - 1.0).abs();
        worst = worst.max(rel);
        rows.push(
            json!({ "z_re": z.re, "z_im": z.im, "bergman_function": b, "relative_error": rel }),
        );
    }
    let passed = worst <= 1e-8;
    print_json(&json!({
        "model": "cp1",
        "k": k,
        "expected": expected,
        "samples": rows,
        "max_relative_error": worst,
        "passed": passed,
    }));
    if passed {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_CHECK_FAILED,
            format!("Bergman function deviates from k+1 by {worst:e}"),
        ))
    }
}
