//! Command-line front end: discriminant-form tables, characters, exact Weil
//! matrices, eta quotients, Eisenstein series, the scalar/vector lift and
//! descent, the obstruction criterion, and a `reproduce` command that walks
//! the full level-12 worked example.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

mod reproduce;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use num::rational::BigRational;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use weilform::chars::{CharData, SWeight};
use weilform::correspond::{descend_phi, lift_psi, numeric_transform_check, VectorForm};
use weilform::discform::DiscriminantForm;
use weilform::eisenstein::{e_epsilon_star, eisenstein_m};
use weilform::exactnum::format_rational;
use weilform::obstruct::{
    build_f1_level12, constant_term, existence_check, validate_principal_part, PrincipalPart,
};
use weilform::qseries::{eta_cusp_orders, eta_quotient, QExpansion};
use weilform::weilrep::{rho, Mat2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Json,
    Text,
}

#[derive(Parser)]
#[command(
    name = "weilform",
    version,
    about = "Exact modular-form computations for real quadratic discriminant forms"
)]
struct Cli {
    /// Output format for structured results.
    #[arg(long, global = true, value_enum, default_value = "json")]
    output: OutputMode,
    /// Truncation: series are certified below this exponent count.
    #[arg(long, global = true, default_value_t = 200)]
    prec: i64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant form structure tables.
    Df {
        #[arg(long)]
        n1: i64,
        /// Include the Jordan decomposition.
        #[arg(long)]
        jordan: bool,
        /// Include the automorphism group.
        #[arg(long)]
        aut: bool,
        /// Include the norm-class table.
        #[arg(long)]
        norms: bool,
    },
    /// Evaluate chi_D and its prime components at an integer.
    Chars {
        #[arg(long)]
        n1: i64,
        #[arg(long, allow_hyphen_values = true)]
        eval: i64,
    },
    /// Exact Weil representation matrix of a unimodular 2x2 matrix.
    Weil {
        #[arg(long)]
        n1: i64,
        /// Entries "a,b,c,d" of [[a,b],[c,d]].
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Expand an eta quotient; optionally list its cusp orders.
    Eta {
        /// Factors "d:r,d:r,..." for prod eta(d tau)^r.
        #[arg(long)]
        spec: String,
        /// Also print the cusp-order table on Gamma_0(level).
        #[arg(long)]
        level: Option<i64>,
    },
    /// Eisenstein series E_m (or the normalized E^{eps*}).
    Eis {
        #[arg(long)]
        n1: i64,
        #[arg(long)]
        weight: i64,
        /// Unitary divisor m of the level; omit with --star for E^{eps*}.
        #[arg(long)]
        m: Option<i64>,
        /// Emit the normalized sum E^{eps*} instead of a single E_m.
        #[arg(long)]
        star: bool,
    },
    /// Lift a scalar series (JSON file) to an invariant vector form.
    Lift {
        #[arg(long)]
        n1: i64,
        #[arg(long)]
        series: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        weight: i64,
    },
    /// Descend a vector form (JSON file) to its scalar counterpart.
    Descend {
        #[arg(long)]
        n1: i64,
        #[arg(long)]
        vform: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        weight: i64,
    },
    /// Numeric check of the transformation law on a lifted series.
    CheckTransform {
        #[arg(long)]
        n1: i64,
        #[arg(long)]
        series: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        weight: i64,
        /// Entries "a,b,c,d" of [[a,b],[c,d]].
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Evaluation point "re,im" in the upper half plane.
        #[arg(long, allow_hyphen_values = true, default_value = "0.0,1.0")]
        tau: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Existence and constant term for a principal part.
    Obstruct {
        #[arg(long)]
        n1: i64,
        #[arg(long, allow_hyphen_values = true)]
        weight: i64,
        /// Principal part "n:coeff,..." with negative n, e.g. "-1:1,-4:3/2".
        #[arg(long, allow_hyphen_values = true)]
        principal: String,
        /// JSON file with a list of cusp-basis series (default: empty).
        #[arg(long)]
        cusp_basis: Option<PathBuf>,
    },
    /// The level-12 form f_1 = q^{-1} + 1 + 2q^2 + ...
    F1 {},
    /// Walk the level-12 worked example end to end.
    Reproduce {
        #[arg(long, default_value_t = 3)]
        n1: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.prec < 20 {
        bail!("--prec must be at least 20, got {}", cli.prec);
    }
    let prec = cli.prec;
    let mode = cli.output;
    match cli.command {
        Command::Df {
            n1,
            jordan,
            aut,
            norms,
        } => cmd_df(mode, n1, jordan, aut, norms),
        Command::Chars { n1, eval } => cmd_chars(mode, n1, eval),
        Command::Weil { n1, matrix } => cmd_weil(mode, n1, &matrix),
        Command::Eta { spec, level } => cmd_eta(mode, &spec, level, prec),
        Command::Eis {
            n1,
            weight,
            m,
            star,
        } => cmd_eis(mode, n1, weight, m, star, prec),
        Command::Lift { n1, series, weight } => cmd_lift(mode, n1, &series, weight),
        Command::Descend { n1, vform, weight } => cmd_descend(mode, n1, &vform, weight),
        Command::CheckTransform {
            n1,
            series,
            weight,
            matrix,
            tau,
            tol,
        } => cmd_check_transform(mode, n1, &series, weight, &matrix, &tau, tol, prec),
        Command::Obstruct {
            n1,
            weight,
            principal,
            cusp_basis,
        } => cmd_obstruct(mode, n1, weight, &principal, cusp_basis.as_deref(), prec),
        Command::F1 {} => cmd_f1(mode, prec),
        Command::Reproduce { n1 } => reproduce::run(mode, n1, prec),
    }
}

fn emit(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

pub(crate) fn parse_mat2(s: &str) -> Result<Mat2> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|e| anyhow!("bad matrix entry {x:?}: {e}"))
        })
        .collect::<Result<_>>()?;
    if parts.len() != 4 {
        bail!("--matrix needs four entries a,b,c,d");
    }
    Ok([[parts[0], parts[1]], [parts[2], parts[3]]])
}

fn parse_eta_spec(s: &str) -> Result<Vec<(i64, i64)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (d, r) = t
                .split_once(':')
                .ok_or_else(|| anyhow!("eta factor {t:?} must be d:r"))?;
            Ok((
                d.trim().parse().context("eta scale")?,
                r.trim().parse().context("eta exponent")?,
            ))
        })
        .collect()
}

fn parse_principal(s: &str) -> Result<Vec<(i64, BigRational)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (n, c) = t
                .split_once(':')
                .ok_or_else(|| anyhow!("principal term {t:?} must be n:coeff"))?;
            let n: i64 = n.trim().parse().context("principal exponent")?;
            let c = weilform::exactnum::parse_rational(c.trim())
                .map_err(|e| anyhow!("principal coefficient: {e}"))?;
            Ok((n, c))
        })
        .collect()
}

fn parse_tau(s: &str) -> Result<Complex64> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("--tau must be re,im"))?;
    let tau = Complex64::new(re.trim().parse()?, im.trim().parse()?);
    if tau.im <= 0.0 {
        bail!("tau must lie in the upper half plane");
    }
    Ok(tau)
}

fn read_series(path: &std::path::Path) -> Result<QExpansion> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let series = QExpansion::from_json(&value)
        .map_err(|e| anyhow!("{e}"))?
        .normalize();
    if series.den() != 1 {
        bail!(
            "scalar series must have integer exponents (den = 1), got den = {}",
            series.den()
        );
    }
    Ok(series)
}

fn cmd_df(mode: OutputMode, n1: i64, jordan: bool, aut: bool, norms: bool) -> Result<()> {
    let d = DiscriminantForm::build(n1)?;
    let all = !(jordan || aut || norms);
    let mut out = serde_json::json!({
        "n1": n1,
        "level": d.level(),
        "size": d.size(),
        "generator_orders": d.generators().iter().map(|g| g.order).collect::<Vec<_>>(),
        "generators_validated": d.validate_generators(),
    });
    if jordan || all {
        out["jordan"] = serde_json::Value::Array(
            d.jordan()
                .iter()
                .map(|s| serde_json::json!(s.to_string()))
                .collect(),
        );
    }
    if aut || all {
        let auts = d.automorphisms();
        out["aut_order"] = serde_json::json!(auts.len());
        out["aut_labels"] = serde_json::Value::Array(
            auts.iter()
                .map(|a| {
                    serde_json::json!(a
                        .label
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join("*"))
                })
                .collect(),
        );
    }
    if norms || all {
        out["norm_classes"] = serde_json::Value::Array(
            d.norm_class_counts()
                .into_iter()
                .map(|(r, c)| serde_json::json!([r, c]))
                .collect(),
        );
    }
    match mode {
        OutputMode::Json => emit(&out),
        OutputMode::Text => {
            println!(
                "discriminant form for N1 = {n1}: level N = {}, |D| = {}",
                d.level(),
                d.size()
            );
            println!(
                "generator orders: {:?}",
                d.generators().iter().map(|g| g.order).collect::<Vec<_>>()
            );
            if let Some(j) = out.get("jordan") {
                println!(
                    "jordan: {}",
                    j.as_array()
                        .unwrap()
                        .iter()
                        .map(|v| v.as_str().unwrap())
                        .collect::<Vec<_>>()
                        .join(" (+) ")
                );
            }
            if let Some(a) = out.get("aut_order") {
                println!("|Aut(D)| = {a}");
            }
            if let Some(ns) = out.get("norm_classes") {
                println!("norm classes (N q mod N : count): {ns}");
            }
            Ok(())
        }
    }
}

fn cmd_chars(mode: OutputMode, n1: i64, eval: i64) -> Result<()> {
    let chi = CharData::new(n1)?;
    let (eps, eps_star) = chi.sign_vectors();
    let comps: Vec<serde_json::Value> = chi
        .components()
        .iter()
        .map(|c| {
            serde_json::json!({
                "p": c.prime,
                "modulus": c.modulus,
                "value": c.eval(eval),
                "epsilon": eps.sign(c.prime),
                "epsilon_star": eps_star.sign(c.prime),
            })
        })
        .collect();
    let out = serde_json::json!({
        "n1": n1,
        "level": chi.level(),
        "n": eval,
        "chi_d": chi.chi_d(eval),
        "components": comps,
    });
    match mode {
        OutputMode::Json => emit(&out),
        OutputMode::Text => {
            println!(
                "chi_D({eval}) = {} (level {})",
                chi.chi_d(eval),
                chi.level()
            );
            for c in chi.components() {
                println!("  chi_{}({eval}) = {}", c.prime, c.eval(eval));
            }
            Ok(())
        }
    }
}

fn cmd_weil(mode: OutputMode, n1: i64, matrix: &str) -> Result<()> {
    let m = parse_mat2(matrix)?;
    let d = DiscriminantForm::build(n1)?;
    let w = rho(&d, &m)?;
    match mode {
        OutputMode::Json => emit(&w.to_json()),
        OutputMode::Text => {
            println!("rho_D(M) for N1 = {n1}, dim {}:", w.dim());
            for i in 0..w.dim() {
                let row: Vec<String> = (0..w.dim())
                    .map(|j| {
                        let z = w.entry(i, j).embed();
                        format!("{:+.4}{:+.4}i", z.re, z.im)
                    })
                    .collect();
                println!("  [{}]", row.join(", "));
            }
            Ok(())
        }
    }
}

fn cmd_eta(mode: OutputMode, spec: &str, level: Option<i64>, prec: i64) -> Result<()> {
    let spec = parse_eta_spec(spec)?;
    let series = eta_quotient(&spec, prec);
    let mut out = serde_json::json!({ "series": series.to_json() });
    if let Some(n) = level {
        if n < 1 || spec.iter().any(|&(d, _)| n % d != 0) {
            bail!("every eta scale must divide the level {n}");
        }
        out["cusp_orders"] = serde_json::Value::Array(
            eta_cusp_orders(&spec, n)
                .into_iter()
                .map(|(c, o)| serde_json::json!([c.label(n), format_rational(&o)]))
                .collect(),
        );
    }
    match mode {
        OutputMode::Json => emit(&out),
        OutputMode::Text => {
            println!("{series}");
            if let Some(t) = out.get("cusp_orders") {
                println!("cusp orders: {t}");
            }
            Ok(())
        }
    }
}

fn cmd_eis(
    mode: OutputMode,
    n1: i64,
    weight: i64,
    m: Option<i64>,
    star: bool,
    prec: i64,
) -> Result<()> {
    let chi = CharData::new(n1)?;
    let series = match (m, star) {
        (Some(m), false) => eisenstein_m(&chi, weight, m, prec)?,
        (None, true) => e_epsilon_star(&chi, weight, prec)?,
        _ => bail!("pass exactly one of --m <divisor> or --star"),
    };
    match mode {
        OutputMode::Json => emit(&series.to_json()),
        OutputMode::Text => {
            println!("{series}");
            Ok(())
        }
    }
}

fn cmd_lift(mode: OutputMode, n1: i64, path: &std::path::Path, weight: i64) -> Result<()> {
    let f = read_series(path)?;
    let d = Arc::new(DiscriminantForm::build(n1)?);
    let form = lift_psi(&f, &d, weight)?;
    match mode {
        OutputMode::Json => emit(&form.to_json()),
        OutputMode::Text => {
            for (r, series) in form.components() {
                println!("class {r}: {series}");
            }
            Ok(())
        }
    }
}

fn cmd_descend(mode: OutputMode, n1: i64, path: &std::path::Path, weight: i64) -> Result<()> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let d = Arc::new(DiscriminantForm::build(n1)?);
    let form = VectorForm::from_json(Arc::clone(&d), weight, &value)?;
    let f = descend_phi(&form)?;
    match mode {
        OutputMode::Json => emit(&f.to_json()),
        OutputMode::Text => {
            println!("{f}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check_transform(
    mode: OutputMode,
    n1: i64,
    path: &std::path::Path,
    weight: i64,
    matrix: &str,
    tau: &str,
    tol: f64,
    prec: i64,
) -> Result<()> {
    let f = read_series(path)?;
    let m = parse_mat2(matrix)?;
    let tau = parse_tau(tau)?;
    let d = Arc::new(DiscriminantForm::build(n1)?);
    let form = lift_psi(&f, &d, weight)?;
    let ok = numeric_transform_check(&form, &m, tau, prec, tol)?;
    let out = serde_json::json!({
        "matrix": [[m[0][0], m[0][1]], [m[1][0], m[1][1]]],
        "tau": [tau.re, tau.im],
        "tol": tol,
        "transforms": ok,
    });
    match mode {
        OutputMode::Json => emit(&out)?,
        OutputMode::Text => {
            println!("transformation law holds: {ok}");
        }
    }
    if ok {
        Ok(())
    } else {
        Err(anyhow!("transformation check failed"))
    }
}

fn cmd_obstruct(
    mode: OutputMode,
    n1: i64,
    weight: i64,
    principal: &str,
    cusp_basis: Option<&std::path::Path>,
    prec: i64,
) -> Result<()> {
    if weight > 0 || weight % 2 != 0 {
        bail!("obstruction weight must be even and <= 0");
    }
    let chi = CharData::new(n1)?;
    let terms = parse_principal(principal)?;
    if terms.iter().any(|&(n, _)| n >= 0) {
        bail!("principal part exponents must be negative");
    }
    let p = PrincipalPart::new(n1, weight, terms);
    let (eps_ok, violations) = validate_principal_part(&p, &chi);
    if !eps_ok {
        let list: Vec<String> = violations
            .iter()
            .map(|(n, pr)| format!("n={n} at p={pr}"))
            .collect();
        bail!(
            "principal part violates the epsilon-condition: {}",
            list.join(", ")
        );
    }
    let basis: Vec<QExpansion> = match cusp_basis {
        None => Vec::new(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let arr = value
                .as_array()
                .ok_or_else(|| anyhow!("cusp basis file must be a JSON list of series"))?;
            arr.iter()
                .map(|v| QExpansion::from_json(v).map_err(|e| anyhow!("{e}")))
                .collect::<Result<_>>()?
        }
    };
    let sw = SWeight::new(chi.level());
    let exists = existence_check(&p, &basis, &sw)?;
    let ct = if n1 % 4 == 2 {
        None
    } else {
        Some(constant_term(&p, &chi, prec)?)
    };
    let out = serde_json::json!({
        "n1": n1,
        "weight": weight,
        "exists": exists,
        "constant_term": ct.as_ref().map(format_rational),
    });
    match mode {
        OutputMode::Json => emit(&out),
        OutputMode::Text => {
            println!("exists: {exists}");
            match ct {
                Some(v) => println!("constant term: {}", format_rational(&v)),
                None => println!("constant term: not determined for N1 = 2 (mod 4)"),
            }
            Ok(())
        }
    }
}

fn cmd_f1(mode: OutputMode, prec: i64) -> Result<()> {
    let f1 = build_f1_level12(prec);
    match mode {
        OutputMode::Json => emit(&f1.to_json()),
        OutputMode::Text => {
            println!("{f1}");
            Ok(())
        }
    }
}
