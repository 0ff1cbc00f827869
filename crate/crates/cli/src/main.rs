//! Command-line front end for the carlitz crate: Bernoulli-Carlitz tables,
//! identity verification, divisibility reports, conjecture scans, and tuple
//! inspection. Every command is a thin dispatcher into the library; output
//! is CSV or JSON with timing fields zeroed so identical configurations
//! produce byte-identical files.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 internal
//! error.

use carlitz::algebra::{enumerate_irreducibles, Field, Frac, Poly};
use carlitz::bcnum::{
    conjecture_scan, divisibility_bound_deg1, divisibility_bound_deg2, max_tuple_norm1,
    max_tuple_norm2, measure_valuation, verify_bc_recurrence_deg1, verify_bc_recurrence_deg2,
    BcTable, DivisibilityBound, MaxTuple,
};
use carlitz::carlitz::{base_q_digits, digit_sum, verify_ed_recursion, CarlitzCache};
use carlitz::infty::verify_omega_eigen;
use carlitz::interp::{verify_interp_identity, verify_obstruction_identity, verify_product_identity};
use carlitz::lseries::{
    character_sum_check, omega_root_product, verify_carlitz_genfun, verify_explicit,
    verify_limits, verify_main_theorem, verify_pellarin_formula, LimitFamily,
};
use carlitz::report::IdentityReport;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "carlitz", version, about = "Carlitz-module arithmetic over F_q[x]")]
struct Cli {
    /// Characteristic of the base field.
    #[arg(long, global = true, default_value_t = 3)]
    p: u64,
    /// Extension degree of the base field over its prime field.
    #[arg(long, global = true, default_value_t = 1)]
    m: u32,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bernoulli-Carlitz table as CSV: values, denominator classes,
    /// measured valuations at degrees one and two, and divisibility bounds.
    BcTable {
        /// Largest index to tabulate; rows cover every multiple of q-1.
        #[arg(long = "max-n")]
        max_n: u64,
    },
    /// Check one named identity and report the result as JSON.
    Verify(VerifyArgs),
    /// Divisibility report for one index: measured irreducible valuations
    /// against the tuple-norm bound, with hypothesis warnings.
    Divisibility {
        #[arg(long)]
        n: u64,
        /// Irreducible degree to measure (bounds exist for 1 and 2).
        #[arg(long)]
        degree: u32,
    },
    /// Compare conjectured against measured numerator valuations over a
    /// range of indices; exits nonzero if any row fails.
    Scan {
        /// Irreducible degree driving the conjectured exponent.
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Base-q digits and the norm-maximal tuples for one index.
    Tuples {
        #[arg(long)]
        n: u64,
        /// Tuple length parameter: the first norm maximizer has length
        /// s(q-1).
        #[arg(long, default_value_t = 2)]
        s: u64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: interp, interp-product, obstruction, ed-recursion,
    /// main-theorem, pellarin-formula, carlitz-genfun, explicit-L, limits,
    /// omega-eigen, char-sum, omega-root-product, bc-recur-1, bc-recur-2.
    #[arg(long)]
    identity: String,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    k: Option<u64>,
    /// Interpolation level or irreducible degree, depending on identity.
    #[arg(long)]
    d: Option<u32>,
    /// Degree bound for truncated series.
    #[arg(long = "D")]
    degree_bound: Option<u32>,
    /// Working precision in powers of 1/x.
    #[arg(long = "N")]
    prec: Option<i64>,
    /// Per-variable degree cap for Tate truncations.
    #[arg(long = "M")]
    cap: Option<u32>,
    /// Evaluation point, e.g. 1/x or (x+1)/(x^2+1).
    #[arg(long)]
    z: Option<String>,
    /// Residue for bc-recur-1; all residues are checked when omitted.
    #[arg(long)]
    lambda: Option<i64>,
    /// Convergence target for limits: b-over-ell (runs all three members),
    /// ed-to-exp, or wagner-agf; the exact family names are accepted too.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated stage indices for limits, e.g. 1,2,3.
    #[arg(long)]
    stages: Option<String>,
}

/// Failures that should surface as a usage error (exit 2) versus an
/// internal one (exit 3).
enum CliError {
    Usage(String),
    Internal(String),
}

impl From<carlitz::Error> for CliError {
    fn from(e: carlitz::Error) -> CliError {
        match e {
            carlitz::Error::Precondition(msg) => CliError::Usage(msg),
            other => CliError::Internal(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(Outcome { content, pass }) => {
            if let Err(e) = emit(&out, &content) {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

struct Outcome {
    content: String,
    pass: bool,
}

fn emit(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let field = Field::make(cli.p, cli.m)?;
    match cli.command {
        Command::BcTable { max_n } => bc_table(&field, max_n),
        Command::Verify(args) => verify(&field, args),
        Command::Divisibility { n, degree } => divisibility(&field, n, degree),
        Command::Scan { degree, from, to } => scan(&field, degree, from, to),
        Command::Tuples { n, s } => tuples(&field, n, s),
    }
}

fn render_report(mut r: IdentityReport) -> (serde_json::Value, bool) {
    r.millis = 0;
    (r.to_json(), r.pass)
}

fn json_outcome(values: Vec<serde_json::Value>, pass: bool) -> Result<Outcome, CliError> {
    let body = if values.len() == 1 {
        serde_json::to_string_pretty(&values[0])
    } else {
        serde_json::to_string_pretty(&values)
    }
    .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Outcome {
        content: format!("{body}\n"),
        pass,
    })
}

fn bc_table(field: &Arc<Field>, max_n: u64) -> Result<Outcome, CliError> {
    let q = field.q();
    let mut table = BcTable::new(field);
    let mut wtr = csv::Writer::from_writer(vec![]);
    wtr.write_record([
        "n",
        "numerator",
        "denominator",
        "denominator_class",
        "val_deg1",
        "val_deg2",
        "bound_deg1",
        "bound_deg2",
        "pass_deg1",
        "pass_deg2",
    ])
    .map_err(|e| CliError::Internal(e.to_string()))?;
    let mut n = 0u64;
    while n <= max_n {
        let rec = table.record(n)?;
        let val1 = measure_valuation(&mut table, n, 1)?.min;
        let val2 = measure_valuation(&mut table, n, 2)?.min;
        let bound1 = divisibility_bound_deg1(&mut table, n).ok().map(|b| b.exponent);
        let bound2 = divisibility_bound_deg2(&mut table, n).ok().map(|b| b.exponent);
        let pass_cell = |bound: Option<i64>, val: u32| match bound {
            None => String::new(),
            Some(b) => (val as i64 >= b).to_string(),
        };
        wtr.write_record([
            n.to_string(),
            rec.value.num().render("x"),
            rec.value.den().render("x"),
            rec.class.label(),
            val1.to_string(),
            val2.to_string(),
            bound1.map(|b| b.to_string()).unwrap_or_default(),
            bound2.map(|b| b.to_string()).unwrap_or_default(),
            pass_cell(bound1, val1),
            pass_cell(bound2, val2),
        ])
        .map_err(|e| CliError::Internal(e.to_string()))?;
        n += (q - 1).max(1);
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let content = String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Outcome {
        content,
        pass: true,
    })
}

fn parse_z(field: &Arc<Field>, args: &VerifyArgs) -> Result<Frac, CliError> {
    match &args.z {
        None => {
            let theta = Poly::x(field);
            Ok(Frac::new(Poly::one(field), theta)?)
        }
        Some(text) => Ok(Frac::parse(field, text, "x")?),
    }
}

fn first_irreducible(field: &Arc<Field>, degree: u32) -> Result<Poly, CliError> {
    enumerate_irreducibles(field, degree)?
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Internal(format!("no irreducible of degree {degree}")))
}

fn parse_stages(text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("bad stage index {part:?}")))
        })
        .collect()
}

fn verify(field: &Arc<Field>, args: VerifyArgs) -> Result<Outcome, CliError> {
    let cache = CarlitzCache::new(field);
    let prec = args.prec.unwrap_or(64);
    let cap = args.cap.unwrap_or(8);
    let reports: Vec<IdentityReport> = match args.identity.as_str() {
        "interp" => vec![verify_interp_identity(&cache, args.d.unwrap_or(2))?],
        "interp-product" => vec![verify_product_identity(
            &cache,
            args.s.unwrap_or(2),
            args.d.unwrap_or(1),
        )?],
        "obstruction" => vec![verify_obstruction_identity(&cache, args.d.unwrap_or(1))?],
        "ed-recursion" => vec![verify_ed_recursion(&cache, args.d.unwrap_or(2))?],
        "main-theorem" => {
            let z = parse_z(field, &args)?;
            vec![verify_main_theorem(
                &cache,
                args.s.unwrap_or(1),
                &z,
                args.degree_bound.unwrap_or(6),
                prec,
                cap,
            )?]
        }
        "pellarin-formula" => vec![verify_pellarin_formula(
            field,
            args.degree_bound.unwrap_or(6),
            prec,
            cap,
        )?],
        "carlitz-genfun" => {
            let z = parse_z(field, &args)?;
            vec![verify_carlitz_genfun(
                &cache,
                &z,
                args.degree_bound.unwrap_or(6),
                prec,
            )?]
        }
        "explicit-L" => {
            let mut table = BcTable::new(field);
            vec![verify_explicit(
                &mut table,
                args.s.unwrap_or(1),
                args.k.unwrap_or(1),
                args.degree_bound.unwrap_or(5),
                prec,
                cap,
            )?]
        }
        "limits" => return limits(&cache, &args),
        "omega-eigen" => vec![verify_omega_eigen(&cache, prec, cap)?],
        "char-sum" => {
            let v = first_irreducible(field, args.d.unwrap_or(1))?;
            vec![character_sum_check(
                field,
                &v,
                args.n.unwrap_or(2),
                args.degree_bound.unwrap_or(8),
                prec,
            )?]
        }
        "omega-root-product" => {
            let v = first_irreducible(field, args.d.unwrap_or(1))?;
            vec![omega_root_product(field, &v, prec)?]
        }
        "bc-recur-1" => {
            let n = args
                .n
                .ok_or_else(|| CliError::Usage("bc-recur-1 needs --n".into()))?;
            let mut table = BcTable::new(field);
            let residues: Vec<i64> = match args.lambda {
                Some(l) => vec![l],
                None => (0..field.q() as i64).collect(),
            };
            residues
                .into_iter()
                .map(|l| verify_bc_recurrence_deg1(&mut table, n, field.from_int(l)))
                .collect::<Result<_, _>>()?
        }
        "bc-recur-2" => {
            let n = args
                .n
                .ok_or_else(|| CliError::Usage("bc-recur-2 needs --n".into()))?;
            let mut table = BcTable::new(field);
            enumerate_irreducibles(field, 2)?
                .iter()
                .map(|v| verify_bc_recurrence_deg2(&mut table, n, v))
                .collect::<Result<_, _>>()?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown identity {other:?}; see verify --help for the list"
            )))
        }
    };
    let mut pass = true;
    let values = reports
        .into_iter()
        .map(|r| {
            let (v, p) = render_report(r);
            pass &= p;
            v
        })
        .collect();
    json_outcome(values, pass)
}

fn limits(cache: &CarlitzCache, args: &VerifyArgs) -> Result<Outcome, CliError> {
    let prec = args.prec.unwrap_or(24);
    let cap = args.cap.unwrap_or(2);
    let family = args
        .family
        .as_deref()
        .ok_or_else(|| CliError::Usage("limits needs --family".into()))?;
    // Pinned default windows, chosen so the decay is past its pre-asymptotic
    // head but the stage cost stays low.
    let selected: Vec<(LimitFamily, Vec<u32>)> = match family {
        "b-over-ell" => vec![
            (LimitFamily::BOverEllTop, vec![0, 1, 2]),
            (LimitFamily::BOverEllProduct, vec![1, 2, 3]),
            (LimitFamily::BOverEllVanishing, vec![1, 2, 3]),
        ],
        "b-over-ell-1" => vec![(LimitFamily::BOverEllTop, vec![0, 1, 2])],
        "b-over-ell-2" => vec![(LimitFamily::BOverEllProduct, vec![1, 2, 3])],
        "b-over-ell-3" => vec![(LimitFamily::BOverEllVanishing, vec![1, 2, 3])],
        "ed-to-exp" => vec![(LimitFamily::EdToExp, vec![0, 1, 2])],
        "wagner-agf" => vec![(LimitFamily::WagnerAgf, vec![1, 2, 3])],
        other => {
            return Err(CliError::Usage(format!(
                "unknown limit family {other:?}: expected b-over-ell, ed-to-exp, or wagner-agf"
            )))
        }
    };
    let override_stages = args.stages.as_deref().map(parse_stages).transpose()?;
    let field = cache.field().clone();
    let z = match &args.z {
        Some(text) => Frac::parse(&field, text, "x")?,
        None => Frac::new(Poly::one(&field), Poly::x(&field))?,
    };
    let mut pass = true;
    let mut values = Vec::new();
    for (family, default_stages) in selected {
        let stages = override_stages.clone().unwrap_or(default_stages);
        let point = family.needs_point().then_some(&z);
        let mut report = verify_limits(cache, family, &stages, point, prec, cap)?;
        report.millis = 0;
        pass &= report.pass;
        values.push(report.to_json());
    }
    json_outcome(values, pass)
}

fn tuple_json(t: &MaxTuple, n: u64) -> serde_json::Value {
    serde_json::json!({
        "beta": t.record.beta,
        "norm1": t.record.norm1,
        "norm2": t.record.norm2,
        "n_minus_norm1": n as i64 - t.record.norm1 as i64,
        "n_minus_norm2": t.record.norm2.map(|v| n as i64 - v as i64),
        "ordered_split": t.record.split,
        "length_hypothesis_ok": t.hypothesis_ok,
    })
}

fn bound_json(b: &DivisibilityBound) -> serde_json::Value {
    serde_json::json!({
        "exponent": b.exponent,
        "basis": b.basis.render("x"),
        "tuple_norm": b.tuple_norm,
        "branch_class": b.branch_class.label(),
    })
}

fn divisibility(field: &Arc<Field>, n: u64, degree: u32) -> Result<Outcome, CliError> {
    let q = field.q();
    let mut table = BcTable::new(field);
    let mut warnings: Vec<String> = vec![];
    let measured = measure_valuation(&mut table, n, degree)?;
    let per: Vec<serde_json::Value> = measured
        .per_irreducible
        .iter()
        .map(|(v, val)| serde_json::json!({"v": v.render("x"), "valuation": val}))
        .collect();

    let l = digit_sum(n, q);
    let needed = (degree as u64 + 1) * (q - 1);
    if l < needed {
        warnings.push(format!(
            "digit sum l({n}) = {l} is below ({} + 1)(q - 1) = {needed}; the bound's hypothesis fails",
            degree
        ));
    }
    let (bound, tuple) = match degree {
        1 => {
            let b = divisibility_bound_deg1(&mut table, n);
            let t = max_tuple_norm1(table.cache(), n, 1);
            (b, t)
        }
        2 => {
            let b = divisibility_bound_deg2(&mut table, n);
            let t = max_tuple_norm2(table.cache(), n);
            (b, t)
        }
        d => {
            warnings.push(format!("no bound operation at degree {d}; reporting measurement only"));
            let report = serde_json::json!({
                "n": n,
                "degree": degree,
                "measured": measured.min,
                "per_irreducible": per,
                "bound": serde_json::Value::Null,
                "tuple": serde_json::Value::Null,
                "warnings": warnings,
            });
            return json_outcome(vec![report], true);
        }
    };
    let bound_value = match bound {
        Ok(b) => bound_json(&b),
        Err(e) => {
            warnings.push(format!("bound unavailable: {e}"));
            serde_json::Value::Null
        }
    };
    let tuple_value = match tuple {
        Ok(t) => tuple_json(&t, n),
        Err(e) => {
            warnings.push(format!("maximal tuple unavailable: {e}"));
            serde_json::Value::Null
        }
    };
    let report = serde_json::json!({
        "n": n,
        "degree": degree,
        "measured": measured.min,
        "per_irreducible": per,
        "bound": bound_value,
        "tuple": tuple_value,
        "warnings": warnings,
    });
    json_outcome(vec![report], true)
}

fn scan(field: &Arc<Field>, degree: u32, from: u64, to: u64) -> Result<Outcome, CliError> {
    let mut table = BcTable::new(field);
    let rows = conjecture_scan(&mut table, degree, from, to)?;
    let mut wtr = csv::Writer::from_writer(vec![]);
    wtr.write_record(["n", "digit_sum", "tuple", "conjectured_exponent", "measured", "pass"])
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let mut pass = true;
    for row in &rows {
        pass &= row.pass;
        let tuple = row
            .tuple
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        wtr.write_record([
            row.n.to_string(),
            row.digit_sum.to_string(),
            tuple,
            row.conjectured_exponent.to_string(),
            row.measured.to_string(),
            row.pass.to_string(),
        ])
        .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let content = String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Outcome { content, pass })
}

fn tuples(field: &Arc<Field>, n: u64, s: u64) -> Result<Outcome, CliError> {
    let cache = CarlitzCache::new(field);
    let q = field.q();
    let mut warnings: Vec<String> = vec![];
    let norm1 = match max_tuple_norm1(&cache, n, s) {
        Ok(t) => {
            if !t.hypothesis_ok {
                warnings.push(format!(
                    "digit sum l({n}) is below (s + 1)(q - 1); nonzero entries are not guaranteed"
                ));
            }
            tuple_json(&t, n)
        }
        Err(e) => {
            warnings.push(format!("first-norm maximizer unavailable: {e}"));
            serde_json::Value::Null
        }
    };
    let norm2 = match max_tuple_norm2(&cache, n) {
        Ok(t) => tuple_json(&t, n),
        Err(e) => {
            warnings.push(format!("second-norm maximizer unavailable: {e}"));
            serde_json::Value::Null
        }
    };
    let report = serde_json::json!({
        "n": n,
        "q": q,
        "digits_lsb_first": base_q_digits(n, q),
        "digit_sum": digit_sum(n, q),
        "norm1_maximal": norm1,
        "norm2_maximal": norm2,
        "warnings": warnings,
    });
    json_outcome(vec![report], true)
}
