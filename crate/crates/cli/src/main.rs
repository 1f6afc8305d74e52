mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use complete_numbers::classifier::{classify_rational, Verdict};
use complete_numbers::fourier::{self, TruncationSpec};
use complete_numbers::modorder;
use complete_numbers::primitive::{self, FamilyMember};
use complete_numbers::survey::{self, EpsilonRule, ScanOptions};
use complete_numbers::verify::{self, Suite};
use complete_numbers::{make_params, Budgets, Error, PairParams};

use config::RunConfig;

const EXIT_COMPLETE: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_INCOMPLETE: u8 = 10;
const EXIT_NOT_APPLICABLE: u8 = 11;

/// Complete and incomplete numbers of N-Bernoulli spectral pairs.
///
/// Exit status of `classify`: 0 complete, 10 incomplete, 11 not applicable.
/// Every command exits 2 on bad input and 3 when a resource budget runs out.
#[derive(Debug, Parser)]
#[command(name = "cnum", version)]
struct Cli {
    /// TOML file whose keys mirror the long flags. Flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel commands (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Lattice nodes the exhaustive cycle search may visit.
    #[arg(long, global = true)]
    lattice_nodes: Option<u64>,
    /// Powers the group-element test may walk.
    #[arg(long, global = true)]
    group_iterations: Option<u64>,
    /// Pollard rho iterations per cofactor.
    #[arg(long, global = true)]
    rho_iterations: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether t is complete; prints JSON.
    Classify(ClassifyArgs),
    /// Classify every t in 1..=xmax; prints CSV.
    Scan(ScanArgs),
    /// Density of complete numbers on a grid; prints JSON.
    Density(DensityArgs),
    /// Multiplicative orders and lifting exponents; prints JSON.
    Orders(OrdersArgs),
    /// Closed-form families of complete or incomplete numbers; prints CSV.
    Families(FamiliesArgs),
    /// Truncated spectral sums Q(xi) for tΛ; prints CSV.
    Fourier(FourierArgs),
    /// Run the built-in consistency suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long = "N")]
    n: Option<i64>,
    #[arg(long)]
    q: Option<i64>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Integer or fraction `a/b`.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Print the full certificate or witness.
    #[arg(long)]
    explain: bool,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    xmax: Option<u64>,
    /// Values of t handed to a worker at a time.
    #[arg(long)]
    block: Option<u64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fill the elapsedMicros column.
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct DensityArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    xmax: Option<u64>,
    /// Comma-separated grid points (default: powers of two and xmax).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<u64>>,
    #[arg(long)]
    p_max: Option<u64>,
}

#[derive(Debug, Args)]
struct OrdersArgs {
    #[arg(long)]
    b: Option<u64>,
    #[arg(long)]
    t: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    /// Order of b^r modulo t.
    #[arg(long)]
    base_power: Option<u64>,
    /// Order statistics over primes up to xmax.
    #[arg(long)]
    xmax: Option<u64>,
    /// Constant exponent slack for the statistics.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Exponent slack log_p(q) for the statistics.
    #[arg(long)]
    log_q: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Alpha,
    Repunit,
    Complete,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct FamiliesArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long)]
    kmax: Option<u32>,
    /// Known primitive incomplete numbers the repunit must avoid.
    #[arg(long, value_delimiter = ',')]
    known: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct FourierArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<i64>,
    /// Product depth K1 (default: chosen so the tail bound is below 1e-12).
    #[arg(long)]
    depth: Option<u32>,
    /// Spectrum level K2.
    #[arg(long)]
    level: Option<u32>,
    /// Comma-separated sample points (default: i/258 for i = 1..=257).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    grid: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Witness,
    Orders,
    Families,
    Section6,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Option<SuiteArg>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_FAILURE,
            Failure::Lib(e) if e.is_resource_limit() => EXIT_LIMIT,
            Failure::Lib(Error::LevelTooLarge { .. } | Error::Overflow(_)) => EXIT_LIMIT,
            Failure::Lib(Error::Internal(_)) => EXIT_FAILURE,
            Failure::Lib(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, Failure> {
    flag.or(file)
        .ok_or_else(|| Failure::Usage(format!("missing --{name} (flag or config key)")))
}

struct Ctx {
    cfg: RunConfig,
    workers: usize,
    budgets: Budgets,
}

impl Ctx {
    fn params(&self, pair: &PairArgs) -> Result<PairParams, Failure> {
        let n = required(pair.n, self.cfg.n, "N")?;
        let q = required(pair.q, self.cfg.q, "q")?;
        make_params(n, q).map_err(|e| Failure::Usage(e.to_string()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("cnum: {f}");
            f.code()
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Outcome {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    let workers = cli
        .workers
        .or(cfg.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Failure::Usage("--workers must be positive".into()));
    }
    let d = Budgets::default();
    let budgets = Budgets {
        lattice_nodes: cli.lattice_nodes.or(cfg.lattice_nodes).unwrap_or(d.lattice_nodes),
        group_iterations: cli
            .group_iterations
            .or(cfg.group_iterations)
            .unwrap_or(d.group_iterations),
        rho_iterations: cli.rho_iterations.or(cfg.rho_iterations).unwrap_or(d.rho_iterations),
    };
    let ctx = Ctx {
        cfg,
        workers,
        budgets,
    };
    match cli.command {
        Command::Classify(a) => cmd_classify(&ctx, a),
        Command::Scan(a) => cmd_scan(&ctx, a),
        Command::Density(a) => cmd_density(&ctx, a),
        Command::Orders(a) => cmd_orders(&ctx, a),
        Command::Families(a) => cmd_families(&ctx, a),
        Command::Fourier(a) => cmd_fourier(&ctx, a),
        Command::Verify(a) => cmd_verify(&ctx, a),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    emit(&(s + "\n"), None)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn cmd_classify(ctx: &Ctx, a: ClassifyArgs) -> Outcome {
    let params = ctx.params(&a.pair)?;
    let sec = &ctx.cfg.classify;
    let raw = required(a.t, sec.t.clone(), "t")?;
    let t: BigRational = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("cannot parse t = {raw:?}")))?;
    let c = classify_rational(&params, &t, &ctx.budgets)?;
    if a.explain || sec.explain.unwrap_or(false) {
        print_json(&c)?;
    } else {
        let mut summary = json!({
            "N": params.n(),
            "q": params.q(),
            "t": t.to_string(),
            "verdict": c.kind(),
        });
        match &c.verdict {
            Verdict::Complete { certificate } => {
                summary["certificateKind"] = json!(certificate.kind());
            }
            Verdict::Incomplete { witness, .. } => {
                summary["witnessPeriod"] = json!(witness.period);
                summary["witnessStart"] = json!(witness.start().to_string());
                summary["cycles"] = json!(c.all_cycles().len());
            }
            Verdict::NotApplicable { reason } => {
                summary["reason"] = json!(reason);
            }
        }
        print_json(&summary)?;
    }
    Ok(match c.verdict {
        Verdict::Complete { .. } => EXIT_COMPLETE,
        Verdict::Incomplete { .. } => EXIT_INCOMPLETE,
        Verdict::NotApplicable { .. } => EXIT_NOT_APPLICABLE,
    })
}

fn scan_rows(ctx: &Ctx, params: &PairParams, xmax: u64, block: Option<u64>, timings: bool) -> Result<Vec<survey::ScanRow>, Failure> {
    if xmax == 0 {
        return Err(Failure::Usage("--xmax must be positive".into()));
    }
    let mut opts = ScanOptions {
        workers: ctx.workers,
        budgets: ctx.budgets,
        timings,
        ..ScanOptions::default()
    };
    if let Some(b) = block {
        if b == 0 {
            return Err(Failure::Usage("--block must be positive".into()));
        }
        opts.block = b;
    }
    let start = Instant::now();
    let rows = survey::scan(params, xmax, &opts)?;
    let limits = rows.iter().filter(|r| r.classification().is_none()).count();
    eprintln!(
        "scanned t = 1..={xmax} with {} workers in {:.2?} ({limits} rows hit a limit)",
        ctx.workers,
        start.elapsed()
    );
    Ok(rows)
}

fn cmd_scan(ctx: &Ctx, a: ScanArgs) -> Outcome {
    let params = ctx.params(&a.pair)?;
    let sec = &ctx.cfg.scan;
    let xmax = required(a.xmax, sec.xmax, "xmax")?;
    let timings = a.timings || sec.timings.unwrap_or(false);
    let rows = scan_rows(ctx, &params, xmax, a.block.or(sec.block), timings)?;
    let csv = survey::scan_csv_string(&rows)?;
    emit(&csv, a.out.as_deref().or(sec.out.as_deref()))?;
    Ok(EXIT_COMPLETE)
}

fn cmd_density(ctx: &Ctx, a: DensityArgs) -> Outcome {
    let params = ctx.params(&a.pair)?;
    let sec = &ctx.cfg.density;
    let xmax = required(a.xmax, sec.xmax, "xmax")?;
    let rows = scan_rows(ctx, &params, xmax, None, false)?;
    let grid = a
        .grid
        .or_else(|| sec.grid.clone())
        .unwrap_or_else(|| survey::dyadic_grid(xmax));
    let p_max = a.p_max.or(sec.p_max).unwrap_or(survey::DEFAULT_P_MAX);
    let report = survey::density_report(&params, &rows, &grid, p_max)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let violations = report.envelope_violations();
    if !violations.is_empty() {
        eprintln!("density exceeds the envelope at x = {violations:?}");
    }
    print_json(&report)?;
    Ok(EXIT_COMPLETE)
}

fn cmd_orders(ctx: &Ctx, a: OrdersArgs) -> Outcome {
    let sec = &ctx.cfg.orders;
    let b = required(a.b, sec.b, "b")?;
    let t = a.t.or(sec.t);
    let p = a.p.or(sec.p);
    let k = a.k.or(sec.k);
    let r = a.base_power.or(sec.base_power);
    let xmax = a.xmax.or(sec.xmax);
    match (t, p, k, r, xmax) {
        (Some(t), None, None, None, None) => {
            print_json(&modorder::order_profile_with(b, t, &ctx.budgets)?)?;
        }
        (Some(t), None, None, Some(r), None) => {
            let order = modorder::order_base_power(b, r, t)?;
            print_json(&json!({ "base": b, "power": r, "modulus": t, "order": order }))?;
        }
        (None, Some(p), Some(k), None, None) => {
            let ell = modorder::ell(b, p)?;
            let order = modorder::order_prime_power(b, p, k)?;
            print_json(&json!({ "base": b, "p": p, "k": k, "ell": ell, "order": order }))?;
        }
        (None, None, None, None, Some(xmax)) => {
            let rule = match (a.epsilon.or(sec.epsilon), a.log_q.or(sec.log_q)) {
                (Some(_), Some(_)) => {
                    return Err(Failure::Usage("give at most one of --epsilon and --log-q".into()))
                }
                (_, Some(q)) => EpsilonRule::LogP { q },
                (e, None) => EpsilonRule::Constant {
                    epsilon: e.unwrap_or(0.0),
                },
            };
            print_json(&survey::order_statistics(b, xmax, rule)?)?;
        }
        _ => {
            return Err(Failure::Usage(
                "orders takes --b with one of: --t, --t --base-power, --p --k, --xmax".into(),
            ))
        }
    }
    Ok(EXIT_COMPLETE)
}

fn cmd_families(ctx: &Ctx, a: FamiliesArgs) -> Outcome {
    let params = ctx.params(&a.pair)?;
    let sec = &ctx.cfg.families;
    let family = match (a.family, sec.family.as_deref()) {
        (Some(f), _) => f,
        (None, Some(s)) => Family::from_str(s, true)
            .map_err(|_| Failure::Usage(format!("unknown family {s:?}")))?,
        (None, None) => return Err(Failure::Usage("missing --family".into())),
    };
    let format = match (a.format, sec.format.as_deref()) {
        (Some(f), _) => f,
        (None, Some(s)) => Format::from_str(s, true)
            .map_err(|_| Failure::Usage(format!("unknown format {s:?}")))?,
        (None, None) => Format::Csv,
    };
    let kmax = a.kmax.or(sec.kmax);
    match family {
        Family::Alpha => {
            let kmax = required(kmax, None, "kmax")?;
            let fam = primitive::gen_alpha_family(&params, kmax, &ctx.budgets)
                .map_err(usage_if_domain)?;
            if !fam.coprimality_failures.is_empty() {
                eprintln!("gcd biconditional fails at {:?}", fam.coprimality_failures);
            }
            match format {
                Format::Json => print_json(&fam)?,
                Format::Csv => {
                    let rows: Vec<FamilyMember> = fam
                        .members
                        .iter()
                        .map(|m| FamilyMember {
                            family: "alpha".into(),
                            k: m.k,
                            coprime_to_b: true,
                            t: m.alpha.clone(),
                            verdict: "Incomplete".into(),
                        })
                        .collect();
                    emit(&primitive::family_csv(&rows)?, None)?;
                }
            }
        }
        Family::Repunit => {
            let known = a.known.or_else(|| sec.known.clone()).unwrap_or_default();
            let rep = primitive::gen_repunit_incomplete(&params, &known).map_err(usage_if_domain)?;
            match format {
                Format::Json => print_json(&rep)?,
                Format::Csv => {
                    let row = FamilyMember {
                        family: "repunit".into(),
                        k: u32::try_from(rep.n).unwrap_or(u32::MAX),
                        coprime_to_b: true,
                        t: rep.t.clone(),
                        verdict: if rep.identity_holds { "Incomplete" } else { "Unverified" }.into(),
                    };
                    emit(&primitive::family_csv(&[row])?, None)?;
                }
            }
        }
        Family::Complete => {
            let kmax = required(kmax, None, "kmax")?;
            let rows = primitive::gen_primitive_complete_family(&params, kmax, &ctx.budgets)
                .map_err(usage_if_domain)?;
            match format {
                Format::Json => print_json(&rows)?,
                Format::Csv => emit(&primitive::family_csv(&rows)?, None)?,
            }
        }
    }
    Ok(EXIT_COMPLETE)
}

fn usage_if_domain(e: Error) -> Failure {
    match e {
        Error::Domain(m) => Failure::Usage(m),
        e => Failure::Lib(e),
    }
}

fn cmd_fourier(ctx: &Ctx, a: FourierArgs) -> Outcome {
    let params = ctx.params(&a.pair)?;
    let sec = &ctx.cfg.fourier;
    let t = required(a.t, sec.t, "t")?;
    let level = a.level.or(sec.level).unwrap_or(fourier::EVIDENCE_LEVEL);
    let grid = a
        .grid
        .or_else(|| sec.grid.clone())
        .unwrap_or_else(fourier::default_grid);
    let spec = match a.depth.or(sec.depth) {
        Some(k1) => TruncationSpec::new(k1, level, grid),
        None => TruncationSpec::adapted(&params, t.unsigned_abs(), level, grid),
    }
    .map_err(usage_if_domain)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.workers)
        .build()
        .map_err(|e| Failure::Io(e.to_string()))?;
    let samples = pool
        .install(|| fourier::q_lambda(&params, t, &spec))
        .map_err(usage_if_domain)?;
    let max_deficit = samples.iter().map(|s| 1.0 - s.q_lambda).fold(f64::MIN, f64::max);
    eprintln!(
        "K1 = {}, K2 = {}, max(1 - Q) = {max_deficit:.3e}{}",
        spec.product_depth,
        spec.spectrum_level,
        if max_deficit > fourier::EVIDENCE_THRESHOLD { " (flagged)" } else { "" }
    );
    emit(&fourier::q_lambda_csv(&samples)?, a.out.as_deref().or(sec.out.as_deref()))?;
    Ok(EXIT_COMPLETE)
}

fn cmd_verify(ctx: &Ctx, a: VerifyArgs) -> Outcome {
    let suite = match (a.suite, ctx.cfg.verify.suite.as_deref()) {
        (Some(s), _) => s,
        (None, Some(s)) => SuiteArg::from_str(s, true)
            .map_err(|_| Failure::Usage(format!("unknown suite {s:?}")))?,
        (None, None) => SuiteArg::All,
    };
    let suites: Vec<Suite> = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Witness => vec![Suite::Witness],
        SuiteArg::Orders => vec![Suite::Orders],
        SuiteArg::Families => vec![Suite::Families],
        SuiteArg::Section6 => vec![Suite::Section6],
    };
    let (mut passed, mut failed) = (0, 0);
    let mut text = String::new();
    for s in suites {
        let report = verify::run(s)?;
        for c in &report.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            text += &format!("{tag} {}/{}: {}\n", s.name(), c.name, c.detail);
            if c.passed {
                passed += 1;
            } else {
                failed += 1;
            }
        }
    }
    text += &format!("{passed} passed, {failed} failed\n");
    emit(&text, None)?;
    Ok(if failed == 0 { EXIT_COMPLETE } else { EXIT_FAILURE })
}
