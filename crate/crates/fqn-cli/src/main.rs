//! Command-line front end: evaluate chains, decompose (g, poles) pairs,
//! analyze instances, enumerate spectra, and generate/verify the explicit
//! constructions. Every numeric path delegates to the library; this module
//! only parses, dispatches and prints.
//!
//! Exit codes: 0 success (verification mismatches are data, not errors),
//! 2 usage or validation failure, 3 evaluation budget exceeded.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqn::carlitz::{decompose, CarlitzChain, PoleSet};
use fqn::constructions::{self, admissible_points, verify, FamilyKind, SweepPoint};
use fqn::family::{
    enumerate_spectrum, interpolate, is_permutation, sum_of_values, FamilyError, FamilyInstance,
    SpectrumMode, SpectrumOptions, ValueProfile,
};
use fqn::gf::{FieldCtx, FieldElement};
use fqn::LinearMap;
use serde_json::json;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fqn", version, about = "Value sets of n-point modifications of linear permutations over F_q")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GlobalOpts {
    /// Prime characteristic p (odd, q = p^r >= 5)
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Extension degree r
    #[arg(long, global = true, default_value_t = 1)]
    r: usize,
    /// Modulus coefficients c0,c1,...,cr (little-endian, monic); defaults to
    /// the smallest monic irreducible
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    modulus: Option<Vec<i64>>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for sampled runs (recorded in the output)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum table evaluations for enumeration
    #[arg(long, global = true, default_value_t = 100_000_000)]
    budget: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a chain at one point or over the whole field
    Eval(EvalArgs),
    /// Recover the chain from a linear map and its pole set, with the audit trace
    Decompose(DecomposeArgs),
    /// Full value-set analysis of one instance (from a chain or a (g, poles) pair)
    Analyze(AnalyzeArgs),
    /// Enumerate attained |V_F| sizes for (q, n), with one witness per size
    Spectrum(SpectrumArgs),
    /// Generate one explicit construction and report predicted vs observed profile
    Construct(FamilyArgs),
    /// Verify constructions against brute force, optionally sweeping parameters
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Chain constants c0,c1,...,cn
    #[arg(long, allow_hyphen_values = true)]
    chain: String,
    /// Point to evaluate at
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Evaluate at every field element
    #[arg(long)]
    all: bool,
    /// Also print F = f + x
    #[arg(long)]
    plus_x: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Linear map as a,b
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    /// Poles x1,...,xn (x1 = 0, xn = -b/a)
    #[arg(long, allow_hyphen_values = true)]
    poles: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, allow_hyphen_values = true)]
    chain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    poles: Option<String>,
    /// Include interpolated coefficient lists for f and F
    #[arg(long)]
    poly: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Number of modification points
    #[arg(long)]
    n: usize,
    /// Draw this many seeded random instances instead of exhausting
    #[arg(long)]
    sample: Option<u64>,
}

#[derive(Args)]
struct FamilyArgs {
    /// One of: cor3i cor3ii cor5i cor5ii cor5iii cor6 thm7i thm7ii thm7iii thm7iv coset
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Sweep every admissible parameter point
    #[arg(long)]
    sweep: bool,
    /// Sweep b only, first admissible values elsewhere
    #[arg(long = "sweep-b")]
    sweep_b: bool,
}

enum CliError {
    Usage(String),
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Budget(m) => m,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    // die quietly when the reader of a pipe goes away (fqn ... | head)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = build_ctx(&cli.global)?;
    match &cli.cmd {
        Cmd::Eval(args) => cmd_eval(&ctx, cli.global.format, args),
        Cmd::Decompose(args) => cmd_decompose(&ctx, cli.global.format, args),
        Cmd::Analyze(args) => cmd_analyze(&ctx, cli.global.format, args),
        Cmd::Spectrum(args) => cmd_spectrum(&ctx, &cli.global, args),
        Cmd::Construct(args) => cmd_construct(&ctx, cli.global.format, args),
        Cmd::Verify(args) => cmd_verify(&ctx, cli.global.format, args),
    }
}

fn build_ctx(g: &GlobalOpts) -> Result<FieldCtx, CliError> {
    let p = g.p.ok_or_else(|| CliError::Usage("--p is required".into()))?;
    match &g.modulus {
        Some(m) => FieldCtx::with_modulus(p, g.r, m).map_err(usage),
        None => FieldCtx::new(p, g.r).map_err(usage),
    }
}

/// Splits on commas that are not inside brackets, so extension elements
/// like [1,2] survive inside lists.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// An element is a (possibly negative) integer constant, or [c0,c1,...]
/// coefficients for extension fields; everything reduces mod p.
fn parse_element(ctx: &FieldCtx, tok: &str) -> Result<FieldElement, CliError> {
    let tok = tok.trim();
    if let Some(inner) = tok.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| CliError::Usage(format!("unclosed bracket in element '{tok}'")))?;
        let coeffs: Vec<i64> = inner
            .split(',')
            .map(|c| c.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Usage(format!("bad coefficient in '{tok}': {e}")))?;
        ctx.from_coeffs(&coeffs).map_err(usage)
    } else {
        let v: i64 = tok
            .parse()
            .map_err(|e| CliError::Usage(format!("bad element '{tok}': {e}")))?;
        Ok(ctx.element(v))
    }
}

fn parse_elements(ctx: &FieldCtx, s: &str) -> Result<Vec<FieldElement>, CliError> {
    split_top_level(s)
        .into_iter()
        .map(|tok| parse_element(ctx, tok))
        .collect()
}

fn parse_chain(ctx: &FieldCtx, s: &str) -> Result<CarlitzChain, CliError> {
    CarlitzChain::new(ctx, parse_elements(ctx, s)?).map_err(usage)
}

fn parse_g(ctx: &FieldCtx, s: &str) -> Result<LinearMap, CliError> {
    let parts = parse_elements(ctx, s)?;
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("--g takes a,b (got {} values)", parts.len())));
    }
    LinearMap::new(ctx, parts[0].clone(), parts[1].clone()).map_err(usage)
}

fn join_elems(elems: &[FieldElement]) -> String {
    elems.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_eval(ctx: &FieldCtx, format: Format, args: &EvalArgs) -> Result<(), CliError> {
    let chain = parse_chain(ctx, &args.chain)?;
    if args.all == args.x.is_some() {
        return Err(CliError::Usage("eval needs exactly one of --x or --all".into()));
    }
    let points: Vec<FieldElement> = if args.all {
        ctx.elements().collect()
    } else {
        vec![parse_element(ctx, args.x.as_ref().unwrap())?]
    };
    if format == Format::Tsv {
        if args.plus_x {
            println!("x\tf\tf_plus_x");
        } else {
            println!("x\tf");
        }
    }
    for x in points {
        let f = chain.eval(&x);
        match format {
            Format::Json => {
                let mut obj = json!({
                    "q": ctx.q(),
                    "x": x,
                    "f": f,
                });
                if args.plus_x {
                    obj["f_plus_x"] = serde_json::to_value(ctx.add(&f, &x)).unwrap();
                }
                println!("{obj}");
            }
            Format::Tsv => {
                if args.plus_x {
                    println!("{x}\t{f}\t{}", ctx.add(&f, &x));
                } else {
                    println!("{x}\t{f}");
                }
            }
        }
    }
    Ok(())
}

fn cmd_decompose(ctx: &FieldCtx, format: Format, args: &DecomposeArgs) -> Result<(), CliError> {
    let g = parse_g(ctx, &args.g)?;
    let poles = PoleSet::new(ctx, parse_elements(ctx, &args.poles)?).map_err(usage)?;
    let dec = decompose(ctx, &g, &poles).map_err(usage)?;
    match format {
        Format::Json => {
            let obj = json!({
                "q": ctx.q(),
                "g": g,
                "poles": poles.points(),
                "chain": dec.chain.constants(),
                "trace": dec.trace,
            });
            println!("{obj}");
        }
        Format::Tsv => {
            println!("a\tb\tpoles\tchain\tepsilon");
            println!(
                "{}\t{}\t{}\t{}\t{}",
                g.a,
                g.b,
                join_elems(poles.points()),
                join_elems(dec.chain.constants()),
                dec.trace.epsilon
            );
        }
    }
    Ok(())
}

fn cmd_analyze(ctx: &FieldCtx, format: Format, args: &AnalyzeArgs) -> Result<(), CliError> {
    let (g, poles, chain) = match (&args.chain, &args.g, &args.poles) {
        (Some(chain), None, None) => {
            let chain = parse_chain(ctx, chain)?;
            let validity = chain.validate();
            if !validity.is_valid() {
                return Err(CliError::Usage(format!(
                    "chain is not family-valid: {validity:?}"
                )));
            }
            let g = chain.linear_part().map_err(usage)?;
            let poles = chain.poles().map_err(usage)?;
            (g, poles, chain)
        }
        (None, Some(gs), Some(ps)) => {
            let g = parse_g(ctx, gs)?;
            let poles = PoleSet::new(ctx, parse_elements(ctx, ps)?).map_err(usage)?;
            let chain = decompose(ctx, &g, &poles).map_err(usage)?.chain;
            (g, poles, chain)
        }
        _ => {
            return Err(CliError::Usage(
                "analyze needs either --chain or both --g and --poles".into(),
            ))
        }
    };
    let inst = FamilyInstance::build(ctx, &g, &poles).map_err(usage)?;
    let profile = ValueProfile::from_table(ctx, inst.f_plus_table());
    let sum = sum_of_values(ctx, inst.f_plus_table());
    match format {
        Format::Json => {
            let mut obj = json!({
                "q": ctx.q(),
                "n": poles.n(),
                "g": g,
                "poles": poles.points(),
                "chain": chain.constants(),
                "f_is_permutation": is_permutation(ctx, inst.f_table()),
                "complete_mapping": inst.is_complete_mapping(),
                "sum_f_plus_x": sum,
                "profile": profile,
                "sparse_counts": profile.sparse_counts(),
            });
            if args.poly {
                obj["f_poly"] = serde_json::to_value(interpolate(ctx, inst.f_table())).unwrap();
                obj["f_plus_x_poly"] =
                    serde_json::to_value(interpolate(ctx, inst.f_plus_table())).unwrap();
            }
            println!("{obj}");
        }
        Format::Tsv => {
            println!("q\tn\ta\tb\tpoles\tchain\tsize\tmax_count\tsparse_counts\tf_is_permutation\tcomplete_mapping");
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                ctx.q(),
                poles.n(),
                g.a,
                g.b,
                join_elems(poles.points()),
                join_elems(chain.constants()),
                profile.size(),
                profile.max_count,
                profile
                    .sparse_counts()
                    .iter()
                    .map(|(i, v)| format!("v{i}={v}"))
                    .collect::<Vec<_>>()
                    .join(","),
                is_permutation(ctx, inst.f_table()),
                inst.is_complete_mapping()
            );
        }
    }
    Ok(())
}

fn cmd_spectrum(ctx: &FieldCtx, global: &GlobalOpts, args: &SpectrumArgs) -> Result<(), CliError> {
    let mode = match args.sample {
        Some(count) => SpectrumMode::Sample { count, seed: global.seed },
        None => SpectrumMode::Exhaustive,
    };
    let opts = SpectrumOptions { mode, budget: global.budget };
    let report = enumerate_spectrum(ctx, args.n, &opts).map_err(|e| match e {
        FamilyError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;
    match global.format {
        Format::Json => {
            let mut meta = json!({
                "q": report.q,
                "n": report.n,
                "mode": report.mode,
                "total_instances": report.total_instances,
            });
            if let Some(c) = report.sample_count {
                meta["sample_count"] = json!(c);
            }
            if let Some(s) = report.seed {
                meta["seed"] = json!(s);
            }
            println!("{meta}");
            for entry in &report.entries {
                println!("{}", serde_json::to_string(entry).unwrap());
            }
        }
        Format::Tsv => {
            println!(
                "# q={} n={} mode={}{} total_instances={}",
                report.q,
                report.n,
                report.mode,
                report
                    .seed
                    .map(|s| format!(" seed={s}"))
                    .unwrap_or_default(),
                report.total_instances
            );
            println!("size\ta\tb\tpoles\tchain\tcount");
            for e in &report.entries {
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    e.size,
                    e.witness.a,
                    e.witness.b,
                    join_elems(&e.witness.poles),
                    join_elems(&e.witness.chain),
                    e.count.map(|c| c.to_string()).unwrap_or_else(|| "-".into())
                );
            }
        }
    }
    Ok(())
}

fn sweep_point(ctx: &FieldCtx, args: &FamilyArgs) -> Result<SweepPoint, CliError> {
    let parse_opt = |o: &Option<String>| -> Result<Option<FieldElement>, CliError> {
        o.as_ref().map(|s| parse_element(ctx, s)).transpose()
    };
    Ok(SweepPoint {
        n: args.n,
        c: parse_opt(&args.c)?,
        d: parse_opt(&args.d)?,
        a: parse_opt(&args.a)?,
        b: parse_opt(&args.b)?,
        alpha: parse_opt(&args.alpha)?,
    })
}

fn family_kind(name: &str) -> Result<FamilyKind, CliError> {
    FamilyKind::parse(name)
        .ok_or_else(|| CliError::Usage(format!("unknown family '{name}'")))
}

fn print_report(
    format: Format,
    header_done: &mut bool,
    report: &constructions::ConstructionReport,
) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(report).unwrap()),
        Format::Tsv => {
            if !*header_done {
                println!("family\tq\tn\tparams\ta\tb\tpoles\tchain\tsize\tmax_count\tmatch\tmismatches");
                *header_done = true;
            }
            let params = report
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                report.family,
                report.q,
                report.n,
                params,
                report.g.a,
                report.g.b,
                join_elems(&report.poles),
                join_elems(&report.chain),
                report.observed.size(),
                report.observed.max_count,
                report.matches,
                report.mismatches.join("; ")
            );
        }
    }
}

fn cmd_construct(ctx: &FieldCtx, format: Format, args: &FamilyArgs) -> Result<(), CliError> {
    let kind = family_kind(&args.family)?;
    let point = sweep_point(ctx, args)?;
    let con = constructions::build(kind, ctx, &point).map_err(usage)?;
    let report = verify(&con).map_err(usage)?;
    let mut header_done = false;
    print_report(format, &mut header_done, &report);
    Ok(())
}

fn cmd_verify(ctx: &FieldCtx, format: Format, args: &VerifyArgs) -> Result<(), CliError> {
    let kind = family_kind(&args.family.family)?;
    let mut header_done = false;
    if args.sweep || args.sweep_b {
        let points =
            admissible_points(kind, ctx, args.family.n, args.sweep_b).map_err(usage)?;
        if points.is_empty() {
            return Err(CliError::Usage("no admissible parameter points".into()));
        }
        for point in points {
            let con = constructions::build(kind, ctx, &point).map_err(usage)?;
            let report = verify(&con).map_err(usage)?;
            print_report(format, &mut header_done, &report);
        }
    } else {
        let point = sweep_point(ctx, &args.family)?;
        let con = constructions::build(kind, ctx, &point).map_err(usage)?;
        let report = verify(&con).map_err(usage)?;
        print_report(format, &mut header_done, &report);
    }
    Ok(())
}
