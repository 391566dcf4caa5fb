use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grouplog::characters::irreducible_characters;
use grouplog::groupring::parse::parse_element;
use grouplog::padiclog::{group_log_unit, guard};
use grouplog::pgroup::build_group;
use grouplog::suites::{parse_ring, run_suite, Cell, SuiteReport, SUITES};
use grouplog::Error;
use serde_json::{json, Value};

/// println! that tolerates a closed pipe (`grouplog char-table Q16 | head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "grouplog", version, about = "Integral group logarithms over p-adic group rings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run property suites on one (p, group, ring, precision) cell.
    Check(CheckArgs),
    /// Evaluate an element expression.
    Eval(EvalArgs),
    /// Print the irreducible characters of a p-group.
    CharTable(TableArgs),
}

#[derive(Args, Default)]
struct CheckArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    ring: Option<String>,
    #[arg(long)]
    prec: Option<u32>,
    /// Suite name, or `all`.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Extension for the descent suites, written f=<degree>.
    #[arg(long)]
    ext: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    expr: String,
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value = "C2")]
    group: String,
    #[arg(long, default_value = "Zp")]
    ring: String,
    #[arg(long, default_value_t = 6)]
    prec: u32,
    /// Also print the group logarithm.
    #[arg(long)]
    log: bool,
}

#[derive(Args)]
struct TableArgs {
    group: String,
    /// Defaults to the prime dividing the group order.
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    json: bool,
}

/// Usage problems exit 2, bug signals 3.
fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_internal() { 3 } else { 2 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Check(a) => check(a),
        Cmd::Eval(a) => eval(a),
        Cmd::CharTable(a) => char_table(a),
    };
    r.unwrap_or_else(|e| exit_for(&e))
}

// ------------------------------------------------------------------ check

struct Config {
    cell: Cell,
    suite: String,
    samples: usize,
    seed: u64,
}

fn read_config(path: &PathBuf) -> grouplog::Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        out.insert(k.trim().trim_start_matches("--").to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse_ext(s: &str) -> grouplog::Result<u32> {
    s.strip_prefix("f=")
        .and_then(|d| d.parse().ok())
        .filter(|&f| f >= 1)
        .ok_or_else(|| Error::Config(format!("--ext expects f=<degree>, got '{s}'")))
}

fn resolve(a: CheckArgs) -> grouplog::Result<(Config, Option<PathBuf>)> {
    let file = match &a.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    for k in file.keys() {
        if !["p", "group", "ring", "prec", "suite", "samples", "seed", "ext", "out"].contains(&k.as_str()) {
            return Err(Error::Config(format!("unknown config key '{k}'")));
        }
    }
    fn num<T: std::str::FromStr>(file: &BTreeMap<String, String>, k: &str) -> grouplog::Result<Option<T>> {
        file.get(k).map(|v| v.parse().map_err(|_| Error::Config(format!("bad value for {k}: '{v}'")))).transpose()
    }
    let p = a.p.or(num(&file, "p")?).unwrap_or(2);
    let group = a.group.or(file.get("group").cloned()).ok_or_else(|| Error::Config("--group is required".into()))?;
    let ring = a.ring.or(file.get("ring").cloned()).unwrap_or_else(|| "Zp".into());
    let prec = a.prec.or(num(&file, "prec")?).unwrap_or(6);
    let suite = a.suite.or(file.get("suite").cloned()).unwrap_or_else(|| "all".into());
    let samples = a.samples.or(num(&file, "samples")?).unwrap_or(100);
    let seed = a.seed.or(num(&file, "seed")?).unwrap_or(42);
    let ext = a.ext.or(file.get("ext").cloned()).map(|s| parse_ext(&s)).transpose()?;
    let out = a.out.or(file.get("out").map(PathBuf::from));

    if !(2..=16).contains(&prec) {
        return Err(Error::Config(format!("precision must lie in [2, 16], got {prec}")));
    }
    if !(1..=10000).contains(&samples) {
        return Err(Error::Config(format!("samples must lie in [1, 10000], got {samples}")));
    }
    if suite != "all" && !SUITES.contains(&suite.as_str()) {
        return Err(Error::Config(format!("unknown suite '{suite}'; expected one of: all, {}", SUITES.join(", "))));
    }
    // validate the cell up front so bad specs exit 2 before any work
    build_group(&group, p)?;
    parse_ring(p, &ring, prec)?;
    Ok((Config { cell: Cell { p, group, ring, prec, ext }, suite, samples, seed }, out))
}

fn report_json(cfg: &Config, reports: &[SuiteReport]) -> Value {
    json!({
        "config": {
            "p": cfg.cell.p,
            "group": cfg.cell.group,
            "ring": cfg.cell.ring,
            "prec": cfg.cell.prec,
            "ext": cfg.cell.ext,
            "suite": cfg.suite,
            "samples": cfg.samples,
            "seed": cfg.seed,
        },
        "pass": reports.iter().all(|r| r.pass),
        "suites": reports,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn check(a: CheckArgs) -> grouplog::Result<ExitCode> {
    let (cfg, out) = resolve(a)?;
    let names: Vec<&str> = if cfg.suite == "all" { SUITES.to_vec() } else { vec![cfg.suite.as_str()] };
    let mut reports = Vec::new();
    for name in names {
        let r = run_suite(name, &cfg.cell, cfg.samples, cfg.seed)?;
        let status = match (&r.skipped, r.pass) {
            (Some(why), _) => format!("skip  ({why})"),
            (None, true) => "pass".to_string(),
            (None, false) => format!("FAIL  ({} failures)", r.failures.len()),
        };
        eprintln!("{name:<20} {status:<40} {:>5} samples {:>7} ms", r.samples, r.elapsed_ms);
        reports.push(r);
    }
    let mut text = serde_json::to_string_pretty(&report_json(&cfg, &reports)).expect("report serialises");
    text.push('\n');
    match out {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        }
        None => {
            use std::io::Write;
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    Ok(if reports.iter().all(|r| r.pass) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

// ------------------------------------------------------------------- eval

fn eval(a: EvalArgs) -> grouplog::Result<ExitCode> {
    let group = build_group(&a.group, a.p)?;
    let ring = parse_ring(a.p, &a.ring, a.prec)?;
    // logs need guard digits on the input
    let n_in = if a.log { a.prec + guard(&group, a.prec) } else { a.prec };
    let x = match parse_element(&a.expr, &ring, &group, n_in) {
        Ok(x) => x,
        Err(Error::Parse { pos, msg }) => {
            eprintln!("parse error at position {pos}: {msg}");
            eprintln!("  {}", a.expr);
            eprintln!("  {}^", " ".repeat(pos.saturating_sub(1)));
            return Ok(ExitCode::from(2));
        }
        Err(e) => return Err(e),
    };
    let shown = if a.log { x.reduce(a.prec.min(x.prec()))? } else { x.clone() };
    say!("element: {}", shown.format_with(true));
    say!("phi:     {}", shown.phi().format_with(true));
    if a.log {
        let l = group_log_unit(&x, a.prec.min(x.prec().saturating_sub(guard(&group, a.prec))).max(1))?;
        say!("log:     {}", l.format_with(true));
    }
    Ok(ExitCode::SUCCESS)
}

// -------------------------------------------------------------- char-table

fn infer_prime(spec: &str) -> grouplog::Result<u64> {
    let mut last = None;
    for p in (2..=127u64).filter(|&p| grouplog::zmod::is_prime(p)) {
        match build_group(spec, p) {
            Ok(_) => return Ok(p),
            Err(e @ (Error::InvalidGroup(_) | Error::OrderCap(_))) => return Err(e),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::InvalidGroup(spec.into())))
}

fn char_table(a: TableArgs) -> grouplog::Result<ExitCode> {
    let p = match a.p {
        Some(p) => p,
        None => infer_prime(&a.group)?,
    };
    let g = build_group(&a.group, p)?;
    let table = irreducible_characters(&g)?;
    let reps: Vec<String> = g.classes().iter().map(|c| g.word(c[0])).collect();
    let root = p.pow(table.e);
    if a.json {
        let chars: Vec<Value> = table
            .chars
            .iter()
            .map(|c| json!({ "degree": c.degree, "values": c.values.iter().map(|v| v.to_string()).collect::<Vec<_>>() }))
            .collect();
        let v = json!({ "group": a.group, "p": p, "classes": reps, "root_order": root, "characters": chars });
        say!("{}", serde_json::to_string_pretty(&v).expect("table serialises"));
        return Ok(ExitCode::SUCCESS);
    }
    say!("{}: {} classes, values in Z[z] with z a root of unity of order {}", a.group, reps.len(), root);
    let cells: Vec<Vec<String>> = table.chars.iter().map(|c| c.values.iter().map(|v| v.to_string()).collect()).collect();
    let width = reps.iter().chain(cells.iter().flatten()).map(|s| s.chars().count()).max().unwrap_or(1);
    let row = |label: &str, xs: &[String]| {
        let body: Vec<String> = xs.iter().map(|s| format!("{s:>width$}")).collect();
        say!("{label:<6}{}", body.join("  "));
    };
    row("", &reps);
    for (i, c) in cells.iter().enumerate() {
        row(&format!("X{}", i + 1), c);
    }
    Ok(ExitCode::SUCCESS)
}
