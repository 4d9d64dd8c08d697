use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thlim::automorphism::{enumerate_fixing, find_constrained_automorphism, SearchOutcome, DEFAULT_BUDGET};
use thlim::ef::ef_equivalent;
use thlim::eval::{evaluate, tabulate, TruthMatrix, UnresolvedPolicy};
use thlim::families::{self, build_chain, build_member, oracle_family, FamilyKind, FamilySpec};
use thlim::homogeneity::{check_condition1, check_condition2, CheckConfig, ConditionReport, Place};
use thlim::io::{load_chain, load_structure};
use thlim::limit::{default_window, limit_report, LimitReport};
use thlim::oracle::{subset_sum_bound_report, OracleFamily};
use thlim::structure::{ChainFamily, Element};
use thlim::syntax::parse_formula;
use thlim::syntax::pool::{generate_pool_with, PoolConfig, SentencePool, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "thlim", version, about = "Limits of first-order theories along chains of finite structures")]
struct Cli {
    /// Seed for probe structures and sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a sentence in a structure file.
    Eval {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Tabulate a sentence pool along a chain.
    Tabulate(ChainArgs),
    /// Classify a sentence pool by limsup/liminf along a chain.
    Limit {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        window: Option<usize>,
        /// Also write the machine-readable report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Enumerate automorphisms, or search for a constrained one.
    Aut {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, value_delimiter = ',')]
        fix: Vec<Element>,
        #[arg(long, value_delimiter = ',', requires = "target")]
        carry: Vec<Element>,
        #[arg(long, value_delimiter = ',', requires = "carry")]
        target: Vec<Element>,
    },
    /// Check the automorphism conditions for limit existence on a chain.
    Thma {
        #[arg(long)]
        family: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        cond: u8,
        /// Structure file standing in for the union (condition 2).
        #[arg(long)]
        ambient: Option<PathBuf>,
    },
    /// Decide the k-round Ehrenfeucht–Fraïssé game.
    Efgame {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        rounds: usize,
    },
    /// Query a closed-form oracle.
    Oracle {
        #[arg(long)]
        family: String,
        #[arg(long)]
        schema: String,
        #[arg(long)]
        m: usize,
        /// Chain index (rat-subgroup).
        #[arg(long)]
        n: Option<usize>,
        /// Rank (free-abelian).
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Family catalog.
    Families {
        #[command(subcommand)]
        action: FamiliesAction,
    },
}

#[derive(Subcommand)]
enum FamiliesAction {
    List,
}

#[derive(Args)]
struct ChainArgs {
    /// Catalog family (`name[:key=value,...]`) or chain file.
    #[arg(long)]
    family: String,
    #[arg(long)]
    horizon: usize,
    /// `rank<k>[,atoms<b>]`, or `<schema>[:<m1>-<m2>]` for oracle families.
    #[arg(long)]
    pool: String,
}

enum CliError {
    Usage(String),
    Domain(String),
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn domain(e: impl ToString) -> CliError {
    CliError::Domain(e.to_string())
}

fn budget() -> Result<u64, CliError> {
    match std::env::var("THLIM_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("THLIM_BUDGET must be an integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

/// Ordered `key=value` pairs describing a run.
struct RunConfig(Vec<(&'static str, String)>);

impl RunConfig {
    fn new(command: &str, seed: u64) -> Self {
        RunConfig(vec![("command", command.to_string()), ("seed", seed.to_string())])
    }

    fn set(&mut self, key: &'static str, value: impl ToString) -> &mut Self {
        self.0.push((key, value.to_string()));
        self
    }

    fn header(&self, semantics: &str) -> String {
        let pairs: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# thlim {}\n# config: {}\n# semantics: {semantics}\n", self.0[0].1, pairs.join(" "))
    }

    fn section(&self) -> String {
        let mut out = String::from("[config]\n");
        for (k, v) in &self.0 {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

enum Source {
    Chain(ChainFamily),
    Oracle(OracleFamily),
}

fn resolve_family(name: &str, horizon: usize) -> Result<Source, CliError> {
    if Path::new(name).is_file() {
        let chain = load_chain(Path::new(name)).map_err(domain)?;
        if chain.len() < horizon {
            return Err(usage(format!("chain file has {} members, fewer than the horizon {horizon}", chain.len())));
        }
        let indices: Vec<usize> = (1..=horizon).collect();
        return Ok(Source::Chain(chain.subchain(&indices).map_err(domain)?));
    }
    let spec = FamilySpec::parse(name).map_err(usage)?;
    match spec.info().map_err(usage)?.kind {
        FamilyKind::Concrete => Ok(Source::Chain(build_chain(&spec, horizon).map_err(usage)?)),
        FamilyKind::Oracle => Ok(Source::Oracle(oracle_family(&spec).map_err(usage)?)),
    }
}

fn parse_instances(spec: &str) -> Result<(String, Vec<usize>), CliError> {
    let (schema, range) = spec.split_once(':').unwrap_or((spec, "1-10"));
    let (lo, hi) = range.split_once('-').unwrap_or((range, range));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| usage(format!("bad instance range `{range}`")));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo == 0 || lo > hi {
        return Err(usage(format!("bad instance range `{range}`")));
    }
    Ok((schema.to_string(), (lo..=hi).collect()))
}

struct Tabulated {
    matrix: TruthMatrix,
    pool_note: String,
    oracle: bool,
}

fn build_matrix(args: &ChainArgs, seed: u64, config: &mut RunConfig) -> Result<Tabulated, CliError> {
    if args.horizon == 0 {
        return Err(usage("horizon must be at least 1"));
    }
    config.set("family", &args.family).set("horizon", args.horizon).set("pool", &args.pool);
    match resolve_family(&args.family, args.horizon)? {
        Source::Chain(chain) => {
            let mut pool_config = PoolConfig::parse(&args.pool).map_err(usage)?;
            pool_config.seed = seed;
            let pool = generate_pool_with(chain.signature(), &pool_config).map_err(domain)?;
            let matrix = tabulate(&chain, &pool, UnresolvedPolicy::Error).map_err(domain)?;
            Ok(Tabulated { pool_note: pool_note(&pool, &pool_config), matrix, oracle: false })
        }
        Source::Oracle(family) => {
            let (schema, instances) = parse_instances(&args.pool)?;
            let matrix = family.matrix(&schema, &instances, args.horizon).map_err(usage)?;
            let note = format!("{} oracle rows for schema {schema}", matrix.rows.len());
            Ok(Tabulated { matrix, pool_note: note, oracle: true })
        }
    }
}

fn pool_note(pool: &SentencePool, config: &PoolConfig) -> String {
    let truncation = match pool.truncation() {
        Some(t) => format!("TRUNCATED at {} candidates", t.cap),
        None => "complete enumeration".to_string(),
    };
    format!(
        "{} sentences, rank <= {}, atoms <= {}, negation-closed, {truncation}",
        pool.len(),
        config.max_rank,
        config.atom_budget
    )
}

fn matrix_table(matrix: &TruthMatrix, leading: &[Vec<String>], heads: &[&str]) -> String {
    let mut out = String::new();
    let mut head: Vec<String> = heads.iter().map(|s| s.to_string()).collect();
    head.push("sentence".into());
    head.extend((1..=matrix.horizon).map(|n| n.to_string()));
    let _ = writeln!(out, "{}", head.join("\t"));
    for (k, row) in matrix.rows.iter().enumerate() {
        let mut cells: Vec<String> = leading.get(k).cloned().unwrap_or_default();
        cells.push(row.label.clone());
        cells.extend(row.symbols().iter().map(char::to_string));
        let _ = writeln!(out, "{}", cells.join("\t"));
    }
    out
}

fn semantics(oracle: bool, report: Option<&LimitReport>) -> String {
    if oracle {
        return "oracle-exact (closed-form eventual behavior)".into();
    }
    match report {
        Some(r) => format!("horizon-relative (window {} over indices 1..{})", r.window, r.horizon),
        None => "horizon-relative (observed indices only)".into(),
    }
}

fn run_tabulate(args: &ChainArgs, seed: u64) -> Result<String, CliError> {
    let mut config = RunConfig::new("tabulate", seed);
    let t = build_matrix(args, seed, &mut config)?;
    let mut out = config.header(&semantics(t.oracle, None));
    let _ = writeln!(out, "# pool: {}", t.pool_note);
    out.push_str(&matrix_table(&t.matrix, &[], &[]));
    Ok(out)
}

fn run_limit(
    args: &ChainArgs,
    window: Option<usize>,
    report_path: Option<&Path>,
    seed: u64,
) -> Result<String, CliError> {
    let mut config = RunConfig::new("limit", seed);
    let t = build_matrix(args, seed, &mut config)?;
    let w = window.unwrap_or_else(|| default_window(args.horizon));
    config.set("window", w);
    let report = limit_report(&t.matrix, w).map_err(usage)?;
    let sem = semantics(t.oracle, Some(&report));

    let mut out = config.header(&sem);
    let _ = writeln!(out, "# pool: {}", t.pool_note);
    let _ = writeln!(out, "limitExists={}", report.limit_exists);
    for class in ["in-liminf", "in-limsup-only", "outside-limsup"] {
        let count = report.rows.iter().filter(|r| r.classification.as_str() == class).count();
        let _ = writeln!(out, "{class}={count}");
    }
    out.push('\n');
    let _ = writeln!(out, "{:<15} {:<17} {:<22} sentence", "class", "exactness", "oscillations");
    for row in &report.rows {
        let osc = if row.oscillations.is_empty() {
            "-".to_string()
        } else {
            let shown: Vec<String> = row.oscillations.iter().take(6).map(|n| n.to_string()).collect();
            let more = if row.oscillations.len() > 6 { ",..." } else { "" };
            format!("{}{more}", shown.join(","))
        };
        let _ = writeln!(
            out,
            "{:<15} {:<17} {:<22} {}",
            row.classification.as_str(),
            row.exactness.as_str(),
            osc,
            row.label
        );
    }

    if let Some(path) = report_path {
        let mut doc = config.section();
        let _ = writeln!(
            doc,
            "[summary]\nsemantics={sem}\nhorizon={}\nwindow={w}\nlimitExists={}",
            report.horizon, report.limit_exists
        );
        doc.push_str("[matrix]\n");
        let leading: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|r| vec![r.classification.as_str().to_string(), r.exactness.as_str().to_string()])
            .collect();
        doc.push_str(&matrix_table(&t.matrix, &leading, &["class", "exactness"]));
        std::fs::write(path, doc).map_err(|e| domain(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(out)
}

fn fmt_perm(p: &[Element]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn fmt_tuple(t: &[Element]) -> String {
    let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn run_aut(
    structure: &Path,
    fix: &[Element],
    carry: &[Element],
    target: &[Element],
    seed: u64,
) -> Result<String, CliError> {
    let s = load_structure(structure).map_err(domain)?;
    let budget = budget()?;
    for &e in fix.iter().chain(carry).chain(target) {
        if e >= s.size() {
            return Err(usage(format!("element {e} is outside the universe 0..{}", s.size())));
        }
    }
    let mut config = RunConfig::new("aut", seed);
    config.set("structure", structure.display()).set("fix", fmt_tuple(fix)).set("budget", budget);
    let mut out;
    if carry.is_empty() {
        out = config.header("exhaustive search within the node budget");
        let auts = enumerate_fixing(&s, fix, budget);
        let _ = writeln!(out, "automorphisms={} complete={}", auts.len(), auts.complete);
        for p in &auts.perms {
            let _ = writeln!(out, "{}", fmt_perm(p));
        }
    } else {
        config.set("carry", fmt_tuple(carry)).set("target", fmt_tuple(target));
        out = config.header("exhaustive search within the node budget");
        match find_constrained_automorphism(&s, fix, carry, target, budget) {
            SearchOutcome::Found(p) => {
                let _ = writeln!(out, "result=found\nautomorphism={}", fmt_perm(&p));
            }
            SearchOutcome::Absent => out.push_str("result=absent\n"),
            SearchOutcome::Indeterminate => out.push_str("result=indeterminate (budget exhausted)\n"),
        }
    }
    Ok(out)
}

fn place_name(place: Place) -> String {
    match place {
        Place::Member(j) => format!("j={j}"),
        Place::Ambient => "ambient".into(),
    }
}

fn render_thma(chain: &ChainFamily, report: &ConditionReport, config: &RunConfig) -> String {
    let sem = match &report.ambient {
        Some(a) => format!("horizon-relative; ambient {a}"),
        None => format!("horizon-relative (indices 1..{})", report.horizon),
    };
    let mut out = config.header(&sem);
    let d = report.designated;
    let _ = writeln!(out, "designated-member={d} (size {})", chain.member(d).size());
    for cert in &report.certificates {
        match cert.i {
            Some(i) => {
                let _ = writeln!(out, "a={} certified i={i} (size {})", fmt_tuple(&cert.a), chain.member(i).size());
                for ev in &cert.evidence {
                    let _ = writeln!(
                        out,
                        "  {}: {} orbit representatives of {} tuples{}",
                        place_name(ev.place),
                        ev.reps.len(),
                        ev.orbits.len(),
                        if ev.orbit_group_complete { "" } else { " (orbit group incomplete)" }
                    );
                    for (b, f) in &ev.reps {
                        let _ = writeln!(out, "    b={} f={}", fmt_tuple(b), fmt_perm(f));
                    }
                }
            }
            None => {
                let _ = writeln!(out, "a={} FAILED", fmt_tuple(&cert.a));
            }
        }
        for f in &cert.failures {
            let why = if f.indeterminate { "budget exhausted" } else { "no automorphism" };
            let _ = writeln!(out, "  rejected i={} at {} b={}: {why}", f.i, place_name(f.place), fmt_tuple(&f.b));
        }
    }
    let certified = report.certificates.iter().filter(|c| c.is_certified()).count();
    let _ = write!(out, "summary: condition {} certified {certified}/{}", report.condition, report.certificates.len());
    match report.uniform_index() {
        Some(i) => {
            let _ = writeln!(out, " uniform-i={i}");
        }
        None => out.push('\n'),
    }
    out
}

fn run_thma(
    family: &str,
    horizon: usize,
    m: usize,
    cond: u8,
    ambient: Option<&Path>,
    seed: u64,
) -> Result<String, CliError> {
    let budget = budget()?;
    let Source::Chain(chain) = resolve_family(family, horizon)? else {
        return Err(usage("oracle families have no finite members to search"));
    };
    let mut config = RunConfig::new("thma", seed);
    config.set("family", family).set("horizon", horizon).set("m", m).set("cond", cond).set("budget", budget);
    let check = CheckConfig::new(m, budget);
    let report = if cond == 1 {
        check_condition1(&chain, &check).map_err(usage)?
    } else {
        let (structure, label) = match ambient {
            Some(path) => (load_structure(path).map_err(domain)?, path.display().to_string()),
            None => {
                let spec =
                    FamilySpec::parse(family).map_err(|_| usage("--ambient is required for chains read from files"))?;
                let n = horizon + 1;
                (build_member(&spec, n).map_err(usage)?, format!("{spec}#{n}"))
            }
        };
        config.set("ambient", &label);
        check_condition2(&chain, &structure, &label, None, &check).map_err(domain)?
    };
    Ok(render_thma(&chain, &report, &config))
}

fn run_oracle(
    family: &str,
    schema: &str,
    m: usize,
    n: Option<usize>,
    rank: Option<usize>,
    seed: u64,
) -> Result<String, CliError> {
    let spec = FamilySpec::parse(family).map_err(usage)?;
    let oracle = oracle_family(&spec).map_err(usage)?;
    let index = match (oracle, n, rank) {
        (OracleFamily::FreeAbelian, _, Some(r)) => r,
        (OracleFamily::FreeAbelian, _, None) => return Err(usage("free-abelian needs --rank")),
        (_, Some(n), _) => n,
        (_, None, _) => return Err(usage("rat-subgroup needs --n")),
    };
    let mut config = RunConfig::new("oracle", seed);
    config.set("family", oracle.name()).set("schema", schema).set("m", m);
    let value = if oracle == OracleFamily::FreeAbelian {
        config.set("rank", index);
        oracle.sentence(schema, m).map_err(usage)?;
        // Rank 0 is the trivial group, which is not a chain member.
        thlim::oracle::free_abelian_subset_sum_oracle(m, index)
    } else {
        config.set("n", index);
        oracle.decide(schema, m, index).map_err(usage)?
    };
    let mut out = config.header("oracle-exact (closed form)");
    let sentence = oracle.sentence(schema, m).map_err(usage)?;
    let _ = writeln!(out, "sentence={sentence}");
    let _ = writeln!(out, "value={value}");
    let eventual = oracle.eventual(schema, m).map_err(usage)?;
    let _ = writeln!(out, "eventual={eventual:?}");
    if oracle == OracleFamily::FreeAbelian {
        out.push_str("\n[bounds] rank < m criterion versus the rank < m-1 bound, brute force over entries -2..2\n");
        let _ = writeln!(out, "m\trank\tbrute-force\trank<m\trank<m-1\tstatus");
        for row in subset_sum_bound_report(3, 3) {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                row.m,
                row.rank,
                row.brute_force,
                row.criterion,
                row.loose_bound_asserts,
                row.status()
            );
        }
    }
    Ok(out)
}

fn run_families() -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<18} {:<9} {:<14} summary", "name", "kind", "params");
    for f in families::family_catalog() {
        let params: Vec<String> = f.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let params = if params.is_empty() { "-".to_string() } else { params.join(",") };
        let kind = match f.kind {
            FamilyKind::Concrete => "concrete",
            FamilyKind::Oracle => "oracle",
        };
        let _ = writeln!(out, "{:<18} {:<9} {:<14} {}", f.name, kind, params, f.summary);
    }
    out
}

fn run(cli: Cli) -> Result<String, CliError> {
    let seed = cli.seed;
    match cli.command {
        Command::Eval { structure, formula } => {
            let s = load_structure(&structure).map_err(domain)?;
            let f = parse_formula(&formula, s.signature()).map_err(usage)?;
            Ok(format!("{}\n", evaluate(&s, &f).map_err(domain)?))
        }
        Command::Tabulate(args) => run_tabulate(&args, seed),
        Command::Limit { chain, window, report } => run_limit(&chain, window, report.as_deref(), seed),
        Command::Aut { structure, fix, carry, target } => run_aut(&structure, &fix, &carry, &target, seed),
        Command::Thma { family, horizon, m, cond, ambient } => {
            run_thma(&family, horizon, m, cond, ambient.as_deref(), seed)
        }
        Command::Efgame { left, right, rounds } => {
            let a = load_structure(&left).map_err(domain)?;
            let b = load_structure(&right).map_err(domain)?;
            let eq = ef_equivalent(&a, &b, rounds).map_err(usage)?;
            Ok(format!("{}\n", if eq { "equivalent" } else { "inequivalent" }))
        }
        Command::Oracle { family, schema, m, n, rank } => run_oracle(&family, &schema, m, n, rank, seed),
        Command::Families { action: FamiliesAction::List } => Ok(run_families()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
