use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rpq_core::approx::enum_approx;
use rpq_core::enumerate::{enum_baseline, enum_sublinear, sublinear_prepare, DynamicBaseline, SublinearMode};
use rpq_core::eval::{boole, check, count, eval_all, product_for, witness};
use rpq_core::reductions::{generate_instance, verify, GeneratedInstance, ReductionKind, Sidecar};
use rpq_core::restricted::enum_restricted;
use rpq_core::script::{format_script, parse_script, ScriptLine};
use rpq_core::workload::{generate, seeded_rng, Family, FamilyParams};
use rpq_core::{classify, compile_nfa, parse_rpq, Enumerator, GraphDatabase, Pull, RegexNode};

#[derive(Parser)]
#[command(name = "rpq", version, about = "Regular path queries over edge-labelled graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Database file and query. A query starting with `@` is read from that file.
#[derive(Args)]
struct Input {
    /// Edge-list database
    db: PathBuf,
    query: String,
}

#[derive(Subcommand)]
enum Command {
    /// Whether the query has any answer
    Boole(Input),
    /// Whether (u, v) is an answer
    Check {
        #[command(flatten)]
        input: Input,
        u: String,
        v: String,
    },
    /// Some answer, or `none`
    Witness(Input),
    /// All answers, sorted
    Eval(Input),
    /// Number of answers
    Count(Input),
    /// Stream answers through one of the enumerators
    Enum(EnumArgs),
    /// Report the query's syntactic class
    Classify { query: String },
    /// Dump the product graph as an edge list
    Product(Input),
    /// Generate a reduction instance: PREFIX.edges, PREFIX.json and, for
    /// dynamic reductions, PREFIX.updates
    Gen {
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a generated instance against its sidecar
    Verify { sidecar: PathBuf },
    /// Delay measurements over a graph family, as TSV
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Baseline,
    Sublinear,
    SublinearLazy,
    Restricted,
    Approx,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::Sublinear => "sublinear",
            Mode::SublinearLazy => "sublinear-lazy",
            Mode::Restricted => "restricted",
            Mode::Approx => "approx",
        }
    }
}

#[derive(Args)]
struct EnumArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "baseline")]
    mode: Mode,
    /// Print a JSON delay summary to stderr after each enumeration
    #[arg(long)]
    report_delay: bool,
    /// Replay this update script, re-enumerating at each `!enum`
    #[arg(long)]
    update_script: Option<PathBuf>,
    /// Buffer cap for the sublinear modes
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated node counts
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value = "(a|b)+")]
    query: String,
    /// Comma-separated enumerator modes
    #[arg(long, value_enum, value_delimiter = ',', default_value = "baseline,sublinear,approx")]
    modes: Vec<Mode>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 0.2)]
    p: f64,
    #[arg(long, default_value_t = 8)]
    max_degree: usize,
    #[arg(long)]
    cap: Option<usize>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn query_text(raw: &str) -> Result<String> {
    match raw.strip_prefix('@') {
        Some(path) => Ok(read(Path::new(path))?.trim().to_string()),
        None => Ok(raw.to_string()),
    }
}

fn load(input: &Input) -> Result<(GraphDatabase, RegexNode, String)> {
    let db = GraphDatabase::load_edge_list(&read(&input.db)?).with_context(|| format!("in {}", input.db.display()))?;
    let text = query_text(&input.query)?;
    let q = parse_rpq(&text, db.alphabet())?;
    Ok((db, q, text))
}

fn make_enumerator(db: &GraphDatabase, q: &RegexNode, mode: Mode, cap: Option<usize>) -> Result<Box<dyn Enumerator>> {
    Ok(match mode {
        Mode::Baseline => Box::new(enum_baseline(db, q)?),
        Mode::Sublinear => Box::new(enum_sublinear(sublinear_prepare(db, q, SublinearMode::SortedTree, cap)?)),
        Mode::SublinearLazy => Box::new(enum_sublinear(sublinear_prepare(db, q, SublinearMode::LazyUnsorted, cap)?)),
        Mode::Restricted => enum_restricted(db, q)?,
        Mode::Approx => Box::new(enum_approx(db, q)?),
    })
}

fn delay_json(mode: Mode, db: &GraphDatabase, query: &str, e: &dyn Enumerator) -> String {
    let s = e.meter().summary();
    serde_json::json!({
        "mode": mode.name(),
        "n": db.node_count(),
        "m": db.arc_count(),
        "q": query,
        "outputs": s.outputs,
        "first_gap": s.first_gap,
        "max_gap": s.max_gap,
        "last_gap": s.last_gap,
        "total_steps": s.total_steps,
    })
    .to_string()
}

/// Drains `e`, writing pair lines.
fn stream(db: &GraphDatabase, e: &mut dyn Enumerator, out: &mut impl Write) -> Result<()> {
    loop {
        match e.pull() {
            Pull::Pair(u, v) => writeln!(out, "{}\t{}", db.name(u), db.name(v))?,
            Pull::Done => return Ok(()),
            Pull::Stale => bail!("the database changed during enumeration"),
        }
    }
}

fn run_enum(args: &EnumArgs, out: &mut impl Write) -> Result<()> {
    let (db, q, text) = load(&args.input)?;
    let report = |db: &GraphDatabase, e: &dyn Enumerator| {
        if args.report_delay {
            eprintln!("{}", delay_json(args.mode, db, &text, e));
        }
    };
    let Some(path) = &args.update_script else {
        let mut e = make_enumerator(&db, &q, args.mode, args.cap)?;
        stream(&db, &mut *e, out)?;
        report(&db, &*e);
        return Ok(());
    };
    if args.mode == Mode::Approx {
        bail!("approximate enumeration does not support updates");
    }
    let script = parse_script(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let mut state = DynamicBaseline::new(db, &q)?;
    let mut checkpoint = 0;
    let emit = |state: &mut DynamicBaseline, checkpoint: usize, out: &mut dyn Write| -> Result<()> {
        writeln!(out, "# checkpoint {checkpoint}")?;
        let mut buf = Vec::new();
        if args.mode == Mode::Baseline {
            let mut e = state.enumerate();
            stream(state.database(), &mut e, &mut buf)?;
            report(state.database(), &e);
        } else {
            let mut e = make_enumerator(state.database(), &q, args.mode, args.cap)?;
            stream(state.database(), &mut *e, &mut buf)?;
            report(state.database(), &*e);
        }
        out.write_all(&buf)?;
        Ok(())
    };
    emit(&mut state, checkpoint, out)?;
    for (i, line) in script.iter().enumerate() {
        match line {
            ScriptLine::Update(u) => state.apply_update(u).with_context(|| format!("script line {}", i + 1))?,
            ScriptLine::Enumerate => {
                checkpoint += 1;
                emit(&mut state, checkpoint, out)?;
            }
        }
    }
    Ok(())
}

fn prefix_of(sidecar: &Path) -> PathBuf {
    sidecar.with_extension("")
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn run_gen(kind: &str, n: usize, d: usize, seed: u64, out: &Path, stdout: &mut impl Write) -> Result<()> {
    let kind: ReductionKind = kind.parse()?;
    let bundle = generate_instance(kind, n, d, seed)?;
    let edges = with_ext(out, "edges");
    let json = with_ext(out, "json");
    fs::write(&edges, bundle.database.save_edge_list())?;
    fs::write(&json, serde_json::to_string_pretty(&bundle.sidecar)? + "\n")?;
    writeln!(stdout, "{}", edges.display())?;
    writeln!(stdout, "{}", json.display())?;
    if let Some(script) = &bundle.script {
        let updates = with_ext(out, "updates");
        fs::write(&updates, format_script(script))?;
        writeln!(stdout, "{}", updates.display())?;
    }
    Ok(())
}

fn run_verify(path: &Path, out: &mut impl Write) -> Result<bool> {
    let sidecar: Sidecar = serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let prefix = prefix_of(path);
    let database = GraphDatabase::load_edge_list(&read(&with_ext(&prefix, "edges"))?)?;
    let script = if sidecar.reduction.is_dynamic() {
        Some(parse_script(&read(&with_ext(&prefix, "updates"))?)?)
    } else {
        None
    };
    let verdict = verify(&GeneratedInstance { sidecar, database, script })?;
    if verdict.ok() {
        writeln!(out, "OK")?;
    } else {
        writeln!(out, "MISMATCH")?;
        writeln!(out, "engine: {}", serde_json::to_string(&verdict.engine)?)?;
        writeln!(out, "oracle: {}", serde_json::to_string(&verdict.oracle)?)?;
        writeln!(out, "expected: {}", serde_json::to_string(&verdict.expected)?)?;
    }
    Ok(verdict.ok())
}

fn run_bench(args: &BenchArgs, out: &mut impl Write) -> Result<()> {
    let params = FamilyParams {
        avg_degree: args.avg_degree,
        edge_probability: args.p,
        max_degree: args.max_degree,
        ..FamilyParams::default()
    };
    writeln!(out, "family\tn\tarcs\tmode\toutputs\tfirst_gap\tmax_gap\tlast_gap\ttotal_steps")?;
    for (i, &n) in args.sizes.iter().enumerate() {
        let mut rng = seeded_rng(args.seed.wrapping_add(i as u64));
        let db = generate(args.family, n, &params, &mut rng)?;
        let q = parse_rpq(&args.query, db.alphabet())?;
        for &mode in &args.modes {
            let mut e = make_enumerator(&db, &q, mode, args.cap)?;
            while let Pull::Pair(..) = e.pull() {}
            let s = e.meter().summary();
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                args.family,
                db.node_count(),
                db.arc_count(),
                mode.name(),
                s.outputs,
                s.first_gap,
                s.max_gap,
                s.last_gap,
                s.total_steps
            )?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Boole(input) => {
            let (db, q, _) = load(&input)?;
            writeln!(out, "{}", boole(&db, &q)?)?;
        }
        Command::Check { input, u, v } => {
            let (db, q, _) = load(&input)?;
            writeln!(out, "{}", check(&db, &q, db.node_index(&u)?, db.node_index(&v)?)?)?;
        }
        Command::Witness(input) => {
            let (db, q, _) = load(&input)?;
            match witness(&db, &q)? {
                Some((u, v)) => writeln!(out, "{}\t{}", db.name(u), db.name(v))?,
                None => writeln!(out, "none")?,
            }
        }
        Command::Eval(input) => {
            let (db, q, _) = load(&input)?;
            out.write_all(db.format_pairs(&eval_all(&db, &q)?.pairs).as_bytes())?;
        }
        Command::Count(input) => {
            let (db, q, _) = load(&input)?;
            writeln!(out, "{}", count(&db, &q)?)?;
        }
        Command::Enum(args) => run_enum(&args, &mut out)?,
        Command::Classify { query } => {
            let q = rpq_core::query::parse_rpq_unchecked(&query_text(&query)?)?;
            writeln!(out, "{}", classify(&q))?;
        }
        Command::Product(input) => {
            let (db, q, _) = load(&input)?;
            let states = compile_nfa(&q, db.alphabet())?.state_count();
            writeln!(out, "# {} automaton states", states)?;
            out.write_all(product_for(&db, &q)?.dump(&db).as_bytes())?;
        }
        Command::Gen { kind, n, d, seed, out: prefix } => run_gen(&kind, n, d, seed, &prefix, &mut out)?,
        Command::Verify { sidecar } => {
            if !run_verify(&sidecar, &mut out)? {
                out.flush()?;
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bench(args) => run_bench(&args, &mut out)?,
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
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
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
