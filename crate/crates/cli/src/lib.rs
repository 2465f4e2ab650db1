//! Command-line front end for `triff-core`.
//!
//! [`run`] parses arguments, dispatches to the library, prints results to
//! `out` and diagnostics to `err`, and returns the process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use triff_core::bounds::{ledger_check, BoundProfile};
use triff_core::encoders::{self, decode_assignment, ConstraintDocument, DocKind, EncodeError};
use triff_core::hashcore::{first_violation, relation_r, witness_family, Code, CodeParams};
use triff_core::ledger::{resolve_certificate, Ledger, LedgerEntry, LedgerKey, LedgerLock, Method};
use triff_core::msolab::{
    ef_game_search, evaluate, parse_formula, sample_sentences, Assignment, LabStructure, Player, TypeEngine, Vocabulary,
};
use triff_core::searcher::{
    brute_force_max, max_size, search_exact, Budget, SearchConfig, SearchVerdict, SizeStatus, SymmetryLevel,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_NO: i32 = 10;
pub const EXIT_BUDGET: i32 = 20;

/// Seed used by `ef --sentences` when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 20240501;

#[derive(Parser)]
#[command(name = "triff", version, about = "Hash-code search, solver encodings and an MSO laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a code file describes a (b,k)-hash code.
    Verify { codefile: PathBuf },
    /// Look for a code with exactly --size words.
    Search(SearchArgs),
    /// Largest code for the given parameters.
    Maxsize(MaxsizeArgs),
    /// Write the existence question as a DIMACS or SMT-LIB2 document.
    Encode(EncodeArgs),
    /// Turn a solver model for an emitted document into a verified code.
    Decode {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the three asymptotic size formulas.
    Bounds(BoundsArgs),
    /// Print the witness words X, Y, Z for (n, ell).
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: usize,
    },
    /// Decide rank-bounded MSO equivalence of two structures.
    Ef(EfArgs),
    /// Evaluate an MSO sentence on a structure.
    MsoEval {
        #[arg(long)]
        structure: PathBuf,
        /// Inline s-expression (starting with '(') or a file holding one.
        #[arg(long)]
        formula: String,
    },
    /// Inspect or update the results ledger.
    Ledger {
        #[command(subcommand)]
        action: LedgerAction,
    },
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long)]
    b: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
}

impl ParamArgs {
    fn params(self) -> Result<CodeParams, Failure> {
        CodeParams::new(self.b, self.k, self.n).map_err(usage)
    }
}

#[derive(Args)]
struct SearchOpts {
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_secs: Option<f64>,
    /// none, fix-first-row, row-lex or full.
    #[arg(long, default_value = "full")]
    symmetry: SymmetryLevel,
    /// Adopt subtree results in a fixed order so certificates and node counts repeat.
    #[arg(long)]
    deterministic: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

impl SearchOpts {
    fn config(&self) -> SearchConfig {
        let default = SearchConfig::default();
        SearchConfig {
            budget: Budget {
                max_nodes: self.budget_nodes.unwrap_or(u64::MAX),
                max_secs: self.budget_secs.unwrap_or(f64::INFINITY),
            },
            symmetry: self.symmetry,
            deterministic: self.deterministic,
            threads: self.threads.unwrap_or(default.threads).max(1),
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    size: usize,
    /// Also show that no code with --size + 1 words exists.
    #[arg(long)]
    prove_optimal: bool,
    #[command(flatten)]
    opts: SearchOpts,
    /// Write the certificate here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the outcome in this ledger file.
    #[arg(long)]
    ledger: Option<PathBuf>,
}

#[derive(Args)]
struct MaxsizeArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    opts: SearchOpts,
    /// Use the brute-force subset oracle instead of the search.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    ledger: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    /// dimacs or smtlib2.
    #[arg(long)]
    format: DocKind,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    size: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: u32,
    /// Evaluate every length from --n up to this one.
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long = "C-upper")]
    c_upper: Option<f64>,
    #[arg(long = "C-improved")]
    c_improved: Option<f64>,
    #[arg(long = "C-lower")]
    c_lower: Option<f64>,
}

#[derive(Args)]
struct EfArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    #[arg(long)]
    rank: usize,
    /// Solve the game explicitly and print a line of optimal play.
    #[arg(long)]
    trace: bool,
    /// For equivalent structures, also compare this many sampled sentences.
    #[arg(long, default_value_t = 0)]
    sentences: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct LedgerFile {
    #[arg(long, default_value = "triff-ledger.txt")]
    ledger: PathBuf,
}

#[derive(Subcommand)]
enum LedgerAction {
    Show {
        #[command(flatten)]
        file: LedgerFile,
    },
    Add {
        #[command(flatten)]
        file: LedgerFile,
        /// Entry key "b,k,n".
        #[arg(long)]
        key: LedgerKey,
        #[arg(long)]
        lower: usize,
        #[arg(long)]
        upper: usize,
        /// exact or bounded.
        #[arg(long)]
        status: String,
        /// oracle, search or external-solver.
        #[arg(long)]
        method: Method,
        /// Certificate path, relative to the ledger directory unless absolute.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Timestamp token; defaults to the current UTC time.
        #[arg(long)]
        time: Option<String>,
    },
    Check {
        #[command(flatten)]
        file: LedgerFile,
        /// Recompute each entry's maximum and compare.
        #[arg(long)]
        recompute: bool,
        #[arg(long)]
        budget_secs: Option<f64>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verify(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Verify(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            EXIT_VERIFY
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Verify { codefile } => verify(&codefile, out),
        Command::Search(a) => search(a, out),
        Command::Maxsize(a) => maxsize(a, out),
        Command::Encode(a) => encode(a, out),
        Command::Decode { doc, model, out: path } => decode(&doc, &model, path.as_deref(), out),
        Command::Bounds(a) => bounds(a, out),
        Command::Witness { n, ell } => witness(n, ell, out),
        Command::Ef(a) => ef(a, out),
        Command::MsoEval { structure, formula } => mso_eval(&structure, &formula, out),
        Command::Ledger { action } => ledger(action, out),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn ensure_parent(path: &Path) -> Result<(), Failure> {
    match path.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(dir) => fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display()))),
        None => Ok(()),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| usage(format!("writing output: {e}")))?
    };
}

fn verify(path: &Path, out: &mut dyn Write) -> Outcome {
    let code = Code::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    match first_violation(&code) {
        None => {
            say!(out, "k-hash: yes");
            Ok(EXIT_OK)
        }
        Some(rows) => {
            let words: Vec<String> = rows.iter().map(|&i| code.words()[i].to_string()).collect();
            say!(out, "k-hash: no");
            Err(Failure::Verify(format!("rows {rows:?} ({}) share no separating coordinate", words.join(", "))))
        }
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Where a certificate for `key` goes and how the ledger refers to it.
fn certificate_location(ledger_path: &Path, key: LedgerKey, m: usize, out: Option<&Path>) -> (PathBuf, PathBuf) {
    let dir = ledger_path.parent().unwrap_or(Path::new(""));
    let file = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join("certs").join(format!("b{}k{}n{}m{m}.code", key.b, key.k, key.n)));
    let abs = |p: &Path| std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
    let reference = abs(&file).strip_prefix(abs(dir)).map(Path::to_path_buf).unwrap_or_else(|_| abs(&file));
    (file, reference)
}

/// Folds new knowledge about one key into the ledger under its lock.
fn record(
    ledger_path: &Path,
    params: &CodeParams,
    lower: Option<(usize, &Code, Option<&Path>)>,
    upper: Option<usize>,
    method: Method,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    ensure_parent(ledger_path)?;
    let _lock = LedgerLock::acquire(ledger_path).map_err(usage)?;
    let mut ledger = Ledger::load(ledger_path).map_err(usage)?;
    let key = LedgerKey { b: params.b(), k: params.k(), n: params.n() };
    let trivial = usize::try_from(params.word_count()).unwrap_or(usize::MAX);
    let mut entry = ledger.get(&key).cloned().unwrap_or(LedgerEntry {
        key,
        lower: 0,
        upper: trivial,
        status: SizeStatus::Bounded,
        certificate: None,
        method,
        timestamp: String::new(),
    });
    if let Some((m, code, dest)) = lower {
        if m > entry.lower || entry.certificate.is_none() && m == entry.lower {
            let (file, reference) = certificate_location(ledger_path, key, m, dest);
            write_file(&file, &code.to_text())?;
            entry.lower = m;
            entry.certificate = Some(reference);
        }
    }
    if let Some(u) = upper {
        entry.upper = entry.upper.min(u);
    }
    if entry.lower > entry.upper {
        return Err(Failure::Verify(format!(
            "ledger entry {key} would have lower {} above upper {}",
            entry.lower, entry.upper
        )));
    }
    entry.status = if entry.lower == entry.upper { SizeStatus::Exact } else { SizeStatus::Bounded };
    entry.method = method;
    entry.timestamp = now();
    say!(out, "# ledger {}: {}", ledger_path.display(), entry.to_line());
    ledger.upsert(entry).map_err(usage)?;
    ledger.save(ledger_path).map_err(usage)
}

fn print_stats(out: &mut dyn Write, what: &str, v: &SearchVerdict) -> Result<(), Failure> {
    let s = v.stats();
    say!(out, "# {what} nodes={} elapsed={:.3}s", s.nodes, s.elapsed_secs);
    Ok(())
}

fn search(a: SearchArgs, out: &mut dyn Write) -> Outcome {
    let params = a.params.params()?;
    let config = a.opts.config();
    let verdict = search_exact(&params, a.size, &config).map_err(usage)?;
    let code = match &verdict {
        SearchVerdict::Found { code, .. } => code.clone(),
        SearchVerdict::ExhaustedNoSolution(_) => {
            print_stats(out, &format!("no code of size {} exists", a.size), &verdict)?;
            if let Some(l) = &a.ledger {
                record(l, &params, None, Some(a.size - 1), Method::Search, out)?;
            }
            return Ok(EXIT_NO);
        }
        SearchVerdict::BudgetExceeded(_) => {
            print_stats(out, &format!("budget exceeded at size {}", a.size), &verdict)?;
            return Ok(EXIT_BUDGET);
        }
    };
    print_stats(out, &format!("found a code of size {}", a.size), &verdict)?;
    write!(out, "{}", code.to_text()).map_err(usage)?;
    if let Some(path) = &a.out {
        write_file(path, &code.to_text())?;
    }
    let mut upper = None;
    let mut exit = EXIT_OK;
    if a.prove_optimal {
        let next = search_exact(&params, a.size + 1, &config).map_err(usage)?;
        match next {
            SearchVerdict::ExhaustedNoSolution(_) => {
                print_stats(out, &format!("optimal: no code of size {} exists", a.size + 1), &next)?;
                upper = Some(a.size);
            }
            SearchVerdict::Found { .. } => {
                print_stats(out, &format!("not optimal: a code of size {} exists", a.size + 1), &next)?;
                exit = EXIT_NO;
            }
            SearchVerdict::BudgetExceeded(_) => {
                print_stats(out, &format!("optimality undecided: budget exceeded at size {}", a.size + 1), &next)?;
                exit = EXIT_BUDGET;
            }
        }
    }
    if let Some(l) = &a.ledger {
        record(l, &params, Some((a.size, &code, a.out.as_deref())), upper, Method::Search, out)?;
    }
    Ok(exit)
}

fn maxsize(a: MaxsizeArgs, out: &mut dyn Write) -> Outcome {
    let params = a.params.params()?;
    let (lower, upper, status, code, method) = if a.oracle {
        let (m, code) = brute_force_max(&params).map_err(usage)?;
        say!(out, "# oracle over all subsets");
        (m, m, SizeStatus::Exact, code, Method::Oracle)
    } else {
        let r = max_size(&params, &a.opts.config()).map_err(usage)?;
        say!(out, "# search nodes={}", r.nodes);
        (r.lower, r.upper, r.status, r.certificate, Method::Search)
    };
    say!(out, "# maxsize {params}: lower={lower} upper={upper} status={status}");
    write!(out, "{}", code.to_text()).map_err(usage)?;
    if let Some(path) = &a.out {
        write_file(path, &code.to_text())?;
    }
    if let Some(l) = &a.ledger {
        record(l, &params, Some((lower, &code, a.out.as_deref())), Some(upper), method, out)?;
    }
    Ok(if status == SizeStatus::Exact { EXIT_OK } else { EXIT_BUDGET })
}

fn encode(a: EncodeArgs, out: &mut dyn Write) -> Outcome {
    let params = a.params.params()?;
    let doc = match a.format {
        DocKind::Cnf => encoders::emit_dimacs(&params, a.size),
        DocKind::SmtLib2 => encoders::emit_smtlib(&params, a.size),
    }
    .map_err(usage)?;
    match &a.out {
        Some(path) => {
            write_file(path, &doc.text)?;
            say!(out, "wrote {} document for {params} m={} to {}", doc.kind, a.size, path.display());
        }
        None => write!(out, "{}", doc.text).map_err(usage)?,
    }
    Ok(EXIT_OK)
}

fn decode(doc: &Path, model: &Path, dest: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let d = ConstraintDocument::parse(&read(doc)?).map_err(|e| usage(format!("{}: {e}", doc.display())))?;
    match decode_assignment(&d, &read(model)?) {
        Ok(code) => {
            write!(out, "{}", code.to_text()).map_err(usage)?;
            if let Some(path) = dest {
                write_file(path, &code.to_text())?;
            }
            Ok(EXIT_OK)
        }
        Err(EncodeError::NoModel) => {
            say!(out, "unsat: no code of size {} exists for {}", d.varmap.rows(), d.varmap.params());
            Ok(EXIT_NO)
        }
        Err(e @ EncodeError::Verification(_)) => Err(Failure::Verify(e.to_string())),
        Err(e) => Err(usage(e)),
    }
}

fn bounds(a: BoundsArgs, out: &mut dyn Write) -> Outcome {
    let defaults = BoundProfile::<f64>::illustrative();
    let given = a.c_upper.is_some() || a.c_improved.is_some() || a.c_lower.is_some();
    let profile = BoundProfile::new(
        a.c_upper.unwrap_or(defaults.c_upper()),
        a.c_improved.unwrap_or(defaults.c_improved()),
        a.c_lower.unwrap_or(defaults.c_lower()),
    )
    .map_err(usage)?;
    let last = a.n_max.unwrap_or(a.n);
    if last < a.n {
        return Err(usage(format!("--n-max {last} is below --n {}", a.n)));
    }
    say!(
        out,
        "# C_upper={} C_improved={} C_lower={}{}",
        profile.c_upper(),
        profile.c_improved(),
        profile.c_lower(),
        if given { "" } else { " (illustrative defaults)" }
    );
    for n in a.n..=last {
        say!(out, "{}", profile.evaluate(n));
    }
    Ok(EXIT_OK)
}

fn witness(n: usize, ell: usize, out: &mut dyn Write) -> Outcome {
    let (x, y, z) = witness_family(n, ell).map_err(usage)?;
    say!(out, "X={x}");
    say!(out, "Y={y}");
    say!(out, "Z={z}");
    let r = relation_r(&x, &y, &z).map_err(usage)?;
    say!(out, "R(X,Y,Z)={r}");
    if !r {
        return Err(Failure::Verify("the witness triple does not satisfy R".into()));
    }
    Ok(EXIT_OK)
}

fn load_structure(path: &Path) -> Result<LabStructure, Failure> {
    LabStructure::from_toml(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn ef(a: EfArgs, out: &mut dyn Write) -> Outcome {
    let (left, right) = (load_structure(&a.left)?, load_structure(&a.right)?);
    let equivalent = TypeEngine::default().equivalent(&left, &right, a.rank).map_err(usage)?;
    say!(out, "equivalent at rank {}: {}", a.rank, if equivalent { "yes" } else { "no" });
    if a.trace {
        let (winner, trace) = ef_game_search(&left, &right, a.rank).map_err(usage)?;
        write!(out, "{}", trace.render(&left, &right)).map_err(usage)?;
        if (winner == Player::Bob) != equivalent {
            return Err(Failure::Verify("game search and rank types disagree".into()));
        }
    }
    if equivalent && a.sentences > 0 {
        let vocab = Vocabulary::of(&[&left, &right]);
        let none = Assignment::default();
        for f in sample_sentences(&vocab, a.rank, a.sentences, a.seed) {
            let l = evaluate(&left, &f, &none).map_err(usage)?;
            if l != evaluate(&right, &f, &none).map_err(usage)? {
                return Err(Failure::Verify(format!("equivalent structures disagree on {f}")));
            }
        }
        say!(out, "agreement on {} sampled sentences (seed {})", a.sentences, a.seed);
    }
    Ok(if equivalent { EXIT_OK } else { EXIT_NO })
}

fn mso_eval(structure: &Path, formula: &str, out: &mut dyn Write) -> Outcome {
    let s = load_structure(structure)?;
    let text = if formula.trim_start().starts_with('(') { formula.to_string() } else { read(Path::new(formula))? };
    let f = parse_formula(&text).map_err(usage)?;
    let value = evaluate(&s, &f, &Assignment::default()).map_err(usage)?;
    say!(out, "{value}");
    Ok(if value { EXIT_OK } else { EXIT_NO })
}

fn verify_certificate(ledger_path: &Path, entry: &LedgerEntry) -> Result<(), Failure> {
    let Some(cert) = &entry.certificate else {
        return Ok(());
    };
    let path = resolve_certificate(ledger_path, cert);
    let code = Code::parse(&read(&path)?).map_err(|e| Failure::Verify(format!("{}: {e}", path.display())))?;
    let key = LedgerKey { b: code.params().b(), k: code.params().k(), n: code.params().n() };
    if key != entry.key {
        return Err(Failure::Verify(format!("certificate is for {key}, entry is {}", entry.key)));
    }
    if let Some(rows) = first_violation(&code) {
        return Err(Failure::Verify(format!("certificate rows {rows:?} are not hashed")));
    }
    if code.len() != entry.lower {
        return Err(Failure::Verify(format!("certificate has {} words, lower bound is {}", code.len(), entry.lower)));
    }
    Ok(())
}

fn ledger(action: LedgerAction, out: &mut dyn Write) -> Outcome {
    match action {
        LedgerAction::Show { file } => {
            let l = Ledger::load(&file.ledger).map_err(|e| usage(format!("{}: {e}", file.ledger.display())))?;
            write!(out, "{}", l.to_text()).map_err(usage)?;
            Ok(EXIT_OK)
        }
        LedgerAction::Add { file, key, lower, upper, status, method, cert, time } => {
            let status = match status.as_str() {
                "exact" => SizeStatus::Exact,
                "bounded" => SizeStatus::Bounded,
                s => return Err(usage(format!("unknown status '{s}' (expected exact or bounded)"))),
            };
            let entry = LedgerEntry {
                key,
                lower,
                upper,
                status,
                certificate: cert,
                method,
                timestamp: time.unwrap_or_else(now),
            };
            let problems = entry.problems();
            if !problems.is_empty() {
                return Err(usage(format!("entry {key}: {}", problems.join("; "))));
            }
            verify_certificate(&file.ledger, &entry)?;
            ensure_parent(&file.ledger)?;
            let _lock = LedgerLock::acquire(&file.ledger).map_err(usage)?;
            let mut l = Ledger::load(&file.ledger).map_err(|e| usage(format!("{}: {e}", file.ledger.display())))?;
            say!(out, "{}", entry.to_line());
            l.upsert(entry).map_err(usage)?;
            l.save(&file.ledger).map_err(usage)?;
            Ok(EXIT_OK)
        }
        LedgerAction::Check { file, recompute, budget_secs } => {
            let l = Ledger::load(&file.ledger).map_err(|e| usage(format!("{}: {e}", file.ledger.display())))?;
            let config = SearchConfig {
                budget: Budget { max_secs: budget_secs.unwrap_or(f64::INFINITY), ..Budget::default() },
                ..SearchConfig::default()
            };
            let report = ledger_check(&l, &file.ledger, recompute.then_some(&config));
            for issue in &report.issues {
                say!(out, "{issue}");
            }
            let verdict = if report.is_consistent() { "consistent" } else { "INCONSISTENT" };
            say!(out, "checked {} entries: {verdict}", report.checked);
            Ok(if report.is_consistent() { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}
