use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use msolo_core::axioms::{check_axioms, CheckMode, EXHAUSTIVE_MAX};
use msolo_core::builtins::{builtin_algebra, builtin_recognizer};
use msolo_core::document::{is_recognizer_document, load_algebra, load_recognizer};
use msolo_core::mso::{decide_sat, distinguishing_word, model_check, parse_formula, Formula, SatResult};
use msolo_core::splits::{compute_split, labelling_from_word, verify_split, SplitViolation};
use msolo_core::{eval_expr, parse_expr, Algebra, Elem, Letter, Limits, Recognizer};

const EXIT_POSITIVE: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;

const DEFAULT_SAMPLED_TRIALS: u64 = 100_000;

#[derive(Parser, Debug)]
#[command(name = "msolo", version, about = "Decide MSO over countable words through finite algebras")]
struct Cli {
    /// Cap on closure size during saturation (also read from MSOLO_MAX_CLOSURE).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_closure: Option<u64>,
    /// Cap on kappa subsets enumerated in one saturation stage.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_subsets: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long, global = true)]
    timeout: Option<f64>,
    /// Print one JSON object per line instead of human-readable text.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Operations on a single algebra.
    #[command(subcommand)]
    Alg(AlgCommand),
    /// Satisfiability of a sentence.
    Sat {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        alphabet: AlphabetArg,
        /// Print a witness expression for satisfiable sentences.
        #[arg(long)]
        witness: bool,
    },
    /// Validity of a sentence.
    Valid {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// Equivalence of two sentences.
    Equiv {
        #[command(flatten)]
        formula: FormulaArg,
        /// Second formula text or file (also spelled `-f2`).
        #[arg(long = "f2", value_name = "FORMULA")]
        f2: String,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// Model checking of a sentence against a word expression.
    Check {
        #[command(flatten)]
        formula: FormulaArg,
        /// Word expression.
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// Ramseian split of a finite word.
    Split {
        /// Algebra document or builtin name.
        #[arg(long)]
        algebra: String,
        /// Letter images, `letter=element,...`.
        #[arg(long)]
        morphism: String,
        /// The word: letters separated by commas or spaces, or one character per letter.
        #[arg(long)]
        word: String,
    },
}

#[derive(Subcommand, Debug)]
enum AlgCommand {
    /// Check the axioms.
    Check {
        #[command(flatten)]
        source: AlgebraSource,
        /// Check every instance (carriers up to 12 elements).
        #[arg(long, conflicts_with = "sampled")]
        exhaustive: bool,
        /// Check this many random instances.
        #[arg(long, value_name = "N")]
        sampled: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a word expression.
    Eval {
        #[command(flatten)]
        source: AlgebraSource,
        /// Letter images, `letter=element,...`.
        #[arg(long)]
        morphism: Option<String>,
        #[arg(short = 'e', long = "expr")]
        expr: String,
    },
}

#[derive(Args, Debug)]
struct AlgebraSource {
    /// Algebra or recognizer document.
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    file: Option<String>,
    /// Builtin algebra: trivial, sing, subset, before, letter, shuffle:k=N.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Args, Debug)]
struct FormulaArg {
    /// Formula text, or a file containing it.
    #[arg(short = 'f', long = "formula")]
    formula: String,
}

#[derive(Args, Debug)]
struct AlphabetArg {
    /// Base alphabet, comma separated.
    #[arg(short = 'A', long = "alphabet", value_delimiter = ',', required = true)]
    alphabet: Vec<String>,
}

/// A failure, with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_USAGE, kind: "usage", msg: msg.into() }
    }

    fn core(input: &str, err: msolo_core::Error) -> Failure {
        let (code, kind) = if err.is_limit() { (EXIT_LIMIT, "limit") } else { (EXIT_USAGE, "input") };
        Failure { code, kind, msg: format!("{input}: {err}") }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

type Outcome = Result<(u8, Value, String), Failure>;

fn limits(cli: &Cli) -> Result<Limits, Failure> {
    let mut l = Limits::default();
    if let Ok(v) = std::env::var("MSOLO_MAX_CLOSURE") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure::usage(format!("MSOLO_MAX_CLOSURE: expected a positive integer, got `{v}`")))?;
        l.max_closure = n;
    }
    if let Some(n) = cli.max_closure {
        l.max_closure = n as usize;
    }
    if let Some(n) = cli.max_subsets {
        l.max_subsets_per_stage = n;
    }
    if let Some(t) = cli.timeout {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::usage(format!("--timeout: expected a positive number of seconds, got {t}")));
        }
        l.deadline = Some(Instant::now() + Duration::from_secs_f64(t));
    }
    Ok(l)
}

fn read_formula(label: &str, arg: &str, alphabet: &[String]) -> Result<(Formula, String), Failure> {
    let (input, text) = if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| Failure::usage(format!("{label} file `{arg}`: {e}")))?;
        (format!("{label} file `{arg}`"), text)
    } else {
        (format!("{label} `{}`", arg.trim()), arg.to_string())
    };
    let f = parse_formula(text.trim(), alphabet).map_err(|e| Failure::core(&input, e))?;
    Ok((f, input))
}

fn verdict(code: u8, word: &str) -> (u8, Value, String) {
    (code, json!({ "verdict": word }), word.to_string())
}

fn run_sat((f, input): &(Formula, String), alphabet: &[String], witness: bool, limits: &Limits) -> Outcome {
    match decide_sat(f, alphabet, limits).map_err(|e| Failure::core(input, e))? {
        SatResult::Sat(w) => {
            let mut human = "SAT".to_string();
            let mut v = json!({ "verdict": "SAT" });
            if witness {
                human.push_str(&format!("\nwitness: {w}"));
                v["witness"] = json!(w.to_string());
            }
            Ok((EXIT_POSITIVE, v, human))
        }
        SatResult::Unsat => Ok(verdict(EXIT_NEGATIVE, "UNSAT")),
    }
}

fn run_valid((f, input): &(Formula, String), alphabet: &[String], limits: &Limits) -> Outcome {
    match decide_sat(&Formula::not(f.clone()), alphabet, limits).map_err(|e| Failure::core(input, e))? {
        SatResult::Unsat => Ok(verdict(EXIT_POSITIVE, "VALID")),
        SatResult::Sat(w) => Ok((
            EXIT_NEGATIVE,
            json!({ "verdict": "INVALID", "counterexample": w.to_string() }),
            format!("INVALID\ncounterexample: {w}"),
        )),
    }
}

fn run_equiv((f1, in1): &(Formula, String), (f2, in2): &(Formula, String), alphabet: &[String], limits: &Limits) -> Outcome {
    match distinguishing_word(f1, f2, alphabet, limits).map_err(|e| Failure::core(&format!("{in1} vs {in2}"), e))? {
        None => Ok(verdict(EXIT_POSITIVE, "EQUIV")),
        Some(w) => Ok((
            EXIT_NEGATIVE,
            json!({ "verdict": "DIFFER", "word": w.to_string() }),
            format!("DIFFER\nword: {w}"),
        )),
    }
}

fn run_check((f, input): &(Formula, String), expr: &str, alphabet: &[String], limits: &Limits) -> Outcome {
    let e = parse_expr(expr).map_err(|err| Failure::core(&format!("expression `{expr}`"), err))?;
    let holds = model_check(f, &e, alphabet, limits).map_err(|err| Failure::core(&format!("{input} on `{expr}`"), err))?;
    Ok(if holds { verdict(EXIT_POSITIVE, "TRUE") } else { verdict(EXIT_NEGATIVE, "FALSE") })
}

/// Loads a builtin or a document; recognizer documents also yield their recognizer.
fn load_source(file: Option<&str>, builtin: Option<&str>) -> Result<(Arc<Algebra>, Option<Recognizer>, String), Failure> {
    if let Some(name) = builtin {
        let input = format!("builtin `{name}`");
        let alg = builtin_algebra(name).map_err(|e| Failure::core(&input, e))?;
        let rec = builtin_recognizer(name).ok();
        return Ok((Arc::new(alg), rec, input));
    }
    let path = file.expect("clap requires a file or a builtin");
    let input = format!("file `{path}`");
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{input}: {e}")))?;
    if is_recognizer_document(&text) {
        let rec = load_recognizer(&text).map_err(|e| Failure::core(&input, e))?;
        Ok((rec.algebra().clone(), Some(rec), input))
    } else {
        let alg = load_algebra(&text).map_err(|e| Failure::core(&input, e))?;
        Ok((Arc::new(alg), None, input))
    }
}

/// Resolves `--algebra` as a file if one exists, else as a builtin name.
fn load_algebra_arg(arg: &str) -> Result<(Arc<Algebra>, String), Failure> {
    let (alg, _, input) = if Path::new(arg).is_file() { load_source(Some(arg), None)? } else { load_source(None, Some(arg))? };
    Ok((alg, input))
}

/// Splits on commas outside square brackets, so `a[X,Y]=o` stays whole.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out.into_iter().map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn parse_letter(s: &str) -> Result<Letter, Failure> {
    match s.find('[') {
        None => Ok(Letter::plain(s)),
        Some(i) => {
            let marks = s[i + 1..].strip_suffix(']').ok_or_else(|| Failure::usage(format!("--morphism: malformed letter `{s}`")))?;
            Ok(Letter::marked(&s[..i], marks.split(',').map(str::trim).filter(|m| !m.is_empty())))
        }
    }
}

fn parse_morphism(alg: &Algebra, spec: &str) -> Result<Vec<(Letter, Elem)>, Failure> {
    let mut out = Vec::new();
    for part in split_top_level(spec) {
        let (l, v) = part.rsplit_once('=').ok_or_else(|| Failure::usage(format!("--morphism: expected `letter=element`, got `{part}`")))?;
        let e = alg.elem_by_name(v.trim()).ok_or_else(|| Failure::usage(format!("--morphism: unknown element `{}`", v.trim())))?;
        out.push((parse_letter(l.trim())?, e));
    }
    if out.is_empty() {
        return Err(Failure::usage("--morphism: no letters given"));
    }
    Ok(out)
}

fn run_alg_check(file: Option<&str>, builtin: Option<&str>, exhaustive: bool, sampled: Option<u64>, seed: u64) -> Outcome {
    let (alg, _, input) = load_source(file, builtin)?;
    let mode = match (exhaustive, sampled) {
        (_, Some(trials)) => CheckMode::Sampled { seed, trials },
        (true, None) => CheckMode::Exhaustive,
        (false, None) if alg.size() <= EXHAUSTIVE_MAX => CheckMode::Exhaustive,
        (false, None) => CheckMode::Sampled { seed, trials: DEFAULT_SAMPLED_TRIALS },
    };
    let report = check_axioms(&alg, mode).map_err(|e| Failure::core(&input, e))?;
    let mode_name = match mode {
        CheckMode::Exhaustive => "exhaustive".to_string(),
        CheckMode::Sampled { seed, trials } => format!("sampled trials={trials} seed={seed}"),
    };
    let v = json!({
        "verdict": if report.passed() { "PASS" } else { "FAIL" },
        "mode": mode_name,
        "checked": report.checked,
        "counts": report.counts.iter().map(|(a, c)| (a.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
        "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    });
    let human = format!("{input}, {} elements, {mode_name}\n{}", alg.size(), report.to_string().trim_end());
    Ok((if report.passed() { EXIT_POSITIVE } else { EXIT_NEGATIVE }, v, human))
}

fn run_alg_eval(file: Option<&str>, builtin: Option<&str>, morphism: Option<&str>, expr: &str) -> Outcome {
    let (alg, rec, input) = load_source(file, builtin)?;
    let rec = match (morphism, rec) {
        (Some(m), _) => {
            let letters = parse_morphism(&alg, m)?;
            Recognizer::new(alg.clone(), letters, []).map_err(|e| Failure::core("--morphism", e))?
        }
        (None, Some(r)) => r,
        (None, None) => return Err(Failure::usage(format!("{input} is a bare algebra; --morphism is required"))),
    };
    let e = parse_expr(expr).map_err(|err| Failure::core(&format!("expression `{expr}`"), err))?;
    let v = eval_expr(&rec, &e).map_err(|err| Failure::core(&format!("expression `{expr}`"), err))?;
    let name = alg.name(v);
    Ok((EXIT_POSITIVE, json!({ "value": name }), name))
}

fn word_letters(word: &str) -> Vec<String> {
    if word.contains(',') || word.trim().contains(char::is_whitespace) {
        word.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::to_string).collect()
    } else {
        word.trim().chars().map(String::from).collect()
    }
}

fn run_split(algebra: &str, morphism: &str, word: &str) -> Outcome {
    let (alg, _) = load_algebra_arg(algebra)?;
    let mut h = HashMap::new();
    for (l, e) in parse_morphism(&alg, morphism)? {
        h.insert(l.to_string(), e);
    }
    let letters = word_letters(word);
    let lab = labelling_from_word(alg.as_ref(), &h, &letters).map_err(|e| Failure::core(&format!("--word `{word}`"), e))?;
    let split = compute_split(&lab);
    let report = verify_split(&lab, &split);
    let classes: Vec<Value> = report
        .classes
        .iter()
        .map(|c| json!({ "level": c.level, "positions": c.positions, "value": c.value.map(|e| alg.name(e)) }))
        .collect();
    let violations: Vec<String> = report.violations.iter().map(|v| describe_violation(&alg, v)).collect();
    let verdict = if report.is_ramseian { "RAMSEIAN" } else { "NOT-RAMSEIAN" };
    let v = json!({
        "verdict": verdict,
        "levels": split.levels,
        "height": report.height,
        "classes": classes,
        "violations": violations,
    });
    let mut human = format!(
        "levels: {}\nheight: {}\n{verdict}",
        split.levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "),
        report.height
    );
    for c in &report.classes {
        if let Some(e) = c.value {
            human.push_str(&format!("\n  level {} class {:?}: {}", c.level, c.positions, alg.name(e)));
        }
    }
    for v in &violations {
        human.push_str(&format!("\n  violation: {v}"));
    }
    Ok((if report.is_ramseian { EXIT_POSITIVE } else { EXIT_NEGATIVE }, v, human))
}

fn describe_violation(alg: &Algebra, v: &SplitViolation) -> String {
    match v {
        SplitViolation::LevelOutOfRange { position, level } => format!("position {position} has level {level}"),
        SplitViolation::NotConstant { class_min, x, y, value, expected } => {
            format!("class at {class_min}: value({x},{y}) = {} != {}", alg.name(*value), alg.name(*expected))
        }
        SplitViolation::NotIdempotent { class_min, value } => format!("class at {class_min}: {} is not idempotent", alg.name(*value)),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Alg(AlgCommand::Check { .. }) => "alg check",
        Command::Alg(AlgCommand::Eval { .. }) => "alg eval",
        Command::Sat { .. } => "sat",
        Command::Valid { .. } => "valid",
        Command::Equiv { .. } => "equiv",
        Command::Check { .. } => "check",
        Command::Split { .. } => "split",
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let limits = limits(cli)?;
    match &cli.command {
        Command::Alg(AlgCommand::Check { source, exhaustive, sampled, seed }) => {
            run_alg_check(source.file.as_deref(), source.builtin.as_deref(), *exhaustive, *sampled, *seed)
        }
        Command::Alg(AlgCommand::Eval { source, morphism, expr }) => {
            run_alg_eval(source.file.as_deref(), source.builtin.as_deref(), morphism.as_deref(), expr)
        }
        Command::Sat { formula, alphabet, witness } => {
            let f = read_formula("formula", &formula.formula, &alphabet.alphabet)?;
            run_sat(&f, &alphabet.alphabet, *witness, &limits)
        }
        Command::Valid { formula, alphabet } => {
            let f = read_formula("formula", &formula.formula, &alphabet.alphabet)?;
            run_valid(&f, &alphabet.alphabet, &limits)
        }
        Command::Equiv { formula, f2, alphabet } => {
            let a = read_formula("first formula", &formula.formula, &alphabet.alphabet)?;
            let b = read_formula("second formula", f2, &alphabet.alphabet)?;
            run_equiv(&a, &b, &alphabet.alphabet, &limits)
        }
        Command::Check { formula, expr, alphabet } => {
            let f = read_formula("formula", &formula.formula, &alphabet.alphabet)?;
            run_check(&f, expr, &alphabet.alphabet, &limits)
        }
        Command::Split { algebra, morphism, word } => run_split(algebra, morphism, word),
    }
}

/// clap has no two-letter short flags, so `-f2` is accepted by rewriting it.
fn normalize_args(args: impl Iterator<Item = String>) -> Vec<String> {
    args.map(|a| match a.strip_prefix("-f2") {
        Some("") => "--f2".to_string(),
        Some(rest) if rest.starts_with('=') => format!("--f2{rest}"),
        _ => a,
    })
    .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize_args(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_POSITIVE });
        }
    };
    let name = command_name(&cli.command);
    match dispatch(&cli) {
        Ok((code, mut v, human)) => {
            if cli.machine {
                v["command"] = json!(name);
                println!("{v}");
            } else {
                println!("{human}");
            }
            ExitCode::from(code)
        }
        Err(f) => {
            if cli.machine {
                println!("{}", json!({ "command": name, "error": f.kind, "message": f.msg }));
            }
            eprintln!("msolo {name}: error: {f}");
            ExitCode::from(f.code)
        }
    }
}
