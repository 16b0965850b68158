//! The `whylog` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::fuzz::{fuzz, FuzzConfig};
use crate::model::{load_any, print_model, Loaded, Model};
use crate::proofs::{check_proof, parse_proof, System};
use crate::semantics::{check_factivity, check_introspection, eval, render_trace, Verdict};
use crate::syntax::{parse_formula, print_formula, Formula};
use crate::transforms::{eval_jl, factive_transform, jl_transform, print_jl_model, validate_jl, JLModel};

#[derive(Parser, Debug)]
#[command(
    name = "whylog",
    version,
    about = "Model checking and proof checking for knowing why"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Factive,
    Jl,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "UPPER")]
enum SystemArg {
    Sky,
    Skyi,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula at a world; exits 0 if true, 1 if false.
    Check {
        model: PathBuf,
        world: String,
        formula: String,
        /// evaluate under the justification-style semantics
        #[arg(long)]
        jl: bool,
        /// print why the formula has its value
        #[arg(long)]
        trace: bool,
    },
    /// Validate a model; exits 1 if violations are found.
    Validate {
        model: PathBuf,
        /// report explanations covering worlds where their formula is false
        #[arg(long)]
        factivity: bool,
        /// `;`-separated formulas of the forms K[i] f, ~K[i] f, Ky[i] f, ~Ky[i] f
        #[arg(long, value_name = "FORMULAS")]
        introspection: Option<String>,
    },
    /// Print the saturated coverage table in model format.
    Saturate {
        model: PathBuf,
        /// extend the formula universe before saturating
        #[arg(long = "query", value_name = "FORMULA")]
        queries: Vec<String>,
    },
    /// Apply the factive or the justification-style transform.
    Transform {
        model: PathBuf,
        #[arg(value_enum)]
        mode: Mode,
        out: Option<PathBuf>,
    },
    /// Check a proof file; exits 1 if a line is not justified.
    Prove { proof: PathBuf },
    /// Search random models for counterexamples to the axioms.
    Fuzz {
        #[arg(value_enum)]
        system: SystemArg,
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_worlds: usize,
        #[arg(long, default_value_t = 2)]
        max_agents: usize,
        #[arg(long, default_value_t = 3)]
        max_props: usize,
        #[arg(long, default_value_t = 4)]
        max_seeds: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

/// The text printed for one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub echo: String,
    pub digest: String,
    pub body: String,
    pub exit: i32,
}

impl RunReport {
    pub fn render(&self) -> String {
        format!("# {}\n# input sha256:{}\n{}", self.echo, self.digest, self.body)
    }
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

fn quote(arg: &str) -> String {
    let plain = !arg.is_empty()
        && arg
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_./=:,[]@%+".contains(c));
    if plain {
        arg.to_string()
    } else {
        format!("'{}'", arg.replace('\'', r"'\''"))
    }
}

fn read(path: &Path, digest: &mut Sha256) -> Result<String, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    digest.update(text.as_bytes());
    Ok(text)
}

fn load(path: &Path, digest: &mut Sha256) -> Result<Loaded, Failure> {
    let text = read(path, digest)?;
    load_any(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| Failure(format!("formula: {e}")))
}

fn universe_note(out: &mut String, m: &Model) {
    let _ = writeln!(
        out,
        "# universe: {} formulas; formulas outside it have no explanations",
        m.universe().len()
    );
}

fn warnings(out: &mut String, m: &Model) {
    for w in m.warnings() {
        let _ = writeln!(out, "# warning: {w}");
    }
}

fn verdict_text(
    out: &mut String,
    v: &Verdict,
    frame: &crate::model::Frame,
    w: crate::worlds::WorldId,
    f: &Formula,
    trace: bool,
) -> i32 {
    let _ = writeln!(out, "{}", v.value);
    if trace {
        if let Some(t) = &v.trace {
            out.push_str(&render_trace(frame, w, f, t));
        }
    }
    if v.value {
        0
    } else {
        1
    }
}

fn check_jl(out: &mut String, j: &JLModel, world: &str, f: &Formula, trace: bool) -> Result<i32, Failure> {
    let w = j.world_id(world)?;
    let v = eval_jl(j, w, f)?;
    Ok(verdict_text(out, &v, j.frame(), w, f, trace))
}

fn execute(cmd: Command, digest: &mut Sha256, out: &mut String) -> Result<i32, Failure> {
    match cmd {
        Command::Check {
            model,
            world,
            formula: text,
            jl,
            trace,
        } => {
            let f = formula(&text)?;
            match load(&model, digest)? {
                Loaded::Explanation(m) => {
                    warnings(out, &m);
                    let m = m.with_query([&f])?;
                    if jl {
                        check_jl(out, &jl_transform(&m), &world, &f, trace)
                    } else {
                        let w = m.world_id(&world)?;
                        let v = eval(&m, w, &f)?;
                        Ok(verdict_text(out, &v, m.frame(), w, &f, trace))
                    }
                }
                Loaded::Justification(j) => check_jl(out, &j, &world, &f, trace),
            }
        }
        Command::Validate {
            model,
            factivity,
            introspection,
        } => match load(&model, digest)? {
            Loaded::Explanation(m) => {
                warnings(out, &m);
                let _ = writeln!(
                    out,
                    "model: ok ({} worlds, {} agents, {} seeds, {} coverage entries)",
                    m.frame().world_count(),
                    m.frame().agents().len(),
                    m.seeds().len(),
                    m.coverage().entry_count()
                );
                universe_note(out, &m);
                let mut violations = 0;
                if factivity {
                    let v = check_factivity(&m);
                    let _ = writeln!(out, "factivity: {} violations", v.len());
                    for x in &v {
                        let _ = writeln!(
                            out,
                            "  {} : {} @ {}",
                            x.term,
                            print_formula(&x.formula),
                            m.frame().world_name(x.world)
                        );
                    }
                    violations += v.len();
                }
                if let Some(list) = introspection {
                    let universe = list
                        .split(';')
                        .filter(|s| !s.trim().is_empty())
                        .map(formula)
                        .collect::<Result<Vec<_>, _>>()?;
                    let v = check_introspection(&m, &universe)?;
                    let _ = writeln!(out, "introspection: {} violations", v.len());
                    for x in &v {
                        let _ = writeln!(
                            out,
                            "  {} at {}",
                            print_formula(&x.formula),
                            m.frame().world_name(x.world)
                        );
                    }
                    violations += v.len();
                }
                Ok(if violations == 0 { 0 } else { 1 })
            }
            Loaded::Justification(j) => {
                if factivity || introspection.is_some() {
                    return Err(Failure(
                        "--factivity and --introspection apply to explanation models, not `seed[agent]` models".into(),
                    ));
                }
                let v = validate_jl(&j);
                let _ = writeln!(out, "jl model: {} violations", v.len());
                for x in &v {
                    let _ = writeln!(out, "  {}", x.describe(j.frame()));
                }
                Ok(if v.is_empty() { 0 } else { 1 })
            }
        },
        Command::Saturate { model, queries } => {
            let Loaded::Explanation(m) = load(&model, digest)? else {
                return Err(Failure("saturate needs an explanation model".into()));
            };
            warnings(out, &m);
            let qs = queries.iter().map(|q| formula(q)).collect::<Result<Vec<_>, _>>()?;
            let m = m.with_query(qs.iter())?;
            universe_note(out, &m);
            out.push_str(&print_saturated(&m));
            Ok(0)
        }
        Command::Transform { model, mode, out: path } => {
            let Loaded::Explanation(m) = load(&model, digest)? else {
                return Err(Failure("transform needs an explanation model".into()));
            };
            warnings(out, &m);
            let text = match mode {
                Mode::Factive => print_model(&factive_transform(&m)),
                Mode::Jl => print_jl_model(&jl_transform(&m)),
            };
            match path {
                Some(p) => {
                    std::fs::write(&p, &text).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
                    let _ = writeln!(out, "wrote {}", p.display());
                }
                None => out.push_str(&text),
            }
            Ok(0)
        }
        Command::Prove { proof } => {
            let text = read(&proof, digest)?;
            let p = parse_proof(&text).map_err(|e| Failure(format!("{}: {e}", proof.display())))?;
            let report = check_proof(&p);
            let _ = writeln!(out, "system: {}", p.system.system);
            for (line, v) in p.lines.iter().zip(&report.lines) {
                match &v.error {
                    None => {
                        let _ = writeln!(out, "  {}. ok  {}", v.index, line.justification);
                    }
                    Some(e) => {
                        let _ = writeln!(out, "  {}. FAIL  {}: {e}", v.index, line.justification);
                    }
                }
            }
            match report.first_failure() {
                None if report.accepted() => {
                    let _ = writeln!(out, "accepted");
                    Ok(0)
                }
                None => {
                    let _ = writeln!(out, "rejected: empty proof");
                    Ok(1)
                }
                Some(v) => {
                    let _ = writeln!(out, "rejected at line {}", v.index);
                    Ok(1)
                }
            }
        }
        Command::Fuzz {
            system,
            trials,
            seed,
            max_worlds,
            max_agents,
            max_props,
            max_seeds,
            depth,
        } => {
            if trials == 0 {
                return Err(Failure("trials must be at least 1".into()));
            }
            let config = FuzzConfig {
                system: match system {
                    SystemArg::Sky => System::Sky,
                    SystemArg::Skyi => System::Skyi,
                },
                trials,
                seed,
                max_worlds: max_worlds.clamp(1, 8),
                max_agents: max_agents.max(1),
                max_props: max_props.max(1),
                max_seeds,
                depth,
            };
            let report = fuzz(&config);
            digest.update(format!("{config:?}").as_bytes());
            out.push_str(&report.render());
            Ok(if report.counterexamples.is_empty() { 0 } else { 1 })
        }
    }
}

/// The coverage table as a loadable model: one `seed` line per entry,
/// with entries not given as seeds marked `# derived`.
pub fn print_saturated(m: &Model) -> String {
    let mut out = String::new();
    crate::model::format::write_frame(&mut out, m.frame(), "model");
    for e in m.coverage().iter() {
        let given = m
            .seeds()
            .iter()
            .any(|s| s.term == *e.witness && s.formula == *e.formula && s.worlds == e.worlds);
        crate::model::format::write_seed(&mut out, m.frame(), "seed", e.witness, e.formula, e.worlds);
        out.push_str(if given { "\n" } else { "  # derived\n" });
    }
    out.push_str("end\n");
    out
}

/// Runs one invocation and returns the report; usage errors are reported
/// as `Err` with the text clap would print.
pub fn run_report<I, T>(args: I) -> Result<RunReport, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&args).map_err(|e| {
        let code = if e.use_stderr() { 2 } else { 0 };
        (code, e.render().to_string())
    })?;
    let echo = std::iter::once("whylog".to_string())
        .chain(args.iter().skip(1).map(|a| quote(&a.to_string_lossy())))
        .collect::<Vec<_>>()
        .join(" ");
    let mut digest = Sha256::new();
    let mut body = String::new();
    let exit = execute(cli.command, &mut digest, &mut body).map_err(|Failure(msg)| (2, format!("error: {msg}\n")))?;
    Ok(RunReport {
        echo,
        digest: hex::encode(digest.finalize()),
        body,
        exit,
    })
}

/// Entry point of the binary; prints the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run_report(args) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(report.render().as_bytes());
            let _ = stdout.flush();
            report.exit
        }
        Err((0, text)) => {
            print!("{text}");
            0
        }
        Err((code, text)) => {
            eprint!("{text}");
            code
        }
    }
}
