//! Hilbert-style proofs in the systems SKY and SKYI.

mod schema;

use std::collections::BTreeSet;
use std::fmt::{self, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{is_propositional_tautology, print_formula, Agent, Formula, ParseError, Parser};

pub use schema::{instantiate, match_schema, Axiom, Pattern, Substitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum System {
    Sky,
    Skyi,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Sky => "SKY",
            System::Skyi => "SKYI",
        }
    }

    pub fn axioms(self) -> &'static [Axiom] {
        use Axiom::*;
        match self {
            System::Sky => &[Taut, DistK, DistY, T, Four, Five, Pres, FourYK],
            System::Skyi => &[Taut, DistK, DistY, T, Pres, FourKY, FiveKY, FourY, FiveY],
        }
    }

    pub fn has(self, axiom: Axiom) -> bool {
        self.axioms().contains(&axiom)
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = ProofError;

    fn from_str(s: &str) -> Result<System, ProofError> {
        match s {
            "SKY" => Ok(System::Sky),
            "SKYI" => Ok(System::Skyi),
            other => Err(ProofError::UnknownSystem(other.to_string())),
        }
    }
}

/// A system together with its tautology ground.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemId {
    pub system: System,
    pub lambda: BTreeSet<Formula>,
}

impl SystemId {
    pub fn new(system: System, lambda: BTreeSet<Formula>) -> Result<SystemId, ProofError> {
        for l in &lambda {
            if !is_propositional_tautology(l).unwrap_or(false) {
                return Err(ProofError::NotTautology(l.clone()));
            }
        }
        Ok(SystemId { system, lambda })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("unknown system `{0}` (expected SKY or SKYI)")]
    UnknownSystem(String),
    #[error("axiom {axiom} is not part of {system}")]
    NotInSystem { system: System, axiom: Axiom },
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
    #[error("lambda member {0} is not a propositional tautology")]
    NotTautology(Formula),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// A substitution instantiating the named schema of `system` to `f`.
pub fn match_axiom(system: &SystemId, name: &str, f: &Formula) -> Result<Option<Substitution>, ProofError> {
    let axiom = Axiom::from_str(name).map_err(|_| ProofError::UnknownAxiom(name.to_string()))?;
    if !system.system.has(axiom) {
        return Err(ProofError::NotInSystem {
            system: system.system,
            axiom,
        });
    }
    Ok(match_schema(axiom, f))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(Axiom),
    Mp(usize, usize),
    /// necessitation of the cited line; the agent is read off this line
    Neck(usize),
    Necky,
    Pl(Vec<usize>),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(a) => write!(f, "{a}"),
            Justification::Mp(a, b) => write!(f, "MP {a} {b}"),
            Justification::Neck(a) => write!(f, "NECK {a}"),
            Justification::Necky => f.write_str("NECKY"),
            Justification::Pl(is) => {
                f.write_str("PL")?;
                for i in is {
                    write!(f, " {i}")?;
                }
                Ok(())
            }
        }
    }
}

impl Justification {
    fn from_tokens(tokens: &[&str]) -> Option<Justification> {
        let (head, rest) = tokens.split_first()?;
        let nums: Vec<usize> = rest.iter().map(|t| t.parse().ok()).collect::<Option<_>>()?;
        match (*head, nums.as_slice()) {
            ("MP", [a, b]) => Some(Justification::Mp(*a, *b)),
            ("NECK", [a]) => Some(Justification::Neck(*a)),
            ("NECKY", []) => Some(Justification::Necky),
            ("PL", [_, ..]) => Some(Justification::Pl(nums)),
            (name, []) => Axiom::from_str(name).ok().map(Justification::Axiom),
            _ => None,
        }
    }

    fn citations(&self) -> Vec<usize> {
        match self {
            Justification::Axiom(_) | Justification::Necky => Vec::new(),
            Justification::Mp(a, b) => vec![*a, *b],
            Justification::Neck(a) => vec![*a],
            Justification::Pl(is) => is.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofLine {
    pub index: usize,
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub system: SystemId,
    pub lines: Vec<ProofLine>,
}

fn strip_comment(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("")
}

fn parse_line(number: usize, raw: &str) -> Result<ProofLine, ProofError> {
    let body = strip_comment(raw);
    let lead = body.len() - body.trim_start().len();
    let text = body.trim();
    let syntax = |message: String| ProofError::Syntax { line: number, message };
    let dot = text
        .find('.')
        .ok_or_else(|| syntax("expected `<number>. <formula> <justification>`".into()))?;
    let index: usize = text[..dot]
        .trim()
        .parse()
        .map_err(|_| syntax(format!("expected a line number, found `{}`", &text[..dot])))?;
    let rest = &text[dot + 1..];
    let tokens: Vec<(usize, &str)> = rest
        .split_whitespace()
        .map(|t| (t.as_ptr() as usize - rest.as_ptr() as usize, t))
        .collect();
    let mut first_error = None;
    for k in 1..tokens.len() {
        let just: Vec<&str> = tokens[tokens.len() - k..].iter().map(|(_, t)| *t).collect();
        let Some(justification) = Justification::from_tokens(&just) else {
            continue;
        };
        let cut = tokens[tokens.len() - k].0;
        let ftext = &rest[..cut];
        let flead = ftext.len() - ftext.trim_start().len();
        let column = lead + dot + 1 + flead + 1;
        let parsed = Parser::with_origin(ftext.trim(), number, column).and_then(|mut p| {
            let f = p.formula()?;
            p.finish()?;
            Ok(f)
        });
        match parsed {
            Ok(formula) => {
                return Ok(ProofLine {
                    index,
                    formula,
                    justification,
                })
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    Err(match first_error {
        Some(e) => e.into(),
        None => syntax("expected a justification: an axiom name, `MP i j`, `NECK i`, `NECKY` or `PL i ...`".into()),
    })
}

/// Reads the proof file format:
///
/// ```text
/// proof SKY
///   lambda: (p -> p)
///   1. (K[i] Ky[i] p -> Ky[i] p)    T
///   2. (~Ky[i] p -> ~K[i] Ky[i] p)  PL 1
/// end
/// ```
pub fn parse_proof(text: &str) -> Result<Proof, ProofError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| !strip_comment(l).trim().is_empty());
    let (n, header) = lines.next().ok_or(ProofError::Syntax {
        line: 1,
        message: "empty proof file".into(),
    })?;
    let header = strip_comment(header).trim();
    let system = match header.strip_prefix("proof") {
        Some(rest) if rest.starts_with(char::is_whitespace) => rest.trim().parse::<System>()?,
        _ => {
            return Err(ProofError::Syntax {
                line: n,
                message: "expected `proof SKY` or `proof SKYI`".into(),
            })
        }
    };
    let mut lambda = BTreeSet::new();
    let mut out = Vec::new();
    let mut ended = false;
    for (n, raw) in lines.by_ref() {
        let t = strip_comment(raw).trim();
        if t == "end" {
            ended = true;
            break;
        }
        if t.starts_with("lambda:") {
            if !out.is_empty() {
                return Err(ProofError::Syntax {
                    line: n,
                    message: "`lambda:` lines must precede the proof lines".into(),
                });
            }
            let col = raw.find("lambda:").unwrap() + "lambda:".len();
            let ftext = &raw[col..];
            let flead = ftext.len() - ftext.trim_start().len();
            let mut p = Parser::with_origin(strip_comment(ftext).trim(), n, col + flead + 1)?;
            let f = p.formula()?;
            p.finish()?;
            lambda.insert(f);
            continue;
        }
        out.push(parse_line(n, raw)?);
    }
    if !ended {
        return Err(ProofError::Syntax {
            line: text.lines().count().max(1),
            message: "missing `end`".into(),
        });
    }
    if let Some((n, _)) = lines.next() {
        return Err(ProofError::Syntax {
            line: n,
            message: "text after `end`".into(),
        });
    }
    Ok(Proof {
        system: SystemId::new(system, lambda)?,
        lines: out,
    })
}

pub fn print_proof(p: &Proof) -> String {
    let mut out = format!("proof {}\n", p.system.system);
    for l in &p.system.lambda {
        let _ = writeln!(out, "  lambda: {}", print_formula(l));
    }
    for l in &p.lines {
        let _ = writeln!(out, "  {}. {}  {}", l.index, print_formula(&l.formula), l.justification);
    }
    out.push_str("end\n");
    out
}

/// The outcome for one proof line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineVerdict {
    pub index: usize,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofReport {
    pub lines: Vec<LineVerdict>,
}

impl ProofReport {
    pub fn accepted(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(|l| l.error.is_none())
    }

    pub fn first_failure(&self) -> Option<&LineVerdict> {
        self.lines.iter().find(|l| l.error.is_some())
    }
}

fn check_line(p: &Proof, pos: usize) -> Result<(), String> {
    let line = &p.lines[pos];
    if line.index != pos + 1 {
        return Err(format!("expected line number {}, found {}", pos + 1, line.index));
    }
    let cited = |k: usize| -> Result<&Formula, String> {
        if k == 0 || k >= line.index {
            Err(format!("cites line {k}, which does not precede it"))
        } else {
            Ok(&p.lines[k - 1].formula)
        }
    };
    for k in line.justification.citations() {
        cited(k)?;
    }
    let f = &line.formula;
    match &line.justification {
        Justification::Axiom(a) => {
            if !p.system.system.has(*a) {
                return Err(format!("axiom {a} is not part of {}", p.system.system));
            }
            match match_schema(*a, f) {
                Some(_) => Ok(()),
                None if *a == Axiom::Taut => Err("not a propositional tautology".into()),
                None => Err(format!("not an instance of {a}")),
            }
        }
        Justification::Mp(a, b) => {
            let (fa, fb) = (cited(*a)?, cited(*b)?);
            let fits = |imp: &Formula, ante: &Formula| imp.as_implication() == Some((ante, f));
            if fits(fb, fa) || fits(fa, fb) {
                Ok(())
            } else {
                Err("neither cited line is an implication from the other to this line".to_string())
            }
        }
        Justification::Neck(a) => {
            let fa = cited(*a)?;
            match f {
                Formula::K(_, body) if **body == *fa => Ok(()),
                _ => Err(format!("not of the form K[agent] applied to line {a}")),
            }
        }
        Justification::Necky => match f {
            Formula::Ky(_, body) if p.system.lambda.contains(body) => Ok(()),
            Formula::Ky(_, body) => Err(format!("{body} is not in lambda")),
            _ => Err("not of the form Ky[agent] f".into()),
        },
        Justification::Pl(is) => {
            let mut premises = is.iter().map(|&k| cited(k).cloned());
            let first = premises.next().expect("PL cites at least one line")?;
            let conj = premises.try_fold(first, |acc, g| g.map(|g| Formula::and(acc, g)))?;
            match is_propositional_tautology(&Formula::implies(conj, f.clone())) {
                Ok(true) => Ok(()),
                Ok(false) => Err("does not follow propositionally from the cited lines".into()),
                Err(e) => Err(e.to_string()),
            }
        }
    }
}

/// Checks every line; a line failing also makes the proof fail, but the
/// lines after it are still checked against their cited formulas.
pub fn check_proof(p: &Proof) -> ProofReport {
    ProofReport {
        lines: (0..p.lines.len())
            .map(|pos| LineVerdict {
                index: p.lines[pos].index,
                error: check_line(p, pos).err(),
            })
            .collect(),
    }
}

/// The SKY proof of negative introspection of knowing why by knowing that.
pub const PROOF_5YK: &str = "\
proof SKY
  1. (K[i] Ky[i] p -> Ky[i] p)  T
  2. (~Ky[i] p -> ~K[i] Ky[i] p)  PL 1
  3. (~K[i] Ky[i] p -> K[i] ~K[i] Ky[i] p)  5
  4. (Ky[i] p -> K[i] Ky[i] p)  4YK
  5. (~K[i] Ky[i] p -> ~Ky[i] p)  PL 4
  6. K[i] (~K[i] Ky[i] p -> ~Ky[i] p)  NECK 5
  7. (K[i] (~K[i] Ky[i] p -> ~Ky[i] p) -> (K[i] ~K[i] Ky[i] p -> K[i] ~Ky[i] p))  DISTK
  8. (K[i] ~K[i] Ky[i] p -> K[i] ~Ky[i] p)  MP 6 7
  9. (~Ky[i] p -> K[i] ~K[i] Ky[i] p)  PL 2 3
  10. (~Ky[i] p -> K[i] ~Ky[i] p)  PL 8 9
end
";

const SKYI_4: &str = "\
proof SKYI
  1. (K[i] p -> Ky[i] K[i] p)  4KY
  2. (Ky[i] K[i] p -> K[i] K[i] p)  PRES
  3. (K[i] p -> K[i] K[i] p)  PL 1 2
end
";

const SKYI_5: &str = "\
proof SKYI
  1. (~K[i] p -> Ky[i] ~K[i] p)  5KY
  2. (Ky[i] ~K[i] p -> K[i] ~K[i] p)  PRES
  3. (~K[i] p -> K[i] ~K[i] p)  PL 1 2
end
";

const SKYI_4YK: &str = "\
proof SKYI
  1. (Ky[i] p -> Ky[i] Ky[i] p)  4Y
  2. (Ky[i] Ky[i] p -> K[i] Ky[i] p)  PRES
  3. (Ky[i] p -> K[i] Ky[i] p)  PL 1 2
end
";

const SKYI_5YK: &str = "\
proof SKYI
  1. (~Ky[i] p -> Ky[i] ~Ky[i] p)  5Y
  2. (Ky[i] ~Ky[i] p -> K[i] ~Ky[i] p)  PRES
  3. (~Ky[i] p -> K[i] ~Ky[i] p)  PL 1 2
end
";

/// SKYI proofs of 4, 5, 4YK and 5YK, in that order, for the proposition p.
pub fn derive_skyi_theorems() -> Vec<(&'static str, Proof)> {
    [("4", SKYI_4), ("5", SKYI_5), ("4YK", SKYI_4YK), ("5YK", SKYI_5YK)]
        .into_iter()
        .map(|(name, text)| (name, parse_proof(text).expect("built-in proofs parse")))
        .collect()
}

/// The formula each derived theorem should conclude with.
pub fn skyi_theorem_statement(name: &str, agent: &Agent, phi: &Formula) -> Option<Formula> {
    let k = |f: Formula| Formula::k(agent.clone(), f);
    let ky = |f: Formula| Formula::ky(agent.clone(), f);
    let p = phi.clone();
    Some(match name {
        "4" => Formula::implies(k(p.clone()), k(k(p))),
        "5" => Formula::implies(Formula::not(k(p.clone())), k(Formula::not(k(p)))),
        "4YK" => Formula::implies(ky(p.clone()), k(ky(p))),
        "5YK" => Formula::implies(Formula::not(ky(p.clone())), k(Formula::not(ky(p)))),
        _ => return None,
    })
}
