//! Line-oriented model files.
//!
//! ```text
//! model
//!   worlds: w1 w2 w3
//!   agents: i j
//!   partition i: {w1 w2} {w3}
//!   edges j: w1-w2            # closed to an equivalence relation
//!   val p: w1 w2 w3
//!   lambda: (p -> p)
//!   seed t : p @ w1
//! end
//! ```
//!
//! Justification-style models start with `model jl` and give per-agent
//! evidence as `seed[i] t : p @ w1 w2`.
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{Frame, Model, ModelError};
use crate::syntax::{is_identifier, is_propositional_tautology, print_formula, Agent, Formula, Parser};
use crate::terms::{CoverageTable, Seed, Term};
use crate::transforms::JLModel;
use crate::worlds::{WorldId, WorldSet};

/// Result of loading a file that may hold either kind of model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Loaded {
    Explanation(Model),
    Justification(JLModel),
}

struct Line<'a> {
    number: usize,
    /// byte offset of `text` within the raw line
    offset: usize,
    text: &'a str,
}

#[derive(Default)]
struct Draft {
    worlds: Option<Vec<String>>,
    agents: Option<Vec<Agent>>,
    partitions: BTreeMap<Agent, Vec<WorldSet>>,
    edge_agents: BTreeSet<Agent>,
    valuation: BTreeMap<String, WorldSet>,
    lambda: BTreeSet<Formula>,
    seeds: Vec<Seed>,
    agent_seeds: BTreeMap<Agent, Vec<Seed>>,
    warnings: Vec<String>,
}

impl Draft {
    fn worlds(&self) -> Result<&[String], ModelError> {
        self.worlds
            .as_deref()
            .ok_or_else(|| ModelError::Syntax("`worlds:` must come before any use of a world".into()))
    }

    fn world(&self, name: &str) -> Result<WorldId, ModelError> {
        self.worlds()?
            .iter()
            .position(|w| w == name)
            .map(WorldId)
            .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    fn world_list(&self, text: &str) -> Result<WorldSet, ModelError> {
        text.split_whitespace().map(|w| self.world(w)).collect()
    }

    fn agent(&self, name: &str) -> Result<Agent, ModelError> {
        let agents = self
            .agents
            .as_deref()
            .ok_or_else(|| ModelError::Syntax("`agents:` must come before any use of an agent".into()))?;
        agents
            .iter()
            .find(|a| a.name() == name)
            .cloned()
            .ok_or_else(|| ModelError::UnknownAgent(name.to_string()))
    }
}

fn names(text: &str) -> Result<Vec<String>, ModelError> {
    text.split_whitespace()
        .map(|n| {
            if is_identifier(n) {
                Ok(n.to_string())
            } else {
                Err(ModelError::BadName(n.to_string()))
            }
        })
        .collect()
}

fn formula_at(line: &Line<'_>, start: usize, text: &str) -> Result<Formula, ModelError> {
    let lead = text.len() - text.trim_start().len();
    let mut p = Parser::with_origin(text.trim_start(), line.number, line.offset + start + lead + 1)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

fn term_at(line: &Line<'_>, start: usize, text: &str) -> Result<Term, ModelError> {
    let lead = text.len() - text.trim_start().len();
    let mut p = Parser::with_origin(text.trim_start(), line.number, line.offset + start + lead + 1)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

fn parse_blocks(d: &Draft, text: &str) -> Result<Vec<WorldSet>, ModelError> {
    let mut blocks = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('{')
            .ok_or_else(|| ModelError::Syntax(format!("expected `{{` in partition, found `{rest}`")))?;
        let close = inner
            .find('}')
            .ok_or_else(|| ModelError::Syntax("unclosed `{` in partition".into()))?;
        let block = d.world_list(&inner[..close])?;
        // a world listed twice within one block is harmless, but an empty
        // block is not
        if block.is_empty() {
            return Err(ModelError::Syntax("empty partition block".into()));
        }
        blocks.push(block);
        rest = inner[close + 1..].trim_start();
    }
    Ok(blocks)
}

fn check_partition(d: &Draft, agent: &str, blocks: &[WorldSet]) -> Result<(), ModelError> {
    let names = d.worlds()?;
    let mut covered = WorldSet::EMPTY;
    for &b in blocks {
        if let Some(w) = (b & covered).first() {
            return Err(ModelError::OverlappingBlocks {
                agent: agent.to_string(),
                world: names[w.0].clone(),
            });
        }
        covered = covered | b;
    }
    match (WorldSet::full(names.len()) - covered).first() {
        Some(w) => Err(ModelError::IncompletePartition {
            agent: agent.to_string(),
            world: names[w.0].clone(),
        }),
        None => Ok(()),
    }
}

fn parse_edges(d: &Draft, text: &str) -> Result<Vec<WorldSet>, ModelError> {
    let n = d.worlds()?.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for edge in text.split_whitespace() {
        let (a, b) = edge
            .split_once('-')
            .ok_or_else(|| ModelError::Syntax(format!("expected `world-world`, found `{edge}`")))?;
        let (a, b) = (d.world(a)?.0, d.world(b)?.0);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut blocks: BTreeMap<usize, WorldSet> = BTreeMap::new();
    for w in 0..n {
        let r = find(&mut parent, w);
        blocks.entry(r).or_default().insert(WorldId(w));
    }
    Ok(blocks.into_values().collect())
}

fn parse_seed(d: &Draft, line: &Line<'_>, keyword_len: usize) -> Result<Seed, ModelError> {
    let body = &line.text[keyword_len..];
    let colon = body
        .find(':')
        .ok_or_else(|| ModelError::Syntax("expected `seed <term> : <formula> @ <worlds>`".into()))?;
    let at = body
        .rfind('@')
        .filter(|&a| a > colon)
        .ok_or_else(|| ModelError::Syntax("expected `@` before the world list".into()))?;
    let term = term_at(line, keyword_len, &body[..colon])?;
    let formula = formula_at(line, keyword_len + colon + 1, &body[colon + 1..at])?;
    let worlds = d.world_list(&body[at + 1..])?;
    if worlds.is_empty() {
        return Err(ModelError::EmptySeed(formula));
    }
    Ok(Seed::new(term, formula, worlds))
}

fn directive(d: &mut Draft, line: &Line<'_>) -> Result<(), ModelError> {
    let text = line.text;
    let (head, rest) = match text.find(':') {
        Some(c) => (text[..c].trim(), &text[c + 1..]),
        None => (text, ""),
    };
    let mut words = head.split_whitespace();
    let first = words.next().unwrap_or("");
    if let Some(agent) = first.strip_prefix("seed[").and_then(|s| s.strip_suffix(']')) {
        let agent = d.agent(agent)?;
        let seed = parse_seed(d, line, first.len())?;
        d.agent_seeds.entry(agent).or_default().push(seed);
        return Ok(());
    }
    match first {
        "worlds" if words.next().is_none() => {
            if d.worlds.is_some() {
                return Err(ModelError::Syntax("`worlds:` given twice".into()));
            }
            d.worlds = Some(names(rest)?);
        }
        "agents" if words.next().is_none() => {
            if d.agents.is_some() {
                return Err(ModelError::Syntax("`agents:` given twice".into()));
            }
            d.agents = Some(names(rest)?.into_iter().map(Agent::new).collect());
        }
        "partition" | "edges" => {
            let name = words
                .next()
                .ok_or_else(|| ModelError::Syntax(format!("expected `{first} <agent>:`")))?;
            let agent = d.agent(name)?;
            if d.partitions.contains_key(&agent) {
                return Err(ModelError::DuplicatePartition(name.to_string()));
            }
            let blocks = if first == "partition" {
                parse_blocks(d, rest)?
            } else {
                d.edge_agents.insert(agent.clone());
                d.warnings.push(format!(
                    "line {}: edges of agent `{name}` closed to an equivalence relation",
                    line.number
                ));
                parse_edges(d, rest)?
            };
            check_partition(d, name, &blocks)?;
            d.partitions.insert(agent, blocks);
        }
        "val" => {
            let p = words
                .next()
                .ok_or_else(|| ModelError::Syntax("expected `val <proposition>:`".into()))?;
            if !is_identifier(p) || p == crate::syntax::RESERVED_PROP {
                return Err(ModelError::BadName(p.to_string()));
            }
            let set = d.world_list(rest)?;
            let slot = d.valuation.entry(p.to_string()).or_default();
            *slot = *slot | set;
        }
        "lambda" => {
            let start = text.find(':').unwrap() + 1;
            let f = formula_at(line, start, rest)?;
            if !is_propositional_tautology(&f).unwrap_or(false) {
                return Err(ModelError::NotTautology(f));
            }
            d.lambda.insert(f);
        }
        "seed" => {
            let seed = parse_seed(d, line, first.len())?;
            d.seeds.push(seed);
        }
        _ => return Err(ModelError::Syntax(format!("unknown directive `{first}`"))),
    }
    Ok(())
}

/// Loads an explanation model or a justification-style model; the latter
/// is recognised by the `model jl` header or by `seed[agent]` lines.
pub fn load_any(text: &str) -> Result<Loaded, ModelError> {
    let mut lines = text.lines().enumerate().filter_map(|(k, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            None
        } else {
            let offset = body.len() - body.trim_start().len();
            Some(Line {
                number: k + 1,
                offset,
                text: trimmed,
            })
        }
    });
    let marked_jl = match lines.next() {
        Some(l) if l.text == "model" => false,
        Some(l) if l.text.split_whitespace().eq(["model", "jl"]) => true,
        Some(l) => return Err(ModelError::Syntax("expected `model` or `model jl`".into()).at(l.number)),
        None => return Err(ModelError::Syntax("empty model file".into())),
    };
    let mut d = Draft::default();
    let mut ended = None;
    for line in lines.by_ref() {
        if line.text == "end" {
            ended = Some(line.number);
            break;
        }
        directive(&mut d, &line).map_err(|e| e.at(line.number))?;
    }
    let end_line = ended.ok_or_else(|| ModelError::Syntax("missing `end`".into()))?;
    if let Some(l) = lines.next() {
        return Err(ModelError::Syntax("text after `end`".into()).at(l.number));
    }
    let jl = marked_jl || !d.agent_seeds.is_empty();
    if jl && !d.seeds.is_empty() {
        return Err(
            ModelError::Syntax("a justification-style model takes `seed[agent]` lines only".into()).at(end_line),
        );
    }
    let worlds = d.worlds.take().ok_or(ModelError::NoWorlds)?;
    let agents = d.agents.take().ok_or(ModelError::NoAgents)?;
    let frame = Frame::new(
        worlds,
        agents,
        std::mem::take(&mut d.partitions),
        std::mem::take(&mut d.valuation),
        std::mem::take(&mut d.lambda),
    )?;
    if !jl {
        let mut m = Model::new(frame, d.seeds)?;
        for w in d.warnings {
            m.push_warning(w);
        }
        Ok(Loaded::Explanation(m))
    } else {
        let mut evidence = BTreeMap::new();
        for a in frame.agents() {
            let mut table = CoverageTable::new(BTreeSet::new());
            for s in d.agent_seeds.remove(a).unwrap_or_default() {
                table.insert(s.formula, s.worlds, s.term);
            }
            evidence.insert(a.clone(), table);
        }
        Ok(Loaded::Justification(JLModel::from_evidence(frame, evidence)))
    }
}

/// Loads an explanation model.
pub fn load_model(text: &str) -> Result<Model, ModelError> {
    match load_any(text)? {
        Loaded::Explanation(m) => Ok(m),
        Loaded::Justification(_) => Err(ModelError::Syntax(
            "per-agent `seed[agent]` lines describe a justification-style model".into(),
        )),
    }
}

fn write_worlds(out: &mut String, frame: &Frame, set: WorldSet) {
    for (k, name) in frame.world_set_names(set).into_iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        out.push_str(name);
    }
}

pub(crate) fn write_frame(out: &mut String, frame: &Frame, header: &str) {
    out.push_str(header);
    out.push_str("\n  worlds: ");
    write_worlds(out, frame, frame.all_worlds());
    out.push_str("\n  agents:");
    for a in frame.agents() {
        out.push(' ');
        out.push_str(a.name());
    }
    out.push('\n');
    for a in frame.agents() {
        let _ = write!(out, "  partition {a}:");
        for b in frame.blocks(a).expect("declared agent") {
            out.push_str(" {");
            write_worlds(out, frame, *b);
            out.push('}');
        }
        out.push('\n');
    }
    for (p, set) in frame.valuation() {
        let _ = write!(out, "  val {p}:");
        if !set.is_empty() {
            out.push(' ');
            write_worlds(out, frame, *set);
        }
        out.push('\n');
    }
    for l in frame.lambda() {
        let _ = writeln!(out, "  lambda: {}", print_formula(l));
    }
}

pub(crate) fn write_seed(out: &mut String, frame: &Frame, keyword: &str, term: &Term, f: &Formula, set: WorldSet) {
    let _ = write!(out, "  {keyword} {term} : {} @ ", print_formula(f));
    write_worlds(out, frame, set);
}

/// Canonical text of a model; `load_model` reads it back unchanged.
pub fn print_model(m: &Model) -> String {
    let mut out = String::new();
    write_frame(&mut out, m.frame(), "model");
    for s in m.seeds() {
        write_seed(&mut out, m.frame(), "seed", &s.term, &s.formula, s.worlds);
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    const EXAMPLE: &str = "\
model
  worlds: w1 w2 w3
  agents: i j
  partition i: {w1 w2} {w3}
  partition j: {w1} {w2 w3}
  val p: w1 w2 w3
  seed t_prime : p @ w1
  seed t : p @ w2
  seed s : p @ w2 w3
end
";

    fn ws(ids: &[usize]) -> WorldSet {
        ids.iter().map(|&i| WorldId(i)).collect()
    }

    #[test]
    fn loads_example() {
        let m = load_model(EXAMPLE).unwrap();
        let (i, j) = (Agent::new("i"), Agent::new("j"));
        assert_eq!(m.frame().blocks(&i).unwrap(), &[ws(&[0, 1]), ws(&[2])]);
        assert_eq!(m.frame().blocks(&j).unwrap(), &[ws(&[0]), ws(&[1, 2])]);
        assert_eq!(m.seeds().len(), 3);
        assert_eq!(print_model(&m), EXAMPLE);
    }

    #[test]
    fn overlapping_blocks() {
        let text = EXAMPLE.replace("partition i: {w1 w2} {w3}", "partition i: {w1 w2} {w2}");
        let err = load_model(&text).unwrap_err();
        assert!(err.to_string().contains("overlapping"), "{err}");
    }

    #[test]
    fn lambda_must_be_tautology() {
        let text = EXAMPLE.replace("  val p", "  lambda: p\n  val p");
        match load_model(&text).unwrap_err() {
            ModelError::Line { line, error } => {
                assert_eq!(line, 6);
                assert!(matches!(*error, ModelError::NotTautology(_)));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn declaration_order() {
        let text = "model\n  agents: i\n  partition i: {w1}\n  worlds: w1\nend\n";
        let err = load_model(text).unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        let text = "model\n  worlds: w1\n  agents: i\n  partition i: {w1}\n  seed t : p @ w9\nend\n";
        assert!(load_model(text).unwrap_err().to_string().contains("unknown world `w9`"));
    }

    #[test]
    fn formula_errors_point_into_file() {
        let text = "model\n  worlds: w1\n  agents: i\n  partition i: {w1}\n  lambda: (p ->\nend\n";
        match load_model(text).unwrap_err() {
            ModelError::Parse(e) => assert_eq!((e.line, e.column), (5, 16)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn edges_are_closed() {
        let text = "model\n  worlds: a b c d\n  agents: i\n  edges i: a-b b-c\nend\n";
        let m = load_model(text).unwrap();
        let i = Agent::new("i");
        assert_eq!(m.frame().blocks(&i).unwrap(), &[ws(&[0, 1, 2]), ws(&[3])]);
        assert_eq!(m.warnings().len(), 1);
    }

    #[test]
    fn missing_partition_and_end() {
        let text = "model\n  worlds: w1\n  agents: i j\n  partition i: {w1}\nend\n";
        assert_eq!(load_model(text).unwrap_err(), ModelError::MissingPartition("j".into()));
        let text = "model\n  worlds: w1\n  agents: i\n  partition i: {w1}\n";
        assert!(load_model(text).is_err());
    }

    #[test]
    fn values_accumulate_and_compound_terms() {
        let text = "model\n  worlds: w1 w2\n  agents: i\n  partition i: {w1 w2}\n  val p: w1\n  val p: w2\n  seed (s . t) : (p -> Ky[i](q, p)) @ w1\nend\n";
        let m = load_model(text).unwrap();
        assert_eq!(m.frame().truth_of_prop("p"), ws(&[0, 1]));
        assert_eq!(m.seeds()[0].formula, parse_formula("(p -> Ky[i](q, p))").unwrap());
        assert_eq!(load_model(&print_model(&m)).unwrap(), m);
    }

    #[test]
    fn errors_carry_lines() {
        let text = "model\n  worlds: w1 w2\n  agents: i\n  partition i: {w1 w2} {w2}\nend\n";
        assert!(load_model(text).unwrap_err().to_string().starts_with("line 4: "));
        let text = "model\n  worlds: w1 w2\n  agents: i\n  partition i: {w1}\nend\n";
        assert!(load_model(text).unwrap_err().to_string().starts_with("line 4: "));
        let text = "model\n  worlds: w1\n  agents: i\n  partition i: {w1}\n\n  lambda: (p -> q)\nend\n";
        assert!(load_model(text).unwrap_err().to_string().starts_with("line 6: "));
    }

    #[test]
    fn justification_models() {
        let text = "model jl\n  worlds: w1\n  agents: i\n  partition i: {w1}\nend\n";
        assert!(matches!(load_any(text).unwrap(), Loaded::Justification(_)));
        let text = "model jl\n  worlds: w1\n  agents: i\n  partition i: {w1}\n  seed t : p @ w1\nend\n";
        assert!(load_any(text).is_err());
        let text = "model\n  worlds: w1 w2\n  agents: i\n  partition i: {w1 w2}\n  seed[i] t : p @ w1 w2\nend\n";
        match load_any(text).unwrap() {
            Loaded::Justification(j) => assert_eq!(j.evidence(&Agent::new("i")).unwrap().entry_count(), 1),
            other => panic!("{other:?}"),
        }
        assert!(load_model(text).is_err());
    }
}
