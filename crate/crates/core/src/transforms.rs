//! The factive transform, justification-style models with per-agent
//! evidence, their semantics and their validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::format::{write_frame, write_seed};
use crate::model::{universe_closure, Frame, Model, ModelError};
use crate::semantics::{check_factivity, eval_with, Evaluator, Evidence, SemanticsError, Verdict};
use crate::syntax::{Agent, Formula};
use crate::terms::{saturate, CoverageTable, Seed, Term};
use crate::worlds::{WorldId, WorldSet};

/// Restricts every explanation to the worlds where its formula holds.
///
/// The restricted entries are closed under application again, so the
/// re-saturation only adds entries whose world-sets are intersections of
/// restricted ones. The result lists its whole coverage as seeds (minus the
/// tautology-ground entries), which makes the transform idempotent.
pub fn factive_transform(m: &Model) -> Model {
    let ev = Evaluator::new(m);
    let frame = m.frame();
    let all = frame.all_worlds();
    let mut restricted = Vec::new();
    for entry in m.coverage().iter() {
        let truth = ev
            .truth_set(entry.formula)
            .expect("coverage formulas lie in the universe");
        let worlds = entry.worlds & truth;
        let ground = frame.lambda().contains(entry.formula) && worlds == all && *entry.witness == Term::SelfEvident;
        if !worlds.is_empty() && !ground {
            restricted.push(Seed::new(entry.witness.clone(), entry.formula.clone(), worlds));
        }
    }
    let universe = m.universe().clone();
    let coverage =
        saturate(&restricted, frame.lambda(), all, &universe).expect("restricted entries stay in the universe");
    let seeds: Vec<Seed> = coverage
        .iter()
        .filter(|e| !(frame.lambda().contains(e.formula) && e.worlds == all && *e.witness == Term::SelfEvident))
        .map(|e| Seed::new(e.witness.clone(), e.formula.clone(), e.worlds))
        .collect();
    let out = Model::from_parts(frame.clone(), seeds, universe, coverage);
    debug_assert!(check_factivity(&out).is_empty());
    debug_assert!(out.coverage().closure_gaps().is_empty());
    out
}

/// A model whose explanations are given per agent. Every world of an
/// entry's world-set sees the whole entry: "w is in E_i(t, f) and w R_i v"
/// gives "v is in E_i(t, f)".
#[derive(Clone, PartialEq, Eq)]
pub struct JLModel {
    frame: Frame,
    universe: BTreeSet<Formula>,
    evidence: BTreeMap<Agent, CoverageTable>,
}

impl fmt::Debug for JLModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JLModel")
            .field("frame", &self.frame)
            .field("evidence", &self.evidence)
            .finish()
    }
}

impl JLModel {
    /// Builds a model from per-agent tables, taken as given: nothing is
    /// saturated, so [`validate_jl`] may report violations.
    pub fn from_evidence(frame: Frame, evidence: BTreeMap<Agent, CoverageTable>) -> JLModel {
        let mut formulas = Vec::new();
        for table in evidence.values() {
            for e in table.iter() {
                formulas.push(e.formula.clone());
            }
        }
        let universe = universe_closure(formulas.iter(), frame.lambda(), std::iter::empty());
        let evidence = evidence
            .into_iter()
            .map(|(a, t)| {
                let mut table = CoverageTable::new(universe.clone());
                for e in t.iter() {
                    table.insert(e.formula.clone(), e.worlds, e.witness.clone());
                }
                (a, table)
            })
            .collect();
        JLModel {
            frame,
            universe,
            evidence,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn universe(&self) -> &BTreeSet<Formula> {
        &self.universe
    }

    pub fn evidence(&self, agent: &Agent) -> Option<&CoverageTable> {
        self.evidence.get(agent)
    }

    pub fn world_id(&self, name: &str) -> Result<WorldId, ModelError> {
        self.frame.world_id(name)
    }
}

impl Evidence for JLModel {
    fn frame(&self) -> &Frame {
        &self.frame
    }

    fn witness(&self, agent: &Agent, body: &Formula, w: WorldId, _cell: WorldSet) -> Option<(Term, WorldSet)> {
        self.evidence
            .get(agent)?
            .entries_for(body)
            .filter(|(s, _)| s.contains(w))
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(s, t)| (t.clone(), s))
    }

    fn check_formula(&self, f: &Formula) -> Result<(), SemanticsError> {
        if f.contains_conditional() {
            let mut stack = vec![f];
            while let Some(g) = stack.pop() {
                if matches!(g, Formula::KyCond(..)) {
                    return Err(SemanticsError::ConditionalUnsupported(g.clone()));
                }
                stack.extend(g.children());
            }
        }
        Ok(())
    }
}

/// Union of the blocks of `blocks` that lie inside `set`.
fn interior(blocks: &[WorldSet], set: WorldSet) -> WorldSet {
    blocks
        .iter()
        .filter(|b| b.is_subset(set))
        .fold(WorldSet::EMPTY, |acc, b| acc | *b)
}

/// Per agent, each explanation keeps the worlds whose whole class it covers.
pub fn jl_transform(m: &Model) -> JLModel {
    let frame = m.frame().clone();
    let mut evidence = BTreeMap::new();
    for a in frame.agents() {
        let blocks = frame.blocks(a).expect("declared agent");
        let mut table = CoverageTable::new(m.universe().clone());
        for e in m.coverage().iter() {
            table.insert(e.formula.clone(), interior(blocks, e.worlds), e.witness.clone());
        }
        evidence.insert(a.clone(), table);
    }
    JLModel {
        frame,
        universe: m.universe().clone(),
        evidence,
    }
}

/// Truth under the justification-style clauses: Ky[i] f holds at w when
/// some entry of agent i for f contains w and f holds on the class.
pub fn eval_jl(j: &JLModel, w: WorldId, f: &Formula) -> Result<Verdict, SemanticsError> {
    eval_with(j, w, f, true)
}

/// A failed condition of a justification-style model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum JLViolation {
    /// entries on an implication and its antecedent meet outside every
    /// entry on the consequent
    Application {
        agent: Agent,
        implication: Formula,
        antecedent: Formula,
        worlds: WorldSet,
    },
    /// a tautology-ground member lacks the entry (e, all worlds)
    Ground { agent: Agent, formula: Formula },
    /// an entry cuts through a block of the agent's partition
    Monotonicity {
        agent: Agent,
        formula: Formula,
        term: Term,
        world: WorldId,
    },
}

impl JLViolation {
    pub fn describe(&self, frame: &Frame) -> String {
        let set = |s: WorldSet| frame.world_set_names(s).join(" ");
        match self {
            JLViolation::Application {
                agent,
                implication,
                antecedent,
                worlds,
            } => format!(
                "condition I: agent {agent}: {implication} and {antecedent} meet on {{{}}} with no entry on the consequent",
                set(*worlds)
            ),
            JLViolation::Ground { agent, formula } => {
                format!("condition II: agent {agent}: missing (e, {formula}) on all worlds")
            }
            JLViolation::Monotonicity {
                agent,
                formula,
                term,
                world,
            } => format!(
                "condition III: agent {agent}: {term} for {formula} misses {} in the class of a covered world",
                frame.world_name(*world)
            ),
        }
    }
}

pub fn validate_jl(j: &JLModel) -> Vec<JLViolation> {
    let frame = &j.frame;
    let all = frame.all_worlds();
    let mut out = Vec::new();
    for (agent, table) in &j.evidence {
        for (implication, antecedent, worlds) in table.closure_gaps() {
            out.push(JLViolation::Application {
                agent: agent.clone(),
                implication,
                antecedent,
                worlds,
            });
        }
        for l in frame.lambda() {
            if !table.entries_for(l).any(|(s, t)| s == all && *t == Term::SelfEvident) {
                out.push(JLViolation::Ground {
                    agent: agent.clone(),
                    formula: l.clone(),
                });
            }
        }
        let blocks = frame.blocks(agent).expect("declared agent");
        for e in table.iter() {
            for b in blocks {
                if b.intersects(e.worlds) && !b.is_subset(e.worlds) {
                    out.push(JLViolation::Monotonicity {
                        agent: agent.clone(),
                        formula: e.formula.clone(),
                        term: e.witness.clone(),
                        world: (*b - e.worlds).first().unwrap(),
                    });
                }
            }
        }
    }
    out
}

/// Canonical text of a justification-style model; one `seed[agent]` line
/// per stored entry.
pub fn print_jl_model(j: &JLModel) -> String {
    let mut out = String::new();
    write_frame(&mut out, &j.frame, "model jl");
    for (agent, table) in &j.evidence {
        for e in table.iter() {
            write_seed(
                &mut out,
                &j.frame,
                &format!("seed[{agent}]"),
                e.witness,
                e.formula,
                e.worlds,
            );
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_any, load_model, print_model, Loaded};
    use crate::semantics::eval;
    use crate::syntax::parse_formula;

    const EXAMPLE: &str = "model
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

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn ws(ids: &[usize]) -> WorldSet {
        ids.iter().map(|&i| WorldId(i)).collect()
    }

    #[test]
    fn factive_restricts() {
        let m = load_model(
            "model\n worlds: w1 w2\n agents: i\n partition i: {w1 w2}\n val p: w1\n seed t : p @ w1 w2\nend\n",
        )
        .unwrap();
        let out = factive_transform(&m);
        let entries: Vec<_> = out
            .coverage()
            .entries_for(&f("p"))
            .map(|(s, t)| (s, t.clone()))
            .collect();
        assert_eq!(entries, vec![(ws(&[0]), Term::base("t"))]);
        assert!(check_factivity(&out).is_empty());
    }

    #[test]
    fn factive_on_factive_model() {
        let m = load_model(EXAMPLE).unwrap();
        let out = factive_transform(&m);
        assert_eq!(out.coverage(), m.coverage());
        assert_eq!(print_model(&out), EXAMPLE);
    }

    #[test]
    fn factive_idempotent() {
        let text = "model\n worlds: w1 w2 w3\n agents: i\n partition i: {w1 w2} {w3}\n val p: w1 w2\n val q: w2 w3\n lambda: (p -> p)\n seed s : (p -> q) @ w1 w2 w3\n seed t : p @ w1 w2 w3\nend\n";
        let once = print_model(&factive_transform(&load_model(text).unwrap()));
        let twice = print_model(&factive_transform(&load_model(&once).unwrap()));
        assert_eq!(once, twice);
    }

    #[test]
    fn jl_blocks() {
        let m = load_model("model\n worlds: w1 w2 w3\n agents: i j\n partition i: {w1 w2} {w3}\n partition j: {w1 w2 w3}\n val p: w1 w2\n lambda: (p -> p)\n seed t : p @ w1 w2\nend\n").unwrap();
        let j = jl_transform(&m);
        let (i, jj) = (Agent::new("i"), Agent::new("j"));
        let ei: Vec<_> = j.evidence(&i).unwrap().entries_for(&f("p")).map(|(s, _)| s).collect();
        assert_eq!(ei, vec![ws(&[0, 1])]);
        assert_eq!(j.evidence(&jj).unwrap().entries_for(&f("p")).count(), 0);
        for a in [&i, &jj] {
            let l: Vec<_> = j
                .evidence(a)
                .unwrap()
                .entries_for(&f("(p -> p)"))
                .map(|(s, t)| (s, t.clone()))
                .collect();
            assert_eq!(l, vec![(ws(&[0, 1, 2]), Term::SelfEvident)]);
        }
        assert!(validate_jl(&j).is_empty());
    }

    #[test]
    fn jl_agrees_on_example() {
        let m = load_model(EXAMPLE).unwrap();
        let q = f("(K[i]p & ~Ky[i]p & Ky[j]p & K[i]Ky[j]p)");
        let m = m.with_query([&q]).unwrap();
        let j = jl_transform(&m);
        for w in 0..3 {
            for g in m.universe() {
                assert_eq!(
                    eval(&m, WorldId(w), g).unwrap().value,
                    eval_jl(&j, WorldId(w), g).unwrap().value,
                    "{g}"
                );
            }
        }
        let text = print_jl_model(&j);
        match load_any(&text).unwrap() {
            Loaded::Justification(back) => assert_eq!(print_jl_model(&back), text),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jl_single_world_and_conditional() {
        let m =
            load_model("model\n worlds: w\n agents: i\n partition i: {w}\n val p: w\n seed t : p @ w\nend\n").unwrap();
        let j = jl_transform(&m);
        assert!(eval_jl(&j, WorldId(0), &f("Ky[i]p")).unwrap().value);
        assert!(matches!(
            eval_jl(&j, WorldId(0), &f("Ky[i](q, p)")),
            Err(SemanticsError::ConditionalUnsupported(_))
        ));
    }

    #[test]
    fn jl_violations() {
        let text =
            "model\n worlds: w1 w2\n agents: i\n partition i: {w1 w2}\n lambda: (p -> p)\n seed[i] t : p @ w1\nend\n";
        let Loaded::Justification(j) = load_any(text).unwrap() else {
            panic!()
        };
        let v = validate_jl(&j);
        assert!(v.iter().any(|x| matches!(x, JLViolation::Monotonicity { .. })));
        assert!(v.iter().any(|x| matches!(x, JLViolation::Ground { .. })));
        let text = "model\n worlds: w1\n agents: i\n partition i: {w1}\n seed[i] s : (p -> q) @ w1\n seed[i] t : p @ w1\nend\n";
        let Loaded::Justification(j) = load_any(text).unwrap() else {
            panic!()
        };
        assert!(matches!(validate_jl(&j).as_slice(), [JLViolation::Application { .. }]));
    }
}
