//! Truth at a world, with replayable traces, and the factivity and
//! introspection checks.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use thiserror::Error;

use crate::model::{Frame, Model, ModelError};
use crate::syntax::{Agent, Formula};
use crate::terms::{Seed, Term};
use crate::worlds::{WorldId, WorldSet};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("formula `{0}` is outside the model's universe")]
    OutsideUniverse(Formula),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("`{0}` is not of the form K[i] f, ~K[i] f, Ky[i] f or ~Ky[i] f")]
    NotIntrospectiveShape(Formula),
    #[error("justification-style semantics does not support conditional Ky: `{0}`")]
    ConditionalUnsupported(Formula),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Why a formula has its value at a world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trace {
    Valuation {
        prop: String,
        value: bool,
    },
    Negation(Box<Trace>),
    /// both conjuncts true
    Both(Box<Trace>, Box<Trace>),
    /// the given conjunct (0 or 1) is false
    Conjunct(usize, Box<Trace>),
    /// the body holds at every world of the cell
    AllAccessible {
        cell: WorldSet,
    },
    /// the body fails at `world` of the cell
    CounterWorld {
        world: WorldId,
        trace: Box<Trace>,
    },
    /// `term` covers the cell and the body holds throughout it
    Witness {
        term: Term,
        covered: WorldSet,
        cell: WorldSet,
    },
    /// no explanation covers the cell, although the body holds on it
    NoWitness {
        cell: WorldSet,
    },
    /// conditional Ky with no condition worlds in the class
    EmptyCell,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub value: bool,
    pub trace: Option<Trace>,
}

/// Where explanation entries come from. The same evaluator serves
/// explanation models (entries must cover the whole cell) and
/// justification-style models (an agent's entry must contain the world).
pub(crate) trait Evidence {
    fn frame(&self) -> &Frame;
    /// smallest witness for `body` usable by `agent` at the cell of `w`
    fn witness(&self, agent: &Agent, body: &Formula, w: WorldId, cell: WorldSet) -> Option<(Term, WorldSet)>;
    fn check_formula(&self, f: &Formula) -> Result<(), SemanticsError>;
}

impl Evidence for Model {
    fn frame(&self) -> &Frame {
        Model::frame(self)
    }

    fn witness(&self, _agent: &Agent, body: &Formula, _w: WorldId, cell: WorldSet) -> Option<(Term, WorldSet)> {
        self.coverage()
            .entries_for(body)
            .filter(|(s, _)| cell.is_subset(*s))
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(s, t)| (t.clone(), s))
    }

    fn check_formula(&self, f: &Formula) -> Result<(), SemanticsError> {
        if self.universe().contains(f) {
            Ok(())
        } else {
            Err(SemanticsError::OutsideUniverse(f.clone()))
        }
    }
}

/// Memoized truth sets over one model.
pub(crate) struct Evaluator<'m, M: Evidence + ?Sized> {
    model: &'m M,
    memo: RefCell<HashMap<Formula, WorldSet>>,
}

impl<'m, M: Evidence + ?Sized> Evaluator<'m, M> {
    pub(crate) fn new(model: &'m M) -> Self {
        Evaluator {
            model,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn blocks(&self, agent: &Agent) -> Result<&'m [WorldSet], SemanticsError> {
        self.model
            .frame()
            .blocks(agent)
            .map_err(|_| SemanticsError::UnknownAgent(agent.name().to_string()))
    }

    pub(crate) fn truth_set(&self, f: &Formula) -> Result<WorldSet, SemanticsError> {
        if let Some(&s) = self.memo.borrow().get(f) {
            return Ok(s);
        }
        let frame = self.model.frame();
        let all = frame.all_worlds();
        let set = match f {
            Formula::Prop(p) => frame.truth_of_prop(p),
            Formula::Not(g) => all - self.truth_set(g)?,
            Formula::And(a, b) => self.truth_set(a)? & self.truth_set(b)?,
            Formula::K(i, g) => {
                let body = self.truth_set(g)?;
                self.blocks(i)?
                    .iter()
                    .filter(|b| b.is_subset(body))
                    .fold(WorldSet::EMPTY, |acc, b| acc | *b)
            }
            Formula::Ky(i, g) => {
                let body = self.truth_set(g)?;
                let mut out = WorldSet::EMPTY;
                for &b in self.blocks(i)? {
                    let w = b.first().expect("blocks are nonempty");
                    if b.is_subset(body) && self.model.witness(i, g, w, b).is_some() {
                        out = out | b;
                    }
                }
                out
            }
            Formula::KyCond(i, c, g) => {
                let cond = self.truth_set(c)?;
                let body = self.truth_set(g)?;
                let mut out = WorldSet::EMPTY;
                for &b in self.blocks(i)? {
                    let cell = b & cond;
                    let w = b.first().expect("blocks are nonempty");
                    if cell.is_empty() || (cell.is_subset(body) && self.model.witness(i, g, w, cell).is_some()) {
                        out = out | b;
                    }
                }
                out
            }
        };
        self.memo.borrow_mut().insert(f.clone(), set);
        Ok(set)
    }

    fn class(&self, agent: &Agent, w: WorldId) -> Result<WorldSet, SemanticsError> {
        Ok(self.model.frame().equivalence_class(agent, w)?)
    }

    fn modal_trace(
        &self,
        agent: &Agent,
        body: &Formula,
        w: WorldId,
        cell: WorldSet,
        explain: bool,
    ) -> Result<Trace, SemanticsError> {
        let truth = self.truth_set(body)?;
        if let Some(v) = (cell - truth).first() {
            return Ok(Trace::CounterWorld {
                world: v,
                trace: Box::new(self.trace(v, body)?),
            });
        }
        if !explain {
            return Ok(Trace::AllAccessible { cell });
        }
        Ok(match self.model.witness(agent, body, w, cell) {
            Some((term, covered)) => Trace::Witness { term, covered, cell },
            None => Trace::NoWitness { cell },
        })
    }

    pub(crate) fn trace(&self, w: WorldId, f: &Formula) -> Result<Trace, SemanticsError> {
        Ok(match f {
            Formula::Prop(p) => Trace::Valuation {
                prop: p.to_string(),
                value: self.truth_set(f)?.contains(w),
            },
            Formula::Not(g) => Trace::Negation(Box::new(self.trace(w, g)?)),
            Formula::And(a, b) => {
                if !self.truth_set(a)?.contains(w) {
                    Trace::Conjunct(0, Box::new(self.trace(w, a)?))
                } else if !self.truth_set(b)?.contains(w) {
                    Trace::Conjunct(1, Box::new(self.trace(w, b)?))
                } else {
                    Trace::Both(Box::new(self.trace(w, a)?), Box::new(self.trace(w, b)?))
                }
            }
            Formula::K(i, g) => self.modal_trace(i, g, w, self.class(i, w)?, false)?,
            Formula::Ky(i, g) => self.modal_trace(i, g, w, self.class(i, w)?, true)?,
            Formula::KyCond(i, c, g) => {
                let cell = self.class(i, w)? & self.truth_set(c)?;
                if cell.is_empty() {
                    Trace::EmptyCell
                } else {
                    self.modal_trace(i, g, w, cell, true)?
                }
            }
        })
    }
}

fn verdict<M: Evidence + ?Sized>(m: &M, w: WorldId, f: &Formula, with_trace: bool) -> Result<Verdict, SemanticsError> {
    let ev = Evaluator::new(m);
    let value = ev.truth_set(f)?.contains(w);
    let trace = if with_trace { Some(ev.trace(w, f)?) } else { None };
    Ok(Verdict { value, trace })
}

fn check_world<M: Evidence + ?Sized>(m: &M, w: WorldId) -> Result<(), SemanticsError> {
    if w.0 < m.frame().world_count() {
        Ok(())
    } else {
        Err(ModelError::UnknownWorld(format!("#{}", w.0)).into())
    }
}

/// Truth of `f` at `w`. The formula must lie in the model's universe; see
/// [`Model::with_query`].
pub fn eval(m: &Model, w: WorldId, f: &Formula) -> Result<Verdict, SemanticsError> {
    m.check_formula(f)?;
    check_world(m, w)?;
    verdict(m, w, f, true)
}

pub(crate) fn eval_with<M: Evidence + ?Sized>(
    m: &M,
    w: WorldId,
    f: &Formula,
    with_trace: bool,
) -> Result<Verdict, SemanticsError> {
    m.check_formula(f)?;
    check_world(m, w)?;
    verdict(m, w, f, with_trace)
}

/// Worlds where `f` holds.
pub fn truth_set(m: &Model, f: &Formula) -> Result<WorldSet, SemanticsError> {
    m.check_formula(f)?;
    Evaluator::new(m).truth_set(f)
}

/// Truth of `f` at every world, keyed by world name.
pub fn eval_all(m: &Model, f: &Formula) -> Result<BTreeMap<String, bool>, SemanticsError> {
    let set = truth_set(m, f)?;
    let frame = m.frame();
    Ok((0..frame.world_count())
        .map(|k| (frame.world_name(WorldId(k)).to_string(), set.contains(WorldId(k))))
        .collect())
}

/// Re-derives the value of `f` at `w` from `trace`, checking each recorded
/// fact against the model. `None` means the trace does not fit.
pub fn replay(m: &Model, w: WorldId, f: &Formula, trace: &Trace) -> Option<bool> {
    let ev = Evaluator::new(m);
    replay_in(m, &ev, w, f, trace)
}

#[allow(clippy::too_many_arguments)]
fn replay_cell(
    m: &Model,
    ev: &Evaluator<'_, Model>,
    agent: &Agent,
    body: &Formula,
    w: WorldId,
    cell: WorldSet,
    trace: &Trace,
    explain: bool,
) -> Option<bool> {
    match trace {
        Trace::CounterWorld { world, trace } if cell.contains(*world) => {
            (!replay_in(m, ev, *world, body, trace)?).then_some(false)
        }
        Trace::AllAccessible { cell: c } if !explain && *c == cell => {
            let truth = ev.truth_set(body).ok()?;
            cell.is_subset(truth).then_some(true)
        }
        Trace::Witness { term, covered, cell: c } if explain && *c == cell => {
            let stored = m.coverage().entries_for(body).any(|(s, t)| s == *covered && t == term);
            let truth = ev.truth_set(body).ok()?;
            (stored && cell.is_subset(*covered) && cell.is_subset(truth)).then_some(true)
        }
        Trace::NoWitness { cell: c } if explain && *c == cell => {
            let truth = ev.truth_set(body).ok()?;
            (m.witness(agent, body, w, cell).is_none() && cell.is_subset(truth)).then_some(false)
        }
        _ => None,
    }
}

fn replay_in(m: &Model, ev: &Evaluator<'_, Model>, w: WorldId, f: &Formula, trace: &Trace) -> Option<bool> {
    match (f, trace) {
        (Formula::Prop(p), Trace::Valuation { prop, value }) if **p == **prop => {
            (m.frame().truth_of_prop(p).contains(w) == *value).then_some(*value)
        }
        (Formula::Not(g), Trace::Negation(t)) => replay_in(m, ev, w, g, t).map(|v| !v),
        (Formula::And(a, b), Trace::Both(ta, tb)) => {
            (replay_in(m, ev, w, a, ta)? && replay_in(m, ev, w, b, tb)?).then_some(true)
        }
        (Formula::And(a, b), Trace::Conjunct(k, t)) => {
            let part = if *k == 0 { a } else { b };
            (!replay_in(m, ev, w, part, t)?).then_some(false)
        }
        (Formula::K(i, g), t) => replay_cell(m, ev, i, g, w, m.equivalence_class(i, w).ok()?, t, false),
        (Formula::Ky(i, g), t) => replay_cell(m, ev, i, g, w, m.equivalence_class(i, w).ok()?, t, true),
        (Formula::KyCond(i, c, g), t) => {
            let cell = m.equivalence_class(i, w).ok()? & ev.truth_set(c).ok()?;
            match t {
                Trace::EmptyCell => cell.is_empty().then_some(true),
                t => replay_cell(m, ev, i, g, w, cell, t, true),
            }
        }
        _ => None,
    }
}

fn names(frame: &Frame, set: WorldSet) -> String {
    format!("{{{}}}", frame.world_set_names(set).join(" "))
}

/// Indented, human-readable rendering of a trace.
pub fn render_trace(frame: &Frame, w: WorldId, f: &Formula, trace: &Trace) -> String {
    let mut out = String::new();
    render(&mut out, frame, w, f, trace, 0);
    out
}

fn render(out: &mut String, frame: &Frame, w: WorldId, f: &Formula, trace: &Trace, depth: usize) {
    let pad = "  ".repeat(depth);
    let at = frame.world_name(w);
    match (f, trace) {
        (_, Trace::Valuation { value, .. }) => {
            let _ = writeln!(out, "{pad}{f} is {value} at {at} by the valuation");
        }
        (Formula::Not(g), Trace::Negation(t)) => {
            let _ = writeln!(out, "{pad}{f} at {at}: negation of");
            render(out, frame, w, g, t, depth + 1);
        }
        (Formula::And(a, b), Trace::Both(ta, tb)) => {
            let _ = writeln!(out, "{pad}{f} at {at}: both conjuncts hold");
            render(out, frame, w, a, ta, depth + 1);
            render(out, frame, w, b, tb, depth + 1);
        }
        (Formula::And(a, b), Trace::Conjunct(k, t)) => {
            let _ = writeln!(out, "{pad}{f} at {at}: a conjunct fails");
            render(out, frame, w, if *k == 0 { a } else { b }, t, depth + 1);
        }
        (_, Trace::AllAccessible { cell }) => {
            let _ = writeln!(out, "{pad}{f} at {at}: body holds on {}", names(frame, *cell));
        }
        (_, Trace::CounterWorld { world, trace }) => {
            let body = match f {
                Formula::K(_, g) | Formula::Ky(_, g) | Formula::KyCond(_, _, g) => g,
                _ => f,
            };
            let _ = writeln!(out, "{pad}{f} at {at}: body fails at {}", frame.world_name(*world));
            render(out, frame, *world, body, trace, depth + 1);
        }
        (_, Trace::Witness { term, covered, cell }) => {
            let _ = writeln!(
                out,
                "{pad}{f} at {at}: {term} explains it on {} (covering {}) and the body holds there",
                names(frame, *cell),
                names(frame, *covered)
            );
        }
        (_, Trace::NoWitness { cell }) => {
            let _ = writeln!(
                out,
                "{pad}{f} at {at}: no single explanation covers {}",
                names(frame, *cell)
            );
        }
        (_, Trace::EmptyCell) => {
            let _ = writeln!(out, "{pad}{f} at {at}: no condition worlds in the class");
        }
        _ => {
            let _ = writeln!(out, "{pad}{f} at {at}: ?");
        }
    }
}

/// A coverage entry whose world-set contains a world falsifying its formula.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FactivityViolation {
    pub term: Term,
    pub formula: Formula,
    pub world: WorldId,
}

pub fn check_factivity(m: &Model) -> Vec<FactivityViolation> {
    let ev = Evaluator::new(m);
    let mut out = Vec::new();
    for entry in m.coverage().iter() {
        let truth = ev
            .truth_set(entry.formula)
            .expect("coverage formulas lie in the universe");
        for world in (entry.worlds - truth).iter() {
            out.push(FactivityViolation {
                term: entry.witness.clone(),
                formula: entry.formula.clone(),
                world,
            });
        }
    }
    out
}

/// A true shaped formula lacking a uniform explanation on the class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct IntrospectionViolation {
    pub world: WorldId,
    pub formula: Formula,
}

/// The agent of a formula of one of the four introspective shapes.
pub fn introspective_agent(f: &Formula) -> Option<&Agent> {
    match f {
        Formula::K(i, _) | Formula::Ky(i, _) => Some(i),
        Formula::Not(g) => match &**g {
            Formula::K(i, _) | Formula::Ky(i, _) => Some(i),
            _ => None,
        },
        _ => None,
    }
}

/// Members of `subformulas` closure of `fs` that have an introspective shape.
pub fn shaped_subformulas<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Vec<Formula> {
    let mut all = Vec::new();
    for f in fs {
        crate::syntax::push_subformulas(f, &mut all);
    }
    all.into_iter().filter(|f| introspective_agent(f).is_some()).collect()
}

/// The shaped formulas K[i] f, ~K[i] f, Ky[i] f, ~Ky[i] f for every
/// subformula f of the queries and every agent of the model.
pub fn default_introspection_universe(m: &Model, queries: &[Formula]) -> Vec<Formula> {
    let mut subs = Vec::new();
    for q in queries {
        crate::syntax::push_subformulas(q, &mut subs);
    }
    let mut out = BTreeSet::new();
    for f in subs {
        for a in m.frame().agents() {
            let k = Formula::k(a.clone(), f.clone());
            let ky = Formula::ky(a.clone(), f.clone());
            out.insert(Formula::not(k.clone()));
            out.insert(Formula::not(ky.clone()));
            out.insert(k);
            out.insert(ky);
        }
    }
    out.into_iter().collect()
}

/// Violations of the introspection property relative to `universe`.
/// The model is evaluated with its universe extended by `universe`.
pub fn check_introspection(m: &Model, universe: &[Formula]) -> Result<Vec<IntrospectionViolation>, SemanticsError> {
    for f in universe {
        if introspective_agent(f).is_none() {
            return Err(SemanticsError::NotIntrospectiveShape(f.clone()));
        }
    }
    let m = m.with_query(universe)?;
    Ok(introspection_gaps(&m, universe)?
        .into_iter()
        .flat_map(|(f, block)| {
            block.iter().map(move |world| IntrospectionViolation {
                world,
                formula: f.clone(),
            })
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect())
}

/// (formula, block) pairs where a shaped formula is true but uncovered.
fn introspection_gaps(m: &Model, universe: &[Formula]) -> Result<Vec<(Formula, WorldSet)>, SemanticsError> {
    let ev = Evaluator::new(m);
    let mut out = Vec::new();
    for f in universe {
        let agent = introspective_agent(f).ok_or_else(|| SemanticsError::NotIntrospectiveShape(f.clone()))?;
        let truth = ev.truth_set(f)?;
        for &b in ev.blocks(agent)? {
            if b.is_subset(truth) && m.coverage().best_cover(f, b).is_none() {
                out.push((f.clone(), b));
            }
        }
    }
    Ok(out)
}

/// Adds fresh seeds until the model is introspective relative to
/// `universe`. Each round seeds every uncovered (formula, block) pair; the
/// coverage only grows, so the loop ends once every pair is covered.
pub fn complete_introspection(m: &Model, universe: &[Formula]) -> Result<Model, SemanticsError> {
    for f in universe {
        if introspective_agent(f).is_none() {
            return Err(SemanticsError::NotIntrospectiveShape(f.clone()));
        }
    }
    let mut used: BTreeSet<String> = BTreeSet::new();
    for s in m.seeds() {
        collect_bases(&s.term, &mut used);
    }
    let mut next = 0usize;
    let mut fresh = || loop {
        next += 1;
        let name = format!("c{next}");
        if !used.contains(&name) {
            return Term::base(name);
        }
    };
    let mut current = m.with_query(universe)?;
    loop {
        let gaps = introspection_gaps(&current, universe)?;
        if gaps.is_empty() {
            return Ok(current);
        }
        let seeds: Vec<Seed> = gaps.into_iter().map(|(f, b)| Seed::new(fresh(), f, b)).collect();
        current = current.with_seeds(seeds)?;
    }
}

fn collect_bases(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::SelfEvident => {}
        Term::Base(n) => {
            out.insert(n.to_string());
        }
        Term::App(a, b) => {
            collect_bases(a, out);
            collect_bases(b, out);
        }
    }
}
