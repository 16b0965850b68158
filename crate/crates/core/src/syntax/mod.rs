//! Formulas of the knowing-why language, their concrete syntax, and the
//! propositional skeleton used for tautology checks.

mod atomize;
mod parser;
mod printer;

use std::fmt;
use std::sync::Arc;

pub use atomize::{
    is_propositional_tautology, is_propositional_tautology_with_cap, modal_atomize, ModalAtomization, Skeleton,
    DEFAULT_ATOM_CAP,
};
pub use parser::{parse_formula, ParseError, Parser};
pub use printer::print_formula;

/// Proposition reserved for the encoding of `top`.
pub const RESERVED_PROP: &str = "p0";

/// Words that may not be used as identifiers.
pub const RESERVED_WORDS: [&str; 5] = ["K", "Ky", "top", "bot", "e"];

/// Returns true for a lexically valid, non-reserved identifier.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED_WORDS.contains(&s)
}

/// An agent name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Agent(Arc<str>);

impl Agent {
    pub fn new(name: impl AsRef<str>) -> Agent {
        Agent(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Core abstract syntax. Derived connectives are encoded by the
/// constructors below and never appear as separate nodes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Prop(Arc<str>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// Knowing that.
    K(Agent, Box<Formula>),
    /// Knowing why.
    Ky(Agent, Box<Formula>),
    /// Knowing why the body holds, given the condition.
    KyCond(Agent, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl AsRef<str>) -> Formula {
        Formula::Prop(Arc::from(name.as_ref()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// `a -> b`, encoded as `~(a & ~b)`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    /// `a | b`, encoded as `~(~a & ~b)`.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn top() -> Formula {
        let p0 = Formula::prop(RESERVED_PROP);
        Formula::not(Formula::and(p0.clone(), Formula::not(p0)))
    }

    pub fn bot() -> Formula {
        Formula::not(Formula::top())
    }

    pub fn k(agent: Agent, f: Formula) -> Formula {
        Formula::K(agent, Box::new(f))
    }

    /// The dual of `K`: `~K[i]~f`.
    pub fn k_dual(agent: Agent, f: Formula) -> Formula {
        Formula::not(Formula::k(agent, Formula::not(f)))
    }

    pub fn ky(agent: Agent, f: Formula) -> Formula {
        Formula::Ky(agent, Box::new(f))
    }

    pub fn ky_cond(agent: Agent, condition: Formula, body: Formula) -> Formula {
        Formula::KyCond(agent, Box::new(condition), Box::new(body))
    }

    /// Splits an implication `~(a & ~b)` into `(a, b)`.
    pub fn as_implication(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::And(a, rhs) => match rhs.as_ref() {
                    Formula::Not(b) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_top(&self) -> bool {
        match self.as_implication() {
            Some((Formula::Prop(a), Formula::Prop(b))) => a.as_ref() == RESERVED_PROP && b.as_ref() == RESERVED_PROP,
            _ => false,
        }
    }

    /// Whether the top connective is modal or the formula is a proposition.
    pub fn is_atomic_for_skeleton(&self) -> bool {
        !matches!(self, Formula::Not(_) | Formula::And(..))
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Formula::Prop(_) => 1,
            Formula::Not(f) | Formula::K(_, f) | Formula::Ky(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::KyCond(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Modal nesting depth.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Prop(_) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::K(_, f) | Formula::Ky(_, f) => 1 + f.modal_depth(),
            Formula::KyCond(_, a, b) => 1 + a.modal_depth().max(b.modal_depth()),
        }
    }

    pub fn contains_conditional(&self) -> bool {
        match self {
            Formula::Prop(_) => false,
            Formula::Not(f) | Formula::K(_, f) | Formula::Ky(_, f) => f.contains_conditional(),
            Formula::And(a, b) => a.contains_conditional() || b.contains_conditional(),
            Formula::KyCond(..) => true,
        }
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Prop(_) => vec![],
            Formula::Not(f) | Formula::K(_, f) | Formula::Ky(_, f) => vec![f],
            Formula::And(a, b) | Formula::KyCond(_, a, b) => vec![a, b],
        }
    }

    /// Names of all propositions occurring in the formula.
    pub fn propositions(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Prop(p) => {
                if !out.contains(&p.as_ref()) {
                    out.push(p);
                }
            }
            _ => self.children().into_iter().for_each(|c| c.collect_props(out)),
        }
    }

    /// Agents occurring in the formula, in order of first occurrence.
    pub fn agents(&self) -> Vec<&Agent> {
        let mut out = Vec::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents<'a>(&'a self, out: &mut Vec<&'a Agent>) {
        if let Formula::K(a, _) | Formula::Ky(a, _) | Formula::KyCond(a, _, _) = self {
            if !out.contains(&a) {
                out.push(a);
            }
        }
        self.children().into_iter().for_each(|c| c.collect_agents(out));
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

/// All subformulas including `f`, deduplicated, in post-order of first
/// occurrence.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    push_subformulas(f, &mut out);
    out
}

/// Extends `out` with the post-order subformulas of `f` not already present.
pub fn push_subformulas(f: &Formula, out: &mut Vec<Formula>) {
    for c in f.children() {
        push_subformulas(c, out);
    }
    if !out.contains(f) {
        out.push(f.clone());
    }
}
