//! Axiom schemas and matching against core-form formulas.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::syntax::{is_propositional_tautology, Agent, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Taut,
    DistK,
    DistY,
    T,
    Four,
    Five,
    Pres,
    FourYK,
    FourKY,
    FiveKY,
    FourY,
    FiveY,
}

impl Axiom {
    pub const ALL: [Axiom; 12] = [
        Axiom::Taut,
        Axiom::DistK,
        Axiom::DistY,
        Axiom::T,
        Axiom::Four,
        Axiom::Five,
        Axiom::Pres,
        Axiom::FourYK,
        Axiom::FourKY,
        Axiom::FiveKY,
        Axiom::FourY,
        Axiom::FiveY,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Taut => "TAUT",
            Axiom::DistK => "DISTK",
            Axiom::DistY => "DISTY",
            Axiom::T => "T",
            Axiom::Four => "4",
            Axiom::Five => "5",
            Axiom::Pres => "PRES",
            Axiom::FourYK => "4YK",
            Axiom::FourKY => "4KY",
            Axiom::FiveKY => "5KY",
            Axiom::FourY => "4Y",
            Axiom::FiveY => "5Y",
        }
    }

    /// The schema over metavariables `phi`, `psi` and agent `i`; `None`
    /// for TAUT, which is decided by truth tables.
    pub fn schema(self) -> Option<Pattern> {
        use Pattern as P;
        let phi = || P::meta("phi");
        let psi = || P::meta("psi");
        Some(match self {
            Axiom::Taut => return None,
            Axiom::DistK => P::imp(P::k(P::imp(phi(), psi())), P::imp(P::k(phi()), P::k(psi()))),
            Axiom::DistY => P::imp(P::ky(P::imp(phi(), psi())), P::imp(P::ky(phi()), P::ky(psi()))),
            Axiom::T => P::imp(P::k(phi()), phi()),
            Axiom::Four => P::imp(P::k(phi()), P::k(P::k(phi()))),
            Axiom::Five => P::imp(P::not(P::k(phi())), P::k(P::not(P::k(phi())))),
            Axiom::Pres => P::imp(P::ky(phi()), P::k(phi())),
            Axiom::FourYK => P::imp(P::ky(phi()), P::k(P::ky(phi()))),
            Axiom::FourKY => P::imp(P::k(phi()), P::ky(P::k(phi()))),
            Axiom::FiveKY => P::imp(P::not(P::k(phi())), P::ky(P::not(P::k(phi())))),
            Axiom::FourY => P::imp(P::ky(phi()), P::ky(P::ky(phi()))),
            Axiom::FiveY => P::imp(P::not(P::ky(phi())), P::ky(P::not(P::ky(phi())))),
        })
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = ();

    fn from_str(s: &str) -> Result<Axiom, ()> {
        Axiom::ALL.into_iter().find(|a| a.name() == s).ok_or(())
    }
}

/// A schema in core form. All modal operators share the agent
/// metavariable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Meta(&'static str),
    Not(Box<Pattern>),
    And(Box<Pattern>, Box<Pattern>),
    K(Box<Pattern>),
    Ky(Box<Pattern>),
}

impl Pattern {
    fn meta(name: &'static str) -> Pattern {
        Pattern::Meta(name)
    }

    fn not(p: Pattern) -> Pattern {
        Pattern::Not(Box::new(p))
    }

    fn imp(a: Pattern, b: Pattern) -> Pattern {
        Pattern::not(Pattern::And(Box::new(a), Box::new(Pattern::not(b))))
    }

    fn k(p: Pattern) -> Pattern {
        Pattern::K(Box::new(p))
    }

    fn ky(p: Pattern) -> Pattern {
        Pattern::Ky(Box::new(p))
    }
}

/// Values of the metavariables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    pub formulas: BTreeMap<&'static str, Formula>,
    pub agent: Option<Agent>,
}

impl Substitution {
    /// The schema instance; `None` if a metavariable is unassigned.
    pub fn apply(&self, p: &Pattern) -> Option<Formula> {
        Some(match p {
            Pattern::Meta(m) => self.formulas.get(m)?.clone(),
            Pattern::Not(a) => Formula::not(self.apply(a)?),
            Pattern::And(a, b) => Formula::and(self.apply(a)?, self.apply(b)?),
            Pattern::K(a) => Formula::k(self.agent.clone()?, self.apply(a)?),
            Pattern::Ky(a) => Formula::ky(self.agent.clone()?, self.apply(a)?),
        })
    }

    fn bind_agent(&mut self, a: &Agent) -> bool {
        match &self.agent {
            Some(b) => b == a,
            None => {
                self.agent = Some(a.clone());
                true
            }
        }
    }

    fn unify(&mut self, p: &Pattern, f: &Formula) -> bool {
        match (p, f) {
            (Pattern::Meta(m), f) => match self.formulas.get(m) {
                Some(g) => g == f,
                None => {
                    self.formulas.insert(m, f.clone());
                    true
                }
            },
            (Pattern::Not(a), Formula::Not(g)) => self.unify(a, g),
            (Pattern::And(a, b), Formula::And(g, h)) => self.unify(a, g) && self.unify(b, h),
            (Pattern::K(a), Formula::K(i, g)) | (Pattern::Ky(a), Formula::Ky(i, g)) => {
                self.bind_agent(i) && self.unify(a, g)
            }
            _ => false,
        }
    }
}

/// A substitution turning `axiom`'s schema into `f`. TAUT matches with the
/// empty substitution when `f` is a modal-atom tautology.
pub fn match_schema(axiom: Axiom, f: &Formula) -> Option<Substitution> {
    match axiom.schema() {
        None => is_propositional_tautology(f).ok()?.then(Substitution::default),
        Some(p) => {
            let mut s = Substitution::default();
            s.unify(&p, f).then_some(s)
        }
    }
}

/// Instantiates a schema; `None` for TAUT.
pub fn instantiate(axiom: Axiom, agent: &Agent, phi: &Formula, psi: &Formula) -> Option<Formula> {
    let s = Substitution {
        formulas: [("phi", phi.clone()), ("psi", psi.clone())].into(),
        agent: Some(agent.clone()),
    };
    s.apply(&axiom.schema()?)
}
