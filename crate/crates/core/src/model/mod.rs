//! Finite models: worlds, per-agent partitions, valuation, tautology
//! ground, explanation seeds and the saturated coverage table.

pub(crate) mod format;
pub mod random;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{is_identifier, is_propositional_tautology, push_subformulas, Agent, Formula, ParseError};
use crate::terms::{saturate, CoverageTable, Seed, TermsError};
use crate::worlds::{WorldId, WorldSet, MAX_WORLDS};

pub use format::{load_any, load_model, print_model, Loaded};
pub use random::{random_formula, random_model, FormulaShape, RandomModelSpec};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: {error}")]
    Line { line: usize, error: Box<ModelError> },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Syntax(String),
    #[error("model must declare at least one world")]
    NoWorlds,
    #[error("model must declare at least one agent")]
    NoAgents,
    #[error("model declares {0} worlds; at most {MAX_WORLDS} are supported")]
    TooManyWorlds(usize),
    #[error("`{0}` is not a valid name")]
    BadName(String),
    #[error("world `{0}` declared twice")]
    DuplicateWorld(String),
    #[error("agent `{0}` declared twice")]
    DuplicateAgent(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("partition of agent `{agent}` has overlapping blocks at world `{world}`")]
    OverlappingBlocks { agent: String, world: String },
    #[error("partition of agent `{agent}` does not cover world `{world}`")]
    IncompletePartition { agent: String, world: String },
    #[error("partition of agent `{0}` has an empty block")]
    EmptyBlock(String),
    #[error("agent `{0}` has more than one partition")]
    DuplicatePartition(String),
    #[error("agent `{0}` has no partition")]
    MissingPartition(String),
    #[error("tautology-ground member {0} is not a propositional tautology")]
    NotTautology(Formula),
    #[error("seed for {0} names no worlds")]
    EmptySeed(Formula),
    #[error(transparent)]
    Terms(#[from] TermsError),
}

impl ModelError {
    pub(crate) fn at(self, line: usize) -> ModelError {
        match self {
            e @ ModelError::Line { .. } | e @ ModelError::Parse(_) => e,
            e => ModelError::Line {
                line,
                error: Box::new(e),
            },
        }
    }
}

/// The Kripke frame with valuation and tautology ground; shared by
/// explanation models and justification-style models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    worlds: Vec<String>,
    agents: Vec<Agent>,
    partitions: BTreeMap<Agent, Vec<WorldSet>>,
    valuation: BTreeMap<String, WorldSet>,
    lambda: BTreeSet<Formula>,
}

impl Frame {
    /// Validates names, partitions and the tautology ground. Blocks are
    /// given as world indices; their order does not matter.
    pub fn new(
        worlds: Vec<String>,
        agents: Vec<Agent>,
        partitions: BTreeMap<Agent, Vec<WorldSet>>,
        valuation: BTreeMap<String, WorldSet>,
        lambda: BTreeSet<Formula>,
    ) -> Result<Frame, ModelError> {
        if worlds.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        if worlds.len() > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(worlds.len()));
        }
        let mut seen = BTreeSet::new();
        for w in &worlds {
            if !is_identifier(w) {
                return Err(ModelError::BadName(w.clone()));
            }
            if !seen.insert(w) {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        if agents.is_empty() {
            return Err(ModelError::NoAgents);
        }
        let mut seen = BTreeSet::new();
        for a in &agents {
            if !is_identifier(a.name()) {
                return Err(ModelError::BadName(a.name().to_string()));
            }
            if !seen.insert(a) {
                return Err(ModelError::DuplicateAgent(a.name().to_string()));
            }
        }
        let all = WorldSet::full(worlds.len());
        let mut normalized = BTreeMap::new();
        for a in &agents {
            let blocks = partitions
                .get(a)
                .ok_or_else(|| ModelError::MissingPartition(a.name().to_string()))?;
            let mut covered = WorldSet::EMPTY;
            for &b in blocks {
                if b.is_empty() {
                    return Err(ModelError::EmptyBlock(a.name().to_string()));
                }
                if !b.is_subset(all) {
                    return Err(ModelError::UnknownWorld(format!("#{}", (b - all).first().unwrap().0)));
                }
                if let Some(w) = (b & covered).first() {
                    return Err(ModelError::OverlappingBlocks {
                        agent: a.name().to_string(),
                        world: worlds[w.0].clone(),
                    });
                }
                covered = covered | b;
            }
            if let Some(w) = (all - covered).first() {
                return Err(ModelError::IncompletePartition {
                    agent: a.name().to_string(),
                    world: worlds[w.0].clone(),
                });
            }
            let mut blocks = blocks.clone();
            blocks.sort_by_key(|b| b.first());
            normalized.insert(a.clone(), blocks);
        }
        if let Some(extra) = partitions.keys().find(|a| !agents.contains(a)) {
            return Err(ModelError::UnknownAgent(extra.name().to_string()));
        }
        for l in &lambda {
            // an over-large formula cannot be certified either
            if !is_propositional_tautology(l).unwrap_or(false) {
                return Err(ModelError::NotTautology(l.clone()));
            }
        }
        let valuation = valuation.into_iter().map(|(p, s)| (p, s & all)).collect();
        Ok(Frame {
            worlds,
            agents,
            partitions: normalized,
            valuation,
            lambda,
        })
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn world_names(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_name(&self, w: WorldId) -> &str {
        &self.worlds[w.0]
    }

    pub fn world_id(&self, name: &str) -> Result<WorldId, ModelError> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .map(WorldId)
            .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    pub fn all_worlds(&self) -> WorldSet {
        WorldSet::full(self.worlds.len())
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn has_agent(&self, agent: &Agent) -> bool {
        self.partitions.contains_key(agent)
    }

    /// Blocks of an agent's partition, ordered by their smallest world.
    pub fn blocks(&self, agent: &Agent) -> Result<&[WorldSet], ModelError> {
        self.partitions
            .get(agent)
            .map(|b| b.as_slice())
            .ok_or_else(|| ModelError::UnknownAgent(agent.name().to_string()))
    }

    /// The block of `agent` containing `w`.
    pub fn equivalence_class(&self, agent: &Agent, w: WorldId) -> Result<WorldSet, ModelError> {
        if w.0 >= self.worlds.len() {
            return Err(ModelError::UnknownWorld(format!("#{}", w.0)));
        }
        Ok(*self
            .blocks(agent)?
            .iter()
            .find(|b| b.contains(w))
            .expect("partition covers every world"))
    }

    pub fn valuation(&self) -> &BTreeMap<String, WorldSet> {
        &self.valuation
    }

    /// Worlds where `p` holds; undeclared propositions hold nowhere.
    pub fn truth_of_prop(&self, p: &str) -> WorldSet {
        self.valuation.get(p).copied().unwrap_or_default()
    }

    pub fn lambda(&self) -> &BTreeSet<Formula> {
        &self.lambda
    }

    pub fn world_set_names(&self, set: WorldSet) -> Vec<&str> {
        set.iter().map(|w| self.world_name(w)).collect()
    }
}

/// Subformula closure of seed formulas, the tautology ground and `extra`.
/// Implications are stored in their core form, so the closure already
/// contains every antecedent and consequent.
pub fn universe_closure<'a, 'b, 'c>(
    seeds: impl IntoIterator<Item = &'a Formula>,
    lambda: impl IntoIterator<Item = &'b Formula>,
    extra: impl IntoIterator<Item = &'c Formula>,
) -> BTreeSet<Formula> {
    let mut all = Vec::new();
    for f in seeds {
        push_subformulas(f, &mut all);
    }
    for f in lambda {
        push_subformulas(f, &mut all);
    }
    for f in extra {
        push_subformulas(f, &mut all);
    }
    all.into_iter().collect()
}

/// An explanation model: a frame, seed entries, the formula universe and
/// the saturated coverage table over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    frame: Frame,
    seeds: Vec<Seed>,
    universe: BTreeSet<Formula>,
    coverage: CoverageTable,
    warnings: Vec<String>,
}

impl Model {
    pub fn new(frame: Frame, seeds: Vec<Seed>) -> Result<Model, ModelError> {
        Model::with_extra_universe(frame, seeds, std::iter::empty())
    }

    pub fn with_extra_universe<'a>(
        frame: Frame,
        seeds: Vec<Seed>,
        extra: impl IntoIterator<Item = &'a Formula>,
    ) -> Result<Model, ModelError> {
        for s in &seeds {
            if s.worlds.is_empty() {
                return Err(ModelError::EmptySeed(s.formula.clone()));
            }
        }
        let universe = universe_closure(seeds.iter().map(|s| &s.formula), frame.lambda(), extra);
        let coverage = saturate(&seeds, frame.lambda(), frame.all_worlds(), &universe)?;
        Ok(Model {
            frame,
            seeds,
            universe,
            coverage,
            warnings: Vec::new(),
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn universe(&self) -> &BTreeSet<Formula> {
        &self.universe
    }

    pub fn coverage(&self) -> &CoverageTable {
        &self.coverage
    }

    /// Load-time warnings, e.g. relations given as edges.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub(crate) fn push_warning(&mut self, w: String) {
        self.warnings.push(w);
    }

    /// Universe obtained by adding `extra` (and its subformulas).
    pub fn build_universe<'a>(&self, extra: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Formula> {
        let mut u = self.universe.clone();
        let mut add = Vec::new();
        for f in extra {
            push_subformulas(f, &mut add);
        }
        u.extend(add);
        u
    }

    /// The same model with the universe extended by `extra` and the
    /// coverage re-saturated over it.
    pub fn with_query<'a>(&self, extra: impl IntoIterator<Item = &'a Formula>) -> Result<Model, ModelError> {
        let universe = self.build_universe(extra);
        if universe.len() == self.universe.len() {
            return Ok(self.clone());
        }
        let coverage = saturate(&self.seeds, self.frame.lambda(), self.frame.all_worlds(), &universe)?;
        Ok(Model {
            frame: self.frame.clone(),
            seeds: self.seeds.clone(),
            universe,
            coverage,
            warnings: self.warnings.clone(),
        })
    }

    /// A model with the given seeds and coverage; the coverage must be the
    /// saturation of the seeds.
    pub(crate) fn from_parts(
        frame: Frame,
        seeds: Vec<Seed>,
        universe: BTreeSet<Formula>,
        coverage: CoverageTable,
    ) -> Model {
        Model {
            frame,
            seeds,
            universe,
            coverage,
            warnings: Vec::new(),
        }
    }

    /// Adds seeds and re-saturates, keeping the current universe.
    pub fn with_seeds(&self, extra: impl IntoIterator<Item = Seed>) -> Result<Model, ModelError> {
        let mut seeds = self.seeds.clone();
        seeds.extend(extra);
        let universe = self.build_universe(seeds.iter().map(|s| &s.formula));
        for s in &seeds {
            if s.worlds.is_empty() {
                return Err(ModelError::EmptySeed(s.formula.clone()));
            }
        }
        let coverage = saturate(&seeds, self.frame.lambda(), self.frame.all_worlds(), &universe)?;
        Ok(Model::from_parts(self.frame.clone(), seeds, universe, coverage))
    }

    pub fn world_id(&self, name: &str) -> Result<WorldId, ModelError> {
        self.frame.world_id(name)
    }

    pub fn equivalence_class(&self, agent: &Agent, w: WorldId) -> Result<WorldSet, ModelError> {
        self.frame.equivalence_class(agent, w)
    }
}
