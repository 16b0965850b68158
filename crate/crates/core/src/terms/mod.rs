//! Explanation terms and coverage tables.
//!
//! A [`CoverageTable`] is the finite representation of an admissible
//! explanation function: for each formula of a finite universe it stores
//! the world-sets on which some term explains the formula, one witness per
//! world-set. [`saturate`] computes the least such table containing a list
//! of seed entries, the `(e, W)` entries for the tautology ground, and
//! closed under application: `(s, S)` on `a -> b` and `(t, T)` on `a`
//! yield `(s . t, S & T)` on `b`.

pub mod oracle;

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::Formula;
use crate::worlds::WorldSet;

pub use oracle::{brute_force_saturation_oracle, stabilized_oracle, OracleError};

/// An explanation term.
///
/// Terms are ordered by size first and structure second; that order picks
/// the reported witness when several terms explain the same world-set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    /// The self-evident explanation `e`.
    SelfEvident,
    Base(Arc<str>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn base(name: impl AsRef<str>) -> Term {
        Term::Base(Arc::from(name.as_ref()))
    }

    pub fn app(left: Term, right: Term) -> Term {
        Term::App(Box::new(left), Box::new(right))
    }

    pub fn size(&self) -> usize {
        match self {
            Term::SelfEvident | Term::Base(_) => 1,
            Term::App(l, r) => 1 + l.size() + r.size(),
        }
    }

    fn structural_cmp(&self, other: &Term) -> Ordering {
        use Term::*;
        match (self, other) {
            (SelfEvident, SelfEvident) => Ordering::Equal,
            (SelfEvident, _) => Ordering::Less,
            (_, SelfEvident) => Ordering::Greater,
            (Base(a), Base(b)) => a.cmp(b),
            (Base(_), App(..)) => Ordering::Less,
            (App(..), Base(_)) => Ordering::Greater,
            (App(l1, r1), App(l2, r2)) => l1.structural_cmp(l2).then_with(|| r1.structural_cmp(r2)),
        }
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| self.structural_cmp(other))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::SelfEvident => f.write_str("e"),
            Term::Base(n) => f.write_str(n),
            Term::App(l, r) => write!(f, "({l} . {r})"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses a term in the `e | ident | (term . term)` syntax.
pub fn parse_term(text: &str) -> Result<Term, crate::syntax::ParseError> {
    let mut p = crate::syntax::Parser::new(text)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// A user-supplied explanation fact: `term` explains `formula` on `worlds`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seed {
    pub term: Term,
    pub formula: Formula,
    pub worlds: WorldSet,
}

impl Seed {
    pub fn new(term: Term, formula: Formula, worlds: WorldSet) -> Seed {
        Seed { term, formula, worlds }
    }
}

/// One stored entry of a coverage table. `worlds` is never empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageEntry<'a> {
    pub formula: &'a Formula,
    pub witness: &'a Term,
    pub worlds: WorldSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TermsError {
    #[error("seed formula {0} is outside the formula universe")]
    SeedOutsideUniverse(Formula),
    #[error("seed for {0} mentions a world outside the model")]
    SeedWorldOutside(Formula),
    #[error("tautology-ground member {0} is outside the formula universe")]
    LambdaOutsideUniverse(Formula),
    #[error("formula {0} is outside the formula universe")]
    FormulaOutsideUniverse(Formula),
}

/// Per-formula world-sets with one witness term each.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct CoverageTable {
    universe: BTreeSet<Formula>,
    entries: BTreeMap<Formula, BTreeMap<WorldSet, Term>>,
}

impl fmt::Debug for CoverageTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (formula, sets) in &self.entries {
            m.entry(formula, sets);
        }
        m.finish()
    }
}

impl CoverageTable {
    /// An empty table over `universe`.
    pub fn new(universe: BTreeSet<Formula>) -> CoverageTable {
        CoverageTable {
            universe,
            entries: BTreeMap::new(),
        }
    }

    pub fn universe(&self) -> &BTreeSet<Formula> {
        &self.universe
    }

    /// Adds `formula` and keeps the smaller witness if `worlds` is already
    /// covered. Empty world-sets are ignored.
    pub fn insert(&mut self, formula: Formula, worlds: WorldSet, witness: Term) {
        if worlds.is_empty() {
            return;
        }
        self.universe.insert(formula.clone());
        let slot = self.entries.entry(formula).or_default();
        match slot.get(&worlds) {
            Some(old) if *old <= witness => {}
            _ => {
                slot.insert(worlds, witness);
            }
        }
    }

    /// Entries for `formula` ordered by world-set; empty if none.
    pub fn entries_for<'a>(&'a self, formula: &Formula) -> impl Iterator<Item = (WorldSet, &'a Term)> + 'a {
        self.entries
            .get(formula)
            .into_iter()
            .flat_map(|m| m.iter().map(|(s, t)| (*s, t)))
    }

    /// All entries, ordered by formula then world-set.
    pub fn iter(&self) -> impl Iterator<Item = CoverageEntry<'_>> {
        self.entries.iter().flat_map(|(formula, m)| {
            m.iter().map(move |(worlds, witness)| CoverageEntry {
                formula,
                witness,
                worlds: *worlds,
            })
        })
    }

    pub fn entry_count(&self) -> usize {
        self.entries.values().map(|m| m.len()).sum()
    }

    /// World-sets per formula, dropping witnesses.
    pub fn families(&self) -> BTreeMap<Formula, BTreeSet<WorldSet>> {
        self.entries
            .iter()
            .map(|(f, m)| (f.clone(), m.keys().copied().collect()))
            .collect()
    }

    /// Smallest witness whose world-set contains `cell`.
    pub fn covers_uniformly(&self, formula: &Formula, cell: WorldSet) -> Result<Option<&Term>, TermsError> {
        if !self.universe.contains(formula) {
            return Err(TermsError::FormulaOutsideUniverse(formula.clone()));
        }
        Ok(self.best_cover(formula, cell))
    }

    /// As [`covers_uniformly`](Self::covers_uniformly), treating formulas
    /// outside the universe as having no entries.
    pub fn best_cover(&self, formula: &Formula, cell: WorldSet) -> Option<&Term> {
        self.entries_for(formula)
            .filter(|(s, _)| cell.is_subset(*s))
            .map(|(_, t)| t)
            .min()
    }

    /// Pairs of entries whose application is not covered:
    /// `(implication, antecedent, S & T)` with no superset entry on the
    /// consequent. Empty for saturated tables.
    pub fn closure_gaps(&self) -> Vec<(Formula, Formula, WorldSet)> {
        let mut gaps = Vec::new();
        for (imp, imp_sets) in &self.entries {
            let Some((ante, cons)) = imp.as_implication() else {
                continue;
            };
            if !self.universe.contains(cons) {
                continue;
            }
            for s in imp_sets.keys() {
                for (t, _) in self.entries_for(ante) {
                    let meet = *s & t;
                    if !meet.is_empty() && self.best_cover(cons, meet).is_none() {
                        gaps.push((imp.clone(), ante.clone(), meet));
                    }
                }
            }
        }
        gaps
    }

    /// Returns a copy whose universe also contains `extra`.
    pub fn with_universe(&self, extra: impl IntoIterator<Item = Formula>) -> CoverageTable {
        let mut t = self.clone();
        t.universe.extend(extra);
        t
    }
}

struct Universe {
    formulas: Vec<Formula>,
    /// `(antecedent, consequent)` for implications whose parts are present.
    parts: Vec<Option<(usize, usize)>>,
    /// `(implication, consequent)` for every implication with this antecedent.
    as_antecedent: Vec<Vec<(usize, usize)>>,
}

impl Universe {
    fn index(universe: &BTreeSet<Formula>) -> (Universe, HashMap<&Formula, usize>) {
        let formulas: Vec<Formula> = universe.iter().cloned().collect();
        let index: HashMap<&Formula, usize> = universe.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut parts = vec![None; formulas.len()];
        let mut as_antecedent = vec![Vec::new(); formulas.len()];
        for (k, f) in universe.iter().enumerate() {
            if let Some((a, c)) = f.as_implication() {
                if let (Some(&ai), Some(&ci)) = (index.get(a), index.get(c)) {
                    parts[k] = Some((ai, ci));
                    as_antecedent[ai].push((k, ci));
                }
            }
        }
        (
            Universe {
                formulas,
                parts,
                as_antecedent,
            },
            index,
        )
    }
}

/// Least coverage table over `universe` containing the seeds and the
/// tautology ground, closed under application.
///
/// Witnesses are the minimal terms in the `(size, structure)` order over
/// all derivations of each world-set; the search is a best-first fixpoint,
/// so a world-set is finalized with its smallest witness before it is used.
pub fn saturate(
    seeds: &[Seed],
    lambda: &BTreeSet<Formula>,
    worlds: WorldSet,
    universe: &BTreeSet<Formula>,
) -> Result<CoverageTable, TermsError> {
    let (u, index) = Universe::index(universe);
    let n = u.formulas.len();

    let mut best: HashMap<(usize, WorldSet), Term> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(Term, usize, WorldSet)>> = BinaryHeap::new();
    let mut done: Vec<BTreeMap<WorldSet, Term>> = vec![BTreeMap::new(); n];

    let offer = |best: &mut HashMap<(usize, WorldSet), Term>,
                 heap: &mut BinaryHeap<Reverse<(Term, usize, WorldSet)>>,
                 done: &[BTreeMap<WorldSet, Term>],
                 k: usize,
                 set: WorldSet,
                 term: Term| {
        if set.is_empty() || done[k].contains_key(&set) {
            return;
        }
        match best.get(&(k, set)) {
            Some(old) if *old <= term => {}
            _ => {
                best.insert((k, set), term.clone());
                heap.push(Reverse((term, k, set)));
            }
        }
    };

    for seed in seeds {
        let &k = index
            .get(&seed.formula)
            .ok_or_else(|| TermsError::SeedOutsideUniverse(seed.formula.clone()))?;
        if !seed.worlds.is_subset(worlds) {
            return Err(TermsError::SeedWorldOutside(seed.formula.clone()));
        }
        offer(&mut best, &mut heap, &done, k, seed.worlds, seed.term.clone());
    }
    for l in lambda {
        let &k = index
            .get(l)
            .ok_or_else(|| TermsError::LambdaOutsideUniverse(l.clone()))?;
        offer(&mut best, &mut heap, &done, k, worlds, Term::SelfEvident);
    }

    while let Some(Reverse((term, k, set))) = heap.pop() {
        if done[k].contains_key(&set) || best.get(&(k, set)).is_some_and(|b| *b < term) {
            continue;
        }
        done[k].insert(set, term.clone());

        // this entry as the implication
        if let Some((a, c)) = u.parts[k] {
            let partners: Vec<(WorldSet, Term)> = done[a].iter().map(|(s, t)| (*s, t.clone())).collect();
            for (t_set, t) in partners {
                offer(&mut best, &mut heap, &done, c, set & t_set, Term::app(term.clone(), t));
            }
        }
        // this entry as the antecedent
        for &(imp, c) in &u.as_antecedent[k] {
            let partners: Vec<(WorldSet, Term)> = done[imp].iter().map(|(s, t)| (*s, t.clone())).collect();
            for (s_set, s) in partners {
                offer(&mut best, &mut heap, &done, c, s_set & set, Term::app(s, term.clone()));
            }
        }
    }

    let mut table = CoverageTable::new(universe.clone());
    for (k, sets) in done.into_iter().enumerate() {
        if !sets.is_empty() {
            table.entries.insert(u.formulas[k].clone(), sets);
        }
    }
    debug_assert!(table.entry_count() <= n.saturating_mul(1usize << worlds.len().min(60)));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, subformulas};
    use crate::worlds::WorldId;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn ws(ids: &[usize]) -> WorldSet {
        ids.iter().map(|&i| WorldId(i)).collect()
    }

    fn universe_of(fs: &[&str]) -> BTreeSet<Formula> {
        let mut u = BTreeSet::new();
        for s in fs {
            u.extend(subformulas(&f(s)));
        }
        u
    }

    #[test]
    fn term_order_is_size_then_structure() {
        let e = Term::SelfEvident;
        let s = Term::base("s");
        let t = Term::base("t");
        assert!(e < s && s < t);
        assert!(t < Term::app(e.clone(), e.clone()));
        assert!(Term::app(s.clone(), t.clone()) < Term::app(t.clone(), s.clone()));
        assert_eq!(Term::app(s, Term::app(t, e)).size(), 5);
    }

    #[test]
    fn term_syntax_roundtrip() {
        for s in ["e", "t_1", "(s . t)", "((s . e) . (t . u))"] {
            assert_eq!(parse_term(s).unwrap().to_string(), s);
        }
        assert!(parse_term("(s . )").is_err());
    }

    #[test]
    fn application_intersects() {
        // worlds w1 w2 w3 = bits 0 1 2
        let u = universe_of(&["(p -> q)"]);
        let seeds = vec![
            Seed::new(Term::base("s"), f("(p -> q)"), ws(&[0, 1])),
            Seed::new(Term::base("t"), f("p"), ws(&[1, 2])),
        ];
        let table = saturate(&seeds, &BTreeSet::new(), WorldSet::full(3), &u).unwrap();
        let q: Vec<_> = table.entries_for(&f("q")).collect();
        assert_eq!(q, vec![(ws(&[1]), &Term::app(Term::base("s"), Term::base("t")))]);
    }

    #[test]
    fn tautology_ground_only() {
        let u = universe_of(&["(p -> p)"]);
        let lambda: BTreeSet<_> = [f("(p -> p)")].into();
        let table = saturate(&[], &lambda, WorldSet::full(3), &u).unwrap();
        let imp: Vec<_> = table.entries_for(&f("(p -> p)")).collect();
        assert_eq!(imp, vec![(WorldSet::full(3), &Term::SelfEvident)]);
        assert_eq!(table.entries_for(&f("p")).count(), 0);
    }

    #[test]
    fn derived_duplicate_keeps_shorter_witness() {
        let u = universe_of(&["(p -> p)"]);
        let lambda: BTreeSet<_> = [f("(p -> p)")].into();
        let seeds = vec![Seed::new(Term::base("t"), f("p"), ws(&[0]))];
        let table = saturate(&seeds, &lambda, WorldSet::full(3), &u).unwrap();
        let p: Vec<_> = table.entries_for(&f("p")).collect();
        assert_eq!(p, vec![(ws(&[0]), &Term::base("t"))]);
    }

    #[test]
    fn saturation_errors() {
        let u = universe_of(&["p"]);
        let bad = vec![Seed::new(Term::base("t"), f("q"), ws(&[0]))];
        assert_eq!(
            saturate(&bad, &BTreeSet::new(), WorldSet::full(2), &u),
            Err(TermsError::SeedOutsideUniverse(f("q")))
        );
        let outside = vec![Seed::new(Term::base("t"), f("p"), ws(&[5]))];
        assert!(matches!(
            saturate(&outside, &BTreeSet::new(), WorldSet::full(2), &u),
            Err(TermsError::SeedWorldOutside(_))
        ));
    }

    #[test]
    fn uniform_cover_lookup() {
        let u = universe_of(&["p"]);
        let seeds = vec![
            Seed::new(Term::base("t'"), f("p"), ws(&[0])),
            Seed::new(Term::base("t"), f("p"), ws(&[1])),
            Seed::new(Term::base("s"), f("p"), ws(&[1, 2])),
        ];
        let table = saturate(&seeds, &BTreeSet::new(), WorldSet::full(3), &u).unwrap();
        assert_eq!(
            table.covers_uniformly(&f("p"), ws(&[1, 2])).unwrap(),
            Some(&Term::base("s"))
        );
        assert_eq!(table.covers_uniformly(&f("p"), ws(&[0, 1])).unwrap(), None);
        // vacuous cell: smallest witness overall
        assert_eq!(
            table.covers_uniformly(&f("p"), WorldSet::EMPTY).unwrap(),
            Some(&Term::base("s"))
        );
        assert!(table.covers_uniformly(&f("q"), WorldSet::EMPTY).is_err());
    }

    #[test]
    fn chained_application() {
        let u = universe_of(&["(p -> (q -> r))"]);
        let seeds = vec![
            Seed::new(Term::base("a"), f("(p -> (q -> r))"), ws(&[0, 1, 2])),
            Seed::new(Term::base("b"), f("p"), ws(&[0, 1])),
            Seed::new(Term::base("c"), f("q"), ws(&[1, 2])),
        ];
        let table = saturate(&seeds, &BTreeSet::new(), WorldSet::full(3), &u).unwrap();
        let r: Vec<_> = table.entries_for(&f("r")).collect();
        let ab = Term::app(Term::base("a"), Term::base("b"));
        assert_eq!(r, vec![(ws(&[1]), &Term::app(ab, Term::base("c")))]);
        assert!(table.closure_gaps().is_empty());
    }
}
