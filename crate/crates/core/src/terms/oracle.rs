//! Brute-force reference for [`saturate`](super::saturate).
//!
//! Every seed line is its own generator and `e` carries the tautology
//! ground. Explanation sets of compound terms are computed directly from
//! the defining clause, taking the union over all antecedents:
//! `E(a . b, q) = U { E(a, p -> q) & E(b, p) : (p -> q) in universe }`.
//! Terms are enumerated by size; terms with identical explanation profiles
//! are interchangeable under application, so each size level keeps one
//! representative per profile.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{CoverageTable, Seed, Term, TermsError};
use crate::syntax::Formula;
use crate::worlds::WorldSet;

/// Profile cap for the enumeration.
pub const DEFAULT_PROFILE_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Input(#[from] TermsError),
    #[error("oracle enumeration exceeded {0} distinct term profiles")]
    ResourceCap(usize),
    #[error("oracle did not stabilize within term size {0}")]
    NotStabilized(usize),
}

type Profile = BTreeMap<usize, WorldSet>;

struct Enumeration {
    formulas: Vec<Formula>,
    /// Profiles of all terms of each size, with their smallest term.
    levels: Vec<BTreeMap<Profile, Term>>,
    implications: Vec<(usize, usize, usize)>,
}

impl Enumeration {
    fn new(
        seeds: &[Seed],
        lambda: &BTreeSet<Formula>,
        worlds: WorldSet,
        universe: &BTreeSet<Formula>,
    ) -> Result<Enumeration, OracleError> {
        let formulas: Vec<Formula> = universe.iter().cloned().collect();
        let pos = |f: &Formula| formulas.iter().position(|g| g == f);
        let mut implications = Vec::new();
        for (k, f) in formulas.iter().enumerate() {
            if let Some((a, c)) = f.as_implication() {
                if let (Some(a), Some(c)) = (pos(a), pos(c)) {
                    implications.push((k, a, c));
                }
            }
        }
        let mut atoms: BTreeMap<Profile, Term> = BTreeMap::new();
        let mut keep = |p: Profile, t: Term| {
            if p.is_empty() {
                return;
            }
            match atoms.get(&p) {
                Some(old) if *old <= t => {}
                _ => {
                    atoms.insert(p, t);
                }
            }
        };
        for seed in seeds {
            let k = pos(&seed.formula).ok_or_else(|| TermsError::SeedOutsideUniverse(seed.formula.clone()))?;
            if !seed.worlds.is_subset(worlds) {
                return Err(TermsError::SeedWorldOutside(seed.formula.clone()).into());
            }
            keep([(k, seed.worlds)].into(), seed.term.clone());
        }
        let mut e_profile = Profile::new();
        for l in lambda {
            let k = pos(l).ok_or_else(|| TermsError::LambdaOutsideUniverse(l.clone()))?;
            e_profile.insert(k, worlds);
        }
        keep(e_profile, Term::SelfEvident);
        Ok(Enumeration {
            formulas,
            levels: vec![BTreeMap::new(), atoms],
            implications,
        })
    }

    fn apply(&self, a: &Profile, b: &Profile) -> Profile {
        let mut out = Profile::new();
        for &(imp, ante, cons) in &self.implications {
            if let (Some(s), Some(t)) = (a.get(&imp), b.get(&ante)) {
                let meet = *s & *t;
                if !meet.is_empty() {
                    let slot = out.entry(cons).or_default();
                    *slot = *slot | meet;
                }
            }
        }
        out
    }

    /// Fills in levels up to `size`.
    fn grow_to(&mut self, size: usize, cap: usize) -> Result<(), OracleError> {
        while self.levels.len() <= size {
            let n = self.levels.len();
            let mut level: BTreeMap<Profile, Term> = BTreeMap::new();
            // sizes of binary terms are odd; left + right + 1 = n
            if n >= 3 {
                for left in 1..n - 1 {
                    let right = n - 1 - left;
                    for (pa, ta) in &self.levels[left] {
                        for (pb, tb) in &self.levels[right] {
                            let p = self.apply(pa, pb);
                            if p.is_empty() {
                                continue;
                            }
                            let t = Term::app(ta.clone(), tb.clone());
                            match level.get(&p) {
                                Some(old) if *old <= t => {}
                                _ => {
                                    level.insert(p, t);
                                }
                            }
                        }
                    }
                }
            }
            if level.len() > cap {
                return Err(OracleError::ResourceCap(cap));
            }
            self.levels.push(level);
        }
        Ok(())
    }

    fn profiles_upto(&self, size: usize) -> BTreeSet<&Profile> {
        self.levels[..=size.min(self.levels.len() - 1)]
            .iter()
            .flat_map(|l| l.keys())
            .collect()
    }

    fn table(&self, size: usize, universe: &BTreeSet<Formula>) -> CoverageTable {
        let mut table = CoverageTable::new(universe.clone());
        for level in &self.levels[..=size.min(self.levels.len() - 1)] {
            for (profile, term) in level {
                for (&k, &set) in profile {
                    table.insert(self.formulas[k].clone(), set, term.clone());
                }
            }
        }
        table
    }
}

/// Coverage of all terms of size at most `depth`.
pub fn brute_force_saturation_oracle(
    seeds: &[Seed],
    lambda: &BTreeSet<Formula>,
    worlds: WorldSet,
    universe: &BTreeSet<Formula>,
    depth: usize,
) -> Result<CoverageTable, OracleError> {
    let mut en = Enumeration::new(seeds, lambda, worlds, universe)?;
    en.grow_to(depth, DEFAULT_PROFILE_CAP)?;
    Ok(en.table(depth, universe))
}

/// Runs the enumeration until it provably stops producing new profiles and
/// returns the table together with the size bound that was needed.
///
/// If no term of size in `(n, 2n+1]` has a profile missing from the sizes
/// `<= n`, then no larger term does either: a larger term has children whose
/// profiles already occur at size `<= n`, so it shares its profile with a
/// term of size `<= 2n+1`.
pub fn stabilized_oracle(
    seeds: &[Seed],
    lambda: &BTreeSet<Formula>,
    worlds: WorldSet,
    universe: &BTreeSet<Formula>,
    max_size: usize,
) -> Result<(CoverageTable, usize), OracleError> {
    let mut en = Enumeration::new(seeds, lambda, worlds, universe)?;
    let mut n = 1;
    loop {
        let bound = 2 * n + 1;
        if bound > max_size {
            return Err(OracleError::NotStabilized(max_size));
        }
        en.grow_to(bound, DEFAULT_PROFILE_CAP)?;
        if en.profiles_upto(bound) == en.profiles_upto(n) {
            return Ok((en.table(n, universe), n));
        }
        n += 2;
    }
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

    #[test]
    fn empty_inputs_give_empty_table() {
        let u: BTreeSet<_> = subformulas(&f("(p -> q)")).into_iter().collect();
        for depth in [1, 3, 7] {
            let t = brute_force_saturation_oracle(&[], &BTreeSet::new(), WorldSet::full(2), &u, depth).unwrap();
            assert_eq!(t.entry_count(), 0);
        }
    }

    #[test]
    fn depth_one_is_just_the_generators() {
        let u: BTreeSet<_> = subformulas(&f("(p -> p)")).into_iter().collect();
        let lambda: BTreeSet<_> = [f("(p -> p)")].into();
        let seeds = vec![Seed::new(Term::base("t"), f("p"), ws(&[0]))];
        let t = brute_force_saturation_oracle(&seeds, &lambda, WorldSet::full(2), &u, 1).unwrap();
        let fam = t.families();
        assert_eq!(fam[&f("p")], [ws(&[0])].into());
        assert_eq!(fam[&f("(p -> p)")], [WorldSet::full(2)].into());
        assert_eq!(fam.len(), 2);
    }

    #[test]
    fn union_over_antecedents() {
        // one generator explaining two implications with the same
        // consequent: its application takes the union
        let u: BTreeSet<_> = subformulas(&f("((a -> c) & (b -> c))")).into_iter().collect();
        let mut en = Enumeration::new(&[], &BTreeSet::new(), WorldSet::full(2), &u).unwrap();
        let idx = |s: &str| en.formulas.iter().position(|g| *g == f(s)).unwrap();
        let pa: Profile = [(idx("(a -> c)"), ws(&[0])), (idx("(b -> c)"), ws(&[1]))].into();
        let pb: Profile = [(idx("a"), ws(&[0, 1])), (idx("b"), ws(&[0, 1]))].into();
        let out = en.apply(&pa, &pb);
        assert_eq!(out, [(idx("c"), ws(&[0, 1]))].into());
        en.levels.clear();
    }

    #[test]
    fn stabilizes_on_chain() {
        let u: BTreeSet<_> = subformulas(&f("(p -> (q -> r))")).into_iter().collect();
        let seeds = vec![
            Seed::new(Term::base("a"), f("(p -> (q -> r))"), ws(&[0, 1, 2])),
            Seed::new(Term::base("b"), f("p"), ws(&[0, 1])),
            Seed::new(Term::base("c"), f("q"), ws(&[1, 2])),
        ];
        let (t, n) = stabilized_oracle(&seeds, &BTreeSet::new(), WorldSet::full(3), &u, 41).unwrap();
        assert!(n >= 5);
        assert_eq!(t.families()[&f("r")], [ws(&[1])].into());
    }
}
