//! Seeded random models and formulas for property tests and fuzzing.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Frame, Model};
use crate::syntax::{Agent, Formula};
use crate::terms::{Seed, Term};
use crate::worlds::{WorldId, WorldSet};

/// Vocabulary and depth for random formulas.
#[derive(Clone, Debug)]
pub struct FormulaShape {
    pub props: Vec<String>,
    pub agents: Vec<Agent>,
    pub depth: usize,
    pub conditional: bool,
}

impl FormulaShape {
    pub fn new(props: usize, agents: usize, depth: usize) -> FormulaShape {
        FormulaShape {
            props: prop_names(props),
            agents: agent_names(agents),
            depth,
            conditional: false,
        }
    }

    pub fn with_conditional(mut self, yes: bool) -> FormulaShape {
        self.conditional = yes;
        self
    }
}

/// `p q r s u v`, then `p6 p7 ...`.
pub fn prop_names(n: usize) -> Vec<String> {
    const BASE: [&str; 6] = ["p", "q", "r", "s", "u", "v"];
    (0..n)
        .map(|k| BASE.get(k).map(|s| s.to_string()).unwrap_or_else(|| format!("p{k}")))
        .collect()
}

/// `i j k l m n`, then `a6 a7 ...`.
pub fn agent_names(n: usize) -> Vec<Agent> {
    const BASE: [&str; 6] = ["i", "j", "k", "l", "m", "n"];
    (0..n)
        .map(|k| Agent::new(BASE.get(k).map(|s| s.to_string()).unwrap_or_else(|| format!("a{k}"))))
        .collect()
}

/// A random formula of nesting depth at most `shape.depth`. Derived
/// connectives appear so that implication-shaped formulas are common.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, shape: &FormulaShape) -> Formula {
    random_at(rng, shape, shape.depth)
}

fn random_at<R: Rng + ?Sized>(rng: &mut R, shape: &FormulaShape, depth: usize) -> Formula {
    if shape.props.is_empty() {
        return Formula::top();
    }
    if depth == 0 {
        return Formula::prop(&shape.props[rng.gen_range(0..shape.props.len())]);
    }
    let kinds = if shape.conditional { 8 } else { 7 };
    let agent = |rng: &mut R| shape.agents[rng.gen_range(0..shape.agents.len())].clone();
    let d = depth - 1;
    match rng.gen_range(0..kinds) {
        0 => random_at(rng, shape, 0),
        1 => Formula::not(random_at(rng, shape, d)),
        2 => Formula::and(random_at(rng, shape, d), random_at(rng, shape, d)),
        3 => Formula::implies(random_at(rng, shape, d), random_at(rng, shape, d)),
        4 => {
            let a = agent(rng);
            Formula::k(a, random_at(rng, shape, d))
        }
        5 | 6 => {
            let a = agent(rng);
            Formula::ky(a, random_at(rng, shape, d))
        }
        _ => {
            let a = agent(rng);
            Formula::ky_cond(a, random_at(rng, shape, d), random_at(rng, shape, d))
        }
    }
}

/// Parameters of a random model.
#[derive(Clone, Debug)]
pub struct RandomModelSpec {
    pub worlds: usize,
    pub agents: usize,
    pub props: usize,
    pub seeds: usize,
    /// each member joins the tautology ground with probability one half
    pub lambda_pool: Vec<Formula>,
    /// depth of seed formulas
    pub seed_depth: usize,
    pub conditional: bool,
    pub rng_seed: u64,
}

impl RandomModelSpec {
    pub fn new(worlds: usize, agents: usize, props: usize, seeds: usize, rng_seed: u64) -> RandomModelSpec {
        RandomModelSpec {
            worlds,
            agents,
            props,
            seeds,
            lambda_pool: Vec::new(),
            seed_depth: 2,
            conditional: false,
            rng_seed,
        }
    }

    pub fn formula_shape(&self, depth: usize) -> FormulaShape {
        FormulaShape::new(self.props, self.agents, depth).with_conditional(self.conditional)
    }
}

/// Draws a set partition of `0..n` uniformly at random.
fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<WorldSet> {
    // ways[r][b]: completions of the remaining r elements given b blocks
    let mut ways = vec![vec![1.0f64; n + 2]; n + 1];
    for r in 1..=n {
        for b in 0..=n {
            ways[r][b] = b as f64 * ways[r - 1][b] + ways[r - 1][b + 1];
        }
    }
    let mut blocks: Vec<WorldSet> = Vec::new();
    for w in 0..n {
        let rest = n - w - 1;
        let b = blocks.len();
        let total = ways[rest + 1][b];
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = None;
        for (k, _) in blocks.iter().enumerate() {
            pick -= ways[rest][b];
            if pick < 0.0 {
                chosen = Some(k);
                break;
            }
        }
        match chosen {
            Some(k) => blocks[k].insert(WorldId(w)),
            None => blocks.push(WorldSet::singleton(WorldId(w))),
        }
    }
    blocks
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WorldSet {
    WorldSet::from_bits(rng.gen::<u64>()) & WorldSet::full(n)
}

fn random_nonempty_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WorldSet {
    loop {
        let s = random_subset(rng, n);
        if !s.is_empty() {
            return s;
        }
    }
}

/// A random frame: partitions, valuation and a subset of the pool as
/// tautology ground.
pub fn random_frame<R: Rng + ?Sized>(rng: &mut R, spec: &RandomModelSpec) -> Frame {
    let n = spec.worlds.max(1);
    let worlds: Vec<String> = (1..=n).map(|k| format!("w{k}")).collect();
    let agents = agent_names(spec.agents.max(1));
    let partitions: BTreeMap<Agent, Vec<WorldSet>> =
        agents.iter().map(|a| (a.clone(), random_partition(rng, n))).collect();
    let valuation = prop_names(spec.props)
        .into_iter()
        .map(|p| (p, random_subset(rng, n)))
        .collect();
    let lambda: BTreeSet<Formula> = spec.lambda_pool.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    Frame::new(worlds, agents, partitions, valuation, lambda).expect("random frames are well-formed")
}

/// A random model drawn from `rng`. Seed formulas come from a small pool
/// that contains implications between its members, so that saturation has
/// work to do.
pub fn random_model_from<R: Rng + ?Sized>(rng: &mut R, spec: &RandomModelSpec) -> Model {
    let frame = random_frame(rng, spec);
    let n = frame.world_count();
    let shape = spec.formula_shape(spec.seed_depth);
    let mut pool: Vec<Formula> = (0..3).map(|_| random_formula(rng, &shape)).collect();
    for _ in 0..2 {
        let a = pool[rng.gen_range(0..pool.len())].clone();
        let b = pool[rng.gen_range(0..pool.len())].clone();
        pool.push(Formula::implies(a, b));
    }
    pool.extend(frame.lambda().iter().cloned());
    let seeds = (1..=spec.seeds)
        .map(|k| {
            let f = pool[rng.gen_range(0..pool.len())].clone();
            Seed::new(Term::base(format!("t{k}")), f, random_nonempty_subset(rng, n))
        })
        .collect();
    Model::new(frame, seeds).expect("random seeds lie inside their own universe")
}

/// A random model determined by `spec.rng_seed`.
pub fn random_model(spec: &RandomModelSpec) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    random_model_from(&mut rng, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_model, print_model};
    use crate::syntax::parse_formula;

    #[test]
    fn single_world() {
        let m = random_model(&RandomModelSpec::new(1, 1, 1, 0, 42));
        assert_eq!(m.frame().world_count(), 1);
        assert!(m.seeds().is_empty());
    }

    #[test]
    fn deterministic() {
        let spec = RandomModelSpec {
            lambda_pool: vec![parse_formula("(p -> p)").unwrap()],
            ..RandomModelSpec::new(3, 2, 2, 3, 7)
        };
        assert_eq!(random_model(&spec), random_model(&spec));
        let m = random_model(&spec);
        assert_eq!(load_model(&print_model(&m)).unwrap(), m);
    }

    #[test]
    fn partitions_are_equivalences() {
        for seed in 0..50 {
            let spec = RandomModelSpec::new(1 + (seed as usize % 6), 2, 2, 2, seed);
            let m = random_model(&spec);
            let f = m.frame();
            let n = f.world_count();
            for a in f.agents() {
                let rel = |x: usize, y: usize| f.equivalence_class(a, WorldId(x)).unwrap().contains(WorldId(y));
                for x in 0..n {
                    assert!(rel(x, x));
                    for y in 0..n {
                        assert_eq!(rel(x, y), rel(y, x));
                        for z in 0..n {
                            assert!(!(rel(x, y) && rel(y, z)) || rel(x, z));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn partitions_cover_all_shapes() {
        // all five partitions of three elements show up
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = BTreeSet::new();
        for _ in 0..400 {
            let mut p = random_partition(&mut rng, 3);
            p.sort_by_key(|b| b.bits());
            seen.insert(p.iter().map(|b| b.bits()).collect::<Vec<_>>());
        }
        assert_eq!(seen.len(), 5);
    }

    #[test]
    fn formula_depth_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let shape = FormulaShape::new(2, 2, 3).with_conditional(true);
        for _ in 0..200 {
            let f = random_formula(&mut rng, &shape);
            assert!(f.modal_depth() <= 3);
        }
    }
}
