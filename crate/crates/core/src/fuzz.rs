//! Soundness fuzzing: every axiom instance, necessitated instance and
//! tautology-ground necessitation must hold everywhere in random models.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::random::{random_formula, random_model_from, FormulaShape, RandomModelSpec};
use crate::model::{print_model, Model};
use crate::proofs::{instantiate, System};
use crate::semantics::{complete_introspection, shaped_subformulas, truth_set, SemanticsError};
use crate::syntax::{is_propositional_tautology, print_formula, Formula};

/// Size caps and the run's identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub system: System,
    pub trials: usize,
    pub seed: u64,
    pub max_worlds: usize,
    pub max_agents: usize,
    pub max_props: usize,
    pub max_seeds: usize,
    /// depth of the formulas substituted into schemas
    pub depth: usize,
}

impl FuzzConfig {
    pub fn new(system: System, trials: usize, seed: u64) -> FuzzConfig {
        FuzzConfig {
            system,
            trials,
            seed,
            max_worlds: 4,
            max_agents: 2,
            max_props: 3,
            max_seeds: 4,
            depth: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub rule: String,
    pub formula: Formula,
    pub world: String,
    pub model: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport {
    pub config: FuzzConfig,
    pub instances: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl FuzzReport {
    pub fn render(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(out, "system: {}", c.system);
        let _ = writeln!(out, "trials: {}", c.trials);
        let _ = writeln!(out, "seed: {}", c.seed);
        let _ = writeln!(
            out,
            "caps: worlds={} agents={} props={} seeds={} depth={}",
            c.max_worlds, c.max_agents, c.max_props, c.max_seeds, c.depth
        );
        let _ = writeln!(out, "instances: {}", self.instances);
        let _ = writeln!(out, "counterexamples: {}", self.counterexamples.len());
        for cx in &self.counterexamples {
            let _ = writeln!(
                out,
                "\ncounterexample seed={} trial={} rule={} world={}",
                c.seed, cx.trial, cx.rule, cx.world
            );
            let _ = writeln!(out, "# formula: {}", print_formula(&cx.formula));
            out.push_str(&cx.model);
        }
        out
    }
}

/// Classical tautology schemas over three formulas.
fn classical(k: usize, x: Formula, y: Formula, z: Formula) -> Formula {
    use Formula as F;
    match k % 6 {
        0 => F::implies(x.clone(), F::implies(y, x)),
        1 => F::implies(
            F::implies(x.clone(), F::implies(y.clone(), z.clone())),
            F::implies(F::implies(x.clone(), y), F::implies(x, z)),
        ),
        2 => F::implies(F::implies(F::not(x.clone()), F::not(y.clone())), F::implies(y, x)),
        3 => F::implies(F::and(x.clone(), y), x),
        4 => F::implies(x.clone(), F::or(x, y)),
        _ => F::implies(F::not(F::not(x.clone())), x),
    }
}

fn random_tautology<R: Rng + ?Sized>(rng: &mut R, shape: &FormulaShape) -> Formula {
    let k = rng.gen_range(0..6);
    let t = classical(
        k,
        random_formula(rng, shape),
        random_formula(rng, shape),
        random_formula(rng, shape),
    );
    debug_assert_eq!(is_propositional_tautology(&t), Ok(true));
    t
}

/// The rng for one trial: the run seed fixes the key, the trial index the
/// stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// The model and rule instances of one trial; SKYI models are completed
/// for introspection over the shaped subformulas of the instances.
pub fn trial_instances(config: &FuzzConfig, trial: usize) -> Result<(Model, Vec<(String, Formula)>), SemanticsError> {
    let mut rng = trial_rng(config.seed, trial);
    let props = rng.gen_range(1..=config.max_props.max(1));
    let agents = rng.gen_range(1..=config.max_agents.max(1));
    let shape = FormulaShape::new(props, agents, config.depth);
    let small = FormulaShape::new(props, agents, 1);
    let lambda_pool = (0..2).map(|_| random_tautology(&mut rng, &small)).collect();
    let spec = RandomModelSpec {
        lambda_pool,
        seed_depth: config.depth,
        ..RandomModelSpec::new(
            rng.gen_range(1..=config.max_worlds.max(1)),
            agents,
            props,
            rng.gen_range(0..=config.max_seeds),
            0,
        )
    };
    let model = random_model_from(&mut rng, &spec);
    let mut instances = Vec::new();
    for &axiom in config.system.axioms() {
        for _ in 0..2 {
            let agent = shape.agents[rng.gen_range(0..shape.agents.len())].clone();
            let phi = random_formula(&mut rng, &shape);
            let psi = random_formula(&mut rng, &shape);
            let f = match instantiate(axiom, &agent, &phi, &psi) {
                Some(f) => f,
                None => random_tautology(&mut rng, &shape),
            };
            instances.push((axiom.name().to_string(), f));
        }
    }
    let (rule, inner) = instances[rng.gen_range(0..instances.len())].clone();
    let agent = shape.agents[rng.gen_range(0..shape.agents.len())].clone();
    instances.push((format!("NECK({rule})"), Formula::k(agent, inner)));
    for l in model.frame().lambda() {
        for a in &shape.agents {
            instances.push(("NECKY".to_string(), Formula::ky(a.clone(), l.clone())));
        }
    }
    let mut model = model.with_query(instances.iter().map(|(_, f)| f))?;
    if config.system == System::Skyi {
        let shaped = shaped_subformulas(instances.iter().map(|(_, f)| f));
        model = complete_introspection(&model, &shaped)?;
    }
    Ok((model, instances))
}

fn run_trial(config: &FuzzConfig, trial: usize) -> (usize, Vec<Counterexample>) {
    let (model, instances) = trial_instances(config, trial).expect("generated instances are well-formed");
    let all = model.frame().all_worlds();
    let mut found = Vec::new();
    for (rule, f) in &instances {
        let truth = truth_set(&model, f).expect("instances lie in the universe");
        if let Some(w) = (all - truth).first() {
            found.push(Counterexample {
                trial,
                rule: rule.clone(),
                formula: f.clone(),
                world: model.frame().world_name(w).to_string(),
                model: print_model(&model),
            });
        }
    }
    (instances.len(), found)
}

/// Runs all trials; the report depends only on the configuration.
pub fn fuzz(config: &FuzzConfig) -> FuzzReport {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let mut results: Vec<(usize, (usize, Vec<Counterexample>))> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    (t..config.trials)
                        .step_by(threads)
                        .map(|trial| (trial, run_trial(config, trial)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("fuzz worker panicked"))
            .collect()
    });
    results.sort_by_key(|(trial, _)| *trial);
    let mut report = FuzzReport {
        config: config.clone(),
        instances: 0,
        counterexamples: Vec::new(),
    };
    for (_, (n, cx)) in results {
        report.instances += n;
        report.counterexamples.extend(cx);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let c = FuzzConfig::new(System::Sky, 3, 1);
        assert_eq!(fuzz(&c).render(), fuzz(&c).render());
    }

    #[test]
    fn small_runs_are_clean() {
        for system in [System::Sky, System::Skyi] {
            let r = fuzz(&FuzzConfig::new(system, 20, 5));
            assert!(r.counterexamples.is_empty(), "{}", r.render());
            assert!(r.instances > 0);
        }
    }

    #[test]
    fn classical_schemas_are_tautologies() {
        let (x, y, z) = (
            Formula::prop("p"),
            Formula::k(crate::syntax::Agent::new("i"), Formula::prop("q")),
            Formula::prop("r"),
        );
        for k in 0..6 {
            assert_eq!(
                is_propositional_tautology(&classical(k, x.clone(), y.clone(), z.clone())),
                Ok(true)
            );
        }
    }

    #[test]
    fn skyi_axioms_fail_without_completion() {
        // the stronger introspection axioms need introspective models
        let mut failures = 0;
        for trial in 0..40 {
            let mut c = FuzzConfig::new(System::Sky, 1, 3);
            c.system = System::Sky;
            let (model, _) = trial_instances(&c, trial).unwrap();
            let i = crate::syntax::Agent::new("i");
            let f = instantiate(
                crate::proofs::Axiom::FourKY,
                &i,
                &Formula::prop("p"),
                &Formula::prop("p"),
            )
            .unwrap();
            let m = model.with_query([&f]).unwrap();
            if truth_set(&m, &f).unwrap() != m.frame().all_worlds() {
                failures += 1;
            }
        }
        assert!(failures > 0);
    }
}
