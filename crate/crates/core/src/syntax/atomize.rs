use std::fmt;

use thiserror::Error;

use super::Formula;

/// Atom cap used by [`is_propositional_tautology`].
pub const DEFAULT_ATOM_CAP: usize = 20;

/// Propositional structure over numbered atoms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Skeleton {
    Atom(usize),
    Not(Box<Skeleton>),
    And(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    /// Truth value under an assignment where bit `k` is atom `k`.
    pub fn eval(&self, assignment: u64) -> bool {
        match self {
            Skeleton::Atom(k) => assignment >> k & 1 == 1,
            Skeleton::Not(s) => !s.eval(assignment),
            Skeleton::And(a, b) => a.eval(assignment) && b.eval(assignment),
        }
    }

    /// Substitutes `atoms[k]` for each placeholder `k`.
    pub fn instantiate(&self, atoms: &[Formula]) -> Formula {
        match self {
            Skeleton::Atom(k) => atoms[*k].clone(),
            Skeleton::Not(s) => Formula::not(s.instantiate(atoms)),
            Skeleton::And(a, b) => Formula::and(a.instantiate(atoms), b.instantiate(atoms)),
        }
    }
}

impl fmt::Display for Skeleton {
    /// Placeholders print as `a1, a2, ...`; implications are re-sugared.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Skeleton::Not(inner) = self {
            if let Skeleton::And(a, rhs) = inner.as_ref() {
                if let Skeleton::Not(b) = rhs.as_ref() {
                    return write!(f, "({a} -> {b})");
                }
            }
        }
        match self {
            Skeleton::Atom(k) => write!(f, "a{}", k + 1),
            Skeleton::Not(s) => write!(f, "~{s}"),
            Skeleton::And(a, b) => write!(f, "({a} & {b})"),
        }
    }
}

impl fmt::Debug for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A formula split into maximal non-boolean subformulas (atoms) and the
/// boolean skeleton over them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModalAtomization {
    /// Atoms in order of first occurrence.
    pub atoms: Vec<Formula>,
    pub skeleton: Skeleton,
}

impl ModalAtomization {
    pub fn reconstruct(&self) -> Formula {
        self.skeleton.instantiate(&self.atoms)
    }
}

pub fn modal_atomize(f: &Formula) -> ModalAtomization {
    let mut atoms = Vec::new();
    let skeleton = skeletonize(f, &mut atoms);
    ModalAtomization { atoms, skeleton }
}

fn skeletonize(f: &Formula, atoms: &mut Vec<Formula>) -> Skeleton {
    match f {
        Formula::Not(g) => Skeleton::Not(Box::new(skeletonize(g, atoms))),
        Formula::And(a, b) => {
            let a = skeletonize(a, atoms);
            let b = skeletonize(b, atoms);
            Skeleton::And(Box::new(a), Box::new(b))
        }
        _ => {
            let k = match atoms.iter().position(|x| x == f) {
                Some(k) => k,
                None => {
                    atoms.push(f.clone());
                    atoms.len() - 1
                }
            };
            Skeleton::Atom(k)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("tautology check needs {atoms} atoms, above the cap of {cap}")]
pub struct TooManyAtoms {
    pub atoms: usize,
    pub cap: usize,
}

/// Truth-table check of the modal skeleton with the default atom cap.
pub fn is_propositional_tautology(f: &Formula) -> Result<bool, TooManyAtoms> {
    is_propositional_tautology_with_cap(f, DEFAULT_ATOM_CAP)
}

pub fn is_propositional_tautology_with_cap(f: &Formula, cap: usize) -> Result<bool, TooManyAtoms> {
    let m = modal_atomize(f);
    let n = m.atoms.len();
    if n > cap.min(63) {
        return Err(TooManyAtoms { atoms: n, cap });
    }
    Ok((0..1u64 << n).all(|a| m.skeleton.eval(a)))
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    fn atomize(s: &str) -> ModalAtomization {
        modal_atomize(&parse_formula(s).unwrap())
    }

    #[test]
    fn atoms_in_first_occurrence_order() {
        let m = atomize("(K[i]p -> p)");
        assert_eq!(
            m.atoms,
            vec![parse_formula("K[i]p").unwrap(), parse_formula("p").unwrap()]
        );
        assert_eq!(m.skeleton.to_string(), "(a1 -> a2)");

        let m = atomize("(p -> p)");
        assert_eq!(m.atoms.len(), 1);
        assert_eq!(m.skeleton.to_string(), "(a1 -> a1)");

        let m = atomize("K[i](p->q)");
        assert_eq!(m.atoms, vec![parse_formula("K[i](p -> q)").unwrap()]);
        assert_eq!(m.skeleton.to_string(), "a1");
    }

    #[test]
    fn reconstruct_is_identity() {
        for s in ["(K[i]p -> p)", "~(Ky[i](q, p) & ~q)", "top", "(p | ~K[j] Ky[i] p)"] {
            let f = parse_formula(s).unwrap();
            assert_eq!(modal_atomize(&f).reconstruct(), f);
        }
    }

    #[test]
    fn tautologies() {
        let t = |s: &str| is_propositional_tautology(&parse_formula(s).unwrap()).unwrap();
        assert!(t("(p -> p)"));
        assert!(!t("(K[i]p -> p)"));
        assert!(t("((K[i]p & (K[i]p -> q)) -> q)"));
        assert!(t("top"));
        assert!(!t("bot"));
        assert!(t("(p | ~p)"));
        assert!(!t("p"));
    }

    #[test]
    fn atom_cap() {
        let f = parse_formula("((a & b) & (c & d))").unwrap();
        assert_eq!(
            is_propositional_tautology_with_cap(&f, 3),
            Err(TooManyAtoms { atoms: 4, cap: 3 })
        );
        assert_eq!(is_propositional_tautology_with_cap(&f, 4), Ok(false));
    }
}
