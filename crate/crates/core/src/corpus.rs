//! Deterministic random formula generation for stress tests.
//!
//! Terms carry a rank-raise budget: powerset, products, and displays can
//! push a value's rank above its inputs, and unbounded nesting would make
//! bounded equisatisfiability checks infeasible. The generator tracks the
//! worst-case raise along any path so downstream searches stay at
//! enumerable levels.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::syntax::{Atom, Formula, Term};

/// Shape limits for generated formulas.
#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub vars: Vec<String>,
    pub max_term_depth: u32,
    /// Worst-case rank increase a term may apply to its inputs.
    pub max_rank_raise: u32,
    pub max_atoms: usize,
    pub allow_finite: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            vars: vec!["w".into(), "x".into(), "y".into(), "z".into()],
            max_term_depth: 3,
            max_rank_raise: 2,
            max_atoms: 4,
            allow_finite: false,
        }
    }
}

fn gen_term(rng: &mut StdRng, cfg: &CorpusConfig, depth: u32, raise: u32) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        return if rng.gen_bool(0.15) {
            Term::Empty
        } else {
            Term::Var(cfg.vars[rng.gen_range(0..cfg.vars.len())].clone())
        };
    }
    // Candidate operators weighted towards the boolean core; rank-raising
    // operators only when budget remains.
    let mut choices: Vec<u8> = vec![0, 0, 1, 1, 2, 2, 5, 6];
    if raise >= 1 {
        choices.extend([3, 7, 8]);
    }
    if raise >= 2 {
        choices.push(4);
    }
    match choices[rng.gen_range(0..choices.len())] {
        0 => Term::Union(
            Box::new(gen_term(rng, cfg, depth - 1, raise)),
            Box::new(gen_term(rng, cfg, depth - 1, raise)),
        ),
        1 => Term::Inter(
            Box::new(gen_term(rng, cfg, depth - 1, raise)),
            Box::new(gen_term(rng, cfg, depth - 1, raise)),
        ),
        2 => Term::Diff(
            Box::new(gen_term(rng, cfg, depth - 1, raise)),
            Box::new(gen_term(rng, cfg, depth - 1, raise)),
        ),
        3 => Term::Pow(Box::new(gen_term(rng, cfg, depth - 1, raise - 1))),
        4 => Term::Cross(
            Box::new(gen_term(rng, cfg, depth - 1, raise - 2)),
            Box::new(gen_term(rng, cfg, depth - 1, raise - 2)),
        ),
        5 => Term::BigUnion(Box::new(gen_term(rng, cfg, depth - 1, raise))),
        6 => Term::DisjUnion(Box::new(gen_term(rng, cfg, depth - 1, raise))),
        7 => Term::UCross(
            Box::new(gen_term(rng, cfg, depth - 1, raise - 1)),
            Box::new(gen_term(rng, cfg, depth - 1, raise - 1)),
        ),
        _ => {
            let n = rng.gen_range(1..=2);
            Term::Display(
                (0..n)
                    .map(|_| gen_term(rng, cfg, depth - 1, raise - 1))
                    .collect(),
            )
        }
    }
}

fn gen_atom(rng: &mut StdRng, cfg: &CorpusConfig) -> Atom {
    let s = gen_term(rng, cfg, cfg.max_term_depth, cfg.max_rank_raise);
    let t = gen_term(rng, cfg, cfg.max_term_depth, cfg.max_rank_raise);
    match rng.gen_range(0..if cfg.allow_finite { 4 } else { 3 }) {
        0 => Atom::Mem(s, t),
        1 => Atom::Eq(s, t),
        2 => Atom::Sub(s, t),
        _ => Atom::Finite(s),
    }
}

/// One random formula under the configured shape limits.
pub fn random_formula(rng: &mut StdRng, cfg: &CorpusConfig) -> Formula {
    let atoms = rng.gen_range(1..=cfg.max_atoms);
    let mut parts: Vec<Formula> = (0..atoms)
        .map(|_| {
            let atom = Formula::Atom(gen_atom(rng, cfg));
            if rng.gen_bool(0.25) {
                Formula::not(atom)
            } else {
                atom
            }
        })
        .collect();
    while parts.len() > 1 {
        let b = parts.pop().unwrap();
        let a = parts.pop().unwrap();
        let combined = match rng.gen_range(0..8) {
            0..=3 => Formula::and(a, b),
            4..=5 => Formula::or(a, b),
            6 => Formula::Implies(Box::new(a), Box::new(b)),
            _ => Formula::Iff(Box::new(a), Box::new(b)),
        };
        parts.push(combined);
    }
    parts.pop().unwrap()
}

/// A reproducible corpus: the same seed and config always produce the same
/// formulas.
pub fn corpus(seed: u64, n: usize, cfg: &CorpusConfig) -> Vec<Formula> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| random_formula(&mut rng, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible() {
        let cfg = CorpusConfig::default();
        let a = corpus(7, 50, &cfg);
        let b = corpus(7, 50, &cfg);
        assert_eq!(a, b);
        let c = corpus(8, 50, &cfg);
        assert_ne!(a, c);
    }

    #[test]
    fn corpus_respects_shape_limits() {
        let cfg = CorpusConfig::default();
        for f in corpus(42, 200, &cfg) {
            assert!(f.term_depth() <= cfg.max_term_depth);
            assert!(f.vars().len() <= cfg.vars.len());
            assert!(!f.contains_finite_atom());
        }
    }

    #[test]
    fn parse_print_roundtrip_on_generated_corpus() {
        use crate::syntax::{parse_formula, print_formula};
        let cfg = CorpusConfig {
            max_term_depth: 5,
            max_atoms: 6,
            allow_finite: true,
            ..CorpusConfig::default()
        };
        for f in corpus(3, 1000, &cfg) {
            let printed = print_formula(&f);
            let reparsed = parse_formula(&printed).unwrap();
            assert_eq!(reparsed, f, "{printed}");
            // vars is invariant under print ∘ parse
            assert_eq!(reparsed.vars(), f.vars());
        }
    }
}
