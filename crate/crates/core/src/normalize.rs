//! Reduction of arbitrary formulas to normalized conjunctions of flat
//! literals: disjunctive normal form, subterm flattening with fresh
//! variables, then the simplification rules that eliminate `∅`, `∩`, `⊆`,
//! `=` between bare variables, `⊈`, `≠`, and `∉`.
//!
//! Each output conjunction records, per fresh variable, a witness recipe
//! (the named subterm, a difference, a singleton, or `∅`). Folding the
//! recipes over a model of the source disjunct produces a model of the
//! normalized conjunction, which is how bounded equisatisfiability is
//! checked without searching the larger variable space.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::hf::Caps;
use crate::semantics::{eval_formula, eval_term, Assignment, EvalError};
use crate::syntax::{Arg, Atom, Formula, Literal, Term, VarName};

/// Errors from the normalization pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("disjunctive normal form exceeds {limit} disjuncts")]
    SizeBlowup { limit: usize },
    #[error("`Finite` atoms have no normalized-conjunction shape")]
    FiniteUnsupported,
}

/// Configuration for the pipeline.
#[derive(Debug, Clone)]
pub struct NormalizeConfig {
    /// Cap on the number of DNF disjuncts.
    pub max_disjuncts: usize,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig { max_disjuncts: 512 }
    }
}

/// An atom with a sign; DNF disjuncts are conjunctions of these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedAtom {
    pub positive: bool,
    pub atom: Atom,
}

impl SignedAtom {
    pub fn to_formula(&self) -> Formula {
        let f = Formula::Atom(self.atom.clone());
        if self.positive {
            f
        } else {
            Formula::not(f)
        }
    }
}

/// Supply of fresh variable names `_v1, _v2, …`, skipping any name already
/// used by the input formula.
#[derive(Debug, Clone)]
pub struct FreshVarSupply {
    counter: usize,
    taken: BTreeSet<VarName>,
}

impl FreshVarSupply {
    pub fn new(taken: BTreeSet<VarName>) -> FreshVarSupply {
        FreshVarSupply { counter: 0, taken }
    }

    pub fn for_formula(f: &Formula) -> FreshVarSupply {
        FreshVarSupply::new(f.vars())
    }

    pub fn fresh(&mut self) -> VarName {
        loop {
            self.counter += 1;
            let name = format!("_v{}", self.counter);
            if !self.taken.contains(&name) {
                self.taken.insert(name.clone());
                return name;
            }
        }
    }
}

/// How to compute the value of a fresh variable from a model of the source
/// disjunct (plus the fresh variables bound before it).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Value of an original subterm.
    Subterm(Term),
    /// `Mx ∖ My`.
    DiffOf(Arg, Arg),
    /// `{Mx}`.
    SingletonOf(Arg),
    /// The empty set.
    Empty,
}

/// A conjunction of flat literals (the pre-simplification shapes), with
/// the witness plan for its fresh variables.
#[derive(Debug, Clone)]
pub struct FlatConjunction {
    pub literals: Vec<Literal>,
    pub witnesses: Vec<(VarName, Witness)>,
}

/// A conjunction of normalized literals together with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedConjunction {
    literals: Vec<Literal>,
    witnesses: Vec<(VarName, Witness)>,
    source: Vec<SignedAtom>,
}

impl NormalizedConjunction {
    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn witnesses(&self) -> &[(VarName, Witness)] {
        &self.witnesses
    }

    /// The DNF disjunct this conjunction was produced from.
    pub fn source(&self) -> &[SignedAtom] {
        &self.source
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        self.literals.iter().flat_map(|l| l.vars()).collect()
    }

    /// The conjunction as a formula.
    pub fn to_formula(&self) -> Formula {
        Formula::conjoin(self.literals.iter().map(Literal::to_formula).collect())
    }

    /// If `m` satisfies the source disjunct, extends it over the fresh
    /// variables by evaluating the witness recipes. Callers re-verify the
    /// extension by evaluation rather than trusting the construction.
    pub fn extend_model(
        &self,
        m: &Assignment,
        caps: &Caps,
    ) -> Result<Option<Assignment>, EvalError> {
        for sa in &self.source {
            match eval_formula(m, &sa.to_formula(), caps) {
                Ok(true) => {}
                Ok(false) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        let mut ext = m.clone();
        for (var, witness) in &self.witnesses {
            let value = match witness {
                Witness::Subterm(t) => eval_term(&ext, t, caps)?,
                Witness::DiffOf(a, b) => {
                    let va = eval_term(&ext, &a.to_term(), caps)?;
                    let vb = eval_term(&ext, &b.to_term(), caps)?;
                    va.diff(&vb)
                }
                Witness::SingletonOf(a) => eval_term(&ext, &a.to_term(), caps)?.singleton(),
                Witness::Empty => crate::hf::HfSet::empty(),
            };
            ext.bind(var.clone(), value);
        }
        Ok(Some(ext))
    }
}

// ---------------------------------------------------------------------------
// Disjunctive normal form
// ---------------------------------------------------------------------------

/// Rewrites a formula into a disjunction of conjunctions of signed atoms.
/// The disjunction of the outputs is logically equivalent to the input.
pub fn to_dnf(f: &Formula, cfg: &NormalizeConfig) -> Result<Vec<Vec<SignedAtom>>, NormalizeError> {
    fn product(
        left: Vec<Vec<SignedAtom>>,
        right: Vec<Vec<SignedAtom>>,
        limit: usize,
    ) -> Result<Vec<Vec<SignedAtom>>, NormalizeError> {
        let mut out = Vec::with_capacity(left.len() * right.len());
        for l in &left {
            for r in &right {
                if out.len() >= limit {
                    return Err(NormalizeError::SizeBlowup { limit });
                }
                let mut c = l.clone();
                c.extend(r.iter().cloned());
                out.push(c);
            }
        }
        Ok(out)
    }

    fn union(
        mut left: Vec<Vec<SignedAtom>>,
        right: Vec<Vec<SignedAtom>>,
        limit: usize,
    ) -> Result<Vec<Vec<SignedAtom>>, NormalizeError> {
        left.extend(right);
        if left.len() > limit {
            return Err(NormalizeError::SizeBlowup { limit });
        }
        Ok(left)
    }

    fn go(
        f: &Formula,
        positive: bool,
        limit: usize,
    ) -> Result<Vec<Vec<SignedAtom>>, NormalizeError> {
        match f {
            Formula::Atom(a) => Ok(vec![vec![SignedAtom {
                positive,
                atom: a.clone(),
            }]]),
            Formula::Not(g) => go(g, !positive, limit),
            Formula::And(a, b) if positive => {
                product(go(a, true, limit)?, go(b, true, limit)?, limit)
            }
            Formula::And(a, b) => union(go(a, false, limit)?, go(b, false, limit)?, limit),
            Formula::Or(a, b) if positive => union(go(a, true, limit)?, go(b, true, limit)?, limit),
            Formula::Or(a, b) => product(go(a, false, limit)?, go(b, false, limit)?, limit),
            Formula::Implies(a, b) if positive => {
                union(go(a, false, limit)?, go(b, true, limit)?, limit)
            }
            Formula::Implies(a, b) => product(go(a, true, limit)?, go(b, false, limit)?, limit),
            Formula::Iff(a, b) => {
                // positive: (A∧B) ∨ (¬A∧¬B); negative: (A∧¬B) ∨ (¬A∧B)
                let both = product(go(a, true, limit)?, go(b, positive, limit)?, limit)?;
                let neither = product(go(a, false, limit)?, go(b, !positive, limit)?, limit)?;
                union(both, neither, limit)
            }
        }
    }

    go(f, true, cfg.max_disjuncts)
}

// ---------------------------------------------------------------------------
// Flattening
// ---------------------------------------------------------------------------

enum ShallowOp {
    Union(Arg, Arg),
    Inter(Arg, Arg),
    Diff(Arg, Arg),
    Cross(Arg, Arg),
    UCross(Arg, Arg),
    Pow(Arg),
    BigUnion(Arg),
    BigInter(Arg),
    DisjUnion(Arg),
    Display(Vec<Arg>),
}

impl ShallowOp {
    fn into_literal(self, lhs: Arg) -> Literal {
        match self {
            ShallowOp::Union(a, b) => Literal::EqUnion(lhs, a, b),
            ShallowOp::Inter(a, b) => Literal::EqInter(lhs, a, b),
            ShallowOp::Diff(a, b) => Literal::EqDiff(lhs, a, b),
            ShallowOp::Cross(a, b) => Literal::EqCross(lhs, a, b),
            ShallowOp::UCross(a, b) => Literal::EqUCross(lhs, a, b),
            ShallowOp::Pow(a) => Literal::EqPow(lhs, a),
            ShallowOp::BigUnion(a) => Literal::EqBigUnion(lhs, a),
            ShallowOp::BigInter(a) => Literal::EqBigInter(lhs, a),
            ShallowOp::DisjUnion(a) => Literal::EqDisjUnion(lhs, a),
            ShallowOp::Display(args) => Literal::EqDisplay(lhs, args),
        }
    }
}

struct Emitter<'a> {
    supply: &'a mut FreshVarSupply,
    literals: Vec<Literal>,
    witnesses: Vec<(VarName, Witness)>,
}

impl Emitter<'_> {
    /// Names a term: variables and `∅` stand for themselves, a compound
    /// term gets a fresh variable with a defining literal.
    fn name(&mut self, t: &Term) -> Arg {
        match t {
            Term::Var(v) => Arg::Var(v.clone()),
            Term::Empty => Arg::Empty,
            compound => {
                let op = self.shallow(compound);
                let v = self.supply.fresh();
                self.literals.push(op.into_literal(Arg::var(v.clone())));
                self.witnesses
                    .push((v.clone(), Witness::Subterm(compound.clone())));
                Arg::Var(v)
            }
        }
    }

    /// Names the direct children of a compound term.
    fn shallow(&mut self, t: &Term) -> ShallowOp {
        match t {
            Term::Var(_) | Term::Empty => unreachable!("only compounds are defined"),
            Term::Union(a, b) => ShallowOp::Union(self.name(a), self.name(b)),
            Term::Inter(a, b) => ShallowOp::Inter(self.name(a), self.name(b)),
            Term::Diff(a, b) => ShallowOp::Diff(self.name(a), self.name(b)),
            Term::Cross(a, b) => ShallowOp::Cross(self.name(a), self.name(b)),
            Term::UCross(a, b) => ShallowOp::UCross(self.name(a), self.name(b)),
            Term::Pow(t) => ShallowOp::Pow(self.name(t)),
            Term::BigUnion(t) => ShallowOp::BigUnion(self.name(t)),
            Term::BigInter(t) => ShallowOp::BigInter(self.name(t)),
            Term::DisjUnion(t) => ShallowOp::DisjUnion(self.name(t)),
            Term::Display(ts) => ShallowOp::Display(ts.iter().map(|t| self.name(t)).collect()),
        }
    }

    fn atom(&mut self, sa: &SignedAtom) {
        match (&sa.atom, sa.positive) {
            (Atom::Eq(s, t), true) => match (s.is_atomic(), t.is_atomic()) {
                (true, true) => {
                    let lit = Literal::EqVar(self.name(s), self.name(t));
                    self.literals.push(lit);
                }
                (true, false) => {
                    let lhs = self.name(s);
                    let op = self.shallow(t);
                    self.literals.push(op.into_literal(lhs));
                }
                (false, true) => {
                    // `=` is symmetric; keep the variable side on the left.
                    let lhs = self.name(t);
                    let op = self.shallow(s);
                    self.literals.push(op.into_literal(lhs));
                }
                (false, false) => {
                    let lhs = self.name(s);
                    let op = self.shallow(t);
                    self.literals.push(op.into_literal(lhs));
                }
            },
            (Atom::Eq(s, t), false) => {
                let lit = Literal::Neq(self.name(s), self.name(t));
                self.literals.push(lit);
            }
            (Atom::Mem(s, t), pos) => {
                let (a, b) = (self.name(s), self.name(t));
                self.literals.push(if pos {
                    Literal::Mem(a, b)
                } else {
                    Literal::NotMem(a, b)
                });
            }
            (Atom::Sub(s, t), pos) => {
                let (a, b) = (self.name(s), self.name(t));
                self.literals.push(if pos {
                    Literal::Sub(a, b)
                } else {
                    Literal::NotSub(a, b)
                });
            }
            (Atom::Finite(_), _) => {
                unreachable!("Finite atoms are rejected before flattening")
            }
        }
    }
}

/// Flattens a conjunction of signed atoms: every compound subterm is named
/// by a fresh variable with a defining literal; the result is
/// equisatisfiable, and models of the output restrict to models of the
/// input.
pub fn flatten(atoms: &[SignedAtom], supply: &mut FreshVarSupply) -> FlatConjunction {
    let mut e = Emitter {
        supply,
        literals: Vec::new(),
        witnesses: Vec::new(),
    };
    for sa in atoms {
        e.atom(sa);
    }
    FlatConjunction {
        literals: e.literals,
        witnesses: e.witnesses,
    }
}

// ---------------------------------------------------------------------------
// Simplification rules
// ---------------------------------------------------------------------------

struct Simplifier<'a> {
    supply: &'a mut FreshVarSupply,
    literals: Vec<Literal>,
    witnesses: Vec<(VarName, Witness)>,
    /// The shared variable standing for `∅`, created at most once.
    empty_var: Option<VarName>,
}

impl Simplifier<'_> {
    /// `∅` elimination: replace every `∅` argument with the shared fresh
    /// variable and add its defining conjunct `y∅ = y∅ ∖ y∅` once.
    fn pass_empty(&mut self) -> bool {
        let uses_empty = |lit: &Literal| lit.args().iter().any(|a| **a == Arg::Empty);
        if !self.literals.iter().any(uses_empty) {
            return false;
        }
        let var = match &self.empty_var {
            Some(v) => v.clone(),
            None => {
                let v = self.supply.fresh();
                self.empty_var = Some(v.clone());
                self.witnesses.push((v.clone(), Witness::Empty));
                self.literals.push(Literal::EqDiff(
                    Arg::var(v.clone()),
                    Arg::var(v.clone()),
                    Arg::var(v.clone()),
                ));
                v
            }
        };
        let subst = &|a: Arg| match a {
            Arg::Empty => Arg::var(var.clone()),
            v => v,
        };
        self.literals = self
            .literals
            .drain(..)
            .map(|lit| map_args(lit, subst))
            .collect();
        true
    }

    /// Rewrites every literal matched by `rule` into its replacement.
    fn rewrite(&mut self, rule: impl Fn(&Literal, &mut Self) -> Option<Vec<Literal>>) -> bool {
        let mut changed = false;
        let mut out = Vec::with_capacity(self.literals.len());
        let literals = std::mem::take(&mut self.literals);
        for lit in literals {
            match rule(&lit, self) {
                Some(replacement) => {
                    changed = true;
                    out.extend(replacement);
                }
                None => out.push(lit),
            }
        }
        self.literals = out;
        changed
    }

    fn round(&mut self) -> bool {
        let mut changed = false;
        // ∅ elimination
        changed |= self.pass_empty();
        // x = y ∩ z  ⇒  y' = y ∖ z ∧ x = y ∖ y'
        changed |= self.rewrite(|lit, s| match lit {
            Literal::EqInter(x, y, z) => {
                let v = s.supply.fresh();
                s.witnesses
                    .push((v.clone(), Witness::DiffOf(y.clone(), z.clone())));
                Some(vec![
                    Literal::EqDiff(Arg::var(v.clone()), y.clone(), z.clone()),
                    Literal::EqDiff(x.clone(), y.clone(), Arg::var(v)),
                ])
            }
            _ => None,
        });
        // x ⊆ y  ⇒  y = x ∪ y
        changed |= self.rewrite(|lit, _| match lit {
            Literal::Sub(x, y) => Some(vec![Literal::EqUnion(y.clone(), x.clone(), y.clone())]),
            _ => None,
        });
        // x = y  ⇒  x = y ∪ y
        changed |= self.rewrite(|lit, _| match lit {
            Literal::EqVar(x, y) => Some(vec![Literal::EqUnion(x.clone(), y.clone(), y.clone())]),
            _ => None,
        });
        // x ⊈ y  ⇒  z' = x ∖ y ∧ z' ≠ ∅
        changed |= self.rewrite(|lit, s| match lit {
            Literal::NotSub(x, y) => {
                let v = s.supply.fresh();
                s.witnesses
                    .push((v.clone(), Witness::DiffOf(x.clone(), y.clone())));
                Some(vec![
                    Literal::EqDiff(Arg::var(v.clone()), x.clone(), y.clone()),
                    Literal::Neq(Arg::var(v), Arg::Empty),
                ])
            }
            _ => None,
        });
        // x ≠ y  ⇒  x ∈ z' ∧ y ∉ z'
        changed |= self.rewrite(|lit, s| match lit {
            Literal::Neq(x, y) => {
                let v = s.supply.fresh();
                s.witnesses
                    .push((v.clone(), Witness::SingletonOf(x.clone())));
                Some(vec![
                    Literal::Mem(x.clone(), Arg::var(v.clone())),
                    Literal::NotMem(y.clone(), Arg::var(v)),
                ])
            }
            _ => None,
        });
        // x ∉ y  ⇒  x ∈ z' ∧ z' = z' ∖ y
        changed |= self.rewrite(|lit, s| match lit {
            Literal::NotMem(x, y) => {
                let v = s.supply.fresh();
                s.witnesses
                    .push((v.clone(), Witness::SingletonOf(x.clone())));
                Some(vec![
                    Literal::Mem(x.clone(), Arg::var(v.clone())),
                    Literal::EqDiff(Arg::var(v.clone()), Arg::var(v), y.clone()),
                ])
            }
            _ => None,
        });
        changed
    }
}

fn map_args(lit: Literal, f: &impl Fn(Arg) -> Arg) -> Literal {
    match lit {
        Literal::EqUnion(x, y, z) => Literal::EqUnion(f(x), f(y), f(z)),
        Literal::EqInter(x, y, z) => Literal::EqInter(f(x), f(y), f(z)),
        Literal::EqDiff(x, y, z) => Literal::EqDiff(f(x), f(y), f(z)),
        Literal::EqCross(x, y, z) => Literal::EqCross(f(x), f(y), f(z)),
        Literal::EqUCross(x, y, z) => Literal::EqUCross(f(x), f(y), f(z)),
        Literal::EqPow(x, y) => Literal::EqPow(f(x), f(y)),
        Literal::EqBigUnion(x, y) => Literal::EqBigUnion(f(x), f(y)),
        Literal::EqBigInter(x, y) => Literal::EqBigInter(f(x), f(y)),
        Literal::EqDisjUnion(x, y) => Literal::EqDisjUnion(f(x), f(y)),
        Literal::EqDisplay(x, ys) => Literal::EqDisplay(f(x), ys.into_iter().map(f).collect()),
        Literal::EqVar(x, y) => Literal::EqVar(f(x), f(y)),
        Literal::Mem(x, y) => Literal::Mem(f(x), f(y)),
        Literal::NotMem(x, y) => Literal::NotMem(f(x), f(y)),
        Literal::Sub(x, y) => Literal::Sub(f(x), f(y)),
        Literal::NotSub(x, y) => Literal::NotSub(f(x), f(y)),
        Literal::Neq(x, y) => Literal::Neq(f(x), f(y)),
    }
}

/// Applies the simplification rules in the fixed order
/// (∅-elimination, ∩, ⊆, =, ⊈, ≠, ∉) to a fixpoint.
pub fn simplify(flat: FlatConjunction, supply: &mut FreshVarSupply) -> FlatConjunction {
    let mut s = Simplifier {
        supply,
        literals: flat.literals,
        witnesses: flat.witnesses,
        empty_var: None,
    };
    // Each round consumes every offending literal it sees; rules only
    // introduce shapes handled later in the same round or by the next
    // round's ∅-elimination, so the fixpoint arrives within a few rounds.
    let mut rounds = 0;
    while s.round() {
        rounds += 1;
        assert!(rounds < 32, "simplification failed to reach a fixpoint");
    }
    FlatConjunction {
        literals: s.literals,
        witnesses: s.witnesses,
    }
}

/// The full pipeline: DNF, then per-disjunct flattening and simplification.
/// The input is satisfiable iff some output conjunction is, and models of
/// an output restrict to models of the input.
pub fn normalize_full(
    f: &Formula,
    cfg: &NormalizeConfig,
) -> Result<Vec<NormalizedConjunction>, NormalizeError> {
    if f.contains_finite_atom() {
        return Err(NormalizeError::FiniteUnsupported);
    }
    let disjuncts = to_dnf(f, cfg)?;
    let mut out = Vec::with_capacity(disjuncts.len());
    for disjunct in disjuncts {
        let mut supply = FreshVarSupply::for_formula(f);
        let flat = flatten(&disjunct, &mut supply);
        let simplified = simplify(flat, &mut supply);
        debug_assert!(
            simplified.literals.iter().all(Literal::is_normalized),
            "non-normalized literal survived simplification"
        );
        out.push(NormalizedConjunction {
            literals: simplified.literals,
            witnesses: simplified.witnesses,
            source: disjunct,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hf::{level, HfSet};
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn supply_for(formula: &Formula) -> FreshVarSupply {
        FreshVarSupply::for_formula(formula)
    }

    #[test]
    fn dnf_examples() {
        let cfg = NormalizeConfig::default();
        assert_eq!(to_dnf(&f("x = y"), &cfg).unwrap().len(), 1);
        assert_eq!(to_dnf(&f("x = y | y = z"), &cfg).unwrap().len(), 2);
        let four = to_dnf(&f("(a in b | b in c) & (c in d | d in a)"), &cfg).unwrap();
        assert_eq!(four.len(), 4);
        assert!(four.iter().all(|d| d.len() == 2));
    }

    #[test]
    fn dnf_preserves_truth_tables() {
        let caps = Caps::default();
        let cfg = NormalizeConfig::default();
        for src in [
            "x = y -> y in x",
            "!(x = y <-> y in x)",
            "!(x = y & (y in x | x in y))",
            "x sub y <-> !(y sub x)",
        ] {
            let ast = f(src);
            let disjuncts = to_dnf(&ast, &cfg).unwrap();
            let as_formula = Formula::disjoin(
                disjuncts
                    .iter()
                    .map(|d| Formula::conjoin(d.iter().map(SignedAtom::to_formula).collect()))
                    .collect(),
            );
            for a in level(2, &caps).unwrap() {
                for b in level(2, &caps).unwrap() {
                    let m = Assignment::new().with("x", a.clone()).with("y", b.clone());
                    assert_eq!(
                        eval_formula(&m, &ast, &caps),
                        eval_formula(&m, &as_formula, &caps),
                        "{src}"
                    );
                }
            }
        }
    }

    #[test]
    fn dnf_blowup_is_capped() {
        let cfg = NormalizeConfig { max_disjuncts: 8 };
        let mut big = f("a in b | b in c");
        for _ in 0..6 {
            big = Formula::and(big.clone(), f("a in b | b in c"));
        }
        assert!(matches!(
            to_dnf(&big, &cfg),
            Err(NormalizeError::SizeBlowup { limit: 8 })
        ));
    }

    #[test]
    fn flatten_names_one_subterm() {
        let ast = f("x in pow(y)");
        let disjunct = to_dnf(&ast, &NormalizeConfig::default()).unwrap().remove(0);
        let flat = flatten(&disjunct, &mut supply_for(&ast));
        assert_eq!(
            flat.literals,
            vec![
                Literal::EqPow(Arg::var("_v1"), Arg::var("y")),
                Literal::Mem(Arg::var("x"), Arg::var("_v1")),
            ]
        );
        assert_eq!(flat.witnesses.len(), 1);
    }

    #[test]
    fn flatten_is_identity_on_flat_conjunctions() {
        let ast = f("x in y & x = un(y,z) & x != y");
        let disjunct = to_dnf(&ast, &NormalizeConfig::default()).unwrap().remove(0);
        let flat = flatten(&disjunct, &mut supply_for(&ast));
        assert_eq!(flat.literals.len(), 3);
        assert!(flat.witnesses.is_empty());
    }

    #[test]
    fn flatten_counts_compound_subterms() {
        // w = T where T has 9 compound subterm occurrences; the top one is
        // absorbed into the equation, so 8 fresh variables appear.
        let ast = f("w = diff({un(x,0), pow(int(y, diff(z,{x})))}, Un(int(x,y)))");
        let disjunct = to_dnf(&ast, &NormalizeConfig::default()).unwrap().remove(0);
        let flat = flatten(&disjunct, &mut supply_for(&ast));
        assert_eq!(flat.witnesses.len(), 8);
        assert_eq!(flat.literals.len(), 9);
        for lit in &flat.literals {
            assert!(lit
                .args()
                .iter()
                .all(|a| matches!(a, Arg::Var(_) | Arg::Empty)));
        }
    }

    #[test]
    fn simplify_rule_shapes() {
        // x = y becomes x = y ∪ y
        let ast = f("x = y");
        let disjunct = to_dnf(&ast, &NormalizeConfig::default()).unwrap().remove(0);
        let mut supply = supply_for(&ast);
        let out = simplify(flatten(&disjunct, &mut supply), &mut supply);
        assert_eq!(
            out.literals,
            vec![Literal::EqUnion(
                Arg::var("x"),
                Arg::var("y"),
                Arg::var("y")
            )]
        );

        // x ⊆ y becomes y = x ∪ y
        let ast = f("x sub y");
        let disjunct = to_dnf(&ast, &NormalizeConfig::default()).unwrap().remove(0);
        let mut supply = supply_for(&ast);
        let out = simplify(flatten(&disjunct, &mut supply), &mut supply);
        assert_eq!(
            out.literals,
            vec![Literal::EqUnion(
                Arg::var("y"),
                Arg::var("x"),
                Arg::var("y")
            )]
        );

        // x ≠ y routes through the membership witness and the ∉ rule.
        let ast = f("x != y");
        let disjunct = to_dnf(&ast, &NormalizeConfig::default()).unwrap().remove(0);
        let mut supply = supply_for(&ast);
        let out = simplify(flatten(&disjunct, &mut supply), &mut supply);
        assert_eq!(
            out.literals,
            vec![
                Literal::Mem(Arg::var("x"), Arg::var("_v1")),
                Literal::Mem(Arg::var("y"), Arg::var("_v2")),
                Literal::EqDiff(Arg::var("_v2"), Arg::var("_v2"), Arg::var("_v1")),
            ]
        );
    }

    #[test]
    fn normalized_output_has_no_banned_shapes() {
        for src in [
            "x = 0",
            "0 in x",
            "x != y",
            "x nsub y",
            "x = int(y,z)",
            "x sub y & y != z",
            "x = int(un(y,0), diff(z,y)) | !(x in pow(y))",
            "x = {y,z} & z notin dun(y)",
        ] {
            let ast = f(src);
            for conj in normalize_full(&ast, &NormalizeConfig::default()).unwrap() {
                for lit in conj.literals() {
                    assert!(lit.is_normalized(), "{src}: {lit}");
                }
            }
        }
    }

    #[test]
    fn finite_is_unsupported() {
        assert_eq!(
            normalize_full(&f("Finite(x)"), &NormalizeConfig::default()),
            Err(NormalizeError::FiniteUnsupported)
        );
    }

    #[test]
    fn witnesses_extend_models() {
        let caps = Caps::default();
        let cfg = NormalizeConfig::default();
        // Every model of the source found over V_2 assignments extends to a
        // model of the normalized conjunction via the recorded witnesses.
        for src in [
            "x != y",
            "x sub y & y nsub x",
            "x = int(y, un(x,y))",
            "x = pow(int(x,y)) | 0 in y",
            "x notin y & y notin x",
            "x = {y,y}",
        ] {
            let ast = f(src);
            let outputs = normalize_full(&ast, &cfg).unwrap();
            let v2 = level(2, &caps).unwrap();
            let mut models_seen = 0;
            for a in &v2 {
                for b in &v2 {
                    let m = Assignment::new().with("x", a.clone()).with("y", b.clone());
                    if eval_formula(&m, &ast, &caps) != Ok(true) {
                        continue;
                    }
                    models_seen += 1;
                    let (conj, ext) = outputs
                        .iter()
                        .find_map(|conj| {
                            conj.extend_model(&m, &caps)
                                .ok()
                                .flatten()
                                .map(|ext| (conj, ext))
                        })
                        .unwrap_or_else(|| panic!("{src}: no disjunct accepts {m}"));
                    assert_eq!(
                        eval_formula(&ext, &conj.to_formula(), &caps),
                        Ok(true),
                        "{src}: witness extension fails under {m}"
                    );
                }
            }
            assert!(models_seen > 0, "{src}: test corpus never satisfied this");
        }
    }

    #[test]
    fn unsatisfiable_disequality_stays_unsatisfiable() {
        // x ≠ x normalizes to memberships into disjoint witnesses; no
        // assignment over a small universe satisfies the output.
        let caps = Caps::default();
        let ast = f("x != x");
        let outputs = normalize_full(&ast, &NormalizeConfig::default()).unwrap();
        assert_eq!(outputs.len(), 1);
        let conj = &outputs[0];
        let formula = conj.to_formula();
        let vars: Vec<_> = conj.vars().into_iter().collect();
        let v2 = level(2, &caps).unwrap();
        let mut grid = vec![0usize; vars.len()];
        'outer: loop {
            let m: Assignment = vars
                .iter()
                .cloned()
                .zip(grid.iter().map(|i| v2[*i].clone()))
                .collect();
            assert_ne!(eval_formula(&m, &formula, &caps), Ok(true), "model: {m}");
            for d in 0..vars.len() {
                grid[d] += 1;
                if grid[d] < v2.len() {
                    continue 'outer;
                }
                grid[d] = 0;
            }
            break;
        }
    }

    #[test]
    fn fresh_variables_do_not_leak_between_applications() {
        let ast = f("x != y & y != z & x nsub z");
        let outputs = normalize_full(&ast, &NormalizeConfig::default()).unwrap();
        for conj in outputs {
            let mut seen = BTreeSet::new();
            for (v, _) in conj.witnesses() {
                assert!(seen.insert(v.clone()), "fresh variable {v} reused");
            }
        }
    }

    #[test]
    fn fresh_supply_avoids_user_names() {
        let ast = f("_v1 != _v2");
        let outputs = normalize_full(&ast, &NormalizeConfig::default()).unwrap();
        for conj in &outputs {
            for (v, _) in conj.witnesses() {
                assert!(v != "_v1" && v != "_v2");
            }
        }
        // The empty-set stand-in appears when ∅ is eliminated.
        let ast = f("x = 0");
        let outputs = normalize_full(&ast, &NormalizeConfig::default()).unwrap();
        let conj = &outputs[0];
        assert!(conj.witnesses().iter().any(|(_, w)| *w == Witness::Empty));
        let m = Assignment::new().with("x", HfSet::empty());
        let ext = conj.extend_model(&m, &Caps::default()).unwrap().unwrap();
        assert_eq!(
            eval_formula(&ext, &conj.to_formula(), &Caps::default()),
            Ok(true)
        );
    }
}
