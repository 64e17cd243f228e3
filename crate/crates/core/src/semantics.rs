//! Set assignments and evaluation of terms and formulas, plus the rank
//! instrumentation used by the rank-divergence probes.
//!
//! Evaluation is strict in errors: an atom whose term evaluation raises
//! `⋂∅` (or blows a cap) makes the whole evaluation an error rather than
//! `false`. The solver counts such candidates as non-models.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::hf::{Caps, HfError, HfSet, Rank};
use crate::syntax::{Atom, Formula, Term, VarName};

/// A finite map from variable names to set values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    map: BTreeMap<VarName, HfSet>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn bind(&mut self, var: impl Into<String>, value: HfSet) -> Option<HfSet> {
        self.map.insert(var.into(), value)
    }

    pub fn with(mut self, var: impl Into<String>, value: HfSet) -> Assignment {
        self.bind(var, value);
        self
    }

    pub fn get(&self, var: &str) -> Option<&HfSet> {
        self.map.get(var)
    }

    pub fn domain(&self) -> impl Iterator<Item = &VarName> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarName, &HfSet)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Restriction to the given variables; variables absent from the
    /// assignment are skipped.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a VarName>) -> Assignment {
        let mut out = Assignment::new();
        for v in vars {
            if let Some(val) = self.map.get(v) {
                out.bind(v.clone(), val.clone());
            }
        }
        out
    }

    /// Merge with another assignment; bindings of `other` win on clashes.
    pub fn extend_with(&mut self, other: &Assignment) {
        for (k, v) in other.iter() {
            self.bind(k.clone(), v.clone());
        }
    }

    /// Serializes as a JSON object mapping variable names to canonical
    /// brace strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.map
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.to_string())))
                .collect(),
        )
    }

    /// Parses the JSON object form.
    pub fn from_json(value: &serde_json::Value) -> Result<Assignment, String> {
        let obj = value.as_object().ok_or("expected a JSON object")?;
        let mut out = Assignment::new();
        for (k, v) in obj {
            let s = v
                .as_str()
                .ok_or_else(|| format!("value of `{k}` is not a string"))?;
            let set: HfSet = s.parse().map_err(|e| format!("value of `{k}`: {e}"))?;
            out.bind(k.clone(), set);
        }
        Ok(out)
    }
}

impl FromIterator<(VarName, HfSet)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (VarName, HfSet)>>(iter: T) -> Assignment {
        Assignment {
            map: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} -> {v}")?;
        }
        f.write_str("}")
    }
}

/// Errors raised by evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(VarName),
    #[error(transparent)]
    Hf(#[from] HfError),
}

/// Variable environments evaluation can read from. The solver brings its
/// own slice-backed environment; everyone else uses [`Assignment`].
pub trait Lookup {
    fn lookup(&self, name: &str) -> Option<&HfSet>;
}

impl Lookup for Assignment {
    fn lookup(&self, name: &str) -> Option<&HfSet> {
        self.get(name)
    }
}

/// Evaluates a term in any environment.
pub fn eval_term_in<L: Lookup + ?Sized>(
    m: &L,
    t: &Term,
    caps: &Caps,
) -> Result<HfSet, EvalError> {
    match t {
        Term::Var(v) => m
            .lookup(v)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        Term::Empty => Ok(HfSet::empty()),
        Term::Union(a, b) => Ok(eval_term_in(m, a, caps)?.union(&eval_term_in(m, b, caps)?)),
        Term::Inter(a, b) => Ok(eval_term_in(m, a, caps)?.inter(&eval_term_in(m, b, caps)?)),
        Term::Diff(a, b) => Ok(eval_term_in(m, a, caps)?.diff(&eval_term_in(m, b, caps)?)),
        Term::Cross(a, b) => {
            Ok(eval_term_in(m, a, caps)?.cart_prod(&eval_term_in(m, b, caps)?, caps)?)
        }
        Term::UCross(a, b) => {
            Ok(eval_term_in(m, a, caps)?.unord_prod(&eval_term_in(m, b, caps)?, caps)?)
        }
        Term::Pow(t) => Ok(eval_term_in(m, t, caps)?.powerset(caps)?),
        Term::BigUnion(t) => Ok(eval_term_in(m, t, caps)?.big_union()),
        Term::BigInter(t) => Ok(eval_term_in(m, t, caps)?.big_inter()?),
        Term::DisjUnion(t) => Ok(eval_term_in(m, t, caps)?.disj_union()),
        Term::Display(ts) => {
            let elems = ts
                .iter()
                .map(|t| eval_term_in(m, t, caps))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(HfSet::canonicalize(elems))
        }
    }
}

/// Evaluates a term under an assignment.
pub fn eval_term(m: &Assignment, t: &Term, caps: &Caps) -> Result<HfSet, EvalError> {
    eval_term_in(m, t, caps)
}

fn eval_atom_in<L: Lookup + ?Sized>(m: &L, a: &Atom, caps: &Caps) -> Result<bool, EvalError> {
    match a {
        Atom::Mem(s, t) => Ok(eval_term_in(m, t, caps)?.contains(&eval_term_in(m, s, caps)?)),
        Atom::Eq(s, t) => Ok(eval_term_in(m, s, caps)? == eval_term_in(m, t, caps)?),
        Atom::Sub(s, t) => Ok(eval_term_in(m, s, caps)?.subset_of(&eval_term_in(m, t, caps)?)),
        // The universe is HF, so every value is finite. The predicate still
        // matters syntactically.
        Atom::Finite(t) => {
            eval_term_in(m, t, caps)?;
            Ok(true)
        }
    }
}

/// Evaluates a formula in any environment. All atoms are evaluated; an
/// error anywhere poisons the result.
pub fn eval_formula_in<L: Lookup + ?Sized>(
    m: &L,
    f: &Formula,
    caps: &Caps,
) -> Result<bool, EvalError> {
    match f {
        Formula::Atom(a) => eval_atom_in(m, a, caps),
        Formula::Not(g) => Ok(!eval_formula_in(m, g, caps)?),
        Formula::And(a, b) => {
            let va = eval_formula_in(m, a, caps)?;
            let vb = eval_formula_in(m, b, caps)?;
            Ok(va && vb)
        }
        Formula::Or(a, b) => {
            let va = eval_formula_in(m, a, caps)?;
            let vb = eval_formula_in(m, b, caps)?;
            Ok(va || vb)
        }
        Formula::Implies(a, b) => {
            let va = eval_formula_in(m, a, caps)?;
            let vb = eval_formula_in(m, b, caps)?;
            Ok(!va || vb)
        }
        Formula::Iff(a, b) => {
            let va = eval_formula_in(m, a, caps)?;
            let vb = eval_formula_in(m, b, caps)?;
            Ok(va == vb)
        }
    }
}

/// Evaluates a formula under an assignment.
pub fn eval_formula(m: &Assignment, f: &Formula, caps: &Caps) -> Result<bool, EvalError> {
    eval_formula_in(m, f, caps)
}

/// `rk(⋃ { Mx | x ∈ vars(f) })`: the rank of the union of the values the
/// formula's variables take. Equals the maximum value rank when the domain
/// is finite.
pub fn dom_rank(m: &Assignment, f: &Formula) -> Result<Rank, EvalError> {
    let mut union = HfSet::empty();
    for v in f.vars() {
        let val = m
            .get(&v)
            .ok_or_else(|| EvalError::UnboundVariable(v.clone()))?;
        union = union.union(val);
    }
    Ok(union.rank())
}

/// The sorted, deduplicated variable-value ranks `{ rk(Mx) | x ∈ vars(f) }`.
pub fn rank_set(m: &Assignment, f: &Formula) -> Result<Vec<Rank>, EvalError> {
    let mut ranks: Vec<Rank> = Vec::new();
    for v in f.vars() {
        let val = m
            .get(&v)
            .ok_or_else(|| EvalError::UnboundVariable(v.clone()))?;
        ranks.push(val.rank());
    }
    ranks.sort_unstable();
    ranks.dedup();
    Ok(ranks)
}

/// True iff `{ rk(Mx) | x ∈ vars(f) }` is an ordinal, i.e. an initial
/// segment `{0, 1, …, n}` of the naturals (vacuously true with no
/// variables).
pub fn ordinal_condition(m: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    let ranks = rank_set(m, f)?;
    Ok(ranks.iter().enumerate().all(|(i, r)| *r as usize == i))
}

/// Rank of the set `{ Mx | x ∈ vars(f) }` of values themselves. When the
/// ordinal condition holds this equals the number of distinct value ranks.
pub fn value_set_rank(m: &Assignment, f: &Formula) -> Result<Rank, EvalError> {
    let mut values = Vec::new();
    for v in f.vars() {
        let val = m
            .get(&v)
            .ok_or_else(|| EvalError::UnboundVariable(v.clone()))?;
        values.push(val.clone());
    }
    Ok(HfSet::canonicalize(values).rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hf::chain;
    use crate::syntax::parse_formula;

    fn caps() -> Caps {
        Caps::default()
    }

    fn hf(s: &str) -> HfSet {
        s.parse().unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn rhs_term(formula: &Formula) -> Term {
        match formula {
            Formula::Atom(Atom::Eq(_, t)) => t.clone(),
            _ => panic!("expected an equation"),
        }
    }

    #[test]
    fn eval_term_examples() {
        let m = Assignment::new().with("x", hf("{{}}"));
        let t = rhs_term(&f("y = pow(x)"));
        assert_eq!(eval_term(&m, &t, &caps()).unwrap(), hf("{{},{{}}}"));

        let m2 = Assignment::new()
            .with("x", HfSet::empty())
            .with("y", HfSet::empty());
        let t = rhs_term(&f("z = {x,y}"));
        assert_eq!(eval_term(&m2, &t, &caps()).unwrap(), hf("{{}}"));
    }

    #[test]
    fn big_inter_of_empty_errors() {
        let m = Assignment::new().with("x", HfSet::empty());
        assert_eq!(
            eval_formula(&m, &f("In(0) = x"), &caps()),
            Err(EvalError::Hf(HfError::EmptyIntersection))
        );
        // ... and the error wins even when a sibling conjunct is false.
        assert!(eval_formula(&m, &f("x != x & In(0) = x"), &caps()).is_err());
    }

    #[test]
    fn unbound_variable_errors() {
        let m = Assignment::new();
        assert_eq!(
            eval_formula(&m, &f("x = 0"), &caps()),
            Err(EvalError::UnboundVariable("x".into()))
        );
    }

    #[test]
    fn eval_formula_examples() {
        let m = Assignment::new();
        assert_eq!(eval_formula(&m, &f("0 = 0"), &caps()), Ok(true));
        for h in crate::hf::level(3, &caps()).unwrap() {
            let m = Assignment::new().with("x", h);
            assert_eq!(eval_formula(&m, &f("Finite(x)"), &caps()), Ok(true));
        }
    }

    #[test]
    fn divergence_formula_base_instance() {
        // z = {∅} ⊗ ({∅} ∪ y) ∧ y ⊊ z with y = ∅ and z = {a_0}.
        let phi = f("z = ucross({0}, un({0}, y)) & y sub z & !(y = z)");
        let m = Assignment::new()
            .with("y", HfSet::empty())
            .with("z", hf("{{{}}}"));
        assert_eq!(eval_formula(&m, &phi, &caps()), Ok(true));
    }

    #[test]
    fn dom_rank_examples() {
        let phi = f("y sub z");
        let m0 = Assignment::new()
            .with("y", HfSet::empty())
            .with("z", HfSet::empty());
        assert_eq!(dom_rank(&m0, &phi), Ok(0));

        let a = chain(1);
        let m = Assignment::new()
            .with("y", HfSet::canonicalize(vec![a[0].clone()]))
            .with("z", HfSet::canonicalize(a.clone()));
        assert_eq!(dom_rank(&m, &phi), Ok(3));
        // equals the max value rank
        let max = m.iter().map(|(_, v)| v.rank()).max().unwrap();
        assert_eq!(dom_rank(&m, &phi), Ok(max));
    }

    #[test]
    fn ordinal_condition_examples() {
        let phi = f("x = x & y = y & z = z");
        let m = |rx: &str, ry: &str, rz: &str| {
            Assignment::new()
                .with("x", hf(rx))
                .with("y", hf(ry))
                .with("z", hf(rz))
        };
        // ranks {0,1,2}
        assert_eq!(
            ordinal_condition(&m("{}", "{{}}", "{{{}}}"), &phi),
            Ok(true)
        );
        // ranks {0,2}
        assert_eq!(
            ordinal_condition(&m("{}", "{}", "{{{}}}"), &phi),
            Ok(false)
        );
        // ranks {1}
        assert_eq!(
            ordinal_condition(&m("{{}}", "{{}}", "{{}}"), &phi),
            Ok(false)
        );
    }

    #[test]
    fn ordinal_condition_matches_value_set_rank() {
        // Whenever the rank set is an ordinal, the rank of the value set
        // equals the number of distinct value ranks.
        let phi = f("x = x & y = y");
        let caps = caps();
        for a in crate::hf::level(3, &caps).unwrap() {
            for b in crate::hf::level(3, &caps).unwrap() {
                let m = Assignment::new().with("x", a.clone()).with("y", b.clone());
                if ordinal_condition(&m, &phi).unwrap() {
                    let ranks = rank_set(&m, &phi).unwrap();
                    assert_eq!(value_set_rank(&m, &phi).unwrap() as usize, ranks.len());
                }
            }
        }
    }

    #[test]
    fn evaluation_invariant_under_print_parse() {
        use crate::syntax::print_formula;
        let src = "x in pow(un(y,{y})) & !(y = In({x,y}))";
        let ast = f(src);
        let reparsed = parse_formula(&print_formula(&ast)).unwrap();
        for a in crate::hf::level(2, &caps()).unwrap() {
            for b in crate::hf::level(2, &caps()).unwrap() {
                let m = Assignment::new().with("x", a.clone()).with("y", b.clone());
                assert_eq!(
                    eval_formula(&m, &ast, &caps()),
                    eval_formula(&m, &reparsed, &caps())
                );
            }
        }
    }

    #[test]
    fn assignment_json_roundtrip() {
        let m = Assignment::new()
            .with("x", hf("{{}}"))
            .with("y'", hf("{{},{{}}}"));
        let json = m.to_json();
        assert_eq!(Assignment::from_json(&json).unwrap(), m);
        assert_eq!(json["x"], serde_json::json!("{{}}"));
    }
}
