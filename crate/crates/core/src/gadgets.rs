//! Constructors for representing formulas and encoding gadgets, each
//! paired with the semantic property it claims, in a uniform shape the
//! verify module can audit.
//!
//! Strict inclusions and disequalities inside gadget formulas are expanded
//! through the normalization rules, so the output stays within the
//! fragment the construction targets.

use std::sync::Arc;

use crate::hf::{chain, Caps, HfError, HfSet};
use crate::normalize::{simplify, FlatConjunction, FreshVarSupply};
use crate::semantics::{Assignment, EvalError};
use crate::syntax::{Arg, Atom, Formula, Literal, Term, VarName};

/// How sub-expressions outside the target fragment are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetMode {
    /// Singleton sub-expressions are spelled out with the product-based
    /// singleton construction, keeping the formula inside the fragment.
    Literal,
    /// Singleton sub-expressions use set displays, evaluated directly.
    Semantic,
}

type Property = Arc<dyn Fn(&Assignment, &Caps) -> Result<bool, EvalError> + Send + Sync>;

/// A named formula constructor plus the semantic property it claims.
#[derive(Clone)]
pub struct GadgetSpec {
    pub name: String,
    pub formula: Formula,
    /// Role → variable name, e.g. `("x", "x")` or `("value", "v_3")`.
    pub interface_vars: Vec<(String, VarName)>,
    /// Machine-readable identifier of the claimed property.
    pub property_name: String,
    /// Plain-language statement of what the property checks.
    pub note: String,
    property: Property,
}

impl std::fmt::Debug for GadgetSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GadgetSpec")
            .field("name", &self.name)
            .field("formula", &self.formula.to_string())
            .field("interface_vars", &self.interface_vars)
            .field("property_name", &self.property_name)
            .finish()
    }
}

impl GadgetSpec {
    /// Evaluates the claimed property on an assignment covering the
    /// interface variables.
    pub fn check_property(&self, m: &Assignment, caps: &Caps) -> Result<bool, EvalError> {
        (self.property)(m, caps)
    }

    pub fn interface_var(&self, role: &str) -> Option<&VarName> {
        self.interface_vars
            .iter()
            .find(|(r, _)| r == role)
            .map(|(_, v)| v)
    }

    /// Sidecar description emitted next to the formula file by the CLI.
    pub fn sidecar_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "interface_vars": self.interface_vars
                .iter()
                .map(|(r, v)| (r.clone(), serde_json::Value::String(v.clone())))
                .collect::<serde_json::Map<_, _>>(),
            "claimed_property": self.property_name,
            "note": self.note,
        })
    }
}

fn var(name: &str) -> Term {
    Term::Var(name.to_string())
}

fn atom_eq(a: Term, b: Term) -> Formula {
    Formula::Atom(Atom::Eq(a, b))
}

fn atom_mem(a: Term, b: Term) -> Formula {
    Formula::Atom(Atom::Mem(a, b))
}

fn union_chain(mut terms: Vec<Term>) -> Term {
    let mut acc = terms.remove(0);
    for t in terms {
        acc = Term::Union(Box::new(acc), Box::new(t));
    }
    acc
}

fn get_value<'m>(m: &'m Assignment, v: &str) -> Result<&'m HfSet, EvalError> {
    m.get(v).ok_or_else(|| EvalError::UnboundVariable(v.to_string()))
}

/// Expands `a ⊊ b` (or `a ≠ b` when `strict` is false… see
/// [`neq_literals`]) through the simplification rules, returning flat
/// literals over `a`, `b`, and fresh variables from the supply.
fn strict_subset_literals(a: &str, b: &str, supply: &mut FreshVarSupply) -> Vec<Literal> {
    let flat = FlatConjunction {
        literals: vec![
            Literal::Sub(Arg::var(a), Arg::var(b)),
            Literal::Neq(Arg::var(a), Arg::var(b)),
        ],
        witnesses: Vec::new(),
    };
    simplify(flat, supply).literals
}

/// Expands `a ≠ b` through the simplification rules.
fn neq_literals(a: &str, b: &str, supply: &mut FreshVarSupply) -> Vec<Literal> {
    let flat = FlatConjunction {
        literals: vec![Literal::Neq(Arg::var(a), Arg::var(b))],
        witnesses: Vec::new(),
    };
    simplify(flat, supply).literals
}

fn supply_reserving(names: &[&str]) -> FreshVarSupply {
    FreshVarSupply::new(names.iter().map(|s| s.to_string()).collect())
}

// ---------------------------------------------------------------------------
// Representing formulas
// ---------------------------------------------------------------------------

const CLOSURE_CAP: usize = 64;

/// The index closure of `h`: `h`, its elements, its proper subsets, and
/// recursively theirs, in ascending Ackermann order.
fn index_closure(h: &HfSet, caps: &Caps) -> Result<Vec<HfSet>, HfError> {
    let mut seen: Vec<HfSet> = Vec::new();
    let mut stack = vec![h.clone()];
    while let Some(g) = stack.pop() {
        if seen.contains(&g) {
            continue;
        }
        for elem in g.iter() {
            stack.push(elem.clone());
        }
        for subset in g.powerset(caps)?.iter() {
            if *subset != g {
                stack.push(subset.clone());
            }
        }
        seen.push(g);
        if seen.len() > CLOSURE_CAP {
            return Err(HfError::CapExceeded {
                op: "repr_formula closure",
                limit: CLOSURE_CAP as u64,
                actual: seen.len() as u64,
            });
        }
    }
    seen.sort();
    Ok(seen)
}

fn repr_var(g: &HfSet, caps: &Caps) -> String {
    // Indices have tiny Ackermann codes under the rank-2 cap.
    format!("x_{}", g.ack_code(caps).expect("index rank under cap"))
}

/// One defining equation per index: `x_∅ = 𝒫(x_∅ ∖ x_∅)` for the empty
/// set, else `x_g = 𝒫(⋃ elements) ∖ ⋃ proper subsets`.
fn repr_definition(g: &HfSet, caps: &Caps) -> Result<Formula, HfError> {
    let xg = var(&repr_var(g, caps));
    if g.is_empty() {
        let diff = Term::Diff(Box::new(xg.clone()), Box::new(xg.clone()));
        return Ok(atom_eq(xg, Term::Pow(Box::new(diff))));
    }
    let element_vars: Vec<Term> = g.iter().map(|e| var(&repr_var(e, caps))).collect();
    let mut subset_vars: Vec<Term> = Vec::new();
    for s in g.powerset(caps)?.iter() {
        if s != g {
            subset_vars.push(var(&repr_var(s, caps)));
        }
    }
    let rhs = Term::Diff(
        Box::new(Term::Pow(Box::new(union_chain(element_vars)))),
        Box::new(union_chain(subset_vars)),
    );
    Ok(atom_eq(xg, rhs))
}

/// The representing formula for `{h}`: a conjunction of one defining
/// equation per closure index, in ascending Ackermann order (each index
/// appearing once). Every model maps the variable for `h` to `{h}`.
pub fn repr_formula(h: &HfSet, caps: &Caps) -> Result<GadgetSpec, HfError> {
    if h.rank() > 2 {
        return Err(HfError::CapExceeded {
            op: "repr_formula",
            limit: 2,
            actual: h.rank() as u64,
        });
    }
    let closure = index_closure(h, caps)?;
    let defs = closure
        .iter()
        .map(|g| repr_definition(g, caps))
        .collect::<Result<Vec<_>, _>>()?;
    let target = h.clone();
    let xh = repr_var(h, caps);
    let xh_prop = xh.clone();
    Ok(GadgetSpec {
        name: format!("repr-formula({h})"),
        formula: Formula::conjoin(defs),
        interface_vars: vec![("x".into(), xh)],
        property_name: "var-denotes-singleton".into(),
        note: format!("every model assigns the interface variable the value {{{target}}}"),
        property: Arc::new(move |m, _caps| {
            Ok(*get_value(m, &xh_prop)? == target.singleton())
        }),
    })
}

/// A formula whose models assign `h` itself to the value variable:
/// `x_∅ = x_∅ ∖ x_∅` for the empty set, else the union of the singleton
/// variables of the elements, conjoined with their defining equations.
pub fn hf_value_formula(h: &HfSet, caps: &Caps) -> Result<GadgetSpec, HfError> {
    if h.rank() > 2 {
        return Err(HfError::CapExceeded {
            op: "hf_value_formula",
            limit: 2,
            actual: h.rank() as u64,
        });
    }
    let target = h.clone();
    if h.is_empty() {
        let x = var("x_0");
        let formula = atom_eq(
            x.clone(),
            Term::Diff(Box::new(x.clone()), Box::new(x)),
        );
        return Ok(GadgetSpec {
            name: "hf-value({})".into(),
            formula,
            interface_vars: vec![("value".into(), "x_0".into())],
            property_name: "var-denotes-value".into(),
            note: "every model assigns the interface variable the empty set".into(),
            property: Arc::new(move |m, _caps| Ok(*get_value(m, "x_0")? == target)),
        });
    }
    let mut closure: Vec<HfSet> = Vec::new();
    for elem in h.iter() {
        for g in index_closure(elem, caps)? {
            if !closure.contains(&g) {
                closure.push(g);
            }
        }
    }
    closure.sort();
    let value_var = format!("v_{}", h.ack_code(caps).expect("rank under cap"));
    let element_vars: Vec<Term> = h.iter().map(|e| var(&repr_var(e, caps))).collect();
    let mut parts = vec![atom_eq(var(&value_var), union_chain(element_vars))];
    for g in &closure {
        parts.push(repr_definition(g, caps)?);
    }
    let vv = value_var.clone();
    Ok(GadgetSpec {
        name: format!("hf-value({h})"),
        formula: Formula::conjoin(parts),
        interface_vars: vec![("value".into(), value_var)],
        property_name: "var-denotes-value".into(),
        note: format!("every model assigns the interface variable the value {target}"),
        property: Arc::new(move |m, _caps| Ok(*get_value(m, &vv)? == target)),
    })
}

// ---------------------------------------------------------------------------
// The P* expression
// ---------------------------------------------------------------------------

/// `x = 𝒫(𝒮) ∖ (𝒫(𝒮∖y_1) ∪ … ∪ 𝒫(𝒮∖y_k))` with `𝒮 = y_1 ∪ … ∪ y_k`,
/// claiming that the right-hand side computes the subsets of the union
/// meeting every argument. Arity at most 3.
pub fn powast_expression(result: &str, args: &[&str]) -> GadgetSpec {
    assert!(args.len() <= 3, "powast expression arity is capped at 3");
    let rhs = if args.is_empty() {
        Term::Pow(Box::new(Term::Empty))
    } else {
        let carrier = || union_chain(args.iter().map(|a| var(a)).collect());
        let removed: Vec<Term> = args
            .iter()
            .map(|a| {
                Term::Pow(Box::new(Term::Diff(
                    Box::new(carrier()),
                    Box::new(var(a)),
                )))
            })
            .collect();
        Term::Diff(
            Box::new(Term::Pow(Box::new(carrier()))),
            Box::new(union_chain(removed)),
        )
    };
    let formula = atom_eq(var(result), rhs);
    let result_name = result.to_string();
    let arg_names: Vec<String> = args.iter().map(|a| a.to_string()).collect();
    let mut interface_vars = vec![("x".to_string(), result_name.clone())];
    for (i, a) in arg_names.iter().enumerate() {
        interface_vars.push((format!("y{}", i + 1), a.clone()));
    }
    GadgetSpec {
        name: format!("powast-expression(arity {})", arg_names.len()),
        formula,
        interface_vars,
        property_name: "matches-powast-operator".into(),
        note: "the result variable equals the subsets of the union of the arguments \
               that meet every argument"
            .into(),
        property: Arc::new(move |m, caps| {
            let out = get_value(m, &result_name)?;
            let values = arg_names
                .iter()
                .map(|a| get_value(m, a).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(*out == HfSet::powast(&values, caps)?)
        }),
    }
}

// ---------------------------------------------------------------------------
// Singleton constructions
// ---------------------------------------------------------------------------

/// The closed-form extension forced by the membership-chain singleton
/// construction: `(x', y', w, z)` values for a given `Mx`.
pub fn tower_extension(mx: &HfSet, caps: &Caps) -> Result<[HfSet; 4], HfError> {
    let sx = mx.singleton();
    let y = HfSet::canonicalize(vec![mx.clone(), sx.clone()]);
    let w = HfSet::kpair(mx, &sx);
    let z = y.cart_prod(&y, caps)?;
    Ok([sx, y, w, z])
}

/// The membership-chain singleton construction
/// `x ∈ x' ∈ w ∈ z = y' × y'` and `x' ∈ y' ∈ w`: for every value of `x`
/// there is exactly one extension over `x', y', w, z`, and it has
/// `x' = {x}`, `y' = {x, {x}}`, `w = (x, {x})`, `z = y' × y'`.
pub fn singleton_tower(x: &str) -> GadgetSpec {
    let xp = format!("{x}'");
    let yp = "y'".to_string();
    let w = "w".to_string();
    let z = "z".to_string();
    for fresh in [&xp, &yp, &w, &z] {
        assert_ne!(fresh, x, "auxiliary names must not collide with `{x}`");
    }
    let parts = vec![
        atom_mem(var(x), var(&xp)),
        atom_mem(var(&xp), var(&w)),
        atom_mem(var(&w), var(&z)),
        atom_eq(
            var(&z),
            Term::Cross(Box::new(var(&yp)), Box::new(var(&yp))),
        ),
        atom_mem(var(&xp), var(&yp)),
        atom_mem(var(&yp), var(&w)),
    ];
    let (xn, xpn, ypn, wn, zn) = (
        x.to_string(),
        xp.clone(),
        yp.clone(),
        w.clone(),
        z.clone(),
    );
    GadgetSpec {
        name: "singleton-tower".into(),
        formula: Formula::conjoin(parts),
        interface_vars: vec![
            ("x".into(), x.to_string()),
            ("x'".into(), xp),
            ("y'".into(), yp),
            ("w".into(), w),
            ("z".into(), z),
        ],
        property_name: "unique-singleton-extension".into(),
        note: "the auxiliary variables are forced to the singleton, the pair base, \
               the ordered pair, and the square of the pair base"
            .into(),
        property: Arc::new(move |m, caps| {
            let mx = get_value(m, &xn)?;
            let expected = tower_extension(mx, caps)?;
            Ok(*get_value(m, &xpn)? == expected[0]
                && *get_value(m, &ypn)? == expected[1]
                && *get_value(m, &wn)? == expected[2]
                && *get_value(m, &zn)? == expected[3])
        }),
    }
}

/// The product kind used by the compact singleton gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairProduct {
    Ordered,
    Unordered,
}

/// The compact singleton gadget: `x, x' ∈ y'`, `x' ≠ x`,
/// `y' ∈ y' ∘ y'` (`∘` ordered or unordered), `x ∈ y ⊊ y'`, with `≠` and
/// `⊊` expanded through the simplification rules. Claims `My = {Mx}`.
///
/// The ordered variant is kept verbatim for auditing: over well-founded
/// sets `y' ∈ y' × y'` requires a member of `y'` to contain itself, so the
/// audit is expected to find no models. The unordered variant only pins
/// `|y'| ≤ 2` and does express the singleton.
pub fn singleton_compact_gadget(x: &str, y: &str, product: PairProduct) -> GadgetSpec {
    let xp = format!("{x}'");
    let yp = format!("{y}'");
    let mut supply = supply_reserving(&[x, y, &xp, &yp]);
    let mut parts = vec![atom_mem(var(x), var(&yp)), atom_mem(var(&xp), var(&yp))];
    parts.extend(
        neq_literals(&xp, x, &mut supply)
            .iter()
            .map(Literal::to_formula),
    );
    let square = match product {
        PairProduct::Ordered => Term::Cross(Box::new(var(&yp)), Box::new(var(&yp))),
        PairProduct::Unordered => Term::UCross(Box::new(var(&yp)), Box::new(var(&yp))),
    };
    parts.push(atom_mem(var(&yp), square));
    parts.push(atom_mem(var(x), var(y)));
    parts.extend(
        strict_subset_literals(y, &yp, &mut supply)
            .iter()
            .map(Literal::to_formula),
    );
    let (xn, yn) = (x.to_string(), y.to_string());
    GadgetSpec {
        name: match product {
            PairProduct::Ordered => "singleton-compact".into(),
            PairProduct::Unordered => "singleton-compact-unordered".into(),
        },
        formula: Formula::conjoin(parts),
        interface_vars: vec![
            ("x".into(), x.to_string()),
            ("y".into(), y.to_string()),
            ("x'".into(), xp),
            ("y'".into(), yp),
        ],
        property_name: "y-is-singleton-of-x".into(),
        note: "every model assigns y the singleton of x".into(),
        property: Arc::new(move |m, _caps| {
            Ok(*get_value(m, &yn)? == get_value(m, &xn)?.singleton())
        }),
    }
}

// ---------------------------------------------------------------------------
// Cardinality and finiteness gadgets
// ---------------------------------------------------------------------------

/// Builds the term standing for `{x}` according to the mode; in literal
/// mode the singleton variable is constrained by extra conjuncts.
fn singleton_of(
    x: &str,
    mode: GadgetMode,
    supply: &mut FreshVarSupply,
    extra: &mut Vec<Formula>,
) -> Term {
    match mode {
        GadgetMode::Semantic => Term::Display(vec![var(x)]),
        GadgetMode::Literal => {
            let s = supply.fresh();
            let helper = singleton_compact_into(x, &s, supply);
            extra.extend(helper);
            var(&s)
        }
    }
}

/// The unordered-product singleton conjuncts binding `s = {x}`, drawing
/// auxiliary names from the supply.
fn singleton_compact_into(x: &str, s: &str, supply: &mut FreshVarSupply) -> Vec<Formula> {
    let xp = supply.fresh();
    let yp = supply.fresh();
    let mut parts = vec![atom_mem(var(x), var(&yp)), atom_mem(var(&xp), var(&yp))];
    parts.extend(neq_literals(&xp, x, supply).iter().map(Literal::to_formula));
    parts.push(atom_mem(
        var(&yp),
        Term::UCross(Box::new(var(&yp)), Box::new(var(&yp))),
    ));
    parts.push(atom_mem(var(x), var(s)));
    parts.extend(
        strict_subset_literals(s, &yp, supply)
            .iter()
            .map(Literal::to_formula),
    );
    parts
}

/// The cardinality-transfer gadget `C(x, y, y', z)`:
/// `y' = {x} ⊗ y`, `z ⊆ x ⊗ y'`, `⊎z = x ∪ y'`. Every model has
/// `|Mx| = |My|` (with `Mx ∩ My' = ∅` and `|My| = |My'|` along the way).
pub fn card_eq_gadget(x: &str, y: &str, mode: GadgetMode) -> GadgetSpec {
    let yp = format!("{y}'");
    let z = "z".to_string();
    for fresh in [&yp, &z] {
        assert!(
            fresh != x && fresh != y,
            "auxiliary names must not collide with `{x}`/`{y}`"
        );
    }
    let mut supply = supply_reserving(&[x, y, &yp, &z]);
    let mut extra = Vec::new();
    let singleton_x = singleton_of(x, mode, &mut supply, &mut extra);
    let mut parts = vec![atom_eq(
        var(&yp),
        Term::UCross(Box::new(singleton_x), Box::new(var(y))),
    )];
    parts.push(Formula::Atom(Atom::Sub(
        var(&z),
        Term::UCross(Box::new(var(x)), Box::new(var(&yp))),
    )));
    parts.push(atom_eq(
        Term::DisjUnion(Box::new(var(&z))),
        Term::Union(Box::new(var(x)), Box::new(var(&yp))),
    ));
    parts.extend(extra);
    let (xn, yn, ypn) = (x.to_string(), y.to_string(), yp.clone());
    GadgetSpec {
        name: match mode {
            GadgetMode::Literal => "card-eq(literal)".into(),
            GadgetMode::Semantic => "card-eq(semantic)".into(),
        },
        formula: Formula::conjoin(parts),
        interface_vars: vec![
            ("x".into(), x.to_string()),
            ("y".into(), y.to_string()),
            ("y'".into(), yp),
            ("z".into(), z),
        ],
        property_name: "cardinality-transfer".into(),
        note: "every model has |x| = |y|, x disjoint from y', and |y| = |y'|".into(),
        property: Arc::new(move |m, _caps| {
            let mx = get_value(m, &xn)?;
            let my = get_value(m, &yn)?;
            let myp = get_value(m, &ypn)?;
            Ok(mx.card() == my.card()
                && mx.inter(myp).is_empty()
                && my.card() == myp.card())
        }),
    }
}

/// Whether `(w, z)` is a chain pair: `w = {a_0, …, a_{k-1}}` and
/// `z = {a_0, …, a_k}` for some `k ≥ 0`.
pub fn is_chain_pair(w: &HfSet, z: &HfSet) -> bool {
    let k = w.card();
    if z.card() != k + 1 {
        return false;
    }
    let ladder = chain(k as u32);
    *w == HfSet::canonicalize(ladder[..k].to_vec()) && *z == HfSet::canonicalize(ladder)
}

/// The finiteness gadget `F(x, w, y, z)`:
/// `z = {∅} ⊗ ({∅} ∪ w)`, `w ⊊ z`, `|x| = |w|` (the last expanded through
/// the cardinality gadget). The variable `y` is carried on the interface
/// but unconstrained; a tautological conjunct keeps it in the formula.
pub fn finite_gadget(x: &str, mode: GadgetMode) -> GadgetSpec {
    let w = "w".to_string();
    let y = "y".to_string();
    let z = "z".to_string();
    for fresh in [&w, &y, &z] {
        assert_ne!(fresh, x, "auxiliary names must not collide with `{x}`");
    }
    let mut supply = supply_reserving(&[x, &w, &y, &z]);

    let empty_singleton = Term::Display(vec![Term::Empty]);
    let mut parts = vec![atom_eq(
        var(&z),
        Term::UCross(
            Box::new(empty_singleton.clone()),
            Box::new(Term::Union(Box::new(empty_singleton), Box::new(var(&w)))),
        ),
    )];
    parts.extend(
        strict_subset_literals(&w, &z, &mut supply)
            .iter()
            .map(Literal::to_formula),
    );

    // |x| = |w| through the cardinality gadget, with its auxiliaries drawn
    // from the supply.
    let card_aux_yp = supply.fresh();
    let card_aux_z = supply.fresh();
    let mut extra = Vec::new();
    let singleton_x = singleton_of(x, mode, &mut supply, &mut extra);
    parts.push(atom_eq(
        var(&card_aux_yp),
        Term::UCross(Box::new(singleton_x), Box::new(var(&w))),
    ));
    parts.push(Formula::Atom(Atom::Sub(
        var(&card_aux_z),
        Term::UCross(Box::new(var(x)), Box::new(var(&card_aux_yp))),
    )));
    parts.push(atom_eq(
        Term::DisjUnion(Box::new(var(&card_aux_z))),
        Term::Union(Box::new(var(x)), Box::new(var(&card_aux_yp))),
    ));
    parts.extend(extra);

    // y occurs in no printed literal; a tautology keeps it on the formula's
    // variable list without constraining it.
    parts.push(atom_eq(
        var(&y),
        Term::Union(Box::new(var(&y)), Box::new(var(&y))),
    ));

    let (xn, wn, zn) = (x.to_string(), w.clone(), z.clone());
    GadgetSpec {
        name: match mode {
            GadgetMode::Literal => "finite(literal)".into(),
            GadgetMode::Semantic => "finite(semantic)".into(),
        },
        formula: Formula::conjoin(parts),
        interface_vars: vec![
            ("x".into(), x.to_string()),
            ("w".into(), w),
            ("y".into(), y),
            ("z".into(), z),
        ],
        property_name: "chain-bounded-cardinality".into(),
        note: "every model pins (w, z) to a chain prefix pair and |x| = |w|".into(),
        property: Arc::new(move |m, _caps| {
            let mx = get_value(m, &xn)?;
            let mw = get_value(m, &wn)?;
            let mz = get_value(m, &zn)?;
            Ok(is_chain_pair(mw, mz) && mx.card() == mw.card())
        }),
    }
}

// ---------------------------------------------------------------------------
// The divergence witness
// ---------------------------------------------------------------------------

/// The rank-divergence witness `{∅} ⊗ ({∅} ∪ y) = z ∧ y ⊊ z` (strict
/// inclusion expanded). Its models are exactly the chain-prefix pairs.
pub fn divergence_witness(y: &str, z: &str) -> GadgetSpec {
    let mut supply = supply_reserving(&[y, z]);
    let empty_singleton = Term::Display(vec![Term::Empty]);
    let mut parts = vec![atom_eq(
        var(z),
        Term::UCross(
            Box::new(empty_singleton.clone()),
            Box::new(Term::Union(Box::new(empty_singleton), Box::new(var(y)))),
        ),
    )];
    parts.extend(
        strict_subset_literals(y, z, &mut supply)
            .iter()
            .map(Literal::to_formula),
    );
    let (yn, zn) = (y.to_string(), z.to_string());
    GadgetSpec {
        name: "divergence-witness".into(),
        formula: Formula::conjoin(parts),
        interface_vars: vec![("y".into(), y.to_string()), ("z".into(), z.to_string())],
        property_name: "chain-prefix-pair".into(),
        note: "a model exists for every chain length, and nothing else is a model".into(),
        property: Arc::new(move |m, _caps| {
            Ok(is_chain_pair(get_value(m, &yn)?, get_value(m, &zn)?))
        }),
    }
}

/// The canonical k-th model of the divergence witness:
/// `y = {a_0, …, a_{k-1}}`, `z = {a_0, …, a_k}`.
pub fn chain_assignment(k: u32, y: &str, z: &str) -> Assignment {
    let ladder = chain(k);
    Assignment::new()
        .with(y, HfSet::canonicalize(ladder[..k as usize].to_vec()))
        .with(z, HfSet::canonicalize(ladder))
}
