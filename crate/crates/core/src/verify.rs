//! Brute-force checkers that pit the claimed properties against the
//! bounded-model oracle and the set operators, and emit machine-readable
//! verdicts.
//!
//! Every checker computes both the observed side and the expected side
//! independently (oracle enumeration vs. closed-form characterization) and
//! reports the symmetric difference, rather than assuming the claim while
//! enumerating.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::gadgets::{chain_assignment, GadgetSpec};
use crate::hf::{chain, level, Caps, HfError, HfSet};
use crate::semantics::Assignment;
use crate::solver::{enumerate_models, solve_bounded, Aborted, SearchConfig, SolveStatus};
use crate::syntax::{parse_formula, Formula, Term};

/// Errors from the verification drivers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Hf(#[from] HfError),
    #[error(transparent)]
    Aborted(#[from] Aborted),
}

/// One failed case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub case: String,
    pub detail: String,
}

/// Outcome of one verification run. An empty failure list means the claim
/// held on every case checked.
#[derive(Debug, Clone)]
pub struct VerdictReport {
    pub claim: String,
    pub universe: String,
    pub cases_checked: u64,
    pub failures: Vec<Failure>,
    /// Observations worth recording that are not failures (model counts,
    /// observed model sets, vacuous premises).
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl VerdictReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self, include_elapsed: bool) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        obj.insert("claim".into(), self.claim.clone().into());
        obj.insert(
            "verdict".into(),
            if self.passed() { "pass" } else { "fail" }.into(),
        );
        obj.insert("universe".into(), self.universe.clone().into());
        obj.insert("cases_checked".into(), self.cases_checked.into());
        obj.insert(
            "failures".into(),
            self.failures
                .iter()
                .map(|f| serde_json::json!({"case": f.case, "detail": f.detail}))
                .collect::<Vec<_>>()
                .into(),
        );
        obj.insert(
            "notes".into(),
            self.notes
                .iter()
                .map(|n| serde_json::Value::String(n.clone()))
                .collect::<Vec<_>>()
                .into(),
        );
        if include_elapsed {
            obj.insert(
                "elapsed_ms".into(),
                (self.elapsed.as_millis() as u64).into(),
            );
        }
        serde_json::Value::Object(obj)
    }
}

struct ReportBuilder {
    claim: String,
    universe: String,
    cases: u64,
    failures: Vec<Failure>,
    notes: Vec<String>,
    start: Instant,
}

impl ReportBuilder {
    fn new(claim: impl Into<String>, universe: impl Into<String>) -> ReportBuilder {
        ReportBuilder {
            claim: claim.into(),
            universe: universe.into(),
            cases: 0,
            failures: Vec::new(),
            notes: Vec::new(),
            start: Instant::now(),
        }
    }

    fn case(&mut self, holds: bool, case: impl Fn() -> String, detail: impl Fn() -> String) {
        self.cases += 1;
        if !holds {
            self.failures.push(Failure {
                case: case(),
                detail: detail(),
            });
        }
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn finish(self) -> VerdictReport {
        VerdictReport {
            claim: self.claim,
            universe: self.universe,
            cases_checked: self.cases,
            failures: self.failures,
            notes: self.notes,
            elapsed: self.start.elapsed(),
        }
    }
}

// ---------------------------------------------------------------------------
// The chain-closure check
// ---------------------------------------------------------------------------

/// The default universe for [`verify_chain_closure`]: `V_3` together with the
/// chain `a_0 … a_5`.
pub fn default_chain_closure_universe(caps: &Caps) -> Vec<HfSet> {
    let mut u = level(3, caps).expect("level 3 is under every cap");
    u.extend(chain(5));
    u.sort();
    u.dedup();
    u
}

/// For every `Y` drawn from the subsets of the universe, compute
/// `Z := {∅} ⊗ ({∅} ∪ Y)` and check: whenever `Y ⊊ Z`, exactly one element
/// separates them, `Y` is a chain prefix `{a_0, …, a_{k-1}}`, and
/// `Z = {a_0, …, a_k}`.
pub fn verify_chain_closure(universe: &[HfSet], caps: &Caps) -> Result<VerdictReport, VerifyError> {
    if universe.len() > 20 {
        return Err(HfError::CapExceeded {
            op: "verify_chain_closure subsets",
            limit: 20,
            actual: universe.len() as u64,
        }
        .into());
    }
    let mut rb = ReportBuilder::new(
        "strict inclusion in the tagged-pair image forces a one-step chain extension",
        format!("all {} subsets of a {}-element universe", 1u64 << universe.len(), universe.len()),
    );
    let empty = HfSet::empty();
    let empty_singleton = empty.singleton();
    let mut premise_hits = 0u64;
    for mask in 0u64..(1u64 << universe.len()) {
        let y = HfSet::canonicalize(
            universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.clone())
                .collect(),
        );
        let z = empty_singleton.unord_prod(&empty_singleton.union(&y), caps)?;
        let premise = y.subset_of(&z) && y != z;
        if !premise {
            rb.case(true, String::new, String::new);
            continue;
        }
        premise_hits += 1;
        let k = y.card();
        let ladder = chain(k as u32);
        let ok = z.diff(&y).card() == 1
            && y == HfSet::canonicalize(ladder[..k].to_vec())
            && z == HfSet::canonicalize(ladder);
        rb.case(
            ok,
            || format!("Y = {y}"),
            || format!("Z = {z}, Z∖Y = {}", z.diff(&y)),
        );
    }
    rb.note(format!("premise Y ⊊ Z held on {premise_hits} subsets"));
    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// The rank-divergence family
// ---------------------------------------------------------------------------

/// The core divergence formula with the strict inclusion evaluated
/// directly (no auxiliary variables), over exactly `y` and `z`.
pub fn divergence_formula() -> Formula {
    parse_formula("z = ucross({0}, un({0}, y)) & y sub z & !(y = z)").expect("fixed formula")
}

/// Enumerates all models of the divergence formula with values of rank at
/// most `max_model_rank` and checks they are exactly the chain prefixes
/// `k + 2 ≤ max_model_rank`, with model ranks exactly `{2, …, bound}` and
/// the rank ceiling hit.
pub fn verify_divergence(
    max_model_rank: u32,
    base: &SearchConfig,
) -> Result<VerdictReport, VerifyError> {
    let cfg = SearchConfig {
        rank_bound: max_model_rank + 1,
        per_var_card_cap: Some(6),
        universe_override: None,
        // the cap-6 grid at bound 4 needs ~2.2e8 nodes
        candidate_cap: base.candidate_cap.max(2_000_000_000),
        ..base.clone()
    };
    let mut rb = ReportBuilder::new(
        format!("models of the divergence formula with values of rank ≤ {max_model_rank} are exactly the chain prefixes"),
        format!("level({}) with per-variable cardinality cap 6", max_model_rank + 1),
    );
    let phi = divergence_formula();
    let observed = enumerate_models(&phi, &cfg)?;
    let expected: Vec<Assignment> = (0..)
        .take_while(|k| k + 2 <= max_model_rank)
        .map(|k| chain_assignment(k, "y", "z"))
        .collect();
    for m in &expected {
        rb.case(
            observed.contains(m),
            || format!("expected model {m}"),
            || "missing from the oracle enumeration".into(),
        );
    }
    for m in &observed {
        rb.case(
            expected.contains(m),
            || format!("observed model {m}"),
            || "not a chain prefix".into(),
        );
    }
    rb.note(format!("{} bounded models", observed.len()));

    // The model rank histogram, derived from the single enumeration pass
    // (the formula's variables are exactly y and z, so each model carries
    // its own domain).
    let mut by_rank: std::collections::BTreeMap<u32, u64> = std::collections::BTreeMap::new();
    for m in &observed {
        let mut union = HfSet::empty();
        for (_, v) in m.iter() {
            union = union.union(v);
        }
        *by_rank.entry(union.rank()).or_insert(0) += 1;
    }
    let expected_ranks: Vec<u32> = (2..=max_model_rank).collect();
    let observed_ranks: Vec<u32> = by_rank.keys().copied().collect();
    rb.case(
        observed_ranks == expected_ranks,
        || format!("model ranks {observed_ranks:?}"),
        || format!("expected exactly {expected_ranks:?}"),
    );
    // The universe admits values up to rank max_model_rank, so the ceiling
    // is hit exactly when a model of that rank exists.
    let ceiling_hit = by_rank.contains_key(&max_model_rank);
    rb.case(
        ceiling_hit,
        || "rank ceiling".into(),
        || "no model reaches the maximum representable rank".into(),
    );
    rb.note(format!("spectrum {by_rank:?}, ceiling hit: {ceiling_hit}"));
    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// Gadget audits
// ---------------------------------------------------------------------------

/// Enumerates the bounded models of a gadget's formula and checks the
/// claimed property on each (soundness). For every realizability target
/// (a partial assignment of interface variables) additionally checks that
/// a bounded model with those values exists, by pinning the variables with
/// ground terms and searching again.
pub fn verify_gadget(
    spec: &GadgetSpec,
    cfg: &SearchConfig,
    realizability: &[Assignment],
) -> Result<VerdictReport, VerifyError> {
    let universe_desc = match &cfg.universe_override {
        Some(u) => format!("explicit universe of {} values", u.len()),
        None => match cfg.per_var_card_cap {
            Some(c) => format!("level({}) with cardinality cap {c}", cfg.rank_bound),
            None => format!("level({})", cfg.rank_bound),
        },
    };
    let mut rb = ReportBuilder::new(
        format!("{}: {}", spec.name, spec.note),
        universe_desc,
    );
    let models = enumerate_models(&spec.formula, cfg)?;
    for m in &models {
        let holds = spec.check_property(m, &cfg.caps);
        rb.case(
            holds == Ok(true),
            || format!("model {m}"),
            || format!("claimed property fails ({holds:?})"),
        );
    }
    rb.note(format!("{} bounded models", models.len()));
    if models.len() <= 8 {
        let shown: Vec<String> = models
            .iter()
            .map(|m| m.restrict(spec.interface_vars.iter().map(|(_, v)| v)).to_string())
            .collect();
        rb.note(format!("observed model set (interface projection): [{}]", shown.join(", ")));
    }

    for target in realizability {
        let mut pinned = spec.formula.clone();
        for (v, value) in target.iter() {
            pinned = Formula::and(
                pinned,
                Formula::Atom(crate::syntax::Atom::Eq(
                    Term::Var(v.clone()),
                    Term::ground(value),
                )),
            );
        }
        let report = solve_bounded(&pinned, cfg);
        match report.status {
            SolveStatus::Sat(m) => {
                let holds = spec.check_property(&m, &cfg.caps);
                rb.case(
                    holds == Ok(true),
                    || format!("realization of {target}"),
                    || format!("found model violates the property ({holds:?})"),
                );
            }
            SolveStatus::UnsatWithinBound => {
                rb.case(
                    false,
                    || format!("realization of {target}"),
                    || "no bounded model with these interface values".into(),
                );
            }
            SolveStatus::Aborted(reason) => {
                return Err(Aborted {
                    reason,
                    candidates_examined: report.candidates_examined,
                }
                .into())
            }
        }
    }
    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// The ordering
// ---------------------------------------------------------------------------

/// Exhaustive checks of the Ackermann order on `V_4`: strict totality and
/// transitivity, compatibility with membership and strict inclusion, and
/// agreement with the arbitrary-precision codes on `V_3 × V_3`.
pub fn verify_ordering(caps: &Caps) -> Result<VerdictReport, VerifyError> {
    let v4 = level(4, caps)?;
    let v3 = level(3, caps)?;
    let mut rb = ReportBuilder::new(
        "the structural comparison is a strict total order extending membership and strict inclusion, matching the codes",
        "V_4 for order laws, V_3 × V_3 for code agreement",
    );
    for a in &v4 {
        for b in &v4 {
            let less = a.ack_less(b);
            let greater = b.ack_less(a);
            rb.case(
                (a == b && !less && !greater) || (a != b && (less ^ greater)),
                || format!("trichotomy at ({a}, {b})"),
                || format!("less={less} greater={greater}"),
            );
            if a.contains(b) {
                rb.case(
                    b.ack_less(a),
                    || format!("membership compatibility at ({a}, {b})"),
                    || "element not below its container".into(),
                );
            }
            if b.subset_of(a) && b != a {
                rb.case(
                    b.ack_less(a),
                    || format!("inclusion compatibility at ({a}, {b})"),
                    || "proper subset not below its superset".into(),
                );
            }
            for c in &v4 {
                if a.ack_less(b) && b.ack_less(c) {
                    rb.case(
                        a.ack_less(c),
                        || format!("transitivity at ({a}, {b}, {c})"),
                        || "chain does not compose".into(),
                    );
                }
            }
        }
    }
    for a in &v3 {
        for b in &v3 {
            let codes = a.ack_code(caps)? < b.ack_code(caps)?;
            rb.case(
                a.ack_less(b) == codes,
                || format!("code agreement at ({a}, {b})"),
                || "structural order disagrees with the codes".into(),
            );
        }
    }
    Ok(rb.finish())
}
