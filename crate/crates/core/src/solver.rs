//! Bounded-model oracle: exhaustive search for set assignments over a
//! hierarchy level satisfying a formula.
//!
//! The search space is the full assignment grid `vars → universe`; the only
//! pruning is short-circuit evaluation of the formula's top-level conjuncts
//! as soon as their variables are bound, with atom sides that do not
//! mention the variable under iteration evaluated once at the parent node.
//! The universe is `level(rank_bound)` (so values have rank strictly below
//! `rank_bound`), optionally filtered by a per-variable cardinality cap, or
//! an explicit override. Every reported model is re-verified by direct
//! evaluation before it leaves the solver.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::hf::{level, Caps, HfError, HfSet, Rank};
use crate::semantics::{eval_formula, eval_formula_in, eval_term_in, Assignment, EvalError, Lookup};
use crate::syntax::{Atom, Formula, VarName};

/// Bounds and strategy knobs for a bounded search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Candidate values are drawn from `level(rank_bound)`; at most 5
    /// unless `universe_override` is given.
    pub rank_bound: u32,
    /// Keep only universe values with at most this many elements.
    pub per_var_card_cap: Option<usize>,
    /// Explicit universe (sorted and deduplicated before use).
    pub universe_override: Option<Vec<HfSet>>,
    /// Abort once this many search nodes have been visited.
    pub candidate_cap: u64,
    /// When set, parallel workers never race: the least model (w.r.t. the
    /// solver's canonical variable order) is returned and reports are
    /// reproducible. When clear, `solve_bounded` may return any model.
    pub deterministic: bool,
    /// 1 forces a serial search; any other value uses the current rayon
    /// thread pool.
    pub jobs: usize,
    /// Evaluation caps.
    pub caps: Caps,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            rank_bound: 3,
            per_var_card_cap: None,
            universe_override: None,
            candidate_cap: 100_000_000,
            deterministic: true,
            jobs: 0,
            caps: Caps::default(),
        }
    }
}

impl SearchConfig {
    pub fn with_rank_bound(rank_bound: u32) -> SearchConfig {
        SearchConfig {
            rank_bound,
            ..SearchConfig::default()
        }
    }
}

/// Search outcome. `UnsatWithinBound` is a bound-relative verdict, never an
/// unsatisfiability proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStatus {
    Sat(Assignment),
    UnsatWithinBound,
    Aborted(String),
}

/// Outcome of a `solve_bounded` call.
#[derive(Debug, Clone)]
pub struct ModelReport {
    pub status: SolveStatus,
    pub candidates_examined: u64,
    pub elapsed: Duration,
}

impl ModelReport {
    pub fn to_json(&self, include_elapsed: bool) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        match &self.status {
            SolveStatus::Sat(m) => {
                obj.insert("status".into(), "sat".into());
                obj.insert("model".into(), m.to_json());
            }
            SolveStatus::UnsatWithinBound => {
                obj.insert("status".into(), "unsat_within_bound".into());
            }
            SolveStatus::Aborted(reason) => {
                obj.insert("status".into(), "aborted".into());
                obj.insert("reason".into(), reason.clone().into());
            }
        }
        obj.insert(
            "candidates_examined".into(),
            self.candidates_examined.into(),
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

/// Histogram of `dom_rank` over all bounded models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSpectrum {
    pub by_rank: BTreeMap<Rank, u64>,
    /// Vacuously true: every hereditarily finite model is finite.
    pub all_models_finite: bool,
    /// Some model reaches the maximum rank the universe permits.
    pub max_rank_hit_bound: bool,
    pub candidates_examined: u64,
}

impl RankSpectrum {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "by_rank": self.by_rank
                .iter()
                .map(|(k, v)| (k.to_string(), serde_json::Value::from(*v)))
                .collect::<serde_json::Map<_, _>>(),
            "all_models_finite": self.all_models_finite,
            "max_rank_hit_bound": self.max_rank_hit_bound,
            "candidates_examined": self.candidates_examined,
        })
    }
}

/// A search aborted by the candidate cap, a blown evaluation cap, or an
/// invalid configuration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("search aborted: {reason}")]
pub struct Aborted {
    pub reason: String,
    pub candidates_examined: u64,
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AtomKind {
    Mem,
    Eq,
    Sub,
}

/// A top-level conjunct, checked as soon as its last variable (in search
/// order) is bound.
struct Conjunct {
    formula: Formula,
    decided_at: usize,
    /// For plain (possibly negated) binary atoms: the pieces needed to
    /// evaluate the sides separately so the side not involving the decision
    /// variable can be cached at the parent node.
    atom_plan: Option<AtomPlan>,
}

struct AtomPlan {
    positive: bool,
    kind: AtomKind,
    lhs: crate::syntax::Term,
    rhs: crate::syntax::Term,
    lhs_live: bool,
    rhs_live: bool,
}

struct Compiled {
    /// Search order (greedy: maximize conjuncts decided early).
    vars: Vec<VarName>,
    conjuncts: Vec<Conjunct>,
    /// Conjuncts without variables, checked before the search starts.
    closed: Vec<Formula>,
}

fn greedy_var_order(f: &Formula) -> (Vec<VarName>, Vec<(Formula, BTreeSet<VarName>)>) {
    let conjunct_vars: Vec<(Formula, BTreeSet<VarName>)> = f
        .conjuncts()
        .into_iter()
        .map(|c| (c.clone(), c.vars()))
        .collect();
    let mut remaining: Vec<VarName> = f.vars().into_iter().collect();
    let mut order: Vec<VarName> = Vec::with_capacity(remaining.len());
    let mut bound: BTreeSet<VarName> = BTreeSet::new();
    while !remaining.is_empty() {
        // Prefer the variable that completes the most conjuncts, then the
        // one appearing in the most incomplete conjuncts; remaining ties
        // fall to name order. `remaining` stays name-sorted throughout.
        let mut best = 0usize;
        let mut best_key = (0usize, 0usize);
        for (i, v) in remaining.iter().enumerate() {
            let completes = conjunct_vars
                .iter()
                .filter(|(_, vs)| {
                    !vs.is_empty()
                        && !vs.iter().all(|x| bound.contains(x))
                        && vs.iter().all(|x| bound.contains(x) || x == v)
                })
                .count();
            let appearances = conjunct_vars
                .iter()
                .filter(|(_, vs)| vs.contains(v) && !vs.iter().all(|x| bound.contains(x)))
                .count();
            let key = (completes, appearances);
            if i == 0 || key > best_key {
                best = i;
                best_key = key;
            }
        }
        let v = remaining.remove(best);
        bound.insert(v.clone());
        order.push(v);
    }
    (order, conjunct_vars)
}

fn compile(f: &Formula) -> Compiled {
    let (vars, conjunct_vars) = greedy_var_order(f);
    let index_of = |name: &VarName| vars.iter().position(|v| v == name).unwrap();
    let mut conjuncts = Vec::new();
    let mut closed = Vec::new();
    for (formula, cvars) in conjunct_vars {
        if cvars.is_empty() {
            closed.push(formula);
            continue;
        }
        let decided_at = cvars.iter().map(&index_of).max().unwrap();
        let decider = &vars[decided_at];
        let atom_plan = match &formula {
            Formula::Atom(a) => plan_atom(a, true, decider),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => plan_atom(a, false, decider),
                _ => None,
            },
            _ => None,
        };
        conjuncts.push(Conjunct {
            formula,
            decided_at,
            atom_plan,
        });
    }
    Compiled {
        vars,
        conjuncts,
        closed,
    }
}

fn plan_atom(a: &Atom, positive: bool, decider: &VarName) -> Option<AtomPlan> {
    let (kind, lhs, rhs) = match a {
        Atom::Mem(s, t) => (AtomKind::Mem, s, t),
        Atom::Eq(s, t) => (AtomKind::Eq, s, t),
        Atom::Sub(s, t) => (AtomKind::Sub, s, t),
        Atom::Finite(_) => return None,
    };
    Some(AtomPlan {
        positive,
        kind,
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        lhs_live: lhs.vars().contains(decider),
        rhs_live: rhs.vars().contains(decider),
    })
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

struct Env<'a> {
    vars: &'a [VarName],
    values: &'a [Option<HfSet>],
}

impl Lookup for Env<'_> {
    fn lookup(&self, name: &str) -> Option<&HfSet> {
        self.vars
            .iter()
            .position(|v| v == name)
            .and_then(|i| self.values[i].as_ref())
    }
}

/// Shared abort/cap bookkeeping. Node counts are flushed in batches to
/// keep the atomic off the hot path.
struct Ctl {
    cap: u64,
    global: AtomicU64,
    stop: AtomicBool,
    /// Set in non-deterministic first-model searches once any worker finds
    /// a model.
    found: AtomicBool,
}

/// Per-slice node meter; counts are pushed to the shared counter in
/// batches, or immediately when the cap is within reach.
#[derive(Default)]
struct Meter {
    pending: u64,
    seen_global: u64,
}

impl Ctl {
    fn new(cap: u64) -> Ctl {
        Ctl {
            cap,
            global: AtomicU64::new(0),
            stop: AtomicBool::new(false),
            found: AtomicBool::new(false),
        }
    }

    fn tick(&self, m: &mut Meter) -> Result<(), ()> {
        m.pending += 1;
        if m.pending >= FLUSH_EVERY || m.seen_global + m.pending > self.cap {
            self.global.fetch_add(m.pending, Ordering::Relaxed);
            m.pending = 0;
            m.seen_global = self.global.load(Ordering::Relaxed);
            if m.seen_global > self.cap {
                self.stop.store(true, Ordering::Relaxed);
            }
        }
        if self.stop.load(Ordering::Relaxed) {
            Err(())
        } else {
            Ok(())
        }
    }
}

const FLUSH_EVERY: u64 = 4096;

enum Goal<'p> {
    /// Stop each slice at its first model.
    First,
    /// Collect models projected onto the given variable indices (indices
    /// into the search order), deduplicated.
    Collect(&'p [usize]),
    /// Histogram of dom-rank over all models.
    Spectrum,
}

#[derive(Default)]
struct SliceOut {
    first: Option<Vec<HfSet>>,
    set: BTreeSet<Vec<HfSet>>,
    spectrum: BTreeMap<Rank, u64>,
    nodes: u64,
}

struct Search<'a> {
    formula: &'a Formula,
    compiled: &'a Compiled,
    universe: &'a [HfSet],
    caps: &'a Caps,
    deterministic: bool,
}

enum NodeError {
    /// Candidate cap exceeded or another worker aborted.
    Stopped,
    /// Evaluation blew a cap; the configuration cannot explore this space.
    Cap(HfError),
    /// The formula evaluated inconsistently between the pruned search and
    /// the direct evaluator.
    SelfCheck(String),
}

impl Search<'_> {
    fn on_model(
        &self,
        env: &[Option<HfSet>],
        goal: &Goal,
        out: &mut SliceOut,
        ctl: &Ctl,
    ) -> Result<bool, NodeError> {
        // Oracle self-check: the pruned search only ever yields assignments
        // that the plain evaluator confirms.
        let assignment: Assignment = self
            .compiled
            .vars
            .iter()
            .cloned()
            .zip(env.iter().map(|v| v.clone().unwrap()))
            .collect();
        match eval_formula(&assignment, self.formula, self.caps) {
            Ok(true) => {}
            other => {
                return Err(NodeError::SelfCheck(format!(
                    "search produced a candidate the evaluator rejects ({other:?})"
                )))
            }
        }
        let values: Vec<HfSet> = env.iter().map(|v| v.clone().unwrap()).collect();
        match goal {
            Goal::First => {
                out.first = Some(values);
                if !self.deterministic {
                    ctl.found.store(true, Ordering::Relaxed);
                }
                Ok(true)
            }
            Goal::Collect(proj) => {
                let tuple: Vec<HfSet> = proj.iter().map(|i| values[*i].clone()).collect();
                out.set.insert(tuple);
                Ok(false)
            }
            Goal::Spectrum => {
                let mut union = HfSet::empty();
                for v in &values {
                    union = union.union(v);
                }
                *out.spectrum.entry(union.rank()).or_insert(0) += 1;
                Ok(false)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dive(
        &self,
        depth: usize,
        candidates: &[HfSet],
        env: &mut Vec<Option<HfSet>>,
        goal: &Goal,
        out: &mut SliceOut,
        ctl: &Ctl,
        meter: &mut Meter,
    ) -> Result<bool, NodeError> {
        if depth == self.compiled.vars.len() {
            return self.on_model(env, goal, out, ctl);
        }
        // Pre-evaluate the atom sides that do not mention the variable
        // being iterated here.
        let mut checks: Vec<(&Conjunct, Option<HfSet>, Option<HfSet>)> = Vec::new();
        for c in &self.compiled.conjuncts {
            if c.decided_at != depth {
                continue;
            }
            let (mut lhs_cache, mut rhs_cache) = (None, None);
            if let Some(plan) = &c.atom_plan {
                let e = Env {
                    vars: &self.compiled.vars,
                    values: env,
                };
                if !plan.lhs_live {
                    match eval_term_in(&e, &plan.lhs, self.caps) {
                        Ok(v) => lhs_cache = Some(v),
                        Err(EvalError::Hf(err @ HfError::CapExceeded { .. })) => {
                            return Err(NodeError::Cap(err))
                        }
                        // This side errors under every candidate below this
                        // node, so nothing here can be a model.
                        Err(_) => return Ok(false),
                    }
                }
                if !plan.rhs_live {
                    match eval_term_in(&e, &plan.rhs, self.caps) {
                        Ok(v) => rhs_cache = Some(v),
                        Err(EvalError::Hf(err @ HfError::CapExceeded { .. })) => {
                            return Err(NodeError::Cap(err))
                        }
                        Err(_) => return Ok(false),
                    }
                }
            }
            checks.push((c, lhs_cache, rhs_cache));
        }

        for value in candidates {
            env[depth] = Some(value.clone());
            out.nodes += 1;
            if ctl.tick(meter).is_err() {
                env[depth] = None;
                return Err(NodeError::Stopped);
            }
            if !self.deterministic && ctl.found.load(Ordering::Relaxed) {
                env[depth] = None;
                return Ok(true);
            }
            let mut ok = true;
            for (c, lhs_cache, rhs_cache) in &checks {
                match self.check(c, lhs_cache, rhs_cache, env) {
                    Ok(true) => {}
                    Ok(false) => {
                        ok = false;
                        break;
                    }
                    Err(e) => {
                        env[depth] = None;
                        return Err(e);
                    }
                }
            }
            if ok {
                let done = self.dive(depth + 1, self.universe, env, goal, out, ctl, meter)?;
                if done && matches!(goal, Goal::First) {
                    env[depth] = None;
                    return Ok(true);
                }
            }
        }
        env[depth] = None;
        Ok(false)
    }

    fn check(
        &self,
        c: &Conjunct,
        lhs_cache: &Option<HfSet>,
        rhs_cache: &Option<HfSet>,
        env: &[Option<HfSet>],
    ) -> Result<bool, NodeError> {
        let e = Env {
            vars: &self.compiled.vars,
            values: env,
        };
        if let Some(plan) = &c.atom_plan {
            let side = |cache: &Option<HfSet>, term| -> Result<Result<HfSet, ()>, NodeError> {
                if let Some(v) = cache {
                    return Ok(Ok(v.clone()));
                }
                match eval_term_in(&e, term, self.caps) {
                    Ok(v) => Ok(Ok(v)),
                    Err(EvalError::Hf(err @ HfError::CapExceeded { .. })) => {
                        Err(NodeError::Cap(err))
                    }
                    Err(_) => Ok(Err(())),
                }
            };
            let lhs = match side(lhs_cache, &plan.lhs)? {
                Ok(v) => v,
                Err(()) => return Ok(false),
            };
            let rhs = match side(rhs_cache, &plan.rhs)? {
                Ok(v) => v,
                Err(()) => return Ok(false),
            };
            let holds = match plan.kind {
                AtomKind::Mem => rhs.contains(&lhs),
                AtomKind::Eq => lhs == rhs,
                AtomKind::Sub => lhs.subset_of(&rhs),
            };
            return Ok(holds == plan.positive);
        }
        match eval_formula_in(&e, &c.formula, self.caps) {
            Ok(b) => Ok(b),
            Err(EvalError::Hf(err @ HfError::CapExceeded { .. })) => Err(NodeError::Cap(err)),
            Err(_) => Ok(false),
        }
    }

    /// Runs the subtree under `universe[first_idx]` bound to the first
    /// search variable.
    fn slice(&self, first_idx: usize, goal: &Goal, ctl: &Ctl) -> Result<SliceOut, NodeError> {
        let mut out = SliceOut::default();
        let mut env: Vec<Option<HfSet>> = vec![None; self.compiled.vars.len()];
        let mut meter = Meter::default();
        let first = std::slice::from_ref(&self.universe[first_idx]);
        let result = self.dive(0, first, &mut env, goal, &mut out, ctl, &mut meter);
        ctl.global.fetch_add(meter.pending, Ordering::Relaxed);
        result.map(|_| out)
    }
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

fn build_universe(cfg: &SearchConfig) -> Result<Vec<HfSet>, Aborted> {
    let mut u = match &cfg.universe_override {
        Some(explicit) => {
            let mut u = explicit.clone();
            u.sort();
            u.dedup();
            u
        }
        None => level(cfg.rank_bound, &cfg.caps).map_err(|e| Aborted {
            reason: format!("cannot build universe: {e}"),
            candidates_examined: 0,
        })?,
    };
    if let Some(cap) = cfg.per_var_card_cap {
        u.retain(|s| s.card() <= cap);
    }
    Ok(u)
}

struct RunOutput {
    first: Option<Assignment>,
    collected: BTreeSet<Vec<HfSet>>,
    spectrum: BTreeMap<Rank, u64>,
    nodes: u64,
    vars: Vec<VarName>,
}

fn run(f: &Formula, cfg: &SearchConfig, goal_kind: GoalKind) -> Result<RunOutput, Aborted> {
    let compiled = compile(f);
    let universe = build_universe(cfg)?;
    let caps = cfg.caps.clone();
    let ctl = Ctl::new(cfg.candidate_cap);

    // Closed conjuncts hold or fail regardless of the grid.
    for closed in &compiled.closed {
        match eval_formula(&Assignment::new(), closed, &caps) {
            Ok(true) => {}
            Ok(false) | Err(EvalError::Hf(HfError::EmptyIntersection)) => {
                return Ok(RunOutput {
                    first: None,
                    collected: BTreeSet::new(),
                    spectrum: BTreeMap::new(),
                    nodes: 0,
                    vars: compiled.vars,
                })
            }
            Err(e) => {
                return Err(Aborted {
                    reason: format!("closed conjunct failed to evaluate: {e}"),
                    candidates_examined: 0,
                })
            }
        }
    }

    if compiled.vars.is_empty() {
        // Fully closed formula: the closed conjuncts above already decided
        // satisfiability.
        return Ok(RunOutput {
            first: Some(Assignment::new()),
            collected: BTreeSet::from([Vec::new()]),
            spectrum: BTreeMap::from([(0, 1)]),
            nodes: 1,
            vars: compiled.vars,
        });
    }
    if universe.is_empty() {
        return Ok(RunOutput {
            first: None,
            collected: BTreeSet::new(),
            spectrum: BTreeMap::new(),
            nodes: 0,
            vars: compiled.vars,
        });
    }

    let proj_indices: Vec<usize> = match &goal_kind {
        GoalKind::Collect(names) => names
            .iter()
            .map(|n| {
                compiled
                    .vars
                    .iter()
                    .position(|v| v == n)
                    .ok_or_else(|| Aborted {
                        reason: format!("projection variable `{n}` does not occur in the formula"),
                        candidates_examined: 0,
                    })
            })
            .collect::<Result<_, _>>()?,
        _ => Vec::new(),
    };
    let goal = match &goal_kind {
        GoalKind::First => Goal::First,
        GoalKind::Collect(_) => Goal::Collect(&proj_indices),
        GoalKind::Spectrum => Goal::Spectrum,
    };

    let search = Search {
        formula: f,
        compiled: &compiled,
        universe: &universe,
        caps: &caps,
        deterministic: cfg.deterministic,
    };

    let slice_results: Vec<Result<SliceOut, NodeError>> = if cfg.jobs == 1 {
        let mut outs = Vec::with_capacity(universe.len());
        for i in 0..universe.len() {
            let r = search.slice(i, &goal, &ctl);
            let stop = r.is_err()
                || (matches!(goal, Goal::First)
                    && matches!(&r, Ok(out) if out.first.is_some()));
            outs.push(r);
            if stop {
                break;
            }
        }
        outs
    } else {
        (0..universe.len())
            .into_par_iter()
            .map(|i| search.slice(i, &goal, &ctl))
            .collect()
    };

    let mut merged = SliceOut::default();
    let mut first: Option<Assignment> = None;
    for r in slice_results {
        match r {
            Ok(out) => {
                merged.nodes += out.nodes;
                if first.is_none() {
                    if let Some(values) = out.first {
                        first = Some(
                            compiled
                                .vars
                                .iter()
                                .cloned()
                                .zip(values)
                                .collect(),
                        );
                        if matches!(goal, Goal::First) {
                            break;
                        }
                    }
                }
                merged.set.extend(out.set);
                for (k, v) in out.spectrum {
                    *merged.spectrum.entry(k).or_insert(0) += v;
                }
            }
            Err(NodeError::Stopped) => {
                return Err(Aborted {
                    reason: format!("candidate cap {} exceeded", cfg.candidate_cap),
                    candidates_examined: ctl.global.load(Ordering::Relaxed),
                })
            }
            Err(NodeError::Cap(e)) => {
                return Err(Aborted {
                    reason: format!("evaluation cap hit during search: {e}"),
                    candidates_examined: ctl.global.load(Ordering::Relaxed),
                })
            }
            Err(NodeError::SelfCheck(msg)) => {
                return Err(Aborted {
                    reason: format!("oracle self-check failed: {msg}"),
                    candidates_examined: ctl.global.load(Ordering::Relaxed),
                })
            }
        }
    }

    Ok(RunOutput {
        first,
        collected: merged.set,
        spectrum: merged.spectrum,
        nodes: merged.nodes,
        vars: compiled.vars,
    })
}

enum GoalKind {
    First,
    Collect(Vec<VarName>),
    Spectrum,
}

/// Exhaustive bounded search; returns the first (least, under the solver's
/// canonical variable order) model, a bound-relative unsat verdict, or an
/// abort.
pub fn solve_bounded(f: &Formula, cfg: &SearchConfig) -> ModelReport {
    let start = Instant::now();
    match run(f, cfg, GoalKind::First) {
        Ok(out) => ModelReport {
            status: match out.first {
                Some(m) => SolveStatus::Sat(m),
                None => SolveStatus::UnsatWithinBound,
            },
            candidates_examined: out.nodes,
            elapsed: start.elapsed(),
        },
        Err(a) => ModelReport {
            status: SolveStatus::Aborted(a.reason),
            candidates_examined: a.candidates_examined,
            elapsed: start.elapsed(),
        },
    }
}

/// All models within the bound, projected onto `proj` (deduplicated,
/// sorted by the projected value tuple).
pub fn enumerate_models_projected(
    f: &Formula,
    proj: &[VarName],
    cfg: &SearchConfig,
) -> Result<Vec<Assignment>, Aborted> {
    let out = run(f, cfg, GoalKind::Collect(proj.to_vec()))?;
    if out.vars.is_empty() {
        // Closed formula: one empty model if satisfiable.
        return Ok(out
            .collected
            .into_iter()
            .map(|_| Assignment::new())
            .collect());
    }
    Ok(out
        .collected
        .into_iter()
        .map(|tuple| proj.iter().cloned().zip(tuple).collect())
        .collect())
}

/// All models within the bound, in value-tuple order over the sorted
/// variable names; no duplicates.
pub fn enumerate_models(f: &Formula, cfg: &SearchConfig) -> Result<Vec<Assignment>, Aborted> {
    let vars: Vec<VarName> = f.vars().into_iter().collect();
    enumerate_models_projected(f, &vars, cfg)
}

/// Histogram of `dom_rank` over all bounded models.
pub fn rank_spectrum(f: &Formula, cfg: &SearchConfig) -> Result<RankSpectrum, Aborted> {
    let universe = build_universe(cfg)?;
    let ceiling = universe.iter().map(HfSet::rank).max().unwrap_or(0);
    let out = run(f, cfg, GoalKind::Spectrum)?;
    Ok(RankSpectrum {
        max_rank_hit_bound: out.spectrum.contains_key(&ceiling),
        by_rank: out.spectrum,
        all_models_finite: true,
        candidates_examined: out.nodes,
    })
}

// ---------------------------------------------------------------------------
// Bounded equisatisfiability
// ---------------------------------------------------------------------------

/// Verdict of a bounded equisatisfiability check between `f` and a
/// disjunctive family `g`.
#[derive(Debug, Clone)]
pub struct EquisatReport {
    /// Every model of `f` within the bound transfers to a model of some
    /// alternative of `g` within `rank_bound + slack`.
    pub forward_ok: bool,
    /// `f` had no bounded model, so the transfer direction was vacuous.
    pub forward_vacuous: bool,
    /// Every bounded model of every alternative of `g` restricts to a
    /// model of `f`.
    pub restriction_ok: bool,
    /// Number of `g`-models inspected for the restriction direction.
    pub restriction_cases: u64,
    /// Restrictions whose evaluation of `f` raised an error (an atom of a
    /// sibling alternative is undefined there); not counted as failures.
    pub restriction_inconclusive: u64,
    pub counterexample: Option<(String, Assignment)>,
}

impl EquisatReport {
    pub fn passed(&self) -> bool {
        self.forward_ok && self.restriction_ok
    }
}

/// An extender maps a model of `f` to a model of one of `g`'s
/// alternatives; the solver re-verifies the result by evaluation.
pub type Extender<'a> = dyn Fn(&Assignment) -> Option<Assignment> + 'a;

/// Checks, within bounds, that `sat(f, r) ⇒ sat(g, r + slack)` and that
/// bounded models of `g` restrict to models of `f`. `g` is treated as the
/// disjunctive family of its top-level `|`-spine; each alternative is
/// searched over its own variables (at bound `r` for the restriction
/// direction). Variables of `f` missing from an alternative's model are
/// filled with `∅` for the restriction check.
pub fn equisat_bounded(
    f: &Formula,
    g: &Formula,
    r: u32,
    slack: u32,
    cfg: &SearchConfig,
    extender: Option<&Extender>,
) -> Result<EquisatReport, Aborted> {
    let alternatives: Vec<&Formula> = g.disjuncts();
    let mut report = EquisatReport {
        forward_ok: true,
        forward_vacuous: false,
        restriction_ok: true,
        restriction_cases: 0,
        restriction_inconclusive: 0,
        counterexample: None,
    };

    // Forward: find f's bounded models and transfer each one.
    let f_cfg = SearchConfig {
        rank_bound: r,
        universe_override: None,
        ..cfg.clone()
    };
    let f_models = enumerate_models(f, &f_cfg)?;
    report.forward_vacuous = f_models.is_empty();
    let transfer_bound = r + slack;
    'models: for m in &f_models {
        if let Some(ext) = extender {
            if let Some(candidate) = ext(m) {
                let within = candidate
                    .iter()
                    .all(|(_, v)| v.rank() < transfer_bound);
                let satisfies_some = alternatives.iter().any(|alt| {
                    alt.vars().iter().all(|v| candidate.get(v).is_some())
                        && eval_formula(&candidate, alt, &cfg.caps) == Ok(true)
                });
                if within && satisfies_some {
                    continue 'models;
                }
            }
            report.forward_ok = false;
            report
                .counterexample
                .get_or_insert(("transfer failed for this model of f".into(), m.clone()));
        } else {
            // Blind transfer: search each alternative, clamped to the
            // deepest enumerable level.
            let g_cfg = SearchConfig {
                rank_bound: transfer_bound.min(cfg.caps.level_max),
                universe_override: None,
                ..cfg.clone()
            };
            let sat_somewhere = alternatives.iter().any(|alt| {
                matches!(
                    solve_bounded(alt, &g_cfg).status,
                    SolveStatus::Sat(_)
                )
            });
            if !sat_somewhere {
                report.forward_ok = false;
                report
                    .counterexample
                    .get_or_insert(("no alternative of g is satisfiable within the slack bound".into(), m.clone()));
            }
            break; // one f-model settles the blind direction
        }
    }

    // Restriction: models of each alternative within the base bound,
    // restricted to vars(f), must satisfy f. (The slack only matters for
    // the transfer direction; restriction soundness is bound-independent,
    // so checking at the base bound keeps the search enumerable.)
    let f_vars: Vec<VarName> = f.vars().into_iter().collect();
    let g_cfg = SearchConfig {
        rank_bound: r,
        universe_override: None,
        ..cfg.clone()
    };
    for alt in &alternatives {
        let models = enumerate_models(alt, &g_cfg)?;
        for gm in models {
            report.restriction_cases += 1;
            let mut restricted = gm.restrict(f_vars.iter());
            for v in &f_vars {
                if restricted.get(v).is_none() {
                    restricted.bind(v.clone(), HfSet::empty());
                }
            }
            match eval_formula(&restricted, f, &cfg.caps) {
                Ok(true) => {}
                Ok(false) => {
                    report.restriction_ok = false;
                    report
                        .counterexample
                        .get_or_insert(("g-model restricts to a non-model of f".into(), gm));
                    break;
                }
                Err(_) => report.restriction_inconclusive += 1,
            }
        }
        if !report.restriction_ok {
            break;
        }
    }

    Ok(report)
}
