//! Canonical hereditarily finite sets.
//!
//! A [`HfSet`] stores its elements deduplicated and sorted ascending by the
//! Ackermann order `≺`, so structural equality coincides with set equality
//! and every value has exactly one representation. Values are immutable and
//! cheap to clone (`Arc`-backed), which lets the solver share them freely
//! across worker threads.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

/// Rank of a set in the cumulative hierarchy: `rank(∅) = 0`,
/// `rank(s) = 1 + max` over element ranks.
pub type Rank = u32;

/// Ackermann code of a set: `code(∅) = 0`, `code(h) = Σ 2^code(h')` over
/// `h' ∈ h`. Arbitrary precision; a test oracle, not a hot-path value.
pub type AckCode = BigUint;

/// Errors from operations on hereditarily finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HfError {
    /// An enumeration or construction would exceed a configured cap.
    #[error("cap exceeded in {op}: {actual} > limit {limit}")]
    CapExceeded {
        op: &'static str,
        limit: u64,
        actual: u64,
    },
    /// Intersection over the empty family is undefined.
    #[error("big intersection of the empty set is undefined")]
    EmptyIntersection,
}

/// Size caps for the operations whose output can explode.
///
/// All caps are configurable; `Caps::default()` is sized for desk-scale
/// experiments (powersets of up to 16 elements, hierarchy levels up to 5).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Maximum cardinality of a powerset argument.
    pub powerset_max_card: usize,
    /// Maximum `|a| * |b|` for binary products.
    pub product_max_pairs: usize,
    /// Maximum level for [`level`].
    pub level_max: u32,
    /// Maximum rank for [`ack_code`](HfSet::ack_code).
    pub ack_code_max_rank: Rank,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            powerset_max_card: 16,
            product_max_pairs: 1 << 16,
            level_max: 5,
            ack_code_max_rank: 5,
        }
    }
}

#[derive(Debug)]
struct Node {
    elements: Vec<HfSet>,
    rank: Rank,
    hash: u64,
}

/// A hereditarily finite set in canonical form.
#[derive(Clone)]
pub struct HfSet(Arc<Node>);

impl HfSet {
    /// The empty set.
    pub fn empty() -> HfSet {
        HfSet(Arc::new(Node {
            elements: Vec::new(),
            rank: 0,
            hash: hash_children(&[]),
        }))
    }

    /// Builds the set of the given children, deduplicating and sorting by
    /// the Ackermann order. Idempotent on already-canonical input.
    pub fn canonicalize(mut children: Vec<HfSet>) -> HfSet {
        children.sort();
        children.dedup();
        HfSet::from_sorted(children)
    }

    /// Builds a set from elements already strictly `≺`-increasing.
    fn from_sorted(children: Vec<HfSet>) -> HfSet {
        debug_assert!(children.windows(2).all(|w| w[0] < w[1]));
        let rank = children.iter().map(|c| c.rank() + 1).max().unwrap_or(0);
        let hash = hash_children(&children);
        HfSet(Arc::new(Node {
            elements: children,
            rank,
            hash,
        }))
    }

    /// The singleton `{self}`.
    pub fn singleton(&self) -> HfSet {
        HfSet::from_sorted(vec![self.clone()])
    }

    /// Elements in ascending `≺` order.
    pub fn elements(&self) -> &[HfSet] {
        &self.0.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HfSet> {
        self.0.elements.iter()
    }

    /// Cardinality.
    pub fn card(&self) -> usize {
        self.0.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elements.is_empty()
    }

    /// Rank in the cumulative hierarchy (cached at construction).
    pub fn rank(&self) -> Rank {
        self.0.rank
    }

    /// Membership test (binary search in the canonical element list).
    pub fn contains(&self, x: &HfSet) -> bool {
        self.0.elements.binary_search(x).is_ok()
    }

    /// Subset test.
    pub fn subset_of(&self, other: &HfSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    /// Binary union.
    pub fn union(&self, other: &HfSet) -> HfSet {
        let mut out = Vec::with_capacity(self.card() + other.card());
        merge_into(&mut out, self.elements(), other.elements());
        HfSet::from_sorted(out)
    }

    /// Binary intersection.
    pub fn inter(&self, other: &HfSet) -> HfSet {
        let out = self
            .iter()
            .filter(|x| other.contains(x))
            .cloned()
            .collect();
        HfSet::from_sorted(out)
    }

    /// Set difference `self ∖ other`.
    pub fn diff(&self, other: &HfSet) -> HfSet {
        let out = self
            .iter()
            .filter(|x| !other.contains(x))
            .cloned()
            .collect();
        HfSet::from_sorted(out)
    }

    /// Powerset. Fails with `CapExceeded` when the cardinality is over
    /// `caps.powerset_max_card`.
    pub fn powerset(&self, caps: &Caps) -> Result<HfSet, HfError> {
        let n = self.card();
        if n > caps.powerset_max_card {
            return Err(HfError::CapExceeded {
                op: "powerset",
                limit: caps.powerset_max_card as u64,
                actual: n as u64,
            });
        }
        // Masks enumerated in increasing numeric order yield subsets in
        // ascending Ackermann order, because bit i corresponds to the i-th
        // smallest element.
        let mut subsets = Vec::with_capacity(1 << n);
        for mask in 0u32..(1u32 << n) {
            let children = self
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| x.clone())
                .collect();
            subsets.push(HfSet::from_sorted(children));
        }
        Ok(HfSet::from_sorted(subsets))
    }

    /// Union of the elements: `⋃s`.
    pub fn big_union(&self) -> HfSet {
        let mut out: Vec<HfSet> = Vec::new();
        for x in self.iter() {
            let mut merged = Vec::with_capacity(out.len() + x.card());
            merge_into(&mut merged, &out, x.elements());
            out = merged;
        }
        HfSet::from_sorted(out)
    }

    /// Intersection of the elements: `⋂s`, defined only for nonempty `s`.
    pub fn big_inter(&self) -> Result<HfSet, HfError> {
        let mut iter = self.iter();
        let first = iter.next().ok_or(HfError::EmptyIntersection)?;
        let mut acc = first.clone();
        for x in iter {
            acc = acc.inter(x);
        }
        Ok(acc)
    }

    /// Kuratowski pair `(a, b) = {{a}, {a, b}}`; collapses to `{{a}}` when
    /// `a = b`.
    pub fn kpair(a: &HfSet, b: &HfSet) -> HfSet {
        let fst = a.singleton();
        let snd = HfSet::canonicalize(vec![a.clone(), b.clone()]);
        HfSet::canonicalize(vec![fst, snd])
    }

    /// Ordered cartesian product via Kuratowski pairs.
    pub fn cart_prod(&self, other: &HfSet, caps: &Caps) -> Result<HfSet, HfError> {
        check_product_cap(self.card(), other.card(), caps)?;
        let mut out = Vec::with_capacity(self.card() * other.card());
        for u in self.iter() {
            for v in other.iter() {
                out.push(HfSet::kpair(u, v));
            }
        }
        Ok(HfSet::canonicalize(out))
    }

    /// Unordered cartesian product `{ {u, v} | u ∈ self, v ∈ other }`, with
    /// `{u, u}` collapsing to `{u}`.
    pub fn unord_prod(&self, other: &HfSet, caps: &Caps) -> Result<HfSet, HfError> {
        check_product_cap(self.card(), other.card(), caps)?;
        let mut out = Vec::with_capacity(self.card() * other.card());
        for u in self.iter() {
            for v in other.iter() {
                out.push(HfSet::canonicalize(vec![u.clone(), v.clone()]));
            }
        }
        Ok(HfSet::canonicalize(out))
    }

    /// Disjoint unary union `⊎s`: the elements belonging to exactly one
    /// member of `s`.
    pub fn disj_union(&self) -> HfSet {
        let mut out = Vec::new();
        for t in self.big_union().iter() {
            let occurrences = self.iter().filter(|member| member.contains(t)).count();
            if occurrences == 1 {
                out.push(t.clone());
            }
        }
        HfSet::from_sorted(out)
    }

    /// `𝒫*(s_1, …, s_k)`: the subsets of `s_1 ∪ … ∪ s_k` with nonempty
    /// intersection with every `s_i`. `𝒫*()` is `{∅}`.
    pub fn powast(args: &[HfSet], caps: &Caps) -> Result<HfSet, HfError> {
        let mut carrier = HfSet::empty();
        for s in args {
            carrier = carrier.union(s);
        }
        let all = carrier.powerset(caps)?;
        let out = all
            .iter()
            .filter(|s| args.iter().all(|si| !s.inter(si).is_empty()))
            .cloned()
            .collect();
        Ok(HfSet::from_sorted(out))
    }

    /// Exact Ackermann code. Guarded by a rank cap: codes grow doubly
    /// exponentially with rank.
    pub fn ack_code(&self, caps: &Caps) -> Result<AckCode, HfError> {
        if self.rank() > caps.ack_code_max_rank {
            return Err(HfError::CapExceeded {
                op: "ack_code",
                limit: caps.ack_code_max_rank as u64,
                actual: self.rank() as u64,
            });
        }
        let mut code = BigUint::from(0u8);
        for x in self.iter() {
            code += BigUint::from(1u8) << usize::try_from(x.ack_code(caps)?).unwrap_or(usize::MAX);
        }
        Ok(code)
    }

    /// Strict Ackermann order `≺`, computed structurally without
    /// materializing the codes: the `≺`-largest element of the symmetric
    /// difference decides which code is bigger.
    pub fn ack_less(&self, other: &HfSet) -> bool {
        self < other
    }

    /// Structural hash, cached at construction.
    pub fn cached_hash(&self) -> u64 {
        self.0.hash
    }
}

fn check_product_cap(a: usize, b: usize, caps: &Caps) -> Result<(), HfError> {
    let pairs = a.saturating_mul(b);
    if pairs > caps.product_max_pairs {
        return Err(HfError::CapExceeded {
            op: "product",
            limit: caps.product_max_pairs as u64,
            actual: pairs as u64,
        });
    }
    Ok(())
}

/// Merge two strictly increasing slices into `out`, dropping duplicates.
fn merge_into(out: &mut Vec<HfSet>, a: &[HfSet], b: &[HfSet]) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

fn hash_children(children: &[HfSet]) -> u64 {
    // FNV-1a over child hashes; order-sensitive, which is fine on canonical
    // element lists.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in children {
        let mut x = c.cached_hash();
        while x != 0 {
            h ^= x & 0xff;
            h = h.wrapping_mul(0x100_0000_01b3);
            x >>= 8;
        }
        h ^= 0xa5;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

impl PartialEq for HfSet {
    fn eq(&self, other: &HfSet) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash
            || self.0.rank != other.0.rank
            || self.0.elements.len() != other.0.elements.len()
        {
            return false;
        }
        self.0.elements == other.0.elements
    }
}

impl Eq for HfSet {}

impl std::hash::Hash for HfSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Ord for HfSet {
    /// The Ackermann order. Codes are sums of distinct powers of two, so
    /// comparing the element lists from the largest element down
    /// (lexicographically, recursing on elements) decides; ranks are
    /// compared first because the encoding maps each `V_n` onto an initial
    /// segment of the naturals.
    fn cmp(&self, other: &HfSet) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        match self.0.rank.cmp(&other.0.rank) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let a = &self.0.elements;
        let b = &other.0.elements;
        for (x, y) in a.iter().rev().zip(b.iter().rev()) {
            match x.cmp(y) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &HfSet) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical textual form: nested braces with `≺`-sorted elements, e.g.
/// `{}`, `{{}}`, `{{},{{}}}`. This string form is the interchange format
/// used by the assignment files and the CLI.
impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Error from parsing the brace string form.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid set literal at byte {pos}: {message}")]
pub struct SetParseError {
    pub pos: usize,
    pub message: String,
}

impl FromStr for HfSet {
    type Err = SetParseError;

    fn from_str(s: &str) -> Result<HfSet, SetParseError> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let set = parse_set(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(SetParseError {
                pos,
                message: "trailing input".into(),
            });
        }
        Ok(set)
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_set(bytes: &[u8], pos: &mut usize) -> Result<HfSet, SetParseError> {
    skip_ws(bytes, pos);
    if bytes.get(*pos) != Some(&b'{') {
        return Err(SetParseError {
            pos: *pos,
            message: "expected '{'".into(),
        });
    }
    *pos += 1;
    let mut children = Vec::new();
    skip_ws(bytes, pos);
    if bytes.get(*pos) == Some(&b'}') {
        *pos += 1;
        return Ok(HfSet::empty());
    }
    loop {
        children.push(parse_set(bytes, pos)?);
        skip_ws(bytes, pos);
        match bytes.get(*pos) {
            Some(b',') => {
                *pos += 1;
            }
            Some(b'}') => {
                *pos += 1;
                return Ok(HfSet::canonicalize(children));
            }
            _ => {
                return Err(SetParseError {
                    pos: *pos,
                    message: "expected ',' or '}'".into(),
                })
            }
        }
    }
}

/// All elements of the cumulative-hierarchy level `V_n`, in `≺` order.
/// `level(0)` is empty; `|level(5)| = 65536`. Capped at `caps.level_max`.
pub fn level(n: u32, caps: &Caps) -> Result<Vec<HfSet>, HfError> {
    if n > caps.level_max {
        return Err(HfError::CapExceeded {
            op: "level",
            limit: caps.level_max as u64,
            actual: n as u64,
        });
    }
    let mut current = vec![];
    for _ in 0..n {
        let carrier = HfSet::from_sorted(current.clone());
        let mut next = Vec::with_capacity(1usize << current.len());
        for mask in 0u64..(1u64 << current.len()) {
            let children = carrier
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| x.clone())
                .collect();
            next.push(HfSet::from_sorted(children));
        }
        current = next;
    }
    Ok(current)
}

/// The transitive closure of `s`, including `s` itself, in `≺` order.
pub fn transitive_closure(s: &HfSet) -> Vec<HfSet> {
    let mut seen: Vec<HfSet> = Vec::new();
    let mut stack = vec![s.clone()];
    while let Some(x) = stack.pop() {
        if seen.contains(&x) {
            continue;
        }
        stack.extend(x.iter().cloned());
        seen.push(x);
    }
    seen.sort();
    seen
}

/// The chain `a_0 = {∅}`, `a_{n+1} = {∅, a_n}`, returned as `⟨a_0, …, a_k⟩`.
/// `rank(a_k) = k + 1`.
pub fn chain(k: u32) -> Vec<HfSet> {
    let empty = HfSet::empty();
    let mut out = Vec::with_capacity(k as usize + 1);
    let mut current = empty.singleton();
    out.push(current.clone());
    for _ in 0..k {
        current = HfSet::canonicalize(vec![empty.clone(), current]);
        out.push(current.clone());
    }
    out
}
