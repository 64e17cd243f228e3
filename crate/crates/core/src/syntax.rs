//! Abstract syntax, parser, and printer for the formula language, plus
//! fragment classification.
//!
//! The concrete grammar is ASCII: set operators are keyword calls
//! (`un`, `int`, `diff`, `cross`, `ucross`, `pow`, `Un`, `In`, `dun`),
//! set displays are `{t,...}` with at least one element, `0` denotes the
//! empty set, atoms are infix `in`, `=`, `sub` (with negated sugar
//! `notin`, `!=`, `nsub`) and `Finite(t)`, and the connectives are
//! `! & | -> <->` in decreasing binding strength. `#` starts a line
//! comment. Set operators are fully parenthesized by their keywords, so
//! only the connectives need precedence.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hf::HfSet;

/// Variable names match `[a-zA-Z_][a-zA-Z0-9_']*` and are not keywords.
pub type VarName = String;

/// Terms of the language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarName),
    Empty,
    Union(Box<Term>, Box<Term>),
    Inter(Box<Term>, Box<Term>),
    Diff(Box<Term>, Box<Term>),
    Cross(Box<Term>, Box<Term>),
    UCross(Box<Term>, Box<Term>),
    Pow(Box<Term>),
    BigUnion(Box<Term>),
    BigInter(Box<Term>),
    DisjUnion(Box<Term>),
    /// Set display `{t_1, …, t_n}` with `n ≥ 1`.
    Display(Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    /// A closed term denoting the given value: `∅` is `0`, everything else
    /// a nested display.
    pub fn ground(value: &HfSet) -> Term {
        if value.is_empty() {
            Term::Empty
        } else {
            Term::Display(value.iter().map(Term::ground).collect())
        }
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarName>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Empty => {}
            Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) | Term::Cross(a, b)
            | Term::UCross(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Pow(t) | Term::BigUnion(t) | Term::BigInter(t) | Term::DisjUnion(t) => {
                t.collect_vars(out)
            }
            Term::Display(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Nesting depth: variables and `0` have depth 0, operators add one.
    pub fn depth(&self) -> u32 {
        match self {
            Term::Var(_) | Term::Empty => 0,
            Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) | Term::Cross(a, b)
            | Term::UCross(a, b) => 1 + a.depth().max(b.depth()),
            Term::Pow(t) | Term::BigUnion(t) | Term::BigInter(t) | Term::DisjUnion(t) => {
                1 + t.depth()
            }
            Term::Display(ts) => 1 + ts.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Empty)
    }
}

/// Atomic formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Mem(Term, Term),
    Eq(Term, Term),
    Sub(Term, Term),
    Finite(Term),
}

impl Atom {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Mem(a, b) | Atom::Eq(a, b) | Atom::Sub(a, b) => vec![a, b],
            Atom::Finite(t) => vec![t],
        }
    }
}

/// Formulas: propositional combinations of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of a nonempty list, left-associated.
    pub fn conjoin(mut parts: Vec<Formula>) -> Formula {
        let mut acc = parts.remove(0);
        for p in parts {
            acc = Formula::and(acc, p);
        }
        acc
    }

    /// Disjunction of a nonempty list, left-associated.
    pub fn disjoin(mut parts: Vec<Formula>) -> Formula {
        let mut acc = parts.remove(0);
        for p in parts {
            acc = Formula::or(acc, p);
        }
        acc
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarName>) {
        match self {
            Formula::Atom(a) => a.terms().iter().for_each(|t| t.collect_vars(out)),
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// The conjuncts of the top-level `&`-spine.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// The disjuncts of the top-level `|`-spine.
    pub fn disjuncts(&self) -> Vec<&Formula> {
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Maximum term depth over all atoms.
    pub fn term_depth(&self) -> u32 {
        match self {
            Formula::Atom(a) => a.terms().iter().map(|t| t.depth()).max().unwrap_or(0),
            Formula::Not(f) => f.term_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.term_depth().max(b.term_depth()),
        }
    }

    pub fn contains_finite_atom(&self) -> bool {
        match self {
            Formula::Atom(a) => matches!(a, Atom::Finite(_)),
            Formula::Not(f) => f.contains_finite_atom(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.contains_finite_atom() || b.contains_finite_atom(),
        }
    }
}

// ---------------------------------------------------------------------------
// Flat literals
// ---------------------------------------------------------------------------

/// Argument of a flat literal: a variable or the constant `∅`. The constant
/// is admitted transiently during normalization and eliminated before the
/// normalized output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arg {
    Var(VarName),
    Empty,
}

impl Arg {
    pub fn var(name: impl Into<String>) -> Arg {
        Arg::Var(name.into())
    }

    pub fn to_term(&self) -> Term {
        match self {
            Arg::Var(v) => Term::Var(v.clone()),
            Arg::Empty => Term::Empty,
        }
    }

    pub fn as_var(&self) -> Option<&VarName> {
        match self {
            Arg::Var(v) => Some(v),
            Arg::Empty => None,
        }
    }
}

/// A flat literal: an atom or negated atom whose arguments carry no nested
/// terms. Covers the normalized shapes (`x = y ∪ z`, `x = y ∖ z`, `x ∈ y`,
/// `x = {y_1,…,y_H}`, `x = y ⊗ z`, `x = y × z`, `x = ⋃y`, `x = ⋂y`,
/// `x = 𝒫(y)`, `x = ⊎y`) plus the pre-simplification shapes `x = y`,
/// `x = y ∩ z`, `x ⊆ y`, `x ≠ y`, `x ∉ y`, `x ⊈ y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    EqUnion(Arg, Arg, Arg),
    EqInter(Arg, Arg, Arg),
    EqDiff(Arg, Arg, Arg),
    EqCross(Arg, Arg, Arg),
    EqUCross(Arg, Arg, Arg),
    EqPow(Arg, Arg),
    EqBigUnion(Arg, Arg),
    EqBigInter(Arg, Arg),
    EqDisjUnion(Arg, Arg),
    EqDisplay(Arg, Vec<Arg>),
    EqVar(Arg, Arg),
    Mem(Arg, Arg),
    NotMem(Arg, Arg),
    Sub(Arg, Arg),
    NotSub(Arg, Arg),
    Neq(Arg, Arg),
}

impl Literal {
    /// The equivalent formula.
    pub fn to_formula(&self) -> Formula {
        let t = Arg::to_term;
        match self {
            Literal::EqUnion(x, y, z) => Formula::Atom(Atom::Eq(
                t(x),
                Term::Union(Box::new(t(y)), Box::new(t(z))),
            )),
            Literal::EqInter(x, y, z) => Formula::Atom(Atom::Eq(
                t(x),
                Term::Inter(Box::new(t(y)), Box::new(t(z))),
            )),
            Literal::EqDiff(x, y, z) => Formula::Atom(Atom::Eq(
                t(x),
                Term::Diff(Box::new(t(y)), Box::new(t(z))),
            )),
            Literal::EqCross(x, y, z) => Formula::Atom(Atom::Eq(
                t(x),
                Term::Cross(Box::new(t(y)), Box::new(t(z))),
            )),
            Literal::EqUCross(x, y, z) => Formula::Atom(Atom::Eq(
                t(x),
                Term::UCross(Box::new(t(y)), Box::new(t(z))),
            )),
            Literal::EqPow(x, y) => Formula::Atom(Atom::Eq(t(x), Term::Pow(Box::new(t(y))))),
            Literal::EqBigUnion(x, y) => {
                Formula::Atom(Atom::Eq(t(x), Term::BigUnion(Box::new(t(y)))))
            }
            Literal::EqBigInter(x, y) => {
                Formula::Atom(Atom::Eq(t(x), Term::BigInter(Box::new(t(y)))))
            }
            Literal::EqDisjUnion(x, y) => {
                Formula::Atom(Atom::Eq(t(x), Term::DisjUnion(Box::new(t(y)))))
            }
            Literal::EqDisplay(x, ys) => Formula::Atom(Atom::Eq(
                t(x),
                Term::Display(ys.iter().map(t).collect()),
            )),
            Literal::EqVar(x, y) => Formula::Atom(Atom::Eq(t(x), t(y))),
            Literal::Mem(x, y) => Formula::Atom(Atom::Mem(t(x), t(y))),
            Literal::NotMem(x, y) => Formula::not(Formula::Atom(Atom::Mem(t(x), t(y)))),
            Literal::Sub(x, y) => Formula::Atom(Atom::Sub(t(x), t(y))),
            Literal::NotSub(x, y) => Formula::not(Formula::Atom(Atom::Sub(t(x), t(y)))),
            Literal::Neq(x, y) => Formula::not(Formula::Atom(Atom::Eq(t(x), t(y)))),
        }
    }

    pub fn args(&self) -> Vec<&Arg> {
        match self {
            Literal::EqUnion(x, y, z)
            | Literal::EqInter(x, y, z)
            | Literal::EqDiff(x, y, z)
            | Literal::EqCross(x, y, z)
            | Literal::EqUCross(x, y, z) => vec![x, y, z],
            Literal::EqPow(x, y)
            | Literal::EqBigUnion(x, y)
            | Literal::EqBigInter(x, y)
            | Literal::EqDisjUnion(x, y)
            | Literal::EqVar(x, y)
            | Literal::Mem(x, y)
            | Literal::NotMem(x, y)
            | Literal::Sub(x, y)
            | Literal::NotSub(x, y)
            | Literal::Neq(x, y) => vec![x, y],
            Literal::EqDisplay(x, ys) => {
                let mut out = vec![x];
                out.extend(ys.iter());
                out
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        self.args()
            .into_iter()
            .filter_map(|a| a.as_var().cloned())
            .collect()
    }

    /// Whether the literal is one of the normalized shapes with
    /// variable-only arguments.
    pub fn is_normalized(&self) -> bool {
        let shape_ok = matches!(
            self,
            Literal::EqUnion(..)
                | Literal::EqDiff(..)
                | Literal::Mem(..)
                | Literal::EqDisplay(..)
                | Literal::EqCross(..)
                | Literal::EqUCross(..)
                | Literal::EqBigUnion(..)
                | Literal::EqBigInter(..)
                | Literal::EqDisjUnion(..)
                | Literal::EqPow(..)
        );
        shape_ok && self.args().iter().all(|a| a.as_var().is_some())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

// ---------------------------------------------------------------------------
// Fragments
// ---------------------------------------------------------------------------

/// The decidable-fragment lattice the workbench distinguishes. `SFull`
/// covers everything outside the named fragments (big union/intersection,
/// set displays, `Finite`, or mixes of powerset and products).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FragmentTag {
    Mls,
    Mlsp,
    Mlsc,
    Mlscnotord,
    MlscnotordDu,
    SFull,
}

impl fmt::Display for FragmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FragmentTag::Mls => "MLS",
            FragmentTag::Mlsp => "MLSP",
            FragmentTag::Mlsc => "MLSC",
            FragmentTag::Mlscnotord => "MLSCNOTORD",
            FragmentTag::MlscnotordDu => "MLSCNOTORD_DU",
            FragmentTag::SFull => "S_FULL",
        })
    }
}

impl FragmentTag {
    /// Containment order of the fragments (a partial order; `MLSP`, `MLSC`
    /// and the `NOTORD` branch are pairwise incomparable).
    pub fn contains(self, other: FragmentTag) -> bool {
        use FragmentTag::*;
        match (other, self) {
            (a, b) if a == b => true,
            (Mls, _) => true,
            (_, SFull) => true,
            (Mlscnotord, MlscnotordDu) => true,
            _ => false,
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Features {
    pow: bool,
    cross: bool,
    ucross: bool,
    dun: bool,
    other: bool,
}

fn term_features(t: &Term, f: &mut Features) {
    match t {
        Term::Var(_) | Term::Empty => {}
        Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) => {
            term_features(a, f);
            term_features(b, f);
        }
        Term::Cross(a, b) => {
            f.cross = true;
            term_features(a, f);
            term_features(b, f);
        }
        Term::UCross(a, b) => {
            f.ucross = true;
            term_features(a, f);
            term_features(b, f);
        }
        Term::Pow(t) => {
            f.pow = true;
            term_features(t, f);
        }
        Term::DisjUnion(t) => {
            f.dun = true;
            term_features(t, f);
        }
        Term::BigUnion(t) | Term::BigInter(t) => {
            f.other = true;
            term_features(t, f);
        }
        Term::Display(ts) => {
            f.other = true;
            ts.iter().for_each(|t| term_features(t, f));
        }
    }
}

fn formula_features(formula: &Formula, f: &mut Features) {
    match formula {
        Formula::Atom(a) => {
            if matches!(a, Atom::Finite(_)) {
                f.other = true;
            }
            a.terms().iter().for_each(|t| term_features(t, f));
        }
        Formula::Not(g) => formula_features(g, f),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            formula_features(a, f);
            formula_features(b, f);
        }
    }
}

/// The least fragment whose operator set covers the formula.
pub fn classify_fragment(formula: &Formula) -> FragmentTag {
    let mut f = Features::default();
    formula_features(formula, &mut f);
    if f.other {
        return FragmentTag::SFull;
    }
    match (f.pow, f.cross, f.ucross, f.dun) {
        (false, false, false, false) => FragmentTag::Mls,
        (true, false, false, false) => FragmentTag::Mlsp,
        (false, true, false, false) => FragmentTag::Mlsc,
        (false, false, true, false) => FragmentTag::Mlscnotord,
        (false, false, _, true) => FragmentTag::MlscnotordDu,
        _ => FragmentTag::SFull,
    }
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Empty => f.write_str("0"),
            Term::Union(a, b) => write!(f, "un({a},{b})"),
            Term::Inter(a, b) => write!(f, "int({a},{b})"),
            Term::Diff(a, b) => write!(f, "diff({a},{b})"),
            Term::Cross(a, b) => write!(f, "cross({a},{b})"),
            Term::UCross(a, b) => write!(f, "ucross({a},{b})"),
            Term::Pow(t) => write!(f, "pow({t})"),
            Term::BigUnion(t) => write!(f, "Un({t})"),
            Term::BigInter(t) => write!(f, "In({t})"),
            Term::DisjUnion(t) => write!(f, "dun({t})"),
            Term::Display(ts) => {
                f.write_str("{")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Mem(a, b) => write!(f, "{a} in {b}"),
            Atom::Eq(a, b) => write!(f, "{a} = {b}"),
            Atom::Sub(a, b) => write!(f, "{a} sub {b}"),
            Atom::Finite(t) => write!(f, "Finite({t})"),
        }
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, child: &Formula) -> fmt::Result {
    // Binary connectives get parenthesized deterministically; atoms and
    // negations bind tightly enough to stand bare.
    match child {
        Formula::Atom(_) | Formula::Not(_) => write!(f, "{child}"),
        _ => write!(f, "({child})"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            // Negated atoms print with the sugar relators so flat literals
            // stay one-line; these reparse to the same AST.
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(Atom::Mem(a, b)) => write!(f, "{a} notin {b}"),
                Formula::Atom(Atom::Eq(a, b)) => write!(f, "{a} != {b}"),
                Formula::Atom(Atom::Sub(a, b)) => write!(f, "{a} nsub {b}"),
                Formula::Atom(Atom::Finite(t)) => write!(f, "!Finite({t})"),
                other => {
                    f.write_str("!")?;
                    fmt_child(f, other)
                }
            },
            Formula::And(a, b) => {
                fmt_child(f, a)?;
                f.write_str(" & ")?;
                fmt_child(f, b)
            }
            Formula::Or(a, b) => {
                fmt_child(f, a)?;
                f.write_str(" | ")?;
                fmt_child(f, b)
            }
            Formula::Implies(a, b) => {
                fmt_child(f, a)?;
                f.write_str(" -> ")?;
                fmt_child(f, b)
            }
            Formula::Iff(a, b) => {
                fmt_child(f, a)?;
                f.write_str(" <-> ")?;
                fmt_child(f, b)
            }
        }
    }
}

/// Renders a formula in the concrete grammar; [`parse_formula`] of the
/// result returns the same AST.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

// ---------------------------------------------------------------------------
// Lexer and parser
// ---------------------------------------------------------------------------

/// Parse error with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "un", "int", "diff", "cross", "ucross", "pow", "Un", "In", "dun", "in", "notin", "sub",
    "nsub", "Finite",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Keyword(&'static str),
    Zero,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Amp,
    Pipe,
    Bang,
    Eq,
    NotEq,
    Arrow,
    Iff,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Keyword(k) => write!(f, "`{k}`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::NotEq => f.write_str("`!=`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn tokens(mut self) -> Result<(Vec<Spanned>, (usize, usize)), SyntaxError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            if c == b'#' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.bump();
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match c {
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'{' => {
                    self.bump();
                    Tok::LBrace
                }
                b'}' => {
                    self.bump();
                    Tok::RBrace
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'&' => {
                    self.bump();
                    Tok::Amp
                }
                b'|' => {
                    self.bump();
                    Tok::Pipe
                }
                b'=' => {
                    self.bump();
                    Tok::Eq
                }
                b'!' => {
                    self.bump();
                    if self.src.get(self.pos) == Some(&b'=') {
                        self.bump();
                        Tok::NotEq
                    } else {
                        Tok::Bang
                    }
                }
                b'-' => {
                    self.bump();
                    if self.src.get(self.pos) == Some(&b'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        return Err(self.err("expected `->`"));
                    }
                }
                b'<' => {
                    self.bump();
                    if self.src.get(self.pos) == Some(&b'-')
                        && self.src.get(self.pos + 1) == Some(&b'>')
                    {
                        self.bump();
                        self.bump();
                        Tok::Iff
                    } else {
                        return Err(self.err("expected `<->`"));
                    }
                }
                b'0' => {
                    self.bump();
                    if self
                        .src
                        .get(self.pos)
                        .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_' || *c == b'\'')
                    {
                        return Err(self.err("identifiers may not start with a digit"));
                    }
                    Tok::Zero
                }
                c if c.is_ascii_digit() => {
                    return Err(self.err("arithmetic literals are not supported (only `0`)"));
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while self.pos < self.src.len() {
                        let c = self.src[self.pos];
                        if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    match KEYWORDS.iter().find(|k| **k == word) {
                        Some(k) => Tok::Keyword(k),
                        None => Tok::Ident(word.to_string()),
                    }
                }
                other => {
                    return Err(self.err(format!("unexpected character `{}`", other as char)));
                }
            };
            out.push((tok, line, col));
        }
        Ok((out, (self.line, self.col)))
    }
}

struct Parser {
    toks: Vec<Spanned>,
    idx: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _, _)| t)
    }

    fn pos(&self) -> (usize, usize) {
        self.toks
            .get(self.idx)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> SyntaxError {
        let (line, col) = self.pos();
        SyntaxError {
            line,
            col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _, _)| t.clone());
        self.idx += 1;
        t
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if t == tok => {
                self.idx += 1;
                Ok(())
            }
            Some(t) => {
                let t = t.clone();
                Err(self.err(format!("expected {tok}, found {t}")))
            }
            None => Err(self.err(format!("expected {tok}, found end of input"))),
        }
    }

    // iff := implies (`<->` implies)*, left-associative
    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.implies()?;
        while self.peek() == Some(&Tok::Iff) {
            self.idx += 1;
            let rhs = self.implies()?;
            acc = Formula::Iff(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    // implies := or (`->` implies)?, right-associative
    fn implies(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.idx += 1;
            let rhs = self.implies()?;
            Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.idx += 1;
            let rhs = self.and()?;
            acc = Formula::Or(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.idx += 1;
            let rhs = self.unary()?;
            acc = Formula::And(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.idx += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.idx += 1;
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        if self.peek() == Some(&Tok::Keyword("Finite")) {
            self.idx += 1;
            self.expect(&Tok::LParen)?;
            let t = self.term()?;
            self.expect(&Tok::RParen)?;
            return Ok(Formula::Atom(Atom::Finite(t)));
        }
        let lhs = self.term()?;
        match self.bump() {
            Some(Tok::Keyword("in")) => Ok(Formula::Atom(Atom::Mem(lhs, self.term()?))),
            Some(Tok::Keyword("notin")) => {
                Ok(Formula::not(Formula::Atom(Atom::Mem(lhs, self.term()?))))
            }
            Some(Tok::Keyword("sub")) => Ok(Formula::Atom(Atom::Sub(lhs, self.term()?))),
            Some(Tok::Keyword("nsub")) => {
                Ok(Formula::not(Formula::Atom(Atom::Sub(lhs, self.term()?))))
            }
            Some(Tok::Eq) => Ok(Formula::Atom(Atom::Eq(lhs, self.term()?))),
            Some(Tok::NotEq) => Ok(Formula::not(Formula::Atom(Atom::Eq(lhs, self.term()?)))),
            Some(t) => {
                self.idx -= 1;
                Err(self.err(format!("expected a relator, found {t}")))
            }
            None => Err(self.err("expected a relator, found end of input")),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.bump() {
            Some(Tok::Ident(v)) => Ok(Term::Var(v)),
            Some(Tok::Zero) => Ok(Term::Empty),
            Some(Tok::Keyword(k @ ("un" | "int" | "diff" | "cross" | "ucross"))) => {
                self.expect(&Tok::LParen)?;
                let a = Box::new(self.term()?);
                self.expect(&Tok::Comma)?;
                let b = Box::new(self.term()?);
                self.expect(&Tok::RParen)?;
                Ok(match k {
                    "un" => Term::Union(a, b),
                    "int" => Term::Inter(a, b),
                    "diff" => Term::Diff(a, b),
                    "cross" => Term::Cross(a, b),
                    _ => Term::UCross(a, b),
                })
            }
            Some(Tok::Keyword(k @ ("pow" | "Un" | "In" | "dun"))) => {
                self.expect(&Tok::LParen)?;
                let t = Box::new(self.term()?);
                self.expect(&Tok::RParen)?;
                Ok(match k {
                    "pow" => Term::Pow(t),
                    "Un" => Term::BigUnion(t),
                    "In" => Term::BigInter(t),
                    _ => Term::DisjUnion(t),
                })
            }
            Some(Tok::LBrace) => {
                let mut elems = vec![self.term()?];
                loop {
                    match self.bump() {
                        Some(Tok::Comma) => elems.push(self.term()?),
                        Some(Tok::RBrace) => return Ok(Term::Display(elems)),
                        Some(t) => {
                            self.idx -= 1;
                            return Err(self.err(format!("expected `,` or `}}`, found {t}")));
                        }
                        None => return Err(self.err("unterminated set display")),
                    }
                }
            }
            Some(t) => {
                self.idx -= 1;
                Err(self.err(format!("expected a term, found {t}")))
            }
            None => Err(self.err("expected a term, found end of input")),
        }
    }
}

/// Parses a formula from text. `#` starts a line comment.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let (toks, end) = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, idx: 0, end };
    let f = p.formula()?;
    if let Some(t) = p.peek() {
        let t = t.clone();
        return Err(p.err(format!("unexpected {t} after formula")));
    }
    Ok(f)
}

/// Parses a single term from text (used for CLI arguments).
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let (toks, end) = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, idx: 0, end };
    let t = p.term()?;
    if let Some(tok) = p.peek() {
        let tok = tok.clone();
        return Err(p.err(format!("unexpected {tok} after term")));
    }
    Ok(t)
}

impl FromStr for Formula {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Formula, SyntaxError> {
        parse_formula(s)
    }
}
