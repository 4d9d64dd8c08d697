//! Tarskian satisfaction in finite structures, and truth matrices over chains.
//!
//! [`evaluate`] compiles a formula against a structure: symbols and named
//! constants are resolved up front, variables become slots, conjuncts (resp.
//! disjuncts) that do not mention a quantified variable are hoisted out of
//! the existential (resp. universal) scope, and quantifier nodes memoize on
//! the values of their free slots when the key space is small.
//! [`evaluate_reference`] is a plain recursive evaluator kept as the oracle.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::structure::{ChainFamily, Element, FiniteStructure};
use crate::syntax::pool::SentencePool;
use crate::syntax::{Formula, Quantifier, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("constant @{0} is not named in the structure")]
    UnresolvedConstant(String),
    #[error("no value assigned to free variable `{0}`")]
    MissingAssignment(String),
    #[error("symbol `{0}` is not in the structure's signature")]
    UnknownSymbol(String),
    #[error("`{name}` applied to {got} argument(s), expected {expected}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("formula nests more than {0} variables")]
    TooManyVariables(usize),
    #[error("pool signature does not match the chain signature")]
    SignatureMismatch,
}

/// Variable assignment by name.
pub type Assignment = BTreeMap<String, Element>;

const MAX_SLOTS: usize = 64;
const MEMO_CAP: usize = 1 << 16;

#[derive(Clone, Debug)]
enum CTerm {
    Slot(usize),
    Elem(Element),
    App(usize, Vec<CTerm>),
}

#[derive(Clone, Debug)]
enum Node {
    Eq(CTerm, CTerm),
    Rel(usize, Vec<CTerm>),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Quant { q: Quantifier, slot: usize, body: Box<Node>, free: u64, memo: Option<usize> },
}

fn term_slots(t: &CTerm) -> u64 {
    match t {
        CTerm::Slot(s) => 1 << s,
        CTerm::Elem(_) => 0,
        CTerm::App(_, args) => args.iter().fold(0, |m, a| m | term_slots(a)),
    }
}

fn node_slots(n: &Node) -> u64 {
    match n {
        Node::Eq(a, b) => term_slots(a) | term_slots(b),
        Node::Rel(_, args) => args.iter().fold(0, |m, a| m | term_slots(a)),
        Node::Not(g) => node_slots(g),
        Node::And(parts) | Node::Or(parts) => parts.iter().fold(0, |m, p| m | node_slots(p)),
        Node::Quant { free, .. } => *free,
    }
}

/// A formula compiled against one structure. Free variables occupy slots
/// `0..free.len()` in the order given at compile time.
#[derive(Clone, Debug)]
pub struct CompiledFormula<'s> {
    structure: &'s FiniteStructure,
    root: Node,
    slots: usize,
    memo_sizes: Vec<usize>,
}

struct Compiler<'s> {
    s: &'s FiniteStructure,
    scope: Vec<(String, usize)>,
    max_slot: usize,
    memo_sizes: Vec<usize>,
}

impl<'s> Compiler<'s> {
    fn term(&self, t: &Term) -> Result<CTerm, EvalError> {
        match t {
            Term::Var(v) => self
                .scope
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|&(_, slot)| CTerm::Slot(slot))
                .ok_or_else(|| EvalError::MissingAssignment(v.clone())),
            Term::Const(c) => self.s.name(c).map(CTerm::Elem).ok_or_else(|| EvalError::UnresolvedConstant(c.clone())),
            Term::App(f, args) => {
                let fi = self.s.signature().function_index(f).ok_or_else(|| EvalError::UnknownSymbol(f.clone()))?;
                let arity = self.s.signature().functions()[fi].arity;
                if arity != args.len() {
                    return Err(EvalError::Arity { name: f.clone(), expected: arity, got: args.len() });
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                Ok(CTerm::App(fi, args))
            }
        }
    }

    fn node(&mut self, f: &Formula) -> Result<Node, EvalError> {
        Ok(match f {
            Formula::Eq(a, b) => Node::Eq(self.term(a)?, self.term(b)?),
            Formula::Rel(r, args) => {
                let ri = self.s.signature().relation_index(r).ok_or_else(|| EvalError::UnknownSymbol(r.clone()))?;
                let arity = self.s.signature().relations()[ri].arity;
                if arity != args.len() {
                    return Err(EvalError::Arity { name: r.clone(), expected: arity, got: args.len() });
                }
                Node::Rel(ri, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?)
            }
            Formula::Not(g) => Node::Not(Box::new(self.node(g)?)),
            Formula::And(a, b) => {
                let mut parts = Vec::new();
                for side in [a, b] {
                    match self.node(side)? {
                        Node::And(inner) => parts.extend(inner),
                        other => parts.push(other),
                    }
                }
                Node::And(parts)
            }
            Formula::Or(a, b) => {
                let mut parts = Vec::new();
                for side in [a, b] {
                    match self.node(side)? {
                        Node::Or(inner) => parts.extend(inner),
                        other => parts.push(other),
                    }
                }
                Node::Or(parts)
            }
            Formula::Quant(q, v, body) => {
                let slot = self.scope.len();
                if slot >= MAX_SLOTS {
                    return Err(EvalError::TooManyVariables(MAX_SLOTS));
                }
                self.max_slot = self.max_slot.max(slot + 1);
                self.scope.push((v.clone(), slot));
                let body = self.node(body);
                self.scope.pop();
                self.quantify(*q, slot, body?)
            }
        })
    }

    /// Builds `q slot. body`, hoisting the parts of a conjunction (for `∃`) or
    /// disjunction (for `∀`) that do not mention `slot`.
    fn quantify(&mut self, q: Quantifier, slot: usize, body: Node) -> Node {
        let bit = 1u64 << slot;
        let (outer, inner): (Vec<Node>, Vec<Node>) = match (q, body) {
            (Quantifier::Exists, Node::And(parts)) | (Quantifier::Forall, Node::Or(parts)) => {
                parts.into_iter().partition(|p| node_slots(p) & bit == 0)
            }
            (_, other) if node_slots(&other) & bit == 0 => (vec![other], vec![]),
            (_, other) => (vec![], vec![other]),
        };
        let join = |mut parts: Vec<Node>| {
            if parts.len() == 1 {
                parts.pop().expect("one part")
            } else if q == Quantifier::Exists {
                Node::And(parts)
            } else {
                Node::Or(parts)
            }
        };
        if inner.is_empty() {
            return join(outer);
        }
        let body = join(inner);
        let free = node_slots(&body) & !bit;
        let keys = self.s.size().checked_pow(free.count_ones()).filter(|&n| n <= MEMO_CAP);
        let memo = keys.map(|n| {
            self.memo_sizes.push(n);
            self.memo_sizes.len() - 1
        });
        let quant = Node::Quant { q, slot, body: Box::new(body), free, memo };
        if outer.is_empty() {
            quant
        } else {
            let mut parts = outer;
            parts.push(quant);
            join(parts)
        }
    }
}

impl<'s> CompiledFormula<'s> {
    /// Compiles `f` against `s`; `free` lists the free variables in slot order.
    pub fn new(s: &'s FiniteStructure, f: &Formula, free: &[String]) -> Result<Self, EvalError> {
        if free.len() >= MAX_SLOTS {
            return Err(EvalError::TooManyVariables(MAX_SLOTS));
        }
        let mut compiler = Compiler {
            s,
            scope: free.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect(),
            max_slot: free.len(),
            memo_sizes: Vec::new(),
        };
        let root = compiler.node(f)?;
        Ok(CompiledFormula { structure: s, root, slots: compiler.max_slot, memo_sizes: compiler.memo_sizes })
    }

    /// Evaluates with the free variables bound to `args` (in compile order).
    pub fn eval(&self, args: &[Element]) -> bool {
        let mut env = vec![0; self.slots.max(args.len())];
        env[..args.len()].copy_from_slice(args);
        let mut memo: Vec<Vec<u8>> = self.memo_sizes.iter().map(|&n| vec![0; n]).collect();
        let s = self.structure;
        let symmetric =
            s.signature().functions().is_empty() && s.signature().relations().is_empty() && s.names().is_empty();
        Run { s, memo: &mut memo, symmetric }.node(&self.root, &mut env)
    }
}

struct Run<'a> {
    s: &'a FiniteStructure,
    memo: &'a mut Vec<Vec<u8>>,
    /// Every permutation is an automorphism, so a quantifier only needs the
    /// values already bound plus one fresh element.
    symmetric: bool,
}

impl Run<'_> {
    /// Whether some value for `slot` makes `body` evaluate to `want`; the
    /// quantifier's truth is then `want`.
    fn search(
        &mut self,
        values: impl Iterator<Item = Element>,
        slot: usize,
        body: &Node,
        env: &mut [Element],
        want: bool,
    ) -> bool {
        for v in values {
            env[slot] = v;
            if self.node(body, env) == want {
                return want;
            }
        }
        !want
    }

    #[inline]
    fn term(&self, t: &CTerm, env: &[Element]) -> Element {
        match t {
            CTerm::Slot(i) => env[*i],
            CTerm::Elem(e) => *e,
            CTerm::App(fi, args) => {
                let size = self.s.size();
                let idx = args.iter().fold(0, |acc, a| acc * size + self.term(a, env));
                self.s.function_table(*fi)[idx]
            }
        }
    }

    fn node(&mut self, n: &Node, env: &mut [Element]) -> bool {
        match n {
            Node::Eq(a, b) => self.term(a, env) == self.term(b, env),
            Node::Rel(ri, args) => {
                let size = self.s.size();
                let idx = args.iter().fold(0, |acc, a| acc * size + self.term(a, env));
                self.s.relation_table(*ri)[idx]
            }
            Node::Not(g) => !self.node(g, env),
            Node::And(parts) => parts.iter().all(|p| self.node(p, env)),
            Node::Or(parts) => parts.iter().any(|p| self.node(p, env)),
            Node::Quant { q, slot, body, free, memo } => {
                let key = memo.map(|m| {
                    let size = self.s.size();
                    let mut bits = *free;
                    let mut k = 0;
                    while bits != 0 {
                        let i = bits.trailing_zeros() as usize;
                        k = k * size + env[i];
                        bits &= bits - 1;
                    }
                    (m, k)
                });
                if let Some((m, k)) = key {
                    match self.memo[m][k] {
                        1 => return false,
                        2 => return true,
                        _ => {}
                    }
                }
                let want = *q == Quantifier::Exists;
                let result = if self.symmetric {
                    let mut bound: Vec<Element> = env[..*slot].to_vec();
                    bound.sort_unstable();
                    bound.dedup();
                    let fresh = (0..self.s.size()).find(|v| bound.binary_search(v).is_err());
                    bound.extend(fresh);
                    self.search(bound.into_iter(), *slot, body, env, want)
                } else {
                    self.search(0..self.s.size(), *slot, body, env, want)
                };
                if let Some((m, k)) = key {
                    self.memo[m][k] = if result { 2 } else { 1 };
                }
                result
            }
        }
    }
}

/// Truth of sentence `f` in `s`.
pub fn evaluate(s: &FiniteStructure, f: &Formula) -> Result<bool, EvalError> {
    Ok(CompiledFormula::new(s, f, &[])?.eval(&[]))
}

/// Truth of `f` in `s` under `asg`, which must cover every free variable.
pub fn evaluate_with_assignment(s: &FiniteStructure, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    let free: Vec<String> = f.free_variables().into_iter().collect();
    let args = free
        .iter()
        .map(|v| asg.get(v).copied().ok_or_else(|| EvalError::MissingAssignment(v.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CompiledFormula::new(s, f, &free)?.eval(&args))
}

/// Direct recursive evaluation without compilation, hoisting or memoization.
pub fn evaluate_reference(s: &FiniteStructure, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    fn term(s: &FiniteStructure, t: &Term, asg: &Assignment) -> Result<Element, EvalError> {
        match t {
            Term::Var(v) => asg.get(v).copied().ok_or_else(|| EvalError::MissingAssignment(v.clone())),
            Term::Const(c) => s.name(c).ok_or_else(|| EvalError::UnresolvedConstant(c.clone())),
            Term::App(name, args) => {
                let fi = s.signature().function_index(name).ok_or_else(|| EvalError::UnknownSymbol(name.clone()))?;
                let vals = args.iter().map(|a| term(s, a, asg)).collect::<Result<Vec<_>, _>>()?;
                if vals.len() != s.signature().functions()[fi].arity {
                    return Err(EvalError::Arity {
                        name: name.clone(),
                        expected: s.signature().functions()[fi].arity,
                        got: vals.len(),
                    });
                }
                Ok(s.apply(fi, &vals))
            }
        }
    }
    match f {
        Formula::Eq(a, b) => Ok(term(s, a, asg)? == term(s, b, asg)?),
        Formula::Rel(r, args) => {
            let ri = s.signature().relation_index(r).ok_or_else(|| EvalError::UnknownSymbol(r.clone()))?;
            let vals = args.iter().map(|a| term(s, a, asg)).collect::<Result<Vec<_>, _>>()?;
            if vals.len() != s.signature().relations()[ri].arity {
                return Err(EvalError::Arity {
                    name: r.clone(),
                    expected: s.signature().relations()[ri].arity,
                    got: vals.len(),
                });
            }
            Ok(s.holds(ri, &vals))
        }
        Formula::Not(g) => Ok(!evaluate_reference(s, g, asg)?),
        Formula::And(a, b) => Ok(evaluate_reference(s, a, asg)? && evaluate_reference(s, b, asg)?),
        Formula::Or(a, b) => Ok(evaluate_reference(s, a, asg)? || evaluate_reference(s, b, asg)?),
        Formula::Quant(q, v, body) => {
            let mut inner = asg.clone();
            let mut results = Vec::with_capacity(s.size());
            for e in s.universe() {
                inner.insert(v.clone(), e);
                results.push(evaluate_reference(s, body, &inner)?);
            }
            Ok(match q {
                Quantifier::Exists => results.into_iter().any(|b| b),
                Quantifier::Forall => results.into_iter().all(|b| b),
            })
        }
    }
}

/// Where a truth-matrix cell came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Evaluated,
    Oracle,
    /// The sentence names a constant absent at this index; the cell reads false.
    UnresolvedConstant,
}

/// Long-run behavior of an oracle row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventualBehavior {
    TrueFrom(usize),
    FalseFrom(usize),
    Oscillating(String),
}

#[derive(Clone, Debug)]
pub struct Row {
    pub label: String,
    pub sentence: Option<Formula>,
    pub cells: Vec<bool>,
    pub provenance: Vec<Provenance>,
    pub eventual: Option<EventualBehavior>,
}

impl Row {
    /// `T`, `F` or `U` per column.
    pub fn symbols(&self) -> Vec<char> {
        self.cells
            .iter()
            .zip(&self.provenance)
            .map(|(&c, p)| match (p, c) {
                (Provenance::UnresolvedConstant, _) => 'U',
                (_, true) => 'T',
                (_, false) => 'F',
            })
            .collect()
    }
}

/// Pool-by-index boolean matrix. `partners[i]` is the designated negation of
/// row `i` when the rows come from a negation-closed pool.
#[derive(Clone, Debug)]
pub struct TruthMatrix {
    pub source: String,
    pub horizon: usize,
    pub rows: Vec<Row>,
    pub partners: Option<Vec<usize>>,
}

impl TruthMatrix {
    pub fn is_oracle(&self) -> bool {
        self.rows.iter().all(|r| r.eventual.is_some())
    }

    /// The matrix restricted to the given 1-based columns.
    pub fn columns(&self, indices: &[usize]) -> TruthMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| Row {
                label: r.label.clone(),
                sentence: r.sentence.clone(),
                cells: indices.iter().map(|&n| r.cells[n - 1]).collect(),
                provenance: indices.iter().map(|&n| r.provenance[n - 1]).collect(),
                eventual: None,
            })
            .collect();
        TruthMatrix {
            source: format!("{}[columns]", self.source),
            horizon: indices.len(),
            rows,
            partners: self.partners.clone(),
        }
    }
}

/// How [`tabulate`] treats sentences naming constants absent at an index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum UnresolvedPolicy {
    #[default]
    Error,
    ReadAsFalse,
}

/// Evaluates every pool sentence on every chain member.
pub fn tabulate(chain: &ChainFamily, pool: &SentencePool, policy: UnresolvedPolicy) -> Result<TruthMatrix, EvalError> {
    if pool.signature() != chain.signature() {
        return Err(EvalError::SignatureMismatch);
    }
    let rows = pool
        .sentences()
        .par_iter()
        .map(|sentence| {
            let mut cells = Vec::with_capacity(chain.len());
            let mut provenance = Vec::with_capacity(chain.len());
            for member in chain.members() {
                match evaluate(member, sentence) {
                    Ok(v) => {
                        cells.push(v);
                        provenance.push(Provenance::Evaluated);
                    }
                    Err(EvalError::UnresolvedConstant(_)) if policy == UnresolvedPolicy::ReadAsFalse => {
                        cells.push(false);
                        provenance.push(Provenance::UnresolvedConstant);
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(Row { label: sentence.to_string(), sentence: Some(sentence.clone()), cells, provenance, eventual: None })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TruthMatrix {
        source: chain.label().to_string(),
        horizon: chain.len(),
        rows,
        partners: pool.partners().map(|p| p.to_vec()),
    })
}
