//! Finite structures over finite signatures, substructure checks and
//! ascending chains of structures linked by explicit embeddings.
//!
//! Universes are always `0..size`. Identity of elements across chain members
//! is carried only by the embeddings, never by shared labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// An element of a finite universe.
pub type Element = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("duplicate symbol name `{0}`")]
    DuplicateSymbol(String),
    #[error("relation symbol `{0}` must have positive arity")]
    NullaryRelation(String),
    #[error("invalid symbol declaration `{0}` (expected name/arity)")]
    BadDeclaration(String),
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("element map has {got} entries but the universe has {expected} elements")]
    MapNotTotal { expected: usize, got: usize },
    #[error("element map sends {element} to {image}, outside a universe of size {size}")]
    MapOutOfRange { element: Element, image: Element, size: usize },
    #[error("invalid structure: {0}")]
    Invalid(ValidationReport),
    #[error("chain needs at least one member")]
    EmptyChain,
    #[error("chain has {members} members but {embeddings} embeddings")]
    EmbeddingCount { members: usize, embeddings: usize },
    #[error("step {step} of the chain is not a substructure embedding")]
    NotAnEmbedding { step: usize },
    #[error("step {step} of the chain does not preserve constant `{name}`")]
    NameNotPreserved { step: usize, name: String },
    #[error("chain index {0} out of range")]
    IndexOutOfRange(usize),
}

/// A function or relation symbol together with its arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol { name: name.into(), arity }
    }

    /// Parses the `name/arity` notation used in structure files.
    pub fn parse(decl: &str) -> Result<Self, StructureError> {
        let bad = || StructureError::BadDeclaration(decl.to_string());
        let (name, arity) = decl.rsplit_once('/').ok_or_else(bad)?;
        let name = name.trim();
        if !is_identifier(name) {
            return Err(bad());
        }
        let arity = arity.trim().parse::<usize>().map_err(|_| bad())?;
        Ok(Symbol::new(name, arity))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A signature: function symbols (arity 0 allowed, acting as constants of the
/// base language) and relation symbols of positive arity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    functions: Vec<Symbol>,
    relations: Vec<Symbol>,
}

impl Signature {
    pub fn new(functions: Vec<Symbol>, relations: Vec<Symbol>) -> Result<Self, StructureError> {
        let mut seen = BTreeSet::new();
        for sym in functions.iter().chain(relations.iter()) {
            if !seen.insert(sym.name.as_str()) {
                return Err(StructureError::DuplicateSymbol(sym.name.clone()));
            }
        }
        if let Some(r) = relations.iter().find(|r| r.arity == 0) {
            return Err(StructureError::NullaryRelation(r.name.clone()));
        }
        Ok(Signature { functions, relations })
    }

    /// The empty signature (pure sets with equality).
    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn functions(&self) -> &[Symbol] {
        &self.functions
    }

    pub fn relations(&self) -> &[Symbol] {
        &self.relations
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|s| s.name == name)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|s| s.name == name)
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fs: Vec<String> = self.functions.iter().map(|s| s.to_string()).collect();
        let rs: Vec<String> = self.relations.iter().map(|s| s.to_string()).collect();
        write!(f, "functions [{}] relations [{}]", fs.join(", "), rs.join(", "))
    }
}

/// Number of argument tuples of the given arity over a universe of `size`.
pub(crate) fn tuple_count(size: usize, arity: usize) -> usize {
    size.pow(arity as u32)
}

/// Position of `tuple` in lexicographic order of `size^arity`.
pub(crate) fn tuple_index(size: usize, tuple: &[Element]) -> usize {
    tuple.iter().fold(0, |acc, &e| acc * size + e)
}

/// Inverse of [`tuple_index`].
pub(crate) fn tuple_at(size: usize, arity: usize, mut index: usize) -> Vec<Element> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % size;
        index /= size;
    }
    out
}

/// Unvalidated structure data, as read from a file or assembled by hand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawStructure {
    pub signature: Signature,
    pub size: usize,
    /// Flat table per function symbol, outputs listed in lexicographic order
    /// of the input tuples.
    pub functions: BTreeMap<String, Vec<Element>>,
    pub relations: BTreeMap<String, Vec<Vec<Element>>>,
    pub names: BTreeMap<String, Element>,
}

/// One broken invariant found by [`validate_structure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyUniverse,
    UnknownSymbol { symbol: String },
    MissingFunctionTable { symbol: String },
    PartialFunctionTable { symbol: String, missing: Vec<Element> },
    OversizedFunctionTable { symbol: String, entries: usize },
    FunctionValueOutOfUniverse { symbol: String, input: Vec<Element>, value: Element },
    RelationArity { symbol: String, tuple: Vec<Element> },
    RelationTupleOutOfUniverse { symbol: String, tuple: Vec<Element> },
    NameOutOfUniverse { name: String, element: Element },
    BadName { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyUniverse => write!(f, "empty universe"),
            Violation::UnknownSymbol { symbol } => write!(f, "unknown symbol `{symbol}`"),
            Violation::MissingFunctionTable { symbol } => {
                write!(f, "missing function table for `{symbol}`")
            }
            Violation::PartialFunctionTable { symbol, missing } => {
                write!(f, "partial function table: `{symbol}` undefined at {missing:?}")
            }
            Violation::OversizedFunctionTable { symbol, entries } => {
                write!(f, "function table for `{symbol}` has {entries} entries, too many")
            }
            Violation::FunctionValueOutOfUniverse { symbol, input, value } => {
                write!(f, "`{symbol}`{input:?} = {value} lies outside the universe")
            }
            Violation::RelationArity { symbol, tuple } => {
                write!(f, "tuple {tuple:?} has the wrong arity for `{symbol}`")
            }
            Violation::RelationTupleOutOfUniverse { symbol, tuple } => {
                write!(f, "tuple {tuple:?} of `{symbol}` lies outside the universe")
            }
            Violation::NameOutOfUniverse { name, element } => {
                write!(f, "constant @{name} names {element}, outside the universe")
            }
            Violation::BadName { name } => write!(f, "`{name}` is not a valid constant name"),
        }
    }
}

/// Result of [`validate_structure`]: `ok` iff there are no violations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks every structural invariant of `raw`. Violations are returned as
/// data; nothing here fails.
pub fn validate_structure(raw: &RawStructure) -> ValidationReport {
    let mut violations = Vec::new();
    let size = raw.size;
    if size == 0 {
        violations.push(Violation::EmptyUniverse);
    }
    for name in raw.functions.keys() {
        if raw.signature.function_index(name).is_none() {
            violations.push(Violation::UnknownSymbol { symbol: name.clone() });
        }
    }
    for name in raw.relations.keys() {
        if raw.signature.relation_index(name).is_none() {
            violations.push(Violation::UnknownSymbol { symbol: name.clone() });
        }
    }
    for sym in raw.signature.functions() {
        let Some(table) = raw.functions.get(&sym.name) else {
            violations.push(Violation::MissingFunctionTable { symbol: sym.name.clone() });
            continue;
        };
        if size == 0 {
            continue;
        }
        let expected = tuple_count(size, sym.arity);
        if table.len() < expected {
            violations.push(Violation::PartialFunctionTable {
                symbol: sym.name.clone(),
                missing: tuple_at(size, sym.arity, table.len()),
            });
        } else if table.len() > expected {
            violations.push(Violation::OversizedFunctionTable { symbol: sym.name.clone(), entries: table.len() });
        }
        for (i, &value) in table.iter().enumerate().take(expected) {
            if value >= size {
                violations.push(Violation::FunctionValueOutOfUniverse {
                    symbol: sym.name.clone(),
                    input: tuple_at(size, sym.arity, i),
                    value,
                });
            }
        }
    }
    for sym in raw.signature.relations() {
        let Some(tuples) = raw.relations.get(&sym.name) else {
            continue;
        };
        for tuple in tuples {
            if tuple.len() != sym.arity {
                violations.push(Violation::RelationArity { symbol: sym.name.clone(), tuple: tuple.clone() });
            } else if tuple.iter().any(|&e| e >= size) {
                violations
                    .push(Violation::RelationTupleOutOfUniverse { symbol: sym.name.clone(), tuple: tuple.clone() });
            }
        }
    }
    for (name, &element) in &raw.names {
        if !is_identifier(name) {
            violations.push(Violation::BadName { name: name.clone() });
        }
        if element >= size {
            violations.push(Violation::NameOutOfUniverse { name: name.clone(), element });
        }
    }
    ValidationReport { violations }
}

/// A validated finite structure with universe `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    signature: Signature,
    size: usize,
    functions: Vec<Vec<Element>>,
    relations: Vec<Vec<bool>>,
    names: BTreeMap<String, Element>,
}

impl FiniteStructure {
    pub fn from_raw(raw: RawStructure) -> Result<Self, StructureError> {
        let report = validate_structure(&raw);
        if !report.is_ok() {
            return Err(StructureError::Invalid(report));
        }
        let size = raw.size;
        let functions = raw.signature.functions().iter().map(|sym| raw.functions[&sym.name].clone()).collect();
        let relations = raw
            .signature
            .relations()
            .iter()
            .map(|sym| {
                let mut dense = vec![false; tuple_count(size, sym.arity)];
                if let Some(tuples) = raw.relations.get(&sym.name) {
                    for t in tuples {
                        dense[tuple_index(size, t)] = true;
                    }
                }
                dense
            })
            .collect();
        Ok(FiniteStructure { signature: raw.signature, size, functions, relations, names: raw.names })
    }

    /// Builds a structure from closures computing each function and relation.
    pub fn from_fn(
        signature: Signature,
        size: usize,
        mut function: impl FnMut(usize, &[Element]) -> Element,
        mut relation: impl FnMut(usize, &[Element]) -> bool,
    ) -> Result<Self, StructureError> {
        let mut raw = RawStructure {
            signature: signature.clone(),
            size,
            functions: BTreeMap::new(),
            relations: BTreeMap::new(),
            names: BTreeMap::new(),
        };
        for (fi, sym) in signature.functions().iter().enumerate() {
            let table =
                (0..tuple_count(size, sym.arity)).map(|i| function(fi, &tuple_at(size, sym.arity, i))).collect();
            raw.functions.insert(sym.name.clone(), table);
        }
        for (ri, sym) in signature.relations().iter().enumerate() {
            let tuples = (0..tuple_count(size, sym.arity))
                .map(|i| tuple_at(size, sym.arity, i))
                .filter(|t| relation(ri, t))
                .collect();
            raw.relations.insert(sym.name.clone(), tuples);
        }
        FiniteStructure::from_raw(raw)
    }

    /// A pure set of the given size over the empty signature.
    pub fn pure_set(size: usize) -> Self {
        FiniteStructure::from_fn(Signature::empty(), size, |_, _| 0, |_, _| false).expect("pure set of positive size")
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn universe(&self) -> std::ops::Range<Element> {
        0..self.size
    }

    /// Applies function symbol `index` to `args`.
    #[inline]
    pub fn apply(&self, index: usize, args: &[Element]) -> Element {
        self.functions[index][tuple_index(self.size, args)]
    }

    /// Whether relation symbol `index` holds of `args`.
    #[inline]
    pub fn holds(&self, index: usize, args: &[Element]) -> bool {
        self.relations[index][tuple_index(self.size, args)]
    }

    pub fn function_table(&self, index: usize) -> &[Element] {
        &self.functions[index]
    }

    pub(crate) fn relation_table(&self, index: usize) -> &[bool] {
        &self.relations[index]
    }

    /// Tuples of relation `index` in lexicographic order.
    pub fn relation_tuples(&self, index: usize) -> Vec<Vec<Element>> {
        let arity = self.signature.relations()[index].arity;
        self.relations[index]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| tuple_at(self.size, arity, i))
            .collect()
    }

    pub fn names(&self) -> &BTreeMap<String, Element> {
        &self.names
    }

    pub fn name(&self, name: &str) -> Option<Element> {
        self.names.get(name).copied()
    }

    /// Replaces the named constants.
    pub fn with_names(mut self, names: BTreeMap<String, Element>) -> Result<Self, StructureError> {
        let mut raw = self.to_raw();
        raw.names = names;
        let report = validate_structure(&raw);
        if !report.is_ok() {
            return Err(StructureError::Invalid(report));
        }
        self.names = raw.names;
        Ok(self)
    }

    pub fn to_raw(&self) -> RawStructure {
        let functions =
            self.signature.functions().iter().zip(&self.functions).map(|(s, t)| (s.name.clone(), t.clone())).collect();
        let relations = self
            .signature
            .relations()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.clone(), self.relation_tuples(i)))
            .collect();
        RawStructure {
            signature: self.signature.clone(),
            size: self.size,
            functions,
            relations,
            names: self.names.clone(),
        }
    }

    /// The isomorphic copy obtained by renaming each element `e` to `perm[e]`.
    pub fn permuted(&self, perm: &[Element]) -> FiniteStructure {
        assert_eq!(perm.len(), self.size, "permutation must cover the universe");
        let mut inverse = vec![0; self.size];
        for (e, &p) in perm.iter().enumerate() {
            inverse[p] = e;
        }
        let mut out = FiniteStructure::from_fn(
            self.signature.clone(),
            self.size,
            |fi, args| {
                let pre: Vec<Element> = args.iter().map(|&a| inverse[a]).collect();
                perm[self.apply(fi, &pre)]
            },
            |ri, args| {
                let pre: Vec<Element> = args.iter().map(|&a| inverse[a]).collect();
                self.holds(ri, &pre)
            },
        )
        .expect("permuted copy of a valid structure is valid");
        out.names = self.names.iter().map(|(k, &v)| (k.clone(), perm[v])).collect();
        out
    }

    /// Whether `perm` is an automorphism (a bijection preserving every
    /// function and relation in both directions).
    pub fn is_automorphism(&self, perm: &[Element]) -> bool {
        if perm.len() != self.size {
            return false;
        }
        let mut seen = vec![false; self.size];
        for &p in perm {
            if p >= self.size || std::mem::replace(&mut seen[p], true) {
                return false;
            }
        }
        self.preserves(self, perm)
    }

    /// Shared check behind substructure and automorphism tests: `map` commutes
    /// with every function and every relation holds on a tuple iff it holds
    /// on the image tuple.
    fn preserves(&self, target: &FiniteStructure, map: &[Element]) -> bool {
        for (fi, sym) in self.signature.functions().iter().enumerate() {
            for i in 0..tuple_count(self.size, sym.arity) {
                let args = tuple_at(self.size, sym.arity, i);
                let image: Vec<Element> = args.iter().map(|&a| map[a]).collect();
                if map[self.functions[fi][i]] != target.apply(fi, &image) {
                    return false;
                }
            }
        }
        for (ri, sym) in self.signature.relations().iter().enumerate() {
            for i in 0..tuple_count(self.size, sym.arity) {
                let args = tuple_at(self.size, sym.arity, i);
                let image: Vec<Element> = args.iter().map(|&a| map[a]).collect();
                if self.relations[ri][i] != target.holds(ri, &image) {
                    return false;
                }
            }
        }
        true
    }
}

/// Whether `map` embeds `small` into `big` as an induced substructure:
/// injective, commuting with every function, and relations hold on a tuple
/// iff they hold on its image.
pub fn is_substructure(
    small: &FiniteStructure,
    big: &FiniteStructure,
    map: &[Element],
) -> Result<bool, StructureError> {
    if small.signature != big.signature {
        return Err(StructureError::SignatureMismatch);
    }
    if map.len() != small.size {
        return Err(StructureError::MapNotTotal { expected: small.size, got: map.len() });
    }
    if let Some((element, &image)) = map.iter().enumerate().find(|(_, &i)| i >= big.size) {
        return Err(StructureError::MapOutOfRange { element, image, size: big.size });
    }
    let distinct: BTreeSet<Element> = map.iter().copied().collect();
    if distinct.len() != map.len() {
        return Ok(false);
    }
    Ok(small.preserves(big, map))
}

/// Composes element maps: first `first`, then `second`.
pub fn compose(first: &[Element], second: &[Element]) -> Vec<Element> {
    first.iter().map(|&e| second[e]).collect()
}

/// An ascending chain `S_1 ≤ S_2 ≤ … ≤ S_N` with an explicit embedding for
/// each step. Chain indices in the public API are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainFamily {
    label: String,
    signature: Signature,
    members: Vec<FiniteStructure>,
    embeddings: Vec<Vec<Element>>,
}

impl ChainFamily {
    pub fn new(
        label: impl Into<String>,
        members: Vec<FiniteStructure>,
        embeddings: Vec<Vec<Element>>,
    ) -> Result<Self, StructureError> {
        let first = members.first().ok_or(StructureError::EmptyChain)?;
        if embeddings.len() + 1 != members.len() {
            return Err(StructureError::EmbeddingCount { members: members.len(), embeddings: embeddings.len() });
        }
        let signature = first.signature().clone();
        for (step, map) in embeddings.iter().enumerate() {
            let (small, big) = (&members[step], &members[step + 1]);
            if !is_substructure(small, big, map)? {
                return Err(StructureError::NotAnEmbedding { step: step + 1 });
            }
            for (name, &e) in small.names() {
                if let Some(there) = big.name(name) {
                    if there != map[e] {
                        return Err(StructureError::NameNotPreserved { step: step + 1, name: name.clone() });
                    }
                }
            }
        }
        Ok(ChainFamily { label: label.into(), signature, members, embeddings })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// The horizon `N`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FiniteStructure] {
        &self.members
    }

    /// Member at 1-based chain index `n`.
    pub fn member(&self, n: usize) -> &FiniteStructure {
        &self.members[n - 1]
    }

    pub fn embeddings(&self) -> &[Vec<Element>] {
        &self.embeddings
    }

    /// Composite embedding from member `from` into member `to` (1-based,
    /// `from <= to`).
    pub fn composite(&self, from: usize, to: usize) -> Result<Vec<Element>, StructureError> {
        if from == 0 || to > self.len() || from > to {
            return Err(StructureError::IndexOutOfRange(if from == 0 { from } else { to }));
        }
        let mut map: Vec<Element> = self.member(from).universe().collect();
        for step in from..to {
            map = compose(&map, &self.embeddings[step - 1]);
        }
        Ok(map)
    }

    /// The subchain on the given strictly increasing 1-based indices.
    pub fn subchain(&self, indices: &[usize]) -> Result<ChainFamily, StructureError> {
        let mut members = Vec::with_capacity(indices.len());
        let mut embeddings = Vec::new();
        for (k, &n) in indices.iter().enumerate() {
            if n == 0 || n > self.len() {
                return Err(StructureError::IndexOutOfRange(n));
            }
            members.push(self.member(n).clone());
            if k > 0 {
                embeddings.push(self.composite(indices[k - 1], n)?);
            }
        }
        ChainFamily::new(format!("{}[subchain]", self.label), members, embeddings)
    }

    /// Replaces the named constants of every member.
    pub fn with_member_names(&self, names: Vec<BTreeMap<String, Element>>) -> Result<ChainFamily, StructureError> {
        let members =
            self.members.iter().cloned().zip(names).map(|(m, n)| m.with_names(n)).collect::<Result<Vec<_>, _>>()?;
        ChainFamily::new(self.label.clone(), members, self.embeddings.clone())
    }
}
