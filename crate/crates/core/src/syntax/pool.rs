//! Finite, negation-closed pools of prenex sentences.
//!
//! Candidates are prenex formulas `Q1 x1 ... Qq xq. M` with `q <= max_rank`
//! and a matrix `M` of at most `atom_budget` atoms. Atoms use terms of depth
//! at most one: variables, named constants, nullary symbols, and a function
//! symbol applied to those. Candidates are sorted by (rank, atom count,
//! printed text) and kept only if their truth profile on the probe set is new;
//! every kept sentence is followed by its prenex negation.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::eval::{CompiledFormula, EvalError};
use crate::families;
use crate::structure::{tuple_at, tuple_count, Element, FiniteStructure, Signature};
use crate::syntax::{Formula, Quantifier, Term};

/// Seed for probe structures and sampled checks unless overridden.
pub const DEFAULT_SEED: u64 = 0x0074_686c_696d;
/// Default number of enumerated candidates before truncation.
pub const DEFAULT_CANDIDATE_CAP: usize = 2_000_000;

const MAX_PROBE_SIZE: usize = 5;
const RANDOM_PROBES: usize = 3;
const MAX_POINTS: usize = 256;

#[derive(Debug, Error)]
pub enum PoolError {
    #[error("atom budget must be at least 1")]
    ZeroAtomBudget,
    #[error("bad pool spec `{0}` (expected rank<k>[,atoms<b>])")]
    BadSpec(String),
    #[error("probe evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("variable name `{0}` clashes with the bound variables x1, x2, ...")]
    ReservedName(String),
}

/// Pool parameters. `free` lists free variables allowed in the formulas;
/// `constants` lists augmented-language constants (without `@`).
#[derive(Clone, Debug)]
pub struct PoolConfig {
    pub max_rank: usize,
    pub atom_budget: usize,
    pub constants: Vec<String>,
    /// At most this many distinct constants per formula.
    pub max_constants: Option<usize>,
    pub free: Vec<String>,
    pub cap: usize,
    pub seed: u64,
}

impl PoolConfig {
    pub fn new(max_rank: usize, atom_budget: usize) -> Self {
        PoolConfig {
            max_rank,
            atom_budget,
            constants: Vec::new(),
            max_constants: None,
            free: Vec::new(),
            cap: DEFAULT_CANDIDATE_CAP,
            seed: DEFAULT_SEED,
        }
    }

    /// Parses `rank<k>` or `rank<k>,atoms<b>`; the atom budget defaults to 2.
    pub fn parse(spec: &str) -> Result<Self, PoolError> {
        let bad = || PoolError::BadSpec(spec.to_string());
        let mut parts = spec.split(',').map(str::trim);
        let rank = parts.next().and_then(|p| p.strip_prefix("rank")).ok_or_else(bad)?;
        let rank: usize = rank.parse().map_err(|_| bad())?;
        let atoms = match parts.next() {
            Some(p) => p.strip_prefix("atoms").and_then(|a| a.parse().ok()).ok_or_else(bad)?,
            None => 2,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(PoolConfig::new(rank, atoms))
    }
}

/// Set when candidate enumeration stopped at the cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub cap: usize,
}

#[derive(Clone, Debug)]
pub struct SentencePool {
    signature: Signature,
    sentences: Vec<Formula>,
    partners: Option<Vec<usize>>,
    max_rank: usize,
    free: Vec<String>,
    truncation: Option<Truncation>,
    probes: Option<ProbeSet>,
}

impl SentencePool {
    /// A pool of explicitly given formulas. With `close`, each formula's
    /// negation is added unless already present.
    pub fn from_formulas(sig: Signature, formulas: Vec<Formula>, close: bool) -> Self {
        let max_rank = formulas.iter().map(Formula::quantifier_rank).max().unwrap_or(0);
        let free: BTreeSet<String> = formulas.iter().flat_map(|f| f.free_variables()).collect();
        let mut sentences: Vec<Formula> = Vec::new();
        for f in formulas {
            if !sentences.contains(&f) {
                sentences.push(f);
            }
        }
        let partners = close.then(|| {
            let mut partners = vec![usize::MAX; sentences.len()];
            for i in 0..sentences.len() {
                if partners[i] != usize::MAX {
                    continue;
                }
                let neg = negate(&sentences[i]);
                let j = match sentences.iter().position(|g| *g == neg) {
                    Some(j) => j,
                    None => {
                        sentences.push(neg);
                        partners.push(usize::MAX);
                        sentences.len() - 1
                    }
                };
                partners[i] = j;
                partners[j] = i;
            }
            partners
        });
        SentencePool {
            signature: sig,
            sentences,
            partners,
            max_rank,
            free: free.into_iter().collect(),
            truncation: None,
            probes: None,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn sentences(&self) -> &[Formula] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// `partners()[i]` is the index of the designated negation of sentence `i`.
    pub fn partners(&self) -> Option<&[usize]> {
        self.partners.as_deref()
    }

    pub fn closed_under_negation(&self) -> bool {
        self.partners.is_some()
    }

    pub fn max_rank(&self) -> usize {
        self.max_rank
    }

    /// Free variables the formulas may use, in slot order.
    pub fn free_variables(&self) -> &[String] {
        &self.free
    }

    pub fn truncation(&self) -> Option<&Truncation> {
        self.truncation.as_ref()
    }

    /// Index of the pool formula with the same probe profile as `f`, for
    /// generated pools; otherwise of a syntactically equal formula.
    pub fn find_equivalent(&self, f: &Formula) -> Result<Option<usize>, PoolError> {
        let Some(probes) = &self.probes else {
            return Ok(self.sentences.iter().position(|g| g == f));
        };
        let target = probes.profile(f)?;
        for (i, g) in self.sentences.iter().enumerate() {
            if probes.profile(g)? == target {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

/// Negation pushed through a prenex prefix and the matrix (de Morgan,
/// double negation removed). Non-prenex formulas are simply wrapped.
pub fn negate(f: &Formula) -> Formula {
    if f.is_prenex() {
        negate_nnf(f)
    } else {
        match f {
            Formula::Not(g) => (**g).clone(),
            other => Formula::not(other.clone()),
        }
    }
}

fn negate_nnf(f: &Formula) -> Formula {
    match f {
        Formula::Eq(..) | Formula::Rel(..) => Formula::not(f.clone()),
        Formula::Not(g) => (**g).clone(),
        Formula::And(a, b) => Formula::or(negate_nnf(a), negate_nnf(b)),
        Formula::Or(a, b) => Formula::and(negate_nnf(a), negate_nnf(b)),
        Formula::Quant(q, v, body) => Formula::Quant(q.dual(), v.clone(), Box::new(negate_nnf(body))),
    }
}

/// Replaces `@c` by the variable `@c` so constants can be varied like free
/// variables during probing.
fn constants_as_variables(f: &Formula) -> Formula {
    fn term(t: &Term) -> Term {
        match t {
            Term::Const(c) => Term::Var(format!("@{c}")),
            Term::App(name, args) => Term::App(name.clone(), args.iter().map(term).collect()),
            v => v.clone(),
        }
    }
    match f {
        Formula::Eq(a, b) => Formula::Eq(term(a), term(b)),
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(term).collect()),
        Formula::Not(g) => Formula::not(constants_as_variables(g)),
        Formula::And(a, b) => Formula::and(constants_as_variables(a), constants_as_variables(b)),
        Formula::Or(a, b) => Formula::or(constants_as_variables(a), constants_as_variables(b)),
        Formula::Quant(q, v, g) => Formula::Quant(*q, v.clone(), Box::new(constants_as_variables(g))),
    }
}

/// Probe structures with the argument tuples at which formulas are compared.
#[derive(Clone, Debug)]
struct ProbeSet {
    /// Free variables followed by `@constant` pseudo-variables.
    slots: Vec<String>,
    points: Vec<(FiniteStructure, Vec<Vec<Element>>)>,
}

impl ProbeSet {
    fn build(sig: &Signature, slots: Vec<String>, seed: u64) -> ProbeSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut structures: Vec<FiniteStructure> =
            families::catalog_structures(sig, MAX_PROBE_SIZE).into_iter().map(|(_, s)| s).collect();
        for _ in 0..RANDOM_PROBES {
            structures.push(random_structure(sig, &mut rng));
        }
        let points = structures
            .into_iter()
            .map(|s| {
                let tuples = sample_tuples(s.size(), slots.len(), &mut rng);
                (s, tuples)
            })
            .collect();
        ProbeSet { slots, points }
    }

    fn profile(&self, f: &Formula) -> Result<Vec<bool>, EvalError> {
        let f = constants_as_variables(f);
        let mut out = Vec::new();
        for (s, tuples) in &self.points {
            let compiled = CompiledFormula::new(s, &f, &self.slots)?;
            out.extend(tuples.iter().map(|t| compiled.eval(t)));
        }
        Ok(out)
    }

    /// Profile of an open formula over explicit slots and per-structure tuples.
    fn open_profile(
        &self,
        f: &Formula,
        slots: &[String],
        tuples: &[Vec<Vec<Element>>],
    ) -> Result<Vec<bool>, EvalError> {
        let f = constants_as_variables(f);
        let mut out = Vec::new();
        for ((s, _), ts) in self.points.iter().zip(tuples) {
            let compiled = CompiledFormula::new(s, &f, slots)?;
            out.extend(ts.iter().map(|t| compiled.eval(t)));
        }
        Ok(out)
    }
}

/// A structure with uniformly random tables (relations hold with probability 1/2).
pub fn random_structure(sig: &Signature, rng: &mut impl Rng) -> FiniteStructure {
    let size = rng.gen_range(2..=4);
    let ftables: Vec<Vec<Element>> = sig
        .functions()
        .iter()
        .map(|f| (0..tuple_count(size, f.arity)).map(|_| rng.gen_range(0..size)).collect())
        .collect();
    let rtables: Vec<Vec<bool>> =
        sig.relations().iter().map(|r| (0..tuple_count(size, r.arity)).map(|_| rng.gen_bool(0.5)).collect()).collect();
    FiniteStructure::from_fn(
        sig.clone(),
        size,
        |fi, t| ftables[fi][crate::structure::tuple_index(size, t)],
        |ri, t| rtables[ri][crate::structure::tuple_index(size, t)],
    )
    .expect("random tables are total")
}

fn sample_tuples(size: usize, arity: usize, rng: &mut impl Rng) -> Vec<Vec<Element>> {
    let total = size.checked_pow(arity as u32).unwrap_or(usize::MAX);
    if total <= MAX_POINTS {
        (0..total).map(|i| tuple_at(size, arity, i)).collect()
    } else {
        (0..MAX_POINTS).map(|_| (0..arity).map(|_| rng.gen_range(0..size)).collect()).collect()
    }
}

fn bound_var(i: usize) -> String {
    format!("x{i}")
}

fn depth_one_terms(sig: &Signature, vars: &[String], constants: &[String]) -> Vec<Term> {
    let mut base: Vec<Term> = vars.iter().map(Term::var).collect();
    base.extend(constants.iter().map(Term::constant));
    base.extend(sig.functions().iter().filter(|f| f.arity == 0).map(|f| Term::app(&f.name, vec![])));
    let mut terms = base.clone();
    for f in sig.functions().iter().filter(|f| f.arity > 0) {
        for i in 0..tuple_count(base.len(), f.arity) {
            let args = tuple_at(base.len(), f.arity, i).into_iter().map(|k| base[k].clone()).collect();
            terms.push(Term::app(&f.name, args));
        }
    }
    terms
}

fn atoms(sig: &Signature, terms: &[Term]) -> Vec<Formula> {
    let mut out = Vec::new();
    for r in sig.relations() {
        for i in 0..tuple_count(terms.len(), r.arity) {
            let args = tuple_at(terms.len(), r.arity, i).into_iter().map(|k| terms[k].clone()).collect();
            out.push(Formula::rel(&r.name, args));
        }
    }
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            out.push(Formula::eq(a.clone(), b.clone()));
        }
    }
    out
}

fn literal(atom: &Formula, positive: bool) -> Formula {
    if positive {
        atom.clone()
    } else {
        Formula::not(atom.clone())
    }
}

/// Matrices over the given atoms with 1..=budget distinct atoms, in the
/// shapes `l`, `l & l`, `l | l`, and for three atoms `l & l & l`,
/// `l | l | l`, `l & l | l`, `(l | l) & l`.
fn matrices(atoms: &[Formula], budget: usize, mut emit: impl FnMut(Formula) -> bool) {
    let n = atoms.len();
    for a in 0..n {
        for sa in [true, false] {
            if !emit(literal(&atoms[a], sa)) {
                return;
            }
        }
    }
    if budget < 2 {
        return;
    }
    for a in 0..n {
        for b in a + 1..n {
            for signs in 0..4 {
                let la = literal(&atoms[a], signs & 1 == 0);
                let lb = literal(&atoms[b], signs & 2 == 0);
                if !emit(Formula::and(la.clone(), lb.clone())) || !emit(Formula::or(la, lb)) {
                    return;
                }
            }
        }
    }
    if budget < 3 {
        return;
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in 0..n {
                if c == a || c == b {
                    continue;
                }
                for signs in 0..8 {
                    let la = literal(&atoms[a], signs & 1 == 0);
                    let lb = literal(&atoms[b], signs & 2 == 0);
                    let lc = literal(&atoms[c], signs & 4 == 0);
                    let mut shapes = vec![
                        Formula::or(Formula::and(la.clone(), lb.clone()), lc.clone()),
                        Formula::and(Formula::or(la.clone(), lb.clone()), lc.clone()),
                    ];
                    if c > b {
                        shapes.push(Formula::and(Formula::and(la.clone(), lb.clone()), lc.clone()));
                        shapes.push(Formula::or(Formula::or(la, lb), lc));
                    }
                    for shape in shapes {
                        if !emit(shape) {
                            return;
                        }
                    }
                }
            }
        }
    }
}

fn mentions_var(f: &Formula, v: &str) -> bool {
    f.free_variables().contains(v)
}

/// Generates the pool for `sig` with rank at most `k` and at most `b` atoms.
pub fn generate_pool(sig: &Signature, k: usize, b: usize) -> Result<SentencePool, PoolError> {
    generate_pool_with(sig, &PoolConfig::new(k, b))
}

pub fn generate_pool_with(sig: &Signature, config: &PoolConfig) -> Result<SentencePool, PoolError> {
    if config.atom_budget == 0 {
        return Err(PoolError::ZeroAtomBudget);
    }
    let reserved =
        |v: &str| v.strip_prefix('x').is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()));
    if let Some(v) = config.free.iter().find(|v| reserved(v)) {
        return Err(PoolError::ReservedName(v.clone()));
    }
    let mut slots = config.free.clone();
    slots.extend(config.constants.iter().map(|c| format!("@{c}")));
    let probes = ProbeSet::build(sig, slots.clone(), config.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xa70);

    let mut candidates: Vec<Formula> = Vec::new();
    let mut truncated = false;
    'ranks: for q in 0..=config.max_rank {
        let bound: Vec<String> = (1..=q).map(bound_var).collect();
        let mut vars = config.free.clone();
        vars.extend(bound.iter().cloned());
        let terms = depth_one_terms(sig, &vars, &config.constants);
        let raw_atoms: Vec<Formula> = atoms(sig, &terms)
            .into_iter()
            .filter(|a| config.max_constants.is_none_or(|m| a.constants().len() <= m))
            .collect();
        let atoms = distinct_atoms(&probes, raw_atoms, &vars, &mut rng)?;
        let prefixes: Vec<Vec<Quantifier>> = (0..1usize << q)
            .map(|mask| {
                (0..q).map(|i| if mask & (1 << i) == 0 { Quantifier::Exists } else { Quantifier::Forall }).collect()
            })
            .collect();
        let mut stop = false;
        matrices(&atoms, config.atom_budget, |m| {
            if !bound.iter().all(|v| mentions_var(&m, v)) {
                return true;
            }
            if config.max_constants.is_some_and(|c| m.constants().len() > c) {
                return true;
            }
            for prefix in &prefixes {
                if candidates.len() >= config.cap {
                    stop = true;
                    return false;
                }
                let f = prefix
                    .iter()
                    .zip(&bound)
                    .rev()
                    .fold(m.clone(), |body, (&qq, v)| Formula::Quant(qq, v.clone(), Box::new(body)));
                candidates.push(f);
            }
            true
        });
        if stop {
            truncated = true;
            break 'ranks;
        }
    }

    let mut keyed: Vec<(usize, usize, String, Formula)> =
        candidates.into_par_iter().map(|f| (f.quantifier_rank(), f.atom_count(), f.to_string(), f)).collect();
    keyed.par_sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
    let profiles: Vec<Vec<bool>> = keyed.par_iter().map(|(_, _, _, f)| probes.profile(f)).collect::<Result<_, _>>()?;

    let mut seen: HashMap<Vec<bool>, ()> = HashMap::new();
    let mut sentences = Vec::new();
    let mut partners = Vec::new();
    for ((_, _, _, f), profile) in keyed.into_iter().zip(profiles) {
        if seen.contains_key(&profile) {
            continue;
        }
        let complement: Vec<bool> = profile.iter().map(|b| !b).collect();
        seen.insert(profile, ());
        seen.insert(complement, ());
        let i = sentences.len();
        let neg = negate(&f);
        sentences.push(f);
        sentences.push(neg);
        partners.push(i + 1);
        partners.push(i);
    }
    Ok(SentencePool {
        signature: sig.clone(),
        sentences,
        partners: Some(partners),
        max_rank: config.max_rank,
        free: config.free.clone(),
        truncation: truncated.then_some(Truncation { cap: config.cap }),
        probes: Some(probes),
    })
}

/// Drops atoms that are constant on the probe points, or agree with (or
/// complement) an earlier atom, with every variable in `vars` varied.
fn distinct_atoms(
    probes: &ProbeSet,
    atoms: Vec<Formula>,
    vars: &[String],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Formula>, PoolError> {
    let mut slots = probes.slots.clone();
    slots.extend(vars.iter().filter(|v| !probes.slots.contains(v)).cloned());
    let tuples: Vec<Vec<Vec<Element>>> = probes
        .points
        .iter()
        .map(|(s, _)| {
            let mut ts = sample_tuples(s.size(), slots.len(), rng);
            ts.shuffle(rng);
            ts
        })
        .collect();
    let profiles: Vec<Vec<bool>> =
        atoms.par_iter().map(|a| probes.open_profile(a, &slots, &tuples)).collect::<Result<_, _>>()?;
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for (atom, profile) in atoms.into_iter().zip(profiles) {
        if profile.iter().all(|&b| b) || profile.iter().all(|&b| !b) || seen.contains_key(&profile) {
            continue;
        }
        let complement: Vec<bool> = profile.iter().map(|b| !b).collect();
        seen.insert(profile, ());
        seen.insert(complement, ());
        out.push(atom);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{abelian_signature, gf2_signature, order_signature};
    use crate::syntax::parse_formula;

    #[test]
    fn parses_pool_specs() {
        let c = PoolConfig::parse("rank2").unwrap();
        assert_eq!((c.max_rank, c.atom_budget), (2, 2));
        let c = PoolConfig::parse("rank3,atoms1").unwrap();
        assert_eq!((c.max_rank, c.atom_budget), (3, 1));
        for bad in ["", "rank", "rank2,atom3", "rank2,atoms2,x", "r2"] {
            assert!(PoolConfig::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn pure_equality_rank_two() {
        let pool = generate_pool(&Signature::empty(), 2, 2).unwrap();
        let distinct = parse_formula("exists x. exists y. x != y", &Signature::empty()).unwrap();
        let i = pool.find_equivalent(&distinct).unwrap().expect("distinctness present");
        let j = pool.partners().unwrap()[i];
        let neg = Formula::not(distinct);
        assert_eq!(pool.find_equivalent(&neg).unwrap(), Some(j));
        assert!(pool.truncation().is_none());
    }

    #[test]
    fn rank_zero_without_constants_is_empty() {
        assert!(generate_pool(&Signature::empty(), 0, 1).unwrap().is_empty());
        assert!(generate_pool(&order_signature(), 0, 1).unwrap().is_empty());
        // Nullary symbols give closed atoms; random probes make them non-trivial.
        let pool = generate_pool(&gf2_signature(), 0, 1).unwrap();
        assert!(pool.sentences().iter().all(|f| f.quantifier_rank() == 0));
    }

    #[test]
    fn parity_pool_contains_even_top_sentence() {
        let sig = order_signature();
        let pool = generate_pool(&sig, 2, 3).unwrap();
        let f = parse_formula("exists x. (E(x) & forall y. le(y,x))", &sig).unwrap();
        assert!(pool.find_equivalent(&f).unwrap().is_some());
    }

    #[test]
    fn pools_are_negation_closed_and_deduplicated() {
        for sig in [Signature::empty(), order_signature(), gf2_signature()] {
            let pool = generate_pool(&sig, 2, 2).unwrap();
            let partners = pool.partners().unwrap();
            let probes = pool.probes.as_ref().unwrap();
            let mut profiles = HashMap::new();
            for (i, f) in pool.sentences().iter().enumerate() {
                assert!(f.is_sentence() && f.is_prenex() && f.quantifier_rank() <= 2);
                assert_eq!(partners[partners[i]], i);
                let p = probes.profile(f).unwrap();
                let q = probes.profile(&pool.sentences()[partners[i]]).unwrap();
                assert!(p.iter().zip(&q).all(|(a, b)| a != b));
                assert!(profiles.insert(p, i).is_none(), "duplicate profile for {f}");
            }
        }
    }

    #[test]
    fn generated_formulas_round_trip() {
        for sig in [order_signature(), gf2_signature()] {
            let pool = generate_pool(&sig, 2, 2).unwrap();
            for f in pool.sentences() {
                assert_eq!(&parse_formula(&f.to_string(), &sig).unwrap(), f);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_pool(&order_signature(), 2, 2).unwrap();
        let b = generate_pool(&order_signature(), 2, 2).unwrap();
        assert_eq!(a.sentences(), b.sentences());
    }

    #[test]
    fn truncation_is_reported() {
        let mut config = PoolConfig::new(2, 2);
        config.cap = 10;
        let pool = generate_pool_with(&abelian_signature(), &config).unwrap();
        assert_eq!(pool.truncation(), Some(&Truncation { cap: 10 }));
    }

    #[test]
    fn constants_and_free_variables() {
        let mut config = PoolConfig::new(1, 1);
        config.constants = vec!["a".into(), "b".into()];
        config.max_constants = Some(1);
        let pool = generate_pool_with(&Signature::empty(), &config).unwrap();
        assert!(!pool.is_empty());
        assert!(pool.sentences().iter().all(|f| f.constants().len() <= 1 && f.is_sentence()));

        let mut config = PoolConfig::new(1, 1);
        config.free = vec!["u".into()];
        let pool = generate_pool_with(&order_signature(), &config).unwrap();
        assert!(pool.sentences().iter().any(|f| !f.is_sentence()));
        config.free = vec!["x1".into()];
        assert!(matches!(generate_pool_with(&order_signature(), &config), Err(PoolError::ReservedName(_))));
    }

    #[test]
    fn explicit_pools_close_under_negation() {
        let sig = order_signature();
        let f = parse_formula("exists x. E(x)", &sig).unwrap();
        let pool = SentencePool::from_formulas(sig, vec![f.clone()], true);
        assert_eq!(pool.len(), 2);
        assert_eq!(pool.sentences()[1].to_string(), "forall x. !E(x)");
        assert_eq!(pool.partners().unwrap(), &[1, 0]);
    }
}
