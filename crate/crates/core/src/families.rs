//! Built-in chain generators and witness sentences.
//!
//! Every concrete family numbers its universes so that member `n` is a prefix
//! of member `n + 1`; the chain embeddings are therefore inclusions, but they
//! are still carried explicitly like any other chain.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::oracle::{self, OracleFamily};
use crate::structure::{ChainFamily, Element, FiniteStructure, Signature, StructureError, Symbol};
use crate::syntax::{Formula, Term};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}` (try `families list`)")]
    Unknown(String),
    #[error("family `{family}` has no parameter `{param}`")]
    UnknownParameter { family: String, param: String },
    #[error("bad value `{value}` for parameter `{param}`: {reason}")]
    BadParameter { param: String, value: String, reason: String },
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("`{0}` is an oracle family; its members are infinite and cannot be built")]
    OracleOnly(String),
    #[error("`{0}` is a concrete family, not an oracle family")]
    NotOracle(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Concrete,
    Oracle,
}

/// Catalog entry.
#[derive(Clone, Debug)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub kind: FamilyKind,
    pub params: &'static [(&'static str, &'static str)],
    pub summary: &'static str,
}

const CATALOG: &[FamilyInfo] = &[
    FamilyInfo {
        name: "finite-sets",
        kind: FamilyKind::Concrete,
        params: &[],
        summary: "pure sets {0..n-1} under inclusion",
    },
    FamilyInfo {
        name: "parity-order",
        kind: FamilyKind::Concrete,
        params: &[],
        summary: "{1..n} with le and E (even), as elements 0..n-1",
    },
    FamilyInfo {
        name: "gf2-vector-space",
        kind: FamilyKind::Concrete,
        params: &[],
        summary: "GF(2)^n as (add, zero), x -> (x, 0)",
    },
    FamilyInfo {
        name: "gfp-vector-space",
        kind: FamilyKind::Concrete,
        params: &[("p", "3")],
        summary: "GF(p)^n as (add, neg, zero), x -> (x, 0)",
    },
    FamilyInfo {
        name: "sym-support",
        kind: FamilyKind::Concrete,
        params: &[],
        summary: "Sym({0..n-1}) as (mul, inv, id), permutations fixing n-1 first",
    },
    FamilyInfo {
        name: "rat-subgroup",
        kind: FamilyKind::Oracle,
        params: &[("variant", "ring")],
        summary: "Z[1/(p1..pn)^n] (ring) or <1/(p1..pn)^n> (cyclic) inside Q; schema div",
    },
    FamilyInfo {
        name: "free-abelian",
        kind: FamilyKind::Oracle,
        params: &[],
        summary: "Z^n under direct-summand inclusion; schema subset-sum",
    },
];

/// The registered families, in a fixed order.
pub fn family_catalog() -> &'static [FamilyInfo] {
    CATALOG
}

/// A family name with parameter overrides, written `name[:key=value,...]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl FamilySpec {
    pub fn new(name: impl Into<String>) -> Self {
        FamilySpec { name: name.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn parse(text: &str) -> Result<Self, FamilyError> {
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut spec = FamilySpec::new(name.trim());
        for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = pair.split_once('=').ok_or_else(|| FamilyError::BadParameter {
                param: pair.to_string(),
                value: String::new(),
                reason: "expected key=value".into(),
            })?;
            spec.params.insert(k.trim().to_string(), v.trim().to_string());
        }
        spec.info()?;
        Ok(spec)
    }

    pub fn info(&self) -> Result<&'static FamilyInfo, FamilyError> {
        let info =
            CATALOG.iter().find(|f| f.name == self.name).ok_or_else(|| FamilyError::Unknown(self.name.clone()))?;
        for key in self.params.keys() {
            if !info.params.iter().any(|(p, _)| p == key) {
                return Err(FamilyError::UnknownParameter { family: self.name.clone(), param: key.clone() });
            }
        }
        Ok(info)
    }

    /// The value of `param`, falling back to the catalog default.
    pub fn param(&self, param: &str) -> Option<String> {
        self.params.get(param).cloned().or_else(|| {
            CATALOG
                .iter()
                .find(|f| f.name == self.name)
                .and_then(|f| f.params.iter().find(|(p, _)| *p == param))
                .map(|(_, d)| d.to_string())
        })
    }

    fn prime_param(&self) -> Result<u64, FamilyError> {
        let value = self.param("p").unwrap_or_default();
        let p: u64 = value.parse().map_err(|_| FamilyError::BadParameter {
            param: "p".into(),
            value: value.clone(),
            reason: "not an integer".into(),
        })?;
        if !oracle::is_prime(p) {
            return Err(FamilyError::BadParameter { param: "p".into(), value, reason: "not a prime".into() });
        }
        Ok(p)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.params.is_empty() {
            let parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, ":{}", parts.join(","))?;
        }
        Ok(())
    }
}

pub fn order_signature() -> Signature {
    Signature::new(vec![], vec![Symbol::new("le", 2), Symbol::new("E", 1)]).expect("valid")
}

pub fn gf2_signature() -> Signature {
    Signature::new(vec![Symbol::new("add", 2), Symbol::new("zero", 0)], vec![]).expect("valid")
}

/// Signature of abelian groups and of GF(p) vector spaces.
pub fn abelian_signature() -> Signature {
    Signature::new(vec![Symbol::new("add", 2), Symbol::new("neg", 1), Symbol::new("zero", 0)], vec![]).expect("valid")
}

pub fn group_signature() -> Signature {
    Signature::new(vec![Symbol::new("mul", 2), Symbol::new("inv", 1), Symbol::new("id", 0)], vec![]).expect("valid")
}

/// `{1..n}` with its order and the even predicate; element `e` has value `e + 1`.
pub fn parity_order(n: usize) -> FiniteStructure {
    FiniteStructure::from_fn(
        order_signature(),
        n,
        |_, _| 0,
        |ri, t| if ri == 0 { t[0] <= t[1] } else { (t[0] + 1) % 2 == 0 },
    )
    .expect("parity order")
}

/// GF(2)^dim with vectors encoded as bit masks.
pub fn gf2_space(dim: u32) -> FiniteStructure {
    FiniteStructure::from_fn(gf2_signature(), 1 << dim, |fi, t| if fi == 0 { t[0] ^ t[1] } else { 0 }, |_, _| false)
        .expect("gf2 space")
}

/// GF(p)^dim with vectors encoded as base-`p` digit strings, least
/// significant coordinate first.
pub fn gfp_space(p: u64, dim: u32) -> FiniteStructure {
    let p = p as usize;
    let size = p.pow(dim);
    let digits = |mut x: usize| {
        let mut d = Vec::with_capacity(dim as usize);
        for _ in 0..dim {
            d.push(x % p);
            x /= p;
        }
        d
    };
    let encode = |d: &[usize]| d.iter().rev().fold(0, |acc, &x| acc * p + x);
    FiniteStructure::from_fn(
        abelian_signature(),
        size,
        |fi, t| match fi {
            0 => {
                let (a, b) = (digits(t[0]), digits(t[1]));
                let sum: Vec<usize> = a.iter().zip(&b).map(|(x, y)| (x + y) % p).collect();
                encode(&sum)
            }
            1 => {
                let neg: Vec<usize> = digits(t[0]).iter().map(|x| (p - x) % p).collect();
                encode(&neg)
            }
            _ => 0,
        },
        |_, _| false,
    )
    .expect("gfp space")
}

/// Permutations of `0..n` listed so that those of `0..n-1` (extended by a
/// fixed point) come first, recursively; the rest follow in lexicographic order.
pub fn symmetric_listing(n: usize) -> Vec<Vec<usize>> {
    if n <= 1 {
        return vec![(0..n).collect()];
    }
    let mut list: Vec<Vec<usize>> = symmetric_listing(n - 1)
        .into_iter()
        .map(|mut p| {
            p.push(n - 1);
            p
        })
        .collect();
    let mut rest = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if perm[n - 1] != n - 1 {
            rest.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    list.extend(rest);
    list
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Sym({0..n-1}) under composition `mul(x, y) = x ∘ y`.
pub fn symmetric_group(n: usize) -> FiniteStructure {
    let listing = symmetric_listing(n);
    let index: HashMap<Vec<usize>, Element> = listing.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    FiniteStructure::from_fn(
        group_signature(),
        listing.len(),
        |fi, t| match fi {
            0 => {
                let (x, y) = (&listing[t[0]], &listing[t[1]]);
                index[&y.iter().map(|&i| x[i]).collect::<Vec<_>>()]
            }
            1 => {
                let x = &listing[t[0]];
                let mut inv = vec![0; x.len()];
                for (i, &xi) in x.iter().enumerate() {
                    inv[xi] = i;
                }
                index[&inv]
            }
            _ => 0,
        },
        |_, _| false,
    )
    .expect("symmetric group")
}

fn prefix_inclusion(size: usize) -> Vec<Element> {
    (0..size).collect()
}

/// Member `n` (1-based) of a concrete family.
pub fn build_member(spec: &FamilySpec, n: usize) -> Result<FiniteStructure, FamilyError> {
    let info = spec.info()?;
    if info.kind == FamilyKind::Oracle {
        return Err(FamilyError::OracleOnly(spec.name.clone()));
    }
    Ok(match info.name {
        "finite-sets" => FiniteStructure::pure_set(n),
        "parity-order" => parity_order(n),
        "gf2-vector-space" => gf2_space(n as u32),
        "gfp-vector-space" => gfp_space(spec.prime_param()?, n as u32),
        "sym-support" => symmetric_group(n),
        other => unreachable!("catalog entry {other} without a builder"),
    })
}

/// Builds the first `horizon` members of a concrete family as a chain.
pub fn build_chain(spec: &FamilySpec, horizon: usize) -> Result<ChainFamily, FamilyError> {
    if horizon < 1 {
        return Err(FamilyError::EmptyHorizon);
    }
    let members = (1..=horizon).map(|n| build_member(spec, n)).collect::<Result<Vec<_>, _>>()?;
    let embeddings = members[..horizon - 1].iter().map(|m| prefix_inclusion(m.size())).collect();
    Ok(ChainFamily::new(spec.to_string(), members, embeddings)?)
}

/// The oracle description of an oracle family.
pub fn oracle_family(spec: &FamilySpec) -> Result<OracleFamily, FamilyError> {
    let info = spec.info()?;
    if info.kind != FamilyKind::Oracle {
        return Err(FamilyError::NotOracle(spec.name.clone()));
    }
    match info.name {
        "rat-subgroup" => {
            let variant = spec.param("variant").unwrap_or_default();
            match variant.as_str() {
                "ring" => Ok(OracleFamily::RationalRing),
                "cyclic" => Ok(OracleFamily::RationalCyclic),
                _ => Err(FamilyError::BadParameter {
                    param: "variant".into(),
                    value: variant,
                    reason: "expected ring or cyclic".into(),
                }),
            }
        }
        "free-abelian" => Ok(OracleFamily::FreeAbelian),
        other => unreachable!("catalog entry {other} without an oracle"),
    }
}

/// Structures of size at most `max_size` from every concrete catalog family
/// over `sig`, each tagged `family#n`.
pub fn catalog_structures(sig: &Signature, max_size: usize) -> Vec<(String, FiniteStructure)> {
    let mut out = Vec::new();
    for info in CATALOG.iter().filter(|f| f.kind == FamilyKind::Concrete) {
        let spec = FamilySpec::new(info.name);
        for n in 1.. {
            let Ok(member) = build_member(&spec, n) else { break };
            if member.size() > max_size {
                break;
            }
            if member.signature() == sig {
                out.push((format!("{spec}#{n}"), member));
            }
        }
    }
    out
}

fn xs(i: usize) -> String {
    format!("x{i}")
}

/// `exists x1 ... exists xm. /\_{k<l} xk != xl`.
pub fn distinct_elements_witness(m: usize) -> Formula {
    assert!(m >= 1, "needs at least one variable");
    let matrix = Formula::conjunction(
        (1..=m).flat_map(|k| (k + 1..=m).map(move |l| Formula::neq(Term::var(xs(k)), Term::var(xs(l))))),
    )
    .unwrap_or_else(|| Formula::eq(Term::var(xs(1)), Term::var(xs(1))));
    (1..=m).rev().fold(matrix, |body, k| Formula::exists(xs(k), body))
}

/// `y + y + ... + y` (`m` summands, left-nested) over the abelian signature.
fn multiple(m: usize, var: &str) -> Term {
    (1..m).fold(Term::var(var), |acc, _| Term::app("add", vec![acc, Term::var(var)]))
}

/// `forall x. exists y. m·y = x`.
pub fn divisibility_sentence(m: usize) -> Formula {
    assert!(m >= 1);
    Formula::forall("x", Formula::exists("y", Formula::eq(multiple(m, "y"), Term::var("x"))))
}

/// `forall x1..xm. \/_{T nonempty} exists z. z + z = sum_{i in T} xi`.
pub fn subset_sum_sentence(m: usize) -> Formula {
    assert!(m >= 1);
    let disjuncts = (1u32..(1 << m)).map(|mask| {
        let sum = (1..=m)
            .filter(|i| mask & (1 << (i - 1)) != 0)
            .map(|i| Term::var(xs(i)))
            .reduce(|a, b| Term::app("add", vec![a, b]))
            .expect("nonempty subset");
        Formula::exists("z", Formula::eq(Term::app("add", vec![Term::var("z"), Term::var("z")]), sum))
    });
    let matrix = Formula::disjunction(disjuncts).expect("m >= 1");
    (1..=m).rev().fold(matrix, |body, k| Formula::forall(xs(k), body))
}

/// The witness schemas whose instances keep changing truth value along a chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessSchema {
    /// `distinct_elements_witness(m)` on `finite-sets`.
    DistinctElements,
    /// Divisibility by `m` on `rat-subgroup`.
    Divisibility,
    /// The subset-sum sentence on `free-abelian`.
    SubsetSum,
}

impl WitnessSchema {
    pub const ALL: [WitnessSchema; 3] = [Self::DistinctElements, Self::Divisibility, Self::SubsetSum];

    pub fn family(self) -> &'static str {
        match self {
            Self::DistinctElements => "finite-sets",
            Self::Divisibility => "rat-subgroup",
            Self::SubsetSum => "free-abelian",
        }
    }

    /// Truth of instance `m` at chain index `n`.
    pub fn truth(self, m: usize, n: usize) -> bool {
        match self {
            Self::DistinctElements => {
                crate::eval::evaluate(&FiniteStructure::pure_set(n), &distinct_elements_witness(m))
                    .expect("pure-equality sentence over a pure set")
            }
            Self::Divisibility => oracle::rational_subgroup_oracle(m as u64, n),
            Self::SubsetSum => oracle::free_abelian_subset_sum_oracle(m, n),
        }
    }
}

/// An instance whose truth value is still moving after index `index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LateChange {
    pub index: usize,
    pub m: usize,
    /// Truth values at indices `1..=index + 1`.
    pub values: Vec<bool>,
    /// Least `n > 1` whose value differs from the value at `n - 1`.
    pub first_change: usize,
}

/// For each index `i` in `1..=max_index`, the least instance parameter
/// `m <= max_m` whose truth first changes strictly after `i`, or `None` if no
/// such instance exists in range.
pub fn late_changes(schema: WitnessSchema, max_index: usize, max_m: usize) -> Vec<(usize, Option<LateChange>)> {
    (1..=max_index)
        .map(|i| {
            let found = (1..=max_m).find_map(|m| {
                let values: Vec<bool> = (1..=i + 1).map(|n| schema.truth(m, n)).collect();
                let first_change = (1..values.len()).find(|&k| values[k] != values[k - 1])? + 1;
                (first_change > i).then_some(LateChange { index: i, m, values, first_change })
            });
            (i, found)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate;
    use crate::structure::{is_substructure, validate_structure};
    use crate::syntax::parse_formula;

    #[test]
    fn catalog_registration() {
        let names: Vec<&str> = family_catalog().iter().map(|f| f.name).collect();
        for required in [
            "finite-sets",
            "parity-order",
            "gf2-vector-space",
            "gfp-vector-space",
            "rat-subgroup",
            "free-abelian",
            "sym-support",
        ] {
            assert!(names.contains(&required), "{required}");
        }
    }

    #[test]
    fn member_sizes() {
        let sizes = |spec: FamilySpec, n| -> Vec<usize> {
            build_chain(&spec, n).unwrap().members().iter().map(|m| m.size()).collect()
        };
        assert_eq!(sizes(FamilySpec::new("parity-order"), 4), vec![1, 2, 3, 4]);
        assert_eq!(sizes(FamilySpec::new("finite-sets"), 3), vec![1, 2, 3]);
        assert_eq!(sizes(FamilySpec::new("gf2-vector-space"), 3), vec![2, 4, 8]);
        assert_eq!(sizes(FamilySpec::new("sym-support"), 3), vec![1, 2, 6]);
        assert_eq!(sizes(FamilySpec::parse("gfp-vector-space:p=3").unwrap(), 2), vec![3, 9]);
    }

    #[test]
    fn bad_specs() {
        assert!(matches!(FamilySpec::parse("no-such"), Err(FamilyError::Unknown(_))));
        assert!(matches!(FamilySpec::parse("finite-sets:p=2"), Err(FamilyError::UnknownParameter { .. })));
        let spec = FamilySpec::parse("gfp-vector-space:p=4").unwrap();
        assert!(build_chain(&spec, 2).is_err());
        assert!(matches!(build_chain(&FamilySpec::new("rat-subgroup"), 2), Err(FamilyError::OracleOnly(_))));
        assert!(matches!(build_chain(&FamilySpec::new("finite-sets"), 0), Err(FamilyError::EmptyHorizon)));
    }

    #[test]
    fn chains_are_substructure_chains() {
        for info in family_catalog().iter().filter(|f| f.kind == FamilyKind::Concrete) {
            let chain = build_chain(&FamilySpec::new(info.name), 4).unwrap();
            for (n, map) in chain.embeddings().iter().enumerate() {
                assert!(validate_structure(&chain.members()[n].to_raw()).is_ok());
                assert!(is_substructure(&chain.members()[n], &chain.members()[n + 1], map).unwrap());
            }
        }
    }

    #[test]
    fn symmetric_groups_are_groups() {
        for n in 1..=4 {
            let g = symmetric_group(n);
            let (mul, inv, id) = (0, 1, 2);
            let e = g.apply(id, &[]);
            assert_eq!(e, 0);
            for x in g.universe() {
                assert_eq!(g.apply(mul, &[x, e]), x);
                assert_eq!(g.apply(mul, &[e, x]), x);
                assert_eq!(g.apply(mul, &[x, g.apply(inv, &[x])]), e);
                for y in g.universe() {
                    for z in g.universe() {
                        let left = g.apply(mul, &[g.apply(mul, &[x, y]), z]);
                        let right = g.apply(mul, &[x, g.apply(mul, &[y, z])]);
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn gfp_spaces_have_exponent_p() {
        let s = gfp_space(3, 2);
        let f = parse_formula("forall x. add(x, add(x, x)) = zero", s.signature()).unwrap();
        assert!(evaluate(&s, &f).unwrap());
        let f = parse_formula("forall x. add(x, neg(x)) = zero", s.signature()).unwrap();
        assert!(evaluate(&s, &f).unwrap());
    }

    #[test]
    fn distinct_elements_counts() {
        let f = distinct_elements_witness(3);
        assert!(!evaluate(&FiniteStructure::pure_set(2), &f).unwrap());
        assert!(evaluate(&FiniteStructure::pure_set(3), &f).unwrap());
        let g = distinct_elements_witness(2);
        let text = g.to_string();
        assert_eq!(text, "exists x1. exists x2. x1 != x2");
        assert_eq!(parse_formula(&text, &Signature::empty()).unwrap(), g);
    }

    #[test]
    fn witness_sentences_round_trip() {
        for m in 1..=3 {
            for f in [divisibility_sentence(m), subset_sum_sentence(m)] {
                let text = f.to_string();
                assert_eq!(parse_formula(&text, &abelian_signature()).unwrap(), f, "{text}");
            }
            let f = distinct_elements_witness(m);
            assert_eq!(parse_formula(&f.to_string(), &Signature::empty()).unwrap(), f);
        }
    }

    #[test]
    fn divisibility_in_finite_cyclic_groups() {
        // Z/4 as a sanity check of the sentence shape: 2 does not divide 1.
        let z4 = FiniteStructure::from_fn(
            abelian_signature(),
            4,
            |fi, t| match fi {
                0 => (t[0] + t[1]) % 4,
                1 => (4 - t[0]) % 4,
                _ => 0,
            },
            |_, _| false,
        )
        .unwrap();
        assert!(!evaluate(&z4, &divisibility_sentence(2)).unwrap());
        assert!(evaluate(&z4, &divisibility_sentence(3)).unwrap());
    }

    #[test]
    fn witness_schemas_never_settle() {
        for schema in WitnessSchema::ALL {
            for (i, change) in late_changes(schema, 6, 20) {
                let change = change.unwrap_or_else(|| panic!("{schema:?} settles by {i}"));
                assert_eq!(change.first_change, i + 1);
            }
        }
        let div = late_changes(WitnessSchema::Divisibility, 4, 20);
        let ms: Vec<usize> = div.iter().map(|(_, c)| c.as_ref().unwrap().m).collect();
        assert_eq!(ms, [3, 5, 7, 11]);
    }
}
