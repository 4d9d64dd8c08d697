//! Horizon-bounded checks of the automorphism conditions that force the
//! limit of augmented theories to exist.
//!
//! Condition (1): for the constants `a` there is an index `i` such that for
//! every `j` in `(i, N]` and every `b` in `S_j^m` some automorphism of `S_j`
//! fixes `a` pointwise and maps `a ∪ b` into the image of `S_i`. Condition (2)
//! replaces `S_j` by an ambient structure that stands in for the union.
//!
//! Constants are drawn from a designated early member and carried forward by
//! the chain's composite embeddings. `b` tuples are checked one per orbit of
//! the `a`-fixing automorphism group; each other tuple records the group
//! element that moves its representative onto it.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automorphism::{enumerate_fixing, find_constrained_automorphism, SearchOutcome};
use crate::eval::{tabulate, EvalError, UnresolvedPolicy};
use crate::limit::{limit_report, LimitError};
use crate::structure::{is_substructure, tuple_at, tuple_count, ChainFamily, Element, FiniteStructure, StructureError};
use crate::syntax::pool::{generate_pool_with, PoolConfig, PoolError};

#[derive(Debug, Error)]
pub enum HomogeneityError {
    #[error("tuple size m must be at least 1")]
    ZeroM,
    #[error("no chain member has at least {0} elements")]
    NoDesignatedMember(usize),
    #[error("designated member {0} is outside the chain")]
    BadDesignated(usize),
    #[error("the chain needs at least two members")]
    ShortChain,
    #[error("the last chain member does not embed into the ambient structure")]
    AmbientEmbedding,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Pool(#[from] PoolError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub m: usize,
    pub budget: u64,
    /// 1-based member supplying the constants; default the first member with
    /// at least `m` elements.
    pub designated: Option<usize>,
}

impl CheckConfig {
    pub fn new(m: usize, budget: u64) -> Self {
        CheckConfig { m, budget, designated: None }
    }
}

/// A `b` tuple together with the representative of its orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitEntry {
    pub tuple: Vec<Element>,
    pub rep: usize,
    /// A group element sending the representative's tuple onto `tuple`.
    pub witness: Vec<Element>,
}

/// Where the `b` tuples live: a chain member or the ambient structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Member(usize),
    Ambient,
}

#[derive(Clone, Debug)]
pub struct Evidence {
    pub place: Place,
    /// Orbit representatives with a verifying automorphism for each.
    pub reps: Vec<(Vec<Element>, Vec<Element>)>,
    pub orbits: Vec<OrbitEntry>,
    /// False when the `a`-fixing group could not be enumerated within budget;
    /// every tuple is then its own representative.
    pub orbit_group_complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub i: usize,
    pub place: Place,
    pub b: Vec<Element>,
    /// The search ran out of budget rather than proving absence.
    pub indeterminate: bool,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    /// The constants, as elements of the designated member.
    pub a: Vec<Element>,
    pub i: Option<usize>,
    pub evidence: Vec<Evidence>,
    /// The first failing `(j, b)` for each rejected `i`.
    pub failures: Vec<Failure>,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.i.is_some()
    }

    pub fn is_indeterminate(&self) -> bool {
        self.i.is_none() && self.failures.iter().any(|f| f.indeterminate)
    }
}

#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub condition: u8,
    pub m: usize,
    pub designated: usize,
    pub horizon: usize,
    pub ambient: Option<String>,
    pub certificates: Vec<Certificate>,
}

impl ConditionReport {
    pub fn all_certified(&self) -> bool {
        self.certificates.iter().all(Certificate::is_certified)
    }

    pub fn none_certified(&self) -> bool {
        self.certificates.iter().all(|c| !c.is_certified())
    }

    /// The largest certified index, when every constant choice is certified.
    pub fn uniform_index(&self) -> Option<usize> {
        if !self.all_certified() {
            return None;
        }
        self.certificates.iter().filter_map(|c| c.i).max()
    }
}

fn designated_member(chain: &ChainFamily, config: &CheckConfig) -> Result<usize, HomogeneityError> {
    if config.m == 0 {
        return Err(HomogeneityError::ZeroM);
    }
    match config.designated {
        Some(d) if d >= 1 && d <= chain.len() => Ok(d),
        Some(d) => Err(HomogeneityError::BadDesignated(d)),
        None => (1..=chain.len())
            .find(|&n| chain.member(n).size() >= config.m)
            .ok_or(HomogeneityError::NoDesignatedMember(config.m)),
    }
}

/// Strictly increasing `m`-tuples, i.e. the `m`-element subsets.
fn subsets(size: usize, m: usize) -> Vec<Vec<Element>> {
    fn go(start: usize, size: usize, m: usize, cur: &mut Vec<Element>, out: &mut Vec<Vec<Element>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for e in start..size {
            cur.push(e);
            go(e + 1, size, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, size, m, &mut Vec::new(), &mut out);
    out
}

fn orbits(s: &FiniteStructure, fix: &[Element], m: usize, budget: u64) -> (Vec<OrbitEntry>, Vec<usize>, bool) {
    let n = s.size();
    let group = enumerate_fixing(s, fix, budget);
    let identity: Vec<Element> = (0..n).collect();
    let total = tuple_count(n, m);
    let mut entries: Vec<Option<OrbitEntry>> = vec![None; total];
    let mut reps = Vec::new();
    for t in 0..total {
        if entries[t].is_some() {
            continue;
        }
        let tuple = tuple_at(n, m, t);
        let rep = reps.len();
        reps.push(t);
        entries[t] = Some(OrbitEntry { tuple: tuple.clone(), rep, witness: identity.clone() });
        if !group.complete {
            continue;
        }
        for g in &group.perms {
            let image: Vec<Element> = tuple.iter().map(|&x| g[x]).collect();
            let k = crate::structure::tuple_index(n, &image);
            if entries[k].is_none() {
                entries[k] = Some(OrbitEntry { tuple: image, rep, witness: g.clone() });
            }
        }
    }
    (entries.into_iter().map(|e| e.expect("covered")).collect(), reps, group.complete)
}

struct Site<'a> {
    place: Place,
    structure: &'a FiniteStructure,
    /// Image of the designated member.
    from_designated: Vec<Element>,
}

fn check_place(
    place: &Site<'_>,
    a: &[Element],
    target: &[Element],
    i: usize,
    m: usize,
    budget: u64,
    cache: &mut HashMap<Place, (Vec<OrbitEntry>, Vec<usize>, bool)>,
) -> Result<Evidence, Failure> {
    let fix: Vec<Element> = a.iter().map(|&x| place.from_designated[x]).collect();
    let (entries, rep_codes, complete) =
        &*cache.entry(place.place).or_insert_with(|| orbits(place.structure, &fix, m, budget));
    let mut reps = Vec::new();
    for &code in rep_codes {
        let b = entries[code].tuple.clone();
        let mut carry = fix.clone();
        carry.extend(&b);
        match find_constrained_automorphism(place.structure, &fix, &carry, target, budget) {
            SearchOutcome::Found(f) => reps.push((b, f)),
            outcome => {
                return Err(Failure {
                    i,
                    place: place.place,
                    b,
                    indeterminate: outcome == SearchOutcome::Indeterminate,
                })
            }
        }
    }
    Ok(Evidence { place: place.place, reps, orbits: entries.clone(), orbit_group_complete: *complete })
}

fn image_set(map: &[Element]) -> Vec<Element> {
    let mut v = map.to_vec();
    v.sort_unstable();
    v
}

/// Checks condition (1) on the chain for every `m`-element constant set.
pub fn check_condition1(chain: &ChainFamily, config: &CheckConfig) -> Result<ConditionReport, HomogeneityError> {
    let d = designated_member(chain, config)?;
    let n = chain.len();
    if n < 2 {
        return Err(HomogeneityError::ShortChain);
    }
    let places: Vec<Site<'_>> = (1..=n)
        .map(|j| {
            Ok(Site {
                place: Place::Member(j),
                structure: chain.member(j),
                from_designated: if j >= d { chain.composite(d, j)? } else { Vec::new() },
            })
        })
        .collect::<Result<_, StructureError>>()?;
    let mut certificates = Vec::new();
    for a in subsets(chain.member(d).size(), config.m) {
        let mut cache = HashMap::new();
        let mut cert = Certificate { a: a.clone(), i: None, evidence: Vec::new(), failures: Vec::new() };
        'candidates: for i in d..n {
            let mut evidence = Vec::new();
            for j in i + 1..=n {
                let target = image_set(&chain.composite(i, j)?);
                match check_place(&places[j - 1], &a, &target, i, config.m, config.budget, &mut cache) {
                    Ok(e) => evidence.push(e),
                    Err(f) => {
                        cert.failures.push(f);
                        continue 'candidates;
                    }
                }
            }
            cert.i = Some(i);
            cert.evidence = evidence;
            break;
        }
        certificates.push(cert);
    }
    Ok(ConditionReport { condition: 1, m: config.m, designated: d, horizon: n, ambient: None, certificates })
}

/// Checks condition (2) with `ambient` standing in for the union; the last
/// member must embed into it via `embedding` (identity on a prefix when absent).
pub fn check_condition2(
    chain: &ChainFamily,
    ambient: &FiniteStructure,
    ambient_label: &str,
    embedding: Option<&[Element]>,
    config: &CheckConfig,
) -> Result<ConditionReport, HomogeneityError> {
    let d = designated_member(chain, config)?;
    let n = chain.len();
    let last = chain.member(n);
    let prefix: Vec<Element> = last.universe().collect();
    let embedding = embedding.unwrap_or(&prefix);
    if ambient.signature() != chain.signature() || !is_substructure(last, ambient, embedding)? {
        return Err(HomogeneityError::AmbientEmbedding);
    }
    let to_ambient = |from: usize| -> Result<Vec<Element>, StructureError> {
        Ok(chain.composite(from, n)?.iter().map(|&x| embedding[x]).collect())
    };
    let place = Site { place: Place::Ambient, structure: ambient, from_designated: to_ambient(d)? };
    let mut certificates = Vec::new();
    for a in subsets(chain.member(d).size(), config.m) {
        let mut cache = HashMap::new();
        let mut cert = Certificate { a: a.clone(), i: None, evidence: Vec::new(), failures: Vec::new() };
        for i in d..=n {
            let target = image_set(&to_ambient(i)?);
            match check_place(&place, &a, &target, i, config.m, config.budget, &mut cache) {
                Ok(e) => {
                    cert.i = Some(i);
                    cert.evidence = vec![e];
                    break;
                }
                Err(f) => cert.failures.push(f),
            }
        }
        certificates.push(cert);
    }
    Ok(ConditionReport {
        condition: 2,
        m: config.m,
        designated: d,
        horizon: n,
        ambient: Some(format!("{ambient_label} (finite approximation of the union)")),
        certificates,
    })
}

/// Re-verifies a certificate: every representative's automorphism directly,
/// and up to `samples` other tuples per place through their orbit witnesses.
pub fn verify_certificate(
    chain: &ChainFamily,
    ambient: Option<(&FiniteStructure, &[Element])>,
    report: &ConditionReport,
    cert: &Certificate,
    samples: usize,
    seed: u64,
) -> Result<bool, HomogeneityError> {
    let Some(i) = cert.i else { return Ok(false) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = report.designated;
    for ev in &cert.evidence {
        let (s, from_d, target) = match (ev.place, ambient) {
            (Place::Member(j), _) => (chain.member(j), chain.composite(d, j)?, image_set(&chain.composite(i, j)?)),
            (Place::Ambient, Some((amb, emb))) => {
                let n = chain.len();
                let via = |from: usize| -> Result<Vec<Element>, StructureError> {
                    Ok(chain.composite(from, n)?.iter().map(|&x| emb[x]).collect())
                };
                (amb, via(d)?, image_set(&via(i)?))
            }
            (Place::Ambient, None) => return Ok(false),
        };
        let fix: Vec<Element> = cert.a.iter().map(|&x| from_d[x]).collect();
        let good = |f: &[Element], b: &[Element]| {
            s.is_automorphism(f)
                && fix.iter().all(|&x| f[x] == x)
                && b.iter().chain(&fix).all(|&x| target.binary_search(&f[x]).is_ok())
        };
        if ev.reps.iter().any(|(b, f)| !good(f, b)) {
            return Ok(false);
        }
        let rep_tuple: BTreeMap<usize, &Vec<Element>> = ev.reps.iter().enumerate().map(|(k, (_, f))| (k, f)).collect();
        let mut others: Vec<&OrbitEntry> = ev.orbits.iter().filter(|e| e.tuple != ev.reps[e.rep].0).collect();
        others.shuffle(&mut rng);
        for entry in others.into_iter().take(samples) {
            let f_rep = rep_tuple[&entry.rep];
            let mut g_inv = vec![0; entry.witness.len()];
            for (x, &y) in entry.witness.iter().enumerate() {
                g_inv[y] = x;
            }
            let f: Vec<Element> = g_inv.iter().map(|&x| f_rep[x]).collect();
            if !good(&f, &entry.tuple) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of tabulating an augmented pool from the certified index on.
#[derive(Clone, Debug)]
pub struct AugmentedCheck {
    pub index: usize,
    pub pool_size: usize,
    /// Pool sentences classified in-limsup-only on columns `index..=N`.
    pub limsup_only: Vec<String>,
}

/// Names every element of `S_i` as `c<e>` along the chain and classifies the
/// augmented pool (at most `m` constants, rank at most `m`) on columns
/// `i..=N` at window 1.
pub fn augmented_limit_check(
    chain: &ChainFamily,
    i: usize,
    m: usize,
    seed: u64,
) -> Result<AugmentedCheck, HomogeneityError> {
    let n = chain.len();
    let base = chain.member(i).size();
    let names: Vec<BTreeMap<String, Element>> = (1..=n)
        .map(|j| {
            let mut names = BTreeMap::new();
            if j >= i {
                for (e, &x) in chain.composite(i, j)?.iter().enumerate() {
                    names.insert(format!("c{e}"), x);
                }
            } else {
                for (x, &e) in chain.composite(j, i)?.iter().enumerate() {
                    names.insert(format!("c{e}"), x);
                }
            }
            Ok(names)
        })
        .collect::<Result<_, StructureError>>()?;
    let named = chain.with_member_names(names)?;
    let mut config = PoolConfig::new(m, 2);
    config.constants = (0..base).map(|e| format!("c{e}")).collect();
    config.max_constants = Some(m);
    config.seed = seed;
    let pool = generate_pool_with(chain.signature(), &config)?;
    let matrix = tabulate(&named, &pool, UnresolvedPolicy::ReadAsFalse)?;
    let tail: Vec<usize> = (i..=n).collect();
    let report = limit_report(&matrix.columns(&tail), 1)?;
    let limsup_only = report.limsup_only().map(|r| report.rows[r].label.clone()).collect();
    Ok(AugmentedCheck { index: i, pool_size: pool.len(), limsup_only })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::DEFAULT_BUDGET;
    use crate::families::{build_chain, build_member, FamilySpec};

    fn chain(name: &str, n: usize) -> ChainFamily {
        build_chain(&FamilySpec::new(name), n).unwrap()
    }

    #[test]
    fn finite_sets_need_twice_m_elements() {
        let c = chain("finite-sets", 8);
        let report = check_condition1(&c, &CheckConfig::new(2, DEFAULT_BUDGET)).unwrap();
        assert_eq!(report.designated, 2);
        assert_eq!(report.certificates.len(), 1);
        let cert = &report.certificates[0];
        assert_eq!(cert.a, vec![0, 1]);
        assert_eq!(cert.i, Some(4));
        assert_eq!(c.member(4).size(), 4);
        assert!(verify_certificate(&c, None, &report, cert, 10, 7).unwrap());
    }

    #[test]
    fn parity_order_is_rigid() {
        let c = chain("parity-order", 6);
        let report = check_condition1(&c, &CheckConfig::new(1, DEFAULT_BUDGET)).unwrap();
        assert!(report.none_certified());
        assert!(report.certificates.iter().all(|c| !c.is_indeterminate()));
    }

    #[test]
    fn gf2_certificates() {
        let c = chain("gf2-vector-space", 4);
        let report = check_condition1(&c, &CheckConfig::new(1, DEFAULT_BUDGET)).unwrap();
        assert!(report.all_certified());
        let by_a: Vec<(Vec<Element>, Option<usize>)> = report.certificates.iter().map(|c| (c.a.clone(), c.i)).collect();
        assert_eq!(by_a, vec![(vec![0], Some(1)), (vec![1], Some(2))]);
        assert_eq!(report.uniform_index(), Some(2));
    }

    #[test]
    fn condition_two() {
        let c = chain("finite-sets", 8);
        let ambient = build_member(&FamilySpec::new("finite-sets"), 12).unwrap();
        let report =
            check_condition2(&c, &ambient, "finite-sets#12", None, &CheckConfig::new(2, DEFAULT_BUDGET)).unwrap();
        assert_eq!(report.certificates[0].i, Some(4));
        let prefix: Vec<Element> = (0..8).collect();
        let cert = &report.certificates[0];
        assert!(verify_certificate(&c, Some((&ambient, &prefix)), &report, cert, 10, 7).unwrap());

        let p = chain("parity-order", 6);
        let ambient = build_member(&FamilySpec::new("parity-order"), 9).unwrap();
        let report =
            check_condition2(&p, &ambient, "parity-order#9", None, &CheckConfig::new(1, DEFAULT_BUDGET)).unwrap();
        assert!(report.none_certified());
    }

    #[test]
    fn augmented_rows_settle_after_the_certified_index() {
        let c = chain("finite-sets", 8);
        let check = augmented_limit_check(&c, 4, 2, 1).unwrap();
        assert!(check.pool_size > 0);
        assert!(check.limsup_only.is_empty(), "{:?}", check.limsup_only);
    }
}
