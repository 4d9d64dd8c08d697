//! Automorphism search by backtracking over partial injections.
//!
//! Elements are split by cheap isomorphism invariants first; the search then
//! picks the unassigned element with the fewest remaining images, and every
//! assignment is propagated through the function tables and checked against
//! the relations on the assigned part.

use std::collections::{HashSet, VecDeque};

use crate::structure::{tuple_at, tuple_count, tuple_index, Element, FiniteStructure};

/// Default node budget for one search.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Vec<Element>),
    Absent,
    /// The node budget ran out first.
    Indeterminate,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&[Element]> {
        match self {
            SearchOutcome::Found(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AutomorphismSet {
    pub perms: Vec<Vec<Element>>,
    /// False when the budget ran out before the search finished.
    pub complete: bool,
    pub nodes: u64,
}

impl AutomorphismSet {
    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn is_group(&self) -> bool {
        is_group(&self.perms)
    }
}

/// Whether a set of permutations is a group: it contains the identity, is
/// closed under inverses, and equals the group generated by a subset of it.
pub fn is_group(perms: &[Vec<Element>]) -> bool {
    let Some(first) = perms.first() else { return false };
    let n = first.len();
    let set: HashSet<&[Element]> = perms.iter().map(|p| p.as_slice()).collect();
    let identity: Vec<Element> = (0..n).collect();
    if !set.contains(identity.as_slice()) {
        return false;
    }
    let inverse = |p: &[Element]| {
        let mut inv = vec![0; n];
        for (i, &x) in p.iter().enumerate() {
            inv[x] = i;
        }
        inv
    };
    if perms.iter().any(|p| !set.contains(inverse(p).as_slice())) {
        return false;
    }
    // Grow the generated group one generator at a time; it must stay inside
    // the set, and it ends up containing every member.
    let mut generators: Vec<&[Element]> = Vec::new();
    let mut generated: HashSet<Vec<Element>> = HashSet::from([identity.clone()]);
    for p in perms {
        if generated.contains(p) {
            continue;
        }
        generators.push(p);
        let mut queue: VecDeque<Vec<Element>> = generated.iter().cloned().collect();
        while let Some(g) = queue.pop_front() {
            for h in &generators {
                let prod: Vec<Element> = h.iter().map(|&x| g[x]).collect();
                if !set.contains(prod.as_slice()) {
                    return false;
                }
                if generated.insert(prod.clone()) {
                    queue.push_back(prod);
                }
            }
        }
    }
    generated.len() == set.len()
}

/// Per-element invariants preserved by every automorphism.
fn invariants(s: &FiniteStructure) -> Vec<Vec<usize>> {
    let n = s.size();
    let sig = s.signature();
    let mut inv = vec![Vec::new(); n];
    for (ri, r) in sig.relations().iter().enumerate() {
        let mut counts = vec![vec![0usize; r.arity]; n];
        for t in 0..tuple_count(n, r.arity) {
            let tuple = tuple_at(n, r.arity, t);
            if s.holds(ri, &tuple) {
                for (p, &e) in tuple.iter().enumerate() {
                    counts[e][p] += 1;
                }
            }
        }
        for e in 0..n {
            inv[e].extend(&counts[e]);
        }
    }
    for (fi, f) in sig.functions().iter().enumerate() {
        let mut preimages = vec![0usize; n];
        for t in 0..tuple_count(n, f.arity) {
            preimages[s.apply(fi, &tuple_at(n, f.arity, t))] += 1;
        }
        for e in 0..n {
            inv[e].push(preimages[e]);
            if f.arity >= 1 {
                inv[e].push(usize::from(s.apply(fi, &vec![e; f.arity]) == e));
            }
        }
    }
    inv
}

struct Searcher<'a> {
    s: &'a FiniteStructure,
    domain: Vec<Vec<bool>>,
    map: Vec<usize>,
    inv: Vec<usize>,
    assigned: Vec<Element>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> Searcher<'a> {
    fn new(s: &'a FiniteStructure, fix: &[Element], carry: &[Element], target: &[Element], budget: u64) -> Self {
        let n = s.size();
        let inv = invariants(s);
        let mut domain: Vec<Vec<bool>> = (0..n).map(|e| (0..n).map(|v| inv[e] == inv[v]).collect()).collect();
        for &c in carry {
            for v in 0..n {
                domain[c][v] &= target.contains(&v);
            }
        }
        for &a in fix {
            for v in 0..n {
                domain[a][v] &= v == a;
            }
        }
        Searcher {
            s,
            domain,
            map: vec![NONE; n],
            inv: vec![NONE; n],
            assigned: Vec::new(),
            nodes: 0,
            budget,
            exhausted: false,
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.assigned.len() > mark {
            let e = self.assigned.pop().expect("nonempty");
            self.inv[self.map[e]] = NONE;
            self.map[e] = NONE;
        }
    }

    /// Assigns `e -> v` and everything it forces; false on a conflict (the
    /// caller undoes the partial work).
    fn assign(&mut self, e: Element, v: Element) -> bool {
        let mut queue = VecDeque::from([(e, v)]);
        while let Some((e, v)) = queue.pop_front() {
            if self.map[e] != NONE {
                if self.map[e] != v {
                    return false;
                }
                continue;
            }
            if self.inv[v] != NONE || !self.domain[e][v] {
                return false;
            }
            self.map[e] = v;
            self.inv[v] = e;
            self.assigned.push(e);
            if !self.check_new(e, &mut queue) {
                return false;
            }
        }
        true
    }

    /// Checks the tuples over the assigned set that contain `e`, queueing the
    /// images forced by function tables.
    fn check_new(&self, e: Element, queue: &mut VecDeque<(Element, Element)>) -> bool {
        let n = self.s.size();
        let sig = self.s.signature();
        let pts = &self.assigned;
        for (ri, r) in sig.relations().iter().enumerate() {
            for t in 0..tuple_count(pts.len(), r.arity) {
                let tuple: Vec<Element> = tuple_at(pts.len(), r.arity, t).into_iter().map(|k| pts[k]).collect();
                if !tuple.contains(&e) {
                    continue;
                }
                let image: Vec<Element> = tuple.iter().map(|&x| self.map[x]).collect();
                let table = self.s.relation_table(ri);
                if table[tuple_index(n, &tuple)] != table[tuple_index(n, &image)] {
                    return false;
                }
            }
        }
        for (fi, f) in sig.functions().iter().enumerate() {
            if f.arity == 0 {
                continue;
            }
            for t in 0..tuple_count(pts.len(), f.arity) {
                let tuple: Vec<Element> = tuple_at(pts.len(), f.arity, t).into_iter().map(|k| pts[k]).collect();
                if !tuple.contains(&e) {
                    continue;
                }
                let image: Vec<Element> = tuple.iter().map(|&x| self.map[x]).collect();
                queue.push_back((self.s.apply(fi, &tuple), self.s.apply(fi, &image)));
            }
        }
        true
    }

    /// Forces nullary symbols onto themselves.
    fn start(&mut self) -> bool {
        let constants: Vec<Element> = self
            .s
            .signature()
            .functions()
            .iter()
            .enumerate()
            .filter(|(_, f)| f.arity == 0)
            .map(|(fi, _)| self.s.apply(fi, &[]))
            .collect();
        constants.into_iter().all(|c| self.assign(c, c))
    }

    fn choose(&self) -> Option<(Element, Vec<Element>)> {
        let n = self.s.size();
        (0..n)
            .filter(|&e| self.map[e] == NONE)
            .map(|e| {
                let options: Vec<Element> = (0..n).filter(|&v| self.inv[v] == NONE && self.domain[e][v]).collect();
                (e, options)
            })
            .min_by_key(|(_, options)| options.len())
    }

    /// Depth-first search; `visit` returns false to stop.
    fn search(&mut self, visit: &mut dyn FnMut(&[Element]) -> bool) -> bool {
        let Some((e, options)) = self.choose() else {
            return visit(&self.map);
        };
        for v in options {
            if self.nodes >= self.budget {
                self.exhausted = true;
                return false;
            }
            self.nodes += 1;
            let mark = self.assigned.len();
            let ok = self.assign(e, v);
            let go_on = !ok || self.search(visit);
            self.undo_to(mark);
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// All automorphisms fixing `fix` pointwise, in search order.
pub fn enumerate_fixing(s: &FiniteStructure, fix: &[Element], budget: u64) -> AutomorphismSet {
    let mut searcher = Searcher::new(s, fix, &[], &[], budget);
    let mut perms = Vec::new();
    if searcher.start() {
        searcher.search(&mut |p| {
            perms.push(p.to_vec());
            true
        });
    }
    perms.sort();
    AutomorphismSet { perms, complete: !searcher.exhausted, nodes: searcher.nodes }
}

pub fn enumerate_automorphisms(s: &FiniteStructure, budget: u64) -> AutomorphismSet {
    enumerate_fixing(s, &[], budget)
}

/// An automorphism fixing `fix` pointwise that maps `carry` into `target`.
pub fn find_constrained_automorphism(
    s: &FiniteStructure,
    fix: &[Element],
    carry: &[Element],
    target: &[Element],
    budget: u64,
) -> SearchOutcome {
    let mut searcher = Searcher::new(s, fix, carry, target, budget);
    let mut found = None;
    if searcher.start() {
        searcher.search(&mut |p| {
            found = Some(p.to_vec());
            false
        });
    }
    match found {
        Some(p) => SearchOutcome::Found(p),
        None if searcher.exhausted => SearchOutcome::Indeterminate,
        None => SearchOutcome::Absent,
    }
}
