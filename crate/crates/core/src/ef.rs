//! Ehrenfeucht–Fraïssé games and bounded-rank elementarity.

use std::collections::HashMap;

use thiserror::Error;

use crate::eval::{CompiledFormula, EvalError};
use crate::structure::{tuple_at, tuple_count, Element, FiniteStructure, StructureError};
use crate::syntax::pool::SentencePool;

#[derive(Debug, Error)]
pub enum EfError {
    #[error("the structures have different signatures")]
    SignatureMismatch,
    #[error("the pool has no formulas with free variables")]
    NoOpenFormulas,
    #[error("the map is not a substructure embedding")]
    NotAnEmbedding,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Whether the pebbled pairs extend to an isomorphism between the generated
/// substructures (named constants and nullary symbols included).
fn partial_isomorphism(a: &FiniteStructure, b: &FiniteStructure, pairs: &[(Element, Element)]) -> bool {
    let mut fwd: Vec<Option<Element>> = vec![None; a.size()];
    let mut back: Vec<Option<Element>> = vec![None; b.size()];
    let mut queue: Vec<(Element, Element)> = pairs.to_vec();
    for (name, &x) in a.names() {
        match b.name(name) {
            Some(y) => queue.push((x, y)),
            None => return false,
        }
    }
    if a.names().len() != b.names().len() {
        return false;
    }
    let sig = a.signature();
    for (fi, f) in sig.functions().iter().enumerate() {
        if f.arity == 0 {
            queue.push((a.apply(fi, &[]), b.apply(fi, &[])));
        }
    }
    let mut domain: Vec<Element> = Vec::new();
    loop {
        while let Some((x, y)) = queue.pop() {
            match (fwd[x], back[y]) {
                (Some(y2), _) if y2 != y => return false,
                (_, Some(x2)) if x2 != x => return false,
                (Some(_), _) => {}
                _ => {
                    fwd[x] = Some(y);
                    back[y] = Some(x);
                    domain.push(x);
                }
            }
        }
        // Close under the function symbols.
        let before = domain.len();
        for (fi, f) in sig.functions().iter().enumerate().filter(|(_, f)| f.arity > 0) {
            for t in 0..tuple_count(domain.len(), f.arity) {
                let args: Vec<Element> = tuple_at(domain.len(), f.arity, t).into_iter().map(|k| domain[k]).collect();
                let images: Vec<Element> = args.iter().map(|&x| fwd[x].expect("in domain")).collect();
                let (x, y) = (a.apply(fi, &args), b.apply(fi, &images));
                if fwd[x] != Some(y) {
                    queue.push((x, y));
                }
            }
        }
        if queue.is_empty() && domain.len() == before {
            break;
        }
    }
    for (ri, r) in sig.relations().iter().enumerate() {
        for t in 0..tuple_count(domain.len(), r.arity) {
            let args: Vec<Element> = tuple_at(domain.len(), r.arity, t).into_iter().map(|k| domain[k]).collect();
            let images: Vec<Element> = args.iter().map(|&x| fwd[x].expect("in domain")).collect();
            if a.holds(ri, &args) != b.holds(ri, &images) {
                return false;
            }
        }
    }
    true
}

struct Game<'a> {
    a: &'a FiniteStructure,
    b: &'a FiniteStructure,
    memo: HashMap<(Vec<(Element, Element)>, usize), bool>,
}

impl Game<'_> {
    fn duplicator_wins(&mut self, pairs: &[(Element, Element)], rounds: usize) -> bool {
        let mut key: Vec<(Element, Element)> = pairs.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(&v) = self.memo.get(&(key.clone(), rounds)) {
            return v;
        }
        let result = partial_isomorphism(self.a, self.b, &key) && (rounds == 0 || self.all_moves(&key, rounds));
        self.memo.insert((key, rounds), result);
        result
    }

    fn all_moves(&mut self, pairs: &[(Element, Element)], rounds: usize) -> bool {
        let mut next = pairs.to_vec();
        next.push((0, 0));
        let last = next.len() - 1;
        for x in self.a.universe() {
            let answered = self.b.universe().any(|y| {
                next[last] = (x, y);
                self.duplicator_wins(&next, rounds - 1)
            });
            if !answered {
                return false;
            }
        }
        for y in self.b.universe() {
            let answered = self.a.universe().any(|x| {
                next[last] = (x, y);
                self.duplicator_wins(&next, rounds - 1)
            });
            if !answered {
                return false;
            }
        }
        true
    }
}

/// Whether Duplicator wins the `k`-round game on `a` and `b`.
pub fn ef_equivalent(a: &FiniteStructure, b: &FiniteStructure, k: usize) -> Result<bool, EfError> {
    if a.signature() != b.signature() {
        return Err(EfError::SignatureMismatch);
    }
    let mut game = Game { a, b, memo: HashMap::new() };
    Ok(game.duplicator_wins(&[], k))
}

/// Whether every pool formula of rank at most `k` has the same truth value in
/// `small` and, through `map`, in `big`, for every parameter tuple from `small`.
pub fn elementary_up_to_rank(
    small: &FiniteStructure,
    big: &FiniteStructure,
    map: &[Element],
    k: usize,
    pool: &SentencePool,
) -> Result<bool, EfError> {
    if !crate::structure::is_substructure(small, big, map)? {
        return Err(EfError::NotAnEmbedding);
    }
    let free = pool.free_variables();
    if free.is_empty() || pool.sentences().iter().all(|f| f.is_sentence()) {
        return Err(EfError::NoOpenFormulas);
    }
    for f in pool.sentences().iter().filter(|f| f.quantifier_rank() <= k) {
        let in_small = CompiledFormula::new(small, f, free)?;
        let in_big = CompiledFormula::new(big, f, free)?;
        for t in 0..tuple_count(small.size(), free.len()) {
            let args = tuple_at(small.size(), free.len(), t);
            let image: Vec<Element> = args.iter().map(|&x| map[x]).collect();
            if in_small.eval(&args) != in_big.eval(&image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
