//! Prenex normal form.

use std::collections::BTreeSet;

use super::formula::{Formula, Quantifier};

/// Converts `f` into a logically equivalent prenex formula.
///
/// Bound variables are first renamed apart (keeping original names where no
/// clash occurs), then quantifiers are pulled outward through negation
/// (dualizing) and through binary connectives, left operand first. Universes
/// are nonempty, so pulling a quantifier over a connective is sound.
pub fn to_prenex(f: &Formula) -> Formula {
    let mut used: BTreeSet<String> = f.free_variables();
    let renamed = rename_apart(f, &mut used);
    let (prefix, matrix) = pull(&renamed);
    prefix.into_iter().rev().fold(matrix, |body, (q, v)| Formula::Quant(q, v, Box::new(body)))
}

fn fresh(base: &str, used: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("{base}_{i}")).find(|c| !used.contains(c)).expect("unbounded supply of names")
}

fn rename_apart(f: &Formula, used: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Eq(..) | Formula::Rel(..) => f.clone(),
        Formula::Not(g) => Formula::not(rename_apart(g, used)),
        Formula::And(a, b) => {
            let a = rename_apart(a, used);
            Formula::and(a, rename_apart(b, used))
        }
        Formula::Or(a, b) => {
            let a = rename_apart(a, used);
            Formula::or(a, rename_apart(b, used))
        }
        Formula::Quant(q, v, body) => {
            let name = if used.contains(v) { fresh(v, used) } else { v.clone() };
            used.insert(name.clone());
            let body = if &name == v { (**body).clone() } else { body.rename_free(v, &name) };
            Formula::Quant(*q, name, Box::new(rename_apart(&body, used)))
        }
    }
}

type Prefix = Vec<(Quantifier, String)>;

fn pull(f: &Formula) -> (Prefix, Formula) {
    match f {
        Formula::Eq(..) | Formula::Rel(..) => (Vec::new(), f.clone()),
        Formula::Not(g) => {
            let (prefix, matrix) = pull(g);
            let dual = prefix.into_iter().map(|(q, v)| (q.dual(), v)).collect();
            (dual, Formula::not(matrix))
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (mut pa, ma) = pull(a);
            let (pb, mb) = pull(b);
            pa.extend(pb);
            let matrix = if matches!(f, Formula::And(..)) { Formula::and(ma, mb) } else { Formula::or(ma, mb) };
            (pa, matrix)
        }
        Formula::Quant(q, v, body) => {
            let (mut prefix, matrix) = pull(body);
            prefix.insert(0, (*q, v.clone()));
            (prefix, matrix)
        }
    }
}
