use std::collections::BTreeSet;
use std::fmt;

/// A term: variable, named constant of the augmented language (`@name`), or
/// function application (nullary applications are the signature's constants).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn collect_constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_constants(out)),
        }
    }

    pub(crate) fn rename_var(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(v) if v == from => Term::Var(to.to_string()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename_var(from, to)).collect()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "@{c}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// First-order formula. Implication is desugared by the parser into
/// negation and disjunction; disequality is `Not(Eq(..))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Quant(Quantifier, String, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Self {
        Formula::not(Formula::Eq(a, b))
    }

    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Rel(name.into(), args)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Self {
        Formula::Quant(Quantifier::Forall, v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Self {
        Formula::Quant(Quantifier::Exists, v.into(), Box::new(body))
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Left-nested disjunction; `None` for an empty iterator.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    /// Maximum nesting depth of quantifiers.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => 0,
            Formula::Not(f) => f.quantifier_rank(),
            Formula::And(a, b) | Formula::Or(a, b) => a.quantifier_rank().max(b.quantifier_rank()),
            Formula::Quant(_, _, f) => 1 + f.quantifier_rank(),
        }
    }

    /// Number of atomic subformulas.
    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => 1,
            Formula::Not(f) | Formula::Quant(_, _, f) => f.atom_count(),
            Formula::And(a, b) | Formula::Or(a, b) => a.atom_count() + b.atom_count(),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                let mut vars = BTreeSet::new();
                a.collect_vars(&mut vars);
                b.collect_vars(&mut vars);
                out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Rel(_, args) => {
                let mut vars = BTreeSet::new();
                args.iter().for_each(|a| a.collect_vars(&mut vars));
                out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Named constants (`@name`) mentioned anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| t.collect_constants(&mut out));
        out
    }

    fn visit_terms(&self, visit: &mut impl FnMut(&Term)) {
        match self {
            Formula::Eq(a, b) => {
                visit(a);
                visit(b);
            }
            Formula::Rel(_, args) => args.iter().for_each(&mut *visit),
            Formula::Not(f) | Formula::Quant(_, _, f) => f.visit_terms(visit),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit_terms(visit);
                b.visit_terms(visit);
            }
        }
    }

    /// Whether every quantifier sits in a single outermost prefix.
    pub fn is_prenex(&self) -> bool {
        match self {
            Formula::Quant(_, _, f) => f.is_prenex(),
            other => other.quantifier_rank() == 0,
        }
    }

    /// Renames free occurrences of variable `from` to `to`.
    pub(crate) fn rename_free(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.rename_var(from, to), b.rename_var(from, to)),
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| a.rename_var(from, to)).collect()),
            Formula::Not(f) => Formula::not(f.rename_free(from, to)),
            Formula::And(a, b) => Formula::and(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Or(a, b) => Formula::or(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Quant(q, v, f) if v == from => Formula::Quant(*q, v.clone(), f.clone()),
            Formula::Quant(q, v, f) => Formula::Quant(*q, v.clone(), Box::new(f.rename_free(from, to))),
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8, rightmost: bool) -> fmt::Result {
        // Precedence levels: 0 quantifier body, 1 `|`, 2 `&`, 3 prefix `!`.
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(inner) if matches!(**inner, Formula::Eq(..)) => {
                let Formula::Eq(a, b) = &**inner else { unreachable!() };
                write!(f, "{a} != {b}")
            }
            Formula::Rel(r, args) => write!(f, "{}", Term::App(r.clone(), args.clone())),
            Formula::Not(inner) => {
                write!(f, "!")?;
                inner.write_prec(f, 3, rightmost)
            }
            Formula::And(a, b) => write_binary(f, a, b, " & ", 2, prec, rightmost),
            Formula::Or(a, b) => write_binary(f, a, b, " | ", 1, prec, rightmost),
            Formula::Quant(q, v, body) => {
                let parens = prec > 0 && !rightmost;
                if parens {
                    write!(f, "(")?;
                }
                write!(f, "{} {v}. ", q.keyword())?;
                body.write_prec(f, 0, true)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

fn write_binary(
    f: &mut fmt::Formatter<'_>,
    left: &Formula,
    right: &Formula,
    op: &str,
    level: u8,
    prec: u8,
    rightmost: bool,
) -> fmt::Result {
    let parens = prec > level;
    let inner_rightmost = parens || rightmost;
    if parens {
        write!(f, "(")?;
    }
    // Left-associative: the left operand may share the level, the right may not.
    left.write_prec(f, level, false)?;
    write!(f, "{op}")?;
    right.write_prec(f, level + 1, inner_rightmost)?;
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0, true)
    }
}
