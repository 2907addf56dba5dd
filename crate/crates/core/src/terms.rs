//! Terms, substitutions, environments and interpretation.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::sigcore::{table_len, ArgTuples, Elem, FiniteAlgebra, Signature};

/// A finite tree of variables and operation applications.
///
/// Variable names are stored without the `?` that marks them in the surface
/// syntax. Equality is literal tree equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(symbol: impl Into<String>, children: Vec<Term>) -> Term {
        Term::App(symbol.into(), children)
    }

    pub fn constant(symbol: impl Into<String>) -> Term {
        Term::App(symbol.into(), Vec::new())
    }

    /// Variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, ch) if ch.is_empty() => 0,
            Term::App(_, ch) => 1 + ch.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, ch) => 1 + ch.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Distinct variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::App(_, ch) => ch.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Checks every application against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), EvalError> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(f, ch) => {
                let arity = sig.arity_of(f).ok_or_else(|| EvalError::UnknownSymbol(f.clone()))?;
                if arity != ch.len() {
                    return Err(EvalError::ArityMismatch {
                        symbol: f.clone(),
                        expected: arity,
                        found: ch.len(),
                    });
                }
                ch.iter().try_for_each(|c| c.check(sig))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "?{x}"),
            Term::App(s, ch) if ch.is_empty() => write!(f, "{s}"),
            Term::App(s, ch) => {
                write!(f, "{s}(")?;
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// An identity `lhs ≈ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn swapped(&self) -> Equation {
        Equation::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    /// Variables of the left side, then new ones from the right side, in
    /// order of first occurrence. This is the declaration order used for
    /// environment enumeration.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.lhs.collect_vars(&mut out);
        self.rhs.collect_vars(&mut out);
        out
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// A map from variables to terms; unmapped variables stay fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, var: impl Into<String>, t: Term) -> &mut Self {
        self.map.insert(var.into(), t);
        self
    }

    pub fn with(mut self, var: impl Into<String>, t: Term) -> Self {
        self.bind(var, t);
        self
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, t: &Term) -> Term {
        substitute(self, t)
    }

    /// The substitution that applies `self` first and `then` afterwards:
    /// `x ↦ [then]([self] x)`.
    pub fn then(&self, then: &Substitution) -> Substitution {
        let mut map: BTreeMap<String, Term> = self.map.iter().map(|(x, t)| (x.clone(), substitute(then, t))).collect();
        for (x, t) in &then.map {
            map.entry(x.clone()).or_insert_with(|| t.clone());
        }
        Substitution { map }
    }
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

pub fn substitute(sigma: &Substitution, t: &Term) -> Term {
    match t {
        Term::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, ch) => Term::App(f.clone(), ch.iter().map(|c| substitute(sigma, c)).collect()),
    }
}

/// An assignment of carrier values to variables, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Environment {
    bindings: Vec<(String, Elem)>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `var`, replacing an existing binding in place.
    pub fn bind(&mut self, var: impl Into<String>, value: Elem) -> &mut Self {
        let var = var.into();
        match self.bindings.iter_mut().find(|(x, _)| *x == var) {
            Some(slot) => slot.1 = value,
            None => self.bindings.push((var, value)),
        }
        self
    }

    pub fn get(&self, var: &str) -> Option<Elem> {
        self.bindings.iter().find(|(x, _)| x == var).map(|&(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Elem)> {
        self.bindings.iter().map(|(x, v)| (x.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = Elem> + '_ {
        self.bindings.iter().map(|&(_, v)| v)
    }

    /// Zips variable names with values.
    pub fn from_values(vars: &[String], values: &[Elem]) -> Self {
        Environment {
            bindings: vars.iter().cloned().zip(values.iter().copied()).collect(),
        }
    }

    /// Every environment over `vars` into a carrier of size `n`, in
    /// lexicographic order with the first variable most significant.
    pub fn all(vars: &[String], n: usize) -> impl Iterator<Item = Environment> + '_ {
        ArgTuples::new(n, vars.len()).map(move |vals| Environment::from_values(vars, &vals))
    }
}

impl<S: Into<String>> FromIterator<(S, Elem)> for Environment {
    fn from_iter<I: IntoIterator<Item = (S, Elem)>>(iter: I) -> Self {
        let mut env = Environment::new();
        for (x, v) in iter {
            env.bind(x, v);
        }
        env
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable ?{0}")]
    UnboundVariable(String),
    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("op {symbol} has arity {expected}, applied to {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("variable ?{var} bound to {value}, outside carrier of size {size}")]
    OutOfRange { var: String, value: Elem, size: usize },
}

fn lookup_op(alg: &FiniteAlgebra, f: &str, nargs: usize) -> Result<usize, EvalError> {
    let sig = alg.signature();
    let op = sig.index_of(f).ok_or_else(|| EvalError::UnknownSymbol(f.to_string()))?;
    let arity = sig.ops()[op].arity;
    if arity != nargs {
        return Err(EvalError::ArityMismatch {
            symbol: f.to_string(),
            expected: arity,
            found: nargs,
        });
    }
    Ok(op)
}

fn lookup_var(alg: &FiniteAlgebra, x: &str, value: Option<Elem>) -> Result<Elem, EvalError> {
    let v = value.ok_or_else(|| EvalError::UnboundVariable(x.to_string()))?;
    if v >= alg.size() {
        return Err(EvalError::OutOfRange {
            var: x.to_string(),
            value: v,
            size: alg.size(),
        });
    }
    Ok(v)
}

/// Interprets `t` in `alg` under `rho`.
pub fn evaluate(alg: &FiniteAlgebra, t: &Term, rho: &Environment) -> Result<Elem, EvalError> {
    match t {
        Term::Var(x) => lookup_var(alg, x, rho.get(x)),
        Term::App(f, ch) => {
            let op = lookup_op(alg, f, ch.len())?;
            let args = ch
                .iter()
                .map(|c| evaluate(alg, c, rho))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(alg.apply(op, &args))
        }
    }
}

/// The unique homomorphic extension of a variable assignment `h` to terms,
/// applied to `t`.
///
/// Computed with an explicit post-order stack rather than by recursion, so
/// that agreement with [`evaluate`] is a meaningful check.
pub fn free_lift<H>(alg: &FiniteAlgebra, h: H, t: &Term) -> Result<Elem, EvalError>
where
    H: Fn(&str) -> Option<Elem>,
{
    enum Step<'a> {
        Visit(&'a Term),
        Combine(usize, usize),
    }
    let mut work = vec![Step::Visit(t)];
    let mut values: Vec<Elem> = Vec::new();
    while let Some(step) = work.pop() {
        match step {
            Step::Visit(Term::Var(x)) => values.push(lookup_var(alg, x, h(x))?),
            Step::Visit(Term::App(f, ch)) => {
                let op = lookup_op(alg, f, ch.len())?;
                work.push(Step::Combine(op, ch.len()));
                work.extend(ch.iter().rev().map(Step::Visit));
            }
            Step::Combine(op, k) => {
                let args = values.split_off(values.len() - k);
                values.push(alg.apply(op, &args));
            }
        }
    }
    Ok(values.pop().expect("one value per term"))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("term enumeration would produce more than {cap} terms")]
    CapExceeded { cap: usize },
}

pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// All terms of depth at most `max_depth` over `vars` and `sig`.
///
/// Order: by depth; within a depth, variables (in the given order) then
/// constants at depth 0, and for deeper layers by symbol order and then
/// lexicographically by the positions of the children in this same list.
pub fn enumerate_terms(
    sig: &Signature,
    vars: &[String],
    max_depth: usize,
    cap: usize,
) -> Result<Vec<Term>, EnumerationError> {
    let mut all: Vec<Term> = vars.iter().map(|x| Term::Var(x.clone())).collect();
    all.extend(
        sig.ops()
            .iter()
            .filter(|o| o.arity == 0)
            .map(|o| Term::constant(o.name.clone())),
    );
    if all.len() > cap {
        return Err(EnumerationError::CapExceeded { cap });
    }
    // all[..below] have depth < d-1, all[..upto] have depth <= d-1.
    let mut below = 0;
    for _ in 1..=max_depth {
        let upto = all.len();
        let mut fresh = 0usize;
        for o in sig.ops().iter().filter(|o| o.arity > 0) {
            let total = table_len(upto, o.arity);
            let old = table_len(below, o.arity);
            match (total, old) {
                (Some(t), Some(b)) => fresh = fresh.saturating_add(t - b),
                _ => return Err(EnumerationError::CapExceeded { cap }),
            }
        }
        if all.len().saturating_add(fresh) > cap {
            return Err(EnumerationError::CapExceeded { cap });
        }
        if fresh == 0 {
            break;
        }
        for o in sig.ops().iter().filter(|o| o.arity > 0) {
            for idx in ArgTuples::new(upto, o.arity) {
                if idx.iter().all(|&i| i < below) {
                    continue;
                }
                let ch = idx.iter().map(|&i| all[i].clone()).collect();
                all.push(Term::App(o.name.clone(), ch));
            }
        }
        below = upto;
    }
    Ok(all)
}

/// Default variable names `v0, v1, ..`.
pub fn var_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}
