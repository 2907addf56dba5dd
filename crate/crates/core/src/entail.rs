//! The six-rule equational calculus: checkable proof objects, a bounded
//! proof search, and an auditor that replays conclusions in finite models.
//!
//! Contexts are implicit: variables are global names, and a judgment is
//! just an [`Equation`] derived from a list of axioms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::eqlogic::{mod_check, satisfies, SatError, SatResult};
use crate::sigcore::{FiniteAlgebra, Signature};
use crate::terms::{substitute, Equation, EvalError, Substitution, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Proof {
    /// The axiom at this index.
    Hyp(usize),
    Refl(Term),
    Sym(Box<Proof>),
    /// The right side of the first conclusion must literally equal the left
    /// side of the second.
    Trans(Box<Proof>, Box<Proof>),
    /// Congruence over every argument at once.
    App(String, Vec<Proof>),
    Sub(Box<Proof>, Substitution),
}

impl Proof {
    pub fn sym(p: Proof) -> Proof {
        Proof::Sym(Box::new(p))
    }

    pub fn trans(p: Proof, q: Proof) -> Proof {
        Proof::Trans(Box::new(p), Box::new(q))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(p: Proof, sigma: Substitution) -> Proof {
        Proof::Sub(Box::new(p), sigma)
    }

    /// Height of the proof tree; leaves have height 1.
    pub fn height(&self) -> usize {
        match self {
            Proof::Hyp(_) | Proof::Refl(_) => 1,
            Proof::Sym(p) | Proof::Sub(p, _) => 1 + p.height(),
            Proof::Trans(p, q) => 1 + p.height().max(q.height()),
            Proof::App(_, ps) => 1 + ps.iter().map(Proof::height).max().unwrap_or(0),
        }
    }
}

/// Renders the canonical s-expression form.
impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proof::Hyp(i) => write!(f, "(hyp {i})"),
            Proof::Refl(t) => write!(f, "(refl {t})"),
            Proof::Sym(p) => write!(f, "(sym {p})"),
            Proof::Trans(p, q) => write!(f, "(trans {p} {q})"),
            Proof::App(s, ps) => {
                write!(f, "(app {s}")?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                f.write_str(")")
            }
            Proof::Sub(p, sigma) => {
                write!(f, "(sub {p} (")?;
                for (i, (x, t)) in sigma.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "({x} {t})")?;
                }
                f.write_str("))")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("hypothesis {index} out of range ({count} axioms)")]
    BadHypothesis { index: usize, count: usize },
    #[error("trans: middle terms differ: {left} vs {right}")]
    TransMismatch { left: Term, right: Term },
    #[error("app {symbol}: arity {expected}, got {found} subproofs")]
    AppArity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("app: unknown operation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("ill-formed term: {0}")]
    IllFormedTerm(EvalError),
}

/// Synthesizes the conclusion of `p` bottom-up.
pub fn check_proof(sig: &Signature, axioms: &[Equation], p: &Proof) -> Result<Equation, ProofError> {
    match p {
        Proof::Hyp(i) => axioms.get(*i).cloned().ok_or(ProofError::BadHypothesis {
            index: *i,
            count: axioms.len(),
        }),
        Proof::Refl(t) => {
            t.check(sig).map_err(ProofError::IllFormedTerm)?;
            Ok(Equation::new(t.clone(), t.clone()))
        }
        Proof::Sym(p) => Ok(check_proof(sig, axioms, p)?.swapped()),
        Proof::Trans(p, q) => {
            let a = check_proof(sig, axioms, p)?;
            let b = check_proof(sig, axioms, q)?;
            if a.rhs != b.lhs {
                return Err(ProofError::TransMismatch {
                    left: a.rhs,
                    right: b.lhs,
                });
            }
            Ok(Equation::new(a.lhs, b.rhs))
        }
        Proof::App(f, ps) => {
            let arity = sig.arity_of(f).ok_or_else(|| ProofError::UnknownSymbol(f.clone()))?;
            if arity != ps.len() {
                return Err(ProofError::AppArity {
                    symbol: f.clone(),
                    expected: arity,
                    found: ps.len(),
                });
            }
            let (lhs, rhs): (Vec<Term>, Vec<Term>) = ps
                .iter()
                .map(|p| check_proof(sig, axioms, p).map(|e| (e.lhs, e.rhs)))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .unzip();
            Ok(Equation::new(Term::App(f.clone(), lhs), Term::App(f.clone(), rhs)))
        }
        Proof::Sub(p, sigma) => {
            for (_, t) in sigma.iter() {
                t.check(sig).map_err(ProofError::IllFormedTerm)?;
            }
            let e = check_proof(sig, axioms, p)?;
            Ok(Equation::new(substitute(sigma, &e.lhs), substitute(sigma, &e.rhs)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest proof height tried.
    pub max_depth: usize,
    /// Largest intermediate term (in nodes) a transitivity step may visit.
    pub max_term_size: usize,
    /// Number of subgoal expansions before giving up.
    pub node_budget: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_depth: 4,
            max_term_size: 16,
            node_budget: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Proof),
    /// No proof exists within the depth and term-size limits.
    Refuted,
    /// The node budget ran out before the limits were exhausted.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search limits must be positive")]
    BadLimits,
    #[error("goal is ill-formed: {0}")]
    IllFormedGoal(EvalError),
}

/// Best-effort bounded proof search by iterative deepening on proof
/// height. Deterministic for fixed inputs. Completeness is not claimed.
///
/// At each height the strategies are tried in a fixed order: reflexivity,
/// a literal axiom, an axiom instance (`sub` of `hyp`), congruence when
/// both sides share a head symbol, symmetry, and finally transitivity
/// through one-step rewrites of the left side.
pub fn search_proof(
    sig: &Signature,
    axioms: &[Equation],
    goal: &Equation,
    limits: SearchLimits,
) -> Result<SearchOutcome, SearchError> {
    if limits.max_depth == 0 || limits.max_term_size == 0 || limits.node_budget == 0 {
        return Err(SearchError::BadLimits);
    }
    goal.lhs.check(sig).map_err(SearchError::IllFormedGoal)?;
    goal.rhs.check(sig).map_err(SearchError::IllFormedGoal)?;
    let mut s = Searcher {
        axioms,
        limits,
        memo: HashMap::new(),
        nodes: 0,
    };
    for h in 1..=limits.max_depth {
        match s.prove(&goal.lhs, &goal.rhs, h) {
            Ok(Some(p)) => return Ok(SearchOutcome::Found(p)),
            Ok(None) => {}
            Err(Exhausted) => return Ok(SearchOutcome::BudgetExhausted),
        }
    }
    Ok(SearchOutcome::Refuted)
}

struct Exhausted;

struct Searcher<'a> {
    axioms: &'a [Equation],
    limits: SearchLimits,
    memo: HashMap<(Term, Term, usize), Option<Proof>>,
    nodes: usize,
}

impl Searcher<'_> {
    fn prove(&mut self, l: &Term, r: &Term, h: usize) -> Result<Option<Proof>, Exhausted> {
        if h == 0 {
            return Ok(None);
        }
        let key = (l.clone(), r.clone(), h);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        self.nodes += 1;
        if self.nodes > self.limits.node_budget {
            return Err(Exhausted);
        }
        let found = self.expand(l, r, h)?;
        self.memo.insert(key, found.clone());
        Ok(found)
    }

    fn expand(&mut self, l: &Term, r: &Term, h: usize) -> Result<Option<Proof>, Exhausted> {
        if l == r {
            return Ok(Some(Proof::Refl(l.clone())));
        }
        if let Some(i) = self.axioms.iter().position(|ax| ax.lhs == *l && ax.rhs == *r) {
            return Ok(Some(Proof::Hyp(i)));
        }
        if h < 2 {
            return Ok(None);
        }
        for (i, ax) in self.axioms.iter().enumerate() {
            if let Some(sigma) = match_equation(ax, l, r) {
                return Ok(Some(Proof::sub(Proof::Hyp(i), sigma)));
            }
        }
        if let (Term::App(f, ls), Term::App(g, rs)) = (l, r) {
            if f == g && ls.len() == rs.len() {
                let mut subs = Vec::with_capacity(ls.len());
                for (a, b) in ls.iter().zip(rs) {
                    match self.prove(a, b, h - 1)? {
                        Some(p) => subs.push(p),
                        None => break,
                    }
                }
                if subs.len() == ls.len() {
                    return Ok(Some(Proof::App(f.clone(), subs)));
                }
            }
        }
        if let Some(p) = self.prove(r, l, h - 1)? {
            return Ok(Some(Proof::sym(p)));
        }
        if h < 3 {
            return Ok(None);
        }
        for m in one_step_rewrites(self.axioms, l) {
            if m == *r || m.size() > self.limits.max_term_size {
                continue;
            }
            let Some(first) = self.prove(l, &m, h - 1)? else {
                continue;
            };
            if let Some(rest) = self.prove(&m, r, h - 1)? {
                return Ok(Some(Proof::trans(first, rest)));
            }
        }
        Ok(None)
    }
}

/// One-way matching: extends `sigma` so that `pattern` under it equals
/// `target`.
fn match_term(pattern: &Term, target: &Term, sigma: &mut BTreeMap<String, Term>) -> bool {
    match pattern {
        Term::Var(x) => match sigma.get(x) {
            Some(bound) => bound == target,
            None => {
                sigma.insert(x.clone(), target.clone());
                true
            }
        },
        Term::App(f, ps) => match target {
            Term::App(g, ts) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, t)| match_term(p, t, sigma))
            }
            _ => false,
        },
    }
}

fn match_equation(ax: &Equation, l: &Term, r: &Term) -> Option<Substitution> {
    let mut sigma = BTreeMap::new();
    if match_term(&ax.lhs, l, &mut sigma) && match_term(&ax.rhs, r, &mut sigma) {
        Some(sigma.into_iter().collect())
    } else {
        None
    }
}

/// Terms reachable from `t` by rewriting one subterm with one axiom, in
/// either direction. Preorder positions, then axiom order, then direction.
fn one_step_rewrites(axioms: &[Equation], t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    rewrite_at(axioms, t, &mut |m| {
        if !out.contains(&m) {
            out.push(m)
        }
    });
    out
}

fn rewrite_at(axioms: &[Equation], t: &Term, emit: &mut dyn FnMut(Term)) {
    for ax in axioms {
        for (from, to) in [(&ax.lhs, &ax.rhs), (&ax.rhs, &ax.lhs)] {
            let mut sigma = BTreeMap::new();
            if match_term(from, t, &mut sigma) {
                let sigma: Substitution = sigma.into_iter().collect();
                emit(substitute(&sigma, to));
            }
        }
    }
    if let Term::App(f, ch) = t {
        for i in 0..ch.len() {
            rewrite_at(axioms, &ch[i], &mut |c| {
                let mut ch2 = ch.clone();
                ch2[i] = c;
                emit(Term::App(f.clone(), ch2));
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditEntry {
    pub proof: usize,
    pub algebra: usize,
    pub conclusion: Equation,
    pub result: SatResult,
}

/// Every (model, conclusion) pair checked by [`soundness_audit`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
    /// Pool members that do not model the axioms and were skipped.
    pub non_models: Vec<usize>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.entries.iter().all(|e| e.result.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| !e.result.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("proof {index} does not check: {error}")]
    Proof { index: usize, error: ProofError },
    #[error(transparent)]
    Sat(#[from] SatError),
}

/// Checks each proof's conclusion in every pool algebra that models the
/// axioms. Any violation in the report is a bug in the checker.
pub fn soundness_audit(
    sig: &Signature,
    axioms: &[Equation],
    proofs: &[Proof],
    pool: &[FiniteAlgebra],
    env_cap: usize,
) -> Result<AuditReport, AuditError> {
    let conclusions = proofs
        .iter()
        .enumerate()
        .map(|(index, p)| check_proof(sig, axioms, p).map_err(|error| AuditError::Proof { index, error }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = AuditReport::default();
    for (algebra, alg) in pool.iter().enumerate() {
        if !mod_check(alg, axioms, env_cap)?.holds {
            report.non_models.push(algebra);
            continue;
        }
        for (proof, conclusion) in conclusions.iter().enumerate() {
            let result = satisfies(alg, conclusion, env_cap)?;
            report.entries.push(AuditEntry {
                proof,
                algebra,
                conclusion: conclusion.clone(),
                result,
            });
        }
    }
    Ok(report)
}
