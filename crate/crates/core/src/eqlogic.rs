//! Satisfaction of identities by finite algebras and classes.

use thiserror::Error;

use crate::sigcore::{table_len, FiniteAlgebra, Signature};
use crate::terms::{enumerate_terms, evaluate, EnumerationError, Environment, Equation, EvalError, Term};

pub const DEFAULT_ENV_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: &'static str, cap: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// Outcome of checking one identity in one algebra. A counterexample is
/// present exactly when the identity fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub holds: bool,
    pub counterexample: Option<Environment>,
}

impl SatResult {
    fn holds() -> Self {
        SatResult {
            holds: true,
            counterexample: None,
        }
    }
}

/// Decides `alg ⊧ eq` by trying every environment over the variables of
/// `eq`. The reported counterexample is the first failing environment in
/// lexicographic order, variables in declaration order ([`Equation::vars`]).
pub fn satisfies(alg: &FiniteAlgebra, eq: &Equation, cap: usize) -> Result<SatResult, SatError> {
    let vars = eq.vars();
    table_len(alg.size(), vars.len())
        .filter(|&n| n <= cap)
        .ok_or(SatError::CapExceeded {
            what: "environment count",
            cap,
        })?;
    for rho in Environment::all(&vars, alg.size()) {
        if evaluate(alg, &eq.lhs, &rho)? != evaluate(alg, &eq.rhs, &rho)? {
            return Ok(SatResult {
                holds: false,
                counterexample: Some(rho),
            });
        }
    }
    Ok(SatResult::holds())
}

/// Which member of a class (or which equation of a set) failed, and where.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub index: usize,
    pub counterexample: Environment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub holds: bool,
    pub failure: Option<Failure>,
}

impl CheckResult {
    fn from_first_failure(failure: Option<Failure>) -> Self {
        CheckResult {
            holds: failure.is_none(),
            failure,
        }
    }
}

/// `K ⊫ eq`: every member satisfies `eq`. Empty classes satisfy everything.
pub fn class_satisfies(class: &[FiniteAlgebra], eq: &Equation, cap: usize) -> Result<CheckResult, SatError> {
    for (index, alg) in class.iter().enumerate() {
        let r = satisfies(alg, eq, cap)?;
        if let Some(counterexample) = r.counterexample {
            return Ok(CheckResult::from_first_failure(Some(Failure { index, counterexample })));
        }
    }
    Ok(CheckResult::from_first_failure(None))
}

/// Membership of `alg` in `Mod(eqs)`; reports the first failing equation.
pub fn mod_check(alg: &FiniteAlgebra, eqs: &[Equation], cap: usize) -> Result<CheckResult, SatError> {
    for (index, eq) in eqs.iter().enumerate() {
        let r = satisfies(alg, eq, cap)?;
        if let Some(counterexample) = r.counterexample {
            return Ok(CheckResult::from_first_failure(Some(Failure { index, counterexample })));
        }
    }
    Ok(CheckResult::from_first_failure(None))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoryCaps {
    /// Bounds both the term list and the number of candidate pairs.
    pub terms: usize,
    pub envs: usize,
}

impl Default for TheoryCaps {
    fn default() -> Self {
        TheoryCaps {
            terms: crate::terms::DEFAULT_TERM_CAP,
            envs: DEFAULT_ENV_CAP,
        }
    }
}

/// The bounded theory `Th_d K`: every ordered pair `(p, q)` of terms of
/// depth at most `depth` over `vars` that `K` satisfies, `p`-major in
/// enumeration order. The diagonal is included.
pub fn theory_upto(
    sig: &Signature,
    class: &[FiniteAlgebra],
    vars: &[String],
    depth: usize,
    caps: TheoryCaps,
) -> Result<Vec<Equation>, SatError> {
    let terms = enumerate_terms(sig, vars, depth, caps.terms)?;
    terms
        .len()
        .checked_mul(terms.len())
        .filter(|&n| n <= caps.terms)
        .ok_or(SatError::CapExceeded {
            what: "term pairs",
            cap: caps.terms,
        })?;
    let mut envs = 0usize;
    for alg in class {
        let n = table_len(alg.size(), vars.len()).ok_or(SatError::CapExceeded {
            what: "environment count",
            cap: caps.envs,
        })?;
        envs = envs.saturating_add(n);
    }
    if envs > caps.envs {
        return Err(SatError::CapExceeded {
            what: "environment count",
            cap: caps.envs,
        });
    }
    // Two terms over `vars` are identified by K exactly when their value
    // profiles over every (algebra, environment) agree.
    let profiles = terms
        .iter()
        .map(|t| profile(class, vars, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for (i, p) in terms.iter().enumerate() {
        for (j, q) in terms.iter().enumerate() {
            if profiles[i] == profiles[j] {
                out.push(Equation::new(p.clone(), q.clone()));
            }
        }
    }
    Ok(out)
}

fn profile(class: &[FiniteAlgebra], vars: &[String], t: &Term) -> Result<Vec<usize>, EvalError> {
    let mut out = Vec::new();
    for alg in class {
        for rho in Environment::all(vars, alg.size()) {
            out.push(evaluate(alg, t, &rho)?);
        }
    }
    Ok(out)
}
