//! The relatively free algebra over a finite set of variables in the
//! variety generated by a finite class `K`.
//!
//! It is built as the subalgebra of `∏ A` over all pairs `(A, ρ)`, with `A`
//! a member of `K` and `ρ` an environment of the variables into `A`,
//! generated by the projection tuples `(A, ρ) ↦ ρ(x)`. Each element is an
//! evaluation tuple and carries the first term found to produce it.
//!
//! The index ranges over `K` rather than over all subalgebras of members of
//! `K`. Both classes have the same identities, so the generated subalgebra
//! is the same.

use std::collections::HashMap;

use thiserror::Error;

use crate::closure::{saturate, ClosureError, Origin};
use crate::homs::{classify, CarrierMap, HomError, HomViolation};
use crate::sigcore::{table_len, Elem, FiniteAlgebra, Signature};
use crate::terms::{evaluate, Environment, EvalError, Term};

pub const DEFAULT_MAX_CARRIER: usize = 4096;
pub const DEFAULT_MAX_CELLS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeCaps {
    pub max_carrier: usize,
    /// Bound on carrier size times tuple length.
    pub max_cells: usize,
}

impl Default for FreeCaps {
    fn default() -> Self {
        FreeCaps {
            max_carrier: DEFAULT_MAX_CARRIER,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapDimension {
    Carrier,
    Cells,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeError {
    #[error("{dimension:?} cap {limit} exceeded")]
    CapExceeded { dimension: CapDimension, limit: usize },
    #[error("class members do not share the signature")]
    SignatureMismatch,
    #[error("duplicate variable ?{0}")]
    DuplicateVariable(String),
    #[error("no variables and no constants: the free algebra would be empty")]
    EmptyCarrier,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One coordinate of the ambient product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    /// Position of the algebra in the class.
    pub algebra: usize,
    pub env: Environment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeElement {
    pub tuple: Vec<Elem>,
    pub repr: Term,
}

#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub algebra: FiniteAlgebra,
    pub class: Vec<FiniteAlgebra>,
    pub vars: Vec<String>,
    pub index: Vec<IndexEntry>,
    pub elems: Vec<FreeElement>,
    /// Carrier value of each variable, in `vars` order.
    pub gens: Vec<Elem>,
    lookup: HashMap<Vec<Elem>, Elem>,
}

impl FreeAlgebra {
    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn gen(&self, var: &str) -> Option<Elem> {
        self.vars.iter().position(|v| v == var).map(|i| self.gens[i])
    }

    pub fn element_of_tuple(&self, tuple: &[Elem]) -> Option<Elem> {
        self.lookup.get(tuple).copied()
    }

    /// The generators as an environment of the free algebra.
    pub fn gen_env(&self) -> Environment {
        Environment::from_values(&self.vars, &self.gens)
    }

    /// Variable bound to each generator element, if any.
    pub fn generator_var(&self, e: Elem) -> Option<&str> {
        self.gens.iter().position(|&g| g == e).map(|i| self.vars[i].as_str())
    }
}

/// Builds the free algebra of `class` over `vars`.
///
/// Generators come first, in variable order; further elements are found by
/// applying symbols in signature order to already-labeled elements. Each
/// element's representative term is the term of its first discovery.
pub fn build_free(
    sig: &Signature,
    class: &[FiniteAlgebra],
    vars: &[String],
    caps: FreeCaps,
) -> Result<FreeAlgebra, FreeError> {
    if class.iter().any(|a| a.signature() != sig) {
        return Err(FreeError::SignatureMismatch);
    }
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(FreeError::DuplicateVariable(v.clone()));
        }
    }
    if vars.is_empty() && !sig.has_constants() {
        return Err(FreeError::EmptyCarrier);
    }
    let cells_err = FreeError::CapExceeded {
        dimension: CapDimension::Cells,
        limit: caps.max_cells,
    };
    let mut width = 0usize;
    for alg in class {
        let n = table_len(alg.size(), vars.len()).ok_or(cells_err.clone())?;
        width = width.checked_add(n).ok_or(cells_err.clone())?;
    }
    if width > caps.max_cells {
        return Err(cells_err);
    }
    let index: Vec<IndexEntry> = class
        .iter()
        .enumerate()
        .flat_map(|(algebra, alg)| Environment::all(vars, alg.size()).map(move |env| IndexEntry { algebra, env }))
        .collect();
    let coord_alg: Vec<&FiniteAlgebra> = index.iter().map(|e| &class[e.algebra]).collect();

    let seeds: Vec<Vec<Elem>> = vars
        .iter()
        .map(|x| index.iter().map(|e| e.env.get(x).expect("bound")).collect())
        .collect();
    let limit = caps
        .max_cells
        .checked_div(width)
        .map_or(caps.max_carrier, |c| caps.max_carrier.min(c));
    let mut scratch = Vec::new();
    let apply = |op: usize, args: &[&Vec<Elem>]| -> Vec<Elem> {
        (0..coord_alg.len())
            .map(|c| {
                scratch.clear();
                scratch.extend(args.iter().map(|t| t[c]));
                coord_alg[c].apply(op, &scratch)
            })
            .collect()
    };
    let (tuples, origins) = saturate(sig, seeds.iter().cloned(), limit, apply).map_err(|e| match e {
        ClosureError::CapExceeded { .. } if limit < caps.max_carrier => cells_err.clone(),
        ClosureError::CapExceeded { .. } => FreeError::CapExceeded {
            dimension: CapDimension::Carrier,
            limit: caps.max_carrier,
        },
        other => unreachable!("closure over tuples: {other}"),
    })?;

    let mut reprs: Vec<Term> = Vec::with_capacity(tuples.len());
    for origin in &origins {
        let t = match origin {
            Origin::Seed(i) => Term::Var(vars[*i].clone()),
            Origin::Op(op, args) => Term::App(
                sig.ops()[*op].name.clone(),
                args.iter().map(|&a| reprs[a].clone()).collect(),
            ),
        };
        reprs.push(t);
    }
    let lookup: HashMap<Vec<Elem>, Elem> = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let gens = seeds.iter().map(|s| lookup[s]).collect();
    let algebra = FiniteAlgebra::from_fn(sig.clone(), tuples.len(), |op, labels| {
        let mut out = Vec::with_capacity(coord_alg.len());
        let mut args = Vec::with_capacity(labels.len());
        for (c, alg) in coord_alg.iter().enumerate() {
            args.clear();
            args.extend(labels.iter().map(|&l| tuples[l][c]));
            out.push(alg.apply(op, &args));
        }
        lookup[&out]
    });
    let elems = tuples
        .into_iter()
        .zip(reprs)
        .map(|(tuple, repr)| FreeElement { tuple, repr })
        .collect();
    Ok(FreeAlgebra {
        algebra,
        class: class.to_vec(),
        vars: vars.to_vec(),
        index,
        elems,
        gens,
        lookup,
    })
}

/// The natural epimorphism from terms over `F`'s variables onto `F`: the
/// element whose tuple is the pointwise value of `t`.
pub fn nat_epi(free: &FreeAlgebra, t: &Term) -> Result<Elem, EvalError> {
    for x in t.vars() {
        if !free.vars.contains(&x) {
            return Err(EvalError::UnboundVariable(x));
        }
    }
    let tuple = free
        .index
        .iter()
        .map(|e| evaluate(&free.class[e.algebra], t, &e.env))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(free
        .element_of_tuple(&tuple)
        .expect("the free algebra contains every term value"))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniversalMapError {
    #[error("target algebra has a different signature")]
    SignatureMismatch,
    #[error("assignment misses variable ?{0}")]
    Unassigned(String),
    #[error("assignment sends ?{var} to {value}, outside the target")]
    OutOfRange { var: String, value: Elem },
    #[error("induced map is not a homomorphism: {violation}")]
    NotHom { map: CarrierMap, violation: HomViolation },
    #[error("assignment generates the target but element {unreached} is not reached")]
    NotSurjective { map: CarrierMap, unreached: Elem },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Hom(#[from] HomError),
}

#[derive(Debug, Clone)]
pub struct UniversalMap {
    pub map: CarrierMap,
    /// Whether the assignment's image generates the target, in which case
    /// surjectivity has been verified.
    pub generating: bool,
}

/// Extends `assign` from the generators of `F` to the candidate map
/// `e ↦ repr(e)` evaluated in `target`, and verifies it.
///
/// A hom failure means `target` violates an identity that holds in `K`, with
/// the failing operation entry as witness.
#[allow(clippy::result_large_err)]
pub fn universal_map(
    free: &FreeAlgebra,
    target: &FiniteAlgebra,
    assign: &Environment,
) -> Result<UniversalMap, UniversalMapError> {
    if target.signature() != free.algebra.signature() {
        return Err(UniversalMapError::SignatureMismatch);
    }
    let mut values = Vec::with_capacity(free.vars.len());
    for x in &free.vars {
        let v = assign.get(x).ok_or_else(|| UniversalMapError::Unassigned(x.clone()))?;
        if v >= target.size() {
            return Err(UniversalMapError::OutOfRange {
                var: x.clone(),
                value: v,
            });
        }
        values.push(v);
    }
    let image = free
        .elems
        .iter()
        .map(|e| evaluate(target, &e.repr, assign))
        .collect::<Result<Vec<_>, _>>()?;
    let map = CarrierMap::new(free.algebra.clone(), target.clone(), image)?;
    if let Some(violation) = classify(&map)?.witness {
        return Err(UniversalMapError::NotHom { map, violation });
    }
    let generating = crate::closure::subalgebra_generate(target, &values)
        .map(|s| s.algebra.size() == target.size())
        .unwrap_or(false);
    if generating {
        if let Some(unreached) = map.first_unreached() {
            return Err(UniversalMapError::NotSurjective { map, unreached });
        }
    }
    Ok(UniversalMap { map, generating })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::var_names;

    fn semi() -> FiniteAlgebra {
        FiniteAlgebra::from_fn(Signature::binary("f"), 2, |_, a| a[0].min(a[1]))
    }
    fn z2() -> FiniteAlgebra {
        FiniteAlgebra::from_fn(Signature::binary("f"), 2, |_, a| a[0] ^ a[1])
    }
    fn build(class: &[FiniteAlgebra], vars: &[&str]) -> FreeAlgebra {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        build_free(&Signature::binary("f"), class, &vars, FreeCaps::default()).unwrap()
    }
    fn f(a: Term, b: Term) -> Term {
        Term::app("f", vec![a, b])
    }

    #[test]
    fn semilattice_two_vars() {
        let fa = build(&[semi()], &["x", "y"]);
        assert_eq!(fa.size(), 3);
        let reprs: Vec<String> = fa.elems.iter().map(|e| e.repr.to_string()).collect();
        assert_eq!(reprs, vec!["?x", "?y", "f(?x,?y)"]);
        assert_eq!(fa.elems[0].tuple, vec![0, 0, 1, 1]);
        assert_eq!(fa.elems[2].tuple, vec![0, 0, 0, 1]);
    }

    #[test]
    fn xor_two_vars() {
        let fa = build(&[z2()], &["x", "y"]);
        assert_eq!(fa.size(), 4);
        let zero = nat_epi(&fa, &f(Term::var("x"), Term::var("x"))).unwrap();
        assert_eq!(fa.elems[zero].tuple, vec![0, 0, 0, 0]);
        assert_ne!(Some(zero), fa.gen("x"));
    }

    #[test]
    fn semilattice_one_var() {
        assert_eq!(build(&[semi()], &["x"]).size(), 1);
    }

    #[test]
    fn nat_epi_examples() {
        let fa = build(&[semi()], &["x", "y"]);
        assert_eq!(nat_epi(&fa, &Term::var("x")).unwrap(), fa.gen("x").unwrap());
        let xx = f(Term::var("x"), Term::var("x"));
        assert_eq!(nat_epi(&fa, &xx).unwrap(), fa.gen("x").unwrap());
        assert_eq!(
            nat_epi(&fa, &Term::var("z")),
            Err(EvalError::UnboundVariable("z".into()))
        );
    }

    #[test]
    fn nat_epi_agrees_with_evaluation_in_free_algebra() {
        let fa = build(&[semi(), z2()], &["x", "y"]);
        let env = fa.gen_env();
        let terms = crate::terms::enumerate_terms(fa.algebra.signature(), &fa.vars, 2, 1000).unwrap();
        for t in terms {
            assert_eq!(nat_epi(&fa, &t).unwrap(), evaluate(&fa.algebra, &t, &env).unwrap());
        }
    }

    #[test]
    fn universal_map_examples() {
        let fa = build(&[z2()], &["v0", "v1"]);
        let assign: Environment = [("v0", 0), ("v1", 1)].into_iter().collect();
        let u = universal_map(&fa, &z2(), &assign).unwrap();
        assert!(u.generating && u.map.is_surjective());

        let fs = build(&[semi()], &["v0", "v1"]);
        let u = universal_map(&fs, &semi(), &assign).unwrap();
        assert!(u.map.is_surjective());

        match universal_map(&fs, &z2(), &assign) {
            Err(UniversalMapError::NotHom { violation, .. }) => {
                assert_eq!(violation.args, vec![1, 1]);
            }
            other => panic!("expected a hom failure, got {other:?}"),
        }
    }

    #[test]
    fn caps_are_enforced() {
        let sig = Signature::binary("f");
        let tight = FreeCaps {
            max_carrier: 2,
            max_cells: 1000,
        };
        assert_eq!(
            build_free(&sig, &[semi()], &var_names(2), tight).unwrap_err(),
            FreeError::CapExceeded {
                dimension: CapDimension::Carrier,
                limit: 2
            }
        );
        let narrow = FreeCaps {
            max_carrier: 100,
            max_cells: 3,
        };
        assert!(matches!(
            build_free(&sig, &[semi()], &var_names(2), narrow),
            Err(FreeError::CapExceeded {
                dimension: CapDimension::Cells,
                ..
            })
        ));
        assert_eq!(
            build_free(&sig, &[semi()], &[], FreeCaps::default()).unwrap_err(),
            FreeError::EmptyCarrier
        );
    }

    #[test]
    fn empty_class_with_constant_is_trivial() {
        let sig = Signature::new([("e", 0), ("f", 2)]).unwrap();
        let fa = build_free(&sig, &[], &var_names(2), FreeCaps::default()).unwrap();
        assert_eq!(fa.size(), 1);
    }
}
