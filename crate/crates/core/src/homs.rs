//! Homomorphisms between finite algebras.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::sigcore::{row_major_args, ArgTuples, Elem, FiniteAlgebra};

/// A total function from the carrier of `src` to the carrier of `dst`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CarrierMap {
    src: FiniteAlgebra,
    dst: FiniteAlgebra,
    image: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("map has {found} entries, source carrier has {expected}")]
    MapLength { expected: usize, found: usize },
    #[error("map sends {elem} to {value}, outside target carrier of size {size}")]
    MapOutOfRange { elem: Elem, value: Elem, size: usize },
    #[error("source and target signatures differ")]
    SignatureMismatch,
    #[error("cannot compose: first map's target is not the second map's source")]
    CarrierMismatch,
    #[error("maps do not share a source algebra")]
    SourceMismatch,
    #[error("map is not a homomorphism: {0}")]
    NotHom(HomViolation),
    #[error("map is not surjective: {0} is not reached")]
    NotSurjective(Elem),
    #[error("kernel inclusion fails: ({0}, {1}) identified by h but not by g")]
    KernelNotIncluded(Elem, Elem),
    #[error("homomorphism search exceeded {cap} nodes")]
    CapExceeded { cap: usize },
}

impl CarrierMap {
    pub fn new(src: FiniteAlgebra, dst: FiniteAlgebra, image: Vec<Elem>) -> Result<Self, HomError> {
        if image.len() != src.size() {
            return Err(HomError::MapLength {
                expected: src.size(),
                found: image.len(),
            });
        }
        if let Some((elem, &value)) = image.iter().enumerate().find(|(_, &v)| v >= dst.size()) {
            return Err(HomError::MapOutOfRange {
                elem,
                value,
                size: dst.size(),
            });
        }
        Ok(CarrierMap { src, dst, image })
    }

    pub fn identity(alg: &FiniteAlgebra) -> Self {
        CarrierMap {
            src: alg.clone(),
            dst: alg.clone(),
            image: alg.carrier().collect(),
        }
    }

    pub fn src(&self) -> &FiniteAlgebra {
        &self.src
    }

    pub fn dst(&self) -> &FiniteAlgebra {
        &self.dst
    }

    pub fn image(&self) -> &[Elem] {
        &self.image
    }

    #[inline]
    pub fn at(&self, a: Elem) -> Elem {
        self.image[a]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.dst.size()];
        self.image.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    /// Least element of the target not in the image, if any.
    pub fn first_unreached(&self) -> Option<Elem> {
        let mut seen = vec![false; self.dst.size()];
        for &v in &self.image {
            seen[v] = true;
        }
        seen.iter().position(|&s| !s)
    }

    pub fn is_surjective(&self) -> bool {
        self.first_unreached().is_none()
    }

    /// Least preimage of every target element.
    pub fn least_preimages(&self) -> Vec<Option<Elem>> {
        let mut out = vec![None; self.dst.size()];
        for (a, &v) in self.image.iter().enumerate() {
            out[v].get_or_insert(a);
        }
        out
    }
}

impl fmt::Display for CarrierMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A failed compatibility check: `m(f(args)) != f(m(args))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomViolation {
    pub symbol: String,
    pub args: Vec<Elem>,
    /// `m(f^src(args))`
    pub mapped_result: Elem,
    /// `f^dst(m(args))`
    pub result_of_mapped: Elem,
}

impl fmt::Display for HomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, " ({} != {})", self.mapped_result, self.result_of_mapped)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomClassification {
    pub is_hom: bool,
    pub witness: Option<HomViolation>,
    pub injective: bool,
    pub surjective: bool,
}

impl HomClassification {
    pub fn is_mono(&self) -> bool {
        self.is_hom && self.injective
    }

    pub fn is_epi(&self) -> bool {
        self.is_hom && self.surjective
    }

    pub fn is_iso(&self) -> bool {
        self.is_hom && self.injective && self.surjective
    }
}

/// First compatibility failure in canonical order (symbols in signature
/// order, argument tuples row-major), if any.
pub fn first_violation(m: &CarrierMap) -> Option<HomViolation> {
    let (src, dst) = (&m.src, &m.dst);
    let mut mapped = Vec::new();
    for (op, sym) in src.signature().ops().iter().enumerate() {
        for (i, &r) in src.table(op).iter().enumerate() {
            let args = row_major_args(i, src.size(), sym.arity);
            mapped.clear();
            mapped.extend(args.iter().map(|&a| m.at(a)));
            let lhs = m.at(r);
            let rhs = dst.apply(op, &mapped);
            if lhs != rhs {
                return Some(HomViolation {
                    symbol: sym.name.clone(),
                    args,
                    mapped_result: lhs,
                    result_of_mapped: rhs,
                });
            }
        }
    }
    None
}

pub fn classify(m: &CarrierMap) -> Result<HomClassification, HomError> {
    if m.src.signature() != m.dst.signature() {
        return Err(HomError::SignatureMismatch);
    }
    let witness = first_violation(m);
    Ok(HomClassification {
        is_hom: witness.is_none(),
        witness,
        injective: m.is_injective(),
        surjective: m.is_surjective(),
    })
}

/// `h` after `g`: `a ↦ h(g(a))`.
pub fn compose(g: &CarrierMap, h: &CarrierMap) -> Result<CarrierMap, HomError> {
    if g.dst != h.src {
        return Err(HomError::CarrierMismatch);
    }
    Ok(CarrierMap {
        src: g.src.clone(),
        dst: h.dst.clone(),
        image: g.image.iter().map(|&b| h.at(b)).collect(),
    })
}

/// All pairs `(x, y)` with `m(x) = m(y)`.
pub fn kernel_pairs(m: &CarrierMap) -> BTreeSet<(Elem, Elem)> {
    let n = m.src.size();
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| m.at(x) == m.at(y))
        .collect()
}

/// Given homs `g` and surjective `h` out of the same algebra with
/// `ker h ⊆ ker g`, the hom `phi` with `g = phi ∘ h`. Each element of
/// `h.dst` is sent to `g` of its least preimage under `h`.
pub fn hom_factor(g: &CarrierMap, h: &CarrierMap) -> Result<CarrierMap, HomError> {
    if g.src != h.src {
        return Err(HomError::SourceMismatch);
    }
    for m in [g, h] {
        if let Some(w) = classify(m)?.witness {
            return Err(HomError::NotHom(w));
        }
    }
    if let Some(c) = h.first_unreached() {
        return Err(HomError::NotSurjective(c));
    }
    // ker h ⊆ ker g, checked against each class's least member.
    let pre = h.least_preimages();
    for (a, &c) in h.image.iter().enumerate() {
        let rep = pre[c].expect("surjective");
        if g.at(a) != g.at(rep) {
            return Err(HomError::KernelNotIncluded(rep, a));
        }
    }
    let image = pre.iter().map(|p| g.at(p.expect("surjective"))).collect();
    Ok(CarrierMap {
        src: h.dst.clone(),
        dst: g.dst.clone(),
        image,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HomConstraints {
    pub surjective: bool,
    pub injective: bool,
    /// Pairs `(src element, required image)`.
    pub fixed: Vec<(Elem, Elem)>,
}

impl HomConstraints {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn injective() -> Self {
        HomConstraints {
            injective: true,
            ..Self::default()
        }
    }

    pub fn surjective() -> Self {
        HomConstraints {
            surjective: true,
            ..Self::default()
        }
    }

    pub fn bijective() -> Self {
        HomConstraints {
            surjective: true,
            injective: true,
            fixed: Vec::new(),
        }
    }
}

pub const DEFAULT_SEARCH_CAP: usize = 1_000_000;

/// Every homomorphism `src → dst` meeting `constraints`, in lexicographic
/// order of image vectors.
///
/// Backtracking assigns source elements in increasing order. After element
/// `i` is assigned, every operation entry whose arguments and result are all
/// `<= i` is checked, so incompatible prefixes are pruned immediately. `cap`
/// bounds the number of search nodes visited.
pub fn find_homs(
    src: &FiniteAlgebra,
    dst: &FiniteAlgebra,
    constraints: &HomConstraints,
    cap: usize,
) -> Result<Vec<CarrierMap>, HomError> {
    let mut out = Vec::new();
    search_homs(src, dst, constraints, cap, |m| {
        out.push(m);
        true
    })?;
    Ok(out)
}

/// First homomorphism meeting `constraints`, if any.
pub fn find_first_hom(
    src: &FiniteAlgebra,
    dst: &FiniteAlgebra,
    constraints: &HomConstraints,
    cap: usize,
) -> Result<Option<CarrierMap>, HomError> {
    let mut out = None;
    search_homs(src, dst, constraints, cap, |m| {
        out = Some(m);
        false
    })?;
    Ok(out)
}

/// Whether `a` and `b` are isomorphic.
pub fn find_iso(a: &FiniteAlgebra, b: &FiniteAlgebra, cap: usize) -> Result<Option<CarrierMap>, HomError> {
    if a.size() != b.size() {
        return Ok(None);
    }
    find_first_hom(a, b, &HomConstraints::bijective(), cap)
}

/// An operation entry checked once all of its elements are assigned.
struct Check {
    op: usize,
    args: Vec<Elem>,
    result: Elem,
}

struct Search<'a> {
    src: &'a FiniteAlgebra,
    dst: &'a FiniteAlgebra,
    constraints: &'a HomConstraints,
    fixed: Vec<Option<Elem>>,
    /// Checks bucketed by the largest element they mention.
    checks: Vec<Vec<Check>>,
    image: Vec<Elem>,
    hits: Vec<usize>,
    unhit: usize,
    nodes: usize,
    cap: usize,
    scratch: Vec<Elem>,
}

fn search_homs(
    src: &FiniteAlgebra,
    dst: &FiniteAlgebra,
    constraints: &HomConstraints,
    cap: usize,
    mut emit: impl FnMut(CarrierMap) -> bool,
) -> Result<(), HomError> {
    if src.signature() != dst.signature() {
        return Err(HomError::SignatureMismatch);
    }
    let (n, m) = (src.size(), dst.size());
    if constraints.injective && n > m || constraints.surjective && m > n {
        return Ok(());
    }
    let mut fixed = vec![None; n];
    for &(a, b) in &constraints.fixed {
        if a >= n || b >= m {
            return Err(HomError::MapOutOfRange {
                elem: a,
                value: b,
                size: m,
            });
        }
        match fixed[a] {
            Some(prev) if prev != b => return Ok(()),
            _ => fixed[a] = Some(b),
        }
    }
    let mut checks: Vec<Vec<Check>> = (0..n).map(|_| Vec::new()).collect();
    for (op, sym) in src.signature().ops().iter().enumerate() {
        for (args, &result) in ArgTuples::new(n, sym.arity).zip(src.table(op)) {
            let level = args.iter().copied().fold(result, usize::max);
            checks[level].push(Check { op, args, result });
        }
    }
    let mut s = Search {
        src,
        dst,
        constraints,
        fixed,
        checks,
        image: Vec::with_capacity(n),
        hits: vec![0; m],
        unhit: m,
        nodes: 0,
        cap,
        scratch: Vec::new(),
    };
    s.extend(&mut emit)?;
    Ok(())
}

impl Search<'_> {
    /// Returns `Ok(false)` once the consumer asks to stop.
    fn extend(&mut self, emit: &mut impl FnMut(CarrierMap) -> bool) -> Result<bool, HomError> {
        let i = self.image.len();
        if i == self.src.size() {
            if self.constraints.surjective && self.unhit > 0 {
                return Ok(true);
            }
            let map = CarrierMap {
                src: self.src.clone(),
                dst: self.dst.clone(),
                image: self.image.clone(),
            };
            return Ok(emit(map));
        }
        let candidates = match self.fixed[i] {
            Some(b) => b..b + 1,
            None => 0..self.dst.size(),
        };
        for b in candidates {
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(HomError::CapExceeded { cap: self.cap });
            }
            if self.constraints.injective && self.hits[b] > 0 {
                continue;
            }
            self.assign(b);
            let remaining = self.src.size() - i - 1;
            let viable = (!self.constraints.surjective || self.unhit <= remaining) && self.compatible(i);
            if viable && !self.extend(emit)? {
                return Ok(false);
            }
            self.unassign();
        }
        Ok(true)
    }

    fn assign(&mut self, b: Elem) {
        self.image.push(b);
        if self.hits[b] == 0 {
            self.unhit -= 1;
        }
        self.hits[b] += 1;
    }

    fn unassign(&mut self) {
        let b = self.image.pop().expect("assigned");
        self.hits[b] -= 1;
        if self.hits[b] == 0 {
            self.unhit += 1;
        }
    }

    fn compatible(&mut self, level: usize) -> bool {
        for c in &self.checks[level] {
            self.scratch.clear();
            self.scratch.extend(c.args.iter().map(|&a| self.image[a]));
            if self.image[c.result] != self.dst.apply(c.op, &self.scratch) {
                return false;
            }
        }
        true
    }
}
