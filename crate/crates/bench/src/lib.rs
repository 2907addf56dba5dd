//! Fixtures shared by the benchmarks.

use ualg_core::catalog::{cyclic, semilattice2, z2_xor};
use ualg_core::FiniteAlgebra;

/// Generating classes of increasing free-algebra cost.
pub fn classes() -> Vec<(&'static str, Vec<FiniteAlgebra>)> {
    vec![
        ("semilattice", vec![semilattice2()]),
        ("xor", vec![z2_xor()]),
        ("semilattice+xor", vec![semilattice2(), z2_xor()]),
    ]
}

/// A cyclic group and its square, for homomorphism search.
pub fn hom_pair(n: usize) -> (FiniteAlgebra, FiniteAlgebra) {
    let a = cyclic(n);
    let sq = ualg_core::product(&[a.clone(), a.clone()], ualg_core::closure::DEFAULT_PRODUCT_CAP)
        .expect("small product")
        .algebra;
    (a, sq)
}
