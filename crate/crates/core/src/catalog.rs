//! Small standard algebras and exhaustive enumeration of tables.
//!
//! Every named algebra here uses the binary symbol `f`, so they can be
//! mixed in one class or compared by homomorphisms.

use crate::sigcore::{table_len, FiniteAlgebra, Signature};

pub const BINARY: &str = "f";

pub fn binary_sig() -> Signature {
    Signature::binary(BINARY)
}

/// `f(a, b) = a + b mod n`.
pub fn cyclic(n: usize) -> FiniteAlgebra {
    FiniteAlgebra::from_fn(binary_sig(), n, |_, a| (a[0] + a[1]) % n)
}

pub fn z2_xor() -> FiniteAlgebra {
    cyclic(2)
}

pub fn z3_add() -> FiniteAlgebra {
    cyclic(3)
}

pub fn z4_add() -> FiniteAlgebra {
    cyclic(4)
}

/// The two-element meet semilattice, table `0 0 0 1`.
pub fn semilattice2() -> FiniteAlgebra {
    FiniteAlgebra::from_fn(binary_sig(), 2, |_, a| a[0].min(a[1]))
}

/// The one-element algebra of `sig`.
pub fn trivial(sig: &Signature) -> FiniteAlgebra {
    FiniteAlgebra::from_fn(sig.clone(), 1, |_, _| 0)
}

/// Number of algebras of `sig` on a carrier of size `n`, if it fits.
pub fn count_algebras(sig: &Signature, n: usize) -> Option<usize> {
    sig.ops().iter().try_fold(1usize, |acc, o| {
        let cells = table_len(n, o.arity)?;
        let tables = n.checked_pow(u32::try_from(cells).ok()?)?;
        acc.checked_mul(tables)
    })
}

/// Every algebra of `sig` on `{0..n}`, ordered by reading all table
/// entries (symbols in order, row-major) as one base-`n` numeral with the
/// first entry most significant. Returns `None` when there are more than
/// `cap`.
pub fn all_algebras(sig: &Signature, n: usize, cap: usize) -> Option<Vec<FiniteAlgebra>> {
    let count = count_algebras(sig, n).filter(|&c| c <= cap)?;
    let lens: Vec<usize> = sig
        .ops()
        .iter()
        .map(|o| table_len(n, o.arity).expect("counted"))
        .collect();
    let total: usize = lens.iter().sum();
    let mut out = Vec::with_capacity(count);
    for code in 0..count {
        let mut digits = vec![0; total];
        let mut c = code;
        for d in digits.iter_mut().rev() {
            *d = c % n;
            c /= n;
        }
        let mut tables = Vec::with_capacity(lens.len());
        let mut rest = &digits[..];
        for &len in &lens {
            let (head, tail) = rest.split_at(len);
            tables.push(head.to_vec());
            rest = tail;
        }
        out.push(FiniteAlgebra::from_tables_unchecked(sig.clone(), n, tables));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_binary_algebras_of_size_two() {
        let all = all_algebras(&binary_sig(), 2, 100).unwrap();
        assert_eq!(all.len(), 16);
        assert_eq!(all[1].table(0), &[0, 0, 0, 1]);
        assert_eq!(all[6], z2_xor());
        assert!(all.iter().all(|a| a.validate().is_ok()));
        assert!(all_algebras(&binary_sig(), 3, 100).is_none());
    }

    #[test]
    fn counts() {
        assert_eq!(count_algebras(&binary_sig(), 3), Some(19683));
        let sig = Signature::new([("e", 0), ("f", 2)]).unwrap();
        assert_eq!(count_algebras(&sig, 2), Some(32));
    }
}
