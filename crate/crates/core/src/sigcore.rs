//! Signatures and finite algebras.
//!
//! A [`FiniteAlgebra`] has carrier `{0, .., n-1}` and one row-major table per
//! operation symbol: the entry for arguments `(a1, .., ak)` lives at
//! `sum ai * n^(k-i)`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A carrier element. Carriers are always initial segments of the naturals.
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of operation symbols. The order is the canonical symbol
/// order used by every enumeration downstream.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    ops: Arc<[OpSymbol]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("duplicate operation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid operation symbol name `{0}`")]
    InvalidName(String),
}

impl Signature {
    pub fn new<I, S>(ops: I) -> Result<Self, SignatureError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out: Vec<OpSymbol> = Vec::new();
        for (name, arity) in ops {
            let name = name.into();
            if !is_symbol_name(&name) {
                return Err(SignatureError::InvalidName(name));
            }
            if out.iter().any(|o| o.name == name) {
                return Err(SignatureError::DuplicateSymbol(name));
            }
            out.push(OpSymbol { name, arity });
        }
        Ok(Signature { ops: out.into() })
    }

    /// A signature with a single binary symbol.
    pub fn binary(name: &str) -> Self {
        Signature::new([(name, 2)]).expect("valid binary signature")
    }

    pub fn ops(&self) -> &[OpSymbol] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().find(|o| o.name == name).map(|o| o.arity)
    }

    pub fn has_constants(&self) -> bool {
        self.ops.iter().any(|o| o.arity == 0)
    }
}

/// Symbol names: ASCII letters, digits and `_`, not starting with `?`.
pub fn is_symbol_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// One problem found by [`FiniteAlgebra::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("carrier size must be at least 1")]
    EmptyCarrier,
    #[error("expected {expected} tables (one per symbol), found {found}")]
    TableCount { expected: usize, found: usize },
    #[error("op {symbol}: expected {expected} entries, found {found}")]
    TableLength {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("op {symbol}: entry {value} >= size {size} at index {index}")]
    EntryOutOfRange {
        symbol: String,
        index: usize,
        value: Elem,
        size: usize,
    },
    #[error("op {symbol}: table size {size}^{arity} overflows")]
    TableTooLarge { symbol: String, size: usize, arity: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("op {symbol} has arity {expected}, got {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("argument {value} out of range for carrier of size {size}")]
    OutOfRange { value: Elem, size: usize },
}

/// A finite algebra over a [`Signature`]. Cloning is cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    sig: Signature,
    size: usize,
    tables: Arc<[Vec<Elem>]>,
}

impl FiniteAlgebra {
    /// Builds and validates an algebra.
    pub fn new(sig: Signature, size: usize, tables: Vec<Vec<Elem>>) -> Result<Self, Vec<Violation>> {
        let alg = Self::from_tables_unchecked(sig, size, tables);
        alg.validate()?;
        Ok(alg)
    }

    /// Builds an algebra without checking table shapes or entries. Use
    /// [`validate`](Self::validate) before relying on it.
    pub fn from_tables_unchecked(sig: Signature, size: usize, tables: Vec<Vec<Elem>>) -> Self {
        FiniteAlgebra {
            sig,
            size,
            tables: tables.into(),
        }
    }

    /// Builds an algebra by evaluating `f(op_index, args)` on every argument
    /// tuple in row-major order.
    pub fn from_fn(sig: Signature, size: usize, mut f: impl FnMut(usize, &[Elem]) -> Elem) -> Self {
        let tables = sig
            .ops()
            .iter()
            .enumerate()
            .map(|(op, sym)| {
                ArgTuples::new(size, sym.arity)
                    .map(|args| f(op, &args))
                    .collect::<Vec<_>>()
            })
            .collect();
        FiniteAlgebra::from_tables_unchecked(sig, size, tables)
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        if self.size == 0 {
            out.push(Violation::EmptyCarrier);
        }
        if self.tables.len() != self.sig.len() {
            out.push(Violation::TableCount {
                expected: self.sig.len(),
                found: self.tables.len(),
            });
            return Err(out);
        }
        for (sym, table) in self.sig.ops().iter().zip(self.tables.iter()) {
            let Some(expected) = table_len(self.size, sym.arity) else {
                out.push(Violation::TableTooLarge {
                    symbol: sym.name.clone(),
                    size: self.size,
                    arity: sym.arity,
                });
                continue;
            };
            if table.len() != expected {
                out.push(Violation::TableLength {
                    symbol: sym.name.clone(),
                    expected,
                    found: table.len(),
                });
            }
            for (index, &value) in table.iter().enumerate() {
                if value >= self.size {
                    out.push(Violation::EntryOutOfRange {
                        symbol: sym.name.clone(),
                        index,
                        value,
                        size: self.size,
                    });
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self, op: usize) -> &[Elem] {
        &self.tables[op]
    }

    pub fn tables(&self) -> &[Vec<Elem>] {
        &self.tables
    }

    pub fn carrier(&self) -> std::ops::Range<Elem> {
        0..self.size
    }

    /// Applies operation `name` to `args`, checking every precondition.
    pub fn apply_op(&self, name: &str, args: &[Elem]) -> Result<Elem, ApplyError> {
        let op = self
            .sig
            .index_of(name)
            .ok_or_else(|| ApplyError::UnknownSymbol(name.to_string()))?;
        let arity = self.sig.ops()[op].arity;
        if args.len() != arity {
            return Err(ApplyError::ArityMismatch {
                symbol: name.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        if let Some(&value) = args.iter().find(|&&a| a >= self.size) {
            return Err(ApplyError::OutOfRange { value, size: self.size });
        }
        Ok(self.apply(op, args))
    }

    /// Unchecked application by symbol index. Panics on out-of-range input.
    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        self.tables[op][row_major_index(args, self.size)]
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size {}", self.size)?;
        for (sym, table) in self.sig.ops().iter().zip(self.tables.iter()) {
            write!(f, "; {}:", sym.name)?;
            for v in table {
                write!(f, " {v}")?;
            }
        }
        Ok(())
    }
}

/// `n^arity`, or `None` on overflow.
pub fn table_len(n: usize, arity: usize) -> Option<usize> {
    u32::try_from(arity).ok().and_then(|k| n.checked_pow(k))
}

/// Row-major position of `args` in a table over a carrier of size `n`.
#[inline]
pub fn row_major_index(args: &[Elem], n: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// Inverse of [`row_major_index`] for a fixed arity.
pub fn row_major_args(mut index: usize, n: usize, arity: usize) -> Vec<Elem> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

/// All argument tuples of length `arity` over `{0..n}`, in row-major
/// (lexicographic) order.
#[derive(Debug, Clone)]
pub struct ArgTuples {
    n: usize,
    current: Option<Vec<Elem>>,
}

impl ArgTuples {
    pub fn new(n: usize, arity: usize) -> Self {
        let current = if n == 0 && arity > 0 {
            None
        } else {
            Some(vec![0; arity])
        };
        ArgTuples { n, current }
    }
}

impl Iterator for ArgTuples {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut pos = next.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < self.n {
                self.current = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some(out)
    }
}
