//! Loading algebras, equations, proofs and certificates from disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ualg_core::format::{parse_algebra_file, parse_certificate, parse_equation, parse_equation_file, parse_proof};
use ualg_core::{Caps, Equation, FiniteAlgebra, HspCertificate, Proof, Signature, Term};

/// An input or usage problem; reported on stderr with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub type Input<T> = Result<T, InputError>;

pub fn read(path: &str) -> Input<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))
}

pub fn caps() -> Input<Caps> {
    match std::env::var("UALG_CAPS") {
        Ok(overrides) => Caps::default()
            .with_overrides(&overrides)
            .map_err(|e| InputError(format!("UALG_CAPS: {e}"))),
        Err(_) => Ok(Caps::default()),
    }
}

/// Every algebra of a file, with its name.
pub fn algebras_in(path: &str) -> Input<Vec<(String, FiniteAlgebra)>> {
    let file = parse_algebra_file(&read(path)?, Some(path))?;
    if file.algebras.is_empty() {
        return Err(InputError(format!("{path}: no algebras")));
    }
    Ok(file.algebras.into_iter().map(|a| (a.name, a.algebra)).collect())
}

/// `FILE[:NAME]`; without a name the first algebra of the file is used.
pub fn algebra(arg: &str) -> Input<(String, FiniteAlgebra)> {
    let (path, name) = match arg.rsplit_once(':') {
        Some((p, n)) if !Path::new(arg).exists() && !n.is_empty() => (p, Some(n)),
        _ => (arg, None),
    };
    let mut algs = algebras_in(path)?;
    match name {
        None => Ok(algs.swap_remove(0)),
        Some(n) => algs
            .into_iter()
            .find(|(m, _)| m == n)
            .ok_or_else(|| InputError(format!("{path}: no algebra named `{n}`"))),
    }
}

/// All algebras of all files; they must share one signature.
pub fn class(paths: &[String]) -> Input<Vec<(String, FiniteAlgebra)>> {
    let mut out: Vec<(String, FiniteAlgebra)> = Vec::new();
    for p in paths {
        for (name, alg) in algebras_in(p)? {
            if let Some((_, first)) = out.first() {
                if first.signature() != alg.signature() {
                    return Err(InputError(format!("{p}: algebra `{name}` has a different signature")));
                }
            }
            out.push((name, alg));
        }
    }
    if out.is_empty() {
        return Err(InputError("no algebra files given".into()));
    }
    Ok(out)
}

pub fn equation(text: &str) -> Input<Equation> {
    parse_equation(text).map_err(|e| InputError(format!("--equation: {e}")))
}

pub fn equations(path: &str) -> Input<Vec<Equation>> {
    Ok(parse_equation_file(&read(path)?, Some(path))?)
}

pub fn proof(path: &str) -> Input<Proof> {
    Ok(parse_proof(&read(path)?, Some(path))?)
}

pub fn certificate(path: &str) -> Input<HspCertificate> {
    Ok(parse_certificate(&read(path)?, Some(path))?)
}

/// Carrier map given as space-separated images.
pub fn map_image(text: &str, flag: &str) -> Input<Vec<usize>> {
    text.split_whitespace()
        .map(|s| {
            s.parse()
                .map_err(|_| InputError(format!("{flag}: `{s}` is not a carrier element")))
        })
        .collect()
}

/// The signature used by a set of equations, symbols in order of first
/// appearance.
pub fn infer_signature(eqs: &[&Equation]) -> Input<Signature> {
    fn walk(t: &Term, seen: &mut BTreeMap<String, usize>, order: &mut Vec<String>) -> Input<()> {
        if let Term::App(f, ch) = t {
            match seen.get(f) {
                Some(&k) if k != ch.len() => {
                    return Err(InputError(format!(
                        "symbol `{f}` used with arities {k} and {}",
                        ch.len()
                    )))
                }
                Some(_) => {}
                None => {
                    seen.insert(f.clone(), ch.len());
                    order.push(f.clone());
                }
            }
            for c in ch {
                walk(c, seen, order)?;
            }
        }
        Ok(())
    }
    let (mut seen, mut order) = (BTreeMap::new(), Vec::new());
    for e in eqs {
        walk(&e.lhs, &mut seen, &mut order)?;
        walk(&e.rhs, &mut seen, &mut order)?;
    }
    Ok(Signature::new(order.iter().map(|f| (f.clone(), seen[f])))?)
}
