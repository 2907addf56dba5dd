use std::collections::HashSet;
use std::fs;

use ualg_core::catalog::all_algebras;
use ualg_core::format::{emit_algebra_file, emit_certificate, emit_free_sidecar, free_algebra_file, FormatError};
use ualg_core::terms::var_names;
use ualg_core::{
    build_free, check_proof, class_satisfies, classify, eqcl_to_var_check, find_homs, hom_factor, mod_check, satisfies,
    search_proof, square_certificates, theory_upto, var_to_eqcl_check, CarrierMap, Equation, FiniteAlgebra,
    HomConstraints, HomError, PipelineReport, SearchLimits, SearchOutcome, Signature, StageStatus,
};

use crate::input::{self, Input, InputError};
use crate::Command;

/// Runs one subcommand; `Ok(true)` when the checked property holds.
pub fn run(cmd: Command) -> Input<bool> {
    match cmd {
        Command::Validate { file } => validate(&file),
        Command::Sat { algebra, equation } => sat(&algebra, &equation),
        Command::ClassSat { equation, files } => class_sat(&equation, &files),
        Command::Theory { depth, vars, files } => theory(depth, vars, &files),
        Command::Hom { src, dst, map } => hom(&src, &dst, &map),
        Command::HomFind {
            src,
            dst,
            surjective,
            injective,
            first,
        } => hom_find(&src, &dst, surjective, injective, first),
        Command::Factor {
            src,
            g_dst,
            h_dst,
            g,
            h,
        } => factor(&src, &g_dst, &h_dst, &g, &h),
        Command::Free { vars, out, files } => free(vars, out.as_deref(), &files),
        Command::EntailCheck { axioms, goal, proof } => entail_check(&axioms, &goal, &proof),
        Command::EntailSearch {
            axioms,
            goal,
            depth,
            max_term_size,
        } => entail_search(&axioms, &goal, depth, max_term_size),
        Command::BirkhoffDemo {
            vars,
            target,
            cert,
            files,
        } => birkhoff_demo(vars, target.as_deref().zip(cert.as_deref()), &files),
    }
}

fn validate(path: &str) -> Input<bool> {
    let text = input::read(path)?;
    match ualg_core::format::parse_algebra_file(&text, Some(path)) {
        Ok(file) => {
            println!("ok: {} algebras", file.algebras.len());
            for a in &file.algebras {
                println!("algebra {} size {}", a.name, a.algebra.size());
            }
            Ok(true)
        }
        Err(FormatError::Validation { algebra, violations }) => {
            println!("invalid algebra {algebra}");
            for v in violations {
                println!("WITNESS algebra={algebra} {v}");
            }
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn sat(algebra: &str, equation: &str) -> Input<bool> {
    let (_, alg) = input::algebra(algebra)?;
    let eq = input::equation(equation)?;
    let r = satisfies(&alg, &eq, input::caps()?.envs)?;
    match r.counterexample {
        None => println!("holds: {eq}"),
        Some(env) => {
            println!("fails: {eq}");
            println!("WITNESS {env}");
        }
    }
    Ok(r.holds)
}

fn class_sat(equation: &str, files: &[String]) -> Input<bool> {
    let class = input::class(files)?;
    let eq = input::equation(equation)?;
    let algs: Vec<FiniteAlgebra> = class.iter().map(|(_, a)| a.clone()).collect();
    let r = class_satisfies(&algs, &eq, input::caps()?.envs)?;
    match r.failure {
        None => println!("holds in all {} algebras: {eq}", algs.len()),
        Some(f) => {
            println!("fails: {eq}");
            println!("WITNESS algebra={} {}", class[f.index].0, f.counterexample);
        }
    }
    Ok(r.holds)
}

fn theory(depth: usize, vars: usize, files: &[String]) -> Input<bool> {
    let class = input::class(files)?;
    let algs: Vec<FiniteAlgebra> = class.into_iter().map(|(_, a)| a).collect();
    let sig = algs[0].signature().clone();
    let th = theory_upto(&sig, &algs, &var_names(vars), depth, input::caps()?.theory())?;
    for eq in nontrivial_unordered(th) {
        println!("{eq}");
    }
    Ok(true)
}

/// Drops `p = p` and keeps one of `p = q`, `q = p`.
fn nontrivial_unordered(eqs: Vec<Equation>) -> Vec<Equation> {
    let mut seen = HashSet::new();
    eqs.into_iter()
        .filter(|e| !e.is_trivial() && !seen.contains(&e.swapped()) && seen.insert(e.clone()))
        .collect()
}

fn hom(src: &str, dst: &str, map: &str) -> Input<bool> {
    let (_, a) = input::algebra(src)?;
    let (_, b) = input::algebra(dst)?;
    let m = CarrierMap::new(a, b, input::map_image(map, "--map")?)?;
    let c = classify(&m)?;
    match c.witness {
        None => println!("hom injective={} surjective={}", c.injective, c.surjective),
        Some(w) => {
            println!("not a homomorphism");
            println!("WITNESS {w}");
        }
    }
    Ok(c.is_hom)
}

fn hom_find(src: &str, dst: &str, surjective: bool, injective: bool, first: bool) -> Input<bool> {
    let (_, a) = input::algebra(src)?;
    let (_, b) = input::algebra(dst)?;
    let cons = HomConstraints {
        surjective,
        injective,
        fixed: Vec::new(),
    };
    let cap = input::caps()?.search;
    let maps = if first {
        ualg_core::find_first_hom(&a, &b, &cons, cap)?.into_iter().collect()
    } else {
        find_homs(&a, &b, &cons, cap)?
    };
    for m in &maps {
        println!("MAP {m}");
    }
    if maps.is_empty() {
        println!("WITNESS none");
    }
    Ok(!maps.is_empty())
}

fn factor(src: &str, g_dst: &str, h_dst: &str, g: &str, h: &str) -> Input<bool> {
    let (_, a) = input::algebra(src)?;
    let (_, c) = input::algebra(g_dst)?;
    let (_, b) = input::algebra(h_dst)?;
    let g = CarrierMap::new(a.clone(), c, input::map_image(g, "--g")?)?;
    let h = CarrierMap::new(a, b, input::map_image(h, "--h")?)?;
    match hom_factor(&g, &h) {
        Ok(phi) => {
            println!("MAP {phi}");
            Ok(true)
        }
        Err(HomError::NotHom(w)) => {
            println!("WITNESS {w}");
            Ok(false)
        }
        Err(HomError::NotSurjective(e)) => {
            println!("WITNESS unreached={e}");
            Ok(false)
        }
        Err(HomError::KernelNotIncluded(x, y)) => {
            println!("WITNESS kernel-pair {x} {y}");
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn free(vars: usize, out: Option<&str>, files: &[String]) -> Input<bool> {
    let class = input::class(files)?;
    let algs: Vec<FiniteAlgebra> = class.into_iter().map(|(_, a)| a).collect();
    let sig = algs[0].signature().clone();
    let fr = build_free(&sig, &algs, &var_names(vars), input::caps()?.free())?;
    let text = emit_algebra_file(&free_algebra_file(&fr, "free"));
    let sidecar = emit_free_sidecar(&fr);
    match out {
        Some(path) => {
            let repr = format!("{path}.repr");
            fs::write(path, text).map_err(|e| InputError(format!("{path}: {e}")))?;
            fs::write(&repr, sidecar).map_err(|e| InputError(format!("{repr}: {e}")))?;
            println!("free algebra with {} elements written to {path} and {repr}", fr.size());
        }
        None => {
            print!("{text}");
            for line in sidecar.lines() {
                println!("# {line}");
            }
        }
    }
    Ok(true)
}

fn load_entailment(axioms: &str, goal: &str) -> Input<(Signature, Vec<Equation>, Equation)> {
    let axioms = input::equations(axioms)?;
    let goal = input::equation(goal)?;
    let mut all: Vec<&Equation> = axioms.iter().collect();
    all.push(&goal);
    Ok((input::infer_signature(&all)?, axioms, goal))
}

fn entail_check(axioms: &str, goal: &str, proof: &str) -> Input<bool> {
    let (sig, axioms, goal) = load_entailment(axioms, goal)?;
    let p = input::proof(proof)?;
    match check_proof(&sig, &axioms, &p) {
        Ok(c) if c == goal => {
            println!("proof checks: {goal}");
            Ok(true)
        }
        Ok(c) => {
            println!("proof concludes a different equation");
            println!("WITNESS concludes \"{c}\"");
            Ok(false)
        }
        Err(e) => {
            println!("proof rejected");
            println!("WITNESS {e}");
            Ok(false)
        }
    }
}

fn entail_search(axioms: &str, goal: &str, depth: usize, max_term_size: usize) -> Input<bool> {
    let (sig, axioms, goal) = load_entailment(axioms, goal)?;
    let caps = input::caps()?;
    let limits = SearchLimits {
        max_depth: depth,
        max_term_size,
        node_budget: caps.search,
    };
    match search_proof(&sig, &axioms, &goal, limits)? {
        SearchOutcome::Found(p) => {
            println!("{p}");
            return Ok(true);
        }
        SearchOutcome::Refuted => {
            println!("no proof of height <= {depth}");
            println!("WITNESS refuted depth={depth}");
        }
        SearchOutcome::BudgetExhausted => {
            println!("search budget exhausted");
            println!("WITNESS budget-exhausted nodes={}", caps.search);
        }
    }
    // a small countermodel shows the goal is not a consequence at all
    for n in 1..=2 {
        let Some(pool) = all_algebras(&sig, n, caps.pool) else {
            break;
        };
        for alg in pool {
            if !mod_check(&alg, &axioms, caps.envs)?.holds {
                continue;
            }
            if let Some(env) = satisfies(&alg, &goal, caps.envs)?.counterexample {
                let tables: Vec<String> = sig
                    .ops()
                    .iter()
                    .zip(alg.tables())
                    .map(|(o, t)| {
                        let cells: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                        format!("{}=\"{}\"", o.name, cells.join(" "))
                    })
                    .collect();
                println!("WITNESS countermodel size={n} {} env=\"{env}\"", tables.join(" "));
                return Ok(false);
            }
        }
    }
    Ok(false)
}

fn print_report(label: &str, r: &PipelineReport) {
    for line in r.machine_lines() {
        println!("{label} {line}");
    }
    for s in r.stages.iter().filter(|s| s.status == StageStatus::Fail) {
        match &s.witness {
            Some(w) => println!("WITNESS {label} stage={} {w}", s.name),
            None => println!("WITNESS {label} stage={} \"{}\"", s.name, s.detail),
        }
    }
}

fn birkhoff_demo(vars: usize, explicit: Option<(&str, &str)>, files: &[String]) -> Input<bool> {
    let caps = input::caps()?;
    let class = input::class(files)?;
    let names: Vec<&str> = class.iter().map(|(n, _)| n.as_str()).collect();
    let algs: Vec<FiniteAlgebra> = class.iter().map(|(_, a)| a.clone()).collect();
    let sig = algs[0].signature().clone();
    println!("class: {}", names.join(" "));

    let fr = build_free(&sig, &algs, &var_names(vars), caps.free())?;
    println!("free: {} vars, {} elements", vars, fr.size());

    let mut ok = true;
    let eqs = nontrivial_unordered(theory_upto(&sig, &algs, &var_names(2), 1, caps.theory())?);
    println!("easy: {} identities of depth <= 1 in 2 vars", eqs.len());
    let r = eqcl_to_var_check(&sig, &eqs, 2, &caps)?;
    print_report("easy", &r);
    ok &= r.overall;

    let mut targets = Vec::new();
    match explicit {
        Some((target, cert)) => {
            let (name, b) = input::algebra(target)?;
            targets.push((name, b, input::certificate(cert)?));
        }
        None => {
            for (i, name) in names.iter().enumerate() {
                for (j, (b, cert)) in square_certificates(&algs, i, &caps)?.into_iter().enumerate() {
                    targets.push((format!("{name}^2/{j}"), b, cert));
                }
            }
        }
    }
    for (name, b, cert) in &targets {
        println!("hard: target {name} size {} cert {}", b.size(), emit_certificate(cert));
        let r = var_to_eqcl_check(&algs, b, cert, &caps)?;
        print_report("hard", &r);
        ok &= r.overall;
    }
    println!("overall: {}", if ok { "pass" } else { "FAIL" });
    Ok(ok)
}
