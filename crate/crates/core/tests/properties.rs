use std::collections::HashSet;

use proptest::prelude::*;
use ualg_core::catalog::{all_algebras, binary_sig, cyclic, semilattice2, z2_xor, z3_add};
use ualg_core::closure::DEFAULT_PRODUCT_CAP;
use ualg_core::format::{emit_algebra_file, parse_algebra_file, parse_proof, parse_term};
use ualg_core::homs::DEFAULT_SEARCH_CAP;
use ualg_core::sigcore::ArgTuples;
use ualg_core::*;

fn sig2() -> Signature {
    Signature::new([("f", 2), ("e", 0)]).unwrap()
}

/// A random algebra over `sig` with carrier size in `sizes`.
fn arb_algebra(sig: Signature, sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = FiniteAlgebra> {
    sizes.prop_flat_map(move |n| {
        let sig = sig.clone();
        let lens: Vec<usize> = sig.ops().iter().map(|o| n.pow(o.arity as u32)).collect();
        lens.into_iter()
            .map(|len| prop::collection::vec(0..n, len))
            .collect::<Vec<_>>()
            .prop_map(move |tables| FiniteAlgebra::new(sig.clone(), n, tables).unwrap())
    })
}

fn xy() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

fn pool() -> Vec<FiniteAlgebra> {
    let sig = binary_sig();
    let mut out = Vec::new();
    for n in 1..=2 {
        out.extend(all_algebras(&sig, n, 100).unwrap());
    }
    out.extend([cyclic(3), FiniteAlgebra::from_fn(sig.clone(), 3, |_, a| a[0].max(a[1]))]);
    out.push(FiniteAlgebra::from_fn(sig, 3, |_, a| a[0]));
    out
}

/// Every map `src -> dst`, in lexicographic image order.
fn all_maps(src: &FiniteAlgebra, dst: &FiniteAlgebra) -> Vec<CarrierMap> {
    ArgTuples::new(dst.size(), src.size())
        .map(|img| CarrierMap::new(src.clone(), dst.clone(), img).unwrap())
        .collect()
}

fn is_iso_pair(a: &FiniteAlgebra, b: &FiniteAlgebra) -> bool {
    match (
        find_iso(a, b, DEFAULT_SEARCH_CAP).unwrap(),
        find_iso(b, a, DEFAULT_SEARCH_CAP).unwrap(),
    ) {
        (Some(to), Some(_)) => {
            // the inverse of a bijective hom is itself a hom
            let mut back = vec![0; b.size()];
            for x in a.carrier() {
                back[to.at(x)] = x;
            }
            let back = CarrierMap::new(b.clone(), a.clone(), back).unwrap();
            classify(&back).unwrap().is_iso()
        }
        _ => false,
    }
}

#[test]
fn enumerate_terms_has_no_duplicates_and_is_depth_closed() {
    let sig = sig2();
    let ts = enumerate_terms(&sig, &xy(), 2, 1_000_000).unwrap();
    let set: HashSet<_> = ts.iter().collect();
    assert_eq!(set.len(), ts.len());
    for t in &ts {
        assert!(t.depth() <= 2);
        if let Term::App(_, ch) = t {
            assert!(ch.iter().all(|c| set.contains(c)));
        }
    }
    let d1 = enumerate_terms(&sig, &xy(), 1, 1_000_000).unwrap();
    assert_eq!(&ts[..d1.len()], &d1[..]);
    assert!(ts[d1.len()..].iter().all(|t| t.depth() == 2));
}

#[test]
fn composition_of_homs_is_a_hom() {
    let pool = pool();
    for a in &pool {
        for b in &pool {
            let ab = find_homs(a, b, &HomConstraints::any(), DEFAULT_SEARCH_CAP).unwrap();
            if ab.is_empty() {
                continue;
            }
            for c in &pool {
                for h in find_homs(b, c, &HomConstraints::any(), DEFAULT_SEARCH_CAP).unwrap() {
                    for g in &ab {
                        assert!(classify(&compose(g, &h).unwrap()).unwrap().is_hom);
                    }
                }
            }
        }
    }
}

#[test]
fn isomorphism_is_an_equivalence_relation() {
    let pool = pool();
    let iso: Vec<Vec<bool>> = pool
        .iter()
        .map(|a| pool.iter().map(|b| is_iso_pair(a, b)).collect())
        .collect();
    for i in 0..pool.len() {
        assert!(iso[i][i]);
        for j in 0..pool.len() {
            assert_eq!(iso[i][j], iso[j][i]);
            for k in 0..pool.len() {
                if iso[i][j] && iso[j][k] {
                    assert!(iso[i][k]);
                }
            }
        }
    }
}

#[test]
fn leq_is_reflexive_and_transitive() {
    let pool = pool();
    let leq: Vec<Vec<bool>> = pool
        .iter()
        .map(|a| {
            pool.iter()
                .map(|b| check_leq(a, b, DEFAULT_SEARCH_CAP).unwrap().is_some())
                .collect()
        })
        .collect();
    for i in 0..pool.len() {
        assert!(leq[i][i]);
        for j in 0..pool.len() {
            for k in 0..pool.len() {
                if leq[i][j] && leq[j][k] {
                    assert!(leq[i][k]);
                }
            }
        }
    }
}

#[test]
fn hsp_preserves_identities_of_catalog_algebras() {
    let caps = Caps::default();
    let terms = enumerate_terms(&binary_sig(), &xy(), 1, 1000).unwrap();
    for a in [z2_xor(), semilattice2(), z3_add()] {
        for p in &terms {
            for q in &terms {
                let eq = Equation::new(p.clone(), q.clone());
                if !satisfies(&a, &eq, 1000).unwrap().holds {
                    continue;
                }
                let mut hows = vec![Derivation::Product(vec![a.clone()])];
                for m in find_homs(&a, &a, &HomConstraints::any(), DEFAULT_SEARCH_CAP).unwrap() {
                    hows.push(Derivation::HomImage(m));
                }
                for g in a.carrier() {
                    let s = subalgebra_generate(&a, &[g]).unwrap();
                    hows.push(Derivation::Subalgebra(s.inclusion));
                }
                for how in &hows {
                    let r = verify_invariance(&a, &eq, how, &caps).unwrap();
                    assert!(r.overall, "{eq} via {how:?}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn substitution_lemma(
        a in arb_algebra(sig2(), 1..=3),
        ti in 0usize..500,
        si in 0usize..100,
        sj in 0usize..100,
    ) {
        let sig = sig2();
        let terms = enumerate_terms(&sig, &xy(), 2, 1_000_000).unwrap();
        let small = enumerate_terms(&sig, &xy(), 1, 1_000_000).unwrap();
        let t = &terms[ti % terms.len()];
        let sigma = Substitution::new()
            .with("x", small[si % small.len()].clone())
            .with("y", small[sj % small.len()].clone());
        for rho in Environment::all(&xy(), a.size()) {
            let lhs = evaluate(&a, &sigma.apply(t), &rho).unwrap();
            let mut shifted = Environment::new();
            for x in xy() {
                shifted.bind(x.clone(), evaluate(&a, sigma.get(&x).unwrap(), &rho).unwrap());
            }
            prop_assert_eq!(lhs, evaluate(&a, t, &shifted).unwrap());
        }
    }

    #[test]
    fn free_lift_is_evaluation_and_a_hom(a in arb_algebra(sig2(), 1..=3)) {
        let terms = enumerate_terms(&sig2(), &xy(), 2, 1_000_000).unwrap();
        for rho in Environment::all(&xy(), a.size()) {
            let h = |x: &str| rho.get(x);
            for t in &terms {
                let v = free_lift(&a, h, t).unwrap();
                prop_assert_eq!(v, evaluate(&a, t, &rho).unwrap());
                if let Term::App(f, ch) = t {
                    let args: Vec<Elem> = ch.iter().map(|c| free_lift(&a, h, c).unwrap()).collect();
                    prop_assert_eq!(v, a.apply_op(f, &args).unwrap());
                }
            }
        }
    }

    #[test]
    fn apply_op_agrees_with_tables(a in arb_algebra(sig2(), 1..=4)) {
        for (op, o) in a.signature().ops().iter().enumerate() {
            for (i, args) in ArgTuples::new(a.size(), o.arity).enumerate() {
                prop_assert_eq!(a.apply_op(&o.name, &args).unwrap(), a.table(op)[i]);
            }
        }
    }

    #[test]
    fn find_homs_is_complete(
        src in arb_algebra(binary_sig(), 1..=3),
        dst in arb_algebra(binary_sig(), 1..=3),
        inj in any::<bool>(),
        surj in any::<bool>(),
    ) {
        prop_assume!(dst.size().pow(src.size() as u32) <= 256);
        let cons = HomConstraints { injective: inj, surjective: surj, fixed: Vec::new() };
        let found: Vec<Vec<Elem>> = find_homs(&src, &dst, &cons, DEFAULT_SEARCH_CAP)
            .unwrap()
            .iter()
            .map(|m| m.image().to_vec())
            .collect();
        let expected: Vec<Vec<Elem>> = all_maps(&src, &dst)
            .into_iter()
            .filter(|m| {
                let c = classify(m).unwrap();
                c.is_hom && (!inj || c.injective) && (!surj || c.surjective)
            })
            .map(|m| m.image().to_vec())
            .collect();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn hom_factor_reconstructs(
        a in arb_algebra(binary_sig(), 1..=3),
        b in arb_algebra(binary_sig(), 1..=3),
        c in arb_algebra(binary_sig(), 1..=3),
        pick in any::<prop::sample::Index>(),
        pick2 in any::<prop::sample::Index>(),
    ) {
        let hs = find_homs(&a, &b, &HomConstraints::surjective(), DEFAULT_SEARCH_CAP).unwrap();
        let phis = find_homs(&b, &c, &HomConstraints::any(), DEFAULT_SEARCH_CAP).unwrap();
        prop_assume!(!hs.is_empty() && !phis.is_empty());
        let h = pick.get(&hs);
        let g = compose(h, pick2.get(&phis)).unwrap();
        let phi = hom_factor(&g, h).unwrap();
        let back = compose(h, &phi).unwrap();
        prop_assert_eq!(back.image(), g.image());
        prop_assert!(classify(&phi).unwrap().is_hom);
    }

    #[test]
    fn product_interprets_terms_componentwise(
        a in arb_algebra(sig2(), 1..=3),
        b in arb_algebra(sig2(), 1..=3),
        ti in 0usize..1000,
    ) {
        let p = product(&[a.clone(), b.clone()], DEFAULT_PRODUCT_CAP).unwrap();
        let terms = enumerate_terms(&sig2(), &xy(), 2, 1_000_000).unwrap();
        let t = &terms[ti % terms.len()];
        for rho in Environment::all(&xy(), p.algebra.size()) {
            let (mut ra, mut rb) = (Environment::new(), Environment::new());
            for (x, v) in rho.iter() {
                let parts = p.codec.decode(v);
                ra.bind(x, parts[0]);
                rb.bind(x, parts[1]);
            }
            let got = p.codec.decode(evaluate(&p.algebra, t, &rho).unwrap());
            prop_assert_eq!(got, vec![evaluate(&a, t, &ra).unwrap(), evaluate(&b, t, &rb).unwrap()]);
        }
    }

    #[test]
    fn product_of_subalgebras_embeds(
        a in arb_algebra(binary_sig(), 1..=3),
        b in arb_algebra(binary_sig(), 1..=3),
        ga in any::<prop::sample::Index>(),
        gb in any::<prop::sample::Index>(),
    ) {
        let sa = subalgebra_generate(&a, &[ga.index(a.size())]).unwrap();
        let sb = subalgebra_generate(&b, &[gb.index(b.size())]).unwrap();
        let small = product(&[sa.algebra.clone(), sb.algebra.clone()], DEFAULT_PRODUCT_CAP).unwrap();
        let big = product(&[a.clone(), b.clone()], DEFAULT_PRODUCT_CAP).unwrap();
        let m = product_map(&small, &big, &[sa.inclusion.clone(), sb.inclusion.clone()]).unwrap();
        let c = classify(&m).unwrap();
        prop_assert!(c.is_hom && c.injective);
        prop_assert!(check_leq(&small.algebra, &big.algebra, DEFAULT_SEARCH_CAP).unwrap().is_some());
    }

    #[test]
    fn subalgebra_generation_is_a_fixpoint(
        a in arb_algebra(sig2(), 1..=4),
        gens in prop::collection::vec(any::<prop::sample::Index>(), 0..3),
    ) {
        let gens: Vec<Elem> = gens.iter().map(|i| i.index(a.size())).collect();
        let s = subalgebra_generate(&a, &gens).unwrap();
        prop_assert!(classify(&s.inclusion).unwrap().is_mono());
        let again = subalgebra_generate(&s.algebra, &s.algebra.carrier().collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(&again.elements, &s.algebra.carrier().collect::<Vec<_>>());
        prop_assert_eq!(&again.algebra, &s.algebra);
    }

    #[test]
    fn nested_substitutions_compose(
        ai in 0usize..40, si in 0usize..40, ti in 0usize..40, sj in 0usize..40, tj in 0usize..40,
    ) {
        let sig = binary_sig();
        let terms = enumerate_terms(&sig, &xy(), 1, 1000).unwrap();
        let pick = |i: usize| terms[i % terms.len()].clone();
        let axioms = vec![Equation::new(pick(ai), pick(ai + 1))];
        let sigma = Substitution::new().with("x", pick(si)).with("y", pick(sj));
        let tau = Substitution::new().with("x", pick(ti)).with("y", pick(tj));
        let nested = Proof::sub(Proof::sub(Proof::Hyp(0), sigma.clone()), tau.clone());
        let flat = Proof::sub(Proof::Hyp(0), sigma.then(&tau));
        prop_assert_eq!(
            check_proof(&sig, &axioms, &nested).unwrap(),
            check_proof(&sig, &axioms, &flat).unwrap()
        );
    }

    #[test]
    fn searched_proofs_check_to_the_goal(pi in 0usize..100, qi in 0usize..100) {
        let sig = binary_sig();
        let f = |a: Term, b: Term| Term::app("f", vec![a, b]);
        let axioms = vec![Equation::new(f(Term::var("x"), Term::var("y")), f(Term::var("y"), Term::var("x")))];
        let terms = enumerate_terms(&sig, &xy(), 1, 1000).unwrap();
        let goal = Equation::new(terms[pi % terms.len()].clone(), terms[qi % terms.len()].clone());
        let limits = SearchLimits { max_depth: 3, max_term_size: 8, node_budget: 20_000 };
        if let SearchOutcome::Found(p) = search_proof(&sig, &axioms, &goal, limits).unwrap() {
            prop_assert_eq!(check_proof(&sig, &axioms, &p).unwrap(), goal);
        }
    }

    #[test]
    fn algebra_files_round_trip(algs in prop::collection::vec(arb_algebra(sig2(), 1..=3), 1..4)) {
        let file = AlgebraFile {
            signature: sig2(),
            algebras: algs
                .into_iter()
                .enumerate()
                .map(|(i, algebra)| NamedAlgebra { name: format!("a{i}"), algebra })
                .collect(),
        };
        let text = emit_algebra_file(&file);
        let back = parse_algebra_file(&text, None).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(emit_algebra_file(&back), text);
    }

    #[test]
    fn terms_and_proofs_round_trip(ti in 0usize..2000, si in 0usize..2000) {
        let terms = enumerate_terms(&sig2(), &xy(), 2, 1_000_000).unwrap();
        let t = terms[ti % terms.len()].clone();
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t.clone());
        let p = Proof::trans(
            Proof::sub(Proof::Hyp(0), Substitution::new().with("x", terms[si % terms.len()].clone())),
            Proof::App("f".into(), vec![Proof::Refl(t), Proof::sym(Proof::Hyp(1))]),
        );
        prop_assert_eq!(parse_proof(&p.to_string(), None).unwrap(), p);
    }

    #[test]
    fn free_algebra_invariants(class in prop::collection::vec(arb_algebra(binary_sig(), 1..=2), 1..3)) {
        let sig = binary_sig();
        let free = build_free(&sig, &class, &xy(), FreeCaps::default()).unwrap();
        let tuples: HashSet<_> = free.elems.iter().map(|e| e.tuple.clone()).collect();
        prop_assert_eq!(tuples.len(), free.size());
        let terms = enumerate_terms(&sig, &xy(), 2, 1_000_000).unwrap();
        for t in &terms {
            let v = nat_epi(&free, t).unwrap();
            if let Term::App(f, ch) = t {
                let args: Vec<Elem> = ch.iter().map(|c| nat_epi(&free, c).unwrap()).collect();
                prop_assert_eq!(v, free.algebra.apply_op(f, &args).unwrap());
            }
        }
        for (i, e) in free.elems.iter().enumerate() {
            prop_assert_eq!(nat_epi(&free, &e.repr).unwrap(), i);
        }
        for b in &class {
            for rho in Environment::all(&xy(), b.size()) {
                let u = universal_map(&free, b, &rho).unwrap();
                for t in &terms {
                    prop_assert_eq!(u.map.at(nat_epi(&free, t).unwrap()), evaluate(b, t, &rho).unwrap());
                }
            }
        }
    }
}
