use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use ualg_core::catalog::{binary_sig, semilattice2};
use ualg_core::format::parse_algebra_file;
use ualg_core::terms::var_names;
use ualg_core::{build_free, FreeCaps};

const ALGEBRAS: &str = "\
signature
op f 2
end

algebra z2
size 2
op f 0 1 1 0
end

algebra semi
size 2
op f 0 0 0 1
end
";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        fs::write(dir.path().join("algs.alg"), ALGEBRAS).unwrap();
        fs::write(
            dir.path().join("semi.alg"),
            "signature\nop f 2\nend\nalgebra semi\nsize 2\nop f 0 0 0 1\nend\n",
        )
        .unwrap();
        fs::write(
            dir.path().join("z4.alg"),
            "signature\nop f 2\nend\nalgebra z4\nsize 4\nop f 0 1 2 3 1 2 3 0 2 3 0 1 3 0 1 2\nend\n",
        )
        .unwrap();
        fs::write(dir.path().join("comm.eq"), "# commutativity\nf(?x,?y) = f(?y,?x)\n").unwrap();
        Fixture { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        self.run_env(args, None)
    }

    fn run_env(&self, args: &[&str], caps: Option<&str>) -> Output {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ualg"));
        cmd.args(args).current_dir(self.dir.path()).env_remove("UALG_CAPS");
        if let Some(c) = caps {
            cmd.env("UALG_CAPS", c);
        }
        cmd.output().unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn witnesses(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| l.starts_with("WITNESS "))
        .map(str::to_string)
        .collect()
}

#[test]
fn sat_commutativity_holds_in_z2() {
    let fx = Fixture::new();
    let o = fx.run(&["sat", "--algebra", "algs.alg", "--equation", "f(?x,?y) = f(?y,?x)"]);
    assert_eq!(code(&o), 0);
    assert!(witnesses(&o).is_empty());
}

#[test]
fn sat_idempotence_fails_in_z2_with_witness() {
    let fx = Fixture::new();
    let o = fx.run(&["sat", "--algebra", "algs.alg:z2", "--equation", "f(?x,?x) = ?x"]);
    assert_eq!(code(&o), 1);
    assert_eq!(witnesses(&o), vec!["WITNESS x=1"]);
    let o = fx.run(&["sat", "--algebra", "algs.alg:semi", "--equation", "f(?x,?x) = ?x"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn input_errors_exit_2() {
    let fx = Fixture::new();
    let o = fx.run(&["validate", "missing.alg"]);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
    let o = fx.run(&["sat", "--algebra", "algs.alg", "--equation", "f(?x = ?y"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:6"));
    let o = fx.run(&["sat", "--algebra", "algs.alg:nope", "--equation", "?x = ?x"]);
    assert_eq!(code(&o), 2);
    let o = fx.run(&["sat", "--algebra", "algs.alg"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--equation"));
    let o = fx.run_env(
        &["sat", "--algebra", "algs.alg", "--equation", "?x = ?x"],
        Some("nonsense"),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn validate_reports_syntax_and_table_errors() {
    let fx = Fixture::new();
    assert_eq!(code(&fx.run(&["validate", "algs.alg"])), 0);
    let bad = fx.write("bad.alg", &ALGEBRAS.replace("op f 0 1 1 0", "op f 0 1 2 0"));
    let o = fx.run(&["validate", &bad]);
    assert_eq!(code(&o), 1);
    let w = witnesses(&o);
    assert_eq!(w.len(), 1);
    assert!(w[0].contains("z2") && w[0].contains("index 2"), "{w:?}");
    let truncated = fx.write("trunc.alg", ALGEBRAS.trim_end().trim_end_matches("end"));
    let o = fx.run(&["validate", &truncated]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("trunc.alg:12"));
}

#[test]
fn class_sat_names_the_failing_member() {
    let fx = Fixture::new();
    let o = fx.run(&["class-sat", "--equation", "f(?x,?x) = ?x", "algs.alg"]);
    assert_eq!(code(&o), 1);
    assert_eq!(witnesses(&o), vec!["WITNESS algebra=z2 x=1"]);
    let o = fx.run(&["class-sat", "--equation", "f(?x,?y) = f(?y,?x)", "algs.alg", "semi.alg"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn theory_of_semilattice() {
    let fx = Fixture::new();
    let o = fx.run(&["theory", "--depth", "1", "--vars", "2", "semi.alg"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert!(lines.contains(&"f(?v0,?v1) = f(?v1,?v0)".to_string()));
    assert!(lines.contains(&"?v0 = f(?v0,?v0)".to_string()));
    assert_eq!(lines.len(), 3);
}

#[test]
fn hom_classification_and_search() {
    let fx = Fixture::new();
    let o = fx.run(&["hom", "--src", "z4.alg", "--dst", "algs.alg:z2", "--map", "0 1 0 1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("surjective=true"));
    let o = fx.run(&["hom", "--src", "algs.alg:z2", "--dst", "algs.alg:z2", "--map", "1 1"]);
    assert_eq!(code(&o), 1);
    assert_eq!(witnesses(&o).len(), 1);
    let o = fx.run(&["hom", "--src", "algs.alg:z2", "--dst", "algs.alg:z2", "--map", "0 2"]);
    assert_eq!(code(&o), 2);

    let o = fx.run(&["hom-find", "--src", "z4.alg", "--dst", "algs.alg:z2", "--surjective"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "MAP 0 1 0 1\n");
    let o = fx.run(&["hom-find", "--src", "algs.alg:z2", "--dst", "z4.alg", "--injective"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "MAP 0 2\n");
    let o = fx.run(&[
        "hom-find",
        "--src",
        "algs.alg:semi",
        "--dst",
        "algs.alg:z2",
        "--surjective",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(witnesses(&o), vec!["WITNESS none"]);
}

#[test]
fn factor_through_surjection() {
    let fx = Fixture::new();
    let args = |g: &'static str| {
        vec![
            "factor",
            "--src",
            "z4.alg",
            "--g-dst",
            "algs.alg:z2",
            "--h-dst",
            "algs.alg:z2",
            "--g",
            g,
            "--h",
            "0 1 0 1",
        ]
    };
    let o = fx.run(&args("0 0 0 0"));
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "MAP 0 0\n");
    let o = fx.run(&args("0 1 0 1"));
    assert_eq!(stdout(&o), "MAP 0 1\n");
    // identity of z4 cannot factor through the mod-2 map
    let o = fx.run(&[
        "factor",
        "--src",
        "z4.alg",
        "--g-dst",
        "z4.alg",
        "--h-dst",
        "algs.alg:z2",
        "--g",
        "0 1 2 3",
        "--h",
        "0 1 0 1",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(witnesses(&o), vec!["WITNESS kernel-pair 0 2"]);
}

#[test]
fn free_output_round_trips_and_is_deterministic() {
    let fx = Fixture::new();
    let out = fx.path("free.alg");
    let o = fx.run(&["free", "--vars", "3", "--out", &out, "semi.alg"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    let parsed = parse_algebra_file(&text, None).unwrap();
    let expected = build_free(&binary_sig(), &[semilattice2()], &var_names(3), FreeCaps::default()).unwrap();
    assert_eq!(parsed.algebras[0].algebra, expected.algebra);
    let repr = fs::read_to_string(format!("{out}.repr")).unwrap();
    assert_eq!(repr.lines().count(), 7);
    assert!(repr.starts_with("elem 0 repr ?v0 gen v0\n"));

    let a = fx.run(&["free", "--vars", "2", "algs.alg"]);
    let b = fx.run(&["free", "--vars", "2", "algs.alg"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let printed = stdout(&a);
    assert!(parse_algebra_file(&printed, None).is_ok());
    assert!(printed.lines().any(|l| l.starts_with("# elem")));
}

#[test]
fn caps_override_is_honoured() {
    let fx = Fixture::new();
    let o = fx.run_env(&["free", "--vars", "3", "semi.alg"], Some("carrier=5"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains('5'));
    let o = fx.run_env(&["free", "--vars", "3", "semi.alg"], Some("carrier=7"));
    assert_eq!(code(&o), 0);
}

#[test]
fn entail_check_and_search() {
    let fx = Fixture::new();
    let proof = fx.write("p.sx", "; swap\n(sub (hyp 0) ((x ?y) (y ?x)))\n");
    let o = fx.run(&[
        "entail-check",
        "--axioms",
        "comm.eq",
        "--goal",
        "f(?y,?x) = f(?x,?y)",
        "--proof",
        &proof,
    ]);
    assert_eq!(code(&o), 0);
    let o = fx.run(&[
        "entail-check",
        "--axioms",
        "comm.eq",
        "--goal",
        "f(?x,?x) = ?x",
        "--proof",
        &proof,
    ]);
    assert_eq!(code(&o), 1);
    assert!(witnesses(&o)[0].starts_with("WITNESS concludes"));
    let bad = fx.write("bad.sx", "(hyp 3)");
    let o = fx.run(&[
        "entail-check",
        "--axioms",
        "comm.eq",
        "--goal",
        "?x = ?x",
        "--proof",
        &bad,
    ]);
    assert_eq!(code(&o), 1);
    let broken = fx.write("broken.sx", "(sub (hyp 0)");
    let o = fx.run(&[
        "entail-check",
        "--axioms",
        "comm.eq",
        "--goal",
        "?x = ?x",
        "--proof",
        &broken,
    ]);
    assert_eq!(code(&o), 2);

    let goal = "f(?x,f(?y,?z)) = f(f(?z,?y),?x)";
    let o = fx.run(&["entail-search", "--axioms", "comm.eq", "--goal", goal]);
    assert_eq!(code(&o), 0);
    let found = fx.write("found.sx", &stdout(&o));
    let o = fx.run(&["entail-check", "--axioms", "comm.eq", "--goal", goal, "--proof", &found]);
    assert_eq!(code(&o), 0);

    let o = fx.run(&[
        "entail-search",
        "--axioms",
        "comm.eq",
        "--goal",
        "f(?x,?x) = ?x",
        "--depth",
        "3",
    ]);
    assert_eq!(code(&o), 1);
    let w = witnesses(&o);
    assert_eq!(w[0], "WITNESS refuted depth=3");
    assert!(w[1].starts_with("WITNESS countermodel"));
}

#[test]
fn birkhoff_demo_passes_for_semilattices() {
    let fx = Fixture::new();
    let o = fx.run(&["birkhoff-demo", "--vars", "2", "semi.alg"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("free: 2 vars, 3 elements"));
    assert!(out.lines().filter(|l| l.starts_with("hard: target")).count() >= 5);
    assert!(!out.contains("FAIL"));
}

#[test]
fn birkhoff_demo_rejects_bad_certificate() {
    let fx = Fixture::new();
    let cert = fx.write("bad.cert", "(cert (factors (0 1)) (gens (0) (1)) (image 1 1))");
    let o = fx.run(&[
        "birkhoff-demo",
        "--vars",
        "1",
        "--target",
        "semi.alg",
        "--cert",
        &cert,
        "semi.alg",
    ]);
    assert_eq!(code(&o), 1);
    let w = witnesses(&o);
    assert_eq!(w.len(), 1);
    assert!(w[0].starts_with("WITNESS hard stage=certificate stage=3"), "{w:?}");

    let good = fx.write("good.cert", "(cert (factors (0 1)) (gens (0) (1)) (image 0 1))");
    let o = fx.run(&[
        "birkhoff-demo",
        "--vars",
        "1",
        "--target",
        "semi.alg",
        "--cert",
        &good,
        "semi.alg",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn algebra_argument_prefers_existing_paths() {
    let fx = Fixture::new();
    let odd = Path::new(fx.dir.path()).join("a:b.alg");
    fs::write(&odd, ALGEBRAS).unwrap();
    let p: PathBuf = odd;
    let o = fx.run(&["sat", "--algebra", p.to_str().unwrap(), "--equation", "?x = ?x"]);
    assert_eq!(code(&o), 0);
}
