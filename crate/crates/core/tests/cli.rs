//! End-to-end runs of the `whylog` binary against the fixtures, diffed
//! byte-for-byte with `fixtures/golden`. Set `WHYLOG_UPDATE_GOLDEN=1` to
//! rewrite the golden files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn whylog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whylog"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

fn golden(name: &str, args: &[&str], exit: i32) {
    let out = whylog(args);
    assert_eq!(
        out.status.code(),
        Some(exit),
        "{name}: stdout {} stderr {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let path = root().join("fixtures/golden").join(format!("{name}.out"));
    if std::env::var_os("WHYLOG_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).unwrap();
        return;
    }
    let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&want),
        "{name} differs from its golden file"
    );
}

const CONJ: &str = "(K[i]p & ~Ky[i]p & Ky[j]p & K[i]Ky[j]p)";

#[test]
fn check_goldens() {
    golden(
        "check_example2",
        &["check", "fixtures/example2.mod", "w2", CONJ, "--trace"],
        0,
    );
    golden(
        "check_example2_ky",
        &["check", "fixtures/example2.mod", "w2", "Ky[i]p", "--trace"],
        1,
    );
    golden("check_top", &["check", "fixtures/plus.mod", "w1", "top"], 0);
    golden(
        "check_plus_ky",
        &["check", "fixtures/plus.mod", "w1", "Ky[i]p", "--trace"],
        1,
    );
    golden("check_plus_k", &["check", "fixtures/plus.mod", "w2", "K[i]p"], 0);
    golden(
        "check_ky_conjunction",
        &[
            "check",
            "fixtures/ky_conjunction.mod",
            "w",
            "(Ky[i]p & Ky[i]q & ~Ky[i](p & q))",
            "--trace",
        ],
        0,
    );
    golden(
        "check_conditional_left",
        &["check", "fixtures/conditional_left.mod", "u", "Ky[i](q, p)", "--trace"],
        0,
    );
    golden(
        "check_conditional_right",
        &["check", "fixtures/conditional_right.mod", "u", "Ky[i](q, p)", "--trace"],
        1,
    );
    golden(
        "check_jl",
        &["check", "fixtures/example2.mod", "w3", "(Ky[i]p & Ky[j]p)", "--jl"],
        0,
    );
    golden(
        "check_chain",
        &["check", "fixtures/chain.mod", "w2", "Ky[j]q", "--trace"],
        0,
    );
}

#[test]
fn validate_goldens() {
    golden(
        "validate_example2",
        &["validate", "fixtures/example2.mod", "--factivity"],
        0,
    );
    golden(
        "validate_false_seed",
        &["validate", "fixtures/false_seed.mod", "--factivity"],
        1,
    );
    golden(
        "validate_unseeded",
        &["validate", "fixtures/unseeded.mod", "--introspection=K[i]p;~K[i]p"],
        1,
    );
}

#[test]
fn transform_goldens() {
    golden("saturate_chain", &["saturate", "fixtures/chain.mod"], 0);
    golden(
        "transform_jl_example2",
        &["transform", "fixtures/example2.mod", "jl"],
        0,
    );
    golden(
        "transform_factive_chain",
        &["transform", "fixtures/chain.mod", "factive"],
        0,
    );
}

#[test]
fn prove_goldens() {
    golden("prove_5yk", &["prove", "fixtures/5yk.proof"], 0);
    golden("prove_5yk_tampered", &["prove", "fixtures/5yk_tampered.proof"], 1);
    golden("prove_skyi_4yk", &["prove", "fixtures/skyi_4yk.proof"], 0);
    golden("prove_necky", &["prove", "fixtures/necky.proof"], 0);
}

#[test]
fn fuzz_golden() {
    golden("fuzz_sky_small", &["fuzz", "SKY", "3", "--seed", "1"], 0);
}

#[test]
fn fuzz_is_deterministic() {
    let a = whylog(&["fuzz", "SKYI", "1", "--seed", "1"]);
    let b = whylog(&["fuzz", "SKYI", "1", "--seed", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("whylog-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn factive_transform_twice_is_identity() {
    for fixture in ["chain.mod", "false_seed.mod", "example2.mod"] {
        let (a, b) = (scratch(&format!("a-{fixture}")), scratch(&format!("b-{fixture}")));
        let src = format!("fixtures/{fixture}");
        assert_eq!(
            whylog(&["transform", &src, "factive", a.to_str().unwrap()])
                .status
                .code(),
            Some(0)
        );
        assert_eq!(
            whylog(&["transform", a.to_str().unwrap(), "factive", b.to_str().unwrap()])
                .status
                .code(),
            Some(0)
        );
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{fixture}");
        let v = whylog(&["validate", a.to_str().unwrap(), "--factivity"]);
        assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
    }
}

#[test]
fn jl_transform_validates() {
    for fixture in ["chain.mod", "example2.mod", "plus.mod"] {
        let out = scratch(&format!("jl-{fixture}"));
        let src = format!("fixtures/{fixture}");
        assert_eq!(
            whylog(&["transform", &src, "jl", out.to_str().unwrap()]).status.code(),
            Some(0)
        );
        let v = whylog(&["validate", out.to_str().unwrap()]);
        assert_eq!(v.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&v.stdout).contains("jl model: 0 violations"));
    }
}

#[test]
fn errors_exit_two() {
    let out = whylog(&["check", "fixtures/example2.mod", "w2", "Ky[i"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1, column 5"), "{err}");
    let out = whylog(&["check", "fixtures/example2.mod", "w9", "p"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown world `w9`"));
    let bad = scratch("bad.mod");
    std::fs::write(
        &bad,
        "model\n  worlds: w1 w2\n  agents: i\n  partition i: {w1 w2} {w2}\nend\n",
    )
    .unwrap();
    let out = whylog(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4: "));
    assert_eq!(whylog(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(whylog(&["--help"]).status.code(), Some(0));
}

#[test]
fn proof_fixtures_match_library() {
    use whylog::proofs::{derive_skyi_theorems, parse_proof, PROOF_5YK};
    let text = std::fs::read_to_string(root().join("fixtures/5yk.proof")).unwrap();
    assert_eq!(text, PROOF_5YK);
    for (name, proof) in derive_skyi_theorems() {
        let file = root().join(format!("fixtures/skyi_{}.proof", name.to_lowercase()));
        let text = std::fs::read_to_string(&file).unwrap();
        assert_eq!(parse_proof(&text).unwrap(), proof, "{name}");
    }
}
