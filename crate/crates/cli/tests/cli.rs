use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use catkit::completion::inflate;
use catkit::format::{category_to_raw, functor_to_raw, parse_category, validate_category};
use catkit::functor::Functor;
use catkit::generators::{finset_fragment, FiniteHeytingAlgebra};
use catkit::lifting::{Kind, Structures};
use catkit::structure::{parse_structures, structures_to_json};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn fx(name: &str) -> &'static str {
    Box::leak(fixture(name).to_str().unwrap().to_owned().into_boxed_str())
}

struct Run {
    code: i32,
    stdout: String,
}

fn catkit(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_catkit"));
    cmd.args(args).env_remove("CATKIT_MAX_SEARCH");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
    }
}

fn json_run(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let r = catkit(&all, &[]);
    (r.code, serde_json::from_str(&r.stdout).expect("json report"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

fn revalidates(v: &Value) {
    let raw = parse_category(&v.to_string()).unwrap();
    let c = validate_category(&raw).unwrap();
    if let Some(block) = &raw.structure {
        parse_structures(&c, block).unwrap().check(&c).unwrap();
    }
}

#[test]
fn exit_code_matrix() {
    let cases: &[(&[&str], i32)] = &[
        (&["validate", fx("walking_iso.json")], 0),
        (&["validate", fx("chain.json")], 0),
        (&["validate", fx("bad_composite.json")], 1),
        (&["validate", fx("bad_witness.json")], 1),
        (&["validate", fx("malformed.json")], 3),
        (&["validate", fx("no_such_file.json")], 3),
        (&["analyze", fx("chain.json"), "--structure", "products,exponentials"], 0),
        (&["analyze", fx("chain.json"), "--structure", "omega"], 2),
        (&["analyze", fx("walking_iso.json"), "--structure", "nonsense"], 1),
        (&["complete", fx("preorder.json")], 0),
        (&["complete", fx("chain.json"), "--carry-structure"], 0),
        (&["complete", fx("walking_iso.json"), "--carry-structure"], 2),
        (&["complete", fx("bad_composite.json")], 1),
        (&["demo", "walking-iso"], 0),
    ];
    for (args, want) in cases {
        let r = catkit(args, &[]);
        assert_eq!(r.code, *want, "catkit {}\n{}", args.join(" "), r.stdout);
    }
}

#[test]
fn errors_carry_pointers() {
    let (code, v) = json_run(&["validate", fx("bad_composite.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["pointer"], "/composition/0");
    let (_, v) = json_run(&["validate", fx("bad_witness.json")]);
    assert_eq!(v["error"]["kind"], "validation");
}

#[test]
fn text_and_json_agree_on_status() {
    for args in [
        vec!["validate", fx("bad_composite.json")],
        vec!["analyze", fx("chain.json"), "--structure", "omega"],
        vec!["demo", "preorder"],
    ] {
        let text = catkit(&args, &[]);
        let (code, v) = json_run(&args);
        assert_eq!(text.code, code);
        assert_eq!(v["exit_code"], code);
        let status = v["status"].as_str().unwrap();
        assert!(text.stdout.contains(&format!("status: {status} (exit {code})")));
        for check in v["checks"].as_array().unwrap() {
            assert!(text.stdout.contains(check["name"].as_str().unwrap()));
        }
    }
}

#[test]
fn walking_iso_demo_gives_the_terminal_category() {
    let (code, v) = json_run(&["demo", "walking-iso"]);
    assert_eq!(code, 0);
    let done = &v["payload"]["completed"];
    assert_eq!(done["objects"].as_array().unwrap().len(), 1);
    assert_eq!(done["morphisms"].as_array().unwrap().len(), 1);
    assert_eq!(v["payload"]["fidelity"], "exact");
}

#[test]
fn preorder_completes_to_a_poset() {
    let (code, v) = json_run(&["complete", fx("preorder.json")]);
    assert_eq!(code, 0);
    let done = &v["payload"]["completed"];
    revalidates(done);
    assert_eq!(done["objects"], serde_json::json!(["x", "z"]));
    assert_eq!(v["payload"]["fidelity"], "exact");
    assert_eq!(v["payload"]["representatives"]["x"], "x");
}

#[test]
fn finset_omega_has_two_elements() {
    let dir = tempfile::tempdir().unwrap();
    let fs = finset_fragment(2).unwrap();
    let path = write_json(dir.path(), "finset2.json", &serde_json::to_value(category_to_raw(&fs.category)).unwrap());
    let (code, v) = json_run(&["analyze", p(&path), "--structure", "terminal,omega"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["payload"]["structure"]["subobject_classifier"]["omega"], "2");
    // but 2 × 2 is missing
    let (code, _) = json_run(&["analyze", p(&path), "--structure", "products"]);
    assert_eq!(code, 2);
    let fs = finset_fragment(3).unwrap();
    let path = write_json(dir.path(), "finset3.json", &serde_json::to_value(category_to_raw(&fs.category)).unwrap());
    let (code, v) = json_run(&["analyze", p(&path), "--structure", "omega"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["payload"]["structure"]["subobject_classifier"]["omega"], "2");
}

#[test]
fn search_cap_aborts_with_code_two() {
    let r = catkit(
        &["analyze", fx("chain.json"), "--structure", "pullbacks"],
        &[("CATKIT_MAX_SEARCH", "1")],
    );
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("CATKIT_MAX_SEARCH"));
}

fn inflated_chain(dir: &Path) -> (PathBuf, PathBuf, PathBuf, Arc<catkit::FinCat>, Functor) {
    let base = Arc::new(FiniteHeytingAlgebra::chain(3).as_category().with_name("chain3"));
    let (big, proj) = inflate(&base, &[2, 1, 2]).unwrap();
    let kinds = [Kind::Terminal, Kind::Products, Kind::Exponentials];
    let mut raw = category_to_raw(&big);
    raw.structure = Some(structures_to_json(&big, &Structures::find(&big, &kinds).unwrap()));
    let src = write_json(dir, "big.json", &serde_json::to_value(raw).unwrap());
    let tgt = write_json(dir, "base.json", &serde_json::to_value(category_to_raw(&base)).unwrap());
    let fun = write_json(dir, "proj.json", &serde_json::to_value(functor_to_raw(&proj)).unwrap());
    (src, tgt, fun, big, proj)
}

#[test]
fn carried_structure_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (src, _, _, _, _) = inflated_chain(dir.path());
    let out = dir.path().join("out.json");
    let r = catkit(&["complete", p(&src), "--carry-structure", "--out", p(&out)], &[]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let bundle: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    revalidates(&bundle["completed"]);
    assert_eq!(bundle["completed"]["objects"].as_array().unwrap().len(), 3);
    assert!(bundle["eta_certs"]["exponentials"].is_array());
    // the emitted category is itself valid input
    let again = write_json(dir.path(), "again.json", &bundle["completed"]);
    assert_eq!(catkit(&["validate", p(&again)], &[]).code, 0);
}

#[test]
fn factor_projection_through_completion() {
    let dir = tempfile::tempdir().unwrap();
    let (src, tgt, fun, _, _) = inflated_chain(dir.path());
    let (code, v) = json_run(&[
        "factor",
        "--source",
        p(&src),
        "--functor",
        p(&fun),
        "--target",
        p(&tgt),
        "--structures",
        "terminal,products,exponentials",
    ]);
    assert_eq!(code, 0, "{v}");
    assert!(v["payload"]["h_certs"]["binproducts"].is_array());
    revalidates(&v["payload"]["completed"]);
}

#[test]
fn factor_rejects_a_functor_that_loses_the_terminal() {
    let dir = tempfile::tempdir().unwrap();
    let (src, tgt, _, big, _) = inflated_chain(dir.path());
    let base = Arc::new(FiniteHeytingAlgebra::chain(3).as_category().with_name("chain3"));
    // everything to the bottom keeps products but not the terminal
    let bottom = base.find_object("0").unwrap();
    let f = Functor::new(
        big.clone(),
        base.clone(),
        vec![bottom; big.object_count()],
        vec![base.id(bottom); big.morphism_count()],
    )
    .unwrap();
    let fun = write_json(dir.path(), "const.json", &serde_json::to_value(functor_to_raw(&f)).unwrap());
    let args = [
        "factor",
        "--source",
        p(&src),
        "--functor",
        p(&fun),
        "--target",
        p(&tgt),
        "--structures",
        "products",
    ];
    assert_eq!(catkit(&args, &[]).code, 0);
    let mut args = args.to_vec();
    args[8] = "terminal,products";
    let r = catkit(&args, &[]);
    assert_eq!(r.code, 1, "{}", r.stdout);
}

#[test]
fn dot_export_clusters_iso_classes() {
    let r = catkit(&["export-dot", fx("walking_iso.json")], &[]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("digraph"));
    assert_eq!(r.stdout.matches("subgraph cluster_").count(), 1);
    assert!(r.stdout.contains("\"a\" -> \"b\""));
    assert!(!r.stdout.contains("id_a"));
}
