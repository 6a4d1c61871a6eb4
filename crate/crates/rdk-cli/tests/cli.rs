use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use rdk_cli::codec::{datum_from_json, datum_to_json, morphism_to_json, triple_to_json};
use rdk_core::catalog::{catalog_str, csp4, gl};
use rdk_core::classify::{isomorphic, ClassTriple};
use rdk_core::morphism::{suzuki_matrix, PMorphism};
use rdk_core::rootdata::RootDatum;
use serde_json::Value;

struct Run {
    code: i32,
    out: String,
    err: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.out).unwrap_or_else(|e| panic!("{e}: {}", self.out))
    }
}

fn rdk(args: &[&str], stdin: &str) -> Run {
    let (mut out, mut err) = (vec![], vec![]);
    let mut argv = vec!["rdk"];
    argv.extend_from_slice(args);
    let code = rdk_cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write_tmp(name: &str, v: &Value) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn sp4_pipeline() {
    let c2 = rdk(&["catalog", "C2", "sc"], "");
    assert_eq!(c2.code, 0, "{}", c2.err);
    let e = rdk(&["embed", "smooth", "--frobenius", "split:q=2"], &c2.out);
    assert_eq!(e.code, 0, "{}", e.err);
    let v = e.json();
    assert_eq!(v["construction"], "literal");
    let r = datum_from_json(&v, "$").unwrap();
    assert!(isomorphic(&r, &csp4().direct_sum(&RootDatum::torus(1)))
        .unwrap()
        .is_some());
    assert!(v["psi"].is_object());
}

#[test]
fn a4_triple_has_two_classes() {
    let sc = catalog_str("A4", "sc").unwrap();
    let t = ClassTriple::new(sc.clone(), 1, sc.root_matrix()).unwrap();
    let run = rdk(&["classify", "--json"], &triple_to_json(&t).to_string());
    assert_eq!(run.code, 0, "{}", run.err);
    let v = run.json();
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    assert_eq!(v["aut_order"], 4);
    let text = rdk(&["classify"], &triple_to_json(&t).to_string());
    assert!(text.out.contains("2 classes"), "{}", text.out);
}

#[test]
fn exit_codes() {
    let garbage = rdk(&["validate"], "{\"rank\": 1, \"roots\": [[1");
    assert_eq!(garbage.code, 2);
    assert!(garbage.err.contains("malformed"));
    let schema = rdk(
        &["validate"],
        r#"{"rank": 1, "roots": [[2]], "coroots": [["x"]]}"#,
    );
    assert_eq!(schema.code, 2);
    assert!(schema.err.contains("$.coroots[0][0]"), "{}", schema.err);
    let bad = rdk(
        &["validate"],
        r#"{"rank": 1, "roots": [[2], [-2]], "coroots": [[2], [-2]]}"#,
    );
    assert_eq!(bad.code, 1, "{}", bad.out);
    assert!(bad.out.starts_with("invalid"));
    assert_eq!(rdk(&["frobnicate"], "").code, 2);
    assert_eq!(rdk(&["--help"], "").code, 0);
    let c2 = rdk(&["catalog", "C2", "sc"], "").out;
    let refused = rdk(
        &[
            "embed",
            "optimal",
            "--frobenius",
            &write_tmp("suzuki.json", &suzuki(1)),
        ],
        &c2,
    );
    assert_eq!(refused.code, 1, "{}", refused.err);
}

fn suzuki(r: u32) -> Value {
    let c2 = catalog_str("C2", "sc").unwrap();
    morphism_to_json(&PMorphism::infer(&suzuki_matrix(r), 2, &c2, &c2, true).unwrap())
}

#[test]
fn budget_is_enforced() {
    let r = catalog_str("A1xA1xA1", "sc").unwrap();
    let t = ClassTriple::new(r.clone(), 1, r.root_matrix());
    assert!(t.is_err(), "three invariant factors need a torus of rank 3");
    let t = ClassTriple::new(r.clone(), 3, r.root_matrix()).unwrap();
    let run = rdk(
        &["classify", "--budget", "10"],
        &triple_to_json(&t).to_string(),
    );
    assert_eq!(run.code, 3, "{}", run.err);

    let path = write_tmp("triple_a1cubed.json", &triple_to_json(&t));
    let status = Command::new(env!("CARGO_BIN_EXE_rdk"))
        .args(["classify", &path])
        .env("RDK_BUDGET", "10")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn steinberg_verdicts() {
    let run = rdk(&["morphism", "steinberg", "--json"], &suzuki(2).to_string());
    assert_eq!(run.code, 0);
    assert_eq!(
        (run.json()["n"].clone(), run.json()["m"].clone()),
        (2.into(), 5.into())
    );
    let frob = rdk(&["morphism", "frobenius"], &suzuki(2).to_string());
    assert_eq!(frob.code, 1);
    let id = morphism_to_json(&PMorphism::identity(&gl(2)));
    let unimodular = morphism_to_json(&PMorphism {
        p: 2,
        ..PMorphism::identity(&gl(2))
    });
    assert_eq!(
        rdk(&["morphism", "steinberg"], &unimodular.to_string()).code,
        1
    );
    let src = write_tmp("gl2.json", &datum_to_json(&gl(2)));
    let ok = rdk(&["morphism", "validate", "--source", &src], &id.to_string());
    assert_eq!(ok.code, 0, "{}", ok.err);
}

#[test]
fn emitted_json_round_trips() {
    let gl3 = rdk(&["catalog", "GL3"], "");
    let dual = rdk(&["dual"], &gl3.out);
    let back = rdk(&["dual"], &dual.out);
    assert_eq!(gl3.json(), back.json());
    assert_eq!(datum_from_json(&gl3.json(), "$").unwrap(), gl(3));

    let m = morphism_to_json(&PMorphism::scalar(
        &gl(3),
        2,
        &num_bigint::BigInt::from(1u64 << 60),
    ));
    let d = rdk(&["morphism", "dualize"], &m.to_string());
    let dd = rdk(&["morphism", "dualize"], &d.out);
    assert_eq!(dd.json(), m);
    assert!(m["f"]["data"][0][0].is_string());

    let rec = rdk(&["recover"], &gl3.out).json();
    assert_eq!(rec["a"], serde_json::json!([3]));
    assert_eq!(rec["triple"]["torus_rank"], 1);
}

#[test]
fn central_product_and_isomorphism() {
    let spec = serde_json::json!({
        "r1": datum_to_json(&catalog_str("A1", "sc").unwrap()),
        "r2": datum_to_json(&RootDatum::torus(1)),
        "a": [2],
        "h1": {"rows": 1, "cols": 1, "data": [[1]]},
        "h2": {"rows": 1, "cols": 1, "data": [[1]]},
    });
    let cp = rdk(&["cproduct"], &spec.to_string());
    assert_eq!(cp.code, 0, "{}", cp.err);
    assert_eq!(cp.json()["index"], 2);
    let a = write_tmp("cp.json", &cp.json());
    let b = write_tmp("gl2b.json", &datum_to_json(&gl(2)));
    assert_eq!(rdk(&["isomorphic", &a, &b], "").code, 0);
    let c = write_tmp(
        "pgl2.json",
        &datum_to_json(&catalog_str("A1", "ad").unwrap()),
    );
    assert_eq!(rdk(&["isomorphic", &a, &c], "").code, 1);
}

#[test]
fn asai_commands() {
    let pgl2 = rdk(&["catalog", "A1", "ad"], "");
    let cover = rdk(&["asai", "cover", "--json"], &pgl2.out);
    assert_eq!(cover.code, 0, "{}", cover.err);
    let v = cover.json();
    assert_eq!(v["certificate"]["derived_simply_connected"], true);
    assert!(v["scope"].as_str().unwrap().contains("root-data level"));

    let a1 = rdk(&["catalog", "A1", "sc"], "").out;
    let base = write_tmp("a1.json", &serde_json::from_str(&a1).unwrap());
    let e = rdk(&["embed", "smooth", "--frobenius", "split:q=3"], &a1);
    let emb = write_tmp("a1_smooth.json", &e.json());
    let c = rdk(
        &[
            "asai",
            "complete",
            &base,
            &emb,
            &emb,
            "--frobenius",
            "split:q=3",
            "--json",
        ],
        "",
    );
    assert_eq!(c.code, 0, "{}", c.err);
    assert_eq!(c.json()["certificate"]["steinberg_commutes"], true);

    let sc = catalog_str("A1", "sc").unwrap();
    let pair = sc.direct_sum(&sc);
    let swap = PMorphism::infer(
        &rdk_core::zlattice::IntMatrix::from_i64(&[&[0, 2], &[2, 0]]),
        2,
        &pair,
        &pair,
        true,
    )
    .unwrap();
    let f = write_tmp("swap.json", &morphism_to_json(&swap));
    let cyc = rdk(
        &["asai", "cyclic", &base, &base, "--frobenius", &f, "--json"],
        "",
    );
    assert_eq!(cyc.code, 0, "{}", cyc.err);
    assert_eq!(cyc.json()["certificate"]["stabilises_block1"], true);
}

#[test]
fn embedding_check_and_twisted_frobenius() {
    let a4 = rdk(&["catalog", "A4", "sc"], "").out;
    let o = rdk(&["embed", "optimal", "--frobenius", "twisted:q=3"], &a4);
    assert_eq!(o.code, 0, "{}", o.err);
    let v = o.json();
    assert_eq!(v["torus_rank"], 1);
    assert_eq!(v["tau_lift"]["data"], serde_json::json!([[-1]]));
    let src = write_tmp("a4_opt.json", &v);
    let tgt = write_tmp("a4.json", &serde_json::from_str(&a4).unwrap());
    let p1 = v["p1"].to_string();
    let check = rdk(
        &[
            "embed", "check", "--source", &src, "--target", &tgt, "--p", "3", "--json",
        ],
        &p1,
    );
    assert_eq!(check.code, 0, "{}", check.err);
    assert_eq!(check.json()["kind"], "smooth");
}

#[test]
fn binary_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rdk"))
        .args(["validate"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let text = serde_json::to_string(&datum_to_json(&gl(2))).unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("valid: GL2"));
}
