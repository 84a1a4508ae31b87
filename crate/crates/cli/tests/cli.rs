use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::sync::Arc;

use posetrep::derivation::derive_poset;
use posetrep::rep::rho;
use posetrep::{DimensionVector, ExactMatrix, Fp, MatrixRep, Poset, Rationals};
use posetrep_cli::codec::{
    decode_derived, decode_dimension, decode_poset, decode_rep, decode_rep_over, encode_derived,
    encode_dimension, encode_poset, encode_rep, AnyRep, JsonField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_posetrep"))
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = bin();
    c.args(args).env_remove("POSETREP_BUDGET");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn random_rep<F: JsonField>(rng: &mut ChaCha8Rng, p: &Arc<Poset>, f: &F) -> MatrixRep<F> {
    let d0 = rng.gen_range(0..=3);
    let blocks = (0..p.len())
        .map(|_| {
            let w = rng.gen_range(0..=2);
            let data = (0..d0 * w)
                .map(|_| f.from_i64(rng.gen_range(-2..=2)))
                .collect();
            ExactMatrix::new(f.clone(), d0, w, data).unwrap()
        })
        .collect();
    MatrixRep::new(p.clone(), f.clone(), d0, blocks).unwrap()
}

#[test]
fn check_finite_type_reports_the_four_lines_witness() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "p.json",
        &json!({"elements": ["a", "b", "c", "d"], "relations": []}),
    );
    let d = write(
        &dir,
        "d.json",
        &json!({"0": 2, "a": 1, "b": 1, "c": 1, "d": 1}),
    );
    let o = run(
        &[
            "check-finite-type",
            "--poset",
            path(&p),
            "--dim",
            path(&d),
            "--scan",
        ],
        &[],
    );
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["finite_type"], json!(false));
    assert_eq!(v["weakly_positive"], json!(false));
    assert_eq!(v["q_value"], json!(0));
    assert_eq!(v["witness"]["kind"], json!("A4"));
    assert_eq!(
        v["witness"]["embedding"],
        json!({"p1": "a", "p2": "b", "p3": "c", "p4": "d"})
    );
}

#[test]
fn tits_on_the_added_point() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "chain3.json",
        &json!({"elements": ["x", "y", "z"], "relations": [["x", "y"], ["y", "z"]]}),
    );
    let d = write(&dir, "d.json", &json!({"0": 1}));
    let o = run(&["tits", "--poset", path(&p), "--dim", path(&d)], &[]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "{\"value\":1}\n");
}

#[test]
fn verify_three_lines_passes() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "a3.json",
        &json!({"elements": ["x", "y", "z"], "relations": []}),
    );
    let out = dir.path().join("report.json");
    let o = run(
        &[
            "verify",
            "--poset",
            path(&p),
            "--max-total",
            "6",
            "--fields",
            "2,3",
            "--out",
            path(&out),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rows = report.as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        assert_eq!(r["failures"], json!([]));
        assert_eq!(r["passed"], json!(true));
    }
    let lines = rows
        .iter()
        .find(|r| r["dimension"] == json!({"0": 2, "x": 1, "y": 1, "z": 1}))
        .unwrap();
    assert_eq!(lines["indecomposable_counts"], json!({"2": 1, "3": 1}));
    assert_eq!(lines["iso_class_counts"], json!({"2": 5, "3": 5}));
    assert_eq!(lines["end_dim"], json!(1));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "a3.json",
        &json!({"elements": ["x", "y", "z"], "relations": []}),
    );
    let unknown = write(&dir, "bad.json", &json!({"0": 1, "w": 1}));
    let o = run(&["tits", "--poset", path(&p), "--dim", path(&unknown)], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown element `w`"));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"0\": ").unwrap();
    assert_eq!(
        run(&["tits", "--poset", path(&p), "--dim", path(&garbage)], &[])
            .status
            .code(),
        Some(2)
    );

    let d = write(&dir, "d.json", &json!({"0": 3, "x": 2, "y": 2, "z": 2}));
    let args = [
        "brute-count",
        "--poset",
        path(&p),
        "--dim",
        path(&d),
        "--field",
        "6",
    ];
    assert_eq!(run(&args, &[]).status.code(), Some(2));
    let args = [
        "brute-count",
        "--poset",
        path(&p),
        "--dim",
        path(&d),
        "--field",
        "Q",
    ];
    assert_eq!(run(&args, &[]).status.code(), Some(2));

    let args = ["brute-count", "--poset", path(&p), "--dim", path(&d)];
    let o = run(&args, &[("POSETREP_BUDGET", "1000")]);
    assert_eq!(o.status.code(), Some(3));
    let mut with_flag = args.to_vec();
    with_flag.extend(["--budget", "1000"]);
    assert_eq!(run(&with_flag, &[]).status.code(), Some(3));

    let cyclic = write(
        &dir,
        "cyc.json",
        &json!({"elements": ["x", "y"], "relations": [["x", "y"], ["y", "x"]]}),
    );
    assert_eq!(
        run(&["criticals", "--poset", path(&cyclic)], &[])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn stdin_input() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "a3.json",
        &json!({"elements": ["x", "y", "z"], "relations": []}),
    );
    let mut child = bin()
        .args(["tits", "--poset", path(&p), "--dim", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"0\": 2, \"x\": 1, \"y\": 1, \"z\": 1}")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout_json(&o), json!({"value": 1}));
}

#[test]
fn poset_and_dimension_json_round_trip() {
    for n in 0..=4 {
        for p in Poset::enumerate_all(n) {
            let v = encode_poset(&p);
            let text = v.to_string();
            let back = decode_poset(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, p);
            assert_eq!(encode_poset(&back).to_string(), text);
            let d = DimensionVector::new(n % 3, (0..n).map(|i| i % 3).collect());
            let dv = encode_dimension(&p, &d);
            assert_eq!(decode_dimension(&p, &dv).unwrap(), d);
        }
    }
    let k = Poset::kleiner_k();
    assert_eq!(decode_poset(&encode_poset(&k)).unwrap(), k);
}

#[test]
fn representation_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let posets: Vec<Arc<Poset>> = (1..=4)
        .flat_map(Poset::enumerate_all)
        .map(Arc::new)
        .collect();
    for _ in 0..300 {
        let p = &posets[rng.gen_range(0..posets.len())];
        let u = random_rep(&mut rng, p, &Fp::new(5).unwrap());
        let text = encode_rep(&u).to_string();
        let back = decode_rep(p, &serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, AnyRep::Prime(u));
        assert_eq!(back.to_json().to_string(), text);

        let q = random_rep(&mut rng, p, &Rationals);
        let q = MatrixRep::from_full(
            p.clone(),
            &q.full_matrix()
                .scale(&num::BigRational::new(2.into(), 3.into())),
            &q.widths(),
        )
        .unwrap();
        let text = encode_rep(&q).to_string();
        assert_eq!(
            decode_rep_over(p, &Rationals, &serde_json::from_str(&text).unwrap()).unwrap(),
            q
        );
    }
}

#[test]
fn derived_json_round_trip_and_validation() {
    for n in 1..=4 {
        for p in Poset::enumerate_all(n) {
            let p = Arc::new(p);
            for a in p.maximal_elements() {
                let ctx = derive_poset(p.clone(), a).unwrap();
                let v = encode_derived(&ctx);
                assert_eq!(decode_derived(&v).unwrap(), ctx);
            }
        }
    }
    let ctx = derive_poset(Arc::new(Poset::antichain(3)), 2).unwrap();
    let mut v = encode_derived(&ctx);
    v["pairs"] = json!([]);
    assert!(decode_derived(&v).is_err());
    let mut v = encode_derived(&ctx);
    v["result"] = json!({"elements": ["x"], "relations": []});
    assert!(decode_derived(&v).is_err());
}

/// Deriving, integrating and differentiating through files gives the same
/// bytes as the in-memory calls.
#[test]
fn derive_and_integrate_through_files() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let f = Fp::new(3).unwrap();
    let dir = TempDir::new().unwrap();
    for n in 2..=4 {
        for base in Poset::enumerate_all(n) {
            let base = Arc::new(base);
            let poset_file = write(&dir, "p.json", &encode_poset(&base));
            for a in base.maximal_elements() {
                let label = base.label(a).to_string();
                let o = run(
                    &["derive", "--poset", path(&poset_file), "--pivot", &label],
                    &[],
                );
                assert!(o.status.success());
                let ctx = derive_poset(base.clone(), a).unwrap();
                assert_eq!(
                    String::from_utf8(o.stdout.clone()).unwrap(),
                    format!("{}\n", encode_derived(&ctx))
                );
                let der_file = dir.path().join("der.json");
                std::fs::write(&der_file, &o.stdout).unwrap();

                let v = random_rep(&mut rng, ctx.result(), &f);
                let v_file = write(&dir, "v.json", &encode_rep(&v));
                let u = ctx.integrate(&v).unwrap();
                let o = run(
                    &[
                        "integrate",
                        "--derived",
                        path(&der_file),
                        "--rep",
                        path(&v_file),
                    ],
                    &[],
                );
                assert!(o.status.success());
                assert_eq!(
                    String::from_utf8(o.stdout.clone()).unwrap(),
                    format!("{}\n", encode_rep(&u))
                );

                let u_file = dir.path().join("u.json");
                std::fs::write(&u_file, &o.stdout).unwrap();
                let o = run(
                    &[
                        "differentiate",
                        "--derived",
                        path(&der_file),
                        "--rep",
                        path(&u_file),
                    ],
                    &[],
                );
                assert!(o.status.success());
                let back = ctx
                    .differentiate(&rho(&u), Default::default())
                    .unwrap()
                    .lift();
                assert_eq!(
                    String::from_utf8(o.stdout).unwrap(),
                    format!("{}\n", encode_rep(&back))
                );
            }
        }
    }
}

#[test]
fn construct_brute_count_and_decompose() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "a3.json",
        &json!({"elements": ["x", "y", "z"], "relations": []}),
    );
    let d = write(&dir, "d.json", &json!({"0": 2, "x": 1, "y": 1, "z": 1}));
    let o = run(&["construct", "--poset", path(&p), "--dim", path(&d)], &[]);
    let v = stdout_json(&o);
    assert_eq!(v["used_fallback"], json!(false));
    assert_eq!(v["indecomposable"]["field"], json!("Q"));

    let o = run(
        &[
            "brute-count",
            "--poset",
            path(&p),
            "--dim",
            path(&d),
            "--field",
            "3",
        ],
        &[],
    );
    let v = stdout_json(&o);
    assert_eq!(
        (v["iso_classes"].clone(), v["indecomposable_count"].clone()),
        (json!(5), json!(1))
    );

    let lines = json!({"field": {"p": 2}, "d0": 2, "blocks": {"x": [[1, 0], [0, 0]], "y": [[0], [1]], "z": [[1], [1]]}});
    let u = write(&dir, "u.json", &lines);
    let o = run(&["decompose", "--poset", path(&p), "--rep", path(&u)], &[]);
    let v = stdout_json(&o);
    assert_eq!(v["trivial"], json!({"x": 1}));
    assert_eq!(v["summands"].as_array().unwrap().len(), 1);

    let big = write(&dir, "big.json", &json!({"0": 3, "x": 1, "y": 1, "z": 1}));
    let o = run(
        &[
            "construct",
            "--poset",
            path(&p),
            "--dim",
            path(&big),
            "--field",
            "2",
        ],
        &[],
    );
    assert_eq!(stdout_json(&o), json!({"used_fallback": false}));
}
