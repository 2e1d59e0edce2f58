use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bhk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhk"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn first_value(o: &Output) -> f64 {
    stdout(o).lines().next().unwrap().trim().parse().unwrap()
}

const QUICK: &str = "\
seed = 3
[truncation]
ladder = 6, 10
identity = 48
[ascent]
restarts = 1
steps = 20
[corpus]
builtin = default
";

fn write_cfg(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn compute_examples() {
    let d = tempfile::tempdir().unwrap();
    let o = bhk(&["compute", "bloch", "--f", "z2"], d.path());
    assert!(o.status.success());
    assert!((first_value(&o) - 0.7698003589).abs() < 1e-9);
    assert!(stdout(&o).contains("degree=2"));

    let o = bhk(&["compute", "tail", "--weight", "standard:1", "--rho", "0"], d.path());
    assert!((first_value(&o) - 4.0 / 3.0).abs() < 1e-12);

    let o = bhk(&["compute", "moment", "--weight", "const", "--x", "1"], d.path());
    assert!((first_value(&o) - 0.5).abs() < 1e-12);
}

#[test]
fn compute_writes_optional_csv() {
    let d = tempfile::tempdir().unwrap();
    let o = bhk(
        &["compute", "doubling", "--weight", "standard:1", "--csv", "tail.csv"],
        d.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next().unwrap(), "upper=true lower=true");
    let text = std::fs::read_to_string(d.path().join("tail.csv")).unwrap();
    assert!(text.starts_with("rho,tail\n"));
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn rank_one_form_norm_from_inline_measure() {
    let d = tempfile::tempdir().unwrap();
    let o = bhk(
        &["compute", "form-norm", "--mu", "atom 0.5 0 1 0", "--trunc", "200"],
        d.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let want = (1.0f64 - 0.25).powi(-2);
    assert!((first_value(&o) - want).abs() < 0.02 * want);
}

#[test]
fn unknown_op_prints_usage() {
    let d = tempfile::tempdir().unwrap();
    let o = bhk(&["compute", "frobnicate"], d.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn identities_suite_writes_artifacts() {
    let d = tempfile::tempdir().unwrap();
    let o = bhk(&["verify", "identities", "--out", "res", "--trunc", "64"], d.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.path().join("res/identities.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "identity,omega,nu,max_rel_error,config_hash,tool_version");
    let v = read_json(&d.path().join("res/identities.json"));
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["tool-version"], env!("CARGO_PKG_VERSION"));
    let hash = v["config-hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(csv.lines().skip(1).all(|l| l.contains(hash)));
    for verdict in v["verdicts"].as_array().unwrap() {
        assert!(verdict["max-rel-error"].as_f64().unwrap() <= 1e-13);
    }
}

#[test]
fn theorem1_band_verdict_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_cfg(d.path(), "quick.cfg", QUICK);
    let run = |out: &str| {
        let o = bhk(
            &[
                "verify", "theorem1", "--config", &cfg, "--p", "4", "--q", "4", "--out", out,
            ],
            d.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(d.path().join(out).join("theorem1.json")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    let verdict = &v["verdicts"][0];
    let keys: Vec<&str> = verdict.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "case",
            "corpus-size",
            "N-ladder",
            "min-ratio",
            "max-ratio",
            "band",
            "limit",
            "verdict"
        ]
    );
    assert_eq!(verdict["case"], "I");
    assert_eq!(verdict["corpus-size"], 8);
    assert!(verdict["min-ratio"].as_f64().unwrap() <= verdict["max-ratio"].as_f64().unwrap());
    assert_eq!(v["seed"], 3);
}

#[test]
fn seed_changes_the_config_hash() {
    let d = tempfile::tempdir().unwrap();
    let hash = |seed: &str, out: &str| {
        let o = bhk(&["verify", "kernel-norms", "--seed", seed, "--out", out], d.path());
        assert!(o.status.success(), "{}", stderr(&o));
        read_json(&d.path().join(out).join("kernel-norms.json"))["config-hash"].clone()
    };
    assert_ne!(hash("1", "x"), hash("2", "y"));
    assert_eq!(hash("1", "x"), hash("1", "z"));
}

#[test]
fn empty_corpus_is_an_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_cfg(d.path(), "empty.cfg", "[corpus]\nbuiltin =\n");
    for suite in ["theorem1", "theorem2", "hankel-measure", "standard-criterion"] {
        let o = bhk(&["verify", suite, "--config", &cfg], d.path());
        assert!(!o.status.success(), "{suite}");
        assert!(stderr(&o).contains("no symbols"), "{suite}: {}", stderr(&o));
    }
}

#[test]
fn config_errors_carry_line_numbers() {
    let d = tempfile::tempdir().unwrap();
    let cases = [
        ("seed = 1\n[exponents]\np = four\n", "line 3"),
        ("seed = 1\nno equals sign\n", "line 2"),
        ("[weights]\n\nomega = standard:x\n", "line 3"),
        ("[exponents]\nr = 2\n", "line 2"),
        ("[corpus]\nfiles = missing.measure\n", "line 2"),
    ];
    for (text, want) in cases {
        let cfg = write_cfg(d.path(), "bad.cfg", text);
        let o = bhk(&["verify", "theorem1", "--config", &cfg], d.path());
        assert!(!o.status.success());
        assert!(stderr(&o).contains(want), "{text:?}: {}", stderr(&o));
    }
}

#[test]
fn corpus_files_and_divergence_expectations() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(
        d.path().join("two.measure"),
        "# two atoms\natom 0.4 0 1 0\natom 0 -0.2 -0.5 0\n",
    )
    .unwrap();
    std::fs::write(d.path().join("dens.measure"), "density weight=const h=1+0.5z\n").unwrap();
    let cfg = write_cfg(
        d.path(),
        "det.cfg",
        "[corpus]\nbuiltin = escaping\nfiles = two.measure, dens.measure\n[grids]\nsup_angles = 16\n",
    );
    let o = bhk(
        &["verify", "hankel-measure", "--config", &cfg, "--out", "det"],
        d.path(),
    );
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let v = read_json(&d.path().join("det/hankel-measure.json"));
    let flags: Vec<bool> = v["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["divergent"].as_bool().unwrap())
        .collect();
    assert_eq!(flags, [true, false, false]);

    // a wrong expectation fails the suite with exit status 1
    let cfg = write_cfg(
        d.path(),
        "det2.cfg",
        "[corpus]\nfiles = two.measure\nexpect_divergent = two.measure\n[grids]\nsup_angles = 16\n",
    );
    let o = bhk(
        &["verify", "hankel-measure", "--config", &cfg, "--out", "det2"],
        d.path(),
    );
    assert_eq!(o.status.code(), Some(1));
}
