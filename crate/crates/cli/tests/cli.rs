use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pochette(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pochette"))
        .args(args)
        .env_remove("POCHETTE_MAX_COSETS")
        .env_remove("POCHETTE_TIETZE_STEPS")
        .env_remove("POCHETTE_MAX_DEGREE")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = pochette(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&full)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

/// Splits an echoed command line, honouring single quotes.
fn shell_split(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut pending = false;
    for ch in line.chars() {
        match ch {
            '\'' => {
                quoted = !quoted;
                pending = true;
            }
            ' ' if !quoted => {
                if pending {
                    out.push(std::mem::take(&mut cur));
                    pending = false;
                }
            }
            c => {
                cur.push(c);
                pending = true;
            }
        }
    }
    if pending {
        out.push(cur);
    }
    out
}

fn leaf_keys(v: &Value, prefix: &str, out: &mut BTreeSet<String>) {
    match v {
        Value::Object(m) => {
            for (k, val) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                leaf_keys(val, &key, out);
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            if let Some(Value::Object(first)) = items.first() {
                out.insert(prefix.to_string());
                out.extend(first.keys().map(|k| format!("{prefix}[].{k}")));
            }
        }
        _ => {
            out.insert(prefix.to_string());
        }
    }
}

#[test]
fn cword_examples() {
    assert!(stdout(&["cword", "1", "0"]).contains("word: m\n"));
    assert!(stdout(&["cword", "2", "1"]).contains("word: m l m\n"));
    assert!(stdout(&["cword", "3", "4"]).contains("word: l m l m l^2 m\n"));
    assert!(stdout(&["cword", "-2", "1"]).contains("word: l^-1 m^2\n"));
    assert_eq!(pochette(&["cword", "2", "4"]).status.code(), Some(2));
}

#[test]
fn surger_spun_trefoil() {
    let v = json(&["surger", "spun-trefoil", "--slope", "1/2"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"]["name"], "HomeoS4Certified");
    assert_eq!(v["linking"], -1);
    assert_eq!(v["homology"]["H1"], "0");
    assert_eq!(v["pi1"]["relators"], serde_json::json!(["y x^-1 y x y^-1 x", "y^2 x"]));
}

#[test]
fn surger_zero_twist_is_not_a_sphere() {
    let v = json(&["surger", "spun-trefoil", "--slope", "1/1", "--framing", "1"]);
    assert_eq!(v["p_plus_q_ell"], 0);
    assert_eq!(v["verdict"]["name"], "NotHomotopySphere");
    assert_eq!(v["verdict"]["H2"], "Z^2");
    assert_eq!(v["framing"], 1);
    assert_eq!(v["pi1_abelianization"], "Z");
}

#[test]
fn text_and_json_carry_the_same_fields() {
    for args in [
        vec!["surger", "spun-trefoil", "--slope", "1/2"],
        vec!["surger", "spun-trefoil", "--slope", "3"],
        vec!["sweep", "spun-trefoil", "--p-range", "1..3", "--q-range", "-2..2"],
        vec!["cordcheck", "spun-trefoil", "--cord", "y"],
        vec!["abelianize", "spun-trefoil"],
        vec!["simplify", "spun-trefoil"],
        vec!["enumerate", "spun-trefoil", "--max-cosets", "50"],
    ] {
        let v = json(&args);
        let text = stdout(&args);
        let mut keys = BTreeSet::new();
        leaf_keys(&v, "", &mut keys);
        for key in keys {
            let (table, column) = match key.split_once("[].") {
                Some((t, c)) => (format!("{t}:\n"), Some(c.to_string())),
                None => (format!("{key}:"), None),
            };
            assert!(text.contains(&table), "{args:?}: `{key}` missing from text\n{text}");
            if let Some(c) = column {
                assert!(text.contains(&c), "{args:?}: column `{c}` missing");
            }
        }
    }
}

#[test]
fn echoed_command_reproduces_the_report() {
    for args in [
        vec!["surger", "spun-trefoil", "--slope", "1/2"],
        vec!["sweep", "one-fusion:x^-1*y:1", "--slopes", "1/2,2/3", "--jobs", "2"],
        vec!["cordcheck", "spun-trefoil", "--cord", "y x"],
        vec!["cword", "3", "-4"],
    ] {
        let first = stdout(&args);
        let command = first.lines().find_map(|l| l.strip_prefix("command: ")).unwrap();
        let argv = shell_split(command);
        assert_eq!(argv[0], "pochette");
        let argv: Vec<&str> = argv[1..].iter().map(String::as_str).collect();
        assert_eq!(stdout(&argv), first, "{command}");
    }
}

#[test]
fn sweep_output_is_independent_of_jobs() {
    let base = ["sweep", "spun-trefoil", "--p-range", "0..6", "--q-range", "-6..6"];
    let one = stdout(&[&base[..], &["--jobs", "1"]].concat());
    let four = stdout(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one, four);
}

#[test]
fn sweep_one_fusion_family_is_all_spheres() {
    let v = json(&["sweep", "one-fusion:x^-1*y:1", "--slopes", "1/2,2/3,3/4,4/5,5/6,6/7"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["verdict"] == "HomeoS4Certified"), "{rows:?}");
}

#[test]
fn sweep_null_homologous_longitude() {
    let v = json(&["sweep", "spun-trefoil", "--longitude", "1", "--p-range", "2..5", "--q-range", "1"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["verdict"] == "NotHomotopySphere"));
    let empty = stdout(&["sweep", "spun-trefoil", "--p-range", "2", "--q-range", "4"]);
    assert!(empty.contains("rows: (none)\n"), "{empty}");
}

#[test]
fn free_group_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "free.pres", "gens: x, y\nrels:\n");
    let out = pochette(&["surger", &f, "--longitude", "y", "--slope", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not Z"));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.pres", "gens: x\n# note\nrels: x^5 q\n");
    let out = pochette(&["abelianize", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    let out = pochette(&["abelianize", "no-such-thing"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_verdict_still_exits_zero() {
    let v = json(&["surger", "one-fusion:x*y*x^-1*y^-1*x:1", "--slope", "3/4", "--max-cosets", "3"]);
    assert_eq!(v["verdict"]["name"], "Unknown");
    assert_eq!(v["enumeration"].as_array().unwrap().len(), 2);
}

#[test]
fn budgets_come_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_pochette"))
        .args(["surger", "spun-trefoil", "--slope", "1/2"])
        .env("POCHETTE_MAX_COSETS", "77")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("--max-cosets 77 "));
    assert_eq!(pochette(&["surger", "spun-trefoil", "--slope", "1/2", "--max-degree", "9"]).status.code(), Some(2));
}

#[test]
fn thin_wrappers() {
    assert!(stdout(&["abelianize", "spun-trefoil"]).contains("abelianization: Z\n"));
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c5.pres", "gens: x\nrels: x^5\n");
    let v = json(&["enumerate", &f]);
    assert_eq!(v["index"], 5);
    assert_eq!(v["status"], "completed");
    let v = json(&["cordcheck", "spun-trefoil", "--cord", "y"]);
    assert_eq!(v["verdict"]["name"], "NontrivialCordCertified");
    assert_eq!(v["verdict"]["degree"], 3);
    let v = json(&["cordcheck", "spun-trefoil", "--cord", "x^4"]);
    assert_eq!(v["verdict"]["name"], "TrivialCordClass");
    let v = json(&["simplify", "spun-trefoil"]);
    assert!(v["simplified_length"].as_u64() <= v["input_length"].as_u64());
}

#[test]
fn generated_fusion_files_round_trip() {
    let text = stdout(&["gen-fusion", "--n", "3", "--seed", "9"]);
    assert_eq!(text, stdout(&["gen-fusion", "--n", "3", "--seed", "9"]));
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "k.fusion", &text);
    assert!(stdout(&["abelianize", &f]).contains("abelianization: Z\n"));
    let v = json(&["surger", &f, "--longitude", "x2", "--slope", "2/1"]);
    assert_eq!(v["input"]["kind"], "fusion");
    assert_eq!(v["linking"], 1);
    assert_eq!(v["verdict"]["name"], "NotHomotopySphere");
}
