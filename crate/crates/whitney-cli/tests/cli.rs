//! End-to-end checks of the command-line contract: exit codes, report
//! contents, and byte-identical manifest round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_whitney"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn whitney")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("whitney-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

const FAMILY: &str = r#"{
  "group": { "class": "cyclic", "generators": ["t"] },
  "double_points": [
    { "id": "p+", "sign": 1, "g": "t^3" },
    { "id": "p-", "sign": -1, "g": "t^3" }
  ],
  "disks": [
    {
      "id": "W", "positive": "p+", "negative": "p-", "g": "t^3",
      "framing": 0,
      "interior": [ { "sign": 1, "h": "t^4" }, { "sign": 1, "h": "t^4" } ]
    }
  ],
  "crossings": [],
  "pi2": [],
  "unframed": false
}
"#;

#[test]
fn example_family_report() {
    let out = run(&["examples", "paper4", "--l", "2", "--m", "4", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("2*(t^3,t^4)"), "{text}");
    assert!(text.contains("NONZERO (definitive)"), "{text}");
    assert!(text.contains("enumeration horizon"), "{text}");
}

#[test]
fn tau_and_mu_success() {
    let manifest = write_temp("fam.json", FAMILY);
    let path = manifest.to_str().unwrap();
    let out = run(&["tau", path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("raw invariant: 2*(t^3,t^4)"));
    let out = run(&["mu", path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("mu: 0"));
    let out = run(&["tau", path, "--json-out"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["raw"], "2*(t^3,t^4)");
    assert_eq!(v["certified_zero"], false);
}

#[test]
fn manifest_round_trip_is_byte_identical() {
    // emit -> parse -> emit must be byte-identical
    let manifest = write_temp("roundtrip.json", FAMILY);
    let script = write_temp("empty.txt", "# no steps\n");
    let out = run(&["move", manifest.to_str().unwrap(), script.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let first = text[text.find('{').unwrap()..].to_string();
    let reparsed = write_temp("roundtrip2.json", &first);
    let out = run(&["move", reparsed.to_str().unwrap(), script.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let second = &text[text.find('{').unwrap()..];
    assert_eq!(second, first);
}

#[test]
fn orbit_report() {
    let out = run(&["orbit", "(a,b)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("orbit size: 6"), "{text}");
    assert!(text.contains("torsion2: false"), "{text}");
}

#[test]
fn validation_failures_exit_one() {
    // malformed JSON
    let bad = write_temp("bad.json", "{ not json");
    let out = run(&["tau", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    // framed diagram with a twisted disk
    let twisted = write_temp("twisted.json", &FAMILY.replace("\"framing\": 0", "\"framing\": 1"));
    let out = run(&["tau", twisted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    // missing file
    let out = run(&["tau", "/nonexistent/diagram.json"]);
    assert_eq!(out.status.code(), Some(1));
    // failing move precondition
    let manifest = write_temp("pre.json", FAMILY);
    let script = write_temp("badmove.txt", "move cancel W t^9\n");
    let out = run(&["move", manifest.to_str().unwrap(), script.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_sixtyfour() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["tau", "x.json", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn multi_sphere_commands() {
    let multi = r#"{
  "group": { "class": "free", "generators": ["a", "b"] },
  "n": 3,
  "double_points": [
    { "id": "q+", "spheres": [1, 2], "sign": 1 },
    { "id": "q-", "spheres": [1, 2], "sign": -1 }
  ],
  "disks": [
    {
      "id": "V", "spheres": [1, 2], "positive": "q+", "negative": "q-",
      "g_plus": "a", "g_minus": "b", "framing": 0,
      "interior": [ { "sign": 1, "sheet": 3, "h": "a*b" } ]
    }
  ],
  "pi2": [],
  "normal_bundle_trivial": [false, false, false]
}
"#;
    let manifest = write_temp("multi.json", multi);
    let path = manifest.to_str().unwrap();
    let out = run(&["triple", path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // the diagonal-coset representative of (a, b, a*b)
    assert!(stdout(&out).contains("(a*b^-1*a^-1,a^-1,1)_(1,2,3)"), "{}", stdout(&out));
    let out = run(&["tau-n", path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("spheres: 3"));
}

#[test]
fn reduce_command() {
    let elem = write_temp(
        "elem.json",
        r#"{"group": {"class": "cyclic", "generators": ["t"]}, "element": "(t,t^2)"}"#,
    );
    let pi2 = write_temp(
        "pi2.json",
        r#"[{"name": "A", "kind": "sphere", "lambda": ["t^2"], "omega2": 0}]"#,
    );
    let out = run(&["reduce", elem.to_str().unwrap(), pi2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("status: ZERO (certified)"), "{text}");
}
