use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn itree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itree")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn execute_reverse() {
    let o = itree(&["execute", "reverse", "--target", "reverse", "--args", "[1,2,3]"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "Terminated after 3 internal steps: xs = [1,2,3], ys = [3,2,1], i = 3\n");

    let o = itree(&["execute", "ring", "--target", "Ring", "--json"]);
    let v = json(&o);
    assert_eq!(v["status"], "menu");
    assert_eq!(v["events"], serde_json::json!(["input.0", "input.1"]));
}

#[test]
fn check_reports_and_exit_codes() {
    let o = itree(&["check", "bounded_buffer", "--const", "MAX_SIZE=2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["allHold"], true);
    let names: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["Init_correct", "Input_correct", "Output_correct", "Size_correct"]);

    let dir = std::env::temp_dir().join(format!("itree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.itm");
    std::fs::write(
        &path,
        "zmachine M\n  state { n : {0..2} }\n  invariant { n < 2 }\n  init { n := 0 }\n  operations {\n    Up update n := n + 1\n  }\n",
    )
    .unwrap();
    let o = itree(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["allHold"], false);
    assert!(v["results"][1]["message"].as_str().unwrap().contains("n = 2"), "{v}");
}

#[test]
fn fd_lists_traces_and_refusals() {
    let o = itree(&["fd", "buffer", "--target", "buffer", "--args", "[]", "--depth", "1"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["traces"].as_array().unwrap().len(), 6);
    assert_eq!(v["divergences"], serde_json::json!([]));
    assert_eq!(v["exhaustive"], false);
}

#[test]
fn parse_prints_canonical_text_and_ast() {
    let o = itree(&["parse", "ring"]);
    assert!(o.status.success());
    let printed = stdout(&o);
    assert!(printed.contains("process Ring ="), "{printed}");
    // The printed form parses back to the same tree.
    let again = itree_dsl::print_model(&itree_dsl::parse_model(&printed).unwrap());
    assert_eq!(again, printed);

    let o = itree(&["parse", "reverse", "--emit-ast"]);
    assert_eq!(json(&o)["items"][0]["name"], "reverse");
}

#[test]
fn models_and_errors() {
    let o = itree(&["models"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("bounded_buffer")));

    let o = itree(&["execute", "no_such_model", "--target", "X"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let o = itree(&["execute", "reverse", "--target", "reverse", "--const", "oops"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn session_over_pipes() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_itree"))
        .arg("session")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"cmd\":\"start\",\"model\":\"buffer\",\"target\":\"buffer\",\"args\":[\"[2]\"]}\n{\"cmd\":\"choose\",\"event\":\"Output.2\"}\n{\"cmd\":\"quit\"}\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1]["trace"], serde_json::json!(["Output.2"]));
}

#[test]
fn animate_reads_commands_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_itree"))
        .args(["animate", "buffer", "--target", "buffer", "--args", "[]"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"1\nt\nq\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("Trace: Input.0"));
}
