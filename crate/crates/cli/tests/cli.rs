use std::path::PathBuf;
use std::process::{Command, Output};

use diffsys::gallery;
use diffsys_cli::dsl::{render_script, Script, Stmt, Directive};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_diffsys"))
}

fn temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("diffsys-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn arbitrary_script(n: usize) -> String {
    let (ctx, s) = gallery::arbitrary_functions_system(n);
    let mut script = Script::from_system(ctx, Some("arbitrary"), s.equations());
    script.statements.push(Stmt::Directive { system: None, directive: Directive::Solve });
    render_script(&script)
}

#[test]
fn unsolvable_system_gives_certificate_and_exit_zero() {
    let p = temp("a3.dsl", &arbitrary_script(3));
    let out = run(&["--format", "json", "run", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["schema"], 1);
    let r = &doc["results"][0];
    assert_eq!(r["verdict"], "unsolvable");
    assert_eq!(r["certificate"]["kind"], "zero-operator");
    assert_eq!(r["certificate"]["operator"], "0");
    assert_eq!(r["certificate"]["rhs"], "3");

    let results = temp("a3.json", &String::from_utf8(out.stdout).unwrap());
    let check = run(&["--format", "json", "certify", results.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(json(&check)["certificates"][0]["valid"], true);
}

#[test]
fn json_output_is_byte_identical() {
    let p = temp("det.dsl", "basis b1 b2; eq delta(b1) f = chi(<b1> + 0); eq delta(b2) f = 1; solve; min_supnorm;");
    let a = run(&["--format", "json", "--window", "2", "run", p.to_str().unwrap()]);
    let b = run(&["--format", "json", "--window", "2", "run", p.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    let g1 = run(&["--format", "json", "--samples", "2000", "gallery", "trig", "--n", "2"]);
    let g2 = run(&["--format", "json", "--samples", "2000", "gallery", "trig", "--n", "2"]);
    assert_eq!(g1.stdout, g2.stdout);
}

#[test]
fn bounded_gallery_reports_lp_values() {
    let out = run(&["--format", "json", "gallery", "bounded", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["results"][0]["verdict"], "pass");
    let claims = doc["results"][0]["report"]["claims"].as_array().unwrap();
    assert!(claims.iter().any(|c| c["evidence"]["value"] == "3/2"));
}

#[test]
fn malformed_script_exits_one_with_location() {
    let p = temp("bad.dsl", "basis b1;\neq delta(b1) f = 1\nsolve;");
    let out = run(&["run", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.dsl:3:1:"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["gallery", "nonexistent"]).status.code(), Some(1));
    let cfg = temp("zero.toml", "window_radius = 0\n");
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "gallery", "succ"]).status.code(), Some(1));
}

#[test]
fn exhausted_budget_exits_two() {
    let p = temp(
        "budget.dsl",
        "basis b1 b2; eq T[b1] + T[0] f = 0; eq T[b2] - T[0] f = 0; eq T[b1 + b2] + T[0] f = 0; solve;",
    );
    let out = run(&["--max-pairs", "1", "solve", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["solve", p.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn flags_override_config_file() {
    let cfg = temp("cfg.toml", "window_radius = 1\nformat = \"json\"\n");
    let p = temp("cfg.dsl", "basis b1; eq delta(b1) f = 1; solve;");
    let out = run(&["--config", cfg.to_str().unwrap(), "solve", p.to_str().unwrap()]);
    assert_eq!(json(&out)["results"][0]["certificate"]["radius"], 1);
    let out = run(&["--config", cfg.to_str().unwrap(), "--window", "3", "solve", p.to_str().unwrap()]);
    assert_eq!(json(&out)["results"][0]["certificate"]["radius"], 3);
}

#[test]
fn subcommands_pick_systems_and_directives() {
    let text = "basis x; system one; eq delta(x) f = 1; system two; eq delta(1) f = poly(0, 2); deduce one with (T[0]) @ 0 bound 1/3;";
    let p = temp("multi.dsl", text);
    let path = p.to_str().unwrap();
    let out = run(&["--format", "json", "poly-solve", path]);
    assert_eq!(json(&out)["results"][0]["function"], "poly(0, -1, 1)");
    let out = run(&["--format", "json", "solve", "--system", "one", path]);
    assert_eq!(json(&out)["results"][0]["system"], "one");
    let out = run(&["--format", "json", "deduce", path]);
    assert_eq!(json(&out)["results"][0]["verdict"], "excluded");
    let out = run(&["--format", "json", "min-supnorm", "--system", "one", "--window", "1", path]);
    assert_eq!(json(&out)["results"][0]["value"], "1");
    assert_eq!(run(&["solve", "--system", "three", path]).status.code(), Some(1));
}

#[test]
fn parse_check_and_normal_form() {
    let p = temp("p.dsl", "basis b1;  eq delta(b1)f=1 ;# trailing\n");
    let out = run(&["parse", "--check", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "ok: 2 statements, 1 systems\n");
    let out = run(&["parse", p.to_str().unwrap()]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "basis b1;\neq T[b1] - T[0] f = 1;\n");
}
