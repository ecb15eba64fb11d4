use std::process::{Command, Output};

fn cliffproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffproj"))
        .args(args)
        .env_remove("CLIFFPROJ_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_single_space() {
    let o = cliffproj(&["classify", "--space", "gf(3):diag(1,1)"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "iso.0(d), Table 3");
}

#[test]
fn classify_bundled_suite() {
    let o = cliffproj(&["classify", "paper-suite"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("zero-space-gf3: iso.0(a), Table 1"));
    assert!(out.contains("diagonal-plane-gf2: iso.2(d), no table"));
}

#[test]
fn rescale_on_ad_hoc_space() {
    let o = cliffproj(&["verify", "--rescale", "2", "--space", "gf(3):diag(1,1)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("rescale(2)"));
    assert!(out.contains("1 scenarios, 1 passed, 0 failed"));
}

#[test]
fn records_are_json_lines() {
    let o = cliffproj(&[
        "verify",
        "--space",
        "gf(2):hyperbolic2",
        "--format",
        "records",
        "--jobs",
        "1",
    ]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("valid json"))
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["clause"], "iso.0(b)");
    assert_eq!(lines[1]["summary"]["passed"], true);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--space", "gf(3):diag(1,0)", "--jobs", "2"];
    assert_eq!(stdout(&cliffproj(&args)), stdout(&cliffproj(&args)));
}

#[test]
fn enumerate_sets() {
    let o = cliffproj(&["enumerate", "--space", "gf(3):diag(1)", "--set", "g,po"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("g (2 elements)"), "{out}");
    assert!(out.contains("po (1 elements)"), "{out}");
}

#[test]
fn errors_exit_with_two() {
    let bad_field = cliffproj(&["classify", "--space", "gf(6):diag(1)"]);
    assert_eq!(bad_field.status.code(), Some(2));

    let path = std::env::temp_dir().join(format!("cliffproj-cli-{}.toml", std::process::id()));
    std::fs::write(&path, "[[scenario]]\nid = \"x\"\nspace = \n").unwrap();
    let parse = cliffproj(&["verify", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line 3"));
}

#[test]
fn tiny_budget_fails_the_run() {
    let o = cliffproj(&["verify", "--space", "gf(2):ex2", "--suite", "ortho", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}
