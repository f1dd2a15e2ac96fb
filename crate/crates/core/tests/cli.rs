use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cubic-minima")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn classify_json() {
    let (code, out) = run(&["classify", "1430", "--mclass", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["classification"]["pf_type"], "beta");
    assert_eq!(v["classification"]["pf_norms"][0], 1100);
}

#[test]
fn classify_verify_report() {
    let (code, out) = run(&["classify", "1430", "--verify"]);
    assert_eq!(code, 0);
    assert!(out.contains("period ℓ₀ = 48"), "{out}");
    assert!(out.contains("θ_-17 (norm 239)"), "{out}");
    assert!(out.contains("verification agrees"), "{out}");
}

#[test]
fn justify_csv() {
    let (code, out) = run(&["justify", "1430"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "1430,1.3000,2.4494,✓,4.5812,9.0000,1.1818,2.0000,✓,4.6919,9.0000");
}

#[test]
fn survey_summary() {
    let (code, out) = run(&["survey", "2", "100"]);
    assert_eq!(code, 0);
    assert!(out.contains("α = 19, β = 49, γ = 6"), "{out}");
}

#[test]
fn rejects_cubes() {
    assert_eq!(run(&["classify", "27"]).0, 1);
    assert_eq!(run(&["justify", "12"]).0, 1);
}
