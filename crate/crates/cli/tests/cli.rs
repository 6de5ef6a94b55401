use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use parabolic_cli::{ProblemFile, ReduceSummary, Report};
use parabolic_core::pfaff::read_table;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn parabolic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parabolic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn machine_check(path: &Path, extra: &[&str]) -> (i32, Report) {
    let p = path.to_str().unwrap();
    let mut args = vec!["check", "--input", p, "--format", "machine"];
    args.extend_from_slice(extra);
    let out = parabolic(&args);
    let report = Report::from_json(&stdout(&out)).expect("machine report parses");
    (code(&out), report)
}

#[test]
fn identity_is_reducible_with_zero_theta() {
    let (c, report) = machine_check(&fixture("identity.toml"), &[]);
    assert_eq!(c, 0);
    assert_eq!(report.status, "Reducible");
    assert_eq!(report.theta.len(), 6);
    assert!(report.theta.iter().all(|t| t.expr == "0"));
    let human = stdout(&parabolic(&["check", "-i", fixture("identity.toml").to_str().unwrap()]));
    assert!(human.contains("status: Reducible") && human.contains("(all zero)"), "{human}");
}

#[test]
fn curved_connection_is_not_reducible() {
    let (c, report) = machine_check(&fixture("curved.toml"), &[]);
    assert_eq!(c, 1);
    assert_eq!(report.status, "NotReducible");
    let first = &report.curvature_witnesses[0];
    assert_eq!(first.index, [1, 1, 2, 2]);
    assert_ne!(first.value.as_deref(), Some("0"));
}

#[test]
fn opposite_eigenvalues_are_degenerate() {
    let (c, report) = machine_check(&fixture("degenerate.toml"), &[]);
    assert_eq!(c, 2);
    let w = report.gate.witness.as_ref().unwrap();
    assert_eq!((w.kind.as_str(), w.value.as_str()), ("trace", "0"));
    assert_eq!(report.gate.resultant_value, "0");
    assert!(report.theta.is_empty());
}

#[test]
fn machine_report_round_trips_and_is_deterministic() {
    let (_, a) = machine_check(&fixture("diffusion.toml"), &[]);
    let (_, b) = machine_check(&fixture("diffusion.toml"), &[]);
    assert_eq!(a, b);
    assert_eq!(Report::from_json(&a.to_json()).unwrap(), a);
}

#[test]
fn routes_agree() {
    let (_, solve) = machine_check(&fixture("diffusion.toml"), &["--d-route", "solve"]);
    let (_, both) = machine_check(&fixture("diffusion.toml"), &["--d-route", "both"]);
    let (c, cayley) = machine_check(&fixture("diffusion.toml"), &["--d-route", "cayley"]);
    assert_eq!(c, 0);
    assert_eq!(solve.theta, cayley.theta);
    assert_eq!(solve.theta, both.theta);
}

#[test]
fn base_flag_overrides_the_file() {
    let (c, report) = machine_check(&fixture("diffusion.toml"), &["--base", "1,-0.5"]);
    assert_eq!(c, 0);
    assert_eq!(report.base_point, vec!["1", "-1/2"]);
    // u = -2 is a pole of A⁻¹ and of Γ
    let out = parabolic(&["check", "-i", fixture("diffusion.toml").to_str().unwrap(), "--base", "-2,0"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(code(&parabolic(&[])), 3);
    assert_eq!(code(&parabolic(&["check", "--format", "xml", "-i", "x"])), 3);
    let missing = parabolic(&["check", "-i", "/nonexistent/problem.toml"]);
    assert_eq!(code(&missing), 4);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[dimension]\nn = 1\n\n[A]\n\"1 1\" = \"y1 +\"\n\n[point]\nbase = [1]\n").unwrap();
    let out = parabolic(&["check", "-i", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("[A] \"1 1\" at line 5"), "{msg}");
}

#[test]
fn reduce_scalar_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("w.tsv");
    let out = parabolic(&[
        "reduce",
        "-i",
        fixture("scalar.toml").to_str().unwrap(),
        "-o",
        table.to_str().unwrap(),
        "--format",
        "machine",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: ReduceSummary = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary.points, 17);
    assert!(summary.diffusion_residual < 1e-10);
    let (header, rows) = read_table(std::io::BufReader::new(std::fs::File::open(&table).unwrap())).unwrap();
    assert_eq!(header, vec!["u", "ytilde1", "T1_1"]);
    for row in rows {
        let u = row[0];
        assert!((row[1] - (u * u - 1.0) / 2.0).abs() < 1e-8);
        assert!((row[2] - u).abs() < 1e-8);
    }
}

#[test]
fn reduce_zero_theta_is_shift() {
    let out = parabolic(&["reduce", "-i", fixture("identity.toml").to_str().unwrap(), "--grid=-1:1:3,0:1:2"]);
    assert_eq!(code(&out), 0);
    let (_, rows) = read_table(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert_eq!(&row[2..4], &row[0..2]);
    }
}

#[test]
fn reduce_refuses_unless_reducible() {
    assert_eq!(code(&parabolic(&["reduce", "-i", fixture("curved.toml").to_str().unwrap()])), 1);
    assert_eq!(code(&parabolic(&["reduce", "-i", fixture("degenerate.toml").to_str().unwrap()])), 2);
}

#[test]
fn reduce_is_deterministic_with_seed() {
    let input = fixture("diffusion.toml");
    let args = ["reduce", "-i", input.to_str().unwrap(), "--seed", "7"];
    let a = parabolic(&args);
    let b = parabolic(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn transform_then_check_then_reduce() {
    let dir = tempfile::tempdir().unwrap();
    let pulled = dir.path().join("pulled.toml");
    // treat diffusion.toml as living in (p, q) and pull it back to (u, v)
    let src = std::fs::read_to_string(fixture("diffusion.toml")).unwrap().replace("\"u\", \"v\"", "\"p\", \"q\"");
    let in_target = dir.path().join("target.toml");
    std::fs::write(&in_target, src.replace('u', "p").replace('v', "q").replace("qariables", "variables")).unwrap();
    let out = parabolic(&[
        "transform",
        "-i",
        in_target.to_str().unwrap(),
        "-t",
        fixture("quadratic.transform.toml").to_str().unwrap(),
        "--pullback",
        "-o",
        pulled.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let problem = ProblemFile::parse(&std::fs::read_to_string(&pulled).unwrap()).unwrap();
    assert_eq!(problem.vars.names(), &["u".to_string(), "v".to_string()]);
    // the pulled-back system is not in diffusion form but is reducible
    assert!(!problem.gamma.is_zero());
    let (c, report) = machine_check(&pulled, &[]);
    assert_eq!(c, 0);
    assert!(report.theta.iter().any(|t| t.expr != "0"));
    let out = parabolic(&["reduce", "-i", pulled.to_str().unwrap(), "--format", "machine", "-o", dir.path().join("t.tsv").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let summary: ReduceSummary = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(summary.diffusion_residual < 1e-6, "{}", summary.diffusion_residual);

    // and pushing it forward again recovers the original
    let pushed = dir.path().join("pushed.toml");
    let out = parabolic(&[
        "transform",
        "-i",
        pulled.to_str().unwrap(),
        "-t",
        fixture("quadratic.transform.toml").to_str().unwrap(),
        "-o",
        pushed.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let back = ProblemFile::parse(&std::fs::read_to_string(&pushed).unwrap()).unwrap();
    let original = ProblemFile::parse(&std::fs::read_to_string(&in_target).unwrap()).unwrap();
    assert_eq!(back.a, original.a);
    assert_eq!(back.gamma, original.gamma);
    assert_eq!(back.base, original.base);
}

#[test]
fn identity_transform_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("id.toml");
    std::fs::write(&t, "forward = [\"u\", \"v\"]\n").unwrap();
    let out = parabolic(&["transform", "-i", fixture("diffusion.toml").to_str().unwrap(), "-t", t.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let original = ProblemFile::parse(&std::fs::read_to_string(fixture("diffusion.toml")).unwrap()).unwrap();
    assert_eq!(ProblemFile::parse(&stdout(&out)).unwrap(), original);
}

#[test]
fn linear_transform_conjugates_constant_a() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("lin.toml");
    std::fs::write(&t, "forward = [\"y1 + y2\", \"y2\"]\n").unwrap();
    let p = dir.path().join("p.toml");
    std::fs::write(&p, "[dimension]\nn = 2\n[A]\n\"1 1\" = \"1\"\n\"2 2\" = \"2\"\n[point]\nbase = [0, 0]\n").unwrap();
    let out = parabolic(&["transform", "-i", p.to_str().unwrap(), "-t", t.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let q = ProblemFile::parse(&stdout(&out)).unwrap();
    // T A S with T = [[1,1],[0,1]]
    assert_eq!(q.a.get(0, 1).to_string(), "1");
    assert_eq!(q.a.get(1, 1).to_string(), "2");
    assert!(q.gamma.is_zero());
}

#[test]
fn nonlinear_transform_without_inverse_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.toml");
    std::fs::write(&t, "forward = [\"u + v^2\", \"v\"]\n").unwrap();
    let out = parabolic(&["transform", "-i", fixture("diffusion.toml").to_str().unwrap(), "-t", t.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}
