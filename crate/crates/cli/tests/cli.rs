use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpd")).args(args).output().expect("run cpd")
}

fn scenes() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn copy_scene(dir: &Path, name: &str) -> PathBuf {
    let dst = dir.join(name);
    std::fs::copy(scenes().join(name), &dst).unwrap();
    dst
}

#[test]
fn generate_writes_mesh_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let scene = copy_scene(dir.path(), "catenoid.scene");
    let out = cpd(&["generate", scene.to_str().unwrap(), "--grid", "51"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let obj = std::fs::read_to_string(dir.path().join("catenoid.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 2601);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 5000);
    let tsv = std::fs::read_to_string(dir.path().join("catenoid.tsv")).unwrap();
    assert!(tsv.contains("name\tmax\tmean\tworst_u\tworst_v\ttol\tpass"));
}

#[test]
fn verify_prints_the_report_when_no_path_is_given() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("p.scene");
    std::fs::write(&scene, "[construction.graph]\nF = \"0\"\ndomain = [[-1, 1], [-1, 1]]\n\n[[checks]]\nname = \"mean_curvature\"\n").unwrap();
    let out = cpd(&["verify", scene.to_str().unwrap(), "--grid", "7x9"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    assert!(stdout.contains("# grid\t7x9") && stdout.contains("mean_curvature"), "{stdout}");
}

#[test]
fn failing_checks_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("bent.scene");
    std::fs::write(&scene, "[construction.graph]\nF = \"x + 0.1*y^2\"\ndomain = [[-1, 1], [-1, 1]]\n").unwrap();
    let out = cpd(&["verify", scene.to_str().unwrap(), "--grid", "11"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_expression_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("bad.scene");
    std::fs::write(&scene, "[construction.graph]\nF = \"sin(x\"\ndomain = [[-1, 1], [-1, 1]]\n").unwrap();
    let out = cpd(&["verify", scene.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.starts_with("error: construction.graph.F"), "{err}");
}

#[test]
fn missing_scene_exits_2() {
    let out = cpd(&["verify", "/nonexistent/x.scene"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_labels() {
    let cases: [(&[&str], &str); 3] = [
        (&["--H", "0", "--kappa", "1", "--f0", "2", "--fp0", "0", "--t-max", "1"], "catenoid-type"),
        (&["--H", "1", "--kappa", "1", "--f0", "0", "--fp0", "0", "--t-max", "1"], "cylinder"),
        (&["--H", "1", "--kappa", "1", "--f0", "0.3", "--fp0", "0", "--t-max", "2"], "unduloid"),
    ];
    for (args, label) in cases {
        let mut all = vec!["profile"];
        all.extend_from_slice(args);
        let out = cpd(&all);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(text(&out.stdout).lines().next(), Some(label));
    }
}

#[test]
fn profile_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("orbit.csv");
    let out = cpd(&["profile", "--H", "0", "--kappa", "1", "--f0", "2", "--fp0", "0", "--t-max", "0.5", "--step", "0.01", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(csv).unwrap();
    assert!(body.starts_with("t,f,fp,g,gp\n"));
    assert_eq!(body.lines().count(), 1 + 101);
}

#[test]
fn transnormal_over_a_circle() {
    let dir = tempfile::tempdir().unwrap();
    let levels = dir.path().join("levels.csv");
    let base = scenes().join("unit_circle.csv");
    let out = cpd(&[
        "transnormal",
        "--base",
        base.to_str().unwrap(),
        "--b",
        "s",
        "--s0",
        "1",
        "--tube",
        "0.5",
        "--region",
        "1.05,1.4,-0.2,0.2",
        "--smooth",
        "--grid",
        "31",
        "--levels",
        "3",
        "--out",
        levels.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}{}", text(&out.stdout), text(&out.stderr));
    assert!(text(&out.stdout).contains("eikonal"));
    let csv = std::fs::read_to_string(levels).unwrap();
    assert!(csv.starts_with("x,y\n") && csv.lines().count() > 10);
}

#[test]
fn transnormal_bad_b_exits_2() {
    let base = scenes().join("unit_circle.csv");
    let out = cpd(&["transnormal", "--base", base.to_str().unwrap(), "--b", "s +", "--tube", "0.5", "--region", "1.05,1.4,-0.2,0.2"]);
    assert_eq!(out.status.code(), Some(2));
}
