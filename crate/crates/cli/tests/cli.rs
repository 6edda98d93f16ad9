use std::path::Path;
use std::process::{Command, Output};

fn weingarten(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weingarten"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn unduloid_verdict() {
    let o = weingarten(&[
        "classify",
        "--a",
        "1",
        "--b",
        "1",
        "--phi",
        "3",
        "--seed-x",
        "0.1666667",
        "--section",
        "pi/2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(
        out.lines().next(),
        Some("Unduloid neck=0.1666667 complete=true")
    );
    let json: serde_json::Value = serde_json::from_str(&out[out.find('{').unwrap()..]).unwrap();
    assert_eq!(json["orbits"][0]["family"], "Unduloid");
    assert!(json["thresholds"]["x_plus"].as_f64().unwrap() - 1.0 < 1e-6);
}

#[test]
fn orbit_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("orbit.csv");
    let o = weingarten(&[
        "orbit",
        "--a",
        "1",
        "--b",
        "1",
        "--phi",
        "3",
        "--seed-x",
        "1",
        "--out",
        path(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = weingarten(&["verify", path(&csv), "--a", "1", "--b", "1", "--phi", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("PASS"));
    // The same table does not solve a different equation.
    let o = weingarten(&["verify", path(&csv), "--a", "1", "--b", "1", "--phi", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_writes_a_verifiable_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("nodoid.csv");
    let o = weingarten(&[
        "classify",
        "--a",
        "1",
        "--b",
        "1",
        "--phi",
        "3",
        "--seed",
        "2@3*pi/2",
        "--csv",
        path(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("Nodoid"));
    let o = weingarten(&["verify", path(&csv), "--a", "1", "--b", "1", "--phi", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn parabolic_data_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("never.csv");
    let o = weingarten(&[
        "classify",
        "--a",
        "1",
        "--b",
        "-1",
        "--phi",
        "1",
        "--seed-x",
        "0.5",
        "--csv",
        path(&csv),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parabolic character out of scope"));
    assert!(!csv.exists());
}

#[test]
fn usage_errors_exit_one() {
    let o = weingarten(&["classify", "--a", "1", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(weingarten(&[]).status.code(), Some(1));
    assert_eq!(weingarten(&["--help"]).status.code(), Some(0));
    // Bad expressions and missing seeds are validation errors too.
    let o = weingarten(&[
        "classify", "--a", "1", "--b", "1", "--phi", "3 +", "--seed-x", "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = weingarten(&["classify", "--a", "1", "--b", "1", "--phi", "3"]);
    assert_eq!(o.status.code(), Some(1));
    // The vanishing escape exists only for comparison runs.
    let o = weingarten(&[
        "classify",
        "--a",
        "1",
        "--b",
        "1",
        "--phi",
        "0",
        "--allow-vanishing",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn vanishing_escape_on_orbit() {
    let o = weingarten(&[
        "orbit", "--a", "1", "--b", "1", "--phi", "0", "--seed-x", "0.5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = weingarten(&[
        "orbit",
        "--a",
        "1",
        "--b",
        "1",
        "--phi",
        "0",
        "--seed-x",
        "0.5",
        "--allow-vanishing",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("s,x,z,theta"));
}

#[test]
fn unclassifiable_seed_exits_two() {
    // An arc-length cap shorter than one period leaves the orbit open.
    let o = weingarten(&[
        "classify", "--a", "1", "--b", "1", "--phi", "3", "--seed", "2@3*pi/2", "--s-max", "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn portrait_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "portrait".to_string(),
            "--a=1".into(),
            "--b=1".into(),
            "--phi=3".into(),
            "--equilibrium".into(),
            "--radial".into(),
            "--seed=0.1666667".into(),
            "--seed=1.5@3*pi/2".into(),
            "--seed=1@3*pi/2".into(),
            format!("--out={out}"),
        ]
    };
    let (p1, p2) = (dir.path().join("1.svg"), dir.path().join("2.svg"));
    for p in [&p1, &p2] {
        let a = args(path(p));
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        let o = weingarten(&refs);
        assert_eq!(o.status.code(), Some(0));
        // The seed on the singular curve is reported, not fatal.
        assert!(stderr(&o).contains("warning"));
    }
    let (s1, s2) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(s1, s2);
    assert!(String::from_utf8(s1).unwrap().contains("class=\"warning\""));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# sphere family\na = 1\nb = 1\nphi = \"3\"\nseed = 0.1666667\n",
    )
    .unwrap();
    let o = weingarten(&["classify", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("Unduloid"));
    let o = weingarten(&["classify", "--config", path(&cfg), "--seed", "2@3*pi/2"]);
    assert!(stdout(&o).starts_with("Nodoid"));
    let o = weingarten(&["classify", "--config", path(&cfg), "--b", "-1"]);
    assert!(!stdout(&o).starts_with("Unduloid"), "{}", stdout(&o));
    std::fs::write(&cfg, "a = 1\ncolour = blue\n").unwrap();
    let o = weingarten(&["classify", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mesh_and_radial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("sphere.obj");
    let o = weingarten(&[
        "mesh",
        "--a",
        "1",
        "--b",
        "1",
        "--phi",
        "3",
        "--seed-x",
        "1",
        "--segments",
        "16",
        "--samples",
        "50",
        "--out",
        path(&obj),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&obj).unwrap();
    // Two poles and 48 rings of 16.
    assert_eq!(
        text.lines().filter(|l| l.starts_with("v ")).count(),
        2 + 48 * 16
    );
    assert_eq!(
        text.lines().filter(|l| l.starts_with("f ")).count(),
        49 * 16
    );

    let o = weingarten(&[
        "radial", "--a", "1", "--b", "1", "--phi", "3", "--nodes", "64",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("r,u,uprime,residual"));
    assert_eq!(out.lines().count(), 66);
    let o = weingarten(&[
        "radial",
        "--a",
        "1",
        "--b",
        "-1",
        "--phi",
        "0.5",
        "--orientation",
        "up",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = weingarten(&["radial", "--a", "1", "--b", "1", "--phi", "-0.5"]);
    assert_eq!(o.status.code(), Some(1));
}
