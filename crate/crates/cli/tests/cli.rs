use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(name)
}

fn mvop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn build_writes_disk_tables() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec("disk.toml");
    let o = mvop(&[
        "build",
        "--spec",
        spec.to_str().unwrap(),
        "--degree",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let gram = read_csv(&dir.path().join("gram.csv"));
    let h1: Vec<&Vec<String>> = gram.iter().filter(|r| r[0] == "1").collect();
    let expected = [
        ["1", "0", "0", "1/4"],
        ["1", "0", "1", "0/1"],
        ["1", "1", "0", "0/1"],
        ["1", "1", "1", "1/4"],
    ];
    assert_eq!(h1.len(), 4);
    for (row, want) in h1.iter().zip(expected) {
        assert_eq!(row.iter().map(String::as_str).collect::<Vec<_>>(), want);
    }
    let verdicts = read_csv(&dir.path().join("quasi_definite.csv"));
    assert_eq!(verdicts.len(), 4);
    assert!(verdicts.iter().all(|r| r[2] == "quasi-definite"));
    assert!(dir.path().join("recurrence.csv").exists());
}

#[test]
fn build_reports_failure_at_degree_zero() {
    let o = mvop(&[
        "build",
        "--spec",
        spec("table_degenerate.toml").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("0,0/1,singular"));
}

#[test]
fn bessel_laguerre_tables_are_exact() {
    let o = mvop(&[
        "build",
        "--spec",
        spec("bessel_laguerre.toml").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("1,-1/2,quasi-definite"));
    assert!(!out.contains('.'), "float leaked into exact output");
}

#[test]
fn exact_backend_rejects_irrational_moments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bl.toml");
    std::fs::write(
        &path,
        "kind = \"bessel_laguerre\"\ng = \"1/2\"\ngamma = 3\n",
    )
    .unwrap();
    let o = mvop(&["build", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("<u, 1>") && err.contains("irrational"),
        "{err}"
    );
    assert!(mvop(&[
        "build",
        "--spec",
        path.to_str().unwrap(),
        "--backend",
        "float"
    ])
    .status
    .success());
}

#[test]
fn parse_errors_carry_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "kind = \"ball\"\nd = 2\nmu = = 1\n").unwrap();
    let o = mvop(&["build", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn bessel_laguerre_unit_mass_fails_at_degree_one() {
    let o = mvop(&[
        "uvarov",
        "--spec",
        spec("bessel_laguerre.toml").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("1,2/1,gram-singular"), "{out}");
    assert!(out.contains("2,0/1,singular"), "{out}");
    assert!(stderr(&o).contains("not quasi-definite at degree 1"));

    let o = mvop(&[
        "uvarov",
        "--spec",
        spec("bessel_laguerre.toml").to_str().unwrap(),
        "--mass",
        "0,0:1/3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn two_point_disk_modification_certifies() {
    let o = mvop(&[
        "uvarov",
        "--spec",
        spec("disk_two_points.toml").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let cert: Vec<&str> = out
        .lines()
        .skip_while(|l| !l.starts_with("degree,det"))
        .skip(1)
        .take(5)
        .collect();
    assert_eq!(cert.len(), 5);
    assert!(cert.iter().all(|l| l.ends_with(",ok")), "{cert:?}");
}

#[test]
fn ball_origin_mass_matches_explicit_basis() {
    let o = mvop(&[
        "uvarov",
        "--spec",
        spec("disk.toml").to_str().unwrap(),
        "--backend",
        "float",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out
        .lines()
        .skip_while(|l| !l.starts_with("# disk_uvarov_crosscheck"))
        .skip(2)
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|l| l.ends_with(",ok")));
}

#[test]
fn disk_christoffel_is_exact() {
    let o = mvop(&[
        "christoffel",
        "--spec",
        spec("disk.toml").to_str().unwrap(),
        "--degree",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    for id in ["4.4", "4.5", "4.6", "4.7", "4.8", "4.9"] {
        assert!(out.contains(&format!(",{id},EXACT")), "missing {id}");
    }
    assert!(!out
        .lines()
        .any(|l| l.contains(",4.") && !l.ends_with("EXACT")));
}

#[test]
fn random_christoffel_pair_is_exact_and_deterministic() {
    let a = mvop(&["christoffel", "--seed", "17", "--degree", "3"]);
    let b = mvop(&["christoffel", "--seed", "17", "--degree", "3"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a)
        .lines()
        .filter(|l| l.contains(",4."))
        .all(|l| l.ends_with("EXACT")));
}

#[test]
fn mutated_connection_is_flagged_by_consistency() {
    let o = mvop(&[
        "christoffel",
        "--seed",
        "17",
        "--degree",
        "3",
        "--mutate-n3",
        "1/7",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let first_bad = stdout(&o)
        .lines()
        .skip(1)
        .find(|l| !l.ends_with("EXACT"))
        .map(String::from)
        .unwrap();
    assert!(first_bad.starts_with("3,4.7,"), "{first_bad}");
    assert!(stderr(&o).contains("flagged by equation 4.7 at degree 3"));
}

#[test]
fn flags_override_spec_modifications() {
    // the multiplier x1^2 + x2^2 + 1 replaces the file's 1 - |x|^2
    let o = mvop(&[
        "christoffel",
        "--spec",
        spec("disk.toml").to_str().unwrap(),
        "--degree",
        "2",
        "--lambda2=1,0,1",
        "--lambda0",
        "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("lambda2[0],1/1,1/1"));
}

#[test]
fn verify_all_passes_on_the_disk() {
    let o = mvop(&[
        "verify-all",
        "--spec",
        spec("disk.toml").to_str().unwrap(),
        "--degree",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    for table in ["# gram", "# uvarov", "# christoffel", "# recovery"] {
        assert!(out.contains(table), "missing {table}");
    }
}

fn last_rel_err(out: &str) -> f64 {
    out.lines()
        .last()
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn mass_limit_experiment() {
    let o = mvop(&["experiment", "ball-mass-limit"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("n,\"K_n(v;0,0)\",1/lambda,rel_err"));
    assert!(out.lines().last().unwrap().starts_with("200,"));
    assert!(last_rel_err(&out) < 0.02);
}

#[test]
fn interior_experiment() {
    let o = mvop(&["experiment", "ball-interior", "--radius", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(last_rel_err(&stdout(&o)) < 0.05);
}

#[test]
fn adjacent_experiment() {
    let o = mvop(&[
        "experiment",
        "adjacent",
        "--spec",
        spec("disk.toml").to_str().unwrap(),
        "--degree",
        "6",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 8);
    assert!(last_rel_err(&out) < 1e-12);
}

#[test]
fn experiments_reject_unknown_names_and_exact_backend() {
    assert!(!mvop(&["experiment", "ball-exterior"]).status.success());
    assert_eq!(
        mvop(&["experiment", "adjacent", "--backend", "exact"])
            .status
            .code(),
        Some(2)
    );
}
