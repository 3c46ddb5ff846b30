use std::path::Path;
use std::process::{Command, Output};

fn twentyv(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twentyv")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn kv<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(&format!("{key}: "))).unwrap_or_else(|| panic!("no key {key} in\n{text}"))
}

#[test]
fn qthadt_prints_the_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = twentyv(&["qthadt", "--n", "3", "--gamma", "1"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "23");
    let o = twentyv(&["qthadt", "--n", "3", "--gamma", "0"], dir.path());
    assert_eq!(stdout(&o).trim(), "7");
}

#[test]
fn qthadt_polynomial_and_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = twentyv(&["qthadt", "--n", "3", "--gamma", "1/2", "--polynomial"], dir.path());
    let out = stdout(&o);
    let coeffs: Vec<&str> = out.lines().filter(|l| l.starts_with("tau^")).collect();
    assert_eq!(coeffs.len(), 3);
    let o = twentyv(&["qthadt", "--n", "4", "--gamma", "1", "--sigma", "0.7"], dir.path());
    let diff: f64 = kv(&stdout(&o), "abs_diff").parse().unwrap();
    let det: f64 = kv(&stdout(&o), "det_b").parse().unwrap();
    assert!(diff < 1e-9 * det);
}

#[test]
fn curve_writes_svg_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "curve", "--eta", "0.2618", "--lambda", "2.618", "--mu", "1.309", "--points", "400", "--svg", "out.svg",
        "--csv", "out.csv",
    ];
    let o = twentyv(&args, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(dir.path().join("out.svg")).unwrap();
    assert_eq!(svg.matches("<path").count(), 6);
    assert!(svg.contains(r#"<param name="mu" value="1.309"/>"#));
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert!(csv.starts_with("xi,x,y,branch\n"));
    let branches: std::collections::BTreeSet<&str> =
        csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(branches.len(), 6);
    let manifest = std::fs::read_to_string(dir.path().join("out.csv.manifest")).unwrap();
    assert_eq!(kv(&manifest, "command"), "curve");
    assert!(manifest.contains("output.0: out.csv") && manifest.contains("output.1: out.svg"));
    assert!(manifest.contains("param.eta: 0.2618"));

    // byte-identical on a second run
    let first = (svg, csv);
    twentyv(&args, dir.path());
    let again = (
        std::fs::read_to_string(dir.path().join("out.svg")).unwrap(),
        std::fs::read_to_string(dir.path().join("out.csv")).unwrap(),
    );
    assert_eq!(first, again);
}

#[test]
fn curve_models_and_fractional_angles() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["curve", "--model", "6v", "--eta", "pi/6", "--lambda", "pi/2", "--csv", "a.csv"],
        vec!["curve", "--model", "qthadt", "--eta", "pi/6", "--svg", "b.svg"],
        vec!["curve", "--eta", "pi/12", "--lambda", "10*pi/12", "--special-line", "--csv", "c.csv"],
    ] {
        let o = twentyv(&args, dir.path());
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let svg = std::fs::read_to_string(dir.path().join("b.svg")).unwrap();
    assert_eq!(svg.matches("<path").count(), 12);
}

#[test]
fn weights_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = twentyv(&["weights", "--eta", "pi/8", "--lambda", "5pi/8"], dir.path());
    let out = stdout(&o);
    for k in 0..7 {
        let w: f64 = kv(&out, &format!("omega{k}")).parse().unwrap();
        assert!((w - 0.5f64.sqrt()).abs() < 1e-15);
    }
    for k in 1..=3 {
        let r: f64 = kv(&out, &format!("yang_baxter{k}")).parse().unwrap();
        assert!(r.abs() < 1e-12);
    }
}

#[test]
fn enumerate_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = twentyv(&["enumerate", "--n", "3", "--bc", "DWBC1", "--eta", "pi/8", "--lambda", "5*pi/8"], dir.path());
    let out = stdout(&o);
    let total: f64 = kv(&out, "total").parse().unwrap();
    let w = 0.5f64.sqrt();
    assert!((total / w.powi(9) - 23.0).abs() < 1e-9);
    let o = twentyv(&["enumerate", "--n", "3", "--format", "rows", "--out", "r.csv"], dir.path());
    assert!(o.status.success());
    let rows = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(rows.starts_with("kind,L,value\n"));
    let err: f64 = rows
        .lines()
        .find(|l| l.starts_with("refined_identity_rel_err"))
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(err < 1e-10);
    assert!(dir.path().join("r.csv.manifest").exists());
}

#[test]
fn sample_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sample",
        "--n",
        "8",
        "--seed",
        "4",
        "--burn-in",
        "20000",
        "--steps",
        "64000",
        "--density",
        "d.csv",
        "--dump",
        "c.txt",
        "--svg",
        "s.svg",
    ];
    let o = twentyv(&args, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(kv(&stdout(&o), "records"), "100");
    let grid = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert!(grid.starts_with("y,x,density\n"));
    assert_eq!(grid.lines().count(), 65);
    let svg = std::fs::read_to_string(dir.path().join("s.svg")).unwrap();
    assert!(svg.contains(r#"<param name="seed" value="4"/>"#));
    assert_eq!(svg.matches("<path").count(), 6);

    // the dump restarts a chain
    let o = twentyv(&["sample", "--n", "8", "--init", "c.txt", "--burn-in", "0", "--steps", "640"], dir.path());
    assert!(o.status.success());
    let o = twentyv(&["sample", "--n", "9", "--init", "c.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    // identical seeds give identical fields
    std::fs::rename(dir.path().join("d.csv"), dir.path().join("first.csv")).unwrap();
    twentyv(&args, dir.path());
    assert_eq!(std::fs::read(dir.path().join("first.csv")).unwrap(), std::fs::read(dir.path().join("d.csv")).unwrap());
}

#[test]
fn qthadt_sampling_with_annealing() {
    let dir = tempfile::tempdir().unwrap();
    let o = twentyv(
        &[
            "sample",
            "--model",
            "qthadt",
            "--n",
            "6",
            "--gamma",
            "0.2",
            "--anneal-from",
            "1",
            "--burn-in",
            "10000",
            "--steps",
            "36000",
            "--chains",
            "2",
            "--density",
            "q.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(kv(&stdout(&o), "records"), "200");
    assert_eq!(std::fs::read_to_string(dir.path().join("q.csv")).unwrap().lines().count(), 1 + 49);
}

#[test]
fn usage_and_numeric_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(twentyv(&["curve", "--bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(twentyv(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(twentyv(&["weights", "--eta", "pi/x"], dir.path()).status.code(), Some(2));
    assert_eq!(twentyv(&["weights", "--eta", "0.5", "--lambda", "0.4"], dir.path()).status.code(), Some(1));
    assert_eq!(twentyv(&["qthadt", "--n", "41"], dir.path()).status.code(), Some(1));
    assert_eq!(twentyv(&["enumerate", "--n", "9"], dir.path()).status.code(), Some(1));
    assert_eq!(twentyv(&["validate", "--level", "exhaustive"], dir.path()).status.code(), Some(2));
}

#[test]
fn explicit_manifest_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = twentyv(&["qthadt", "--n", "2", "--manifest", "run.txt"], dir.path());
    assert!(o.status.success());
    let m = std::fs::read_to_string(dir.path().join("run.txt")).unwrap();
    assert_eq!(kv(&m, "command"), "qthadt");
    assert!(m.contains("param.n: 2"));
    assert!(m.contains("timestamp_unix: "));
    assert!(m.contains(&format!("version: {}", env!("CARGO_PKG_VERSION"))));
}
