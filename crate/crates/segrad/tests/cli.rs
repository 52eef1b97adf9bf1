use std::path::Path;
use std::process::{Command, Output};

use segrad::output::read_csv;
use segrad::RunConfig;

fn segrad(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_segrad"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, edit: impl FnOnce(&mut RunConfig)) -> String {
    let mut cfg = RunConfig::packaged(name).unwrap();
    edit(&mut cfg);
    let path = dir.join(format!("{name}.toml"));
    std::fs::write(&path, cfg.to_toml()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn equilibria_report_covers_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    let o = segrad(&["equilibria", "--scenario", "case1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let text = v.to_string();
    assert!(text.contains("n1*") && text.contains("n2*"));
}

#[test]
fn birth_below_death_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "case1", |c| c.params.d1 = 2.0);
    let o = segrad(&["equilibria", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("birth must exceed death"), "{}", stderr(&o));
}

#[test]
fn infected_strain_ordering_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wolb1", |c| c.params.b3 = 1.5);
    let o = segrad(&["equilibria", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("b2 > b3"), "{}", stderr(&o));
}

#[test]
fn unknown_scenario_lists_the_choices() {
    let dir = tempfile::tempdir().unwrap();
    let o = segrad(&["invasion", "--scenario", "case9"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("case1") && e.contains("wolb4"), "{e}");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let mut text = RunConfig::packaged("case2").unwrap().to_toml();
    text.insert_str(0, "colour = \"blue\"\n");
    std::fs::write(&path, text).unwrap();
    let o = segrad(&["simulate", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn negative_competition_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = segrad(&["simulate", "--c=-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = segrad(&["simulate", "--t-end", "0.5"], &blocker.join("sub"));
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn simulate_writes_reproducible_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = segrad(&["simulate", "--scenario", "case2", "--t-end", "2", "--quiet"], d.path());
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    for file in ["case2.csv", "case2.json", "case2.toml"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
    let csv = std::fs::read_to_string(a.path().join("case2.csv")).unwrap();
    let (header, rows) = read_csv(&csv).unwrap();
    assert_eq!(header, ["time", "x", "n1", "n2"]);
    assert_eq!(rows.first().unwrap()[0], 0.0);
    assert_eq!(rows.last().unwrap()[0], 2.0);

    // the echoed configuration reproduces the run
    let echoed = RunConfig::load(&a.path().join("case2.toml")).unwrap();
    let mut want = RunConfig::packaged("case2").unwrap();
    want.t_end = 2.0;
    assert_eq!(echoed.params, want.params);
    assert_eq!(echoed.caps, want.caps);
    assert_eq!(echoed.initial, want.initial);
    assert_eq!(echoed.t_end, 2.0);
}

#[test]
fn invasion_profiles_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let o = segrad(&["invasion", "--scenario", "case1", "--profiles"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["scenario"], "two_fronts");
    let front = std::fs::read_to_string(dir.path().join("case1_front.csv")).unwrap();
    let (header, rows) = read_csv(&front).unwrap();
    assert_eq!(header[0], "x");
    assert!(rows.len() > 100);
}
