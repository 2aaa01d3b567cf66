use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dkho(args: &[&str], out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dkho"));
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("DKHO_")) {
        cmd.env_remove(k);
    }
    cmd.args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn dkho")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn missing_resonance_is_a_config_error_naming_q() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dkho(&["web", "--r", "1", "--n-kicks", "10"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`q`"), "{}", stderr(&o));

    let o = dkho(
        &["overlap", "--r", "1", "--q", "6", "--set", "eta=half"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`eta`"));
}

#[test]
fn zero_kicks_gives_a_single_unit_overlap_row() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dkho(
        &[
            "overlap",
            "--r",
            "1",
            "--q",
            "6",
            "--eta",
            "0.5",
            "--fock-dim",
            "100",
            "--n-kicks",
            "0",
        ],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&tmp.path().join("overlap.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn reference_overlap_settings_emit_1001_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = configs().join("overlap-hyperbolic-eta0.5.conf");
    let o = dkho(&["overlap", "-c", conf.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&tmp.path().join("overlap.csv"));
    assert_eq!(rows.len(), 1001);
    for row in &rows {
        let (o, rec) = (row[3].parse::<f64>().unwrap(), &row[7]);
        if !rec.is_empty() {
            assert!((rec.parse::<f64>().unwrap() - o).abs() < 1e-9);
        }
    }
    let m = manifest(tmp.path());
    assert_eq!(m["command"], "overlap");
    assert_eq!(m["config"]["fock_dim"], "400");
    assert_eq!(m["config"]["leak_window"], "0.1");
    assert_eq!(m["report"]["rows"], 1001);
}

#[test]
fn default_leakage_policy_aborts_with_a_larger_basis() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = configs().join("overlap-hyperbolic-eta0.5.conf");
    let o = dkho(
        &[
            "overlap",
            "-c",
            conf.to_str().unwrap(),
            "--set",
            "leak_error=0.001",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("at least 800"), "{}", stderr(&o));
}

#[test]
fn outputs_do_not_depend_on_worker_count_or_repetition() {
    let tmp = tempfile::tempdir().unwrap();
    let web = [
        "web",
        "--r",
        "1",
        "--q",
        "6",
        "--n-kicks",
        "2000",
        "--set",
        "grid.res=80",
    ];
    let qavg = [
        "qavg",
        "--r",
        "1",
        "--q",
        "6",
        "--eta",
        "0.5",
        "--fock-dim",
        "200",
        "--n-kicks",
        "40",
        "--set",
        "x0=0",
        "--set",
        "p0=1.1547005383792515",
        "--set",
        "grid.res=30",
    ];
    for (args, files) in [
        (&web[..], ["web.csv", "web.pgm"]),
        (&qavg[..], ["q.csv", "q.pgm"]),
    ] {
        let runs: Vec<PathBuf> = ["1", "3", "1"]
            .iter()
            .enumerate()
            .map(|(i, jobs)| {
                let dir = tmp.path().join(format!("{}-{i}", args[0]));
                let mut a = args.to_vec();
                a.extend(["--jobs", jobs]);
                let o = dkho(&a, &dir);
                assert!(o.status.success(), "{}", stderr(&o));
                dir
            })
            .collect();
        for f in files {
            let first = fs::read(runs[0].join(f)).unwrap();
            for dir in &runs[1..] {
                assert_eq!(first, fs::read(dir.join(f)).unwrap(), "{f} differs");
            }
        }
        // replaying the manifest reproduces the outputs
        let replay = tmp.path().join(format!("{}-replay", args[0]));
        let m = runs[0].join("manifest.json");
        let o = dkho(&[args[0], "-c", m.to_str().unwrap()], &replay);
        assert!(o.status.success(), "{}", stderr(&o));
        for f in files {
            assert_eq!(
                fs::read(runs[0].join(f)).unwrap(),
                fs::read(replay.join(f)).unwrap()
            );
        }
    }
}

#[test]
fn convert_reports_and_validates() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = configs().join("convert-calcium.conf");
    let conf = conf.to_str().unwrap();
    let o = dkho(
        &["convert", "-c", conf, "--set", "physical.rabi=0"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(manifest(tmp.path())["report"]["kappa"], 0.0);

    let o = dkho(&["convert", "-c", conf], tmp.path());
    let m = manifest(tmp.path());
    assert!(o.status.success());
    let kappa = m["report"]["kappa"].as_f64().unwrap();
    let via_k = m["report"]["kappa_from_K"].as_f64().unwrap();
    assert!((kappa / via_k - 1.0).abs() < 1e-12);

    let o = dkho(
        &["convert", "-c", conf, "--set", "physical.rabi=1e8"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rabi"), "{}", stderr(&o));
}

#[test]
fn environment_sits_between_file_and_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |env: &[(&str, &str)], extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dkho"));
        cmd.args([
            "evolve",
            "--r",
            "1",
            "--q",
            "6",
            "--n-kicks",
            "1",
            "--fock-dim",
            "60",
        ])
        .args(extra)
        .arg("--out")
        .arg(tmp.path());
        for (k, v) in env {
            cmd.env(k, v);
        }
        assert!(cmd.output().unwrap().status.success());
        manifest(tmp.path())["config"]["eta"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(run(&[("DKHO_ETA", "0.7")], &[]), "0.7");
    assert_eq!(run(&[("DKHO_ETA", "0.7")], &["--eta", "0.6"]), "0.6");
}

#[test]
fn evolve_dumps_a_readable_operator() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dkho(
        &[
            "evolve",
            "--r",
            "1",
            "--q",
            "6",
            "--eta",
            "0.5",
            "--fock-dim",
            "50",
            "--n-kicks",
            "5",
            "--set",
            "dump_operator=true",
        ],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let f =
        dkho::io::read_operator(fs::File::open(tmp.path().join("operator.bin")).unwrap()).unwrap();
    assert_eq!(f.dim(), 50);
    assert!((f.theta - std::f64::consts::PI / 3.0).abs() < 1e-15);
    assert_eq!(csv_rows(&tmp.path().join("trajectory.csv")).len(), 6);
    assert_eq!(csv_rows(&tmp.path().join("state.csv")).len(), 50);
}

#[test]
fn unkicked_centroid_matches_the_rotation() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = configs().join("correspondence.conf");
    let o = dkho(
        &["correspondence", "-c", conf.to_str().unwrap()],
        tmp.path(),
    );
    assert!(o.status.success());
    assert_eq!(manifest(tmp.path())["report"]["verdict"], "PASS");

    let o = dkho(
        &[
            "correspondence",
            "-c",
            conf.to_str().unwrap(),
            "--kappa1",
            "0",
        ],
        tmp.path(),
    );
    assert!(o.status.success());
    let dev = manifest(tmp.path())["report"]["max_relative_deviation"]
        .as_f64()
        .unwrap();
    assert!(dev < 1e-9, "{dev:e}");
}
