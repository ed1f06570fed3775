use std::path::Path;
use std::process::Command as Process;

use mfld_cli::{execute, run_study, Cell, Cli, Command, Scenario, Study};

fn scenario(h: &str, a: &str, ts: &[f64], ns: &[usize]) -> Scenario {
    Scenario {
        h_symbol: h.into(),
        a_symbol: a.into(),
        t_values: ts.to_vec(),
        n_values: ns.to_vec(),
        ..Default::default()
    }
}

fn reals(t: &mfld_cli::ResultTable, col: &str) -> Vec<f64> {
    t.column(col)
        .unwrap()
        .into_iter()
        .map(|c| match c {
            Cell::Real(x) => *x,
            other => panic!("{col} is not real: {other:?}"),
        })
        .collect()
}

fn cli(command: Command, config: Option<&Path>, out: &Path) -> Cli {
    Cli {
        command,
        config: config.map(Path::to_path_buf),
        out: Some(out.to_path_buf()),
        backend: None,
        max_n: None,
        trunc_k: None,
        seed: None,
        certify: false,
    }
}

#[test]
fn linear_scan_is_constant_in_n() {
    let sc = scenario("0.3*x1", "x3", &[0.1, -0.1, 0.0], &[1, 2, 4, 8]);
    let t = run_study(Study::FnConverge, &sc, false).unwrap().table;
    assert_eq!(t.rows.len(), 12);
    let ts = reals(&t, "t");
    let f = reals(&t, "F_N");
    let lim = reals(&t, "F_limit");
    // sorted by (t, N)
    assert_eq!(ts[0], -0.1);
    assert_eq!(ts[11], 0.1);
    for block in f.chunks(4) {
        assert!(block.iter().all(|v| (v - block[0]).abs() < 1e-10), "{block:?}");
    }
    for i in 4..8 {
        assert_eq!(ts[i], 0.0);
        assert_eq!(f[i], 0.0);
        assert_eq!(lim[i], 0.0);
    }
}

#[test]
fn curie_weiss_scan_approaches_the_limit() {
    let sc = scenario("0.25*x3^2", "x3", &[0.1], &[16, 32, 64, 128]);
    let t = run_study(Study::FnConverge, &sc, true).unwrap();
    assert!(t.uncertified.is_none());
    let f = reals(&t.table, "F_N");
    let lim = reals(&t.table, "F_limit");
    let err: Vec<f64> = f.iter().zip(&lim).map(|(a, b)| (a - b).abs()).collect();
    assert!(err.windows(2).all(|w| w[1] < w[0]), "{err:?}");
    assert!(lim.iter().all(|v| *v == lim[0]));
    assert_eq!(reals(&t.table, "tail_bound"), vec![0.0; 4]);
    let certs = t.table.meta["certificates"].as_array().unwrap();
    assert_eq!(certs[0]["kind"], "abelian");
}

#[test]
fn linear_dgr_defects_vanish() {
    let sc = scenario("x2", "x1", &[], &[1, 2, 5, 12, 40]);
    let t = run_study(Study::DgrScan, &sc, false).unwrap().table;
    assert_eq!(t.rows.len(), 5);
    assert!(reals(&t, "defect").iter().all(|d| *d <= 1e-12));
}

#[test]
fn majorant_table_starts_with_known_coefficients() {
    let sc = Scenario {
        majorant_order: 12,
        ..Default::default()
    };
    let t = run_study(Study::BchMajorant, &sc, false).unwrap().table;
    assert_eq!(t.rows.len(), 12);
    let text = |row: usize, col: usize| t.rows[row][col].render();
    assert_eq!((text(0, 1), text(0, 2)), ("1".into(), "1".into()));
    assert_eq!((text(1, 1), text(1, 2)), ("1".into(), "4".into()));
    assert_eq!((text(2, 1), text(2, 2)), ("5".into(), "72".into()));
    let ratio = reals(&t, "ratio");
    assert!((ratio[0] - 4.0).abs() < 1e-15);
    assert!((ratio[1] - 3.6).abs() < 1e-15);
}

#[test]
fn commuting_gt_gap_vanishes() {
    let sc = scenario("0.5*x3^2 - x3", "x3", &[-0.5, 0.25, 1.0], &[2, 6, 20]);
    let t = run_study(Study::GtGap, &sc, false).unwrap().table;
    assert_eq!(t.rows.len(), 9);
    assert!(reals(&t, "gap").iter().all(|g| g.abs() <= 1e-12));
}

#[test]
fn noncommuting_gt_gap_is_positive() {
    let sc = scenario("x3", "x1", &[0.5], &[4]);
    let t = run_study(Study::GtGap, &sc, false).unwrap().table;
    assert!(reals(&t, "gap")[0] > 1e-3);
}

#[test]
fn ldp_bins_carry_unit_mass() {
    let mut sc = scenario("0.25*x3^2", "x3", &[-1.0, -0.5, 0.0, 0.5, 1.0], &[8, 24]);
    sc.bins = 10;
    let t = run_study(Study::Ldp, &sc, false).unwrap().table;
    assert_eq!(t.rows.len(), 20);
    let mass = reals(&t, "mass");
    for per_n in mass.chunks(10) {
        assert!((per_n.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
    let rate = reals(&t, "legendre_rate");
    assert!(rate.iter().all(|r| *r >= -1e-12));
}

#[test]
fn backends_agree() {
    let sc = scenario("0.5*x3^2 + 0.2*x1*x2", "x1 - x3", &[-0.3, 0.4], &[3, 6, 9]);
    let t = run_study(Study::BackendCheck, &sc, false).unwrap().table;
    assert_eq!(t.rows.len(), 6);
    assert!(reals(&t, "abs_diff").iter().all(|d| *d < 1e-9));
}

#[test]
fn variational_rows_cover_h_a_and_the_pencil() {
    let sc = scenario("0", "x3", &[1.0], &[2]);
    let t = run_study(Study::Variational, &sc, false).unwrap().table;
    assert_eq!(t.rows.len(), 3);
    let v = reals(&t, "value");
    assert!((v[0] - 2f64.ln()).abs() < 1e-8);
    assert!((v[2] - (2.0 * 1f64.cosh()).ln()).abs() < 1e-6);
}

#[test]
fn meta_records_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "h_symbol = \"x3\"\na_symbol = \"x3\"\nt_values = [0.0, 0.5]\nn_values = [4, 12]\n").unwrap();
    let w = execute(&cli(Command::GtGap, Some(&cfg), dir.path())).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&w.meta).unwrap()).unwrap();
    assert_eq!(meta["m_constant"], 108.0);
    assert_eq!(meta["entropy_sign"], 1.0);
    assert_eq!(meta["bracket_sign"], -1.0);
    assert_eq!(meta["bracket_sign_calibrated"], -1.0);
    assert!((meta["delta_est"].as_f64().unwrap() - 2.2).abs() < 0.1);
    assert_eq!(meta["backend"][0]["backend"], "dense");
    assert_eq!(meta["backend"][1]["backend"], "block");
    assert_eq!(meta["columns"][4], "gap");
    assert_eq!(meta["scenario"]["n_values"][1], 12);
    assert_eq!(meta["rows"], 4);
}

#[test]
fn identical_scenarios_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(
        &cfg,
        "h_symbol = \"0.5*x3^2 + 0.3*x1\"\na_symbol = \"x3\"\nt_values = [0.2, -0.2]\nn_values = [4, 16]\nseed = 7\n",
    )
    .unwrap();
    let (d1, d2) = (dir.path().join("one"), dir.path().join("two"));
    for cmd in [Command::FnConverge, Command::Variational] {
        let a = execute(&cli(cmd, Some(&cfg), &d1)).unwrap();
        let b = execute(&cli(cmd, Some(&cfg), &d2)).unwrap();
        assert_eq!(std::fs::read(a.csv).unwrap(), std::fs::read(b.csv).unwrap());
    }
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "n_values = [2, 4, 8, 16]\ntruncation_k = 2\nseed = 1\nbackend = \"dense\"\n").unwrap();
    let mut c = cli(Command::GtGap, Some(&cfg), dir.path());
    c.max_n = Some(8);
    c.trunc_k = Some(5);
    c.seed = Some(9);
    c.backend = Some(mfld_cli::BackendChoice::Block);
    let sc = c.scenario().unwrap();
    assert_eq!(sc.n_values, vec![2, 4, 8]);
    assert_eq!(sc.truncation_k, 5);
    assert_eq!(sc.seed, 9);
    assert_eq!(sc.backend, mfld_cli::BackendChoice::Block);
    assert_eq!(sc.output_dir, dir.path());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };

    let broken = write("broken.toml", "ell = 2\nt_values = [0.1,\n");
    let e = execute(&cli(Command::GtGap, Some(&broken), dir.path())).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains("line"), "{e}");

    let bad_symbol = write("sym.toml", "h_symbol = \"x7\"\n");
    assert_eq!(execute(&cli(Command::GtGap, Some(&bad_symbol), dir.path())).unwrap_err().exit_code(), 2);

    let unsorted = write("unsorted.toml", "n_values = [8, 4]\n");
    assert_eq!(execute(&cli(Command::GtGap, Some(&unsorted), dir.path())).unwrap_err().exit_code(), 2);

    let unknown = write("unknown.toml", "temperature = 1.0\n");
    assert_eq!(execute(&cli(Command::GtGap, Some(&unknown), dir.path())).unwrap_err().exit_code(), 2);

    let big = write("big.toml", "n_values = [30]\nbackend = \"dense\"\n");
    assert_eq!(execute(&cli(Command::GtGap, Some(&big), dir.path())).unwrap_err().exit_code(), 3);

    let uncertified = write(
        "unc.toml",
        "h_symbol = \"0.5*x2\"\na_symbol = \"x1\"\nt_values = [0.2]\nn_values = [2]\n",
    );
    let mut c = cli(Command::FnConverge, Some(&uncertified), &dir.path().join("unc"));
    c.certify = true;
    assert_eq!(execute(&c).unwrap_err().exit_code(), 4);
    assert!(dir.path().join("unc/fn.csv").exists());
    c.certify = false;
    execute(&c).unwrap();
}

#[test]
fn binary_reports_exit_status() {
    let bin = env!("CARGO_BIN_EXE_mfld");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "majorant_order = 5\n").unwrap();
    let ok = Process::new(bin)
        .args(["bch-majorant", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let csv = std::fs::read_to_string(dir.path().join("majorant.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("n,gamma_num,gamma_den,ratio,delta_est\n1,1,1,4.0000000000000000e0,"));

    let missing = Process::new(bin).args(["gt-gap", "--config", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let bad_flag = Process::new(bin).args(["gt-gap", "--backend", "gpu"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(2));
}
