use std::fs;
use std::process::{Command, Output};

use fibmahler::cache::{decode_family, encode_family, Cache};
use fibmahler::cli::{exit, Cli};
use fibmahler::format::read_table;
use fibmahler::{OutputFormat, RunConfig, Session};
use fibmahler_core::FibSystem;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibmahler")).args(args).output().unwrap()
}

fn text(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_small_levels_exits_zero() {
    let o = run(&["verify", "--n", "7"]);
    assert_eq!(o.status.code(), Some(exit::OK), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_table(&text(&o), OutputFormat::Tsv).unwrap();
    let row = t.rows.iter().find(|r| r[0] == "7" && r[1] == "(1,0,0,4)").expect("level 7 target");
    assert_eq!(row[2], "certified");
    assert!(t.rows.iter().all(|r| r[2] == "certified"));
}

#[test]
fn incompatible_pairs_exit_four() {
    // log 3 / log 2 is far from the golden ratio
    for args in [
        vec!["compat", "--p", "2", "--q", "3"],
        vec!["verify", "--n", "5", "--p", "2", "--q", "3"],
        vec!["exceptional", "--n", "5", "--p", "2", "--q", "3"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(exit::INCOMPATIBLE), "{args:?}");
    }
}

#[test]
fn bad_input_exits_one() {
    for args in [
        vec!["compat", "--q", "198300"],
        vec!["delta", "--n", "14"],
        vec!["table", "--precision", "16"],
        vec!["plot", "--n", "7", "--samples", "1"],
        vec!["search", "--p-min", "10", "--p-max", "5"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(exit::ERROR), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}

#[test]
fn plot_columns_and_rows() {
    let o = run(&["plot", "--n", "7", "--t-min", "0.5", "--t-max", "3", "--samples", "40"]);
    assert!(o.status.success());
    let t = read_table(&text(&o), OutputFormat::Tsv).unwrap();
    // t, six generators, (1,0,0,4), envelope, breakpoint marker
    assert_eq!(t.header.len(), 10);
    assert_eq!(t.header[7], "(1,0,0,4)");
    assert_eq!(t.rows.len(), 40);
    let o = run(&["plot", "--n", "7", "--samples", "2"]);
    assert_eq!(read_table(&text(&o), OutputFormat::Tsv).unwrap().rows.len(), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let o = run(&[
        "plot",
        "--n",
        "7",
        "--samples",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success() && o.stdout.is_empty());
    let t = read_table(&fs::read_to_string(path).unwrap(), OutputFormat::Csv).unwrap();
    assert_eq!(t.rows.len(), 5);
}

#[test]
fn output_is_deterministic() {
    for args in [["compat", "--format", "json"], ["delta", "--n", "11"], ["exceptional", "--n", "6"]] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn json_shapes() {
    let v: Value = serde_json::from_slice(&run(&["delta", "--n", "9", "--format", "json"]).stdout).unwrap();
    assert_eq!(v["n"], 9);
    assert_eq!(v["vectors"], serde_json::json!([[1, 0, 0, 3, 0, 3]]));
    let v: Value = serde_json::from_slice(&run(&["verify", "--n", "8", "--format", "json"]).stdout).unwrap();
    let level = &v["levels"][7];
    assert_eq!(level["n"], 8);
    assert_eq!(level["status"], "certified");
    assert_eq!(level["certificates"][0]["vector"], serde_json::json!([0, 1, 0, 0, 4]));
    assert_eq!(v["breakpoints"][0]["index"], 3);
    assert_eq!(v["breakpoints"][0]["bracket"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "format = csv\nN = 9\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "table"]);
    let out = text(&o);
    assert!(out.starts_with("n,V,C,R,S\n"));
    assert_eq!(out.lines().count(), 10);
    let o = run(&["--config", cfg.to_str().unwrap(), "--format", "tsv", "table", "--n-max", "3"]);
    assert_eq!(text(&o), "n\tV\tC\tR\tS\n1\t1\t1\t1\t1\n2\t1\t1\t1\t1\n3\t2\t2\t2\t2\n");
}

#[test]
fn cache_round_trip() {
    let sys = FibSystem::new(13).unwrap();
    let dir = tempfile::tempdir().unwrap();
    {
        let cache = Cache::open(dir.path()).unwrap();
        for n in 1..=11 {
            let c = sys.enumerate_c(n).unwrap();
            let count = sys.count_v(n).unwrap();
            cache.store_c(&c, count).unwrap();
            assert_eq!(cache.load_c(n, 13).unwrap(), Some((c.clone(), count)));
            assert_eq!(decode_family(&encode_family(&c, count)).unwrap(), (c, count));
        }
        assert_eq!(cache.load_c(12, 13).unwrap(), None);
    }
    // a session reads the stored families rather than enumerating
    let cfg = RunConfig {
        cache_dir: Some(dir.path().to_path_buf()),
        ..RunConfig::default()
    };
    let mut s = Session::new(cfg.clone()).unwrap();
    assert_eq!(s.c(11).unwrap().1, 44_359);
    assert_eq!(s.r(11).unwrap().len(), 18);
    drop(s);

    let file = dir.path().join("C_n11_N13.txt");
    let body = fs::read_to_string(&file).unwrap();
    fs::write(&file, body.replacen("\n0,", "\n1,", 1)).unwrap();
    let mut s = Session::new(cfg).unwrap();
    assert!(s.c(11).is_err());
}

#[test]
fn verification_summaries_are_cached() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = run(&["--cache-dir", d, "verify", "--n", "9", "--format", "json"]);
    assert!(first.status.success());
    let stored = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("verify_n"))
        .count();
    assert_eq!(stored, 9);
    let second = run(&["--cache-dir", d, "verify", "--n", "9", "--format", "json"]);
    assert_eq!(first.stdout, second.stdout);
    assert!(!dir.path().join(".lock").exists());
}

#[test]
fn clap_surface() {
    use clap::Parser;
    let cli = Cli::try_parse_from([
        "fibmahler",
        "--N",
        "11",
        "--p",
        "1879",
        "search",
        "--p-min",
        "100",
        "--p-max",
        "200",
    ])
    .unwrap();
    let cfg = cli.run_config().unwrap();
    assert_eq!((cfg.dim, cfg.p, cfg.q), (11, 1879, 198_301));
    assert!(Cli::try_parse_from(["fibmahler", "verify"]).is_err());
    assert!(Cli::try_parse_from(["fibmahler", "table", "--format", "xml"]).is_err());
}
