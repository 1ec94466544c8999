use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn netgrowth(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netgrowth"))
        .args(args)
        .current_dir(dir)
        .env_remove("NETGROWTH_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn json_body(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("valid JSON")
}

#[test]
fn invert_recovers_occupy_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = netgrowth(
        dir.path(),
        &["invert", "--a", "0.8", "--b", "0.29", "--c", "0.132", "--rate", "0.1", "--h0", "2", "--r", "0.038"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_body(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(doc["p"].as_f64(), Some(0.002));
    assert_eq!(doc["q"].as_f64(), Some(0.022));
    assert_eq!(doc["s"].as_f64(), Some(0.0645));
    assert_eq!(doc["N0"].as_u64(), Some(14));
    assert_eq!(doc["H0"].as_u64(), Some(2));
    assert!(doc["provenance"]["command"].as_str().unwrap().contains("invert"));
}

#[test]
fn generate_then_analyze_snapshots_at_powers_of_two() {
    let dir = tempfile::tempdir().unwrap();
    let gen = netgrowth(
        dir.path(),
        &[
            "generate", "--model", "model1", "--r", "0.05", "--s", "0.075", "--n0", "20", "--h0", "2", "--target",
            "65536", "--seed", "1",
        ],
    );
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let log = fs::read_to_string(dir.path().join("events.tsv")).unwrap();
    let first = log.lines().next().unwrap();
    assert!(first.starts_with("# netgrowth ") && first.contains("seed: 1") && first.contains("generate"));

    let ana = netgrowth(dir.path(), &["analyze", "--input", "events.tsv"]);
    assert!(ana.status.success(), "{}", String::from_utf8_lossy(&ana.stderr));
    let text = fs::read_to_string(dir.path().join("events.trajectory.csv")).unwrap();
    assert!(text.starts_with("# netgrowth "));
    assert!(text.lines().nth(1).unwrap().starts_with("n,e,avg_degree,nz,alpha_all"));
    let ns: Vec<u64> = data_rows(&text).iter().map(|r| r[0].parse().unwrap()).collect();
    let expected: Vec<u64> = (5..=16).map(|i| 1u64 << i).collect();
    assert_eq!(ns, expected);

    let dist = fs::read_to_string(dir.path().join("events.distribution.csv")).unwrap();
    assert!(dist.lines().nth(1).unwrap() == "snapshot_n,bin_low,bin_high,density");
}

#[test]
fn same_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate", "--model", "model2", "--p", "0.002", "--q", "0.022", "--r", "0.038", "--s", "0.0645", "--n0", "14",
        "--h0", "2", "--target", "4096", "--seed", "7", "--out", "run.tsv",
    ];
    assert!(netgrowth(dir.path(), &args).status.success());
    let first = fs::read(dir.path().join("run.tsv")).unwrap();
    assert!(netgrowth(dir.path(), &args).status.success());
    assert_eq!(first, fs::read(dir.path().join("run.tsv")).unwrap());

    let mut other = args.to_vec();
    other[18] = "8";
    assert!(netgrowth(dir.path(), &other).status.success());
    assert_ne!(first, fs::read(dir.path().join("run.tsv")).unwrap());
}

#[test]
fn params_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.json"), r#"{"r": 0.05, "s": 0.075, "N0": 20, "H0": 2}"#).unwrap();
    let out = netgrowth(
        dir.path(),
        &["generate", "--model", "model1", "--params", "p.json", "--s", "0.08", "--target", "512", "--out", "a.tsv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let log = fs::read_to_string(dir.path().join("a.tsv")).unwrap();
    assert!(log.contains("# s=0.08\n"));
    assert!(log.contains("# N0=20\n"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("results");
    let status = Command::new(env!("CARGO_BIN_EXE_netgrowth"))
        .args(["generate", "--model", "barabasi-albert", "--m", "2", "--target", "300"])
        .current_dir(dir.path())
        .env("NETGROWTH_OUT_DIR", &out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out_dir.join("events.tsv").is_file());
}

#[test]
fn exit_codes_by_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| netgrowth(dir.path(), args).status.code();

    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["generate", "--model", "model1", "--r", "0.05", "--s", "0.075", "--n0", "20", "--h0", "2"]), Some(1));
    assert_eq!(code(&["invert", "--a", "3", "--b", "0.3", "--c", "0.1", "--r", "0.01"]), Some(1));
    assert_eq!(code(&["analyze", "--input", "missing.tsv"]), Some(1));

    fs::write(dir.path().join("bad.tsv"), "0\t1\t2\nx\t1\t2\n").unwrap();
    assert_eq!(code(&["analyze", "--input", "bad.tsv"]), Some(2));
    fs::write(dir.path().join("ones.txt"), "1 1 1 1 1 1 1 1 1 1 1 1\n").unwrap();
    assert_eq!(code(&["fit-exponent", "--input", "ones.txt"]), Some(3));

    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "failed commands must leave no outputs: {names:?}");
}

#[test]
fn classify_and_shuffle_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gen = netgrowth(
        dir.path(),
        &[
            "generate", "--model", "model2", "--p", "0.002", "--q", "0.022", "--r", "0.038", "--s", "0.0645", "--n0",
            "14", "--h0", "2", "--target", "5000", "--out", "occ.tsv",
        ],
    );
    assert!(gen.status.success());

    let cls = netgrowth(dir.path(), &["classify", "--input", "occ.tsv"]);
    assert!(cls.status.success());
    assert!(String::from_utf8_lossy(&cls.stdout).contains("(0 mismatches)"));
    let ratios = fs::read_to_string(dir.path().join("occ.ratios.csv")).unwrap();
    assert!(ratios.lines().nth(1).unwrap().starts_with("n_low,n_high,z,r,i,h,duplicates,ratio_R"));

    let shf = netgrowth(dir.path(), &["shuffle", "--input", "occ.tsv", "--seed", "3"]);
    assert!(shf.status.success());
    let original = fs::read_to_string(dir.path().join("occ.tsv")).unwrap();
    let shuffled = fs::read_to_string(dir.path().join("occ.shuffled.tsv")).unwrap();
    let events = |t: &str| t.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(events(&original), events(&shuffled));
    assert!(!shuffled.contains("#type="));

    let fit = netgrowth(dir.path(), &["fit-exponent", "--input", "occ.tsv", "--events", "--out", "fit.json"]);
    assert!(fit.status.success(), "{}", String::from_utf8_lossy(&fit.stderr));
    let doc = json_body(&fs::read_to_string(dir.path().join("fit.json")).unwrap());
    assert!(doc["opt"]["alpha_hat"].as_f64().unwrap() > 1.0);
    assert!(doc["alpha_set_min"].as_f64().unwrap() <= doc["alpha_set_max"].as_f64().unwrap());
}

#[test]
fn predict_then_fit_avgdeg_recovers_curve() {
    let dir = tempfile::tempdir().unwrap();
    let pred = netgrowth(
        dir.path(),
        &[
            "predict", "--model", "model2", "--p", "0.002", "--q", "0.022", "--r", "0.038", "--s", "0.0645", "--n0",
            "14", "--h0", "2", "--from", "4",
        ],
    );
    assert!(pred.status.success(), "{}", String::from_utf8_lossy(&pred.stderr));
    let csv = fs::read_to_string(dir.path().join("prediction.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 14);
    for row in &rows {
        let fr: f64 = row[3].parse::<f64>().unwrap() + row[4].parse::<f64>().unwrap() + row[5].parse::<f64>().unwrap();
        assert!((fr - 1.0).abs() < 1e-12);
    }

    let fit = netgrowth(dir.path(), &["fit-avgdeg", "--input", "prediction.csv"]);
    assert!(fit.status.success(), "{}", String::from_utf8_lossy(&fit.stderr));
    let doc = json_body(&fs::read_to_string(dir.path().join("avgdeg_fit.json")).unwrap());
    assert!((doc["a"].as_f64().unwrap() - 0.8).abs() < 1e-3);
    assert!((doc["b"].as_f64().unwrap() - 0.29).abs() < 1e-3);
    assert!((doc["c"].as_f64().unwrap() / 0.13228 - 1.0).abs() < 1e-2);

    let pure = netgrowth(dir.path(), &["fit-avgdeg", "--input", "prediction.csv", "--pure-power", "--out", "pure.json"]);
    assert!(pure.status.success());
    let doc = json_body(&fs::read_to_string(dir.path().join("pure.json")).unwrap());
    assert_eq!(doc["a"].as_f64(), Some(0.0));
    assert_eq!(doc["form"].as_str(), Some("PurePower"));
}

#[test]
fn reproduce_growth_exponent_recipe_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = netgrowth(dir.path(), &["reproduce", "fig10", "--seeds", "2", "--target", "65536"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("fig10.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 4);
    let s: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(s, vec![0.0625, 0.075, 0.0875, 0.1]);
    for row in &rows {
        let s: f64 = row[0].parse().unwrap();
        let calculated: f64 = row[1].parse().unwrap();
        assert!((calculated - (s / 0.05 - 1.0)).abs() < 1e-12);
    }
}
