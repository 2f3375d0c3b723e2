use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn macrostate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macrostate"))
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

#[test]
fn compute_emits_one_json_report() {
    let input = fixture("aaa.csv");
    let o = macrostate(&[
        "compute",
        "--input",
        &input,
        "--symbol",
        "AAA",
        "--market",
        "BVB",
        "--from",
        "2006-01-01",
        "--to",
        "2006-01-31",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.trim_start().starts_with('{'));
    assert!(out.contains("\"symbol\": \"AAA\""));
    assert!(out.contains("\"from\": \"2006-01-01\""));
    assert!(out.contains("\"to\": \"2006-01-31\""));
    assert!(out.contains("\"activity_mode\": \"pv\""));
    assert!(out.contains("\"aggregation\": \"signed\""));
    // 22 weekdays in January 2006 -> 21 steps
    assert!(out.contains("\"n_valid\": 21"));
}

#[test]
fn compute_csv_has_fixed_header() {
    let o = macrostate(&[
        "compute",
        "--input",
        &fixture("three_symbols.csv"),
        "--symbol",
        "BETA",
        "--format",
        "csv",
    ]);
    assert_eq!(
        stdout(&o),
        "symbol,market,from,to,activity_mode,aggregation,n_valid,n_skipped,p_m,s_e,ln_w_b,t_b\n\
         BETA,BVB,,,pv,signed,2,0,0.75,0.75,1.5,1.3333333333333333\n"
    );
}

#[test]
fn missing_symbol_is_a_data_error() {
    let o = macrostate(&[
        "compute",
        "--input",
        &fixture("aaa.csv"),
        "--symbol",
        "MISSING",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("MISSING"));
}

#[test]
fn symbol_on_two_markets_needs_market() {
    let o = macrostate(&["compute", "--input", &fixture("aaa.csv"), "--symbol", "AAA"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("AMBIGUOUS_SYMBOL"));
    assert!(o.stdout.is_empty());
}

#[test]
fn unreadable_input_is_a_data_error() {
    let o = macrostate(&["compute", "--input", "/nonexistent/f.csv", "--symbol", "A"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("IO_ERROR"));
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    let o = macrostate(&[
        "compute",
        "--input",
        &fixture("aaa.csv"),
        "--symbol",
        "AAA",
        "--mode",
        "pq",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--mode"));
    assert!(o.stdout.is_empty());

    let o = macrostate(&["rank", "--input", &fixture("aaa.csv"), "--kb", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--kb"));
}

#[test]
fn rank_matches_hand_computed_order() {
    // pv terms: ALFA [0.1, 0.1], BETA [0.5, 1.0], GAMA [-0.2, 0.0]
    let o = macrostate(&["rank", "--input", &fixture("three_symbols.csv")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["rank", "symbol", "market", "p_m", "t_b"]);
    let order: Vec<(&str, &str)> = rows[1..].iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(order, [("1", "BETA"), ("2", "ALFA"), ("3", "GAMA")]);
    let p_m: Vec<f64> = rows[1..].iter().map(|r| r[3].parse().unwrap()).collect();
    for (got, want) in p_m.iter().zip([0.75, 0.1, -0.1]) {
        assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
    }
}

#[test]
fn rank_filters_by_market() {
    let o = macrostate(&[
        "rank",
        "--input",
        &fixture("aaa.csv"),
        "--market",
        "WBAG",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.matches("\"rank\"").count(), 1);
    assert!(out.contains("\"market\": \"WBAG\""));
}

#[test]
fn rank_fails_whole_universe_without_partial_output() {
    let o = macrostate(&[
        "rank",
        "--input",
        &fixture("aaa.csv"),
        "--from",
        "2030-01-01",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("EMPTY_SERIES"));
}

#[test]
fn compare_preserves_label_order() {
    let o = macrostate(&[
        "compare",
        "--input",
        &fixture("aaa.csv"),
        "--labels",
        "AAA@WBAG,AAA@BVB",
        "--from",
        "2006-01-01",
        "--to",
        "2006-01-31",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let labels: Vec<&str> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(labels, ["AAA@WBAG", "AAA@BVB"]);
    assert!(out.starts_with("label,symbol,market,from,to,"));
}

#[test]
fn kb_scales_entropy_fields() {
    let base = [
        "compute",
        "--input",
        &fixture("three_symbols.csv"),
        "--symbol",
        "BETA",
        "--format",
        "csv",
    ];
    let mut scaled = base.to_vec();
    scaled.extend(["--kb", "2"]);
    let o = macrostate(&scaled);
    let row = stdout(&o).lines().nth(1).unwrap().to_owned();
    assert_eq!(row, "BETA,BVB,,,pv,signed,2,0,1.5,1.5,3,0.6666666666666666");
}

#[test]
fn abs_aggregation_is_labelled() {
    let o = macrostate(&[
        "compute",
        "--input",
        &fixture("three_symbols.csv"),
        "--symbol",
        "GAMA",
        "--agg",
        "abs",
    ]);
    let out = stdout(&o);
    assert!(out.contains("\"aggregation\": \"abs\""));
    assert!(out.contains("\"p_m\": 0.1"));
}

#[test]
fn volatility_kinds() {
    let input = fixture("zero_volume.csv");
    let o = macrostate(&["volatility", "--input", &input, "--symbol", "ZVD"]);
    let out = stdout(&o);
    assert!(out.starts_with("date,value\n2006-01-04,-1\n"));
    assert!(out.contains("\n\ndate,skip_reason\n2006-01-05,zero_denominator\n"));

    let o = macrostate(&[
        "volatility",
        "--input",
        &input,
        "--symbol",
        "ZVD",
        "--kind",
        "simple",
    ]);
    assert_eq!(stdout(&o).lines().count(), 12);

    let o = macrostate(&[
        "volatility",
        "--input",
        &input,
        "--symbol",
        "ZVD",
        "--kind",
        "log",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"kind\": \"log\""));
}

#[test]
fn precinct_layouts() {
    let input = fixture("zero_volume.csv");
    let o = macrostate(&["precinct", "--input", &input, "--symbol", "ZVD"]);
    let out = stdout(&o);
    assert!(out.starts_with("date,x,y,z\n2006-01-04,10,0,-1\n"));
    assert_eq!(out.lines().count(), 1 + 7);

    let o = macrostate(&[
        "precinct", "--input", &input, "--symbol", "ZVD", "--axes", "tvz",
    ]);
    let out = stdout(&o);
    assert!(out.starts_with("date,x,y,z\n2006-01-04,1,10,0\n"));
    assert_eq!(out.lines().count(), 1 + 11);
}

#[test]
fn sort_dates_flag_accepts_unordered_input() {
    let dir = std::env::temp_dir().join(format!("macrostate-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("unordered.csv");
    std::fs::write(
        &path,
        "symbol,market,date,close,volume\nU,M,2006-01-04,12,50\nU,M,2006-01-03,10,100\n",
    )
    .unwrap();
    let path = path.to_str().unwrap();
    let o = macrostate(&["compute", "--input", path, "--symbol", "U"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("NON_MONOTONE_DATES"));
    let o = macrostate(&["compute", "--input", path, "--symbol", "U", "--sort-dates"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"p_m\": -0.4"));
    std::fs::remove_dir_all(&dir).ok();
}
