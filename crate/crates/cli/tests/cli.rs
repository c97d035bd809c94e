use klsum_cli::{run, CSV_HEADER, EXIT_ASSERTION, EXIT_CONFIG, EXIT_OK, SIEVE_CAP_ENV};
use std::path::Path;
use std::process::Command;

fn klsum(args: &[&str], out: &Path) -> (i32, String) {
    let mut argv = vec!["klsum"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let code = run(argv);
    (code, std::fs::read_to_string(out).unwrap_or_default())
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
}

#[test]
fn sum_small_example() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = klsum(&["sum", "--f", "mobius", "--q", "5", "--a", "1", "--n", "3"], &dir.path().join("o"));
    assert_eq!(code, EXIT_OK);
    assert_eq!(field(&text, "value"), "(1.92705098312, 0.951056516295)");
    assert!(field(&text, "modulus").starts_with("2.148961"));
    assert_eq!(field(&text, "terms"), "3");
}

#[test]
fn sum_json_and_random_twist() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = klsum(
        &["sum", "--f", "rand:3", "--q", "1000", "--a", "rand:9", "--n", "500", "--format", "json"],
        &dir.path().join("o"),
    );
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let a = v["a"].as_i64().unwrap();
    assert!(a > 0 && a < 1000 && a % 2 != 0 && a % 5 != 0);
    assert!(v["modulus"].as_f64().unwrap() <= 500.0);
}

#[test]
fn bands_for_a_million() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = klsum(&["bands", "--n", "1000000"], &dir.path().join("o"));
    assert_eq!(code, EXIT_OK);
    assert!(field(&text, "d0").starts_with("1.6576"));
    assert!(field(&text, "D0").starts_with("5.246"));
    assert!(field(&text, "d1").starts_with("2.7477"));
    assert!(field(&text, "D1").starts_with("15.607"));
    assert!(text.contains("default band range empty"));

    let (_, text) = klsum(&["bands", "--n", "1000", "--bands", "8,21,55"], &dir.path().join("p"));
    assert!(text.contains("band 0 = [8, 21) primes = 4"));
    assert!(text.contains("band 1 = [21, 55) primes = 8"));
}

#[test]
fn identity_single_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = klsum(
        &["identity", "--f", "rand:42", "--q", "13", "--a", "3", "--n", "10000", "--bands", "8,21,55"],
        &dir.path().join("o"),
    );
    assert_eq!(code, EXIT_OK);
    let residual: f64 = field(&text, "max relative identity residual").parse().unwrap();
    assert!(residual < 1e-9);
}

#[test]
fn report_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = klsum(&["lemma2", "--q", "7,1", "--b", "1,-1,0"], &dir.path().join("o"));
    assert_eq!(code, EXIT_OK);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 3 * 5);
    assert!(rows.iter().all(|r| r.len() == 15 && r[0] == "lemma2"));
    // sorted by (N, q, a)
    let keys: Vec<(u64, u64, i64)> = rows
        .iter()
        .map(|r| (r[2].parse().unwrap(), r[3].parse().unwrap(), r[4].parse().unwrap()))
        .collect();
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    // the complete range (0, 7] with b = 1
    let cell = rows.iter().find(|r| r[3] == "7" && r[4] == "1" && r[7] == "(0;7]").unwrap();
    assert_eq!(cell[8], "1");
    assert!(cell[13].starts_with("0.2128"));
}

#[test]
fn report_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = klsum(&["gcd-pairs", "--q", "6", "--bands", "3,12", "--format", "json"], &dir.path().join("o"));
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let row = &v.as_array().unwrap()[0];
    assert_eq!(row["kind"], "gcd_pairs");
    assert_eq!(row["lhs"], 20.0);
    assert!(row["flags"].is_array());
    let keys: Vec<&str> = row.as_object().unwrap().keys().map(String::as_str).collect();
    let mut want: Vec<&str> = CSV_HEADER.split(',').collect();
    want.sort_unstable();
    let mut got = keys.clone();
    got.sort_unstable();
    assert_eq!(got, want);
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "f = \"mobius\"\nn = 1000\nq = 1\na = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, text) = klsum(&["sum", "--config", cfg], &dir.path().join("a"));
    assert_eq!(code, EXIT_OK);
    // M(1000) = 2
    assert_eq!(field(&text, "value"), "(2, 0)");
    let (_, text) = klsum(&["sum", "--config", cfg, "--n", "10"], &dir.path().join("b"));
    // M(10) = -1
    assert_eq!(field(&text, "value"), "(-1, 0)");

    std::fs::write(dir.path().join("bad.toml"), "colour = 3\n").unwrap();
    let (code, _) = klsum(&["sum", "--config", dir.path().join("bad.toml").to_str().unwrap()], &dir.path().join("c"));
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(klsum(&["nonsense"], &out).0, EXIT_CONFIG);
    assert_eq!(klsum(&["sum", "--frobnicate", "1"], &out).0, EXIT_CONFIG);
    assert_eq!(klsum(&["sum", "--n", "10", "--q", "10", "--a", "2"], &out).0, EXIT_CONFIG);
    assert_eq!(klsum(&["sum", "--n", "10"], &out).0, EXIT_CONFIG);
    assert_eq!(klsum(&["sum", "--n", "10", "--q", "7", "--f", "zeta"], &out).0, EXIT_CONFIG);
    assert_eq!(klsum(&["lemma2", "--q", "7", "--format", "xml"], &out).0, EXIT_CONFIG);
    assert_eq!(klsum(&["cauchy", "--n", "100", "--q", "7", "--bands", "21,8"], &out).0, EXIT_CONFIG);
    assert_eq!(klsum(&["lemma2", "--q", "7", "--workers", "0"], &out).0, EXIT_CONFIG);
    assert_eq!(klsum(&["lemma2", "--q", "7", "--eps", "-1"], &out).0, EXIT_CONFIG);
}

#[test]
fn failed_assertion_exits_one() {
    // a constant of 0.01 pushes the complete-sum ratio far above the threshold
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = klsum(&["lemma2", "--q", "7", "--b", "1", "--c", "0.01"], &dir.path().join("o"));
    assert_eq!(code, EXIT_ASSERTION);
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["scan", "--f", "mobius,rand:2", "--n", "20000", "--q", "3,97,10007,400000001"];
    let (c1, one) = klsum(&[&args[..], &["--workers", "1"]].concat(), &dir.path().join("a"));
    let (c2, four) = klsum(&[&args[..], &["--workers", "4"]].concat(), &dir.path().join("b"));
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(one, four);
    assert_eq!(one.lines().count(), 1 + 2 * 4);
    let big = one.lines().find(|l| l.contains(",400000001,")).unwrap();
    assert!(big.contains("warning_q_range"));
}

#[test]
fn sieve_cap_from_environment() {
    let bin = env!("CARGO_BIN_EXE_klsum");
    let status = Command::new(bin)
        .args(["sum", "--n", "100000", "--q", "7"])
        .env(SIEVE_CAP_ENV, "1000")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&status.stderr).contains("1000"));
    let ok = Command::new(bin)
        .args(["sum", "--n", "500", "--q", "7"])
        .env(SIEVE_CAP_ENV, "1000")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("terms = 429"));
}

#[test]
fn lemma1_and_cauchy_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = klsum(&["lemma1", "--n", "10000"], &dir.path().join("a"));
    assert_eq!(code, EXIT_OK);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("lemma1,,10000,,,,,[5;12),6233,"));
    let (code, text) = klsum(
        &["cauchy", "--f", "mobius", "--bands", "8,21", "--n", "500", "--q", "13", "--a", "1"],
        &dir.path().join("b"),
    );
    assert_eq!(code, EXIT_OK);
    let ratio: f64 = text.lines().nth(1).unwrap().split(',').nth(13).unwrap().parse().unwrap();
    assert!(ratio <= 1.0);
}
