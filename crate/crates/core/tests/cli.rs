use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coded-pc"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn config_arg(name: &str) -> String {
    configs().join(format!("{name}.toml")).display().to_string()
}

fn scratch(name: &str, contents: &str) -> String {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

fn csv_rows(out: &[u8]) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(out).records().map(Result::unwrap).collect()
}

#[test]
fn simulate_writes_rate_reports() {
    let out = run(&["simulate", "--config", &config_arg("motivating"), "--seed", "3", "--trials", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("variant,n,k,q,g,f,mu,v,seed,L,Hmin,D,rate_measured,rate_closed_form,converse\n"));
    let rows = csv_rows(text.as_bytes());
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert_eq!(&r[0], "plc");
        assert_eq!((&r[9], &r[11]), ("16", "24"));
        assert_eq!(&r[12], &r[13]);
    }
    let seeds: Vec<&str> = rows.iter().map(|r| &r[8]).collect();
    assert!(seeds.contains(&"3") && seeds.contains(&"4"));
}

#[test]
fn simulate_writes_to_out_file() {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join("example4.csv");
    let out = run(&["simulate", "--config", &config_arg("example4"), "--trials", "1", "--out", &path.display().to_string()]);
    assert!(out.status.success());
    let rows = csv_rows(&std::fs::read(&path).unwrap());
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[11] == "120" && &r[9] == "54"));
}

#[test]
fn rates_lists_every_message_count() {
    let out = run(&["rates", "--config", &config_arg("fig4a")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 8);
    assert_eq!(&rows[0][13], "0.386253443");
    assert_eq!(&rows[0][14], "0.579380164");
    assert_eq!(&rows[1][13], "0.237915474");
}

#[test]
fn verify_passes_on_examples() {
    for name in ["motivating", "example2", "example3", "example4"] {
        let out = run(&["verify", "--config", &config_arg(name)]);
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{name}: {text}");
        assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
    }
}

#[test]
fn corrupted_rate_matrix_exits_with_invariant_code() {
    let cfg = std::fs::read_to_string(configs().join("example2.toml")).unwrap().replace("\"1010\", \"0101\"", "\"1100\", \"0011\"");
    let path = scratch("corrupted.toml", &cfg);
    let out = run(&["verify", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL rate_matrix"));
}

#[test]
fn validation_errors_exit_with_one() {
    let path = scratch("unknown_key.toml", "[scheme]\nvariant = \"plc\"\nn = 2\nk = 1\nq = 3\ncolour = 1\n");
    assert_eq!(run(&["verify", "--config", &path]).status.code(), Some(1));
    assert_eq!(run(&["simulate"]).status.code(), Some(1));
    assert_eq!(run(&["figure", "--figure", "fig9"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--config", &config_arg("motivating"), "--trials", "0"]).status.code(), Some(1));
}

#[test]
fn figure_csv_has_both_sources() {
    let out = run(&["figure", "--figure", "fig5a"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("figure,x,series,value,source\n"));
    let rows = csv_rows(text.as_bytes());
    assert!(rows.iter().any(|r| &r[4] == "computed"));
    assert!(rows.iter().any(|r| &r[4] == "paper_fixture"));
    assert!(rows.iter().all(|r| &r[0] == "fig5a"));
}
