use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn periods(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_periods"))
        .args(args)
        .arg("--out")
        .arg(dir.join("out"))
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

/// Data rows of a CSV output, without the stamp and header lines.
fn data_rows(text: &str) -> Vec<&str> {
    text.lines().skip(2).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    dir.join(name).display().to_string()
}

#[test]
fn enumerate_lists_generators_then_length_two() {
    let tmp = TempDir::new().unwrap();
    let out = periods(tmp.path(), &["enumerate", "--max-len", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(tmp.path(), "classes.csv");
    assert!(csv.starts_with("# schema_version=1; config_hash="));
    let words: Vec<_> = data_rows(&csv).iter().map(|r| r.split(',').nth(3).unwrap().to_string()).collect();
    assert_eq!(words, ["a", "A", "b", "B"]);

    let out = periods(tmp.path(), &["enumerate", "--max-len", "2"]);
    assert!(out.status.success());
    assert_eq!(data_rows(&read(tmp.path(), "classes.csv")).len(), 12);
    let meta = read(tmp.path(), "enumerate.meta.json");
    assert!(meta.contains("\"letter_order\": \"a < A < b < B\""));
}

#[test]
fn unknown_config_key_is_named() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "bad.toml", "[enumeration]\nmax_lenght = 4\n");
    let out = periods(tmp.path(), &["enumerate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_lenght"));
}

#[test]
fn spectra_is_reproducible_byte_for_byte() {
    let tmp = TempDir::new().unwrap();
    let run = || {
        let out = periods(tmp.path(), &["spectra", "--max-len", "6", "--workers", "2"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        read(tmp.path(), "spectra.csv")
    };
    let first = run();
    assert_eq!(first, run());
    let header = first.lines().nth(1).unwrap();
    assert_eq!(
        header,
        "class_id,word,length,rotation,proximal,prox_gap,jordan_period_length,jordan_period_chi1,\
         cartan_value_length,cartan_value_chi1,class_gromov_length,class_gromov_chi1,\
         cert_r_value,cert_eps,cert_proximal,cert_method,cert_failed"
    );
}

#[test]
fn missing_representation_file_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[representation]\nfamily = \"file\"\npath = \"nowhere.toml\"\n");
    let out = periods(tmp.path(), &["spectra", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_unimodular_generator_is_rejected_before_any_work() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "rep.toml", "label = \"bad\"\ndim = 2\n[[generators]]\nmatrix = [1.1, 0.0, 0.0, 1.0]\n");
    let cfg = write(tmp.path(), "c.toml", "[representation]\nfamily = \"file\"\npath = \"rep.toml\"\n");
    let out = periods(tmp.path(), &["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!tmp.path().join("out/verify.json").exists());
}

#[test]
fn small_verify_run_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "c.toml",
        "[verify]\nrandom_instances = 20\ndims = [2, 3]\nclass_max_len = 5\nclass_sym_powers = [1, 2]\npower_samples = 5\n",
    );
    let out = periods(tmp.path(), &["verify", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "verify.json")).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn synthetic_clt_matches_the_gaussian() {
    let tmp = TempDir::new().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/synthetic.toml");
    let out = periods(tmp.path(), &["clt", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "clt.json")).unwrap();
    let last = report["clt_jordan"]["points"].as_array().unwrap().last().unwrap().clone();
    assert!(last["ks"].as_f64().unwrap() < 0.05, "{last}");
    assert_eq!(data_rows(&read(tmp.path(), "clt_histogram.csv")).len(), 32);
}

#[test]
fn single_point_grid_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[clt]\nt_grid = [5.0]\n");
    let out = periods(tmp.path(), &["clt", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

/// In `SL(2)` the observed weight is half the length, so the fluctuations vanish.
#[test]
fn default_clt_in_sl2_is_degenerate() {
    let tmp = TempDir::new().unwrap();
    let out = periods(tmp.path(), &["clt", "--max-len", "10"]);
    assert_eq!(out.status.code(), Some(5), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("out/clt.json").exists());
}
