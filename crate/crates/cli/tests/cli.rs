use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chur::grid::GridSpec;
use chur::states::{make_gaussian, GaussianSpec};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_chur");

fn chur(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).env_remove("CHUR_DEFAULT_CONFIG").args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_table(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn summary_value(dir: &Path, file: &str, key: &str) -> String {
    let text = fs::read_to_string(dir.join(file)).unwrap();
    let prefix = format!("{key}: ");
    text.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("{key} missing")).to_string()
}

const SMALL_VERIFY: &str = "[verify]\nn_states = 5\nlambda_points = 11\n";

#[test]
fn default_verify_passes() {
    let tmp = TempDir::new().unwrap();
    let out = chur(tmp.path(), &["verify", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_table(&tmp.path().join("o/verify.csv"));
    assert_eq!(rows.len(), 101);
    assert_eq!(summary_value(&tmp.path().join("o"), "verify_summary.txt", "violations"), "0");
}

#[test]
fn self_test_forces_failure() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL_VERIFY);
    let out = chur(tmp.path(), &["verify", "--config", &cfg, "--self-test", "--out", "o"]);
    assert_eq!(out.status.code(), Some(1));
    let summary = fs::read_to_string(tmp.path().join("o/verify_summary.txt")).unwrap();
    assert!(summary.contains("verdict: FAIL"));
    assert!(summary.contains("bound_scale = 0.4"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[verify]\nn_stats = 5\n");
    let out = chur(tmp.path(), &["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_stats"));
}

#[test]
fn malformed_and_invalid_configs_exit_2() {
    let tmp = TempDir::new().unwrap();
    for text in ["seed = [", "[grid]\nlength = -1.0\n", "[mask]\nkappa = -1.0\n", "[qubit]\nshots = 1\n"] {
        let cfg = write_config(tmp.path(), text);
        let out = chur(tmp.path(), &["mask", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn missing_inputs_exit_2() {
    let tmp = TempDir::new().unwrap();
    let out = chur(tmp.path(), &["verify", "--config", "absent.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let cfg = write_config(tmp.path(), "[sweep]\nstate = { kind = \"file\", path = \"absent.txt\" }\n");
    assert_eq!(chur(tmp.path(), &["sweep", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(tmp.path(), "[mask]\nshape = { kind = \"tabulated\", path = \"absent.txt\" }\n");
    assert_eq!(chur(tmp.path(), &["mask", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn unknown_subcommand_exits_2() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(chur(tmp.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_from_environment() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[figure1]\na_values = [1.0]\n");
    let out = Command::new(BIN)
        .current_dir(tmp.path())
        .env("CHUR_DEFAULT_CONFIG", &cfg)
        .args(["figure1", "--out", "o"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_table(&tmp.path().join("o/figure1.csv")).len(), 1);
}

#[test]
fn figure1_table() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(chur(tmp.path(), &["figure1", "--out", "o"]).status.code(), Some(0));
    let rows = read_table(&tmp.path().join("o/figure1.csv"));
    assert_eq!(rows.len(), 50);
    let parsed: Vec<[f64; 3]> = rows.iter().map(|r| [0, 1, 2].map(|i| r[i].parse().unwrap())).collect();
    for w in parsed.windows(2) {
        assert!(w[1][0] > w[0][0] && w[1][2] < w[0][2]);
    }
    for [a, b, lam] in parsed {
        assert!(lam <= b + 1e-9);
        assert!((lam - 2.0 * (-a / 2.0).exp()).abs() < 1e-6);
    }
}

#[test]
fn figure1_empty_grid_and_zero() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[figure1]\na_values = []\n");
    assert_eq!(chur(tmp.path(), &["figure1", "--config", &cfg, "--out", "o"]).status.code(), Some(0));
    let text = fs::read_to_string(tmp.path().join("o/figure1.csv")).unwrap();
    assert_eq!(text, "gamma,bound,gaussian_lambda\n");

    let cfg = write_config(tmp.path(), "[figure1]\na_values = [0.0]\n");
    assert_eq!(chur(tmp.path(), &["figure1", "--config", &cfg, "--out", "o"]).status.code(), Some(0));
    let rows = read_table(&tmp.path().join("o/figure1.csv"));
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 2.0);
    assert!((rows[0][2].parse::<f64>().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn sweep_from_state_file() {
    let tmp = TempDir::new().unwrap();
    let grid = GridSpec::new(2048, 30.0, 1.0, 0.0).unwrap();
    let state = make_gaussian(&GaussianSpec { sigma_x: 0.8, center_x: 1.0, center_p: -0.5 }, &grid).unwrap();
    chur::io::write_state(&tmp.path().join("psi.txt"), &state).unwrap();
    let cfg = write_config(tmp.path(), "[sweep]\nstate = { kind = \"file\", path = \"psi.txt\" }\nlambda_points = 5\n");
    let out = chur(tmp.path(), &["sweep", "--config", &cfg, "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let header = fs::read_to_string(tmp.path().join("o/sweep.csv")).unwrap();
    assert!(header.starts_with(
        "lambda_x,lambda_p,gamma,abs_phi,abs_phi_tilde,capital_lambda,bound,margin,abs_omega,gram_det\n"
    ));
    assert_eq!(read_table(&tmp.path().join("o/sweep.csv")).len(), 25);
    let chars = fs::read_to_string(tmp.path().join("o/sweep_char_position.csv")).unwrap();
    assert!(chars.starts_with("lambda,re,im,abs\n"));
    assert_eq!(summary_value(&tmp.path().join("o"), "sweep_summary.txt", "state.grid"), "n=2048 L=30 hbar=1 center=0");
}

#[test]
fn mask_top_hat_and_periodic() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(chur(tmp.path(), &["mask", "--out", "o"]).status.code(), Some(0));
    let dir = tmp.path().join("o");
    let lhs: f64 = summary_value(&dir, "mask_summary.txt", "lhs").parse().unwrap();
    let rhs: f64 = summary_value(&dir, "mask_summary.txt", "rhs").parse().unwrap();
    assert!(lhs <= rhs && rhs <= 2.0);
    for row in read_table(&dir.join("mask_profile.csv")) {
        let q: f64 = row[1].parse().unwrap();
        assert!((-1e-12..=1.0 + 1e-12).contains(&q));
    }

    let cfg = write_config(tmp.path(), "[mask]\nshape = { kind = \"periodic\", period = 2.0, duty = 0.5 }\ny_min = 0.0\ny_max = 2.0\ny_points = 5\n");
    assert_eq!(chur(tmp.path(), &["mask", "--config", &cfg, "--out", "p"]).status.code(), Some(0));
    let p = tmp.path().join("p");
    assert!(summary_value(&p, "mask_summary.txt", "mask_relation").starts_with("not applicable"));
    assert_eq!(read_table(&p.join("mask_profile.csv")).len(), 5);
}

#[test]
fn mask_tabulated_amplitude() {
    let tmp = TempDir::new().unwrap();
    let mut table = String::new();
    for i in 0..=200 {
        let x = -2.0 + 0.02 * i as f64;
        let a = (-x * x).exp();
        table.push_str(&format!("{x} {} {}\n", a * (0.7 * x).cos(), a * (0.7 * x).sin()));
    }
    fs::write(tmp.path().join("mask.txt"), table).unwrap();
    let cfg = write_config(
        tmp.path(),
        "[mask]\nshape = { kind = \"tabulated\", path = \"mask.txt\" }\nresponse = \"amplitude\"\nkappa = 1.5\n",
    );
    let out = chur(tmp.path(), &["mask", "--config", &cfg, "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn qubit_exact_and_sampled() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(chur(tmp.path(), &["qubit", "--out", "o"]).status.code(), Some(0));
    let rows = read_table(&tmp.path().join("o/qubit.csv"));
    assert_eq!(rows.len(), 21);
    for r in &rows {
        let l: f64 = r[0].parse().unwrap();
        let re: f64 = r[5].parse().unwrap();
        // ground Gaussian with σx = 1 has σp = 1/2, so Φ̃(λ) = exp(−λ²/8)
        assert!((re - (-l * l / 8.0).exp()).abs() < 1e-10);
        assert_eq!(r[7], "0.0");
    }
    let cfg = write_config(tmp.path(), "[qubit]\nshots = 10000\npoints = 5\n");
    assert_eq!(chur(tmp.path(), &["qubit", "--config", &cfg, "--out", "s"]).status.code(), Some(0));
    assert_eq!(summary_value(&tmp.path().join("s"), "qubit_summary.txt", "sampling_within_limit"), "pass");
}

#[test]
fn finite_dim_qubit_saturates() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[finite_dim]\ndimensions = [2, 5]\nsamples = 20000\n");
    assert_eq!(chur(tmp.path(), &["finite-dim", "--config", &cfg, "--out", "o"]).status.code(), Some(0));
    let rows = read_table(&tmp.path().join("o/finite_dim.csv"));
    assert_eq!(rows[0][0], "2");
    assert!(rows[0][2].parse::<f64>().unwrap() > 0.999);
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn lqc_rows() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(chur(tmp.path(), &["lqc", "--out", "o"]).status.code(), Some(0));
    let rows = read_table(&tmp.path().join("o/lqc.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[5] == "true" && r[8] == "true" && r[6].parse::<f64>().unwrap() == 1.0));
}

#[test]
fn tightness_gaussian_small_gamma() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[tightness]\ngammas = [0.2, 0.2, 1.0]\nrestarts = 2\nmax_evaluations = 200\n");
    assert_eq!(chur(tmp.path(), &["tightness", "--config", &cfg, "--out", "o"]).status.code(), Some(0));
    let rows = read_table(&tmp.path().join("o/tightness.csv"));
    assert_eq!(rows.len(), 2);
    let best: f64 = rows[0][2].parse().unwrap();
    assert!((best - 2.0 * (-0.1f64).exp()).abs() < 1e-6);
    assert_eq!(rows[0][4], "gaussian");
    assert!(rows[0][5].starts_with("{\"sigma"));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "seed = 11\n[verify]\nn_states = 6\nlambda_points = 7\n[qubit]\nshots = 1000\npoints = 4\n[finite_dim]\ndimensions = [3]\nsamples = 3000\n",
    );
    for (dir, workers) in [("a", "1"), ("b", "1"), ("c", "3")] {
        for cmd in ["verify", "qubit", "finite-dim"] {
            let out = chur(tmp.path(), &[cmd, "--config", &cfg, "--out", dir, "--workers", workers]);
            assert_eq!(out.status.code(), Some(0));
        }
    }
    let names: Vec<_> = fs::read_dir(tmp.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 6);
    for name in names {
        let a = fs::read(tmp.path().join("a").join(&name)).unwrap();
        // summaries record the worker count, so only tables compare across it
        let others: &[&str] = if name.to_string_lossy().ends_with(".csv") { &["b", "c"] } else { &["b"] };
        for other in others {
            let b = fs::read(tmp.path().join(other).join(&name)).unwrap();
            assert!(a == b, "{name:?} differs in {other}");
        }
    }
}

#[test]
fn summary_embeds_version_and_overrides() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[figure1]\na_values = [0.5]\n");
    let out = chur(tmp.path(), &["figure1", "--config", &cfg, "--grid-n", "2048", "--grid-length", "30", "--hbar", "0.5", "--seed", "9", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(tmp.path().join("o/figure1_summary.txt")).unwrap();
    assert!(text.starts_with(&format!("tool: chur {}\ncommand: figure1\nverdict: pass\n", env!("CARGO_PKG_VERSION"))));
    for needle in ["seed = 9", "n_points = 2048", "length = 30.0", "hbar = 0.5", "a_values = [0.5]"] {
        assert!(text.contains(needle), "{needle}");
    }
}
