use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxinfer"))
}

fn write_csv(path: &Path, rows: &[Vec<f64>]) {
    let body: String = rows
        .iter()
        .map(|r| r.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    fs::write(path, body).unwrap();
}

fn lcg_rows(n: usize, p: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut s = seed;
    (0..n)
        .map(|_| {
            (0..p)
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
                })
                .collect()
        })
        .collect()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn quantile_prints_json() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data.csv");
    write_csv(&data, &lcg_rows(40, 4, 1));
    let (code, out, _) = run(&["quantile", "--input", data.to_str().unwrap(), "--alpha", "0.95", "--reps", "1000", "--seed", "7"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["replications"], 1000);
    assert_eq!(v["level"], 0.95);
    let (_, again, _) = run(&["quantile", "--input", data.to_str().unwrap(), "--alpha", "0.95", "--reps", "1000", "--seed", "7", "--threads", "2"]);
    assert_eq!(out, again);
}

#[test]
fn usage_and_data_errors_have_distinct_codes() {
    let (code, _, err) = run(&["quantile", "--bogus"]);
    assert_eq!(code, 1);
    assert!(err.contains("Usage"));
    assert_eq!(run(&["frobnicate"]).0, 1);
    let (code, _, err) = run(&["quantile", "--input", "/nonexistent.csv", "--alpha", "0.9"]);
    assert_eq!(code, 2);
    assert_eq!(err.lines().count(), 1);
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d.csv");
    write_csv(&data, &lcg_rows(10, 2, 3));
    assert_eq!(run(&["quantile", "--input", data.to_str().unwrap(), "--alpha", "1.5"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn dantzig_writes_result_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("reg.csv");
    let mut rows = lcg_rows(60, 6, 5);
    for r in rows.iter_mut() {
        r[0] = 2.0 * r[1] + 0.1 * r[0];
    }
    write_csv(&data, &rows);
    let out = tmp.path().join("out");
    let (code, stdout, err) = run(&[
        "dantzig", "--input", data.to_str().unwrap(), "--normalize", "--penalty", "mb", "--sigma", "0.5",
        "--reps", "500", "--seed", "3", "--residual-mode", "ols", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["penalty_kind"], "multiplier_bootstrap");
    assert_eq!(v["status"], "optimal");
    assert!(v["beta_hat"][0].as_f64().unwrap() > 0.5);
    assert!(out.join("config.json").exists());
    assert!(fs::read_to_string(out.join("coefficients.csv")).unwrap().starts_with("j,beta_hat\n"));
    let (code, _, _) = run(&["dantzig", "--input", data.to_str().unwrap(), "--penalty", "canonical", "--sigma", "1"]);
    assert_eq!(code, 2, "unnormalized design must be rejected");
}

#[test]
fn stepdown_and_spectest_run() {
    let tmp = tempfile::tempdir().unwrap();
    let infl = tmp.path().join("infl.csv");
    let est = tmp.path().join("est.csv");
    write_csv(&infl, &lcg_rows(50, 3, 8));
    write_csv(&est, &[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.01, 0.0]]);
    let out = tmp.path().join("sd");
    let (code, stdout, err) = run(&[
        "stepdown", "--influence", infl.to_str().unwrap(), "--estimates", est.to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["rejected"][0], true);
    assert_eq!(v["rejected"][1], false);
    assert!(fs::read_to_string(out.join("hypotheses.csv")).unwrap().starts_with("j,t_stat,rejected,step\n"));

    let data = tmp.path().join("spec.csv");
    let rows: Vec<Vec<f64>> = lcg_rows(80, 2, 9)
        .into_iter()
        .map(|r| vec![r[1] * 3.0 + 0.3 * r[0], 1.0, r[1]])
        .collect();
    write_csv(&data, &rows);
    let (code, stdout, err) = run(&["spectest", "--input", data.to_str().unwrap(), "--family", "bspline", "--size", "6", "--reps", "300"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["statistic"].as_f64().unwrap() >= 0.0);
}

#[test]
fn montecarlo_is_byte_identical_across_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("fwer.json");
    fs::write(
        &cfg,
        r#"{"kind":"fwer","n":60,"true_nulls":8,"false_nulls":2,"effect":5.0,"rho":0.5,"alpha":0.05,"reps":20,"bootstrap_reps":200,"seed":4}"#,
    )
    .unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(run(&["montecarlo", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap(), "--threads", "1"]).0, 0);
    assert_eq!(run(&["--threads", "3", "montecarlo", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap()]).0, 0);
    assert_eq!(dir_bytes(&a), dir_bytes(&b));
    let header = fs::read_to_string(a.join("fwer.csv")).unwrap();
    assert!(header.starts_with("n,true_nulls,false_nulls,effect,rho,alpha,reps,fwer,se,power,mean_steps\n"));
}
