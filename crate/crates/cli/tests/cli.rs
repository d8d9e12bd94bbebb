use std::collections::HashMap;
use std::process::{Command, Output};

fn eqtrap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqtrap")).args(args).output().expect("binary runs")
}

fn rows(out: &Output) -> Vec<HashMap<String, String>> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            header.iter().map(String::from).zip(r.iter().map(String::from)).collect()
        })
        .collect()
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {}", row[key]))
}

#[test]
fn figure1_is_byte_identical_across_runs() {
    let args = ["figure1", "--beta-omega", "0.003,0.01", "--steps", "21"];
    let a = eqtrap(&args);
    let b = eqtrap(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains(&b'\r'));
}

#[test]
fn figure1_resonant_row() {
    let out = eqtrap(&["figure1", "--beta-omega", "0.01", "--delta-max", "0", "--steps", "1"]);
    let rows = rows(&out);
    assert_eq!(rows.len(), 1);
    let want = 0.25 * (1.0 - (-0.01f64).exp());
    assert!((num(&rows[0], "trap_measure") - want).abs() < 1e-12);
    assert!((num(&rows[0], "trap_measure") - 2.488e-3).abs() < 1e-6);
    assert!((num(&rows[0], "eq_bound_rhs") - 0.050).abs() < 0.002);
}

#[test]
fn header_order_is_fixed() {
    let out = eqtrap(&["figure2", "--steps", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "beta_omega,delta,g,trap_measure,trap_measure_inf,corr_D,bath_shift_D,bound_total,eq_bound_rhs,\
         maximizer_x,maximizer_y,maximizer_z,converged,gap_report"
    );
}

#[test]
fn figure2_bound_dominates_trapping() {
    let out = eqtrap(&["figure2", "--steps", "26"]);
    let rows = rows(&out);
    assert_eq!(rows.len(), 26);
    for row in &rows {
        assert!(num(row, "bound_total") + 1e-9 >= num(row, "trap_measure"));
    }
    assert!(num(&rows[0], "bound_total") > 0.0);
}

#[test]
fn uncoupled_figure2_has_no_trapping() {
    let out = eqtrap(&["figure2", "--g", "0", "--steps", "5"]);
    for row in rows(&out) {
        assert_eq!(num(&row, "trap_measure"), 0.0);
        assert_eq!(num(&row, "trap_measure_inf"), 0.0);
    }
}

#[test]
fn fixed_cutoff_is_accepted() {
    let out = eqtrap(&["figure2", "--n-max", "10", "--beta-omega", "1", "--steps", "3"]);
    assert_eq!(rows(&out).len(), 3);
}

#[test]
fn json_mirrors_csv() {
    let args = ["figure2", "--steps", "3"];
    let csv_rows = rows(&eqtrap(&args));
    let json = eqtrap(&[&args[..], &["--format", "json"]].concat());
    let records: Vec<serde_json::Map<String, serde_json::Value>> = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(records.len(), csv_rows.len());
    for (rec, row) in records.iter().zip(&csv_rows) {
        let mut keys: Vec<_> = rec.keys().cloned().collect();
        let mut want: Vec<_> = row.keys().cloned().collect();
        keys.sort();
        want.sort();
        assert_eq!(keys, want);
        let t = rec["trap_measure"].as_f64().unwrap();
        assert!((t - num(row, "trap_measure")).abs() <= 1e-11 * t.abs().max(1e-300));
    }
}

#[test]
fn two_band_equal_bands() {
    let out = eqtrap(&["two-band", "--n1", "100", "--n2", "100", "--steps", "11"]);
    for row in rows(&out) {
        assert!((num(&row, "trap_measure") - 0.25).abs() < 1e-12);
        assert!((num(&row, "trap_measure_inf") - 0.5).abs() < 1e-12);
        assert!(num(&row, "decay_rate") >= 0.0);
        assert!(num(&row, "dephasing_rate") >= 0.0);
    }
}

#[test]
fn random_bound_rows_satisfy_the_bound() {
    let out = eqtrap(&["random-bound", "--d-b", "6", "--trials", "8", "--samples", "400", "--seed", "3"]);
    let rows = rows(&out);
    assert_eq!(rows.len(), 8);
    for row in &rows {
        assert_eq!(row["satisfied"], "true");
        assert!(num(row, "mc_average_distance") <= num(row, "eq_bound_rhs"));
    }
}

#[test]
fn writes_to_file() {
    let dir = std::env::temp_dir().join(format!("eqtrap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig2.csv");
    let out = eqtrap(&["figure2", "--steps", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let stdout = eqtrap(&["figure2", "--steps", "4"]).stdout;
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(eqtrap(&["figure1", "--delta-min", "3", "--delta-max", "1"]).status.code(), Some(2));
    assert_eq!(eqtrap(&["figure1", "--steps", "0"]).status.code(), Some(2));
    assert_eq!(eqtrap(&["figure2", "--model", "two-band"]).status.code(), Some(2));
    assert_eq!(eqtrap(&["figure2", "--beta-omega", "-1"]).status.code(), Some(2));
    assert_eq!(eqtrap(&["two-band", "--n1", "0"]).status.code(), Some(2));
    assert_eq!(eqtrap(&["figure1", "--n-max", "many"]).status.code(), Some(2));
}

#[test]
fn validate_passes_on_a_clean_build() {
    let out = eqtrap(&["validate"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}
