use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nlaffine::io::read_table;
use nlaffine::pricing::PricingResult;
use serde_json::{json, Value};
use tempfile::TempDir;

const FIG2_MODEL: &str = r#"{"b0_lo": 0.05, "b0_hi": 0.15, "b1_lo": -1, "b1_hi": -0.5,
    "a0_lo": 0, "a0_hi": 0.08, "a1_lo": 0, "a1_hi": 0.2, "domain": "R"}"#;

fn cir_model() -> Value {
    json!({"b0_lo": 0.04, "b0_hi": 0.06, "b1_lo": -1, "b1_hi": -0.5,
           "a0_lo": 0, "a0_hi": 0, "a1_lo": 0.02, "a1_hi": 0.04, "domain": "R+"})
}

fn write_config(dir: &TempDir, name: &str, cfg: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn nlaffine(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlaffine"))
        .args(args)
        .arg("--config")
        .arg(config)
        .env("NLAFFINE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    read_table(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn validate_rejects_fig2_box_on_the_real_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "fig2.json", &json!({ "model": serde_json::from_str::<Value>(FIG2_MODEL).unwrap() }));
    let o = nlaffine(&["validate"], &cfg);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("a0_lo=0 outside Lipschitz uniqueness regime"), "{}", stderr(&o));

    let forced = nlaffine(&["validate", "--force"], &cfg);
    assert_eq!(forced.status.code(), Some(0));
}

#[test]
fn validate_accepts_cir() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "cir.json", &json!({ "model": cir_model() }));
    let o = nlaffine(&["validate"], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("Degenerate"));
}

#[test]
fn reversed_interval_is_a_config_error_unless_sorted() {
    let dir = TempDir::new().unwrap();
    let mut model = cir_model();
    model["a1_lo"] = json!(0.04);
    model["a1_hi"] = json!(0.02);
    let cfg = write_config(&dir, "rev.json", &json!({ "model": model }));
    assert_eq!(nlaffine(&["validate"], &cfg).status.code(), Some(2));

    model["sort_endpoints"] = json!(true);
    let cfg = write_config(&dir, "sorted.json", &json!({ "model": model }));
    let o = nlaffine(&["validate"], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn malformed_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.json", &json!({ "model": cir_model(), "colour": "red" }));
    assert_eq!(nlaffine(&["validate"], &cfg).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(nlaffine(&["price"], &missing).status.code(), Some(2));
}

#[test]
fn regime_and_domain_errors_have_their_own_codes() {
    let dir = TempDir::new().unwrap();
    let vasicek = json!({"b0_lo": 0.1, "b0_hi": 0.1, "b1_lo": -1, "b1_hi": -0.5,
                         "a0_lo": 0.01, "a0_hi": 0.01, "a1_lo": 0, "a1_hi": 0, "domain": "R"});
    // x0 < 0 leaves the region where the corner ODE is the true bound
    let cfg = write_config(
        &dir,
        "regime.json",
        &json!({ "model": vasicek, "payoff": {"kind": "exponential", "u": 1.0}, "x0": -0.5, "horizon": 1, "method": "riccati" }),
    );
    assert_eq!(nlaffine(&["price"], &cfg).status.code(), Some(3));

    let cfg = write_config(
        &dir,
        "domain.json",
        &json!({ "model": cir_model(), "payoff": {"kind": "call", "strike": 0.05}, "x0": -0.1, "horizon": 1 }),
    );
    assert_eq!(nlaffine(&["price"], &cfg).status.code(), Some(2));
}

#[test]
fn bond_curve_of_a_degenerate_box_has_equal_columns() {
    let dir = TempDir::new().unwrap();
    let model = json!({"b0_lo": 0.1, "b0_hi": 0.1, "b1_lo": -0.8, "b1_hi": -0.8,
                       "a0_lo": 0.01, "a0_hi": 0.01, "a1_lo": 0, "a1_hi": 0, "domain": "R"});
    let maturities: Vec<f64> = (1..=10).map(f64::from).collect();
    let cfg = write_config(&dir, "bond.json", &json!({ "model": model, "x0": 0.05, "maturities": maturities }));
    let out = dir.path().join("bond.csv");
    let o = nlaffine(&["bond-curve", "--out", out.to_str().unwrap()], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("maturity=10 upper="), "{stdout}");

    let text = std::fs::read_to_string(&out).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(r.headers().unwrap(), vec!["maturity", "p_upper", "p_lower", "method"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    for (i, row) in rows.iter().enumerate() {
        let t: f64 = row[0].parse().unwrap();
        let up: f64 = row[1].parse().unwrap();
        let down: f64 = row[2].parse().unwrap();
        assert_eq!(t, (i + 1) as f64);
        assert!((up - down).abs() <= 1e-6);
        assert!(up > 0.0 && up < 1.0);
    }
}

#[test]
fn model_risk_on_the_call_study_has_41_rows() {
    let dir = TempDir::new().unwrap();
    // a0 endpoints given in table order, sorted on load
    let model = json!({"b0_lo": 0.019, "b0_hi": 0.026, "b1_lo": -0.11, "b1_hi": 0.0,
                       "a0_lo": 0.017, "a0_hi": 0.0003, "a1_lo": 0, "a1_hi": 0, "domain": "R",
                       "sort_endpoints": true});
    let cfg = write_config(
        &dir,
        "risk.json",
        &json!({ "model": model, "payoff": {"kind": "call", "strike": 0.1},
                 "x0_grid": {"from": -0.5, "to": 1.5, "step": 0.05}, "horizon": 1 }),
    );
    let out = dir.path().join("risk.csv");
    let o = nlaffine(&["model-risk", "--out", out.to_str().unwrap()], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));

    let text = std::fs::read_to_string(&out).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 41);
    for row in &rows {
        let up: f64 = row[1].parse().unwrap();
        let down: f64 = row[2].parse().unwrap();
        let mu: f64 = row[3].parse().unwrap();
        assert!(up >= down - 1e-12);
        assert!((mu - (up - down)).abs() < 1e-10);
        assert_eq!(&row[4], "PDE");
    }
}

#[test]
fn mc_and_pde_agree_on_cir() {
    let dir = TempDir::new().unwrap();
    let base = json!({ "model": cir_model(), "payoff": {"kind": "call", "strike": 0.05}, "x0": 0.05, "horizon": 1,
                       "sim": {"n_paths": 40000} });
    let run = |method: &str| -> PricingResult {
        let mut cfg = base.clone();
        cfg["method"] = json!(method);
        let path = write_config(&dir, &format!("{method}.json"), &cfg);
        let out = dir.path().join(format!("{method}.out.json"));
        let o = nlaffine(&["price", "--out", out.to_str().unwrap()], &path);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(String::from_utf8_lossy(&o.stdout).starts_with("upper="));
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap()
    };
    let pde = run("pde");
    let mc = run("mc");
    let se_up = mc.diagnostics.mc_upper.unwrap().std_error;
    let se_down = mc.diagnostics.mc_lower.unwrap().std_error;
    // statistical error plus the discretisation error of both schemes
    assert!((mc.upper - pde.upper).abs() <= 4.0 * se_up + 0.02 * pde.upper, "{} vs {}", mc.upper, pde.upper);
    assert!((mc.lower - pde.lower).abs() <= 4.0 * se_down + 0.05 * pde.lower, "{} vs {}", mc.lower, pde.lower);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "det.json",
        &json!({ "model": cir_model(), "payoff": {"kind": "call", "strike": 0.05}, "x0": 0.05, "horizon": 1,
                 "method": "mc", "sim": {"n_paths": 4000, "n_steps": 50}, "seed": 7 }),
    );
    let read = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["price", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(nlaffine(&args, &cfg).status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    assert_eq!(read("a.json", &[]), read("b.json", &[]));
    assert_ne!(read("c.json", &[]), read("d.json", &["--seed", "8"]));
}

#[test]
fn emitted_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let surface = dir.path().join("surface.csv");
    let cfg = write_config(
        &dir,
        "rt.json",
        &json!({ "model": cir_model(), "payoff": {"kind": "call", "strike": 0.05},
                 "x0_grid": {"from": 0.02, "to": 0.1, "step": 0.02}, "horizon": 0.5,
                 "output": {"surface": surface} }),
    );
    let json_out = dir.path().join("p.json");
    assert_eq!(nlaffine(&["price", "--out", json_out.to_str().unwrap()], &cfg).status.code(), Some(0));
    let results: Vec<PricingResult> = serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(results.len(), 5);
    let again = serde_json::to_string_pretty(&results).unwrap() + "\n";
    assert_eq!(again, std::fs::read_to_string(&json_out).unwrap());

    let (header, rows) = table(&surface);
    assert_eq!(header, vec!["t", "x", "value"]);
    assert!(rows.iter().all(|r| r.len() == 3 && r[2] >= 0.0));

    let csv_out = dir.path().join("p.csv");
    let o = nlaffine(&["price", "--format", "csv", "--out", csv_out.to_str().unwrap()], &cfg);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv_out).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    for (row, res) in r.records().map(Result::unwrap).zip(&results) {
        let up: f64 = row[1].parse().unwrap();
        assert!((up - res.upper).abs() <= 1e-11 * res.upper.abs().max(1.0));
    }
}

#[test]
fn riccati_export() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "ric.json",
        &json!({ "riccati": {"b0": 0.05, "b1": -0.5, "a0": 0, "a1": 0.03, "horizon": 2, "mode": "bond", "steps": 400} }),
    );
    let out = dir.path().join("ric.csv");
    let o = nlaffine(&["riccati", "--out", out.to_str().unwrap()], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&out);
    assert_eq!(header, vec!["t", "phi", "psi"]);
    assert_eq!(rows.len(), 401);
    assert_eq!(rows[0], vec![0.0, 0.0, 0.0]);
    // bond: psi' = b1 psi + a1 psi²/2 - 1 < 0 at the start, so psi decreases
    assert!(rows[400][2] < 0.0 && rows[400][1] < 0.0);
}

#[test]
fn figure_writes_dataset_and_metadata() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "fig.json", &json!({}));
    let out = dir.path().join("fig1.csv");
    let o = nlaffine(&["figure", "fig1", "--out", out.to_str().unwrap()], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&out);
    assert_eq!(&header[..4], &["x0", "upper", "lower", "reference_model"]);
    assert_eq!(rows.len(), 41);
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig1.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["name"], "fig1");
    assert!(!meta["metadata"].as_array().unwrap().is_empty());

    assert_eq!(nlaffine(&["figure", "fig9"], &cfg).status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "cir.json", &json!({ "model": cir_model() }));
    let o = Command::new(env!("CARGO_BIN_EXE_nlaffine"))
        .args(["validate", "--config"])
        .arg(&cfg)
        .env("NLAFFINE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
