use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bpclt(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpclt"))
        .args(args)
        .env("BPCLT_OUT_DIR", out)
        .output()
        .unwrap()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL_CHAIN: &str = r#"{
  "name": "small_chain",
  "seeds": { "first": 42, "last": 44 },
  "experiment": {
    "kind": "chain",
    "n_vars": 7,
    "grid": { "n_bins": 128, "min": -32.0, "max": 31.0 },
    "kernel": { "type": "random_noise", "width_bins": 6 },
    "prior": { "type": "random_noise", "width_bins": 8 },
    "schedule": { "type": "exact" },
    "engine": "both"
  }
}"#;

#[test]
fn malformed_json_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(
        tmp.path(),
        "bad.json",
        "{ \"name\": \"x\",\n  \"seeds\": { \"first\": 1 \n",
    );
    for cmd in ["run", "validate"] {
        let o = bpclt(&[cmd, p.to_str().unwrap()], tmp.path());
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("line "));
    }
}

#[test]
fn even_patch_size_is_rejected_with_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("stereo_desk.json"))
        .unwrap()
        .replace("\"patch_size\": 5", "\"patch_size\": 4");
    let line = text.lines().position(|l| l.contains("patch_size")).unwrap() + 1;
    let p = write(tmp.path(), "even.json", &text);
    let o = bpclt(&["validate", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(&format!("line {line}: patch_size")), "{err}");
}

#[test]
fn empty_seed_range_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(
        tmp.path(),
        "empty.json",
        &SMALL_CHAIN.replace("\"last\": 44", "\"last\": 41"),
    );
    let o = bpclt(&["validate", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seeds"));
}

#[test]
fn unknown_field_and_out_of_range_prior_var_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let typo = write(tmp.path(), "typo.json", &SMALL_CHAIN.replace("\"n_vars\"", "\"n_var\""));
    assert_eq!(
        bpclt(&["validate", typo.to_str().unwrap()], tmp.path()).status.code(),
        Some(2)
    );
    let oob = write(
        tmp.path(),
        "oob.json",
        &SMALL_CHAIN.replace("\"n_vars\": 7,", "\"n_vars\": 7,\n    \"prior_vars\": [0, 9],"),
    );
    let o = bpclt(&["validate", oob.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 7: prior_vars"));
}

#[test]
fn bundled_configs_validate() {
    let tmp = tempfile::tempdir().unwrap();
    for name in [
        "fig4a_chain.json",
        "fig4a_tree.json",
        "fig4a_grid.json",
        "fig4b_star.json",
        "fig4c_prior_sweep.json",
        "convergence_rate.json",
        "fig1_chain.json",
        "tree_equivalence_cycle.json",
        "tree_equivalence_grid.json",
        "stereo_desk.json",
    ] {
        let o = bpclt(&["validate", &config(name)], tmp.path());
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn run_writes_one_csv_per_seed_and_one_row_per_distance() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "chain.json", SMALL_CHAIN);
    let o = bpclt(&["run", p.to_str().unwrap(), "--threads", "2"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("small_chain");
    for s in 42..=44 {
        let csv = std::fs::read_to_string(dir.join(format!("seed_{s}.csv"))).unwrap();
        assert!(csv.starts_with("variable,distance,mu,var,skew,exkurt,eps,kl_gauss,gbp_mu,gbp_var\n"));
        assert_eq!(csv.lines().count(), 1 + 7);
    }
    let agg = std::fs::read_to_string(dir.join("aggregate.csv")).unwrap();
    // priors at both ends of 7 variables: distances 0..=3
    assert_eq!(agg.lines().count(), 1 + 4);
    assert!(agg.starts_with("distance,n_seeds,n_vars_mean,n_vars_std,kl_gauss_mean,kl_gauss_std"));
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["name"], "small_chain");
    assert_eq!(m["threads"], 2);
    assert_eq!(m["results"].as_array().unwrap().len(), 3);
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(m["version"].is_string());
    let leftovers = std::fs::read_dir(&dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "tmp"));
    assert_eq!(leftovers.count(), 0);
}

#[test]
fn out_flag_overrides_env() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "chain.json", SMALL_CHAIN);
    let other = tmp.path().join("elsewhere");
    let o = bpclt(
        &["run", p.to_str().unwrap(), "--out", other.to_str().unwrap()],
        tmp.path(),
    );
    assert!(o.status.success());
    assert!(other.join("small_chain/aggregate.csv").exists());
    assert!(!tmp.path().join("small_chain").exists());
}

#[test]
fn incompatible_point_priors_exit_3_naming_the_edge() {
    let tmp = tempfile::tempdir().unwrap();
    // every variable is pinned to bin 10 but neighbours must differ by 5 bins
    let text = r#"{
  "name": "contradiction",
  "seeds": { "first": 1, "last": 1 },
  "experiment": {
    "kind": "chain",
    "n_vars": 3,
    "prior_vars": [0, 1, 2],
    "grid": { "n_bins": 32, "min": 0.0, "max": 31.0 },
    "kernel": { "type": "fixed", "kernel": { "offsets": [5], "weights": [1.0] } },
    "prior": { "type": "delta", "bin": 10 },
    "schedule": { "type": "exact" }
  }
}"#;
    let p = write(tmp.path(), "contradiction.json", text);
    assert!(bpclt(&["validate", p.to_str().unwrap()], tmp.path()).status.success());
    let o = bpclt(&["run", p.to_str().unwrap()], tmp.path());
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(3), "{err}");
    assert!(
        err.contains("seed 1") && err.contains("from factor") && err.contains("to variable"),
        "{err}"
    );
}

#[test]
fn list_experiments_names_every_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bpclt(&["list-experiments"], tmp.path());
    assert!(o.status.success());
    let s = String::from_utf8_lossy(&o.stdout);
    for k in [
        "chain",
        "tree",
        "star",
        "grid",
        "prior-sweep",
        "degree-sweep",
        "convergence-rate",
        "tree-equivalence",
        "stereo",
    ] {
        assert!(s.lines().any(|l| l.starts_with(k)), "{k}");
    }
}
