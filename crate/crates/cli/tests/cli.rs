use std::path::PathBuf;
use std::process::{Command, Output};

fn case(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/cases").join(file)
}

fn dolce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dolce")).args(args).env_remove("DOLCE_TAXONOMY").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn consistent_fixtures_exit_zero() {
    for f in ["case1_table.dkb", "case2_roles.dkb", "case3_1_flower.dkb", "case3_2_speed.dkb", "case4_plans.dkb", "case5_marriage.dkb"] {
        let o = dolce(&["check", case(f).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stderr(&o));
        assert_eq!(stdout(&o), "0 violations\n");
    }
}

#[test]
fn bundled_case_paths_resolve_anywhere() {
    let o = Command::new(env!("CARGO_BIN_EXE_dolce"))
        .args(["check", "cases/case1_table.dkb"])
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "0 violations\n");
    assert_eq!(dolce(&["check", "cases/missing.dkb"]).status.code(), Some(2));
}

#[test]
fn mutation_hook_reports_violation() {
    let path = case("case1_table.dkb");
    let o = dolce(&["check", path.to_str().unwrap(), "--mutate", "drop-PRE-Tp-t"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "[Ad17] P(Tp, T) holds while Tp is not present {x=Tp, y=T, t=t}\n1 violation\n");

    let o = dolce(&["check", path.to_str().unwrap(), "--mutate", "drop-PRE-T-t"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().all(|l| l.starts_with("[Ad17]") || l.ends_with("violations")), "{}", stdout(&o));
}

#[test]
fn json_output_is_stable() {
    let path = case("case1_table.dkb");
    let args = ["check", path.to_str().unwrap(), "--mutate", "drop:(PRE Tp t)", "--format", "json"];
    let golden = r#"[
  {
    "label": "Ad17",
    "witnesses": {
      "x": "Tp",
      "y": "T",
      "t": "t"
    },
    "message": "P(Tp, T) holds while Tp is not present"
  }
]
"#;
    let first = dolce(&args);
    assert_eq!(stdout(&first), golden);
    assert_eq!(first.stdout, dolce(&args).stdout);
}

#[test]
fn label_filters() {
    let path = case("case1_table.dkb");
    let p = path.to_str().unwrap();
    let o = dolce(&["check", p, "--mutate", "drop:(PRE Tp t)", "--disable", "Ad17"]);
    assert_eq!(o.status.code(), Some(0));
    let o = dolce(&["check", p, "--mutate", "drop:(PRE Tp t)", "--strict-labels", "Ad24,GEM-T"]);
    assert_eq!(o.status.code(), Some(0));
    let o = dolce(&["check", p, "--mutate", "drop:(PRE Tp t)", "--strict-labels", "Ad17"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn load_errors_exit_two() {
    let o = dolce(&["check", "no-such-file.dkb"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: no-such-file.dkb"), "{}", stderr(&o));

    let dir = std::env::temp_dir().join(format!("dolce-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.dkb");
    std::fs::write(&bad, "(entity a Person)\n(assert (P a))\n").unwrap();
    let o = dolce(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2:9"), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dolce(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dolce(&["check"]).status.code(), Some(2));
    assert_eq!(dolce(&["--help"]).status.code(), Some(0));
}

#[test]
fn query_prints_bindings() {
    let path = case("case1_table.dkb");
    let p = path.to_str().unwrap();
    let o = dolce(&["query", p, "(K ?w T t)"]);
    assert_eq!(stdout(&o), "?w=W_top+W1+W2+W3+W4\n");
    assert_eq!(stdout(&dolce(&["query", p, "(K W1 L1 t)"])), "true\n");
    let o = dolce(&["query", p, "(Foo ?x)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explain_prints_formula() {
    let o = dolce(&["explain", "Ad24"]);
    assert_eq!(stdout(&o), "Ad24: constitution is asymmetric\n  K(x, y, t) → ¬K(y, x, t)\n");
    let path = case("case1_table.dkb");
    let o = dolce(&["explain", path.to_str().unwrap(), "F12-functional"]);
    assert!(stdout(&o).starts_with("F12-functional: "));
    assert_eq!(dolce(&["explain", "Nope"]).status.code(), Some(2));
}

#[test]
fn fixtures_listing_and_show() {
    let o = dolce(&["fixtures"]);
    assert_eq!(stdout(&o).lines().count(), 6);
    let shown = stdout(&dolce(&["fixtures", "--show", "case5"]));
    assert_eq!(shown, std::fs::read_to_string(case("case5_marriage.dkb")).unwrap());
}
