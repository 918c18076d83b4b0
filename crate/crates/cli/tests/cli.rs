use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use ventplan_core::comfort::OccupancyModel;
use ventplan_core::plan::{FloorPlan, SpaceFunction};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).canonicalize().unwrap()
}

fn ventplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ventplan")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Writes a project file into `dir` that uses the bundled inputs.
fn project(dir: &Path, extra: Value) -> PathBuf {
    let mut p = json!({
        "program": data("case_study_program.json"),
        "weather": data("porto_synthetic.epw"),
        "seed": 3,
        "output_dir": dir.join("out"),
    });
    for (k, v) in extra.as_object().unwrap() {
        p[k] = v.clone();
    }
    let path = dir.join("project.json");
    std::fs::write(&path, serde_json::to_string_pretty(&p).unwrap()).unwrap();
    path
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n != "meta.json") {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

#[test]
fn bad_arguments_are_a_config_error() {
    assert_eq!(code(&ventplan(&[])), 2);
    assert_eq!(code(&ventplan(&["generate"])), 2);
    assert_eq!(code(&ventplan(&["--help"])), 0);
}

#[test]
fn missing_project_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = ventplan(&["generate", "--project", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));
}

#[test]
fn missing_weather_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let p = project(dir.path(), json!({ "weather": "missing.epw" }));
    let out = ventplan(&["generate", "--project", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.epw"));
}

#[test]
fn unknown_project_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = project(dir.path(), json!({ "seeds": 4 }));
    assert_eq!(code(&ventplan(&["generate", "--project", p.to_str().unwrap()])), 2);
}

#[test]
fn impossible_program_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let mut program: Value = serde_json::from_str(&std::fs::read_to_string(data("case_study_program.json")).unwrap()).unwrap();
    program["max_construction_area"] = json!(5.0);
    let program_path = dir.path().join("program.json");
    std::fs::write(&program_path, program.to_string()).unwrap();
    let p = project(dir.path(), json!({ "program": program_path }));
    assert_eq!(code(&ventplan(&["generate", "--project", p.to_str().unwrap()])), 3);
}

#[test]
fn missing_schedule_is_a_simulation_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut occupancy = OccupancyModel::case_study();
    occupancy.schedules.retain(|s| s.function != SpaceFunction::Kitchen);
    let p = project(dir.path(), json!({ "occupancy": occupancy }));
    let p = p.to_str().unwrap();
    assert_eq!(code(&ventplan(&["generate", "--project", p])), 0);
    let out = ventplan(&["optimize", "--project", p]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_is_repeatable_and_plans_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = project(dir.path(), json!({}));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let run = ventplan(&["generate", "--project", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    }
    let (ta, tb) = (tree(&a), tree(&b));
    assert_eq!(ta, tb);
    assert!(a.join("meta.json").is_file());

    let plan_path = a.join("generated/design-01.json");
    let text = std::fs::read_to_string(&plan_path).unwrap();
    assert_eq!(FloorPlan::from_json(&text).unwrap().to_json().unwrap(), text);

    let render = ventplan(&["render", "--project", p.to_str().unwrap(), "--out", a.to_str().unwrap(), plan_path.to_str().unwrap()]);
    assert_eq!(code(&render), 0, "{}", String::from_utf8_lossy(&render.stderr));
    let svgs = tree(&a.join("svg"));
    assert_eq!(svgs.len(), 1);
    assert!(svgs.values().all(|s| s.starts_with(b"<svg")));
}
