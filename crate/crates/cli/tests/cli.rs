use assert_cmd::Command;
use predicates::prelude::*;

fn ddtk() -> Command {
    Command::cargo_bin("ddtk").unwrap()
}

#[test]
fn verify_catalog_entry() {
    ddtk()
        .args(["verify", "dd-10", "--super-simple"])
        .assert()
        .success()
        .stdout(predicate::str::contains(
            "valid super-simple 2-(10,4,1)DD, 15 blocks",
        ));
}

#[test]
fn verify_corrupted_file_exits_one_with_witness() {
    let dir = std::env::temp_dir().join("ddtk-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corrupt.txt");
    // dd-4 with the second block mangled: pair (0,1) covered twice
    std::fs::write(
        &path,
        "kind: DD\nv: 4\nk: 4\nlambda: 1\nblocks:\n0 1 2 3\n0 1 3 2\n",
    )
    .unwrap();
    ddtk()
        .arg("verify")
        .arg(&path)
        .assert()
        .code(1)
        .stdout(predicate::str::contains("INVALID").and(predicate::str::contains("PairCoverage")));
}

#[test]
fn verify_from_stdin() {
    let text = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/dd-16.txt"),
    )
    .unwrap();
    ddtk()
        .args(["verify", "-"])
        .write_stdin(text)
        .assert()
        .success()
        .stdout(predicate::str::contains("40 blocks"));
}

#[test]
fn defset_smallest_dd10() {
    ddtk()
        .args(["defset", "dd-10", "--smallest"])
        .assert()
        .success()
        .stdout(predicate::str::contains("size 8").and(predicate::str::contains("8/15")));
}

#[test]
fn bound_json_is_valid_and_deterministic() {
    let a = ddtk().args(["bound", "dd-19", "--exact", "--json"]).assert().success();
    let out1 = a.get_output().stdout.clone();
    let b = ddtk().args(["bound", "dd-19", "--exact", "--json"]).assert().success();
    assert_eq!(out1, b.get_output().stdout, "byte-identical reports");
    let v: serde_json::Value = serde_json::from_slice(&out1).unwrap();
    assert_eq!(v["report"], "bound");
    assert_eq!(v["certificate"]["bound"], 29);
    assert_eq!(v["f"]["numerator"], 29);
    assert_eq!(v["f"]["denominator"], 57);
}

#[test]
fn unknown_input_exits_two() {
    ddtk().args(["verify", "dd-9999"]).assert().code(2);
}

#[test]
fn search_nonexistent_gdd_exits_one() {
    ddtk()
        .args(["search", "gdd", "--type", "2^4", "--k", "4"])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("exhausted"));
}

#[test]
fn search_finds_gdd_2_7() {
    ddtk()
        .args(["search", "gdd", "--type", "2^7", "--k", "4"])
        .assert()
        .success()
        .stdout(predicate::str::contains("kind: GDD"));
}

#[test]
fn build_exception_value_exits_one() {
    ddtk().args(["build", "7"]).assert().code(1);
}

#[test]
fn build_v40_block_count() {
    let a = ddtk().args(["build", "40", "--json"]).assert().success();
    let v: serde_json::Value = serde_json::from_slice(&a.get_output().stdout).unwrap();
    assert_eq!(v["blocks"], 260);
}

#[test]
fn gen_develops_base_blocks() {
    ddtk()
        .args(["gen", "dd-13", "--json"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"blocks\": 26"));
}

#[test]
fn catalog_list_shows_all_entries() {
    ddtk()
        .args(["catalog", "list"])
        .assert()
        .success()
        .stdout(predicate::str::contains("dd-10").and(predicate::str::contains("dgdd-2^4-b")));
}

#[test]
fn threads_flag_does_not_change_output() {
    let a = ddtk().args(["bound", "dd-16", "--exact"]).assert().success();
    let b = ddtk()
        .args(["--threads", "1", "bound", "dd-16", "--exact"])
        .assert()
        .success();
    assert_eq!(a.get_output().stdout, b.get_output().stdout);
}
