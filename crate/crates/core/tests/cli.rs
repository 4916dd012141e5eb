use std::path::Path;
use std::process::{Command, Output};

fn pfrac(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfrac"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn pfrac")
}

fn stdout(o: &Output) -> &str {
    std::str::from_utf8(&o.stdout).unwrap()
}

fn stderr(o: &Output) -> &str {
    std::str::from_utf8(&o.stderr).unwrap()
}

#[test]
fn writes_stdout_and_result_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfrac(dir.path(), &["0,1", "a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(x - a)^(-1)\n");
    let file = std::fs::read_to_string(dir.path().join("result.out")).unwrap();
    assert_eq!(file, stdout(&o));
}

#[test]
fn result_file_is_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("result.out"),
        "stale content that is long\n",
    )
    .unwrap();
    let o = pfrac(dir.path(), &["0,1,1", "1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let file = std::fs::read_to_string(dir.path().join("result.out")).unwrap();
    assert_eq!(file, "-(x - 1)^(-1) + (x - 2)^(-1)\n");
}

#[test]
fn quiet_and_custom_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfrac(
        dir.path(),
        &[
            "--quiet",
            "--output",
            "custom.txt",
            "--format",
            "structured",
            "1,2",
            "0",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(!dir.path().join("result.out").exists());
    let file = std::fs::read_to_string(dir.path().join("custom.txt")).unwrap();
    assert_eq!(file, "P 1 1 1\n");
}

#[test]
fn small_buffer_gives_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let big = pfrac(dir.path(), &["3,2,2,3", "a,b+c,-d/2"]);
    let small = pfrac(
        dir.path(),
        &["--buffer-capacity", "7", "3,2,2,3", "a,b+c,-d/2"],
    );
    assert_eq!(big.status.code(), Some(0));
    assert_eq!(big.stdout, small.stdout);
}

#[test]
fn verify_reports_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfrac(dir.path(), &["--verify", "20", "3,5,7,11", "a1,a2,a3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("PASS"));
    let o = pfrac(dir.path(), &["--verify", "5", "4,2,1", "1/2,-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("oracle check: PASS"));
}

#[test]
fn help_goes_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfrac(dir.path(), &["-h"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Usage"));
    assert!(stdout(&o).contains("EXPONENTS"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for (args, needle) in [
        (
            &["3,5,7", "a1,a2,a3"][..],
            "3 exponent entries require 2 roots, 3 given",
        ),
        (&["0,1,1", "a,a"][..], "roots 1 (`a`) and 2 (`a`) are equal"),
        (&["0,1,1", "2*(a+b),2*a+2*b"][..], "are equal"),
        (&["0,1", "x"][..], "contains the variable `x`"),
        (&["0,1", "a+"][..], "offset 2"),
        (&["0,1,1", "a,,b"][..], "entry 2 is empty"),
        (&["-1,1", "a"][..], "exponent entry 1"),
        (&["0,1"][..], "required"),
    ] {
        let o = pfrac(dir.path(), args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}
