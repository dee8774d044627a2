//! Golden outputs for the shipped examples. Set UPDATE_GOLDEN=1 to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn probenv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_probenv"))
        .args(args)
        .current_dir(root())
        .output()
        .unwrap()
}

const CASES: &[(&str, &[&str])] = &[
    ("appendix_a", &["examples/appendix_a.penv"]),
    ("appendix_c_free", &["examples/appendix_c_free.penv"]),
    (
        "five_events",
        &["examples/five_events.penv", "--set", "a=1/2"],
    ),
    (
        "two_event_conditional",
        &["examples/two_event_conditional.penv"],
    ),
];

fn golden(name: &str, got: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing {}; run with UPDATE_GOLDEN=1", path.display()));
    assert!(want == got, "{name} differs from its golden file");
}

#[test]
fn golden_outputs() {
    for cmd in ["atoms", "check", "certificate"] {
        for (name, args) in CASES {
            for (fmt, ext) in [("text", "txt"), ("structured", "json")] {
                let mut argv = vec![cmd];
                argv.extend_from_slice(args);
                argv.extend_from_slice(&["--format", fmt]);
                let out = probenv(&argv);
                assert!(
                    out.stderr.is_empty(),
                    "{cmd} {name}: {}",
                    String::from_utf8_lossy(&out.stderr)
                );
                golden(
                    &format!("{cmd}_{name}.{ext}"),
                    &String::from_utf8(out.stdout).unwrap(),
                );
            }
        }
    }
}

#[test]
fn structured_runs_are_byte_identical() {
    for (_, args) in CASES {
        let mut argv = vec!["check"];
        argv.extend_from_slice(args);
        argv.extend_from_slice(&["--format", "structured"]);
        assert_eq!(probenv(&argv).stdout, probenv(&argv).stdout);
    }
}
