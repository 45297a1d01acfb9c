use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn exported_functions() -> Vec<String> {
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let mut names = Vec::new();
    let mut pending = false;
    for line in src.lines() {
        if line.trim() == "#[no_mangle]" {
            pending = true;
        } else if pending {
            if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
                names.push(rest.split('(').next().unwrap().to_string());
                pending = false;
            }
        }
    }
    names
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/bitretrieve.h")).unwrap();
    let names = exported_functions();
    assert!(names.len() >= 20, "found only {names:?}");
    for name in names {
        assert!(header.contains(&format!("{name}(")), "header is missing {name}");
    }
    for ty in ["BrSignal", "BrEnsemble", "BrRecovery"] {
        assert!(header.contains(&format!("typedef struct {ty} {ty};")), "{ty} is not opaque");
    }
    assert!(header.contains("BR_STATUS_NULL_POINTER = 2"));
}

fn artifact_dir() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?.to_path_buf();
    dir.join("libbitretrieve_ffi.a").exists().then_some(dir)
}

fn compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| {
        Command::new(c)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include "bitretrieve.h"

int main(void) {
    BrTheoryConstants c;
    if (br_theory_constants(BR_FIELD_REAL, 4, &c) != BR_STATUS_OK) return 10;
    uint64_t path[1] = {0};
    BrSignal *x = NULL;
    if (br_signal_random(BR_FIELD_COMPLEX, 2, 1, path, 1, &x) != BR_STATUS_OK) return 11;
    BrEnsemble *ens = NULL;
    path[0] = 1;
    if (br_ensemble_sample(BR_FIELD_COMPLEX, 2, 3000, 1, path, 1, &ens) != BR_STATUS_OK) return 12;
    uint8_t bits[3000];
    if (br_measure(ens, x, bits, 3000) != BR_STATUS_OK) return 13;
    BrRecovery *rec = NULL;
    if (br_recover(ens, bits, 3000, &rec) != BR_STATUS_OK) return 14;
    BrSignal *est = NULL;
    if (br_recovery_estimate(rec, &est) != BR_STATUS_OK) return 15;
    double err = 1.0;
    if (br_signal_distance(x, est, &err) != BR_STATUS_OK) return 16;
    if (br_signal_dim(NULL, NULL) != BR_STATUS_NULL_POINTER) return 17;
    if (br_last_error() == NULL) return 18;
    printf("gap=%.12f err_ok=%d\n", c.gap, err < 0.3);
    br_signal_free(est);
    br_recovery_free(rec);
    br_ensemble_free(ens);
    br_signal_free(x);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let (Some(dir), Some(cc)) = (artifact_dir(), compiler()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    let bin = tmp.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(dir.join("libbitretrieve_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(Path::new(&bin)).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.trim(), "gap=0.214285714286 err_ok=1");
}
