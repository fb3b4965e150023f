use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tp_mahler.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    let source = include_str!("../src/lib.rs");
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20);
    for name in exports {
        assert!(
            text.contains(&format!(" {name}(")) || text.contains(&format!("*{name}(")),
            "{name}"
        );
    }
    for status in [
        "TPM_STATUS_OK = 0",
        "TPM_STATUS_PRECONDITION = 2",
        "TPM_STATUS_PANIC = 6",
    ] {
        assert!(text.contains(status), "{status}");
    }
}

fn c_compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| {
        Command::new(c)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

#[test]
fn c_program_links_against_static_library() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found; header link test not run");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libtp_mahler_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());

    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "tp_mahler.h"

int main(void) {
    TpmCoeffTable *tab = NULL;
    if (tpm_coeffs_generate(3, 18, TPM_ALGORITHM_LOG_EXP, &tab) != TPM_STATUS_OK) return 1;
    char *entry = NULL;
    if (tpm_coeffs_entry(tab, 18, &entry) != TPM_STATUS_OK) return 2;
    int same = strcmp(entry, "1259/6561") == 0;
    tpm_string_free(entry);
    tpm_coeffs_free(tab);
    if (!same) return 3;
    if (tpm_coeffs_generate(4, 5, TPM_ALGORITHM_DIFF, &tab) != TPM_STATUS_INVALID_ARGUMENT) return 4;
    printf("%s\n", tpm_last_error());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("smoke");
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "4 is not a prime\n");
}
