use std::path::PathBuf;
use std::process::Command;

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dgcell.h")).unwrap();
    for sym in [
        "dgcell_algebra_parse",
        "dgcell_algebra_free",
        "dgcell_string_free",
        "dgcell_last_error",
        "dgcell_cells",
        "dgcell_maxspec",
        "dgcell_cellrep",
        "dgcell_order",
        "dgcell_verify",
        "DGCELL_STATUS_CONTRADICTION",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}

#[test]
fn c_program_links_and_runs() {
    // cargo test does not emit the staticlib artifact, so build it here
    let built = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "-p", "dgcell-ffi", "--lib"])
        .args(if profile_dir().ends_with("release") { &["--release"][..] } else { &[][..] })
        .status()
        .expect("cargo available");
    assert!(built.success());
    let lib = profile_dir().join("libdgcell_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("dgcell_smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke test exited with {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
