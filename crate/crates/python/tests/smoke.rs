use std::path::PathBuf;
use std::process::Command;

fn built_library() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    // target/<profile>/deps/smoke-<hash>
    let profile_dir = exe.parent()?.parent()?;
    ["libcourant_py.so", "libcourant_py.dylib", "courant_py.dll"]
        .iter()
        .map(|n| profile_dir.join(n))
        .find(|p| p.exists())
}

#[test]
fn python_smoke_test() {
    let Some(lib) = built_library() else {
        eprintln!("courant_py cdylib not found next to the test binary; skipping");
        return;
    };
    if Command::new("python3").arg("--version").output().is_err() {
        eprintln!("python3 not available; skipping");
        return;
    }
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../python/smoke_test.py");
    let out = Command::new("python3").arg(&script).env("COURANT_PY_LIB", &lib).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("smoke test passed"));
}
