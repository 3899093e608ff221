use std::path::Path;
use std::process::Command;

fn header() -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/weierstrass.h");
    std::fs::read_to_string(path).expect("header generated by the build script")
}

#[test]
fn header_declares_the_api() {
    let h = header();
    for name in [
        "ws_engine_new",
        "ws_engine_new_with_config",
        "ws_engine_free",
        "ws_eval",
        "ws_reduce",
        "ws_diff",
        "ws_verify",
        "ws_eisenstein_coefficients",
        "ws_string_free",
        "ws_last_error_message",
        "ws_version",
        "typedef struct WsEngine WsEngine",
        "WS_STATUS_POLE_PROXIMITY",
        "WS_FUNCTION_DELTA",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        return;
    };
    if !cc.status.success() {
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        "#include \"weierstrass.h\"\nint main(void) { WsValue v; WsComplex t = {0.0, 1.0}; (void)v; (void)t; return WS_STATUS_OK; }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ws-ffi-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
