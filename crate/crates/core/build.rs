fn main() {
    println!("cargo:rerun-if-changed=build.rs");
    let wasm = std::env::var("CARGO_CFG_TARGET_ARCH").is_ok_and(|a| a == "wasm32");
    if std::env::var_os("CARGO_FEATURE_LAPACK").is_some() && !wasm {
        println!("cargo:rustc-link-lib=dylib=lapack");
    }
}
