use std::env;
use std::path::Path;

fn main() {
    // The system netlib link line asks for -lcblas, which Debian ships only
    // inside openblas. Point the linker at openblas under that name.
    let out_dir = env::var("OUT_DIR").unwrap();
    let shim = Path::new(&out_dir).join("libcblas.so");
    let openblas = "/usr/lib/x86_64-linux-gnu/libopenblas.so";
    if !shim.exists() && Path::new(openblas).exists() {
        let _ = std::os::unix::fs::symlink(openblas, &shim);
    }
    println!("cargo:rustc-link-search=native={out_dir}");
    println!("cargo:rustc-link-lib=dylib=openblas");
}
