fn main() {
    // The lapack feature links the system OpenBLAS, which bundles LAPACK on
    // Debian/Ubuntu (`apt install libopenblas-dev`).
    if std::env::var_os("CARGO_FEATURE_LAPACK").is_some() {
        println!("cargo:rustc-link-lib=dylib=openblas");
    }
}
