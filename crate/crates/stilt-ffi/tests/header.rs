//! Keeps the committed C header in lockstep with the exported surface.

use std::fs;
use std::path::Path;

#[test]
fn committed_header_matches_generated() {
    let crate_dir = env!("CARGO_MANIFEST_DIR");
    let config = cbindgen::Config::from_file(Path::new(crate_dir).join("cbindgen.toml"))
        .expect("cbindgen.toml parses");
    let bindings = cbindgen::Builder::new()
        .with_crate(crate_dir)
        .with_config(config)
        .generate()
        .expect("header generation succeeds");
    let mut generated = Vec::new();
    bindings.write(&mut generated);
    let generated = String::from_utf8(generated).expect("header is UTF-8");

    let header_path = Path::new(crate_dir).join("include/stilt.h");
    if std::env::var_os("STILT_REGENERATE_HEADER").is_some() {
        fs::write(&header_path, &generated).expect("header written");
        return;
    }
    let committed = fs::read_to_string(&header_path)
        .expect("include/stilt.h exists; regenerate with STILT_REGENERATE_HEADER=1");
    assert_eq!(
        committed, generated,
        "include/stilt.h is stale; regenerate with STILT_REGENERATE_HEADER=1"
    );
}
