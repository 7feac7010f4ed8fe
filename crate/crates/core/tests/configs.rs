use std::path::Path;

use muscl::bench::{BenchConfig, MeshConfig};

#[test]
fn shipped_configs_parse_and_reference_existing_meshes() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "toml") {
            continue;
        }
        let config = BenchConfig::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if let MeshConfig::Files { paths } = &config.mesh {
            for p in paths {
                assert!(p.exists(), "{}: {} missing", path.display(), p.display());
            }
        }
        count += 1;
    }
    assert_eq!(count, 6);
}
