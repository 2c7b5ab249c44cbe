use std::path::PathBuf;

use mtrrt::bench::svg_string;
use mtrrt::workspace::{builtin_map, load_map, BuiltinMap};

fn docs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/maps")
}

#[test]
fn builtin_maps_match_checked_in_files() {
    for name in BuiltinMap::NAMES {
        let m = builtin_map(name).unwrap();
        let svg = std::fs::read_to_string(docs().join(format!("{name}.svg"))).unwrap();
        assert_eq!(svg, svg_string(&m.grid, &[], &[], m.start, m.goal), "{name}.svg");
        assert_eq!(
            load_map(docs().join(format!("{name}.map"))).unwrap(),
            m.grid,
            "{name}.map"
        );
    }
}
