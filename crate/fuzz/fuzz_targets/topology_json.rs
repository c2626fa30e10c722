#![no_main]

use derivelog::io::{parse_topology, TopologyFile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = parse_topology(text) else { return };
    let written = serde_json::to_string(&TopologyFile::from_topology(&t)).unwrap();
    assert_eq!(parse_topology(&written).expect("written topologies reload"), t);
});
