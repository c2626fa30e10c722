#![no_main]

use derivelog::formula::parse;
use derivelog::io::{parse_model, ModelFile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = parse_model(text) else { return };
    let file = ModelFile::from_model(&m).expect("parsed models are never mixed sums");
    let again = parse_model(&serde_json::to_string(&file).unwrap()).expect("written models reload");
    assert_eq!(again.size(), m.size());
    for probe in ["p", "<>p", "X p", "[]X q", "<*>{p,q}"] {
        let f = parse(probe).unwrap();
        assert_eq!(again.truth_set(&f), m.truth_set(&f), "{probe}");
    }
});
