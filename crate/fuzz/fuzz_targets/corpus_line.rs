#![no_main]

use derivelog::formula::{parse, render};
use derivelog::io::parse_corpus_line;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(Some(e)) = parse_corpus_line(1, text) {
        assert_eq!(parse(&render(&e.formula)), Ok(e.formula));
    }
});
