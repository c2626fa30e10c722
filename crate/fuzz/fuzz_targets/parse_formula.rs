#![no_main]

use derivelog::formula::{parse, render};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse(text) {
        let printed = render(&f);
        assert_eq!(parse(&printed).as_ref(), Ok(&f), "reparse of `{printed}`");
    }
});
