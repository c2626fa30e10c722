#![no_main]

use derivelog::io::{parse_story, StoryFile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(s) = parse_story(text) else { return };
    let written = serde_json::to_string(&StoryFile::from_story(&s)).unwrap();
    assert_eq!(parse_story(&written).expect("written stories reload"), s);
});
