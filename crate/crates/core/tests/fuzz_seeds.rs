//! The checked-in fuzz seeds stay valid inputs, so each target starts from
//! inputs that reach past the parser.

use std::fs;
use std::path::PathBuf;

use derivelog::formula::parse;
use derivelog::io::{parse_corpus_line, parse_model, parse_story, parse_topology};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (
                path.display().to_string(),
                fs::read_to_string(&path).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn formula_seeds_parse() {
    for (name, text) in seeds("parse_formula") {
        assert!(parse(&text).is_ok(), "{name}");
    }
}

#[test]
fn json_seeds_load() {
    for (name, text) in seeds("model_json") {
        assert!(
            parse_model(&text).is_ok(),
            "{name}: {:?}",
            parse_model(&text).err()
        );
    }
    for (name, text) in seeds("topology_json") {
        assert!(parse_topology(&text).is_ok(), "{name}");
    }
    for (name, text) in seeds("story_json") {
        assert!(
            parse_story(&text).is_ok(),
            "{name}: {:?}",
            parse_story(&text).err()
        );
    }
}

#[test]
fn corpus_seeds_parse() {
    let entries = seeds("corpus_line")
        .into_iter()
        .filter_map(|(name, text)| {
            parse_corpus_line(1, &text).unwrap_or_else(|e| panic!("{name}: {e}"))
        })
        .count();
    // the comment seed is skipped
    assert_eq!(entries, seeds("corpus_line").len() - 1);
}
