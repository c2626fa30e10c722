#![no_main]

use derivelog::formula::{parse, render};
use derivelog::Formula;
use libfuzzer_sys::fuzz_target;

/// Builds a formula by reading the input as a prefix program.
fn build(bytes: &mut std::slice::Iter<'_, u8>, depth: usize) -> Formula {
    let Some(&b) = bytes.next() else { return Formula::var("p") };
    if depth == 0 {
        return Formula::var(["p", "q", "r"][usize::from(b) % 3]);
    }
    let mut sub = || build(bytes, depth - 1);
    match b % 14 {
        0..=2 => Formula::var(["p", "q", "r"][usize::from(b) % 3]),
        3 => Formula::bot(),
        4 => Formula::top(),
        5 => Formula::not(sub()),
        6 => Formula::and(sub(), sub()),
        7 => Formula::or(sub(), sub()),
        8 => Formula::imp(sub(), sub()),
        9 => Formula::dia(sub()),
        10 => Formula::square(sub()),
        11 => Formula::boxdot(sub()),
        12 => Formula::next(sub()),
        _ => {
            let args = (0..1 + b / 14 % 3).map(|_| sub()).collect();
            Formula::tangle(args).expect("nonempty")
        }
    }
}

fuzz_target!(|data: &[u8]| {
    let f = build(&mut data.iter(), 8);
    let printed = render(&f);
    assert_eq!(parse(&printed), Ok(f), "via `{printed}`");
    assert_eq!(render(&parse(&printed).unwrap()), printed);
});
