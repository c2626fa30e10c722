#![allow(dead_code)]

use derivelog::search::{random_model, Repair};
use derivelog::{Formula, FrameClass, Model, PointSet};
use proptest::prelude::*;

pub fn set(xs: &[usize]) -> PointSet {
    xs.iter().copied().collect()
}

/// Formulas over `p`, `q`, `r` with every connective, tangle included.
pub fn arb_formula() -> impl Strategy<Value = Formula> {
    arb_formula_with(true)
}

pub fn arb_formula_with(tangle: bool) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::var),
        1 => Just(Formula::bot()),
        1 => Just(Formula::top()),
    ];
    leaf.prop_recursive(5, 40, 3, move |inner| {
        let mut options: Vec<BoxedStrategy<Formula>> = vec![
            inner.clone().prop_map(Formula::not).boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::and(a, b))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::or(a, b))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::imp(a, b))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::iff(a, b))
                .boxed(),
            inner.clone().prop_map(Formula::dia).boxed(),
            inner.clone().prop_map(Formula::square).boxed(),
            inner.clone().prop_map(Formula::boxdot).boxed(),
            inner.clone().prop_map(Formula::next).boxed(),
        ];
        if tangle {
            options.push(
                prop::collection::vec(inner, 1..=3)
                    .prop_map(|v| Formula::tangle(v).expect("nonempty"))
                    .boxed(),
            );
        }
        prop::strategy::Union::new(options)
    })
}

pub fn arb_class() -> impl Strategy<Value = FrameClass> {
    prop::sample::select(FrameClass::ALL.to_vec())
}

/// Class-valid random frame models of 1 to `max` worlds, valued on `p`, `q`.
pub fn arb_model(
    classes: Vec<FrameClass>,
    max: usize,
) -> impl Strategy<Value = (FrameClass, Model)> {
    (prop::sample::select(classes), 1..=max, any::<u64>()).prop_map(|(cls, n, seed)| {
        let m = random_model(cls, n, seed, Repair::Full).expect("generation succeeds");
        (cls, m)
    })
}
