mod common;

use common::{arb_formula, arb_formula_with, arb_model};
use derivelog::search::{preorders, relations};
use derivelog::spaces::preimage;
use derivelog::{
    DerivativeSpace, DynamicFrame, FiniteTopology, Formula, FrameClass, Model, PointSet,
    StaticLogic,
};
use proptest::prelude::*;

const CONTINUOUS: [FrameClass; 3] = [FrameClass::WK4C, FrameClass::K4C, FrameClass::GLC];
const INVERTIBLE: [FrameClass; 3] = [FrameClass::WK4H, FrameClass::K4H, FrameClass::GLH];

proptest! {
    #[test]
    fn boolean_laws(
        (_, m) in arb_model(FrameClass::ALL.to_vec(), 6),
        a in arb_formula(),
        b in arb_formula(),
    ) {
        let full = m.points();
        let (ta, tb) = (m.truth_set(&a), m.truth_set(&b));
        prop_assert_eq!(m.truth_set(&Formula::not(a.clone())), ta.complement(m.size()));
        prop_assert_eq!(m.truth_set(&Formula::and(a.clone(), b.clone())), ta & tb);
        prop_assert_eq!(m.truth_set(&Formula::or(a.clone(), b.clone())), ta | tb);
        prop_assert_eq!(m.truth_set(&Formula::imp(a, b)), (full - ta) | tb);
    }

    #[test]
    fn modal_and_next_clauses((_, m) in arb_model(FrameClass::ALL.to_vec(), 6), a in arb_formula()) {
        let t = m.truth_set(&a);
        let sp = m.space();
        prop_assert_eq!(m.truth_set(&Formula::dia(a.clone())), sp.rho(t));
        prop_assert_eq!(m.truth_set(&Formula::square(a.clone())), sp.co_derivative(t));
        prop_assert_eq!(m.truth_set(&Formula::next(a.clone())), preimage(m.func(), t));
        // the defined boxdot is the interior-style operator
        prop_assert_eq!(m.truth_set(&Formula::boxdot(a)), t & sp.co_derivative(t));
    }

    #[test]
    fn next_normal_form_preserves_truth_on_invertible_models(
        (_, m) in arb_model(INVERTIBLE.to_vec(), 5),
        f in arb_formula_with(false),
    ) {
        let nf = f.to_next_normal_form().unwrap();
        prop_assert_eq!(m.truth_set(&nf), m.truth_set(&f));
    }

    #[test]
    fn next_commutes_with_booleans_on_every_model(
        (_, m) in arb_model(CONTINUOUS.to_vec(), 6),
        a in arb_formula(),
        b in arb_formula(),
    ) {
        let x = Formula::next;
        prop_assert_eq!(m.truth_set(&x(Formula::not(a.clone()))), m.truth_set(&Formula::not(x(a.clone()))));
        prop_assert_eq!(
            m.truth_set(&x(Formula::and(a.clone(), b.clone()))),
            m.truth_set(&Formula::and(x(a), x(b)))
        );
    }

    #[test]
    fn tangle_of_one_set_is_its_perfect_core((_, m) in arb_model(FrameClass::ALL.to_vec(), 6), a in arb_formula_with(false)) {
        // largest B with B ⊆ ρ(A ∩ B), computed by brute force over subsets
        let t = m.truth_set(&a);
        let sp = m.space();
        let oracle = PointSet::all_subsets(m.size())
            .filter(|&b| b.is_subset(sp.rho(t & b)))
            .fold(PointSet::EMPTY, |acc, b| acc | b);
        prop_assert_eq!(m.truth_set(&Formula::tangle(vec![a]).unwrap()), oracle);
    }
}

/// `◇⊤` is valid exactly on dense-in-itself spaces: every weakly transitive
/// frame and every topology with at most 5 points.
#[test]
fn dia_top_detects_density() {
    let dia_top = Formula::dia(Formula::top());
    let check = |sp: DerivativeSpace| {
        let n = sp.size();
        let m = Model::new(sp, (0..n).collect(), Default::default()).unwrap();
        let dense = m.space().rho(m.points()) == m.points();
        assert_eq!(m.check(&dia_top, None).unwrap().holds, dense);
        dense
    };
    let mut dense_frames = 0;
    for n in 1..=5 {
        for succ in relations(n, Some(StaticLogic::WK4)).unwrap() {
            let fr = DynamicFrame::from_successors(succ, None).unwrap();
            // dense iff every world has a successor
            let serial = (0..n).all(|w| !fr.successors(w).is_empty());
            assert_eq!(check(DerivativeSpace::from_frame(&fr)), serial);
            dense_frames += usize::from(serial);
        }
        for pre in preorders(n) {
            let t = FiniteTopology::from_neighbourhoods(pre).unwrap();
            // the Cantor derivative is dense iff no point is isolated
            let isolated = (0..n).any(|x| t.neighbourhood(x) == PointSet::singleton(x));
            assert_eq!(check(DerivativeSpace::from_topology(t)), !isolated);
        }
    }
    assert!(dense_frames > 0);
}

#[test]
fn missing_letters_are_empty() {
    let fr = DynamicFrame::new(2, [(0, 1)], Some(vec![0, 1])).unwrap();
    let m = Model::from_frame(&fr, Default::default()).unwrap();
    let f = derivelog::formula::parse("<>zz | X zz").unwrap();
    assert_eq!(m.missing_variables(&f), vec!["zz".to_string()]);
    assert!(m.truth_set(&f).is_empty());
}
