use proptest::prelude::*;

use profinite_lab::fixtures;
use profinite_lab::lamp_groups::{
    identification, is_trivial, is_trivial_with, normal_form, parse_word, relators, AmalgamSet, Factor, Generator,
    Strategy as Reduction, Word,
};
use profinite_lab::{HaltingSet, Registry};

fn loop_set() -> HaltingSet {
    HaltingSet::new(Registry::parse(fixtures::LOOP).unwrap())
}

fn words(max: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(proptest::sample::select(Generator::ALL.to_vec()), 0..=max).prop_map(Word)
}

#[test]
fn relators_are_trivial() {
    let set = loop_set();
    let rels = relators(30, &set);
    // two squares, two commutators per i, identifications for j in A
    let ids = (-30..=30).filter(|&j| set.contains(j)).count();
    assert_eq!(rels.len(), 2 + 2 * 61 + ids);
    for r in &rels {
        assert!(is_trivial(r, &set), "{r}");
    }
}

#[test]
fn identification_criterion() {
    let set = loop_set();
    for j in -30..=30 {
        assert_eq!(is_trivial(&identification(j), &set), set.contains(j), "j = {j}");
    }
    assert!(!set.contains(2));
    assert!(!set.contains(-58));
}

#[test]
fn reference_examples() {
    let set = loop_set();
    assert!(normal_form(&parse_word("ee").unwrap(), &set).is_empty());
    let nf = normal_form(&parse_word("f").unwrap(), &set);
    assert_eq!(nf.len(), 1);
    assert_eq!(nf[0].factor, Factor::L);
    let nf = normal_form(&parse_word("aaeAA bbfBB").unwrap(), &set);
    assert_eq!(nf.iter().map(|s| s.factor).collect::<Vec<_>>(), [Factor::L, Factor::LHat]);
    assert!(is_trivial(&parse_word("aeAeaeAe").unwrap(), &set));
}

#[test]
fn halting_machine_changes_the_group() {
    // with HALT1, 62 + 360360Z lies in B but 2 + 360360Z only partly
    let set = HaltingSet::new(Registry::parse(fixtures::HALT1).unwrap());
    assert!(!is_trivial(&identification(62), &set));
    assert!(is_trivial(&identification(122), &set));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn involution(w in words(12)) {
        let set = loop_set();
        prop_assert!(is_trivial(&w.concat(&w.inverse()), &set));
    }

    #[test]
    fn conjugation_invariance(g in words(6), w in words(10)) {
        let set = loop_set();
        let conj = g.concat(&w).concat(&g.inverse());
        prop_assert_eq!(is_trivial(&conj, &set), is_trivial(&w, &set));
    }

    #[test]
    fn strategies_agree(w in words(12)) {
        let set = loop_set();
        prop_assert_eq!(
            is_trivial_with(&w, &set, Reduction::LeftmostFirst),
            is_trivial_with(&w, &set, Reduction::RightmostFirst)
        );
    }
}
