use num_bigint::{BigInt, BigUint};

use profinite_lab::depth::{
    default_schedule, depth_table, quotient_kill_shifts, word_length, DepthError, DepthHarness, DepthOutcome,
    QuotientOutcome,
};
use profinite_lab::fixtures;
use profinite_lab::{HaltingSet, Registry};

fn set_of(texts: &[&str]) -> HaltingSet {
    HaltingSet::new(Registry::parse(&texts.join("\n")).unwrap())
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn verdict(set: &HaltingSet, x: i64, n: u64) -> (bool, Option<BigInt>) {
    match quotient_kill_shifts(set, &big(x), &BigUint::from(n), 1000).unwrap() {
        QuotientOutcome::Decided(v) => (v.identity_in_quotient, v.witness_k),
        QuotientOutcome::BudgetExhausted => panic!("undecided at ({x}, {n})"),
    }
}

#[test]
fn quotient_examples() {
    let set = set_of(&[fixtures::LOOP_DECLARED]);
    assert_eq!(verdict(&set, 0, 7), (true, Some(big(0))));
    assert_eq!(verdict(&set, 2, 60), (false, None));
    let (identity, k) = verdict(&set, 2, 7);
    assert!(identity);
    assert!(set.member_a(&(big(2) + k.unwrap() * 7)).unwrap());
}

#[test]
fn quotient_without_declaration_exhausts() {
    // LOOP gives no exact picture of X_1, and 2 + 60Z really is inside B
    let set = set_of(&[fixtures::LOOP]);
    let out = quotient_kill_shifts(&set, &big(2), &BigUint::from(60u32), 50).unwrap();
    assert_eq!(out, QuotientOutcome::BudgetExhausted);
}

#[test]
fn table_rows() {
    let set = set_of(&[fixtures::HALT14]);
    let xs = [2, 62, 3, -58].map(big);
    let rows = depth_table(&set, &xs, &default_schedule(), 10_000).unwrap();
    let moduli: Vec<_> = rows.iter().map(|r| r.outcome.clone()).collect();
    assert_eq!(
        moduli,
        vec![
            DepthOutcome::Witness(BigUint::from(232792560u32)),
            DepthOutcome::Witness(BigUint::from(360360u32)),
            DepthOutcome::Skipped,
            DepthOutcome::Witness(BigUint::from(360360u32)),
        ]
    );
    assert_eq!(rows[0].word_length, BigUint::from(10u32));
    assert_eq!(word_length(&big(-58)), BigUint::from(234u32));
}

#[test]
fn table_unknown_for_undeclared_loop() {
    let set = set_of(&[fixtures::LOOP]);
    let rows = depth_table(&set, &[big(2)], &default_schedule(), 100).unwrap();
    assert_eq!(rows[0].outcome, DepthOutcome::Unknown);
    assert!(rows[0].witness_modulus().is_none());
}

#[test]
fn witness_growth_across_fixtures() {
    let mut last = BigUint::from(0u32);
    for text in [fixtures::LOOP_DECLARED, fixtures::HALT1, fixtures::HALT14] {
        let set = set_of(&[text]);
        let rows = depth_table(&set, &[big(2)], &default_schedule(), 10_000).unwrap();
        let n = rows[0].witness_modulus().unwrap().clone();
        assert!(n > last);
        last = n;
    }
    assert_eq!(last, BigUint::from(232792560u32));
}

#[test]
fn schedule_errors() {
    let set = set_of(&[fixtures::LOOP]);
    assert_eq!(depth_table(&set, &[big(2)], &[], 10), Err(DepthError::EmptySchedule));
    assert_eq!(
        depth_table(&set, &[big(2)], &[BigUint::from(0u32)], 10),
        Err(DepthError::ZeroModulus)
    );
}

#[test]
fn sequential_and_parallel_tables_agree() {
    let set = set_of(&[fixtures::HALT1, fixtures::LOOP_DECLARED]);
    let harness = DepthHarness::new(&set, 1000);
    let xs: Vec<BigInt> = (-200..200).map(|j| big(2 + 60 * j)).chain((0..40).map(big)).collect();
    let schedule = default_schedule();
    assert_eq!(
        harness.depth_table(&xs, &schedule).unwrap(),
        harness.depth_table_seq(&xs, &schedule).unwrap()
    );
}
