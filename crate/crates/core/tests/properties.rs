use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use profinite_lab::machines::{parse_machine, MachineSpec};
use profinite_lab::profinite::{closed_ball, dist, norm, open_ball, theta, Progression};
use profinite_lab::{ProfiniteNorm, Radius};

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Some ball, closed or open, around `x` with a small index.
fn ball(x: i64, s: u64, open: bool) -> Progression {
    if open {
        open_ball(&big(x), &Radius::from_ratio(1, s as i64).unwrap()).unwrap()
    } else {
        closed_ball(&big(x), s).unwrap()
    }
}

// A machine over states q0..q3 with every transition drawn at random.
fn random_machine() -> impl Strategy<Value = MachineSpec> {
    let cell = (0..5usize, 0..3usize, any::<bool>());
    proptest::collection::vec(cell, 12).prop_map(|cells| {
        let mut text = String::from("machine r\nstart q0\nhalt h\n");
        let symbols = ["0", "1", "_"];
        for (i, (to, write, right)) in cells.into_iter().enumerate() {
            let to = if to == 4 { "h".to_string() } else { format!("q{to}") };
            let dir = if right { "R" } else { "L" };
            text.push_str(&format!("trans q{} {} -> {to} {} {dir}\n", i / 3, symbols[i % 3], symbols[write]));
        }
        text.push_str("end\n");
        parse_machine(&text).unwrap()
    })
}

proptest! {
    #[test]
    fn ultrametric(x in -1_000_000i64..=1_000_000, y in -1_000_000i64..=1_000_000, z in -1_000_000i64..=1_000_000) {
        let (x, y, z) = (big(x), big(y), big(z));
        prop_assert!(dist(&x, &z) <= dist(&x, &y).max(dist(&y, &z)));
        prop_assert_eq!(dist(&x, &y).is_zero(), x == y);
        prop_assert_eq!(dist(&x, &y), dist(&y, &x));
    }

    #[test]
    fn norm_matches_divisor_scan(x in -10_000_000i64..=10_000_000) {
        let expected = if x == 0 {
            ProfiniteNorm::Zero
        } else {
            ProfiniteNorm::Reciprocal((1u64..).find(|k| x % (*k as i64 + 1) != 0).unwrap())
        };
        prop_assert_eq!(norm(&big(x)), expected);
    }

    #[test]
    fn center_exchange(x in -100_000i64..=100_000, n in 1u64..=12, j in -50i64..=50) {
        let b = closed_ball(&big(x), n).unwrap();
        let y = big(x) + b.modulus() * j;
        prop_assert!(b.contains(&y));
        prop_assert_eq!(closed_ball(&y, n).unwrap(), b);
    }

    #[test]
    fn nesting(x in -5000i64..=5000, y in -5000i64..=5000, s in 1u64..=10, t in 1u64..=10, o1: bool, o2: bool) {
        let (p, q) = (ball(x, s, o1), ball(y, t, o2));
        if p.intersects(&q) {
            prop_assert!(p.is_subset_of(&q) || q.is_subset_of(&p));
        }
    }

    #[test]
    fn canonical_form(c in any::<i64>(), m in 1i64..=1_000_000) {
        let p = Progression::from_parts(c, m).unwrap();
        prop_assert!(p.residue() >= &big(0) && p.residue() < p.modulus());
        prop_assert_eq!(p.residue(), &big(c.mod_floor(&m)));
        prop_assert!(p.contains(&big(c)));
    }

    #[test]
    fn machine_determinism(m in random_machine(), budget in 0u64..200) {
        let first = m.run_with_tape(budget);
        let second = m.run_with_tape(budget);
        prop_assert_eq!(first, second);
    }

    #[test]
    fn machine_monotonicity(m in random_machine(), k in 0u64..100, extra in 0u64..100) {
        if m.halts_within(k) {
            prop_assert!(m.halts_within(k + extra));
        }
        if let profinite_lab::RunStatus::Halted(h) = m.run_bounded(k + extra) {
            prop_assert_eq!(m.run_bounded(h), profinite_lab::RunStatus::Halted(h));
            if h > 0 {
                prop_assert_eq!(m.run_bounded(h - 1), profinite_lab::RunStatus::RunningAfter(h - 1));
            }
        }
    }
}

#[test]
fn theta_divides_successor() {
    for n in 1..=50u64 {
        let a = theta(n).unwrap();
        let b = theta(n + 1).unwrap();
        assert!((&b % &a) == 0u32.into(), "{n}");
    }
    assert!(theta(0).is_err());
}
