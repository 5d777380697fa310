use proptest::prelude::*;

use shifted_schur::kernel::JTable;
use shifted_schur::partition::StrictPartition;
use shifted_schur::reference::pfaffian_expansion;
use shifted_schur::skew::determinant;
use shifted_schur::{MiwaParams, SkewMatrix};

fn skew(n: usize, entries: &[f64]) -> SkewMatrix {
    let mut it = entries.iter().cycle();
    SkewMatrix::from_upper(n, |_, _| *it.next().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfaffian_squares_to_determinant(
        half in 1usize..6,
        entries in prop::collection::vec(-2.0f64..2.0, 45),
    ) {
        let m = skew(2 * half, &entries);
        let pf = m.pfaffian();
        let det = determinant(&m);
        prop_assert!((pf * pf - det).abs() <= 1e-10 * det.abs().max(1.0));
    }

    #[test]
    fn pfaffian_matches_expansion(
        half in 1usize..5,
        entries in prop::collection::vec(-1.0f64..1.0, 28),
    ) {
        let m = skew(2 * half, &entries);
        prop_assert!((m.pfaffian() - pfaffian_expansion(&m)).abs() < 1e-12);
    }

    #[test]
    fn odd_order_pfaffian_vanishes(
        half in 0usize..5,
        entries in prop::collection::vec(-1.0f64..1.0, 36),
    ) {
        prop_assert_eq!(skew(2 * half + 1, &entries).pfaffian(), 0.0);
    }

    #[test]
    fn maya_round_trip_and_profile_steps(
        parts in prop::collection::btree_set(1u32..40, 0..8),
    ) {
        let lambda = StrictPartition::from_parts_unsorted(parts.into_iter().collect()).unwrap();
        prop_assert_eq!(lambda.maya().to_partition(), lambda.clone());
        for x in 0..45u64 {
            let step = lambda.profile(x + 1) as i64 - lambda.profile(x) as i64;
            prop_assert!(step == 1 || step == -1);
        }
        prop_assert_eq!(lambda.profile(50), 50);
    }

    #[test]
    fn parseval_and_one_point_bounds(t1 in 0.05f64..3.0, t3 in -0.01f64..0.01) {
        let p = MiwaParams::new([(1, t1), (3, t3)]).unwrap();
        let table = JTable::new(&p).unwrap();
        prop_assert!((table.parseval() - 1.0).abs() < 1e-12);
        for m in 1..20u64 {
            let rho = table.one_point(m);
            prop_assert!((-1e-15..=1.0 + 1e-15).contains(&rho));
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let diag = sign * table.kernel(m as i64, -(m as i64)).value;
            prop_assert!((diag - rho).abs() < 1e-14);
        }
    }
}
