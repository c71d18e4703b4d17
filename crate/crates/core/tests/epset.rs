use fglab::epset::EPSet;
use proptest::prelude::*;

fn epset() -> impl Strategy<Value = EPSet> {
    let leaf = prop_oneof![
        Just(EPSet::empty()),
        Just(EPSet::full()),
        prop::collection::vec(-30i64..30, 0..6).prop_map(EPSet::finite),
        (-20i64..20).prop_map(EPSet::at_least),
        (-20i64..20).prop_map(EPSet::at_most),
        (1i64..6, 0i64..6, prop::option::of(-20i64..20), prop::option::of(-20i64..20))
            .prop_map(|(m, r, from, to)| EPSet::progression(m, r, from, to)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.union(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.intersection(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.symmetric_difference(&b)),
            inner.clone().prop_map(|a| a.complement()),
        ]
    })
}

const LO: i64 = -120;
const HI: i64 = 120;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn de_morgan(a in epset(), b in epset()) {
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersection(&b.complement()));
        prop_assert_eq!(a.intersection(&b).complement(), a.complement().union(&b.complement()));
    }

    #[test]
    fn operations_are_pointwise(a in epset(), b in epset()) {
        let (u, i, d, x) = (a.union(&b), a.intersection(&b), a.difference(&b), a.symmetric_difference(&b));
        for k in LO..=HI {
            let (p, q) = (a.contains(k), b.contains(k));
            prop_assert_eq!(u.contains(k), p || q);
            prop_assert_eq!(i.contains(k), p && q);
            prop_assert_eq!(d.contains(k), p && !q);
            prop_assert_eq!(x.contains(k), p != q);
        }
    }

    #[test]
    fn affine_images(a in epset(), negate in any::<bool>(), offset in -15i64..15) {
        let sign = if negate { -1 } else { 1 };
        let img = a.affine_image(sign, offset);
        for k in LO..=HI {
            prop_assert_eq!(img.contains(sign * k + offset), a.contains(k));
        }
    }

    #[test]
    fn components_round_trip(a in epset()) {
        let back = EPSet::from_components(&a.to_components()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn finiteness_matches_points(a in epset()) {
        if let Some(points) = a.finite_points() {
            prop_assert!(a.is_finite());
            prop_assert!(points.iter().all(|&k| a.contains(k)));
            let inside = (LO..=HI).filter(|&k| a.contains(k)).count();
            prop_assert_eq!(inside, points.iter().filter(|&&k| (LO..=HI).contains(&k)).count());
        }
    }
}
