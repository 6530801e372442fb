use domestic::coxeter::*;
use proptest::prelude::*;

fn sys(f: Family, n: usize) -> CoxeterSystem {
    CoxeterSystem::new(f, n).unwrap()
}

#[test]
fn positive_root_counts() {
    for (f, n, roots) in [
        (Family::A, 2, 3),
        (Family::A, 5, 15),
        (Family::B, 3, 9),
        (Family::C, 4, 16),
        (Family::D, 5, 20),
        (Family::F, 4, 24),
        (Family::E, 6, 36),
        (Family::E, 7, 63),
        (Family::E, 8, 120),
    ] {
        let c = sys(f, n);
        assert_eq!(c.num_positive(), roots, "{}", c.label());
        assert_eq!(c.w0().length(), roots, "{}", c.label());
        for i in 0..2 * roots {
            assert_eq!(c.is_positive(i), !c.is_positive(c.negate(i)));
        }
    }
}

#[test]
fn longest_elements_and_inversion_sets() {
    let e8 = sys(Family::E, 8);
    assert_eq!(e8.length(e8.w0()), 120);
    let a3 = sys(Family::A, 3);
    assert_eq!(a3.identity().length(), 0);
    for i in 0..3 {
        assert_eq!(a3.inversion_set(&a3.simple_reflection(i)), vec![a3.simple_root(i)]);
    }
}

#[test]
fn opposition_involutions() {
    assert!(sys(Family::F, 4).opposition_involution().is_identity());
    assert_eq!(sys(Family::E, 6).opposition_involution().labels(), vec![6, 2, 5, 4, 3, 1]);
    assert_eq!(sys(Family::A, 3).opposition_involution().labels(), vec![3, 2, 1]);
    assert!(sys(Family::D, 4).opposition_involution().is_identity());
    assert_eq!(sys(Family::D, 5).opposition_involution().labels(), vec![1, 2, 3, 5, 4]);
    assert!(sys(Family::E, 7).opposition_involution().is_identity());
}

#[test]
fn parabolic_diameters() {
    let e8 = sys(Family::E, 8);
    assert_eq!(e8.parabolic_diameter(TypeSet::from_labels(&[1, 2, 3, 4, 5, 6, 7])), 63);
    assert_eq!(e8.parabolic_diameter(TypeSet::from_labels(&[2, 3, 4, 5])), 12);
    assert_eq!(e8.parabolic_diameter(TypeSet::from_labels(&[2, 3, 4, 5, 6, 7])), 30);
    assert_eq!(e8.parabolic_diameter(TypeSet::EMPTY), 0);
}

#[test]
fn displacement_from_diagrams() {
    let e8 = sys(Family::E, 8);
    assert_eq!(e8.displacement_from_diagram(TypeSet::from_labels(&[1, 6, 7, 8]), false).unwrap(), 107);
    let f4 = sys(Family::F, 4);
    assert_eq!(f4.displacement_from_diagram(TypeSet::from_labels(&[1]), true).unwrap(), 15);
    assert_eq!(f4.displacement_from_diagram(TypeSet::full(4), true).unwrap(), 24);
    assert!(f4.displacement_from_diagram(TypeSet::EMPTY, true).is_err());
    // Two different capped diagrams of B_7 share a displacement.
    let b7 = sys(Family::B, 7);
    assert_eq!(b7.displacement_from_diagram(TypeSet::from_labels(&[1, 2, 3, 4, 5]), true).unwrap(), 45);
    assert_eq!(b7.displacement_from_diagram(TypeSet::from_labels(&[2, 4, 6]), true).unwrap(), 45);
}

#[test]
fn e8_displacement_menu() {
    let e8 = sys(Family::E, 8);
    let menu: Vec<usize> = e8.displacement_menu(&e8.e8_diagrams()).unwrap().into_iter().collect();
    assert_eq!(menu, vec![57, 90, 107, 108, 119, 120]);
    assert!(sys(Family::E, 7).e8_diagrams().is_empty());
}

#[test]
fn coset_transversals() {
    let f4 = sys(Family::F, 4);
    assert_eq!(f4.min_coset_transversal(TypeSet::full(4)).len(), 1);
    assert_eq!(f4.min_coset_transversal(TypeSet::EMPTY).len(), 1152);
    let count = |k: &[usize]| -> u64 {
        let t = f4.min_coset_transversal(TypeSet::from_labels(k));
        t.iter().map(|w| 1u64 << w.length()).sum()
    };
    // |F4(2)| / |P| with the Levi factor of type A2 and B2 respectively.
    assert_eq!(count(&[3, 4]), 9398025);
    assert_eq!(count(&[2, 3]), 4385745);
    let t1 = f4.min_coset_transversal(TypeSet::from_labels(&[2, 3, 4]));
    assert_eq!(t1.iter().map(|w| 1u64 << w.length()).sum::<u64>(), 69615);
}

#[test]
fn e7_and_e8_root_order_anchors() {
    let e7 = sys(Family::E, 7);
    assert_eq!(e7.root_digits(43), "1112111");
    assert_eq!(e7.root_digits(44), "0112211");
    assert_eq!(e7.root_digits(45), "1122210");
    let e8 = sys(Family::E, 8);
    assert_eq!(e8.root_digits(87), "11232221");
    assert_eq!(e8.root_digits(88), "12243210");
    assert_eq!(e8.root_digits(89), "12233211");
    assert_eq!(e8.root_digits(e8.highest_root()), "23465432");
}

#[test]
fn weyl_group_orders() {
    assert_eq!(sys(Family::F, 4).order(), 1152);
    assert_eq!(sys(Family::E, 6).order(), 51840);
    assert_eq!(sys(Family::E, 8).order(), 696729600);
    assert_eq!(sys(Family::B, 3).order(), 48);
}

fn word_strategy(rank: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..rank, 0..30)
}

proptest! {
    #[test]
    fn reduced_words_round_trip(word in word_strategy(4)) {
        let f4 = sys(Family::F, 4);
        let w = f4.from_word(&word);
        let r = f4.reduced_word(&w);
        prop_assert_eq!(r.len(), w.length());
        prop_assert_eq!(f4.from_word(&r), w);
    }

    #[test]
    fn multiplication_is_associative_and_inverse_preserves_length(a in word_strategy(6), b in word_strategy(6), c in word_strategy(6)) {
        let e6 = sys(Family::E, 6);
        let (x, y, z) = (e6.from_word(&a), e6.from_word(&b), e6.from_word(&c));
        prop_assert_eq!(e6.multiply(&e6.multiply(&x, &y), &z), e6.multiply(&x, &e6.multiply(&y, &z)));
        let xi = e6.inverse(&x);
        prop_assert_eq!(xi.length(), x.length());
        prop_assert!(e6.multiply(&x, &xi).is_identity());
    }

    #[test]
    fn lengths_are_subadditive_and_w0_is_maximal(a in word_strategy(5), b in word_strategy(5)) {
        let d5 = sys(Family::D, 5);
        let (x, y) = (d5.from_word(&a), d5.from_word(&b));
        prop_assert!(d5.multiply(&x, &y).length() <= x.length() + y.length());
        prop_assert_eq!(d5.multiply(&x, d5.w0()).length(), d5.w0().length() - x.length());
    }

    #[test]
    fn inversion_set_sizes_match_lengths(a in word_strategy(4)) {
        let c4 = sys(Family::C, 4);
        let w = c4.from_word(&a);
        prop_assert_eq!(c4.inversion_set(&w).len(), w.length());
        prop_assert_eq!(c4.left_inversion_set(&w).len(), w.length());
        prop_assert_eq!(c4.left_inversion_set(&w), { let mut v = c4.inversion_set(&c4.inverse(&w)); v.sort(); v });
    }
}
