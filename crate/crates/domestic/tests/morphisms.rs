use domestic::geometry::BuildingModel;
use domestic::gf2::dickson_invariant;
use domestic::morphisms::*;

#[test]
fn an_dualities_have_the_stated_orders_and_absolute_sets() {
    for (n, ord) in [(2, 8), (3, 4), (4, 8), (5, 4)] {
        let t = family_an_duality(n).unwrap();
        assert_eq!(t.order().unwrap(), ord, "n={n}");
        let abs = t.absolute_points();
        let want: Vec<u64> = Automorphism::model_points(t.model()).into_iter().filter(|x| x & 1 == 0 || x & 2 == 0).collect();
        assert_eq!(abs, want, "n={n}");
    }
}

#[test]
fn families_preserve_their_forms() {
    for n in 2..=5 {
        family_sp(n, 0).unwrap();
        for j in 1..=n.saturating_sub(2) {
            family_sp(n, j).unwrap();
        }
    }
    for n in 2..=5 {
        family_ominus(n, 0).unwrap();
        for j in 1..=n.saturating_sub(2) {
            family_ominus(n, j).unwrap();
        }
    }
    for n in 3..=7 {
        let h = family_oplus(n, 0).unwrap();
        assert_eq!(h.is_duality(), dickson_invariant(h.matrix()) == 1);
        assert!(h.is_oppomorphism(), "h_{n} should be an oppomorphism");
        for j in 1..=n.saturating_sub(3) {
            let h = family_oplus(n, j).unwrap();
            assert_eq!(h.is_oppomorphism(), j % 2 == 0, "h_{n}^({j})");
        }
    }
}

#[test]
fn remark_element_has_order_six() {
    assert_eq!(c3_remark_element().order().unwrap(), 6);
}

#[test]
fn sp_fixed_spaces_have_the_stated_dimensions() {
    for n in 2..=5 {
        assert_eq!(family_sp(n, 0).unwrap().fixed_space().projective_dim(), n as isize - 2);
        for j in 1..=n - 2 {
            assert_eq!(family_sp(n, j).unwrap().fixed_space().projective_dim(), (n + j) as isize - 2);
        }
    }
}

#[test]
fn identity_has_order_one() {
    let m = BuildingModel::symplectic(2).unwrap();
    assert_eq!(Automorphism::identity(&m).order().unwrap(), 1);
}
