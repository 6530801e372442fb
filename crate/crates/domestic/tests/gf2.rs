use domestic::gf2::*;
use domestic::morphisms::sp_matrix;
use proptest::prelude::*;

fn e(i: usize) -> u64 {
    1 << (i - 1)
}

#[test]
fn trivial_subspace_operations() {
    let v = FormedSpace::new(6, FormKind::Symplectic).unwrap();
    let u = v.span(&[e(1) | e(2), e(3)]);
    assert_eq!(u.intersect(&u).unwrap(), u);
    assert_eq!(v.whole().perp(), v.zero_subspace());
    assert_eq!(v.zero_subspace().perp(), v.whole());
    assert!(v.zero_subspace().is_totally_isotropic());
    assert!(v.zero_subspace().is_singular());
}

#[test]
fn c2_perp_of_e1_is_the_hyperplane_x4_zero() {
    let v = FormedSpace::new(4, FormKind::Symplectic).unwrap();
    let p = v.span(&[e(1)]).perp();
    assert_eq!(p, v.span(&[e(1), e(2), e(3)]));
    assert_eq!(p.dim(), 3);
    assert!(!p.contains(&v.span(&[e(4)])));
    assert_eq!(v.form_value(&BitVec::new(4, e(1)), &BitVec::new(4, e(4))), 1);
}

#[test]
fn singular_subspaces_of_quadratic_spaces() {
    for n in 2..=5 {
        let v = FormedSpace::new(2 * n, FormKind::QuadraticPlus).unwrap();
        let u = v.span(&(1..=n).map(e).collect::<Vec<_>>());
        assert!(u.is_singular());
        assert_eq!(u.dim(), n);
        assert_eq!(u.perp(), u);
    }
    let m = FormedSpace::new(6, FormKind::QuadraticMinus).unwrap();
    let x = BitVec::new(6, e(3) | e(4));
    assert_eq!(m.quad_value(&x).unwrap(), 1);
    assert!(!m.span(&[x.bits]).is_singular());
    assert!(m.span(&[e(1)]).is_singular());
}

#[test]
fn quad_value_needs_a_quadratic_form() {
    let v = FormedSpace::new(4, FormKind::Symplectic).unwrap();
    assert!(matches!(v.quad_value(&BitVec::new(4, 1)), Err(Gf2Error::NoQuadraticForm(_))));
    assert!(FormedSpace::new(5, FormKind::Symplectic).is_err());
}

#[test]
fn ambient_mismatch_is_rejected() {
    let a = FormedSpace::new(4, FormKind::Symplectic).unwrap().whole();
    let b = FormedSpace::new(4, FormKind::QuadraticPlus).unwrap().whole();
    assert!(a.intersect(&b).is_err());
    assert!(a.span(&b).is_err());
}

#[test]
fn identity_and_recursive_symplectic_elements() {
    let v = FormedSpace::new(4, FormKind::Symplectic).unwrap();
    let id = BitMat::identity(4);
    assert!(v.preserves_form(&id));
    assert_eq!(dickson_invariant(&id), 0);
    for n in 2..=5 {
        let space = FormedSpace::new(2 * n, FormKind::Symplectic).unwrap();
        assert!(space.preserves_form(&sp_matrix(n)), "n={n}");
    }
}

#[test]
fn reflection_in_a_nonsingular_vector_has_dickson_one() {
    let q = FormedSpace::new(4, FormKind::QuadraticPlus).unwrap();
    let a = e(1) | e(4);
    assert_eq!(q.quad_bits(a), 1);
    // x ↦ x + (x, a) a
    let rows: Vec<Vec<u8>> = (0..4)
        .map(|i| (0..4).map(|j| ((j == i) as u64 ^ (q.form_bits(e(j + 1), a) & (a >> i))) as u8).collect())
        .collect();
    let refs: Vec<&[u8]> = rows.iter().map(|r| r.as_slice()).collect();
    let r = BitMat::from_rows(&refs);
    assert!(q.preserves_form(&r));
    assert_eq!(r.mul(&r), BitMat::identity(4));
    assert_eq!(dickson_invariant(&r), 1);
}

#[test]
fn hex_round_trip() {
    let g = sp_matrix(3);
    assert_eq!(BitMat::from_hex_rows(&g.to_hex_rows(), 6).unwrap(), g);
    let json = serde_json::to_string(&g).unwrap();
    assert_eq!(serde_json::from_str::<BitMat>(&json).unwrap(), g);
}

fn subspace(d: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..(1 << d), 0..d)
}

fn invertible(d: usize) -> impl Strategy<Value = BitMat> {
    prop::collection::vec(0u64..(1 << d), d).prop_filter_map("singular", move |rows| {
        let m = BitMat::from_rows(
            &rows.iter().map(|r| (0..d).map(|j| (r >> j & 1) as u8).collect::<Vec<_>>()).collect::<Vec<_>>().iter().map(|v| v.as_slice()).collect::<Vec<_>>(),
        );
        m.inverse().ok().map(|_| m)
    })
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(rows in subspace(8)) {
        let v = FormedSpace::new(8, FormKind::Symplectic).unwrap();
        let u = v.span(&rows);
        prop_assert_eq!(Subspace::canonicalize(v, u.rows()), u.clone());
        prop_assert_eq!(u.dim(), rank_of(&rows));
    }

    #[test]
    fn dimension_formula(a in subspace(8), b in subspace(8)) {
        let v = FormedSpace::new(8, FormKind::QuadraticMinus).unwrap();
        let (u, w) = (v.span(&a), v.span(&b));
        let s = u.span(&w).unwrap();
        let i = u.intersect(&w).unwrap();
        prop_assert_eq!(u.dim() + w.dim(), s.dim() + i.dim());
        prop_assert!(u.contains(&i) && w.contains(&i) && s.contains(&u) && s.contains(&w));
    }

    #[test]
    fn perp_is_an_inclusion_reversing_involution(a in subspace(8), b in subspace(8)) {
        let v = FormedSpace::new(8, FormKind::Symplectic).unwrap();
        let (u, w) = (v.span(&a), v.span(&b));
        prop_assert_eq!(u.perp().perp(), u.clone());
        prop_assert_eq!(u.perp().dim(), 8 - u.dim());
        let uw = u.intersect(&w).unwrap();
        prop_assert!(uw.perp().contains(&u.perp()));
    }

    #[test]
    fn matrix_multiplication_is_associative(a in invertible(6), b in invertible(6), c in invertible(6)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inverse().unwrap()).is_identity());
        prop_assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
        prop_assert!(a.add(&b).rank() <= 6);
    }

    #[test]
    fn polarization_of_quadratic_forms(x in 0u64..256, y in 0u64..256) {
        for kind in [FormKind::QuadraticPlus, FormKind::QuadraticMinus] {
            let v = FormedSpace::new(8, kind).unwrap();
            prop_assert_eq!(v.quad_bits(x ^ y) ^ v.quad_bits(x) ^ v.quad_bits(y), v.form_bits(x, y));
            prop_assert_eq!(v.form_bits(x, x), 0);
        }
    }
}
