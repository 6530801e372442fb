use domestic::analysis::*;
use domestic::coxeter::{CoxeterSystem, Family, TypeSet};
use domestic::geometry::*;
use domestic::morphisms::*;

fn ts(labels: &[usize]) -> TypeSet {
    TypeSet::from_labels(labels)
}

fn maximal(p: &OppositionProfile) -> Vec<TypeSet> {
    p.poset.maximal()
}

fn profile(t: &Automorphism) -> OppositionProfile {
    opp_types_exhaustive(t, u128::MAX).unwrap()
}

#[test]
fn identity_is_capped_with_empty_diagram() {
    let m = BuildingModel::symplectic(3).unwrap();
    let p = profile(&Automorphism::identity(&m));
    assert!(p.poset.is_empty());
    assert!(p.is_capped());
    assert_eq!(p.displacement, 0);
    assert_eq!(p.strategy, Strategy::Trivial);
    assert!(p.diagram().circled.is_empty());
    let r = red2_reduction(&Automorphism::identity(&m), &m.base_chamber(), true).unwrap();
    assert_eq!(r.max_length, 0);
    assert!(!absolute_structure(&Automorphism::identity(&m)).is_union_of_two_hyperplanes);
}

#[test]
fn introduction_posets_for_b3() {
    let m = BuildingModel::symplectic(3).unwrap();
    let nd = profile(&antidiagonal(&m).unwrap());
    assert_eq!(nd.domesticity(), Domesticity::NonDomestic);
    assert_eq!(maximal(&nd), vec![ts(&[1, 2, 3])]);

    let g3 = profile(&family_sp(3, 0).unwrap());
    assert_eq!(maximal(&g3), vec![ts(&[1, 2]), ts(&[1, 3]), ts(&[2, 3])]);
    assert_eq!(g3.domesticity(), Domesticity::StronglyExceptionalDomestic);

    let g31 = profile(&family_sp(3, 1).unwrap());
    assert_eq!(maximal(&g31), vec![ts(&[1, 3]), ts(&[2, 3])]);
    assert_eq!(g31.domesticity(), Domesticity::ExceptionalDomestic);
    let d = g31.diagram();
    assert_eq!((d.circled, d.shaded, d.capped), (ts(&[1, 2, 3]), ts(&[1, 2]), false));
    assert_eq!(g31.predicted_maximal(), maximal(&g31));
}

#[test]
fn decorated_diagrams_of_the_families() {
    let p = profile(&family_sp(4, 1).unwrap());
    let d = p.diagram();
    assert_eq!((d.circled, d.shaded, d.capped), (ts(&[1, 2, 3, 4]), ts(&[1, 2, 3]), false));
    assert_eq!(p.displacement, 15);

    let fano = profile(&family_an_duality(2).unwrap());
    let d = fano.diagram();
    assert_eq!((d.circled, d.shaded), (ts(&[1, 2]), ts(&[1, 2])));
    assert_eq!(fano.domesticity(), Domesticity::StronglyExceptionalDomestic);
    assert_eq!(table_membership(&d).unwrap(), TableMatch::Row { table: 1, row: "A_n(2)".into() });

    // In rank 2 every exceptional domestic automorphism is strongly exceptional.
    let gq = profile(&family_ominus(2, 0).unwrap());
    assert!(gq.domesticity().is_exceptional());
    assert_eq!(gq.domesticity(), Domesticity::StronglyExceptionalDomestic);
    assert_eq!(gq.diagram().circled, ts(&[1, 2]));
}

#[test]
fn symplectic_families_are_strongly_exceptional_domestic() {
    for n in 2..=4 {
        let t = family_sp(n, 0).unwrap();
        let p = profile(&t);
        assert_eq!(p.domesticity(), Domesticity::StronglyExceptionalDomestic, "n={n}");
        assert_eq!(p.displacement, p.predicted_displacement());
        let abs = absolute_structure(&t);
        assert!(abs.is_union_of_two_hyperplanes);
        assert_eq!(abs.fixed_projective_dim, n as isize - 2);
        let row = table_membership(&p.diagram()).unwrap();
        assert_eq!(row, TableMatch::Row { table: 1, row: "B_n(2) or B_n(2,4), full".into() });
    }
    for (n, j) in [(3, 1), (4, 1), (4, 2)] {
        let t = family_sp(n, j).unwrap();
        let abs = absolute_structure(&t);
        assert!(abs.is_union_of_two_hyperplanes);
        assert_eq!(abs.fixed_projective_dim, (n + j) as isize - 2);
        let d = profile(&t).diagram();
        let unshaded = TypeSet::from_labels(&[n + 1 - j]);
        assert!(!d.capped);
        assert!(d.circled.is_subset(TypeSet::full(n)));
        assert_eq!(d.circled.difference(d.shaded), unshaded, "n={n} j={j}");
        assert!(table_membership(&d).is_ok());
    }
}

#[test]
fn symplectic_polarity_of_a3() {
    let p = profile(&a3_symplectic_polarity());
    assert!(p.is_capped());
    assert_eq!(p.diagram().circled, ts(&[2]));
    assert!(p.is_j_domestic(ts(&[1, 3])));
    assert!(!p.is_j_domestic(ts(&[2])));
    assert_eq!(p.domesticity(), Domesticity::Domestic);
    assert_eq!(table_membership(&p.diagram()).unwrap(), TableMatch::CappedOnly);
    assert_eq!(p.displacement, 4);
}

#[test]
fn maximal_types_rebuild_the_poset() {
    for t in [family_sp(3, 0), family_sp(3, 1), family_sp(2, 0), family_an_duality(3), Ok(c3_remark_element())] {
        let t = t.unwrap();
        let p = profile(&t);
        let rebuilt = poset_from_maximal(p.rank, &p.predicted_maximal(), &p.rho);
        assert_eq!(rebuilt, p.poset, "{:?}", t.name());
        let cox = p.coxeter();
        assert!(p.rho.is_stable(p.poset.union()));
        assert_eq!(p.displacement, cox.displacement_from_diagram(p.poset.union(), p.is_capped()).unwrap());
    }
    let cox = CoxeterSystem::new(Family::F, 4).unwrap();
    let rho = cox.opposition_involution().clone();
    let capped = poset_from_maximal(4, &[ts(&[1, 4])], &rho);
    assert_eq!(capped.maximal(), vec![ts(&[1, 4])]);
}

#[test]
fn sp4_has_one_exceptional_domestic_class_and_it_breaks_the_reduction() {
    let g = symplectic_group(2).unwrap();
    assert_eq!(g.len(), 720);
    let m = BuildingModel::symplectic(2).unwrap();
    let mut exceptional = Vec::new();
    for class in g.conjugacy_classes() {
        let t = Automorphism::new(&m, g.matrix(class[0]), false).unwrap();
        let p = profile(&t);
        if g.element_order(class[0]) == 2 {
            assert!(p.is_capped());
        }
        if p.domesticity().is_exceptional() {
            exceptional.push((t, p));
        }
    }
    assert_eq!(exceptional.len(), 1);
    let (t, p) = &exceptional[0];
    assert_eq!(p.displacement, 3);
    let base = fixed_chamber(t, u128::MAX).unwrap().expect("a fixed chamber");
    let r = red2_reduction(t, &base, false).unwrap();
    assert_eq!(r.gate, Gate::Oppomorphism);
    assert!(!r.certifies_displacement);
    assert!(!r.hit_w0);
    assert_eq!(r.max_length, 2);
    let forced = red2_reduction(t, &base, true).unwrap();
    assert_eq!(forced.gate, Gate::Forced);
    assert_eq!(forced.max_length, 2);
}

#[test]
fn reduction_is_exact_for_involutions_of_c3() {
    let m = BuildingModel::symplectic(3).unwrap();
    for t in [family_sp(3, 0).unwrap().compose(&family_sp(3, 0).unwrap()).unwrap(), antidiagonal(&m).unwrap()] {
        if t.is_identity() {
            continue;
        }
        let r = red2_reduction(&t, &m.base_chamber(), false).unwrap();
        assert_eq!(r.gate, Gate::Involution);
        assert_eq!(r.max_length, profile(&t).displacement);
    }
}

#[test]
fn a5_duality_by_reduction() {
    let t = family_an_duality(5).unwrap();
    let r = red2_reduction(&t, &t.model().base_chamber(), false).unwrap();
    assert_eq!(r.gate, Gate::Oppomorphism);
    assert_eq!(r.chambers_visited, 32768);
    assert!(!r.hit_w0);
    assert_eq!(r.max_length, 14);
}

#[test]
fn table_membership_rejects_unlisted_diagrams() {
    let d = DecoratedDiagram {
        family: Family::A,
        rank: 3,
        circled: ts(&[1, 2, 3]),
        shaded: ts(&[2]),
        pi: domestic::coxeter::TypePermutation::identity(3),
        capped: false,
    };
    assert!(matches!(table_membership(&d), Err(AnalysisError::NotInTables(_))));
}

#[test]
fn residue_laws_on_small_models() {
    let m = BuildingModel::symplectic(3).unwrap();
    let g = ChamberGraph::build(&m, DEFAULT_GRAPH_CAP).unwrap();
    let idx = SimplicialIndex::build(&g);
    let oracle = ResidueOracle::new(&g, &idx, true);
    for t in [family_sp(3, 0).unwrap(), family_sp(3, 1).unwrap(), c3_remark_element(), antidiagonal(&m).unwrap()] {
        let r = check_residue_laws(&t, &oracle);
        assert!(r.simplices > 0);
        assert_eq!((r.typemap_failures, r.proj_failures), (0, 0), "{:?}", t.name());
    }
    let m = BuildingModel::projective(3).unwrap();
    let g = ChamberGraph::build(&m, DEFAULT_GRAPH_CAP).unwrap();
    let idx = SimplicialIndex::build(&g);
    let oracle = ResidueOracle::new(&g, &idx, true);
    for t in [family_an_duality(3).unwrap(), a3_symplectic_polarity()] {
        let r = check_residue_laws(&t, &oracle);
        assert_eq!((r.typemap_failures, r.proj_failures), (0, 0), "{:?}", t.name());
    }
}

#[test]
fn residue_laws_for_every_class_of_a3() {
    let m = BuildingModel::projective(3).unwrap();
    let g = ChamberGraph::build(&m, DEFAULT_GRAPH_CAP).unwrap();
    let idx = SimplicialIndex::build(&g);
    let oracle = ResidueOracle::new(&g, &idx, true);
    let gl4 = general_linear_group(4).unwrap();
    for (duality, classes) in [(false, gl4.conjugacy_classes()), (true, gl4.duality_classes())] {
        for c in classes {
            let t = Automorphism::new(&m, gl4.matrix(c[0]), duality).unwrap();
            let r = check_residue_laws(&t, &oracle);
            assert_eq!((r.typemap_failures, r.proj_failures), (0, 0), "{:?}", t.matrix().to_hex_rows());
        }
    }
}

#[test]
fn opposition_predicate_matches_oracle_on_rank_two() {
    for m in [BuildingModel::projective(2).unwrap(), BuildingModel::symplectic(2).unwrap(), BuildingModel::minus_polar(2).unwrap()] {
        let g = ChamberGraph::build(&m, DEFAULT_GRAPH_CAP).unwrap();
        let idx = SimplicialIndex::build(&g);
        let c = compare_opposition_with_oracle(&g, &idx, false);
        assert!(c.pairs > 0);
        assert_eq!(c.mismatches, 0, "{m}");
    }
}

#[test]
fn duality_classes_of_gl3() {
    let g = general_linear_group(3).unwrap();
    assert_eq!(g.len(), 168);
    let classes = g.duality_classes();
    assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), 168);
    let m = BuildingModel::projective(2).unwrap();
    for c in &classes {
        let t = Automorphism::new(&m, g.matrix(c[0]), true).unwrap();
        let p = profile(&t);
        for &i in c {
            let u = Automorphism::new(&m, g.matrix(i), true).unwrap();
            assert_eq!(profile(&u).poset, p.poset);
        }
    }
}

#[test]
fn report_json_fields() {
    let p = profile(&family_sp(3, 1).unwrap());
    let v = serde_json::to_value(p.report(Some(4))).unwrap();
    for key in ["type", "rank", "circled", "shaded", "pi", "capped", "displacement", "domesticity", "maximal_types", "strategy"] {
        assert!(v.get(key).is_some(), "{key} missing from {v}");
    }
    assert_eq!(v["domesticity"], "exceptional-domestic");
    assert!(!p.diagram().render_ascii().is_empty());
}
