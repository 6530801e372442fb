use domestic::geometry::{BuildingModel, ChamberGraph, DEFAULT_GRAPH_CAP};

fn models() -> Vec<BuildingModel> {
    vec![
        BuildingModel::projective(2).unwrap(),
        BuildingModel::projective(3).unwrap(),
        BuildingModel::symplectic(2).unwrap(),
        BuildingModel::symplectic(3).unwrap(),
        BuildingModel::minus_polar(2).unwrap(),
        BuildingModel::oriflamme(3).unwrap(),
    ]
}

#[test]
fn chamber_counts_match_poincare_sums() {
    let expected = [
        (BuildingModel::projective(2).unwrap(), 21u128),
        (BuildingModel::projective(3).unwrap(), 315),
        (BuildingModel::projective(4).unwrap(), 9765),
        (BuildingModel::symplectic(2).unwrap(), 45),
        (BuildingModel::symplectic(3).unwrap(), 2835),
        (BuildingModel::oriflamme(4).unwrap(), 42525),
        (BuildingModel::minus_polar(2).unwrap(), 135),
        (BuildingModel::minus_polar(3).unwrap(), 16065),
    ];
    for (m, n) in expected {
        assert_eq!(m.chamber_count(), n, "{m}");
        let all = m.enumerate_chambers(u128::MAX).unwrap();
        assert_eq!(all.len() as u128, n, "{m}");
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len(), "{m}: duplicate chambers");
    }
}

#[test]
fn panels_have_the_right_thickness() {
    for m in models().into_iter().chain([BuildingModel::oriflamme(4).unwrap()]) {
        let all = m.enumerate_chambers(u128::MAX).unwrap();
        for c in all.iter().take(200) {
            for s in 0..m.rank() {
                let nb = m.neighbors(c, s);
                assert_eq!(nb.len() + 1, m.panel_size(s), "{m} type {s}");
                for d in &nb {
                    assert!(m.neighbors(d, s).contains(c));
                    assert_eq!(m.delta(c, d), m.coxeter().simple_reflection(s), "{m} type {s}");
                }
            }
        }
    }
}

#[test]
fn fast_distance_matches_gallery_oracle() {
    for m in models() {
        let g = ChamberGraph::build(&m, DEFAULT_GRAPH_CAP).unwrap();
        for (ci, c) in g.chambers.iter().enumerate() {
            let dist = g.distances_from(ci as u32);
            for (di, d) in g.chambers.iter().enumerate() {
                let want = &g.weyl.elems[dist[di] as usize];
                assert_eq!(&m.delta(c, d), want, "{m}");
            }
        }
    }
}

#[test]
fn fast_distance_matches_oracle_on_d4_from_sampled_chambers() {
    let m = BuildingModel::oriflamme(4).unwrap();
    let g = ChamberGraph::build(&m, DEFAULT_GRAPH_CAP).unwrap();
    for ci in (0..g.len()).step_by(4999) {
        let dist = g.distances_from(ci as u32);
        let c = &g.chambers[ci];
        for (di, d) in g.chambers.iter().enumerate() {
            assert_eq!(m.delta(c, d), g.weyl.elems[dist[di] as usize]);
        }
    }
}

#[test]
fn vertex_counts_match_coset_sums() {
    for m in models().into_iter().chain([BuildingModel::oriflamme(4).unwrap()]) {
        for t in 0..m.rank() {
            let vs = m.enumerate_vertices(t, u128::MAX).unwrap();
            assert_eq!(vs.len() as u128, m.vertex_count(t), "{m} type {t}");
            assert!(vs.iter().all(|v| m.is_vertex(v)));
        }
    }
}

#[test]
fn chambers_round_trip_through_vertices() {
    for m in models() {
        for c in m.enumerate_chambers(u128::MAX).unwrap() {
            let vs: Vec<_> = m.chamber_vertices(&c).into_iter().map(|v| v.space).collect();
            assert_eq!(m.chamber_from_vertices(&vs), c, "{m}");
            assert!(m.simplex(m.chamber_vertices(&c)).is_ok());
        }
    }
}
