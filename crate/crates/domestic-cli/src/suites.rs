use std::collections::BTreeSet;
use std::fmt::Debug;
use std::time::{Duration, Instant};

use domestic::analysis::*;
use domestic::chevalley::ChevalleySystem;
use domestic::coxeter::{CoxeterSystem, Family, TypeSet};
use domestic::geometry::*;
use domestic::morphisms::*;
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::classify;
use crate::{CliError, Format, Options};

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

/// Outcome of one suite. The runtime goes to stderr so that stdout is
/// identical from run to run.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<Case>,
    pub pass: bool,
    #[serde(skip)]
    pub runtime: Duration,
}

#[derive(Default)]
struct Cases(Vec<Case>);

impl Cases {
    fn eq<T: Debug + PartialEq>(&mut self, name: impl Into<String>, expected: T, computed: T) {
        let pass = expected == computed;
        self.0.push(Case { name: name.into(), expected: format!("{expected:?}"), computed: format!("{computed:?}"), pass });
    }
}

type SuiteFn = fn(&mut Cases, Options) -> Result<(), CliError>;

const SUITES: &[(&str, bool, SuiteFn)] = &[
    ("e8-displacement-menu", false, e8_menu),
    ("an-dualities", false, an_dualities),
    ("intro-b3-posets", false, intro_b3),
    ("cn-families", false, cn_families),
    ("sp4-uniqueness", false, sp4_uniqueness),
    ("orthogonal-families", false, orthogonal),
    ("involutions", false, involutions),
    ("f4", false, f4),
    ("residue-laws", false, residue_laws),
    ("oracle", false, oracle),
    ("e7", true, e7),
    ("f4-fixed", true, f4_fixed),
    ("e8-sampling", true, e8_sampling),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

fn run_suite(name: &str, f: SuiteFn, opts: Options) -> Result<SuiteReport, CliError> {
    let start = Instant::now();
    let mut cases = Cases::default();
    f(&mut cases, opts)?;
    let pass = cases.0.iter().all(|c| c.pass);
    Ok(SuiteReport { suite: name.to_string(), cases: cases.0, pass, runtime: start.elapsed() })
}

/// Runs `name` (or every suite for `all`) and prints the reports. Returns
/// whether every case passed.
pub fn verify(name: &str, opts: Options) -> Result<bool, CliError> {
    let selected: Vec<&(&str, bool, SuiteFn)> = if name == "all" {
        SUITES.iter().filter(|s| opts.extended || !s.1).collect()
    } else {
        let s = SUITES
            .iter()
            .find(|s| s.0 == name)
            .ok_or_else(|| CliError::Invalid(format!("unknown suite {name}; known suites: all, {}", suite_names().join(", "))))?;
        if s.1 && !opts.extended {
            return Err(CliError::Invalid(format!("suite {name} is long-running; pass --extended")));
        }
        vec![s]
    };
    let mut reports = Vec::new();
    for (n, _, f) in selected {
        let r = run_suite(n, *f, opts)?;
        eprintln!("{n}: {:.1} s", r.runtime.as_secs_f64());
        reports.push(r);
    }
    match opts.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&reports)?),
        Format::Csv => {
            println!("suite,case,expected,computed,pass");
            for r in &reports {
                for c in &r.cases {
                    let q = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
                    println!("{},{},{},{},{}", r.suite, q(&c.name), q(&c.expected), q(&c.computed), c.pass);
                }
            }
        }
        Format::Ascii => {
            for r in &reports {
                println!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.suite);
                for c in &r.cases {
                    if c.pass {
                        println!("  ok    {}: {}", c.name, c.computed);
                    } else {
                        println!("  FAIL  {}: expected {}, computed {}", c.name, c.expected, c.computed);
                    }
                }
            }
        }
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn ts(labels: &[usize]) -> TypeSet {
    TypeSet::from_labels(labels)
}

fn profile(t: &Automorphism, opts: Options) -> Result<OppositionProfile, CliError> {
    Ok(opp_types_exhaustive(t, opts.budget)?)
}

fn diagram(p: &OppositionProfile) -> (Vec<usize>, Vec<usize>, bool) {
    let d = p.diagram();
    (d.circled.labels(), d.shaded.labels(), d.capped)
}

fn e8_menu(c: &mut Cases, _: Options) -> Result<(), CliError> {
    let e8 = CoxeterSystem::new(Family::E, 8).map_err(|e| CliError::Invalid(e.to_string()))?;
    let menu: Vec<usize> = e8.displacement_menu(&e8.e8_diagrams()).map_err(|e| CliError::Invalid(e.to_string()))?.into_iter().collect();
    c.eq("displacement menu", vec![57, 90, 107, 108, 119, 120], menu);
    for (k, d) in [(TypeSet::full(8), 120), (ts(&[1, 2, 3, 4, 5, 6, 7]), 63), (ts(&[2, 3, 4, 5, 6, 7]), 30), (ts(&[2, 3, 4, 5]), 12)] {
        c.eq(format!("diam W_{k}"), d, e8.parabolic_diameter(k));
    }
    Ok(())
}

fn an_dualities(c: &mut Cases, opts: Options) -> Result<(), CliError> {
    for (n, order) in [(2, 8), (3, 4), (4, 8), (5, 4)] {
        let t = family_an_duality(n)?;
        c.eq(format!("A{n} order"), order, t.order()?);
        c.eq(format!("A{n} absolute set is two hyperplanes"), true, absolute_structure(&t).is_union_of_two_hyperplanes);
        c.eq(format!("A{n} domesticity"), Domesticity::StronglyExceptionalDomestic, profile(&t, opts)?.domesticity());
    }
    let t = family_an_duality(5)?;
    let r = red2_reduction(&t, &t.model().base_chamber(), false)?;
    c.eq("A5 reduction hits w0", false, r.hit_w0);
    Ok(())
}

fn intro_b3(c: &mut Cases, opts: Options) -> Result<(), CliError> {
    let m = BuildingModel::symplectic(3)?;
    let posets = [
        (antidiagonal(&m)?, vec![vec![1, 2, 3]]),
        (family_sp(3, 0)?, vec![vec![1, 2], vec![1, 3], vec![2, 3]]),
        (family_sp(3, 1)?, vec![vec![1, 3], vec![2, 3]]),
    ];
    for (t, maximal) in posets {
        let p = profile(&t, opts)?;
        let computed: Vec<Vec<usize>> = p.poset.maximal().iter().map(|t| t.labels()).collect();
        c.eq(format!("{} maximal types", t.name().unwrap_or("antidiagonal")), maximal, computed);
    }
    let p = profile(&family_sp(3, 1)?, opts)?;
    c.eq("sp:3:1 diagram", (vec![1, 2, 3], vec![1, 2], false), diagram(&p));
    c.eq("sp:3:1 in the classical table", true, matches!(table_membership(&p.diagram()), Ok(TableMatch::Row { table: 1, .. })));
    Ok(())
}

fn cn_families(c: &mut Cases, opts: Options) -> Result<(), CliError> {
    for n in 2..=4usize {
        for j in 0..=n - 2 {
            let t = family_sp(n, j)?;
            c.eq(format!("sp:{n}:{j} k"), (n + j) as isize - 2, absolute_structure(&t).fixed_projective_dim);
            let p = profile(&t, opts)?;
            let (want, circled, shaded) = match j {
                0 => (Domesticity::StronglyExceptionalDomestic, n, n),
                1 => (Domesticity::ExceptionalDomestic, n, n - 1),
                _ => (Domesticity::Domestic, n + 1 - j, n - j),
            };
            c.eq(format!("sp:{n}:{j} domesticity"), want, p.domesticity());
            c.eq(format!("sp:{n}:{j} diagram"), ((1..=circled).collect(), (1..=shaded).collect(), false), diagram(&p));
        }
    }
    Ok(())
}

fn sp4_uniqueness(c: &mut Cases, opts: Options) -> Result<(), CliError> {
    let (_, rows) = classify("sp4", opts.budget)?;
    let exceptional: Vec<_> = rows.iter().filter(|r| r.report.domesticity.is_exceptional()).collect();
    c.eq("exceptional domestic classes", 1, exceptional.len());
    if let Some(r) = exceptional.first() {
        c.eq("displacement", 3, r.report.displacement);
    }
    let g = symplectic_group(2)?;
    let m = BuildingModel::symplectic(2)?;
    for class in g.conjugacy_classes() {
        let t = Automorphism::new(&m, g.matrix(class[0]), false)?;
        if profile(&t, opts)?.domesticity().is_exceptional() {
            let base = fixed_chamber(&t, opts.budget)?.ok_or_else(|| CliError::Invalid("no fixed chamber".into()))?;
            c.eq("max over chambers opposite a fixed chamber", 2, red2_reduction(&t, &base, true)?.max_length);
        }
    }
    Ok(())
}

fn orthogonal(c: &mut Cases, opts: Options) -> Result<(), CliError> {
    c.eq("ominus:2:0 exceptional", true, profile(&family_ominus(2, 0)?, opts)?.domesticity().is_exceptional());
    let d4 = family_oplus(4, 0)?;
    c.eq("oplus:4:0 domesticity", Domesticity::StronglyExceptionalDomestic, profile(&d4, opts)?.domesticity());
    c.eq("oplus:4:0 oppomorphism", true, d4.is_oppomorphism());
    let d5 = family_oplus(5, 1)?;
    let p = profile(&d5, opts)?;
    c.eq("oplus:5:1 diagram", (vec![1, 2, 3, 4, 5], vec![1, 2, 3], false), diagram(&p));
    c.eq("oplus:5:1 oppomorphism", false, d5.is_oppomorphism());
    for (name, t) in [("oplus:4:0", &d4), ("oplus:5:1", &d5)] {
        c.eq(format!("{name} Dickson invariant"), t.is_duality() as u8, domestic::gf2::dickson_invariant(t.matrix()));
    }
    Ok(())
}

fn involutions(c: &mut Cases, opts: Options) -> Result<(), CliError> {
    for n in [2, 3] {
        let g = symplectic_group(n)?;
        let m = BuildingModel::symplectic(n)?;
        let invs: Vec<usize> = (0..g.len()).into_par_iter().filter(|&i| g.element_order(i) == 2).collect();
        let uncapped = invs
            .par_iter()
            .filter(|&&i| {
                let t = Automorphism::new(&m, g.matrix(i), false).expect("group element");
                !opp_types_exhaustive(&t, opts.budget).map(|p| p.is_capped()).unwrap_or(false)
            })
            .count();
        c.eq(format!("Sp{}(2) uncapped involutions out of {}", 2 * n, invs.len()), 0, uncapped);
    }
    Ok(())
}

fn f4(c: &mut Cases, opts: Options) -> Result<(), CliError> {
    let f4 = ChevalleySystem::new(Family::F, 4)?;
    let cox = f4.coxeter();
    let el = |n: &str| f4.theta_element(&format!("F4.{n}"));
    let orders: Vec<u64> = (1..=6).map(|i| el(&format!("theta{i}")).map(|t| f4.element_order(&t))).collect::<Result<_, _>>()?;
    c.eq("orders", vec![2, 2, 2, 4, 4, 4], orders);
    let cells = [cox.reflection(cox.highest_root()), cox.reflection(cox.root_from_digits("1232").expect("root")), {
        cox.multiply(cox.w0(), &cox.longest_parabolic(ts(&[2, 3])))
    }];
    for (i, cell) in cells.iter().enumerate() {
        let r = f4.orbit_search(&el(&format!("theta{}", i + 1))?, opts.budget)?;
        c.eq(format!("theta{} cell", i + 1), cox.reduced_word(cell), cox.reduced_word(&r.max_cell));
        c.eq(format!("theta{} displacement", i + 1), [15, 15, 20][i], r.max_cell.length());
    }
    let r4 = f4.aset_search(&el("theta4p")?, opts.budget)?;
    c.eq("theta4' A-set cases, hit w0, max", (256, false, 23), (r4.cases, r4.hit_w0, r4.max_cell.length()));
    let r6 = f4.aset_search(&el("theta6p")?, opts.budget)?;
    c.eq("theta6' A-set cases, hit w0", (1024, false), (r6.cases, r6.hit_w0));
    let k = f4.coset_search(&el("theta4p")?, ts(&[1, 2]), true, opts.budget)?;
    c.eq("theta4' {1,2} cosets, found", (3885, false), (k.candidates, k.found.is_some()));
    let k = f4.coset_search(&el("theta5")?, ts(&[3, 4]), true, opts.budget)?;
    c.eq("theta5 {3,4} found", false, k.found.is_some());
    let expected = [
        (vec![1], vec![], true),
        (vec![4], vec![], true),
        (vec![1, 4], vec![], true),
        (vec![1, 2, 3, 4], vec![1, 2], false),
        (vec![1, 2, 3, 4], vec![3, 4], false),
        (vec![1, 2, 3, 4], vec![1, 2, 3, 4], false),
    ];
    for (i, exp) in expected.into_iter().enumerate() {
        let t = el(&format!("theta{}", i + 1))?;
        let r = f4.orbit_search(&t, opts.budget)?;
        let union = r.witnesses.iter().fold(TypeSet::EMPTY, |a, &b| a.union(b));
        let disp = cox.displacement_from_diagram(union, exp.2).map_err(|e| CliError::Invalid(e.to_string()))?;
        c.eq(format!("theta{} diagram", i + 1), exp, diagram(&f4.profile(&t, &r.witnesses, disp)));
    }
    Ok(())
}

fn residue_laws(c: &mut Cases, _: Options) -> Result<(), CliError> {
    let c3 = BuildingModel::symplectic(3)?;
    let a3 = BuildingModel::projective(3)?;
    let sp6 = symplectic_group(3)?;
    let gl4 = general_linear_group(4)?;
    let mut jobs = vec![(c3.clone(), sp6.conjugacy_classes().iter().map(|k| Automorphism::new(&c3, sp6.matrix(k[0]), false)).collect::<Result<Vec<_>, _>>()?)];
    let mut reps: Vec<Automorphism> = gl4.conjugacy_classes().iter().map(|k| Automorphism::new(&a3, gl4.matrix(k[0]), false)).collect::<Result<_, _>>()?;
    for k in gl4.duality_classes() {
        reps.push(Automorphism::new(&a3, gl4.matrix(k[0]), true)?);
    }
    jobs.push((a3, reps));
    for (m, reps) in jobs {
        let g = ChamberGraph::build(&m, DEFAULT_GRAPH_CAP)?;
        let idx = SimplicialIndex::build(&g);
        let oracle = ResidueOracle::new(&g, &idx, true);
        let failures: u64 = reps.par_iter().map(|t| { let r = check_residue_laws(t, &oracle); r.typemap_failures + r.proj_failures }).sum();
        c.eq(format!("{} failures over {} classes", m.label(), reps.len()), 0, failures);
    }
    Ok(())
}

fn oracle(c: &mut Cases, _: Options) -> Result<(), CliError> {
    for m in [
        BuildingModel::projective(2)?,
        BuildingModel::projective(3)?,
        BuildingModel::symplectic(2)?,
        BuildingModel::symplectic(3)?,
        BuildingModel::oriflamme(4)?,
        BuildingModel::minus_polar(2)?,
    ] {
        let g = ChamberGraph::build(&m, DEFAULT_GRAPH_CAP)?;
        let idx = SimplicialIndex::build(&g);
        let r = compare_opposition_with_oracle(&g, &idx, m.rank() >= 4);
        c.eq(format!("{} mismatches over {} pairs", m.label(), r.pairs), 0, r.mismatches);
    }
    Ok(())
}

fn e7(c: &mut Cases, opts: Options) -> Result<(), CliError> {
    let e7 = ChevalleySystem::new(Family::E, 7)?;
    let phi = e7.mask(&[e7.coxeter().highest_root()]);
    let t1 = e7.theta_element("E7.theta1")?;
    let t2 = e7.theta_element("E7.theta2")?;
    c.eq("squares are x_phi(1)", (phi, phi), (e7.square(&t1), e7.square(&t2)));
    let o2 = e7.orbit_search(&t2, opts.budget)?;
    c.eq("theta2 orbit size, hit w0", (1u128 << 17, false), (o2.cases, o2.hit_w0));
    let o1 = e7.orbit_search(&t1, opts.budget)?;
    let k = e7.coset_search(&t1, ts(&[1, 3]), true, opts.budget)?;
    c.eq("theta1 {1,3} found", false, k.found.is_some());
    let s1 = e7.sample_chambers(&t1, 100_000, 5);
    let s2 = e7.sample_chambers(&t2, 100_000, 5);
    let union = |sets: &[&BTreeSet<TypeSet>]| sets.iter().flat_map(|s| s.iter()).fold(TypeSet::EMPTY, |a, &b| a.union(b)).labels();
    c.eq("theta1 witnessed types", vec![1, 3, 4, 6], union(&[&o1.witnesses, &s1.witnesses, &k.witnesses]));
    c.eq("theta2 witnessed types", (1..=7).collect::<Vec<_>>(), union(&[&o2.witnesses, &s2.witnesses]));
    Ok(())
}

fn f4_fixed(c: &mut Cases, opts: Options) -> Result<(), CliError> {
    let f4 = ChevalleySystem::new(Family::F, 4)?;
    let expected = [(2287, 5103), (5103, 2287), (1263, 1263), (127, 399), (399, 127), (151, 151)];
    for (i, exp) in expected.into_iter().enumerate() {
        let t = f4.theta_element(&format!("F4.theta{}", i + 1))?;
        let got = (f4.fixed_vertex_count(&t, 0, opts.budget)?, f4.fixed_vertex_count(&t, 3, opts.budget)?);
        c.eq(format!("theta{} fixed type 1 / type 4 vertices", i + 1), exp, got);
    }
    Ok(())
}

fn e8_sampling(c: &mut Cases, _: Options) -> Result<(), CliError> {
    let e8 = ChevalleySystem::new(Family::E, 8)?;
    for (name, types) in [("E8.theta1", ts(&[1, 6, 7, 8])), ("E8.theta2", TypeSet::full(8))] {
        let s = e8.sample_chambers(&e8.theta_element(name)?, 100_000, 2024);
        let bound = e8.coxeter().displacement_from_diagram(types, false).map_err(|e| CliError::Invalid(e.to_string()))?;
        c.eq(format!("{name} hit w0"), false, s.hit_w0);
        c.eq(format!("{name} length within {bound}"), true, s.max_length <= bound);
        c.eq(format!("{name} types inside the conjectured diagram"), true, s.witnesses.iter().all(|w| w.is_subset(types)));
    }
    Ok(())
}
