use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use domestic::analysis::*;
use domestic::chevalley::{ChevalleySystem, SearchReport};
use domestic::coxeter::{Family, TypeSet};
use domestic::geometry::BuildingModel;
use domestic::morphisms::{family_by_name, Automorphism, AutomorphismJson};
use rayon::prelude::*;
use serde::Serialize;

use crate::{CliError, ExportKind, Format, Options, SearchStrategy};

/// Families listed by `export diagrams` when none are given.
pub const DEFAULT_FAMILIES: &[&str] = &[
    "an-duality:2",
    "an-duality:3",
    "sp:2:0",
    "sp:3:0",
    "sp:3:1",
    "sp:4:0",
    "sp:4:1",
    "sp:4:2",
    "ominus:2:0",
    "c3-remark",
    "a3-polarity",
    "antidiagonal:C:3",
];

pub fn source(family: Option<String>, identity: bool, model: Option<String>, json: Option<PathBuf>) -> Result<Automorphism, CliError> {
    if let Some(name) = family {
        return Ok(family_by_name(&name)?.with_name(name));
    }
    if let Some(path) = json {
        let text = if path.as_os_str() == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        } else {
            std::fs::read_to_string(&path)?
        };
        let j: AutomorphismJson = serde_json::from_str(&text)?;
        return Ok(Automorphism::from_json(&j)?);
    }
    if identity {
        let label = model.unwrap_or_default();
        let m = BuildingModel::from_label(&label).ok_or_else(|| CliError::Invalid(format!("unknown model {label}")))?;
        return Ok(Automorphism::identity(&m).with_name(format!("identity:{label}")));
    }
    Err(CliError::Invalid("give one of --family, --identity --model, or --json".into()))
}

fn profile_of(t: &Automorphism, budget: u128) -> Result<OppositionProfile, CliError> {
    if t.is_identity() {
        return Ok(identity_profile(t.model().coxeter()));
    }
    Ok(opp_types(t, budget)?)
}

/// One row of a diagram table.
#[derive(Debug, Clone, Serialize)]
pub struct DiagramRow {
    pub element: String,
    pub model: String,
    #[serde(flatten)]
    pub report: DiagramReport,
}

fn labels(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub const CSV_HEADER: &str = "element,model,circled,shaded,capped,displacement,domesticity,order";

impl DiagramRow {
    pub fn csv(&self) -> String {
        let r = &self.report;
        let order = r.order.map(|o| o.to_string()).unwrap_or_default();
        let dom = serde_json::to_value(r.domesticity).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        format!("{},{},{},{},{},{},{},{}", self.element, self.model, labels(&r.circled), labels(&r.shaded), r.capped, r.displacement, dom, order)
    }
}

fn diagram_row(t: &Automorphism, budget: u128) -> Result<(DiagramRow, DecoratedDiagram), CliError> {
    let p = profile_of(t, budget)?;
    let report = p.report(t.order().ok());
    let row = DiagramRow { element: t.name().unwrap_or("automorphism").to_string(), model: t.model().label(), report };
    Ok((row, p.diagram()))
}

pub fn analyze(t: &Automorphism, opts: Options) -> Result<(), CliError> {
    let (row, diagram) = diagram_row(t, opts.budget)?;
    match opts.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&row.report)?),
        Format::Csv => println!("{CSV_HEADER}\n{}", row.csv()),
        Format::Ascii => {
            println!("{} on {}", row.element, row.model);
            println!("{}", diagram.render_ascii());
            println!("{}", serde_json::to_string_pretty(&row.report)?);
        }
    }
    Ok(())
}

fn chevalley_for(element: &str) -> Result<ChevalleySystem, CliError> {
    let prefix = element.split('.').next().unwrap_or_default();
    let (family, rank) = match prefix {
        "F4" => (Family::F, 4),
        "E6" => (Family::E, 6),
        "E7" => (Family::E, 7),
        "E8" => (Family::E, 8),
        _ => return Err(CliError::Invalid(format!("unknown element {element}; names look like F4.theta4p or E7.theta1"))),
    };
    Ok(ChevalleySystem::new(family, rank)?)
}

fn parse_types(s: &str) -> Result<TypeSet, CliError> {
    let labels: Vec<usize> =
        s.split(',').map(|x| x.trim().parse::<usize>()).collect::<Result<_, _>>().map_err(|e| CliError::Invalid(format!("--types {s}: {e}")))?;
    if labels.contains(&0) {
        return Err(CliError::Invalid("type labels start at 1".into()));
    }
    Ok(TypeSet::from_labels(&labels))
}

pub struct SearchRequest {
    pub element: String,
    pub strategy: SearchStrategy,
    pub types: Option<String>,
    pub restrict: bool,
    pub vertex_type: Option<usize>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
struct SearchOutput {
    #[serde(flatten)]
    report: SearchReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    found: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    witnesses: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed: Option<u64>,
}

pub fn search(req: &SearchRequest, opts: Options) -> Result<(), CliError> {
    let chev = chevalley_for(&req.element)?;
    let t = chev.theta_element(&req.element)?;
    let cox = chev.coxeter();
    let start = Instant::now();
    let mut out = SearchOutput {
        report: SearchReport {
            theta: req.element.clone(),
            strategy: format!("{:?}", req.strategy).to_lowercase(),
            a_size: None,
            candidates: None,
            max_cell_word: Vec::new(),
            max_length: 0,
            hit_w0: false,
            elapsed_ms: 0,
        },
        found: None,
        witnesses: Vec::new(),
        fixed: None,
    };
    let types_of = |w: &std::collections::BTreeSet<TypeSet>| w.iter().map(|t| t.labels()).collect::<Vec<_>>();
    match req.strategy {
        SearchStrategy::Aset | SearchStrategy::Orbit => {
            let r = if req.strategy == SearchStrategy::Aset { chev.aset_search(&t, opts.budget)? } else { chev.orbit_search(&t, opts.budget)? };
            if req.strategy == SearchStrategy::Aset {
                out.report.a_size = Some(r.a_set.len());
            }
            out.report.candidates = Some(r.cases as u64);
            out.report.max_cell_word = cox.reduced_word(&r.max_cell);
            out.report.max_length = r.max_cell.length();
            out.report.hit_w0 = r.hit_w0;
            out.witnesses = types_of(&r.witnesses);
        }
        SearchStrategy::Coset => {
            let types = req.types.as_deref().ok_or_else(|| CliError::Invalid("coset needs --types".into()))?;
            let r = chev.coset_search(&t, parse_types(types)?, req.restrict, opts.budget)?;
            out.report.candidates = Some(r.candidates);
            out.report.max_length = r.max_length;
            out.found = Some(r.found.is_some());
            out.witnesses = types_of(&r.witnesses);
        }
        SearchStrategy::Sample => {
            let r = chev.sample_chambers(&t, req.samples, req.seed);
            out.report.candidates = Some(r.samples);
            out.report.max_length = r.max_length;
            out.report.hit_w0 = r.hit_w0;
            out.witnesses = types_of(&r.witnesses);
        }
        SearchStrategy::Fixed => {
            let v = req.vertex_type.ok_or_else(|| CliError::Invalid("fixed needs --vertex-type".into()))?;
            if v == 0 || v > cox.rank() {
                return Err(CliError::Invalid(format!("vertex type {v} out of range")));
            }
            out.fixed = Some(chev.fixed_vertex_count(&t, v - 1, opts.budget)?);
        }
    }
    out.report.elapsed_ms = start.elapsed().as_millis();
    match opts.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Csv => {
            let r = &out.report;
            let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
            println!("theta,strategy,a_size,candidates,max_length,hit_w0,found,fixed");
            println!(
                "{},{},{},{},{},{},{},{}",
                r.theta,
                r.strategy,
                opt(r.a_size.map(|a| a as u64)),
                opt(r.candidates),
                r.max_length,
                r.hit_w0,
                out.found.map(|f| f.to_string()).unwrap_or_default(),
                opt(out.fixed)
            );
        }
        Format::Ascii => {
            let r = &out.report;
            println!("{} ({})", r.theta, r.strategy);
            if let Some(a) = r.a_size {
                println!("  A-set size    {a}");
            }
            if let Some(c) = r.candidates {
                println!("  cases         {c}");
            }
            if let Some(f) = out.fixed {
                println!("  fixed vertices {f}");
            } else {
                println!("  max length    {}", r.max_length);
                println!("  hit w0        {}", r.hit_w0);
            }
            if let Some(f) = out.found {
                println!("  found         {f}");
            }
            if !out.witnesses.is_empty() {
                let w: Vec<String> = out.witnesses.iter().map(|w| format!("{{{}}}", labels(w).replace(' ', ","))).collect();
                println!("  witness types {}", w.join(" "));
            }
            eprintln!("  {} ms", r.elapsed_ms);
        }
    }
    Ok(())
}

/// One conjugacy class in an enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct ClassRow {
    pub class: usize,
    pub size: usize,
    pub order: u64,
    pub duality: bool,
    #[serde(flatten)]
    pub report: DiagramReport,
}

pub fn classify(group: &str, budget: u128) -> Result<(String, Vec<ClassRow>), CliError> {
    let (g, model, dualities) = match group {
        "sp4" => (symplectic_group(2)?, BuildingModel::symplectic(2)?, false),
        "sp6" => (symplectic_group(3)?, BuildingModel::symplectic(3)?, false),
        "gl3" => (general_linear_group(3)?, BuildingModel::projective(2)?, true),
        "gl4" => (general_linear_group(4)?, BuildingModel::projective(3)?, true),
        _ => return Err(CliError::Invalid(format!("unknown group {group}; expected sp4, sp6, gl3 or gl4"))),
    };
    let mut reps: Vec<(usize, bool)> = g.conjugacy_classes().into_iter().map(|c| (c.len(), false)).collect();
    let mut firsts: Vec<usize> = g.conjugacy_classes().into_iter().map(|c| c[0]).collect();
    if dualities {
        for c in g.duality_classes() {
            reps.push((c.len(), true));
            firsts.push(c[0]);
        }
    }
    let rows: Vec<Result<ClassRow, CliError>> = reps
        .par_iter()
        .zip(firsts.par_iter())
        .enumerate()
        .map(|(i, (&(size, duality), &first))| {
            let t = Automorphism::new(&model, g.matrix(first), duality)?;
            let p = profile_of(&t, budget)?;
            let order = t.order()?;
            Ok(ClassRow { class: i, size, order, duality, report: p.report(Some(order)) })
        })
        .collect();
    Ok((model.label(), rows.into_iter().collect::<Result<_, _>>()?))
}

pub fn enumerate(group: &str, opts: Options) -> Result<(), CliError> {
    let (model, rows) = classify(group, opts.budget)?;
    let exceptional = rows.iter().filter(|r| r.report.domesticity.is_exceptional()).count();
    match opts.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
        Format::Csv => {
            println!("{CSV_HEADER}");
            for r in &rows {
                let d = DiagramRow { element: format!("class{}", r.class), model: model.clone(), report: r.report.clone() };
                println!("{}", d.csv());
            }
        }
        Format::Ascii => {
            let total: usize = rows.iter().map(|r| r.size).sum();
            println!("{group} acting on {model}: {total} elements, {} classes", rows.len());
            println!("{:>5} {:>7} {:>5} {:>4} {:>7} {:>12} {:>12} {:>4}  domesticity", "class", "size", "order", "dual", "capped", "circled", "shaded", "disp");
            for r in &rows {
                let rep = &r.report;
                println!(
                    "{:>5} {:>7} {:>5} {:>4} {:>7} {:>12} {:>12} {:>4}  {}",
                    r.class,
                    r.size,
                    r.order,
                    if r.duality { "yes" } else { "no" },
                    rep.capped,
                    labels(&rep.circled),
                    labels(&rep.shaded),
                    rep.displacement,
                    rep.domesticity
                );
            }
            println!("exceptional domestic classes: {exceptional}");
        }
    }
    Ok(())
}

pub fn export(what: ExportKind, families: &[String], opts: Options) -> Result<(), CliError> {
    match what {
        ExportKind::Automorphism => {
            let [name] = families else {
                return Err(CliError::Invalid("export automorphism needs exactly one --family".into()));
            };
            println!("{}", serde_json::to_string_pretty(&family_by_name(name)?.to_json())?);
        }
        ExportKind::Diagrams => {
            let names: Vec<String> =
                if families.is_empty() { DEFAULT_FAMILIES.iter().map(|s| s.to_string()).collect() } else { families.to_vec() };
            let mut rows = Vec::new();
            for n in &names {
                let t = family_by_name(n)?.with_name(n.clone());
                rows.push(diagram_row(&t, opts.budget)?);
            }
            match opts.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&rows.iter().map(|r| &r.0).collect::<Vec<_>>())?),
                Format::Csv => {
                    println!("{CSV_HEADER}");
                    for (r, _) in &rows {
                        println!("{}", r.csv());
                    }
                }
                Format::Ascii => {
                    for (r, d) in &rows {
                        println!("{} on {}: {}, displacement {}", r.element, r.model, r.report.domesticity, r.report.displacement);
                        println!("{}\n", d.render_ascii());
                    }
                }
            }
        }
        ExportKind::Catalogue => {
            let mut names: Vec<String> = DEFAULT_FAMILIES.iter().map(|s| s.to_string()).collect();
            for (f, n) in [(Family::F, 4), (Family::E, 6), (Family::E, 7), (Family::E, 8)] {
                names.extend(ChevalleySystem::new(f, n)?.catalogue());
            }
            match opts.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&names)?),
                _ => names.iter().for_each(|n| println!("{n}")),
            }
        }
    }
    Ok(())
}
