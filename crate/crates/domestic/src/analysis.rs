//! Opposite geometries, decorated opposition diagrams and domesticity.
//!
//! Everything here is driven by one observation: for a chamber `C` with
//! `delta = delta(C, C^theta)`, the faces of `C` mapped to opposite simplices are
//! exactly the `rho`-invariant type sets contained in `S \ supp(delta w_0)`,
//! where `rho = op o pi_theta`. So one pass over the chambers (or over a
//! reduced set of chambers) yields the whole poset `T(theta)` of types
//! realised in `Opp(theta)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterSystem, Family, TypePermutation, TypeSet, WeylElement};
use crate::geometry::{BuildingModel, Chamber, ChamberGraph, GeometryError, ModelKind, ResidueOracle, SimplicialIndex};
use crate::gf2::{null_space, parity, BitMat};
use crate::morphisms::Automorphism;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("the reduction gate is closed for {0}: {1}")]
    GateClosed(String, String),
    #[error("no applicable strategy: {0}")]
    NoStrategy(String),
    #[error("decorated diagram {0} is not listed in the classification tables")]
    NotInTables(String),
    #[error("simplex is not in Opp(theta)")]
    NotInOpp,
    #[error("scale: {0}")]
    Scale(String),
}

/// How an opposition profile was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Every chamber of the model was visited.
    Exhaustive,
    /// Only chambers opposite a base chamber were visited, behind an open gate.
    Red2,
    /// Chevalley-group searches over coset transversals and A-sets.
    Chevalley,
    /// Fixed by convention (the identity).
    Trivial,
}

/// The set `T(theta)` of nonempty type sets realised in `Opp(theta)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TypePoset {
    pub rank: usize,
    pub sets: BTreeSet<TypeSet>,
}

impl TypePoset {
    pub fn empty(rank: usize) -> TypePoset {
        TypePoset { rank, sets: BTreeSet::new() }
    }

    /// All nonempty `rho`-invariant subsets of the witnesses.
    pub fn from_witnesses(rank: usize, rho: &TypePermutation, witnesses: impl IntoIterator<Item = TypeSet>) -> TypePoset {
        let mut sets = BTreeSet::new();
        let maxes: BTreeSet<TypeSet> = witnesses.into_iter().map(|w| rho.stable_core(w)).collect();
        for w in maxes {
            for j in w.subsets() {
                if !j.is_empty() && rho.is_stable(j) {
                    sets.insert(j);
                }
            }
        }
        TypePoset { rank, sets }
    }

    pub fn contains(&self, j: TypeSet) -> bool {
        self.sets.contains(&j)
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `Type(theta)`, the union of all members.
    pub fn union(&self) -> TypeSet {
        self.sets.iter().fold(TypeSet::EMPTY, |a, &b| a.union(b))
    }

    /// The maximal members `M(theta)`.
    pub fn maximal(&self) -> Vec<TypeSet> {
        self.sets
            .iter()
            .copied()
            .filter(|&a| !self.sets.iter().any(|&b| b != a && a.is_subset(b)))
            .collect()
    }

    pub fn labels(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(|s| s.labels()).collect()
    }
}

/// Rebuilds `T(theta)` from its maximal members: every nonempty
/// `rho`-invariant subset of a maximal member.
pub fn poset_from_maximal(rank: usize, maximal: &[TypeSet], rho: &TypePermutation) -> TypePoset {
    TypePoset::from_witnesses(rank, rho, maximal.iter().copied())
}

/// Domesticity classes, from coarsest to finest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domesticity {
    NonDomestic,
    Domestic,
    ExceptionalDomestic,
    StronglyExceptionalDomestic,
}

impl Domesticity {
    /// Exceptional domestic in the broad sense, which includes the strongly
    /// exceptional class.
    pub fn is_exceptional(self) -> bool {
        matches!(self, Domesticity::ExceptionalDomestic | Domesticity::StronglyExceptionalDomestic)
    }
}

impl fmt::Display for Domesticity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domesticity::NonDomestic => "non-domestic",
            Domesticity::Domestic => "domestic",
            Domesticity::ExceptionalDomestic => "exceptional domestic",
            Domesticity::StronglyExceptionalDomestic => "strongly exceptional domestic",
        })
    }
}

/// A Coxeter diagram with circled nodes `J`, shaded nodes `K`, and `pi_theta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedDiagram {
    pub family: Family,
    pub rank: usize,
    pub circled: TypeSet,
    pub shaded: TypeSet,
    pub pi: TypePermutation,
    pub capped: bool,
}

impl DecoratedDiagram {
    /// Diagram from the poset. `K` is the union of the `rho`-orbits `O` inside
    /// `J` with `J \ O` realised; it is left empty for capped automorphisms.
    pub fn from_poset(cox: &CoxeterSystem, pi: &TypePermutation, poset: &TypePoset) -> DecoratedDiagram {
        let rho = cox.opposition_involution().compose(pi);
        let j = poset.union();
        let capped = poset.is_empty() || poset.contains(j);
        let mut shaded = TypeSet::EMPTY;
        if !capped {
            for orbit in rho.orbits() {
                if orbit.is_subset(j) && poset.contains(j.difference(orbit)) {
                    shaded = shaded.union(orbit);
                }
            }
        }
        DecoratedDiagram { family: cox.family(), rank: cox.rank(), circled: j, shaded, pi: pi.clone(), capped }
    }

    /// ASCII rendering: `(*)` circled and shaded, `(o)` circled, ` o ` plain.
    pub fn render_ascii(&self) -> String {
        let node = |i: usize| -> &'static str {
            if self.shaded.contains(i) {
                "(*)"
            } else if self.circled.contains(i) {
                "(o)"
            } else {
                " o "
            }
        };
        let cox = CoxeterSystem::new(self.family, self.rank).expect("diagram of a valid type");
        let m = cox.coxeter_matrix();
        let (chain, branch): (Vec<usize>, Option<(usize, usize)>) = match self.family {
            Family::D if self.rank >= 3 => ((0..self.rank - 1).collect(), Some((self.rank - 1, self.rank - 3))),
            Family::E => {
                let mut c = vec![0];
                c.extend(2..self.rank);
                (c, Some((1, 3)))
            }
            _ => ((0..self.rank).collect(), None),
        };
        let mut top = String::new();
        let mut labels = String::new();
        for (k, &i) in chain.iter().enumerate() {
            if k > 0 {
                let bond = match m[chain[k - 1]][i] {
                    4 => "==",
                    6 => "≡≡",
                    _ => "--",
                };
                top.push_str(bond);
                labels.push_str("  ");
            }
            top.push_str(node(i));
            labels.push_str(&format!("{:^3}", i + 1));
        }
        let mut out = format!("{}{}  {}\n{}     {}", self.family.letter(), self.rank, top, " ".repeat(2), labels);
        if let Some((b, at)) = branch {
            out.push_str(&format!("\n  node {} {} attached to node {}", b + 1, node(b), at + 1));
        }
        if !self.pi.is_identity() {
            out.push_str(&format!("\n  pi = {:?}", self.pi.labels()));
        }
        out.push_str(if self.capped { "\n  capped" } else { "\n  uncapped" });
        out
    }
}

/// Everything computed about the opposite geometry of one automorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OppositionProfile {
    pub family: Family,
    pub rank: usize,
    pub pi: TypePermutation,
    pub rho: TypePermutation,
    pub poset: TypePoset,
    pub displacement: usize,
    pub strategy: Strategy,
}

impl OppositionProfile {
    /// Profile from a multiset of chamber displacements `delta(C, C^theta)`.
    pub fn from_distances<'a>(
        cox: &CoxeterSystem,
        pi: &TypePermutation,
        distances: impl IntoIterator<Item = &'a WeylElement>,
        strategy: Strategy,
    ) -> OppositionProfile {
        let rho = cox.opposition_involution().compose(pi);
        let mut disp = 0;
        let mut witnesses = Vec::new();
        for d in distances {
            disp = disp.max(d.length());
            witnesses.push(opposite_face_types(cox, d));
        }
        OppositionProfile {
            family: cox.family(),
            rank: cox.rank(),
            poset: TypePoset::from_witnesses(cox.rank(), &rho, witnesses),
            pi: pi.clone(),
            rho,
            displacement: disp,
            strategy,
        }
    }

    pub fn coxeter(&self) -> CoxeterSystem {
        CoxeterSystem::new(self.family, self.rank).expect("profile of a valid type")
    }

    pub fn diagram(&self) -> DecoratedDiagram {
        DecoratedDiagram::from_poset(&self.coxeter(), &self.pi, &self.poset)
    }

    pub fn is_capped(&self) -> bool {
        self.poset.is_empty() || self.poset.contains(self.poset.union())
    }

    pub fn is_j_domestic(&self, j: TypeSet) -> bool {
        !self.poset.contains(j)
    }

    pub fn domesticity(&self) -> Domesticity {
        let full = TypeSet::full(self.rank);
        if self.poset.contains(full) {
            return Domesticity::NonDomestic;
        }
        if self.poset.union() != full {
            return Domesticity::Domestic;
        }
        let strongly = full
            .subsets()
            .filter(|&j| !j.is_empty() && j != full && self.rho.is_stable(j))
            .all(|j| self.poset.contains(j));
        if strongly {
            Domesticity::StronglyExceptionalDomestic
        } else {
            Domesticity::ExceptionalDomestic
        }
    }

    /// Nonempty `rho`-invariant type sets `J` for which no type-`J` simplex is
    /// mapped to an opposite one.
    pub fn domestic_types(&self) -> Vec<TypeSet> {
        TypeSet::full(self.rank)
            .subsets()
            .filter(|&j| !j.is_empty() && self.rho.is_stable(j) && !self.poset.contains(j))
            .collect()
    }

    /// `M(theta)` predicted from the diagram: `{Type}` when capped, otherwise
    /// `{Type \ O : O a rho-orbit inside K}`.
    pub fn predicted_maximal(&self) -> Vec<TypeSet> {
        let d = self.diagram();
        if d.capped {
            return if self.poset.is_empty() { vec![] } else { vec![d.circled] };
        }
        let mut out: Vec<TypeSet> = self
            .rho
            .orbits()
            .into_iter()
            .filter(|o| o.is_subset(d.shaded))
            .map(|o| d.circled.difference(o))
            .collect();
        out.sort();
        out
    }

    /// Displacement predicted from the diagram.
    pub fn predicted_displacement(&self) -> usize {
        let d = self.diagram();
        if self.poset.is_empty() {
            return 0;
        }
        self.coxeter().displacement_from_diagram(d.circled, d.capped).unwrap_or(0)
    }

    pub fn report(&self, order: Option<u64>) -> DiagramReport {
        let d = self.diagram();
        DiagramReport {
            type_label: format!("{}{}", self.family.letter(), self.rank),
            rank: self.rank,
            circled: d.circled.labels(),
            shaded: d.shaded.labels(),
            pi: self.pi.labels(),
            capped: d.capped,
            displacement: self.displacement,
            domesticity: self.domesticity(),
            maximal_types: self.poset.maximal().iter().map(|m| m.labels()).collect(),
            strategy: self.strategy,
            order,
        }
    }
}

/// JSON report for one automorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramReport {
    #[serde(rename = "type")]
    pub type_label: String,
    pub rank: usize,
    pub circled: Vec<usize>,
    pub shaded: Vec<usize>,
    pub pi: Vec<usize>,
    pub capped: bool,
    pub displacement: usize,
    pub domesticity: Domesticity,
    pub maximal_types: Vec<Vec<usize>>,
    pub strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
}

/// `S \ supp(delta w_0)`: the largest type set whose face of `C` is mapped
/// opposite when `delta = delta(C, C^theta)`, before the invariance condition.
pub fn opposite_face_types(cox: &CoxeterSystem, delta: &WeylElement) -> TypeSet {
    let x = cox.multiply(delta, cox.w0());
    cox.support(&x).complement(cox.rank())
}

/// Tally of relative positions over a set of chambers.
type Tally = HashMap<[i8; 9], u64>;

fn merge(mut a: Tally, b: Tally) -> Tally {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

fn tally_to_distances(model: &BuildingModel, t: &Tally) -> Vec<WeylElement> {
    let m = match model.kind() {
        ModelKind::Projective => model.rank() + 1,
        _ => model.rank(),
    };
    let mut keys: Vec<&[i8; 9]> = t.keys().collect();
    keys.sort();
    keys.into_iter().map(|w| model.coxeter().from_word(&model.position_word(w, m))).collect()
}

/// Exact opposition profile by visiting every chamber in parallel.
pub fn opp_types_exhaustive(theta: &Automorphism, cap: u128) -> Result<OppositionProfile, AnalysisError> {
    let model = theta.model();
    if theta.is_identity() {
        return Ok(identity_profile(model.coxeter()));
    }
    let tally = model.par_fold_chambers(
        cap,
        Tally::new(),
        |mut acc, c| {
            let img = theta.apply_chamber(&c);
            let (w, _) = model.relative_position(&c, &img);
            *acc.entry(w).or_default() += 1;
            acc
        },
        merge,
    )?;
    let ds = tally_to_distances(model, &tally);
    Ok(OppositionProfile::from_distances(model.coxeter(), theta.type_permutation(), &ds, Strategy::Exhaustive))
}

/// The identity: capped, empty diagram, displacement 0.
pub fn identity_profile(cox: &CoxeterSystem) -> OppositionProfile {
    let pi = TypePermutation::identity(cox.rank());
    OppositionProfile {
        family: cox.family(),
        rank: cox.rank(),
        rho: cox.opposition_involution().clone(),
        pi,
        poset: TypePoset::empty(cox.rank()),
        displacement: 0,
        strategy: Strategy::Trivial,
    }
}

/// Which hypothesis of the reduction opens the gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gate {
    /// Every panel has at least four chambers.
    ThickPanels,
    /// The automorphism is an involution.
    Involution,
    /// An oppomorphism: only whether `w_0` is attained is certified.
    Oppomorphism,
    /// Opened by the caller, no guarantee.
    Forced,
}

/// Result of a search restricted to chambers opposite a base chamber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Red2Result {
    pub gate: Gate,
    pub chambers_visited: u64,
    pub max_length: usize,
    pub hit_w0: bool,
    /// Types witnessed in `Opp(theta)` by the visited chambers (a lower bound).
    pub witnessed: TypePoset,
    /// Whether the maximum equals the true displacement by the gate.
    pub certifies_displacement: bool,
}

/// Evaluates the reduction gate for an automorphism.
pub fn red2_gate(theta: &Automorphism) -> Option<Gate> {
    let model = theta.model();
    if (0..model.rank()).all(|s| model.panel_size(s) >= 4) {
        return Some(Gate::ThickPanels);
    }
    if theta.compose(theta).map(|t| t.is_identity()).unwrap_or(false) {
        return Some(Gate::Involution);
    }
    if theta.is_oppomorphism() {
        return Some(Gate::Oppomorphism);
    }
    None
}

/// Displacement search over the chambers opposite `base`. With `force` the
/// gate is ignored and the result carries no guarantee.
pub fn red2_reduction(theta: &Automorphism, base: &Chamber, force: bool) -> Result<Red2Result, AnalysisError> {
    let gate = match (red2_gate(theta), force) {
        (Some(g), false) => g,
        (_, true) => Gate::Forced,
        (None, false) => {
            return Err(AnalysisError::GateClosed(
                theta.name().unwrap_or("automorphism").to_string(),
                "panels have fewer than 4 chambers, not an involution, not an oppomorphism".into(),
            ))
        }
    };
    let model = theta.model();
    let mut tally = Tally::new();
    let mut visited = 0u64;
    model.for_each_opposite_chamber(base, |d| {
        visited += 1;
        let (w, _) = model.relative_position(&d, &theta.apply_chamber(&d));
        *tally.entry(w).or_default() += 1;
    });
    let ds = tally_to_distances(model, &tally);
    let p = OppositionProfile::from_distances(model.coxeter(), theta.type_permutation(), &ds, Strategy::Red2);
    let n = model.coxeter().num_positive();
    Ok(Red2Result {
        gate,
        chambers_visited: visited,
        max_length: p.displacement,
        hit_w0: p.displacement == n,
        witnessed: p.poset,
        certifies_displacement: matches!(gate, Gate::ThickPanels | Gate::Involution),
    })
}

/// The first chamber in enumeration order fixed by `theta`, if any.
pub fn fixed_chamber(theta: &Automorphism, cap: u128) -> Result<Option<Chamber>, AnalysisError> {
    let mut found = None;
    theta.model().for_each_chamber(cap, |c| {
        if found.is_none() && theta.apply_chamber(&c) == c {
            found = Some(c);
        }
    })?;
    Ok(found)
}

/// Profile by the cheapest applicable strategy: exhaustion under the cap,
/// otherwise the reduction when its gate certifies the displacement.
pub fn opp_types(theta: &Automorphism, cap: u128) -> Result<OppositionProfile, AnalysisError> {
    let model = theta.model();
    if model.chamber_count() <= cap {
        return opp_types_exhaustive(theta, cap);
    }
    match red2_gate(theta) {
        Some(Gate::ThickPanels) | Some(Gate::Involution) => {
            let r = red2_reduction(theta, &model.base_chamber(), false)?;
            Err(AnalysisError::NoStrategy(format!(
                "{} is above the cap; the reduction gives displacement {} but only a lower bound on T(theta)",
                model.label(),
                r.max_length
            )))
        }
        _ => Err(AnalysisError::Scale(format!("{} has {} chambers, above the cap {cap}", model.label(), model.chamber_count()))),
    }
}

// ---------------------------------------------------------------------------
// Classification tables.

/// Where a decorated diagram sits in the classification of uncapped diagrams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TableMatch {
    CappedOnly,
    Row { table: u8, row: String },
}

fn range(a: usize, b: usize) -> TypeSet {
    TypeSet::from_labels(&(a..=b).collect::<Vec<_>>())
}

/// Matches an uncapped decorated diagram against the embedded tables of
/// uncapped diagrams for the classical and exceptional types.
pub fn table_membership(d: &DecoratedDiagram) -> Result<TableMatch, AnalysisError> {
    if d.capped {
        return Ok(TableMatch::CappedOnly);
    }
    let n = d.rank;
    let full = TypeSet::full(n);
    let (j, k) = (d.circled, d.shaded);
    let cox = CoxeterSystem::new(d.family, n).expect("valid type");
    let rho = cox.opposition_involution().compose(&d.pi);
    let row = |table: u8, s: &str| Ok(TableMatch::Row { table, row: s.to_string() });
    let full_shaded = j == full && k == full;
    match d.family {
        Family::A if full_shaded => return row(1, "A_n(2)"),
        Family::B | Family::C => {
            if full_shaded {
                return row(1, "B_n(2) or B_n(2,4), full");
            }
            for i in 3..=n {
                if j == range(1, i) && k == range(1, i - 1) {
                    return row(1, &format!("B_n(2) or B_n(2,4), J={{1..{i}}}"));
                }
            }
        }
        Family::D => {
            for i in 2..n {
                if j == range(1, i) && k == range(1, i - 1) {
                    let ok = if i % 2 == 0 {
                        4 <= i && (if n % 2 == 0 { i + 2 <= n } else { i + 3 <= n })
                    } else {
                        3 <= i && (if n % 2 == 0 { i + 3 <= n } else { i + 2 <= n })
                    };
                    if ok {
                        return row(1, &format!("D_n(2), J={{1..{i}}}"));
                    }
                }
            }
            if j == full && k == range(1, n - 2) && rho.apply(n - 2) == n - 1 {
                return row(1, "D_n(2), pair circled");
            }
            if full_shaded && rho.is_identity() {
                return row(1, "D_n(2), full");
            }
        }
        Family::E if n == 6 => {
            if j == full && k == TypeSet::from_labels(&[2, 4]) && rho.is_identity() {
                return row(2, "E_6(2), K={2,4}");
            }
            if full_shaded {
                return row(2, "E_6(2), full");
            }
        }
        Family::E if n == 7 => {
            if j == TypeSet::from_labels(&[1, 3, 4, 6]) && k == TypeSet::from_labels(&[1, 3]) {
                return row(2, "E_7(2), J={1,3,4,6}");
            }
            if full_shaded {
                return row(2, "E_7(2), full");
            }
        }
        Family::E if n == 8 => {
            if j == TypeSet::from_labels(&[1, 6, 7, 8]) && k == TypeSet::from_labels(&[7, 8]) {
                return row(2, "E_8(2), J={1,6,7,8}");
            }
            if full_shaded {
                return row(2, "E_8(2), full");
            }
        }
        Family::F => {
            if j == full && k == TypeSet::from_labels(&[1, 2]) {
                return row(2, "F_4(2) or F_4(2,4), K={1,2}");
            }
            if j == full && k == TypeSet::from_labels(&[3, 4]) {
                return row(2, "F_4(2), K={3,4}");
            }
            if full_shaded {
                return row(2, "F_4(2), full");
            }
        }
        _ => {}
    }
    Err(AnalysisError::NotInTables(format!(
        "{}{} J={} K={}",
        d.family.letter(),
        n,
        j,
        k
    )))
}

// ---------------------------------------------------------------------------
// Absolute points.

/// Shape of the set of absolute points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsoluteStructure {
    pub is_union_of_two_hyperplanes: bool,
    pub fixed_projective_dim: isize,
    pub absolute_points: usize,
    pub points: usize,
}

/// Tests whether the absolute points are exactly the points on two distinct
/// hyperplanes, by fitting the hyperplanes to the non-absolute points.
pub fn absolute_structure(theta: &Automorphism) -> AbsoluteStructure {
    let points = Automorphism::model_points(theta.model());
    let (abs, non): (Vec<u64>, Vec<u64>) = points.iter().partition(|&&x| theta.is_absolute(x));
    let d = theta.model().space().dim;
    let fixed = theta.fixed_space().projective_dim();
    let two = !non.is_empty() && {
        // Non-absolute points lie in {f = 1, g = 1}: an affine subspace x + W
        // with both functionals vanishing on W.
        let x = non[0];
        let diffs: Vec<u64> = non.iter().map(|&y| y ^ x).filter(|&v| v != 0).collect();
        // Functionals are vectors under the dot product.
        let ann = null_space(&diffs, d);
        let cand: Vec<u64> = span_all(&ann).into_iter().filter(|&f| parity(f & x) == 1).collect();
        let mut ok = false;
        'outer: for (a, &f) in cand.iter().enumerate() {
            for &g in &cand[a + 1..] {
                if points.iter().all(|&p| theta.is_absolute(p) == (parity(f & p) == 0 || parity(g & p) == 0)) {
                    ok = true;
                    break 'outer;
                }
            }
        }
        ok
    };
    AbsoluteStructure { is_union_of_two_hyperplanes: two, fixed_projective_dim: fixed, absolute_points: abs.len(), points: points.len() }
}

fn span_all(basis: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &b in basis {
        let more: Vec<u64> = out.iter().map(|&v| v ^ b).collect();
        out.extend(more);
    }
    out.retain(|&v| v != 0);
    out
}

// ---------------------------------------------------------------------------
// Oracle-backed checks.

/// Outcome of comparing the fast opposition predicate with the chamber oracle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleComparison {
    pub pairs: u64,
    pub mismatches: u64,
    pub representatives_only: bool,
}

/// Compares [`BuildingModel::opposite`] with the definition through opposite
/// chambers, for every pair of simplices. With `representatives_only` only
/// the faces of the base chamber are used on the left; the strongly
/// transitive group action makes this exhaustive.
pub fn compare_opposition_with_oracle(
    graph: &ChamberGraph,
    index: &SimplicialIndex,
    representatives_only: bool,
) -> OracleComparison {
    let model = &graph.model;
    let cox = model.coxeter();
    let op = cox.opposition_involution();
    let base = graph.id(&model.base_chamber()).expect("base chamber in graph");
    let n = model.rank();
    let mut out = OracleComparison { representatives_only, ..Default::default() };
    for j in TypeSet::full(n).subsets().filter(|j| !j.is_empty()) {
        let jop = op.apply_set(j);
        let targets = index.simplices_of_type(jop);
        let target_simplices: Vec<_> = targets.iter().map(|t| index.simplex(t)).collect();
        let target_pos: HashMap<&Vec<u32>, usize> = targets.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let sources = if representatives_only { vec![index.face(base, j)] } else { index.simplices_of_type(j) };
        let results: Vec<(u64, u64)> = sources
            .par_iter()
            .map(|src| {
                let mut oracle = vec![false; targets.len()];
                for a in index.residue(src) {
                    let dist = graph.distances_from(a);
                    for (b, &dv) in dist.iter().enumerate() {
                        if dv == graph.weyl.w0 {
                            oracle[target_pos[&index.face(b as u32, jop)]] = true;
                        }
                    }
                }
                let s = index.simplex(src);
                let mut bad = 0;
                for (i, t) in target_simplices.iter().enumerate() {
                    if model.opposite(&s, t) != oracle[i] {
                        bad += 1;
                    }
                }
                (targets.len() as u64, bad)
            })
            .collect();
        for (p, b) in results {
            out.pairs += p;
            out.mismatches += b;
        }
    }
    out
}

/// Counts for the residue laws over all simplices of `Opp(theta)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResidueLawReport {
    pub simplices: u64,
    pub typemap_failures: u64,
    pub proj_checks: u64,
    pub proj_failures: u64,
}

/// Checks, for every `sigma` in `Opp(theta)`, that the induced map
/// `theta_sigma = proj_sigma o theta` on `Res(sigma)` permutes types by
/// `w_{S\J} o w_0 o pi_theta`, and that `beta ⊇ sigma` is opposite `beta^theta`
/// exactly when it is opposite `beta^{theta_sigma}` inside the residue.
pub fn check_residue_laws(theta: &Automorphism, oracle: &ResidueOracle) -> ResidueLawReport {
    let g = oracle.graph;
    let idx = oracle.index;
    let model = &g.model;
    let cox = model.coxeter();
    let n = model.rank();
    let op = cox.opposition_involution();
    let pi = theta.type_permutation();
    let vimg: Vec<u32> = idx
        .vertices
        .iter()
        .map(|v| idx.vertex_id(&theta.apply_vertex(v)).expect("image vertex exists"))
        .collect();
    let cimg: Vec<u32> = g.chambers.iter().map(|c| g.id(&theta.apply_chamber(c)).expect("image chamber exists")).collect();
    let img = |s: &[u32]| -> Vec<u32> {
        let mut v: Vec<u32> = s.iter().map(|&x| vimg[x as usize]).collect();
        v.sort_by_key(|&x| idx.vertices[x as usize].ty);
        v
    };
    let mut all: Vec<Vec<u32>> = Vec::new();
    for j in TypeSet::full(n).subsets().filter(|j| !j.is_empty()) {
        all.extend(idx.simplices_of_type(j));
    }
    let parts: Vec<ResidueLawReport> = all
        .par_iter()
        .filter(|sigma| oracle.opposite(sigma, &img(sigma)))
        .map(|sigma| {
            let mut rep = ResidueLawReport { simplices: 1, ..Default::default() };
            let res = oracle.residue(sigma);
            let k = res.types;
            let wk = cox.longest_parabolic(k);
            let wk_id = g.weyl.id(&wk);
            // theta_sigma on chambers of the residue.
            let ts: HashMap<u32, u32> =
                res.chambers.iter().map(|&a| (a, oracle.project_chamber(&res, cimg[a as usize]))).collect();
            for &a in &res.chambers {
                for s in k.nodes() {
                    let expect = {
                        let t = op.apply(pi.apply(s));
                        // Conjugation by w_K inside the residue.
                        let r = cox.negate(cox.apply(&wk, cox.simple_root(t)));
                        (0..n).find(|&i| cox.simple_root(i) == r).unwrap_or(usize::MAX)
                    };
                    for &b in g.neighbors(a, s) {
                        let d = oracle.delta_id(ts[&a], ts[&b]);
                        let w = &g.weyl.elems[d as usize];
                        let ok = w.length() == 1 && cox.reduced_word(w)[0] == expect;
                        if !ok {
                            rep.typemap_failures += 1;
                        }
                    }
                }
            }
            // Faces of the residue strictly containing sigma.
            let mut faces: BTreeSet<Vec<u32>> = BTreeSet::new();
            let jset = TypeSet::from_nodes(sigma.iter().map(|&v| idx.vertices[v as usize].ty));
            for &a in &res.chambers {
                for extra in k.subsets().filter(|e| !e.is_empty()) {
                    faces.insert(idx.face(a, jset.union(extra)));
                }
            }
            for beta in faces {
                let bimg = img(&beta);
                let in_delta = oracle.opposite(&beta, &bimg);
                let bts = oracle.project(&res, &bimg);
                let in_res = oracle.opposite_in_residue(&res, &beta, &bts, wk_id);
                rep.proj_checks += 1;
                if in_delta != in_res {
                    rep.proj_failures += 1;
                }
            }
            rep
        })
        .collect();
    parts.into_iter().fold(ResidueLawReport::default(), |a, b| ResidueLawReport {
        simplices: a.simplices + b.simplices,
        typemap_failures: a.typemap_failures + b.typemap_failures,
        proj_checks: a.proj_checks + b.proj_checks,
        proj_failures: a.proj_failures + b.proj_failures,
    })
}

// ---------------------------------------------------------------------------
// Small matrix groups.

/// Square matrices of size at most 8, one byte per row, packed into a `u64`.
pub mod packed {
    use crate::gf2::BitMat;

    pub fn pack(m: &BitMat) -> u64 {
        m.rows.iter().enumerate().fold(0u64, |acc, (i, &r)| acc | (r & 0xff) << (8 * i))
    }

    pub fn unpack(x: u64, d: usize) -> BitMat {
        BitMat { rows: (0..d).map(|i| x >> (8 * i) & 0xff).collect(), cols: d }
    }

    #[inline]
    pub fn mul(a: u64, b: u64, d: usize) -> u64 {
        let mut out = 0u64;
        for i in 0..d {
            let ra = a >> (8 * i) & 0xff;
            let mut r = 0u64;
            let mut m = ra;
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                r ^= b >> (8 * j) & 0xff;
                m &= m - 1;
            }
            out |= r << (8 * i);
        }
        out
    }

    pub fn identity(d: usize) -> u64 {
        (0..d).fold(0u64, |acc, i| acc | 1u64 << (9 * i))
    }

    pub fn transpose(a: u64, d: usize) -> u64 {
        let mut out = 0u64;
        for i in 0..d {
            for j in 0..d {
                out |= (a >> (8 * i + j) & 1) << (8 * j + i);
            }
        }
        out
    }
}

/// A finite matrix group of degree at most 8, listed in breadth-first order
/// from a generating set.
#[derive(Debug, Clone)]
pub struct SmallGroup {
    pub dim: usize,
    pub gens: Vec<u64>,
    pub elements: Vec<u64>,
    index: HashMap<u64, u32>,
}

impl SmallGroup {
    /// Closure of `gens` (which must be invertible `d x d`, `d <= 8`).
    pub fn generate(gens: &[BitMat], cap: usize) -> Result<SmallGroup, AnalysisError> {
        let d = gens.first().map_or(0, |g| g.cols);
        assert!(d <= 8, "packed matrices hold at most 8 rows");
        let gs: Vec<u64> = gens.iter().map(packed::pack).collect();
        let id = packed::identity(d);
        let mut index = HashMap::new();
        index.insert(id, 0u32);
        let mut elements = vec![id];
        let mut head = 0;
        while head < elements.len() {
            let x = elements[head];
            head += 1;
            for &g in &gs {
                let y = packed::mul(x, g, d);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(y) {
                    if elements.len() >= cap {
                        return Err(AnalysisError::Scale(format!("group has more than {cap} elements")));
                    }
                    e.insert(elements.len() as u32);
                    elements.push(y);
                }
            }
        }
        Ok(SmallGroup { dim: d, gens: gs, elements, index })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn matrix(&self, i: usize) -> BitMat {
        packed::unpack(self.elements[i], self.dim)
    }

    pub fn index_of(&self, m: &BitMat) -> Option<usize> {
        self.index.get(&packed::pack(m)).map(|&i| i as usize)
    }

    /// Order of element `i`.
    pub fn element_order(&self, i: usize) -> u64 {
        let id = packed::identity(self.dim);
        let x = self.elements[i];
        let mut p = x;
        let mut k = 1;
        while p != id {
            p = packed::mul(p, x, self.dim);
            k += 1;
        }
        k
    }

    /// Conjugacy classes as sorted index lists, ordered by smallest member.
    /// Generators must be involutions (as transvections are), so conjugating
    /// by each generator connects every class.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let d = self.dim;
        self.orbits_under(|g, x| packed::mul(packed::mul(g, x, d), g, d))
    }

    /// Orbits of the elements under `x -> act(g, x)` for the generators `g`.
    /// The action must map the group into itself.
    pub fn orbits_under(&self, act: impl Fn(u64, u64) -> u64) -> Vec<Vec<usize>> {
        let mut parent: Vec<u32> = (0..self.elements.len() as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for (i, &x) in self.elements.iter().enumerate() {
            for &g in &self.gens {
                let j = self.index[&act(g, x)];
                let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
        let mut classes: HashMap<u32, Vec<usize>> = HashMap::new();
        for i in 0..self.elements.len() {
            let r = find(&mut parent, i as u32);
            classes.entry(r).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = classes.into_values().collect();
        out.sort();
        out
    }

    /// Classes of the dualities `U -> (xU)^perp` under conjugation by the
    /// collineations: `x -> h^{-T} x h^{-1}`, here `h^T x h` for involutive
    /// generators.
    pub fn duality_classes(&self) -> Vec<Vec<usize>> {
        let d = self.dim;
        self.orbits_under(|g, x| packed::mul(packed::mul(packed::transpose(g, d), x, d), g, d))
    }
}

/// `GL_d(2)` for `d <= 8`, generated by the elementary transvections.
pub fn general_linear_group(d: usize) -> Result<SmallGroup, AnalysisError> {
    let mut gens = Vec::new();
    for i in 1..=d {
        for j in 1..=d {
            if i != j {
                gens.push(BitMat::identity(d).add(&BitMat::from_elementary(d, &[(i, j)])));
            }
        }
    }
    let order = (0..d as u32).fold(1u64, |acc, i| acc * ((1u64 << d) - (1u64 << i)));
    SmallGroup::generate(&gens, order as usize)
}

/// The symplectic transvection `x -> x + (x, v) v`.
pub fn symplectic_transvection(model: &BuildingModel, v: u64) -> BitMat {
    let sp = model.space();
    let d = sp.dim;
    let cols: Vec<u64> = (0..d).map(|j| (1u64 << j) ^ if sp.form_bits(1 << j, v) == 1 { v } else { 0 }).collect();
    BitMat { rows: cols, cols: d }.transpose()
}

/// `|Sp_{2n}(2)| = 2^(n^2) prod_{i=1..n} (4^i - 1)`.
pub fn symplectic_group_order(n: usize) -> u64 {
    (1..=n as u32).fold(1u64 << (n * n), |acc, i| acc * ((1u64 << (2 * i)) - 1))
}

/// `Sp_{2n}(2)` for `n <= 4`, generated by the transvections in the vectors
/// `e_i` and `e_i + e_{i+1}`.
pub fn symplectic_group(n: usize) -> Result<SmallGroup, AnalysisError> {
    let model = BuildingModel::symplectic(n)?;
    let d = 2 * n;
    let mut vs: Vec<u64> = (0..d).map(|i| 1u64 << i).collect();
    vs.extend((0..d - 1).map(|i| 3u64 << i));
    let gens: Vec<BitMat> = vs.iter().map(|&v| symplectic_transvection(&model, v)).collect();
    let g = SmallGroup::generate(&gens, symplectic_group_order(n) as usize)?;
    debug_assert_eq!(g.len() as u64, symplectic_group_order(n));
    Ok(g)
}
