//! The classical small buildings over GF(2) as incidence geometries.
//!
//! Four models are supported:
//!
//! | kind | building | ambient space | type-`k` vertices |
//! |------|----------|---------------|-------------------|
//! | [`ModelKind::Projective`] | `A_n(2)` | GF(2)^(n+1) | `k`-dimensional subspaces |
//! | [`ModelKind::Symplectic`] | `C_n(2)` | GF(2)^(2n), symplectic | totally isotropic `k`-spaces |
//! | [`ModelKind::Oriflamme`] | `D_n(2)` | GF(2)^(2n), `F^+` | singular `k`-spaces, `k <= n-2`, then the two classes of maximals |
//! | [`ModelKind::MinusPolar`] | `B_n(2,4)` | GF(2)^(2n+2), `F^-` | singular `k`-spaces |
//!
//! Types are 0-based in code: type `t` is the node `t` of the Coxeter system.
//!
//! A chamber is stored as a canonical flag basis: vector `k` spans the `k`-th
//! flag member modulo the previous one and is reduced against its echelon
//! pivots, so equal flags have equal bases. For `D_n` the basis holds a flag
//! `U_1 < ... < U_{n-1}` followed by one vector completing `U_{n-1}` to each of
//! the two maximal singular spaces through it.
//!
//! [`BuildingModel::delta`] computes Weyl distances from intersection
//! dimensions of two flags. [`ChamberGraph`] is the independent reference: it
//! materializes the panel graph and propagates distances along galleries.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterError, CoxeterSystem, Family, TypeSet, WeylElement};
use crate::gf2::{parity, reduce_mod, rref, BitMat, FormKind, FormedSpace, Gf2Error, Subspace};

/// Default cap on chamber enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 100_000_000;
/// Default cap on materializing the chamber graph.
pub const DEFAULT_GRAPH_CAP: u128 = 2_000_000;

const MAX_VECS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("unsupported model {kind:?} of rank {rank}")]
    Unsupported { kind: ModelKind, rank: usize },
    #[error("scale: {what} has {count} objects, above the cap {cap}; use a search strategy instead")]
    Scale { what: String, count: u128, cap: u128 },
    #[error("vertices are not pairwise incident")]
    NotIncident,
    #[error("vertex of type {0} is not a valid subspace for this model")]
    BadVertex(usize),
    #[error("simplex has two vertices of type {0}")]
    RepeatedType(usize),
    #[error("simplex is not contained in the chamber graph")]
    UnknownSimplex,
    #[error("simplex is not mapped to an opposite simplex")]
    NotOpposite,
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// The four classical models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Projective,
    Symplectic,
    Oriflamme,
    MinusPolar,
}

/// A vertex: a subspace together with its type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub ty: usize,
    pub space: Subspace,
}

/// A set of pairwise incident vertices with distinct types, sorted by type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<Vertex>,
}

impl Simplex {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn type_set(&self) -> TypeSet {
        TypeSet::from_nodes(self.vertices.iter().map(|v| v.ty))
    }

    pub fn vertex_of_type(&self, t: usize) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.ty == t)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The face of the given type set.
    pub fn face(&self, types: TypeSet) -> Simplex {
        Simplex { vertices: self.vertices.iter().filter(|v| types.contains(v.ty)).cloned().collect() }
    }
}

/// A chamber as a canonical flag basis. Use [`BuildingModel::chamber_vertices`]
/// to read off its vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chamber {
    v: [u16; MAX_VECS],
}

impl Chamber {
    pub fn basis(&self) -> &[u16; MAX_VECS] {
        &self.v
    }
}

/// JSON form of a vertex.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexJson {
    #[serde(rename = "type")]
    pub ty: usize,
    pub basis_rows_hex: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<usize>,
}

/// JSON form of a simplex.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SimplexJson {
    pub model: String,
    pub vertices: Vec<VertexJson>,
}

/// One of the classical building models of rank `n`.
#[derive(Debug, Clone)]
pub struct BuildingModel {
    kind: ModelKind,
    rank: usize,
    space: FormedSpace,
    cox: CoxeterSystem,
    nvec: usize,
}

/// Fully reduced echelon form over at most 16 coordinates, pivots at the
/// lowest set bit, rows stored by pivot.
#[derive(Clone, Copy)]
struct Rref {
    rows: [u16; 16],
    mask: u16,
}

impl Rref {
    #[inline]
    fn new() -> Rref {
        Rref { rows: [0; 16], mask: 0 }
    }

    #[inline]
    fn reduce(&self, mut v: u16) -> u16 {
        let mut m = v & self.mask;
        while m != 0 {
            let p = m.trailing_zeros() as usize;
            v ^= self.rows[p];
            m &= m - 1;
        }
        v
    }

    #[inline]
    fn insert(&mut self, v: u16) -> bool {
        let x = self.reduce(v);
        if x == 0 {
            return false;
        }
        let p = x.trailing_zeros() as usize;
        let mut m = self.mask;
        while m != 0 {
            let q = m.trailing_zeros() as usize;
            if self.rows[q] >> p & 1 == 1 {
                self.rows[q] ^= x;
            }
            m &= m - 1;
        }
        self.rows[p] = x;
        self.mask |= 1 << p;
        true
    }

    fn basis(&self) -> impl Iterator<Item = u16> + '_ {
        (0..16).filter(move |&p| self.mask >> p & 1 == 1).map(move |p| self.rows[p])
    }
}

/// Reusable echelon basis over at most 16 coordinates.
#[derive(Clone, Copy)]
struct Ech {
    rows: [u16; 16],
}

impl Ech {
    #[inline]
    fn new() -> Ech {
        Ech { rows: [0; 16] }
    }

    #[inline]
    fn insert(&mut self, mut v: u16) -> bool {
        while v != 0 {
            let p = v.trailing_zeros() as usize;
            if self.rows[p] == 0 {
                self.rows[p] = v;
                return true;
            }
            v ^= self.rows[p];
        }
        false
    }
}

impl BuildingModel {
    pub fn new(kind: ModelKind, rank: usize) -> Result<BuildingModel, GeometryError> {
        let (dim, form, family, nvec, ok) = match kind {
            ModelKind::Projective => (rank + 1, FormKind::Plain, Family::A, rank, (1..=8).contains(&rank)),
            ModelKind::Symplectic => (2 * rank, FormKind::Symplectic, Family::C, rank, (2..=8).contains(&rank)),
            ModelKind::Oriflamme => (2 * rank, FormKind::QuadraticPlus, Family::D, rank + 1, (3..=7).contains(&rank)),
            ModelKind::MinusPolar => (2 * rank + 2, FormKind::QuadraticMinus, Family::B, rank, (2..=7).contains(&rank)),
        };
        if !ok {
            return Err(GeometryError::Unsupported { kind, rank });
        }
        Ok(BuildingModel { kind, rank, space: FormedSpace::new(dim, form)?, cox: CoxeterSystem::new(family, rank)?, nvec })
    }

    /// `A_n(2)`.
    pub fn projective(n: usize) -> Result<BuildingModel, GeometryError> {
        BuildingModel::new(ModelKind::Projective, n)
    }

    /// `C_n(2)`.
    pub fn symplectic(n: usize) -> Result<BuildingModel, GeometryError> {
        BuildingModel::new(ModelKind::Symplectic, n)
    }

    /// `D_n(2)`.
    pub fn oriflamme(n: usize) -> Result<BuildingModel, GeometryError> {
        BuildingModel::new(ModelKind::Oriflamme, n)
    }

    /// `B_n(2,4)`.
    pub fn minus_polar(n: usize) -> Result<BuildingModel, GeometryError> {
        BuildingModel::new(ModelKind::MinusPolar, n)
    }

    /// Parses labels such as `A:3`, `C:2`, `D:4` or `B:2` (the last meaning `B_2(2,4)`).
    pub fn from_label(label: &str) -> Option<BuildingModel> {
        let (f, n) = label.split_once(':')?;
        let n: usize = n.parse().ok()?;
        let kind = match f.trim().to_ascii_uppercase().as_str() {
            "A" => ModelKind::Projective,
            "C" => ModelKind::Symplectic,
            "D" => ModelKind::Oriflamme,
            "B" | "B24" => ModelKind::MinusPolar,
            _ => return None,
        };
        BuildingModel::new(kind, n).ok()
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn space(&self) -> FormedSpace {
        self.space
    }

    pub fn coxeter(&self) -> &CoxeterSystem {
        &self.cox
    }

    pub fn label(&self) -> String {
        let n = self.rank;
        match self.kind {
            ModelKind::Projective => format!("A_{n}(2)"),
            ModelKind::Symplectic => format!("C_{n}(2)"),
            ModelKind::Oriflamme => format!("D_{n}(2)"),
            ModelKind::MinusPolar => format!("B_{n}(2,4)"),
        }
    }

    /// Short label accepted by [`BuildingModel::from_label`].
    pub fn short_label(&self) -> String {
        let f = match self.kind {
            ModelKind::Projective => "A",
            ModelKind::Symplectic => "C",
            ModelKind::Oriflamme => "D",
            ModelKind::MinusPolar => "B",
        };
        format!("{f}:{}", self.rank)
    }

    /// Number of chambers in a panel of the given cotype.
    pub fn panel_size(&self, s: usize) -> usize {
        if self.kind == ModelKind::MinusPolar && s == self.rank - 1 {
            5
        } else {
            3
        }
    }

    fn thickness_weight(&self, s: usize) -> u128 {
        self.panel_size(s) as u128 - 1
    }

    /// Number of chambers, `sum over w of prod q_s` over a reduced word of `w`.
    pub fn chamber_count(&self) -> u128 {
        self.weighted_count(&self.cox.min_coset_transversal(TypeSet::EMPTY))
    }

    fn weighted_count(&self, elems: &[WeylElement]) -> u128 {
        elems
            .iter()
            .map(|w| self.cox.reduced_word(w).iter().map(|&s| self.thickness_weight(s)).product::<u128>())
            .sum()
    }

    /// Number of vertices of type `t`, from the minimal coset representatives of
    /// `W / W_{S \ {t}}`.
    pub fn vertex_count(&self, t: usize) -> u128 {
        let k = TypeSet::from_nodes([t]).complement(self.rank);
        self.weighted_count(&self.cox.min_coset_transversal(k))
    }

    /// The standard chamber built from `e_1, e_2, ...`.
    pub fn base_chamber(&self) -> Chamber {
        let mut raw = [0u16; MAX_VECS];
        for (k, r) in raw.iter_mut().enumerate().take(self.rank) {
            *r = 1 << k;
        }
        if self.kind == ModelKind::Oriflamme {
            raw[self.rank] = 1 << self.rank;
        }
        self.canonical(&raw)
    }

    // ---- flag helpers -------------------------------------------------

    fn flag_len(&self) -> usize {
        match self.kind {
            ModelKind::Oriflamme => self.rank - 1,
            _ => self.rank,
        }
    }

    /// Canonical chamber from a raw flag basis. For `D_n` the two completion
    /// vectors may be given in either order.
    fn canonical(&self, raw: &[u16; MAX_VECS]) -> Chamber {
        let mut v = [0u16; MAX_VECS];
        let mut e = Rref::new();
        let m = self.flag_len();
        for k in 0..m {
            let x = e.reduce(raw[k]);
            v[k] = x;
            e.insert(x);
        }
        if self.kind == ModelKind::Oriflamme {
            let a = e.reduce(raw[m]);
            let b = e.reduce(raw[m + 1]);
            let (a, b) = if self.max_class(&v[..m], a) == self.rank - 1 { (a, b) } else { (b, a) };
            v[m] = a;
            v[m + 1] = b;
        }
        Chamber { v }
    }

    /// Class (`n-2` or `n-1`, 0-based type) of the maximal singular space
    /// spanned by `base` and `x`.
    fn max_class(&self, base: &[u16], x: u16) -> usize {
        let n = self.rank;
        let mut e = Ech::new();
        for i in 0..n {
            e.insert(1 << i);
        }
        let mut r = n;
        for &b in base.iter().chain(std::iter::once(&x)) {
            if e.insert(b) {
                r += 1;
            }
        }
        if r % 2 == n % 2 {
            n - 1
        } else {
            n - 2
        }
    }

    fn class_of_space(&self, s: &Subspace) -> usize {
        let n = self.rank;
        let mut rows: Vec<u64> = s.rows().to_vec();
        rows.extend((0..n).map(|i| 1u64 << i));
        let r = crate::gf2::rank_of(&rows);
        if r % 2 == n % 2 {
            n - 1
        } else {
            n - 2
        }
    }

    /// Flag basis vectors `u_1..u_m` (for `D_n` followed by the class-`n`
    /// completion), with `m` the rank.
    #[inline]
    fn polar_flag(&self, c: &Chamber) -> [u16; MAX_VECS] {
        c.v
    }

    fn span_prefix(&self, c: &Chamber, k: usize) -> Subspace {
        let rows: Vec<u64> = c.v[..k].iter().map(|&x| x as u64).collect();
        self.space.span(&rows)
    }

    /// The vertex of type `t` of a chamber.
    pub fn chamber_vertex(&self, c: &Chamber, t: usize) -> Vertex {
        let n = self.rank;
        let space = match self.kind {
            ModelKind::Oriflamme if t >= n - 2 => {
                let mut rows: Vec<u64> = c.v[..n - 1].iter().map(|&x| x as u64).collect();
                rows.push(if t == n - 1 { c.v[n - 1] } else { c.v[n] } as u64);
                self.space.span(&rows)
            }
            _ => self.span_prefix(c, t + 1),
        };
        Vertex { ty: t, space }
    }

    pub fn chamber_vertices(&self, c: &Chamber) -> Vec<Vertex> {
        (0..self.rank).map(|t| self.chamber_vertex(c, t)).collect()
    }

    pub fn chamber_simplex(&self, c: &Chamber) -> Simplex {
        Simplex { vertices: self.chamber_vertices(c) }
    }

    /// Rebuilds a chamber from its vertices listed by type.
    pub fn chamber_from_vertices(&self, verts: &[Subspace]) -> Chamber {
        let n = self.rank;
        let mut raw = [0u16; MAX_VECS];
        let pick = |big: &Subspace, small: &[u64]| -> u16 {
            let red = rref(small);
            big.rows().iter().map(|&r| reduce_mod(&red, r)).find(|&x| x != 0).unwrap_or(0) as u16
        };
        let mut prev: Vec<u64> = Vec::new();
        let flag: Vec<Subspace> = match self.kind {
            ModelKind::Oriflamme => {
                let mut f: Vec<Subspace> = verts[..n - 2].to_vec();
                f.push(verts[n - 2].intersect(&verts[n - 1]).expect("same ambient space"));
                f
            }
            _ => verts.to_vec(),
        };
        for (k, s) in flag.iter().enumerate() {
            let x = pick(s, &prev);
            raw[k] = x;
            prev.push(x as u64);
        }
        if self.kind == ModelKind::Oriflamme {
            raw[n - 1] = pick(&verts[n - 1], &prev);
            raw[n] = pick(&verts[n - 2], &prev);
        }
        self.canonical(&raw)
    }

    // ---- validation ---------------------------------------------------

    /// Whether a subspace is a valid vertex of type `t`.
    pub fn is_vertex(&self, v: &Vertex) -> bool {
        let n = self.rank;
        if v.space.space != self.space || v.ty >= n {
            return false;
        }
        let d = v.space.dim();
        match self.kind {
            ModelKind::Projective => d == v.ty + 1,
            ModelKind::Symplectic => d == v.ty + 1 && v.space.is_totally_isotropic(),
            ModelKind::MinusPolar => d == v.ty + 1 && v.space.is_singular(),
            ModelKind::Oriflamme => {
                if v.ty < n - 2 {
                    d == v.ty + 1 && v.space.is_singular()
                } else {
                    d == n && v.space.is_singular() && self.class_of_space(&v.space) == v.ty
                }
            }
        }
    }

    /// Symmetrized containment, with the `D_n` rule for the two maximal types.
    pub fn incident(&self, u: &Vertex, v: &Vertex) -> bool {
        if u.ty == v.ty {
            return u == v;
        }
        let n = self.rank;
        if self.kind == ModelKind::Oriflamme && u.ty >= n - 2 && v.ty >= n - 2 {
            let i = u.space.intersect(&v.space).expect("same ambient space");
            return i.dim() == n - 1;
        }
        u.space.contains(&v.space) || v.space.contains(&u.space)
    }

    /// Builds a simplex, checking vertex validity and pairwise incidence.
    pub fn simplex(&self, mut vertices: Vec<Vertex>) -> Result<Simplex, GeometryError> {
        vertices.sort();
        for (i, v) in vertices.iter().enumerate() {
            if !self.is_vertex(v) {
                return Err(GeometryError::BadVertex(v.ty));
            }
            if i > 0 && vertices[i - 1].ty == v.ty {
                return Err(GeometryError::RepeatedType(v.ty));
            }
        }
        for (i, u) in vertices.iter().enumerate() {
            for v in &vertices[i + 1..] {
                if !self.incident(u, v) {
                    return Err(GeometryError::NotIncident);
                }
            }
        }
        Ok(Simplex { vertices })
    }

    pub fn simplex_json(&self, s: &Simplex) -> SimplexJson {
        let n = self.rank;
        SimplexJson {
            model: self.short_label(),
            vertices: s
                .vertices
                .iter()
                .map(|v| VertexJson {
                    ty: v.ty + 1,
                    basis_rows_hex: v.space.to_hex_rows(),
                    class: (self.kind == ModelKind::Oriflamme && v.ty >= n - 2).then_some(v.ty + 1),
                })
                .collect(),
        }
    }

    pub fn simplex_from_json(&self, j: &SimplexJson) -> Result<Simplex, GeometryError> {
        let verts = j
            .vertices
            .iter()
            .map(|v| {
                let rows = v
                    .basis_rows_hex
                    .iter()
                    .map(|h| u64::from_str_radix(h, 16).map_err(|_| GeometryError::Gf2(Gf2Error::Hex(h.clone()))))
                    .collect::<Result<Vec<_>, _>>()?;
                if v.ty == 0 {
                    return Err(GeometryError::BadVertex(0));
                }
                Ok(Vertex { ty: v.ty - 1, space: self.space.span(&rows) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.simplex(verts)
    }

    // ---- enumeration --------------------------------------------------

    /// Candidate next flag vectors: nonzero, reduced against `red`, and for the
    /// polar models orthogonal to the flag and singular.
    fn candidates(&self, flag: &[u16], red: &[u64]) -> Vec<u16> {
        let d = self.space.dim;
        let mut e = Rref::new();
        for &r in red {
            e.insert(r as u16);
        }
        // Coset representatives of U^perp / U (or V / U) are the span of a
        // basis reduced against U.
        let mut q = Rref::new();
        if self.kind == ModelKind::Projective {
            for i in 0..d {
                q.insert(e.reduce(1 << i));
            }
        } else {
            let duals: Vec<u64> = flag.iter().map(|&u| self.space.dual_bits(u as u64)).collect();
            for b in crate::gf2::null_space(&duals, d) {
                q.insert(e.reduce(b as u16));
            }
        }
        let basis: Vec<u16> = q.basis().collect();
        let quadratic = self.space.has_quadratic_form();
        let mut out: Vec<u16> = (1u32..(1u32 << basis.len()))
            .map(|m| basis.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).fold(0u16, |a, (_, &b)| a ^ b))
            .filter(|&x| !quadratic || self.space.quad_bits(x as u64) == 0)
            .collect();
        out.sort_unstable();
        out
    }

    /// The two singular completions of an `(n-1)`-flag in `D_n`.
    fn oriflamme_completions(&self, flag: &[u16], red: &[u64]) -> [u16; 2] {
        let c = self.candidates(flag, red);
        debug_assert_eq!(c.len(), 2);
        [c[0], c[1]]
    }

    fn dfs(&self, flag: &mut Vec<u16>, red: Vec<u64>, f: &mut dyn FnMut(Chamber)) {
        let m = self.flag_len();
        if flag.len() == m {
            let mut raw = [0u16; MAX_VECS];
            raw[..m].copy_from_slice(flag);
            if self.kind == ModelKind::Oriflamme {
                let [a, b] = self.oriflamme_completions(flag, &red);
                raw[m] = a;
                raw[m + 1] = b;
                f(self.canonical(&raw));
            } else {
                f(Chamber { v: raw });
            }
            return;
        }
        for x in self.candidates(flag, &red) {
            let mut r2 = red.clone();
            r2.push(x as u64);
            flag.push(x);
            self.dfs(flag, rref(&r2), f);
            flag.pop();
        }
    }

    fn check_cap(&self, what: &str, count: u128, cap: u128) -> Result<(), GeometryError> {
        if count > cap {
            Err(GeometryError::Scale { what: what.to_string(), count, cap })
        } else {
            Ok(())
        }
    }

    /// Visits every chamber once, in a deterministic order.
    pub fn for_each_chamber(&self, cap: u128, mut f: impl FnMut(Chamber)) -> Result<(), GeometryError> {
        self.check_cap(&self.label(), self.chamber_count(), cap)?;
        self.dfs(&mut Vec::new(), Vec::new(), &mut f);
        Ok(())
    }

    /// All chambers in the deterministic enumeration order.
    pub fn enumerate_chambers(&self, cap: u128) -> Result<Vec<Chamber>, GeometryError> {
        let mut out = Vec::with_capacity(self.chamber_count().min(cap) as usize);
        self.for_each_chamber(cap, |c| out.push(c))?;
        Ok(out)
    }

    /// Parallel fold over all chambers, split by the first flag vector. The
    /// reduction must be associative and commutative for a schedule-free result.
    pub fn par_fold_chambers<T, F, R>(&self, cap: u128, init: T, fold: F, reduce: R) -> Result<T, GeometryError>
    where
        T: Send + Sync + Clone,
        F: Fn(T, Chamber) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        self.check_cap(&self.label(), self.chamber_count(), cap)?;
        let firsts = self.candidates(&[], &[]);
        let out = firsts
            .par_iter()
            .map(|&x| {
                let mut acc = Some(init.clone());
                let mut flag = vec![x];
                self.dfs(&mut flag, vec![x as u64], &mut |c| {
                    let a = acc.take().expect("accumulator present");
                    acc = Some(fold(a, c));
                });
                acc.expect("accumulator present")
            })
            .reduce(|| init.clone(), &reduce);
        Ok(out)
    }

    /// Vertices of type `t`, each once, sorted.
    pub fn enumerate_vertices(&self, t: usize, cap: u128) -> Result<Vec<Vertex>, GeometryError> {
        self.check_cap("vertex set", self.vertex_count(t), cap)?;
        let n = self.rank;
        let mut set: BTreeSet<Subspace> = BTreeSet::new();
        let depth = match self.kind {
            ModelKind::Oriflamme if t >= n - 2 => n - 1,
            _ => t + 1,
        };
        self.dfs_partial(&mut Vec::new(), Vec::new(), depth, &mut |flag, red| {
            if self.kind == ModelKind::Oriflamme && t >= n - 2 {
                for x in self.oriflamme_completions(flag, red) {
                    let mut rows: Vec<u64> = flag.iter().map(|&u| u as u64).collect();
                    rows.push(x as u64);
                    if self.max_class(flag, x) == t {
                        set.insert(self.space.span(&rows));
                    }
                }
            } else {
                set.insert(self.space.span(red));
            }
        });
        Ok(set.into_iter().map(|space| Vertex { ty: t, space }).collect())
    }

    fn dfs_partial(&self, flag: &mut Vec<u16>, red: Vec<u64>, depth: usize, f: &mut dyn FnMut(&[u16], &[u64])) {
        if flag.len() == depth {
            f(flag, &red);
            return;
        }
        for x in self.candidates(flag, &red) {
            // The last level only needs one representative per subspace; the
            // set in the caller deduplicates.
            let mut r2 = red.clone();
            r2.push(x as u64);
            flag.push(x);
            self.dfs_partial(flag, rref(&r2), depth, f);
            flag.pop();
        }
    }

    // ---- panels -------------------------------------------------------

    /// The chambers `s`-adjacent to `c`, excluding `c` itself.
    pub fn neighbors(&self, c: &Chamber, s: usize) -> Vec<Chamber> {
        let n = self.rank;
        let verts: Vec<Subspace> = self.chamber_vertices(c).into_iter().map(|v| v.space).collect();
        let mut out = Vec::new();
        match self.kind {
            ModelKind::Oriflamme if s >= n - 2 => {
                // Replace one maximal: pick a hyperplane H of the other maximal
                // through U_{n-2}, then the maximal of class s through H.
                let other = if s == n - 1 { &verts[n - 2] } else { &verts[n - 1] };
                let lower: Vec<u64> = if n >= 3 { c.v[..n - 2].iter().map(|&x| x as u64).collect() } else { vec![] };
                let red = rref(&lower);
                let quot: Vec<u64> = quotient_basis(other, &red);
                for h in combos(&quot) {
                    // The hyperplanes of other/U_{n-2} are its three points.
                    let mut hrows = lower.clone();
                    hrows.push(h);
                    let hred = rref(&hrows);
                    let flag: Vec<u16> = hrows.iter().map(|&x| x as u16).collect();
                    let comps = self.oriflamme_completions(&flag, &hred);
                    for x in comps {
                        if self.max_class(&flag, x) == s {
                            let mut raw = [0u16; MAX_VECS];
                            for (k, &u) in flag.iter().enumerate() {
                                raw[k] = u;
                            }
                            raw[n - 1] = x;
                            raw[n] = comps[0] ^ comps[1] ^ x;
                            let ch = self.canonical(&raw);
                            if ch != *c {
                                out.push(ch);
                            }
                        }
                    }
                }
            }
            _ => {
                let below: Vec<u64> = c.v[..s].iter().map(|&x| x as u64).collect();
                let red = rref(&below);
                let top_polar = self.kind != ModelKind::Projective && s == self.flag_len() - 1 && self.kind != ModelKind::Oriflamme;
                let mut xs: Vec<u64> = Vec::new();
                if top_polar || (self.kind == ModelKind::Projective && s == n - 1) {
                    // Top vertex: candidates among vectors reduced mod U_s.
                    let flag: Vec<u16> = below.iter().map(|&x| x as u16).collect();
                    xs.extend(self.candidates(&flag, &red).into_iter().map(|x| x as u64));
                } else {
                    let upper = self.upper_space(c, s);
                    let quot = quotient_basis(&upper, &red);
                    xs.extend(combos(&quot));
                }
                for x in xs {
                    let ch = self.rebuild(c, s, x as u16);
                    if ch != *c {
                        out.push(ch);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// The flag member just above position `s` (for a non-top type `s`).
    fn upper_space(&self, c: &Chamber, s: usize) -> Subspace {
        let n = self.rank;
        if self.kind == ModelKind::Oriflamme && s == n - 3 {
            // U_{n-1} = M_{n-1} cap M_n.
            return self.span_prefix(c, n - 1);
        }
        self.span_prefix(c, s + 2)
    }

    /// Chamber with the type-`s` member replaced by `U_s + x`.
    fn rebuild(&self, c: &Chamber, s: usize, x: u16) -> Chamber {
        let mut verts: Vec<Subspace> = self.chamber_vertices(c).into_iter().map(|v| v.space).collect();
        let mut rows: Vec<u64> = c.v[..s].iter().map(|&y| y as u64).collect();
        rows.push(x as u64);
        verts[s] = self.space.span(&rows);
        self.chamber_from_vertices(&verts)
    }

    // ---- Weyl distance ------------------------------------------------

    /// Signed permutation encoding the relative position of two chambers:
    /// entry `j` is `+i` or `-i` (1-based). For `A_n` all entries are positive
    /// and there are `n+1` of them.
    pub fn relative_position(&self, c: &Chamber, d: &Chamber) -> ([i8; 9], usize) {
        let mut w = [0i8; 9];
        match self.kind {
            ModelKind::Projective => {
                let n = self.rank;
                let m = n + 1;
                let us = self.completed_basis(c);
                let vs = self.completed_basis(d);
                let dd = intersection_table(&us[..m], &vs[..m]);
                for j in 1..=m {
                    for i in 1..=m {
                        if dd[i][j] + dd[i - 1][j - 1] - dd[i - 1][j] - dd[i][j - 1] == 1 {
                            w[j - 1] = i as i8;
                            break;
                        }
                    }
                }
                (w, m)
            }
            _ => {
                let n = self.rank;
                let us = self.polar_flag(c);
                let vs = self.polar_flag(d);
                let dd = intersection_table(&us[..n], &vs[..n]);
                let ee = pairing_rank_table(&self.space, &us[..n], &vs[..n]);
                for j in 1..=n {
                    let mut found = false;
                    for i in 1..=n {
                        if dd[i][j] + dd[i - 1][j - 1] - dd[i - 1][j] - dd[i][j - 1] == 1 {
                            w[j - 1] = i as i8;
                            found = true;
                            break;
                        }
                    }
                    if !found {
                        for a in 1..=n {
                            if ee[a][j] + ee[a - 1][j - 1] - ee[a - 1][j] - ee[a][j - 1] == 1 {
                                w[j - 1] = -(a as i8);
                                break;
                            }
                        }
                    }
                }
                (w, n)
            }
        }
    }

    /// A reduced word (0-based node indices) for the relative position.
    pub fn position_word(&self, w: &[i8; 9], m: usize) -> Vec<usize> {
        let mut w = *w;
        let n = self.rank;
        let pos = |x: i8| -> i32 {
            if x > 0 {
                x as i32
            } else {
                2 * n as i32 + 1 + x as i32
            }
        };
        let mut word = Vec::new();
        loop {
            let mut hit = None;
            match self.kind {
                ModelKind::Projective => {
                    for k in 0..m - 1 {
                        if w[k] > w[k + 1] {
                            hit = Some(k);
                            break;
                        }
                    }
                }
                _ => {
                    for k in 0..n - 1 {
                        if pos(w[k]) > pos(w[k + 1]) {
                            hit = Some(k);
                            break;
                        }
                    }
                    if hit.is_none() {
                        let top = match self.kind {
                            ModelKind::Oriflamme => pos(w[n - 2]) > pos(-w[n - 1]),
                            _ => w[n - 1] < 0,
                        };
                        if top {
                            hit = Some(n - 1);
                        }
                    }
                }
            }
            let Some(k) = hit else { break };
            word.push(k);
            if k < n - 1 || self.kind == ModelKind::Projective {
                w.swap(k, k + 1);
            } else if self.kind == ModelKind::Oriflamme {
                let (a, b) = (w[n - 2], w[n - 1]);
                w[n - 2] = -b;
                w[n - 1] = -a;
            } else {
                w[n - 1] = -w[n - 1];
            }
        }
        word.reverse();
        word
    }

    /// The Weyl distance `delta(c, d)`.
    pub fn delta(&self, c: &Chamber, d: &Chamber) -> WeylElement {
        let (w, m) = self.relative_position(c, d);
        self.cox.from_word(&self.position_word(&w, m))
    }

    /// Packs a relative position into a cache key.
    pub fn position_key(w: &[i8; 9], m: usize) -> u64 {
        w[..m].iter().fold(0u64, |k, &x| k << 5 | (x as i64 + 16) as u64)
    }

    /// Flag basis extended by a completing vector to a basis of the whole
    /// space (projective model).
    fn completed_basis(&self, c: &Chamber) -> [u16; MAX_VECS + 1] {
        let mut out = [0u16; MAX_VECS + 1];
        let n = self.rank;
        out[..n].copy_from_slice(&c.v[..n]);
        let red = rref(&c.v[..n].iter().map(|&x| x as u64).collect::<Vec<_>>());
        let pivmask: u64 = red.iter().map(|r| 1u64 << r.trailing_zeros()).fold(0, |a, b| a | b);
        let free = (0..=n).find(|&i| pivmask >> i & 1 == 0).expect("flag is not the whole space");
        out[n] = 1 << free;
        out
    }

    /// Dual flag basis used for dualities of `A_n(2)`: returns the basis
    /// `y_1..y_{n+1}` with `y_k . x_l = [k = l]` where `x = A u`.
    pub fn dual_image(&self, c: &Chamber, a: &BitMat) -> Chamber {
        let n = self.rank;
        let us = self.completed_basis(c);
        let m = n + 1;
        // Columns x_k = A u_k; rows of X^T are the x_k.
        let xt = BitMat { rows: (0..m).map(|k| a.apply_bits(us[k] as u64)).collect(), cols: m };
        // Y^T X = I with Y columns y_k means Y^T = X^{-1}; rows of X^{-1} are y_k.
        let x = xt.transpose();
        let xinv = x.inverse().expect("image of a basis is a basis");
        let mut raw = [0u16; MAX_VECS];
        for k in 0..n {
            raw[k] = xinv.rows[n - k] as u16;
        }
        self.canonical(&raw)
    }

    /// Image of a chamber under a matrix acting on the ambient space; for
    /// `D_n` `swap_classes` exchanges the roles of the two completions.
    pub fn matrix_image(&self, c: &Chamber, g: &BitMat, swap_classes: bool) -> Chamber {
        let mut raw = [0u16; MAX_VECS];
        for k in 0..self.nvec {
            raw[k] = g.apply_bits(c.v[k] as u64) as u16;
        }
        if self.kind == ModelKind::Oriflamme && swap_classes {
            let n = self.rank;
            raw.swap(n - 1, n);
        }
        self.canonical(&raw)
    }

    // ---- opposition ---------------------------------------------------

    /// Opposition of two vertices: types must be opposite, and the subspaces
    /// must meet trivially (projective) or `U` must meet `V^perp` trivially
    /// (polar models).
    pub fn vertices_opposite(&self, u: &Vertex, v: &Vertex) -> bool {
        if self.cox.opposition_involution().apply(u.ty) != v.ty {
            return false;
        }
        match self.kind {
            ModelKind::Projective => {
                let mut rows = u.space.rows().to_vec();
                rows.extend_from_slice(v.space.rows());
                crate::gf2::rank_of(&rows) == u.space.dim() + v.space.dim()
            }
            _ => {
                let duals: Vec<u64> = v.space.rows().iter().map(|&r| self.space.dual_bits(r)).collect();
                let pair: Vec<u64> = u
                    .space
                    .rows()
                    .iter()
                    .map(|&x| duals.iter().enumerate().fold(0u64, |acc, (j, &dv)| acc | parity(x & dv) << j))
                    .collect();
                crate::gf2::rank_of(&pair) == u.space.dim()
            }
        }
    }

    /// Fast opposition test for simplices, vertex by vertex.
    pub fn opposite(&self, a: &Simplex, b: &Simplex) -> bool {
        let op = self.cox.opposition_involution();
        if op.apply_set(a.type_set()) != b.type_set() {
            return false;
        }
        a.vertices.iter().all(|u| b.vertex_of_type(op.apply(u.ty)).is_some_and(|v| self.vertices_opposite(u, v)))
    }

    /// Whether two chambers are opposite, from the fast distance.
    pub fn chambers_opposite(&self, c: &Chamber, d: &Chamber) -> bool {
        let (w, m) = self.relative_position(c, d);
        self.position_word(&w, m).len() == self.cox.num_positive()
    }

    /// Visits the chambers opposite `base`, pruning partial flags whose
    /// vertices are not opposite the matching vertices of `base`.
    pub fn for_each_opposite_chamber(&self, base: &Chamber, mut f: impl FnMut(Chamber)) {
        let bverts = self.chamber_vertices(base);
        let op = self.cox.opposition_involution().clone();
        let n = self.rank;
        let prune_depth = match self.kind {
            ModelKind::Oriflamme => n - 2,
            _ => n,
        };
        let mut visit = |c: Chamber| {
            if self.chambers_opposite(base, &c) {
                f(c)
            }
        };
        self.dfs_pruned(&mut Vec::new(), Vec::new(), &mut |flag: &[u16], red: &[u64]| {
            let k = flag.len();
            if k == 0 || k > prune_depth {
                return true;
            }
            let v = Vertex { ty: k - 1, space: self.space.span(red) };
            self.vertices_opposite(&v, &bverts[op.apply(k - 1)])
        }, &mut visit);
    }

    fn dfs_pruned(
        &self,
        flag: &mut Vec<u16>,
        red: Vec<u64>,
        keep: &mut dyn FnMut(&[u16], &[u64]) -> bool,
        f: &mut dyn FnMut(Chamber),
    ) {
        if !keep(flag, &red) {
            return;
        }
        let m = self.flag_len();
        if flag.len() == m {
            let mut raw = [0u16; MAX_VECS];
            raw[..m].copy_from_slice(flag);
            if self.kind == ModelKind::Oriflamme {
                let [a, b] = self.oriflamme_completions(flag, &red);
                raw[m] = a;
                raw[m + 1] = b;
                f(self.canonical(&raw));
            } else {
                f(Chamber { v: raw });
            }
            return;
        }
        for x in self.candidates(flag, &red) {
            let mut r2 = red.clone();
            r2.push(x as u64);
            flag.push(x);
            self.dfs_pruned(flag, rref(&r2), keep, f);
            flag.pop();
        }
    }
}

impl fmt::Display for BuildingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Basis of `big` modulo the span of the RREF rows `red`.
fn quotient_basis(big: &Subspace, red: &[u64]) -> Vec<u64> {
    let mut acc: Vec<u64> = red.to_vec();
    let mut out = Vec::new();
    for &r in big.rows() {
        let cur = rref(&acc);
        let x = reduce_mod(&cur, r);
        if x != 0 {
            out.push(x);
            acc.push(x);
        }
    }
    out
}

/// All nonzero combinations of a short list of vectors.
fn combos(basis: &[u64]) -> impl Iterator<Item = u64> + '_ {
    (1u32..(1u32 << basis.len())).map(move |m| {
        basis.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).fold(0u64, |a, (_, &b)| a ^ b)
    })
}

/// `t[i][j] = dim(U_i cap V_j)` for flags given by bases.
fn intersection_table(us: &[u16], vs: &[u16]) -> [[i32; 10]; 10] {
    let m = us.len();
    let mut t = [[0i32; 10]; 10];
    for i in 0..=m {
        let mut e = Ech::new();
        for &u in &us[..i] {
            e.insert(u);
        }
        let mut r = i as i32;
        for j in 1..=vs.len() {
            if e.insert(vs[j - 1]) {
                r += 1;
            }
            t[i][j] = i as i32 + j as i32 - r;
        }
    }
    t
}

/// `t[i][j]` = rank of the pairing between `U_i` and `V_j`.
fn pairing_rank_table(space: &FormedSpace, us: &[u16], vs: &[u16]) -> [[i32; 10]; 10] {
    let m = us.len();
    let rows: Vec<u16> = us
        .iter()
        .map(|&u| vs.iter().enumerate().fold(0u16, |acc, (b, &v)| acc | (space.form_bits(u as u64, v as u64) as u16) << b))
        .collect();
    let mut t = [[0i32; 10]; 10];
    for j in 1..=vs.len() {
        let mask = ((1u32 << j) - 1) as u16;
        let mut e = Ech::new();
        let mut r = 0;
        for i in 1..=m {
            if e.insert(rows[i - 1] & mask) {
                r += 1;
            }
            t[i][j] = r;
        }
    }
    t
}

// ---------------------------------------------------------------------------
// Reference implementation: the chamber graph.

/// Interned Weyl group with right multiplication by simple reflections.
#[derive(Debug, Clone)]
pub struct WeylTable {
    pub elems: Vec<WeylElement>,
    ids: HashMap<WeylElement, u16>,
    rmul: Vec<Vec<u16>>,
    lens: Vec<u16>,
    pub identity: u16,
    pub w0: u16,
}

impl WeylTable {
    pub fn new(cox: &CoxeterSystem) -> WeylTable {
        let elems = cox.min_coset_transversal(TypeSet::EMPTY);
        let ids: HashMap<WeylElement, u16> = elems.iter().enumerate().map(|(i, w)| (w.clone(), i as u16)).collect();
        let rmul = elems.iter().map(|w| (0..cox.rank()).map(|s| ids[&cox.mul_simple_right(w, s)]).collect()).collect();
        let lens = elems.iter().map(|w| w.length() as u16).collect();
        let w0 = ids[cox.w0()];
        let identity = ids[&cox.identity()];
        WeylTable { elems, ids, rmul, lens, identity, w0 }
    }

    pub fn id(&self, w: &WeylElement) -> u16 {
        self.ids[w]
    }

    pub fn len_of(&self, id: u16) -> u16 {
        self.lens[id as usize]
    }

    pub fn mul_simple(&self, id: u16, s: usize) -> u16 {
        self.rmul[id as usize][s]
    }
}

/// The chamber graph of a small model, with panel adjacency for every type.
#[derive(Debug, Clone)]
pub struct ChamberGraph {
    pub model: BuildingModel,
    pub chambers: Vec<Chamber>,
    index: HashMap<Chamber, u32>,
    offsets: Vec<u32>,
    nbrs: Vec<u32>,
    pub weyl: WeylTable,
}

impl ChamberGraph {
    pub fn build(model: &BuildingModel, cap: u128) -> Result<ChamberGraph, GeometryError> {
        let count = model.chamber_count();
        model.check_cap("chamber graph", count, cap)?;
        let chambers = model.enumerate_chambers(cap)?;
        let index: HashMap<Chamber, u32> = chambers.iter().enumerate().map(|(i, c)| (*c, i as u32)).collect();
        let rank = model.rank();
        let lists: Vec<Vec<Vec<u32>>> = chambers
            .par_iter()
            .map(|c| (0..rank).map(|s| model.neighbors(c, s).iter().map(|d| index[d]).collect()).collect())
            .collect();
        let mut offsets = Vec::with_capacity(chambers.len() * rank + 1);
        let mut nbrs = Vec::new();
        offsets.push(0);
        for per in &lists {
            for l in per {
                nbrs.extend_from_slice(l);
                offsets.push(nbrs.len() as u32);
            }
        }
        Ok(ChamberGraph { weyl: WeylTable::new(model.coxeter()), model: model.clone(), chambers, index, offsets, nbrs })
    }

    pub fn len(&self) -> usize {
        self.chambers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chambers.is_empty()
    }

    pub fn id(&self, c: &Chamber) -> Option<u32> {
        self.index.get(c).copied()
    }

    pub fn neighbors(&self, c: u32, s: usize) -> &[u32] {
        let k = c as usize * self.model.rank() + s;
        &self.nbrs[self.offsets[k] as usize..self.offsets[k + 1] as usize]
    }

    /// Weyl distances from `c` to every chamber, by breadth-first gallery
    /// propagation: crossing a type-`s` panel from a chamber at distance `w`
    /// for the first time gives distance `ws`.
    pub fn distances_from(&self, c: u32) -> Vec<u16> {
        let mut dist = vec![u16::MAX; self.chambers.len()];
        dist[c as usize] = self.weyl.identity;
        let mut q = VecDeque::from([c]);
        while let Some(x) = q.pop_front() {
            let dx = dist[x as usize];
            for s in 0..self.model.rank() {
                for &y in self.neighbors(x, s) {
                    if dist[y as usize] == u16::MAX {
                        dist[y as usize] = self.weyl.mul_simple(dx, s);
                        q.push_back(y);
                    }
                }
            }
        }
        dist
    }

    /// Oracle Weyl distance between two chambers.
    pub fn weyl_distance(&self, c: &Chamber, d: &Chamber) -> Result<WeylElement, GeometryError> {
        let ci = self.id(c).ok_or(GeometryError::UnknownSimplex)?;
        let di = self.id(d).ok_or(GeometryError::UnknownSimplex)?;
        Ok(self.weyl.elems[self.distances_from(ci)[di as usize] as usize].clone())
    }
}

/// Vertex and simplex bookkeeping on top of a chamber graph.
#[derive(Debug, Clone)]
pub struct SimplicialIndex {
    pub vertices: Vec<Vertex>,
    vertex_ids: HashMap<Vertex, u32>,
    /// For each chamber, its vertex ids by type.
    pub chamber_vertices: Vec<Vec<u32>>,
    /// For each vertex, the chambers containing it.
    pub vertex_chambers: Vec<Vec<u32>>,
}

impl SimplicialIndex {
    pub fn build(g: &ChamberGraph) -> SimplicialIndex {
        let mut vertices = Vec::new();
        let mut vertex_ids = HashMap::new();
        let mut chamber_vertices = Vec::with_capacity(g.len());
        let per: Vec<Vec<Vertex>> = g.chambers.par_iter().map(|c| g.model.chamber_vertices(c)).collect();
        for vs in per {
            let ids = vs
                .into_iter()
                .map(|v| {
                    *vertex_ids.entry(v.clone()).or_insert_with(|| {
                        vertices.push(v);
                        vertices.len() as u32 - 1
                    })
                })
                .collect();
            chamber_vertices.push(ids);
        }
        let mut vertex_chambers = vec![Vec::new(); vertices.len()];
        for (c, ids) in chamber_vertices.iter().enumerate() {
            for &v in ids {
                vertex_chambers[v as usize].push(c as u32);
            }
        }
        SimplicialIndex { vertices, vertex_ids, chamber_vertices, vertex_chambers }
    }

    pub fn vertex_id(&self, v: &Vertex) -> Option<u32> {
        self.vertex_ids.get(v).copied()
    }

    /// Vertex ids of the type-`j` face of chamber `c`, sorted by type.
    pub fn face(&self, c: u32, j: TypeSet) -> Vec<u32> {
        j.nodes().map(|t| self.chamber_vertices[c as usize][t]).collect()
    }

    /// Chambers containing every listed vertex.
    pub fn residue(&self, face: &[u32]) -> Vec<u32> {
        let Some((&first, rest)) = face.split_first() else {
            return (0..self.chamber_vertices.len() as u32).collect();
        };
        self.vertex_chambers[first as usize]
            .iter()
            .copied()
            .filter(|&c| rest.iter().all(|v| self.chamber_vertices[c as usize].contains(v)))
            .collect()
    }

    pub fn simplex_ids(&self, s: &Simplex) -> Option<Vec<u32>> {
        s.vertices.iter().map(|v| self.vertex_id(v)).collect()
    }

    pub fn simplex(&self, ids: &[u32]) -> Simplex {
        let mut vertices: Vec<Vertex> = ids.iter().map(|&i| self.vertices[i as usize].clone()).collect();
        vertices.sort();
        Simplex { vertices }
    }

    /// All simplices of type `j`, as sorted vertex-id lists.
    pub fn simplices_of_type(&self, j: TypeSet) -> Vec<Vec<u32>> {
        let set: BTreeSet<Vec<u32>> = (0..self.chamber_vertices.len() as u32).map(|c| self.face(c, j)).collect();
        set.into_iter().collect()
    }
}

/// A residue viewed as a building of type `S \ J`.
#[derive(Debug, Clone)]
pub struct Residue {
    pub simplex: Vec<u32>,
    pub types: TypeSet,
    pub chambers: Vec<u32>,
}

/// Projections and residues computed from gallery distances.
pub struct ResidueOracle<'a> {
    pub graph: &'a ChamberGraph,
    pub index: &'a SimplicialIndex,
    table: Option<Vec<u16>>,
}

impl<'a> ResidueOracle<'a> {
    /// With `all_pairs` the full distance table is stored (`|C|^2` entries).
    pub fn new(graph: &'a ChamberGraph, index: &'a SimplicialIndex, all_pairs: bool) -> ResidueOracle<'a> {
        let table = all_pairs.then(|| {
            let n = graph.len();
            let rows: Vec<Vec<u16>> = (0..n as u32).into_par_iter().map(|c| graph.distances_from(c)).collect();
            let mut t = Vec::with_capacity(n * n);
            for r in rows {
                t.extend(r);
            }
            t
        });
        ResidueOracle { graph, index, table }
    }

    /// Distance id `delta(a, b)`.
    pub fn delta_id(&self, a: u32, b: u32) -> u16 {
        match &self.table {
            Some(t) => t[a as usize * self.graph.len() + b as usize],
            None => self.graph.distances_from(a)[b as usize],
        }
    }

    pub fn residue(&self, face: &[u32]) -> Residue {
        let rank = self.graph.model.rank();
        let j = TypeSet::from_nodes(face.iter().map(|&v| self.index.vertices[v as usize].ty));
        Residue { simplex: face.to_vec(), types: j.complement(rank), chambers: self.index.residue(face) }
    }

    /// The chamber of `res` closest to chamber `b`.
    pub fn project_chamber(&self, res: &Residue, b: u32) -> u32 {
        *res.chambers
            .iter()
            .min_by_key(|&&a| self.graph.weyl.len_of(self.delta_id(a, b)))
            .expect("residues are nonempty")
    }

    /// `proj_sigma(beta)`: the common face of the projections of the chambers
    /// of `Res(beta)`, as sorted vertex ids.
    pub fn project(&self, res: &Residue, beta: &[u32]) -> Vec<u32> {
        let mut common: Option<Vec<u32>> = None;
        for b in self.index.residue(beta) {
            let p = self.project_chamber(res, b);
            let vs = self.index.chamber_vertices[p as usize].clone();
            common = Some(match common {
                None => vs,
                Some(c) => c.into_iter().filter(|v| vs.contains(v)).collect(),
            });
        }
        let mut out = common.unwrap_or_default();
        out.sort_by_key(|&v| self.index.vertices[v as usize].ty);
        out
    }

    fn face_types(&self, face: &[u32]) -> TypeSet {
        TypeSet::from_nodes(face.iter().map(|&v| self.index.vertices[v as usize].ty))
    }

    /// Oracle opposition of simplices: the types are exchanged by the
    /// opposition involution and some chambers through them are opposite.
    pub fn opposite(&self, a: &[u32], b: &[u32]) -> bool {
        let op = self.graph.model.coxeter().opposition_involution();
        if op.apply_set(self.face_types(a)) != self.face_types(b) {
            return false;
        }
        let ra = self.index.residue(a);
        let rb = self.index.residue(b);
        ra.iter().any(|&x| rb.iter().any(|&y| self.delta_id(x, y) == self.graph.weyl.w0))
    }

    /// Oracle opposition inside a residue of type `K`: chambers of the residue
    /// through `a` and `b` at distance `w_K`.
    pub fn opposite_in_residue(&self, res: &Residue, a: &[u32], b: &[u32], wk: u16) -> bool {
        let cox = self.graph.model.coxeter();
        let w = &self.graph.weyl.elems[wk as usize];
        let local = |f: &[u32]| self.face_types(f).intersection(res.types);
        let swapped = TypeSet::from_nodes(local(a).nodes().map(|t| {
            let r = cox.negate(cox.apply(w, cox.simple_root(t)));
            (0..cox.rank()).find(|&i| cox.simple_root(i) == r).expect("w_K permutes the simple roots of K up to sign")
        }));
        if swapped != local(b) {
            return false;
        }
        let ra: Vec<u32> = self.index.residue(a).into_iter().filter(|c| res.chambers.contains(c)).collect();
        let rb: Vec<u32> = self.index.residue(b).into_iter().filter(|c| res.chambers.contains(c)).collect();
        ra.iter().any(|&x| rb.iter().any(|&y| self.delta_id(x, y) == wk))
    }
}
