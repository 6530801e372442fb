//! Finite Weyl groups of spherical type.
//!
//! A [`CoxeterSystem`] holds the crystallographic root system of a type
//! `A_n`, `B_n`/`C_n`, `D_n`, `E_6..8` or `F_4` in the Bourbaki labelling, with
//! roots written as integer vectors in the basis of simple roots. Elements of
//! the Weyl group are stored as permutations of the root set, so lengths,
//! inversion sets and equality are cheap.
//!
//! Positive roots are indexed by increasing height; roots of equal height are
//! ordered with the larger coefficient vector first. With this order the
//! 44th, 45th and 46th positive roots of `E_7` are `(1112111)`, `(0112211)`
//! and `(1122210)`.
//!
//! Node indices are 0-based in the API. [`TypeSet`] prints them 1-based.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by the Coxeter layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("no spherical Weyl group of type {family}{rank}")]
    UnknownType { family: char, rank: usize },
    #[error("operands belong to different Coxeter systems")]
    Mismatch,
    #[error("the circled set must be nonempty")]
    EmptyCircledSet,
    #[error("group has {size} elements, above the enumeration cap {cap}")]
    TooLarge { size: u128, cap: u128 },
}

/// Cartan-Killing family letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
        }
    }

    pub fn from_letter(c: char) -> Option<Family> {
        Some(match c.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            _ => return None,
        })
    }
}

/// A subset of the node set, as a bitmask (bit `i` is node `i`, printed as `i+1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct TypeSet(pub u32);

impl TypeSet {
    pub const EMPTY: TypeSet = TypeSet(0);

    pub fn full(rank: usize) -> TypeSet {
        TypeSet(((1u64 << rank) - 1) as u32)
    }

    /// Builds a set from 1-based node labels.
    pub fn from_labels(labels: &[usize]) -> TypeSet {
        TypeSet(labels.iter().fold(0, |m, &l| m | (1 << (l - 1))))
    }

    pub fn from_nodes(nodes: impl IntoIterator<Item = usize>) -> TypeSet {
        TypeSet(nodes.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: TypeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 & other.0)
    }

    pub fn difference(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 & !other.0)
    }

    /// Complement inside a rank-`rank` node set.
    pub fn complement(self, rank: usize) -> TypeSet {
        TypeSet::full(rank).difference(self)
    }

    pub fn nodes(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..32).filter(move |i| m >> i & 1 == 1)
    }

    /// 1-based labels, ascending.
    pub fn labels(self) -> Vec<usize> {
        self.nodes().map(|i| i + 1).collect()
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = TypeSet> {
        let m = self.0;
        let mut cur = Some(m);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == 0 { None } else { Some((c - 1) & m) };
            Some(TypeSet(c))
        })
    }
}

impl fmt::Display for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, l) in self.labels().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// A permutation of the node set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypePermutation(pub Vec<usize>);

impl TypePermutation {
    /// Wraps a permutation of `0..n` given by its images.
    pub fn new(images: Vec<usize>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!(i < images.len() && !seen[i], "not a permutation");
            seen[i] = true;
        }
        TypePermutation(images)
    }

    pub fn identity(rank: usize) -> Self {
        TypePermutation((0..rank).collect())
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn apply_set(&self, s: TypeSet) -> TypeSet {
        TypeSet::from_nodes(s.nodes().map(|i| self.0[i]))
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &TypePermutation) -> TypePermutation {
        TypePermutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// 1-based image list, as printed in reports.
    pub fn labels(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// Orbits of the permutation as node sets.
    pub fn orbits(&self) -> Vec<TypeSet> {
        let mut seen = TypeSet::EMPTY;
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            if seen.contains(i) {
                continue;
            }
            let mut orbit = TypeSet::EMPTY;
            let mut j = i;
            while !orbit.contains(j) {
                orbit.insert(j);
                j = self.0[j];
            }
            seen = seen.union(orbit);
            out.push(orbit);
        }
        out
    }

    /// Largest subset of `s` stable under the permutation.
    pub fn stable_core(&self, s: TypeSet) -> TypeSet {
        self.orbits()
            .into_iter()
            .filter(|o| o.is_subset(s))
            .fold(TypeSet::EMPTY, TypeSet::union)
    }

    pub fn is_stable(&self, s: TypeSet) -> bool {
        self.apply_set(s) == s
    }
}

/// A Weyl group element, stored as the images of the positive roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    tag: u16,
    img: Box<[u16]>,
}

impl WeylElement {
    /// Number of positive roots sent to negative roots.
    pub fn length(&self) -> usize {
        let n = self.img.len() as u16;
        self.img.iter().filter(|&&x| x >= n).count()
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Image of the positive root with index `i` (result in `0..2N`).
    pub fn image(&self, i: usize) -> usize {
        self.img[i] as usize
    }
}

/// A crystallographic root system together with its Weyl group.
#[derive(Debug, Clone)]
pub struct CoxeterSystem {
    family: Family,
    rank: usize,
    tag: u16,
    cartan: Vec<Vec<i32>>,
    coxeter_matrix: Vec<Vec<u8>>,
    lengths: Vec<i32>,
    roots: Vec<Vec<i32>>,
    index: HashMap<Vec<i32>, usize>,
    simple_perm: Vec<Vec<u16>>,
    simple_index: Vec<usize>,
    w0: WeylElement,
    op: TypePermutation,
}

impl CoxeterSystem {
    /// Builds the root system of the given type.
    pub fn new(family: Family, rank: usize) -> Result<CoxeterSystem, CoxeterError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
        };
        if !ok || rank > 16 {
            return Err(CoxeterError::UnknownType { family: family.letter(), rank });
        }
        let (cartan, lengths) = cartan_matrix(family, rank);
        let coxeter_matrix = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| {
                        if i == j {
                            1
                        } else {
                            match cartan[i][j] * cartan[j][i] {
                                0 => 2,
                                1 => 3,
                                2 => 4,
                                _ => 6,
                            }
                        }
                    })
                    .collect()
            })
            .collect();

        let mut positive: HashSet<Vec<i32>> = HashSet::new();
        let mut frontier: Vec<Vec<i32>> = (0..rank).map(|i| unit(rank, i)).collect();
        positive.extend(frontier.iter().cloned());
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for r in &frontier {
                for i in 0..rank {
                    let s = reflect_simple(&cartan, r, i);
                    if s.iter().all(|&x| x >= 0) && s.iter().any(|&x| x > 0) && positive.insert(s.clone()) {
                        next.push(s);
                    }
                }
            }
            frontier = next;
        }
        let mut pos: Vec<Vec<i32>> = positive.into_iter().collect();
        pos.sort_by(|a, b| {
            let (ha, hb): (i32, i32) = (a.iter().sum(), b.iter().sum());
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let n = pos.len();
        let mut roots = pos.clone();
        roots.extend(pos.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
        let index: HashMap<Vec<i32>, usize> = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let simple_perm: Vec<Vec<u16>> = (0..rank)
            .map(|i| roots.iter().map(|r| index[&reflect_simple(&cartan, r, i)] as u16).collect())
            .collect();
        let simple_index = (0..rank).map(|i| index[&unit(rank, i)]).collect();
        let tag = tag_of(family, rank);
        let identity = WeylElement { tag, img: (0..n as u16).collect() };
        let mut sys = CoxeterSystem {
            family,
            rank,
            tag,
            cartan,
            coxeter_matrix,
            lengths,
            roots,
            index,
            simple_perm,
            simple_index,
            w0: identity,
            op: TypePermutation::identity(rank),
        };
        sys.w0 = sys.longest_parabolic(TypeSet::full(rank));
        let op = (0..rank)
            .map(|i| {
                let img = sys.apply(&sys.w0, sys.simple_index[i]);
                let pos = sys.negate(img);
                (0..rank).find(|&j| sys.simple_index[j] == pos).expect("w0 maps simple roots to negative simple roots")
            })
            .collect();
        sys.op = TypePermutation(op);
        Ok(sys)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Type label such as `"E8"`.
    pub fn label(&self) -> String {
        format!("{}{}", self.family.letter(), self.rank)
    }

    pub fn cartan(&self) -> &[Vec<i32>] {
        &self.cartan
    }

    pub fn coxeter_matrix(&self) -> &[Vec<u8>] {
        &self.coxeter_matrix
    }

    /// Number of positive roots.
    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    /// Coefficient vector of the root with index `i` (`0..2N`).
    pub fn root(&self, i: usize) -> &[i32] {
        &self.roots[i]
    }

    pub fn root_index(&self, coeffs: &[i32]) -> Option<usize> {
        self.index.get(coeffs).copied()
    }

    /// Index of a positive root given as a digit string such as `"1220"`.
    pub fn root_from_digits(&self, digits: &str) -> Option<usize> {
        let v: Option<Vec<i32>> = digits.chars().map(|c| c.to_digit(10).map(|d| d as i32)).collect();
        self.root_index(&v?)
    }

    pub fn root_digits(&self, i: usize) -> String {
        let r = &self.roots[i];
        if r.iter().any(|&x| x < 0) {
            format!("-{}", r.iter().map(|x| (-x).to_string()).collect::<String>())
        } else {
            r.iter().map(|x| x.to_string()).collect()
        }
    }

    pub fn height(&self, i: usize) -> i32 {
        self.roots[i].iter().sum()
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.num_positive()
    }

    pub fn negate(&self, i: usize) -> usize {
        let n = self.num_positive();
        if i < n {
            i + n
        } else {
            i - n
        }
    }

    /// Index of the simple root `alpha_i`.
    pub fn simple_root(&self, i: usize) -> usize {
        self.simple_index[i]
    }

    /// Index of the highest root.
    pub fn highest_root(&self) -> usize {
        self.num_positive() - 1
    }

    /// Whether the root with index `i` is long (all roots count as long in
    /// simply-laced types).
    pub fn is_long(&self, i: usize) -> bool {
        let max = *self.lengths.iter().max().unwrap();
        self.norm2(i) == 2 * max
    }

    /// Twice the squared length of a root, in units where short simple roots
    /// have squared length 1.
    fn norm2(&self, i: usize) -> i32 {
        self.pairing2(i, i)
    }

    /// Twice the symmetric bilinear form on roots.
    fn pairing2(&self, a: usize, b: usize) -> i32 {
        let (ra, rb) = (&self.roots[a], &self.roots[b]);
        let mut s = 0;
        for i in 0..self.rank {
            if ra[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                s += ra[i] * rb[j] * self.cartan[i][j] * self.lengths[i];
            }
        }
        s
    }

    /// The integer `<a, b^vee>`.
    pub fn cartan_integer(&self, a: usize, b: usize) -> i32 {
        2 * self.pairing2(a, b) / self.norm2(b)
    }

    /// Index of the sum of two roots, if it is a root.
    pub fn add_roots(&self, a: usize, b: usize) -> Option<usize> {
        let v: Vec<i32> = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x + y).collect();
        self.root_index(&v)
    }

    /// Index of `i*a + j*b`, if it is a root.
    pub fn combine_roots(&self, i: i32, a: usize, j: i32, b: usize) -> Option<usize> {
        let v: Vec<i32> = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| i * x + j * y).collect();
        self.root_index(&v)
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement { tag: self.tag, img: (0..self.num_positive() as u16).collect() }
    }

    pub fn simple_reflection(&self, i: usize) -> WeylElement {
        let n = self.num_positive();
        WeylElement { tag: self.tag, img: self.simple_perm[i][..n].into() }
    }

    /// The reflection in the root with index `r`.
    pub fn reflection(&self, r: usize) -> WeylElement {
        let n = self.num_positive();
        let img = (0..n)
            .map(|g| {
                let c = self.cartan_integer(g, r);
                let v: Vec<i32> = self.roots[g].iter().zip(&self.roots[r]).map(|(x, y)| x - c * y).collect();
                self.index[&v] as u16
            })
            .collect();
        WeylElement { tag: self.tag, img }
    }

    /// Image of the root with index `i` (`0..2N`) under `w`.
    pub fn apply(&self, w: &WeylElement, i: usize) -> usize {
        let n = self.num_positive();
        if i < n {
            w.img[i] as usize
        } else {
            self.negate(w.img[i - n] as usize)
        }
    }

    fn check(&self, w: &WeylElement) -> Result<(), CoxeterError> {
        if w.tag == self.tag && w.img.len() == self.num_positive() {
            Ok(())
        } else {
            Err(CoxeterError::Mismatch)
        }
    }

    /// The product `a * b` (apply `b` first).
    pub fn multiply(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        self.try_multiply(a, b).expect("operands from this system")
    }

    pub fn try_multiply(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement, CoxeterError> {
        self.check(a)?;
        self.check(b)?;
        let img = b.img.iter().map(|&x| self.apply(a, x as usize) as u16).collect();
        Ok(WeylElement { tag: self.tag, img })
    }

    /// `w * s_i`.
    pub fn mul_simple_right(&self, w: &WeylElement, i: usize) -> WeylElement {
        let n = self.num_positive();
        let img = self.simple_perm[i][..n].iter().map(|&x| self.apply(w, x as usize) as u16).collect();
        WeylElement { tag: self.tag, img }
    }

    /// `s_i * w`.
    pub fn mul_simple_left(&self, i: usize, w: &WeylElement) -> WeylElement {
        let img = w.img.iter().map(|&x| self.simple_perm[i][x as usize]).collect();
        WeylElement { tag: self.tag, img }
    }

    pub fn inverse(&self, w: &WeylElement) -> WeylElement {
        let n = self.num_positive();
        let mut img = vec![0u16; n];
        for (i, &x) in w.img.iter().enumerate() {
            let x = x as usize;
            if x < n {
                img[x] = i as u16;
            } else {
                img[x - n] = self.negate(i) as u16;
            }
        }
        WeylElement { tag: self.tag, img: img.into() }
    }

    pub fn length(&self, w: &WeylElement) -> usize {
        w.length()
    }

    pub fn w0(&self) -> &WeylElement {
        &self.w0
    }

    /// Whether `l(w s_i) < l(w)`.
    pub fn is_right_descent(&self, w: &WeylElement, i: usize) -> bool {
        !self.is_positive(self.apply(w, self.simple_index[i]))
    }

    /// Whether `l(s_i w) < l(w)`.
    pub fn is_left_descent(&self, w: &WeylElement, i: usize) -> bool {
        let target = self.simple_index[i];
        let neg = self.negate(target);
        w.img.iter().any(|&x| x as usize == neg)
    }

    pub fn right_descents(&self, w: &WeylElement) -> TypeSet {
        TypeSet::from_nodes((0..self.rank).filter(|&i| self.is_right_descent(w, i)))
    }

    /// A reduced word `[i_1, .., i_k]` with `w = s_{i_1} ... s_{i_k}`.
    pub fn reduced_word(&self, w: &WeylElement) -> Vec<usize> {
        let mut word = Vec::with_capacity(w.length());
        let mut cur = w.clone();
        while let Some(i) = (0..self.rank).find(|&i| self.is_right_descent(&cur, i)) {
            word.push(i);
            cur = self.mul_simple_right(&cur, i);
        }
        word.reverse();
        word
    }

    /// The product of simple reflections `s_{i_1} ... s_{i_k}`.
    pub fn from_word(&self, word: &[usize]) -> WeylElement {
        word.iter().fold(self.identity(), |w, &i| self.mul_simple_right(&w, i))
    }

    /// Positive roots `a` with `w(a) < 0`, as root indices.
    pub fn inversion_set(&self, w: &WeylElement) -> Vec<usize> {
        let n = self.num_positive();
        (0..n).filter(|&i| w.img[i] as usize >= n).collect()
    }

    /// Positive roots `a` with `w^{-1}(a) < 0`; these index the unipotent
    /// coordinates of the cell `BwB/B`.
    pub fn left_inversion_set(&self, w: &WeylElement) -> Vec<usize> {
        let n = self.num_positive();
        let mut out: Vec<usize> = w.img.iter().filter(|&&x| x as usize >= n).map(|&x| x as usize - n).collect();
        out.sort_unstable();
        out
    }

    /// Set of generators occurring in a reduced word of `w`.
    pub fn support(&self, w: &WeylElement) -> TypeSet {
        let mut s = TypeSet::EMPTY;
        for i in self.inversion_set(w) {
            for (k, &c) in self.roots[i].iter().enumerate() {
                if c != 0 {
                    s.insert(k);
                }
            }
        }
        s
    }

    /// Whether `w` lies in the standard parabolic subgroup `W_K`.
    pub fn in_parabolic(&self, w: &WeylElement, k: TypeSet) -> bool {
        self.support(w).is_subset(k)
    }

    /// The longest element `w_K` of the standard parabolic subgroup `W_K`.
    pub fn longest_parabolic(&self, k: TypeSet) -> WeylElement {
        let mut w = self.identity();
        while let Some(i) = k.nodes().find(|&i| !self.is_right_descent(&w, i)) {
            w = self.mul_simple_right(&w, i);
        }
        w
    }

    /// `l(w_K)`, the diameter of the residue of cotype `K`.
    pub fn parabolic_diameter(&self, k: TypeSet) -> usize {
        self.longest_parabolic(k).length()
    }

    /// The opposition involution `s -> w0^{-1} s w0` on nodes.
    pub fn opposition_involution(&self) -> &TypePermutation {
        &self.op
    }

    /// Whether a node permutation preserves the Coxeter matrix.
    pub fn is_diagram_automorphism(&self, p: &TypePermutation) -> bool {
        p.0.len() == self.rank
            && (0..self.rank).all(|i| (0..self.rank).all(|j| self.coxeter_matrix[p.0[i]][p.0[j]] == self.coxeter_matrix[i][j]))
    }

    /// `diam(W) - diam(W_{S\J})`, minus one when uncapped.
    pub fn displacement_from_diagram(&self, j: TypeSet, capped: bool) -> Result<usize, CoxeterError> {
        if j.is_empty() {
            return Err(CoxeterError::EmptyCircledSet);
        }
        let d = self.w0.length() - self.parabolic_diameter(j.complement(self.rank));
        Ok(if capped { d } else { d - 1 })
    }

    /// Displacements of a list of diagrams given as `(circled set, capped)`.
    pub fn displacement_menu(&self, diagrams: &[(TypeSet, bool)]) -> Result<BTreeSet<usize>, CoxeterError> {
        diagrams.iter().map(|&(j, c)| self.displacement_from_diagram(j, c)).collect()
    }

    /// The opposition diagrams occurring for automorphisms of `E_8` buildings,
    /// as `(circled set, capped)`; empty for every other type.
    pub fn e8_diagrams(&self) -> Vec<(TypeSet, bool)> {
        if self.family != Family::E || self.rank != 8 {
            return Vec::new();
        }
        let full = TypeSet::full(8);
        let t = TypeSet::from_labels;
        vec![(t(&[8]), true), (t(&[1, 8]), true), (t(&[1, 6, 7, 8]), true), (full, true), (t(&[1, 6, 7, 8]), false), (full, false)]
    }

    /// Minimal length representatives of the left cosets `w W_K`.
    pub fn min_coset_transversal(&self, k: TypeSet) -> Vec<WeylElement> {
        let e = self.identity();
        let mut seen: HashSet<WeylElement> = HashSet::from([e.clone()]);
        let mut out = vec![e.clone()];
        let mut queue = VecDeque::from([e]);
        while let Some(w) = queue.pop_front() {
            for i in 0..self.rank {
                if self.is_left_descent(&w, i) {
                    continue;
                }
                let sw = self.mul_simple_left(i, &w);
                if k.nodes().any(|j| self.is_right_descent(&sw, j)) {
                    continue;
                }
                if seen.insert(sw.clone()) {
                    out.push(sw.clone());
                    queue.push_back(sw);
                }
            }
        }
        out
    }

    /// `|W|` computed from the orbit of the identity chamber.
    pub fn order(&self) -> u128 {
        let degrees: Vec<u128> = match self.family {
            Family::A => (2..=self.rank as u128 + 1).collect(),
            Family::B | Family::C => (1..=self.rank as u128).map(|i| 2 * i).collect(),
            Family::D => {
                let mut d: Vec<u128> = (1..self.rank as u128).map(|i| 2 * i).collect();
                d.push(self.rank as u128);
                d
            }
            Family::E => match self.rank {
                6 => vec![2, 5, 6, 8, 9, 12],
                7 => vec![2, 6, 8, 10, 12, 14, 18],
                _ => vec![2, 8, 12, 14, 18, 20, 24, 30],
            },
            Family::F => vec![2, 6, 8, 12],
        };
        degrees.iter().product()
    }

    /// Every element of `W`, in breadth-first order of length.
    pub fn elements(&self, cap: u128) -> Result<Vec<WeylElement>, CoxeterError> {
        let size = self.order();
        if size > cap {
            return Err(CoxeterError::TooLarge { size, cap });
        }
        Ok(self.min_coset_transversal(TypeSet::EMPTY))
    }

    /// Formats `w` as a reduced word such as `s1 s2 s1`.
    pub fn word_string(&self, w: &WeylElement) -> String {
        let word = self.reduced_word(w);
        if word.is_empty() {
            return "e".to_string();
        }
        word.iter().map(|i| format!("s{}", i + 1)).collect::<Vec<_>>().join(" ")
    }
}

fn unit(rank: usize, i: usize) -> Vec<i32> {
    let mut v = vec![0; rank];
    v[i] = 1;
    v
}

fn reflect_simple(cartan: &[Vec<i32>], r: &[i32], i: usize) -> Vec<i32> {
    let c: i32 = r.iter().zip(&cartan[i]).map(|(x, a)| x * a).sum();
    let mut s = r.to_vec();
    s[i] -= c;
    s
}

fn tag_of(family: Family, rank: usize) -> u16 {
    let f = match family {
        Family::A => 0,
        Family::B | Family::C => 1,
        Family::D => 2,
        Family::E => 3,
        Family::F => 4,
    };
    (f << 8 | rank) as u16
}

/// Cartan integers `cartan[i][j] = <alpha_j, alpha_i^vee>` and squared root
/// lengths of the simple roots (short = 1, long = 2).
fn cartan_matrix(family: Family, n: usize) -> (Vec<Vec<i32>>, Vec<i32>) {
    let mut a = vec![vec![0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    let mut lengths = vec![2; n];
    match family {
        Family::A => (0..n - 1).for_each(|i| link(i, i + 1)),
        Family::B => {
            (0..n - 1).for_each(|i| link(i, i + 1));
            a[n - 1][n - 2] = -2;
            lengths[n - 1] = 1;
        }
        Family::C => {
            (0..n - 1).for_each(|i| link(i, i + 1));
            a[n - 2][n - 1] = -2;
            lengths.iter_mut().take(n - 1).for_each(|l| *l = 1);
        }
        Family::D => {
            (0..n - 2).for_each(|i| link(i, i + 1));
            link(n - 3, n - 1);
        }
        Family::E => {
            link(0, 2);
            link(2, 3);
            link(1, 3);
            (3..n - 1).for_each(|i| link(i, i + 1));
        }
        Family::F => {
            link(0, 1);
            link(2, 3);
            a[1][2] = -1;
            a[2][1] = -2;
            lengths[2] = 1;
            lengths[3] = 1;
        }
    }
    (a, lengths)
}
