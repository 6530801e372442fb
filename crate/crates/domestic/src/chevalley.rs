//! Chevalley groups over GF(2) by symbolic rewriting.
//!
//! Over GF(2) the torus is trivial, every `x_a = x_a(1)` is an involution and
//! `N` is isomorphic to `W`, so a group element of `B w B` is `u n_w v` with
//! `u` in `U`, `v` in `U_w = prod_{b > 0, w b < 0} X_b`. Elements of `U` are
//! stored as bit masks over the positive roots: bit `i` set means the factor
//! `x_{beta_i}` occurs in the product taken in increasing root index.
//!
//! The only structural input is the commutator of two root elements,
//! `[x_b, x_g] = x_{b+g}^{c11} x_{2b+g}^{c21} x_{b+2g}^{c12}`, where
//! `c11 = p + 1 mod 2` for the largest `p` with `g - p b` a root, and the
//! other two coefficients are 1 exactly when the corresponding sum is a root.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{opposite_face_types, OppositionProfile, Strategy};
use crate::coxeter::{CoxeterError, CoxeterSystem, Family, TypePermutation, TypeSet, WeylElement};

/// Element of the positive unipotent subgroup.
pub type Unipotent = u128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChevalleyError {
    #[error("roots {0} and {1} are proportional")]
    Proportional(usize, usize),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("no graph automorphism for {0}")]
    NoGraphAutomorphism(String),
    #[error("search needs {needed} cases, above the budget {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
}

/// Generators of words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    /// `x_r(1)` for a root index `r` (negative roots are `i + N`).
    X(usize),
    /// `n_s` for a simple node `s`.
    N(usize),
}

/// Bruhat normal form `u n_w v` with `v` in `U_w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruhatForm {
    pub u: Unipotent,
    pub w: WeylElement,
    pub v: Unipotent,
}

/// A root system with its commutator data mod 2.
#[derive(Debug, Clone)]
pub struct ChevalleySystem {
    cox: CoxeterSystem,
    n: usize,
    /// `comm[b][g]`: positive roots of `[x_b, x_g]` with odd coefficient.
    comm: Vec<Vec<Vec<u8>>>,
    /// Positive roots `b` with a nontrivial commutator with `x_g`.
    noncomm: Vec<Unipotent>,
    /// Action of simple reflections on root indices.
    sref: Vec<Vec<u16>>,
}

fn bits(mut x: Unipotent) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let i = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(i)
        }
    })
}

#[inline]
fn above(g: usize) -> Unipotent {
    if g >= 127 {
        0
    } else {
        !((1u128 << (g + 1)) - 1)
    }
}

impl ChevalleySystem {
    pub fn new(family: Family, rank: usize) -> Result<ChevalleySystem, ChevalleyError> {
        let cox = CoxeterSystem::new(family, rank)?;
        let n = cox.num_positive();
        assert!(n <= 128, "positive roots must fit in a u128");
        let mut comm = vec![vec![Vec::new(); n]; n];
        let mut noncomm = vec![0u128; n];
        for b in 0..n {
            for g in 0..n {
                if b == g {
                    continue;
                }
                let terms: Vec<u8> = commutator_terms(&cox, b, g).into_iter().filter(|t| t.1 == 1).map(|t| t.0 as u8).collect();
                if !terms.is_empty() {
                    noncomm[g] |= 1u128 << b;
                }
                comm[b][g] = terms;
            }
        }
        let sref = (0..rank)
            .map(|s| {
                let r = cox.simple_reflection(s);
                (0..2 * n).map(|i| cox.apply(&r, i) as u16).collect()
            })
            .collect();
        Ok(ChevalleySystem { cox, n, comm, noncomm, sref })
    }

    pub fn coxeter(&self) -> &CoxeterSystem {
        &self.cox
    }

    pub fn num_positive(&self) -> usize {
        self.n
    }

    /// Terms `(i a + j b, coefficient mod 2)` of `[x_a, x_b]` for roots of any
    /// sign; only sums that are roots are listed.
    pub fn commutator_coeffs(&self, a: usize, b: usize) -> Result<Vec<(usize, u8)>, ChevalleyError> {
        if a == b || a == self.cox.negate(b) {
            return Err(ChevalleyError::Proportional(a, b));
        }
        Ok(commutator_terms(&self.cox, a, b))
    }

    // ---- the unipotent group ------------------------------------------

    /// `u x_g` for a positive root `g`, collected in root order.
    pub fn mul_gen(&self, u: Unipotent, g: usize) -> Unipotent {
        let gb = 1u128 << g;
        let tail = u & above(g);
        let blockers = tail & self.noncomm[g];
        if blockers == 0 {
            return u ^ gb;
        }
        // x_g commutes with the factors before the first blocker; the rest
        // is rewritten through x_g x_b x_g = x_b [x_b, x_g].
        let first = blockers.trailing_zeros() as usize;
        let moved = tail & !((1u128 << first) - 1);
        let mut r = (u & !moved) ^ gb;
        for b in bits(moved) {
            r = self.mul_gen(r, b);
            for &t in &self.comm[b][g] {
                r = self.mul_gen(r, t as usize);
            }
        }
        r
    }

    /// `x_g u`.
    pub fn lmul_gen(&self, g: usize, u: Unipotent) -> Unipotent {
        if u & ((1u128 << g) - 1) == 0 {
            return u ^ 1u128 << g;
        }
        self.mul(1u128 << g, u)
    }

    /// `a b` in `U`.
    pub fn mul(&self, a: Unipotent, b: Unipotent) -> Unipotent {
        bits(b).fold(a, |r, g| self.mul_gen(r, g))
    }

    pub fn inverse(&self, a: Unipotent) -> Unipotent {
        let fs: Vec<usize> = bits(a).collect();
        fs.iter().rev().fold(0, |r, &g| self.mul_gen(r, g))
    }

    /// Product of root elements in the given order.
    pub fn from_roots(&self, roots: &[usize]) -> Unipotent {
        roots.iter().fold(0, |r, &g| self.mul_gen(r, g))
    }

    pub fn commutes(&self, a: Unipotent, b: Unipotent) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// Order of an element of `U`.
    pub fn order(&self, a: Unipotent) -> u64 {
        let mut p = a;
        let mut k = 1;
        while p != 0 {
            p = self.mul(p, a);
            k += 1;
        }
        k
    }

    /// Root indices of the factors, in order.
    pub fn factors(&self, a: Unipotent) -> Vec<usize> {
        bits(a).collect()
    }

    /// The word `x_{r1} x_{r2} ...` with roots written as digit strings.
    pub fn describe(&self, a: Unipotent) -> String {
        if a == 0 {
            return "1".into();
        }
        bits(a).map(|r| format!("x_({})", self.cox.root_digits(r))).collect::<Vec<_>>().join(" ")
    }

    // ---- Bruhat rewriting ---------------------------------------------

    fn psi_prime(&self, w: &WeylElement) -> Unipotent {
        (0..self.n).filter(|&b| w.image(b) < self.n).fold(0u128, |m, b| m | 1u128 << b)
    }

    /// Splits `v = v' v''` with `v'` over roots kept positive by `w` and `v''`
    /// in `U_w`; returns `(v', v'')` with `v'` as its list of factors.
    fn split(&self, mut v: Unipotent, w: &WeylElement, keep_prime: bool) -> (Vec<usize>, Unipotent) {
        let pp = self.psi_prime(w);
        let mut prime = Vec::new();
        loop {
            let m = v & pp;
            if m == 0 {
                return (prime, v);
            }
            let b = m.trailing_zeros() as usize;
            if keep_prime {
                prime.push(b);
            }
            v = self.lmul_gen(b, v);
        }
    }

    fn conj_simple(&self, s: usize, v: Unipotent) -> Unipotent {
        bits(v).fold(0, |r, b| self.mul_gen(r, self.sref[s][b] as usize))
    }

    fn absorb(&self, u: Unipotent, w: &WeylElement, prime: &[usize]) -> Unipotent {
        prime.iter().fold(u, |r, &b| self.mul_gen(r, w.image(b)))
    }

    /// State `(u, w, v)` times `x_g` for a positive root `g`.
    fn step_x(&self, st: &mut BruhatForm, g: usize, track_u: bool) {
        let v = self.mul_gen(st.v, g);
        let (prime, v2) = self.split(v, &st.w, track_u);
        if track_u {
            st.u = self.absorb(st.u, &st.w, &prime);
        }
        st.v = v2;
    }

    /// State times `n_s`.
    fn step_n(&self, st: &mut BruhatForm, s: usize, track_u: bool) {
        let a = self.cox.simple_root(s);
        let c = st.v >> a & 1 == 1;
        let v1 = if c { self.lmul_gen(a, st.v) } else { st.v };
        let v2 = self.conj_simple(s, v1);
        if c {
            if track_u {
                // n_{ws} x_a = x_{-wa} n_{ws}.
                let r = self.cox.negate(st.w.image(a));
                st.u = self.mul_gen(st.u, r);
            }
            let v3 = self.lmul_gen(a, v2);
            let (prime, v4) = self.split(v3, &st.w, track_u);
            if track_u {
                st.u = self.absorb(st.u, &st.w, &prime);
            }
            st.v = v4;
        } else {
            st.w = self.cox.mul_simple_right(&st.w, s);
            let (prime, v4) = self.split(v2, &st.w, track_u);
            if track_u {
                st.u = self.absorb(st.u, &st.w, &prime);
            }
            st.v = v4;
        }
    }

    fn step(&self, st: &mut BruhatForm, g: Generator, track_u: bool) {
        match g {
            Generator::N(s) => self.step_n(st, s, track_u),
            Generator::X(r) if r < self.n => self.step_x(st, r, track_u),
            Generator::X(r) => {
                // x_{-g} = x_g n_g x_g with n_g along a reduced word of s_g.
                let g = r - self.n;
                self.step_x(st, g, track_u);
                for s in self.cox.reduced_word(&self.cox.reflection(g)) {
                    self.step_n(st, s, track_u);
                }
                self.step_x(st, g, track_u);
            }
        }
    }

    fn start(&self) -> BruhatForm {
        BruhatForm { u: 0, w: self.cox.identity(), v: 0 }
    }

    /// The unique normal form `u n_w v` of a word.
    pub fn normal_form(&self, word: &[Generator]) -> BruhatForm {
        let mut st = self.start();
        for &g in word {
            self.step(&mut st, g, true);
        }
        st
    }

    /// The Bruhat cell of a word.
    pub fn bruhat_cell(&self, word: &[Generator]) -> WeylElement {
        let mut st = self.start();
        for &g in word {
            self.step(&mut st, g, false);
        }
        st.w
    }

    /// Word for a normal form.
    pub fn form_word(&self, f: &BruhatForm) -> Vec<Generator> {
        let mut out: Vec<Generator> = bits(f.u).map(Generator::X).collect();
        out.extend(self.cox.reduced_word(&f.w).into_iter().map(Generator::N));
        out.extend(bits(f.v).map(Generator::X));
        out
    }

    /// Inverse of a word (all generators are involutions).
    pub fn inverse_word(word: &[Generator]) -> Vec<Generator> {
        word.iter().rev().copied().collect()
    }

    /// `delta(gB, hB)`, the cell of `g^{-1} h`.
    pub fn delta_cosets(&self, g: &[Generator], h: &[Generator]) -> WeylElement {
        let mut word = ChevalleySystem::inverse_word(g);
        word.extend_from_slice(h);
        self.bruhat_cell(&word)
    }

    /// Cell of `n_w^{-1} h n_x` for `h` in `U`.
    pub fn conj_cell(&self, w: &WeylElement, h: Unipotent, x: &WeylElement) -> WeylElement {
        let mut st = BruhatForm { u: 0, w: self.cox.inverse(w), v: 0 };
        // n_{w^{-1}} with v = 1 is already normal.
        for g in bits(h) {
            self.step_x(&mut st, g, false);
        }
        for s in self.cox.reduced_word(x) {
            self.step_n(&mut st, s, false);
        }
        st.w
    }

    /// Bit mask of the roots in a list.
    pub fn mask(&self, roots: &[usize]) -> Unipotent {
        roots.iter().fold(0, |m, &r| m | 1u128 << r)
    }
}

fn commutator_terms(cox: &CoxeterSystem, a: usize, b: usize) -> Vec<(usize, u8)> {
    let mut out = Vec::new();
    if let Some(s) = cox.add_roots(a, b) {
        let mut p = 0;
        while cox.combine_roots(1, b, -(p + 1), a).is_some() {
            p += 1;
        }
        out.push((s, ((p + 1) % 2) as u8));
    }
    if let Some(s) = cox.combine_roots(2, a, 1, b) {
        out.push((s, 1));
    }
    if let Some(s) = cox.combine_roots(1, a, 2, b) {
        out.push((s, 1));
    }
    out
}

// ---------------------------------------------------------------------------
// Elements and diagram automorphisms.

/// An automorphism `u` or `u sigma` with `u` in `U` and `sigma` the graph
/// automorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChevalleyElement {
    pub name: String,
    pub family: Family,
    pub rank: usize,
    pub u: Unipotent,
    pub sigma: bool,
}

impl fmt::Display for ChevalleyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The diagram symmetry of a simply-laced type (`E_6`: 1-6, 3-5; `D_n`:
/// `n-1`, `n`; `A_n`: reversal) as a permutation of nodes.
pub fn graph_automorphism(cox: &CoxeterSystem) -> Result<TypePermutation, ChevalleyError> {
    let n = cox.rank();
    let p = match cox.family() {
        Family::E if n == 6 => vec![5, 1, 4, 3, 2, 0],
        Family::A => (0..n).rev().collect(),
        Family::D => {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(n - 2, n - 1);
            p
        }
        _ => return Err(ChevalleyError::NoGraphAutomorphism(cox.label())),
    };
    Ok(TypePermutation::new(p))
}

impl ChevalleySystem {
    /// Root index map of a diagram permutation.
    pub fn root_map(&self, p: &TypePermutation) -> Vec<usize> {
        (0..2 * self.n)
            .map(|r| {
                let c = self.cox.root(r);
                let mut d = vec![0i32; c.len()];
                for (i, &x) in c.iter().enumerate() {
                    d[p.apply(i)] = x;
                }
                self.cox.root_index(&d).expect("diagram automorphisms permute roots")
            })
            .collect()
    }

    /// `sigma(u)` for a root map.
    pub fn apply_root_map(&self, map: &[usize], u: Unipotent) -> Unipotent {
        bits(u).fold(0, |r, b| self.mul_gen(r, map[b]))
    }

    /// `sigma(w)` for a diagram permutation.
    pub fn apply_diagram(&self, p: &TypePermutation, w: &WeylElement) -> WeylElement {
        let word: Vec<usize> = self.cox.reduced_word(w).into_iter().map(|s| p.apply(s)).collect();
        self.cox.from_word(&word)
    }

    fn root(&self, digits: &str) -> usize {
        self.cox.root_from_digits(digits).unwrap_or_else(|| panic!("{digits} is a root of {}", self.cox.label()))
    }

    fn element(&self, name: &str, roots: &[usize], sigma: bool) -> ChevalleyElement {
        ChevalleyElement {
            name: name.to_string(),
            family: self.cox.family(),
            rank: self.cox.rank(),
            u: self.from_roots(roots),
            sigma,
        }
    }

    /// Named elements: `F4.theta1..theta6`, `F4.theta4p`, `F4.theta6p`,
    /// `E6.theta1..theta3`, `E6.theta1p..theta3p`, `E6.sigma`,
    /// `E6.theta2sigma`, `E6.theta3sigma`, `E6.sigma2p`, `E6.sigma3p`, `E7.theta1`,
    /// `E7.theta2`, `E8.theta1`, `E8.theta2`.
    pub fn theta_element(&self, name: &str) -> Result<ChevalleyElement, ChevalleyError> {
        let unknown = || ChevalleyError::UnknownElement(name.to_string());
        let (prefix, item) = name.split_once('.').ok_or_else(unknown)?;
        if prefix != self.cox.label().replace('_', "") && prefix != self.cox.label() {
            return Err(unknown());
        }
        let s = |i: usize| self.cox.simple_root(i - 1);
        let r = |d: &str| self.root(d);
        let idx = |i: usize| i - 1;
        let e = match (self.cox.family(), self.cox.rank(), item) {
            (Family::F, 4, "theta1") => self.element(name, &[r("2342")], false),
            (Family::F, 4, "theta2") => self.element(name, &[r("1232")], false),
            (Family::F, 4, "theta3") => self.element(name, &[r("2342"), r("1232")], false),
            (Family::F, 4, "theta4") => self.element(name, &[s(1), s(2)], false),
            (Family::F, 4, "theta5") => self.element(name, &[s(4), s(3)], false),
            (Family::F, 4, "theta6") => self.element(name, &[s(2), s(3)], false),
            (Family::F, 4, "theta4p") => self.element(name, &[r("1220"), r("1122")], false),
            (Family::F, 4, "theta6p") => self.element(name, &[r("1110"), r("0122")], false),
            (Family::E, 6, "theta1") => self.element(name, &[s(1)], false),
            (Family::E, 6, "theta2") => self.element(name, &[s(1), s(2)], false),
            (Family::E, 6, "theta3") => self.element(name, &[s(1), s(3)], false),
            (Family::E, 6, "theta1p") => self.element(name, &[r("122321")], false),
            (Family::E, 6, "theta2p") => self.element(name, &[r("122321"), r("101111")], false),
            (Family::E, 6, "theta3p") => self.element(name, &[r("111210"), r("011111")], false),
            (Family::E, 6, "sigma") => self.element(name, &[], true),
            (Family::E, 6, "theta2sigma") => self.element(name, &[s(1)], true),
            (Family::E, 6, "theta3sigma") => self.element(name, &[s(1), s(3)], true),
            (Family::E, 6, "sigma2p") => self.element(name, &[r("111221")], true),
            (Family::E, 6, "sigma3p") => self.element(name, &[r("010111"), r("001111")], true),
            (Family::E, 7, "theta1") => self.element(name, &[idx(44), idx(46)], false),
            (Family::E, 7, "theta2") => self.element(name, &[idx(44), idx(45), idx(46)], false),
            (Family::E, 8, "theta1") => self.element(name, &[idx(88), idx(90)], false),
            (Family::E, 8, "theta2") => self.element(name, &[idx(88), idx(89), idx(90)], false),
            _ => return Err(unknown()),
        };
        Ok(e)
    }

    /// Names accepted by [`ChevalleySystem::theta_element`] for this type.
    pub fn catalogue(&self) -> Vec<String> {
        let items: &[&str] = match (self.cox.family(), self.cox.rank()) {
            (Family::F, 4) => &["theta1", "theta2", "theta3", "theta4", "theta5", "theta6", "theta4p", "theta6p"],
            (Family::E, 6) => &[
                "theta1", "theta2", "theta3", "theta1p", "theta2p", "theta3p", "sigma", "theta2sigma", "theta3sigma",
                "sigma2p", "sigma3p",
            ],
            (Family::E, 7) | (Family::E, 8) => &["theta1", "theta2"],
            _ => &[],
        };
        let p = self.cox.label().replace('_', "");
        items.iter().map(|i| format!("{p}.{i}")).collect()
    }

    // ---- automorphisms ------------------------------------------------

    fn sigma(&self) -> Option<(TypePermutation, Vec<usize>)> {
        graph_automorphism(&self.cox).ok().map(|p| {
            let m = self.root_map(&p);
            (p, m)
        })
    }

    /// `theta^2` as `(u, sigma)`.
    pub fn square(&self, t: &ChevalleyElement) -> Unipotent {
        if t.sigma {
            let (_, m) = self.sigma().expect("sigma exists");
            self.mul(t.u, self.apply_root_map(&m, t.u))
        } else {
            self.mul(t.u, t.u)
        }
    }

    /// Order of `theta`.
    pub fn element_order(&self, t: &ChevalleyElement) -> u64 {
        if t.sigma {
            let sq = self.square(t);
            if sq == 0 {
                2
            } else {
                2 * self.order(sq)
            }
        } else if t.u == 0 {
            1
        } else {
            self.order(t.u)
        }
    }

    /// `pi_theta`.
    pub fn type_permutation(&self, t: &ChevalleyElement) -> TypePermutation {
        if t.sigma {
            graph_automorphism(&self.cox).expect("sigma exists")
        } else {
            TypePermutation::identity(self.cox.rank())
        }
    }

    /// Positive roots `a` with `x_a theta != theta x_a`.
    pub fn aset(&self, t: &ChevalleyElement) -> Vec<usize> {
        let sig = if t.sigma { self.sigma() } else { None };
        (0..self.n)
            .filter(|&a| {
                let xa = 1u128 << a;
                match &sig {
                    None => !self.commutes(xa, t.u),
                    // x_a u sigma = u sigma x_a  <=>  x_a u = u x_{sigma(a)}.
                    Some((_, m)) => self.mul(xa, t.u) != self.mul_gen(t.u, m[a]),
                }
            })
            .collect()
    }

    /// `delta(gB, theta g B)` for `g = u n_w`.
    pub fn chamber_displacement(&self, t: &ChevalleyElement, u: Unipotent, w: &WeylElement) -> WeylElement {
        let (su, sw) = if t.sigma {
            let (p, m) = self.sigma().expect("sigma exists");
            (self.apply_root_map(&m, u), self.apply_diagram(&p, w))
        } else {
            (u, w.clone())
        };
        let h = self.mul(self.mul(self.inverse(u), t.u), su);
        self.conj_cell(w, h, &sw)
    }

    /// The set `{u^{-1} theta~ sigma(u) : u in U}` of unipotent parts of the
    /// `U`-conjugates of `theta`, found by closing under simple root
    /// elements.
    pub fn conjugate_orbit(&self, t: &ChevalleyElement, budget: u128) -> Result<Vec<Unipotent>, ChevalleyError> {
        let sig = if t.sigma { self.sigma().map(|(_, m)| m) } else { None };
        let gens: Vec<usize> = (0..self.cox.rank()).map(|i| self.cox.simple_root(i)).collect();
        let mut seen = std::collections::HashSet::new();
        seen.insert(t.u);
        let mut frontier = vec![t.u];
        while let Some(h) = frontier.pop() {
            for &g in &gens {
                let tg = sig.as_ref().map_or(g, |m| m[g]);
                let next = self.mul_gen(self.lmul_gen(g, h), tg);
                if seen.insert(next) {
                    if seen.len() as u128 > budget {
                        return Err(ChevalleyError::Budget { needed: seen.len() as u128, budget });
                    }
                    frontier.push(next);
                }
            }
        }
        let mut out: Vec<Unipotent> = seen.into_iter().collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Cells `delta(u w_0 B, theta u w_0 B)` over the whole `U`-orbit; exact
    /// for every chamber opposite the base chamber.
    pub fn orbit_search(&self, t: &ChevalleyElement, budget: u128) -> Result<AsetResult, ChevalleyError> {
        let orbit = self.conjugate_orbit(t, budget)?;
        let w0 = self.cox.w0().clone();
        let cells: Vec<WeylElement> = orbit.par_iter().map(|&h| self.conj_cell(&w0, h, &w0)).collect();
        Ok(AsetResult::from_cells(&self.cox, &[], orbit.len() as u128, &cells))
    }

    /// Enumerates `u_A theta u_A^{-1}`-type conjugates over all subsets of the
    /// A-set and the chambers `u_A w_0 B`.
    pub fn aset_search(&self, t: &ChevalleyElement, budget: u128) -> Result<AsetResult, ChevalleyError> {
        let a = self.aset(t);
        let cases = 1u128 << a.len();
        if cases > budget {
            return Err(ChevalleyError::Budget { needed: cases, budget });
        }
        let w0 = self.cox.w0().clone();
        let cells: Vec<WeylElement> = (0..cases as u64)
            .into_par_iter()
            .map(|m| {
                let roots: Vec<usize> = a.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &r)| r).collect();
                let u = self.from_roots(&roots);
                self.chamber_displacement(t, u, &w0)
            })
            .collect();
        Ok(AsetResult::from_cells(&self.cox, &a, cases, &cells))
    }

    /// Searches for a type-`J` simplex mapped to an opposite one, over
    /// `g = u n_w` with `w` in the minimal transversal of `W / W_{S \ J}` and
    /// `u` over the roots of `R(w)`, restricted to the A-set when `restrict`
    /// is set.
    pub fn coset_search(&self, t: &ChevalleyElement, j: TypeSet, restrict: bool, budget: u128) -> Result<CosetResult, ChevalleyError> {
        let k = j.complement(self.cox.rank());
        let trans = self.cox.min_coset_transversal(k);
        let amask = if restrict { self.mask(&self.aset(t)) } else { u128::MAX };
        let jobs: Vec<(usize, Vec<usize>)> = trans
            .iter()
            .enumerate()
            .map(|(i, w)| (i, self.cox.left_inversion_set(w).into_iter().filter(|&r| amask >> r & 1 == 1).collect()))
            .collect();
        let candidates: u128 = jobs.iter().map(|(_, r)| 1u128 << r.len()).sum();
        if candidates > budget {
            return Err(ChevalleyError::Budget { needed: candidates, budget });
        }
        let results: Vec<(Option<(usize, u64)>, BTreeSet<TypeSet>, usize)> = jobs
            .par_iter()
            .map(|(i, roots)| {
                let w = &trans[*i];
                let mut hit = None;
                let mut seen = BTreeSet::new();
                let mut maxlen = 0;
                for m in 0..(1u64 << roots.len()) {
                    let rs: Vec<usize> = roots.iter().enumerate().filter(|(b, _)| m >> b & 1 == 1).map(|(_, &r)| r).collect();
                    let u = self.from_roots(&rs);
                    let cell = self.chamber_displacement(t, u, w);
                    maxlen = maxlen.max(cell.length());
                    let types = opposite_face_types(&self.cox, &cell);
                    seen.insert(types);
                    if hit.is_none() && j.is_subset(types) {
                        hit = Some((*i, m));
                    }
                }
                (hit, seen, maxlen)
            })
            .collect();
        let mut witnesses = BTreeSet::new();
        let mut found = None;
        let mut max_length = 0;
        for (h, s, l) in results {
            if found.is_none() {
                found = h;
            }
            witnesses.extend(s);
            max_length = max_length.max(l);
        }
        Ok(CosetResult {
            target: j,
            candidates: candidates as u64,
            found: found.map(|(i, m)| (trans[i].clone(), m)),
            witnesses,
            max_length,
        })
    }

    /// Number of elements `g` scanned by [`ChevalleySystem::coset_search`].
    pub fn coset_candidates(&self, t: &ChevalleyElement, j: TypeSet, restrict: bool) -> u128 {
        let k = j.complement(self.cox.rank());
        let amask = if restrict { self.mask(&self.aset(t)) } else { u128::MAX };
        self.cox
            .min_coset_transversal(k)
            .iter()
            .map(|w| 1u128 << self.cox.left_inversion_set(w).into_iter().filter(|&r| amask >> r & 1 == 1).count())
            .sum()
    }

    /// Number of type-`t` vertices fixed by `theta`: cosets `g P` with
    /// `g = u n_w`, `w` minimal in `w W_{S \ {t}}`, and the cell of
    /// `g^{-1} theta g` inside `W_{S \ {t}}`.
    pub fn fixed_vertex_count(&self, th: &ChevalleyElement, t: usize, budget: u128) -> Result<u64, ChevalleyError> {
        let k = TypeSet::from_nodes([t]).complement(self.cox.rank());
        let trans = self.cox.min_coset_transversal(k);
        let total: u128 = trans.iter().map(|w| 1u128 << w.length()).sum();
        if total > budget {
            return Err(ChevalleyError::Budget { needed: total, budget });
        }
        let count: u64 = trans
            .par_iter()
            .map(|w| {
                let roots = self.cox.left_inversion_set(w);
                let mut c = 0u64;
                for m in 0..(1u64 << roots.len()) {
                    let rs: Vec<usize> = roots.iter().enumerate().filter(|(b, _)| m >> b & 1 == 1).map(|(_, &r)| r).collect();
                    let u = self.from_roots(&rs);
                    if self.cox.in_parabolic(&self.chamber_displacement(th, u, w), k) {
                        c += 1;
                    }
                }
                c
            })
            .sum();
        Ok(count)
    }

    /// Minimal length representatives of `W_K / W_{K'}` for `K'` inside `K`.
    fn parabolic_transversal(&self, k: TypeSet, k2: TypeSet) -> Vec<WeylElement> {
        let mut out = vec![self.cox.identity()];
        let mut seen: std::collections::HashSet<WeylElement> = out.iter().cloned().collect();
        let mut i = 0;
        while i < out.len() {
            let x = out[i].clone();
            for s in k.nodes() {
                let y = self.cox.mul_simple_left(s, &x);
                if y.length() > x.length() && k2.nodes().all(|t| !self.cox.is_right_descent(&y, t)) && seen.insert(y.clone()) {
                    out.push(y);
                }
            }
            i += 1;
        }
        out
    }

    /// Random chambers `u n_w B`, uniform over the building: `w` is weighted
    /// by `2^l(w)` through a chain of parabolic transversals and `u` is
    /// uniform over `U_{R(w)}`.
    pub fn sample_chambers(&self, th: &ChevalleyElement, samples: usize, seed: u64) -> SampleResult {
        let rank = self.cox.rank();
        let mut levels = Vec::new();
        for r in (1..=rank).rev() {
            let k = TypeSet::from_nodes(0..r);
            let k2 = TypeSet::from_nodes(0..r - 1);
            let t = self.parabolic_transversal(k, k2);
            let weights: Vec<f64> = t.iter().map(|w| (w.length() as f64).exp2()).collect();
            let dist = rand::distributions::WeightedIndex::new(&weights).expect("positive weights");
            levels.push((t, dist));
        }
        let chunks = 64usize;
        let per = samples.div_ceil(chunks);
        let parts: Vec<SampleResult> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let mut out = SampleResult::default();
                let todo = per.min(samples.saturating_sub(c * per));
                for _ in 0..todo {
                    let w = levels.iter().fold(self.cox.identity(), |w, (t, d)| self.cox.multiply(&w, &t[rng.sample(d)]));
                    let rs: Vec<usize> = self.cox.left_inversion_set(&w).into_iter().filter(|_| rng.gen::<bool>()).collect();
                    let u = self.from_roots(&rs);
                    let cell = self.chamber_displacement(th, u, &w);
                    out.samples += 1;
                    out.max_length = out.max_length.max(cell.length());
                    out.hit_w0 |= cell.length() == self.n;
                    out.witnesses.insert(opposite_face_types(&self.cox, &cell));
                }
                out
            })
            .collect();
        parts.into_iter().fold(SampleResult::default(), |mut a, b| {
            a.samples += b.samples;
            a.max_length = a.max_length.max(b.max_length);
            a.hit_w0 |= b.hit_w0;
            a.witnesses.extend(b.witnesses);
            a
        })
    }

    /// Opposition profile from a set of witnessed cells. Entries of `T` are
    /// only lower bounds unless complemented by negative coset searches.
    pub fn profile(&self, t: &ChevalleyElement, witnesses: &BTreeSet<TypeSet>, displacement: usize) -> OppositionProfile {
        let pi = self.type_permutation(t);
        let rho = self.cox.opposition_involution().compose(&pi);
        OppositionProfile {
            family: self.cox.family(),
            rank: self.cox.rank(),
            poset: crate::analysis::TypePoset::from_witnesses(self.cox.rank(), &rho, witnesses.iter().copied()),
            pi,
            rho,
            displacement,
            strategy: Strategy::Chevalley,
        }
    }
}

/// Outcome of an A-set search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsetResult {
    pub a_set: Vec<usize>,
    pub cases: u128,
    pub max_cell: WeylElement,
    pub hit_w0: bool,
    pub witnesses: BTreeSet<TypeSet>,
    /// Whether every case gave the same cell.
    pub constant: bool,
}

impl AsetResult {
    fn from_cells(cox: &CoxeterSystem, a: &[usize], cases: u128, cells: &[WeylElement]) -> AsetResult {
        let max_cell = cells.iter().max_by_key(|c| (c.length(), cox.reduced_word(c))).cloned().unwrap_or_else(|| cox.identity());
        AsetResult {
            a_set: a.to_vec(),
            cases,
            hit_w0: cells.iter().any(|c| c == cox.w0()),
            witnesses: cells.iter().map(|c| opposite_face_types(cox, c)).collect(),
            constant: cells.windows(2).all(|p| p[0] == p[1]),
            max_cell,
        }
    }
}

/// Outcome of a coset search for one type set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetResult {
    pub target: TypeSet,
    pub candidates: u64,
    /// A witness `(w, subset mask)` if a type-`J` simplex is mapped opposite.
    pub found: Option<(WeylElement, u64)>,
    pub witnesses: BTreeSet<TypeSet>,
    pub max_length: usize,
}

/// Outcome of random chamber sampling.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SampleResult {
    pub samples: u64,
    pub max_length: usize,
    pub hit_w0: bool,
    pub witnesses: BTreeSet<TypeSet>,
}

/// Search report in JSON form.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SearchReport {
    pub theta: String,
    pub strategy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<u64>,
    pub max_cell_word: Vec<usize>,
    pub max_length: usize,
    pub hit_w0: bool,
    pub elapsed_ms: u128,
}

/// Integer matrices of the natural representation of `Sp_6` restricted to
/// GF(2), in the basis `e1, e2, e3, f3, f2, f1`.
pub mod c3_matrices {
    use crate::coxeter::CoxeterSystem;
    use crate::gf2::BitMat;

    fn e(i: usize, j: usize) -> (usize, usize) {
        (i, j)
    }

    /// Matrix of `x_r(1)` for a root index of `C_3`.
    pub fn root_element(cox: &CoxeterSystem, r: usize) -> BitMat {
        let positive = cox.is_positive(r);
        let p = if positive { r } else { cox.negate(r) };
        let c = cox.root(p);
        // Coefficients on e1, e2, e3.
        let v = [c[0], c[1] - c[0], 2 * c[2] - c[1]];
        let prime = |i: usize| 7 - i;
        let nz: Vec<usize> = (0..3).filter(|&i| v[i] != 0).collect();
        let mut entries = Vec::new();
        match nz.as_slice() {
            [i] => entries.push(e(i + 1, prime(i + 1))),
            [i, j] if v[*i] == 1 && v[*j] == -1 => {
                entries.push(e(i + 1, j + 1));
                entries.push(e(prime(j + 1), prime(i + 1)));
            }
            [i, j] => {
                entries.push(e(i + 1, prime(j + 1)));
                entries.push(e(j + 1, prime(i + 1)));
            }
            _ => unreachable!("roots of C_3 have one or two nonzero coordinates"),
        }
        let n = BitMat::from_elementary(6, &entries);
        let n = if positive { n } else { n.transpose() };
        BitMat::identity(6).add(&n)
    }
}
