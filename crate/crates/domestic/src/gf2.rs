//! Linear algebra over GF(2) on bit-packed vectors.
//!
//! Vectors have at most 64 coordinates and live in a single `u64`; bit `i`
//! is coordinate `i + 1`. Matrices act on column vectors, so row `i` of a
//! [`BitMat`] computes coordinate `i + 1` of the image.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("dimension {0} exceeds the 64-bit limit")]
    TooLarge(usize),
    #[error("the {0} space carries no quadratic form")]
    NoQuadraticForm(FormKind),
    #[error("matrix is singular")]
    Singular,
    #[error("bad hex row {0:?}")]
    Hex(String),
}

/// Parity of the popcount.
#[inline]
pub fn parity(x: u64) -> u64 {
    (x.count_ones() & 1) as u64
}

/// Reverses the low `d` bits, so that coordinate `i` goes to `d + 1 - i`.
#[inline]
pub fn reverse_bits(x: u64, d: usize) -> u64 {
    if d == 0 {
        0
    } else {
        x.reverse_bits() >> (64 - d)
    }
}

#[inline]
fn low_mask(d: usize) -> u64 {
    if d == 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

/// A vector of GF(2)^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    pub dim: usize,
    pub bits: u64,
}

impl BitVec {
    pub fn new(dim: usize, bits: u64) -> BitVec {
        BitVec { dim, bits: bits & low_mask(dim) }
    }

    pub fn zero(dim: usize) -> BitVec {
        BitVec { dim, bits: 0 }
    }

    /// The standard basis vector with a 1 in coordinate `i` (1-based).
    pub fn unit(dim: usize, i: usize) -> BitVec {
        BitVec { dim, bits: 1 << (i - 1) }
    }

    /// Builds a vector from 0/1 coordinates listed from coordinate 1.
    pub fn from_coords(coords: &[u8]) -> BitVec {
        let bits = coords.iter().enumerate().fold(0u64, |b, (i, &c)| b | (((c & 1) as u64) << i));
        BitVec { dim: coords.len(), bits }
    }

    /// Coordinate `i` (1-based).
    pub fn get(&self, i: usize) -> u8 {
        (self.bits >> (i - 1) & 1) as u8
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn add(&self, other: &BitVec) -> BitVec {
        BitVec { dim: self.dim, bits: self.bits ^ other.bits }
    }

    pub fn dot(&self, other: &BitVec) -> u8 {
        parity(self.bits & other.bits) as u8
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim {
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}

/// Inserts `v` into an echelon basis keyed by lowest set bit; returns whether
/// the rank grew. `basis[p]` holds the row whose pivot is bit `p`, or 0.
#[inline]
pub fn echelon_insert(basis: &mut [u64; 64], mut v: u64) -> bool {
    while v != 0 {
        let p = v.trailing_zeros() as usize;
        if basis[p] == 0 {
            basis[p] = v;
            return true;
        }
        v ^= basis[p];
    }
    false
}

/// Rank of a list of vectors.
pub fn rank_of(rows: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    rows.iter().filter(|&&r| echelon_insert(&mut basis, r)).count()
}

/// Reduced row echelon form: pivots are lowest set bits, every pivot column is
/// zero in the other rows, rows sorted by pivot.
pub fn rref(rows: &[u64]) -> Vec<u64> {
    let mut basis = [0u64; 64];
    for &r in rows {
        echelon_insert(&mut basis, r);
    }
    let mut piv: Vec<usize> = (0..64).filter(|&p| basis[p] != 0).collect();
    piv.sort_unstable();
    for &p in piv.iter().rev() {
        for &q in &piv {
            if q != p && basis[q] >> p & 1 == 1 {
                basis[q] ^= basis[p];
            }
        }
    }
    piv.iter().map(|&p| basis[p]).collect()
}

/// Reduces `v` modulo the span of an RREF basis so the result has zeros in
/// all pivot positions; this is the canonical coset representative.
#[inline]
pub fn reduce_mod(rref_rows: &[u64], mut v: u64) -> u64 {
    for &r in rref_rows {
        let p = r.trailing_zeros();
        if v >> p & 1 == 1 {
            v ^= r;
        }
    }
    v
}

/// Basis of the null space `{x : r . x = 0 for all rows r}` inside GF(2)^d.
pub fn null_space(rows: &[u64], d: usize) -> Vec<u64> {
    let r = rref(rows);
    let pivots: Vec<u32> = r.iter().map(|x| x.trailing_zeros()).collect();
    let mut out = Vec::new();
    for f in 0..d as u32 {
        if pivots.contains(&f) {
            continue;
        }
        let mut x = 1u64 << f;
        for (row, &p) in r.iter().zip(&pivots) {
            if row >> f & 1 == 1 {
                x |= 1 << p;
            }
        }
        out.push(x);
    }
    out
}

/// A square or rectangular matrix over GF(2) acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMat {
    pub rows: Vec<u64>,
    pub cols: usize,
}

impl BitMat {
    pub fn identity(d: usize) -> BitMat {
        BitMat { rows: (0..d).map(|i| 1u64 << i).collect(), cols: d }
    }

    pub fn zero(r: usize, c: usize) -> BitMat {
        BitMat { rows: vec![0; r], cols: c }
    }

    /// Builds a matrix from 0/1 entries given row by row.
    pub fn from_rows(entries: &[&[u8]]) -> BitMat {
        let cols = entries.first().map_or(0, |r| r.len());
        let rows = entries.iter().map(|r| BitVec::from_coords(r).bits).collect();
        BitMat { rows, cols }
    }

    /// Builds a matrix from a sum of elementary matrices `E_ij` (1-based).
    pub fn from_elementary(d: usize, entries: &[(usize, usize)]) -> BitMat {
        let mut m = BitMat::zero(d, d);
        for &(i, j) in entries {
            m.rows[i - 1] ^= 1 << (j - 1);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        (self.rows[i - 1] >> (j - 1) & 1) as u8
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        let bit = 1u64 << (j - 1);
        if v & 1 == 1 {
            self.rows[i - 1] |= bit;
        } else {
            self.rows[i - 1] &= !bit;
        }
    }

    /// Image of a raw column vector.
    #[inline]
    pub fn apply_bits(&self, x: u64) -> u64 {
        let mut y = 0u64;
        for (i, &r) in self.rows.iter().enumerate() {
            y |= parity(r & x) << i;
        }
        y
    }

    pub fn apply(&self, x: &BitVec) -> BitVec {
        BitVec { dim: self.rows.len(), bits: self.apply_bits(x.bits) }
    }

    pub fn transpose(&self) -> BitMat {
        let mut rows = vec![0u64; self.cols];
        for (i, &r) in self.rows.iter().enumerate() {
            for (j, row) in rows.iter_mut().enumerate() {
                *row |= (r >> j & 1) << i;
            }
        }
        BitMat { rows, cols: self.rows.len() }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &BitMat) -> BitMat {
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                let mut bits = r;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    acc ^= other.rows[k];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        BitMat { rows, cols: other.cols }
    }

    pub fn add(&self, other: &BitMat) -> BitMat {
        BitMat { rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a ^ b).collect(), cols: self.cols }
    }

    pub fn rank(&self) -> usize {
        rank_of(&self.rows)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && self.rows.iter().enumerate().all(|(i, &r)| r == 1 << i)
    }

    pub fn inverse(&self) -> Result<BitMat, Gf2Error> {
        let d = self.rows.len();
        if !self.is_square() {
            return Err(Gf2Error::Dimension(d, self.cols));
        }
        let mut a = self.rows.clone();
        let mut inv: Vec<u64> = (0..d).map(|i| 1u64 << i).collect();
        for c in 0..d {
            let p = (c..d).find(|&r| a[r] >> c & 1 == 1).ok_or(Gf2Error::Singular)?;
            a.swap(c, p);
            inv.swap(c, p);
            for r in 0..d {
                if r != c && a[r] >> c & 1 == 1 {
                    a[r] ^= a[c];
                    inv[r] ^= inv[c];
                }
            }
        }
        Ok(BitMat { rows: inv, cols: d })
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u64) -> BitMat {
        let mut base = self.clone();
        let mut acc = BitMat::identity(self.rows.len());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative order, or `None` above `cap`.
    pub fn order(&self, cap: u64) -> Option<u64> {
        let mut m = self.clone();
        for k in 1..=cap {
            if m.is_identity() {
                return Some(k);
            }
            m = m.mul(self);
        }
        None
    }

    /// Block diagonal matrix.
    pub fn block_diag(blocks: &[BitMat]) -> BitMat {
        let d: usize = blocks.iter().map(|b| b.rows.len()).sum();
        let mut m = BitMat::zero(d, d);
        let mut off = 0;
        for b in blocks {
            for (i, &r) in b.rows.iter().enumerate() {
                m.rows[off + i] = r << off;
            }
            off += b.rows.len();
        }
        m
    }

    /// Rows as hex strings, least significant bit = coordinate 1.
    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(|r| format!("{r:x}")).collect()
    }

    pub fn from_hex_rows(rows: &[String], cols: usize) -> Result<BitMat, Gf2Error> {
        let rows = rows
            .iter()
            .map(|s| u64::from_str_radix(s.trim_start_matches("0x"), 16).map_err(|_| Gf2Error::Hex(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        if rows.iter().any(|r| r & !low_mask(cols) != 0) {
            return Err(Gf2Error::Dimension(64 - rows.iter().map(|r| r.leading_zeros() as usize).min().unwrap_or(64), cols));
        }
        Ok(BitMat { rows, cols })
    }
}

impl fmt::Display for BitMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", BitVec { dim: self.cols, bits: r })?;
        }
        Ok(())
    }
}

impl Serialize for BitMat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_hex_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<BitMat, D::Error> {
        let rows = Vec::<String>::deserialize(d)?;
        let n = rows.len();
        BitMat::from_hex_rows(&rows, n).map_err(serde::de::Error::custom)
    }
}

/// The kind of form carried by an ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    /// No form; orthogonality is taken for the dot product.
    Plain,
    Symplectic,
    QuadraticPlus,
    QuadraticMinus,
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormKind::Plain => "plain",
            FormKind::Symplectic => "symplectic",
            FormKind::QuadraticPlus => "quadratic-plus",
            FormKind::QuadraticMinus => "quadratic-minus",
        })
    }
}

/// GF(2)^d with a form. For the non-plain kinds `d` is even and the bilinear
/// form is `(X,Y) = X_1 Y_d + X_2 Y_{d-1} + ... + X_d Y_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormedSpace {
    pub dim: usize,
    pub kind: FormKind,
}

impl FormedSpace {
    pub fn new(dim: usize, kind: FormKind) -> Result<FormedSpace, Gf2Error> {
        if dim > 64 {
            return Err(Gf2Error::TooLarge(dim));
        }
        if kind != FormKind::Plain && dim % 2 == 1 {
            return Err(Gf2Error::Dimension(dim, dim + 1));
        }
        Ok(FormedSpace { dim, kind })
    }

    /// The bilinear form on raw vectors. On a plain space this is the dot product.
    #[inline]
    pub fn form_bits(&self, x: u64, y: u64) -> u64 {
        match self.kind {
            FormKind::Plain => parity(x & y),
            _ => parity(x & reverse_bits(y, self.dim)),
        }
    }

    pub fn form_value(&self, x: &BitVec, y: &BitVec) -> u8 {
        self.form_bits(x.bits, y.bits) as u8
    }

    /// Vector whose dot product with `x` equals `(x, y)`.
    #[inline]
    pub fn dual_bits(&self, y: u64) -> u64 {
        match self.kind {
            FormKind::Plain => y,
            _ => reverse_bits(y, self.dim),
        }
    }

    #[inline]
    pub fn quad_bits(&self, x: u64) -> u64 {
        let h = self.dim / 2;
        let plus = parity(x & low_mask(h) & reverse_bits(x, self.dim));
        match self.kind {
            FormKind::QuadraticMinus => {
                let a = x >> (h - 1) & 1;
                let b = x >> h & 1;
                plus ^ a ^ b
            }
            _ => plus,
        }
    }

    /// Value of `F^+` or `F^-`.
    pub fn quad_value(&self, x: &BitVec) -> Result<u8, Gf2Error> {
        match self.kind {
            FormKind::QuadraticPlus | FormKind::QuadraticMinus => Ok(self.quad_bits(x.bits) as u8),
            k => Err(Gf2Error::NoQuadraticForm(k)),
        }
    }

    pub fn has_quadratic_form(&self) -> bool {
        matches!(self.kind, FormKind::QuadraticPlus | FormKind::QuadraticMinus)
    }

    /// Gram matrix of the bilinear form.
    pub fn gram(&self) -> BitMat {
        BitMat { rows: (0..self.dim).map(|i| self.dual_bits(1 << i)).collect(), cols: self.dim }
    }

    /// Whether `g` preserves the bilinear form, and the quadratic form if present.
    pub fn preserves_form(&self, g: &BitMat) -> bool {
        if g.rows.len() != self.dim || g.cols != self.dim {
            return false;
        }
        let imgs: Vec<u64> = (0..self.dim).map(|i| g.apply_bits(1 << i)).collect();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.form_bits(imgs[i], imgs[j]) != self.form_bits(1 << i, 1 << j) {
                    return false;
                }
            }
        }
        if self.has_quadratic_form() {
            return (0..self.dim).all(|i| self.quad_bits(imgs[i]) == self.quad_bits(1 << i));
        }
        true
    }

    pub fn whole(&self) -> Subspace {
        Subspace { space: *self, rows: (0..self.dim).map(|i| 1u64 << i).collect() }
    }

    pub fn zero_subspace(&self) -> Subspace {
        Subspace { space: *self, rows: Vec::new() }
    }

    pub fn span(&self, vectors: &[u64]) -> Subspace {
        Subspace { space: *self, rows: rref(vectors) }
    }

    /// Iterates over all nonzero vectors of the ambient space.
    pub fn nonzero_vectors(&self) -> impl Iterator<Item = u64> {
        1..=low_mask(self.dim)
    }
}

/// Dickson invariant `rank(g + I) mod 2`.
pub fn dickson_invariant(g: &BitMat) -> u8 {
    (g.add(&BitMat::identity(g.rows.len())).rank() % 2) as u8
}

/// A subspace in canonical reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    pub space: FormedSpace,
    rows: Vec<u64>,
}

impl PartialOrd for FormedSpace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FormedSpace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.dim, self.kind as u8).cmp(&(other.dim, other.kind as u8))
    }
}

impl Subspace {
    /// Canonical form of the span of `rows`.
    pub fn canonicalize(space: FormedSpace, rows: &[u64]) -> Subspace {
        space.span(rows)
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Vector space dimension.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Projective dimension (`dim - 1`).
    pub fn projective_dim(&self) -> isize {
        self.rows.len() as isize - 1
    }

    fn same_space(&self, other: &Subspace) -> Result<(), Gf2Error> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Gf2Error::Dimension(self.space.dim, other.space.dim))
        }
    }

    pub fn contains_vector(&self, v: u64) -> bool {
        reduce_mod(&self.rows, v) == 0
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|&r| self.contains_vector(r))
    }

    pub fn span(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.same_space(other)?;
        let mut all = self.rows.clone();
        all.extend_from_slice(&other.rows);
        Ok(self.space.span(&all))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.same_space(other)?;
        // U ∩ V = (U^o + V^o)^o for the dot-product annihilator.
        let d = self.space.dim;
        let mut ann = null_space(&self.rows, d);
        ann.extend(null_space(&other.rows, d));
        Ok(self.space.span(&null_space(&ann, d)))
    }

    /// Orthogonal complement for the ambient form.
    pub fn perp(&self) -> Subspace {
        let duals: Vec<u64> = self.rows.iter().map(|&r| self.space.dual_bits(r)).collect();
        self.space.span(&null_space(&duals, self.space.dim))
    }

    pub fn is_totally_isotropic(&self) -> bool {
        self.rows.iter().all(|&a| self.rows.iter().all(|&b| self.space.form_bits(a, b) == 0))
    }

    /// Whether the quadratic form vanishes on the subspace; for spaces without a
    /// quadratic form this is total isotropy.
    pub fn is_singular(&self) -> bool {
        if !self.space.has_quadratic_form() {
            return self.is_totally_isotropic();
        }
        self.is_totally_isotropic() && self.rows.iter().all(|&r| self.space.quad_bits(r) == 0)
    }

    /// Image under a matrix.
    pub fn image(&self, g: &BitMat) -> Subspace {
        let rows: Vec<u64> = self.rows.iter().map(|&r| g.apply_bits(r)).collect();
        self.space.span(&rows)
    }

    /// All nonzero vectors, lazily.
    pub fn vectors(&self) -> impl Iterator<Item = u64> + '_ {
        let k = self.rows.len();
        (1u64..(1u64 << k)).map(move |mask| {
            let mut v = 0;
            let mut m = mask;
            while m != 0 {
                v ^= self.rows[m.trailing_zeros() as usize];
                m &= m - 1;
            }
            v
        })
    }

    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(|r| format!("{r:x}")).collect()
    }
}

/// The ambient subspace fixed pointwise by `g`, i.e. the kernel of `g + I`.
pub fn fixed_space(space: FormedSpace, g: &BitMat) -> Subspace {
    let m = g.add(&BitMat::identity(space.dim));
    space.span(&null_space(&m.rows, space.dim))
}
