//! Automorphisms of the classical models and the explicit matrix families.
//!
//! A collineation acts on subspaces by `U -> gU`. A duality of `A_n(2)` acts by
//! `U -> (gU)^perp` for the standard dot product. On `D_n(2)` a matrix with
//! Dickson invariant 1 exchanges the two classes of maximal singular spaces
//! and is therefore recorded as a duality.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::TypePermutation;
use crate::geometry::{BuildingModel, Chamber, GeometryError, ModelKind, Simplex, Vertex};
use crate::gf2::{dickson_invariant, fixed_space, parity, BitMat, Gf2Error, Subspace};

/// Iteration cap for [`Automorphism::order`].
pub const ORDER_CAP: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("matrix is {rows}x{cols}, expected {dim}x{dim}")]
    Shape { rows: usize, cols: usize, dim: usize },
    #[error("matrix is not invertible")]
    Singular,
    #[error("matrix does not preserve the form of {0}")]
    FormViolation(String),
    #[error("dualities given by a matrix and a perp are only defined on projective spaces")]
    DualityNotSupported,
    #[error("duality flag {given} contradicts the Dickson invariant of the matrix")]
    DicksonMismatch { given: bool },
    #[error("automorphisms live on different models")]
    ModelMismatch,
    #[error("order exceeds {0}")]
    OrderCap(u64),
    #[error("family parameters out of range: {0}")]
    FamilyRange(String),
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// A type-preserving or type-permuting automorphism of a classical model.
#[derive(Debug, Clone)]
pub struct Automorphism {
    model: BuildingModel,
    matrix: BitMat,
    duality: bool,
    pi: TypePermutation,
    name: Option<String>,
}

impl PartialEq for Automorphism {
    fn eq(&self, other: &Self) -> bool {
        self.model.kind() == other.model.kind()
            && self.model.rank() == other.model.rank()
            && self.matrix == other.matrix
            && self.duality == other.duality
    }
}

impl Eq for Automorphism {}

/// JSON form of an automorphism.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AutomorphismJson {
    pub model: ModelJson,
    pub matrix_rows_hex: Vec<String>,
    #[serde(default)]
    pub duality: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModelJson {
    pub kind: ModelKind,
    pub rank: usize,
}

impl Automorphism {
    /// Builds an automorphism, validating invertibility and form preservation.
    /// For `D_n(2)` the duality flag must agree with the Dickson invariant.
    pub fn new(model: &BuildingModel, matrix: BitMat, duality: bool) -> Result<Automorphism, MorphismError> {
        let dim = model.space().dim;
        if matrix.nrows() != dim || matrix.cols != dim {
            return Err(MorphismError::Shape { rows: matrix.nrows(), cols: matrix.cols, dim });
        }
        if matrix.rank() != dim {
            return Err(MorphismError::Singular);
        }
        match model.kind() {
            ModelKind::Projective => {}
            ModelKind::Oriflamme => {
                if !model.space().preserves_form(&matrix) {
                    return Err(MorphismError::FormViolation(model.label()));
                }
                if (dickson_invariant(&matrix) == 1) != duality {
                    return Err(MorphismError::DicksonMismatch { given: duality });
                }
            }
            _ => {
                if duality {
                    return Err(MorphismError::DualityNotSupported);
                }
                if !model.space().preserves_form(&matrix) {
                    return Err(MorphismError::FormViolation(model.label()));
                }
            }
        }
        let n = model.rank();
        let pi = match (model.kind(), duality) {
            (_, false) => TypePermutation::identity(n),
            (ModelKind::Projective, true) => TypePermutation::new((0..n).rev().collect()),
            (_, true) => {
                let mut p: Vec<usize> = (0..n).collect();
                p.swap(n - 2, n - 1);
                TypePermutation::new(p)
            }
        };
        Ok(Automorphism { model: model.clone(), matrix, duality, pi, name: None })
    }

    /// A collineation; on `D_n(2)` the duality flag is read off the Dickson invariant.
    pub fn from_matrix(model: &BuildingModel, matrix: BitMat) -> Result<Automorphism, MorphismError> {
        let duality = model.kind() == ModelKind::Oriflamme && dickson_invariant(&matrix) == 1;
        Automorphism::new(model, matrix, duality)
    }

    pub fn identity(model: &BuildingModel) -> Automorphism {
        Automorphism::new(model, BitMat::identity(model.space().dim), false).expect("identity is valid")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Automorphism {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn model(&self) -> &BuildingModel {
        &self.model
    }

    pub fn matrix(&self) -> &BitMat {
        &self.matrix
    }

    pub fn is_duality(&self) -> bool {
        self.duality
    }

    /// The permutation `pi_theta` induced on types (0-based).
    pub fn type_permutation(&self) -> &TypePermutation {
        &self.pi
    }

    /// Whether `pi_theta` equals the opposition involution.
    pub fn is_oppomorphism(&self) -> bool {
        &self.pi == self.model.coxeter().opposition_involution()
    }

    pub fn is_identity(&self) -> bool {
        !self.duality && self.matrix.is_identity()
    }

    pub fn to_json(&self) -> AutomorphismJson {
        AutomorphismJson {
            model: ModelJson { kind: self.model.kind(), rank: self.model.rank() },
            matrix_rows_hex: self.matrix.to_hex_rows(),
            duality: self.duality,
        }
    }

    pub fn from_json(j: &AutomorphismJson) -> Result<Automorphism, MorphismError> {
        let model = BuildingModel::new(j.model.kind, j.model.rank)?;
        let m = BitMat::from_hex_rows(&j.matrix_rows_hex, model.space().dim)?;
        Automorphism::new(&model, m, j.duality)
    }

    // ---- action -------------------------------------------------------

    pub fn apply_subspace_raw(&self, u: &Subspace) -> Subspace {
        let img = u.image(&self.matrix);
        if self.duality && self.model.kind() == ModelKind::Projective {
            img.perp()
        } else {
            img
        }
    }

    pub fn apply_vertex(&self, v: &Vertex) -> Vertex {
        Vertex { ty: self.pi.apply(v.ty), space: self.apply_subspace_raw(&v.space) }
    }

    pub fn apply(&self, s: &Simplex) -> Simplex {
        let vs = s.vertices().iter().map(|v| self.apply_vertex(v)).collect();
        self.model.simplex(vs).expect("automorphisms preserve incidence")
    }

    pub fn apply_chamber(&self, c: &Chamber) -> Chamber {
        if self.duality && self.model.kind() == ModelKind::Projective {
            self.model.dual_image(c, &self.matrix)
        } else {
            self.model.matrix_image(c, &self.matrix, self.duality)
        }
    }

    // ---- group operations ---------------------------------------------

    /// `self` after `other`: the map `x -> self(other(x))`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism, MorphismError> {
        if self.model.kind() != other.model.kind() || self.model.rank() != other.model.rank() {
            return Err(MorphismError::ModelMismatch);
        }
        let n = &self.matrix;
        let m = &other.matrix;
        let projective = self.model.kind() == ModelKind::Projective;
        let (mat, dual) = if projective && other.duality {
            let nt = n.inverse().map_err(|_| MorphismError::Singular)?.transpose();
            (nt.mul(m), !self.duality)
        } else if projective {
            (n.mul(m), self.duality)
        } else {
            (n.mul(m), self.duality != other.duality)
        };
        Automorphism::new(&self.model, mat, dual)
    }

    pub fn inverse(&self) -> Automorphism {
        let inv = self.matrix.inverse().expect("validated at construction");
        let mat = if self.duality && self.model.kind() == ModelKind::Projective {
            // (A U)^perp = V  <=>  U = A^{-1} V^perp = (A^T V)^perp.
            self.matrix.transpose()
        } else {
            inv
        };
        Automorphism::new(&self.model, mat, self.duality).expect("inverse is valid")
    }

    /// `g^{-1} self g`.
    pub fn conjugate(&self, g: &Automorphism) -> Result<Automorphism, MorphismError> {
        g.inverse().compose(&self.compose(g)?)
    }

    /// The order, by iterated composition.
    pub fn order(&self) -> Result<u64, MorphismError> {
        let mut p = self.clone();
        for k in 1..=ORDER_CAP {
            if p.is_identity() {
                return Ok(k);
            }
            p = p.compose(self)?;
        }
        Err(MorphismError::OrderCap(ORDER_CAP))
    }

    // ---- points -------------------------------------------------------

    /// Points of the model as vectors: all nonzero vectors for the projective
    /// and symplectic models, singular ones for the orthogonal models.
    pub fn model_points(model: &BuildingModel) -> Vec<u64> {
        let sp = model.space();
        sp.nonzero_vectors().filter(|&x| !sp.has_quadratic_form() || sp.quad_bits(x) == 0).collect()
    }

    /// Whether the point `x` is absolute: incident with its image for a
    /// duality of a projective space, collinear with its image otherwise.
    pub fn is_absolute(&self, x: u64) -> bool {
        let gx = self.matrix.apply_bits(x);
        if self.model.kind() == ModelKind::Projective {
            if self.duality {
                parity(x & gx) == 0
            } else {
                gx == x
            }
        } else {
            self.model.space().form_bits(x, gx) == 0
        }
    }

    pub fn absolute_points(&self) -> Vec<u64> {
        Automorphism::model_points(&self.model).into_iter().filter(|&x| self.is_absolute(x)).collect()
    }

    /// Kernel of `g + I`.
    pub fn fixed_space(&self) -> Subspace {
        fixed_space(self.model.space(), &self.matrix)
    }

    /// Number of type-`t` vertices fixed by the automorphism.
    pub fn fixed_vertices(&self, t: usize, cap: u128) -> Result<usize, MorphismError> {
        if self.pi.apply(t) != t {
            return Ok(0);
        }
        let vs = self.model.enumerate_vertices(t, cap)?;
        Ok(vs.iter().filter(|v| &self.apply_vertex(v) == *v).count())
    }
}

// ---------------------------------------------------------------------------
// Families.

fn mat(rows: &[&str]) -> BitMat {
    let parsed: Vec<Vec<u8>> = rows.iter().map(|r| r.bytes().map(|b| b - b'0').collect()).collect();
    let refs: Vec<&[u8]> = parsed.iter().map(|r| r.as_slice()).collect();
    BitMat::from_rows(&refs)
}

/// `diag(top, middle, bottom)` with 2x2 outer blocks.
fn frame(middle: &BitMat) -> BitMat {
    let corner = mat(&["10", "11"]);
    BitMat::block_diag(&[corner.clone(), middle.clone(), corner])
}

fn pad(core: &BitMat, j: usize) -> BitMat {
    if j == 0 {
        return core.clone();
    }
    BitMat::block_diag(&[BitMat::identity(j), core.clone(), BitMat::identity(j)])
}

/// The recursive symplectic matrices `g_n` in `Sp_{2n}(2)`.
pub fn sp_matrix(n: usize) -> BitMat {
    match n {
        2 => mat(&["0100", "1000", "1001", "0010"]),
        3 => mat(&["001000", "010000", "100000", "010001", "100010", "000100"]),
        _ => frame(&sp_matrix(n - 2)),
    }
}

/// The recursive matrices `g_n` of size `2n+2` preserving the minus-type form.
pub fn ominus_matrix(n: usize) -> BitMat {
    match n {
        2 => mat(&["010000", "000001", "001000", "000100", "100000", "000010"]),
        3 => mat(&["00100000", "01100000", "10000000", "00010000", "00001000", "00000001", "00000010", "00000110"]),
        _ => frame(&ominus_matrix(n - 2)),
    }
}

/// `A = diag(J, J_1, ..., J_1)` with `J = J_2` for even `n`, `J_3` for odd `n`.
pub fn an_duality_matrix(n: usize) -> BitMat {
    let j1 = mat(&["01", "10"]);
    let j2 = mat(&["001", "101", "110"]);
    let j3 = mat(&["0011", "1001", "1000", "1100"]);
    let (head, used) = if n % 2 == 0 { (j2, 3) } else { (j3, 4) };
    let mut blocks = vec![head];
    blocks.extend(std::iter::repeat(j1).take((n + 1 - used) / 2));
    BitMat::block_diag(&blocks)
}

/// The duality `X -> (AX)^perp` of `A_n(2)`.
pub fn family_an_duality(n: usize) -> Result<Automorphism, MorphismError> {
    if !(2..=8).contains(&n) {
        return Err(MorphismError::FamilyRange(format!("an-duality needs 2 <= n <= 8, got {n}")));
    }
    let model = BuildingModel::projective(n)?;
    Ok(Automorphism::new(&model, an_duality_matrix(n), true)?.with_name(format!("an-duality:{n}")))
}

/// `g_n` (for `j = 0`) or `g_n^(j) = diag(I_j, g_{n-j}, I_j)` on `C_n(2)`, `1 <= j <= n-2`.
pub fn family_sp(n: usize, j: usize) -> Result<Automorphism, MorphismError> {
    if !(2..=8).contains(&n) || (j > 0 && j + 2 > n) {
        return Err(MorphismError::FamilyRange(format!("sp needs 2 <= n and j <= n-2, got n={n}, j={j}")));
    }
    let model = BuildingModel::symplectic(n)?;
    let core = if j == 0 { sp_matrix(n) } else { pad(&sp_matrix(n - j), j) };
    Ok(Automorphism::new(&model, core, false)?.with_name(format!("sp:{n}:{j}")))
}

/// `g_n` or `g_n^(j)` on `B_n(2,4)`.
pub fn family_ominus(n: usize, j: usize) -> Result<Automorphism, MorphismError> {
    if !(2..=7).contains(&n) || (j > 0 && j + 2 > n) {
        return Err(MorphismError::FamilyRange(format!("ominus needs 2 <= n and j <= n-2, got n={n}, j={j}")));
    }
    let model = BuildingModel::minus_polar(n)?;
    let core = if j == 0 { ominus_matrix(n) } else { pad(&ominus_matrix(n - j), j) };
    Ok(Automorphism::new(&model, core, false)?.with_name(format!("ominus:{n}:{j}")))
}

/// `h_n = g_{n-1}` or `h_n^(j) = g_{n-1}^(j)` (`1 <= j <= n-3`) on `D_n(2)`,
/// reusing the minus-type matrices. Collineation or duality follows the
/// Dickson invariant.
pub fn family_oplus(n: usize, j: usize) -> Result<Automorphism, MorphismError> {
    if !(3..=7).contains(&n) || (j > 0 && j + 3 > n) {
        return Err(MorphismError::FamilyRange(format!("oplus needs 3 <= n and j <= n-3, got n={n}, j={j}")));
    }
    let model = BuildingModel::oriflamme(n)?;
    let core = if j == 0 { ominus_matrix(n - 1) } else { pad(&ominus_matrix(n - 1 - j), j) };
    Ok(Automorphism::from_matrix(&model, core)?.with_name(format!("oplus:{n}:{j}")))
}

/// The order-6 collineation `E11+E23+E24+E25+E32+E33+E45+E54+E55+E66` of `C_3(2)`.
pub fn c3_remark_element() -> Automorphism {
    let m = BitMat::from_elementary(6, &[(1, 1), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (4, 5), (5, 4), (5, 5), (6, 6)]);
    let model = BuildingModel::symplectic(3).expect("C_3(2)");
    Automorphism::new(&model, m, false).expect("remark element is symplectic").with_name("c3-remark")
}

/// The antidiagonal permutation matrix, a collineation of any polar model
/// of even dimension that maps the standard chamber to an opposite one.
pub fn antidiagonal(model: &BuildingModel) -> Result<Automorphism, MorphismError> {
    let d = model.space().dim;
    let m = BitMat { rows: (0..d).map(|i| 1u64 << (d - 1 - i)).collect(), cols: d };
    Ok(Automorphism::from_matrix(model, m)?.with_name("antidiagonal"))
}

/// The symplectic polarity of `A_3(2)`: the duality given by the Gram matrix
/// of the alternating form.
pub fn a3_symplectic_polarity() -> Automorphism {
    let model = BuildingModel::projective(3).expect("A_3(2)");
    let gram = crate::gf2::FormedSpace::new(4, crate::gf2::FormKind::Symplectic).expect("dim 4").gram();
    Automorphism::new(&model, gram, true).expect("gram matrix is invertible").with_name("a3-symplectic-polarity")
}

/// Resolves a family name such as `sp:3:0`, `an-duality:2`, `ominus:2:0`,
/// `oplus:5:1`, `c3-remark`, `a3-polarity`, `antidiagonal:C:3`, `identity:C:2`.
pub fn family_by_name(name: &str) -> Result<Automorphism, MorphismError> {
    let parts: Vec<&str> = name.split(':').collect();
    let num = |i: usize| -> Result<usize, MorphismError> {
        parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| MorphismError::UnknownFamily(name.to_string()))
    };
    let model_at = |i: usize| -> Result<BuildingModel, MorphismError> {
        let label = parts[i..].join(":");
        BuildingModel::from_label(&label).ok_or_else(|| MorphismError::UnknownFamily(name.to_string()))
    };
    match parts[0] {
        "an-duality" => family_an_duality(num(1)?),
        "sp" => family_sp(num(1)?, num(2).unwrap_or(0)),
        "ominus" => family_ominus(num(1)?, num(2).unwrap_or(0)),
        "oplus" => family_oplus(num(1)?, num(2).unwrap_or(0)),
        "c3-remark" => Ok(c3_remark_element()),
        "a3-polarity" => Ok(a3_symplectic_polarity()),
        "antidiagonal" if parts.len() >= 3 => antidiagonal(&model_at(1)?),
        "identity" if parts.len() >= 3 => Ok(Automorphism::identity(&model_at(1)?).with_name(name)),
        _ => Err(MorphismError::UnknownFamily(name.to_string())),
    }
}
