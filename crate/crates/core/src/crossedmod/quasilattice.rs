use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::exact::{
    discrete_subgroup_test, integer_kernel, int_vector, is_zero_vector, rational_span_dim,
    FgAbelianGroup, GroupInvariants, IntMatrix, Matrix, Vector,
};

use super::CrossedModError;

/// A finitely generated abelian group `A` with a homomorphism `del: A -> E`
/// into a real vector space, given on generators.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiLattice {
    group: FgAbelianGroup,
    del: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum QuasiLatticeViolation {
    /// The image of `del` spans a proper subspace of `E`.
    NonSpanning { rank: usize, e_dim: usize },
    /// `del` does not vanish on a relation of `A`.
    RelationNotKilled { relation: usize },
    /// Entries from different quadratic fields.
    FieldMismatch,
    ShapeMismatch { del_cols: usize, generators: usize },
}

impl std::fmt::Display for QuasiLatticeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NonSpanning { rank, e_dim } => {
                write!(f, "image does not span E (rank {rank} < {e_dim})")
            }
            Self::RelationNotKilled { relation } => {
                write!(f, "relation {relation} is not killed by del")
            }
            Self::FieldMismatch => write!(f, "entries from incompatible fields"),
            Self::ShapeMismatch { del_cols, generators } => {
                write!(f, "del has {del_cols} columns but A has {generators} generators")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiLatticeReport {
    pub e_dim: usize,
    pub spanning_rank: usize,
    pub spans: bool,
    pub relations_killed: bool,
    pub violations: Vec<QuasiLatticeViolation>,
}

impl QuasiLatticeReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Morita invariants of a quasi-lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoritaInvariants {
    pub kernel: GroupInvariants,
    pub image_discrete: bool,
    pub e_dim: usize,
    /// `dim_Q` of the rational span of the image.
    pub image_rational_dim: usize,
}

/// How the cover of the null subgroup is chosen when passing from a 2-torus
/// `(R^n/Z^n, n)` to its quasi-lattice `Z^n / Z -> R^n / n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cover {
    /// The simply connected cover `n -> N`; `Z = 0`.
    Universal,
    /// `N` itself; `Z = Z^n ∩ n`.
    FullPreimage,
    /// A cover with kernel `(Z^n ∩ n) / Z`; columns generate `Z`.
    Quotient(Vec<Vec<i64>>),
}

impl QuasiLattice {
    pub fn new(group: FgAbelianGroup, del: Matrix) -> Self {
        QuasiLattice { group, del }
    }

    /// `Z^g -> E` without relations.
    pub fn free(del: Matrix) -> Self {
        QuasiLattice { group: FgAbelianGroup::free(del.cols()), del }
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    pub fn del(&self) -> &Matrix {
        &self.del
    }

    pub fn e_dim(&self) -> usize {
        self.del.rows()
    }

    pub fn generators(&self) -> usize {
        self.group.generators()
    }

    pub fn field(&self) -> u64 {
        self.del.field().unwrap_or(0)
    }

    /// Image of an element given in generator coordinates.
    pub fn apply(&self, x: &[BigInt]) -> Vector {
        self.del.mul_vec(&int_vector(x))
    }

    pub fn validate(&self) -> QuasiLatticeReport {
        validate_quasilattice(self)
    }

    pub fn ensure_valid(&self) -> Result<(), CrossedModError> {
        let rep = self.validate();
        if rep.is_valid() {
            Ok(())
        } else {
            Err(CrossedModError::InvalidQuasiLattice(rep.violations))
        }
    }
}

pub fn validate_quasilattice(q: &QuasiLattice) -> QuasiLatticeReport {
    let e_dim = q.e_dim();
    let mut violations = Vec::new();
    if q.del.cols() != q.group.generators() {
        violations.push(QuasiLatticeViolation::ShapeMismatch {
            del_cols: q.del.cols(),
            generators: q.group.generators(),
        });
        return QuasiLatticeReport { e_dim, spanning_rank: 0, spans: false, relations_killed: false, violations };
    }
    if q.del.field().is_err() {
        violations.push(QuasiLatticeViolation::FieldMismatch);
        return QuasiLatticeReport { e_dim, spanning_rank: 0, spans: false, relations_killed: false, violations };
    }
    let spanning_rank = q.del.rank();
    let spans = spanning_rank == e_dim;
    if !spans {
        violations.push(QuasiLatticeViolation::NonSpanning { rank: spanning_rank, e_dim });
    }
    let mut relations_killed = true;
    for (k, rel) in q.group.relations().col_vectors().iter().enumerate() {
        if !is_zero_vector(&q.apply(rel)) {
            relations_killed = false;
            violations.push(QuasiLatticeViolation::RelationNotKilled { relation: k });
        }
    }
    QuasiLatticeReport { e_dim, spanning_rank, spans, relations_killed, violations }
}

pub fn morita_invariants(q: &QuasiLattice) -> Result<MoritaInvariants, CrossedModError> {
    q.ensure_valid()?;
    let kernel = q.group.kernel_invariants(&q.del.flatten_to_int());
    Ok(MoritaInvariants {
        kernel,
        image_discrete: discrete_subgroup_test(&q.del.col_vectors())?,
        e_dim: q.e_dim(),
        image_rational_dim: rational_span_dim(&q.del),
    })
}

/// Whether `del(A)` is discrete in `E`.
pub fn is_rational(q: &QuasiLattice) -> Result<bool, CrossedModError> {
    q.ensure_valid()?;
    Ok(discrete_subgroup_test(&q.del.col_vectors())?)
}

/// Canonical coordinates on `R^n / n`: the reduced row echelon basis of
/// the annihilator of `n`. Row `r` is the `r`-th coordinate functional.
pub fn quotient_coordinates(n_basis: &[Vector], ambient: usize) -> Result<Matrix, CrossedModError> {
    let k = n_basis.len();
    let n_rows = Matrix::from_rows_with_cols(n_basis.to_vec(), ambient);
    n_rows.field()?;
    if n_rows.rank() != k {
        return Err(CrossedModError::Input("basis of n is not linearly independent".into()));
    }
    let ann = n_rows.kernel_basis();
    let ann = Matrix::from_rows_with_cols(ann, ambient);
    Ok(ann.echelon().reduced)
}

/// The quasi-lattice `Z^n / Z -> R^n / n` of the 2-torus `(R^n / Z^n, n)`.
///
/// `A` is the fibred product of the cover with `R^n` modulo its identity
/// component, which is `Z^n` modulo the cover kernel; `del` is the
/// inclusion followed by the quotient map in canonical coordinates.
pub fn two_torus_to_quasilattice(
    n_basis: &[Vector],
    ambient: usize,
    cover: &Cover,
) -> Result<QuasiLattice, CrossedModError> {
    let q = quotient_coordinates(n_basis, ambient)?;
    let relations = cover_lattice(&q, cover)?;
    let ql = QuasiLattice::new(FgAbelianGroup::new(ambient, relations), q);
    ql.ensure_valid()?;
    Ok(ql)
}

/// The lattice `Z` (as columns) for a cover, given the quotient map `q`.
pub fn cover_lattice(q: &Matrix, cover: &Cover) -> Result<IntMatrix, CrossedModError> {
    let n = q.cols();
    match cover {
        Cover::Universal => Ok(IntMatrix::zeros(n, 0)),
        Cover::FullPreimage => Ok(integer_kernel(&q.flatten_to_int())),
        Cover::Quotient(cols) => {
            let cols: Vec<Vec<BigInt>> = cols
                .iter()
                .map(|c| {
                    if c.len() != n {
                        return Err(CrossedModError::Input(format!(
                            "cover generator has length {} but n = {n}",
                            c.len()
                        )));
                    }
                    Ok(c.iter().map(|&x| BigInt::from(x)).collect())
                })
                .collect::<Result<_, _>>()?;
            for (i, c) in cols.iter().enumerate() {
                if !is_zero_vector(&q.mul_vec(&int_vector(c))) {
                    return Err(CrossedModError::Input(format!(
                        "cover generator {i} is not in the kernel of the induced action"
                    )));
                }
            }
            Ok(IntMatrix::from_cols(&cols, n))
        }
    }
}
