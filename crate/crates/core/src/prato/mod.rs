//! Toric quasifolds from labeled stacky polytopes: the Hamiltonian data of
//! the standard construction, hypothesis checks, moment images,
//! classification, reduction and slice-volume scans.

mod analysis;
mod dh;
mod image;
mod report;

pub use analysis::{
    classify, hypotheses_report, reduced_dimension, reduction_exists, regular_value_check,
    ClassReport, DimensionReport, HypothesesReport, Kind, Reduction, ReducedModel, ReductionVerdict,
    RegularValueReport, StabilizerWitness, VertexIndex, VertexRank, FINITE_MODEL_LIMIT,
};
pub use dh::{dh_scan, write_csv_rows, Chamber, DhRow, DhScanReport, InducedQuasiLattice, WallValue};
pub use image::{moment_image, GridCoverage, MomentImageReport, MonteCarloStats, SamplingConfig, VertexAttainment, RNG_ALGORITHM};
pub use report::{analyze, AnalysisReport, SimplicityReport};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::crossedmod::{cover_lattice, CrossedModError, Cover, QuasiLattice, QuasiLatticeReport};
use crate::exact::{
    common_field, dot, integer_kernel, is_zero_vector, lattice_basis, lattice_contains, FieldError,
    IntMatrix, Matrix, Scalar, Vector,
};
use crate::polytope::{HPolytope, PolytopeError};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PratoError {
    #[error("data error: {0}")]
    Data(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("level {level} lies on wall {wall}")]
    Wall { level: String, wall: String },
    #[error("level {0} lies outside the moment image")]
    LevelOutside(String),
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    CrossedMod(#[from] CrossedModError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A quasi-lattice `∂: A -> E`, a polytope `{<a_i, η> ≥ λ_i}` in `E*` and
/// labels `β(e_i) ∈ A` with `∂β(e_i) = a_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StackyPolytope {
    pub quasi_lattice: QuasiLattice,
    pub polytope: HPolytope,
    /// `labels[i]` is `β(e_i)` in the generators of `A`.
    pub labels: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityReport {
    pub quasi_lattice: QuasiLatticeReport,
    pub labels_match_normals: bool,
    /// Facets whose label does not map to the normal.
    pub label_mismatches: Vec<usize>,
    pub field_d: u64,
    pub valid: bool,
}

impl StackyPolytope {
    /// Checks shapes and fields; mathematical validity is reported by
    /// [`StackyPolytope::validate`].
    pub fn new(quasi_lattice: QuasiLattice, polytope: HPolytope, labels: Vec<Vec<BigInt>>) -> Result<Self, PratoError> {
        if polytope.dim() != quasi_lattice.e_dim() {
            return Err(PratoError::Input(format!(
                "polytope lives in dimension {} but E has dimension {}",
                polytope.dim(),
                quasi_lattice.e_dim()
            )));
        }
        if labels.len() != polytope.facet_count() {
            return Err(PratoError::Input(format!(
                "{} labels for {} facets",
                labels.len(),
                polytope.facet_count()
            )));
        }
        let g = quasi_lattice.generators();
        if let Some(i) = labels.iter().position(|l| l.len() != g) {
            return Err(PratoError::Input(format!("label {i} has length {}, A has {g} generators", labels[i].len())));
        }
        let mut all: Vec<Scalar> = quasi_lattice.del().entries().to_vec();
        all.extend(polytope.normals().iter().flatten().cloned());
        all.extend(polytope.offsets().iter().cloned());
        common_field(&all)?;
        Ok(StackyPolytope { quasi_lattice, polytope, labels })
    }

    pub fn facet_count(&self) -> usize {
        self.polytope.facet_count()
    }

    pub fn field(&self) -> u64 {
        let mut all: Vec<Scalar> = self.quasi_lattice.del().entries().to_vec();
        all.extend(self.polytope.normals().iter().flatten().cloned());
        all.extend(self.polytope.offsets().iter().cloned());
        common_field(&all).expect("checked at construction")
    }

    /// `β` as a `generators x n` integer matrix.
    pub fn label_matrix(&self) -> IntMatrix {
        IntMatrix::from_cols(&self.labels, self.quasi_lattice.generators())
    }

    pub fn validate(&self) -> ValidityReport {
        let quasi_lattice = self.quasi_lattice.validate();
        let label_mismatches: Vec<usize> = if quasi_lattice.violations.iter().any(|v| {
            matches!(v, crate::crossedmod::QuasiLatticeViolation::ShapeMismatch { .. })
        }) {
            (0..self.facet_count()).collect()
        } else {
            (0..self.facet_count())
                .filter(|&i| self.quasi_lattice.apply(&self.labels[i]) != self.polytope.normals()[i])
                .collect()
        };
        let labels_match_normals = label_mismatches.is_empty();
        let valid = quasi_lattice.is_valid() && labels_match_normals;
        ValidityReport { quasi_lattice, labels_match_normals, label_mismatches, field_d: self.field(), valid }
    }

    /// `ker β ⊆ Z^n`, as lattice basis columns.
    pub fn label_kernel(&self) -> IntMatrix {
        let n = self.facet_count();
        let b = self.label_matrix().hcat(self.quasi_lattice.group().relations());
        let k = integer_kernel(&b);
        let top = k.select_rows(&(0..n).collect::<Vec<_>>());
        lattice_basis(&top)
    }
}

/// Data of the construction: `π: R^n -> E` with `π(e_i) = a_i`, the null
/// space `n = ker π`, the restriction `ι*: (R^n)* -> n*` and the offsets.
/// The zero fibre is `{z : ι*(s + λ) = 0}` with `s_i = |z_i|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct PratoData {
    pub n: usize,
    pub e_dim: usize,
    pub lambda: Vector,
    pub pi: Matrix,
    /// Basis of `n`.
    pub null_basis: Vec<Vector>,
    /// `k x n`; column `i` is `ι*(e_i*)`.
    pub iota_star: Matrix,
    pub cover: Cover,
    /// Whether the cover was derived from the labels.
    pub cover_from_labels: bool,
    /// `Z^n ∩ n`.
    pub integral_null: IntMatrix,
    /// `ker β`.
    pub label_kernel: IntMatrix,
    /// Kernel `Z` of the cover.
    pub cover_kernel: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DataSummary {
    pub n: usize,
    pub e_dim: usize,
    pub null_dim: usize,
    pub lambda: Vector,
    pub pi: Vec<Vector>,
    pub null_basis: Vec<Vector>,
    pub cover: Cover,
    pub cover_from_labels: bool,
    pub zero_fibre_dim: usize,
    pub zero_fibre_equations: Vec<String>,
}

impl PratoData {
    pub fn null_dim(&self) -> usize {
        self.null_basis.len()
    }

    /// `π*: E* -> (R^n)*`, an isomorphism onto the annihilator of `n`.
    pub fn pi_star(&self) -> Matrix {
        self.pi.transpose()
    }

    /// `ι*(s + λ)`.
    pub fn constraint(&self, s: &[Scalar]) -> Vector {
        let shifted: Vector = s.iter().zip(&self.lambda).map(|(a, b)| a + b).collect();
        self.iota_star.mul_vec(&shifted)
    }

    pub fn on_zero_fibre(&self, s: &[Scalar]) -> bool {
        s.iter().all(|x| !x.is_negative()) && is_zero_vector(&self.constraint(s))
    }

    /// The squared moduli `s_i = <a_i, η> - λ_i` of a zero-fibre point over `η`.
    pub fn fibre_point(&self, eta: &[Scalar]) -> Vector {
        (0..self.n).map(|i| &dot(&self.pi.col(i), eta) - &self.lambda[i]).collect()
    }

    /// The `η` with `π*(η) = s + λ`, if `s + λ` annihilates `n`.
    pub fn eta_of(&self, s: &[Scalar]) -> Option<Vector> {
        let shifted: Vector = s.iter().zip(&self.lambda).map(|(a, b)| a + b).collect();
        self.pi_star().solve(&shifted)
    }

    pub fn zero_fibre_dim(&self) -> usize {
        2 * self.n - self.null_dim()
    }

    /// Whether `L / Z` is finite, i.e. the cover of `N` has finite kernel.
    pub fn cover_finite(&self) -> bool {
        lattice_basis(&self.cover_kernel).cols() == self.integral_null.cols()
    }

    pub fn summary(&self) -> DataSummary {
        let equations = (0..self.null_dim())
            .map(|j| {
                let row = self.iota_star.row(j);
                let terms: Vec<String> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| format!("({c})|z{}|^2", i + 1))
                    .collect();
                let rhs = -dot(&row, &self.lambda);
                format!("{} = {rhs}", terms.join(" + "))
            })
            .collect();
        DataSummary {
            n: self.n,
            e_dim: self.e_dim,
            null_dim: self.null_dim(),
            lambda: self.lambda.clone(),
            pi: self.pi.row_vectors(),
            null_basis: self.null_basis.clone(),
            cover: self.cover.clone(),
            cover_from_labels: self.cover_from_labels,
            zero_fibre_dim: self.zero_fibre_dim(),
            zero_fibre_equations: equations,
        }
    }
}

fn to_i64_cols(m: &IntMatrix) -> Result<Vec<Vec<i64>>, PratoError> {
    m.col_vectors()
        .iter()
        .map(|c| {
            c.iter()
                .map(|x| x.to_i64().ok_or_else(|| PratoError::Data(format!("lattice entry {x} exceeds 64 bits"))))
                .collect()
        })
        .collect()
}

/// Builds the data; with no cover given, the one determined by the labels
/// (kernel `ker β`) is used.
pub fn build_prato_data(s: &StackyPolytope, cover: Option<Cover>) -> Result<PratoData, PratoError> {
    let report = s.validate();
    if !report.quasi_lattice.is_valid() {
        let msg: Vec<String> = report.quasi_lattice.violations.iter().map(ToString::to_string).collect();
        return Err(PratoError::Data(msg.join("; ")));
    }
    if !report.labels_match_normals {
        return Err(PratoError::Data(format!(
            "labels do not map to the facet normals at facets {:?}",
            report.label_mismatches
        )));
    }
    let p = &s.polytope;
    let e_dim = p.dim();
    let n = p.facet_count();
    let pi = Matrix::from_cols(p.normals().to_vec(), e_dim);
    let rank = pi.rank();
    if rank < e_dim {
        return Err(PratoError::Data(format!("image does not span E (rank {rank} < {e_dim})")));
    }
    let null_basis = pi.kernel_basis();
    let iota_star = Matrix::from_rows_with_cols(null_basis.clone(), n);
    let integral_null = integer_kernel(&pi.flatten_to_int());
    let label_kernel = s.label_kernel();
    let (cover, cover_from_labels) = match cover {
        Some(c) => (c, false),
        None if label_kernel.cols() == 0 => (Cover::Universal, true),
        None if lattice_contains(&label_kernel, &integral_null) => (Cover::FullPreimage, true),
        None => (Cover::Quotient(to_i64_cols(&label_kernel)?), true),
    };
    let cover_kernel = cover_lattice(&pi, &cover)?;
    Ok(PratoData {
        n,
        e_dim,
        lambda: p.offsets().to_vec(),
        pi,
        null_basis,
        iota_star,
        cover,
        cover_from_labels,
        integral_null,
        label_kernel,
        cover_kernel,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::exact::FgAbelianGroup;

    pub fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn sqrt2() -> Scalar {
        Scalar::sqrt_of(2).unwrap()
    }

    fn interval(normals: Vec<Scalar>, offsets: Vec<Scalar>) -> HPolytope {
        HPolytope::new(normals.into_iter().map(|a| vec![a]).collect(), offsets).unwrap()
    }

    /// `[0, 1]` over `Z -> R` with labels `(c, -c)`.
    pub fn rational_interval(c: i64) -> StackyPolytope {
        let q = QuasiLattice::free(Matrix::from_i64(&[&[1]]));
        let p = interval(
            vec![Scalar::from_int(c), Scalar::from_int(-c)],
            vec![Scalar::zero(), Scalar::from_int(-c)],
        );
        StackyPolytope::new(q, p, vec![ints(&[c]), ints(&[-c])]).unwrap()
    }

    /// `[0, 1]` over `Z² -> R`, `∂ = (1, -√2)`.
    pub fn quasi_interval() -> StackyPolytope {
        let q = QuasiLattice::free(Matrix::from_rows(vec![vec![Scalar::one(), -sqrt2()]]));
        let p = interval(vec![Scalar::one(), -sqrt2()], vec![Scalar::zero(), -sqrt2()]);
        StackyPolytope::new(q, p, vec![ints(&[1, 0]), ints(&[0, 1])]).unwrap()
    }

    /// `{η ≥ 0, -η ≥ 0}` over `Z -> R`.
    pub fn point_polytope() -> StackyPolytope {
        let q = QuasiLattice::free(Matrix::from_i64(&[&[1]]));
        let p = interval(vec![Scalar::one(), -Scalar::one()], vec![Scalar::zero(), Scalar::zero()]);
        StackyPolytope::new(q, p, vec![ints(&[1]), ints(&[-1])]).unwrap()
    }

    pub fn from_rows(normals: &[&[i64]], offsets: &[i64]) -> StackyPolytope {
        let d = normals[0].len();
        let p = HPolytope::new(
            normals.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect(),
            offsets.iter().map(|&x| Scalar::from_int(x)).collect(),
        )
        .unwrap();
        let q = QuasiLattice::new(FgAbelianGroup::free(d), Matrix::identity(d));
        StackyPolytope::new(q, p, normals.iter().map(|r| ints(r)).collect()).unwrap()
    }

    /// The standard triangle `η ≥ 0, η1 + η2 ≤ 1` over `Z² -> R²`.
    pub fn triangle() -> StackyPolytope {
        from_rows(&[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, -1])
    }

    pub fn unit_square() -> StackyPolytope {
        from_rows(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[0, 0, -1, -1])
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn rational_interval_data() {
        let d = build_prato_data(&rational_interval(1), None).unwrap();
        assert_eq!(d.n, 2);
        assert_eq!(d.pi, Matrix::from_i64(&[&[1, -1]]));
        assert_eq!(d.null_basis, vec![vec![Scalar::one(), Scalar::one()]]);
        assert_eq!(d.lambda, vec![Scalar::zero(), Scalar::from_int(-1)]);
        assert_eq!(d.cover, Cover::FullPreimage);
        // s1 + s2 = 1
        let s = [Scalar::from_ratio(1, 3), Scalar::from_ratio(2, 3)];
        assert!(d.on_zero_fibre(&s));
        assert!(!d.on_zero_fibre(&[Scalar::one(), Scalar::one()]));
    }

    #[test]
    fn quasi_interval_data() {
        let d = build_prato_data(&quasi_interval(), None).unwrap();
        assert_eq!(d.null_basis, vec![vec![sqrt2(), Scalar::one()]]);
        assert_eq!(d.lambda, vec![Scalar::zero(), -sqrt2()]);
        assert_eq!(d.cover, Cover::Universal);
        assert!(d.on_zero_fibre(&[Scalar::one(), Scalar::zero()]));
        assert!(d.on_zero_fibre(&[Scalar::zero(), sqrt2()]));
        assert_eq!(d.eta_of(&[Scalar::one(), Scalar::zero()]), Some(vec![Scalar::one()]));
    }

    #[test]
    fn trivial_null_space() {
        let s = from_rows(&[&[1, 0], &[0, 1]], &[0, 0]);
        let d = build_prato_data(&s, None).unwrap();
        assert_eq!(d.null_dim(), 0);
        assert_eq!(d.zero_fibre_dim(), 4);
    }

    #[test]
    fn non_spanning_normals() {
        let s = from_rows(&[&[1, 0], &[-1, 0]], &[0, -1]);
        let err = build_prato_data(&s, None).unwrap_err();
        assert!(err.to_string().contains("image does not span E"), "{err}");
    }

    #[test]
    fn mislabeled_facet() {
        let mut s = rational_interval(1);
        s.labels[1] = ints(&[1]);
        assert_eq!(s.validate().label_mismatches, vec![1]);
        assert!(matches!(build_prato_data(&s, None), Err(PratoError::Data(_))));
    }

    #[test]
    fn covers_from_labels() {
        let d = build_prato_data(&rational_interval(2), None).unwrap();
        assert_eq!(d.cover, Cover::FullPreimage);
        // A = Z² / <(0, 2)>, del = (1, 0), labels (1, 1) and (-1, 0):
        // ker β = 2 (Z^2 ∩ n)
        let q = QuasiLattice::new(
            crate::exact::FgAbelianGroup::new(2, IntMatrix::from_i64(&[&[0], &[2]])),
            Matrix::from_i64(&[&[1, 0]]),
        );
        let p = HPolytope::new(vec![vec![Scalar::one()], vec![-Scalar::one()]], vec![Scalar::zero(), -Scalar::one()])
            .unwrap();
        let s = StackyPolytope::new(q, p, vec![ints(&[1, 1]), ints(&[-1, 0])]).unwrap();
        let d = build_prato_data(&s, None).unwrap();
        assert_eq!(d.cover, Cover::Quotient(vec![vec![2, 2]]));
        assert!(d.cover_finite());
    }
}
