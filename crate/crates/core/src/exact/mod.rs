//! Arithmetic substrate: the scalar field `Q(sqrt(d))`, exact linear algebra,
//! integer normal forms and finitely generated abelian groups.

mod abelian;
mod intmat;
mod matrix;
mod scalar;

pub use abelian::{group_invariants, FgAbelianGroup, GroupInvariants};
pub use intmat::{
    integer_kernel, is_unimodular, lattice_basis, lattice_contains, smith_normal_form, solve_integer,
    unimodular_inverse, IntMatrix, Smith,
};
pub use matrix::{
    common_field, discrete_subgroup_test, dot, int_vector, is_zero_vector, rank_kernel_solve,
    rational_span_dim, Echelon, KernelReport, Matrix, ScalarLiteral, Vector,
};
pub(crate) use matrix::unit_vector;
pub use scalar::{is_square_free, parse_ratio, Scalar};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("field mismatch: sqrt({0}) and sqrt({1}) in one computation")]
    Mismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field tag {0} is not square-free")]
    NotSquareFree(u64),
    #[error("irrational literal without a field tag (field_d < 2)")]
    IrrationalWithoutField,
    #[error("cannot parse scalar literal `{0}`")]
    Parse(String),
}
