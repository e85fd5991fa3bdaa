//! Quasi-lattices `A -> E` presenting stacky tori, their Morita invariants,
//! Morita morphisms and isomorphism certificates.

mod morita;
mod quasilattice;

pub use morita::{
    check_morita_morphism, check_morphism, quasilattice_iso, verify_iso_certificate,
    IsoCertificate, IsoVerdict, MoritaCertificate, QuasiLatticeMorphism, SEARCH_LIMIT,
};
pub use quasilattice::{
    cover_lattice, is_rational, morita_invariants, quotient_coordinates,
    two_torus_to_quasilattice, validate_quasilattice, Cover, MoritaInvariants, QuasiLattice,
    QuasiLatticeReport, QuasiLatticeViolation,
};

use thiserror::Error;

use crate::exact::FieldError;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CrossedModError {
    #[error("invalid quasi-lattice: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidQuasiLattice(Vec<QuasiLatticeViolation>),
    #[error("invalid morphism: {0}")]
    MorphismInvalid(String),
    #[error("invalid certificate: {0}")]
    CertificateInvalid(String),
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}
