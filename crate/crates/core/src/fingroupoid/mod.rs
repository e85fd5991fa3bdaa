//! Finite models of crossed-module actions on groupoids, checked by
//! exhaustive enumeration.

mod action;
mod crossed;
mod group;
mod groupoid;
pub mod models;

pub use action::{
    check_principal, classify_action_groupoid, freeness_witness, isotropy_report, leafwise_transitive,
    leafwise_witness, obstruction_groupoid, reduction_groupoid, regular_action, two_group_groupoid,
    validate_action, ActionReport, ActionViolation, Classification, CrossedAction, PrincipalReport,
    ReducedGroupoid, RegularityReport, GAMMA_LIMIT,
};
pub use crossed::{
    check_crossed_morita, extend, finite_morita_moves, quotient, quotient_by_full_preimage, restrict,
    CrossedMoritaReport, CrossedMorphism, FiniteCrossedModule, MoveOutcome, MoveSpec,
    MovesReport,
};
pub use group::FiniteGroup;
pub use groupoid::{check_morita, weak_fibre_product, FiniteGroupoid, GroupoidMorphism, MoritaReport, WeakFibreProduct};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FinError {
    #[error("{what}: {axiom} at {tuple:?}")]
    Structure { what: String, axiom: String, tuple: Vec<usize> },
    #[error("invalid morphism: {0}")]
    Morphism(String),
    #[error("H does not act freely: h={h} fixes arrow {f}")]
    NotFree { h: usize, f: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl FinError {
    pub(crate) fn structure(what: &str, axiom: &str, tuple: Vec<usize>) -> Self {
        FinError::Structure { what: what.into(), axiom: axiom.into(), tuple }
    }
}
