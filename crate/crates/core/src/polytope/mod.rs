//! Exact convex polyhedra `{η : <a_i, η> ≥ λ_i}` over `Q(sqrt(d))`.

mod geometry;
mod lp;

pub use geometry::{
    affine_dimension, is_bounded, is_simple, redundant_facets, slice, slice_lift, vertices, volume,
    SlicePivot, Vertex,
};
pub use lp::{lp_solve, LpOutcome};
pub(crate) use geometry::lex_cmp;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{common_field, is_zero_vector, FieldError, Scalar, Vector};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PolytopeError {
    #[error("polyhedron is unbounded along {direction:?}")]
    Unbounded { direction: Vec<String> },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("facet {0} has a zero normal")]
    ZeroNormal(usize),
    #[error("slice direction is zero")]
    ZeroDirection,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HPolytope {
    dim: usize,
    normals: Vec<Vector>,
    offsets: Vector,
}

impl HPolytope {
    /// Dimension is the common normal length; needs at least one facet.
    pub fn new(normals: Vec<Vector>, offsets: Vector) -> Result<Self, PolytopeError> {
        let dim = normals
            .first()
            .map(Vec::len)
            .ok_or_else(|| PolytopeError::Shape("no facets; use with_dim".into()))?;
        HPolytope::with_dim(dim, normals, offsets)
    }

    pub fn with_dim(dim: usize, normals: Vec<Vector>, offsets: Vector) -> Result<Self, PolytopeError> {
        let p = HPolytope::unchecked(dim, normals, offsets)?;
        if let Some(i) = p.normals.iter().position(|a| is_zero_vector(a)) {
            return Err(PolytopeError::ZeroNormal(i));
        }
        Ok(p)
    }

    /// Allows zero normals; used for slices, where a violated zero-normal
    /// row encodes an empty result.
    pub(crate) fn unchecked(dim: usize, normals: Vec<Vector>, offsets: Vector) -> Result<Self, PolytopeError> {
        if normals.len() != offsets.len() {
            return Err(PolytopeError::Shape(format!("{} normals but {} offsets", normals.len(), offsets.len())));
        }
        if let Some(i) = normals.iter().position(|a| a.len() != dim) {
            return Err(PolytopeError::Shape(format!("normal {i} has length {}, expected {dim}", normals[i].len())));
        }
        let all: Vec<Scalar> = normals.iter().flatten().chain(offsets.iter()).cloned().collect();
        common_field(&all)?;
        Ok(HPolytope { dim, normals, offsets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vector] {
        &self.normals
    }

    pub fn offsets(&self) -> &[Scalar] {
        &self.offsets
    }

    pub fn facet_count(&self) -> usize {
        self.normals.len()
    }

    pub fn field(&self) -> u64 {
        let all: Vec<Scalar> = self.normals.iter().flatten().chain(self.offsets.iter()).cloned().collect();
        common_field(&all).expect("checked at construction")
    }

    pub(crate) fn check_field(&self, extra: &[Scalar]) -> Result<u64, FieldError> {
        let mut all: Vec<Scalar> = extra.to_vec();
        all.push(Scalar::zero());
        let d = common_field(&all)?;
        let own = self.field();
        match (own, d) {
            (0, x) | (x, 0) => Ok(x),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(FieldError::Mismatch(x, y)),
        }
    }

    /// `<a_i, η> - λ_i`.
    pub fn slack(&self, i: usize, eta: &[Scalar]) -> Scalar {
        &crate::exact::dot(&self.normals[i], eta) - &self.offsets[i]
    }

    pub fn contains(&self, eta: &[Scalar]) -> bool {
        (0..self.facet_count()).all(|i| !self.slack(i, eta).is_negative())
    }

    /// Facets active at `eta`.
    pub fn active_set(&self, eta: &[Scalar]) -> Vec<usize> {
        (0..self.facet_count()).filter(|&i| self.slack(i, eta).is_zero()).collect()
    }

    /// Same polytope with an extra constraint.
    pub fn with_constraint(&self, normal: Vector, offset: Scalar) -> Result<Self, PolytopeError> {
        let mut normals = self.normals.clone();
        let mut offsets = self.offsets.clone();
        normals.push(normal);
        offsets.push(offset);
        HPolytope::unchecked(self.dim, normals, offsets)
    }

    /// Facets reordered by `perm` (new facet `k` is old facet `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        HPolytope {
            dim: self.dim,
            normals: perm.iter().map(|&i| self.normals[i].clone()).collect(),
            offsets: perm.iter().map(|&i| self.offsets[i].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        let one = Scalar::one;
        assert!(matches!(
            HPolytope::new(vec![vec![Scalar::zero()]], vec![one()]),
            Err(PolytopeError::ZeroNormal(0))
        ));
        assert!(matches!(
            HPolytope::new(vec![vec![one()], vec![one(), one()]], vec![one(), one()]),
            Err(PolytopeError::Shape(_))
        ));
        let s2 = Scalar::sqrt_of(2).unwrap();
        let s3 = Scalar::sqrt_of(3).unwrap();
        assert!(matches!(
            HPolytope::new(vec![vec![s2], vec![s3]], vec![one(), one()]),
            Err(PolytopeError::Field(FieldError::Mismatch(2, 3)))
        ));
    }
}
