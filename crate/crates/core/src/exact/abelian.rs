//! Finitely presented abelian groups `Z^g / (relation columns)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::intmat::{integer_kernel, smith_normal_form, solve_integer, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgAbelianGroup {
    generators: usize,
    /// `generators x k`; each column is a relation.
    relations: IntMatrix,
}

/// Rank and torsion coefficients (all > 1, divisibility-chained).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupInvariants {
    pub rank: usize,
    #[serde(serialize_with = "crate::io::ser_bigints")]
    pub torsion: Vec<BigInt>,
}

impl GroupInvariants {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Order of a finite group, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }
}

impl FgAbelianGroup {
    pub fn new(generators: usize, relations: IntMatrix) -> Self {
        assert_eq!(relations.rows(), generators, "relation columns must have one entry per generator");
        FgAbelianGroup { generators, relations }
    }

    pub fn free(generators: usize) -> Self {
        FgAbelianGroup { generators, relations: IntMatrix::zeros(generators, 0) }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn invariants(&self) -> GroupInvariants {
        group_invariants(self)
    }

    /// Whether `x` (coordinates in the generators) is zero in the group.
    pub fn is_zero_element(&self, x: &[BigInt]) -> bool {
        x.iter().all(Zero::is_zero) || solve_integer(&self.relations, x).is_some()
    }

    /// The quotient by the subgroup generated by the columns of `elements`.
    pub fn quotient(&self, elements: &IntMatrix) -> FgAbelianGroup {
        FgAbelianGroup::new(self.generators, self.relations.hcat(elements))
    }

    /// Index of the subgroup generated by `elements`; `None` when infinite.
    pub fn subgroup_index(&self, elements: &IntMatrix) -> Option<BigInt> {
        self.quotient(elements).invariants().order()
    }

    /// Invariants of the subgroup `{x : m x = 0 in Z^k} / relations`, the
    /// kernel of the homomorphism to `Z^k` given by `m` (which must vanish
    /// on the relations).
    pub fn kernel_invariants(&self, m: &IntMatrix) -> GroupInvariants {
        let kernel = integer_kernel(m);
        // Express each relation in the kernel basis, then take Smith form.
        let coords: Vec<Vec<BigInt>> = self
            .relations
            .col_vectors()
            .iter()
            .map(|r| solve_integer(&kernel, r).expect("relations must lie in the kernel"))
            .collect();
        let presentation = IntMatrix::from_cols(&coords, kernel.cols());
        FgAbelianGroup::new(kernel.cols(), presentation).invariants()
    }
}

/// Rank and torsion coefficients of `G` from the Smith form of its relations.
pub fn group_invariants(g: &FgAbelianGroup) -> GroupInvariants {
    let snf = smith_normal_form(&g.relations);
    let diag = snf.diagonal();
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    let torsion = diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
    GroupInvariants { rank: g.generators - nonzero, torsion }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let g = FgAbelianGroup::new(2, IntMatrix::from_i64(&[&[2], &[0]]));
        assert_eq!(g.invariants(), GroupInvariants { rank: 1, torsion: vec![BigInt::from(2)] });
        assert_eq!(FgAbelianGroup::free(1).invariants(), GroupInvariants { rank: 1, torsion: vec![] });
        let trivial = FgAbelianGroup::new(1, IntMatrix::from_i64(&[&[1]]));
        assert!(trivial.invariants().is_trivial());
    }

    #[test]
    fn isomorphic_presentations_agree() {
        // Z/2 + Z/3 = Z/6
        let a = FgAbelianGroup::new(2, IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        let b = FgAbelianGroup::new(1, IntMatrix::from_i64(&[&[6]]));
        assert_eq!(a.invariants(), b.invariants());
    }

    #[test]
    fn index_and_zero_test() {
        let z = FgAbelianGroup::free(1);
        assert_eq!(z.subgroup_index(&IntMatrix::from_i64(&[&[2]])), Some(BigInt::from(2)));
        assert_eq!(z.subgroup_index(&IntMatrix::zeros(1, 0)), None);
        let g = FgAbelianGroup::new(2, IntMatrix::from_i64(&[&[2], &[0]]));
        assert!(g.is_zero_element(&[BigInt::from(4), BigInt::zero()]));
        assert!(!g.is_zero_element(&[BigInt::from(1), BigInt::zero()]));
    }

    #[test]
    fn kernel_of_difference_map() {
        // Z^2 -> Z, (x, y) -> x - y has kernel Z.
        let inv = FgAbelianGroup::free(2).kernel_invariants(&IntMatrix::from_i64(&[&[1, -1]]));
        assert_eq!(inv, GroupInvariants { rank: 1, torsion: vec![] });
    }
}
