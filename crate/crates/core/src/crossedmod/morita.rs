use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::exact::{
    integer_kernel, is_unimodular, lattice_contains, solve_integer, unit_vector, IntMatrix,
    Matrix, Vector,
};

use super::quasilattice::{morita_invariants, MoritaInvariants, QuasiLattice};
use super::CrossedModError;

/// A morphism of quasi-lattices: `phi_a` on generators and a linear map
/// `phi_e` with `del' . phi_a = phi_e . del`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiLatticeMorphism {
    pub phi_a: IntMatrix,
    pub phi_e: Matrix,
}

impl QuasiLatticeMorphism {
    pub fn identity(q: &QuasiLattice) -> Self {
        QuasiLatticeMorphism {
            phi_a: IntMatrix::identity(q.generators()),
            phi_e: Matrix::identity(q.e_dim()),
        }
    }
}

/// Witnesses for the two Morita criteria.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoritaCertificate {
    pub phi_e_rank: usize,
    pub phi_e_surjective: bool,
    /// A nonzero vector of `ker phi_e`; its presence makes the fibres of
    /// the fibred product uncountable, so the comparison map cannot be onto.
    pub phi_e_kernel_witness: Option<Vec<String>>,
    pub injective: bool,
    /// An element of `ker phi_a ∩ ker del` that is nonzero in `A`.
    pub injectivity_witness: Option<Vec<String>>,
    pub phi_a_surjective: bool,
    /// A generator of `A'` outside `phi_a(A)`.
    pub surjectivity_witness: Option<usize>,
    pub is_morita: bool,
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

/// Checks that `m` is a morphism: shapes, commutation of the square and
/// compatibility with the relations.
pub fn check_morphism(q: &QuasiLattice, q2: &QuasiLattice, m: &QuasiLatticeMorphism) -> Result<(), CrossedModError> {
    let (g, g2) = (q.generators(), q2.generators());
    if m.phi_a.rows() != g2 || m.phi_a.cols() != g {
        return Err(CrossedModError::MorphismInvalid(format!(
            "phi_A must be {g2}x{g}, got {}x{}",
            m.phi_a.rows(),
            m.phi_a.cols()
        )));
    }
    if m.phi_e.rows() != q2.e_dim() || m.phi_e.cols() != q.e_dim() {
        return Err(CrossedModError::MorphismInvalid("phi_E has the wrong shape".into()));
    }
    let lhs = q2.del().try_mul(&Matrix::from_int_matrix(&m.phi_a))?;
    let rhs = m.phi_e.try_mul(q.del())?;
    if lhs != rhs {
        return Err(CrossedModError::MorphismInvalid("square does not commute: del'.phi_A != phi_E.del".into()));
    }
    let images = m.phi_a.mul(q.group().relations());
    if !lattice_contains(q2.group().relations(), &images) {
        return Err(CrossedModError::MorphismInvalid("phi_A does not respect the relations of A".into()));
    }
    Ok(())
}

/// Decides whether `m: Q -> Q'` is a Morita morphism: `phi_e` onto `E'`
/// and `a -> (phi_a(a), del(a))` a bijection onto `A' x_{E'} E`.
pub fn check_morita_morphism(
    q: &QuasiLattice,
    q2: &QuasiLattice,
    m: &QuasiLatticeMorphism,
) -> Result<MoritaCertificate, CrossedModError> {
    q.ensure_valid()?;
    q2.ensure_valid()?;
    check_morphism(q, q2, m)?;

    let phi_e_rank = m.phi_e.rank();
    let phi_e_surjective = phi_e_rank == q2.e_dim();
    let phi_e_kernel_witness = m.phi_e.kernel_basis().first().map(|v| strings(v));

    // ker phi_a ∩ ker del, computed in Z^g before passing to A = Z^g / R:
    // solve phi_a x = R' y and del x = 0 simultaneously.
    let g = q.generators();
    let r2 = q2.group().relations();
    let del_flat = q.del().flatten_to_int();
    let mut stacked = IntMatrix::zeros(m.phi_a.rows() + del_flat.rows(), g + r2.cols());
    for i in 0..m.phi_a.rows() {
        for j in 0..g {
            stacked.set(i, j, m.phi_a.get(i, j).clone());
        }
        for j in 0..r2.cols() {
            stacked.set(i, g + j, -r2.get(i, j));
        }
    }
    for i in 0..del_flat.rows() {
        for j in 0..g {
            stacked.set(m.phi_a.rows() + i, j, del_flat.get(i, j).clone());
        }
    }
    let joint = integer_kernel(&stacked);
    let injectivity_witness = joint
        .col_vectors()
        .into_iter()
        .map(|c| c[..g].to_vec())
        .find(|x| !q.group().is_zero_element(x));
    let injective = injectivity_witness.is_none();

    let image = m.phi_a.hcat(r2);
    let surjectivity_witness = (0..q2.generators()).find(|&i| {
        let e: Vec<BigInt> = unit_vector(q2.generators(), i)
            .iter()
            .map(|s| s.to_integer().unwrap_or_else(BigInt::zero))
            .collect();
        solve_integer(&image, &e).is_none()
    });
    let phi_a_surjective = surjectivity_witness.is_none();

    let is_morita = phi_e_surjective && phi_e_kernel_witness.is_none() && injective && phi_a_surjective;
    Ok(MoritaCertificate {
        phi_e_rank,
        phi_e_surjective,
        phi_e_kernel_witness,
        injective,
        injectivity_witness: injectivity_witness.map(|w| strings(&w)),
        phi_a_surjective,
        surjectivity_witness,
        is_morita,
    })
}

/// `U: Z^g -> Z^g'` unimodular and `T: E -> E'` invertible with
/// `del' U = T del`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoCertificate {
    pub u: IntMatrix,
    pub t: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IsoVerdict {
    Equivalent(IsoCertificate),
    /// Names of the invariants that differ.
    Inequivalent(Vec<String>),
    Unknown { bound: i64, candidates_checked: u64, reason: String },
}

/// Upper limit on unimodular candidates enumerated by [`quasilattice_iso`].
pub const SEARCH_LIMIT: u64 = 2_000_000;

pub fn verify_iso_certificate(
    q: &QuasiLattice,
    q2: &QuasiLattice,
    c: &IsoCertificate,
) -> Result<(), CrossedModError> {
    let bad = |m: &str| Err(CrossedModError::CertificateInvalid(m.to_string()));
    let (g, g2) = (q.generators(), q2.generators());
    if c.u.rows() != g2 || c.u.cols() != g {
        return bad("U has the wrong shape");
    }
    if !is_unimodular(&c.u) {
        return bad("U is not unimodular");
    }
    if c.t.rows() != q2.e_dim() || c.t.cols() != q.e_dim() || c.t.inverse().is_none() {
        return bad("T is not an invertible map E -> E'");
    }
    let lhs = q2.del().try_mul(&Matrix::from_int_matrix(&c.u))?;
    let rhs = c.t.try_mul(q.del())?;
    if lhs != rhs {
        return bad("del' U != T del");
    }
    let (r, r2) = (q.group().relations(), q2.group().relations());
    if !lattice_contains(r2, &c.u.mul(r)) || !lattice_contains(&c.u.mul(r), r2) {
        return bad("U does not carry the relations of A onto those of A'");
    }
    Ok(())
}

fn invariant_mismatches(a: &MoritaInvariants, b: &MoritaInvariants, q: &QuasiLattice, q2: &QuasiLattice) -> Vec<String> {
    let mut out = Vec::new();
    if a.e_dim != b.e_dim {
        out.push("E_dim".to_string());
    }
    if q.group().invariants() != q2.group().invariants() {
        out.push("A".to_string());
    }
    if a.kernel != b.kernel {
        out.push("ker del".to_string());
    }
    if a.image_discrete != b.image_discrete {
        out.push("image discreteness".to_string());
    }
    if a.image_rational_dim != b.image_rational_dim {
        out.push("rational rank of image".to_string());
    }
    out
}

/// Isomorphism of quasi-lattices: certificate first, then invariants, then
/// a bounded search over unimodular `U` with entries in `[-bound, bound]`.
pub fn quasilattice_iso(
    q: &QuasiLattice,
    q2: &QuasiLattice,
    certificate: Option<&IsoCertificate>,
    bound: i64,
) -> Result<IsoVerdict, CrossedModError> {
    if let Some(c) = certificate {
        verify_iso_certificate(q, q2, c)?;
        return Ok(IsoVerdict::Equivalent(c.clone()));
    }
    let (a, b) = (morita_invariants(q)?, morita_invariants(q2)?);
    let mismatches = invariant_mismatches(&a, &b, q, q2);
    if !mismatches.is_empty() {
        return Ok(IsoVerdict::Inequivalent(mismatches));
    }
    if q == q2 {
        let c = IsoCertificate { u: IntMatrix::identity(q.generators()), t: Matrix::identity(q.e_dim()) };
        return Ok(IsoVerdict::Equivalent(c));
    }
    let g = q.generators();
    if g != q2.generators() || !q.group().relations().is_zero() || !q2.group().relations().is_zero() {
        return Ok(IsoVerdict::Unknown {
            bound,
            candidates_checked: 0,
            reason: "bounded search only covers relation-free presentations on equal generator counts".into(),
        });
    }
    let side = (2 * bound + 1) as u64;
    let total = side.checked_pow((g * g) as u32).unwrap_or(u64::MAX);
    if total > SEARCH_LIMIT {
        return Ok(IsoVerdict::Unknown {
            bound,
            candidates_checked: 0,
            reason: format!("search space {total} exceeds limit {SEARCH_LIMIT}"),
        });
    }
    let pivots = q.del().echelon().pivots;
    let basis = select_cols(q.del(), &pivots);
    let basis_inv = basis.inverse().expect("pivot columns of a spanning del are a basis");
    let mut entries = vec![-bound; g * g];
    let mut checked = 0u64;
    loop {
        checked += 1;
        let u = IntMatrix::from_rows(
            entries.chunks(g).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            g,
        );
        if is_unimodular(&u) {
            let image = q2.del().try_mul(&Matrix::from_int_matrix(&u))?;
            let t = select_cols(&image, &pivots).try_mul(&basis_inv)?;
            let cert = IsoCertificate { u, t };
            if verify_iso_certificate(q, q2, &cert).is_ok() {
                return Ok(IsoVerdict::Equivalent(cert));
            }
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == entries.len() {
                return Ok(IsoVerdict::Unknown {
                    bound,
                    candidates_checked: checked,
                    reason: "no unimodular witness within the bound".into(),
                });
            }
            if entries[k] < bound {
                entries[k] += 1;
                break;
            }
            entries[k] = -bound;
            k += 1;
        }
    }
}

fn select_cols(m: &Matrix, cols: &[usize]) -> Matrix {
    let vs: Vec<Vector> = cols.iter().map(|&j| m.col(j)).collect();
    Matrix::from_cols(vs, m.rows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Scalar;

    fn sqrt2() -> Scalar {
        Scalar::sqrt_of(2).unwrap()
    }

    fn dense() -> QuasiLattice {
        QuasiLattice::free(Matrix::from_rows(vec![vec![Scalar::one(), -sqrt2()]]))
    }

    #[test]
    fn identity_is_morita() {
        for q in [dense(), QuasiLattice::free(Matrix::identity(2))] {
            let cert = check_morita_morphism(&q, &q, &QuasiLatticeMorphism::identity(&q)).unwrap();
            assert!(cert.is_morita);
        }
    }

    #[test]
    fn unimodular_shear_is_morita() {
        let q = QuasiLattice::free(Matrix::identity(2));
        let m = QuasiLatticeMorphism {
            phi_a: IntMatrix::from_i64(&[&[1, 1], &[0, 1]]),
            phi_e: Matrix::from_i64(&[&[1, 1], &[0, 1]]),
        };
        assert!(check_morita_morphism(&q, &q, &m).unwrap().is_morita);
    }

    #[test]
    fn zero_phi_e_fails() {
        let q = QuasiLattice::free(Matrix::identity(1));
        let zero_target = QuasiLattice::free(Matrix::identity(1));
        // phi_a must commute; use the zero map on A too
        let m = QuasiLatticeMorphism { phi_a: IntMatrix::zeros(1, 1), phi_e: Matrix::zeros(1, 1) };
        let cert = check_morita_morphism(&q, &zero_target, &m).unwrap();
        assert!(!cert.phi_e_surjective);
        assert!(!cert.is_morita);
    }

    #[test]
    fn doubling_is_not_morita() {
        let q = QuasiLattice::free(Matrix::identity(1));
        let m = QuasiLatticeMorphism { phi_a: IntMatrix::from_i64(&[&[2]]), phi_e: Matrix::from_i64(&[&[2]]) };
        let cert = check_morita_morphism(&q, &q, &m).unwrap();
        assert!(cert.injective);
        assert!(!cert.phi_a_surjective);
        assert_eq!(cert.surjectivity_witness, Some(0));
    }

    #[test]
    fn non_commuting_square_rejected() {
        let q = QuasiLattice::free(Matrix::identity(1));
        let m = QuasiLatticeMorphism { phi_a: IntMatrix::from_i64(&[&[1]]), phi_e: Matrix::from_i64(&[&[2]]) };
        assert!(matches!(check_morita_morphism(&q, &q, &m), Err(CrossedModError::MorphismInvalid(_))));
    }

    #[test]
    fn iso_examples() {
        let q = dense();
        assert!(matches!(quasilattice_iso(&q, &q, None, 3).unwrap(), IsoVerdict::Equivalent(_)));

        let std2 = QuasiLattice::free(Matrix::identity(2));
        assert_eq!(
            quasilattice_iso(&q, &std2, None, 3).unwrap(),
            IsoVerdict::Inequivalent(vec!["E_dim".into(), "image discreteness".into()])
        );

        let swapped = QuasiLattice::free(Matrix::from_rows(vec![vec![-sqrt2(), Scalar::one()]]));
        let cert = IsoCertificate { u: IntMatrix::from_i64(&[&[0, 1], &[1, 0]]), t: Matrix::identity(1) };
        assert_eq!(
            quasilattice_iso(&q, &swapped, Some(&cert), 3).unwrap(),
            IsoVerdict::Equivalent(cert.clone())
        );
        // the search finds a witness on its own
        let IsoVerdict::Equivalent(found) = quasilattice_iso(&q, &swapped, None, 1).unwrap() else {
            panic!("expected a witness");
        };
        verify_iso_certificate(&q, &swapped, &found).unwrap();
    }

    #[test]
    fn bounded_search_can_be_inconclusive() {
        let a = QuasiLattice::free(Matrix::from_rows(vec![vec![Scalar::one(), sqrt2()]]));
        let b = QuasiLattice::free(Matrix::from_rows(vec![vec![
            Scalar::one(),
            Scalar::from_int(3) + sqrt2(),
        ]]));
        assert!(matches!(quasilattice_iso(&a, &b, None, 1).unwrap(), IsoVerdict::Unknown { bound: 1, .. }));
        assert!(matches!(quasilattice_iso(&a, &b, None, 3).unwrap(), IsoVerdict::Equivalent(_)));
    }

    #[test]
    fn malformed_certificate() {
        let q = dense();
        let cert = IsoCertificate { u: IntMatrix::from_i64(&[&[2, 0], &[0, 1]]), t: Matrix::identity(1) };
        assert!(matches!(
            quasilattice_iso(&q, &q, Some(&cert), 3),
            Err(CrossedModError::CertificateInvalid(_))
        ));
    }
}
