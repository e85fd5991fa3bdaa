use num_bigint::BigInt;
use proptest::prelude::*;

use stacky_core::crossedmod::{Cover, QuasiLattice};
use stacky_core::exact::{dot, FgAbelianGroup, Matrix, Scalar, Vector};
use stacky_core::polytope::{is_bounded, vertices, HPolytope};
use stacky_core::prato::{
    build_prato_data, classify, moment_image, reduction_exists, regular_value_check, Kind, SamplingConfig,
    StackyPolytope,
};

#[derive(Clone, Debug)]
struct Spec {
    dim: usize,
    interior: Vec<i64>,
    normals: Vec<Vec<(i64, i64)>>,
    depths: Vec<i64>,
    irrational: bool,
}

fn spec() -> impl Strategy<Value = Spec> {
    (1usize..3, 0usize..3)
        .prop_flat_map(|(dim, k)| {
            (
                Just(dim),
                prop::collection::vec(-1i64..2, dim),
                prop::collection::vec(prop::collection::vec((-2i64..3, -1i64..2), dim), k),
                prop::collection::vec(1i64..3, k),
                any::<bool>(),
            )
        })
        .prop_map(|(dim, interior, normals, depths, irrational)| Spec { dim, interior, normals, depths, irrational })
}

/// A box of half-width 2 around the interior point cut by random facets.
/// Rational instances use `Z^dim -> R^dim` with labels equal to the
/// normals; irrational ones the quasi-lattice generated by the normals.
fn build(s: &Spec) -> Option<StackyPolytope> {
    let entry = |a: i64, b: i64| {
        if s.irrational {
            Scalar::quadratic((a, 1), (b, 1), 2).unwrap()
        } else {
            Scalar::from_int(a)
        }
    };
    let p: Vector = s.interior.iter().map(|&x| Scalar::from_int(x)).collect();
    let mut normals: Vec<Vector> = Vec::new();
    let mut offsets = Vec::new();
    for j in 0..s.dim {
        for sign in [1, -1] {
            let mut a = vec![Scalar::zero(); s.dim];
            a[j] = Scalar::from_int(sign);
            offsets.push(Scalar::from_int(sign * s.interior[j] - 2));
            normals.push(a);
        }
    }
    for (row, &r) in s.normals.iter().zip(&s.depths) {
        let a: Vector = row.iter().map(|&(x, y)| entry(x, y)).collect();
        if a.iter().all(Scalar::is_zero) || normals.contains(&a) {
            continue;
        }
        offsets.push(&dot(&a, &p) - &Scalar::from_int(r));
        normals.push(a);
    }
    let n = normals.len();
    let poly = HPolytope::new(normals.clone(), offsets).ok()?;
    let (q, labels) = if s.irrational {
        let q = QuasiLattice::free(Matrix::from_cols(normals, s.dim));
        let labels = (0..n).map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect()).collect();
        (q, labels)
    } else {
        let q = QuasiLattice::new(FgAbelianGroup::free(s.dim), Matrix::identity(s.dim));
        let labels = normals.iter().map(|a| a.iter().map(|x| x.to_integer().unwrap()).collect()).collect();
        (q, labels)
    };
    StackyPolytope::new(q, poly, labels).ok()
}

/// `n` is rational iff `π` and its Galois conjugate stacked have the same
/// rank as `π`.
fn null_rational_oracle(pi: &Matrix) -> bool {
    let mut rows = pi.row_vectors();
    rows.extend(pi.row_vectors().iter().map(|r| r.iter().map(Scalar::conjugate).collect::<Vector>()));
    Matrix::from_rows_with_cols(rows, pi.cols()).rank() == pi.rank()
}

fn cfg() -> SamplingConfig {
    SamplingConfig { samples: 200, grid: 0.5, ..SamplingConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn classification_is_invariant(s in spec(), rot in 0usize..8) {
        let Some(sp) = build(&s) else { return Ok(()) };
        let d = build_prato_data(&sp, None).unwrap();
        let c = classify(&d, &sp).unwrap();
        prop_assert_eq!(c.null_rational, null_rational_oracle(&d.pi));
        if c.kind != Kind::Quasifold {
            prop_assert!(c.rational && c.cover_finite);
        } else {
            prop_assert!(!c.rational || !c.cover_finite);
        }
        if c.kind == Kind::Manifold {
            prop_assert!(c.vertex_indices.iter().all(|v| v.index == Some(1.into())));
        }

        let n = sp.facet_count();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let permuted = StackyPolytope::new(
            sp.quasi_lattice.clone(),
            sp.polytope.permuted(&perm),
            perm.iter().map(|&i| sp.labels[i].clone()).collect(),
        )
        .unwrap();
        let d2 = build_prato_data(&permuted, None).unwrap();
        let c2 = classify(&d2, &permuted).unwrap();
        prop_assert_eq!(c2.kind, c.kind);
        prop_assert_eq!(c2.rational, c.rational);
    }

    #[test]
    fn regular_images_attain_vertices(s in spec()) {
        let Some(sp) = build(&s) else { return Ok(()) };
        prop_assert!(is_bounded(&sp.polytope).unwrap());
        let d = build_prato_data(&sp, Some(Cover::Universal)).unwrap();
        let reg = regular_value_check(&d, &sp.polytope).unwrap();
        prop_assume!(reg.regular);
        let img = moment_image(&d, &sp.polytope, &cfg()).unwrap();
        prop_assert!(img.all_vertices_attained);
        prop_assert!(img.image_equals_polytope);
        prop_assert_eq!(img.vertex_attainment.len(), vertices(&sp.polytope).unwrap().len());
        prop_assert!(img.verified, "{}", img.summary);

        let r = reduction_exists(&d, &sp).unwrap();
        prop_assert!(r.exists && r.witness.is_none());
    }
}
