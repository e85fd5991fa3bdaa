use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::crossedmod::Cover;
use crate::exact::{
    discrete_subgroup_test, dot, lattice_contains, smith_normal_form, solve_integer, unimodular_inverse, unit_vector,
    GroupInvariants, IntMatrix, Matrix, Scalar, Vector,
};
use crate::fingroupoid::models::boundary_translation;
use crate::fingroupoid::{reduction_groupoid, FinError, FiniteCrossedModule, FiniteGroup};
use crate::polytope::{vertices, HPolytope, Vertex};

use super::{PratoData, PratoError, StackyPolytope};

/// Largest finite group built when analysing a finite-quotient cover.
pub const FINITE_MODEL_LIMIT: usize = 64;

fn ser_opt_bigint<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_bigint_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    crate::io::ser_bigints(v, s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexRank {
    pub vertex: Vector,
    pub active: Vec<usize>,
    /// Rank of `{ι*(e_i*) : i ∉ I(v)}`.
    pub complement_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularValueReport {
    pub regular: bool,
    pub null_dim: usize,
    pub vertices: Vec<VertexRank>,
    /// Index into `vertices` of the first failure.
    pub failing_vertex: Option<usize>,
}

fn iota_columns(d: &PratoData, idx: impl Iterator<Item = usize>) -> Matrix {
    let k = d.null_dim();
    Matrix::from_cols(idx.map(|i| d.iota_star.col(i)).collect(), k)
}

/// `0` is a regular value of `ι*∘μ` iff at every vertex the functionals
/// `ι*(e_i*)` of the inactive facets span `n*`.
pub fn regular_value_check(d: &PratoData, p: &HPolytope) -> Result<RegularValueReport, PratoError> {
    let verts = vertices(p)?;
    let k = d.null_dim();
    let ranks: Vec<VertexRank> = verts
        .into_iter()
        .map(|Vertex { point, active }| {
            let complement_rank = iota_columns(d, (0..d.n).filter(|i| !active.contains(i))).rank();
            VertexRank { vertex: point, active, complement_rank }
        })
        .collect();
    let failing_vertex = ranks.iter().position(|r| r.complement_rank < k);
    Ok(RegularValueReport { regular: failing_vertex.is_none(), null_dim: k, vertices: ranks, failing_vertex })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesesReport {
    /// `0` is a regular value; `None` when `P` is unbounded.
    pub a_regular: Option<bool>,
    pub a_failing_vertex: Option<Vector>,
    /// `n ∩ span{e_i : i ∈ I(v)} = 0` at every vertex.
    pub b_locally_free: Option<bool>,
    pub b_failing_vertex: Option<Vector>,
    pub c_leafwise_transitive: bool,
    pub c_note: String,
    pub d_proper: bool,
    pub clean: bool,
    pub clean_note: String,
}

pub fn hypotheses_report(d: &PratoData, s: &StackyPolytope) -> Result<HypothesesReport, PratoError> {
    let p = &s.polytope;
    let bounded = crate::polytope::is_bounded(p)?;
    let (mut a_regular, mut a_failing_vertex, mut b_locally_free, mut b_failing_vertex) = (None, None, None, None);
    if bounded {
        let reg = regular_value_check(d, p)?;
        a_regular = Some(reg.regular);
        a_failing_vertex = reg.failing_vertex.map(|i| reg.vertices[i].vertex.clone());
        let k = d.null_dim();
        let fail = reg.vertices.iter().find(|v| {
            let mut cols = d.null_basis.clone();
            cols.extend(v.active.iter().map(|&i| unit_vector(d.n, i)));
            Matrix::from_cols(cols, d.n).rank() < k + v.active.len()
        });
        b_locally_free = Some(fail.is_none());
        b_failing_vertex = fail.map(|v| v.vertex.clone());
    }
    Ok(HypothesesReport {
        a_regular,
        a_failing_vertex,
        b_locally_free,
        b_failing_vertex,
        c_leafwise_transitive: true,
        c_note: "structural: the null foliation of the zero fibre is the orbit foliation of N".into(),
        d_proper: bounded,
        clean: true,
        clean_note: "implied by (c): leafwise transitive actions are clean; not computed independently".into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Manifold,
    Orbifold,
    Quasifold,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Manifold => "manifold",
            Kind::Orbifold => "orbifold",
            Kind::Quasifold => "quasifold",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexIndex {
    pub vertex: Vector,
    pub active: Vec<usize>,
    /// `|A / <β(e_i) : i ∈ I(v)>|`, `None` when infinite.
    #[serde(serialize_with = "ser_opt_bigint")]
    pub index: Option<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub kind: Kind,
    pub rational: bool,
    /// `∂(A)` is discrete in `E`.
    pub image_discrete: bool,
    /// `n` is spanned by integer vectors.
    pub null_rational: bool,
    pub null_dim: usize,
    /// Rank of `Z^n ∩ n`.
    pub null_rational_dim: usize,
    pub cover: Cover,
    pub cover_finite: bool,
    pub kernel: GroupInvariants,
    pub vertex_indices: Vec<VertexIndex>,
}

/// Quasifold unless `n` is rational and the cover finite; then manifold
/// when every vertex index is 1, else orbifold.
pub fn classify(d: &PratoData, s: &StackyPolytope) -> Result<ClassReport, PratoError> {
    let q = &s.quasi_lattice;
    let image_discrete = discrete_subgroup_test(&q.del().col_vectors())?;
    let null_rational_dim = d.integral_null.cols();
    let null_rational = null_rational_dim == d.null_dim();
    let rational = image_discrete && null_rational;
    let cover_finite = d.cover_finite();
    let kernel = q.group().kernel_invariants(&q.del().flatten_to_int());
    let vertex_indices: Vec<VertexIndex> = vertices(&s.polytope)?
        .into_iter()
        .map(|v| {
            let labels: Vec<Vec<BigInt>> = v.active.iter().map(|&i| s.labels[i].clone()).collect();
            let index = q.group().subgroup_index(&IntMatrix::from_cols(&labels, q.generators()));
            VertexIndex { vertex: v.point, active: v.active, index }
        })
        .collect();
    let kind = if !(rational && cover_finite) {
        Kind::Quasifold
    } else if vertex_indices.iter().all(|v| v.index.as_ref().is_some_and(One::is_one)) {
        Kind::Manifold
    } else {
        Kind::Orbifold
    };
    Ok(ClassReport {
        kind,
        rational,
        image_discrete,
        null_rational,
        null_dim: d.null_dim(),
        null_rational_dim,
        cover: d.cover.clone(),
        cover_finite,
        kernel,
        vertex_indices,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizerWitness {
    /// The element `h` of the cover kernel, as a vector of `Z^n ∩ n`.
    #[serde(serialize_with = "ser_bigint_vec")]
    pub h: Vec<BigInt>,
    /// Index of the fixed arrow in the finite model.
    pub arrow: usize,
    pub arrow_description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedModel {
    pub rule: String,
    pub h_order: Option<usize>,
    pub g_order: Option<usize>,
    pub objects: Option<usize>,
    pub arrows: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionVerdict {
    pub cover: Cover,
    pub exists: bool,
    pub reason: String,
    pub witness: Option<StabilizerWitness>,
    pub reduced_model: Option<ReducedModel>,
}

const REDUCTION_RULE: &str = "s[g,f] = s(f), t[g,f] = g·t(f), [g,f]∘[g',f'] = [gg', (g'^-1*f)∘f']";

/// `Z^r / (columns of sub)` as a product of cyclic groups, with the maps
/// between `Z^r` coordinates and element indices.
struct FiniteQuotient {
    group: FiniteGroup,
    moduli: Vec<usize>,
    /// `U` from the Smith form `U·sub·V = S`.
    u: IntMatrix,
    u_inv: IntMatrix,
}

impl FiniteQuotient {
    fn new(sub: &IntMatrix, r: usize) -> Result<Self, PratoError> {
        let snf = smith_normal_form(sub);
        let mut diag = snf.diagonal();
        diag.resize(r, BigInt::zero());
        if diag.iter().any(Zero::is_zero) {
            return Err(PratoError::Precondition("the cover has infinite kernel on Z^n ∩ n".into()));
        }
        let moduli: Vec<usize> = diag.iter().map(|x| x.to_usize().unwrap_or(usize::MAX)).collect();
        let order = moduli.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m));
        if order.is_none_or(|o| o > FINITE_MODEL_LIMIT) {
            return Err(PratoError::Precondition(format!(
                "finite model of order {} exceeds {FINITE_MODEL_LIMIT}",
                diag.iter().product::<BigInt>()
            )));
        }
        let group = moduli.iter().fold(FiniteGroup::trivial(), |g, &m| g.product(&FiniteGroup::cyclic(m)));
        let u_inv = unimodular_inverse(&snf.u).expect("Smith transform is unimodular");
        Ok(FiniteQuotient { group, moduli, u: snf.u, u_inv })
    }

    fn index_of(&self, y: &[BigInt]) -> usize {
        let c = self.u.mul_vec(y);
        c.iter().zip(&self.moduli).fold(0, |acc, (ci, &m)| {
            let r = ci.mod_floor(&BigInt::from(m));
            acc * m + r.to_usize().expect("reduced")
        })
    }

    fn coords_of(&self, mut index: usize) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); self.moduli.len()];
        for (j, &m) in self.moduli.iter().enumerate().rev() {
            c[j] = BigInt::from(index % m);
            index /= m;
        }
        self.u_inv.mul_vec(&c)
    }
}

fn express(basis: &IntMatrix, m: &IntMatrix) -> IntMatrix {
    let cols: Vec<Vec<BigInt>> = m
        .col_vectors()
        .iter()
        .map(|c| solve_integer(basis, c).expect("sublattice of the basis lattice"))
        .collect();
    IntMatrix::from_cols(&cols, basis.cols())
}

/// Freeness of the cover group on the arrows of the regular form. For the
/// universal and full-preimage covers this is structural. For a finite
/// quotient with kernel `Z`, the stabilizers are modelled by
/// `∂: L/Z -> L/ker β` (with `L = Z^n ∩ n`) translating `L/ker β ⋉ L/ker β`,
/// and the reduction groupoid is built exhaustively.
pub fn reduction_exists(d: &PratoData, s: &StackyPolytope) -> Result<ReductionVerdict, PratoError> {
    let reg = regular_value_check(d, &s.polytope)?;
    if let Some(i) = reg.failing_vertex {
        let v: Vec<String> = reg.vertices[i].vertex.iter().map(ToString::to_string).collect();
        return Err(PratoError::Precondition(format!("0 is not a regular value: rank fails at vertex ({})", v.join(", "))));
    }
    let structural = |reason: &str| ReductionVerdict {
        cover: d.cover.clone(),
        exists: true,
        reason: reason.into(),
        witness: None,
        reduced_model: Some(ReducedModel { rule: REDUCTION_RULE.into(), h_order: None, g_order: None, objects: None, arrows: None }),
    };
    match &d.cover {
        Cover::Universal => return Ok(structural("free by left translation: the universal cover acts with trivial kernel")),
        Cover::FullPreimage => return Ok(structural("free by left translation: the full preimage cover is N itself")),
        Cover::Quotient(_) => {}
    }
    let l = &d.integral_null;
    let z = &d.cover_kernel;
    let zs = &d.label_kernel;
    if !lattice_contains(zs, z) {
        return Err(PratoError::Precondition("cover kernel is not contained in the kernel of the labels".into()));
    }
    let r = l.cols();
    let h = FiniteQuotient::new(&express(l, z), r)?;
    let g = FiniteQuotient::new(&express(l, zs), r)?;
    let del: Vec<usize> = h.group.elements().map(|x| g.index_of(&h.coords_of(x))).collect();
    let cm = FiniteCrossedModule::with_trivial_action(g.group.clone(), h.group.clone(), del)
        .map_err(|e| PratoError::Data(format!("finite stabilizer model: {e}")))?;
    let model = boundary_translation(cm);
    let to_ambient = |c: Vec<BigInt>| l.mul_vec(&c);
    match reduction_groupoid(&model.cm, &model.groupoid, &model.action) {
        Ok(red) => Ok(ReductionVerdict {
            cover: d.cover.clone(),
            exists: true,
            reason: "the cover kernel equals the kernel of the labels; the finite stabilizer model is free".into(),
            witness: None,
            reduced_model: Some(ReducedModel {
                rule: REDUCTION_RULE.into(),
                h_order: Some(h.group.order()),
                g_order: Some(g.group.order()),
                objects: Some(red.groupoid.objects()),
                arrows: Some(red.groupoid.arrows()),
            }),
        }),
        Err(FinError::NotFree { h: hx, f }) => {
            let m = g.group.order();
            Ok(ReductionVerdict {
                cover: d.cover.clone(),
                exists: false,
                reason: "the cover kernel is smaller than the kernel of the labels; a nonzero element fixes an arrow".into(),
                witness: Some(StabilizerWitness {
                    h: to_ambient(h.coords_of(hx)),
                    arrow: f,
                    arrow_description: format!("(k, x) = ({}, {})", f / m, f % m),
                }),
                reduced_model: None,
            })
        }
        Err(e) => Err(PratoError::Data(format!("finite stabilizer model: {e}"))),
    }
}

/// What is reduced: the whole stacky torus at a level in `E*`, or the
/// circle along `ξ` at a level `u`.
#[derive(Clone, Debug, PartialEq)]
pub enum Reduction {
    Full(Vector),
    Direction { xi: Vector, u: Scalar },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub zero_fibre_dim: usize,
    pub null_dim: usize,
    pub e_dim: usize,
    pub reducing_rank: usize,
    pub reduced_dim: usize,
}

fn fmt_vec(v: &[Scalar]) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

pub fn reduced_dimension(d: &PratoData, p: &HPolytope, level: &Reduction) -> Result<DimensionReport, PratoError> {
    let base = |reducing_rank: usize| DimensionReport {
        zero_fibre_dim: d.zero_fibre_dim(),
        null_dim: d.null_dim(),
        e_dim: d.e_dim,
        reducing_rank,
        reduced_dim: 2 * (d.e_dim - reducing_rank),
    };
    match level {
        Reduction::Full(u) => {
            if u.len() != d.e_dim {
                return Err(PratoError::Input(format!("level has length {}, expected {}", u.len(), d.e_dim)));
            }
            for i in 0..p.facet_count() {
                let sl = p.slack(i, u);
                if sl.is_negative() {
                    return Err(PratoError::LevelOutside(fmt_vec(u)));
                }
                if sl.is_zero() {
                    return Err(PratoError::Wall { level: fmt_vec(u), wall: format!("facet {i}") });
                }
            }
            Ok(base(d.e_dim))
        }
        Reduction::Direction { xi, u } => {
            if xi.len() != d.e_dim {
                return Err(PratoError::Input(format!("direction has length {}, expected {}", xi.len(), d.e_dim)));
            }
            if xi.iter().all(Scalar::is_zero) {
                return Err(PratoError::Input("reducing direction is zero".into()));
            }
            let verts = vertices(p)?;
            let values: Vec<Scalar> = verts.iter().map(|v| dot(xi, &v.point)).collect();
            if let Some(i) = values.iter().position(|w| w == u) {
                return Err(PratoError::Wall { level: u.to_string(), wall: format!("<xi, v{i}> = {}", values[i]) });
            }
            let below = values.iter().any(|w| w < u);
            let above = values.iter().any(|w| w > u);
            if !(below && above) {
                return Err(PratoError::LevelOutside(u.to_string()));
            }
            Ok(base(1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_prato_data;
    use super::super::fixtures::*;
    use super::*;
    use crate::crossedmod::QuasiLattice;
    use crate::exact::FgAbelianGroup;

    #[test]
    fn regularity_examples() {
        let d = build_prato_data(&rational_interval(1), None).unwrap();
        let rep = regular_value_check(&d, &rational_interval(1).polytope).unwrap();
        assert!(rep.regular);
        assert!(rep.vertices.iter().all(|v| v.complement_rank == 1));

        let s = quasi_interval();
        let d = build_prato_data(&s, None).unwrap();
        assert!(regular_value_check(&d, &s.polytope).unwrap().regular);
        assert_eq!(d.iota_star.col(0), vec![sqrt2()]);
        assert_eq!(d.iota_star.col(1), vec![Scalar::one()]);

        let s = point_polytope();
        let d = build_prato_data(&s, None).unwrap();
        let rep = regular_value_check(&d, &s.polytope).unwrap();
        assert!(!rep.regular);
        assert_eq!(rep.failing_vertex, Some(0));
        assert_eq!(rep.vertices[0].complement_rank, 0);
    }

    #[test]
    fn hypotheses() {
        let s = quasi_interval();
        let d = build_prato_data(&s, None).unwrap();
        let h = hypotheses_report(&d, &s).unwrap();
        assert_eq!((h.a_regular, h.b_locally_free, h.c_leafwise_transitive, h.d_proper), (Some(true), Some(true), true, true));
        assert!(h.clean);

        let s = point_polytope();
        let d = build_prato_data(&s, None).unwrap();
        assert_eq!(hypotheses_report(&d, &s).unwrap().a_regular, Some(false));

        let q = QuasiLattice::free(Matrix::from_i64(&[&[1]]));
        let p = HPolytope::new(vec![vec![Scalar::one()]], vec![Scalar::zero()]).unwrap();
        let s = StackyPolytope::new(q, p, vec![ints(&[1])]).unwrap();
        let d = build_prato_data(&s, None).unwrap();
        let h = hypotheses_report(&d, &s).unwrap();
        assert!(!h.d_proper);
        assert_eq!(h.a_regular, None);
    }

    #[test]
    fn classification_examples() {
        let s = rational_interval(1);
        let c = classify(&build_prato_data(&s, None).unwrap(), &s).unwrap();
        assert_eq!(c.kind, Kind::Manifold);

        let s = quasi_interval();
        let c = classify(&build_prato_data(&s, None).unwrap(), &s).unwrap();
        assert_eq!(c.kind, Kind::Quasifold);
        assert!(!c.image_discrete && !c.null_rational);

        let s = rational_interval(2);
        let c = classify(&build_prato_data(&s, None).unwrap(), &s).unwrap();
        assert_eq!(c.kind, Kind::Orbifold);
        assert!(c.vertex_indices.iter().all(|v| v.index == Some(BigInt::from(2))));

        // the universal cover of a circle has infinite kernel
        let c = classify(&build_prato_data(&rational_interval(1), Some(Cover::Universal)).unwrap(), &s).unwrap();
        assert_eq!(c.kind, Kind::Quasifold);
    }

    fn two_torsion_interval() -> StackyPolytope {
        let q = QuasiLattice::new(FgAbelianGroup::new(2, IntMatrix::from_i64(&[&[0], &[2]])), Matrix::from_i64(&[&[1, 0]]));
        let p = HPolytope::new(vec![vec![Scalar::one()], vec![-Scalar::one()]], vec![Scalar::zero(), -Scalar::one()])
            .unwrap();
        StackyPolytope::new(q, p, vec![ints(&[1, 1]), ints(&[-1, 0])]).unwrap()
    }

    #[test]
    fn reduction_verdicts() {
        let s = quasi_interval();
        let v = reduction_exists(&build_prato_data(&s, None).unwrap(), &s).unwrap();
        assert!(v.exists);

        let s = rational_interval(1);
        assert!(reduction_exists(&build_prato_data(&s, None).unwrap(), &s).unwrap().exists);

        // kernel of the labels is 2L; the matching cover is free
        let s = two_torsion_interval();
        let v = reduction_exists(&build_prato_data(&s, None).unwrap(), &s).unwrap();
        assert!(v.exists, "{v:?}");
        let m = v.reduced_model.unwrap();
        assert_eq!((m.h_order, m.g_order), (Some(2), Some(2)));

        // a cover with kernel 2L over labels with kernel L: Z/2 fixes arrows
        let s = rational_interval(1);
        let d = build_prato_data(&s, Some(Cover::Quotient(vec![vec![2, 2]]))).unwrap();
        let v = reduction_exists(&d, &s).unwrap();
        assert!(!v.exists);
        let w = v.witness.unwrap();
        assert!(w.h == ints(&[1, 1]) || w.h == ints(&[-1, -1]), "{w:?}");

        let s = point_polytope();
        let d = build_prato_data(&s, None).unwrap();
        assert!(matches!(reduction_exists(&d, &s), Err(PratoError::Precondition(_))));
    }

    #[test]
    fn dimensions() {
        let s = quasi_interval();
        let d = build_prato_data(&s, None).unwrap();
        let rep = reduced_dimension(&d, &s.polytope, &Reduction::Full(vec![Scalar::from_ratio(1, 2)])).unwrap();
        assert_eq!(rep.reduced_dim, 0);
        assert_eq!(rep.zero_fibre_dim, 3);
        assert!(matches!(
            reduced_dimension(&d, &s.polytope, &Reduction::Full(vec![Scalar::one()])),
            Err(PratoError::Wall { .. })
        ));

        let s = triangle();
        let d = build_prato_data(&s, None).unwrap();
        let xi = vec![Scalar::one(), Scalar::zero()];
        let level = Reduction::Direction { xi: xi.clone(), u: Scalar::from_ratio(1, 3) };
        assert_eq!(reduced_dimension(&d, &s.polytope, &level).unwrap().reduced_dim, 2);
        let level = Reduction::Direction { xi, u: Scalar::zero() };
        assert!(matches!(reduced_dimension(&d, &s.polytope, &level), Err(PratoError::Wall { .. })));
    }
}
