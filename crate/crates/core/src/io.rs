//! JSON input formats: stacky polytopes, finite models and quasi-lattice
//! pairs. Scalars are exact literals `{"a": "p/q", "b": "p/q"}` meaning
//! `a + b sqrt(field_d)`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::crossedmod::{Cover, IsoCertificate, QuasiLattice};
use crate::exact::{is_square_free, FgAbelianGroup, IntMatrix, Matrix, Scalar, ScalarLiteral};
use crate::fingroupoid::models::FiniteModel;
use crate::fingroupoid::{CrossedAction, FinError, FiniteCrossedModule, FiniteGroup, FiniteGroupoid, MoveSpec};
use crate::polytope::HPolytope;
use crate::prato::StackyPolytope;

pub const SCHEMA: &str = "stacky-moment/1";

pub(crate) fn ser_bigints<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum InputError {
    /// Malformed JSON or a document not matching the schema.
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    /// Well-formed tables that violate an axiom.
    #[error(transparent)]
    Finite(#[from] FinError),
}

impl InputError {
    fn schema(path: &str, message: impl Into<String>) -> Self {
        InputError::Schema { path: path.into(), message: message.into() }
    }

    pub fn to_json(&self) -> Value {
        match self {
            InputError::Schema { path, message } => json!({"error": "schema", "path": path, "message": message}),
            InputError::Finite(FinError::Structure { what, axiom, tuple }) => {
                json!({"error": "structure", "what": what, "axiom": axiom, "tuple": tuple, "message": self.to_string()})
            }
            InputError::Finite(e) => json!({"error": "finite", "message": e.to_string()}),
        }
    }
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::schema(&format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

fn field_tag(d: u64) -> Result<u64, InputError> {
    match d {
        0 | 1 => Ok(0),
        d if is_square_free(d) => Ok(d),
        d => Err(InputError::schema("field_d", format!("{d} is not square-free"))),
    }
}

fn scalar(lit: &ScalarLiteral, d: u64, path: &str) -> Result<Scalar, InputError> {
    lit.to_scalar(d).map_err(|e| InputError::schema(path, e.to_string()))
}

fn scalar_row(row: &[ScalarLiteral], d: u64, path: &str) -> Result<Vec<Scalar>, InputError> {
    row.iter().enumerate().map(|(j, l)| scalar(l, d, &format!("{path}[{j}]"))).collect()
}

fn lit(s: &Scalar) -> ScalarLiteral {
    ScalarLiteral::from_scalar(s)
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupJson {
    generators: usize,
    #[serde(default)]
    relations: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuasiLatticeJson {
    #[serde(default)]
    field_d: Option<u64>,
    #[serde(rename = "A")]
    a: GroupJson,
    #[serde(rename = "E_dim")]
    e_dim: usize,
    /// `E_dim` rows, one column per generator.
    del: Vec<Vec<ScalarLiteral>>,
}

impl QuasiLatticeJson {
    fn build(&self, d: u64, path: &str) -> Result<QuasiLattice, InputError> {
        let g = self.a.generators;
        if self.del.len() != self.e_dim {
            return Err(InputError::schema(&format!("{path}.del"), format!("{} rows, E_dim is {}", self.del.len(), self.e_dim)));
        }
        let mut rows = Vec::with_capacity(self.e_dim);
        for (i, row) in self.del.iter().enumerate() {
            let p = format!("{path}.del[{i}]");
            if row.len() != g {
                return Err(InputError::schema(&p, format!("{} entries, A has {g} generators", row.len())));
            }
            rows.push(scalar_row(row, d, &p)?);
        }
        for (k, r) in self.a.relations.iter().enumerate() {
            if r.len() != g {
                return Err(InputError::schema(&format!("{path}.A.relations[{k}]"), format!("length {}, expected {g}", r.len())));
            }
        }
        let rels: Vec<Vec<BigInt>> = self.a.relations.iter().map(|r| big(r)).collect();
        let group = FgAbelianGroup::new(g, IntMatrix::from_cols(&rels, g));
        Ok(QuasiLattice::new(group, Matrix::from_rows_with_cols(rows, g)))
    }
}

fn quasi_lattice_json(q: &QuasiLattice, field_d: Option<u64>) -> Value {
    let mut v = json!({
        "A": {
            "generators": q.generators(),
            "relations": q.group().relations().col_vectors().iter()
                .map(|c| c.iter().map(|x| Value::from(i64::try_from(x).expect("relation fits i64"))).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        },
        "E_dim": q.e_dim(),
        "del": q.del().row_vectors().iter().map(|r| r.iter().map(lit).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    if let Some(d) = field_d {
        v["field_d"] = json!(d);
    }
    v
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeJson {
    normals: Vec<Vec<ScalarLiteral>>,
    offsets: Vec<ScalarLiteral>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StackyJson {
    schema: String,
    field_d: u64,
    quasi_lattice: QuasiLatticeJson,
    polytope: PolytopeJson,
    labels: Vec<Vec<i64>>,
    #[serde(default)]
    cover: Option<Cover>,
}

/// A stacky polytope and the cover, if the document names one.
pub fn parse_stacky_polytope(text: &str) -> Result<(StackyPolytope, Option<Cover>), InputError> {
    let doc: StackyJson = parse_json(text)?;
    if doc.schema != SCHEMA {
        return Err(InputError::schema("schema", format!("expected \"{SCHEMA}\", found \"{}\"", doc.schema)));
    }
    let d = field_tag(doc.field_d)?;
    if doc.quasi_lattice.field_d.is_some_and(|x| field_tag(x).ok() != Some(d)) {
        return Err(InputError::schema("quasi_lattice.field_d", "differs from the top-level field_d"));
    }
    let q = doc.quasi_lattice.build(d, "quasi_lattice")?;
    let e = doc.quasi_lattice.e_dim;
    let mut normals = Vec::with_capacity(doc.polytope.normals.len());
    for (i, row) in doc.polytope.normals.iter().enumerate() {
        let p = format!("polytope.normals[{i}]");
        if row.len() != e {
            return Err(InputError::schema(&p, format!("length {}, E_dim is {e}", row.len())));
        }
        normals.push(scalar_row(row, d, &p)?);
    }
    let offsets = scalar_row(&doc.polytope.offsets, d, "polytope.offsets")?;
    let p = HPolytope::with_dim(e, normals, offsets).map_err(|err| InputError::schema("polytope", err.to_string()))?;
    let labels = doc.labels.iter().map(|l| big(l)).collect();
    let s = StackyPolytope::new(q, p, labels).map_err(|err| InputError::schema("labels", err.to_string()))?;
    Ok((s, doc.cover))
}

pub fn stacky_polytope_json(s: &StackyPolytope, cover: Option<&Cover>) -> Value {
    let p = &s.polytope;
    let mut v = json!({
        "schema": SCHEMA,
        "field_d": s.field(),
        "quasi_lattice": quasi_lattice_json(&s.quasi_lattice, None),
        "polytope": {
            "normals": p.normals().iter().map(|r| r.iter().map(lit).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "offsets": p.offsets().iter().map(lit).collect::<Vec<_>>(),
        },
        "labels": s.labels.iter()
            .map(|l| l.iter().map(|x| Value::from(i64::try_from(x).expect("label fits i64"))).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    if let Some(c) = cover {
        v["cover"] = serde_json::to_value(c).expect("cover serializes");
    }
    v
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GroupoidJson {
    objects: usize,
    /// `[source, target]` per arrow.
    arrows: Vec<[usize; 2]>,
    /// `[f, g, f∘g]`.
    comp: Vec<[usize; 3]>,
    inv: Vec<usize>,
    unit: Vec<usize>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ActionJson {
    g0: Vec<Vec<usize>>,
    g1: Vec<Vec<usize>>,
    h1: Vec<Vec<usize>>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ExtendJson {
    cover: Vec<Vec<usize>>,
    phi: Vec<usize>,
}

#[derive(Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
struct MovesJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    restrict: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    extend: Option<ExtendJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quotient: Option<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FiniteModelJson {
    groups: BTreeMap<String, Vec<Vec<usize>>>,
    del: Vec<usize>,
    /// `alpha[g][h]`; trivial when absent.
    #[serde(default)]
    alpha: Option<Vec<Vec<usize>>>,
    groupoid: GroupoidJson,
    action: ActionJson,
    #[serde(default)]
    moves: Option<MovesJson>,
}

fn group_from(table: Vec<Vec<usize>>, name: &str) -> Result<FiniteGroup, InputError> {
    let n = table.len();
    if n == 0 || table.iter().any(|r| r.len() != n) {
        return Err(InputError::schema(&format!("groups.{name}"), "multiplication table must be square and nonempty"));
    }
    if table.iter().flatten().any(|&x| x >= n) {
        return Err(InputError::schema(&format!("groups.{name}"), "entry out of range"));
    }
    Ok(FiniteGroup::from_table(table)?)
}

fn check_len(v: usize, expected: usize, path: &str) -> Result<(), InputError> {
    if v == expected {
        Ok(())
    } else {
        Err(InputError::schema(path, format!("length {v}, expected {expected}")))
    }
}

pub fn parse_finite_model(text: &str) -> Result<(FiniteModel, MoveSpec), InputError> {
    let mut doc: FiniteModelJson = parse_json(text)?;
    let take = |doc: &mut FiniteModelJson, name: &str| {
        doc.groups.remove(name).ok_or_else(|| InputError::schema("groups", format!("missing group \"{name}\"")))
    };
    let g = group_from(take(&mut doc, "G")?, "G")?;
    let h = group_from(take(&mut doc, "H")?, "H")?;
    if let Some(extra) = doc.groups.keys().next() {
        return Err(InputError::schema("groups", format!("unexpected group \"{extra}\"")));
    }
    check_len(doc.del.len(), h.order(), "del")?;
    let alpha = match doc.alpha {
        Some(a) => {
            check_len(a.len(), g.order(), "alpha")?;
            for (i, r) in a.iter().enumerate() {
                check_len(r.len(), h.order(), &format!("alpha[{i}]"))?;
            }
            a
        }
        None => vec![h.elements().collect(); g.order()],
    };
    let cm = FiniteCrossedModule::new(g.clone(), h.clone(), doc.del, alpha)?;

    let gj = doc.groupoid;
    let arrows = gj.arrows.len();
    check_len(gj.inv.len(), arrows, "groupoid.inv")?;
    check_len(gj.unit.len(), gj.objects, "groupoid.unit")?;
    let mut comp = HashMap::new();
    for &[f, g2, fg] in &gj.comp {
        if f >= arrows || g2 >= arrows || fg >= arrows {
            return Err(InputError::schema("groupoid.comp", format!("arrow index out of range in [{f}, {g2}, {fg}]")));
        }
        if comp.insert((f, g2), fg).is_some_and(|old| old != fg) {
            return Err(FinError::structure("groupoid", "composition defined twice", vec![f, g2, fg]).into());
        }
    }
    let source = gj.arrows.iter().map(|a| a[0]).collect();
    let target = gj.arrows.iter().map(|a| a[1]).collect();
    let groupoid = FiniteGroupoid::new(gj.objects, source, target, gj.unit, gj.inv, comp)?;

    let a = doc.action;
    let shape = |t: &[Vec<usize>], rows: usize, cols: usize, path: &str| -> Result<(), InputError> {
        check_len(t.len(), rows, path)?;
        t.iter().enumerate().try_for_each(|(i, r)| check_len(r.len(), cols, &format!("{path}[{i}]")))
    };
    shape(&a.g0, g.order(), gj.objects, "action.g0")?;
    shape(&a.g1, g.order(), arrows, "action.g1")?;
    shape(&a.h1, h.order(), arrows, "action.h1")?;
    let action = CrossedAction { g0: a.g0, g1: a.g1, h1: a.h1 };

    let moves = doc.moves.unwrap_or_default();
    let extend = match moves.extend {
        Some(e) => Some((group_from(e.cover, "moves.extend.cover")?, e.phi)),
        None => None,
    };
    let spec = MoveSpec { restrict: moves.restrict, extend, quotient: moves.quotient };
    Ok((FiniteModel { cm, groupoid, action }, spec))
}

pub fn finite_model_json(m: &FiniteModel, moves: &MoveSpec) -> Value {
    let x = &m.groupoid;
    let arrows: Vec<[usize; 2]> = (0..x.arrows()).map(|f| [x.source(f), x.target(f)]).collect();
    let mut comp: Vec<[usize; 3]> = Vec::new();
    for f in 0..x.arrows() {
        for g in 0..x.arrows() {
            if let Some(fg) = x.compose(f, g) {
                comp.push([f, g, fg]);
            }
        }
    }
    let groupoid = GroupoidJson {
        objects: x.objects(),
        arrows,
        comp,
        inv: (0..x.arrows()).map(|f| x.inverse(f)).collect(),
        unit: (0..x.objects()).map(|o| x.unit(o)).collect(),
    };
    let cm = &m.cm;
    let alpha: Vec<Vec<usize>> = cm.g.elements().map(|g| cm.h.elements().map(|h| cm.act(g, h)).collect()).collect();
    let moves = MovesJson {
        restrict: moves.restrict.clone(),
        extend: moves.extend.as_ref().map(|(c, phi)| ExtendJson { cover: c.table().to_vec(), phi: phi.clone() }),
        quotient: moves.quotient.clone(),
    };
    let action = ActionJson { g0: m.action.g0.clone(), g1: m.action.g1.clone(), h1: m.action.h1.clone() };
    json!({
        "groups": {"G": cm.g.table(), "H": cm.h.table()},
        "del": cm.del,
        "alpha": alpha,
        "groupoid": groupoid,
        "action": action,
        "moves": moves,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateJson {
    #[serde(rename = "U")]
    u: Vec<Vec<i64>>,
    #[serde(rename = "T")]
    t: Vec<Vec<ScalarLiteral>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MoritaJson {
    left: QuasiLatticeJson,
    right: QuasiLatticeJson,
    #[serde(default)]
    certificate: Option<CertificateJson>,
}

/// Two quasi-lattices and an optional isomorphism certificate.
pub type MoritaInput = (QuasiLattice, QuasiLattice, Option<IsoCertificate>);

pub fn parse_morita_pair(text: &str) -> Result<MoritaInput, InputError> {
    let doc: MoritaJson = parse_json(text)?;
    let dl = field_tag(doc.left.field_d.unwrap_or(0))?;
    let dr = field_tag(doc.right.field_d.unwrap_or(0))?;
    let left = doc.left.build(dl, "left")?;
    let right = doc.right.build(dr, "right")?;
    let certificate = match doc.certificate {
        None => None,
        Some(c) => {
            let cols = c.u.first().map_or(0, Vec::len);
            if c.u.iter().any(|r| r.len() != cols) {
                return Err(InputError::schema("certificate.U", "ragged matrix"));
            }
            let u = IntMatrix::from_rows(c.u.iter().map(|r| big(r)).collect(), cols);
            let d = dl.max(dr);
            let tcols = c.t.first().map_or(0, Vec::len);
            let rows = c
                .t
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    if r.len() != tcols {
                        return Err(InputError::schema("certificate.T", "ragged matrix"));
                    }
                    scalar_row(r, d, &format!("certificate.T[{i}]"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(IsoCertificate { u, t: Matrix::from_rows_with_cols(rows, tcols) })
        }
    };
    Ok((left, right, certificate))
}

pub fn morita_pair_json(left: &QuasiLattice, right: &QuasiLattice, certificate: Option<&IsoCertificate>) -> Value {
    let mut v = json!({
        "left": quasi_lattice_json(left, Some(left.field())),
        "right": quasi_lattice_json(right, Some(right.field())),
    });
    if let Some(c) = certificate {
        v["certificate"] = certificate_json(c);
    }
    v
}

pub fn certificate_json(c: &IsoCertificate) -> Value {
    json!({
        "U": c.u.row_vectors().iter()
            .map(|r| r.iter().map(|x| Value::from(i64::try_from(x).expect("certificate entry fits i64"))).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "T": c.t.row_vectors().iter().map(|r| r.iter().map(lit).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroupoid::models::reduction_model;

    const QUASI_INTERVAL: &str = r#"{
        "schema": "stacky-moment/1",
        "field_d": 2,
        "quasi_lattice": {
            "A": {"generators": 2, "relations": []},
            "E_dim": 1,
            "del": [[{"a": "1", "b": "0"}, {"a": "0", "b": "-1"}]]
        },
        "polytope": {
            "normals": [[{"a": "1", "b": "0"}], [{"a": "0", "b": "-1"}]],
            "offsets": [{"a": "0", "b": "0"}, {"a": "0", "b": "-1"}]
        },
        "labels": [[1, 0], [0, 1]]
    }"#;

    #[test]
    fn stacky_polytope_round_trip() {
        let (s, cover) = parse_stacky_polytope(QUASI_INTERVAL).unwrap();
        assert!(cover.is_none());
        assert!(s.validate().valid);
        let back = stacky_polytope_json(&s, Some(&Cover::Universal)).to_string();
        let (s2, c2) = parse_stacky_polytope(&back).unwrap();
        assert_eq!(s, s2);
        assert_eq!(c2, Some(Cover::Universal));
    }

    #[test]
    fn schema_errors() {
        let bad = QUASI_INTERVAL.replace("stacky-moment/1", "other");
        assert!(matches!(parse_stacky_polytope(&bad), Err(InputError::Schema { .. })));
        let bad = QUASI_INTERVAL.replace(r#""field_d": 2"#, r#""field_d": 4"#);
        assert!(matches!(parse_stacky_polytope(&bad), Err(InputError::Schema { .. })));
        let bad = QUASI_INTERVAL.replace(r#"[[1, 0], [0, 1]]"#, r#"[[1, 0]]"#);
        assert!(matches!(parse_stacky_polytope(&bad), Err(InputError::Schema { .. })));
        assert!(matches!(parse_stacky_polytope("{"), Err(InputError::Schema { .. })));
        let e = parse_stacky_polytope("[]").unwrap_err();
        assert_eq!(e.to_json()["error"], "schema");
    }

    #[test]
    fn finite_model_round_trip() {
        let m = reduction_model(4, 2);
        let text = finite_model_json(&m, &MoveSpec::default()).to_string();
        let (m2, spec) = parse_finite_model(&text).unwrap();
        assert_eq!(m2.cm, m.cm);
        assert_eq!(m2.groupoid, m.groupoid);
        assert_eq!(m2.action, m.action);
        assert!(spec.restrict.is_none());
    }

    #[test]
    fn malformed_composition() {
        let m = reduction_model(2, 2);
        let mut v = finite_model_json(&m, &MoveSpec::default());
        let comp = v["groupoid"]["comp"].as_array_mut().unwrap();
        let last = comp.last_mut().unwrap().as_array_mut().unwrap();
        let wrong = (last[2].as_u64().unwrap() + 1) % 4;
        last[2] = json!(wrong);
        let err = parse_finite_model(&v.to_string()).unwrap_err();
        assert!(matches!(err, InputError::Finite(FinError::Structure { .. })), "{err:?}");
        assert_eq!(err.to_json()["error"], "structure");
    }

    #[test]
    fn morita_pair() {
        let text = r#"{
            "left": {"A": {"generators": 2}, "E_dim": 1, "del": [[{"a": "1", "b": "0"}, {"a": "2", "b": "0"}]]},
            "right": {"A": {"generators": 2}, "E_dim": 1, "del": [[{"a": "2", "b": "0"}, {"a": "1", "b": "0"}]]},
            "certificate": {"U": [[0, 1], [1, 0]], "T": [[{"a": "1", "b": "0"}]]}
        }"#;
        let (l, r, c) = parse_morita_pair(text).unwrap();
        let c = c.unwrap();
        crate::crossedmod::verify_iso_certificate(&l, &r, &c).unwrap();
        let back = morita_pair_json(&l, &r, Some(&c)).to_string();
        assert_eq!(parse_morita_pair(&back).unwrap(), (l, r, Some(c)));
    }
}
