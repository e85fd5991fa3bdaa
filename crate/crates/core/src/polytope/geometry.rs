//! Vertices, faces, slices and volume.

use std::collections::BTreeSet;
use std::cmp::Ordering;

use serde::Serialize;

use crate::exact::{dot, Matrix, Scalar, Vector};

use super::lp::{lp_solve, LpOutcome};
use super::{HPolytope, PolytopeError};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vertex {
    pub point: Vector,
    /// Every facet active at the vertex.
    pub active: Vec<usize>,
}

fn unit(n: usize, j: usize, sign: i64) -> Vector {
    (0..n).map(|k| if k == j { Scalar::from_int(sign) } else { Scalar::zero() }).collect()
}

fn unbounded_direction(p: &HPolytope) -> Result<Option<Vector>, PolytopeError> {
    for j in 0..p.dim() {
        for sign in [1, -1] {
            match lp_solve(p, &unit(p.dim(), j, sign))? {
                LpOutcome::Unbounded { ray } => return Ok(Some(ray)),
                LpOutcome::Infeasible { .. } => return Ok(None),
                LpOutcome::Optimal { .. } => {}
            }
        }
    }
    Ok(None)
}

/// Bounded iff every `±e_j` objective has a finite minimum (or `P` is empty).
pub fn is_bounded(p: &HPolytope) -> Result<bool, PolytopeError> {
    Ok(unbounded_direction(p)?.is_none())
}

fn ensure_bounded(p: &HPolytope) -> Result<(), PolytopeError> {
    match unbounded_direction(p)? {
        None => Ok(()),
        Some(ray) => Err(PolytopeError::Unbounded { direction: ray.iter().map(ToString::to_string).collect() }),
    }
}

pub(crate) fn lex_cmp(a: &[Scalar], b: &[Scalar]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).expect("same field"))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Advances `idx` to the next `k`-subset of `0..m` in lexicographic order.
fn next_subset(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] < m - (k - pos) {
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All vertices, sorted lexicographically, each with its full active set.
pub fn vertices(p: &HPolytope) -> Result<Vec<Vertex>, PolytopeError> {
    ensure_bounded(p)?;
    let (n, m) = (p.dim(), p.facet_count());
    let mut points: Vec<Vector> = Vec::new();
    if n == 0 {
        if p.contains(&[]) {
            points.push(Vec::new());
        }
    } else if m >= n {
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let a = Matrix::from_rows(idx.iter().map(|&i| p.normals()[i].clone()).collect());
            if a.rank() == n {
                let b: Vector = idx.iter().map(|&i| p.offsets()[i].clone()).collect();
                if let Some(x) = a.solve(&b) {
                    if p.contains(&x) && !points.contains(&x) {
                        points.push(x);
                    }
                }
            }
            if !next_subset(&mut idx, m) {
                break;
            }
        }
    }
    points.sort_by(|a, b| lex_cmp(a, b));
    Ok(points
        .into_iter()
        .map(|point| {
            let active = p.active_set(&point);
            Vertex { point, active }
        })
        .collect())
}

/// Facets whose removal leaves the polyhedron unchanged, removed in index
/// order so that duplicates keep their first copy.
pub fn redundant_facets(p: &HPolytope) -> Result<Vec<usize>, PolytopeError> {
    let m = p.facet_count();
    let mut kept: Vec<usize> = (0..m).collect();
    let mut redundant = Vec::new();
    for i in 0..m {
        let others: Vec<usize> = kept.iter().copied().filter(|&k| k != i).collect();
        let q = HPolytope::unchecked(
            p.dim(),
            others.iter().map(|&k| p.normals()[k].clone()).collect(),
            others.iter().map(|&k| p.offsets()[k].clone()).collect(),
        )?;
        let drop = match lp_solve(&q, &p.normals()[i])? {
            LpOutcome::Optimal { value, .. } => value >= p.offsets()[i],
            LpOutcome::Infeasible { .. } => true,
            LpOutcome::Unbounded { .. } => false,
        };
        if drop {
            redundant.push(i);
            kept = others;
        }
    }
    Ok(redundant)
}

/// Every vertex lies on exactly `dim` irredundant facets.
pub fn is_simple(p: &HPolytope) -> Result<bool, PolytopeError> {
    let verts = vertices(p)?;
    let redundant: BTreeSet<usize> = redundant_facets(p)?.into_iter().collect();
    Ok(verts
        .iter()
        .all(|v| v.active.iter().filter(|i| !redundant.contains(i)).count() == p.dim()))
}

/// Coordinate eliminated when slicing: the leftmost nonzero entry of `ξ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlicePivot {
    pub index: usize,
}

fn pivot_of(xi: &[Scalar]) -> Result<usize, PolytopeError> {
    xi.iter().position(|x| !x.is_zero()).ok_or(PolytopeError::ZeroDirection)
}

/// `P ∩ {<ξ, η> = u}` in the coordinates `η_j`, `j ≠ p`, where `p` is the
/// leftmost nonzero entry of `ξ`. Zero-normal rows that hold are dropped;
/// a violated one is kept and makes the slice empty.
pub fn slice(p: &HPolytope, xi: &[Scalar], u: &Scalar) -> Result<HPolytope, PolytopeError> {
    if xi.len() != p.dim() {
        return Err(PolytopeError::Shape(format!("direction has length {}, expected {}", xi.len(), p.dim())));
    }
    let mut extra = xi.to_vec();
    extra.push(u.clone());
    p.check_field(&extra)?;
    let k = pivot_of(xi)?;
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    for (a, lambda) in p.normals().iter().zip(p.offsets()) {
        let r = &a[k] / &xi[k];
        let normal: Vector = (0..p.dim()).filter(|&j| j != k).map(|j| &a[j] - &(&r * &xi[j])).collect();
        let offset = lambda - &(&r * u);
        if normal.iter().all(Scalar::is_zero) {
            if offset.is_positive() {
                normals.push(normal);
                offsets.push(offset);
            }
            continue;
        }
        normals.push(normal);
        offsets.push(offset);
    }
    HPolytope::unchecked(p.dim() - 1, normals, offsets)
}

/// Point of the hyperplane with slice coordinates `y`.
pub fn slice_lift(xi: &[Scalar], u: &Scalar, y: &[Scalar]) -> Result<Vector, PolytopeError> {
    let k = pivot_of(xi)?;
    let rest: Vector = (0..xi.len()).filter(|&j| j != k).map(|j| xi[j].clone()).collect();
    let val = &(u - &dot(&rest, y)) / &xi[k];
    let mut eta = y.to_vec();
    eta.insert(k, val);
    Ok(eta)
}

/// Dimension of the affine hull of `points`; `None` when empty.
pub fn affine_dimension(points: &[Vector]) -> Option<usize> {
    let first = points.first()?;
    if points.len() == 1 {
        return Some(0);
    }
    let diffs: Vec<Vector> = points[1..].iter().map(|v| v.iter().zip(first).map(|(a, b)| a - b).collect()).collect();
    Some(Matrix::from_rows(diffs).rank())
}

fn simplex_fan(verts: &[usize], k: usize, all: &[Vertex], out: &mut Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
    let base = verts[0];
    if k == 0 {
        prefix.push(base);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    let facets: BTreeSet<usize> = verts.iter().flat_map(|&v| all[v].active.iter().copied()).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in facets {
        let sub: Vec<usize> = verts.iter().copied().filter(|&v| all[v].active.contains(&i)).collect();
        if sub.len() < k || sub.len() == verts.len() || sub.contains(&base) || seen.contains(&sub) {
            continue;
        }
        let pts: Vec<Vector> = sub.iter().map(|&v| all[v].point.clone()).collect();
        if affine_dimension(&pts) != Some(k - 1) {
            continue;
        }
        seen.insert(sub.clone());
        prefix.push(base);
        simplex_fan(&sub, k - 1, all, out, prefix);
        prefix.pop();
    }
}

/// Lebesgue volume in ambient coordinates, by recursive fan triangulation
/// from the lexicographically smallest vertex of each face. Lower
/// dimensional polytopes have volume 0; a point in dimension 0 has volume 1.
pub fn volume(p: &HPolytope) -> Result<Scalar, PolytopeError> {
    let verts = vertices(p)?;
    let d = p.dim();
    if verts.is_empty() {
        return Ok(Scalar::zero());
    }
    if d == 0 {
        return Ok(Scalar::one());
    }
    let pts: Vec<Vector> = verts.iter().map(|v| v.point.clone()).collect();
    if affine_dimension(&pts) != Some(d) {
        return Ok(Scalar::zero());
    }
    let mut simplices = Vec::new();
    let idx: Vec<usize> = (0..verts.len()).collect();
    simplex_fan(&idx, d, &verts, &mut simplices, &mut Vec::new());
    let mut total = Scalar::zero();
    for s in &simplices {
        let v0 = &verts[s[0]].point;
        let rows: Vec<Vector> = s[1..]
            .iter()
            .map(|&v| verts[v].point.iter().zip(v0).map(|(a, b)| a - b).collect())
            .collect();
        total = &total + &Matrix::from_rows(rows).determinant().abs();
    }
    let fact: i64 = (1..=d as i64).product();
    Ok(&total / &Scalar::from_int(fact))
}
