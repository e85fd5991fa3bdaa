use std::io::Write;

use serde::Serialize;

use crate::crossedmod::{is_rational, QuasiLattice, QuasiLatticeReport};
use crate::exact::{dot, Matrix, Scalar, Vector};
use crate::polytope::{slice, vertices, volume, HPolytope};

use super::analysis::regular_value_check;
use super::{PratoData, PratoError, StackyPolytope};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chamber {
    pub id: usize,
    pub lo: Scalar,
    pub hi: Scalar,
    /// `V(u) = Σ c_j u^j`.
    pub coefficients: Vec<Scalar>,
    pub degree: usize,
    pub linear_coefficient: Scalar,
    pub samples: Vec<(Scalar, Scalar)>,
    /// Extra points where the fit is checked; all residuals exactly zero.
    pub checks: Vec<(Scalar, Scalar)>,
    pub residual_zero: bool,
}

impl Chamber {
    pub fn eval(&self, u: &Scalar) -> Scalar {
        self.coefficients.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * u) + c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WallValue {
    pub u: Scalar,
    pub volume: Scalar,
    pub left_limit: Option<Scalar>,
    pub right_limit: Option<Scalar>,
    pub continuous: bool,
}

/// The slice quasi-lattice `A -> E/Rξ*`, in the coordinates of the slice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedQuasiLattice {
    pub e_dim: usize,
    pub del: Vec<Vector>,
    pub validity: QuasiLatticeReport,
    pub rational: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DhRow {
    pub u: Scalar,
    /// `None` on a wall.
    pub chamber: Option<usize>,
    pub volume: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DhScanReport {
    pub xi: Vector,
    pub slice_dim: usize,
    pub walls: Vec<Scalar>,
    pub wall_values: Vec<WallValue>,
    pub chambers: Vec<Chamber>,
    pub residuals_zero: bool,
    pub degrees_bounded: bool,
    pub continuous: bool,
    /// Slices are points, given volume 1 by convention.
    pub point_slices: bool,
    pub induced_quasi_lattice: InducedQuasiLattice,
    #[serde(skip)]
    pub rows: Vec<DhRow>,
}

fn slice_volume(p: &HPolytope, xi: &[Scalar], u: &Scalar) -> Result<Scalar, PratoError> {
    Ok(volume(&slice(p, xi, u)?)?)
}

/// Monomial coefficients of the interpolant through `pts`.
fn interpolate(pts: &[(Scalar, Scalar)]) -> Vector {
    let m = pts.len();
    let rows: Vec<Vector> = pts
        .iter()
        .map(|(u, _)| {
            let mut row = Vec::with_capacity(m);
            let mut pw = Scalar::one();
            for _ in 0..m {
                row.push(pw.clone());
                pw = &pw * u;
            }
            row
        })
        .collect();
    let b: Vector = pts.iter().map(|(_, v)| v.clone()).collect();
    Matrix::from_rows(rows).solve(&b).expect("distinct nodes")
}

fn induced(q: &QuasiLattice, xi: &[Scalar]) -> InducedQuasiLattice {
    let p = xi.iter().position(|x| !x.is_zero()).expect("nonzero direction");
    let project = |a: &Vector| -> Vector {
        let r = &a[p] / &xi[p];
        (0..a.len()).filter(|&j| j != p).map(|j| &a[j] - &(&r * &xi[j])).collect()
    };
    let cols: Vec<Vector> = q.del().col_vectors().iter().map(project).collect();
    let e_dim = xi.len() - 1;
    let del = Matrix::from_cols(cols, e_dim);
    let ql = QuasiLattice::new(q.group().clone(), del.clone());
    let validity = ql.validate();
    let rational = is_rational(&ql).ok();
    InducedQuasiLattice { e_dim, del: del.row_vectors(), validity, rational }
}

/// Slice volumes `V(u) = vol(P ∩ {<ξ, η> = u})` between consecutive vertex
/// projections, fitted exactly by polynomials of degree at most the slice
/// dimension. `grid` is the spacing of the tabulated rows, as a fraction of
/// the full range.
pub fn dh_scan(d: &PratoData, s: &StackyPolytope, xi: &[Scalar], grid: f64) -> Result<DhScanReport, PratoError> {
    let p = &s.polytope;
    if xi.len() != p.dim() {
        return Err(PratoError::Input(format!("direction has length {}, expected {}", xi.len(), p.dim())));
    }
    if xi.iter().all(Scalar::is_zero) {
        return Err(PratoError::Input("reducing direction is zero".into()));
    }
    if !(grid > 0.0 && grid <= 1.0) {
        return Err(PratoError::Input("grid must lie in (0, 1]".into()));
    }
    let reg = regular_value_check(d, p)?;
    if !reg.regular {
        return Err(PratoError::Precondition("0 is not a regular value".into()));
    }
    let verts = vertices(p)?;
    if verts.is_empty() {
        return Err(PratoError::Precondition("polytope is empty".into()));
    }
    let mut walls: Vec<Scalar> = verts.iter().map(|v| dot(xi, &v.point)).collect();
    walls.sort_by(|a, b| a.partial_cmp(b).expect("same field"));
    walls.dedup();
    let slice_dim = p.dim() - 1;

    let mut chambers = Vec::new();
    for (id, w) in walls.windows(2).enumerate() {
        let (lo, hi) = (&w[0], &w[1]);
        let span = hi - lo;
        let nodes = slice_dim + 3;
        let pts: Vec<(Scalar, Scalar)> = (1..=nodes)
            .map(|j| {
                let u = lo + &(&span * &Scalar::from_ratio(j as i64, nodes as i64 + 1));
                let v = slice_volume(p, xi, &u)?;
                Ok((u, v))
            })
            .collect::<Result<_, PratoError>>()?;
        let (samples, checks) = pts.split_at(slice_dim + 1);
        let coefficients = interpolate(samples);
        let degree = coefficients.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        let mut chamber = Chamber {
            id,
            lo: lo.clone(),
            hi: hi.clone(),
            linear_coefficient: coefficients.get(1).cloned().unwrap_or_else(Scalar::zero),
            coefficients,
            degree,
            samples: samples.to_vec(),
            checks: checks.to_vec(),
            residual_zero: false,
        };
        chamber.residual_zero = checks.iter().all(|(u, v)| &chamber.eval(u) == v);
        chambers.push(chamber);
    }

    let mut wall_values = Vec::new();
    for (i, w) in walls.iter().enumerate() {
        let vol = slice_volume(p, xi, w)?;
        let left_limit = i.checked_sub(1).map(|c| chambers[c].eval(w));
        let right_limit = chambers.get(i).map(|c| c.eval(w));
        let continuous = left_limit.iter().chain(right_limit.iter()).all(|l| *l == vol);
        wall_values.push(WallValue { u: w.clone(), volume: vol, left_limit, right_limit, continuous });
    }

    let (wmin, wmax) = (&walls[0], &walls[walls.len() - 1]);
    let steps = ((1.0 / grid).round() as i64).max(1);
    let mut rows = Vec::new();
    for k in 0..=steps {
        let u = wmin + &(&(wmax - wmin) * &Scalar::from_ratio(k, steps));
        let chamber = if walls.contains(&u) {
            None
        } else {
            chambers.iter().position(|c| c.lo < u && u < c.hi)
        };
        let volume = match chamber {
            Some(c) => chambers[c].eval(&u),
            None => slice_volume(p, xi, &u)?,
        };
        rows.push(DhRow { u, chamber, volume });
    }

    Ok(DhScanReport {
        xi: xi.to_vec(),
        slice_dim,
        residuals_zero: chambers.iter().all(|c| c.residual_zero),
        degrees_bounded: chambers.iter().all(|c| c.degree <= slice_dim),
        continuous: wall_values.iter().all(|w| w.continuous),
        point_slices: slice_dim == 0,
        walls,
        wall_values,
        chambers,
        induced_quasi_lattice: induced(&s.quasi_lattice, xi),
        rows,
    })
}

/// CSV with columns `u_exact,u_float,chamber_id,V_exact,V_float`; walls are
/// marked `wall`. Row volumes inside chambers come from the exact fit.
pub fn write_csv_rows<W: Write>(rows: &[DhRow], out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["u_exact", "u_float", "chamber_id", "V_exact", "V_float"])?;
    for r in rows {
        let chamber = r.chamber.map_or_else(|| "wall".to_string(), |c| c.to_string());
        w.write_record([r.u.to_string(), r.u.decimal(), chamber, r.volume.to_string(), r.volume.decimal()])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::super::build_prato_data;
    use super::super::fixtures::*;
    use super::*;

    fn scan(s: &StackyPolytope, xi: &[i64]) -> DhScanReport {
        let d = build_prato_data(s, None).unwrap();
        let xi: Vector = xi.iter().map(|&x| Scalar::from_int(x)).collect();
        dh_scan(&d, s, &xi, 0.25).unwrap()
    }

    fn ints_s(v: &[i64]) -> Vector {
        v.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn triangle_scan() {
        let rep = scan(&triangle(), &[1, 0]);
        assert_eq!(rep.walls, ints_s(&[0, 1]));
        assert_eq!(rep.chambers.len(), 1);
        assert_eq!(rep.chambers[0].coefficients, ints_s(&[1, -1]));
        assert_eq!(rep.chambers[0].linear_coefficient, Scalar::from_int(-1));
        assert!(rep.residuals_zero && rep.continuous && rep.degrees_bounded);
        assert_eq!(rep.rows.len(), 5);
        assert_eq!(rep.rows[1].volume, Scalar::from_ratio(3, 4));
        assert_eq!(rep.induced_quasi_lattice.e_dim, 1);
        assert_eq!(rep.induced_quasi_lattice.rational, Some(true));
    }

    #[test]
    fn square_scan() {
        let rep = scan(&unit_square(), &[1, 1]);
        assert_eq!(rep.walls, ints_s(&[0, 1, 2]));
        assert_eq!(rep.chambers[0].coefficients, ints_s(&[0, 1]));
        assert_eq!(rep.chambers[1].coefficients, ints_s(&[2, -1]));
        assert!(rep.continuous);
        assert_eq!(rep.wall_values[1].volume, Scalar::one());
        assert_eq!(rep.rows[2].chamber, None);
    }

    #[test]
    fn quasi_interval_points() {
        let s = quasi_interval();
        let d = build_prato_data(&s, None).unwrap();
        let rep = dh_scan(&d, &s, &[Scalar::one()], 0.5).unwrap();
        assert!(rep.point_slices);
        assert_eq!(rep.chambers[0].coefficients, vec![Scalar::one()]);
        assert_eq!(rep.chambers[0].degree, 0);
        assert!(rep.continuous);
    }

    #[test]
    fn scan_errors() {
        let s = triangle();
        let d = build_prato_data(&s, None).unwrap();
        assert!(matches!(dh_scan(&d, &s, &ints_s(&[0, 0]), 0.1), Err(PratoError::Input(_))));
        let s = point_polytope();
        let d = build_prato_data(&s, None).unwrap();
        assert!(matches!(dh_scan(&d, &s, &ints_s(&[1]), 0.1), Err(PratoError::Precondition(_))));
    }

    #[test]
    fn csv_layout() {
        let rep = scan(&triangle(), &[1, 0]);
        let mut buf = Vec::new();
        write_csv_rows(&rep.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "u_exact,u_float,chamber_id,V_exact,V_float");
        assert_eq!(lines[1], "0,0.000000000000,wall,1,1.000000000000");
        assert_eq!(lines[2], "1/4,0.250000000000,0,3/4,0.750000000000");
        assert!(!text.contains('\r'));
    }
}
