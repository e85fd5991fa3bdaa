//! Exact two-phase simplex with Bland's rule.

use serde::Serialize;

use crate::exact::{dot, Scalar, Vector};

use super::{HPolytope, PolytopeError};

/// Outcome of minimizing `<c, η>` over a polytope.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LpOutcome {
    Optimal { value: Scalar, witness: Vector },
    /// `P + t·ray ⊆ P` for `t ≥ 0` and `<c, ray> < 0`.
    Unbounded { ray: Vector },
    /// `y ≥ 0` with `yᵀA = 0` and `yᵀλ > 0`.
    Infeasible { farkas: Vector },
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Scalar> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

enum Std {
    Optimal(Vector),
    Unbounded(Vector),
    Infeasible,
}

struct Tableau {
    rows: Vec<Vector>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Scalar {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        let pivot_row: Vector = self.rows[r].iter().map(|x| x / &p).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Runs to optimality over columns `< allowed`; `Err(j)` if column `j`
    /// enters with no leaving row.
    fn run(&mut self, cost: &[Scalar], allowed: usize) -> Result<(), usize> {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        r = &r - &(&cost[b] * &self.rows[i][j]);
                    }
                }
                r.is_negative()
            });
            let Some(j) = entering else { return Ok(()) };
            let mut leave: Option<(usize, Scalar)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][j].is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / &self.rows[i][j];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return Err(j),
            }
        }
    }

    fn solution(&self, n: usize) -> Vector {
        let mut x = vec![Scalar::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs(i).clone();
            }
        }
        x
    }
}

/// `min cost·x` subject to `a x = b`, `x ≥ 0`, with `b ≥ 0`.
fn simplex_standard(a: &[Vector], b: &[Scalar], cost: &[Scalar]) -> Std {
    let m = a.len();
    let n = cost.len();
    let width = n + m;
    let rows = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut t = Tableau { rows, basis: (n..n + m).collect(), width };
    let phase1: Vector = (0..width).map(|j| if j < n { Scalar::zero() } else { Scalar::one() }).collect();
    t.run(&phase1, width).expect("phase one is bounded below");
    let infeasible = t.basis.iter().enumerate().any(|(i, &bv)| bv >= n && !t.rhs(i).is_zero());
    if infeasible {
        return Std::Infeasible;
    }
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut full_cost = cost.to_vec();
    full_cost.extend((0..m).map(|_| Scalar::zero()));
    match t.run(&full_cost, n) {
        Ok(()) => Std::Optimal(t.solution(n)),
        Err(j) => {
            let mut ray = vec![Scalar::zero(); n];
            ray[j] = Scalar::one();
            for (i, &bv) in t.basis.iter().enumerate() {
                if bv < n {
                    ray[bv] = -&t.rows[i][j];
                }
            }
            Std::Unbounded(ray)
        }
    }
}

/// Exact minimum of `<c, η>` over `P`.
pub fn lp_solve(p: &HPolytope, c: &[Scalar]) -> Result<LpOutcome, PolytopeError> {
    let n = p.dim();
    if c.len() != n {
        return Err(PolytopeError::Shape(format!("objective has length {}, expected {n}", c.len())));
    }
    p.check_field(c)?;
    let m = p.facet_count();
    // Columns: η⁺ (n), η⁻ (n), surplus (m).
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let a = &p.normals()[i];
        let mut row: Vector = a.clone();
        row.extend(a.iter().map(|x| -x));
        row.extend((0..m).map(|k| if k == i { -Scalar::one() } else { Scalar::zero() }));
        let mut b = p.offsets()[i].clone();
        if b.is_negative() {
            row = row.iter().map(|x| -x).collect();
            b = -b;
        }
        rows.push(row);
        rhs.push(b);
    }
    let mut cost: Vector = c.to_vec();
    cost.extend(c.iter().map(|x| -x));
    cost.extend((0..m).map(|_| Scalar::zero()));
    let split = |x: &Vector| -> Vector { (0..n).map(|j| &x[j] - &x[n + j]).collect() };
    Ok(match simplex_standard(&rows, &rhs, &cost) {
        Std::Optimal(x) => {
            let witness = split(&x);
            LpOutcome::Optimal { value: dot(c, &witness), witness }
        }
        Std::Unbounded(r) => LpOutcome::Unbounded { ray: split(&r) },
        Std::Infeasible => LpOutcome::Infeasible { farkas: farkas_witness(p) },
    })
}

/// Solves `y ≥ 0`, `Aᵀy = 0`, `λᵀy = 1`; feasible whenever `P` is empty.
fn farkas_witness(p: &HPolytope) -> Vector {
    let (n, m) = (p.dim(), p.facet_count());
    let mut rows: Vec<Vector> = (0..n).map(|j| (0..m).map(|i| p.normals()[i][j].clone()).collect()).collect();
    rows.push(p.offsets().to_vec());
    let mut rhs = vec![Scalar::zero(); n];
    rhs.push(Scalar::one());
    match simplex_standard(&rows, &rhs, &vec![Scalar::zero(); m]) {
        Std::Optimal(y) => y,
        _ => unreachable!("Farkas alternative must be feasible for an empty polytope"),
    }
}
