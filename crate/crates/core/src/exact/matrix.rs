//! Dense matrices over `Q(sqrt(d))` with exact Gaussian elimination.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::intmat::IntMatrix;
use super::scalar::{denominator_lcm, Scalar};
use super::FieldError;

pub type Vector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Output of [`rank_kernel_solve`].
#[derive(Clone, Debug, PartialEq)]
pub struct KernelReport {
    pub rank: usize,
    pub kernel_basis: Vec<Vector>,
    pub row_space_basis: Vec<Vector>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_rows_with_cols(rows, cols)
    }

    /// Like `from_rows` but keeps the column count when `rows` is empty.
    pub fn from_rows_with_cols(rows: Vec<Vector>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        let n = rows.len();
        Matrix { rows: n, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_cols(cols: Vec<Vector>, rows: usize) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.into_iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix columns");
            for (i, v) in c.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect()).collect(),
        )
    }

    pub fn from_int_matrix(m: &IntMatrix) -> Self {
        let mut out = Matrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, Scalar::from_bigint(m.get(i, j)));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn col_vectors(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    /// The common field tag of all entries (0 if all rational).
    pub fn field(&self) -> Result<u64, FieldError> {
        common_field(&self.data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix, FieldError> {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Scalar::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc.try_add(&a.try_mul(other.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|i| dot(&self.row(i), v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Reduced row echelon form, scanning columns left to right.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = Scalar::one() / m.get(r, c);
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Kernel basis with a 1 in each free column.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let Echelon { reduced, pivots } = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -reduced.get(r, f);
                }
                v
            })
            .collect()
    }

    /// Some solution of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vector> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let Echelon { reduced, pivots } = aug.echelon();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = reduced.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let Echelon { reduced, pivots } = aug.echelon();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, reduced.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Scalar::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det = det * &pivot;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) / &pivot;
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Splits every entry `a + b sqrt(d)` into two rational rows, giving a
    /// rational matrix with twice the rows whose integer kernel equals the
    /// integer kernel of `self`. Each pair of rows is scaled to integers.
    pub fn flatten_to_int(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(2 * self.rows, self.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            let scale = denominator_lcm(&row);
            for (j, v) in row.iter().enumerate() {
                let (a, b) = v.coefficients();
                out.set(2 * i, j, (a * &scale).to_integer());
                out.set(2 * i + 1, j, (b * &scale).to_integer());
            }
        }
        out
    }

    /// The same flattening as rationals (no row scaling).
    pub fn flatten_to_rational(&self) -> Matrix {
        let mut out = Matrix::zeros(2 * self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (a, b) = self.get(i, j).coefficients();
                out.set(2 * i, j, Scalar::rational(a));
                out.set(2 * i + 1, j, Scalar::rational(b));
            }
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn common_field(values: &[Scalar]) -> Result<u64, FieldError> {
    let mut d = 0;
    for v in values {
        match (d, v.field()) {
            (_, 0) => {}
            (0, e) => d = e,
            (d0, e) if d0 == e => {}
            (d0, e) => return Err(FieldError::Mismatch(d0, e)),
        }
    }
    Ok(d)
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    assert_eq!(a.len(), b.len(), "dot product length mismatch");
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Scalar::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

/// Exact rank, kernel and row space of `m`.
pub fn rank_kernel_solve(m: &Matrix) -> Result<KernelReport, FieldError> {
    m.field()?;
    let Echelon { reduced, pivots } = m.echelon();
    let row_space_basis = (0..pivots.len()).map(|r| reduced.row(r)).collect();
    Ok(KernelReport { rank: pivots.len(), kernel_basis: m.kernel_basis(), row_space_basis })
}

/// Whether the additive subgroup of `E` generated by `vectors` is discrete.
///
/// Discreteness holds exactly when the `Q`-dimension of the span (after
/// flattening each coordinate into its two rational coefficients) equals
/// the real dimension of the span.
pub fn discrete_subgroup_test(vectors: &[Vector]) -> Result<bool, FieldError> {
    let Some(first) = vectors.first() else {
        return Ok(true);
    };
    let m = Matrix::from_cols(vectors.to_vec(), first.len());
    m.field()?;
    Ok(rational_span_dim(&m) == m.rank())
}

/// `dim_Q` of the span of the columns of `m`.
pub fn rational_span_dim(m: &Matrix) -> usize {
    m.flatten_to_rational().rank()
}

/// Scalar vector from integers.
pub fn int_vector(v: &[BigInt]) -> Vector {
    v.iter().map(Scalar::from_bigint).collect()
}

pub(crate) fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScalarLiteral {
    pub a: String,
    pub b: String,
}

impl ScalarLiteral {
    pub fn from_scalar(s: &Scalar) -> Self {
        let (a, b) = s.coefficients();
        let fmt = |q: num_rational::BigRational| {
            if q.denom().is_one() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        };
        ScalarLiteral { a: fmt(a), b: fmt(b) }
    }

    pub fn to_scalar(&self, d: u64) -> Result<Scalar, FieldError> {
        let a = super::scalar::parse_ratio(&self.a)?;
        let b = super::scalar::parse_ratio(&self.b)?;
        if b.is_zero() {
            return Ok(Scalar::rational(a));
        }
        if d < 2 {
            return Err(FieldError::IrrationalWithoutField);
        }
        Scalar::new(a, b, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Scalar {
        Scalar::sqrt_of(2).unwrap()
    }

    #[test]
    fn kernel_of_quasi_row() {
        let m = Matrix::from_rows(vec![vec![Scalar::one(), -sqrt2()]]);
        let rep = rank_kernel_solve(&m).unwrap();
        assert_eq!(rep.rank, 1);
        assert_eq!(rep.kernel_basis, vec![vec![sqrt2(), Scalar::one()]]);
    }

    #[test]
    fn identity_and_zero() {
        let rep = rank_kernel_solve(&Matrix::identity(3)).unwrap();
        assert_eq!(rep.rank, 3);
        assert!(rep.kernel_basis.is_empty());
        let rep = rank_kernel_solve(&Matrix::zeros(2, 2)).unwrap();
        assert_eq!(rep.rank, 0);
        assert_eq!(rep.kernel_basis, vec![unit_vector(2, 0), unit_vector(2, 1)]);
        assert!(rep.row_space_basis.is_empty());
    }

    #[test]
    fn mixed_fields_rejected() {
        let m = Matrix::from_rows(vec![vec![sqrt2(), Scalar::sqrt_of(3).unwrap()]]);
        assert!(rank_kernel_solve(&m).is_err());
    }

    #[test]
    fn inverse_and_determinant() {
        let m = Matrix::from_rows(vec![
            vec![Scalar::one(), sqrt2()],
            vec![Scalar::from_int(2), Scalar::from_int(3)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.determinant(), Scalar::from_int(3) - Scalar::from_int(2) * sqrt2());
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = Matrix::from_i64(&[&[1, 1], &[2, 2]]);
        let x = m.solve(&[Scalar::from_int(3), Scalar::from_int(6)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![Scalar::from_int(3), Scalar::from_int(6)]);
        assert!(m.solve(&[Scalar::from_int(1), Scalar::from_int(3)]).is_none());
    }

    #[test]
    fn discreteness() {
        let one = vec![Scalar::one()];
        assert!(!discrete_subgroup_test(&[one.clone(), vec![sqrt2()]]).unwrap());
        assert!(discrete_subgroup_test(&[one.clone(), vec![Scalar::from_int(2)]]).unwrap());
        assert!(discrete_subgroup_test(&[]).unwrap());
        // 1/2 and 1/3 generate (1/6)Z
        assert!(discrete_subgroup_test(&[
            vec![Scalar::from_ratio(1, 2)],
            vec![Scalar::from_ratio(1, 3)]
        ])
        .unwrap());
    }

    #[test]
    fn literal_roundtrip() {
        let v = Scalar::quadratic((-3, 4), (5, 7), 2).unwrap();
        let lit = ScalarLiteral::from_scalar(&v);
        assert_eq!(lit, ScalarLiteral { a: "-3/4".into(), b: "5/7".into() });
        assert_eq!(lit.to_scalar(2).unwrap(), v);
        assert_eq!(lit.to_scalar(0), Err(FieldError::IrrationalWithoutField));
    }
}
