//! Dense exact vectors and matrices over a [`Field`], with Gaussian
//! elimination and brute-force enumeration helpers.
//!
//! Matrices act on column vectors from the left.

use std::fmt;

use serde::Serialize;

use crate::budget::{saturating_pow, Budget};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector {
    field: Field,
    coords: Vec<Scalar>,
}

impl Vector {
    pub fn new(field: Field, coords: Vec<Scalar>) -> Result<Self> {
        if let Some(c) = coords.iter().find(|c| c.field() != field) {
            return Err(Error::MixedFields(field, c.field()));
        }
        Ok(Vector { field, coords })
    }

    pub fn zero(field: Field, dim: usize) -> Self {
        Vector {
            field,
            coords: vec![field.zero(); dim],
        }
    }

    pub fn basis(field: Field, dim: usize, j: usize) -> Self {
        let mut v = Self::zero(field, dim);
        v.coords[j] = field.one();
        v
    }

    pub fn from_i64(field: Field, coords: &[i64]) -> Self {
        Vector {
            field,
            coords: coords.iter().map(|&c| field.from_i64(c)).collect(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim(), "vector dimensions differ");
        Vector {
            field: self.field,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.add(&other.scale(-self.field.one()))
    }

    pub fn scale(&self, s: Scalar) -> Vector {
        Vector {
            field: self.field,
            coords: self.coords.iter().map(|a| *a * s).collect(),
        }
    }

    /// Scales so that the first nonzero coordinate is 1; zero stays zero.
    pub fn normalized(&self) -> Vector {
        match self.coords.iter().find(|c| !c.is_zero()) {
            Some(lead) => self.scale(lead.inv().expect("nonzero")),
            None => self.clone(),
        }
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Mat {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<Scalar>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            for s in row {
                if s.field() != field {
                    return Err(Error::MixedFields(field, s.field()));
                }
                data.push(*s);
            }
        }
        Ok(Mat {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(field, &rows).expect("rectangular input")
    }

    /// Matrix whose columns are the given vectors (all of dimension `dim`).
    pub fn from_columns(field: Field, dim: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(field, dim, cols.len());
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.dim(), dim, "column dimension");
            for i in 0..dim {
                m.set(i, j, v.coords[i]);
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector {
            field: self.field,
            coords: (0..self.rows).map(|i| self.get(i, j)).collect(),
        }
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn scale(&self, s: Scalar) -> Mat {
        Mat {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| *a * s).collect(),
        }
    }

    pub fn neg(&self) -> Mat {
        self.scale(-self.field.one())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Mat::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.dim(),
            });
        }
        let coords = (0..self.rows)
            .map(|i| (0..self.cols).fold(self.field.zero(), |acc, j| acc + self.get(i, j) * v.coords[j]))
            .collect();
        Ok(Vector {
            field: self.field,
            coords,
        })
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = m.get(row, j) * inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(r, j) - factor * m.get(row, j);
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Two-sided inverse of a square matrix.
    pub fn invert(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Mat::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, self.field.one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.get(n.wrapping_sub(1)).is_some_and(|&p| p >= n) {
            return Err(Error::Singular);
        }
        let mut inv = Mat::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Ok(inv)
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.field, self.rows)
    }

    /// Solves `self · x = b`, returning one solution if the system is consistent.
    pub fn solve(&self, b: &Vector) -> Option<Vector> {
        let mut aug = Mat::zeros(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b.coords[i]);
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = Vector::zero(self.field, self.cols);
        for (row, &col) in pivots.iter().enumerate() {
            x.coords[col] = r.get(row, self.cols);
        }
        Some(x)
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(";")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        f.write_str("]")
    }
}

impl Serialize for Mat {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl Serialize for Vector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Echelonized basis of the right null space.
pub fn kernel(m: &Mat) -> Vec<Vector> {
    let (r, pivots) = m.rref();
    let field = m.field;
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = Vector::basis(field, m.cols, f);
            for (row, &p) in pivots.iter().enumerate() {
                v.coords[p] = -r.get(row, f);
            }
            v
        })
        .collect()
}

/// Rank of a list of vectors of equal dimension.
pub fn rank_of(field: Field, dim: usize, vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Mat::from_columns(field, dim, vectors).rank()
}

/// Every vector of `F^dim` (or every nonzero one) in lexicographic order of
/// the field's element order.
pub fn enumerate_vectors(field: Field, dim: usize, nonzero_only: bool, budget: &Budget) -> Result<Vec<Vector>> {
    let order = field.order().ok_or(Error::InfiniteField(field))?;
    budget.check(saturating_pow(order, dim as u64))?;
    let els = field.elements()?;
    let mut out = Vec::with_capacity(order.pow(dim as u32) as usize);
    let mut idx = vec![0usize; dim];
    loop {
        let v = Vector {
            field,
            coords: idx.iter().map(|&i| els[i]).collect(),
        };
        if !(nonzero_only && v.is_zero()) {
            out.push(v);
        }
        // odometer with the last coordinate varying fastest
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < els.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Normalized representatives of the points of the projective space on `F^dim`.
///
/// Over the rationals only `dim <= 1` is finite.
pub fn projective_points(field: Field, dim: usize, budget: &Budget) -> Result<Vec<Vector>> {
    if !field.is_finite() {
        return match dim {
            0 => Ok(Vec::new()),
            1 => Ok(vec![Vector::basis(field, 1, 0)]),
            _ => Err(Error::InfiniteField(field)),
        };
    }
    Ok(enumerate_vectors(field, dim, true, budget)?
        .into_iter()
        .filter(|v| v.coords.iter().find(|c| !c.is_zero()).is_some_and(Scalar::is_one))
        .collect())
}

/// All invertible `dim × dim` matrices, found by filtering every candidate.
pub fn enumerate_invertible_maps(field: Field, dim: usize, budget: &Budget) -> Result<Vec<Mat>> {
    let order = field.order().ok_or(Error::InfiniteField(field))?;
    budget.check(saturating_pow(order, (dim * dim) as u64))?;
    let entries = enumerate_vectors(field, dim * dim, false, &Budget(u64::MAX))?;
    Ok(entries
        .into_iter()
        .map(|v| Mat {
            field,
            rows: dim,
            cols: dim,
            data: v.coords,
        })
        .filter(Mat::is_invertible)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_matrix_inverts() {
        let f3 = Field::Prime(3);
        assert_eq!(Mat::identity(f3, 0).invert().unwrap(), Mat::identity(f3, 0));
    }

    #[test]
    fn kernel_examples() {
        let f3 = Field::Prime(3);
        assert!(kernel(&Mat::identity(f3, 3)).is_empty());
        let f2 = Field::Prime(2);
        assert_eq!(kernel(&Mat::zeros(f2, 2, 2)).len(), 2);
        let m = Mat::from_i64(f2, &[&[0, 1], &[0, 0]]);
        assert_eq!(kernel(&m), vec![Vector::from_i64(f2, &[1, 0])]);
    }

    #[test]
    fn invert_examples() {
        let f2 = Field::Prime(2);
        assert!(Mat::identity(f2, 3).invert().unwrap().is_identity());
        let swap = Mat::from_i64(f2, &[&[0, 1], &[1, 0]]);
        assert_eq!(swap.invert().unwrap(), swap);
        let f3 = Field::Prime(3);
        let m = Mat::from_i64(f3, &[&[1, 1], &[0, 1]]);
        assert_eq!(m.invert().unwrap(), Mat::from_i64(f3, &[&[1, 2], &[0, 1]]));
        assert_eq!(Mat::from_i64(f3, &[&[1, 2], &[2, 1]]).invert(), Err(Error::Singular));
    }

    #[test]
    fn enumeration_counts() {
        let b = Budget::default();
        let f2 = Field::Prime(2);
        let f3 = Field::Prime(3);
        assert_eq!(enumerate_vectors(f2, 2, true, &b).unwrap().len(), 3);
        assert_eq!(enumerate_vectors(f3, 2, false, &b).unwrap().len(), 9);
        assert_eq!(enumerate_vectors(f2, 4, false, &b).unwrap().len(), 16);
        assert_eq!(enumerate_invertible_maps(f2, 1, &b).unwrap().len(), 1);
        // |GL_n(q)| = prod_{i<n} (q^n - q^i)
        assert_eq!(enumerate_invertible_maps(f2, 2, &b).unwrap().len(), 3 * 2);
        assert_eq!(enumerate_invertible_maps(f3, 2, &b).unwrap().len(), 8 * 6);
        assert_eq!(enumerate_invertible_maps(f2, 3, &b).unwrap().len(), 7 * 6 * 4);
        assert_eq!(projective_points(f3, 3, &b).unwrap().len(), 13);
        assert_eq!(projective_points(Field::Gf4, 2, &b).unwrap().len(), 5);
    }

    #[test]
    fn enumeration_respects_budget() {
        let err = enumerate_vectors(Field::Prime(3), 4, false, &Budget(80)).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { needed: 81, budget: 80 });
        assert!(matches!(
            enumerate_invertible_maps(Field::Rational, 1, &Budget::default()),
            Err(Error::InfiniteField(_))
        ));
    }

    #[test]
    fn rank_nullity_exhaustive_small() {
        let b = Budget::default();
        for field in [Field::Prime(2), Field::Prime(3)] {
            for entries in enumerate_vectors(field, 6, false, &b).unwrap() {
                let m = Mat {
                    field,
                    rows: 2,
                    cols: 3,
                    data: entries.coords().to_vec(),
                };
                let ker = kernel(&m);
                assert_eq!(m.rank() + ker.len(), 3);
                for v in ker {
                    assert!(m.mul_vec(&v).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn inverses_are_two_sided() {
        let b = Budget::default();
        for m in enumerate_invertible_maps(Field::Prime(3), 2, &b).unwrap() {
            let inv = m.invert().unwrap();
            assert!(m.mul(&inv).unwrap().is_identity());
            assert!(inv.mul(&m).unwrap().is_identity());
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let f5 = Field::Prime(5);
        let m = Mat::from_i64(f5, &[&[1, 2], &[2, 4]]);
        assert!(m.solve(&Vector::from_i64(f5, &[1, 3])).is_none());
        let x = m.solve(&Vector::from_i64(f5, &[1, 2])).unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), Vector::from_i64(f5, &[1, 2]));
    }

    proptest::proptest! {
        #[test]
        fn inverse_round_trip(entries in proptest::collection::vec(-4i64..5, 9), prime in proptest::sample::select(vec![0u8, 7])) {
            let field = if prime == 0 { Field::Rational } else { Field::Prime(prime) };
            let rows: Vec<Vec<Scalar>> = entries.chunks(3).map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
            let m = Mat::from_rows(field, &rows).unwrap();
            match m.invert() {
                Ok(inv) => {
                    proptest::prop_assert!(m.mul(&inv).unwrap().is_identity());
                    proptest::prop_assert!(inv.mul(&m).unwrap().is_identity());
                }
                Err(_) => proptest::prop_assert!(m.rank() < 3 && !kernel(&m).is_empty()),
            }
        }
    }
}
