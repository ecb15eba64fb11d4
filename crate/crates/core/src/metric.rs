//! Metric vector spaces `(V, Q)`.
//!
//! The form is stored as the values `Q(e_j)` together with the strict upper
//! triangle `B(e_i, e_j)`, `i < j`. In characteristic 2 the quadratic form is
//! not recoverable from its polar form, so `Q` is primary data.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{enumerate_vectors, kernel, rank_of, Mat, Vector};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSpace {
    field: Field,
    q_diag: Vec<Scalar>,
    /// `B(e_i, e_j)` for `i < j`, row by row.
    b_upper: Vec<Scalar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorClass {
    Zero,
    Singular,
    Regular,
}

/// Which exception to the Cartan–Dieudonné theorem a space realises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exception {
    /// `|F| = 2`, `dim V >= 2`, `Q = x0 x1` in a suitable basis.
    Ex1,
    /// `|F| = 2`, `dim V = 4`, `Q = x0 x1 + x2 x3`.
    Ex2,
}

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    // rows 0..i contribute (dim-1) + (dim-2) + ... + (dim-i)
    i * dim - i * (i + 1) / 2 + (j - i - 1)
}

impl QuadraticSpace {
    pub fn new(field: Field, q_diag: Vec<Scalar>, b_upper: Vec<Scalar>) -> Result<Self> {
        let dim = q_diag.len();
        let expected = dim * dim.saturating_sub(1) / 2;
        if b_upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: b_upper.len(),
            });
        }
        if let Some(s) = q_diag.iter().chain(&b_upper).find(|s| s.field() != field) {
            return Err(Error::MixedFields(field, s.field()));
        }
        Ok(QuadraticSpace { field, q_diag, b_upper })
    }

    pub fn from_i64(field: Field, q_diag: &[i64], b_upper: &[i64]) -> Result<Self> {
        Self::new(
            field,
            q_diag.iter().map(|&v| field.from_i64(v)).collect(),
            b_upper.iter().map(|&v| field.from_i64(v)).collect(),
        )
    }

    /// `Q(x) = Σ q_j x_j²`.
    pub fn diagonal(field: Field, q_diag: &[i64]) -> Self {
        let n = q_diag.len();
        Self::from_i64(field, q_diag, &vec![0; n * n.saturating_sub(1) / 2]).expect("valid")
    }

    pub fn zero_form(field: Field, dim: usize) -> Self {
        Self::diagonal(field, &vec![0; dim])
    }

    /// `Q(x) = x0 x1` on a space of dimension `dim >= 2`.
    pub fn ex1(field: Field, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::validation("space", "ex1 needs dimension at least 2"));
        }
        let mut b = vec![field.zero(); dim * (dim - 1) / 2];
        b[upper_index(dim, 0, 1)] = field.one();
        Self::new(field, vec![field.zero(); dim], b)
    }

    /// `Q(x) = x0 x1 + x2 x3`.
    pub fn ex2(field: Field) -> Self {
        let mut b = vec![field.zero(); 6];
        b[upper_index(4, 0, 1)] = field.one();
        b[upper_index(4, 2, 3)] = field.one();
        Self::new(field, vec![field.zero(); 4], b).expect("valid")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.q_diag.len()
    }

    pub fn q_diag(&self) -> &[Scalar] {
        &self.q_diag
    }

    pub fn b_upper(&self) -> &[Scalar] {
        &self.b_upper
    }

    /// `B(e_i, e_j)`, including the diagonal `2 Q(e_i)`.
    pub fn b(&self, i: usize, j: usize) -> Scalar {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.q_diag[i] + self.q_diag[i],
            std::cmp::Ordering::Less => self.b_upper[upper_index(self.dim(), i, j)],
            std::cmp::Ordering::Greater => self.b_upper[upper_index(self.dim(), j, i)],
        }
    }

    pub fn q(&self, j: usize) -> Scalar {
        self.q_diag[j]
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        if x.field() != self.field {
            return Err(Error::MixedFields(self.field, x.field()));
        }
        Ok(())
    }

    pub fn eval_q(&self, x: &Vector) -> Result<Scalar> {
        self.check_dim(x)?;
        let c = x.coords();
        let mut acc = self.field.zero();
        for i in 0..self.dim() {
            acc += c[i] * c[i] * self.q_diag[i];
            for j in i + 1..self.dim() {
                acc += c[i] * c[j] * self.b(i, j);
            }
        }
        Ok(acc)
    }

    pub fn eval_b(&self, x: &Vector, y: &Vector) -> Result<Scalar> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let (a, b) = (x.coords(), y.coords());
        let mut acc = self.field.zero();
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                acc += ai * bj * self.b(i, j);
            }
        }
        Ok(acc)
    }

    /// Matrix of `B`; its diagonal holds `2 Q(e_j)`.
    pub fn gram(&self) -> Mat {
        let n = self.dim();
        let mut g = Mat::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, self.b(i, j));
            }
        }
        g
    }

    /// Basis of the radical `V^⊥`.
    pub fn radical(&self) -> Vec<Vector> {
        kernel(&self.gram())
    }

    /// Whether `Q` vanishes on the radical. `Q` is additive there, so the
    /// basis decides it.
    pub fn q_vanishes_on_radical(&self) -> bool {
        self.radical()
            .iter()
            .all(|r| self.eval_q(r).expect("dims match").is_zero())
    }

    pub fn is_zero_form(&self) -> bool {
        self.q_diag.iter().chain(&self.b_upper).all(Scalar::is_zero)
    }

    pub fn classify_vector(&self, x: &Vector) -> Result<VectorClass> {
        if x.is_zero() {
            self.check_dim(x)?;
            return Ok(VectorClass::Zero);
        }
        Ok(if self.eval_q(x)?.is_zero() {
            VectorClass::Singular
        } else {
            VectorClass::Regular
        })
    }

    /// Matrix of `x ↦ x − B(r, x) Q(r)⁻¹ r`.
    pub fn reflection(&self, r: &Vector) -> Result<Mat> {
        let qr = self.eval_q(r)?;
        if qr.is_zero() {
            return Err(Error::NotRegular);
        }
        let qinv = qr.inv()?;
        let cols: Vec<Vector> = (0..self.dim())
            .map(|j| {
                let e = Vector::basis(self.field, self.dim(), j);
                let coef = self.eval_b(r, &e).expect("dims match") * qinv;
                e.sub(&r.scale(coef))
            })
            .collect();
        Ok(Mat::from_columns(self.field, self.dim(), &cols))
    }

    /// Checks `c Q = Q̃ ∘ m` and returns `c`.
    ///
    /// Finite fields are checked on every vector. Over the rationals the basis
    /// values and basis pairs determine both forms, which is sufficient.
    /// When `Q(V) = {0}` the ratio is 1 by convention.
    pub fn similarity_ratio(&self, dst: &QuadraticSpace, m: &Mat, budget: &Budget) -> Result<Option<Scalar>> {
        if dst.dim() != self.dim() || m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: if dst.dim() != self.dim() { dst.dim() } else { m.rows() },
            });
        }
        if dst.field != self.field || m.field() != self.field {
            return Err(Error::MixedFields(self.field, dst.field));
        }
        if !m.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let image = |x: &Vector| m.mul_vec(x).expect("dims match");
        if self.field.is_finite() {
            let all = enumerate_vectors(self.field, self.dim(), true, budget)?;
            let ratio = all
                .iter()
                .find_map(|x| {
                    let q = self.eval_q(x).ok()?;
                    (!q.is_zero()).then(|| dst.eval_q(&image(x)).ok().map(|t| t / q))
                })
                .flatten();
            let c = match ratio {
                Some(c) if c.is_zero() => return Ok(None),
                Some(c) => c,
                None => self.field.one(),
            };
            let ok = all
                .iter()
                .all(|x| self.eval_q(x).unwrap() * c == dst.eval_q(&image(x)).unwrap());
            return Ok(ok.then_some(c));
        }
        let n = self.dim();
        let basis: Vec<Vector> = (0..n).map(|j| Vector::basis(self.field, n, j)).collect();
        let imgs: Vec<Vector> = basis.iter().map(image).collect();
        let mut pairs = Vec::new();
        for i in 0..n {
            pairs.push((self.q(i), dst.eval_q(&imgs[i])?));
            for j in i + 1..n {
                pairs.push((self.b(i, j), dst.eval_b(&imgs[i], &imgs[j])?));
            }
        }
        let c = pairs
            .iter()
            .find(|(s, _)| !s.is_zero())
            .map(|(s, t)| *t / *s)
            .unwrap_or_else(|| self.field.one());
        if c.is_zero() {
            return Ok(None);
        }
        Ok(pairs.iter().all(|(s, t)| *s * c == *t).then_some(c))
    }

    pub fn is_isometry(&self, dst: &QuadraticSpace, m: &Mat, budget: &Budget) -> Result<bool> {
        Ok(self.similarity_ratio(dst, m, budget)?.is_some_and(|c| c.is_one()))
    }

    /// Metric data of the subspace spanned by `basis`, in that basis.
    pub fn restrict(&self, basis: &[Vector]) -> Result<QuadraticSpace> {
        for v in basis {
            self.check_dim(v)?;
        }
        if rank_of(self.field, self.dim(), basis) != basis.len() {
            return Err(Error::DependentBasis);
        }
        let k = basis.len();
        let q = basis.iter().map(|v| self.eval_q(v)).collect::<Result<Vec<_>>>()?;
        let mut b = Vec::with_capacity(k * k.saturating_sub(1) / 2);
        for i in 0..k {
            for j in i + 1..k {
                b.push(self.eval_b(&basis[i], &basis[j])?);
            }
        }
        QuadraticSpace::new(self.field, q, b)
    }

    /// `(V, cQ)`.
    pub fn scaled(&self, c: Scalar) -> QuadraticSpace {
        QuadraticSpace {
            field: self.field,
            q_diag: self.q_diag.iter().map(|q| *q * c).collect(),
            b_upper: self.b_upper.iter().map(|b| *b * c).collect(),
        }
    }

    /// The space `(V, Q̃)` with `Q̃(y) = c Q(m⁻¹ y)`, making `m` a similarity of
    /// ratio `c` from `self`.
    pub fn transport(&self, m: &Mat, c: Scalar) -> Result<QuadraticSpace> {
        let inv = m.invert().map_err(|_| Error::NotInvertible)?;
        let cols = inv.columns();
        Ok(self.restrict(&cols)?.scaled(c))
    }

    /// An orthogonal basis found by symmetric elimination, starting from the
    /// standard basis.
    pub fn orthogonal_basis(&self) -> Result<Vec<Vector>> {
        let standard: Vec<Vector> = (0..self.dim())
            .map(|j| Vector::basis(self.field, self.dim(), j))
            .collect();
        self.orthogonal_basis_from(&standard)
    }

    /// Symmetric elimination on the span of `start`: pick a regular vector,
    /// project the remaining vectors onto its orthogonal complement, recurse.
    pub fn orthogonal_basis_from(&self, start: &[Vector]) -> Result<Vec<Vector>> {
        if self.field.characteristic() == 2 {
            return Err(Error::CharTwo);
        }
        if rank_of(self.field, self.dim(), start) != start.len() {
            return Err(Error::DependentBasis);
        }
        let mut rest: Vec<Vector> = start.to_vec();
        let mut out = Vec::with_capacity(start.len());
        while !rest.is_empty() {
            let q = |v: &Vector| self.eval_q(v).expect("dims match");
            let b = |u: &Vector, v: &Vector| self.eval_b(u, v).expect("dims match");
            let regular = if let Some(i) = rest.iter().position(|v| !q(v).is_zero()) {
                Some(rest.remove(i))
            } else {
                // Q vanishes on the vectors; in char ≠ 2 some sum is regular
                // unless B vanishes on the span too.
                let mut found = None;
                'search: for i in 0..rest.len() {
                    for j in i + 1..rest.len() {
                        if !b(&rest[i], &rest[j]).is_zero() {
                            found = Some((i, j));
                            break 'search;
                        }
                    }
                }
                found.map(|(i, j)| {
                    let v = rest[i].add(&rest[j]);
                    rest.remove(i);
                    v
                })
            };
            let Some(r) = regular else {
                // totally isotropic and pairwise orthogonal
                out.append(&mut rest);
                break;
            };
            let brr = b(&r, &r);
            let brr_inv = brr.inv().expect("regular vector in char ≠ 2");
            rest = rest.iter().map(|w| w.sub(&r.scale(b(&r, w) * brr_inv))).collect();
            out.push(r);
        }
        Ok(out)
    }

    /// Detects the two Cartan–Dieudonné exceptions by counting values of `Q`.
    ///
    /// Over GF(2) a form equivalent to `x0 x1` on `dim V` dimensions has a
    /// radical of codimension 2 on which `Q` vanishes and exactly
    /// `2^(dim-2)` regular vectors; `x0 x1 + x2 x3` is the nondegenerate
    /// 4-dimensional form with 6 regular vectors.
    pub fn exception(&self) -> Option<Exception> {
        if self.field != Field::Prime(2) || self.dim() < 2 {
            return None;
        }
        let all = enumerate_vectors(self.field, self.dim(), true, &Budget(u64::MAX)).ok()?;
        let regular = all.iter().filter(|x| !self.eval_q(x).unwrap().is_zero()).count();
        let rad = self.radical();
        let n = self.dim();
        if rad.len() + 2 == n && self.q_vanishes_on_radical() && regular == 1 << (n - 2) {
            return Some(Exception::Ex1);
        }
        if n == 4 && rad.is_empty() && regular == 6 {
            return Some(Exception::Ex2);
        }
        None
    }
}

impl fmt::Display for QuadraticSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:([", self.field)?;
        for (i, q) in self.q_diag.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str("],[")?;
        for (i, b) in self.b_upper.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("])")
    }
}

impl Serialize for QuadraticSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn split_args(inner: &str) -> Vec<&str> {
    if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    }
}

/// Parses a form description over a known field: `diag(q0,...)`,
/// `hyperbolic2`, `ex1(k)`, `ex2`, `zero(k)` or `([q0,...],[b01,b02,...])`.
pub fn parse_form(field: Field, text: &str) -> Result<QuadraticSpace> {
    let t = text.trim();
    let call = |name: &str| {
        t.strip_prefix(name)
            .map(str::trim_start)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    let scalars =
        |items: Vec<&str>| -> Result<Vec<Scalar>> { items.into_iter().map(|s| field.parse_scalar(s)).collect() };
    let count = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| Error::parse(format!("expected a dimension, found `{s}`")))
    };
    if t == "hyperbolic2" {
        return QuadraticSpace::ex1(field, 2);
    }
    if t == "ex2" {
        return Ok(QuadraticSpace::ex2(field));
    }
    if let Some(inner) = call("diag") {
        let q = scalars(split_args(inner))?;
        let n = q.len();
        return QuadraticSpace::new(field, q, vec![field.zero(); n * n.saturating_sub(1) / 2]);
    }
    if let Some(inner) = call("zero") {
        return Ok(QuadraticSpace::zero_form(field, count(inner)?));
    }
    if let Some(inner) = call("ex1") {
        return QuadraticSpace::ex1(field, count(inner)?);
    }
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let inner = inner.trim();
        let (q, b) = inner
            .strip_prefix('[')
            .and_then(|r| r.split_once(']'))
            .ok_or_else(|| Error::parse(format!("malformed raw form `{t}`")))?;
        let b = b
            .trim()
            .strip_prefix(',')
            .map(str::trim)
            .and_then(|r| r.strip_prefix('['))
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::parse(format!("malformed raw form `{t}`")))?;
        return QuadraticSpace::new(field, scalars(split_args(q))?, scalars(split_args(b))?).map_err(|e| match e {
            Error::DimensionMismatch { expected, found } => {
                Error::validation("space", format!("b_upper needs {expected} entries, found {found}"))
            }
            other => other,
        });
    }
    Err(Error::parse(format!("unknown form `{t}`")))
}

impl FromStr for QuadraticSpace {
    type Err = Error;

    /// `<field>:<form>`, e.g. `gf(3):diag(1,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let (field, form) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("expected `<field>:<form>`, found `{s}`")))?;
        parse_form(field.parse()?, form)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::Prime(2)
    }
    fn f3() -> Field {
        Field::Prime(3)
    }
    fn v(field: Field, c: &[i64]) -> Vector {
        Vector::from_i64(field, c)
    }

    #[test]
    fn eval_q_examples() {
        let h = QuadraticSpace::ex1(f2(), 2).unwrap();
        assert_eq!(h.eval_q(&v(f2(), &[1, 1])).unwrap(), f2().one());
        assert!(h.eval_q(&v(f2(), &[0, 0])).unwrap().is_zero());
        let d = QuadraticSpace::diagonal(f3(), &[1, 1]);
        assert_eq!(d.eval_q(&v(f3(), &[1, 2])).unwrap(), f3().from_i64(2));
        assert!(matches!(d.eval_q(&v(f3(), &[1])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn eval_b_examples() {
        let h = QuadraticSpace::ex1(f2(), 2).unwrap();
        assert_eq!(h.eval_b(&v(f2(), &[1, 0]), &v(f2(), &[0, 1])).unwrap(), f2().one());
        assert!(h.eval_b(&v(f2(), &[1, 1]), &v(f2(), &[0, 0])).unwrap().is_zero());
    }

    #[test]
    fn polar_identity_exhaustive() {
        let b = Budget::default();
        let spaces = [
            QuadraticSpace::ex1(f2(), 3).unwrap(),
            QuadraticSpace::from_i64(f2(), &[1, 0, 1], &[1, 1, 0]).unwrap(),
            QuadraticSpace::from_i64(f3(), &[1, 2, 0], &[1, 0, 2]).unwrap(),
            QuadraticSpace::from_i64(Field::Gf4, &[1, 0], &[1]).unwrap(),
        ];
        for s in &spaces {
            let all = enumerate_vectors(s.field(), s.dim(), false, &b).unwrap();
            for x in &all {
                let qx = s.eval_q(x).unwrap();
                assert_eq!(s.eval_b(x, x).unwrap(), qx + qx);
                for y in &all {
                    let lhs = s.eval_b(x, y).unwrap();
                    let rhs = s.eval_q(&x.add(y)).unwrap() - qx - s.eval_q(y).unwrap();
                    assert_eq!(lhs, rhs);
                    assert_eq!(lhs, s.eval_b(y, x).unwrap());
                }
                for l in s.field().elements().unwrap() {
                    assert_eq!(s.eval_q(&x.scale(l)).unwrap(), l * l * qx);
                }
            }
        }
    }

    #[test]
    fn radical_examples() {
        assert!(QuadraticSpace::diagonal(f3(), &[1, 1]).radical().is_empty());
        let h3 = QuadraticSpace::ex1(f2(), 3).unwrap();
        assert_eq!(h3.radical(), vec![v(f2(), &[0, 0, 1])]);
        assert!(QuadraticSpace::zero_form(f3(), 0).radical().is_empty());
    }

    #[test]
    fn classify_examples() {
        let h = QuadraticSpace::ex1(f2(), 2).unwrap();
        assert_eq!(h.classify_vector(&v(f2(), &[0, 0])).unwrap(), VectorClass::Zero);
        assert_eq!(h.classify_vector(&v(f2(), &[1, 0])).unwrap(), VectorClass::Singular);
        assert_eq!(h.classify_vector(&v(f2(), &[1, 1])).unwrap(), VectorClass::Regular);
    }

    #[test]
    fn reflection_examples() {
        let h = QuadraticSpace::ex1(f2(), 2).unwrap();
        let swap = Mat::from_i64(f2(), &[&[0, 1], &[1, 0]]);
        assert_eq!(h.reflection(&v(f2(), &[1, 1])).unwrap(), swap);
        assert_eq!(h.reflection(&v(f2(), &[1, 0])), Err(Error::NotRegular));

        let d = QuadraticSpace::diagonal(f3(), &[1, 1]);
        let r = v(f3(), &[1, 0]);
        let xi = d.reflection(&r).unwrap();
        assert_eq!(xi.mul_vec(&v(f3(), &[0, 1])).unwrap(), v(f3(), &[0, 1]));
        assert_eq!(xi.mul_vec(&r).unwrap(), r.scale(-f3().one()));
    }

    #[test]
    fn reflections_exhaustive() {
        let b = Budget::default();
        let spaces = [
            QuadraticSpace::ex1(f2(), 3).unwrap(),
            QuadraticSpace::from_i64(f2(), &[1, 1, 0], &[0, 0, 1]).unwrap(),
            QuadraticSpace::from_i64(f3(), &[1, 2, 0], &[0, 0, 0]).unwrap(),
            QuadraticSpace::diagonal(Field::Prime(5), &[1, 2]),
        ];
        for s in &spaces {
            let all = enumerate_vectors(s.field(), s.dim(), false, &b).unwrap();
            let rad = s.radical();
            for r in &all {
                if s.classify_vector(r).unwrap() != VectorClass::Regular {
                    continue;
                }
                let xi = s.reflection(r).unwrap();
                assert!(xi.mul(&xi).unwrap().is_identity());
                assert_eq!(xi.mul_vec(r).unwrap(), r.scale(-s.field().one()));
                assert!(s.is_isometry(s, &xi, &b).unwrap());
                for w in &rad {
                    assert_eq!(&xi.mul_vec(w).unwrap(), w);
                }
                for x in &all {
                    if s.eval_b(r, x).unwrap().is_zero() {
                        assert_eq!(&xi.mul_vec(x).unwrap(), x);
                    }
                }
                let in_radical = rank_of(s.field(), s.dim(), &[rad.clone(), vec![r.clone()]].concat()) == rad.len();
                assert_eq!(xi.is_identity(), in_radical);
            }
        }
    }

    #[test]
    fn identity_reflection_iff_regular_radical_vector() {
        // char 2 with Q(V^⊥) ≠ {0}: radical spanned by e2 with Q(e2) = 1
        let s = QuadraticSpace::from_i64(f2(), &[0, 0, 1], &[1, 0, 0]).unwrap();
        let b = Budget::default();
        let rad = s.radical();
        assert_eq!(rad, vec![v(f2(), &[0, 0, 1])]);
        for r in enumerate_vectors(f2(), 3, true, &b).unwrap() {
            if let Ok(xi) = s.reflection(&r) {
                assert_eq!(xi.is_identity(), r == rad[0]);
            }
        }
    }

    #[test]
    fn similarity_ratio_examples() {
        let b = Budget::default();
        let d = QuadraticSpace::diagonal(f3(), &[1, 1]);
        let id = Mat::identity(f3(), 2);
        assert_eq!(d.similarity_ratio(&d, &id, &b).unwrap(), Some(f3().one()));
        let two = f3().from_i64(2);
        assert_eq!(d.similarity_ratio(&d.scaled(two), &id, &b).unwrap(), Some(two));
        // doubling both axes has ratio 4 = 1: an isometry of (V,Q) but not of (V,2Q)
        let dbl = id.scale(two);
        assert_eq!(d.similarity_ratio(&d, &dbl, &b).unwrap(), Some(f3().one()));
        assert!(!d.is_isometry(&d.scaled(two), &dbl, &b).unwrap());
        assert_eq!(
            d.similarity_ratio(&d, &Mat::zeros(f3(), 2, 2), &b),
            Err(Error::NotInvertible)
        );
        // zero form: ratio 1 by convention
        let z = QuadraticSpace::zero_form(f3(), 2);
        assert_eq!(z.similarity_ratio(&z, &dbl, &b).unwrap(), Some(f3().one()));
        // not a similarity
        let shear = Mat::from_i64(f3(), &[&[1, 1], &[0, 1]]);
        assert_eq!(d.similarity_ratio(&d, &shear, &b).unwrap(), None);
    }

    #[test]
    fn similarity_ratio_over_rationals() {
        let q = Field::Rational;
        let s = QuadraticSpace::from_i64(q, &[1, -1], &[1]).unwrap();
        let m = Mat::from_i64(q, &[&[2, 1], &[1, 3]]);
        let c = q.from_i64(-3);
        let t = s.transport(&m, c).unwrap();
        assert_eq!(s.similarity_ratio(&t, &m, &Budget::default()).unwrap(), Some(c));
    }

    #[test]
    fn transport_is_similarity_exhaustive() {
        let b = Budget::default();
        let s = QuadraticSpace::from_i64(f3(), &[1, 2], &[1]).unwrap();
        for m in crate::linalg::enumerate_invertible_maps(f3(), 2, &b).unwrap() {
            for c in f3().units().unwrap() {
                let t = s.transport(&m, c).unwrap();
                assert_eq!(s.similarity_ratio(&t, &m, &b).unwrap(), Some(c));
            }
        }
    }

    #[test]
    fn restrict_examples() {
        let d = QuadraticSpace::diagonal(f3(), &[1, 2]);
        let std = vec![v(f3(), &[1, 0]), v(f3(), &[0, 1])];
        assert_eq!(d.restrict(&std).unwrap(), d);
        let h3 = QuadraticSpace::ex1(f2(), 3).unwrap();
        assert_eq!(
            h3.restrict(&[v(f2(), &[0, 0, 1])]).unwrap(),
            QuadraticSpace::zero_form(f2(), 1)
        );
        assert_eq!(d.restrict(&[]).unwrap().dim(), 0);
        assert_eq!(
            d.restrict(&[v(f3(), &[1, 1]), v(f3(), &[2, 2])]),
            Err(Error::DependentBasis)
        );
    }

    #[test]
    fn orthogonal_basis_examples() {
        let d = QuadraticSpace::diagonal(f3(), &[1, 2, 1]);
        let std: Vec<Vector> = (0..3).map(|j| Vector::basis(f3(), 3, j)).collect();
        assert_eq!(d.orthogonal_basis().unwrap(), std);

        let hyp = QuadraticSpace::from_i64(f3(), &[0, 0], &[1]).unwrap();
        let basis = hyp.orthogonal_basis().unwrap();
        assert_eq!(basis.len(), 2);
        assert!(hyp.eval_b(&basis[0], &basis[1]).unwrap().is_zero());
        // the alternative basis {(1,1),(1,2)} has Q-values 1 and −1
        let alt = [v(f3(), &[1, 1]), v(f3(), &[1, 2])];
        assert!(hyp.eval_b(&alt[0], &alt[1]).unwrap().is_zero());
        assert_eq!(hyp.eval_q(&alt[0]).unwrap(), f3().one());
        assert_eq!(hyp.eval_q(&alt[1]).unwrap(), -f3().one());

        assert_eq!(
            QuadraticSpace::ex1(f2(), 2).unwrap().orthogonal_basis(),
            Err(Error::CharTwo)
        );
    }

    #[test]
    fn orthogonal_basis_degenerate_and_rational() {
        let s = QuadraticSpace::from_i64(Field::Prime(5), &[0, 0, 0], &[1, 0, 0]).unwrap();
        let basis = s.orthogonal_basis().unwrap();
        assert_eq!(basis.len(), 3);
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(s.eval_b(&basis[i], &basis[j]).unwrap().is_zero());
            }
        }
        let q = QuadraticSpace::from_i64(Field::Rational, &[0, 0, 1], &[1, 1, 1]).unwrap();
        let basis = q.orthogonal_basis().unwrap();
        assert_eq!(rank_of(Field::Rational, 3, &basis), 3);
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(q.eval_b(&basis[i], &basis[j]).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn exception_detection() {
        assert_eq!(QuadraticSpace::ex1(f2(), 2).unwrap().exception(), Some(Exception::Ex1));
        assert_eq!(QuadraticSpace::ex1(f2(), 4).unwrap().exception(), Some(Exception::Ex1));
        assert_eq!(QuadraticSpace::ex2(f2()).exception(), Some(Exception::Ex2));
        // x0x1 after a change of basis is still ex1
        let m = Mat::from_i64(f2(), &[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let t = QuadraticSpace::ex1(f2(), 3).unwrap().transport(&m, f2().one()).unwrap();
        assert_eq!(t.exception(), Some(Exception::Ex1));
        // anisotropic plane x0² + x0x1 + x1²
        let aniso = QuadraticSpace::from_i64(f2(), &[1, 1], &[1]).unwrap();
        assert_eq!(aniso.exception(), None);
        assert_eq!(QuadraticSpace::ex1(f3(), 2).unwrap().exception(), None);
        // elliptic 4-space
        let ell = QuadraticSpace::from_i64(f2(), &[0, 0, 1, 1], &[1, 0, 0, 0, 0, 1]).unwrap();
        assert_eq!(ell.exception(), None);
    }

    #[test]
    fn parse_forms() {
        let s: QuadraticSpace = "gf(3):diag(1,1)".parse().unwrap();
        assert_eq!(s, QuadraticSpace::diagonal(f3(), &[1, 1]));
        let h: QuadraticSpace = "gf(2):hyperbolic2".parse().unwrap();
        assert_eq!(h, QuadraticSpace::ex1(f2(), 2).unwrap());
        let e: QuadraticSpace = "gf(2):ex2".parse().unwrap();
        assert_eq!(e, QuadraticSpace::ex2(f2()));
        let z: QuadraticSpace = "gf(5):zero(3)".parse().unwrap();
        assert_eq!(z.dim(), 3);
        let r: QuadraticSpace = "gf(2):([0,0,1],[1,0,0])".parse().unwrap();
        assert_eq!(r, QuadraticSpace::from_i64(f2(), &[0, 0, 1], &[1, 0, 0]).unwrap());
        let q: QuadraticSpace = "q:diag(-1)".parse().unwrap();
        assert_eq!(q.q(0), Field::Rational.from_i64(-1));
        let d0: QuadraticSpace = "gf(3):diag()".parse().unwrap();
        assert_eq!(d0.dim(), 0);
        assert!("gf(6):diag(1)".parse::<QuadraticSpace>().is_err());
        assert!("gf(3):([1,1],[])".parse::<QuadraticSpace>().is_err());
        assert!("gf(3):circle".parse::<QuadraticSpace>().is_err());
    }

    #[test]
    fn upper_index_layout() {
        let mut expected = 0;
        for i in 0..5 {
            for j in i + 1..5 {
                assert_eq!(upper_index(5, i, j), expected);
                expected += 1;
            }
        }
    }
}
