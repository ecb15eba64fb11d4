//! The Clifford algebra `Cl(V, Q)` on sparse blade-mask multivectors.
//!
//! Basis blades `e_{j1} ⋯ e_{jk}` with `j1 < ⋯ < jk` are indexed by the bit
//! pattern of their indices. Products of blades are canonicalised by adjacent
//! transpositions using `e_j² = Q(e_j)` and `e_i e_j = B(e_i, e_j) − e_j e_i`,
//! which stays correct for non-orthogonal bases and in characteristic 2.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

use crate::budget::{saturating_pow, Budget};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{Mat, Vector};
use crate::metric::QuadraticSpace;

/// Largest supported `dim V`; the algebra then has `2^MAX_DIM` blades.
pub const MAX_DIM: usize = 6;

type Sparse = Vec<(u32, Scalar)>;

/// Precomputed multiplication data for one quadratic space.
#[derive(Debug)]
pub struct CliffordAlgebra {
    space: QuadraticSpace,
    /// `products[a * size + b]` is the canonical expansion of `e_a e_b`.
    products: Vec<Sparse>,
    /// Reversal of each basis blade.
    reversals: Vec<Sparse>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    /// Degree in `Z/2`, if homogeneous. The zero element counts as even.
    pub fn degree(self) -> Option<u32> {
        match self {
            Parity::Even => Some(0),
            Parity::Odd => Some(1),
            Parity::Mixed => None,
        }
    }
}

fn add_into(acc: &mut BTreeMap<u32, Scalar>, mask: u32, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.entry(mask) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = *e.get() + c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

impl CliffordAlgebra {
    pub fn new(space: QuadraticSpace) -> Result<Arc<Self>> {
        let n = space.dim();
        if n > MAX_DIM {
            return Err(Error::TooLarge(n));
        }
        let size = 1usize << n;
        let mut alg = CliffordAlgebra {
            space,
            products: Vec::new(),
            reversals: Vec::new(),
        };
        let mut products = Vec::with_capacity(size * size);
        for a in 0..size as u32 {
            for b in 0..size as u32 {
                let mut cur: BTreeMap<u32, Scalar> = BTreeMap::new();
                cur.insert(a, alg.field().one());
                for j in bits(b) {
                    cur = alg.times_vector(&cur, j);
                }
                products.push(cur.into_iter().collect());
            }
        }
        alg.products = products;
        alg.reversals = (0..size as u32)
            .map(|a| {
                let mut cur: BTreeMap<u32, Scalar> = BTreeMap::new();
                cur.insert(0, alg.field().one());
                for j in bits(a).into_iter().rev() {
                    cur = alg.times_vector(&cur, j);
                }
                cur.into_iter().collect()
            })
            .collect();
        Ok(Arc::new(alg))
    }

    /// `x · e_j` for a sparse `x`.
    fn times_vector(&self, x: &BTreeMap<u32, Scalar>, j: usize) -> BTreeMap<u32, Scalar> {
        let mut out = BTreeMap::new();
        for (&mask, &c) in x {
            for (m, d) in self.blade_times_vector(mask, j) {
                add_into(&mut out, m, c * d);
            }
        }
        out
    }

    fn blade_times_vector(&self, mask: u32, j: usize) -> Sparse {
        let one = self.field().one();
        if mask == 0 {
            return vec![(1 << j, one)];
        }
        let top = 31 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << top);
        match top.cmp(&j) {
            Ordering::Less => vec![(mask | 1 << j, one)],
            Ordering::Equal => {
                let q = self.space.q(j);
                if q.is_zero() {
                    vec![]
                } else {
                    vec![(rest, q)]
                }
            }
            Ordering::Greater => {
                // prefix · e_top · e_j = B(e_top, e_j) prefix − (prefix · e_j) · e_top
                let mut acc = BTreeMap::new();
                add_into(&mut acc, rest, self.space.b(top, j));
                for (m, d) in self.blade_times_vector(rest, j) {
                    debug_assert!(m < 1 << top);
                    add_into(&mut acc, m | 1 << top, -d);
                }
                acc.into_iter().collect()
            }
        }
    }

    pub fn space(&self) -> &QuadraticSpace {
        &self.space
    }

    pub fn field(&self) -> Field {
        self.space.field()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Number of basis blades, `2^dim`.
    pub fn size(&self) -> usize {
        1 << self.dim()
    }

    /// Expansion of `e_a e_b`.
    pub fn blade_product(&self, a: u32, b: u32) -> &[(u32, Scalar)] {
        &self.products[a as usize * self.size() + b as usize]
    }

    pub fn even_masks(&self) -> Vec<u32> {
        (0..self.size() as u32).filter(|m| m.count_ones() % 2 == 0).collect()
    }

    pub fn odd_masks(&self) -> Vec<u32> {
        (0..self.size() as u32).filter(|m| m.count_ones() % 2 == 1).collect()
    }
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// An element of `Cl(V, Q)`; zero coefficients are never stored.
#[derive(Clone)]
pub struct Multivector {
    alg: Arc<CliffordAlgebra>,
    terms: BTreeMap<u32, Scalar>,
}

fn same_algebra(a: &Arc<CliffordAlgebra>, b: &Arc<CliffordAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || a.space == b.space
}

impl Multivector {
    pub fn zero(alg: &Arc<CliffordAlgebra>) -> Self {
        Multivector {
            alg: alg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(alg: &Arc<CliffordAlgebra>, s: Scalar) -> Self {
        Self::from_terms(alg, [(0, s)])
    }

    pub fn one(alg: &Arc<CliffordAlgebra>) -> Self {
        Self::scalar(alg, alg.field().one())
    }

    pub fn blade(alg: &Arc<CliffordAlgebra>, mask: u32) -> Self {
        Self::from_terms(alg, [(mask, alg.field().one())])
    }

    /// Embeds `x ∈ V` as `Σ x_j e_j`.
    pub fn vector(alg: &Arc<CliffordAlgebra>, x: &Vector) -> Self {
        assert_eq!(x.dim(), alg.dim(), "vector dimension");
        Self::from_terms(alg, x.coords().iter().enumerate().map(|(j, &c)| (1u32 << j, c)))
    }

    /// Builds a multivector, summing repeated masks and dropping zeros.
    pub fn from_terms(alg: &Arc<CliffordAlgebra>, terms: impl IntoIterator<Item = (u32, Scalar)>) -> Self {
        let mut acc = BTreeMap::new();
        for (m, c) in terms {
            assert!((m as usize) < alg.size(), "blade mask out of range");
            add_into(&mut acc, m, c);
        }
        Multivector {
            alg: alg.clone(),
            terms: acc,
        }
    }

    /// Coefficients indexed by blade mask.
    pub fn from_dense(alg: &Arc<CliffordAlgebra>, coeffs: &[Scalar]) -> Self {
        Self::from_terms(alg, coeffs.iter().enumerate().map(|(m, &c)| (m as u32, c)))
    }

    pub fn to_dense(&self) -> Vec<Scalar> {
        let mut out = vec![self.field().zero(); self.alg.size()];
        for (&m, &c) in &self.terms {
            out[m as usize] = c;
        }
        out
    }

    pub fn algebra(&self) -> &Arc<CliffordAlgebra> {
        &self.alg
    }

    pub fn space(&self) -> &QuadraticSpace {
        &self.alg.space
    }

    pub fn field(&self) -> Field {
        self.alg.field()
    }

    pub fn terms(&self) -> &BTreeMap<u32, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, mask: u32) -> Scalar {
        self.terms.get(&mask).copied().unwrap_or_else(|| self.field().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The scalar `s` if `self = s · 1`.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(self.field().zero()),
            1 => self.terms.get(&0).copied(),
            _ => None,
        }
    }

    /// The vector `x` if `self` lies in `V`.
    pub fn as_vector(&self) -> Option<Vector> {
        if self.terms.keys().any(|m| m.count_ones() != 1) {
            return None;
        }
        let coords = (0..self.alg.dim()).map(|j| self.coefficient(1 << j)).collect();
        Some(Vector::new(self.field(), coords).expect("same field"))
    }

    fn check_same(&self, other: &Multivector) -> Result<()> {
        if same_algebra(&self.alg, &other.alg) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &Multivector) -> Result<Multivector> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (&m, &c) in &other.terms {
            add_into(&mut terms, m, c);
        }
        Ok(Multivector {
            alg: self.alg.clone(),
            terms,
        })
    }

    pub fn sub(&self, other: &Multivector) -> Result<Multivector> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Multivector {
        self.scale(-self.field().one())
    }

    pub fn scale(&self, s: Scalar) -> Multivector {
        if s.is_zero() {
            return Self::zero(&self.alg);
        }
        Multivector {
            alg: self.alg.clone(),
            terms: self.terms.iter().map(|(&m, &c)| (m, c * s)).collect(),
        }
    }

    /// The geometric product.
    pub fn mul(&self, other: &Multivector) -> Result<Multivector> {
        self.check_same(other)?;
        let zero = self.field().zero();
        let mut acc = vec![zero; self.alg.size()];
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                let cab = ca * cb;
                for &(m, c) in self.alg.blade_product(a, b) {
                    acc[m as usize] += cab * c;
                }
            }
        }
        Ok(Self::from_dense(&self.alg, &acc))
    }

    /// `σ`: negates the odd part.
    pub fn main_involution(&self) -> Multivector {
        Multivector {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&m, &c)| (m, if m.count_ones() % 2 == 1 { -c } else { c }))
                .collect(),
        }
    }

    /// `α`: reverses the order of the factors of each blade.
    pub fn reversal(&self) -> Multivector {
        let mut acc = BTreeMap::new();
        for (&m, &c) in &self.terms {
            for &(r, d) in &self.alg.reversals[m as usize] {
                add_into(&mut acc, r, c * d);
            }
        }
        Multivector {
            alg: self.alg.clone(),
            terms: acc,
        }
    }

    /// Least `k` with `self ∈ Cl^(k)`.
    pub fn filtration_degree(&self) -> Result<u32> {
        self.terms
            .keys()
            .map(|m| m.count_ones())
            .max()
            .ok_or(Error::ZeroElement)
    }

    pub fn parity(&self) -> Parity {
        let even = self.terms.keys().any(|m| m.count_ones() % 2 == 0);
        let odd = self.terms.keys().any(|m| m.count_ones() % 2 == 1);
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    pub fn even_part(&self) -> Multivector {
        self.filter(|m| m.count_ones() % 2 == 0)
    }

    pub fn odd_part(&self) -> Multivector {
        self.filter(|m| m.count_ones() % 2 == 1)
    }

    fn filter(&self, keep: impl Fn(u32) -> bool) -> Multivector {
        Multivector {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(&m, _)| keep(m))
                .map(|(&m, &c)| (m, c))
                .collect(),
        }
    }

    /// Matrix of `y ↦ self · y` in the blade basis.
    pub fn left_mul_matrix(&self) -> Mat {
        let size = self.alg.size();
        let mut out = Mat::zeros(self.field(), size, size);
        for (&a, &ca) in &self.terms {
            for b in 0..size {
                for &(m, c) in self.alg.blade_product(a, b as u32) {
                    let cur = out.get(m as usize, b);
                    out.set(m as usize, b, cur + ca * c);
                }
            }
        }
        out
    }

    /// Two-sided inverse, if `self` is a unit.
    pub fn try_inverse(&self) -> Option<Multivector> {
        if self.is_zero() {
            return None;
        }
        if let Some(s) = self.as_scalar() {
            return Some(Self::scalar(&self.alg, s.inv().ok()?));
        }
        let one = Self::one(&self.alg);
        let rhs = Vector::new(self.field(), one.to_dense()).expect("same field");
        let x = self.left_mul_matrix().solve(&rhs)?;
        let inv = Self::from_dense(&self.alg, x.coords());
        (inv.mul(self).ok()? == one).then_some(inv)
    }

    /// Rescales so the coefficient of the smallest supported mask is 1.
    pub fn normalized(&self) -> Result<Multivector> {
        let (_, &lead) = self.terms.iter().next().ok_or(Error::ZeroElement)?;
        Ok(self.scale(lead.inv()?))
    }

    /// Parses `3*e0^e2 + 1` style text.
    pub fn parse(alg: &Arc<CliffordAlgebra>, text: &str) -> Result<Multivector> {
        let field = alg.field();
        let mut out = BTreeMap::new();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(Error::parse("empty multivector"));
        }
        let mut first = true;
        while !rest.is_empty() {
            let mut negative = false;
            if let Some(r) = rest.strip_prefix('+') {
                rest = r.trim_start();
            } else if let Some(r) = rest.strip_prefix('-') {
                negative = true;
                rest = r.trim_start();
            } else if !first {
                return Err(Error::parse(format!("expected `+` or `-` before `{rest}`")));
            }
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = rest[..end].trim();
            rest = rest[end..].trim_start();
            if term.is_empty() {
                return Err(Error::parse("empty term"));
            }
            let (mask, coef) = parse_term(alg, term)?;
            add_into(&mut out, mask, if negative { -coef } else { coef });
        }
        if out.keys().any(|&m| m as usize >= alg.size()) {
            return Err(Error::parse("blade index out of range"));
        }
        let _ = field;
        Ok(Multivector {
            alg: alg.clone(),
            terms: out,
        })
    }
}

fn parse_term(alg: &Arc<CliffordAlgebra>, term: &str) -> Result<(u32, Scalar)> {
    let field = alg.field();
    let mut coef = field.one();
    let mut mask = None;
    for factor in term.split('*').map(str::trim) {
        if factor.starts_with('e') && factor[1..].starts_with(|c: char| c.is_ascii_digit()) {
            if mask.is_some() {
                return Err(Error::parse(format!("two blades in term `{term}`")));
            }
            mask = Some(parse_blade(alg, factor)?);
        } else {
            coef *= field.parse_scalar(factor)?;
        }
    }
    Ok((mask.unwrap_or(0), coef))
}

fn parse_blade(alg: &Arc<CliffordAlgebra>, text: &str) -> Result<u32> {
    let mut mask = 0u32;
    let mut last: Option<usize> = None;
    for part in text.split('^').map(str::trim) {
        let idx: usize = part
            .strip_prefix('e')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| Error::parse(format!("malformed blade factor `{part}`")))?;
        if idx >= alg.dim() {
            return Err(Error::parse(format!(
                "blade index {idx} out of range for dimension {}",
                alg.dim()
            )));
        }
        if last.is_some_and(|l| l >= idx) {
            return Err(Error::parse(format!(
                "blade indices must be strictly increasing in `{text}`"
            )));
        }
        last = Some(idx);
        mask |= 1 << idx;
    }
    Ok(mask)
}

fn blade_name(mask: u32) -> String {
    bits(mask)
        .into_iter()
        .map(|j| format!("e{j}"))
        .collect::<Vec<_>>()
        .join("^")
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by_key(|(&m, _)| (m.count_ones(), m));
        for (i, (&m, &c)) in ordered.into_iter().enumerate() {
            let text = c.to_string();
            let (neg, text) = match text.strip_prefix('-') {
                Some(t) => (true, t.to_string()),
                None => (false, text),
            };
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m == 0 {
                f.write_str(&text)?;
            } else if text == "1" {
                f.write_str(&blade_name(m))?;
            } else {
                write!(f, "{text}*{}", blade_name(m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector({self})")
    }
}

impl Serialize for Multivector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl PartialEq for Multivector {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.alg, &other.alg) && self.terms == other.terms
    }
}

impl Eq for Multivector {}

impl Hash for Multivector {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl PartialOrd for Multivector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Multivector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.iter().cmp(other.terms.iter())
    }
}

/// Every element of the span of the given blades, in odometer order.
pub fn enumerate_span(
    alg: &Arc<CliffordAlgebra>,
    masks: &[u32],
    nonzero_only: bool,
    budget: &Budget,
) -> Result<Vec<Multivector>> {
    let field = alg.field();
    let elems = field.elements()?;
    budget.check(saturating_pow(elems.len() as u64, masks.len() as u64))?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; masks.len()];
    loop {
        let m = Multivector::from_terms(alg, masks.iter().zip(&idx).map(|(&m, &i)| (m, elems[i])));
        if !(nonzero_only && m.is_zero()) {
            out.push(m);
        }
        let mut k = masks.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < elems.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Every nonzero element of the span with leading coefficient 1, i.e. one
/// representative per ray. Over the rationals only spans of at most one blade
/// are supported.
pub fn enumerate_span_rays(alg: &Arc<CliffordAlgebra>, masks: &[u32], budget: &Budget) -> Result<Vec<Multivector>> {
    if masks.len() <= 1 {
        return Ok(masks.iter().map(|&m| Multivector::blade(alg, m)).collect());
    }
    Ok(enumerate_span(alg, masks, true, budget)?
        .into_iter()
        .filter(|m| m.terms.values().next().is_some_and(Scalar::is_one))
        .collect())
}
