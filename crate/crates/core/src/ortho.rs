//! Weak orthogonal groups `O′(V, Q)`, reflection subgroups and `PO′(V, Q)`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::budget::{saturating_pow, Budget};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{enumerate_vectors, projective_points, Mat, Vector};
use crate::metric::{Exception, QuadraticSpace};

/// A finite matrix group, stored as a sorted list with an index.
#[derive(Clone, Debug)]
pub struct FiniteGroupTable {
    field: Field,
    dim: usize,
    elements: Vec<Mat>,
    index: HashMap<Mat, usize>,
    generators: Option<Vec<usize>>,
}

impl FiniteGroupTable {
    /// Wraps a set of matrices; closure is the caller's responsibility and can
    /// be confirmed with [`FiniteGroupTable::is_closed`].
    pub fn from_elements(field: Field, dim: usize, elements: impl IntoIterator<Item = Mat>) -> Self {
        let elements: Vec<Mat> = elements.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let index = elements.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        FiniteGroupTable {
            field,
            dim,
            elements,
            index,
            generators: None,
        }
    }

    /// The subgroup generated by `generators`, by breadth-first closure.
    pub fn generated_by(field: Field, dim: usize, generators: &[Mat], budget: &Budget) -> Result<Self> {
        let id = Mat::identity(field, dim);
        let mut seen = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for h in generators {
                let p = g.mul(h)?;
                if seen.insert(p.clone()) {
                    budget.check(seen.len() as u128)?;
                    queue.push_back(p);
                }
            }
        }
        let mut table = Self::from_elements(field, dim, seen);
        let gens: BTreeSet<usize> = generators.iter().filter_map(|g| table.index_of(g)).collect();
        table.generators = Some(gens.into_iter().collect());
        Ok(table)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Mat {
        &self.elements[i]
    }

    pub fn generators(&self) -> Option<&[usize]> {
        self.generators.as_deref()
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn contains(&self, m: &Mat) -> bool {
        self.index.contains_key(m)
    }

    pub fn identity(&self) -> Option<usize> {
        self.index_of(&Mat::identity(self.field, self.dim))
    }

    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.index_of(&self.elements[a].mul(&self.elements[b]).ok()?)
    }

    pub fn inverse(&self, a: usize) -> Option<usize> {
        self.index_of(&self.elements[a].invert().ok()?)
    }

    /// Contains the identity and is closed under products and inverses.
    pub fn is_closed(&self) -> bool {
        self.identity().is_some()
            && (0..self.len())
                .all(|a| self.inverse(a).is_some() && (0..self.len()).all(|b| self.compose(a, b).is_some()))
    }

    pub fn is_subgroup_of(&self, other: &FiniteGroupTable) -> bool {
        self.elements.iter().all(|m| other.contains(m))
    }
}

/// Whether `m` is an isometry of `s` fixing the radical elementwise, checked
/// on basis values of `Q` and `B`.
pub fn is_weak_isometry(s: &QuadraticSpace, m: &Mat) -> bool {
    let n = s.dim();
    if !m.is_invertible() {
        return false;
    }
    let cols = m.columns();
    for i in 0..n {
        if s.eval_q(&cols[i]).ok() != Some(s.q(i)) {
            return false;
        }
        for j in i + 1..n {
            if s.eval_b(&cols[i], &cols[j]).ok() != Some(s.b(i, j)) {
                return false;
            }
        }
    }
    s.radical().iter().all(|r| m.mul_vec(r).ok().as_ref() == Some(r))
}

/// Every element of `O′(V, Q)`.
///
/// Finite fields: columns are chosen one at a time among vectors with the
/// right `Q`-value and `B`-values against earlier columns, then filtered for
/// invertibility and the radical condition. Over the rationals only
/// `dim V <= 1` is supported, where every isometry is `±id`.
pub fn enumerate_o_weak(s: &QuadraticSpace, budget: &Budget) -> Result<FiniteGroupTable> {
    let field = s.field();
    let n = s.dim();
    if !field.is_finite() {
        if n > 1 {
            return Err(Error::InfiniteField(field));
        }
        let candidates = [field.one(), -field.one()]
            .into_iter()
            .map(|l| Mat::identity(field, n).scale(l))
            .filter(|m| is_weak_isometry(s, m));
        return Ok(FiniteGroupTable::from_elements(field, n, candidates));
    }
    budget.check(saturating_pow(field.order().expect("finite"), (n * n) as u64))?;
    let vectors = enumerate_vectors(field, n, false, budget)?;
    let by_q: Vec<Vec<&Vector>> = (0..n)
        .map(|j| vectors.iter().filter(|v| s.eval_q(v).unwrap() == s.q(j)).collect())
        .collect();
    let mut out = Vec::new();
    let mut cols: Vec<Vector> = Vec::with_capacity(n);
    extend_columns(s, &by_q, &mut cols, &mut out);
    Ok(FiniteGroupTable::from_elements(field, n, out))
}

fn extend_columns(s: &QuadraticSpace, by_q: &[Vec<&Vector>], cols: &mut Vec<Vector>, out: &mut Vec<Mat>) {
    let j = cols.len();
    if j == s.dim() {
        let m = Mat::from_columns(s.field(), s.dim(), cols);
        if is_weak_isometry(s, &m) {
            out.push(m);
        }
        return;
    }
    for &v in &by_q[j] {
        if (0..j).all(|i| s.eval_b(&cols[i], v).unwrap() == s.b(i, j)) {
            cols.push(v.clone());
            extend_columns(s, by_q, cols, out);
            cols.pop();
        }
    }
}

/// The subgroup generated by all reflections in regular vectors.
pub fn reflection_subgroup(s: &QuadraticSpace, budget: &Budget) -> Result<FiniteGroupTable> {
    let mut reflections = BTreeSet::new();
    for r in projective_points(s.field(), s.dim(), budget)? {
        if !s.eval_q(&r)?.is_zero() {
            reflections.insert(s.reflection(&r)?);
        }
    }
    let gens: Vec<Mat> = reflections.into_iter().collect();
    FiniteGroupTable::generated_by(s.field(), s.dim(), &gens, budget)
}

/// `I′(V, Q) = O′(V, Q) ∩ {±id}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IWeak {
    pub order: usize,
    /// `V = 0`, or `V^⊥ ≠ 0`, or characteristic 2.
    pub predicts_trivial: bool,
}

impl IWeak {
    pub fn consistent(&self) -> bool {
        (self.order == 1) == self.predicts_trivial
    }
}

/// Decides whether `−id` is a weak isometry distinct from `id`, without
/// enumerating `O′`.
pub fn i_weak(s: &QuadraticSpace) -> IWeak {
    let id = Mat::identity(s.field(), s.dim());
    let neg = id.neg();
    let order = if neg != id && is_weak_isometry(s, &neg) { 2 } else { 1 };
    IWeak {
        order,
        predicts_trivial: s.dim() == 0 || !s.radical().is_empty() || s.field().characteristic() == 2,
    }
}

/// `PO′(V, Q) = O′(V, Q) / I′(V, Q)`, with classes `{φ, −φ}` represented by
/// their smaller member.
#[derive(Clone, Debug)]
pub struct ProjectiveGroup {
    o: FiniteGroupTable,
    quotient_by_sign: bool,
    classes: Vec<Mat>,
    index: HashMap<Mat, usize>,
}

impl ProjectiveGroup {
    pub fn canonical(&self, m: &Mat) -> Mat {
        if self.quotient_by_sign {
            let n = m.neg();
            if n < *m {
                return n;
            }
        }
        m.clone()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Mat] {
        &self.classes
    }

    pub fn o_weak(&self) -> &FiniteGroupTable {
        &self.o
    }

    /// The class of an element of `O′`.
    pub fn project(&self, m: &Mat) -> Option<usize> {
        if !self.o.contains(m) {
            return None;
        }
        self.index.get(&self.canonical(m)).copied()
    }

    pub fn identity(&self) -> usize {
        self.project(&Mat::identity(self.o.field, self.o.dim))
            .expect("identity lies in O′")
    }

    /// Product of classes.
    pub fn compose(&self, a: usize, b: usize) -> usize {
        let p = self.classes[a].mul(&self.classes[b]).expect("square matrices");
        self.project(&p).expect("O′ is closed")
    }
}

pub fn project_to_po_weak(s: &QuadraticSpace, o: FiniteGroupTable) -> ProjectiveGroup {
    let quotient_by_sign = i_weak(s).order == 2;
    let mut pg = ProjectiveGroup {
        o,
        quotient_by_sign,
        classes: Vec::new(),
        index: HashMap::new(),
    };
    let classes: BTreeSet<Mat> = pg.o.elements.iter().map(|m| pg.canonical(m)).collect();
    pg.classes = classes.into_iter().collect();
    pg.index = pg.classes.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    pg
}

/// Comparison of the reflection subgroup with `O′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartanDieudonne {
    pub o_weak: usize,
    pub reflections: usize,
    pub generated_by_reflections: bool,
    pub exception: Option<Exception>,
    /// `x0 x1` over GF(2) on a plane, where the single reflection already
    /// generates `O′`; reported rather than judged.
    pub flagged: bool,
}

impl CartanDieudonne {
    /// Non-exceptional spaces need equality, the exceptional ones a proper
    /// subgroup; the flagged plane passes either way.
    pub fn as_expected(&self) -> bool {
        self.flagged
            || match self.exception {
                None => self.generated_by_reflections,
                Some(_) => !self.generated_by_reflections && self.reflections < self.o_weak,
            }
    }
}

pub fn cartan_dieudonne(s: &QuadraticSpace, o: &FiniteGroupTable, refl: &FiniteGroupTable) -> CartanDieudonne {
    let exception = s.exception();
    CartanDieudonne {
        o_weak: o.len(),
        reflections: refl.len(),
        generated_by_reflections: refl.len() == o.len() && refl.is_subgroup_of(o),
        exception,
        flagged: exception == Some(Exception::Ex1) && s.dim() == 2,
    }
}
