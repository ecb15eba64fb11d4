//! Lipschitz monoid and group, the twisted adjoint representation and the
//! projective point sets `ℳ`, `ℋ`, `ℊ` on `ℙ(Cl(V, Q))`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::budget::{saturating_pow, Budget};
use crate::clifford::{enumerate_span, enumerate_span_rays, CliffordAlgebra, Multivector, Parity};
use crate::error::{Error, Result};
use crate::linalg::{enumerate_vectors, projective_points, Mat, Vector};
use crate::metric::{Exception, QuadraticSpace};

/// The point `F·m` of `ℙ(Cl(V, Q))`, represented by `m` scaled so that the
/// coefficient of its smallest blade mask is 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ray(Multivector);

impl Ray {
    pub fn new(m: &Multivector) -> Result<Ray> {
        Ok(Ray(m.normalized()?))
    }

    pub fn rep(&self) -> &Multivector {
        &self.0
    }

    pub fn parity(&self) -> Parity {
        self.0.parity()
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == Parity::Odd
    }

    /// `F(pq)`, or `None` when `pq = 0`.
    pub fn mul(&self, other: &Ray) -> Result<Option<Ray>> {
        let p = self.0.mul(&other.0)?;
        Ok(if p.is_zero() { None } else { Some(Ray::new(&p)?) })
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({})", self.0)
    }
}

impl fmt::Debug for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Ray {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Sorted, duplicate-free rays.
pub fn sorted_rays(rays: impl IntoIterator<Item = Ray>) -> Vec<Ray> {
    rays.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// A finite set of rays closed under the ray product, with its Cayley table.
#[derive(Clone, Debug)]
pub struct RayGroup {
    rays: Vec<Ray>,
    index: HashMap<Ray, usize>,
    table: Vec<u32>,
    identity: usize,
    inverses: Vec<usize>,
}

impl RayGroup {
    pub fn new(rays: impl IntoIterator<Item = Ray>, budget: &Budget) -> Result<RayGroup> {
        let rays = sorted_rays(rays);
        let n = rays.len();
        budget.check((n as u128) * (n as u128))?;
        let index: HashMap<Ray, usize> = rays.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let not_closed = || Error::validation("group", "ray product leaves the set");
        let mut table = Vec::with_capacity(n * n);
        for a in &rays {
            for b in &rays {
                let p = a.mul(b)?.ok_or_else(not_closed)?;
                table.push(*index.get(&p).ok_or_else(not_closed)? as u32);
            }
        }
        let one = rays
            .first()
            .map(|r| Ray::new(&Multivector::one(r.rep().algebra())))
            .transpose()?;
        let identity = match one.and_then(|o| index.get(&o).copied()) {
            Some(i) => i,
            None => return Err(Error::validation("group", "identity ray missing")),
        };
        let inverses = (0..n)
            .map(|i| {
                (0..n)
                    .find(|&j| table[i * n + j] as usize == identity)
                    .ok_or_else(|| Error::validation("group", "element without inverse"))
            })
            .collect::<Result<_>>()?;
        Ok(RayGroup {
            rays,
            index,
            table,
            identity,
            inverses,
        })
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &Ray {
        &self.rays[i]
    }

    pub fn index_of(&self, r: &Ray) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn contains(&self, r: &Ray) -> bool {
        self.index.contains_key(r)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.len() + b] as usize
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn even_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.rays[i].is_even()).collect()
    }

    pub fn odd_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.rays[i].is_odd()).collect()
    }
}

/// The generating set of the Lipschitz monoid, modulo scalars.
#[derive(Clone, Debug)]
pub struct LipschitzGenerators {
    /// Representatives of the points of `V`.
    pub vectors: Vec<Multivector>,
    /// Every `1 + st` with `Q(s) = Q(t) = B(s, t) = 0` and `st ≠ 0`.
    pub exceptional: Vec<Multivector>,
}

impl LipschitzGenerators {
    pub fn new(alg: &Arc<CliffordAlgebra>, budget: &Budget) -> Result<Self> {
        let s = alg.space();
        let vectors = projective_points(s.field(), s.dim(), budget)?
            .iter()
            .map(|v| Multivector::vector(alg, v))
            .collect();
        let mut exceptional = BTreeSet::new();
        if s.dim() >= 2 {
            let singular: Vec<Vector> = enumerate_vectors(s.field(), s.dim(), true, budget)?
                .into_iter()
                .filter(|v| s.eval_q(v).expect("dims match").is_zero())
                .collect();
            let singular_points: Vec<&Vector> = singular
                .iter()
                .filter(|v| v.coords().iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_one()))
                .collect();
            budget.check(singular.len() as u128 * singular_points.len() as u128)?;
            for sv in &singular {
                for tv in &singular_points {
                    if !s.eval_b(sv, tv)?.is_zero() {
                        continue;
                    }
                    let st = Multivector::vector(alg, sv).mul(&Multivector::vector(alg, tv))?;
                    if !st.is_zero() {
                        exceptional.insert(Multivector::one(alg).add(&st)?);
                    }
                }
            }
        }
        Ok(LipschitzGenerators {
            vectors,
            exceptional: exceptional.into_iter().collect(),
        })
    }

    pub fn all(&self) -> impl Iterator<Item = &Multivector> {
        self.vectors.iter().chain(&self.exceptional)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointKind {
    M,
    M0,
    M1,
    H,
    H0,
    H1,
    G,
    G0,
    G1,
}

/// A named, sorted set of rays.
#[derive(Clone, Debug)]
pub struct PointSet {
    pub kind: PointKind,
    pub rays: Vec<Ray>,
}

impl PointSet {
    pub fn new(kind: PointKind, rays: impl IntoIterator<Item = Ray>) -> Self {
        PointSet {
            kind,
            rays: sorted_rays(rays),
        }
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn contains(&self, r: &Ray) -> bool {
        self.rays.binary_search(r).is_ok()
    }

    fn part(&self, keep: impl Fn(&Ray) -> bool, kind: PointKind) -> PointSet {
        PointSet {
            kind,
            rays: self.rays.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }

    pub fn even(&self) -> PointSet {
        let kind = match self.kind {
            PointKind::M | PointKind::M0 | PointKind::M1 => PointKind::M0,
            PointKind::H | PointKind::H0 | PointKind::H1 => PointKind::H0,
            _ => PointKind::G0,
        };
        self.part(Ray::is_even, kind)
    }

    pub fn odd(&self) -> PointSet {
        let kind = match self.kind {
            PointKind::M | PointKind::M0 | PointKind::M1 => PointKind::M1,
            PointKind::H | PointKind::H0 | PointKind::H1 => PointKind::H1,
            _ => PointKind::G1,
        };
        self.part(Ray::is_odd, kind)
    }
}

/// Budget needed to enumerate `ℳ`: the size of the algebra.
fn algebra_size(alg: &CliffordAlgebra) -> u128 {
    match alg.field().order() {
        Some(q) => saturating_pow(q, alg.size() as u64),
        None => 0,
    }
}

/// Closure of `{F1}` under right multiplication by the given generator rays.
fn ray_closure<'a>(
    alg: &Arc<CliffordAlgebra>,
    generators: impl Iterator<Item = &'a Multivector>,
) -> Result<BTreeSet<Ray>> {
    let gens: Vec<Ray> = generators.map(Ray::new).collect::<Result<_>>()?;
    let one = Ray::new(&Multivector::one(alg))?;
    let mut seen = BTreeSet::from([one.clone()]);
    let mut queue = VecDeque::from([one]);
    while let Some(r) = queue.pop_front() {
        for g in &gens {
            if let Some(p) = r.mul(g)? {
                if seen.insert(p.clone()) {
                    queue.push_back(p);
                }
            }
        }
    }
    Ok(seen)
}

/// `ℳ(V, Q)`: rays of nonzero elements of the Lipschitz monoid.
///
/// Over the rationals only `dim V <= 1` can be enumerated.
pub fn enumerate_m(alg: &Arc<CliffordAlgebra>, budget: &Budget) -> Result<PointSet> {
    budget.check(algebra_size(alg))?;
    let gens = LipschitzGenerators::new(alg, budget)?;
    Ok(PointSet::new(PointKind::M, ray_closure(alg, gens.all())?))
}

/// `ℋ(V, Q)`: rays of homogeneous units, as a group.
pub fn enumerate_h(alg: &Arc<CliffordAlgebra>, budget: &Budget) -> Result<RayGroup> {
    if let Some(q) = alg.field().order() {
        budget.check(2 * saturating_pow(q, (alg.size() / 2).max(1) as u64))?;
    }
    let mut rays = Vec::new();
    for masks in [alg.even_masks(), alg.odd_masks()] {
        for m in enumerate_span_rays(alg, &masks, budget)? {
            if m.try_inverse().is_some() {
                rays.push(Ray::new(&m)?);
            }
        }
    }
    RayGroup::new(rays, budget)
}

/// `m · α(m)`.
pub fn norm(m: &Multivector) -> Multivector {
    m.mul(&m.reversal()).expect("same algebra")
}

/// `ℊ(V, Q)`: rays of `ℳ` whose representatives satisfy `m α(m) ≠ 0`.
pub fn enumerate_g(alg: &Arc<CliffordAlgebra>, budget: &Budget) -> Result<RayGroup> {
    g_from_m(&enumerate_m(alg, budget)?, budget)
}

pub fn g_from_m(m: &PointSet, budget: &Budget) -> Result<RayGroup> {
    let units = m.rays.iter().filter(|r| !norm(r.rep()).is_zero()).cloned();
    RayGroup::new(units, budget)
}

/// Matrix of `ξ_p: x ↦ p x σ(p)⁻¹`.
///
/// `p` must be a homogeneous Lipschitz unit; this is checked through
/// `p α(p) ∈ F^×` and by confirming that `ξ_p` maps `V` isometrically into `V`.
pub fn twisted_adjoint(p: &Multivector) -> Result<Mat> {
    let alg = p.algebra();
    let s = alg.space();
    if p.parity() == Parity::Mixed {
        return Err(Error::NotLipschitzUnit);
    }
    let lambda = norm(p).as_scalar().ok_or(Error::NotLipschitzUnit)?;
    if lambda.is_zero() {
        return Err(Error::NotLipschitzUnit);
    }
    // σ(p)⁻¹ = σ(p⁻¹) = σ(α(p)) / λ
    let sigma_inv = p.reversal().main_involution().scale(lambda.inv()?);
    let n = s.dim();
    let cols = (0..n)
        .map(|j| {
            let e = Multivector::blade(alg, 1 << j);
            p.mul(&e)?.mul(&sigma_inv)?.as_vector().ok_or(Error::NotLipschitzUnit)
        })
        .collect::<Result<Vec<_>>>()?;
    for i in 0..n {
        if s.eval_q(&cols[i])? != s.q(i) {
            return Err(Error::NotLipschitzUnit);
        }
        for j in i + 1..n {
            if s.eval_b(&cols[i], &cols[j])? != s.b(i, j) {
                return Err(Error::NotLipschitzUnit);
            }
        }
    }
    Ok(Mat::from_columns(s.field(), n, &cols))
}

/// Embeds `Cl(V^⊥, Q|V^⊥)` into `Cl(V, Q)` along the inclusion of the
/// radical, and returns the rays of the image.
pub fn radical_subalgebra_rays(alg: &Arc<CliffordAlgebra>, budget: &Budget) -> Result<Vec<Ray>> {
    let s = alg.space();
    let rad = s.radical();
    let sub = CliffordAlgebra::new(s.restrict(&rad)?)?;
    let images: Vec<Multivector> = (0..sub.size() as u32)
        .map(|mask| {
            let mut acc = Multivector::one(alg);
            for (j, r) in rad.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    acc = acc.mul(&Multivector::vector(alg, r))?;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let masks: Vec<u32> = (0..sub.size() as u32).collect();
    let elements = if alg.field().is_finite() {
        enumerate_span(&sub, &masks, true, budget)?
    } else {
        enumerate_span_rays(&sub, &masks, budget)?
    };
    let rays = elements
        .iter()
        .map(|m| {
            let mut acc = Multivector::zero(alg);
            for (&mask, &c) in m.terms() {
                acc = acc.add(&images[mask as usize].scale(c))?;
            }
            Ray::new(&acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sorted_rays(rays))
}

/// `ker ξ` at ray level, by two independent routes.
#[derive(Clone, Debug)]
pub struct KernelOfXi {
    /// Rays of `ℊ` with `ξ_p = id`.
    pub from_action: Vec<Ray>,
    /// `ℊ ∩ ℙ(Cl(V^⊥))`.
    pub from_radical: Vec<Ray>,
}

impl KernelOfXi {
    pub fn agree(&self) -> bool {
        self.from_action == self.from_radical
    }

    pub fn even(&self) -> Vec<Ray> {
        self.from_action.iter().filter(|r| r.is_even()).cloned().collect()
    }

    pub fn odd(&self) -> Vec<Ray> {
        self.from_action.iter().filter(|r| r.is_odd()).cloned().collect()
    }
}

pub fn kernel_of_xi(alg: &Arc<CliffordAlgebra>, g: &RayGroup, budget: &Budget) -> Result<KernelOfXi> {
    let id = Mat::identity(alg.field(), alg.dim());
    let mut from_action = Vec::new();
    for r in g.rays() {
        if twisted_adjoint(r.rep())? == id {
            from_action.push(r.clone());
        }
    }
    let from_radical = radical_subalgebra_rays(alg, budget)?
        .into_iter()
        .filter(|r| g.contains(r))
        .collect();
    Ok(KernelOfXi {
        from_action,
        from_radical,
    })
}

/// A pair `a, b` spanning a plane `L ⊆ V^⊥`, chosen as in the kernel
/// construction: `a` regular and `b` singular when `L` has both kinds of
/// vectors, otherwise any basis.
pub fn kernel_pair(s: &QuadraticSpace, u: &Vector, v: &Vector, budget: &Budget) -> Result<(Vector, Vector)> {
    let field = s.field();
    let plane: Vec<Vector> = enumerate_vectors(field, 2, true, budget)?
        .iter()
        .map(|c| u.scale(c.coords()[0]).add(&v.scale(c.coords()[1])))
        .collect();
    let regular = plane.iter().find(|x| !s.eval_q(x).unwrap().is_zero());
    let singular = plane.iter().find(|x| s.eval_q(x).unwrap().is_zero());
    Ok(match (regular, singular) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => (u.clone(), v.clone()),
    })
}

/// Every two-dimensional subspace of the radical, as a basis pair.
pub fn radical_planes(s: &QuadraticSpace, budget: &Budget) -> Result<Vec<(Vector, Vector)>> {
    let rad = s.radical();
    let k = rad.len();
    if k < 2 {
        return Ok(Vec::new());
    }
    let combine = |c: &Vector| {
        rad.iter()
            .zip(c.coords())
            .fold(Vector::zero(s.field(), s.dim()), |acc, (r, &x)| acc.add(&r.scale(x)))
    };
    let points = projective_points(s.field(), k, budget)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let m = Mat::from_rows(s.field(), &[p.coords().to_vec(), q.coords().to_vec()])?;
            if seen.insert(m.rref().0.entries().to_vec()) {
                out.push((combine(p), combine(q)));
            }
        }
    }
    Ok(out)
}

/// `{F(1 + y ab) | y ∈ F}`.
pub fn even_kernel_family(alg: &Arc<CliffordAlgebra>, a: &Vector, b: &Vector) -> Result<Vec<Ray>> {
    let ab = Multivector::vector(alg, a).mul(&Multivector::vector(alg, b))?;
    alg.field()
        .elements()?
        .into_iter()
        .map(|y| Ray::new(&Multivector::one(alg).add(&ab.scale(y))?))
        .collect()
}

/// `{F(a + y Q(a) b) | y ∈ F}`.
pub fn odd_kernel_family(alg: &Arc<CliffordAlgebra>, a: &Vector, b: &Vector) -> Result<Vec<Ray>> {
    let qa = alg.space().eval_q(a)?;
    alg.field()
        .elements()?
        .into_iter()
        .map(|y| Ray::new(&Multivector::vector(alg, &a.add(&b.scale(y * qa)))))
        .collect()
}

/// The four kernel statements; `None` where the hypothesis fails.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KernelLemma {
    /// `Q(V^⊥) = {0}` implies no odd kernel rays.
    pub a: Option<bool>,
    /// `r · ker₀ = ker₁` for every regular `r ∈ V^⊥`.
    pub b: Option<bool>,
    /// `dim V^⊥ <= 1` implies `ker₀ = {F1}`.
    pub c: Option<bool>,
    /// `dim V^⊥ >= 2`: every plane of the radical yields `|F|` even kernel rays.
    pub d: Option<bool>,
}

impl KernelLemma {
    pub fn holds(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|x| x != &Some(false))
    }
}

pub fn check_kernel_lemma(alg: &Arc<CliffordAlgebra>, ker: &KernelOfXi, budget: &Budget) -> Result<KernelLemma> {
    let s = alg.space();
    let rad = s.radical();
    let even = ker.even();
    let odd = ker.odd();
    let mut out = KernelLemma::default();
    if s.q_vanishes_on_radical() {
        out.a = Some(odd.is_empty());
    }
    let rad_vectors: Vec<Vector> = if rad.is_empty() {
        Vec::new()
    } else if s.field().is_finite() {
        let coeffs = enumerate_vectors(s.field(), rad.len(), true, budget)?;
        coeffs
            .iter()
            .map(|c| {
                rad.iter()
                    .zip(c.coords())
                    .fold(Vector::zero(s.field(), s.dim()), |acc, (r, &x)| acc.add(&r.scale(x)))
            })
            .collect()
    } else {
        rad.clone()
    };
    let regular: Vec<&Vector> = rad_vectors.iter().filter(|v| !s.eval_q(v).unwrap().is_zero()).collect();
    if !regular.is_empty() {
        let odd_set: BTreeSet<Ray> = odd.iter().cloned().collect();
        let mut ok = true;
        for r in regular {
            let rr = Ray::new(&Multivector::vector(alg, r))?;
            let image: BTreeSet<Ray> = even
                .iter()
                .map(|k| rr.mul(k)?.ok_or(Error::ZeroElement))
                .collect::<Result<_>>()?;
            ok &= image == odd_set;
        }
        out.b = Some(ok);
    }
    if rad.len() <= 1 {
        out.c = Some(even == vec![Ray::new(&Multivector::one(alg))?]);
    } else {
        let mut ok = true;
        for (u, v) in radical_planes(s, budget)? {
            let (a, b) = kernel_pair(s, &u, &v, budget)?;
            let family = sorted_rays(even_kernel_family(alg, &a, &b)?);
            ok &= family.len() as u64 == s.field().order().unwrap_or(0)
                && family.iter().all(|r| even.binary_search(r).is_ok());
        }
        out.d = Some(ok);
    }
    Ok(out)
}

/// Which clause makes the Lipschitz monoid more than the monoid generated by `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonoidException {
    ZeroForm,
    Ex1,
    Ex2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonoidReport {
    pub vector_closure: usize,
    pub full: usize,
    pub equal: bool,
    pub exception: Option<MonoidException>,
}

impl MonoidReport {
    /// Outside the exception clauses the two monoids must agree.
    pub fn consistent(&self) -> bool {
        self.equal || self.exception.is_some()
    }
}

pub fn check_monoid_generated_by_v(alg: &Arc<CliffordAlgebra>, m: &PointSet, budget: &Budget) -> Result<MonoidReport> {
    let gens = LipschitzGenerators::new(alg, budget)?;
    let closure = ray_closure(alg, gens.vectors.iter())?;
    let s = alg.space();
    let exception = if s.is_zero_form() {
        Some(MonoidException::ZeroForm)
    } else {
        match s.exception() {
            Some(Exception::Ex1) => Some(MonoidException::Ex1),
            Some(Exception::Ex2) => Some(MonoidException::Ex2),
            None => None,
        }
    };
    Ok(MonoidReport {
        vector_closure: closure.len(),
        full: m.len(),
        equal: closure.len() == m.len() && closure.iter().all(|r| m.contains(r)),
        exception,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub checked: usize,
    /// `α(m)` spans a point of `ℳ`.
    pub reversal_closed: bool,
    /// `m α(m) = α(m) m ∈ F`.
    pub norm_scalar: bool,
    /// `m` is a unit exactly when `m α(m) ≠ 0`.
    pub unit_criterion: bool,
    /// `m z α(m) ∈ Cl^(k)` for every blade `z` of length `k`.
    pub filtration: bool,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.reversal_closed && self.norm_scalar && self.unit_criterion && self.filtration
    }
}

pub fn check_lipschitz_properties(alg: &Arc<CliffordAlgebra>, m: &PointSet) -> Result<PropertyReport> {
    let mut rep = PropertyReport {
        checked: m.len(),
        reversal_closed: true,
        norm_scalar: true,
        unit_criterion: true,
        filtration: true,
    };
    let blades: Vec<Multivector> = (0..alg.size() as u32).map(|b| Multivector::blade(alg, b)).collect();
    for r in &m.rays {
        let x = r.rep();
        let rev = x.reversal();
        rep.reversal_closed &= m.contains(&Ray::new(&rev)?);
        let left = x.mul(&rev)?;
        let right = rev.mul(x)?;
        rep.norm_scalar &= left == right && left.as_scalar().is_some();
        rep.unit_criterion &= x.try_inverse().is_some() == !left.is_zero();
        for z in &blades {
            let k = z.filtration_degree()?;
            let t = x.mul(z)?.mul(&rev)?;
            rep.filtration &= t.is_zero() || t.filtration_degree()? <= k;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn alg(s: &str) -> Arc<CliffordAlgebra> {
        CliffordAlgebra::new(s.parse().unwrap()).unwrap()
    }

    fn ray(a: &Arc<CliffordAlgebra>, t: &str) -> Ray {
        Ray::new(&Multivector::parse(a, t).unwrap()).unwrap()
    }

    #[test]
    fn ray_normalization() {
        let a = alg("gf(5):diag(1,1)");
        assert_eq!(ray(&a, "2 + 4*e0"), ray(&a, "1 + 2*e0"));
        assert_eq!(ray(&a, "3*e0^e1").rep(), &Multivector::parse(&a, "e0^e1").unwrap());
        assert_ne!(ray(&a, "1 + e0"), ray(&a, "1 + 2*e0"));
        assert!(Ray::new(&Multivector::zero(&a)).is_err());
    }

    #[test]
    fn dim_zero() {
        let a = alg("gf(3):diag()");
        let b = Budget::default();
        let m = enumerate_m(&a, &b).unwrap();
        assert_eq!(m.rays, vec![ray(&a, "1")]);
        assert_eq!(enumerate_g(&a, &b).unwrap().len(), 1);
        assert_eq!(enumerate_h(&a, &b).unwrap().len(), 1);
    }

    #[test]
    fn hyperbolic_plane_gf2() {
        let a = alg("gf(2):hyperbolic2");
        let b = Budget::default();
        let m = enumerate_m(&a, &b).unwrap();
        assert_eq!(m.len(), 6);
        assert_eq!(m.even().len(), 3);
        assert_eq!(m.odd().len(), 3);
        let g = enumerate_g(&a, &b).unwrap();
        assert_eq!(g.rays(), &[ray(&a, "1"), ray(&a, "e0 + e1")]);
        let h = enumerate_h(&a, &b).unwrap();
        for r in g.rays() {
            assert!(h.contains(r));
        }
    }

    #[test]
    fn zero_form_plane_gf2() {
        let a = alg("gf(2):zero(2)");
        let m = enumerate_m(&a, &Budget::default()).unwrap();
        let expected = sorted_rays(
            ["1", "e0", "e1", "e0 + e1", "e0^e1", "1 + e0^e1"]
                .iter()
                .map(|t| ray(&a, t)),
        );
        assert_eq!(m.rays, expected);
    }

    #[test]
    fn rational_line() {
        let a = alg("q:diag(-1)");
        let b = Budget::default();
        let g = enumerate_g(&a, &b).unwrap();
        assert_eq!(g.rays(), &[ray(&a, "1"), ray(&a, "e0")]);
        let z = alg("q:zero(1)");
        let gz = enumerate_g(&z, &b).unwrap();
        assert_eq!(gz.rays(), &[ray(&z, "1")]);
        assert_eq!(enumerate_m(&z, &b).unwrap().len(), 2);
        assert!(enumerate_m(&alg("q:diag(1,1)"), &b).is_err());
    }

    #[test]
    fn twisted_adjoint_examples() {
        let f = Field::Prime(5);
        let a = alg("gf(5):([1,2,0],[1,0,3])");
        let s = a.space().clone();
        let r = Vector::from_i64(f, &[1, 1, 0]);
        let xi = twisted_adjoint(&Multivector::vector(&a, &r)).unwrap();
        assert_eq!(xi, s.reflection(&r).unwrap());
        let sc = Multivector::scalar(&a, f.from_i64(3));
        assert!(twisted_adjoint(&sc).unwrap().is_identity());
        assert_eq!(
            twisted_adjoint(&Multivector::parse(&a, "1 + e0").unwrap()),
            Err(Error::NotLipschitzUnit)
        );
    }

    #[test]
    fn exceptional_generator_action() {
        let f = Field::Prime(3);
        let a = alg("gf(3):([0,0,0,0],[1,0,0,0,0,1])");
        let s = a.space().clone();
        let sv = Vector::from_i64(f, &[1, 0, 0, 0]);
        let tv = Vector::from_i64(f, &[0, 0, 1, 0]);
        let g = Multivector::one(&a)
            .add(&Multivector::vector(&a, &sv).mul(&Multivector::vector(&a, &tv)).unwrap())
            .unwrap();
        assert!(norm(&g).as_scalar().unwrap().is_one());
        let xi = twisted_adjoint(&g).unwrap();
        for x in enumerate_vectors(f, 4, false, &Budget::default()).unwrap() {
            let expected = x
                .add(&sv.scale(s.eval_b(&tv, &x).unwrap()))
                .sub(&tv.scale(s.eval_b(&sv, &x).unwrap()));
            assert_eq!(xi.mul_vec(&x).unwrap(), expected);
        }
    }

    #[test]
    fn generators_satisfy_unit_norm() {
        let a = alg("gf(2):ex2");
        let gens = LipschitzGenerators::new(&a, &Budget::default()).unwrap();
        assert!(!gens.exceptional.is_empty());
        for g in &gens.exceptional {
            assert!(norm(g).as_scalar().unwrap().is_one());
        }
    }

    #[test]
    fn kernel_examples() {
        let b = Budget::default();
        let a = alg("gf(3):diag(1,1)");
        let g = enumerate_g(&a, &b).unwrap();
        let k = kernel_of_xi(&a, &g, &b).unwrap();
        assert_eq!(k.from_action, vec![ray(&a, "1")]);
        assert!(k.agree());

        let c = alg("gf(2):([0,0,1],[1,0,0])");
        let g = enumerate_g(&c, &b).unwrap();
        let k = kernel_of_xi(&c, &g, &b).unwrap();
        assert_eq!(k.from_action, sorted_rays([ray(&c, "1"), ray(&c, "e2")]));
        assert!(k.agree());
        assert!(check_kernel_lemma(&c, &k, &b).unwrap().holds());

        let z = alg("gf(3):([1,0,0],[0,0,0])");
        let g = enumerate_g(&z, &b).unwrap();
        let k = kernel_of_xi(&z, &g, &b).unwrap();
        assert!(k.agree());
        let lemma = check_kernel_lemma(&z, &k, &b).unwrap();
        assert_eq!(lemma.d, Some(true));
        assert_eq!(lemma.a, Some(true));
        assert!(k.from_action.contains(&ray(&z, "1 + e1^e2")));
    }

    #[test]
    fn radical_planes_count() {
        let b = Budget::default();
        let s: QuadraticSpace = "gf(2):zero(3)".parse().unwrap();
        assert_eq!(radical_planes(&s, &b).unwrap().len(), 7);
        let t: QuadraticSpace = "gf(3):zero(2)".parse().unwrap();
        assert_eq!(radical_planes(&t, &b).unwrap().len(), 1);
    }

    #[test]
    fn monoid_generation() {
        let b = Budget::default();
        for (space, equal, exc) in [
            ("gf(3):diag(1,1)", true, None),
            ("gf(2):zero(2)", false, Some(MonoidException::ZeroForm)),
            ("gf(2):ex1(3)", false, Some(MonoidException::Ex1)),
        ] {
            let a = alg(space);
            let m = enumerate_m(&a, &b).unwrap();
            let rep = check_monoid_generated_by_v(&a, &m, &b).unwrap();
            assert_eq!(rep.equal, equal, "{space}");
            assert_eq!(rep.exception, exc, "{space}");
        }
    }

    #[test]
    fn properties_exhaustive_small() {
        let b = Budget::default();
        let a = alg("gf(2):ex1(3)");
        let m = enumerate_m(&a, &b).unwrap();
        // dimension at most 3: every homogeneous point is Lipschitz
        assert_eq!(m.even().len(), 15);
        assert_eq!(m.odd().len(), 15);
        assert!(check_lipschitz_properties(&a, &m).unwrap().holds());
    }

    #[test]
    fn budget_is_respected() {
        let a = alg("gf(3):diag(1,1,1)");
        assert!(matches!(
            enumerate_m(&a, &Budget(100)),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
