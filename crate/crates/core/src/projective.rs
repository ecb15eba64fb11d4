//! The homomorphism `θ: ℊ(V, Q) → PO′(V, Q)`, the case analysis of its
//! kernel, and the projective compatibility checks for translations,
//! reversal, similarities and rescaled products.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::Budget;
use crate::clifford::{enumerate_span_rays, CliffordAlgebra, Multivector, Parity};
use crate::error::{Error, Result};
use crate::functor::{CliffordExtension, Rescaling, Similarity};
use crate::linalg::{Mat, Vector};
use crate::lipschitz::{
    enumerate_g, enumerate_h, enumerate_m, even_kernel_family, kernel_pair, odd_kernel_family, radical_planes,
    sorted_rays, twisted_adjoint, Ray, RayGroup,
};
use crate::metric::QuadraticSpace;
use crate::ortho::{enumerate_o_weak, i_weak, project_to_po_weak, ProjectiveGroup};

/// Pair samples drawn when an exhaustive sweep would exceed the budget.
pub const SAMPLE_PAIRS: usize = 10_000;
const SAMPLE_SEED: u64 = 0x5eed_c11f;

/// A clause of the kernel theorems for `dim V^⊥ = 0`, `= 1` and `>= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    Iso0A,
    Iso0B,
    Iso0C,
    Iso0D,
    Iso1A,
    Iso1B,
    Iso1C,
    Iso1D,
    Iso2A,
    Iso2B,
    Iso2C,
    Iso2D,
}

impl Clause {
    pub const ALL: [Clause; 12] = [
        Clause::Iso0A,
        Clause::Iso0B,
        Clause::Iso0C,
        Clause::Iso0D,
        Clause::Iso1A,
        Clause::Iso1B,
        Clause::Iso1C,
        Clause::Iso1D,
        Clause::Iso2A,
        Clause::Iso2B,
        Clause::Iso2C,
        Clause::Iso2D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Clause::Iso0A => "iso.0(a)",
            Clause::Iso0B => "iso.0(b)",
            Clause::Iso0C => "iso.0(c)",
            Clause::Iso0D => "iso.0(d)",
            Clause::Iso1A => "iso.1(a)",
            Clause::Iso1B => "iso.1(b)",
            Clause::Iso1C => "iso.1(c)",
            Clause::Iso1D => "iso.1(d)",
            Clause::Iso2A => "iso.2(a)",
            Clause::Iso2B => "iso.2(b)",
            Clause::Iso2C => "iso.2(c)",
            Clause::Iso2D => "iso.2(d)",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Clause {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// `ℊ ≅ PO′` via `θ`, `ℊ₀ ≅ PO′` via `θ|ℊ₀`, or `ℊ/{F1, Fe} ≅ PO′`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableRow {
    Table1,
    Table2,
    Table3,
}

impl TableRow {
    pub fn name(self) -> &'static str {
        match self {
            TableRow::Table1 => "Table 1",
            TableRow::Table2 => "Table 2",
            TableRow::Table3 => "Table 3",
        }
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for TableRow {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// A predicted number of kernel points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Count {
    Exact(u64),
    AtLeast(u64),
    /// At least `|F|` points over an infinite field.
    Infinite,
}

impl Count {
    pub fn admits(self, n: u64) -> bool {
        match self {
            Count::Exact(k) => n == k,
            Count::AtLeast(k) => n >= k,
            Count::Infinite => false,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Exact(k) => write!(f, "{k}"),
            Count::AtLeast(k) => write!(f, ">={k}"),
            Count::Infinite => f.write_str("infinite"),
        }
    }
}

/// The only data the classifier reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub radical_dim: usize,
    pub q_vanishes_on_radical: bool,
    pub dim: usize,
    pub characteristic: u64,
    pub field_order: Option<u64>,
}

impl Hypotheses {
    pub fn of(s: &QuadraticSpace) -> Self {
        Hypotheses {
            radical_dim: s.radical().len(),
            q_vanishes_on_radical: s.q_vanishes_on_radical(),
            dim: s.dim(),
            characteristic: s.field().characteristic() as u64,
            field_order: s.field().order(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseClassification {
    pub hypotheses: Hypotheses,
    pub clause: Clause,
    /// Further clauses whose hypotheses hold as well.
    pub also_applies: Vec<Clause>,
    pub kernel_even: Count,
    pub kernel_odd: Count,
    /// Predicted truth of `θ(ℊ₀) = PO′`.
    pub g0_image_is_po: Option<bool>,
    /// Predicted `ℊ₀ = ℊ`, where a clause states it.
    pub g0_is_g: Option<bool>,
    pub table: Option<TableRow>,
    /// Tables listing the scenario besides `table`.
    pub also_in: Vec<TableRow>,
}

impl CaseClassification {
    pub fn tables(&self) -> Vec<TableRow> {
        self.table.iter().chain(&self.also_in).copied().collect()
    }

    pub fn summary(&self) -> String {
        match self.table {
            Some(t) => format!("{}, {}", self.clause, t),
            None => format!("{}, no table", self.clause),
        }
    }
}

pub fn classify_scenario(s: &QuadraticSpace) -> CaseClassification {
    classify(Hypotheses::of(s))
}

pub fn classify(h: Hypotheses) -> CaseClassification {
    use Clause::*;
    let field_many = match h.field_order {
        Some(q) => Count::AtLeast(q),
        None => Count::Infinite,
    };
    let clause = match h.radical_dim {
        0 if h.dim == 0 => Iso0A,
        0 if h.characteristic == 2 => Iso0B,
        0 if h.dim % 2 == 1 => Iso0C,
        0 => Iso0D,
        1 if !h.q_vanishes_on_radical => Iso1D,
        1 if h.dim == 1 => Iso1B,
        1 => Iso1C,
        _ if !h.q_vanishes_on_radical => Iso2D,
        r if h.dim == r => Iso2B,
        _ => Iso2C,
    };
    let also_applies = match clause {
        Iso1B | Iso1C => vec![Iso1A],
        Iso2B | Iso2C => vec![Iso2A],
        _ => Vec::new(),
    };
    let (kernel_even, kernel_odd) = match clause {
        Iso0A | Iso0B | Iso1A | Iso1B | Iso1C => (Count::Exact(1), Count::Exact(0)),
        Iso0C | Iso1D => (Count::Exact(1), Count::Exact(1)),
        Iso0D => (Count::Exact(2), Count::Exact(0)),
        Iso2A | Iso2B | Iso2C => (field_many, Count::Exact(0)),
        Iso2D => (field_many, field_many),
    };
    let g0_is_g = matches!(clause, Iso0A | Iso1B | Iso2B).then_some(true);
    let g0_image_is_po = match clause {
        Iso0A | Iso0C | Iso1B | Iso1D | Iso2B | Iso2D => Some(true),
        Iso0B | Iso0D | Iso1C | Iso2C => Some(false),
        Iso1A | Iso2A => None,
    };
    let (table, also_in) = match clause {
        Iso0A => (Some(TableRow::Table1), vec![TableRow::Table2]),
        Iso0B | Iso1A | Iso1C => (Some(TableRow::Table1), Vec::new()),
        Iso1B => (Some(TableRow::Table1), vec![TableRow::Table2]),
        Iso0C | Iso1D => (Some(TableRow::Table2), Vec::new()),
        Iso0D => (Some(TableRow::Table3), Vec::new()),
        Iso2A | Iso2B | Iso2C | Iso2D => (None, Vec::new()),
    };
    CaseClassification {
        hypotheses: h,
        clause,
        also_applies,
        kernel_even,
        kernel_odd,
        g0_image_is_po,
        g0_is_g,
        table,
        also_in,
    }
}

/// `θ: Fp ↦ I′ ∘ ξ_p`, tabulated on every ray of `ℊ`.
#[derive(Clone, Debug)]
pub struct ThetaMap {
    alg: Arc<CliffordAlgebra>,
    g: RayGroup,
    po: ProjectiveGroup,
    xi: Vec<Mat>,
    image: Vec<usize>,
    kernel: Vec<usize>,
    kernel_by_sign: Vec<usize>,
}

pub fn build_theta(alg: &Arc<CliffordAlgebra>, budget: &Budget) -> Result<ThetaMap> {
    let s = alg.space();
    let g = enumerate_g(alg, budget)?;
    let po = project_to_po_weak(s, enumerate_o_weak(s, budget)?);
    let mut xi = Vec::with_capacity(g.len());
    let mut image = Vec::with_capacity(g.len());
    for r in g.rays() {
        let m = twisted_adjoint(r.rep())?;
        image.push(
            po.project(&m)
                .ok_or_else(|| Error::validation("theta", format!("ξ of {r} lies outside O′")))?,
        );
        xi.push(m);
    }
    let one = po.identity();
    let kernel = (0..g.len()).filter(|&i| image[i] == one).collect();
    // Direct route: ξ_p ∈ I′ ⊆ {±id}.
    let id = Mat::identity(s.field(), s.dim());
    let minus_id_allowed = i_weak(s).order == 2;
    let kernel_by_sign = (0..g.len())
        .filter(|&i| xi[i] == id || (minus_id_allowed && xi[i] == id.neg()))
        .collect();
    Ok(ThetaMap {
        alg: alg.clone(),
        g,
        po,
        xi,
        image,
        kernel,
        kernel_by_sign,
    })
}

impl ThetaMap {
    pub fn g(&self) -> &RayGroup {
        &self.g
    }

    pub fn po(&self) -> &ProjectiveGroup {
        &self.po
    }

    pub fn xi(&self, i: usize) -> &Mat {
        &self.xi[i]
    }

    pub fn image(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn kernel(&self) -> Vec<&Ray> {
        self.kernel.iter().map(|&i| self.g.ray(i)).collect()
    }

    pub fn kernel_even(&self) -> usize {
        self.kernel.iter().filter(|&&i| self.g.ray(i).is_even()).count()
    }

    pub fn kernel_odd(&self) -> usize {
        self.kernel.iter().filter(|&&i| self.g.ray(i).is_odd()).count()
    }

    /// The kernel read off the classes agrees with direct `±id` testing.
    pub fn kernel_routes_agree(&self) -> bool {
        self.kernel == self.kernel_by_sign
    }

    pub fn is_homomorphism(&self) -> bool {
        let n = self.g.len();
        (0..n).all(|a| (0..n).all(|b| self.image[self.g.mul(a, b)] == self.po.compose(self.image[a], self.image[b])))
    }

    pub fn is_surjective(&self) -> bool {
        self.image.iter().collect::<BTreeSet<_>>().len() == self.po.len()
    }

    /// `{ξ_p : Fp ∈ ℊ} = O′` as sets.
    pub fn xi_onto_o_weak(&self) -> bool {
        let images: BTreeSet<&Mat> = self.xi.iter().collect();
        let o: BTreeSet<&Mat> = self.po.o_weak().elements().iter().collect();
        images == o
    }

    /// `ξ_{pq} = ξ_p ∘ ξ_q` on every pair of rays.
    pub fn xi_is_homomorphism(&self) -> bool {
        let n = self.g.len();
        (0..n).all(|a| (0..n).all(|b| self.xi[self.g.mul(a, b)] == self.xi[a].mul(&self.xi[b]).expect("square")))
    }

    pub fn g0_is_g(&self) -> bool {
        self.g.rays().iter().all(Ray::is_even)
    }

    pub fn g0_image_is_po(&self) -> bool {
        self.g
            .even_indices()
            .iter()
            .map(|&i| self.image[i])
            .collect::<BTreeSet<_>>()
            .len()
            == self.po.len()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel.len() == 1
    }

    /// The inverse of `θ` on `indices`, if `θ` restricted there is a
    /// bijection onto `PO′`.
    pub fn inverse_on(&self, indices: &[usize]) -> Option<Vec<usize>> {
        let mut inv: Vec<Option<usize>> = vec![None; self.po.len()];
        for &i in indices {
            let slot = &mut inv[self.image[i]];
            if slot.is_some() {
                return None;
            }
            *slot = Some(i);
        }
        inv.into_iter().collect()
    }

    /// Checks `ker θ = {F1, Fe}`, that the cosets `{Fp, Fp·Fe}` partition
    /// `ℊ`, and that `θ` induces a bijection from the cosets onto `PO′`.
    pub fn quotient_bijection(&self, e: &Ray) -> Result<bool> {
        let Some(ei) = self.g.index_of(e) else {
            return Ok(false);
        };
        let expected: BTreeSet<usize> = [self.g.identity(), ei].into();
        if self.kernel.iter().copied().collect::<BTreeSet<_>>() != expected {
            return Ok(false);
        }
        let mut covered = vec![false; self.g.len()];
        let mut reps = Vec::new();
        for p in 0..self.g.len() {
            if covered[p] {
                continue;
            }
            let q = self.g.mul(p, ei);
            if q == p || covered[q] || self.image[q] != self.image[p] {
                return Ok(false);
            }
            covered[p] = true;
            covered[q] = true;
            reps.push(p);
        }
        Ok(self.inverse_on(&reps).is_some())
    }

    pub fn algebra(&self) -> &Arc<CliffordAlgebra> {
        &self.alg
    }
}

/// The ray `F e` of the product of an orthogonal basis, with its checks.
#[derive(Clone, Debug, Serialize)]
pub struct DistinguishedE {
    pub ray: Ray,
    /// The same construction from a second orthogonal basis.
    pub alternative: Ray,
    pub basis_independent: bool,
    pub xi_is_minus_id: bool,
    /// `e e_j = (-1)^(dim V - 1) e_j e` for every basis vector `e_j`.
    pub commutation: bool,
}

pub fn distinguished_e(alg: &Arc<CliffordAlgebra>) -> Result<DistinguishedE> {
    let s = alg.space();
    let n = s.dim();
    if s.field().characteristic() == 2 {
        return Err(Error::CharTwo);
    }
    if !s.radical().is_empty() {
        return Err(Error::DegenerateForm);
    }
    let product = |basis: &[Vector]| -> Result<Multivector> {
        basis
            .iter()
            .try_fold(Multivector::one(alg), |acc, v| acc.mul(&Multivector::vector(alg, v)))
    };
    let basis = s.orthogonal_basis()?;
    let e = product(&basis)?;
    let two = s.field().from_i64(2);
    let start: Vec<Vector> = (0..n)
        .map(|j| {
            let ej = Vector::basis(s.field(), n, j);
            if j + 1 < n {
                ej.add(&Vector::basis(s.field(), n, j + 1))
            } else {
                ej.scale(two)
            }
        })
        .collect();
    let alternative = Ray::new(&product(&s.orthogonal_basis_from(&start)?)?)?;
    let ray = Ray::new(&e)?;
    let minus_id = Mat::identity(s.field(), n).neg();
    let sign = if n.is_multiple_of(2) {
        -s.field().one()
    } else {
        s.field().one()
    };
    let mut commutation = true;
    for v in &basis {
        let x = Multivector::vector(alg, v);
        commutation &= e.mul(&x)? == x.mul(&e)?.scale(sign);
    }
    Ok(DistinguishedE {
        basis_independent: ray == alternative,
        xi_is_minus_id: n == 0 || twisted_adjoint(&e)? == minus_id,
        commutation,
        ray,
        alternative,
    })
}

/// Kernel families `{F(1 + y ab)}` and `{F(a + y Q(a) b)}` for every plane
/// of the radical.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FamilyCheck {
    pub planes: usize,
    /// Every even family has `|F|` members, all in `ker θ`.
    pub even_included: bool,
    /// Number of planes containing a regular vector.
    pub regular_planes: usize,
    /// Every odd family (planes with a regular vector) has `|F|` members,
    /// all in `ker θ`.
    pub odd_included: bool,
}

fn check_families(theta: &ThetaMap, budget: &Budget) -> Result<FamilyCheck> {
    let alg = theta.algebra();
    let s = alg.space();
    let q = s.field().order().ok_or(Error::InfiniteField(s.field()))? as usize;
    let kernel: BTreeSet<&Ray> = theta.kernel().into_iter().collect();
    let mut out = FamilyCheck {
        even_included: true,
        odd_included: true,
        ..Default::default()
    };
    for (u, v) in radical_planes(s, budget)? {
        out.planes += 1;
        let (a, b) = kernel_pair(s, &u, &v, budget)?;
        let even = sorted_rays(even_kernel_family(alg, &a, &b)?);
        out.even_included &= even.len() == q && even.iter().all(|r| kernel.contains(r));
        if !s.eval_q(&a)?.is_zero() {
            out.regular_planes += 1;
            let odd = sorted_rays(odd_kernel_family(alg, &a, &b)?);
            out.odd_included &= odd.len() == q && odd.iter().all(|r| kernel.contains(r));
        }
    }
    Ok(out)
}

/// Verified table membership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableCheck {
    pub table: TableRow,
    pub bijection: bool,
}

/// Enumeration results against the classifier's predictions.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub classification: CaseClassification,
    pub g_order: usize,
    pub po_order: usize,
    pub kernel: Vec<Ray>,
    pub kernel_even: usize,
    pub kernel_odd: usize,
    pub kernel_routes_agree: bool,
    pub homomorphism: bool,
    pub surjective: bool,
    pub xi_onto_o_weak: bool,
    pub xi_homomorphism: bool,
    pub g0_is_g: bool,
    pub g0_image_is_po: bool,
    pub injective: bool,
    pub even_bijective: bool,
    pub tables: Vec<TableCheck>,
    pub distinguished_e: Option<Ray>,
    pub families: Option<FamilyCheck>,
    pub matched: bool,
}

pub fn verify_classification(alg: &Arc<CliffordAlgebra>, budget: &Budget) -> Result<ClassificationReport> {
    let theta = build_theta(alg, budget)?;
    verify_with_theta(&theta, budget)
}

pub fn verify_with_theta(theta: &ThetaMap, budget: &Budget) -> Result<ClassificationReport> {
    let alg = theta.algebra();
    let s = alg.space();
    let c = classify_scenario(s);
    let kernel_even = theta.kernel_even();
    let kernel_odd = theta.kernel_odd();
    let injective = theta.is_injective();
    let even_bijective = theta.inverse_on(&theta.g().even_indices()).is_some();
    let all: Vec<usize> = (0..theta.g().len()).collect();
    let e = if c.table == Some(TableRow::Table3) {
        Some(distinguished_e(alg)?.ray)
    } else {
        None
    };
    let mut tables = Vec::new();
    for t in c.tables() {
        let bijection = match t {
            TableRow::Table1 => theta.inverse_on(&all).is_some(),
            TableRow::Table2 => even_bijective,
            TableRow::Table3 => theta.quotient_bijection(e.as_ref().expect("computed for Table 3"))?,
        };
        tables.push(TableCheck { table: t, bijection });
    }
    let families = if c.hypotheses.radical_dim >= 2 {
        Some(check_families(theta, budget)?)
    } else {
        None
    };
    let listed = c.tables();
    let mut matched = c.kernel_even.admits(kernel_even as u64)
        && c.kernel_odd.admits(kernel_odd as u64)
        && theta.kernel_routes_agree()
        && theta.is_homomorphism()
        && theta.is_surjective()
        && c.g0_image_is_po.is_none_or(|p| p == theta.g0_image_is_po())
        && c.g0_is_g.is_none_or(|p| p == theta.g0_is_g())
        && tables.iter().all(|t| t.bijection)
        // The first two tables list every case where the isomorphism occurs.
        && injective == listed.contains(&TableRow::Table1)
        && even_bijective == listed.contains(&TableRow::Table2);
    if let Some(f) = &families {
        matched &= f.planes > 0 && f.even_included;
        if c.clause == Clause::Iso2D {
            matched &= f.regular_planes > 0 && f.odd_included;
        }
    }
    Ok(ClassificationReport {
        classification: c,
        g_order: theta.g().len(),
        po_order: theta.po().len(),
        kernel: theta.kernel().into_iter().cloned().collect(),
        kernel_even,
        kernel_odd,
        kernel_routes_agree: theta.kernel_routes_agree(),
        homomorphism: theta.is_homomorphism(),
        surjective: theta.is_surjective(),
        xi_onto_o_weak: theta.xi_onto_o_weak(),
        xi_homomorphism: theta.xi_is_homomorphism(),
        g0_is_g: theta.g0_is_g(),
        g0_image_is_po: theta.g0_image_is_po(),
        injective,
        even_bijective,
        tables,
        distinguished_e: e,
        families,
        matched,
    })
}

/// Index pairs `(a, b)` with `a < n`, `b < m`: all of them when the budget
/// allows, otherwise a fixed-seed sample.
fn index_pairs(n: usize, m: usize, budget: &Budget) -> (Vec<(usize, usize)>, bool) {
    if n == 0 || m == 0 {
        return (Vec::new(), false);
    }
    if (n as u128) * (m as u128) <= budget.0 as u128 {
        return ((0..n).flat_map(|a| (0..m).map(move |b| (a, b))).collect(), false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let pairs = (0..SAMPLE_PAIRS)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..m)))
        .collect();
    (pairs, true)
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationReport {
    pub pairs: usize,
    pub sampled: bool,
    /// `Fm · Fq` and `Fq · Fm` lie in `ℋ` and translations are invertible.
    pub translations_closed: bool,
    /// `F α(p) = (Fp)^{-1}` for every ray of `ℊ`.
    pub reversal_inverts: bool,
    /// `λ_e = ρ_e` on `Cl₀` and `λ_e = ±ρ_e` on `Cl₁`, checked on blades.
    pub e_translations: Option<bool>,
}

impl TranslationReport {
    pub fn holds(&self) -> bool {
        self.translations_closed && self.reversal_inverts && self.e_translations != Some(false)
    }
}

pub fn verify_lambda_rho_alpha(
    alg: &Arc<CliffordAlgebra>,
    h: &RayGroup,
    g: &RayGroup,
    budget: &Budget,
) -> Result<TranslationReport> {
    let (pairs, sampled) = index_pairs(h.len(), h.len(), budget);
    let mut closed = true;
    for &(a, b) in &pairs {
        let (m, q) = (h.ray(a), h.ray(b));
        for p in [m.mul(q)?, q.mul(m)?] {
            closed &= p.is_some_and(|p| h.contains(&p));
        }
    }
    for m in h.rays() {
        closed &= m.rep().left_mul_matrix().is_invertible();
    }
    let mut inverts = true;
    for (i, p) in g.rays().iter().enumerate() {
        inverts &= Ray::new(&p.rep().reversal())? == *g.ray(g.inverse(i));
    }
    let s = alg.space();
    let e_translations = if s.dim() > 0 && s.field().characteristic() != 2 && s.radical().is_empty() {
        let e = distinguished_e(alg)?.ray;
        let odd_sign = if s.dim().is_multiple_of(2) {
            -s.field().one()
        } else {
            s.field().one()
        };
        let mut ok = true;
        for mask in 0..alg.size() as u32 {
            let z = Multivector::blade(alg, mask);
            let (left, right) = (e.rep().mul(&z)?, z.mul(e.rep())?);
            ok &= match z.parity() {
                Parity::Odd => left == right.scale(odd_sign),
                _ => left == right,
            };
            ok &= Ray::new(&left)? == Ray::new(&right)?;
        }
        Some(ok)
    } else {
        None
    };
    Ok(TranslationReport {
        pairs: pairs.len(),
        sampled,
        translations_closed: closed,
        reversal_inverts: inverts,
        e_translations,
    })
}

fn map_rays(ext: &CliffordExtension, rays: &[Ray]) -> Result<Vec<Ray>> {
    Ok(sorted_rays(
        rays.iter()
            .map(|r| Ray::new(&ext.apply(r.rep())?))
            .collect::<Result<Vec<_>>>()?,
    ))
}

/// Rays of `ℊ` acting on `V` as an element of `I′`.
fn kernel_via_sign(alg: &Arc<CliffordAlgebra>, g: &RayGroup) -> Result<Vec<Ray>> {
    let s = alg.space();
    let id = Mat::identity(s.field(), s.dim());
    let sign = i_weak(s).order == 2;
    let mut out = Vec::new();
    for r in g.rays() {
        let x = twisted_adjoint(r.rep())?;
        if x == id || (sign && x == id.neg()) {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// Behaviour of `Cl(ψ)` on the projective structures.
#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceReport {
    pub ratio: String,
    /// `Cl(ψ)` is bijective and maps each `Cl^(k)` onto its counterpart.
    pub filtration: bool,
    pub h_mapped: bool,
    pub m_mapped: bool,
    pub g_mapped: bool,
    /// `Cl(ψ)` is multiplicative at ray level on all pairs of `ℊ`.
    pub g_isomorphism: bool,
    /// `ψ ∘ ξ_p = ξ̃_{Cl(ψ)(p)} ∘ ψ` for every ray of `ℊ`.
    pub equivariant: bool,
    pub kernels_correspond: bool,
    pub g_order: usize,
}

impl EquivarianceReport {
    pub fn holds(&self) -> bool {
        self.filtration
            && self.h_mapped
            && self.m_mapped
            && self.g_mapped
            && self.g_isomorphism
            && self.equivariant
            && self.kernels_correspond
    }
}

fn filtration_preserved(ext: &CliffordExtension) -> Result<bool> {
    let src = ext.src();
    let mut cols = Vec::with_capacity(src.size());
    for mask in 0..src.size() as u32 {
        let img = ext.apply(&Multivector::blade(src, mask))?;
        if img.is_zero() || img.filtration_degree()? != mask.count_ones() {
            return Ok(false);
        }
        cols.push(Vector::new(src.field(), img.to_dense())?);
    }
    Ok(Mat::from_columns(src.field(), ext.dst().size(), &cols).is_invertible())
}

pub fn verify_similarity_equivariance(ext: &CliffordExtension, budget: &Budget) -> Result<EquivarianceReport> {
    let (src, dst) = (ext.src(), ext.dst());
    let psi = ext.similarity().matrix();
    let filtration = filtration_preserved(ext)?;
    let h = enumerate_h(src, budget)?;
    let h_dst = enumerate_h(dst, budget)?;
    let m = enumerate_m(src, budget)?;
    let m_dst = enumerate_m(dst, budget)?;
    let g = enumerate_g(src, budget)?;
    let g_dst = enumerate_g(dst, budget)?;
    let h_mapped = map_rays(ext, h.rays())? == h_dst.rays();
    let m_mapped = map_rays(ext, &m.rays)? == m_dst.rays;
    let g_mapped = map_rays(ext, g.rays())? == g_dst.rays();
    let images: Vec<Ray> = g
        .rays()
        .iter()
        .map(|r| Ray::new(&ext.apply(r.rep())?))
        .collect::<Result<_>>()?;
    let (pairs, _) = index_pairs(g.len(), g.len(), budget);
    let mut g_isomorphism = true;
    for (a, b) in pairs {
        let lhs = &images[g.mul(a, b)];
        g_isomorphism &= images[a].mul(&images[b])?.as_ref() == Some(lhs);
    }
    let mut equivariant = true;
    for (r, img) in g.rays().iter().zip(&images) {
        let lhs = psi.mul(&twisted_adjoint(r.rep())?)?;
        let rhs = twisted_adjoint(img.rep())?.mul(psi)?;
        equivariant &= lhs == rhs;
    }
    let kernels_correspond = map_rays(ext, &kernel_via_sign(src, &g)?)? == kernel_via_sign(dst, &g_dst)?;
    Ok(EquivarianceReport {
        ratio: ext.ratio().to_string(),
        filtration,
        h_mapped,
        m_mapped,
        g_mapped,
        g_isomorphism,
        equivariant,
        kernels_correspond,
        g_order: g.len(),
    })
}

/// The six notions that must not change when `⊙_c` replaces the product.
#[derive(Clone, Debug, Serialize)]
pub struct RescalingReport {
    pub c: String,
    pub filtration: bool,
    pub translations: bool,
    pub reversal: bool,
    pub h: bool,
    pub m_and_g: bool,
    pub g_action: bool,
    pub translation_pairs: usize,
    pub sampled: bool,
}

impl RescalingReport {
    pub fn holds(&self) -> bool {
        self.filtration && self.translations && self.reversal && self.h && self.m_and_g && self.g_action
    }
}

/// Recomputes each notion in `Cl(V, Q, ⊙_c)` and compares it with the
/// original product. Point sets for `⊙_c` are enumerated in `Cl(V, cQ)` and
/// pulled back along `Cl(id)⁻¹`.
pub fn verify_rescaling(
    alg: &Arc<CliffordAlgebra>,
    c: crate::field::Scalar,
    budget: &Budget,
) -> Result<RescalingReport> {
    let resc = Rescaling::with_algebra(alg, c)?;
    let back = resc.backward();
    let target = resc.forward().dst();
    let filtration = filtration_preserved(resc.forward())?;

    let mut homogeneous = enumerate_span_rays(alg, &alg.even_masks(), budget)?;
    homogeneous.extend(enumerate_span_rays(alg, &alg.odd_masks(), budget)?);
    let homogeneous: Vec<Ray> = homogeneous.iter().map(Ray::new).collect::<Result<_>>()?;

    let h = enumerate_h(alg, budget)?;
    let (pairs, sampled) = index_pairs(h.len(), homogeneous.len(), budget);
    let mut translations = true;
    for &(a, b) in &pairs {
        let (m, q) = (h.ray(a).rep(), homogeneous[b].rep());
        translations &= Ray::new(&m.mul(q)?)? == Ray::new(&resc.odot(m, q)?)?;
        translations &= Ray::new(&q.mul(m)?)? == Ray::new(&resc.odot(q, m)?)?;
    }

    let mut reversal = true;
    for q in &homogeneous {
        let pulled = back.apply(&resc.forward().apply(q.rep())?.reversal())?;
        reversal &= Ray::new(&q.rep().reversal())? == Ray::new(&pulled)?;
    }

    let h_ok = map_rays(back, enumerate_h(target, budget)?.rays())? == h.rays();
    let m = enumerate_m(alg, budget)?;
    let g = enumerate_g(alg, budget)?;
    let m_and_g = map_rays(back, &enumerate_m(target, budget)?.rays)? == m.rays
        && map_rays(back, enumerate_g(target, budget)?.rays())? == g.rays();

    let mut g_action = true;
    for r in g.rays() {
        let there = twisted_adjoint(&resc.forward().apply(r.rep())?)?;
        g_action &= twisted_adjoint(r.rep())? == there;
    }
    Ok(RescalingReport {
        c: c.to_string(),
        filtration,
        translations,
        reversal,
        h: h_ok,
        m_and_g,
        g_action,
        translation_pairs: pairs.len(),
        sampled,
    })
}

/// A line with `Q(i) = -1` against its sign-flipped companion: the algebras
/// differ although the projective quotients agree.
#[derive(Clone, Debug, Serialize)]
pub struct SignFlipReport {
    pub i_squared_is_minus_one: bool,
    pub image_squared_is_one: bool,
    /// `(1 + ψ(i))(1 − ψ(i)) = 0`.
    pub zero_divisor: bool,
    pub source_quotient_order: usize,
    pub target_quotient_order: usize,
    pub quotients_matched: bool,
    /// Some element of the source Lipschitz group squares to `-1`.
    pub source_has_root_of_minus_one: bool,
    /// Some element of the target Lipschitz group squares to `-1`.
    pub target_has_root_of_minus_one: bool,
}

impl SignFlipReport {
    pub fn holds(&self) -> bool {
        self.i_squared_is_minus_one
            && self.image_squared_is_one
            && self.zero_divisor
            && self.source_quotient_order == 2
            && self.target_quotient_order == 2
            && self.quotients_matched
            && self.source_has_root_of_minus_one
            && !self.target_has_root_of_minus_one
    }
}

/// `t · rep` squares to `-1` for some `t ∈ F^×`, for some ray of `g`.
fn has_root_of_minus_one(g: &RayGroup) -> Result<bool> {
    for r in g.rays() {
        if let Some(s) = r.rep().mul(r.rep())?.as_scalar() {
            if !s.is_zero() && (-s.inv()?).square_root().is_some() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn verify_sign_flip(s: &QuadraticSpace, budget: &Budget) -> Result<SignFlipReport> {
    if s.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: s.dim(),
        });
    }
    let field = s.field();
    let minus_one = -field.one();
    let src = CliffordAlgebra::new(s.clone())?;
    let sim = Similarity::rescaling(s, minus_one)?;
    let dst = CliffordAlgebra::new(sim.dst().clone())?;
    let ext = CliffordExtension::with_algebras(sim, src.clone(), dst.clone())?;
    let i = Multivector::blade(&src, 1);
    let psi_i = ext.apply(&i)?;
    let one = Multivector::one(&dst);
    let g = enumerate_g(&src, budget)?;
    let g_dst = enumerate_g(&dst, budget)?;
    Ok(SignFlipReport {
        i_squared_is_minus_one: i.mul(&i)? == Multivector::scalar(&src, minus_one),
        image_squared_is_one: psi_i.mul(&psi_i)? == one,
        zero_divisor: one.add(&psi_i)?.mul(&one.sub(&psi_i)?)?.is_zero(),
        source_quotient_order: g.len(),
        target_quotient_order: g_dst.len(),
        quotients_matched: map_rays(&ext, g.rays())? == g_dst.rays(),
        source_has_root_of_minus_one: has_root_of_minus_one(&g)?,
        target_has_root_of_minus_one: has_root_of_minus_one(&g_dst)?,
    })
}
