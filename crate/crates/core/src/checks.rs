//! Sweeps of algebra laws and functor identities: over all elements when the
//! algebra is small, otherwise over seeded random samples.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::{saturating_pow, Budget};
use crate::clifford::{enumerate_span, CliffordAlgebra, Multivector, Parity};
use crate::error::Result;
use crate::field::{Field, Scalar};
use crate::functor::{verify_twist_identity, CliffordExtension};
use crate::linalg::{enumerate_vectors, Vector};

/// Random instances checked when a sweep is not exhaustive.
pub const SAMPLES: usize = 1_000;
/// Largest number of element pairs swept exhaustively.
pub const PAIR_LIMIT: u128 = 1 << 17;
const SEED: u64 = 0x0c1f_f0de;

pub fn random_scalar(field: Field, rng: &mut impl Rng) -> Scalar {
    match field {
        Field::Prime(p) => field.from_i64(rng.gen_range(0..p as i64)),
        Field::Gf4 => {
            let w = Field::gf4_generator();
            [field.zero(), field.one(), w, w * w][rng.gen_range(0..4)]
        }
        Field::Rational => field
            .rational(rng.gen_range(-6..=6), rng.gen_range(1..=4))
            .expect("nonzero denominator"),
    }
}

pub fn random_element(alg: &Arc<CliffordAlgebra>, masks: &[u32], rng: &mut impl Rng) -> Multivector {
    let f = alg.field();
    Multivector::from_terms(alg, masks.iter().map(|&m| (m, random_scalar(f, rng))))
}

fn random_nonzero(alg: &Arc<CliffordAlgebra>, masks: &[u32], rng: &mut impl Rng) -> Multivector {
    loop {
        let m = random_element(alg, masks, rng);
        if !m.is_zero() {
            return m;
        }
    }
}

/// Every element of the span of `masks` if there are few enough for
/// exhaustive pair sweeps.
fn small_span(
    alg: &Arc<CliffordAlgebra>,
    masks: &[u32],
    nonzero: bool,
    budget: &Budget,
) -> Result<Option<Vec<Multivector>>> {
    let Some(q) = alg.field().order() else {
        return Ok(None);
    };
    let n = saturating_pow(q, masks.len() as u64);
    if n * n > PAIR_LIMIT {
        return Ok(None);
    }
    Ok(Some(enumerate_span(alg, masks, nonzero, budget)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraLaws {
    pub exhaustive: bool,
    /// Element pairs checked.
    pub pairs: usize,
    pub associative: bool,
    /// Products of homogeneous parts have the expected parity.
    pub grading: bool,
    /// `σ` is an involutive automorphism negating exactly the odd part.
    pub main_involution: bool,
    /// `α` is an involutive antiautomorphism fixing `V`.
    pub reversal: bool,
    /// `xy + yx = B(x, y)` and `x² = Q(x)` on vectors.
    pub vectors: bool,
    /// For `Q(V) = {0}`, no odd element is a unit.
    pub no_odd_units: Option<bool>,
}

impl AlgebraLaws {
    pub fn holds(&self) -> bool {
        self.associative
            && self.grading
            && self.main_involution
            && self.reversal
            && self.vectors
            && self.no_odd_units != Some(false)
    }
}

fn pair_laws(x: &Multivector, y: &Multivector, out: &mut AlgebraLaws) -> Result<()> {
    let xy = x.mul(y)?;
    let (x0, x1, y0, y1) = (x.even_part(), x.odd_part(), y.even_part(), y.odd_part());
    let parity_ok = |m: Multivector, want: Parity| m.is_zero() || m.parity() == want;
    out.grading &= parity_ok(x0.mul(&y0)?, Parity::Even)
        && parity_ok(x1.mul(&y1)?, Parity::Even)
        && parity_ok(x0.mul(&y1)?, Parity::Odd)
        && parity_ok(x1.mul(&y0)?, Parity::Odd);
    let sx = x.main_involution();
    out.main_involution &=
        sx.main_involution() == *x && sx == x0.sub(&x1)? && xy.main_involution() == sx.mul(&y.main_involution())?;
    let rx = x.reversal();
    out.reversal &=
        rx.reversal() == *x && (x.as_vector().is_none() || rx == *x) && xy.reversal() == y.reversal().mul(&rx)?;
    out.pairs += 1;
    Ok(())
}

fn vector_laws(alg: &Arc<CliffordAlgebra>, u: &Vector, v: &Vector) -> Result<bool> {
    let s = alg.space();
    let (mu, mv) = (Multivector::vector(alg, u), Multivector::vector(alg, v));
    let anti = mu.mul(&mv)?.add(&mv.mul(&mu)?)?;
    Ok(anti == Multivector::scalar(alg, s.eval_b(u, v)?) && mu.mul(&mu)? == Multivector::scalar(alg, s.eval_q(u)?))
}

pub fn check_algebra_laws(alg: &Arc<CliffordAlgebra>, budget: &Budget) -> Result<AlgebraLaws> {
    let all_masks: Vec<u32> = (0..alg.size() as u32).collect();
    let blades: Vec<Multivector> = all_masks.iter().map(|&m| Multivector::blade(alg, m)).collect();
    let mut out = AlgebraLaws {
        exhaustive: false,
        pairs: 0,
        associative: true,
        grading: true,
        main_involution: true,
        reversal: true,
        vectors: true,
        no_odd_units: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let s = alg.space();
    let n = s.dim();
    if let Some(elements) = small_span(alg, &all_masks, false, budget)? {
        out.exhaustive = true;
        for x in &elements {
            for y in &elements {
                pair_laws(x, y, &mut out)?;
                // Linear in the third factor, so blades suffice.
                let xy = x.mul(y)?;
                for z in &blades {
                    out.associative &= xy.mul(z)? == x.mul(&y.mul(z)?)?;
                }
            }
        }
        let vectors = enumerate_vectors(s.field(), n, false, budget)?;
        for u in &vectors {
            for v in &vectors {
                out.vectors &= vector_laws(alg, u, v)?;
            }
        }
    } else {
        for _ in 0..SAMPLES {
            let x = random_element(alg, &all_masks, &mut rng);
            let y = random_element(alg, &all_masks, &mut rng);
            let z = random_element(alg, &all_masks, &mut rng);
            pair_laws(&x, &y, &mut out)?;
            out.associative &= x.mul(&y)?.mul(&z)? == x.mul(&y.mul(&z)?)?;
            let u = Vector::new(s.field(), (0..n).map(|_| random_scalar(s.field(), &mut rng)).collect())?;
            let v = Vector::new(s.field(), (0..n).map(|_| random_scalar(s.field(), &mut rng)).collect())?;
            out.vectors &= vector_laws(alg, &u, &v)?;
        }
    }
    if s.is_zero_form() {
        let odd = alg.odd_masks();
        let candidates = match small_span(alg, &odd, true, budget)? {
            Some(all) => all,
            None => (0..SAMPLES).map(|_| random_nonzero(alg, &odd, &mut rng)).collect(),
        };
        out.no_odd_units = Some(candidates.iter().all(|m| m.try_inverse().is_none()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorIdentities {
    pub exhaustive: bool,
    pub pairs: usize,
    pub product: bool,
    pub reversal: bool,
    pub inverse: bool,
}

impl FunctorIdentities {
    pub fn holds(&self) -> bool {
        self.product && self.reversal && self.inverse
    }
}

/// Twisted multiplicativity, reversal and inverse identities of `Cl(ψ)` on
/// pairs of nonzero homogeneous elements.
pub fn check_functor_identities(ext: &CliffordExtension, budget: &Budget) -> Result<FunctorIdentities> {
    let alg = ext.src();
    let (even, odd) = (alg.even_masks(), alg.odd_masks());
    let mut out = FunctorIdentities {
        exhaustive: false,
        pairs: 0,
        product: true,
        reversal: true,
        inverse: true,
    };
    let mut record = |m: &Multivector, n: &Multivector| -> Result<()> {
        let r = verify_twist_identity(ext, m, n)?;
        out.product &= r.product;
        out.reversal &= r.reversal;
        out.inverse &= r.inverse;
        out.pairs += 1;
        Ok(())
    };
    let spans = (
        small_span(alg, &even, true, budget)?,
        small_span(alg, &odd, true, budget)?,
    );
    let elements = match spans {
        (Some(mut e), Some(o)) => {
            e.extend(o);
            let total = (e.len() as u128).pow(2);
            (total <= PAIR_LIMIT).then_some(e)
        }
        _ => None,
    };
    let exhaustive = elements.is_some();
    match elements {
        Some(elements) => {
            for m in &elements {
                for n in &elements {
                    record(m, n)?;
                }
            }
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            for _ in 0..SAMPLES {
                let pick = |rng: &mut ChaCha8Rng| {
                    let masks = if rng.gen_bool(0.5) { &even } else { &odd };
                    random_nonzero(alg, masks, rng)
                };
                let (m, n) = (pick(&mut rng), pick(&mut rng));
                record(&m, &n)?;
            }
        }
    }
    out.exhaustive = exhaustive;
    Ok(out)
}
