//! Clifford extensions of similarities and the rescaled product `⊙_c`.

use std::sync::Arc;

use serde::Serialize;

use crate::budget::Budget;
use crate::clifford::{CliffordAlgebra, Multivector};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::{Mat, Vector};
use crate::metric::QuadraticSpace;

/// A linear map `ψ: (V, Q) → (Ṽ, Q̃)` with `Q̃ ∘ ψ = c Q`.
#[derive(Clone, Debug)]
pub struct Similarity {
    src: QuadraticSpace,
    dst: QuadraticSpace,
    matrix: Mat,
    ratio: Scalar,
}

impl Similarity {
    /// Checks that `matrix` is a similarity and records its ratio.
    pub fn new(src: QuadraticSpace, dst: QuadraticSpace, matrix: Mat, budget: &Budget) -> Result<Self> {
        let ratio = src
            .similarity_ratio(&dst, &matrix, budget)?
            .ok_or(Error::NotSimilarity)?;
        Ok(Similarity {
            src,
            dst,
            matrix,
            ratio,
        })
    }

    /// `id: (V, Q) → (V, cQ)`. When `Q(V) = {0}` the ratio is 1.
    pub fn rescaling(space: &QuadraticSpace, c: Scalar) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroRatio);
        }
        if c.field() != space.field() {
            return Err(Error::MixedFields(space.field(), c.field()));
        }
        let ratio = if space.is_zero_form() { space.field().one() } else { c };
        Ok(Similarity {
            src: space.clone(),
            dst: space.scaled(c),
            matrix: Mat::identity(space.field(), space.dim()),
            ratio,
        })
    }

    pub fn src(&self) -> &QuadraticSpace {
        &self.src
    }

    pub fn dst(&self) -> &QuadraticSpace {
        &self.dst
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn ratio(&self) -> Scalar {
        self.ratio
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        self.matrix.mul_vec(x)
    }

    /// `ψ⁻¹`, of ratio `c⁻¹`.
    pub fn inverse(&self) -> Similarity {
        Similarity {
            src: self.dst.clone(),
            dst: self.src.clone(),
            matrix: self.matrix.invert().expect("similarities are invertible"),
            ratio: self.ratio.inv().expect("ratio is nonzero"),
        }
    }
}

/// The linear bijection `Cl(ψ): Cl(V, Q) → Cl(Ṽ, Q̃)`, stored as the images of
/// the basis blades.
#[derive(Clone, Debug)]
pub struct CliffordExtension {
    similarity: Similarity,
    src: Arc<CliffordAlgebra>,
    dst: Arc<CliffordAlgebra>,
    images: Vec<Multivector>,
}

impl CliffordExtension {
    pub fn new(similarity: Similarity) -> Result<Self> {
        let src = CliffordAlgebra::new(similarity.src.clone())?;
        let dst = CliffordAlgebra::new(similarity.dst.clone())?;
        Self::with_algebras(similarity, src, dst)
    }

    /// Like [`CliffordExtension::new`] but reuses already built algebras.
    pub fn with_algebras(similarity: Similarity, src: Arc<CliffordAlgebra>, dst: Arc<CliffordAlgebra>) -> Result<Self> {
        if src.space() != &similarity.src || dst.space() != &similarity.dst {
            return Err(Error::SpaceMismatch);
        }
        let n = src.dim();
        let vec_images: Vec<Multivector> = (0..n)
            .map(|j| {
                let img = similarity.apply(&Vector::basis(src.field(), n, j))?;
                Ok(Multivector::vector(&dst, &img))
            })
            .collect::<Result<_>>()?;
        let c_inv = similarity.ratio.inv()?;
        let images = (0..src.size() as u32)
            .map(|mask| {
                // Cl(ψ)(e_{j1}⋯e_{jk}) = c^{-⌊k/2⌋} ψ(e_{j1})⋯ψ(e_{jk})
                let mut acc = Multivector::one(&dst);
                for (j, img) in vec_images.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        acc = acc.mul(img).expect("same algebra");
                    }
                }
                acc.scale(c_inv.pow(mask.count_ones() / 2))
            })
            .collect();
        Ok(CliffordExtension {
            similarity,
            src,
            dst,
            images,
        })
    }

    pub fn similarity(&self) -> &Similarity {
        &self.similarity
    }

    pub fn ratio(&self) -> Scalar {
        self.similarity.ratio
    }

    pub fn src(&self) -> &Arc<CliffordAlgebra> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<CliffordAlgebra> {
        &self.dst
    }

    pub fn apply(&self, m: &Multivector) -> Result<Multivector> {
        if m.space() != self.src.space() {
            return Err(Error::SpaceMismatch);
        }
        let mut dense = vec![self.dst.field().zero(); self.dst.size()];
        for (&mask, &c) in m.terms() {
            for (&t, &d) in self.images[mask as usize].terms() {
                dense[t as usize] += c * d;
            }
        }
        Ok(Multivector::from_dense(&self.dst, &dense))
    }

    /// `Cl(ψ⁻¹)`, reusing the algebras of `self`.
    pub fn inverse(&self) -> CliffordExtension {
        Self::with_algebras(self.similarity.inverse(), self.dst.clone(), self.src.clone())
            .expect("inverse of a valid extension")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistReport {
    /// `Cl(ψ)(mn) = c^(−∂m∂n) Cl(ψ)(m) Cl(ψ)(n)`.
    pub product: bool,
    /// `Cl(ψ)(α(m)) = α̃(Cl(ψ)(m))`, checked for both arguments.
    pub reversal: bool,
    /// `Cl(ψ)(m) Cl(ψ)(m⁻¹) = c^∂m` for each argument that is a unit.
    pub inverse: bool,
}

impl TwistReport {
    pub fn holds(&self) -> bool {
        self.product && self.reversal && self.inverse
    }
}

fn degree(m: &Multivector) -> Result<u32> {
    m.parity().degree().ok_or(Error::NotHomogeneous)
}

/// Checks the twisted multiplicativity of `Cl(ψ)` on a homogeneous pair,
/// together with its compatibility with reversal and inverses.
pub fn verify_twist_identity(ext: &CliffordExtension, m: &Multivector, n: &Multivector) -> Result<TwistReport> {
    let (dm, dn) = (degree(m)?, degree(n)?);
    let c = ext.ratio();
    let lhs = ext.apply(&m.mul(n)?)?;
    let rhs = ext.apply(m)?.mul(&ext.apply(n)?)?.scale(c.inv()?.pow(dm * dn));
    let reversal = [m, n]
        .iter()
        .map(|x| Ok(ext.apply(&x.reversal())? == ext.apply(x)?.reversal()))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    let mut inverse = true;
    for (x, d) in [(m, dm), (n, dn)] {
        if let Some(xi) = x.try_inverse() {
            let prod = ext.apply(x)?.mul(&ext.apply(&xi)?)?;
            inverse &= prod == Multivector::scalar(ext.dst(), c.pow(d));
        }
    }
    Ok(TwistReport {
        product: lhs == rhs,
        reversal,
        inverse,
    })
}

/// The product `⊙_c` on `Cl(V, Q)`, pulled back from `Cl(V, cQ)` along
/// `Cl(id)`.
#[derive(Clone, Debug)]
pub struct Rescaling {
    forward: CliffordExtension,
    backward: CliffordExtension,
}

impl Rescaling {
    pub fn new(space: &QuadraticSpace, c: Scalar) -> Result<Self> {
        let forward = CliffordExtension::new(Similarity::rescaling(space, c)?)?;
        let backward = forward.inverse();
        Ok(Rescaling { forward, backward })
    }

    /// Reuses an existing algebra for `(V, Q)`.
    pub fn with_algebra(alg: &Arc<CliffordAlgebra>, c: Scalar) -> Result<Self> {
        let sim = Similarity::rescaling(alg.space(), c)?;
        let dst = CliffordAlgebra::new(sim.dst.clone())?;
        let forward = CliffordExtension::with_algebras(sim, alg.clone(), dst)?;
        let backward = forward.inverse();
        Ok(Rescaling { forward, backward })
    }

    /// `Cl(id): Cl(V, Q) → Cl(V, cQ)`.
    pub fn forward(&self) -> &CliffordExtension {
        &self.forward
    }

    pub fn backward(&self) -> &CliffordExtension {
        &self.backward
    }

    pub fn algebra(&self) -> &Arc<CliffordAlgebra> {
        self.forward.src()
    }

    pub fn odot(&self, p: &Multivector, q: &Multivector) -> Result<Multivector> {
        let prod = self.forward.apply(p)?.mul(&self.forward.apply(q)?)?;
        self.backward.apply(&prod)
    }

    /// `Cl(id)⁻¹` of the `⊙_c`-inverse, if `p` is a unit for `⊙_c`.
    pub fn odot_inverse(&self, p: &Multivector) -> Result<Option<Multivector>> {
        match self.forward.apply(p)?.try_inverse() {
            Some(inv) => Ok(Some(self.backward.apply(&inv)?)),
            None => Ok(None),
        }
    }
}

/// `p ⊙_c q` computed through the companion space `(V, cQ)`.
pub fn odot_product(space: &QuadraticSpace, c: Scalar, p: &Multivector, q: &Multivector) -> Result<Multivector> {
    if p.space() != space || q.space() != space {
        return Err(Error::SpaceMismatch);
    }
    Rescaling::with_algebra(p.algebra(), c)?.odot(p, q)
}

/// `Cl(ω)` for the isometry `ω = √(c⁻¹) ψ`, with its verification.
#[derive(Clone, Debug)]
pub struct IsometryExtension {
    pub root: Scalar,
    pub extension: CliffordExtension,
    /// `Cl(ω) = Cl₀(ψ) ⊕ √(c⁻¹) Cl₁(ψ)` on every blade.
    pub splits: bool,
    /// `Cl(ω)` is multiplicative on every pair of blades, hence everywhere.
    pub multiplicative: bool,
}

/// Returns `None` when the ratio is not a square.
pub fn isometry_extension(ext: &CliffordExtension) -> Result<Option<IsometryExtension>> {
    let Some(root) = ext.ratio().inv()?.square_root() else {
        return Ok(None);
    };
    let sim = &ext.similarity;
    let omega = Similarity {
        src: sim.src.clone(),
        dst: sim.dst.clone(),
        matrix: sim.matrix.scale(root),
        ratio: ext.src.field().one(),
    };
    let extension = CliffordExtension::with_algebras(omega, ext.src.clone(), ext.dst.clone())?;
    let mut splits = true;
    let blades: Vec<Multivector> = (0..ext.src.size() as u32)
        .map(|m| Multivector::blade(&ext.src, m))
        .collect();
    for b in &blades {
        let mut expected = ext.apply(b)?;
        if b.parity().degree() == Some(1) {
            expected = expected.scale(root);
        }
        splits &= extension.apply(b)? == expected;
    }
    let mut multiplicative = true;
    for a in &blades {
        for b in &blades {
            multiplicative &= extension.apply(&a.mul(b)?)? == extension.apply(a)?.mul(&extension.apply(b)?)?;
        }
    }
    Ok(Some(IsometryExtension {
        root,
        extension,
        splits,
        multiplicative,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::enumerate_span;
    use crate::field::Field;

    fn space(s: &str) -> QuadraticSpace {
        s.parse().unwrap()
    }

    fn homogeneous(alg: &Arc<CliffordAlgebra>) -> Vec<Multivector> {
        let b = Budget::default();
        let mut out = enumerate_span(alg, &alg.even_masks(), false, &b).unwrap();
        out.extend(enumerate_span(alg, &alg.odd_masks(), true, &b).unwrap());
        out
    }

    #[test]
    fn vectors_map_to_their_images() {
        let s = space("gf(5):diag(1,2)");
        let m = Mat::from_i64(Field::Prime(5), &[&[1, 2], &[3, 2]]);
        let t = s.transport(&m, Field::Prime(5).from_i64(3)).unwrap();
        let ext = CliffordExtension::new(Similarity::new(s, t, m.clone(), &Budget::default()).unwrap()).unwrap();
        for j in 0..2 {
            let e = Vector::basis(Field::Prime(5), 2, j);
            let img = ext.apply(&Multivector::vector(ext.src(), &e)).unwrap();
            assert_eq!(img, Multivector::vector(ext.dst(), &m.mul_vec(&e).unwrap()));
        }
    }

    #[test]
    fn vector_pair_picks_up_inverse_ratio() {
        let s = space("gf(3):diag(1,1)");
        let two = Field::Prime(3).from_i64(2);
        let ext = CliffordExtension::new(Similarity::rescaling(&s, two).unwrap()).unwrap();
        let x = Multivector::parse(ext.src(), "e0 + e1").unwrap();
        let y = Multivector::parse(ext.src(), "e1").unwrap();
        let lhs = ext.apply(&x.mul(&y).unwrap()).unwrap();
        let rhs = ext
            .apply(&x)
            .unwrap()
            .mul(&ext.apply(&y).unwrap())
            .unwrap()
            .scale(two.inv().unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn twist_identity_exhaustive_gf3() {
        let s = space("gf(3):([1,0],[1])");
        let two = Field::Prime(3).from_i64(2);
        let ext = CliffordExtension::new(Similarity::rescaling(&s, two).unwrap()).unwrap();
        let all = homogeneous(ext.src());
        for m in &all {
            for n in &all {
                assert!(verify_twist_identity(&ext, m, n).unwrap().holds(), "{m} {n}");
            }
        }
        let mixed = Multivector::parse(ext.src(), "1 + e0").unwrap();
        assert_eq!(verify_twist_identity(&ext, &mixed, &mixed), Err(Error::NotHomogeneous));
    }

    #[test]
    fn extension_round_trip() {
        let s = space("gf(5):([1,2],[1])");
        let five = Field::Prime(5);
        let m = Mat::from_i64(five, &[&[2, 1], &[1, 1]]);
        let t = s.transport(&m, five.from_i64(2)).unwrap();
        let ext = CliffordExtension::new(Similarity::new(s, t, m, &Budget::default()).unwrap()).unwrap();
        let inv = ext.inverse();
        for x in enumerate_span(ext.src(), &[0, 1, 2, 3], false, &Budget::default()).unwrap() {
            assert_eq!(inv.apply(&ext.apply(&x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn rational_sign_flip() {
        let q = Field::Rational;
        let s = space("q:diag(-1)");
        let ext = CliffordExtension::new(Similarity::rescaling(&s, q.from_i64(-1)).unwrap()).unwrap();
        let i = Multivector::parse(ext.src(), "e0").unwrap();
        let i2 = i.mul(&i).unwrap();
        assert_eq!(i2, Multivector::scalar(ext.src(), q.from_i64(-1)));
        assert_eq!(ext.apply(&i2).unwrap(), Multivector::scalar(ext.dst(), q.from_i64(-1)));
        let pi = ext.apply(&i).unwrap();
        assert_eq!(pi.mul(&pi).unwrap(), Multivector::one(ext.dst()));
    }

    #[test]
    fn odot_examples() {
        let s = space("gf(3):diag(1,2)");
        let f = Field::Prime(3);
        let two = f.from_i64(2);
        let r = Rescaling::new(&s, two).unwrap();
        let alg = r.algebra().clone();
        let x = Multivector::parse(&alg, "e0 + 2*e1").unwrap();
        let y = Multivector::parse(&alg, "e1").unwrap();
        let p = Multivector::parse(&alg, "1 + e0^e1").unwrap();
        assert_eq!(r.odot(&x, &y).unwrap(), x.mul(&y).unwrap().scale(two));
        assert_eq!(r.odot(&p, &x).unwrap(), p.mul(&x).unwrap());
        assert_eq!(r.odot(&x, &p).unwrap(), x.mul(&p).unwrap());
        let one = Rescaling::new(&s, f.one()).unwrap();
        assert_eq!(one.odot(&x, &p).unwrap(), x.mul(&p).unwrap());
        assert_eq!(odot_product(&s, f.zero(), &x, &y).unwrap_err(), Error::ZeroRatio);
        assert_eq!(odot_product(&s, two, &x, &y).unwrap(), r.odot(&x, &y).unwrap());
    }

    #[test]
    fn odot_rays_and_even_products_agree() {
        let s = space("gf(3):([1,0],[1])");
        let two = Field::Prime(3).from_i64(2);
        let r = Rescaling::new(&s, two).unwrap();
        let all = homogeneous(r.algebra());
        for p in &all {
            for q in &all {
                let a = p.mul(q).unwrap();
                let b = r.odot(p, q).unwrap();
                assert_eq!(a.normalized().ok(), b.normalized().ok());
                if p.parity().degree() == Some(0) && q.parity().degree() == Some(0) {
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn zero_form_rescaling_is_trivial() {
        let s = space("gf(3):zero(2)");
        let r = Rescaling::new(&s, Field::Prime(3).from_i64(2)).unwrap();
        assert!(r.forward().ratio().is_one());
        let x = Multivector::parse(r.algebra(), "e0").unwrap();
        let y = Multivector::parse(r.algebra(), "e1").unwrap();
        assert_eq!(r.odot(&x, &y).unwrap(), x.mul(&y).unwrap());
    }

    #[test]
    fn isometry_extension_examples() {
        let b = Budget::default();
        let seven = Field::Prime(7);
        let s = space("gf(7):diag(3)");
        let ext = CliffordExtension::new(Similarity::rescaling(&s, seven.from_i64(2)).unwrap()).unwrap();
        let iso = isometry_extension(&ext).unwrap().unwrap();
        assert!(iso.splits && iso.multiplicative);
        let all = enumerate_span(ext.src(), &[0, 1], false, &b).unwrap();
        for x in &all {
            for y in &all {
                let lhs = iso.extension.apply(&x.mul(y).unwrap()).unwrap();
                let rhs = iso
                    .extension
                    .apply(x)
                    .unwrap()
                    .mul(&iso.extension.apply(y).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        let three = Field::Prime(3);
        let s3 = space("gf(3):diag(1,1)");
        let ext3 = CliffordExtension::new(Similarity::rescaling(&s3, three.from_i64(2)).unwrap()).unwrap();
        assert!(isometry_extension(&ext3).unwrap().is_none());
        let id = CliffordExtension::new(Similarity::rescaling(&s3, three.one()).unwrap()).unwrap();
        let iso = isometry_extension(&id).unwrap().unwrap();
        for m in 0..4 {
            let blade = Multivector::blade(id.src(), m);
            assert_eq!(iso.extension.apply(&blade).unwrap(), id.apply(&blade).unwrap());
        }
    }

    #[test]
    fn not_a_similarity() {
        let s = space("gf(3):diag(1,1)");
        let shear = Mat::from_i64(Field::Prime(3), &[&[1, 1], &[0, 1]]);
        assert_eq!(
            Similarity::new(s.clone(), s, shear, &Budget::default()).unwrap_err(),
            Error::NotSimilarity
        );
    }
}
