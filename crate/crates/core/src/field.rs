//! Exact coefficient fields: GF(p) for small primes, GF(4), and the rationals.
//!
//! A [`Scalar`] carries its [`Field`] so that arithmetic between elements of
//! different fields is caught. The operator impls panic on mixed operands;
//! [`field_arithmetic`] and the `try_*` methods report it as an error.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest prime modulus accepted for `GF(p)`.
pub const MAX_PRIME: u8 = 13;

/// Descriptor of a supported coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Prime(u8),
    /// GF(2)[w]/(w² + w + 1).
    Gf4,
    Rational,
}

fn is_prime(p: u8) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Field {
    pub fn prime(p: u8) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::validation("field", format!("{p} is not prime")));
        }
        if p > MAX_PRIME {
            return Err(Error::validation(
                "field",
                format!("prime {p} exceeds the supported maximum {MAX_PRIME}"),
            ));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Field::Prime(p) => p as u32,
            Field::Gf4 => 2,
            Field::Rational => 0,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(p as u64),
            Field::Gf4 => Some(4),
            Field::Rational => None,
        }
    }

    pub fn is_finite(self) -> bool {
        self.order().is_some()
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    /// Image of an integer under the canonical ring map `Z -> F`.
    pub fn from_i64(self, n: i64) -> Scalar {
        let repr = match self {
            Field::Prime(p) => Repr::Residue(n.rem_euclid(p as i64) as u8),
            Field::Gf4 => Repr::Gf4((n.rem_euclid(2)) as u8),
            Field::Rational => Repr::Rational(Ratio::from_integer(n as i128)),
        };
        Scalar { field: self, repr }
    }

    pub fn rational(self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        match self {
            Field::Rational => Ok(Scalar {
                field: self,
                repr: Repr::Rational(Ratio::new(num as i128, den as i128)),
            }),
            _ => self.from_i64(num).try_div(self.from_i64(den)),
        }
    }

    /// The generator `w` of GF(4) over GF(2).
    pub fn gf4_generator() -> Scalar {
        Scalar {
            field: Field::Gf4,
            repr: Repr::Gf4(2),
        }
    }

    /// All elements in a fixed order, `0` first and `1` second.
    pub fn elements(self) -> Result<Vec<Scalar>> {
        match self {
            Field::Prime(p) => Ok((0..p)
                .map(|v| Scalar {
                    field: self,
                    repr: Repr::Residue(v),
                })
                .collect()),
            Field::Gf4 => Ok((0..4)
                .map(|v| Scalar {
                    field: self,
                    repr: Repr::Gf4(v),
                })
                .collect()),
            Field::Rational => Err(Error::InfiniteField(self)),
        }
    }

    /// Nonzero elements in enumeration order.
    pub fn units(self) -> Result<Vec<Scalar>> {
        Ok(self.elements()?.into_iter().skip(1).collect())
    }

    /// Parses a coefficient: integers, `a/b`, and `w`/`w2` in GF(4).
    pub fn parse_scalar(self, text: &str) -> Result<Scalar> {
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::parse("empty scalar"));
        }
        if let Some(rest) = t.strip_prefix('-') {
            return Ok(-self.parse_scalar(rest)?);
        }
        if self == Field::Gf4 {
            match t {
                "w" => return Ok(Field::gf4_generator()),
                "w2" => return Ok(Field::gf4_generator() * Field::gf4_generator()),
                _ => {}
            }
        }
        let parse_int = |s: &str| -> Result<i64> {
            s.trim()
                .parse::<i64>()
                .map_err(|_| Error::parse(format!("invalid scalar `{text}` for {self}")))
        };
        match t.split_once('/') {
            Some((n, d)) => self.rational(parse_int(n)?, parse_int(d)?),
            None => Ok(self.from_i64(parse_int(t)?)),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "gf({p})"),
            Field::Gf4 => write!(f, "gf(4)"),
            Field::Rational => write!(f, "q"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `gf(p)` for primes `p <= 13`, `gf(4)` and `q`.
    fn from_str(s: &str) -> Result<Field> {
        let t = s.trim();
        if t == "q" || t == "Q" {
            return Ok(Field::Rational);
        }
        let inner = t
            .strip_prefix("gf(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse(format!("unknown field `{t}`")))?;
        let q: u8 = inner
            .trim()
            .parse()
            .map_err(|_| Error::validation("field", format!("`{inner}` is not a field order")))?;
        if q == 4 {
            Ok(Field::Gf4)
        } else {
            Field::prime(q)
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Residue(u8),
    /// Bit 0 is the constant coefficient, bit 1 the coefficient of `w`.
    Gf4(u8),
    Rational(Ratio<i128>),
}

/// Exact element of a [`Field`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    field: Field,
    repr: Repr,
}

/// The four field operations, for [`field_arithmetic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn field_arithmetic(a: Scalar, b: Scalar, op: ArithOp) -> Result<Scalar> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.try_div(b),
    }
}

fn gf4_mul(a: u8, b: u8) -> u8 {
    let (a0, a1) = (a & 1, (a >> 1) & 1);
    let (b0, b1) = (b & 1, (b >> 1) & 1);
    let c0 = (a0 & b0) ^ (a1 & b1);
    let c1 = (a0 & b1) ^ (a1 & b0) ^ (a1 & b1);
    c0 | (c1 << 1)
}

fn overflow() -> ! {
    panic!("rational coefficient overflow")
}

impl Scalar {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        match self.repr {
            Repr::Residue(v) | Repr::Gf4(v) => v == 0,
            Repr::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    fn same_field(&self, other: &Scalar) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields(self.field, other.field))
        }
    }

    pub fn try_add(self, rhs: Scalar) -> Result<Scalar> {
        self.same_field(&rhs)?;
        let repr = match (self.repr, rhs.repr) {
            (Repr::Residue(a), Repr::Residue(b)) => {
                let p = match self.field {
                    Field::Prime(p) => p as u16,
                    _ => unreachable!(),
                };
                Repr::Residue(((a as u16 + b as u16) % p) as u8)
            }
            (Repr::Gf4(a), Repr::Gf4(b)) => Repr::Gf4(a ^ b),
            (Repr::Rational(a), Repr::Rational(b)) => Repr::Rational(a.checked_add(&b).unwrap_or_else(|| overflow())),
            _ => unreachable!("representation does not match field"),
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    pub fn try_sub(self, rhs: Scalar) -> Result<Scalar> {
        self.same_field(&rhs)?;
        if let (Repr::Rational(a), Repr::Rational(b)) = (self.repr, rhs.repr) {
            return Ok(Scalar {
                field: self.field,
                repr: Repr::Rational(a.checked_sub(&b).unwrap_or_else(|| overflow())),
            });
        }
        self.try_add(-rhs)
    }

    pub fn try_mul(self, rhs: Scalar) -> Result<Scalar> {
        self.same_field(&rhs)?;
        let repr = match (self.repr, rhs.repr) {
            (Repr::Residue(a), Repr::Residue(b)) => {
                let p = match self.field {
                    Field::Prime(p) => p as u16,
                    _ => unreachable!(),
                };
                Repr::Residue(((a as u16 * b as u16) % p) as u8)
            }
            (Repr::Gf4(a), Repr::Gf4(b)) => Repr::Gf4(gf4_mul(a, b)),
            (Repr::Rational(a), Repr::Rational(b)) => Repr::Rational(a.checked_mul(&b).unwrap_or_else(|| overflow())),
            _ => unreachable!("representation does not match field"),
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    pub fn try_div(self, rhs: Scalar) -> Result<Scalar> {
        self.same_field(&rhs)?;
        self.try_mul(rhs.inv()?)
    }

    pub fn inv(self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let repr = match self.repr {
            Repr::Residue(a) => {
                let p = match self.field {
                    Field::Prime(p) => p,
                    _ => unreachable!(),
                };
                let inv = (1..p)
                    .find(|&b| (a as u16 * b as u16) % p as u16 == 1)
                    .expect("nonzero residue modulo a prime is invertible");
                Repr::Residue(inv)
            }
            // 1 -> 1, w -> w + 1, w + 1 -> w
            Repr::Gf4(a) => Repr::Gf4(match a {
                1 => 1,
                2 => 3,
                _ => 2,
            }),
            Repr::Rational(r) => Repr::Rational(r.recip()),
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    pub fn pow(self, mut exp: u32) -> Scalar {
        let mut base = self;
        let mut acc = self.field.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    /// Integer power allowing negative exponents for nonzero bases.
    pub fn powi(self, exp: i32) -> Result<Scalar> {
        if exp >= 0 {
            Ok(self.pow(exp as u32))
        } else {
            Ok(self.inv()?.pow(exp.unsigned_abs()))
        }
    }

    /// A square root if one exists in the field.
    ///
    /// For GF(p) the smallest residue is returned; rationals give the
    /// nonnegative root.
    pub fn square_root(self) -> Option<Scalar> {
        match self.repr {
            Repr::Residue(_) => self.field.elements().ok()?.into_iter().find(|r| *r * *r == self),
            // Frobenius is bijective, so every element is a square: sqrt(a) = a².
            Repr::Gf4(_) => Some(self * self),
            Repr::Rational(r) => {
                if r.is_negative() {
                    return None;
                }
                let n = isqrt(*r.numer())?;
                let d = isqrt(*r.denom())?;
                Some(Scalar {
                    field: self.field,
                    repr: Repr::Rational(Ratio::new(n, d)),
                })
            }
        }
    }

    /// Integer lift for prime fields (in `[0, p)`), used for display.
    pub fn residue(&self) -> Option<u8> {
        match self.repr {
            Repr::Residue(v) => Some(v),
            _ => None,
        }
    }
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.field, self.repr).cmp(&(other.field, other.repr))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Residue(v) => write!(f, "{v}"),
            Repr::Gf4(v) => f.write_str(["0", "1", "w", "w2"][v as usize]),
            Repr::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $try:ident, $assign:ident, $assign_method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $assign for Scalar {
            fn $assign_method(&mut self, rhs: Scalar) {
                *self = self.$try(rhs).unwrap_or_else(|e| panic!("{e}"));
            }
        }
    };
}

binop!(Add, add, try_add, AddAssign, add_assign);
binop!(Sub, sub, try_sub, SubAssign, sub_assign);
binop!(Mul, mul, try_mul, MulAssign, mul_assign);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self.try_div(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let repr = match self.repr {
            Repr::Residue(v) => {
                let p = match self.field {
                    Field::Prime(p) => p,
                    _ => unreachable!(),
                };
                Repr::Residue((p - v) % p)
            }
            Repr::Gf4(v) => Repr::Gf4(v),
            Repr::Rational(r) => Repr::Rational(-r),
        };
        Scalar {
            field: self.field,
            repr,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_fields() -> Vec<Field> {
        vec![
            Field::Prime(2),
            Field::Prime(3),
            Field::Prime(5),
            Field::Prime(7),
            Field::Prime(11),
            Field::Prime(13),
            Field::Gf4,
        ]
    }

    #[test]
    fn arithmetic_examples() {
        let f2 = Field::Prime(2);
        assert_eq!(field_arithmetic(f2.one(), f2.one(), ArithOp::Add).unwrap(), f2.zero());
        let f3 = Field::Prime(3);
        let two = f3.from_i64(2);
        assert_eq!(field_arithmetic(two, two, ArithOp::Div).unwrap(), f3.one());
        let q = Field::Rational;
        let a = q.rational(2, 3).unwrap();
        let b = q.rational(3, 2).unwrap();
        assert_eq!(field_arithmetic(a, b, ArithOp::Mul).unwrap(), q.one());
    }

    #[test]
    fn arithmetic_errors() {
        let a = Field::Prime(3).one();
        let b = Field::Prime(5).one();
        assert_eq!(
            field_arithmetic(a, b, ArithOp::Add),
            Err(Error::MixedFields(Field::Prime(3), Field::Prime(5)))
        );
        assert_eq!(
            field_arithmetic(a, Field::Prime(3).zero(), ArithOp::Div),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn characteristic_examples() {
        assert_eq!(Field::Prime(2).characteristic(), 2);
        assert_eq!(Field::Gf4.characteristic(), 2);
        assert_eq!(Field::Rational.characteristic(), 0);
    }

    #[test]
    fn enumeration_examples() {
        let f2 = Field::Prime(2);
        assert_eq!(f2.elements().unwrap(), vec![f2.zero(), f2.one()]);
        let f3 = Field::Prime(3);
        assert_eq!(f3.elements().unwrap(), vec![f3.zero(), f3.one(), f3.from_i64(2)]);
        let gf4 = Field::Gf4.elements().unwrap();
        assert_eq!(gf4.len(), 4);
        assert!(gf4[0].is_zero() && gf4[1].is_one());
        assert_eq!(Field::Rational.elements(), Err(Error::InfiniteField(Field::Rational)));
    }

    #[test]
    fn square_root_examples() {
        // Brute-force table of squares mod 7: {0,1,4,2,2,4,1}; 2 = 3² = 4².
        let f7 = Field::Prime(7);
        let squares: Vec<u8> = (0u16..7).map(|r| (r * r % 7) as u8).collect();
        assert_eq!(squares, vec![0, 1, 4, 2, 2, 4, 1]);
        assert_eq!(f7.from_i64(2).square_root(), Some(f7.from_i64(3)));
        // Squares mod 3 are {0, 1}.
        assert_eq!(Field::Prime(3).from_i64(2).square_root(), None);
        let q = Field::Rational;
        assert_eq!(q.rational(9, 4).unwrap().square_root(), Some(q.rational(3, 2).unwrap()));
        assert_eq!(q.from_i64(-1).square_root(), None);
        assert_eq!(q.from_i64(2).square_root(), None);
    }

    #[test]
    fn inverses_exhaustive() {
        for f in finite_fields() {
            for a in f.units().unwrap() {
                assert!((a * a.inv().unwrap()).is_one(), "{f}: {a}");
            }
        }
    }

    #[test]
    fn frobenius_in_characteristic_two() {
        for f in [Field::Prime(2), Field::Gf4] {
            let els = f.elements().unwrap();
            for &a in &els {
                for &b in &els {
                    assert_eq!((a + b) * (a + b), a * a + b * b);
                }
            }
        }
    }

    #[test]
    fn square_roots_exhaustive() {
        for f in finite_fields() {
            let els = f.elements().unwrap();
            for &a in &els {
                let is_square = els.iter().any(|r| *r * *r == a);
                match a.square_root() {
                    Some(r) => assert_eq!(r * r, a),
                    None => assert!(!is_square, "{f}: missed root of {a}"),
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in finite_fields() {
            let els = f.elements().unwrap();
            for &a in &els {
                for &b in &els {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    assert_eq!(a - b + b, a);
                    for &c in &els {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
            }
        }
    }

    #[test]
    fn gf4_structure() {
        let w = Field::gf4_generator();
        // w² = w + 1
        assert_eq!(w * w, w + Field::Gf4.one());
        assert_eq!(w.pow(3), Field::Gf4.one());
    }

    #[test]
    fn descriptor_parsing() {
        assert_eq!("gf(2)".parse::<Field>().unwrap(), Field::Prime(2));
        assert_eq!("gf(4)".parse::<Field>().unwrap(), Field::Gf4);
        assert_eq!("q".parse::<Field>().unwrap(), Field::Rational);
        assert!(matches!("gf(6)".parse::<Field>(), Err(Error::Validation { .. })));
        assert!(matches!("gf(17)".parse::<Field>(), Err(Error::Validation { .. })));
        assert!(matches!("gf(1)".parse::<Field>(), Err(Error::Validation { .. })));
        assert!("r".parse::<Field>().is_err());
    }

    #[test]
    fn scalar_parsing() {
        let q = Field::Rational;
        assert_eq!(q.parse_scalar("-3/6").unwrap(), q.rational(-1, 2).unwrap());
        assert_eq!(Field::Prime(5).parse_scalar("-1").unwrap(), Field::Prime(5).from_i64(4));
        assert_eq!(Field::Gf4.parse_scalar("w2").unwrap().to_string(), "w2");
        assert_eq!(
            Field::Prime(7).parse_scalar("1/2").unwrap(),
            Field::Prime(7).from_i64(4)
        );
    }

    #[test]
    fn rationals_are_reduced() {
        let q = Field::Rational;
        let a = q.rational(4, -6).unwrap();
        assert_eq!(a.to_string(), "-2/3");
    }

    fn rational() -> impl proptest::strategy::Strategy<Value = Scalar> {
        use proptest::prelude::*;
        (-50i64..50, 1i64..30).prop_map(|(n, d)| Field::Rational.rational(n, d).unwrap())
    }

    proptest::proptest! {
        #[test]
        fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
            proptest::prop_assert_eq!((a + b) + c, a + (b + c));
            proptest::prop_assert_eq!((a * b) * c, a * (b * c));
            proptest::prop_assert_eq!(a * (b + c), a * b + a * c);
            proptest::prop_assert_eq!(a - a, Field::Rational.zero());
            if !a.is_zero() {
                proptest::prop_assert_eq!(a * a.inv().unwrap(), Field::Rational.one());
            }
            if let Some(r) = (a * a).square_root() {
                proptest::prop_assert_eq!(r * r, a * a);
            }
        }
    }
}
