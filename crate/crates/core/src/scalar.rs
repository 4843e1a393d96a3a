//! Exact rationals and the real quaternions over them.
//!
//! A [`Quaternion`] is `re + i·1i + j·1j + k·1k` with rational coefficients and
//! the Hamilton relations `i² = j² = k² = ijk = −1`. Every operation is exact.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Quaternion {
    pub re: Rational,
    pub i: Rational,
    pub j: Rational,
    pub k: Rational,
}

impl Quaternion {
    pub fn new(re: Rational, i: Rational, j: Rational, k: Rational) -> Self {
        Self { re, i, j, k }
    }

    pub fn from_ints(re: i64, i: i64, j: i64, k: i64) -> Self {
        Self::new(int(re), int(i), int(j), int(k))
    }

    pub fn real(re: Rational) -> Self {
        Self::new(re, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn unit_i() -> Self {
        Self::from_ints(0, 1, 0, 0)
    }

    pub fn unit_j() -> Self {
        Self::from_ints(0, 0, 1, 0)
    }

    pub fn unit_k() -> Self {
        Self::from_ints(0, 0, 0, 1)
    }

    /// Basis element `e_c` for `c` in (1, i, j, k) order.
    pub fn basis(c: usize) -> Self {
        match c {
            0 => Self::one(),
            1 => Self::unit_i(),
            2 => Self::unit_j(),
            3 => Self::unit_k(),
            _ => panic!("quaternion basis index {c} out of range"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.i.is_zero() && self.j.is_zero() && self.k.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.i.is_zero() && self.j.is_zero() && self.k.is_zero()
    }

    pub fn components(&self) -> [&Rational; 4] {
        [&self.re, &self.i, &self.j, &self.k]
    }

    pub fn from_components(c: [Rational; 4]) -> Self {
        let [re, i, j, k] = c;
        Self { re, i, j, k }
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.i, -&self.j, -&self.k)
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.i * &self.i + &self.j * &self.j + &self.k * &self.k
    }

    /// Conjugate over squared norm.
    pub fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let c = self.conj();
        Ok(Self::new(&c.re / &n, &c.i / &n, &c.j / &n, &c.k / &n))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(&self.re * s, &self.i * s, &self.j * s, &self.k * s)
    }

    /// Parses the literal grammar `[+-]term([+-]term)*` where a term is a
    /// rational `p` or `p/q`, optionally followed by `*i`, `*j` or `*k`, or a
    /// bare unit. Whitespace is ignored. Repeated units accumulate.
    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).parse()
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (coef, unit) in [(&self.re, ""), (&self.i, "i"), (&self.j, "j"), (&self.k, "k")] {
            if coef.is_zero() {
                continue;
            }
            let magnitude = coef.abs();
            if coef.is_negative() {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            first = false;
            if unit.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                f.write_str(unit)?;
            } else {
                write!(f, "{magnitude}*{unit}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q({self})")
    }
}

impl FromStr for Quaternion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { bytes: text.as_bytes(), pos: 0 }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        // Slice is pure ASCII digits.
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        Ok(s.parse::<BigInt>().expect("digit string"))
    }

    fn unit(&mut self) -> Option<usize> {
        match self.peek() {
            Some(b'i') => Some(1),
            Some(b'j') => Some(2),
            Some(b'k') => Some(3),
            _ => None,
        }
    }

    fn parse(mut self) -> Result<Quaternion> {
        let mut acc: [Rational; 4] = Default::default();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                None if first => return Err(self.err("empty quaternion literal")),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(_) if first => false,
                Some(c) => return Err(self.err(format!("expected '+' or '-', found '{}'", c as char))),
            };
            first = false;

            let (coef, slot) = if let Some(u) = self.unit() {
                self.pos += 1;
                (Rational::one(), u)
            } else {
                let numer = self.digits()?;
                let denom = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.digits()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    d
                } else {
                    BigInt::one()
                };
                let coef = Rational::new(numer, denom);
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    match self.unit() {
                        Some(u) => {
                            self.pos += 1;
                            (coef, u)
                        }
                        None => return Err(self.err("expected unit 'i', 'j' or 'k' after '*'")),
                    }
                } else {
                    (coef, 0)
                }
            };
            if negative {
                acc[slot] -= coef;
            } else {
                acc[slot] += coef;
            }
        }
        Ok(Quaternion::from_components(acc))
    }
}

// Arithmetic. Reference impls do the work; owned variants forward.

impl<'a> Add<&'a Quaternion> for &'a Quaternion {
    type Output = Quaternion;
    fn add(self, o: &Quaternion) -> Quaternion {
        Quaternion::new(&self.re + &o.re, &self.i + &o.i, &self.j + &o.j, &self.k + &o.k)
    }
}

impl<'a> Sub<&'a Quaternion> for &'a Quaternion {
    type Output = Quaternion;
    fn sub(self, o: &Quaternion) -> Quaternion {
        Quaternion::new(&self.re - &o.re, &self.i - &o.i, &self.j - &o.j, &self.k - &o.k)
    }
}

/// Hamilton product; `self` is the left factor.
impl<'a> Mul<&'a Quaternion> for &'a Quaternion {
    type Output = Quaternion;
    fn mul(self, o: &Quaternion) -> Quaternion {
        let (a0, a1, a2, a3) = (&self.re, &self.i, &self.j, &self.k);
        let (b0, b1, b2, b3) = (&o.re, &o.i, &o.j, &o.k);
        Quaternion::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    }
}

impl Neg for &Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-&self.re, -&self.i, -&self.j, -&self.k)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Quaternion> for Quaternion {
            type Output = Quaternion;
            fn $m(self, o: Quaternion) -> Quaternion {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Quaternion> for Quaternion {
            type Output = Quaternion;
            fn $m(self, o: &Quaternion) -> Quaternion {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Quaternion> for &'a Quaternion {
            type Output = Quaternion;
            fn $m(self, o: Quaternion) -> Quaternion {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Quaternion> for Quaternion {
    fn add_assign(&mut self, o: &Quaternion) {
        self.re += &o.re;
        self.i += &o.i;
        self.j += &o.j;
        self.k += &o.k;
    }
}

impl SubAssign<&Quaternion> for Quaternion {
    fn sub_assign(&mut self, o: &Quaternion) {
        self.re -= &o.re;
        self.i -= &o.i;
        self.j -= &o.j;
        self.k -= &o.k;
    }
}

impl From<i64> for Quaternion {
    fn from(v: i64) -> Self {
        Self::real(int(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Quaternion {
        Quaternion::parse(s).unwrap()
    }

    #[test]
    fn hamilton_relations() {
        let (i, j, k) = (Quaternion::unit_i(), Quaternion::unit_j(), Quaternion::unit_k());
        let m1 = -Quaternion::one();
        assert_eq!(&i * &i, m1);
        assert_eq!(&j * &j, m1);
        assert_eq!(&k * &k, m1);
        assert_eq!(&(&i * &j) * &k, m1);
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &i, -k.clone());
    }

    #[test]
    fn product_expansion() {
        // (1+i)(1+j) = 1 + j + i + ij = 1+i+j+k
        assert_eq!(q("1+i") * q("1+j"), q("1+i+j+k"));
    }

    #[test]
    fn inverses() {
        assert_eq!(Quaternion::one().inv().unwrap(), Quaternion::one());
        assert_eq!(Quaternion::unit_i().inv().unwrap(), q("-i"));
        let x = q("1+i+j+k");
        let xi = x.inv().unwrap();
        assert_eq!(xi, q("1/4-1/4*i-1/4*j-1/4*k"));
        assert!((&x * &xi).is_one());
        assert!((&xi * &x).is_one());
        assert_eq!(Quaternion::zero().inv(), Err(Error::ZeroInverse));
    }

    #[test]
    fn conjugation() {
        assert_eq!(q("k").conj(), q("-k"));
        assert_eq!(q("3/2").conj(), q("3/2"));
        assert_eq!(q("1+2*i-j").conj(), q("1-2*i+j"));
    }

    #[test]
    fn parse_examples() {
        let x = q("1/2+3*i-4/5*j+k");
        assert_eq!(x.re, rat(1, 2));
        assert_eq!(x.i, int(3));
        assert_eq!(x.j, rat(-4, 5));
        assert_eq!(x.k, int(1));
        assert!(q("0").is_zero());
        assert_eq!(q("-i"), Quaternion::from_ints(0, -1, 0, 0));
        assert_eq!(q(" 2 / 4 * j "), Quaternion::new(int(0), int(0), rat(1, 2), int(0)));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        for (text, offset) in [("", 0), ("1+", 2), ("1/0", 3), ("2*x", 2), ("1 2", 2), ("i*j", 1), ("+", 1)] {
            match Quaternion::parse(text) {
                Err(Error::Parse { offset: o, .. }) => assert_eq!(o, offset, "input {text:?}"),
                other => panic!("{text:?} parsed as {other:?}"),
            }
        }
    }

    #[test]
    fn canonical_format() {
        assert_eq!(Quaternion::zero().to_string(), "0");
        assert_eq!(q("-i").to_string(), "-i");
        assert_eq!(q("k+1/2-0*i").to_string(), "1/2+k");
        assert_eq!(q("-3/6*j+2*k").to_string(), "-1/2*j+2*k");
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=7).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_quat() -> impl Strategy<Value = Quaternion> {
        (arb_rational(), arb_rational(), arb_rational(), arb_rational())
            .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn inverse_is_exact(x in arb_quat()) {
            prop_assume!(!x.is_zero());
            let xi = x.inv().unwrap();
            prop_assert!((&x * &xi).is_one());
            prop_assert!((&xi * &x).is_one());
        }

        #[test]
        fn associative_and_distributive(x in arb_quat(), y in arb_quat(), z in arb_quat()) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        }

        #[test]
        fn conjugate_is_anti_automorphism(x in arb_quat(), y in arb_quat()) {
            prop_assert_eq!(x.conj().conj(), x.clone());
            prop_assert_eq!((&x * &y).conj(), &y.conj() * &x.conj());
        }

        #[test]
        fn norm_is_multiplicative(x in arb_quat(), y in arb_quat()) {
            prop_assert_eq!((&x * &y).norm_sqr(), x.norm_sqr() * y.norm_sqr());
        }

        #[test]
        fn format_parse_round_trip(x in arb_quat()) {
            prop_assert_eq!(Quaternion::parse(&x.to_string()).unwrap(), x);
        }
    }
}
