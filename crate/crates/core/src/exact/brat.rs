use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::bpoly::BPoly;
use super::rat::Rat;
use crate::error::{Error, Result};

/// Element of the rational function field `Q(b)`.
///
/// Kept reduced: `gcd(num, den) = 1`, `den` monic, and zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BRat {
    num: BPoly,
    den: BPoly,
}

impl BRat {
    pub fn new(num: BPoly, den: BPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BRat { num, den }.normalize())
    }

    pub fn zero() -> Self {
        BRat { num: BPoly::zero(), den: BPoly::one() }
    }

    pub fn one() -> Self {
        BRat::from(BPoly::one())
    }

    pub fn num(&self) -> &BPoly {
        &self.num
    }

    pub fn den(&self) -> &BPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Reduced representative. Idempotent.
    pub fn normalize(self) -> Self {
        if self.num.is_zero() {
            return BRat::zero();
        }
        let g = self.num.gcd(&self.den);
        let num = self.num.div_exact(&g).expect("gcd is nonzero");
        let den = self.den.div_exact(&g).expect("gcd is nonzero");
        let lc = den.leading().expect("denominator is nonzero").clone();
        let inv = lc.recip().expect("leading coefficient is nonzero");
        BRat { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        BRat::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &BRat) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    /// Value at `b = b0`; fails when the denominator vanishes there.
    pub fn eval(&self, b0: &Rat) -> Result<Rat> {
        let d = self.den.eval(b0);
        if d.is_zero() {
            return Err(Error::SingularSpecialization(b0.to_string()));
        }
        self.num.eval(b0).checked_div(&d)
    }
}

impl From<BPoly> for BRat {
    fn from(p: BPoly) -> Self {
        BRat { num: p, den: BPoly::one() }
    }
}

impl From<Rat> for BRat {
    fn from(c: Rat) -> Self {
        BRat::from(BPoly::constant(c))
    }
}

impl Add<&BRat> for &BRat {
    type Output = BRat;
    fn add(self, rhs: &BRat) -> BRat {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        BRat { num, den: &self.den * &rhs.den }.normalize()
    }
}

impl Sub<&BRat> for &BRat {
    type Output = BRat;
    fn sub(self, rhs: &BRat) -> BRat {
        self + &(-rhs)
    }
}

impl Mul<&BRat> for &BRat {
    type Output = BRat;
    fn mul(self, rhs: &BRat) -> BRat {
        BRat { num: &self.num * &rhs.num, den: &self.den * &rhs.den }.normalize()
    }
}

impl Neg for &BRat {
    type Output = BRat;
    fn neg(self) -> BRat {
        BRat { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for BRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
