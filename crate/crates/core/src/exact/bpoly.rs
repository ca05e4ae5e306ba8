use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rat::Rat;
use crate::error::{Error, Result};

/// Univariate polynomial in the parameter `b` with rational coefficients.
///
/// `coeffs[i]` is the coefficient of `b^i`; the highest stored coefficient is
/// never zero, so the zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BPoly {
    coeffs: Vec<Rat>,
}

impl BPoly {
    pub fn zero() -> Self {
        BPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        BPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        BPoly::from_coeffs(vec![c])
    }

    /// The indeterminate `b`.
    pub fn b() -> Self {
        BPoly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    /// `b + c`.
    pub fn b_plus(c: impl Into<Rat>) -> Self {
        BPoly::from_coeffs(vec![c.into(), Rat::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        BPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        BPoly::from_coeffs(coeffs.iter().map(|&c| Rat::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rat) -> BPoly {
        if c.is_zero() {
            return BPoly::zero();
        }
        BPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Horner evaluation at `b = b0`.
    pub fn eval(&self, b0: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * b0 + c)
    }

    pub fn monic(&self) -> BPoly {
        match self.leading() {
            None => BPoly::zero(),
            Some(lc) => self.scale(&lc.recip().expect("leading coefficient is nonzero")),
        }
    }

    /// Euclidean division over `Q`: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &BPoly) -> Result<(BPoly, BPoly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lc_inv = divisor.coeffs[dd].recip()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((BPoly::zero(), self.clone()));
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * d);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((BPoly::from_coeffs(quot), BPoly::from_coeffs(rem)))
    }

    /// Quotient of a division known to be exact.
    pub fn div_exact(&self, divisor: &BPoly) -> Result<BPoly> {
        let (q, r) = self.div_rem(divisor)?;
        debug_assert!(r.is_zero(), "inexact division {self} / {divisor}");
        Ok(q)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    ///
    /// Runs the Euclidean remainder sequence on primitive integer
    /// representatives so coefficient size stays bounded by the inputs.
    pub fn gcd(&self, other: &BPoly) -> BPoly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let mut a = primitive_int(self);
        let mut b = primitive_int(other);
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = primitive_prem(&a, &b);
            a = b;
            b = r;
        }
        let g = BPoly::from_coeffs(a.into_iter().map(Rat::from_integer).collect());
        g.monic()
    }

    /// `self + c`.
    pub fn shift(&self, c: &Rat) -> BPoly {
        self + &BPoly::constant(c.clone())
    }
}

/// Integer polynomial with the same roots: denominators cleared, content removed.
fn primitive_int(p: &BPoly) -> Vec<BigInt> {
    let lcm = p
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    primitive_part(ints)
}

fn primitive_part(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    let content = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() {
        return Vec::new();
    }
    let sign = if v.last().is_some_and(Signed::is_negative) { -content } else { content };
    v.iter().map(|c| c / &sign).collect()
}

/// Primitive part of the pseudo-remainder of `a` by `b`.
fn primitive_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &lr * bj;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
        r = primitive_part(r);
    }
    primitive_part(r)
}

/// Rising factorial `base (base+1) ... (base+count-1)` in `Q[b]`; `(base)_0 = 1`.
pub fn pochhammer(base: &BPoly, count: u32) -> BPoly {
    (0..count).fold(BPoly::one(), |acc, k| &acc * &base.shift(&Rat::from(k as i64)))
}

impl Add<&BPoly> for &BPoly {
    type Output = BPoly;
    fn add(self, rhs: &BPoly) -> BPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        BPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub<&BPoly> for &BPoly {
    type Output = BPoly;
    fn sub(self, rhs: &BPoly) -> BPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        BPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul<&BPoly> for &BPoly {
    type Output = BPoly;
    fn mul(self, rhs: &BPoly) -> BPoly {
        if self.is_zero() || rhs.is_zero() {
            return BPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, c) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * c);
            }
        }
        BPoly::from_coeffs(out)
    }
}

impl Neg for &BPoly {
    type Output = BPoly;
    fn neg(self) -> BPoly {
        BPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<BPoly> for BPoly {
            type Output = BPoly;
            fn $method(self, rhs: BPoly) -> BPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for BPoly {
    type Output = BPoly;
    fn neg(self) -> BPoly {
        -&self
    }
}

impl From<Rat> for BPoly {
    fn from(c: Rat) -> Self {
        BPoly::constant(c)
    }
}

impl fmt::Display for BPoly {
    /// `b^2+3*b+2`; constants print as reduced fractions and a non-constant
    /// polynomial with negative leading coefficient prints as `-(...)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.degree() {
            None => return write!(f, "0"),
            Some(0) => return write!(f, "{}", self.coeffs[0]),
            Some(_) => {}
        }
        if self.leading().is_some_and(Rat::is_negative) {
            return write!(f, "-({})", -self);
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if !first {
                f.write_str(if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        f.write_str("b")?;
                    } else {
                        write!(f, "b^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
