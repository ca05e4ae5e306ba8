use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// Exact value of a finite `f64`. Returns `None` for NaN and infinities.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Rat)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rat) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(&self.0 / &rhs.0))
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rat(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// Nearest `f64`; saturates to an infinity when the magnitude is out of range.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_integer(v)
    }
}

impl From<BigInt> for Rat {
    fn from(v: BigInt) -> Self {
        Rat::from_integer(v)
    }
}

impl From<BigRational> for Rat {
    fn from(v: BigRational) -> Self {
        Rat(v)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `p`, `p/q`, and decimal literals such as `-0.25` or `1.5e-3`.
    /// Decimals are read from their digits, so `0.1` is exactly `1/10`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(bad());
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            return Rat::new(p, q).map_err(|_| bad());
        }

        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = t[i + 1..].parse().map_err(|_| bad())?;
                (&t[..i], e)
            }
            None => (t, 0),
        };
        let (negative, digits) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all_digits = format!("{int_part}{frac_part}");
        let mut numer: BigInt = all_digits.parse::<BigUint>().map_err(|_| bad())?.into();
        if negative {
            numer = -numer;
        }
        let scale = exponent - frac_part.len() as i64;
        let ten = BigInt::from(10u32);
        let magnitude = u32::try_from(scale.unsigned_abs()).map_err(|_| bad())?;
        let power = num_traits::pow(ten, magnitude as usize);
        if scale >= 0 {
            Ok(Rat::from_integer(numer * power))
        } else {
            Rat::new(numer, power)
        }
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Rising factorial `c (c+1) ... (c+count-1)` over `Q`; `(c)_0 = 1`.
pub fn pochhammer_rat(c: &Rat, count: u32) -> Rat {
    (0..count).fold(Rat::one(), |acc, k| acc * (c + &Rat::from(k as i64)))
}

/// `(c+1)_nu/(nu-1)! + (c)_(nu+1)/nu! - (c+nu)(c+1)_nu/nu!`, which vanishes for
/// every `c` and every `nu >= 1`.
pub fn lemma1_residual(c: &Rat, nu: u32) -> Rat {
    assert!(nu >= 1, "the rising-factorial identity needs nu >= 1");
    let fact_nu = Rat::from_integer(factorial(nu));
    let fact_nu_1 = Rat::from_integer(factorial(nu - 1));
    let c_plus_1 = c + &Rat::one();
    let rising = pochhammer_rat(&c_plus_1, nu);
    let lhs = rising.checked_div(&fact_nu_1).expect("factorial is nonzero")
        + pochhammer_rat(c, nu + 1)
            .checked_div(&fact_nu)
            .expect("factorial is nonzero");
    let rhs = ((c + &Rat::from(nu as i64)) * &rising)
        .checked_div(&fact_nu)
        .expect("factorial is nonzero");
    lhs - rhs
}
