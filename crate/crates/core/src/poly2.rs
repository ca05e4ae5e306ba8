//! Bivariate polynomials in `(x, y)` with coefficients in `Q[b]`.
//!
//! Terms live in a sparse map keyed by exponent pair. The map is ordered by
//! graded lexicographic order with `x > y`, and rendering walks it from the
//! largest monomial down, so textual output is deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::exact::{BPoly, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

/// Exponent pair `x^x * y^y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        Monomial { x, y }
    }

    pub fn degree(&self) -> u32 {
        self.x + self.y
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.x.cmp(&other.x))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factor = |v: &str, e: u32| match e {
            0 => None,
            1 => Some(v.to_string()),
            _ => Some(format!("{v}^{e}")),
        };
        let parts: Vec<String> = [factor("x", self.x), factor("y", self.y)]
            .into_iter()
            .flatten()
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct XYPoly {
    terms: BTreeMap<Monomial, BPoly>,
}

impl XYPoly {
    pub fn zero() -> Self {
        XYPoly::default()
    }

    pub fn one() -> Self {
        XYPoly::constant(BPoly::one())
    }

    pub fn constant(c: BPoly) -> Self {
        XYPoly::term(0, 0, c)
    }

    pub fn from_rat(c: Rat) -> Self {
        XYPoly::constant(BPoly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        XYPoly::from_rat(Rat::from(c))
    }

    pub fn x() -> Self {
        XYPoly::term(1, 0, BPoly::one())
    }

    pub fn y() -> Self {
        XYPoly::term(0, 1, BPoly::one())
    }

    /// Single term `c * x^i * y^j`.
    pub fn term(i: u32, j: u32, c: BPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(i, j), c);
        }
        XYPoly { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = ((u32, u32), BPoly)>) -> Self {
        let mut p = XYPoly::zero();
        for ((i, j), c) in iter {
            p.add_term(Monomial::new(i, j), &c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: &BPoly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&m) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    /// Terms from the largest monomial down.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BPoly)> {
        self.terms.iter().rev()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BPoly {
        self.terms
            .get(&Monomial::new(i, j))
            .cloned()
            .unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: Var) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| match var {
                Var::X => m.x,
                Var::Y => m.y,
            })
            .max()
    }

    pub fn is_b_free(&self) -> bool {
        self.terms.values().all(BPoly::is_constant)
    }

    pub fn scale(&self, c: &BPoly) -> XYPoly {
        XYPoly::from_terms(self.terms.iter().map(|(m, a)| ((m.x, m.y), a * c)))
    }

    pub fn scale_rat(&self, c: &Rat) -> XYPoly {
        self.scale(&BPoly::constant(c.clone()))
    }

    pub fn partial(&self, var: Var) -> XYPoly {
        let mut out = XYPoly::zero();
        for (m, c) in &self.terms {
            let (e, dm) = match var {
                Var::X if m.x > 0 => (m.x, Monomial::new(m.x - 1, m.y)),
                Var::Y if m.y > 0 => (m.y, Monomial::new(m.x, m.y - 1)),
                _ => continue,
            };
            out.add_term(dm, &c.scale(&Rat::from(e as i64)));
        }
        out
    }

    /// `P * dF/dx + Q * dF/dy`: the rate of change of `F` along the vector field `(P, Q)`.
    pub fn lie_derivative(&self, p: &XYPoly, q: &XYPoly) -> XYPoly {
        &(p * &self.partial(Var::X)) + &(q * &self.partial(Var::Y))
    }

    /// Evaluate every coefficient at `b = b0`, dropping terms that vanish.
    pub fn specialize_b(&self, b0: &Rat) -> XYPoly {
        XYPoly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| ((m.x, m.y), BPoly::constant(c.eval(b0)))),
        )
    }

    /// Image under `y -> -y`.
    pub fn negate_y(&self) -> XYPoly {
        XYPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let c = if m.y % 2 == 1 { -c } else { c.clone() };
            ((m.x, m.y), c)
        }))
    }

    /// Floating-point coefficient table of a b-free polynomial.
    pub fn to_numeric(&self) -> Result<NumPoly> {
        if !self.is_b_free() {
            return Err(Error::NotSpecialized);
        }
        let ny = self.degree_in(Var::Y).map_or(0, |d| d as usize + 1);
        let nx = self.degree_in(Var::X).map_or(0, |d| d as usize + 1);
        let mut rows = vec![vec![0.0; nx]; ny];
        for (m, c) in &self.terms {
            rows[m.y as usize][m.x as usize] = c.coeff(0).to_f64();
        }
        Ok(NumPoly { rows })
    }

    pub fn eval_xy(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.to_numeric()?.eval(x, y))
    }

    /// Affine layout `c0 + c1*x + c2*y` with merged signs, e.g. `2 - 2*x - y`.
    /// Falls back to the canonical rendering above degree one.
    pub fn render_affine(&self) -> String {
        if self.total_degree().is_some_and(|d| d > 1) {
            return self.to_string();
        }
        let mut out = String::new();
        let layout = [Monomial::ONE, Monomial::new(1, 0), Monomial::new(0, 1)];
        for (m, c) in layout.iter().filter_map(|m| self.terms.get(m).map(|c| (m, c))) {
            let negative = c.leading().is_some_and(Rat::is_negative);
            let mag = if negative { -c } else { c.clone() };
            let body = if *m == Monomial::ONE {
                format!("{mag}")
            } else if mag.is_one() {
                m.to_string()
            } else if mag.coeffs().iter().filter(|a| !a.is_zero()).count() == 1 {
                format!("{mag}*{m}")
            } else {
                format!("({mag})*{m}")
            };
            match (out.is_empty(), negative) {
                (true, true) => out.push('-'),
                (true, false) => {}
                (false, true) => out.push_str(" - "),
                (false, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Free-function form of [`XYPoly::lie_derivative`].
pub fn lie_derivative(f: &XYPoly, p: &XYPoly, q: &XYPoly) -> XYPoly {
    f.lie_derivative(p, q)
}

impl fmt::Display for XYPoly {
    /// Canonical form: `(b^2+3*b+2)*x^2 + (-(b+2))*x*y + y`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            match (c.is_one(), *m == Monomial::ONE) {
                (true, _) => write!(f, "{m}")?,
                (false, true) => write!(f, "({c})")?,
                (false, false) => write!(f, "({c})*{m}")?,
            }
        }
        Ok(())
    }
}

impl Add<&XYPoly> for &XYPoly {
    type Output = XYPoly;
    fn add(self, rhs: &XYPoly) -> XYPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl Sub<&XYPoly> for &XYPoly {
    type Output = XYPoly;
    fn sub(self, rhs: &XYPoly) -> XYPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, &-c);
        }
        out
    }
}

impl Mul<&XYPoly> for &XYPoly {
    type Output = XYPoly;
    fn mul(self, rhs: &XYPoly) -> XYPoly {
        let mut out = XYPoly::zero();
        for (ma, a) in &self.terms {
            for (mb, b) in &rhs.terms {
                out.add_term(Monomial::new(ma.x + mb.x, ma.y + mb.y), &(a * b));
            }
        }
        out
    }
}

impl Neg for &XYPoly {
    type Output = XYPoly;
    fn neg(self) -> XYPoly {
        XYPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<XYPoly> for XYPoly {
            type Output = XYPoly;
            fn $method(self, rhs: XYPoly) -> XYPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

/// Dense `f64` image of a specialized polynomial: `rows[j][i]` multiplies `x^i y^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumPoly {
    rows: Vec<Vec<f64>>,
}

impl NumPoly {
    /// Horner in `x` for each power of `y`, then Horner in `y`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.rows.iter().rev().fold(0.0, |acc, row| {
            let in_x = row.iter().rev().fold(0.0, |a, c| a * x + c);
            acc * y + in_x
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}
