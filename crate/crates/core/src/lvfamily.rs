//! The two Lotka-Volterra families and their explicit degree-`n` invariant curves.
//!
//! For both families `P = x - x^2`. The `y` equation is
//! `y' = y(n + b x - y)` for [`Family::MinusY`] and `y' = y(n + b x + y)` for
//! [`Family::PlusY`]. The curve has the shape `F = S(x) y + (b+1)_n x^n` with
//!
//! ```text
//! S(x) = ±(n-1)! * sum_{v=0}^{n-1} (-1)^(n+v) (n+b-v+1)_v x^v / v!
//! ```
//!
//! (`+` for `MinusY`, `-` for `PlusY`) and cofactor `K = n - n x ∓ y`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, pochhammer, BPoly, Rat};
use crate::poly2::{Var, XYPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "minus")]
    MinusY,
    #[serde(rename = "plus")]
    PlusY,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::MinusY, Family::PlusY];

    /// Coefficient of the `y^2` term in `Q`, i.e. of `y` inside the parenthesis.
    pub fn y_sign(self) -> i64 {
        match self {
            Family::MinusY => -1,
            Family::PlusY => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::MinusY => "minus",
            Family::PlusY => "plus",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "minus" | "minus-y" | "MinusY" => Ok(Family::MinusY),
            "plus" | "plus-y" | "PlusY" => Ok(Family::PlusY),
            _ => Err(format!("unknown family `{s}` (expected `minus` or `plus`)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LvSystem {
    pub n: u32,
    pub family: Family,
    pub p: XYPoly,
    pub q: XYPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCurve {
    pub n: u32,
    pub family: Family,
    pub f: XYPoly,
    pub k: XYPoly,
}

impl InvariantCurve {
    /// The coefficient `S(x)` of `y` in `F`.
    pub fn y_coefficient(&self) -> XYPoly {
        XYPoly::from_terms(
            self.f
                .terms()
                .filter(|(m, _)| m.y == 1)
                .map(|(m, c)| ((m.x, 0), c.clone())),
        )
    }

    /// The `y`-free part of `F`, which is `(b+1)_n x^n`.
    pub fn y_free_part(&self) -> XYPoly {
        XYPoly::from_terms(
            self.f
                .terms()
                .filter(|(m, _)| m.y == 0)
                .map(|(m, c)| ((m.x, 0), c.clone())),
        )
    }

    pub fn with_cofactor(&self, k: XYPoly) -> InvariantCurve {
        InvariantCurve { k, ..self.clone() }
    }
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidOrder(n))
    } else {
        Ok(())
    }
}

fn int(c: i64) -> XYPoly {
    XYPoly::from_int(c)
}

/// `P = x - x^2` and `Q = n y + b x y ∓ y^2`.
pub fn build_system(n: u32, family: Family) -> Result<LvSystem> {
    check_order(n)?;
    let x = XYPoly::x();
    let y = XYPoly::y();
    let p = &x - &(&x * &x);
    let inner = &(&int(n as i64) + &XYPoly::term(1, 0, BPoly::b())) + &y.scale_rat(&Rat::from(family.y_sign()));
    let q = &y * &inner;
    Ok(LvSystem { n, family, p, q })
}

/// `K = n - n x ∓ y`.
pub fn cofactor(n: u32, family: Family) -> XYPoly {
    let n = n as i64;
    &(&int(n) - &XYPoly::x().scale_rat(&Rat::from(n))) + &XYPoly::y().scale_rat(&Rat::from(family.y_sign()))
}

/// `(b+1)_n`, the coefficient of `x^n` in the curve.
pub fn leading_coefficient(n: u32) -> BPoly {
    pochhammer(&BPoly::b_plus(1), n)
}

pub fn build_invariant_curve(n: u32, family: Family) -> Result<InvariantCurve> {
    check_order(n)?;
    let fact_n_1 = Rat::from_integer(factorial(n - 1));
    let family_sign = Rat::from(-family.y_sign());
    let mut f = XYPoly::term(n, 0, leading_coefficient(n));
    for nu in 0..n {
        let sign = if (n + nu).is_multiple_of(2) { Rat::one() } else { -Rat::one() };
        let base = BPoly::b_plus((n - nu + 1) as i64);
        let scale = &(&fact_n_1 * &sign) * &family_sign;
        let scale = scale
            .checked_div(&Rat::from_integer(factorial(nu)))
            .expect("factorial is nonzero");
        let c = pochhammer(&base, nu).scale(&scale);
        f = &f + &XYPoly::term(nu, 1, c);
    }
    Ok(InvariantCurve { n, family, f, k: cofactor(n, family) })
}

/// `P F_x + Q F_y - K F`; zero exactly when `{F = 0}` is invariant with cofactor `K`.
pub fn verify_invariance(curve: &InvariantCurve, system: &LvSystem) -> Result<XYPoly> {
    if curve.n != system.n || curve.family != system.family {
        return Err(Error::SystemMismatch {
            curve_n: curve.n,
            curve_family: curve.family,
            system_n: system.n,
            system_family: system.family,
        });
    }
    Ok(&curve.f.lie_derivative(&system.p, &system.q) - &(&curve.k * &curve.f))
}

/// `(1-x) F_x - (n - n x - y)(b+1)_n x^(n-1) + (n+b)(F - (b+1)_n x^n)` for the
/// minus family; vanishes identically.
pub fn check_lemma2(n: u32) -> Result<XYPoly> {
    let curve = build_invariant_curve(n, Family::MinusY)?;
    let lead = leading_coefficient(n);
    let one_minus_x = &XYPoly::one() - &XYPoly::x();
    let first = &one_minus_x * &curve.f.partial(Var::X);
    let second = &cofactor(n, Family::MinusY) * &XYPoly::term(n - 1, 0, lead.clone());
    let tail = &curve.f - &XYPoly::term(n, 0, lead);
    let third = tail.scale(&BPoly::b_plus(n as i64));
    Ok(&(&first - &second) + &third)
}

/// `y F_y - F + (b+1)_n x^n`; vanishes because `F` is linear in `y`.
pub fn check_euler_y(n: u32, family: Family) -> Result<XYPoly> {
    let curve = build_invariant_curve(n, family)?;
    let y_fy = &XYPoly::y() * &curve.f.partial(Var::Y);
    Ok(&(&y_fy - &curve.f) + &XYPoly::term(n, 0, leading_coefficient(n)))
}

/// Per-curve record consumed by the reporting front end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub n: u32,
    pub family: Family,
    pub residual_is_zero: bool,
    #[serde(rename = "F_rendered")]
    pub f_rendered: String,
    #[serde(rename = "K_rendered")]
    pub k_rendered: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl CurveRecord {
    pub fn new(curve: &InvariantCurve, residual: &XYPoly) -> Self {
        CurveRecord {
            n: curve.n,
            family: curve.family,
            residual_is_zero: residual.is_zero(),
            f_rendered: curve.f.to_string(),
            k_rendered: curve.k.render_affine(),
            wall_time: None,
        }
    }
}
