//! Darboux first integrals built from invariant curves.
//!
//! Given invariant curves `f_i` with cofactors `K_i`, any exponent vector with
//! `sum lambda_i K_i = 0` makes `H = prod f_i^lambda_i` constant along
//! trajectories. The exponents are found as the null space of the linear map
//! `lambda -> sum lambda_i K_i`, solved exactly over `Q(b)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{BPoly, BRat, Rat};
use crate::lvfamily::{build_invariant_curve, build_system, Family, LvSystem};
use crate::poly2::{Monomial, XYPoly};

/// Invariant curve together with its cofactor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvePair {
    pub f: XYPoly,
    pub k: XYPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxQuadruple {
    pub n: u32,
    pub family: Family,
    pub entries: Vec<CurvePair>,
}

impl DarbouxQuadruple {
    pub fn cofactors(&self) -> Vec<XYPoly> {
        self.entries.iter().map(|e| e.k.clone()).collect()
    }

    /// Sub-collection keeping only the listed entries, in the given order.
    pub fn select(&self, indices: &[usize]) -> DarbouxQuadruple {
        DarbouxQuadruple {
            n: self.n,
            family: self.family,
            entries: indices.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }

    pub fn solve_kernel(&self) -> Vec<ExponentVector> {
        solve_cofactor_kernel(&self.cofactors())
    }

    /// `P f_x + Q f_y - K f` for every entry.
    pub fn residuals(&self, system: &LvSystem) -> Vec<XYPoly> {
        self.entries
            .iter()
            .map(|e| &e.f.lie_derivative(&system.p, &system.q) - &(&e.k * &e.f))
            .collect()
    }
}

fn affine(c0: BPoly, cx: BPoly, cy: BPoly) -> XYPoly {
    XYPoly::from_terms([((0, 0), c0), ((1, 0), cx), ((0, 1), cy)])
}

/// `(x, 1-x)`, `(y, n + b x ∓ y)`, `(1-x, -x)` and the degree-`n` curve.
pub fn standard_quadruple(n: u32, family: Family) -> Result<DarbouxQuadruple> {
    let curve = build_invariant_curve(n, family)?;
    let int = |c: i64| BPoly::constant(Rat::from(c));
    let one_minus_x = affine(int(1), int(-1), BPoly::zero());
    let entries = vec![
        CurvePair { f: XYPoly::x(), k: one_minus_x.clone() },
        CurvePair {
            f: XYPoly::y(),
            k: affine(int(n as i64), BPoly::b(), int(family.y_sign())),
        },
        CurvePair { f: one_minus_x, k: affine(BPoly::zero(), int(-1), BPoly::zero()) },
        CurvePair { f: curve.f, k: curve.k },
    ];
    Ok(DarbouxQuadruple { n, family, entries })
}

/// Exponents `(lambda_1, ..., lambda_m)` in `Q(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentVector {
    pub lambdas: Vec<BRat>,
}

impl ExponentVector {
    pub fn new(lambdas: Vec<BRat>) -> Self {
        ExponentVector { lambdas }
    }

    pub fn from_bpolys(entries: Vec<BPoly>) -> Self {
        ExponentVector::new(entries.into_iter().map(BRat::from).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.lambdas.iter().all(BRat::is_zero)
    }

    pub fn scaled(&self, c: &BRat) -> ExponentVector {
        ExponentVector::new(self.lambdas.iter().map(|l| l * c).collect())
    }

    /// Rescaled so that entry `idx` is one; `None` if that entry vanishes.
    pub fn normalized_at(&self, idx: usize) -> Option<ExponentVector> {
        let pivot = self.lambdas.get(idx)?;
        let inv = pivot.recip().ok()?;
        Some(self.scaled(&inv))
    }

    /// `lambda_2 = 1` when possible, otherwise the first nonzero entry is one.
    pub fn normalized(&self) -> ExponentVector {
        if let Some(v) = self.normalized_at(1) {
            return v;
        }
        match self.lambdas.iter().position(|l| !l.is_zero()) {
            Some(i) => self.normalized_at(i).expect("entry is nonzero"),
            None => self.clone(),
        }
    }

    pub fn permuted(&self, order: &[usize]) -> ExponentVector {
        ExponentVector::new(order.iter().map(|&i| self.lambdas[i].clone()).collect())
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lambdas.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `L * sum lambda_i K_i` where `L` clears every exponent denominator. It is the
/// zero polynomial exactly when the combination vanishes over `Q(b)`.
pub fn cofactor_combination(cofactors: &[XYPoly], lambdas: &[BRat]) -> Result<XYPoly> {
    if cofactors.len() != lambdas.len() {
        return Err(Error::ExponentCount { expected: cofactors.len(), got: lambdas.len() });
    }
    let lcm = lambdas.iter().fold(BPoly::one(), |acc, l| {
        let g = acc.gcd(l.den());
        (&acc * l.den()).div_exact(&g).expect("gcd is nonzero")
    });
    let mut sum = XYPoly::zero();
    for (k, l) in cofactors.iter().zip(lambdas) {
        let weight = l.num() * &lcm.div_exact(l.den())?;
        sum = &sum + &k.scale(&weight);
    }
    Ok(sum)
}

/// Null-space basis of `lambda -> sum lambda_i K_i`.
///
/// The coefficient matrix (one row per monomial, one column per cofactor) is
/// reduced by fraction-free elimination over `Q[b]`; each step takes the
/// nonzero entry of lowest `b`-degree among the remaining rows and columns,
/// ties going to the lower column and then the lower row. Division into
/// `Q(b)` only happens during back-substitution. Each basis vector is
/// normalized as in [`ExponentVector::normalized`].
pub fn solve_cofactor_kernel(cofactors: &[XYPoly]) -> Vec<ExponentVector> {
    let cols = cofactors.len();
    let monomials: BTreeSet<Monomial> = cofactors
        .iter()
        .flat_map(|k| k.terms().map(|(m, _)| *m).collect::<Vec<_>>())
        .collect();
    let mut a: Vec<Vec<BPoly>> = monomials
        .iter()
        .map(|m| cofactors.iter().map(|k| k.coeff(m.x, m.y)).collect())
        .collect();
    let rows = a.len();

    let mut row_used = vec![false; rows];
    let mut col_used = vec![false; cols];
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev = BPoly::one();

    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for c in (0..cols).filter(|&c| !col_used[c]) {
            for r in (0..rows).filter(|&r| !row_used[r]) {
                if let Some(d) = a[r][c].degree() {
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, r, c));
                    }
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let pivot = a[pr][pc].clone();
        for i in (0..rows).filter(|&i| !row_used[i] && i != pr) {
            let factor = a[i][pc].clone();
            for j in 0..cols {
                let cross = &(&pivot * &a[i][j]) - &(&factor * &a[pr][j]);
                a[i][j] = cross.div_exact(&prev).expect("Bareiss step divides exactly");
            }
        }
        prev = pivot;
        row_used[pr] = true;
        col_used[pc] = true;
        pivots.push((pr, pc));
    }

    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !col_used[c]) {
        let mut lambda = vec![BRat::zero(); cols];
        lambda[free] = BRat::one();
        for &(r, c) in pivots.iter().rev() {
            let mut acc = BRat::zero();
            for j in (0..cols).filter(|&j| j != c) {
                if !a[r][j].is_zero() && !lambda[j].is_zero() {
                    acc = &acc + &(&BRat::from(a[r][j].clone()) * &lambda[j]);
                }
            }
            let diag = BRat::from(a[r][c].clone());
            lambda[c] = (-&acc).checked_div(&diag).expect("pivot is nonzero");
        }
        basis.push(ExponentVector::new(lambda).normalized());
    }
    basis
}

/// `H = prod f_i^e_i` with zero exponents dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstIntegral {
    pub factors: Vec<(XYPoly, BRat)>,
    pub cofactors: Vec<XYPoly>,
}

impl FirstIntegral {
    /// Exact check that `sum e_i K_i` vanishes.
    pub fn is_certified(&self) -> bool {
        let exps: Vec<BRat> = self.factors.iter().map(|(_, e)| e.clone()).collect();
        cofactor_combination(&self.cofactors, &exps).is_ok_and(|p| p.is_zero())
    }
}

impl fmt::Display for FirstIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| format!("({p})^({e})"))
            .collect();
        f.write_str(&parts.join(" * "))
    }
}

pub fn assemble_first_integral(
    quadruple: &DarbouxQuadruple,
    v: &ExponentVector,
) -> Result<FirstIntegral> {
    let combination = cofactor_combination(&quadruple.cofactors(), &v.lambdas)?;
    if !combination.is_zero() || v.is_zero() {
        return Err(Error::NotInKernel);
    }
    let (factors, cofactors) = quadruple
        .entries
        .iter()
        .zip(&v.lambdas)
        .filter(|(_, l)| !l.is_zero())
        .map(|(e, l)| ((e.f.clone(), l.clone()), e.k.clone()))
        .unzip();
    Ok(FirstIntegral { factors, cofactors })
}

/// Value of the parameter `b` handed to the rationality classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BParam {
    Rational(Rat),
    Irrational,
}

impl FromStr for BParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("irrational") {
            Ok(BParam::Irrational)
        } else {
            s.parse().map(BParam::Rational)
        }
    }
}

impl fmt::Display for BParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BParam::Rational(r) => write!(f, "{r}"),
            BParam::Irrational => f.write_str("irrational"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rationality {
    /// Integer exponents `scale * lambda(b0)` giving a rational first integral.
    RationalIntegral { exponents: Vec<BigInt>, scale: BigInt },
    NonRational,
}

/// For rational `b0`, substitute into the exponents and clear denominators;
/// for an irrational `b0` the outcome is [`Rationality::NonRational`].
pub fn classify_rationality(v: &ExponentVector, b0: &BParam) -> Result<Rationality> {
    let b0 = match b0 {
        BParam::Irrational => return Ok(Rationality::NonRational),
        BParam::Rational(r) => r,
    };
    let values = v
        .lambdas
        .iter()
        .map(|l| l.eval(b0))
        .collect::<Result<Vec<Rat>>>()?;
    let scale = values.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let exponents = values
        .iter()
        .map(|r| r.numer() * (&scale / r.denom()))
        .collect();
    Ok(Rationality::RationalIntegral { exponents, scale })
}

/// `sum e_i K_i(b0)` with integer exponents; zero for a genuine rational integral.
pub fn specialized_combination(cofactors: &[XYPoly], exponents: &[BigInt], b0: &Rat) -> Result<XYPoly> {
    if cofactors.len() != exponents.len() {
        return Err(Error::ExponentCount { expected: cofactors.len(), got: exponents.len() });
    }
    Ok(cofactors
        .iter()
        .zip(exponents)
        .filter(|(_, e)| !e.is_zero())
        .fold(XYPoly::zero(), |acc, (k, e)| {
            &acc + &k.specialize_b(b0).scale_rat(&Rat::from_integer(e.clone()))
        }))
}

/// The kernel generator `(0, 1, n + b, -1)` of the standard quadruple.
pub fn expected_generator(n: u32) -> ExponentVector {
    ExponentVector::from_bpolys(vec![
        BPoly::zero(),
        BPoly::one(),
        BPoly::b_plus(n as i64),
        BPoly::constant(Rat::from(-1)),
    ])
}

/// Convenience: the system the quadruple belongs to.
pub fn quadruple_system(q: &DarbouxQuadruple) -> Result<LvSystem> {
    build_system(q.n, q.family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy(terms: &[((u32, u32), &[i64])]) -> XYPoly {
        XYPoly::from_terms(terms.iter().map(|&(m, c)| (m, BPoly::from_ints(c))))
    }

    #[test]
    fn standard_pairs() {
        let q = standard_quadruple(3, Family::MinusY).unwrap();
        assert_eq!(q.entries[0].f, XYPoly::x());
        assert_eq!(q.entries[0].k, xy(&[((0, 0), &[1]), ((1, 0), &[-1])]));
        assert_eq!(q.entries[2].f, xy(&[((0, 0), &[1]), ((1, 0), &[-1])]));
        assert_eq!(q.entries[2].k, xy(&[((1, 0), &[-1])]));
        assert_eq!(q.entries[1].k, xy(&[((0, 0), &[3]), ((1, 0), &[0, 1]), ((0, 1), &[-1])]));
        let q2 = standard_quadruple(2, Family::MinusY).unwrap();
        assert_eq!(q2.entries[3].k.render_affine(), "2 - 2*x - y");
        for fam in Family::ALL {
            for n in 1..6 {
                let q = standard_quadruple(n, fam).unwrap();
                let s = quadruple_system(&q).unwrap();
                assert!(q.residuals(&s).iter().all(XYPoly::is_zero), "n={n} {fam}");
            }
        }
    }

    #[test]
    fn kernel_of_standard_quadruple() {
        for fam in Family::ALL {
            for n in 1..6 {
                let basis = standard_quadruple(n, fam).unwrap().solve_kernel();
                assert_eq!(basis, vec![expected_generator(n)], "n={n} {fam}");
            }
        }
    }

    #[test]
    fn kernel_of_independent_cofactors_is_trivial() {
        let q = standard_quadruple(4, Family::MinusY).unwrap().select(&[0, 2]);
        assert!(q.solve_kernel().is_empty());
    }

    #[test]
    fn kernel_with_b_dependent_pivots() {
        // (b+1) * K_a - K_b = 0 where K_a = x, K_b = (b+1) x.
        let ka = XYPoly::x();
        let kb = xy(&[((1, 0), &[1, 1])]);
        let basis = solve_cofactor_kernel(&[ka.clone(), kb.clone()]);
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert_eq!(v.lambdas[1], BRat::one());
        assert_eq!(v.lambdas[0], BRat::from(BPoly::from_ints(&[-1, -1])));
        assert!(cofactor_combination(&[ka, kb], &v.lambdas).unwrap().is_zero());
    }

    #[test]
    fn degenerate_kernel_normalizes_first_entry() {
        // lambda_2 is forced to zero: K = (x, y, 2x)
        let ks = [XYPoly::x(), XYPoly::y(), xy(&[((1, 0), &[2])])];
        let basis = solve_cofactor_kernel(&ks);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].lambdas[0], BRat::one());
        assert!(basis[0].lambdas[1].is_zero());
        assert_eq!(basis[0].lambdas[2], BRat::from(Rat::new(-1, 2).unwrap()));
    }

    #[test]
    fn first_integral_assembly() {
        let q = standard_quadruple(2, Family::MinusY).unwrap();
        let v = expected_generator(2);
        let h = assemble_first_integral(&q, &v).unwrap();
        assert_eq!(h.factors.len(), 3);
        assert_eq!(h.factors[0], (XYPoly::y(), BRat::one()));
        assert_eq!(h.factors[1].1, BRat::from(BPoly::b_plus(2)));
        assert_eq!(h.factors[2].1, BRat::from(Rat::from(-1)));
        assert!(h.is_certified());

        let doubled = v.scaled(&BRat::from(Rat::from(2)));
        let h2 = assemble_first_integral(&q, &doubled).unwrap();
        assert_eq!(h2.factors[1].1, BRat::from(BPoly::from_ints(&[4, 2])));
        assert!(h2.is_certified());

        let bad = ExponentVector::from_bpolys(vec![BPoly::one(), BPoly::zero(), BPoly::zero(), BPoly::zero()]);
        assert_eq!(assemble_first_integral(&q, &bad), Err(Error::NotInKernel));
        let short = ExponentVector::from_bpolys(vec![BPoly::one()]);
        assert!(matches!(assemble_first_integral(&q, &short), Err(Error::ExponentCount { .. })));
    }

    #[test]
    fn rationality_examples() {
        let v = expected_generator(2);
        let b0 = BParam::Rational(Rat::new(1, 2).unwrap());
        let Rationality::RationalIntegral { exponents, scale } = classify_rationality(&v, &b0).unwrap() else {
            panic!("expected a rational integral");
        };
        let ints: Vec<i64> = vec![0, 2, 5, -2];
        assert_eq!(exponents, ints.iter().map(|&e| BigInt::from(e)).collect::<Vec<_>>());
        assert_eq!(scale, BigInt::from(2));
        let q = standard_quadruple(2, Family::MinusY).unwrap();
        assert!(specialized_combination(&q.cofactors(), &exponents, &Rat::new(1, 2).unwrap())
            .unwrap()
            .is_zero());

        let v1 = expected_generator(1);
        let out = classify_rationality(&v1, &BParam::Rational(Rat::zero())).unwrap();
        assert_eq!(
            out,
            Rationality::RationalIntegral {
                exponents: [0, 1, 1, -1].iter().map(|&e| BigInt::from(e)).collect(),
                scale: BigInt::one(),
            }
        );
        assert_eq!(classify_rationality(&v, &BParam::Irrational).unwrap(), Rationality::NonRational);
    }

    #[test]
    fn rendering() {
        assert_eq!(expected_generator(2).to_string(), "(0, 1, b+2, -1)");
        let q = standard_quadruple(1, Family::MinusY).unwrap();
        let h = assemble_first_integral(&q, &expected_generator(1)).unwrap();
        assert_eq!(h.to_string(), "(y)^(1) * ((-1)*x + 1)^(b+1) * ((b+1)*x + (-1)*y)^(-1)");
    }

    #[test]
    fn bparam_parse() {
        assert_eq!("irrational".parse::<BParam>().unwrap(), BParam::Irrational);
        assert_eq!("3/4".parse::<BParam>().unwrap(), BParam::Rational(Rat::new(3, 4).unwrap()));
        assert!("pi".parse::<BParam>().is_err());
    }
}
