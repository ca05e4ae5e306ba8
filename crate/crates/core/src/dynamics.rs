//! Numeric cross-checks: specialize `b`, integrate with fixed-step RK4 and
//! audit the curve residual and the first integral along the trajectory.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::darboux::FirstIntegral;
use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::lvfamily::{leading_coefficient, Family, InvariantCurve, LvSystem};
use crate::poly2::{NumPoly, XYPoly};

/// Thresholds used by the integrator and the audit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guards {
    /// Below this magnitude a logarithm factor, or the `y`-coefficient of the
    /// curve, counts as vanishing.
    pub singular: f64,
    /// State magnitude treated as finite-time blowup.
    pub blowup: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards { singular: 1e-12, blowup: 1e9 }
    }
}

/// The system with `b` fixed to a number.
#[derive(Clone, Debug)]
pub struct NumericSystem {
    pub n: u32,
    pub family: Family,
    pub b0: f64,
    pub b0_exact: Rat,
    pub p: XYPoly,
    pub q: XYPoly,
    p_num: NumPoly,
    q_num: NumPoly,
}

impl NumericSystem {
    pub fn new(system: &LvSystem, b0: &Rat) -> Result<Self> {
        let p = system.p.specialize_b(b0);
        let q = system.q.specialize_b(b0);
        Ok(NumericSystem {
            n: system.n,
            family: system.family,
            b0: b0.to_f64(),
            b0_exact: b0.clone(),
            p_num: p.to_numeric()?,
            q_num: q.to_numeric()?,
            p,
            q,
        })
    }

    /// Specialize at the exact binary value of a finite `f64`.
    pub fn from_f64(system: &LvSystem, b0: f64) -> Result<Self> {
        let exact = Rat::from_f64(b0)
            .ok_or_else(|| Error::InvalidIntegration(format!("b0 = {b0} is not finite")))?;
        NumericSystem::new(system, &exact)
    }

    pub fn field(&self, x: f64, y: f64) -> (f64, f64) {
        (self.p_num.eval(x, y), self.q_num.eval(x, y))
    }

    fn rk4_step(&self, x: f64, y: f64, h: f64) -> (f64, f64) {
        let (k1x, k1y) = self.field(x, y);
        let (k2x, k2y) = self.field(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
        let (k3x, k3y) = self.field(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
        let (k4x, k4y) = self.field(x + h * k3x, y + h * k3y);
        (
            x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        )
    }
}

/// A point on `{F = 0}` above `x0` at `b = b0`.
///
/// `F` is linear in `y`, `F = S(x) y + R(x)`, so the root is `-R(x0)/S(x0)`.
pub fn solve_on_curve(curve: &InvariantCurve, b0: &Rat, x0: f64) -> Result<f64> {
    solve_on_curve_with(curve, b0, x0, &Guards::default())
}

pub fn solve_on_curve_with(curve: &InvariantCurve, b0: &Rat, x0: f64, guards: &Guards) -> Result<f64> {
    let s = curve.y_coefficient().specialize_b(b0).to_numeric()?.eval(x0, 0.0);
    if s.is_nan() || s.abs() <= guards.singular {
        return Err(Error::DegeneratePoint(format!(
            "y-coefficient S(x) of the curve vanishes at x0 = {x0} (S = {s:e})"
        )));
    }
    let r = curve.y_free_part().specialize_b(b0).to_numeric()?.eval(x0, 0.0);
    Ok(-r / s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<(f64, f64)>,
    pub step: f64,
    pub method: Method,
    /// Time of the step at which the state left the guard box, if it did.
    pub blowup: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_displacement(&self) -> f64 {
        let (x0, y0) = self.states[0];
        self.states
            .iter()
            .map(|&(x, y)| (x - x0).abs().max((y - y0).abs()))
            .fold(0.0, f64::max)
    }
}

pub fn integrate(sys: &NumericSystem, x0: f64, y0: f64, t_end: f64, h: f64) -> Result<Trajectory> {
    integrate_with(sys, x0, y0, t_end, h, &Guards::default())
}

/// Classical RK4 with fixed step `h` on `[0, t_end]`, recording every step.
/// The last step is shortened if `h` does not divide `t_end`.
pub fn integrate_with(
    sys: &NumericSystem,
    x0: f64,
    y0: f64,
    t_end: f64,
    h: f64,
    guards: &Guards,
) -> Result<Trajectory> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidIntegration(format!("step must be positive, got {h}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidIntegration(format!("t_end must be positive, got {t_end}")));
    }
    if !(x0.is_finite() && y0.is_finite()) {
        return Err(Error::InvalidIntegration(format!("initial state ({x0}, {y0}) is not finite")));
    }
    let ratio = t_end / h;
    let steps = if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    }
    .max(1);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push((x0, y0));
    let (mut x, mut y) = (x0, y0);
    let mut blowup = None;
    for k in 1..=steps {
        let t_prev = times[k - 1];
        let t_next = if k == steps { t_end } else { k as f64 * h };
        let (nx, ny) = sys.rk4_step(x, y, t_next - t_prev);
        let escaped = !(nx.abs() <= guards.blowup && ny.abs() <= guards.blowup);
        if escaped {
            blowup = Some(t_next);
            break;
        }
        x = nx;
        y = ny;
        times.push(t_next);
        states.push((x, y));
    }
    Ok(Trajectory { times, states, step: h, method: Method::Rk4, blowup })
}

/// Why an audit could not be taken at face value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Degeneracy {
    /// A factor of the first integral came within the guard of zero.
    LogSingularity { factor: String, t: f64, value: f64 },
    /// `(b+1)_n` vanishes at `b0`, so the curve has lower degree there.
    DegreeDrop { b0: String },
    /// The integrator stopped at the blowup guard.
    BlowUp { t: f64 },
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::LogSingularity { factor, t, value } => {
                write!(f, "first-integral factor {factor} is {value:e} at t = {t} (log singularity)")
            }
            Degeneracy::DegreeDrop { b0 } => {
                write!(f, "(b+1)_n vanishes at b = {b0}; the curve has degree below n")
            }
            Degeneracy::BlowUp { t } => write!(f, "trajectory left the guard box at t = {t} (finite-time blowup)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// Largest `|F|/max|coeff(F)|` along the trajectory.
    pub max_abs_f_residual: f64,
    /// Largest `|log H(t) - log H(0)|` along the trajectory.
    pub max_logh_drift: f64,
    /// Whether the start point lies on `{F = 0}` within the singular guard.
    pub on_curve: bool,
    pub degenerate: bool,
    pub reasons: Vec<Degeneracy>,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Degenerate,
    Fail,
}

impl ConservationReport {
    pub fn blew_up(&self) -> bool {
        self.reasons.iter().any(|r| matches!(r, Degeneracy::BlowUp { .. }))
    }

    pub fn log_singular(&self) -> bool {
        self.reasons.iter().any(|r| matches!(r, Degeneracy::LogSingularity { .. }))
    }

    pub fn degree_dropped(&self) -> bool {
        self.reasons.iter().any(|r| matches!(r, Degeneracy::DegreeDrop { .. }))
    }

    /// On-curve starts are judged by the curve residual, off-curve starts by
    /// the first-integral drift. A miss with any degeneracy flag raised is
    /// reported as degenerate rather than failed.
    pub fn verdict(&self, tol_f: f64, tol_logh: f64) -> Verdict {
        let within = if self.on_curve {
            self.max_abs_f_residual < tol_f
        } else {
            self.max_logh_drift < tol_logh
        };
        if within {
            Verdict::Pass
        } else if self.degenerate {
            Verdict::Degenerate
        } else {
            Verdict::Fail
        }
    }
}

/// One audited sample, as written to trajectory CSV files.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// `F(x, y)` divided by the largest coefficient magnitude of the specialized `F`.
    pub f_resid: f64,
    pub log_h: f64,
}

/// `F` and `log|H|` at `b = b0`, ready for repeated evaluation.
pub struct CompiledAudit {
    f: NumPoly,
    f_scale: f64,
    factors: Vec<(String, NumPoly, f64)>,
    degree_drop: bool,
    b0: Rat,
}

impl CompiledAudit {
    pub fn new(curve: &InvariantCurve, integral: &FirstIntegral, b0: &Rat) -> Result<Self> {
        let f = curve.f.specialize_b(b0).to_numeric()?;
        let scale = f.max_abs_coeff();
        let factors = integral
            .factors
            .iter()
            .map(|(p, e)| {
                let exp = e.eval(b0)?.to_f64();
                Ok((p.to_string(), p.specialize_b(b0).to_numeric()?, exp))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompiledAudit {
            f,
            f_scale: if scale > 0.0 { scale } else { 1.0 },
            factors,
            degree_drop: leading_coefficient(curve.n).eval(b0).is_zero(),
            b0: b0.clone(),
        })
    }

    pub fn f_resid(&self, x: f64, y: f64) -> f64 {
        self.f.eval(x, y) / self.f_scale
    }

    pub fn log_h(&self, x: f64, y: f64) -> f64 {
        self.factors
            .iter()
            .filter(|(_, _, e)| *e != 0.0)
            .map(|(_, p, e)| e * p.eval(x, y).abs().ln())
            .sum()
    }

    pub fn samples(&self, traj: &Trajectory) -> Vec<Sample> {
        traj.times
            .iter()
            .zip(&traj.states)
            .map(|(&t, &(x, y))| Sample { t, x, y, f_resid: self.f_resid(x, y), log_h: self.log_h(x, y) })
            .collect()
    }

    pub fn audit(&self, traj: &Trajectory, guards: &Guards) -> ConservationReport {
        let mut reasons = Vec::new();
        if self.degree_drop {
            reasons.push(Degeneracy::DegreeDrop { b0: self.b0.to_string() });
        }
        'scan: for (&t, &(x, y)) in traj.times.iter().zip(&traj.states) {
            for (name, p, e) in &self.factors {
                let v = p.eval(x, y);
                if *e != 0.0 && (v.is_nan() || v.abs() < guards.singular) {
                    reasons.push(Degeneracy::LogSingularity { factor: name.clone(), t, value: v });
                    break 'scan;
                }
            }
        }
        if let Some(t) = traj.blowup {
            reasons.push(Degeneracy::BlowUp { t });
        }

        let samples = self.samples(traj);
        let (f0, h0) = samples.first().map_or((0.0, 0.0), |s| (s.f_resid, s.log_h));
        let max_abs_f_residual = samples.iter().map(|s| s.f_resid.abs()).fold(0.0, f64::max);
        let max_logh_drift = samples
            .iter()
            .map(|s| if s.log_h == h0 { 0.0 } else { (s.log_h - h0).abs() })
            .fold(0.0, f64::max);
        ConservationReport {
            max_abs_f_residual,
            max_logh_drift,
            on_curve: f0.abs() <= guards.singular,
            degenerate: !reasons.is_empty(),
            reasons,
            samples: samples.len(),
        }
    }
}

pub fn audit(
    curve: &InvariantCurve,
    integral: &FirstIntegral,
    traj: &Trajectory,
    sys: &NumericSystem,
) -> Result<ConservationReport> {
    audit_with(curve, integral, traj, sys, &Guards::default())
}

pub fn audit_with(
    curve: &InvariantCurve,
    integral: &FirstIntegral,
    traj: &Trajectory,
    sys: &NumericSystem,
    guards: &Guards,
) -> Result<ConservationReport> {
    if curve.n != sys.n || curve.family != sys.family {
        return Err(Error::SystemMismatch {
            curve_n: curve.n,
            curve_family: curve.family,
            system_n: sys.n,
            system_family: sys.family,
        });
    }
    Ok(CompiledAudit::new(curve, integral, &sys.b0_exact)?.audit(traj, guards))
}

/// `{-1, ..., -n}`: the roots of `(b+1)_n`.
pub fn degenerate_b_values(n: u32) -> Vec<Rat> {
    (1..=n as i64).map(|k| Rat::from(-k)).collect()
}
