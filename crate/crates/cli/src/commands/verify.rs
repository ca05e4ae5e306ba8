use std::fmt::Write as _;
use std::time::Instant;

use anyhow::Result;
use dwb_core::exact::lemma1_residual;
use dwb_core::lvfamily::{
    build_invariant_curve, build_system, check_euler_y, check_lemma2, verify_invariance, CurveRecord,
    InvariantCurve,
};
use dwb_core::{BPoly, Family, Rat, XYPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{print_json, print_text, Format, SCHEMA};

const LEMMA1_NU_MAX: u32 = 50;
const LEMMA1_BOUND: i64 = 100;

/// Deliberate fault injected into every curve before checking it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Perturbation {
    /// `K -> K + 1`
    Cofactor,
    /// `(b+1)_n -> (b+1)_n + 1` on the `x^n` term
    Coefficient,
}

impl Perturbation {
    fn name(self) -> &'static str {
        match self {
            Perturbation::Cofactor => "cofactor",
            Perturbation::Coefficient => "coefficient",
        }
    }

    fn apply(self, curve: &InvariantCurve) -> InvariantCurve {
        match self {
            Perturbation::Cofactor => curve.with_cofactor(&curve.k + &XYPoly::one()),
            Perturbation::Coefficient => InvariantCurve {
                f: &curve.f + &XYPoly::term(curve.n, 0, BPoly::one()),
                ..curve.clone()
            },
        }
    }
}

pub struct VerifyConfig {
    pub n_max: u32,
    pub families: Vec<Family>,
    pub perturbation: Option<Perturbation>,
    pub seed: u64,
    pub lemma1_samples: usize,
    pub format: Format,
    pub timings: bool,
}

#[derive(Serialize)]
struct IdentityRow {
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<Family>,
    zero: bool,
}

#[derive(Serialize)]
struct Lemma1Summary {
    seed: u64,
    samples: usize,
    nu_max: u32,
    failures: Vec<String>,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    schema: u32,
    command: &'static str,
    pass: bool,
    n_max: u32,
    families: Vec<Family>,
    perturbation: Option<Perturbation>,
    invariance: Vec<CurveRecord>,
    lemma2: Vec<IdentityRow>,
    euler: Vec<IdentityRow>,
    lemma1: Lemma1Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time: Option<f64>,
}

fn invariance_row(n: u32, family: Family, perturbation: Option<Perturbation>, timings: bool) -> Result<CurveRecord> {
    let start = Instant::now();
    let system = build_system(n, family)?;
    let mut curve = build_invariant_curve(n, family)?;
    if let Some(p) = perturbation {
        curve = p.apply(&curve);
    }
    let residual = verify_invariance(&curve, &system)?;
    let mut record = CurveRecord::new(&curve, &residual);
    if timings {
        record.wall_time = Some(start.elapsed().as_secs_f64());
    }
    Ok(record)
}

/// Random `c = p/q` with `|p|, q <= 100`, drawn in a fixed order from the seed.
fn lemma1_sample(seed: u64, samples: usize) -> Vec<Rat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let p = rng.gen_range(-LEMMA1_BOUND..=LEMMA1_BOUND);
            let q = rng.gen_range(1..=LEMMA1_BOUND);
            Rat::new(p, q).expect("q is positive")
        })
        .collect()
}

fn lemma1_sweep(seed: u64, samples: usize) -> Lemma1Summary {
    let cs = lemma1_sample(seed, samples);
    let failures: Vec<String> = cs
        .par_iter()
        .flat_map_iter(|c| {
            (1..=LEMMA1_NU_MAX)
                .filter(move |&nu| !lemma1_residual(c, nu).is_zero())
                .map(move |nu| format!("c = {c}, nu = {nu}"))
        })
        .collect();
    Lemma1Summary { seed, samples, nu_max: LEMMA1_NU_MAX, pass: failures.is_empty(), failures }
}

pub fn verify(cfg: &VerifyConfig) -> Result<bool> {
    let start = Instant::now();
    let cells: Vec<(u32, Family)> = (1..=cfg.n_max)
        .flat_map(|n| cfg.families.iter().map(move |&f| (n, f)))
        .collect();

    let invariance = cells
        .par_iter()
        .map(|&(n, f)| invariance_row(n, f, cfg.perturbation, cfg.timings))
        .collect::<Result<Vec<_>>>()?;
    let lemma2 = if cfg.families.contains(&Family::MinusY) {
        (1..=cfg.n_max)
            .into_par_iter()
            .map(|n| Ok(IdentityRow { n, family: None, zero: check_lemma2(n)?.is_zero() }))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let euler = cells
        .par_iter()
        .map(|&(n, f)| Ok(IdentityRow { n, family: Some(f), zero: check_euler_y(n, f)?.is_zero() }))
        .collect::<Result<Vec<_>>>()?;
    let lemma1 = lemma1_sweep(cfg.seed, cfg.lemma1_samples);

    let pass = invariance.iter().all(|r| r.residual_is_zero)
        && lemma2.iter().all(|r| r.zero)
        && euler.iter().all(|r| r.zero)
        && lemma1.pass;
    let report = VerifyReport {
        schema: SCHEMA,
        command: "verify",
        pass,
        n_max: cfg.n_max,
        families: cfg.families.clone(),
        perturbation: cfg.perturbation,
        invariance,
        lemma2,
        euler,
        lemma1,
        wall_time: cfg.timings.then(|| start.elapsed().as_secs_f64()),
    };

    match cfg.format {
        Format::Json => print_json(&report)?,
        Format::Text => print_text(&render_text(&report)?)?,
    }
    Ok(pass)
}

fn count(rows: &[IdentityRow]) -> String {
    format!("{}/{} zero", rows.iter().filter(|r| r.zero).count(), rows.len())
}

fn render_text(r: &VerifyReport) -> Result<String> {
    let mut s = String::new();
    if let Some(p) = r.perturbation {
        writeln!(s, "perturbation: {}", p.name())?;
    }
    writeln!(s, "invariance  P F_x + Q F_y - K F")?;
    writeln!(s, "{:>5}  {:<6}  zero", "n", "family")?;
    for row in &r.invariance {
        write!(s, "{:>5}  {:<6}  {}", row.n, row.family.name(), row.residual_is_zero)?;
        if let Some(t) = row.wall_time {
            write!(s, "  {t:.6} s")?;
        }
        writeln!(s)?;
    }
    if !r.lemma2.is_empty() {
        writeln!(s, "lemma2: {}", count(&r.lemma2))?;
    }
    writeln!(s, "euler: {}", count(&r.euler))?;
    writeln!(
        s,
        "lemma1: {} samples, nu = 1..{}, {} failures (seed {})",
        r.lemma1.samples,
        r.lemma1.nu_max,
        r.lemma1.failures.len(),
        r.lemma1.seed
    )?;
    for f in &r.lemma1.failures {
        writeln!(s, "  {f}")?;
    }
    if let Some(t) = r.wall_time {
        writeln!(s, "wall_time: {t:.6} s")?;
    }
    writeln!(s, "pass: {}", r.pass)?;
    Ok(s)
}
