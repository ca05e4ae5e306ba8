//! Acceptance gate: one PASS/FAIL line per criterion, with supporting detail
//! lines underneath. Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use dwb_core::darboux::{
    assemble_first_integral, classify_rationality, expected_generator, specialized_combination,
    standard_quadruple, BParam, FirstIntegral, Rationality,
};
use dwb_core::dynamics::{
    degenerate_b_values, integrate, solve_on_curve, CompiledAudit, ConservationReport, Guards, NumericSystem,
};
use dwb_core::exact::{factorial, pochhammer};
use dwb_core::lvfamily::{
    build_invariant_curve, build_system, check_euler_y, check_lemma2, leading_coefficient, verify_invariance,
    InvariantCurve,
};
use dwb_core::{BPoly, Error, Family, Rat, XYPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const GRID_N: std::ops::RangeInclusive<u32> = 1..=5;
const GRID_B: [&str; 4] = ["0", "1/2", "1", "-1/2"];
const GRID_X0: [f64; 3] = [0.1, 0.5, 0.9];
const T_END: f64 = 5.0;
const H: f64 = 1e-3;
const TOL: f64 = 1e-6;
const MIN_ORDER_RATIO: f64 = 8.0;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome { pass, summary: summary.into(), details: Vec::new() }
    }

    fn detail(mut self, lines: impl IntoIterator<Item = String>) -> Self {
        self.details.extend(lines);
        self
    }
}

fn rat(s: &str) -> Rat {
    s.parse().unwrap()
}

// ---------------------------------------------------------------- exact ----

fn c1_invariance_sweep() -> Outcome {
    let start = Instant::now();
    let mut nonzero = Vec::new();
    let mut total = 0;
    for n in 1..=25 {
        for family in Family::ALL {
            let system = build_system(n, family).unwrap();
            let curve = build_invariant_curve(n, family).unwrap();
            total += 1;
            if !verify_invariance(&curve, &system).unwrap().is_zero() {
                nonzero.push(format!("n = {n}, {family}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(60);
    Outcome::new(
        nonzero.is_empty() && in_time,
        format!(
            "exact invariance n = 1..25 x both families: {}/{total} residuals identically zero in {:.1} s (limit 60 s)",
            total - nonzero.len(),
            elapsed.as_secs_f64()
        ),
    )
    .detail(nonzero.into_iter().map(|c| format!("nonzero residual: {c}")))
}

/// `(c)_k` as a plain running product.
fn rising(c: &Rat, k: u32) -> Rat {
    (0..k).fold(Rat::one(), |acc, i| acc * (c.clone() + Rat::from(i as i64)))
}

fn c2_lemma_suite() -> Outcome {
    let lemma2_bad: Vec<u32> = (1..=20).filter(|&n| !check_lemma2(n).unwrap().is_zero()).collect();
    let euler_bad: Vec<String> = (1..=20)
        .flat_map(|n| Family::ALL.map(|f| (n, f)))
        .filter(|&(n, f)| !check_euler_y(n, f).unwrap().is_zero())
        .map(|(n, f)| format!("n = {n}, {f}"))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0x1e_44a1);
    let mut lemma1_bad = Vec::new();
    for _ in 0..200 {
        let c = Rat::new(rng.gen_range(-100i64..=100), rng.gen_range(1i64..=100)).unwrap();
        let c1 = c.clone() + Rat::one();
        for nu in 1..=50u32 {
            let lhs = rising(&c1, nu).checked_div(&Rat::from(factorial(nu - 1))).unwrap()
                + rising(&c, nu + 1).checked_div(&Rat::from(factorial(nu))).unwrap();
            let rhs = ((c.clone() + Rat::from(nu as i64)) * rising(&c1, nu))
                .checked_div(&Rat::from(factorial(nu)))
                .unwrap();
            if lhs != rhs {
                lemma1_bad.push(format!("c = {c}, nu = {nu}"));
            }
        }
    }
    let pass = lemma2_bad.is_empty() && euler_bad.is_empty() && lemma1_bad.is_empty();
    Outcome::new(
        pass,
        format!(
            "lemma2 {}/20 zero, euler {}/40 zero, pochhammer identity {}/{} exact (200 random c, nu = 1..50)",
            20 - lemma2_bad.len(),
            40 - euler_bad.len(),
            200 * 50 - lemma1_bad.len(),
            200 * 50
        ),
    )
    .detail(lemma2_bad.iter().map(|n| format!("lemma2 nonzero at n = {n}")))
    .detail(euler_bad.into_iter().map(|c| format!("euler nonzero at {c}")))
    .detail(lemma1_bad.into_iter().take(10).map(|c| format!("pochhammer identity fails at {c}")))
}

fn c3_kernel() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=20 {
        for family in Family::ALL {
            let kernel = standard_quadruple(n, family).unwrap().solve_kernel();
            if kernel.len() != 1 {
                bad.push(format!("n = {n}, {family}: kernel dimension {}", kernel.len()));
            } else if kernel[0].normalized() != expected_generator(n) {
                bad.push(format!("n = {n}, {family}: generator {}", kernel[0].normalized()));
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("cofactor kernel is one-dimensional with generator (0, 1, n+b, -1): {}/40 cases", 40 - bad.len()),
    )
    .detail(bad)
}

fn c4_rationality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xda7b0);
    let mut bad = Vec::new();
    for i in 0..50u32 {
        let b0 = Rat::new(rng.gen_range(-60i64..=60), rng.gen_range(1i64..=40)).unwrap();
        let n = 1 + i % 10;
        let family = Family::ALL[(i / 10 % 2) as usize];
        let quad = standard_quadruple(n, family).unwrap();
        let v = quad.solve_kernel()[0].normalized();
        let (p, q) = (b0.numer().clone(), b0.denom().clone());
        let expected = vec![0.into(), q.clone(), &q * n + &p, -q.clone()];
        match classify_rationality(&v, &BParam::Rational(b0.clone())).unwrap() {
            Rationality::RationalIntegral { exponents, .. } => {
                if exponents != expected {
                    bad.push(format!("b = {b0}, n = {n}: exponents {exponents:?}"));
                }
                if !specialized_combination(&quad.cofactors(), &exponents, &b0).unwrap().is_zero() {
                    bad.push(format!("b = {b0}, n = {n}: re-expansion nonzero"));
                }
            }
            Rationality::NonRational => bad.push(format!("b = {b0}, n = {n}: classified NonRational")),
        }
    }
    let v = expected_generator(2);
    let irrational = classify_rationality(&v, &"irrational".parse().unwrap()).unwrap() == Rationality::NonRational;
    if !irrational {
        bad.push("irrational marker not classified NonRational".into());
    }
    Outcome::new(
        bad.is_empty(),
        format!(
            "50 random p/q give exponents (0, q, qn+p, -q) with exact zero re-expansion; irrational -> NonRational: {}",
            if irrational { "yes" } else { "no" }
        ),
    )
    .detail(bad)
}

// -------------------------------------------------------------- numeric ----

struct Setup {
    curve: InvariantCurve,
    b0: Rat,
    sys: NumericSystem,
    audit: CompiledAudit,
}

fn setup(n: u32, family: Family, b: &str) -> Setup {
    let b0 = rat(b);
    let system = build_system(n, family).unwrap();
    let curve = build_invariant_curve(n, family).unwrap();
    let quad = standard_quadruple(n, family).unwrap();
    let integral: FirstIntegral = assemble_first_integral(&quad, &quad.solve_kernel()[0].normalized()).unwrap();
    let audit = CompiledAudit::new(&curve, &integral, &b0).unwrap();
    let sys = NumericSystem::new(&system, &b0).unwrap();
    Setup { curve, b0, sys, audit }
}

fn run(s: &Setup, x0: f64, y0: f64, h: f64) -> (ConservationReport, Option<f64>) {
    let traj = integrate(&s.sys, x0, y0, T_END, h).unwrap();
    (s.audit.audit(&traj, &Guards::default()), traj.blowup)
}

/// Accumulates cell outcomes by failure category.
#[derive(Default)]
struct Tally {
    cells: usize,
    passed: usize,
    by_reason: BTreeMap<&'static str, Vec<String>>,
}

impl Tally {
    fn fail(&mut self, reason: &'static str, cell: String) {
        self.by_reason.entry(reason).or_default().push(cell);
    }

    fn lines(&self) -> Vec<String> {
        self.by_reason
            .iter()
            .map(|(reason, cells)| {
                let shown: Vec<&str> = cells.iter().take(4).map(String::as_str).collect();
                let more = if cells.len() > 4 { format!(", ... {} more", cells.len() - 4) } else { String::new() };
                format!("{} cells {reason}: {}{more}", cells.len(), shown.join("; "))
            })
            .collect()
    }
}

fn cell_name(n: u32, family: Family, b: &str, x0: f64) -> String {
    format!("{family} n={n} b={b} x0={x0}")
}

/// Judges one measured quantity at `h` and `h/2` against the tolerance and the order ratio.
fn judge(t: &mut Tally, name: String, blowup: Option<f64>, m1: f64, m2: f64) {
    t.cells += 1;
    let ratio = m1 / m2;
    let mut ok = true;
    if let Some(tb) = blowup {
        t.fail("blew up before t = 5", format!("{name} (t = {tb:.3})"));
        ok = false;
    } else if m1.is_nan() || m1 >= TOL {
        t.fail("over tolerance 1e-6", format!("{name} ({m1:.2e})"));
        ok = false;
    }
    if ratio.is_nan() || ratio < MIN_ORDER_RATIO {
        t.fail("with step-halving ratio below 8", format!("{name} ({m1:.1e}/{m2:.1e})"));
        ok = false;
    }
    if ok {
        t.passed += 1;
    }
}

fn c5_on_curve() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut floor = 0;
    for family in Family::ALL {
        for n in GRID_N {
            for b in GRID_B {
                let s = setup(n, family, b);
                for x0 in GRID_X0 {
                    let name = cell_name(n, family, b, x0);
                    let y0 = match solve_on_curve(&s.curve, &s.b0, x0) {
                        Ok(y) => y,
                        Err(e) => {
                            t.cells += 1;
                            t.fail("without an on-curve start", format!("{name} ({e})"));
                            continue;
                        }
                    };
                    let (r1, blowup) = run(&s, x0, y0, H);
                    let (r2, _) = run(&s, x0, y0, H / 2.0);
                    if blowup.is_none() && r1.max_abs_f_residual < 1e-12 {
                        floor += 1;
                    }
                    judge(&mut t, name, blowup, r1.max_abs_f_residual, r2.max_abs_f_residual);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(30);
    Outcome::new(
        t.passed == t.cells && in_time,
        format!(
            "on-curve |F| < 1e-6 on [0, 5] with h = 1e-3 and ratio >= 8 under h/2: {}/{} cells in {:.1} s (limit 30 s)",
            t.passed,
            t.cells,
            elapsed.as_secs_f64()
        ),
    )
    .detail(t.lines())
    .detail([format!("{floor} cells finished below 1e-12, where the ratio measures roundoff rather than truncation")])
}

fn c6_conservation() -> Outcome {
    let mut t = Tally::default();
    let mut flagged = 0;
    let mut no_start = 0;
    let mut unflagged = Vec::new();
    let mut on_cells = 0;
    let mut coincident = Vec::new();
    for family in Family::ALL {
        for n in GRID_N {
            for b in GRID_B {
                let s = setup(n, family, b);
                for x0 in GRID_X0 {
                    let name = cell_name(n, family, b, x0);
                    let (r1, blowup) = run(&s, x0, 1.0, H);
                    if r1.on_curve {
                        on_cells += 1;
                        coincident.push(name.clone());
                        if r1.degenerate && r1.log_singular() {
                            flagged += 1;
                        } else {
                            unflagged.push(format!("{name} (y0 = 1)"));
                        }
                    } else {
                        let (r2, _) = run(&s, x0, 1.0, H / 2.0);
                        judge(&mut t, name.clone(), blowup, r1.max_logh_drift, r2.max_logh_drift);
                    }

                    on_cells += 1;
                    match solve_on_curve(&s.curve, &s.b0, x0) {
                        Ok(y0) => {
                            let (r, _) = run(&s, x0, y0, H);
                            if r.degenerate && r.log_singular() {
                                flagged += 1;
                            } else {
                                unflagged.push(name);
                            }
                        }
                        Err(Error::DegeneratePoint(_)) => no_start += 1,
                        Err(e) => unflagged.push(format!("{name}: {e}")),
                    }
                }
            }
        }
    }
    let on_ok = unflagged.is_empty();
    Outcome::new(
        t.passed == t.cells && on_ok,
        format!(
            "off-curve (y0 = 1) logH drift < 1e-6 with ratio >= 8: {}/{} cells; on-curve starts flagged degenerate: {}/{} ({} refused as degenerate points)",
            t.passed,
            t.cells,
            flagged + no_start,
            on_cells,
            no_start
        ),
    )
    .detail(t.lines())
    .detail(coincident.into_iter().map(|c| format!("{c}: y0 = 1 lies on F = 0, judged as an on-curve start")))
    .detail(unflagged.into_iter().map(|c| format!("on-curve start not flagged: {c}")))
}

// ------------------------------------------------------- falsifiability ----

fn dwb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dwb"))
}

fn c7_falsifiability() -> Outcome {
    let mut missed = Vec::new();
    let mut checks = 0;
    for n in 1..=10 {
        for family in Family::ALL {
            let system = build_system(n, family).unwrap();
            let curve = build_invariant_curve(n, family).unwrap();

            checks += 1;
            let shifted = curve.with_cofactor(&curve.k + &XYPoly::one());
            let residual = verify_invariance(&shifted, &system).unwrap();
            if residual != -&curve.f {
                missed.push(format!("n = {n}, {family}: K + 1 left residual {residual}"));
            }

            let quad = standard_quadruple(n, family).unwrap();
            for i in 0..quad.entries.len() {
                checks += 1;
                let mut q = quad.clone();
                q.entries[i].k = &q.entries[i].k + &XYPoly::one();
                if q.residuals(&system)[i].is_zero() {
                    missed.push(format!("n = {n}, {family}: cofactor K{} + 1 undetected", i + 1));
                }
            }

            for i in 0..=n {
                for j in 0..=(n - i) {
                    checks += 1;
                    let bumped = InvariantCurve {
                        f: &curve.f + &XYPoly::term(i, j, BPoly::one()),
                        ..curve.clone()
                    };
                    if verify_invariance(&bumped, &system).unwrap().is_zero() {
                        missed.push(format!("n = {n}, {family}: coefficient of x^{i} y^{j} + 1 undetected"));
                    }
                }
            }
        }
    }

    for flag in ["--perturb-cofactor", "--perturb-coefficient"] {
        checks += 1;
        let out = dwb().args(["verify", "--n-max", "3", flag, "--format", "json"]).output().unwrap();
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        let rows = report["invariance"].as_array().unwrap();
        let all_false = rows.len() == 6 && rows.iter().all(|r| r["residual_is_zero"] == false);
        if out.status.success() || !all_false || report["pass"] != false {
            missed.push(format!("dwb verify {flag}: exit {:?}, all rows false: {all_false}", out.status.code()));
        }
    }
    Outcome::new(
        missed.is_empty(),
        format!(
            "every perturbation (K + 1, each quadruple cofactor + 1, each coefficient + 1; n = 1..10) is detected: {}/{checks}",
            checks - missed.len()
        ),
    )
    .detail(missed.into_iter().take(20))
}

fn c8_degeneracy() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=10u32 {
        let lead = pochhammer(&BPoly::b_plus(1), n);
        if lead != leading_coefficient(n) {
            bad.push(format!("n = {n}: leading coefficient differs from (b+1)_n"));
        }
        let roots: Vec<Rat> = (-(n as i64) - 3..=3).rev().map(Rat::from).filter(|c| lead.eval(c).is_zero()).collect();
        let expected: Vec<Rat> = (1..=n as i64).map(|k| Rat::from(-k)).collect();
        if degenerate_b_values(n) != expected || roots != expected {
            bad.push(format!("n = {n}: degenerate values {:?}, roots {:?}", degenerate_b_values(n), roots));
        }
    }

    let mut runs = 0;
    for n in 1..=10u32 {
        for b0 in degenerate_b_values(n) {
            for family in ["minus", "plus"] {
                runs += 1;
                let b = b0.to_string();
                let out = dwb()
                    .args(["simulate", "--n", &n.to_string(), "--family", family, "--b", &b])
                    .args(["--x0", "0.5", "--y0", "1", "--format", "json"])
                    .output()
                    .unwrap();
                let stderr = String::from_utf8_lossy(&out.stderr);
                let warned = stderr.contains(&format!("warning: b = {b} is a root of (b+1)_{n}"));
                let report: Option<Value> = serde_json::from_slice(&out.stdout).ok();
                let flagged = report.as_ref().is_some_and(|r| {
                    r["report"]["reasons"].as_array().is_some_and(|rs| rs.iter().any(|x| x["kind"] == "degree_drop"))
                });
                let completed = out.status.success() && report.as_ref().is_some_and(|r| r["rows"].as_u64() > Some(0));
                if !(warned && flagged && completed) {
                    bad.push(format!(
                        "simulate n = {n} {family} b = {b}: warned {warned}, flagged {flagged}, completed {completed}"
                    ));
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("degenerate_b_values(n) = {{-1..-n}} for n <= 10; simulate warns and completes at all {runs} degenerate (n, b, family) runs"),
    )
    .detail(bad.into_iter().take(20))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1", c1_invariance_sweep),
        ("2", c2_lemma_suite),
        ("3", c3_kernel),
        ("4", c4_rationality),
        ("5", c5_on_curve),
        ("6", c6_conservation),
        ("7", c7_falsifiability),
        ("8", c8_degeneracy),
    ];
    let mut failed = 0;
    for (id, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Outcome::new(false, "panicked while checking"));
        if !outcome.pass {
            failed += 1;
        }
        println!("[{}] criterion {id}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.summary);
        for d in &outcome.details {
            println!("       {d}");
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
