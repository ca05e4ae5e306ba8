use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dwb_core::darboux::{assemble_first_integral, standard_quadruple, ExponentVector};
use dwb_core::dynamics::{
    degenerate_b_values, integrate_with, solve_on_curve_with, CompiledAudit, ConservationReport, Guards,
    NumericSystem, Sample, Verdict,
};
use dwb_core::lvfamily::{build_invariant_curve, build_system, InvariantCurve};
use dwb_core::{Family, Rat};
use serde::Serialize;

use crate::output::{print_json, print_text, warn, Format, SCHEMA};
use crate::svg;

pub struct SimulateConfig {
    pub n: u32,
    pub family: Family,
    pub b: String,
    pub x0: f64,
    pub y0: Option<f64>,
    pub t_end: f64,
    pub h: f64,
    pub tol_f: f64,
    pub tol_logh: f64,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub format: Format,
}

#[derive(Serialize)]
struct SimulateReport {
    schema: u32,
    command: &'static str,
    pass: bool,
    n: u32,
    family: Family,
    b: String,
    x0: f64,
    y0: f64,
    y0_on_curve: bool,
    t_end: f64,
    h: f64,
    tol_f: f64,
    tol_logh: f64,
    rows: usize,
    verdict: Verdict,
    report: ConservationReport,
    warnings: Vec<String>,
}

fn validate(cfg: &SimulateConfig) -> Result<()> {
    let positive = |name: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(anyhow::anyhow!("{name} must be positive and finite, got {v}"))
        }
    };
    positive("--t-end", cfg.t_end)?;
    positive("--h", cfg.h)?;
    positive("--tol-f", cfg.tol_f)?;
    positive("--tol-logh", cfg.tol_logh)?;
    if !cfg.x0.is_finite() {
        bail!("--x0 must be finite, got {}", cfg.x0);
    }
    if let Some(y0) = cfg.y0.filter(|y| !y.is_finite()) {
        bail!("--y0 must be finite, got {y0}");
    }
    Ok(())
}

fn write_csv(path: &Path, samples: &[Sample]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "t,x,y,F_resid,logH")?;
    for s in samples {
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.t, s.x, s.y, s.f_resid, s.log_h)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_plot(path: &Path, curve: &InvariantCurve, b0: &Rat, samples: &[Sample], title: &str) -> Result<()> {
    let s_poly = curve.y_coefficient().specialize_b(b0).to_numeric()?;
    let r_poly = curve.y_free_part().specialize_b(b0).to_numeric()?;
    let guard = Guards::default().singular;
    let branch = |x: f64| {
        let s = s_poly.eval(x, 0.0);
        (s.abs() > guard).then(|| -r_poly.eval(x, 0.0) / s)
    };
    let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.x, s.y)).collect();
    let Some(svg) = svg::phase_plot(&points, branch, title) else {
        bail!("trajectory has no finite points to plot");
    };
    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
}

pub fn simulate(cfg: &SimulateConfig) -> Result<bool> {
    validate(cfg)?;
    let b0: Rat = cfg
        .b
        .parse()
        .with_context(|| format!("--b must be an exact rational (p/q or a decimal), got {:?}", cfg.b))?;
    let (n, family) = (cfg.n, cfg.family);
    let guards = Guards::default();

    let system = build_system(n, family)?;
    let curve = build_invariant_curve(n, family)?;
    let quad = standard_quadruple(n, family)?;
    let kernel = quad.solve_kernel();
    let [generator] = kernel.as_slice() else {
        bail!("expected a one-dimensional cofactor kernel, found dimension {}", kernel.len());
    };
    let integral = assemble_first_integral(&quad, &ExponentVector::normalized(generator))?;

    let mut warnings = Vec::new();
    if degenerate_b_values(n).contains(&b0) {
        warnings.push(format!("b = {b0} is a root of (b+1)_{n}; the curve drops below degree {n} there"));
    }

    let y0 = match cfg.y0 {
        Some(y) => y,
        None => solve_on_curve_with(&curve, &b0, cfg.x0, &guards)
            .context("no point of the curve above --x0; pass --y0 explicitly")?,
    };
    let sys = NumericSystem::new(&system, &b0)?;
    let traj = integrate_with(&sys, cfg.x0, y0, cfg.t_end, cfg.h, &guards)?;
    let audit = CompiledAudit::new(&curve, &integral, &b0)?;
    let report = audit.audit(&traj, &guards);
    let samples = audit.samples(&traj);
    let verdict = report.verdict(cfg.tol_f, cfg.tol_logh);
    warnings.extend(report.reasons.iter().map(|r| format!("degenerate: {r}")));

    if let Some(path) = &cfg.out {
        write_csv(path, &samples)?;
    }
    if let Some(path) = &cfg.plot {
        let title = format!("n = {n}, {family}, b = {b0}, start ({}, {})", cfg.x0, y0);
        write_plot(path, &curve, &b0, &samples, &title)?;
    }
    for w in &warnings {
        warn(w);
    }

    let pass = verdict != Verdict::Fail;
    let out = SimulateReport {
        schema: SCHEMA,
        command: "simulate",
        pass,
        n,
        family,
        b: b0.to_string(),
        x0: cfg.x0,
        y0,
        y0_on_curve: cfg.y0.is_none(),
        t_end: cfg.t_end,
        h: cfg.h,
        tol_f: cfg.tol_f,
        tol_logh: cfg.tol_logh,
        rows: samples.len(),
        verdict,
        report,
        warnings,
    };
    match cfg.format {
        Format::Json => print_json(&out)?,
        Format::Text => print_text(&render_text(&out, cfg)?)?,
    }
    Ok(pass)
}

fn render_text(r: &SimulateReport, cfg: &SimulateConfig) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "n = {}, family = {}, b = {}", r.n, r.family, r.b)?;
    writeln!(
        s,
        "start ({}, {}){}",
        r.x0,
        r.y0,
        if r.y0_on_curve { " on F = 0" } else { "" }
    )?;
    writeln!(s, "t in [0, {}], h = {}, rk4, {} rows", r.t_end, r.h, r.rows)?;
    if let Some(p) = &cfg.out {
        writeln!(s, "csv: {}", p.display())?;
    }
    if let Some(p) = &cfg.plot {
        writeln!(s, "plot: {}", p.display())?;
    }
    writeln!(s, "max |F| residual (normalized): {:e}", r.report.max_abs_f_residual)?;
    writeln!(s, "max logH drift: {:e}", r.report.max_logh_drift)?;
    writeln!(s, "degenerate: {}", r.report.degenerate)?;
    for reason in &r.report.reasons {
        writeln!(s, "  {reason}")?;
    }
    let verdict = match r.verdict {
        Verdict::Pass => "pass",
        Verdict::Degenerate => "degenerate",
        Verdict::Fail => "fail",
    };
    writeln!(s, "verdict: {verdict}")?;
    Ok(s)
}
