use std::fmt::Write as _;
use std::time::Instant;

use anyhow::Result;
use dwb_core::lvfamily::{build_invariant_curve, build_system, verify_invariance, CurveRecord};
use dwb_core::Family;
use serde::Serialize;

use crate::output::{print_json, print_text, Format, SCHEMA};

#[derive(Serialize)]
struct CurveReport {
    schema: u32,
    command: &'static str,
    pass: bool,
    #[serde(flatten)]
    record: CurveRecord,
}

pub fn curve(n: u32, family: Family, format: Format, timings: bool) -> Result<bool> {
    let start = Instant::now();
    let system = build_system(n, family)?;
    let curve = build_invariant_curve(n, family)?;
    let residual = verify_invariance(&curve, &system)?;
    let mut record = CurveRecord::new(&curve, &residual);
    if timings {
        record.wall_time = Some(start.elapsed().as_secs_f64());
    }
    let pass = record.residual_is_zero;

    match format {
        Format::Json => print_json(&CurveReport { schema: SCHEMA, command: "curve", pass, record })?,
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "n = {n}, family = {family}")?;
            writeln!(s, "F = {}", record.f_rendered)?;
            writeln!(s, "K = {}", record.k_rendered)?;
            if !pass {
                writeln!(s, "residual = {residual}")?;
            }
            writeln!(s, "residual_is_zero: {pass}")?;
            if let Some(t) = record.wall_time {
                writeln!(s, "wall_time: {t:.6} s")?;
            }
            print_text(&s)?;
        }
    }
    Ok(pass)
}
