use std::fmt::Write as _;

use anyhow::{Context, Result};
use dwb_core::darboux::{
    assemble_first_integral, classify_rationality, specialized_combination, standard_quadruple, BParam,
    ExponentVector, Rationality,
};
use dwb_core::Family;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{print_json, print_text, Format, SCHEMA};

#[derive(Serialize)]
struct CurveEntry {
    f: String,
    k: String,
}

#[derive(Serialize)]
struct DarbouxReport {
    schema: u32,
    command: &'static str,
    pass: bool,
    n: u32,
    family: Family,
    curves: Vec<CurveEntry>,
    kernel_dimension: usize,
    kernel: Vec<String>,
    first_integral: Option<String>,
    certified: bool,
    b: Option<String>,
    rationality: Option<Value>,
}

/// Integers as JSON numbers when they fit, as strings otherwise.
fn int_value(v: &impl ToString) -> Value {
    let s = v.to_string();
    s.parse::<i64>().map_or(Value::String(s), Value::from)
}

fn tuple<T: ToString>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

pub fn darboux(n: u32, family: Family, b: Option<&str>, format: Format) -> Result<bool> {
    let b_param: Option<BParam> = b
        .map(|s| s.parse().with_context(|| format!("invalid value for --b: {s:?}")))
        .transpose()?;
    let quad = standard_quadruple(n, family)?;
    let kernel: Vec<ExponentVector> = quad.solve_kernel().iter().map(ExponentVector::normalized).collect();
    let generator = kernel.first();
    let integral = generator.map(|v| assemble_first_integral(&quad, v)).transpose()?;
    let certified = integral.as_ref().is_some_and(|h| h.is_certified());

    let mut rationality_ok = true;
    let mut rationality_text = None;
    let rationality = match (generator, &b_param) {
        (Some(v), Some(bp)) => Some(match classify_rationality(v, bp)? {
            Rationality::RationalIntegral { exponents, scale } => {
                let BParam::Rational(b0) = bp else { unreachable!("only rational b yields exponents") };
                let zero = specialized_combination(&quad.cofactors(), &exponents, b0)?.is_zero();
                rationality_ok = zero;
                rationality_text = Some(format!(
                    "rational first integral, exponents {} (scale {scale}), re-expansion {}",
                    tuple(&exponents),
                    if zero { "zero" } else { "NONZERO" }
                ));
                json!({
                    "kind": "rational_integral",
                    "exponents": exponents.iter().map(int_value).collect::<Vec<_>>(),
                    "scale": int_value(&scale),
                    "re_expansion_zero": zero,
                })
            }
            Rationality::NonRational => {
                rationality_text = Some("NonRational".to_string());
                json!({ "kind": "non_rational" })
            }
        }),
        _ => None,
    };

    let pass = kernel.len() == 1 && certified && rationality_ok;
    let report = DarbouxReport {
        schema: SCHEMA,
        command: "darboux",
        pass,
        n,
        family,
        curves: quad
            .entries
            .iter()
            .map(|e| CurveEntry { f: e.f.to_string(), k: e.k.render_affine() })
            .collect(),
        kernel_dimension: kernel.len(),
        kernel: kernel.iter().map(ToString::to_string).collect(),
        first_integral: integral.as_ref().map(ToString::to_string),
        certified,
        b: b_param.as_ref().map(ToString::to_string),
        rationality,
    };

    match format {
        Format::Json => print_json(&report)?,
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "n = {n}, family = {family}")?;
            for (i, c) in report.curves.iter().enumerate() {
                writeln!(s, "f{} = {}    K{} = {}", i + 1, c.f, i + 1, c.k)?;
            }
            writeln!(s, "kernel (dimension {}):", report.kernel_dimension)?;
            for v in &report.kernel {
                writeln!(s, "  {v}")?;
            }
            if let Some(h) = &report.first_integral {
                writeln!(s, "H = {h}")?;
                writeln!(s, "certified: {certified}")?;
            }
            if let (Some(b), Some(text)) = (&report.b, &rationality_text) {
                writeln!(s, "b = {b}: {text}")?;
            }
            writeln!(s, "pass: {pass}")?;
            print_text(&s)?;
        }
    }
    Ok(pass)
}
