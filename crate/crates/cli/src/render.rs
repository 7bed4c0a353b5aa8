//! Text and JSON renderings of reports. Exact rationals are printed as
//! `num/den` with a decimal approximation alongside.

use std::io::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use weil_core::chainlab::verifier::VerifierReport;
use weil_core::weilcoh::{RationalSplitting, TorsionReport, Verdicts, WeilReport};
use weil_core::zetaval::{RegulatorReport, ZetaReport};

fn exact(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn approx(r: &BigRational) -> String {
    match r.to_f64() {
        Some(x) if x.is_finite() => format!("{x:.6}"),
        _ => "overflow".to_string(),
    }
}

fn rat_json(r: &BigRational) -> Value {
    json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "approx": r.to_f64().filter(|x| x.is_finite()),
    })
}

fn int_json(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn lab_text(report: &VerifierReport, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "cases: {}", report.cases)?;
    writeln!(out, "checks: {}", report.checks)?;
    writeln!(out, "failures: {}", report.failures.len())?;
    for f in &report.failures {
        writeln!(out, "FAIL {}: {}", f.identity, f.message)?;
        writeln!(
            out,
            "  counterexample: {}",
            serde_json::to_string(&f.counterexample).expect("cases serialize")
        )?;
    }
    writeln!(out, "{}", if report.passed() { "PASS" } else { "FAIL" })
}

pub fn lab_json(report: &VerifierReport) -> Value {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    v["passed"] = json!(report.passed());
    v
}

fn torsion_json(t: &TorsionReport) -> Value {
    match t {
        TorsionReport::Exact(n) => json!({ "exact": n.to_string() }),
        TorsionReport::Ambiguous { lower, upper } => {
            json!({ "ambiguous": { "lower": lower.to_string(), "upper": upper.to_string() } })
        }
        TorsionReport::Infinite => json!("infinite"),
    }
}

pub fn weil_text(
    report: &WeilReport,
    verdicts: &Verdicts,
    splitting: Option<&RationalSplitting>,
    out: &mut dyn Write,
) -> io::Result<()> {
    writeln!(out, "Weil-étale cohomology, d = {}, n = {}", report.d, report.n)?;
    writeln!(out, "{:>4}  {:<28} {:<28} {:>5}  {:<4} torsion", "t", "(A^{t-1})_G", "(A^t)^G", "rank", "f.g.")?;
    for deg in &report.degrees {
        writeln!(
            out,
            "{:>4}  {:<28} {:<28} {:>5}  {:<4} {}",
            deg.t,
            deg.coinv_prev.to_string(),
            deg.inv.to_string(),
            deg.rank,
            if deg.finitely_generated { "yes" } else { "no" },
            deg.torsion
        )?;
    }
    writeln!(out, "cup with e:")?;
    for c in &report.cup_e {
        writeln!(
            out,
            "{:>4}  ker {:<24} coker {:<24} semisimple {}",
            c.t,
            c.data.ker.to_string(),
            c.data.coker.to_string(),
            if c.data.semisimple_at_1 { "yes" } else { "no" }
        )?;
    }
    match &report.chi_e {
        Some(chi) => writeln!(out, "chi_e = {} ({})", exact(chi), approx(chi))?,
        None => writeln!(
            out,
            "chi_e undefined: not semisimple at 1 in degrees {:?}",
            verdicts.failing_semisimple()
        )?,
    }
    writeln!(out, "rho = rank H^{}_W = {}", 2 * report.n, report.rho)?;
    writeln!(
        out,
        "finitely generated: {}",
        if verdicts.all_finitely_generated() { "yes" } else { "no" }
    )?;
    writeln!(out, "semisimple at 1: {}", if verdicts.all_semisimple() { "yes" } else { "no" })?;
    if let Some(s) = splitting {
        writeln!(
            out,
            "rational splitting: {}",
            if s.consistent() { "consistent" } else { "inconsistent" }
        )?;
        for (i, e, g) in &s.rank_mismatches {
            writeln!(out, "  rank H^{i}_W = {g}, expected {e}")?;
        }
        for (i, e, g) in &s.image_mismatches {
            writeln!(out, "  rank of e out of degree {i} = {g}, expected {e}")?;
        }
    }
    for w in &report.warnings {
        writeln!(out, "warning: {w}")?;
    }
    Ok(())
}

pub fn weil_json(report: &WeilReport, verdicts: &Verdicts, splitting: Option<&RationalSplitting>) -> Value {
    let degrees: Vec<Value> = report
        .degrees
        .iter()
        .map(|deg| {
            json!({
                "t": deg.t,
                "coinvariants_prev": deg.coinv_prev.to_string(),
                "invariants": deg.inv.to_string(),
                "rank": deg.rank,
                "finitely_generated": deg.finitely_generated,
                "torsion": torsion_json(&deg.torsion),
            })
        })
        .collect();
    let cup_e: Vec<Value> = report
        .cup_e
        .iter()
        .map(|c| {
            json!({
                "t": c.t,
                "ker": c.data.ker.to_string(),
                "coker": c.data.coker.to_string(),
                "semisimple_at_1": c.data.semisimple_at_1,
            })
        })
        .collect();
    json!({
        "d": report.d,
        "n": report.n,
        "degrees": degrees,
        "cup_e": cup_e,
        "chi_e": report.chi_e.as_ref().map(rat_json),
        "rho": report.rho,
        "verdicts": {
            "finitely_generated": verdicts.all_finitely_generated(),
            "semisimple": verdicts.all_semisimple(),
            "failing_semisimple": verdicts.failing_semisimple(),
        },
        "rational_splitting": splitting.map(|s| json!({
            "consistent": s.consistent(),
            "rank_mismatches": s.rank_mismatches,
            "image_mismatches": s.image_mismatches,
            "exact": s.exact,
        })),
        "warnings": report.warnings,
    })
}

pub fn zeta_text(
    report: &ZetaReport,
    regulator: Option<&RegulatorReport>,
    passed: bool,
    out: &mut dyn Write,
) -> io::Result<()> {
    writeln!(out, "lhs (leading term)  = {} ({})", exact(&report.lhs), approx(&report.lhs))?;
    writeln!(out, "chi_e               = {} ({})", exact(&report.chi_e), approx(&report.chi_e))?;
    writeln!(out, "Hodge exponent      = {}", report.hodge_chi)?;
    writeln!(out, "rhs                 = {} ({})", exact(&report.rhs), approx(&report.rhs))?;
    writeln!(out, "sign                = {:+}", report.sign)?;
    writeln!(
        out,
        "pole order          = {} (zeta), {} (rank H^2n_W){}",
        report.rho_zeta,
        report.rho_weil,
        if report.rho_matches { "" } else { "  MISMATCH" }
    )?;
    if let Some(r) = regulator {
        writeln!(
            out,
            "regulator           = {}; torsion product / R = {} ({})",
            r.regulator,
            exact(&r.product),
            if r.passed { "matches chi_e" } else { "MISMATCH" }
        )?;
    }
    for w in &report.warnings {
        writeln!(out, "warning: {w}")?;
    }
    writeln!(out, "{}", if passed { "PASS (up to sign)" } else { "FAIL" })
}

pub fn zeta_json(report: &ZetaReport, regulator: Option<&RegulatorReport>, passed: bool) -> Value {
    json!({
        "lhs": rat_json(&report.lhs),
        "rhs": rat_json(&report.rhs),
        "chi_e": rat_json(&report.chi_e),
        "hodge_chi": int_json(&report.hodge_chi),
        "sign": report.sign,
        "equal_up_to_sign": report.equal_up_to_sign,
        "rho_zeta": report.rho_zeta,
        "rho_weil": report.rho_weil,
        "rho_matches": report.rho_matches,
        "regulator": regulator.map(|r| json!({
            "regulator": int_json(&r.regulator),
            "product": rat_json(&r.product),
            "passed": r.passed,
        })),
        "warnings": report.warnings,
        "passed": passed,
    })
}
