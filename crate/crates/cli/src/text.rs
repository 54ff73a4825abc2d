//! Human-readable rendering. Numbers carry 6 significant digits; the JSON
//! report is the authoritative output.

use std::fmt::Write;

use crate::report::{CatalogListing, ClassificationSection, Complex, Matrix, ReportDocument};

/// `x` with 6 significant digits, fixed notation for moderate magnitudes.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        let decimals = (5 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" { "0".into() } else { s }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{mantissa}e{exp}")
    }
}

pub fn complex(z: Complex) -> String {
    match (z[0] == 0.0, z[1] == 0.0) {
        (_, true) => num(z[0]),
        (true, false) => format!("{}i", num(z[1])),
        (false, false) => {
            let sign = if z[1] < 0.0 { '-' } else { '+' };
            format!("{}{sign}{}i", num(z[0]), num(z[1].abs()))
        }
    }
}

fn matrix(out: &mut String, name: &str, m: &Matrix) {
    let cells: Vec<Vec<String>> = m.iter().map(|r| r.iter().copied().map(complex).collect()).collect();
    let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(1);
    let _ = writeln!(out, "  {name} =");
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "    [ {} ]", line.join("  "));
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn classification(out: &mut String, c: &ClassificationSection) {
    let _ = writeln!(out, "classification (tol {}):", num(c.tol));
    let _ = writeln!(out, "  {:<14} {:<5} residual", "property", "holds");
    let rows = [
        ("kahler", c.kahler.holds, c.kahler.residual),
        ("balanced", c.balanced.holds, c.balanced.residual),
        ("gauduchon", c.gauduchon.holds, c.gauduchon.residual),
        ("pluriclosed", c.pluriclosed.holds, c.pluriclosed.residual),
        ("lck_shape", c.lck_shape.holds, c.lck_shape.residual),
        ("stp", c.stp.holds, c.stp.residual),
    ];
    for (name, holds, res) in rows {
        let _ = writeln!(out, "  {name:<14} {:<5} {}", yes(holds), num(res));
    }
    let witness = c
        .nilpotent_j
        .witness
        .as_ref()
        .map(|w| format!(" order {w:?}"))
        .unwrap_or_default();
    let _ = writeln!(out, "  {:<14} {:<5}{witness} ({})", "nilpotent_j", yes(c.nilpotent_j.holds), c.nilpotent_j.scope);
    if c.stp.holds && !c.stp.consistent {
        let _ = writeln!(out, "  warning: stp holds but an identity residual exceeds {}", num(c.stp.identity_tol));
    }
}

pub fn render(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}: {}", doc.tool.name, doc.tool.version, doc.command);
    if let Some(name) = &doc.input.catalog {
        let _ = writeln!(out, "input: catalog {name}");
    }
    if let Some(eqs) = &doc.structure_equations {
        let _ = writeln!(out, "structure equations:");
        for e in eqs {
            let _ = writeln!(out, "  {e}");
        }
    }
    if let Some(v) = &doc.validation {
        let checks: Vec<String> = v.checks.iter().map(|c| format!("{} {}", c.name, num(c.residual))).collect();
        let _ = writeln!(
            out,
            "validation: {} ({}); unimodular: {}",
            if v.passed { "passed" } else { "FAILED" },
            checks.join(", "),
            yes(v.unimodular)
        );
    }
    if let Some(t) = &doc.torsion {
        let _ = writeln!(out, "torsion:");
        let _ = writeln!(out, "  |T|^2 = {}", num(t.norm_t2));
        let _ = writeln!(out, "  |eta|^2 = {}", num(t.norm_eta2));
        let _ = writeln!(out, "  chi = {}", num(t.chi));
        let eta: Vec<String> = t.eta.iter().copied().map(complex).collect();
        let _ = writeln!(out, "  eta = ({})", eta.join(", "));
        matrix(&mut out, "A", &t.a);
        matrix(&mut out, "B", &t.b);
        matrix(&mut out, "phi", &t.phi);
        matrix(&mut out, "xi", &t.xi);
    }
    if let Some(c) = &doc.classification {
        classification(&mut out, c);
    }
    if let Some(r) = &doc.residuals {
        let _ = writeln!(out, "functionals:");
        let _ = writeln!(out, "  F = {}   G = {}", num(r.f_value), num(r.g_value));
        let _ = writeln!(out, "  |Q_F| = {}   |Q_G| = {}", num(r.norm_q_f), num(r.norm_q_g));
        let _ = writeln!(out, "  tr Q_F - 4(|eta|^2 - chi) = {}", num(r.trace_residual));
        matrix(&mut out, "Q_F", &r.q_f);
        matrix(&mut out, "Q_G", &r.q_g);
    }
    if let Some(c) = &doc.critical {
        let _ = writeln!(
            out,
            "{} critical: {} (residual {}, tol {})",
            c.functional,
            yes(c.critical),
            num(c.residual),
            num(c.tol)
        );
    }
    if let Some(v) = &doc.variation {
        let _ = writeln!(
            out,
            "first variation ({}, {} directions, fd step {}, seed {}):",
            v.functional,
            v.directions,
            num(v.fd_step),
            v.seed
        );
        let _ = writeln!(out, "  {:>14} {:>14} {:>12}", "analytic", "fd", "deviation");
        for s in &v.samples {
            let _ = writeln!(out, "  {:>14} {:>14} {:>12}", num(s.analytic), num(s.finite_difference), num(s.deviation));
        }
        let _ = writeln!(
            out,
            "  max deviation {} (threshold {}): {}",
            num(v.max_deviation),
            num(v.threshold),
            if v.passed { "passed" } else { "FAILED" }
        );
        if !v.unimodular {
            let _ = writeln!(out, "  note: algebra is not unimodular; the pairing is not expected to match");
        }
    }
    if let Some(o) = &doc.optimization {
        let _ = writeln!(
            out,
            "optimization ({}): {} after {} accepted steps",
            o.objective, o.termination, o.accepted_steps
        );
        let _ = writeln!(out, "  final objective = {}", num(o.final_objective));
        let _ = writeln!(
            out,
            "  |Q_F| = {}   |Q_G| = {}   |eta| = {}",
            num(o.final_norm_q_f),
            num(o.final_norm_q_g),
            num(o.final_eta_norm)
        );
        if let (Some(first), Some(last)) = (o.trace.first(), o.trace.last()) {
            let _ = writeln!(out, "  objective {} -> {}, gradient {} -> {}", num(first.objective), num(last.objective), num(first.grad_norm), num(last.grad_norm));
        }
        if o.gauduchon_consistency.applies && !o.gauduchon_consistency.holds {
            let _ = writeln!(out, "  warning: |Q_G| is small but eta is not");
        }
        matrix(&mut out, "H*", &o.final_metric);
        classification(&mut out, &o.final_classification);
    }
    out
}

pub fn render_listing(list: &CatalogListing) -> String {
    let width = list.entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
    list.entries
        .iter()
        .map(|e| format!("{:<width$}  {}\n", e.name, e.description))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(num(6.0), "6");
        assert_eq!(num(3.265986323710904), "3.26599");
        assert_eq!(num(-1.0 / 3.0), "-0.333333");
        assert_eq!(num(1.5e-12), "1.5e-12");
        assert_eq!(num(1e-9), "1e-9");
        assert_eq!(num(123456.7), "123457");
        assert_eq!(num(1234567.0), "1.23457e6");
        assert_eq!(num(-2.5e-7), "-2.5e-7");
        assert_eq!(complex([0.0, -1.0]), "-1i");
        assert_eq!(complex([1.0, -0.5]), "1-0.5i");
    }
}
