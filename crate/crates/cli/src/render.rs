use std::fmt::Write;

use qhe_toolkit::localiser::{LeakageCheck, LocalisationResult};
use qhe_toolkit::qhe::audit::DimensionAudit;
use qhe_toolkit::qhe::Report;
use qhe_toolkit::schemes::{CatalogOutcome, Expectation, SchemeCatalogEntry};

pub fn report(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", r.kind.title());
    let _ = writeln!(s, "  verdict: {}", r.verdict);
    let _ = writeln!(s, "  worst metric: {:.3e}", r.worst_metric);
    if let Some(reason) = r.reason {
        let _ = writeln!(s, "  reason: {reason}");
    }
    for (k, v) in &r.tolerances {
        let _ = writeln!(s, "  {k}: {v:e}");
    }
    for c in &r.cases {
        let _ = write!(s, "    {:<28} {:.3e}", c.id, c.metric);
        if let Some(n) = &c.note {
            let _ = write!(s, "  ({n})");
        }
        s.push('\n');
    }
    s
}

pub fn localisation(r: &LocalisationResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "localised: d_A1 = {}, d_A2 = {}", r.d_a1(), r.d_a2());
    let _ = writeln!(s, "  rank r: {}", r.rank_r);
    let _ = writeln!(s, "  tau orthonormality residual: {:.3e}", r.tau_orthonormality_residual);
    let _ = writeln!(s, "  reconstruction residual: {:.3e}", r.reconstruction_residual);
    let diag: Vec<String> = (0..r.d_a2()).map(|k| format!("{:.6}", r.sigma.matrix()[(k, k)].re)).collect();
    let _ = writeln!(s, "  sigma diagonal: [{}]", diag.join(", "));
    s
}

pub fn refusal(c: &LeakageCheck) -> String {
    format!("refused: Bob's state depends on the input (max deviation {:.3e})\n", c.max_deviation)
}

pub fn audit(a: &DimensionAudit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "|S| = {} = {}", a.expression, a.set_size);
    let _ = writeln!(s, "  log2 |S| ~ {:.6} (floor {})", a.log2_approx, a.log2_floor);
    let unit = if a.qubits_required == 1 { "qubit" } else { "qubits" };
    let _ = writeln!(s, "  {} {unit}", a.qubits_required);
    if let Some(c) = &a.classical {
        let rel = if c.inequality_holds { ">=" } else { "<" };
        let _ = writeln!(s, "  log2 |S| {rel} 2^{} = {} (|S| vs {})", c.n, c.strings, c.threshold);
        if !c.inequality_holds {
            let _ = writeln!(s, "  exception: the bound log2 |S| >= 2^n does not hold at n = {}", c.n);
        }
    }
    s
}

fn expectation(e: &Expectation) -> String {
    match e {
        Expectation::Scheme {
            security,
            completeness,
            theorem1,
        } => format!("security={security} completeness={completeness} orthogonality={theorem1}"),
        Expectation::Problem { localised } => format!("localised={localised}"),
    }
}

pub fn catalog(entries: &[SchemeCatalogEntry]) -> String {
    let mut s = String::new();
    for e in entries {
        let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "{:<24} {} {:<24} {}", e.name, e.builder, params.join(" "), expectation(&e.expected));
    }
    s
}

pub fn outcomes(outs: &[CatalogOutcome]) -> String {
    let mut s = String::new();
    for o in outs {
        let mark = if o.matches { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "{mark} {:<24} {}", o.name, expectation(&o.actual));
        if !o.matches {
            let _ = writeln!(s, "     expected {}", expectation(&o.expected));
        }
    }
    let bad = outs.iter().filter(|o| !o.matches).count();
    let _ = writeln!(s, "{} entries, {} mismatched", outs.len(), bad);
    s
}
