use super::pipeline::{bob_share_t1, run_pipeline};
use super::report::{numbered, worst_of, Case, ReasonCode, Report, ReportKind, Verdict};
use super::scheme::QheScheme;
use crate::error::Result;
use crate::localiser::probe_states;
use crate::qinfo::{orthogonal_support, product_deviation_pure};
use crate::tensor::{derive_seed, random_ket, trace_distance, unitaries_equal_up_to_phase, CMatrix, Ket, C64};

/// Seeded Haar plaintexts added per circuit on top of the probe set.
pub const COMPLETENESS_HAAR_SAMPLES: usize = 10;
const COMPLETENESS_SEED: u64 = 0xc0_4e7e;
/// Distinctness of target unitaries is judged up to phase at this level.
pub const DISTINCT_TOL: f64 = 1e-9;

/// Bob's share at `t1` must not depend on the plaintext. Checked on the
/// probe set, which spans the plaintext operators.
pub fn check_security(s: &QheScheme, tol: f64) -> Result<Report> {
    check_security_in_basis(s, tol, &CMatrix::identity(s.plaintext_dim()))
}

/// [`check_security`] with every probe rotated by `basis`.
pub fn check_security_in_basis(s: &QheScheme, tol: f64, basis: &CMatrix) -> Result<Report> {
    let probes: Vec<Ket> = probe_states(s.plaintext_dim())
        .iter()
        .map(|p| p.evolve(basis))
        .collect::<Result<_>>()?;
    let shares: Vec<CMatrix> = probes.iter().map(|p| bob_share_t1(s, p)).collect::<Result<_>>()?;
    let mut worst_per = vec![0.0f64; shares.len()];
    for i in 0..shares.len() {
        for j in i + 1..shares.len() {
            let d = trace_distance(&shares[i], &shares[j])?;
            worst_per[i] = worst_per[i].max(d);
            worst_per[j] = worst_per[j].max(d);
        }
    }
    let n = probes.len();
    let cases = worst_per
        .into_iter()
        .enumerate()
        .map(|(i, d)| Case::new(numbered("probe", i, n), d))
        .collect();
    Ok(Report::thresholded(ReportKind::Security, cases, tol))
}

fn completeness_inputs(s: &QheScheme, circuit_index: usize) -> Vec<(String, Ket)> {
    let d = s.plaintext_dim();
    let probes = probe_states(d);
    let n = probes.len();
    let mut out: Vec<(String, Ket)> =
        probes.into_iter().enumerate().map(|(i, p)| (numbered("probe", i, n), p)).collect();
    for k in 0..COMPLETENESS_HAAR_SAMPLES {
        let seed = derive_seed(derive_seed(COMPLETENESS_SEED, circuit_index as u64), k as u64);
        out.push((numbered("haar", k, COMPLETENESS_HAAR_SAMPLES), random_ket(d, seed)));
    }
    out
}

/// Per case: the larger of `1 - F(output, W_c psi)` and the distance of the
/// decrypted state from (output) x (rest of Alice).
pub fn check_completeness(s: &QheScheme, tol: f64) -> Result<Report> {
    let mut cases = Vec::new();
    for (ci, ev) in s.evaluations().iter().enumerate() {
        for (id, psi) in completeness_inputs(s, ci) {
            let trace = run_pipeline(s, &ev.id, &psi)?;
            let target = psi.evolve(&ev.w_c)?;
            let rho_t = trace.output.matrix().apply(target.amplitudes())?;
            let f: C64 = target.amplitudes().iter().zip(&rho_t).map(|(a, b)| a.conj() * b).sum();
            let infidelity = (1.0 - f.re).max(0.0);
            let product = if trace.remainder.is_empty() {
                0.0
            } else {
                product_deviation_pure(&trace.layout, &trace.final_state, &[s.output()], &trace.remainder)?
            };
            let metric = infidelity.max(product);
            let note = format!("1-F {infidelity:.3e}, product deviation {product:.3e}");
            cases.push(Case::new(format!("{}/{id}", ev.id), metric).with_note(note));
        }
    }
    Ok(Report::thresholded(ReportKind::Completeness, cases, tol))
}

/// Orthogonality of Bob's messages for circuits with distinct targets.
///
/// Gated on security and completeness. Stage 1 tests that at `t2` the
/// message is uncorrelated with what Alice kept at `t1`; if not, the verdict
/// is `inapplicable` with the product-form deviation as the metric. Stage 2
/// compares message supports pairwise.
pub fn check_theorem1(s: &QheScheme, psi: &Ket, tol: f64) -> Result<Report> {
    let kind = ReportKind::Theorem1;
    let sec = check_security(s, tol)?;
    if sec.verdict != Verdict::Pass {
        let case = Case::new("precondition/security", sec.worst_metric);
        return Ok(Report::inapplicable(kind, ReasonCode::SecurityPreconditionFailed, sec.worst_metric, vec![case], tol));
    }
    let comp = check_completeness(s, tol)?;
    if comp.verdict != Verdict::Pass {
        let case = Case::new("precondition/completeness", comp.worst_metric);
        return Ok(Report::inapplicable(
            kind,
            ReasonCode::CompletenessPreconditionFailed,
            comp.worst_metric,
            vec![case],
            tol,
        ));
    }

    let retained = s.ownership_t1().alice.clone();
    let message = s.message_registers();
    let mut stage1 = Vec::new();
    let mut traces = Vec::new();
    for ev in s.evaluations() {
        let trace = run_pipeline(s, &ev.id, psi)?;
        let dev = if retained.is_empty() {
            0.0
        } else {
            product_deviation_pure(&trace.layout, &trace.state_t2, &retained, &message)?
        };
        stage1.push(Case::new(format!("product/{}", ev.id), dev));
        traces.push(trace);
    }
    let worst1 = worst_of(&stage1);
    if worst1.is_nan() || worst1 > tol {
        return Ok(Report::inapplicable(kind, ReasonCode::MessageCorrelatedWithRetainedKey, worst1, stage1, tol));
    }

    let evs = s.evaluations();
    let mut cases = stage1;
    let mut worst: f64 = 0.0;
    for i in 0..evs.len() {
        for j in i + 1..evs.len() {
            let id = format!("overlap/{}|{}", evs[i].id, evs[j].id);
            if unitaries_equal_up_to_phase(&evs[i].w_c, &evs[j].w_c, DISTINCT_TOL)? {
                cases.push(Case::new(id, 0.0).with_note("same unitary up to phase; no constraint"));
                continue;
            }
            let o = orthogonal_support(&traces[i].rho_b_msg, &traces[j].rho_b_msg, tol)?;
            worst = worst.max(o.overlap);
            cases.push(Case::new(id, o.overlap));
        }
    }
    let verdict = if worst <= tol { Verdict::Pass } else { Verdict::Fail };
    Ok(Report::new(kind, verdict, worst, cases, tol))
}
