//! Programmable gate arrays: a fixed unitary on program (x) data whose
//! program state selects the operation applied to the data.

use serde::{Deserialize, Serialize};

use super::report::{numbered, Case, Report, ReportKind, Verdict};
use crate::error::{Error, Result};
use crate::localiser::probe_states;
use crate::tensor::{is_unitary, schmidt, unitaries_equal_up_to_phase, unitarity_deviation, CMatrix, Ket, Layout, C64};

pub const PROGRAM: &str = "program";
pub const DATA: &str = "data";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramAnalysis {
    pub index: usize,
    /// Largest probability, over data probes, that the program register
    /// leaves the extracted output program state.
    pub residual: f64,
    pub deterministic: bool,
    /// Extracted data unitary; `None` for non-deterministic programs.
    pub unitary: Option<CMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoProgrammingOutcome {
    pub report: Report,
    pub programs: Vec<ProgramAnalysis>,
}

/// `(<q| (x) I) v` for `v` on program (x) data.
fn condition_on(q: &Ket, v: &Ket, dp: usize, dd: usize) -> Vec<C64> {
    let a = v.amplitudes();
    (0..dd)
        .map(|x| (0..dp).map(|p| q.amplitudes()[p].conj() * a[p * dd + x]).sum())
        .collect()
}

fn analyse(g: &CMatrix, layout: &Layout, p: &Ket, index: usize, dp: usize, dd: usize, tol: f64) -> Result<ProgramAnalysis> {
    let run = |t: &Ket| -> Result<Ket> { p.kron(t).evolve(g) };
    // Output program state: dominant Schmidt vector on the first data basis probe.
    let first = run(&Ket::basis(dd, 0))?;
    let sd = schmidt(&first, layout, &[PROGRAM])?;
    let q = sd.left[0].clone();
    let columns: Vec<Vec<C64>> = (0..dd)
        .map(|j| Ok(condition_on(&q, &run(&Ket::basis(dd, j))?, dp, dd)))
        .collect::<Result<_>>()?;
    let w = CMatrix::from_columns(dd, &columns);
    let mut residual: f64 = 0.0;
    for t in probe_states(dd) {
        let kept: f64 = condition_on(&q, &run(&t)?, dp, dd).iter().map(|z| z.norm_sqr()).sum();
        residual = residual.max(1.0 - kept);
    }
    let residual = residual.max(0.0);
    let deterministic = residual <= tol;
    Ok(ProgramAnalysis {
        index,
        residual,
        deterministic,
        unitary: deterministic.then_some(w),
    })
}

fn two_register(dp: usize, dd: usize) -> Result<Layout> {
    Layout::new([(PROGRAM, dp), (DATA, dd)])
}

/// For each program, decide whether `G` applies a fixed unitary to the data
/// and leaves the program register in a data-independent state; then require
/// `|<p_i|p_j>| <= tol` for every pair of deterministic programs whose
/// unitaries differ beyond a global phase. Non-deterministic programs are
/// reported and excluded from the pairwise test.
pub fn check_no_programming(g: &CMatrix, layout: &Layout, programs: &[Ket], tol: f64) -> Result<NoProgrammingOutcome> {
    if layout.registers().len() != 2 || !layout.contains(PROGRAM) || !layout.contains(DATA) {
        return Err(Error::InvalidLayout(format!("expected exactly the registers `{PROGRAM}` and `{DATA}`")));
    }
    let (dp, dd) = (layout.dim_of(PROGRAM)?, layout.dim_of(DATA)?);
    let n = g.require_square()?;
    if n != dp * dd {
        return Err(Error::DimensionMismatch { expected: dp * dd, found: n });
    }
    if !is_unitary(g, 1e-10) {
        return Err(Error::NotUnitary {
            what: "G".into(),
            deviation: unitarity_deviation(g)?,
        });
    }
    // Work in (program, data) order regardless of the layout's order.
    let order = [PROGRAM, DATA];
    let offs = layout.offsets(&order)?;
    let g = CMatrix::from_fn(n, n, |i, j| g[(offs[i], offs[j])]);
    let canonical = two_register(dp, dd)?;

    let mut analyses = Vec::with_capacity(programs.len());
    let mut cases = Vec::new();
    for (i, p) in programs.iter().enumerate() {
        if p.dim() != dp {
            return Err(Error::DimensionMismatch { expected: dp, found: p.dim() });
        }
        let a = analyse(&g, &canonical, p, i, dp, dd, tol)?;
        let note = if a.deterministic { "deterministic" } else { "non-deterministic" };
        cases.push(Case::new(numbered("program", i, programs.len()), a.residual).with_note(note));
        analyses.push(a);
    }

    let mut worst: f64 = 0.0;
    let mut violated = false;
    for i in 0..analyses.len() {
        for j in i + 1..analyses.len() {
            let (Some(wi), Some(wj)) = (&analyses[i].unitary, &analyses[j].unitary) else {
                continue;
            };
            let id = format!(
                "pair/{}|{}",
                numbered("program", i, programs.len()),
                numbered("program", j, programs.len())
            );
            if unitaries_equal_up_to_phase(wi, wj, 1e-9)? {
                cases.push(Case::new(id, 0.0).with_note("same unitary up to phase; no constraint"));
                continue;
            }
            let overlap = programs[i].inner(&programs[j])?.norm();
            worst = worst.max(overlap);
            violated |= overlap > tol;
            cases.push(Case::new(id, overlap));
        }
    }
    let verdict = if violated { Verdict::Fail } else { Verdict::Pass };
    Ok(NoProgrammingOutcome {
        report: Report::new(ReportKind::NoProgramming, verdict, worst, cases, tol),
        programs: analyses,
    })
}

/// `sum_{ab} |ab><ab| (x) X^a Z^b` on a two-qubit program and one data qubit.
pub fn controlled_pauli_array() -> (CMatrix, Layout) {
    let mut g = CMatrix::zeros(8, 8);
    for k in 0..4 {
        let p = crate::tensor::gates::pauli_xz(1, k >> 1, k & 1);
        for i in 0..2 {
            for j in 0..2 {
                g[(k * 2 + i, k * 2 + j)] = p[(i, j)];
            }
        }
    }
    (g, Layout::new([(PROGRAM, 4), (DATA, 2)]).expect("valid layout"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::gates;

    fn cx() -> (CMatrix, Layout) {
        (gates::cnot(), Layout::new([(PROGRAM, 2), (DATA, 2)]).unwrap())
    }

    #[test]
    fn controlled_x_with_basis_programs() {
        let (g, l) = cx();
        let out = check_no_programming(&g, &l, &[Ket::basis(2, 0), Ket::basis(2, 1)], 1e-9).unwrap();
        assert_eq!(out.report.verdict, Verdict::Pass);
        let w0 = out.programs[0].unitary.as_ref().unwrap();
        let w1 = out.programs[1].unitary.as_ref().unwrap();
        assert!(unitaries_equal_up_to_phase(w0, &CMatrix::identity(2), 1e-9).unwrap());
        assert!(unitaries_equal_up_to_phase(w1, &gates::pauli_x(), 1e-9).unwrap());
        assert_eq!(out.report.worst_metric, 0.0);
    }

    #[test]
    fn superposed_program_is_flagged() {
        let (g, l) = cx();
        let out = check_no_programming(&g, &l, &[Ket::basis(2, 0), Ket::uniform(2)], 1e-9).unwrap();
        assert!(out.programs[0].deterministic);
        assert!(!out.programs[1].deterministic);
        assert!((out.programs[1].residual - 0.5).abs() < 1e-12);
        assert_eq!(out.report.verdict, Verdict::Pass);
    }

    #[test]
    fn controlled_paulis_need_orthogonal_programs() {
        let (g, l) = controlled_pauli_array();
        let progs: Vec<Ket> = (0..4).map(|k| Ket::basis(4, k)).collect();
        let out = check_no_programming(&g, &l, &progs, 1e-9).unwrap();
        assert_eq!(out.report.verdict, Verdict::Pass);
        assert!(out.programs.iter().all(|p| p.deterministic));
        let ws: Vec<&CMatrix> = out.programs.iter().map(|p| p.unitary.as_ref().unwrap()).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(!unitaries_equal_up_to_phase(ws[i], ws[j], 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn same_unitary_imposes_no_constraint() {
        // G ignores the program, so every program selects Z.
        let l = Layout::new([(PROGRAM, 2), (DATA, 2)]).unwrap();
        let g = CMatrix::identity(2).kron(&gates::pauli_z());
        let out = check_no_programming(&g, &l, &[Ket::basis(2, 0), Ket::uniform(2)], 1e-9).unwrap();
        assert!(out.programs.iter().all(|p| p.deterministic));
        assert_eq!(out.report.verdict, Verdict::Pass);
        assert!(out.report.cases.iter().any(|c| c.note.as_deref() == Some("same unitary up to phase; no constraint")));
    }

    #[test]
    fn loose_tolerance_exposes_non_orthogonal_programs() {
        // A slightly tilted program passes the determinism test at 1e-3 and
        // selects a unitary distinct from I, yet overlaps |0> almost fully.
        let (g, l) = cx();
        let e: f64 = 0.01;
        let tilted = Ket::new(vec![C64::new(e.cos(), 0.0), C64::new(e.sin(), 0.0)]).unwrap();
        let out = check_no_programming(&g, &l, &[Ket::basis(2, 0), tilted], 1e-3).unwrap();
        assert!(out.programs[1].deterministic);
        assert_eq!(out.report.verdict, Verdict::Fail);
        assert!((out.report.worst_metric - e.cos()).abs() < 1e-12);
    }

    #[test]
    fn respects_layout_order() {
        let (g, _) = cx();
        // Same gate described with data first: swap conjugation.
        let swapped = &(&gates::swap() * &g) * &gates::swap();
        let l = Layout::new([(DATA, 2), (PROGRAM, 2)]).unwrap();
        let out = check_no_programming(&swapped, &l, &[Ket::basis(2, 0), Ket::basis(2, 1)], 1e-9).unwrap();
        assert!(unitaries_equal_up_to_phase(out.programs[1].unitary.as_ref().unwrap(), &gates::pauli_x(), 1e-9).unwrap());
    }
}
