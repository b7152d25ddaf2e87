use serde::{Deserialize, Serialize};

use super::scheme::{Ownership, QheScheme};
use crate::error::{Error, Result};
use crate::localiser::LocalisationProblem;
use crate::qinfo::DensityOp;
use crate::tensor::{CMatrix, Ket, Layout, C64};

/// Snapshot of one encrypt/evaluate/decrypt run. The global state stays pure
/// throughout, so it is kept as a ket and reduced on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub circuit: String,
    pub input: Ket,
    pub layout: Layout,
    pub state_t1: Ket,
    pub ownership_t1: Ownership,
    pub state_t2: Ket,
    pub ownership_t2: Ownership,
    pub final_state: Ket,
    pub rho_b1: DensityOp,
    pub rho_b_msg: DensityOp,
    pub output: DensityOp,
    pub output_register: String,
    /// Alice's registers after decryption other than the output.
    pub remainder: Vec<String>,
}

impl PipelineTrace {
    /// Alice's share at `t1`, registers in layout order.
    pub fn rho_a1(&self) -> Result<DensityOp> {
        DensityOp::reduced_from_ket(&self.layout, &self.state_t1, &self.ownership_t1.alice)
    }

    pub fn global_t1(&self) -> Result<DensityOp> {
        DensityOp::from_ket(self.layout.clone(), &self.state_t1)
    }

    pub fn global_t2(&self) -> Result<DensityOp> {
        DensityOp::from_ket(self.layout.clone(), &self.state_t2)
    }
}

/// State right after encryption, before any transfer.
pub fn encrypt(s: &QheScheme, psi: &Ket) -> Result<Ket> {
    let e = s.encryption();
    s.layout().apply_local(&s.initial_state(psi)?, &e.footprint, &e.matrix)
}

/// Run the scheme on plaintext `psi` with circuit `circuit`.
pub fn run_pipeline(s: &QheScheme, circuit: &str, psi: &Ket) -> Result<PipelineTrace> {
    let ev = s.evaluation(circuit)?;
    let layout = s.layout();
    let state_t1 = encrypt(s, psi)?;
    let state_t2 = layout.apply_local(&state_t1, &s.evaluation_footprint(ev), &ev.u_c)?;
    let d = s.decryption();
    let final_state = layout.apply_local(&state_t2, &d.footprint, &d.matrix)?;
    let t1 = s.ownership_t1().clone();
    let rho_b1 = if t1.bob.is_empty() {
        DensityOp::trusted(Layout::new([("none", 1)])?, CMatrix::identity(1))
    } else {
        DensityOp::reduced_from_ket(layout, &state_t1, &t1.bob)?
    };
    Ok(PipelineTrace {
        circuit: circuit.to_string(),
        input: psi.clone(),
        layout: layout.clone(),
        rho_b_msg: DensityOp::reduced_from_ket(layout, &state_t2, &s.message_registers())?,
        output: DensityOp::reduced_from_ket(layout, &final_state, &[s.output()])?,
        output_register: s.output().to_string(),
        remainder: s.alice_remainder(),
        rho_b1,
        state_t1,
        ownership_t1: t1,
        state_t2,
        ownership_t2: s.ownership_t2().clone(),
        final_state,
    })
}

/// Bob's share at `t1` for plaintext `psi`; identity-sized when Bob holds
/// nothing.
pub fn bob_share_t1(s: &QheScheme, psi: &Ket) -> Result<CMatrix> {
    let bob = &s.ownership_t1().bob;
    if bob.is_empty() {
        return Ok(CMatrix::identity(1));
    }
    s.layout().reduce_ket(&encrypt(s, psi)?, bob)
}

/// Unitary mapping `e_0` to `v`: a phase times a Householder reflection.
fn preparation(v: &[C64]) -> CMatrix {
    let n = v.len();
    let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { C64::new(1.0, 0.0) };
    let u: Vec<C64> = v.iter().map(|z| z / phase).collect();
    let mut w = u.iter().map(|z| -z).collect::<Vec<_>>();
    w[0] += C64::new(1.0, 0.0);
    let ww: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let h = if ww < 1e-30 {
        CMatrix::identity(n)
    } else {
        CMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            C64::new(id, 0.0) - w[i] * w[j].conj() * (2.0 / ww)
        })
    };
    h.scale(phase)
}

/// Cast encryption as a localisation problem. `A1` is the plaintext, `A2`
/// pads Alice's `t1` share to its full size, and `B` is Bob's `t1` share;
/// the fixed states are `|0>` and the preparation of key, resource and
/// ancillas is folded into `U`. Output indices are (Alice `t1`, Bob `t1`),
/// each in layout order.
pub fn t1_localisation_problem(s: &QheScheme) -> Result<LocalisationProblem> {
    let layout = s.layout();
    let t1 = s.ownership_t1();
    let d_in = s.plaintext_dim();
    let d_a = layout.dim_of_all(&t1.alice)?;
    let d_b = layout.dim_of_all(&t1.bob)?;
    if d_a % d_in != 0 {
        return Err(Error::BadParameters(format!(
            "Alice's t1 share (dimension {d_a}) does not factor through the plaintext (dimension {d_in})"
        )));
    }
    let rest = layout.complement(&[s.input()]);
    let d_rest = layout.dim_of_all(&rest)?;
    let rest_state = layout.permute_ket(&s.initial_state(&Ket::basis(d_in, 0))?, &[[s.input().to_string()].as_slice(), &rest].concat())?;
    let prep = preparation(&rest_state.amplitudes()[..d_rest]);

    let mut order = vec![s.input().to_string()];
    order.extend(rest.iter().cloned());
    let mut split = t1.alice.clone();
    split.extend(t1.bob.iter().cloned());
    let e = s.encryption();
    let n = d_in * d_rest;
    let mut columns = Vec::with_capacity(n);
    for col in 0..n {
        let (i, r) = (col / d_rest, col % d_rest);
        let mut v = vec![C64::new(0.0, 0.0); n];
        for (k, z) in prep.column(r).into_iter().enumerate() {
            v[i * d_rest + k] = z;
        }
        let global = layout.unpermute_ket(&Ket::from_vec_unchecked(v), &order)?;
        let encrypted = layout.apply_local(&global, &e.footprint, &e.matrix)?;
        columns.push(layout.permute_ket(&encrypted, &split)?.into_amplitudes());
    }
    LocalisationProblem::new(
        (d_in, d_a / d_in, d_b),
        CMatrix::from_columns(n, &columns),
        Ket::basis(d_a / d_in, 0),
        Ket::basis(d_b, 0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{is_unitary, random_ket};

    #[test]
    fn preparation_is_unitary_and_hits_target() {
        for seed in 0..5 {
            let v = random_ket(6, seed);
            let p = preparation(v.amplitudes());
            assert!(is_unitary(&p, 1e-12));
            let got = p.column(0);
            for (a, b) in got.iter().zip(v.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        let e0 = Ket::basis(3, 0);
        assert!(preparation(e0.amplitudes()).max_abs_diff(&CMatrix::identity(3)).unwrap() < 1e-15);
    }
}
