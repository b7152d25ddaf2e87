//! Data localisation: if a unitary interaction leaves Bob's share independent
//! of Alice's input, Alice's share is `V(|psi><psi| (x) sigma)V^dag` for a
//! fixed unitary `V` and state `sigma`. This module tests the hypothesis and
//! builds `V` and `sigma` explicitly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qinfo::DensityOp;
use crate::tensor::orthogonal_residual;
use crate::tensor::{
    derive_seed, eig_hermitian, is_unitary, orthonormalize, random_ket, trace_distance, trace_distance_factored,
    unitarity_deviation, CMatrix, Ket, Layout, C64,
};

pub const A1: &str = "A1";
pub const A2: &str = "A2";
pub const B: &str = "B";

/// Eigenvalues of `rho_B` above this count towards the rank.
pub const RANK_THRESHOLD: f64 = 1e-10;
/// Completion candidates with a smaller residual are skipped.
pub const COMPLETION_DROP: f64 = 1e-8;
/// Gram residual beyond which localisation is refused.
pub const TAU_REFUSAL: f64 = 1e-6;
/// Leakage tolerance applied before localising.
pub const LEAKAGE_TOL: f64 = 1e-9;
/// Largest acceptable reconstruction residual.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
pub const RECONSTRUCTION_SAMPLES: u64 = 20;
const RECONSTRUCTION_SEED: u64 = 0x10ca_715e;

/// Basis kets first, then `(a^j + a^j')/sqrt2` and `(a^j + i a^j')/sqrt2`
/// for each pair `j < j'`. Their projectors span the Hermitian operators.
pub fn probe_states(d: usize) -> Vec<Ket> {
    assert!(d >= 1, "probe dimension must be positive");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<Ket> = (0..d).map(|j| Ket::basis(d, j)).collect();
    for j in 0..d {
        for jp in j + 1..d {
            for phase in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut v = vec![C64::new(0.0, 0.0); d];
                v[j] = C64::new(s, 0.0);
                v[jp] = phase * s;
                out.push(Ket::from_vec_unchecked(v));
            }
        }
    }
    out
}

/// `U` acting on `(psi (x) phi)_A (x) gamma_B` with `A = A1 (x) A2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct LocalisationProblem {
    layout: Layout,
    unitary: CMatrix,
    phi: Ket,
    gamma: Ket,
}

#[derive(Serialize, Deserialize)]
struct RawProblem {
    dims: [usize; 3],
    unitary: CMatrix,
    phi: Ket,
    gamma: Ket,
}

impl TryFrom<RawProblem> for LocalisationProblem {
    type Error = Error;

    fn try_from(raw: RawProblem) -> Result<Self> {
        let [a1, a2, b] = raw.dims;
        LocalisationProblem::new((a1, a2, b), raw.unitary, raw.phi, raw.gamma)
    }
}

impl From<LocalisationProblem> for RawProblem {
    fn from(p: LocalisationProblem) -> Self {
        let (a1, a2, b) = p.dims();
        RawProblem {
            dims: [a1, a2, b],
            unitary: p.unitary,
            phi: p.phi,
            gamma: p.gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageCheck {
    pub passed: bool,
    pub max_deviation: f64,
}

impl LocalisationProblem {
    pub fn new(dims: (usize, usize, usize), unitary: CMatrix, phi: Ket, gamma: Ket) -> Result<Self> {
        let (a1, a2, b) = dims;
        let layout = Layout::new([(A1, a1), (A2, a2), (B, b)])?;
        let n = unitary.require_square()?;
        if n != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: n,
            });
        }
        if !is_unitary(&unitary, 1e-10) {
            return Err(Error::NotUnitary {
                what: "U".into(),
                deviation: unitarity_deviation(&unitary)?,
            });
        }
        if phi.dim() != a2 {
            return Err(Error::DimensionMismatch { expected: a2, found: phi.dim() });
        }
        if gamma.dim() != b {
            return Err(Error::DimensionMismatch { expected: b, found: gamma.dim() });
        }
        Ok(Self { layout, unitary, phi, gamma })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        let d = |l| self.layout.dim_of(l).expect("fixed labels");
        (d(A1), d(A2), d(B))
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn phi(&self) -> &Ket {
        &self.phi
    }

    pub fn gamma(&self) -> &Ket {
        &self.gamma
    }

    /// `U (psi (x) phi (x) gamma)`.
    pub fn output(&self, psi: &Ket) -> Result<Ket> {
        let (a1, _, _) = self.dims();
        if psi.dim() != a1 {
            return Err(Error::DimensionMismatch { expected: a1, found: psi.dim() });
        }
        psi.kron(&self.phi).kron(&self.gamma).evolve(&self.unitary)
    }

    /// Bob's share `Tr_A` of the output.
    pub fn bob_state(&self, psi: &Ket) -> Result<CMatrix> {
        let out = self.output(psi)?;
        Ok(self.layout.coefficient_matrix(&out, &[B], &[A1, A2])?.gram_outer())
    }

    /// Alice's share `Tr_B` of the output, on `A1 (x) A2`.
    pub fn alice_state(&self, psi: &Ket) -> Result<DensityOp> {
        let out = self.output(psi)?;
        let m = self.layout.coefficient_matrix(&out, &[A1, A2], &[B])?;
        Ok(DensityOp::trusted(self.layout.sub_layout(&[A1, A2])?, m.gram_outer()))
    }

    /// `d_A x d_B` amplitude matrix of the output.
    fn output_factor(&self, psi: &Ket) -> Result<CMatrix> {
        let out = self.output(psi)?;
        self.layout.coefficient_matrix(&out, &[A1, A2], &[B])
    }
}

/// Evaluate Bob's share on every probe and compare against the first. The
/// share is linear in the input projector and the probe projectors span the
/// operator space, so agreement on probes certifies agreement everywhere.
pub fn check_zero_leakage(p: &LocalisationProblem, tol: f64) -> Result<LeakageCheck> {
    let (a1, _, _) = p.dims();
    let probes = probe_states(a1);
    let reference = p.bob_state(&probes[0])?;
    let mut worst: f64 = 0.0;
    for t in &probes[1..] {
        worst = worst.max(trace_distance(&p.bob_state(t)?, &reference)?);
    }
    Ok(LeakageCheck {
        passed: worst <= tol,
        max_deviation: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalisationResult {
    #[serde(rename = "V")]
    pub v: CMatrix,
    pub sigma: DensityOp,
    pub rank_r: usize,
    pub tau_orthonormality_residual: f64,
    pub reconstruction_residual: f64,
}

impl LocalisationResult {
    pub fn d_a1(&self) -> usize {
        self.v.rows() / self.sigma.dim()
    }

    pub fn d_a2(&self) -> usize {
        self.sigma.dim()
    }

    /// `V (|psi><psi| (x) sigma) V^dag`.
    pub fn predicted_alice_state(&self, psi: &Ket) -> Result<CMatrix> {
        Ok(self.factor(psi)?.gram_outer())
    }

    /// Columns `sqrt(p_k) V (psi (x) e_k)` for `k < r`.
    fn factor(&self, psi: &Ket) -> Result<CMatrix> {
        let d2 = self.d_a2();
        if psi.dim() != self.d_a1() {
            return Err(Error::DimensionMismatch {
                expected: self.d_a1(),
                found: psi.dim(),
            });
        }
        let sigma = self.sigma.matrix();
        let cols: Vec<Vec<C64>> = (0..self.rank_r)
            .map(|k| {
                let w = sigma[(k, k)].re.max(0.0).sqrt();
                let v = self.v.apply(psi.kron(&Ket::basis(d2, k)).amplitudes()).expect("dims checked");
                v.into_iter().map(|z| z * w).collect()
            })
            .collect();
        Ok(CMatrix::from_columns(self.v.rows(), &cols))
    }
}

/// Build `V` and `sigma` after confirming zero leakage at [`LEAKAGE_TOL`].
pub fn localise(p: &LocalisationProblem) -> Result<LocalisationResult> {
    let (a1, _, _) = p.dims();
    localise_with_probe_order(p, &(0..a1).collect::<Vec<_>>())
}

/// [`localise`] visiting the basis probes in `order`. The result acts the
/// same for every order; only rounding and the completion subspace differ.
pub fn localise_with_probe_order(p: &LocalisationProblem, order: &[usize]) -> Result<LocalisationResult> {
    let (a1, a2, b) = p.dims();
    let mut seen = vec![false; a1];
    if order.len() != a1 || order.iter().any(|&j| j >= a1 || std::mem::replace(&mut seen[j], true)) {
        return Err(Error::BadParameters(format!("probe order must permute 0..{a1}")));
    }
    let leak = check_zero_leakage(p, LEAKAGE_TOL)?;
    if !leak.passed {
        return Err(Error::Leakage {
            deviation: leak.max_deviation,
            tolerance: LEAKAGE_TOL,
        });
    }

    // (1) One fixed eigenbasis of the averaged Bob share.
    let factors: Vec<CMatrix> = (0..a1)
        .map(|j| p.output_factor(&Ket::basis(a1, j)))
        .collect::<Result<_>>()?;
    let mut rho_b = CMatrix::zeros(b, b);
    for &j in order {
        let m = &factors[j];
        rho_b = &rho_b + &m.transpose().gram_outer();
    }
    let rho_b = rho_b.scale_real(1.0 / a1 as f64).hermitian_part();
    let eig = eig_hermitian(&rho_b)?;
    let r = eig.values.iter().filter(|&&l| l > RANK_THRESHOLD).count();
    if r == 0 || r > a2 {
        return Err(Error::TauNotOrthonormal(f64::INFINITY));
    }
    let weights = &eig.values[..r];

    // (2) tau^{jk} = (I (x) <b^k|) Psi^j / sqrt(p_k), indexed j * r + k.
    let mut tau: Vec<Vec<C64>> = vec![Vec::new(); a1 * r];
    for &j in order {
        for k in 0..r {
            let bk: Vec<C64> = eig.vector(k).iter().map(|z| z.conj()).collect();
            let col = factors[j].apply(&bk)?;
            let s = 1.0 / weights[k].sqrt();
            tau[j * r + k] = col.into_iter().map(|z| z * s).collect();
        }
    }

    // (3) Gram residual.
    let mut residual: f64 = 0.0;
    for x in 0..tau.len() {
        for y in 0..tau.len() {
            let g: C64 = tau[x].iter().zip(&tau[y]).map(|(a, b)| a.conj() * b).sum();
            let want = if x == y { 1.0 } else { 0.0 };
            residual = residual.max((g - C64::new(want, 0.0)).norm());
        }
    }
    if residual > TAU_REFUSAL {
        return Err(Error::TauNotOrthonormal(residual));
    }

    // (4) Complete over the standard basis, then place tau^{jk} in column
    // j*a2 + k and the extras in the remaining columns in order.
    let da = a1 * a2;
    let visit: Vec<Vec<C64>> = order
        .iter()
        .flat_map(|&j| (0..r).map(move |k| j * r + k))
        .map(|i| tau[i].clone())
        .collect();
    let cleaned = orthonormalize(&visit, COMPLETION_DROP);
    if cleaned.len() != a1 * r {
        return Err(Error::TauNotOrthonormal(residual));
    }
    let mut basis = cleaned.clone();
    let mut extras = Vec::with_capacity(da - basis.len());
    for i in 0..da {
        if basis.len() == da {
            break;
        }
        let mut e = vec![C64::new(0.0, 0.0); da];
        e[i] = C64::new(1.0, 0.0);
        if let Some(q) = orthogonal_residual(&basis, &e, COMPLETION_DROP) {
            basis.push(q.clone());
            extras.push(q);
        }
    }
    let mut columns: Vec<Vec<C64>> = vec![Vec::new(); da];
    for (pos, &j) in order.iter().enumerate() {
        for k in 0..r {
            columns[j * a2 + k] = cleaned[pos * r + k].clone();
        }
    }
    let mut extras = extras.into_iter();
    for j in 0..a1 {
        for k in r..a2 {
            columns[j * a2 + k] = extras.next().expect("completion fills the space");
        }
    }
    let v = CMatrix::from_columns(da, &columns);
    let mut padded = vec![0.0; a2];
    padded[..r].copy_from_slice(weights);
    let sigma = DensityOp::trusted(Layout::new([(A2, a2)])?, CMatrix::from_real_diag(&padded));

    let mut result = LocalisationResult {
        v,
        sigma,
        rank_r: r,
        tau_orthonormality_residual: residual,
        reconstruction_residual: 0.0,
    };

    // (5) Compare against the true Alice share on seeded Haar inputs.
    let mut worst: f64 = 0.0;
    for i in 0..RECONSTRUCTION_SAMPLES {
        let psi = random_ket(a1, derive_seed(RECONSTRUCTION_SEED, i));
        worst = worst.max(trace_distance_factored(&p.output_factor(&psi)?, &result.factor(&psi)?)?);
    }
    result.reconstruction_residual = worst;
    if worst > RECONSTRUCTION_TOL {
        return Err(Error::Reconstruction(worst));
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub plaintext: Ket,
    /// Purity of the reduced state the plaintext was read from.
    pub purity: f64,
}

/// Undo `V`, discard the `sigma` factor, and return the dominant eigenvector.
pub fn extract_plaintext(result: &LocalisationResult, rho_a: &DensityOp) -> Result<Extraction> {
    let (d1, d2) = (result.d_a1(), result.d_a2());
    if rho_a.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            found: rho_a.dim(),
        });
    }
    let undone = &(&result.v.dagger() * rho_a.matrix()) * &result.v;
    let split = Layout::new([(A1, d1), (A2, d2)])?;
    let reduced = split.partial_trace(&undone.hermitian_part(), &[A1])?;
    let purity: f64 = reduced.entries().iter().map(|z| z.norm_sqr()).sum();
    if purity < 0.99 {
        return Err(Error::ExtractionFailed(purity));
    }
    let e = eig_hermitian(&reduced)?;
    Ok(Extraction {
        plaintext: Ket::normalized(e.vector(0))?,
        purity,
    })
}
