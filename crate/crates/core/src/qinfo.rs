//! Density operators and the information functionals the checkers need.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::tensor::{
    column_space, eig_hermitian, trace_distance, CMatrix, Ket, Layout, C64, COLUMN_SPACE_TOL,
};

/// Eigenvalues down to this are accepted as PSD drift.
const NEGATIVE_DRIFT: f64 = 1e-10;

/// A density operator over a register layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensity", into = "RawDensity")]
pub struct DensityOp {
    layout: Layout,
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawDensity {
    #[serde(flatten)]
    layout: Layout,
    #[serde(flatten)]
    matrix: CMatrix,
}

impl TryFrom<RawDensity> for DensityOp {
    type Error = Error;

    fn try_from(raw: RawDensity) -> Result<Self> {
        DensityOp::new(raw.layout, raw.matrix)
    }
}

impl From<DensityOp> for RawDensity {
    fn from(d: DensityOp) -> Self {
        RawDensity {
            layout: d.layout,
            matrix: d.matrix,
        }
    }
}

impl DensityOp {
    /// Validate Hermiticity, unit trace and positivity.
    pub fn new(layout: Layout, matrix: CMatrix) -> Result<Self> {
        let n = matrix.require_square()?;
        if n != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: n,
            });
        }
        let tol = Tolerances::default();
        let herm = matrix.hermiticity_deviation()?;
        if herm > tol.hermiticity {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let min = eig_hermitian(&matrix)?.values.last().copied().unwrap_or(0.0);
        if min < -NEGATIVE_DRIFT {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { layout, matrix })
    }

    /// Pure state `|psi><psi|`.
    pub fn from_ket(layout: Layout, psi: &Ket) -> Result<Self> {
        if psi.dim() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: psi.dim(),
            });
        }
        Ok(Self {
            layout,
            matrix: psi.projector(),
        })
    }

    /// Reduced state of a global pure ket on `keep` (layout order).
    pub fn reduced_from_ket<S: AsRef<str>>(layout: &Layout, psi: &Ket, keep: &[S]) -> Result<Self> {
        let keep = layout.in_layout_order(keep)?;
        Ok(Self {
            matrix: layout.reduce_ket(psi, &keep)?,
            layout: layout.sub_layout(&keep)?,
        })
    }

    /// Skip validation for matrices that are density operators by
    /// construction (reductions, conjugations, tensor products).
    pub(crate) fn trusted(layout: Layout, matrix: CMatrix) -> Self {
        debug_assert_eq!(layout.total_dim(), matrix.rows());
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn reduce<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOp> {
        let keep = self.layout.in_layout_order(keep)?;
        Ok(Self {
            matrix: self.layout.partial_trace(&self.matrix, &keep)?,
            layout: self.layout.sub_layout(&keep)?,
        })
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eig_hermitian(&self.matrix)?.values)
    }

    pub fn distance(&self, other: &DensityOp) -> Result<f64> {
        trace_distance(&self.matrix, &other.matrix)
    }
}

/// Von Neumann entropy in bits; eigenvalues at or below the rank threshold
/// count as zero.
pub fn von_neumann_entropy(rho: &DensityOp) -> Result<f64> {
    let rank_tol = Tolerances::default().rank;
    let s: f64 = rho
        .eigenvalues()?
        .into_iter()
        .filter(|&l| l > rank_tol)
        .map(|l| -l * l.log2())
        .sum();
    Ok(s.clamp(0.0, (rho.dim() as f64).log2()))
}

fn split_cut<S: AsRef<str>>(layout: &Layout, left: &[S]) -> Result<(Vec<String>, Vec<String>)> {
    let left = layout.in_layout_order(left)?;
    let right = layout.complement(&left);
    if left.is_empty() || right.is_empty() {
        return Err(Error::EmptyCut);
    }
    Ok((left, right))
}

/// `S(A) + S(B) - S(AB)` across the cut `left | rest`.
pub fn mutual_information<S: AsRef<str>>(rho: &DensityOp, left: &[S]) -> Result<f64> {
    let (left, right) = split_cut(rho.layout(), left)?;
    let sa = von_neumann_entropy(&rho.reduce(&left)?)?;
    let sb = von_neumann_entropy(&rho.reduce(&right)?)?;
    let sab = von_neumann_entropy(rho)?;
    Ok(sa + sb - sab)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportProjector {
    pub layout: Layout,
    pub projector: CMatrix,
    pub rank: usize,
}

/// Projector onto the eigenvectors of `rho` with eigenvalue above `rank_tol`.
pub fn support(rho: &DensityOp, rank_tol: f64) -> Result<SupportProjector> {
    let e = eig_hermitian(rho.matrix())?;
    let n = rho.dim();
    let mut p = CMatrix::zeros(n, n);
    let mut rank = 0;
    for (k, &lam) in e.values.iter().enumerate() {
        if lam <= rank_tol {
            continue;
        }
        rank += 1;
        let v = e.vector(k);
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    Ok(SupportProjector {
        layout: rho.layout().clone(),
        projector: p,
        rank,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportOverlap {
    pub orthogonal: bool,
    /// `Tr(P_a P_b)`.
    pub overlap: f64,
}

/// Orthogonality of supports, measured by `Tr(P_a P_b)`.
pub fn orthogonal_support(a: &DensityOp, b: &DensityOp, tol: f64) -> Result<SupportOverlap> {
    if a.layout() != b.layout() {
        return Err(Error::InvalidLayout("operands have different layouts".into()));
    }
    let rank_tol = Tolerances::default().rank;
    let pa = support(a, rank_tol)?;
    let pb = support(b, rank_tol)?;
    let overlap = pa.projector.hs_inner(&pb.projector)?.re;
    Ok(SupportOverlap {
        orthogonal: overlap <= tol,
        overlap,
    })
}

/// Trace distance between `rho` and the product of its marginals, where
/// everything is first compressed onto `supp(rho_x) (x) supp(rho_y)`. The
/// joint state lives inside that subspace, so the compression is exact.
///
/// `qx`, `qy` hold orthonormal support bases as columns; `joint` is already
/// compressed; `mx`, `my` are the compressed marginals.
fn compressed_product_distance(joint: &CMatrix, mx: &CMatrix, my: &CMatrix) -> Result<f64> {
    trace_distance(&joint.hermitian_part(), &mx.kron(my).hermitian_part())
}

fn support_basis(rho: &CMatrix) -> Result<CMatrix> {
    let e = eig_hermitian(&rho.hermitian_part())?;
    let cols: Vec<Vec<C64>> = (0..e.values.len())
        .filter(|&k| e.values[k] > COLUMN_SPACE_TOL)
        .map(|k| e.vector(k))
        .collect();
    Ok(CMatrix::from_columns(rho.rows(), &cols))
}

/// Trace distance from `rho` to `Tr_B rho (x) Tr_A rho` for the cut
/// `left | rest`.
pub fn product_deviation<S: AsRef<str>>(rho: &DensityOp, left: &[S]) -> Result<f64> {
    let layout = rho.layout();
    let (left, right) = split_cut(layout, left)?;
    let rx = layout.partial_trace(rho.matrix(), &left)?;
    let ry = layout.partial_trace(rho.matrix(), &right)?;
    let (qx, qy) = (support_basis(&rx)?, support_basis(&ry)?);
    let mut order = left.clone();
    order.extend(right.iter().cloned());
    let offs = layout.offsets(&order)?;
    let m = rho.matrix();
    let permuted = CMatrix::from_fn(offs.len(), offs.len(), |i, j| m[(offs[i], offs[j])]);
    let q = qx.kron(&qy);
    let joint = &(&q.dagger() * &permuted) * &q;
    let mx = &(&qx.dagger() * &rx) * &qx;
    let my = &(&qy.dagger() * &ry) * &qy;
    compressed_product_distance(&joint, &mx, &my)
}

/// True iff `rho` is within `tol` (trace distance) of the product of its
/// marginals across `left | rest`.
pub fn is_product<S: AsRef<str>>(rho: &DensityOp, left: &[S], tol: f64) -> Result<bool> {
    Ok(product_deviation(rho, left)? <= tol)
}

/// Product deviation of the reduced state of a global pure ket on `x ∪ y`,
/// across the cut `x | y`; registers outside both are traced out. Works
/// from the amplitude matrices directly, so no operator on the full space
/// is formed.
pub fn product_deviation_pure<S: AsRef<str>, T: AsRef<str>>(
    layout: &Layout,
    psi: &Ket,
    x: &[S],
    y: &[T],
) -> Result<f64> {
    let x = layout.in_layout_order(x)?;
    let y = layout.in_layout_order(y)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyCut);
    }
    let mut xy = x.clone();
    xy.extend(y.iter().cloned());
    let z = layout.complement(&xy);
    let mut yz = y.clone();
    yz.extend(z.iter().cloned());
    let mut xz = x.clone();
    xz.extend(z.iter().cloned());

    let f = layout.coefficient_matrix(psi, &xy, &z)?;
    let gx = layout.coefficient_matrix(psi, &x, &yz)?;
    let gy = layout.coefficient_matrix(psi, &y, &xz)?;
    let qx = column_space(&gx, COLUMN_SPACE_TOL)?;
    let qy = column_space(&gy, COLUMN_SPACE_TOL)?;
    let q = qx.kron(&qy);
    let joint = (&q.dagger() * &f).gram_outer();
    let mx = (&qx.dagger() * &gx).gram_outer();
    let my = (&qy.dagger() * &gy).gram_outer();
    compressed_product_distance(&joint, &mx, &my)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{random_ket, random_unitary};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn qubit() -> Layout {
        Layout::new([("q", 2)]).unwrap()
    }

    fn two_qubits() -> Layout {
        Layout::new([("A", 2), ("B", 2)]).unwrap()
    }

    fn bell() -> DensityOp {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let k = Ket::new(vec![c(s), c(0.0), c(0.0), c(s)]).unwrap();
        DensityOp::from_ket(two_qubits(), &k).unwrap()
    }

    fn classical() -> DensityOp {
        DensityOp::new(two_qubits(), CMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5])).unwrap()
    }

    fn diag(p: &[f64]) -> DensityOp {
        let l = Layout::new([("q", p.len())]).unwrap();
        DensityOp::new(l, CMatrix::from_real_diag(p)).unwrap()
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let l = qubit();
        assert!(DensityOp::new(l.clone(), CMatrix::from_real_diag(&[0.6, 0.6])).is_err());
        assert!(DensityOp::new(l.clone(), CMatrix::from_real_diag(&[1.5, -0.5])).is_err());
        assert!(DensityOp::new(l.clone(), CMatrix::from_real_rows(&[&[0.5, 0.3], &[0.0, 0.5]])).is_err());
        assert!(DensityOp::new(l, CMatrix::identity(3).scale_real(1.0 / 3.0)).is_err());
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityOp::from_ket(qubit(), &Ket::uniform(2)).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        assert!((von_neumann_entropy(&diag(&[0.5, 0.5])).unwrap() - 1.0).abs() < 1e-12);
        let oracle = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((von_neumann_entropy(&diag(&[0.75, 0.25])).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 0.811_278).abs() < 1e-6);
    }

    #[test]
    fn mutual_information_examples() {
        let prod = DensityOp::new(
            two_qubits(),
            CMatrix::from_real_diag(&[0.7, 0.3]).kron(&CMatrix::from_real_diag(&[0.4, 0.6])),
        )
        .unwrap();
        assert!(mutual_information(&prod, &["A"]).unwrap().abs() < 1e-9);
        // Bell: S(A) = S(B) = 1, S(AB) = 0.
        assert!((mutual_information(&bell(), &["A"]).unwrap() - 2.0).abs() < 1e-9);
        // Classically correlated: 1 + 1 - 1.
        assert!((mutual_information(&classical(), &["A"]).unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(mutual_information(&bell(), &["A", "B"]), Err(Error::EmptyCut)));
    }

    #[test]
    fn support_examples() {
        let p0 = DensityOp::from_ket(qubit(), &Ket::basis(2, 0)).unwrap();
        let s = support(&p0, 1e-10).unwrap();
        assert_eq!(s.rank, 1);
        assert!(s.projector.max_abs_diff(p0.matrix()).unwrap() < 1e-12);

        let s = support(&diag(&[0.5, 0.5]), 1e-10).unwrap();
        assert_eq!(s.rank, 2);
        assert!(s.projector.max_abs_diff(&CMatrix::identity(2)).unwrap() < 1e-12);

        let mix = &Ket::basis(2, 0).projector().scale_real(0.5) + &Ket::uniform(2).projector().scale_real(0.5);
        // Closed-form 2x2 spectrum: (t +- sqrt(t^2 - 4 det)) / 2.
        let (t, det) = (mix.trace().re, (mix[(0, 0)] * mix[(1, 1)] - mix[(0, 1)] * mix[(1, 0)]).re);
        let low = (t - (t * t - 4.0 * det).sqrt()) / 2.0;
        assert!(low > 0.1);
        let rho = DensityOp::new(qubit(), mix).unwrap();
        assert_eq!(support(&rho, 1e-10).unwrap().rank, 2);
    }

    #[test]
    fn orthogonal_support_examples() {
        let p0 = DensityOp::from_ket(qubit(), &Ket::basis(2, 0)).unwrap();
        let p1 = DensityOp::from_ket(qubit(), &Ket::basis(2, 1)).unwrap();
        let plus = DensityOp::from_ket(qubit(), &Ket::uniform(2)).unwrap();
        let r = orthogonal_support(&p0, &p1, 1e-9).unwrap();
        assert!(r.orthogonal && r.overlap.abs() < 1e-12);
        let full = diag(&[0.3, 0.7]);
        let r = orthogonal_support(&full, &full, 1e-9).unwrap();
        assert!(!r.orthogonal && (r.overlap - 2.0).abs() < 1e-12);
        // Tr(|0><0| |+><+|) = |<0|+>|^2.
        let r = orthogonal_support(&p0, &plus, 1e-9).unwrap();
        assert!(!r.orthogonal && (r.overlap - 0.5).abs() < 1e-12);
        assert!(orthogonal_support(&p0, &bell(), 1e-9).is_err());
    }

    #[test]
    fn product_examples() {
        let prod = DensityOp::new(
            two_qubits(),
            CMatrix::from_real_diag(&[0.7, 0.3]).kron(&Ket::uniform(2).projector()),
        )
        .unwrap();
        assert!(is_product(&prod, &["A"], 1e-9).unwrap());
        assert!(!is_product(&bell(), &["A"], 1e-9).unwrap());
        // diag(.5,0,0,.5) - I/4 has eigenvalues +-1/4, so the distance is 1/2.
        let d = product_deviation(&classical(), &["A"]).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!(!is_product(&classical(), &["B"], 1e-9).unwrap());
    }

    #[test]
    fn compressed_product_matches_dense_computation() {
        let l = Layout::new([("X", 2), ("Y", 3), ("Z", 2)]).unwrap();
        for seed in 0..8 {
            let psi = random_ket(12, seed);
            let rho = DensityOp::reduced_from_ket(&l, &psi, &["X", "Y"]).unwrap();
            let rx = rho.reduce(&["X"]).unwrap();
            let ry = rho.reduce(&["Y"]).unwrap();
            let dense = trace_distance(rho.matrix(), &rx.matrix().kron(ry.matrix())).unwrap();
            let via_op = product_deviation(&rho, &["X"]).unwrap();
            let via_ket = product_deviation_pure(&l, &psi, &["X"], &["Y"]).unwrap();
            assert!((dense - via_op).abs() < 1e-12, "{dense} {via_op}");
            assert!((dense - via_ket).abs() < 1e-12, "{dense} {via_ket}");
        }
    }

    #[test]
    fn json_has_layout_header() {
        let rho = diag(&[0.25, 0.75]);
        let s = serde_json::to_string(&rho).unwrap();
        assert!(s.starts_with(r#"{"registers":[["q",2]],"rows":2"#), "{s}");
        let back: DensityOp = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rho);
        let bad = s.replace("0.75", "0.8");
        assert!(serde_json::from_str::<DensityOp>(&bad).is_err());
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let l = Layout::new([("q", 4)]).unwrap();
        for seed in 0..20 {
            let w = random_unitary(4, 500 + seed);
            let rho = (&(&w * &CMatrix::from_real_diag(&[0.4, 0.3, 0.2, 0.1])) * &w.dagger()).hermitian_part();
            let u = random_unitary(4, seed);
            let rot = (&(&u * &rho) * &u.dagger()).hermitian_part();
            let s1 = von_neumann_entropy(&DensityOp::new(l.clone(), rho).unwrap()).unwrap();
            let s2 = von_neumann_entropy(&DensityOp::new(l.clone(), rot).unwrap()).unwrap();
            assert!((s1 - s2).abs() <= 1e-9);
        }
    }

    #[test]
    fn pure_state_information_is_twice_marginal_entropy() {
        let l = Layout::new([("A", 2), ("B", 3)]).unwrap();
        for seed in 0..20 {
            let rho = DensityOp::from_ket(l.clone(), &random_ket(6, seed)).unwrap();
            let mi = mutual_information(&rho, &["A"]).unwrap();
            let sa = von_neumann_entropy(&rho.reduce(&["A"]).unwrap()).unwrap();
            assert!((mi - 2.0 * sa).abs() <= 1e-9);
        }
    }

    #[test]
    fn support_fixes_state_and_overlap_is_symmetric() {
        let l = Layout::new([("q", 3)]).unwrap();
        for seed in 0..20 {
            let mk = |s: u64, w: &[f64]| {
                let u = random_unitary(3, s);
                DensityOp::new(l.clone(), (&(&u * &CMatrix::from_real_diag(w)) * &u.dagger()).hermitian_part())
                    .unwrap()
            };
            let a = mk(seed, &[0.6, 0.4, 0.0]);
            let b = mk(seed + 1000, &[1.0, 0.0, 0.0]);
            let p = support(&a, 1e-10).unwrap();
            assert!((&p.projector * a.matrix()).max_abs_diff(a.matrix()).unwrap() <= 1e-9);
            let ab = orthogonal_support(&a, &b, 1e-9).unwrap();
            let ba = orthogonal_support(&b, &a, 1e-9).unwrap();
            assert!((ab.overlap - ba.overlap).abs() <= 1e-12);
            assert!(ab.overlap >= -1e-9);
        }
    }
}
