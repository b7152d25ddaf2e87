use std::cmp::Ordering;

use nalgebra::{SymmetricEigen, SVD};

use super::ket::{inner, norm, Ket};
use super::layout::Layout;
use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Input Hermiticity tolerance for [`eig_hermitian`].
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Eigenvalues closer than this are treated as one degenerate cluster when
/// canonicalizing eigenvectors.
const DEGENERACY_TOL: f64 = 1e-10;

/// Weight below which a direction is dropped from a column space.
pub const COLUMN_SPACE_TOL: f64 = 1e-14;

/// Schmidt coefficients at or below this are numerical zeros.
const SCHMIDT_ZERO: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `sum_k lambda_k v_k v_k^dag`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.vectors.rows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let v = self.vector(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * lam;
                }
            }
        }
        out
    }
}

/// Rotate `v` so that its first non-negligible entry is real and positive.
fn fix_phase(v: &mut [C64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-6 * scale).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

fn lex_rounded(a: &[C64], b: &[C64]) -> Ordering {
    let r = |x: f64| (x * 1e8).round() as i64;
    for (x, y) in a.iter().zip(b) {
        let o = r(y.re).cmp(&r(x.re)).then(r(y.im).cmp(&r(x.im)));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// descending. Within a degenerate cluster the eigenvectors are
/// phase-fixed and ordered lexicographically by their rounded entries.
pub fn eig_hermitian(h: &CMatrix) -> Result<HermitianEigen> {
    let n = h.require_square()?;
    let dev = h.hermiticity_deviation()?;
    if dev > HERMITIAN_INPUT_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let eig = SymmetricEigen::try_new(h.hermitian_part().to_nalgebra(), f64::EPSILON, 0)
        .ok_or(Error::NoConvergence)?;
    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            fix_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut cols: Vec<Vec<C64>> = pairs.into_iter().map(|p| p.1).collect();
    // Values stay sorted; only the vectors of a cluster are reordered.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] <= DEGENERACY_TOL {
            end += 1;
        }
        cols[start..end].sort_by(|a, b| lex_rounded(a, b));
        start = end;
    }

    Ok(HermitianEigen {
        values,
        vectors: CMatrix::from_columns(n, &cols),
    })
}

/// Orthonormalize vectors in place order with two passes of modified
/// Gram-Schmidt, dropping any whose residual norm falls below `drop_tol`.
pub fn orthonormalize(vectors: &[Vec<C64>], drop_tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        if let Some(u) = orthogonal_residual(&basis, v, drop_tol) {
            basis.push(u);
        }
    }
    basis
}

/// Project `v` off `basis` (twice) and normalize; `None` if what remains is
/// shorter than `drop_tol`.
pub(crate) fn orthogonal_residual(basis: &[Vec<C64>], v: &[C64], drop_tol: f64) -> Option<Vec<C64>> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &w);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    let n = norm(&w);
    (n >= drop_tol).then(|| w.into_iter().map(|z| z / n).collect())
}

/// Orthonormal basis (as columns) for the column space of `g`, keeping
/// directions whose squared singular value exceeds `tol`.
pub fn column_space(g: &CMatrix, tol: f64) -> Result<CMatrix> {
    let (rows, cols) = (g.rows(), g.cols());
    let vecs: Vec<Vec<C64>> = if rows <= cols {
        let e = eig_hermitian(&g.gram_outer())?;
        (0..rows).filter(|&k| e.values[k] > tol).map(|k| e.vector(k)).collect()
    } else {
        let e = eig_hermitian(&g.dagger().gram_outer())?;
        (0..cols)
            .filter(|&k| e.values[k] > tol)
            .map(|k| {
                let s = e.values[k].sqrt();
                g.apply(&e.vector(k)).map(|u| u.into_iter().map(|z| z / s).collect())
            })
            .collect::<Result<_>>()?
    };
    let basis = orthonormalize(&vecs, 1e-6);
    Ok(CMatrix::from_columns(rows, &basis))
}

pub fn unitarity_deviation(u: &CMatrix) -> Result<f64> {
    let n = u.require_square()?;
    (&u.dagger() * u).max_abs_diff(&CMatrix::identity(n))
}

/// True iff `u` is square and `max |U^dag U - I| <= tol`.
pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    unitarity_deviation(u).map(|d| d <= tol).unwrap_or(false)
}

/// Equality of unitaries modulo global phase: `|Tr(U^dag V)| >= d - tol`.
pub fn unitaries_equal_up_to_phase(u: &CMatrix, v: &CMatrix, tol: f64) -> Result<bool> {
    let d = u.require_square()?;
    if v.rows() != d || v.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.rows(),
        });
    }
    Ok(u.hs_inner(v)?.norm() >= d as f64 - tol)
}

fn half_trace_norm(h: &CMatrix) -> Result<f64> {
    let e = eig_hermitian(&h.hermitian_part())?;
    Ok(0.5 * e.values.iter().map(|x| x.abs()).sum::<f64>())
}

/// `1/2 ||a - b||_1`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let n = a.require_square()?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.rows(),
        });
    }
    half_trace_norm(&(a - b))
}

/// Trace distance between `A A^dag` and `B B^dag`, computed on the span of
/// the factors' columns. Exact for any factors; cheap when they are thin.
pub fn trace_distance_factored(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let mut cols: Vec<Vec<C64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    cols.extend((0..b.cols()).map(|j| b.column(j)));
    let joined = CMatrix::from_columns(a.rows(), &cols);
    let q = column_space(&joined, COLUMN_SPACE_TOL)?;
    let qd = q.dagger();
    let ca = (&qd * a).gram_outer();
    let cb = (&qd * b).gram_outer();
    half_trace_norm(&(&ca - &cb))
}

#[derive(Debug, Clone)]
pub struct Schmidt {
    /// Descending, strictly positive.
    pub coefficients: Vec<f64>,
    pub left: Vec<Ket>,
    pub right: Vec<Ket>,
    pub left_labels: Vec<String>,
    pub right_labels: Vec<String>,
}

impl Schmidt {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `sum_k c_k |l_k>|r_k>` ordered as `left_labels ++ right_labels`.
    pub fn recombine(&self) -> Vec<C64> {
        let dl = self.left.first().map_or(1, |k| k.dim());
        let dr = self.right.first().map_or(1, |k| k.dim());
        let mut out = vec![ZERO; dl * dr];
        for (k, &c) in self.coefficients.iter().enumerate() {
            let (l, r) = (self.left[k].amplitudes(), self.right[k].amplitudes());
            for i in 0..dl {
                for j in 0..dr {
                    out[i * dr + j] += l[i] * r[j] * c;
                }
            }
        }
        out
    }
}

/// Schmidt decomposition of `psi` across `left | rest`, computed from the
/// singular value decomposition of the coefficient matrix. Both sides are
/// taken in layout order.
pub fn schmidt<S: AsRef<str>>(psi: &Ket, layout: &Layout, left: &[S]) -> Result<Schmidt> {
    let left_labels = layout.in_layout_order(left)?;
    let right_labels = layout.complement(&left_labels);
    if left_labels.is_empty() || right_labels.is_empty() {
        return Err(Error::EmptyCut);
    }
    let m = layout.coefficient_matrix(psi, &left_labels, &right_labels)?;
    let svd = SVD::try_new(m.to_nalgebra(), true, true, f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let u = svd.u.as_ref().ok_or(Error::NoConvergence)?;
    let vt = svd.v_t.as_ref().ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let mut out = Schmidt {
        coefficients: Vec::new(),
        left: Vec::new(),
        right: Vec::new(),
        left_labels,
        right_labels,
    };
    for k in order {
        let c = svd.singular_values[k];
        if c <= SCHMIDT_ZERO {
            continue;
        }
        let l: Vec<C64> = u.column(k).iter().copied().collect();
        let r: Vec<C64> = vt.row(k).iter().copied().collect();
        out.coefficients.push(c);
        out.left.push(Ket::normalized(l)?);
        out.right.push(Ket::normalized(r)?);
    }
    Ok(out)
}
