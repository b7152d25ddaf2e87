//! Register layouts and the index arithmetic built on them.
//!
//! The global index is mixed-radix with the first register as the most
//! significant digit. Every operation that takes a list of labels reads the
//! sub-index in the order the labels are given.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::ket::Ket;
use super::matrix::{CMatrix, C64, ZERO};
use crate::config::MAX_TOTAL_DIM;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub label: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLayout", into = "RawLayout")]
pub struct Layout {
    registers: Vec<Register>,
}

#[derive(Serialize, Deserialize)]
struct RawLayout {
    registers: Vec<(String, usize)>,
}

impl TryFrom<RawLayout> for Layout {
    type Error = Error;

    fn try_from(raw: RawLayout) -> Result<Self> {
        Layout::new(raw.registers)
    }
}

impl From<Layout> for RawLayout {
    fn from(l: Layout) -> Self {
        RawLayout {
            registers: l.registers.into_iter().map(|r| (r.label, r.dim)).collect(),
        }
    }
}

impl Layout {
    pub fn new<S: Into<String>>(registers: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let registers: Vec<Register> = registers
            .into_iter()
            .map(|(label, dim)| Register {
                label: label.into(),
                dim,
            })
            .collect();
        let mut seen = HashSet::new();
        let mut total: usize = 1;
        for r in &registers {
            if r.label.is_empty() {
                return Err(Error::InvalidLayout("empty register label".into()));
            }
            if !seen.insert(r.label.as_str()) {
                return Err(Error::InvalidLayout(format!("duplicate label `{}`", r.label)));
            }
            if r.dim == 0 {
                return Err(Error::InvalidLayout(format!("register `{}` has dimension 0", r.label)));
            }
            total = total
                .checked_mul(r.dim)
                .filter(|&t| t <= MAX_TOTAL_DIM)
                .ok_or_else(|| {
                    Error::InvalidLayout(format!("total dimension exceeds {MAX_TOTAL_DIM}"))
                })?;
        }
        Ok(Self { registers })
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn labels(&self) -> Vec<String> {
        self.registers.iter().map(|r| r.label.clone()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.registers.iter().any(|r| r.label == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.label == label)
            .ok_or_else(|| Error::UnknownRegister(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.registers[self.position(label)?].dim)
    }

    /// Product of the dimensions of the named registers.
    pub fn dim_of_all<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        labels.iter().map(|l| self.dim_of(l.as_ref())).product()
    }

    /// Sub-layout with the registers in the given order.
    pub fn sub_layout<S: AsRef<str>>(&self, labels: &[S]) -> Result<Layout> {
        let regs = labels
            .iter()
            .map(|l| self.position(l.as_ref()).map(|p| self.registers[p].clone()))
            .collect::<Result<Vec<_>>>()?;
        Layout::new(regs.into_iter().map(|r| (r.label, r.dim)))
    }

    /// The named labels sorted into layout order (duplicates rejected).
    pub fn in_layout_order<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<String>> {
        let mut pos = labels
            .iter()
            .map(|l| self.position(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        pos.sort_unstable();
        if pos.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidLayout("label listed twice".into()));
        }
        Ok(pos.into_iter().map(|p| self.registers[p].label.clone()).collect())
    }

    /// Labels not in `labels`, in layout order.
    pub fn complement<S: AsRef<str>>(&self, labels: &[S]) -> Vec<String> {
        self.registers
            .iter()
            .filter(|r| !labels.iter().any(|l| l.as_ref() == r.label))
            .map(|r| r.label.clone())
            .collect()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.registers.len()];
        for i in (0..self.registers.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.registers[i + 1].dim;
        }
        strides
    }

    /// Global offset of every sub-index over `labels` (read in the given order).
    pub fn offsets<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for l in labels {
            let p = self.position(l.as_ref())?;
            let (dim, stride) = (self.registers[p].dim, strides[p]);
            out = out
                .iter()
                .flat_map(|&base| (0..dim).map(move |d| base + d * stride))
                .collect();
        }
        Ok(out)
    }

    /// Check that `left` and `right` are disjoint and together cover the layout.
    fn check_partition<S: AsRef<str>, T: AsRef<str>>(&self, left: &[S], right: &[T]) -> Result<()> {
        let mut seen = HashSet::new();
        for l in left.iter().map(|s| s.as_ref()).chain(right.iter().map(|s| s.as_ref())) {
            self.position(l)?;
            if !seen.insert(l.to_string()) {
                return Err(Error::InvalidLayout(format!("label `{l}` used twice")));
            }
        }
        if seen.len() != self.registers.len() {
            return Err(Error::InvalidLayout("labels do not cover the layout".into()));
        }
        Ok(())
    }

    fn check_ket(&self, ket: &Ket) -> Result<()> {
        if ket.dim() != self.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                found: ket.dim(),
            });
        }
        Ok(())
    }

    /// Reorder a ket so that its registers appear in `order`.
    pub fn permute_ket<S: AsRef<str>>(&self, ket: &Ket, order: &[S]) -> Result<Ket> {
        self.check_ket(ket)?;
        self.check_partition(order, &[] as &[&str])?;
        let offs = self.offsets(order)?;
        let a = ket.amplitudes();
        Ok(Ket::from_vec_unchecked(offs.iter().map(|&o| a[o]).collect()))
    }

    /// Inverse of [`Layout::permute_ket`]: `ket` is ordered by `order`, the
    /// result is in layout order.
    pub fn unpermute_ket<S: AsRef<str>>(&self, ket: &Ket, order: &[S]) -> Result<Ket> {
        self.check_ket(ket)?;
        self.check_partition(order, &[] as &[&str])?;
        let offs = self.offsets(order)?;
        let mut out = vec![ZERO; ket.dim()];
        for (i, &o) in offs.iter().enumerate() {
            out[o] = ket.amplitudes()[i];
        }
        Ok(Ket::from_vec_unchecked(out))
    }

    /// Reshape a ket into the `d_left x d_right` coefficient matrix of the
    /// bipartition `left | right`.
    pub fn coefficient_matrix<S: AsRef<str>, T: AsRef<str>>(
        &self,
        ket: &Ket,
        left: &[S],
        right: &[T],
    ) -> Result<CMatrix> {
        self.check_ket(ket)?;
        self.check_partition(left, right)?;
        let lo = self.offsets(left)?;
        let ro = self.offsets(right)?;
        let a = ket.amplitudes();
        Ok(CMatrix::from_fn(lo.len(), ro.len(), |i, j| a[lo[i] + ro[j]]))
    }

    /// Reduced density matrix of a pure state on `keep` (in layout order).
    pub fn reduce_ket<S: AsRef<str>>(&self, ket: &Ket, keep: &[S]) -> Result<CMatrix> {
        let keep = self.in_layout_order(keep)?;
        let rest = self.complement(&keep);
        Ok(self.coefficient_matrix(ket, &keep, &rest)?.gram_outer())
    }

    fn check_operator(&self, rho: &CMatrix) -> Result<()> {
        let n = rho.require_square()?;
        if n != self.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                found: n,
            });
        }
        Ok(())
    }

    /// Partial trace keeping `keep`; the result is ordered as the layout.
    pub fn partial_trace<S: AsRef<str>>(&self, rho: &CMatrix, keep: &[S]) -> Result<CMatrix> {
        self.check_operator(rho)?;
        let keep = self.in_layout_order(keep)?;
        let traced = self.complement(&keep);
        let ko = self.offsets(&keep)?;
        let to = self.offsets(&traced)?;
        let n = ko.len();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for &t in &to {
                    acc += rho[(ko[i] + t, ko[j] + t)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// Apply `op` to the registers in `footprint` (read in that order),
    /// acting as identity elsewhere.
    pub fn apply_local<S: AsRef<str>>(&self, ket: &Ket, footprint: &[S], op: &CMatrix) -> Result<Ket> {
        self.check_ket(ket)?;
        let fo = self.offsets(footprint)?;
        let d = op.require_square()?;
        if d != fo.len() {
            return Err(Error::DimensionMismatch {
                expected: fo.len(),
                found: d,
            });
        }
        let uniq: HashSet<&str> = footprint.iter().map(|s| s.as_ref()).collect();
        if uniq.len() != footprint.len() {
            return Err(Error::InvalidLayout("footprint lists a register twice".into()));
        }
        let rest = self.complement(footprint);
        let bases = self.offsets(&rest)?;
        let a = ket.amplitudes();
        let mut out = vec![ZERO; a.len()];
        let mut local = vec![ZERO; d];
        for &b in &bases {
            for (k, &o) in fo.iter().enumerate() {
                local[k] = a[b + o];
            }
            for (i, &o) in fo.iter().enumerate() {
                out[b + o] = op.row(i).iter().zip(&local).map(|(x, y)| x * y).sum();
            }
        }
        Ok(Ket::from_vec_unchecked(out))
    }

    /// Full-space matrix of a local operator.
    pub fn embed<S: AsRef<str>>(&self, op: &CMatrix, footprint: &[S]) -> Result<CMatrix> {
        let fo = self.offsets(footprint)?;
        let d = op.require_square()?;
        if d != fo.len() {
            return Err(Error::DimensionMismatch {
                expected: fo.len(),
                found: d,
            });
        }
        let rest = self.complement(footprint);
        let bases = self.offsets(&rest)?;
        let n = self.total_dim();
        let mut out = CMatrix::zeros(n, n);
        for &b in &bases {
            for (i, &oi) in fo.iter().enumerate() {
                for (j, &oj) in fo.iter().enumerate() {
                    out[(b + oi, b + oj)] = op[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// Tensor product of kets on disjoint register groups, returned in layout
    /// order. Registers not covered by any group start in `|0>`.
    pub fn assemble(&self, parts: &[(Vec<String>, &Ket)]) -> Result<Ket> {
        let mut covered: Vec<String> = Vec::new();
        for (labels, ket) in parts {
            let d = self.dim_of_all(labels)?;
            if d != ket.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: ket.dim(),
                });
            }
            covered.extend(labels.iter().cloned());
        }
        let rest = self.complement(&covered);
        let mut order = covered.clone();
        order.extend(rest.iter().cloned());
        self.check_partition(&order, &[] as &[&str])?;
        let mut amps = vec![C64::new(1.0, 0.0)];
        for (_, ket) in parts {
            amps = Ket::from_vec_unchecked(amps).kron(ket).into_amplitudes();
        }
        let rest_dim = self.dim_of_all(&rest)?;
        amps = Ket::from_vec_unchecked(amps)
            .kron(&Ket::basis(rest_dim, 0))
            .into_amplitudes();
        self.unpermute_ket(&Ket::from_vec_unchecked(amps), &order)
    }
}

/// Partial trace of `rho` over everything outside `keep`.
pub fn partial_trace<S: AsRef<str>>(rho: &CMatrix, layout: &Layout, keep: &[S]) -> Result<CMatrix> {
    layout.partial_trace(rho, keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::matrix::gates;

    fn bell() -> Ket {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ket::new(vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap()
    }

    fn two_qubits() -> Layout {
        Layout::new([("A", 2), ("B", 2)]).unwrap()
    }

    #[test]
    fn rejects_duplicates_and_oversize() {
        assert!(Layout::new([("A", 2), ("A", 2)]).is_err());
        assert!(Layout::new([("A", 0)]).is_err());
        assert!(Layout::new([("A", 1 << 7), ("B", 1 << 8)]).is_err());
        assert!(Layout::new([("A", 1 << 7), ("B", 1 << 7)]).is_ok());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let l = two_qubits();
        let rho = bell().projector();
        let red = partial_trace(&rho, &l, &["A"]).unwrap();
        let half = CMatrix::from_real_diag(&[0.5, 0.5]);
        assert!(red.max_abs_diff(&half).unwrap() < 1e-15);
        assert!(l.reduce_ket(&bell(), &["B"]).unwrap().max_abs_diff(&half).unwrap() < 1e-15);
    }

    #[test]
    fn product_marginal_and_full_trace() {
        let l = Layout::new([("A", 2), ("B", 3)]).unwrap();
        let ra = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(0.7, 0.0),
            (1, 1) => C64::new(0.3, 0.0),
            (0, 1) => C64::new(0.1, 0.2),
            _ => C64::new(0.1, -0.2),
        });
        let rb = CMatrix::from_real_diag(&[0.5, 0.25, 0.25]);
        let rho = ra.kron(&rb);
        assert!(l.partial_trace(&rho, &["A"]).unwrap().max_abs_diff(&ra).unwrap() < 1e-15);
        assert!(l.partial_trace(&rho, &["B"]).unwrap().max_abs_diff(&rb).unwrap() < 1e-15);
        let scalar = l.partial_trace(&rho, &[] as &[&str]).unwrap();
        assert_eq!((scalar.rows(), scalar.cols()), (1, 1));
        assert!((scalar[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unknown_label_rejected() {
        let l = two_qubits();
        assert!(matches!(
            l.partial_trace(&CMatrix::identity(4), &["C"]),
            Err(Error::UnknownRegister(_))
        ));
    }

    #[test]
    fn apply_local_matches_embedded_kron() {
        let l = Layout::new([("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let psi = Ket::normalized((0..12).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect()).unwrap();
        // CNOT with C as control and A as target, footprint order [C, A].
        let out = l.apply_local(&psi, &["C", "A"], &gates::cnot()).unwrap();
        let full = l.embed(&gates::cnot(), &["C", "A"]).unwrap();
        let expect = full.apply(psi.amplitudes()).unwrap();
        for (a, b) in out.amplitudes().iter().zip(&expect) {
            assert!((a - b).norm() < 1e-14);
        }
        // Spot check: |0,1,1> -> |1,1,1>.
        let e = Ket::basis(12, 3);
        let moved = l.apply_local(&e, &["C", "A"], &gates::cnot()).unwrap();
        assert_eq!(moved, Ket::basis(12, 6 + 3));
    }

    #[test]
    fn permute_roundtrip_and_assemble() {
        let l = Layout::new([("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let psi = Ket::normalized((0..12).map(|i| C64::new(1.0 + i as f64, 0.5)).collect()).unwrap();
        let p = l.permute_ket(&psi, &["C", "A", "B"]).unwrap();
        assert_eq!(l.unpermute_ket(&p, &["C", "A", "B"]).unwrap(), psi);

        let a = Ket::basis(2, 1);
        let c = Ket::uniform(2);
        let g = l
            .assemble(&[(vec!["C".into()], &c), (vec!["A".into()], &a)])
            .unwrap();
        let expect = a.kron(&Ket::basis(3, 0)).kron(&c);
        assert_eq!(g, expect);
    }
}
