use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64, ONE, ZERO};
use crate::config::NORMALIZATION_TOL;
use crate::error::{Error, Result};

/// Unit vector in a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKet", into = "RawKet")]
pub struct Ket {
    amplitudes: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct RawKet {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<RawKet> for Ket {
    type Error = Error;

    fn try_from(raw: RawKet) -> Result<Self> {
        if raw.entries.len() != raw.dim {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                found: raw.entries.len(),
            });
        }
        Ket::new(raw.entries.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}

impl From<Ket> for RawKet {
    fn from(k: Ket) -> Self {
        RawKet {
            dim: k.dim(),
            entries: k.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl Ket {
    /// Wrap amplitudes that must already have unit norm.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(i) = amplitudes.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized(n));
        }
        Ket::new(amplitudes.into_iter().map(|z| z / n).collect())
    }

    pub(crate) fn from_vec_unchecked(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Self { amplitudes: v }
    }

    /// Uniform superposition over all basis states.
    pub fn uniform(dim: usize) -> Self {
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amplitudes: vec![a; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn kron(&self, other: &Ket) -> Ket {
        let mut v = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                v.push(a * b);
            }
        }
        Ket { amplitudes: v }
    }

    /// `|self><self|`.
    pub fn projector(&self) -> CMatrix {
        let v = &self.amplitudes;
        CMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    /// Apply a unitary; the result is renormalized to absorb rounding.
    pub fn evolve(&self, u: &CMatrix) -> Result<Ket> {
        let out = u.apply(&self.amplitudes)?;
        Ket::normalized(out)
    }

    /// Column vector view as an `n x 1` matrix.
    pub fn as_column(&self) -> CMatrix {
        CMatrix::from_vec_unchecked(self.dim(), 1, self.amplitudes.clone())
    }
}

/// `|<psi|phi>|^2` for unit kets.
pub fn fidelity_pure(psi: &Ket, phi: &Ket) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_zero_fidelity_is_half() {
        let plus = Ket::uniform(2);
        let zero = Ket::basis(2, 0);
        assert!((fidelity_pure(&plus, &zero).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(Ket::new(vec![ONE, ONE]), Err(Error::NotNormalized(_))));
        assert!(Ket::normalized(vec![ZERO, ZERO]).is_err());
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        assert!(fidelity_pure(&Ket::basis(2, 0), &Ket::basis(3, 0)).is_err());
    }

    #[test]
    fn json_uses_dim_header() {
        let k = Ket::basis(2, 1);
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(s, r#"{"dim":2,"entries":[[0.0,0.0],[1.0,0.0]]}"#);
        assert!(serde_json::from_str::<Ket>(r#"{"dim":3,"entries":[[1,0]]}"#).is_err());
    }
}
