//! Linear maps on operator space.
//!
//! Operators are vectorized row-major, `vec(ρ)[i·d + j] = ρ_ij`, so that
//! `XρY` becomes `(X ⊗ Yᵀ) vec(ρ)` and `KρK†` becomes `(K ⊗ K̄) vec(ρ)`.

use num_complex::Complex64 as C64;

use super::matrix::{kron, ComplexMatrix};
use crate::error::{Error, Result};

pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    m.as_slice().to_vec()
}

pub fn devectorize(v: &[C64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::from_vec(rows, cols, v.to_vec())
}

/// A linear map from `dim_in × dim_in` to `dim_out × dim_out` operators.
#[derive(Clone, Debug)]
pub struct Superoperator {
    pub dim_in: usize,
    pub dim_out: usize,
    pub matrix: ComplexMatrix,
    pub label: String,
}

impl Superoperator {
    pub fn from_matrix(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.shape() != (dim_out * dim_out, dim_in * dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator matrix {:?} does not map {dim_in}² to {dim_out}²",
                matrix.shape()
            )));
        }
        Ok(Self { dim_in, dim_out, matrix, label: String::new() })
    }

    pub fn identity(d: usize) -> Self {
        Self { dim_in: d, dim_out: d, matrix: ComplexMatrix::identity(d * d), label: "id".into() }
    }

    pub fn zero(d: usize) -> Self {
        Self { dim_in: d, dim_out: d, matrix: ComplexMatrix::zeros(d * d, d * d), label: "0".into() }
    }

    /// `ρ ↦ XρY`.
    pub fn sandwich(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<Self> {
        if x.cols() != y.rows() || !x.is_square() || !y.is_square() {
            return Err(Error::DimensionMismatch("sandwich operands".into()));
        }
        Ok(Self {
            dim_in: x.cols(),
            dim_out: x.rows(),
            matrix: kron(x, &y.transpose())?,
            label: String::new(),
        })
    }

    /// `ρ ↦ −i[H, ρ]`.
    pub fn commutator(h: &ComplexMatrix) -> Result<Self> {
        let id = ComplexMatrix::identity(h.rows());
        let mi = C64::new(0.0, -1.0);
        let left = Self::sandwich(h, &id)?;
        let right = Self::sandwich(&id, h)?;
        Ok(left.sub(&right)?.scale(mi))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator on {}×{} applied to {:?}",
                self.dim_in,
                self.dim_in,
                rho.shape()
            )));
        }
        devectorize(&self.matrix.mul_vec(rho.as_slice()), self.dim_out, self.dim_out)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        if first.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch("composition of incompatible maps".into()));
        }
        Ok(Self {
            dim_in: first.dim_in,
            dim_out: self.dim_out,
            matrix: self.matrix.matmul(&first.matrix),
            label: String::new(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_matrix(&self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_matrix(&self.matrix - &other.matrix))
    }

    pub fn scale(&self, s: C64) -> Self {
        self.with_matrix(self.matrix.scale(s))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Frobenius norm of the superoperator matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    /// `max |tr S(|a⟩⟨b|) − δ_ab|` over basis operators.
    pub fn trace_preservation_deviation(&self) -> f64 {
        let (din, dout) = (self.dim_in, self.dim_out);
        let mut worst = 0.0f64;
        for a in 0..din {
            for b in 0..din {
                let col = a * din + b;
                let t: C64 = (0..dout).map(|i| self.matrix[(i * dout + i, col)]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((t - want).norm());
            }
        }
        worst
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::DimensionMismatch("superoperators of different shapes".into()));
        }
        Ok(())
    }

    fn with_matrix(&self, matrix: ComplexMatrix) -> Self {
        Self { dim_in: self.dim_in, dim_out: self.dim_out, matrix, label: String::new() }
    }
}

/// `ρ ↦ Σ K ρ K†`.
pub fn superop_from_kraus(kraus: &[ComplexMatrix]) -> Result<Superoperator> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty Kraus family".into()))?;
    let (dout, din) = first.shape();
    let mut m = ComplexMatrix::zeros(dout * dout, din * din);
    for k in kraus {
        if k.shape() != (dout, din) {
            return Err(Error::DimensionMismatch("Kraus operators of different shapes".into()));
        }
        m += &kron(k, &k.conj())?;
    }
    Ok(Superoperator { dim_in: din, dim_out: dout, matrix: m, label: "kraus".into() })
}
