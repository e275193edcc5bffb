//! Matrix-free finite elements on simplex meshes via the double-grid
//! interpolation-projection (DoGIP) decomposition.
//!
//! A Galerkin system matrix `A` is factored into `B* · A_dogip · B`, where
//! `B` interpolates nodal coefficients onto a double-grid polynomial space
//! (order `2k` for mass-type forms, `2(k-1)` for gradient-type forms) and
//! `A_dogip` is (block-)diagonal with entries obtained by integrating the
//! material coefficient against the double-grid basis. Only the diagonal
//! factors and one reference-element interpolation table are stored, which
//! trades memory for extra multiplications.
//!
//! The crate provides both problem families from that construction —
//! weighted projection (`∫ m u v`) and scalar elliptic (`∫ M ∇u·∇v`) — a
//! conventional CSR assembly path used as the reference operator, a CG
//! solver over an abstract operator trait, and a benchmark CLI that reports
//! the memory/computational efficiency ratios of the two approaches.

pub mod assembly;
pub mod cli;
pub mod coefficient;
pub mod dofmap;
pub mod dogip;
pub mod element;
pub mod mesh;
pub mod metrics;
pub mod quadrature;
pub mod solver;

#[cfg(test)]
pub(crate) mod polyoracle;

use std::sync::atomic::{AtomicBool, Ordering};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: only d = 2 and d = 3 are supported")]
    InvalidDimension(usize),
    #[error("invalid subdivision count {0}: N must be at least 1")]
    InvalidSubdivisions(usize),
    #[error("element index {index} out of range (mesh has {count} elements)")]
    ElementIndexOutOfRange { index: usize, count: usize },
    #[error("unsupported polynomial order k = {k} for d = {d} (supported range {min}..={max})")]
    UnsupportedOrder { d: usize, k: usize, min: usize, max: usize },
    #[error("point {index} lies outside the reference simplex (barycentric coordinate {coord:.3e})")]
    PointOutsideSimplex { index: usize, coord: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("quadrature degree {actual} insufficient, need at least {required}")]
    RuleDegreeInsufficient { required: usize, actual: usize },
    #[error("matrix coefficient is not symmetric at a sampled point")]
    NonSymmetricCoefficient,
    #[error("matrix coefficient is not positive definite at a sampled point")]
    NotPositiveDefinite,
    #[error("conjugate gradient breakdown at iteration {iteration}: p·Ap <= 0, operator is not SPD")]
    CgBreakdown { iteration: usize },
    #[error("invalid coefficient expression: {0}")]
    BadExpression(String),
    #[error("invalid boundary condition: {0}")]
    InvalidBc(String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

static SERIAL: AtomicBool = AtomicBool::new(false);

/// Force deterministic serial execution of the element loops that would
/// otherwise run on the rayon pool. Results are identical either way; the
/// switch exists for reproducibility audits and constrained environments.
pub fn set_serial(serial: bool) {
    SERIAL.store(serial, Ordering::Relaxed);
}

pub(crate) fn serial_mode() -> bool {
    SERIAL.load(Ordering::Relaxed)
}

/// Dense row-major matrix used for small local tables (basis evaluations,
/// interpolation tables, element blocks).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Matrix-vector product (for small test-sized matrices).
    pub fn matvec(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }
}
