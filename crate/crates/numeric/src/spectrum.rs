//! Eigenvalues of the truncated non-Hermitian Hamiltonian.

use nalgebra::Schur;
use num_complex::Complex64;
use weylpt_core::{build_h, HamiltonianPart};

use crate::error::NumericError;
use crate::matrix::{matrixize, CMatrix};

/// Extra dimension used for the truncation-convergence comparison.
pub const CONVERGENCE_PAD: usize = 20;
/// Largest eigenvalue shift between `dim` and `dim + 20` counted as converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Matrix of `H₀ + εH₁ + ε²H₂` at a floating-point ε.
pub fn hamiltonian_matrix(eps: f64, dim: usize, m_value: f64) -> Result<CMatrix, NumericError> {
    let h0 = matrixize(&build_h(HamiltonianPart::H0), dim, m_value)?.entries;
    let h1 = matrixize(&build_h(HamiltonianPart::H1), dim, m_value)?.entries;
    let h2 = matrixize(&build_h(HamiltonianPart::H2), dim, m_value)?.entries;
    Ok(h0 + h1 * Complex64::new(eps, 0.0) + h2 * Complex64::new(eps * eps, 0.0))
}

/// All eigenvalues of a dense complex matrix, sorted by real part.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>, NumericError> {
    let dim = m.nrows();
    let schur = Schur::try_new(m.clone(), 1e-14, 100 * dim.max(10)).ok_or(NumericError::NonConvergent(dim))?;
    let ev = schur.eigenvalues().ok_or(NumericError::NonConvergent(dim))?;
    let mut v: Vec<Complex64> = ev.iter().copied().collect();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub eps: f64,
    pub dim: usize,
    pub m_value: f64,
    pub eigenvalues: Vec<Complex64>,
    /// Largest change of a reported eigenvalue between `dim` and `dim + 20`.
    pub truncation_shift: f64,
    pub warning: Option<String>,
}

impl SpectrumReport {
    pub fn converged(&self) -> bool {
        self.warning.is_none()
    }
}

/// Lowest `levels` eigenvalues of `H(X,P)` in scaled units.
pub fn spectrum_h(eps: f64, dim: usize, m_value: f64, levels: usize) -> Result<SpectrumReport, NumericError> {
    if levels == 0 {
        return Err(NumericError::InvalidArgument("levels must be positive".into()));
    }
    let needed = 4 * levels + 40;
    if dim < needed {
        return Err(NumericError::DimensionTooSmall { dim, needed });
    }
    if !(m_value > 0.0) || !eps.is_finite() {
        return Err(NumericError::InvalidArgument(format!("eps={eps}, M={m_value}")));
    }
    let low = lowest(eps, dim, m_value, levels)?;
    let high = lowest(eps, dim + CONVERGENCE_PAD, m_value, levels)?;
    let shift = low.iter().zip(&high).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let warning = (shift >= CONVERGENCE_TOL).then(|| {
        format!("eigenvalues moved by {shift:.3e} between dim {dim} and {}", dim + CONVERGENCE_PAD)
    });
    Ok(SpectrumReport { eps, dim, m_value, eigenvalues: low, truncation_shift: shift, warning })
}

fn lowest(eps: f64, dim: usize, m_value: f64, levels: usize) -> Result<Vec<Complex64>, NumericError> {
    let mut ev = eigenvalues(&hamiltonian_matrix(eps, dim, m_value)?)?;
    ev.truncate(levels);
    Ok(ev)
}
