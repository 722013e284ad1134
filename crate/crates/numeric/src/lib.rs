//! Floating-point oracle for the PT-symmetric quartic oscillator: number-basis
//! matrices of Weyl-ordered operators, spectra, metric checks, position-space
//! wave functions and densities, and CSV emitters.

pub mod error;
pub mod matrix;
pub mod metric;
pub mod output;
pub mod position;
pub mod spectrum;
pub mod wavefunction;

pub use error::NumericError;
pub use matrix::{matrixize, CMatrix, TruncatedMatrix};
pub use metric::{metric_checks, metric_scaling, ExpMethod, MetricReport, MetricScaling};
pub use spectrum::{eigenvalues, hamiltonian_matrix, spectrum_h, SpectrumReport};
pub use wavefunction::{
    physical_wavefunction, probability_density, GridFunction, GridSpec, PhysicalParams,
};
