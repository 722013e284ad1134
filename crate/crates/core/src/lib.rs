//! Exact Weyl-symbol operator algebra for the PT-symmetric quartic
//! anharmonic oscillator `H = p²/2m + μ²x²/2 + iεx³ − mħ²ε²x⁴`.
//!
//! The crate is organised bottom-up:
//!
//! * [`coeff`]: Gaussian-rational Laurent coefficients in `𝓜, ħ, m, μ`.
//! * [`symbol`]: operator polynomials in the totally symmetric basis
//!   `T_{r,s}` and their Moyal product.
//! * [`series`]: ε-graded series and graded BCH conjugation.
//! * [`engine`]: the metric generator hierarchy, the equivalent Hermitian
//!   Hamiltonian and the physical observables.
//! * [`units`]: physical units, classical limit, number-state expectations
//!   and the perturbative energy formula.
//! * [`reference`]: published coefficient tables and exact diffs against them.

pub mod coeff;
pub mod engine;
pub mod error;
pub mod reference;
pub mod series;
pub mod symbol;
pub mod units;

pub use coeff::{CoeffValue, GaussianRational, Param, ParamExponents, ParamValues};
pub use engine::{
    build_hermitian_h, build_observable, build_q_hierarchy, build_q_total, solve_adjoint_equation,
    HermitianSeries, Observable, ObservableSeries, QHierarchy,
};
pub use error::AlgebraError;
pub use series::{build_h, build_h_series, conjugate_by_exp, HamiltonianPart, PerturbationSeries};
pub use symbol::{BasisKey, Convention, OperatorPoly};
