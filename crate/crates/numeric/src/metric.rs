//! Numerical checks of the metric `η₊ = e^{−Q}` and of `𝒞 = e^{Q}𝒫`.
//!
//! On a truncated basis `εQ₁` grows like `n^{3/2}`, so a dense matrix
//! exponential of the truncated `Q` is dominated by edge states. The default
//! here expands the exponential as an ε-graded series cut at the first order
//! not fixed by the generator, and reads norms off an interior block.

use std::collections::BTreeMap;

use num_complex::Complex64;
use weylpt_core::{build_observable, Observable, QHierarchy};

use crate::error::NumericError;
use crate::matrix::{interior, matrixize, parity, CMatrix};
use crate::spectrum::hamiltonian_matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpMethod {
    /// `Σ_j (±Q)^j / j!` collected order by order in ε and cut at
    /// `max_order + 1` of the generator.
    Graded,
    /// Padé scaling-and-squaring of the full truncated matrix.
    Dense,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub eps: f64,
    pub dim: usize,
    pub block: usize,
    /// `‖𝒞² − 1‖_F` on the interior block.
    pub c_squared: f64,
    /// `‖[𝒞, H]‖_F`.
    pub c_commutator: f64,
    /// `‖η₊ H η₊⁻¹ − H†‖_F`.
    pub eta_hamiltonian: f64,
    /// `‖η₊ 𝐗 η₊⁻¹ − 𝐗†‖_F` with `𝐗` through ε³.
    pub eta_position: f64,
}

impl MetricReport {
    pub fn values(&self) -> [(&'static str, f64); 4] {
        [
            ("c_squared_minus_one", self.c_squared),
            ("c_commutator", self.c_commutator),
            ("eta_h_eta_inv_minus_h_dagger", self.eta_hamiltonian),
            ("eta_x_eta_inv_minus_x_dagger", self.eta_position),
        ]
    }
}

type Graded = BTreeMap<u32, CMatrix>;

fn graded_mul(a: &Graded, b: &Graded, cut: u32) -> Graded {
    let mut out = Graded::new();
    for (i, x) in a {
        for (j, y) in b {
            if i + j > cut {
                continue;
            }
            let p = x * y;
            match out.get_mut(&(i + j)) {
                Some(m) => *m += p,
                None => {
                    out.insert(i + j, p);
                }
            }
        }
    }
    out
}

/// `exp(sign·G)` for a graded `G` without order-0 part, cut at order `cut`.
fn graded_exp(g: &Graded, sign: f64, cut: u32, dim: usize) -> Graded {
    let scaled: Graded = g.iter().map(|(k, m)| (*k, m * Complex64::new(sign, 0.0))).collect();
    let mut total: Graded = BTreeMap::from([(0, CMatrix::identity(dim, dim))]);
    // term_j = (sign·G)^j / j!
    let mut term = total.clone();
    let mut j = 1.0;
    loop {
        term = graded_mul(&term, &scaled, cut);
        if term.is_empty() {
            break;
        }
        for m in term.values_mut() {
            *m /= Complex64::new(j, 0.0);
        }
        for (k, m) in &term {
            match total.get_mut(k) {
                Some(t) => *t += m,
                None => {
                    total.insert(*k, m.clone());
                }
            }
        }
        j += 1.0;
    }
    total
}

fn evaluate(g: &Graded, eps: f64, dim: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dim, dim);
    for (k, m) in g {
        out += m * Complex64::new(eps.powi(*k as i32), 0.0);
    }
    out
}

fn generator_matrices(qh: &QHierarchy, dim: usize, m_value: f64) -> Result<Graded, NumericError> {
    let mut g = Graded::new();
    for (k, q) in qh.orders() {
        if !q.is_zero() {
            g.insert(k, matrixize(q, dim, m_value)?.entries);
        }
    }
    Ok(g)
}

/// `(e^{Q}, e^{−Q})` at a given ε.
pub fn metric_pair(
    qh: &QHierarchy,
    eps: f64,
    dim: usize,
    m_value: f64,
    method: ExpMethod,
) -> Result<(CMatrix, CMatrix), NumericError> {
    let g = generator_matrices(qh, dim, m_value)?;
    match method {
        ExpMethod::Graded => {
            let cut = qh.max_order() + 1;
            Ok((
                evaluate(&graded_exp(&g, 1.0, cut, dim), eps, dim),
                evaluate(&graded_exp(&g, -1.0, cut, dim), eps, dim),
            ))
        }
        ExpMethod::Dense => {
            let q = evaluate(&g, eps, dim);
            Ok((q.exp(), (-q).exp()))
        }
    }
}

fn block_norm(m: &CMatrix, k: usize) -> f64 {
    interior(m, k).norm()
}

/// Default interior block: one eighth of the basis.
pub fn default_block(dim: usize) -> usize {
    (dim / 8).max(2)
}

pub fn metric_checks(
    qh: &QHierarchy,
    eps: f64,
    dim: usize,
    m_value: f64,
    block: usize,
    method: ExpMethod,
) -> Result<MetricReport, NumericError> {
    if dim < 2 || block == 0 || block > dim {
        return Err(NumericError::InvalidArgument(format!("block {block} for dimension {dim}")));
    }
    let (e_plus, eta) = metric_pair(qh, eps, dim, m_value, method)?;
    let p = parity(dim);
    let h = hamiltonian_matrix(eps, dim, m_value)?;
    let c = &e_plus * &p;
    let one = CMatrix::identity(dim, dim);
    let c_squared = block_norm(&(&c * &c - &one), block);
    let c_commutator = block_norm(&(&c * &h - &h * &c), block);
    let eta_hamiltonian = block_norm(&(&eta * &h * &e_plus - h.adjoint()), block);

    let obs_order = qh.max_order().min(3);
    let x_series = build_observable(Observable::X, qh, obs_order)?.series;
    let mut x = CMatrix::zeros(dim, dim);
    for (k, op) in x_series.orders() {
        x += matrixize(op, dim, m_value)?.entries * Complex64::new(eps.powi(k as i32), 0.0);
    }
    let eta_position = block_norm(&(&eta * &x * &e_plus - x.adjoint()), block);
    Ok(MetricReport { eps, dim, block, c_squared, c_commutator, eta_hamiltonian, eta_position })
}

/// Reports at ε and ε/2 and the per-check ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricScaling {
    pub full: MetricReport,
    pub half: MetricReport,
}

impl MetricScaling {
    pub fn ratios(&self) -> [(&'static str, f64); 4] {
        let a = self.full.values();
        let b = self.half.values();
        std::array::from_fn(|i| (a[i].0, a[i].1 / b[i].1))
    }
}

pub fn metric_scaling(
    qh: &QHierarchy,
    eps: f64,
    dim: usize,
    m_value: f64,
    block: usize,
    method: ExpMethod,
) -> Result<MetricScaling, NumericError> {
    Ok(MetricScaling {
        full: metric_checks(qh, eps, dim, m_value, block, method)?,
        half: metric_checks(qh, eps / 2.0, dim, m_value, block, method)?,
    })
}
