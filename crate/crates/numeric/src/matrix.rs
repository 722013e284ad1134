//! Dense matrices of Weyl-ordered operators in the number basis of `H₀`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use weylpt_core::{BasisKey, Convention, OperatorPoly, ParamValues};

use crate::error::NumericError;

pub type CMatrix = DMatrix<Complex64>;

/// A `dim × dim` block of an operator in the oscillator number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMatrix {
    pub dim: usize,
    pub m_value: f64,
    pub entries: CMatrix,
}

impl TruncatedMatrix {
    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.entries[(i, i)]).collect()
    }

    /// `‖A − A†‖_F / ‖A‖_F` (zero for the zero matrix).
    pub fn hermiticity_defect(&self) -> f64 {
        let norm = self.entries.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.entries - self.entries.adjoint()).norm() / norm
    }
}

/// Lowering operator `a` with `a|n⟩ = √n |n−1⟩`.
pub fn lowering(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for k in 1..dim {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// `X = (a + a†)/√(2𝓜)` and `P = i√(𝓜/2)(a† − a)`.
pub fn position_momentum(dim: usize, m_value: f64) -> (CMatrix, CMatrix) {
    let a = lowering(dim);
    let ad = a.adjoint();
    let x = (&a + &ad) * Complex64::new((2.0 * m_value).sqrt().recip(), 0.0);
    let p = (&ad - &a) * Complex64::new(0.0, (m_value / 2.0).sqrt());
    (x, p)
}

/// Parity `diag((−1)ⁿ)`.
pub fn parity(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    })
}

fn half_anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    (a * b + b * a) * Complex64::new(0.5, 0.0)
}

/// Builds `T_{r,s}` matrices on a padded space through
/// `T_{r,s} = ½{P, T_{r−1,s}}`, `T_{0,s} = ½{X, T_{0,s−1}}`.
struct BasisCache {
    x: CMatrix,
    p: CMatrix,
    cache: HashMap<BasisKey, CMatrix>,
}

impl BasisCache {
    fn new(dim: usize, m_value: f64) -> Self {
        let (x, p) = position_momentum(dim, m_value);
        let mut cache = HashMap::new();
        cache.insert(BasisKey::new(0, 0), CMatrix::identity(dim, dim));
        BasisCache { x, p, cache }
    }

    fn get(&mut self, key: BasisKey) -> CMatrix {
        if let Some(m) = self.cache.get(&key) {
            return m.clone();
        }
        let m = if key.r > 0 {
            let prev = self.get(BasisKey::new(key.r - 1, key.s));
            half_anticommutator(&self.p, &prev)
        } else {
            let prev = self.get(BasisKey::new(0, key.s - 1));
            half_anticommutator(&self.x, &prev)
        };
        self.cache.insert(key, m.clone());
        m
    }
}

/// Matrix of a scaled-convention operator at `𝓜 = m_value`.
///
/// Entries are exact: the build runs on a space padded by the operator
/// degree, so no truncation edge reaches the returned block.
pub fn matrixize(op: &OperatorPoly, dim: usize, m_value: f64) -> Result<TruncatedMatrix, NumericError> {
    if op.convention() != Convention::Scaled {
        return Err(NumericError::InvalidArgument("matrixize needs a scaled-convention operator".into()));
    }
    let degree = op.degree() as usize;
    if dim < 2 || dim <= degree {
        return Err(NumericError::DimensionTooSmall { dim, needed: (degree + 1).max(2) });
    }
    let padded = dim + degree;
    let mut basis = BasisCache::new(padded, m_value);
    let values = ParamValues::scaled(m_value);
    let mut total = CMatrix::zeros(padded, padded);
    for (key, c) in op.terms() {
        let (re, im) = c.eval(&values);
        total += basis.get(*key) * Complex64::new(re, im);
    }
    let entries = total.view((0, 0), (dim, dim)).into_owned();
    if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(NumericError::InvalidArgument("non-finite matrix entries".into()));
    }
    Ok(TruncatedMatrix { dim, m_value, entries })
}

/// Top-left `k × k` block.
pub fn interior(m: &CMatrix, k: usize) -> CMatrix {
    m.view((0, 0), (k, k)).into_owned()
}
