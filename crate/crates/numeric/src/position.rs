//! Position-space action of Weyl-ordered operators on polynomial × Gaussian
//! functions, in the scaled coordinate `X` with `P = −i d/dX`.
//!
//! Independent of the number-basis route: `T_{r,s}` acts through
//! `T_{r,s} = 2^{−s} Σ_k C(s,k) X^k P^r X^{s−k}`.

use num_complex::Complex64;
use weylpt_core::{Convention, OperatorPoly, ParamValues};

use crate::error::NumericError;

/// `f(X) = (Σ_k c_k X^k) · exp(−α X² / 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyGauss {
    pub coeffs: Vec<Complex64>,
    pub alpha: f64,
}

impl PolyGauss {
    /// Oscillator ground state `(𝓜/π)^{1/4} e^{−𝓜X²/2}`.
    pub fn ground_state(m_value: f64) -> Self {
        let norm = (m_value / std::f64::consts::PI).powf(0.25);
        PolyGauss { coeffs: vec![Complex64::new(norm, 0.0)], alpha: m_value }
    }

    fn zero_like(&self) -> Self {
        PolyGauss { coeffs: Vec::new(), alpha: self.alpha }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc * (-0.5 * self.alpha * x * x).exp()
    }

    fn add_scaled(&mut self, other: &PolyGauss, s: Complex64) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), Complex64::new(0.0, 0.0));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }

    fn times_x(&self) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0)];
        coeffs.extend_from_slice(&self.coeffs);
        PolyGauss { coeffs, alpha: self.alpha }
    }

    /// `−i d/dX`: `(p' − αXp) e^{−αX²/2}` times `−i`.
    fn momentum(&self) -> Self {
        let n = self.coeffs.len();
        let mut d = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 1..n {
            d[k - 1] += self.coeffs[k] * k as f64;
        }
        for k in 0..n {
            d[k + 1] -= self.coeffs[k] * self.alpha;
        }
        let mi = Complex64::new(0.0, -1.0);
        PolyGauss { coeffs: d.into_iter().map(|c| c * mi).collect(), alpha: self.alpha }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Apply a scaled-convention operator at `𝓜 = m_value`.
pub fn apply_weyl(op: &OperatorPoly, f: &PolyGauss, m_value: f64) -> Result<PolyGauss, NumericError> {
    if op.convention() != Convention::Scaled {
        return Err(NumericError::InvalidArgument("position action needs a scaled-convention operator".into()));
    }
    let values = ParamValues::scaled(m_value);
    let mut out = f.zero_like();
    for (key, c) in op.terms() {
        let (re, im) = c.eval(&values);
        let coeff = Complex64::new(re, im) * 0.5f64.powi(key.s as i32);
        for k in 0..=key.s {
            let mut g = f.clone();
            for _ in 0..key.s - k {
                g = g.times_x();
            }
            for _ in 0..key.r {
                g = g.momentum();
            }
            for _ in 0..k {
                g = g.times_x();
            }
            out.add_scaled(&g, coeff * binomial(key.s, k));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_is_annihilated_by_lowering() {
        // (𝓜X + iP)ψ₀ = 0
        let m = 1.7;
        let g = PolyGauss::ground_state(m);
        let op = OperatorPoly::t(0, 1, weylpt_core::CoeffValue::m_pow(1, 1, 1))
            + OperatorPoly::t(1, 0, weylpt_core::GaussianRational::i());
        let r = apply_weyl(&op, &g, m).unwrap();
        assert!(r.coeffs.iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn symmetric_product_matches_average() {
        // T[1,1] = (XP + PX)/2 = XP − i/2
        let g = PolyGauss::ground_state(1.0);
        let t11 = apply_weyl(&OperatorPoly::t(1, 1, 1), &g, 1.0).unwrap();
        let xp = g.momentum().times_x();
        for x in [-1.3, 0.0, 0.4, 2.0] {
            let expect = xp.eval(x) - Complex64::new(0.0, 0.5) * g.eval(x);
            assert!((t11.eval(x) - expect).norm() < 1e-14);
        }
    }
}
