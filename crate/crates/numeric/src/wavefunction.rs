//! Position-space wave functions `Ψ = e^{−Q/2} ψₙ` and their densities.

use nalgebra::DVector;
use num_complex::Complex64;
use weylpt_core::{AlgebraError, QHierarchy};

use crate::error::NumericError;
use crate::matrix::{matrixize, CMatrix};

/// Physical parameters `m, μ, ħ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    pub mass: f64,
    pub mu: f64,
    pub hbar: f64,
}

impl PhysicalParams {
    pub const UNIT: PhysicalParams = PhysicalParams { mass: 1.0, mu: 1.0, hbar: 1.0 };

    pub fn validate(&self) -> Result<(), NumericError> {
        if [self.mass, self.mu, self.hbar].iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(NumericError::InvalidArgument(format!("parameters must be positive: {self:?}")))
        }
    }

    /// `𝓜 = m^{1/2} ħ μ`.
    pub fn m_scale(&self) -> f64 {
        self.mass.sqrt() * self.hbar * self.mu
    }

    /// Coupling in scaled variables, `m ħ³ ε`.
    pub fn scaled_eps(&self, eps: f64) -> f64 {
        self.mass * self.hbar.powi(3) * eps
    }

    /// Oscillator length `ℓ = (ħ / (m^{1/2} μ))^{1/2}`.
    pub fn length(&self) -> f64 {
        (self.hbar / (self.mass.sqrt() * self.mu)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub const DEFAULT: GridSpec = GridSpec { x_min: -10.0, x_max: 10.0, points: 2001 };

    pub fn validate(&self) -> Result<(), NumericError> {
        if self.points < 2 || !(self.x_max > self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(NumericError::InvalidArgument(format!("bad grid {self:?}")));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|i| self.x_min + h * i as f64).collect()
    }
}

/// Samples on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn xs(&self) -> Vec<f64> {
        self.grid.xs()
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// Trapezoid rule `∫ f dx` over the grid.
    pub fn integral(&self) -> Complex64 {
        trapezoid(&self.values, self.grid.spacing())
    }

    /// `∫ |f|² dx`.
    pub fn norm_squared(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        trapezoid(&sq, self.grid.spacing())
    }

    /// `‖self − other‖₂ / ‖other‖₂` on a shared grid.
    pub fn relative_distance(&self, other: &GridFunction) -> f64 {
        let diff = GridFunction {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        };
        (diff.norm_squared() / other.norm_squared()).sqrt()
    }

    /// `∫ |f(x) − f(−x)| / 2 dx` on a grid symmetric about zero.
    pub fn antisymmetric_l1(&self) -> Result<f64, NumericError> {
        if (self.grid.x_min + self.grid.x_max).abs() > 1e-12 * self.grid.x_max.abs().max(1.0) {
            return Err(NumericError::InvalidArgument("grid is not symmetric about zero".into()));
        }
        let n = self.values.len();
        let odd: Vec<f64> = (0..n).map(|i| 0.5 * (self.values[i] - self.values[n - 1 - i]).norm()).collect();
        Ok(trapezoid(&odd, self.grid.spacing()))
    }
}

fn trapezoid<T>(values: &[T], h: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let n = values.len();
    if n < 2 {
        return T::default();
    }
    let mut s = (values[0] + values[n - 1]) * 0.5;
    for v in &values[1..n - 1] {
        s = s + *v;
    }
    s * h
}

/// Hermite functions `h_0(ξ), …, h_{n_max}(ξ)`, orthonormal on the ξ line,
/// by the three-term recurrence.
pub fn hermite_functions(n_max: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    out.push(h0);
    if n_max >= 1 {
        out.push(std::f64::consts::SQRT_2 * xi * h0);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Number-basis coefficients of `e^{−Q/2}|n⟩` through `order` (≤ 3) in
/// the scaled coupling:
/// `1 − εQ₁/2 + ε²Q₁²/8 − ε³(Q₃/2 + Q₁³/48)`.
pub fn wavefunction_coefficients(
    qh: &QHierarchy,
    n: usize,
    eps_scaled: f64,
    m_value: f64,
    order: u32,
) -> Result<DVector<Complex64>, NumericError> {
    if order > 3 {
        return Err(NumericError::Algebra(AlgebraError::UnsupportedOrder(order)));
    }
    if order >= 3 && qh.max_order() < 3 {
        return Err(NumericError::Algebra(AlgebraError::InsufficientDepth {
            requested: order,
            available: qh.max_order(),
        }));
    }
    let dim = n + 16;
    let mut e = DVector::<Complex64>::zeros(dim);
    e[n] = Complex64::new(1.0, 0.0);
    if order == 0 || eps_scaled == 0.0 {
        return Ok(e);
    }
    let q1: CMatrix = matrixize(&qh.get(1), dim, m_value)?.entries;
    let c = |x: f64| Complex64::new(x, 0.0);
    let v1 = &q1 * &e;
    let mut out = &e - &v1 * c(0.5 * eps_scaled);
    if order >= 2 {
        let v2 = &q1 * &v1;
        out += &v2 * c(eps_scaled.powi(2) / 8.0);
        if order >= 3 {
            let q3 = matrixize(&qh.get(3), dim, m_value)?.entries;
            let v3 = &q1 * &v2;
            out -= (&q3 * &e * c(0.5) + v3 * c(1.0 / 48.0)) * c(eps_scaled.powi(3));
        }
    }
    Ok(out)
}

/// `Ψ(x) = ⟨x| e^{−Q/2} |ψₙ⟩` sampled on `grid` in physical units.
///
/// Fails when the trapezoid norm of the samples disagrees with the exact
/// coefficient norm by more than `1e-8` (relative), which signals a grid
/// that is too coarse or too narrow.
pub fn physical_wavefunction(
    qh: &QHierarchy,
    n: usize,
    eps: f64,
    params: PhysicalParams,
    order: u32,
    grid: GridSpec,
) -> Result<GridFunction, NumericError> {
    params.validate()?;
    grid.validate()?;
    let coeffs = wavefunction_coefficients(qh, n, params.scaled_eps(eps), params.m_scale(), order)?;
    let ell = params.length();
    let scale = ell.powf(-0.5);
    let top = coeffs.len() - 1;
    let values: Vec<Complex64> = grid
        .xs()
        .iter()
        .map(|x| {
            let h = hermite_functions(top, x / ell);
            coeffs.iter().zip(&h).map(|(c, hk)| c * (hk * scale)).sum()
        })
        .collect();
    let psi = GridFunction { grid, values };
    let coefficient = coeffs.norm_squared();
    let trapezoid = psi.norm_squared();
    if coefficient == 0.0 {
        return Err(NumericError::ZeroNorm);
    }
    if ((trapezoid - coefficient) / coefficient).abs() > 1e-8 {
        return Err(NumericError::Normalization { trapezoid, coefficient });
    }
    Ok(psi)
}

/// `ϱ = |Ψ|² / N` with `N` the trapezoid integral of `|Ψ|²`.
pub fn probability_density(psi: &GridFunction) -> Result<GridFunction, NumericError> {
    let norm = psi.norm_squared();
    if !(norm > 0.0) {
        return Err(NumericError::ZeroNorm);
    }
    Ok(GridFunction {
        grid: psi.grid,
        values: psi.values.iter().map(|z| Complex64::new(z.norm_sqr() / norm, 0.0)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let grid = GridSpec { x_min: -12.0, x_max: 12.0, points: 4001 };
        let xs = grid.xs();
        let table: Vec<Vec<f64>> = xs.iter().map(|x| hermite_functions(6, *x)).collect();
        for a in 0..=6 {
            for b in 0..=6 {
                let prod: Vec<f64> = table.iter().map(|h| h[a] * h[b]).collect();
                let v = trapezoid(&prod, grid.spacing());
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-10, "{a} {b} {v}");
            }
        }
    }

    #[test]
    fn high_index_stays_finite() {
        let h = hermite_functions(300, 5.0);
        assert!(h.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn narrow_grid_is_reported() {
        let qh = weylpt_core::build_q_hierarchy(3).unwrap();
        let grid = GridSpec { x_min: -1.0, x_max: 1.0, points: 201 };
        let r = physical_wavefunction(&qh, 0, 0.0, PhysicalParams::UNIT, 3, grid);
        assert!(matches!(r, Err(NumericError::Normalization { .. })));
    }

    #[test]
    fn zero_wave_function_has_no_density() {
        let f = GridFunction { grid: GridSpec::DEFAULT, values: vec![Complex64::new(0.0, 0.0); 2001] };
        assert!(matches!(probability_density(&f), Err(NumericError::ZeroNorm)));
    }
}
