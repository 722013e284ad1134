//! Physical units, the classical limit, exact number-state expectation values
//! and the first-order energy formula.
//!
//! Scaled and physical variables are related by `X = x/ħ`, `P = p`,
//! `𝓜 = m^{1/2}ħμ`, `ε_scaled = mħ³ε`, and `T_{r,s} = ħ^{−s} S_{r,s}`.
//! Only even powers of `𝓜` ever occur, so `𝓜² = mħ²μ²` is substituted and
//! the coefficient ring never needs square roots.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::coeff::{rat, CoeffTermJson, CoeffValue, GaussianRational, Param, ParamExponents, ParamValues};
use crate::engine::HermitianSeries;
use crate::error::AlgebraError;
use crate::series::PerturbationSeries;
use crate::symbol::{binomial, falling, BasisKey, Convention, OperatorPoly};

/// What the scaled object represents; fixes the overall unit prefactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaledKind {
    /// `H(X,P) = m·H(x,p)`, so the physical form is divided by `m`.
    Hamiltonian,
    /// Dimensionless operators such as the metric generator `Q`.
    Generator,
}

/// An ε-graded operator in `S_{r,s}` form with explicit `ħ, m, μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalSeries(PerturbationSeries);

impl PhysicalSeries {
    pub fn series(&self) -> &PerturbationSeries {
        &self.0
    }

    pub fn get(&self, order: u32) -> OperatorPoly {
        self.0.get(order)
    }
}

impl fmt::Display for PhysicalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .orders()
            .map(|(k, op)| if k == 0 { format!("{op}") } else { format!("eps^{k}*[{op}]") })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `𝓜^a → m^{a/2} ħ^a μ^a`; odd `a` has no integer-exponent image.
fn substitute_m(k: ParamExponents) -> Result<CoeffValue, AlgebraError> {
    let a = k.get(Param::M);
    if a % 2 != 0 {
        return Err(AlgebraError::HalfIntegerExponent(format!("M^{a}")));
    }
    let out = k.with(Param::M, 0)
        * ParamExponents::from_pairs(&[(Param::Mass, a / 2), (Param::Hbar, a), (Param::Mu, a)]);
    Ok(CoeffValue::monomial(GaussianRational::one(), out))
}

/// Map a scaled-convention series to physical variables.
pub fn to_physical(series: &PerturbationSeries, kind: ScaledKind) -> Result<PhysicalSeries, AlgebraError> {
    if series.convention() != Convention::Scaled {
        return Err(AlgebraError::ConventionMismatch {
            left: Convention::Scaled,
            right: series.convention(),
        });
    }
    let overall = match kind {
        ScaledKind::Hamiltonian => ParamExponents::single(Param::Mass, -1),
        ScaledKind::Generator => ParamExponents::ONE,
    };
    let mut out = PerturbationSeries::new(Convention::Physical, series.max_order());
    for (order, op) in series.orders() {
        let grading = ParamExponents::from_pairs(&[(Param::Mass, order as i32), (Param::Hbar, 3 * order as i32)]);
        let mut phys = OperatorPoly::zero(Convention::Physical);
        for (key, c) in op.terms() {
            let basis = ParamExponents::single(Param::Hbar, -(key.s as i32));
            let c = c.try_substitute(substitute_m)?.shift(grading * overall * basis);
            phys.add_term(*key, c);
        }
        out.set(order, phys)?;
    }
    Ok(PhysicalSeries(out))
}

/// Re-express a scaled-convention operator product in the `S_{r,s}` basis,
/// given that it came from a word with `position_factors` factors of `x`.
///
/// A word in `x, p` equals `ħ^{#x}` times the same word in `X, P`.
pub fn scaled_word_to_physical(scaled: &OperatorPoly, position_factors: u32) -> Result<OperatorPoly, AlgebraError> {
    let mut out = OperatorPoly::zero(Convention::Physical);
    for (key, c) in scaled.terms() {
        let h = ParamExponents::single(Param::Hbar, position_factors as i32 - key.s as i32);
        out.add_term(*key, c.try_substitute(substitute_m)?.shift(h));
    }
    Ok(out)
}

/// Classical Hamiltonian: commuting `(x_c, p_c)`, ε as a grading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalHamiltonian {
    /// `(ε order, r, s) → coefficient of ε^k p_c^r x_c^s`.
    terms: BTreeMap<(u32, u32, u32), CoeffValue>,
}

impl ClassicalHamiltonian {
    pub fn new() -> Self {
        ClassicalHamiltonian { terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, order: u32, r: u32, s: u32, c: CoeffValue) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((order, r, s)).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(order, r, s));
        }
    }

    pub fn coeff(&self, order: u32, r: u32, s: u32) -> CoeffValue {
        self.terms.get(&(order, r, s)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &CoeffValue)> {
        self.terms.iter()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(CoeffValue::is_real)
    }

    /// `1/M(x_c)` as `(ε order, x power) → coefficient`: twice the `p_c²`
    /// coefficient, provided the kinetic term is quadratic in `p_c`.
    pub fn inverse_mass(&self) -> BTreeMap<(u32, u32), CoeffValue> {
        self.terms
            .iter()
            .filter(|((_, r, _), _)| *r == 2)
            .map(|((k, _, s), c)| ((*k, *s), c.scale_rational(&BigRational::from_integer(2.into()))))
            .collect()
    }

    pub fn difference(&self, other: &ClassicalHamiltonian) -> ClassicalHamiltonian {
        let mut out = self.clone();
        for ((k, r, s), c) in &other.terms {
            out.add_term(*k, *r, *s, -c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_json(&self) -> Vec<ClassicalTermJson> {
        self.terms
            .iter()
            .map(|((k, r, s), c)| ClassicalTermJson { eps_order: *k, p_power: *r, x_power: *s, coeff: c.to_json() })
            .collect()
    }
}

impl Default for ClassicalHamiltonian {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalTermJson {
    pub eps_order: u32,
    pub p_power: u32,
    pub x_power: u32,
    pub coeff: Vec<CoeffTermJson>,
}

fn monomial_text(r: u32, s: u32) -> String {
    let mut parts = Vec::new();
    match r {
        0 => {}
        1 => parts.push("p_c".to_string()),
        _ => parts.push(format!("p_c^{r}")),
    }
    match s {
        0 => {}
        1 => parts.push("x_c".to_string()),
        _ => parts.push(format!("x_c^{s}")),
    }
    parts.join("*")
}

impl fmt::Display for ClassicalHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((k, r, s), c)| {
                let mut t = c.to_string();
                if *k > 0 {
                    t.push_str(&format!("*eps^{k}"));
                }
                let m = monomial_text(*r, *s);
                if !m.is_empty() {
                    t.push('*');
                    t.push_str(&m);
                }
                t
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `lim_{ħ→0}`: drop positive powers of `ħ`, refuse negative ones.
pub fn classical_limit(phys: &PhysicalSeries) -> Result<ClassicalHamiltonian, AlgebraError> {
    let mut out = ClassicalHamiltonian::new();
    for (order, op) in phys.series().orders() {
        for (key, c) in op.terms() {
            if c.terms().any(|(k, _)| k.get(Param::Hbar) < 0) {
                return Err(AlgebraError::LimitUndefined(format!("eps^{order} term S{key} with coefficient {c}")));
            }
            out.add_term(order, key.r, key.s, c.filter(|k| k.get(Param::Hbar) == 0));
        }
    }
    Ok(out)
}

/// A polynomial in the level index `n` with coefficient-ring coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NumberPoly {
    /// Coefficient of `n^k` at index `k`; no trailing zeros.
    coeffs: Vec<CoeffValue>,
}

impl NumberPoly {
    pub fn zero() -> Self {
        NumberPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(coeffs: Vec<CoeffValue>) -> Self {
        let mut p = NumberPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(CoeffValue::is_zero) {
            self.coeffs.pop();
        }
    }

    /// `Σ c_k n^k` with rational coefficients times a common parameter monomial.
    pub fn with_rational(coeffs: &[BigRational], params: ParamExponents) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|q| CoeffValue::monomial(GaussianRational::real(q.clone()), params))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[CoeffValue] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> CoeffValue {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &NumberPoly) -> NumberPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &NumberPoly) -> NumberPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &CoeffValue) -> NumberPoly {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Restrict every coefficient to monomials for which `keep` holds.
    pub fn filter(&self, mut keep: impl FnMut(&ParamExponents) -> bool) -> NumberPoly {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.filter(&mut keep)).collect())
    }

    /// Exact value at a given level.
    pub fn at(&self, n: u64) -> CoeffValue {
        let n = BigRational::from_integer(BigInt::from(n));
        let mut out = CoeffValue::zero();
        let mut pow = BigRational::one();
        for c in &self.coeffs {
            out += c.scale_rational(&pow);
            pow *= &n;
        }
        out
    }

    pub fn eval(&self, n: u64, values: &ParamValues) -> (f64, f64) {
        self.at(n).eval(values)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(CoeffValue::is_real)
    }
}

impl fmt::Display for NumberPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => c.to_string(),
                1 => format!("{c}*n"),
                _ => format!("{c}*n^{k}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Coefficients of the falling factorial `n(n−1)…(n−m+1)` in powers of `n`.
fn falling_poly(m: u32) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::one()];
    for i in 0..m {
        let mut next = vec![BigInt::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * BigInt::from(i);
        }
        coeffs = next;
    }
    coeffs
}

/// `⟨n| T_{r,s} |n⟩` as a polynomial in `n` (real part, imaginary part and
/// the power of `𝓜` are returned separately).
///
/// With `x = (α+ᾱ)/√(2𝓜)` and `p = i√(𝓜/2)(ᾱ−α)` the Weyl symbol becomes a
/// polynomial in `α, ᾱ`; normal ordering applies `exp(½ ∂_α ∂_ᾱ)` and
/// `⟨n| a†^k a^k |n⟩ = n(n−1)…(n−k+1)`. Only the `ᾱ^N α^N` part survives.
fn basis_expectation(key: BasisKey) -> Option<(GaussianRational, i32, Vec<BigRational>)> {
    let (r, s) = (key.r, key.s);
    if (r + s) % 2 != 0 {
        return None;
    }
    let big_n = (r + s) / 2;
    let mut w = BigInt::zero();
    for a in 0..=r.min(big_n) {
        if big_n - a > s {
            continue;
        }
        let t = binomial(r, a) * binomial(s, big_n - a);
        if (r - a) % 2 == 0 {
            w += t;
        } else {
            w -= t;
        }
    }
    if w.is_zero() {
        return None;
    }
    let prefactor = GaussianRational::i_pow(r as i64)
        .scale(&BigRational::new(w, BigInt::from(2).pow(big_n)));
    let m_exp = (r as i32 - s as i32) / 2;
    let mut poly = vec![BigRational::zero(); big_n as usize + 1];
    for l in 0..=big_n {
        let f = falling(big_n, l);
        let weight = BigRational::new(&f * &f, falling(l, l) * BigInt::from(2).pow(l));
        for (k, c) in falling_poly(big_n - l).into_iter().enumerate() {
            poly[k] += &weight * BigRational::from_integer(c);
        }
    }
    Some((prefactor, m_exp, poly))
}

/// Exact `⟨n| op |n⟩` in the eigenbasis of `H₀`, as a polynomial in `n`.
pub fn number_state_expectation(op: &OperatorPoly) -> Result<NumberPoly, AlgebraError> {
    if op.convention() != Convention::Scaled {
        return Err(AlgebraError::ConventionMismatch { left: Convention::Scaled, right: op.convention() });
    }
    let mut total = NumberPoly::zero();
    for (key, c) in op.terms() {
        let Some((prefactor, m_exp, poly)) = basis_expectation(*key) else { continue };
        let scale = c.scale(&prefactor).shift(ParamExponents::single(Param::M, m_exp));
        let term = NumberPoly::from_coeffs(poly.iter().map(|q| scale.scale_rational(q)).collect());
        total = total.add(&term);
    }
    Ok(total)
}

/// `E_n = 𝓜(n+½) + ε²⟨n|h⁽²⁾|n⟩ + O(ε⁴)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyFormula {
    pub zeroth: NumberPoly,
    pub second: NumberPoly,
}

impl EnergyFormula {
    /// Part of the ε² coefficient proportional to `𝓜^exp`.
    pub fn second_block(&self, m_exp: i32) -> NumberPoly {
        self.second.filter(|k| k.get(Param::M) == m_exp)
    }

    /// Numerical value in scaled units.
    pub fn eval(&self, n: u64, eps: f64, values: &ParamValues) -> f64 {
        let (e0, _) = self.zeroth.eval(n, values);
        let (e2, _) = self.second.eval(n, values);
        e0 + eps * eps * e2
    }
}

pub fn energy_formula(hs: &HermitianSeries) -> Result<EnergyFormula, AlgebraError> {
    if hs.max_order() < 2 {
        return Err(AlgebraError::InsufficientDepth { requested: 2, available: hs.max_order() });
    }
    let zeroth = number_state_expectation(&hs.get(0))?;
    let second = number_state_expectation(&hs.get(2))?;
    if !zeroth.is_real() || !second.is_real() {
        return Err(AlgebraError::Invariant("energy coefficients are not real".into()));
    }
    Ok(EnergyFormula { zeroth, second })
}

/// `𝓜(n + ½)`.
pub fn oscillator_levels() -> NumberPoly {
    NumberPoly::with_rational(&[rat(1, 2), rat(1, 1)], ParamExponents::single(Param::M, 1))
}
