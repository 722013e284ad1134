//! Weyl-ordered operator polynomials.
//!
//! An [`OperatorPoly`] is a finite sum `Σ c_{r,s} T_{r,s}` where `T_{r,s}` is
//! the totally symmetrized product of `r` momentum and `s` position factors.
//! Under Weyl quantization `T_{r,s}` has the phase-space symbol `p^r x^s`, so
//! operator products become the Moyal product of polynomial symbols, which
//! terminates. In the scaled convention `[X, P] = i`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::{CoeffTermJson, CoeffValue, GaussianRational, ParamValues};
use crate::error::AlgebraError;

/// Index `(r, s)` of `T_{r,s}`: `r` momentum factors, `s` position factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisKey {
    pub r: u32,
    pub s: u32,
}

impl BasisKey {
    pub const fn new(r: u32, s: u32) -> Self {
        BasisKey { r, s }
    }

    pub fn degree(&self) -> u32 {
        self.r + self.s
    }
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.r, self.s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// `X = x/ħ`, `P = p`, basis `T_{r,s}`, `[X,P] = i`.
    Scaled,
    /// Physical `x`, `p`, basis `S_{r,s}`, `[x,p] = iħ`. Data only.
    Physical,
}

impl Convention {
    fn basis_letter(self) -> char {
        match self {
            Convention::Scaled => 'T',
            Convention::Physical => 'S',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorPoly {
    convention: Convention,
    terms: BTreeMap<BasisKey, CoeffValue>,
}

impl OperatorPoly {
    pub fn zero(convention: Convention) -> Self {
        OperatorPoly { convention, terms: BTreeMap::new() }
    }

    pub fn scaled_zero() -> Self {
        Self::zero(Convention::Scaled)
    }

    pub fn term(convention: Convention, key: BasisKey, c: CoeffValue) -> Self {
        let mut p = Self::zero(convention);
        p.add_term(key, c);
        p
    }

    /// `c·T_{r,s}` in the scaled convention.
    pub fn t(r: u32, s: u32, c: impl Into<CoeffValue>) -> Self {
        Self::term(Convention::Scaled, BasisKey::new(r, s), c.into())
    }

    pub fn identity() -> Self {
        Self::t(0, 0, 1)
    }

    pub fn position() -> Self {
        Self::t(0, 1, 1)
    }

    pub fn momentum() -> Self {
        Self::t(1, 0, 1)
    }

    pub fn from_terms(
        convention: Convention,
        terms: impl IntoIterator<Item = (BasisKey, CoeffValue)>,
    ) -> Self {
        let mut p = Self::zero(convention);
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Relabel the convention without touching coefficients.
    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&BasisKey, &CoeffValue)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &BasisKey> {
        self.terms.keys()
    }

    pub fn coeff(&self, key: BasisKey) -> CoeffValue {
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, key: BasisKey, c: CoeffValue) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Total degree `max(r + s)`; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(BasisKey::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &CoeffValue) -> Self {
        Self::from_terms(self.convention, self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn scale_gaussian(&self, c: &GaussianRational) -> Self {
        Self::from_terms(self.convention, self.terms.iter().map(|(k, v)| (*k, v.scale(c))))
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        self.scale_gaussian(&GaussianRational::real(q.clone()))
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&BasisKey, &CoeffValue) -> CoeffValue) -> Self {
        Self::from_terms(self.convention, self.terms.iter().map(|(k, v)| (*k, f(k, v))))
    }

    pub fn filter(&self, mut keep: impl FnMut(&BasisKey) -> bool) -> Self {
        Self::from_terms(
            self.convention,
            self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (*k, v.clone())),
        )
    }

    /// Weyl symbol of the operator product `self · other`.
    pub fn star(&self, other: &OperatorPoly) -> Result<OperatorPoly, AlgebraError> {
        self.check_scaled(other)?;
        let mut out = OperatorPoly::scaled_zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let c = ca * cb;
                for (key, w) in monomial_star(*ka, *kb) {
                    out.add_term(key, c.scale(&w));
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &OperatorPoly) -> Result<OperatorPoly, AlgebraError> {
        self.check_scaled(other)?;
        let mut out = OperatorPoly::scaled_zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let c = ca * cb;
                for (key, w) in monomial_bracket(*ka, *kb, true) {
                    out.add_term(key, c.scale(&w));
                }
            }
        }
        Ok(out)
    }

    pub fn anticommutator(&self, other: &OperatorPoly) -> Result<OperatorPoly, AlgebraError> {
        self.check_scaled(other)?;
        let mut out = OperatorPoly::scaled_zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let c = ca * cb;
                for (key, w) in monomial_bracket(*ka, *kb, false) {
                    out.add_term(key, c.scale(&w));
                }
            }
        }
        Ok(out)
    }

    fn check_scaled(&self, other: &OperatorPoly) -> Result<(), AlgebraError> {
        if self.convention == Convention::Scaled && other.convention == Convention::Scaled {
            Ok(())
        } else {
            Err(AlgebraError::ConventionMismatch {
                left: self.convention,
                right: other.convention,
            })
        }
    }

    /// `(x, p) → (−x, −p)`.
    pub fn apply_parity(&self) -> Self {
        self.map_coeffs(|k, c| if (k.r + k.s) % 2 == 0 { c.clone() } else { -c.clone() })
    }

    /// `p → −p` together with complex conjugation of coefficients.
    pub fn apply_time_reversal(&self) -> Self {
        self.map_coeffs(|k, c| if k.r % 2 == 0 { c.conj() } else { -c.conj() })
    }

    /// Combined parity and time reversal: `x → −x`, coefficients conjugated.
    pub fn apply_pt(&self) -> Self {
        self.map_coeffs(|k, c| if k.s % 2 == 0 { c.conj() } else { -c.conj() })
    }

    /// Each `T_{r,s}` is Hermitian, so the adjoint conjugates coefficients.
    pub fn dagger(&self) -> Self {
        self.map_coeffs(|_, c| c.conj())
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(CoeffValue::is_real)
    }

    pub fn is_real(&self) -> bool {
        self.is_hermitian()
    }

    /// Evaluate coefficients numerically.
    pub fn eval_coeffs(&self, values: &ParamValues) -> Vec<(BasisKey, (f64, f64))> {
        self.terms.iter().map(|(k, c)| (*k, c.eval(values))).collect()
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            convention: self.convention,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(k, c)| TermJson { r: k.r, s: k.s, coeff: c.to_json() })
                .collect(),
        }
    }

    pub fn from_json(json: &OperatorJson) -> Result<Self, AlgebraError> {
        let mut p = OperatorPoly::zero(json.convention);
        for t in &json.terms {
            let c = CoeffValue::from_json(&t.coeff)
                .ok_or_else(|| AlgebraError::Json(format!("bad coefficient at [{},{}]", t.r, t.s)))?;
            p.add_term(BasisKey::new(t.r, t.s), c);
        }
        Ok(p)
    }
}

/// Falling factorial `n (n−1) … (n−k+1)`; zero when `k > n`.
pub(crate) fn falling(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    falling(n, k) / falling(k, k)
}

/// Real part of the order-`j` bidifferential weight
/// `Σ_k C(j,k) (−1)^k ∂_x^{j−k}∂_p^k f · ∂_p^{j−k}∂_x^k g` on monomials.
fn bidiff_weight(a: BasisKey, b: BasisKey, j: u32) -> BigInt {
    let mut total = BigInt::zero();
    for k in 0..=j {
        let t = binomial(j, k)
            * falling(a.r, k)
            * falling(a.s, j - k)
            * falling(b.r, j - k)
            * falling(b.s, k);
        if k % 2 == 0 {
            total += t;
        } else {
            total -= t;
        }
    }
    total
}

/// Moyal product of `p^{a.r} x^{a.s}` and `p^{b.r} x^{b.s}`.
///
/// The order-`j` term lowers both indices by `j`, so each `j` contributes to a
/// single basis key with weight `(i/2)^j / j!` times [`bidiff_weight`].
pub fn monomial_star(a: BasisKey, b: BasisKey) -> Vec<(BasisKey, GaussianRational)> {
    moyal_terms(a, b, |_| true)
}

/// Commutator (odd `j`, doubled) or anticommutator (even `j`, doubled).
fn monomial_bracket(a: BasisKey, b: BasisKey, odd: bool) -> Vec<(BasisKey, GaussianRational)> {
    moyal_terms(a, b, |j| (j % 2 == 1) == odd)
        .into_iter()
        .map(|(k, w)| (k, w.scale(&BigRational::from_integer(BigInt::from(2)))))
        .collect()
}

fn moyal_terms(
    a: BasisKey,
    b: BasisKey,
    include: impl Fn(u32) -> bool,
) -> Vec<(BasisKey, GaussianRational)> {
    let jmax = a.r.min(b.s) + a.s.min(b.r);
    let mut out = Vec::new();
    for j in 0..=jmax {
        if !include(j) {
            continue;
        }
        let w = bidiff_weight(a, b, j);
        if w.is_zero() {
            continue;
        }
        let scale = BigRational::new(w, falling(j, j) * BigInt::from(2).pow(j));
        let c = GaussianRational::i_pow(j as i64).scale(&scale);
        out.push((BasisKey::new(a.r + b.r - j, a.s + b.s - j), c));
    }
    out
}

impl Add for OperatorPoly {
    type Output = OperatorPoly;
    fn add(mut self, rhs: OperatorPoly) -> OperatorPoly {
        debug_assert_eq!(self.convention, rhs.convention);
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl<'a> Add<&'a OperatorPoly> for &'a OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: &OperatorPoly) -> OperatorPoly {
        self.clone() + rhs.clone()
    }
}

impl Sub for OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: OperatorPoly) -> OperatorPoly {
        self + (-rhs)
    }
}

impl<'a> Sub<&'a OperatorPoly> for &'a OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: &OperatorPoly) -> OperatorPoly {
        self.clone() - rhs.clone()
    }
}

impl Neg for OperatorPoly {
    type Output = OperatorPoly;
    fn neg(self) -> OperatorPoly {
        OperatorPoly {
            convention: self.convention,
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl fmt::Display for OperatorPoly {
    /// Terms in descending `(r, s)` order, e.g.
    /// `(-4/3)*M^-4*T[3,0] + (-2)*M^-2*T[1,2]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let letter = self.convention.basis_letter();
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(k, c)| format!("{c}*{letter}{k}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub r: u32,
    pub s: u32,
    pub coeff: Vec<CoeffTermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub convention: Convention,
    pub terms: Vec<TermJson>,
}
