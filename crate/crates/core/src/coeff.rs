//! Exact coefficient ring: Gaussian rationals times Laurent monomials in the
//! model parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A named model parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Param {
    /// Dimensionless oscillator scale `𝓜 = m^{1/2} ħ μ`.
    #[serde(rename = "M")]
    M,
    #[serde(rename = "hbar")]
    Hbar,
    #[serde(rename = "mass")]
    Mass,
    #[serde(rename = "mu")]
    Mu,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::M, Param::Hbar, Param::Mass, Param::Mu];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::M => "M",
            Param::Hbar => "hbar",
            Param::Mass => "mass",
            Param::Mu => "mu",
        }
    }

    pub fn from_name(name: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == name)
    }
}

/// Signed exponents of the four parameters. A zero entry means the parameter
/// is absent, so the fixed-width form is canonical by construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamExponents([i32; 4]);

impl ParamExponents {
    pub const ONE: ParamExponents = ParamExponents([0; 4]);

    pub fn single(param: Param, exp: i32) -> Self {
        let mut e = [0; 4];
        e[param.index()] = exp;
        ParamExponents(e)
    }

    pub fn from_pairs(pairs: &[(Param, i32)]) -> Self {
        let mut e = [0; 4];
        for &(p, x) in pairs {
            e[p.index()] += x;
        }
        ParamExponents(e)
    }

    pub fn get(&self, param: Param) -> i32 {
        self.0[param.index()]
    }

    pub fn with(mut self, param: Param, exp: i32) -> Self {
        self.0[param.index()] = exp;
        self
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 4]
    }

    /// Nonzero exponents in canonical parameter order.
    pub fn iter(&self) -> impl Iterator<Item = (Param, i32)> + '_ {
        Param::ALL
            .into_iter()
            .map(|p| (p, self.get(p)))
            .filter(|&(_, e)| e != 0)
    }

    pub fn eval(&self, values: &ParamValues) -> f64 {
        self.iter()
            .map(|(p, e)| values.get(p).powi(e))
            .product()
    }
}

impl Mul for ParamExponents {
    type Output = ParamExponents;

    fn mul(self, rhs: ParamExponents) -> ParamExponents {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(rhs.0) {
            *a += b;
        }
        ParamExponents(e)
    }
}

impl fmt::Display for ParamExponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, e) in self.iter() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", p.name())?;
            } else {
                write!(f, "{}^{}", p.name(), e)?;
            }
        }
        Ok(())
    }
}

/// Numeric values for the parameters, used when a coefficient is evaluated
/// in floating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamValues {
    pub m_scale: f64,
    pub hbar: f64,
    pub mass: f64,
    pub mu: f64,
}

impl ParamValues {
    /// Physical parameters with `𝓜` derived from them.
    pub fn physical(mass: f64, mu: f64, hbar: f64) -> Self {
        ParamValues {
            m_scale: mass.sqrt() * hbar * mu,
            hbar,
            mass,
            mu,
        }
    }

    /// Only `𝓜` matters for scaled-convention objects.
    pub fn scaled(m_scale: f64) -> Self {
        ParamValues {
            m_scale,
            hbar: 1.0,
            mass: 1.0,
            mu: 1.0,
        }
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::M => self.m_scale,
            Param::Hbar => self.hbar,
            Param::Mass => self.mass,
            Param::Mu => self.mu,
        }
    }
}

impl Default for ParamValues {
    fn default() -> Self {
        ParamValues::physical(1.0, 1.0, 1.0)
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact complex rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational { re, im: BigRational::zero() }
    }

    pub fn imag(im: BigRational) -> Self {
        GaussianRational { re: BigRational::zero(), im }
    }

    pub fn i() -> Self {
        Self::imag(BigRational::one())
    }

    /// `i^k` for any integer power.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => -Self::one(),
            _ => -Self::i(),
        }
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        GaussianRational { re: &self.re * q, im: &self.im * q }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational { re: BigRational::zero(), im: BigRational::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(BigRational::one())
    }
}

impl From<BigRational> for GaussianRational {
    fn from(q: BigRational) -> Self {
        Self::real(q)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::real(int(n))
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> Self {
        GaussianRational { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> Self {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |q: &BigRational| -> String {
            if q.is_one() {
                "i".to_string()
            } else if (-q).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rational(q))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}", fmt_rational(&self.re), sign, im_part(&self.im.abs()))
            }
        }
    }
}

/// Finite sum of Gaussian-rational multiples of parameter monomials.
///
/// Terms with a zero coefficient are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CoeffValue {
    terms: BTreeMap<ParamExponents, GaussianRational>,
}

impl CoeffValue {
    pub fn zero() -> Self {
        CoeffValue { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(c, ParamExponents::ONE)
    }

    pub fn monomial(c: GaussianRational, params: ParamExponents) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(params, c);
        }
        CoeffValue { terms }
    }

    /// `q·M^exp` with `q = num/den`.
    pub fn m_pow(num: i64, den: i64, exp: i32) -> Self {
        Self::monomial(rat(num, den).into(), ParamExponents::single(Param::M, exp))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamExponents, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, params: &ParamExponents) -> GaussianRational {
        self.terms.get(params).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn add_term(&mut self, params: ParamExponents, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(params) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        CoeffValue {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        self.scale(&GaussianRational::real(q.clone()))
    }

    /// Multiply every monomial by a fixed parameter monomial.
    pub fn shift(&self, params: ParamExponents) -> Self {
        CoeffValue {
            terms: self.terms.iter().map(|(k, v)| (*k * params, v.clone())).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        CoeffValue {
            terms: self.terms.iter().map(|(k, v)| (*k, v.conj())).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }

    pub fn is_imaginary(&self) -> bool {
        self.terms.values().all(|c| c.re.is_zero())
    }

    /// Real and imaginary parts as separate real-coefficient values.
    pub fn split(&self) -> (CoeffValue, CoeffValue) {
        let mut re = CoeffValue::zero();
        let mut im = CoeffValue::zero();
        for (k, v) in &self.terms {
            re.add_term(*k, GaussianRational::real(v.re.clone()));
            im.add_term(*k, GaussianRational::real(v.im.clone()));
        }
        (re, im)
    }

    /// Substitute every parameter monomial through `f`, which maps one
    /// monomial to a coefficient value (or fails).
    pub fn try_substitute<E>(
        &self,
        mut f: impl FnMut(ParamExponents) -> Result<CoeffValue, E>,
    ) -> Result<CoeffValue, E> {
        let mut out = CoeffValue::zero();
        for (k, v) in &self.terms {
            out += f(*k)?.scale(v);
        }
        Ok(out)
    }

    /// Keep only monomials for which `keep` holds.
    pub fn filter(&self, mut keep: impl FnMut(&ParamExponents) -> bool) -> Self {
        CoeffValue {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, values: &ParamValues) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |(re, im), (k, v)| {
            let w = k.eval(values);
            let (a, b) = v.to_f64_pair();
            (re + w * a, im + w * b)
        })
    }

    /// Only meaningful when no parameter appears.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&ParamExponents::ONE).cloned(),
            _ => None,
        }
    }

    pub fn max_abs_exponent(&self, param: Param) -> i32 {
        self.terms.keys().map(|k| k.get(param).abs()).max().unwrap_or(0)
    }
}

impl From<GaussianRational> for CoeffValue {
    fn from(c: GaussianRational) -> Self {
        CoeffValue::constant(c)
    }
}

impl From<i64> for CoeffValue {
    fn from(n: i64) -> Self {
        CoeffValue::constant(n.into())
    }
}

impl From<BigRational> for CoeffValue {
    fn from(q: BigRational) -> Self {
        CoeffValue::constant(q.into())
    }
}

impl AddAssign for CoeffValue {
    fn add_assign(&mut self, rhs: CoeffValue) {
        for (k, v) in rhs.terms {
            self.add_term(k, v);
        }
    }
}

impl AddAssign<&CoeffValue> for CoeffValue {
    fn add_assign(&mut self, rhs: &CoeffValue) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, v.clone());
        }
    }
}

impl SubAssign for CoeffValue {
    fn sub_assign(&mut self, rhs: CoeffValue) {
        for (k, v) in rhs.terms {
            self.add_term(k, -v);
        }
    }
}

impl Add for CoeffValue {
    type Output = CoeffValue;
    fn add(mut self, rhs: CoeffValue) -> CoeffValue {
        self += rhs;
        self
    }
}

impl Sub for CoeffValue {
    type Output = CoeffValue;
    fn sub(mut self, rhs: CoeffValue) -> CoeffValue {
        self -= rhs;
        self
    }
}

impl Neg for CoeffValue {
    type Output = CoeffValue;
    fn neg(self) -> CoeffValue {
        CoeffValue {
            terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect(),
        }
    }
}

impl<'a> Mul<&'a CoeffValue> for &'a CoeffValue {
    type Output = CoeffValue;
    fn mul(self, rhs: &CoeffValue) -> CoeffValue {
        let mut out = CoeffValue::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                out.add_term(*ka * *kb, va * vb);
            }
        }
        out
    }
}

impl Mul for CoeffValue {
    type Output = CoeffValue;
    fn mul(self, rhs: CoeffValue) -> CoeffValue {
        &self * &rhs
    }
}

impl fmt::Display for CoeffValue {
    /// Single monomials render as `(c)*M^-4`; sums as `((c1)*M^-10 + (c2)*M^-8)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |k: &ParamExponents, v: &GaussianRational| {
            if k.is_one() {
                format!("({v})")
            } else {
                format!("({v})*{k}")
            }
        };
        match self.terms.len() {
            0 => write!(f, "(0)"),
            1 => {
                let (k, v) = self.terms.iter().next().unwrap();
                write!(f, "{}", render(k, v))
            }
            _ => {
                let parts: Vec<String> = self.terms.iter().map(|(k, v)| render(k, v)).collect();
                write!(f, "({})", parts.join(" + "))
            }
        }
    }
}

/// JSON form of a rational: decimal numerator and denominator strings.
pub fn rational_json(q: &BigRational) -> [String; 2] {
    [q.numer().to_string(), q.denom().to_string()]
}

pub fn rational_from_json(pair: &[String; 2]) -> Option<BigRational> {
    let n: BigInt = pair[0].parse().ok()?;
    let d: BigInt = pair[1].parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffTermJson {
    pub params: BTreeMap<String, i32>,
    pub re: [String; 2],
    pub im: [String; 2],
}

impl CoeffValue {
    pub fn to_json(&self) -> Vec<CoeffTermJson> {
        self.terms
            .iter()
            .map(|(k, v)| CoeffTermJson {
                params: k.iter().map(|(p, e)| (p.name().to_string(), e)).collect(),
                re: rational_json(&v.re),
                im: rational_json(&v.im),
            })
            .collect()
    }

    pub fn from_json(terms: &[CoeffTermJson]) -> Option<CoeffValue> {
        let mut out = CoeffValue::zero();
        for t in terms {
            let mut k = ParamExponents::ONE;
            for (name, e) in &t.params {
                k = k * ParamExponents::single(Param::from_name(name)?, *e);
            }
            let c = GaussianRational::new(rational_from_json(&t.re)?, rational_from_json(&t.im)?);
            out.add_term(k, c);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_leaves_no_stored_zero() {
        let mut c = CoeffValue::m_pow(3, 2, -2);
        c += CoeffValue::m_pow(-3, 2, -2);
        assert!(c.is_zero());
        assert_eq!(c.len(), 0);
    }

    #[test]
    fn laurent_product_adds_exponents() {
        let a = CoeffValue::m_pow(-4, 3, -4);
        let b = CoeffValue::m_pow(3, 1, 6);
        assert_eq!(&a * &b, CoeffValue::m_pow(-4, 1, 2));
    }

    #[test]
    fn gaussian_arithmetic() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, -GaussianRational::one());
        assert_eq!(GaussianRational::i_pow(3), -GaussianRational::i());
        assert_eq!(GaussianRational::i_pow(-1), -GaussianRational::i());
        let z = GaussianRational::new(rat(1, 2), rat(-3, 4));
        assert_eq!(z.to_string(), "1/2-3/4*i");
        assert_eq!(z.conj().to_string(), "1/2+3/4*i");
    }

    #[test]
    fn display_forms() {
        assert_eq!(CoeffValue::m_pow(-4, 3, -4).to_string(), "(-4/3)*M^-4");
        let two = CoeffValue::m_pow(128, 15, -10) + CoeffValue::m_pow(-32, 5, -8);
        assert_eq!(two.to_string(), "((128/15)*M^-10 + (-32/5)*M^-8)");
        assert_eq!(CoeffValue::from(-2).to_string(), "(-2)");
    }

    #[test]
    fn json_round_trip() {
        let c = CoeffValue::m_pow(-4, 3, -4)
            + CoeffValue::monomial(
                GaussianRational::new(rat(1, 7), rat(-2, 3)),
                ParamExponents::from_pairs(&[(Param::Mass, 1), (Param::Hbar, -2)]),
            );
        let j = c.to_json();
        assert_eq!(CoeffValue::from_json(&j).unwrap(), c);
    }

    #[test]
    fn evaluation() {
        let c = CoeffValue::m_pow(3, 2, -2);
        let (re, im) = c.eval(&ParamValues::scaled(2.0));
        assert!((re - 0.375).abs() < 1e-15 && im == 0.0);
    }
}
