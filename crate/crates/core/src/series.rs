//! ε-graded operator series and graded BCH conjugation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::{CoeffValue, GaussianRational};
use crate::error::AlgebraError;
use crate::symbol::{Convention, OperatorJson, OperatorPoly};

/// `Σ_k ε^k A_k`, known through `max_order`. Absent orders are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationSeries {
    convention: Convention,
    coeffs: BTreeMap<u32, OperatorPoly>,
    max_order: u32,
}

impl PerturbationSeries {
    /// Marks a terminating series that is exact at every order.
    pub const EXACT: u32 = u32::MAX;

    pub fn new(convention: Convention, max_order: u32) -> Self {
        PerturbationSeries { convention, coeffs: BTreeMap::new(), max_order }
    }

    pub fn from_orders(
        convention: Convention,
        max_order: u32,
        orders: impl IntoIterator<Item = (u32, OperatorPoly)>,
    ) -> Result<Self, AlgebraError> {
        let mut s = Self::new(convention, max_order);
        for (k, a) in orders {
            s.set(k, a)?;
        }
        Ok(s)
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn set(&mut self, order: u32, op: OperatorPoly) -> Result<(), AlgebraError> {
        if op.convention() != self.convention {
            return Err(AlgebraError::MixedConventions);
        }
        if order > self.max_order {
            return Err(AlgebraError::UnsupportedOrder(order));
        }
        if op.is_zero() {
            self.coeffs.remove(&order);
        } else {
            self.coeffs.insert(order, op);
        }
        Ok(())
    }

    pub fn get(&self, order: u32) -> OperatorPoly {
        self.coeffs
            .get(&order)
            .cloned()
            .unwrap_or_else(|| OperatorPoly::zero(self.convention))
    }

    pub fn orders(&self) -> impl Iterator<Item = (u32, &OperatorPoly)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    /// Orders with a nonzero coefficient.
    pub fn present_orders(&self) -> Vec<u32> {
        self.coeffs.keys().copied().collect()
    }

    pub fn min_order(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, max_order: u32) -> Self {
        let max_order = max_order.min(self.max_order);
        PerturbationSeries {
            convention: self.convention,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| **k <= max_order)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            max_order,
        }
    }

    pub fn map(&self, mut f: impl FnMut(u32, &OperatorPoly) -> OperatorPoly) -> Self {
        let mut out = Self::new(self.convention, self.max_order);
        for (k, v) in &self.coeffs {
            let w = f(*k, v);
            if !w.is_zero() {
                out.coeffs.insert(*k, w);
            }
        }
        out
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        self.map(|_, v| v.scale_rational(q))
    }

    pub fn neg(&self) -> Self {
        self.map(|_, v| -v.clone())
    }

    /// Sum; the result is known only as far as both operands are.
    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.convention != other.convention {
            return Err(AlgebraError::MixedConventions);
        }
        let max_order = self.max_order.min(other.max_order);
        let mut out = Self::new(self.convention, max_order);
        for (k, v) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if *k > max_order {
                continue;
            }
            let sum = out.get(*k) + v.clone();
            out.set(*k, sum)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    /// Graded commutator truncated at `max_order`.
    pub fn commutator(&self, other: &Self, max_order: u32) -> Result<Self, AlgebraError> {
        let max_order = max_order.min(self.max_order).min(other.max_order);
        let mut out = Self::new(self.convention, max_order);
        for (ka, a) in &self.coeffs {
            for (kb, b) in &other.coeffs {
                let k = ka + kb;
                if k > max_order {
                    continue;
                }
                let c = a.commutator(b)?;
                let sum = out.get(k) + c;
                out.set(k, sum)?;
            }
        }
        Ok(out)
    }

    /// Graded Moyal product truncated at `max_order`.
    pub fn star(&self, other: &Self, max_order: u32) -> Result<Self, AlgebraError> {
        let max_order = max_order.min(self.max_order).min(other.max_order);
        let mut out = Self::new(self.convention, max_order);
        for (ka, a) in &self.coeffs {
            for (kb, b) in &other.coeffs {
                let k = ka + kb;
                if k > max_order {
                    continue;
                }
                let sum = out.get(k) + a.star(b)?;
                out.set(k, sum)?;
            }
        }
        Ok(out)
    }

    pub fn apply_pt(&self) -> Self {
        self.map(|_, v| v.apply_pt())
    }

    pub fn apply_parity(&self) -> Self {
        self.map(|_, v| v.apply_parity())
    }

    pub fn dagger(&self) -> Self {
        self.map(|_, v| v.dagger())
    }

    pub fn to_json(&self) -> Vec<OrderedOperatorJson> {
        self.coeffs
            .iter()
            .map(|(k, v)| OrderedOperatorJson { order: *k, operator: v.to_json() })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderedOperatorJson {
    pub order: u32,
    pub operator: OperatorJson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianPart {
    H0,
    H1,
    H2,
}

/// Pieces of `H = H₀ + εH₁ + ε²H₂` in scaled variables.
pub fn build_h(part: HamiltonianPart) -> OperatorPoly {
    match part {
        HamiltonianPart::H0 => {
            OperatorPoly::t(2, 0, CoeffValue::m_pow(1, 2, 0))
                + OperatorPoly::t(0, 2, CoeffValue::m_pow(1, 2, 2))
        }
        HamiltonianPart::H1 => OperatorPoly::t(0, 3, GaussianRational::i()),
        HamiltonianPart::H2 => OperatorPoly::t(0, 4, -1),
    }
}

/// The full Hamiltonian as an exact graded series `{0: H₀, 1: H₁, 2: H₂}`.
pub fn build_h_series() -> PerturbationSeries {
    PerturbationSeries::from_orders(
        Convention::Scaled,
        PerturbationSeries::EXACT,
        [
            (0, build_h(HamiltonianPart::H0)),
            (1, build_h(HamiltonianPart::H1)),
            (2, build_h(HamiltonianPart::H2)),
        ],
    )
    .expect("scaled Hamiltonian pieces")
}

/// The full Hamiltonian at a fixed rational ε.
pub fn build_h_at(eps: &BigRational) -> OperatorPoly {
    let e = GaussianRational::real(eps.clone());
    let e2 = &e * &e;
    build_h(HamiltonianPart::H0)
        + build_h(HamiltonianPart::H1).scale_gaussian(&e)
        + build_h(HamiltonianPart::H2).scale_gaussian(&e2)
}

/// Graded conjugation `e^{−sG} B e^{sG} = Σ_j ad^j / j!` with
/// `ad(A) = [A, sG]`, collecting every contribution through `max_order`.
///
/// `scale = 1` gives `e^{−G} B e^{G}`; `scale = −1/2` gives `e^{G/2} B e^{−G/2}`.
/// The generator must have no order-0 part, which makes the sum finite.
pub fn conjugate_by_exp(
    generator: &PerturbationSeries,
    target: &PerturbationSeries,
    scale: &BigRational,
    max_order: u32,
) -> Result<PerturbationSeries, AlgebraError> {
    if generator.convention() != target.convention() {
        return Err(AlgebraError::MixedConventions);
    }
    if max_order > generator.max_order() {
        return Err(AlgebraError::InsufficientDepth {
            requested: max_order,
            available: generator.max_order(),
        });
    }
    if !generator.get(0).is_zero() {
        return Err(AlgebraError::Invariant(
            "conjugation generator must vanish at order zero".into(),
        ));
    }
    let scaled_gen = generator.scale_rational(scale);
    let mut term = target.truncate(max_order);
    let mut total = term.clone();
    let mut j = BigInt::one();
    loop {
        let next = term.commutator(&scaled_gen, max_order)?;
        if next.is_zero() {
            break;
        }
        term = next.scale_rational(&BigRational::new(BigInt::one(), j.clone()));
        total = total.add(&term)?;
        j += 1;
    }
    Ok(total)
}

/// Graded exponential `Σ_j (sG)^j / j!` truncated at `max_order`.
pub fn exp_series(
    generator: &PerturbationSeries,
    scale: &BigRational,
    max_order: u32,
) -> Result<PerturbationSeries, AlgebraError> {
    if !generator.get(0).is_zero() {
        return Err(AlgebraError::Invariant("exponent must vanish at order zero".into()));
    }
    let scaled_gen = generator.scale_rational(scale).truncate(max_order);
    let mut total = PerturbationSeries::from_orders(
        generator.convention(),
        max_order,
        [(0, OperatorPoly::identity().with_convention(generator.convention()))],
    )?;
    let mut power = total.clone();
    let mut j = BigInt::one();
    loop {
        power = power.star(&scaled_gen, max_order)?;
        if power.is_zero() {
            break;
        }
        let term = power.scale_rational(&BigRational::new(BigInt::one(), falling_factorial(&j)));
        total = total.add(&term)?;
        j += 1;
    }
    Ok(total)
}

fn falling_factorial(n: &BigInt) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n.clone();
    while !k.is_zero() {
        acc *= &k;
        k -= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    #[test]
    fn hamiltonian_pieces() {
        assert_eq!(build_h(HamiltonianPart::H1), OperatorPoly::t(0, 3, GaussianRational::i()));
        assert_eq!(build_h(HamiltonianPart::H2), OperatorPoly::t(0, 4, -1));
        assert_eq!(build_h(HamiltonianPart::H1).apply_pt(), build_h(HamiltonianPart::H1));
        let h = build_h_series();
        assert_eq!(h.apply_pt(), h);
        assert_eq!(h.present_orders(), vec![0, 1, 2]);
    }

    #[test]
    fn fixed_eps_hamiltonian_is_pt_symmetric() {
        let h = build_h_at(&rat(1, 100));
        assert_eq!(h.apply_pt(), h);
        assert!(!h.is_hermitian());
    }

    #[test]
    fn zero_generator_is_identity_conjugation() {
        let gen = PerturbationSeries::new(Convention::Scaled, 5);
        let target = PerturbationSeries::from_orders(
            Convention::Scaled,
            PerturbationSeries::EXACT,
            [(0, OperatorPoly::position())],
        )
        .unwrap();
        let out = conjugate_by_exp(&gen, &target, &rat(-1, 2), 3).unwrap();
        assert_eq!(out.present_orders(), vec![0]);
        assert_eq!(out.get(0), OperatorPoly::position());
    }

    #[test]
    fn depth_is_enforced() {
        let gen = PerturbationSeries::new(Convention::Scaled, 4);
        let err = conjugate_by_exp(&gen, &build_h_series(), &rat(1, 2), 6).unwrap_err();
        assert!(matches!(err, AlgebraError::InsufficientDepth { requested: 6, available: 4 }));
    }

    #[test]
    fn exp_of_generator_inverts() {
        let g = PerturbationSeries::from_orders(
            Convention::Scaled,
            6,
            [(1, OperatorPoly::t(3, 0, 1) + OperatorPoly::t(1, 2, 2))],
        )
        .unwrap();
        let a = exp_series(&g, &rat(1, 1), 6).unwrap();
        let b = exp_series(&g, &rat(-1, 1), 6).unwrap();
        let prod = a.star(&b, 6).unwrap();
        assert_eq!(prod.present_orders(), vec![0]);
        assert_eq!(prod.get(0), OperatorPoly::identity());
    }
}
