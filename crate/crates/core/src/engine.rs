//! Order-by-order construction of the metric generator `Q`, the equivalent
//! Hermitian Hamiltonian `h`, and the physical observables.
//!
//! Everything is exact. `H₀` is quadratic, so `[H₀, ·]` acts on symbols as the
//! first-order operator `i(𝓜² x ∂_p − p ∂_x)`; restricted to symbols that are
//! odd in `p` it is injective and triangular, which is what
//! [`solve_adjoint_equation`] exploits.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::coeff::{int, rat, CoeffValue, GaussianRational, Param, ParamExponents};
use crate::error::AlgebraError;
use crate::series::{build_h, build_h_series, conjugate_by_exp, HamiltonianPart, PerturbationSeries};
use crate::symbol::{BasisKey, Convention, OperatorPoly};

/// Deepest generator order supported.
pub const MAX_Q_ORDER: u32 = 7;
/// Deepest Hermitian-Hamiltonian order supported.
pub const MAX_H_ORDER: u32 = 6;

/// Solve `[H₀, Q] = rhs` for the unique `Q` that is odd under `p → −p`.
pub fn solve_adjoint_equation(rhs: &OperatorPoly) -> Result<OperatorPoly, AlgebraError> {
    if rhs.convention() != Convention::Scaled {
        return Err(AlgebraError::ConventionMismatch {
            left: Convention::Scaled,
            right: rhs.convention(),
        });
    }
    // D Q = −i·rhs with D = 𝓜² x∂_p − p∂_x.
    let minus_i = -GaussianRational::i();
    let target = rhs.scale_gaussian(&minus_i);

    let mut obstruction: Vec<BasisKey> = target.keys().filter(|k| k.r % 2 == 1).copied().collect();

    let mut by_degree: BTreeMap<u32, BTreeMap<u32, CoeffValue>> = BTreeMap::new();
    for (k, c) in target.terms() {
        by_degree.entry(k.degree()).or_default().insert(k.r, c.clone());
    }

    let inv_m2 = ParamExponents::single(Param::M, -2);
    let mut q = OperatorPoly::scaled_zero();
    for (d, coeffs) in by_degree {
        let rhs_at = |r: u32| coeffs.get(&r).cloned().unwrap_or_default();
        // Unknowns q_r at odd r; equation at even r':
        //   𝓜²(r'+1) q_{r'+1} − (d−r'+1) q_{r'−1} = R_{r'}.
        let mut prev = CoeffValue::zero();
        let mut r_even = 0;
        while r_even <= d {
            let source = rhs_at(r_even) + prev.scale_rational(&int((d - r_even + 1) as i64));
            if r_even < d {
                let next = source
                    .shift(inv_m2)
                    .scale_rational(&rat(1, (r_even + 1) as i64));
                q.add_term(BasisKey::new(r_even + 1, d - r_even - 1), next.clone());
                prev = next;
            } else if !source.is_zero() {
                obstruction.push(BasisKey::new(r_even, d - r_even));
            }
            r_even += 2;
        }
    }

    if obstruction.is_empty() {
        Ok(q)
    } else {
        obstruction.sort();
        obstruction.dedup();
        Err(AlgebraError::Obstruction { monomials: obstruction })
    }
}

/// The generator hierarchy `Q = εQ₁ + ε³Q₃ + …`.
#[derive(Clone, Debug, PartialEq)]
pub struct QHierarchy {
    q: BTreeMap<u32, OperatorPoly>,
    max_order: u32,
}

impl QHierarchy {
    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn get(&self, order: u32) -> OperatorPoly {
        self.q.get(&order).cloned().unwrap_or_else(OperatorPoly::scaled_zero)
    }

    pub fn orders(&self) -> impl Iterator<Item = (u32, &OperatorPoly)> {
        self.q.iter().map(|(k, v)| (*k, v))
    }

    /// The series `Σ ε^k Q_k`. Even orders vanish identically, so the series
    /// is known one order past the deepest odd generator.
    pub fn as_series(&self) -> PerturbationSeries {
        PerturbationSeries::from_orders(
            Convention::Scaled,
            self.max_order + 1,
            self.q.iter().map(|(k, v)| (*k, v.clone())),
        )
        .expect("generator orders are within range")
    }

    /// Keep only the generators through `max_order`.
    pub fn truncated(&self, max_order: u32) -> QHierarchy {
        let max_order = max_order.min(self.max_order);
        let max_order = if max_order.is_multiple_of(2) { max_order.saturating_sub(1) } else { max_order };
        QHierarchy {
            q: self.q.iter().filter(|(k, _)| **k <= max_order).map(|(k, v)| (*k, v.clone())).collect(),
            max_order,
        }
    }

    /// Structural checks: real coefficients, even in `x`, odd in `p`, degree
    /// at most `k + 2` with odd total degree.
    pub fn check_structure(&self) -> Result<(), AlgebraError> {
        for (k, q) in &self.q {
            if !q.is_real() {
                return Err(AlgebraError::Invariant(format!("Q{k} has imaginary coefficients")));
            }
            for key in q.keys() {
                if key.s % 2 != 0 || key.r % 2 != 1 {
                    return Err(AlgebraError::Invariant(format!(
                        "Q{k} term T{key} breaks the x-even / p-odd structure"
                    )));
                }
                if key.degree() > k + 2 {
                    return Err(AlgebraError::Invariant(format!("Q{k} term T{key} exceeds degree {}", k + 2)));
                }
            }
        }
        Ok(())
    }
}

fn check_q_order(max_order: u32) -> Result<(), AlgebraError> {
    if max_order % 2 == 1 && max_order <= MAX_Q_ORDER {
        Ok(())
    } else {
        Err(AlgebraError::UnsupportedOrder(max_order))
    }
}

fn comm(a: &OperatorPoly, b: &OperatorPoly) -> OperatorPoly {
    a.commutator(b).expect("scaled convention throughout")
}

/// Nested left action `[A₁, [A₂, … [A_n, B]]]`.
fn nested(outer: &[&OperatorPoly], inner: &OperatorPoly) -> OperatorPoly {
    outer.iter().rev().fold(inner.clone(), |acc, a| comm(a, &acc))
}

/// Right-hand side of `[H₀, Q_k] = …` in its closed nested-commutator form.
///
/// Needs the generators of lower order in `known`.
pub fn closed_form_rhs(order: u32, known: &BTreeMap<u32, OperatorPoly>) -> Result<OperatorPoly, AlgebraError> {
    let h1 = build_h(HamiltonianPart::H1);
    let h2 = build_h(HamiltonianPart::H2);
    let q = |k: u32| -> Result<&OperatorPoly, AlgebraError> {
        known.get(&k).ok_or_else(|| AlgebraError::InsufficientDepth { requested: order, available: k.saturating_sub(2) })
    };
    let sixth = rat(-1, 6);
    let rhs = match order {
        1 => h1.scale_rational(&int(-2)),
        3 => {
            let q1 = q(1)?;
            nested(&[q1, q1], &h1).scale_rational(&sixth) + comm(q1, &h2)
        }
        5 => {
            let (q1, q3) = (q(1)?, q(3)?);
            (nested(&[q3, q1], &h1) + nested(&[q1, q3], &h1)).scale_rational(&sixth)
                + nested(&[q1, q1, q1, q1], &h1).scale_rational(&rat(1, 360))
                + comm(q3, &h2)
        }
        7 => {
            let (q1, q3, q5) = (q(1)?, q(3)?, q(5)?);
            let second = nested(&[q5, q1], &h1) + nested(&[q3, q3], &h1) + nested(&[q1, q5], &h1);
            let fourth = nested(&[q3, q1, q1, q1], &h1)
                + nested(&[q1, q3, q1, q1], &h1)
                + nested(&[q1, q1, q3, q1], &h1)
                + nested(&[q1, q1, q1, q3], &h1);
            second.scale_rational(&sixth)
                + fourth.scale_rational(&rat(1, 360))
                + nested(&[q1, q1, q1, q1, q1, q1], &h1).scale_rational(&rat(-1, 15120))
                + comm(q5, &h2)
        }
        k => return Err(AlgebraError::UnsupportedOrder(k)),
    };
    Ok(rhs)
}

/// Order-`k` defect of the intertwining condition `e^{−Q} H e^{Q} = 𝒫H𝒫`.
///
/// This is `[𝒞, H] = 0` with `𝒞 = e^{Q}𝒫`, written without the parity
/// operator. With `Q` known through `available`, orders up to `available`
/// are meaningful.
pub fn intertwining_defect(
    q_series: &PerturbationSeries,
    max_order: u32,
) -> Result<PerturbationSeries, AlgebraError> {
    let h = build_h_series();
    let conj = conjugate_by_exp(q_series, &h, &int(1), max_order)?;
    conj.sub(&h.apply_parity().truncate(max_order))
}

/// Right-hand side of `[H₀, Q_k] = …` obtained directly from the graded
/// intertwining condition with all lower generators in place.
pub fn graded_rhs(order: u32, known: &BTreeMap<u32, OperatorPoly>) -> Result<OperatorPoly, AlgebraError> {
    let series = PerturbationSeries::from_orders(
        Convention::Scaled,
        order,
        known.iter().filter(|(k, _)| **k < order).map(|(k, v)| (*k, v.clone())),
    )?;
    Ok(-intertwining_defect(&series, order)?.get(order))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhsRoute {
    /// Nested commutators with fixed coefficients 1/6, 1/360, 1/15120.
    ClosedForm,
    /// Right-hand side read off from graded conjugation of the full `H`.
    Graded,
}

/// Solve the hierarchy through `max_order` (odd, ≤ 7) and verify it.
pub fn build_q_hierarchy(max_order: u32) -> Result<QHierarchy, AlgebraError> {
    build_q_hierarchy_via(max_order, RhsRoute::ClosedForm)
}

pub fn build_q_hierarchy_via(max_order: u32, route: RhsRoute) -> Result<QHierarchy, AlgebraError> {
    check_q_order(max_order)?;
    let mut known = BTreeMap::new();
    for k in (1..=max_order).step_by(2) {
        let rhs = match route {
            RhsRoute::ClosedForm => closed_form_rhs(k, &known)?,
            RhsRoute::Graded => graded_rhs(k, &known)?,
        };
        let qk = solve_adjoint_equation(&rhs)?;
        let h0 = build_h(HamiltonianPart::H0);
        if comm(&h0, &qk) != rhs {
            return Err(AlgebraError::ResidualNonzero { order: k, detail: "solver output".into() });
        }
        known.insert(k, qk);
    }
    let qh = QHierarchy { q: known, max_order };
    qh.check_structure()?;
    Ok(qh)
}

/// Exact residuals of a hierarchy.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    /// `[H₀, Q_k] − rhs_k` with the closed-form right-hand side, per order.
    pub closed_form: BTreeMap<u32, OperatorPoly>,
    /// Defect of `e^{−Q} H e^{Q} = 𝒫H𝒫`, per order through `max_order + 1`.
    pub intertwining: BTreeMap<u32, OperatorPoly>,
}

impl ResidualReport {
    pub fn all_zero(&self) -> bool {
        self.closed_form.values().all(OperatorPoly::is_zero)
            && self.intertwining.values().all(OperatorPoly::is_zero)
    }
}

pub fn residuals(qh: &QHierarchy) -> Result<ResidualReport, AlgebraError> {
    let h0 = build_h(HamiltonianPart::H0);
    let mut closed = BTreeMap::new();
    let mut known = BTreeMap::new();
    for (k, qk) in qh.orders() {
        let rhs = closed_form_rhs(k, &known)?;
        closed.insert(k, comm(&h0, qk) - rhs);
        known.insert(k, qk.clone());
    }
    let top = qh.max_order() + 1;
    let defect = intertwining_defect(&qh.as_series(), top)?;
    let intertwining = (0..=top).map(|k| (k, defect.get(k))).collect();
    Ok(ResidualReport { closed_form: closed, intertwining })
}

/// `h = Σ ε^i h⁽ⁱ⁾` with only even orders present.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianSeries {
    h: BTreeMap<u32, OperatorPoly>,
    max_order: u32,
}

impl HermitianSeries {
    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn get(&self, order: u32) -> OperatorPoly {
        self.h.get(&order).cloned().unwrap_or_else(OperatorPoly::scaled_zero)
    }

    pub fn as_series(&self) -> PerturbationSeries {
        PerturbationSeries::from_orders(
            Convention::Scaled,
            self.max_order,
            self.h.iter().map(|(k, v)| (*k, v.clone())),
        )
        .expect("orders within range")
    }
}

/// `h⁽ⁱ⁾` from the closed nested-commutator combinations of `H₁` and `Q`.
pub fn closed_form_h(order: u32, qh: &QHierarchy) -> Result<OperatorPoly, AlgebraError> {
    let h1 = build_h(HamiltonianPart::H1);
    let need = |k: u32| -> Result<OperatorPoly, AlgebraError> {
        if k > qh.max_order() {
            Err(AlgebraError::InsufficientDepth { requested: order, available: qh.max_order() + 1 })
        } else {
            Ok(qh.get(k))
        }
    };
    let quarter = rat(1, 4);
    let c192 = rat(-1, 192);
    // Left-nested [[…[H₁, A₁], A₂]…, A_n].
    let left = |ops: &[&OperatorPoly]| ops.iter().fold(h1.clone(), |acc, a| comm(&acc, a));
    Ok(match order {
        0 => build_h(HamiltonianPart::H0),
        2 => {
            let q1 = need(1)?;
            build_h(HamiltonianPart::H2) + left(&[&q1]).scale_rational(&quarter)
        }
        4 => {
            let (q1, q3) = (need(1)?, need(3)?);
            left(&[&q3]).scale_rational(&quarter) + left(&[&q1, &q1, &q1]).scale_rational(&c192)
        }
        6 => {
            let (q1, q3, q5) = (need(1)?, need(3)?, need(5)?);
            left(&[&q5]).scale_rational(&quarter)
                + (left(&[&q1, &q1, &q3]) + left(&[&q1, &q3, &q1]) + left(&[&q3, &q1, &q1]))
                    .scale_rational(&c192)
                + left(&[&q1, &q1, &q1, &q1, &q1]).scale_rational(&rat(1, 7680))
        }
        k if k % 2 == 1 => OperatorPoly::scaled_zero(),
        k => return Err(AlgebraError::UnsupportedOrder(k)),
    })
}

/// `h = e^{−Q/2} H e^{Q/2}` by graded conjugation of the full Hamiltonian.
pub fn direct_h(qh: &QHierarchy, max_order: u32) -> Result<PerturbationSeries, AlgebraError> {
    conjugate_by_exp(&qh.as_series(), &build_h_series(), &rat(1, 2), max_order)
}

/// Build `h⁽⁰⁾ … h⁽ᵐᵃˣ⁾` from the closed forms, cross-checked exactly against
/// direct conjugation; also asserts Hermiticity and vanishing odd orders.
pub fn build_hermitian_h(qh: &QHierarchy, max_order: u32) -> Result<HermitianSeries, AlgebraError> {
    if max_order % 2 == 1 || max_order > MAX_H_ORDER {
        return Err(AlgebraError::UnsupportedOrder(max_order));
    }
    if max_order > qh.max_order() + 1 {
        return Err(AlgebraError::InsufficientDepth {
            requested: max_order,
            available: qh.max_order() + 1,
        });
    }
    let direct = direct_h(qh, max_order)?;
    let mut h = BTreeMap::new();
    for order in 0..=max_order {
        let closed = closed_form_h(order, qh)?;
        let via_bch = direct.get(order);
        if closed != via_bch {
            return Err(AlgebraError::ResidualNonzero {
                order,
                detail: format!("closed form and direct conjugation differ by {}", closed - via_bch),
            });
        }
        if order % 2 == 1 && !closed.is_zero() {
            return Err(AlgebraError::Invariant(format!("h^({order}) does not vanish")));
        }
        if !closed.is_hermitian() {
            return Err(AlgebraError::Invariant(format!("h^({order}) is not Hermitian")));
        }
        if !closed.is_zero() {
            h.insert(order, closed);
        }
    }
    Ok(HermitianSeries { h, max_order })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    X,
    P,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSeries {
    pub which: Observable,
    pub series: PerturbationSeries,
}

impl ObservableSeries {
    /// `PT 𝐗 PT = −𝐗` and `PT 𝐏 PT = 𝐏`, order by order.
    pub fn is_pt_covariant(&self) -> bool {
        let mapped = self.series.apply_pt();
        match self.which {
            Observable::X => mapped == self.series.neg(),
            Observable::P => mapped == self.series,
        }
    }
}

/// Physical observable `e^{Q/2} A e^{−Q/2}` through `max_order` (≤ 3).
pub fn build_observable(which: Observable, qh: &QHierarchy, max_order: u32) -> Result<ObservableSeries, AlgebraError> {
    if max_order > 3 {
        return Err(AlgebraError::UnsupportedOrder(max_order));
    }
    let base = match which {
        Observable::X => OperatorPoly::position(),
        Observable::P => OperatorPoly::momentum(),
    };
    let target = PerturbationSeries::from_orders(Convention::Scaled, PerturbationSeries::EXACT, [(0, base)])?;
    let series = conjugate_by_exp(&qh.as_series(), &target, &rat(-1, 2), max_order)?;
    let obs = ObservableSeries { which, series };
    if !obs.is_pt_covariant() {
        return Err(AlgebraError::Invariant(format!("{which:?} series is not PT-covariant")));
    }
    Ok(obs)
}

/// The assembled series `Q = Σ ε^k Q_k` for export.
pub fn build_q_total(qh: &QHierarchy) -> PerturbationSeries {
    qh.as_series()
}

/// Symbol-level derivative helper shared by tests: `[X, f] = i ∂_p f`.
pub fn momentum_derivative(f: &OperatorPoly) -> OperatorPoly {
    let mut out = OperatorPoly::zero(f.convention());
    for (k, c) in f.terms() {
        if k.r > 0 {
            out.add_term(BasisKey::new(k.r - 1, k.s), c.scale_rational(&int(k.r as i64)));
        }
    }
    out
}

/// Poisson bracket `{f, g} = ∂_x f ∂_p g − ∂_p f ∂_x g` of symbols.
pub fn poisson_bracket(f: &OperatorPoly, g: &OperatorPoly) -> OperatorPoly {
    let mut out = OperatorPoly::scaled_zero();
    for (ka, ca) in f.terms() {
        for (kb, cb) in g.terms() {
            let c = ca * cb;
            let r = ka.r + kb.r;
            let s = ka.s + kb.s;
            if ka.s > 0 && kb.r > 0 {
                let w = BigRational::from_integer((ka.s * kb.r).into());
                out.add_term(BasisKey::new(r - 1, s - 1), c.scale_rational(&w));
            }
            if ka.r > 0 && kb.s > 0 {
                let w = -BigRational::from_integer((ka.r * kb.s).into());
                out.add_term(BasisKey::new(r - 1, s - 1), c.scale_rational(&w));
            }
        }
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;

    fn q1_expected() -> OperatorPoly {
        OperatorPoly::t(3, 0, CoeffValue::m_pow(-4, 3, -4)) + OperatorPoly::t(1, 2, CoeffValue::m_pow(-2, 1, -2))
    }

    #[test]
    fn first_generator() {
        let rhs = build_h(HamiltonianPart::H1).scale_rational(&int(-2));
        assert_eq!(solve_adjoint_equation(&rhs).unwrap(), q1_expected());
        let h0 = build_h(HamiltonianPart::H0);
        assert_eq!(comm(&h0, &q1_expected()), OperatorPoly::t(0, 3, GaussianRational::imag(int(-2))));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        assert!(solve_adjoint_equation(&OperatorPoly::scaled_zero()).unwrap().is_zero());
    }

    #[test]
    fn obstruction_is_reported() {
        // H₀ itself commutes with H₀, so an rhs along T[2,0] (after the −i
        // rotation) has no p-odd preimage.
        let rhs = OperatorPoly::t(2, 0, GaussianRational::i());
        match solve_adjoint_equation(&rhs) {
            Err(AlgebraError::Obstruction { monomials }) => assert_eq!(monomials, vec![BasisKey::new(2, 0)]),
            other => panic!("unexpected {other:?}"),
        }
        let odd = OperatorPoly::t(1, 0, 1);
        assert!(matches!(solve_adjoint_equation(&odd), Err(AlgebraError::Obstruction { .. })));
    }

    #[test]
    fn unsupported_orders() {
        assert!(build_q_hierarchy(2).is_err());
        assert!(build_q_hierarchy(9).is_err());
    }
}
