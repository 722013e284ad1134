//! Published coefficient tables, transcribed term by term, and exact diffs
//! between them and the computed results.
//!
//! Tables printed as products of `X` and `P` in a fixed order are rebuilt
//! from those words with the star product, so comparison happens in the
//! `T_{r,s}` basis.

use std::fmt;

use serde::Serialize;

use crate::coeff::{rat, CoeffValue, GaussianRational, Param, ParamExponents};
use crate::engine::Observable;
use crate::error::AlgebraError;
use crate::symbol::{BasisKey, Convention, OperatorPoly};
use crate::units::{scaled_word_to_physical, ClassicalHamiltonian, EnergyFormula, NumberPoly};

/// `(numerator, denominator, power of 𝓜)`.
type MTerm = (i64, i64, i32);

fn m_sum(parts: &[MTerm]) -> CoeffValue {
    let mut c = CoeffValue::zero();
    for &(n, d, e) in parts {
        c += CoeffValue::m_pow(n, d, e);
    }
    c
}

fn table(rows: &[(u32, u32, &[MTerm])]) -> OperatorPoly {
    let mut op = OperatorPoly::scaled_zero();
    for &(r, s, parts) in rows {
        op.add_term(BasisKey::new(r, s), m_sum(parts));
    }
    op
}

/// Printed metric generator coefficients `Q_1, Q_3, Q_5, Q_7`.
pub fn q_table(order: u32) -> Option<OperatorPoly> {
    let op = match order {
        1 => table(&[(3, 0, &[(-4, 3, -4)]), (1, 2, &[(-2, 1, -2)])]),
        3 => table(&[
            (5, 0, &[(128, 15, -10), (-32, 5, -8)]),
            (3, 2, &[(40, 3, -8), (-16, 1, -6)]),
            (1, 4, &[(8, 1, -6), (-8, 1, -4)]),
            (1, 0, &[(-12, 1, -8), (8, 1, -6)]),
        ]),
        5 => table(&[
            (1, 2, &[(6368, 15, -12), (-128, 1, -10), (128, 1, -8)]),
            (1, 6, &[(-64, 1, -10), (32, 1, -8), (-32, 1, -6)]),
            (3, 0, &[(24736, 45, -14), (-256, 1, -12), (640, 3, -10)]),
            (3, 4, &[(-512, 3, -12), (352, 3, -10), (-128, 1, -8)]),
            (5, 2, &[(-544, 3, -14), (128, 1, -12), (-128, 1, -10)]),
            (7, 0, &[(-320, 3, -16), (256, 7, -14), (-256, 7, -12)]),
        ]),
        7 => table(&[
            (9, 0, &[(553984, 315, -22), (-124416, 315, -20), (69632, 315, -18), (-2048, 9, -16)]),
            (7, 2, &[(97792, 35, -20), (-62208, 35, -18), (34816, 35, -16), (-1024, 1, -14)]),
            (5, 4, &[(377344, 105, -18), (-35456, 15, -16), (7424, 5, -14), (-1536, 1, -12)]),
            (3, 6, &[(721024, 315, -16), (-4096, 3, -14), (2432, 3, -12), (-2560, 3, -10)]),
            (1, 8, &[(1792, 3, -14), (-256, 1, -12), (128, 1, -10), (-128, 1, -8)]),
            (5, 0, &[(-2209024, 105, -20), (619648, 75, -18), (-54272, 15, -16), (3584, 1, -14)]),
            (3, 2, &[(-2875648, 105, -18), (141824, 15, -16), (-15616, 3, -14), (5120, 1, -12)]),
            (1, 4, &[(-390336, 35, -16), (40832, 15, -14), (-1216, 1, -12), (1280, 1, -10)]),
            (1, 0, &[(46976, 5, -18), (-49472, 15, -16), (1536, 1, -14), (-1280, 1, -12)]),
        ]),
        _ => return None,
    };
    Some(op)
}

/// Printed coefficients of the equivalent Hermitian Hamiltonian.
pub fn h_table(order: u32) -> Option<OperatorPoly> {
    let op = match order {
        0 => table(&[(2, 0, &[(1, 2, 0)]), (0, 2, &[(1, 2, 2)])]),
        2 => table(&[
            (0, 0, &[(-1, 2, -4)]),
            (0, 4, &[(3, 2, -2), (-1, 1, 0)]),
            (2, 2, &[(3, 1, -4)]),
        ]),
        4 => table(&[
            (4, 2, &[(-36, 1, -10), (24, 1, -8)]),
            (2, 0, &[(27, 1, -10), (-24, 1, -8)]),
            (2, 4, &[(-51, 2, -8), (36, 1, -6)]),
            (0, 2, &[(179, 24, -8), (-12, 1, -6)]),
            (0, 6, &[(-7, 2, -6), (6, 1, -4)]),
            (6, 0, &[(2, 1, -12)]),
        ]),
        _ => return None,
    };
    Some(op)
}

/// Ordered product of `X` and `P` factors, e.g. `"XPP"` for `X P P`.
pub fn ordered_word(letters: &str) -> Result<OperatorPoly, AlgebraError> {
    let mut out = OperatorPoly::identity();
    for ch in letters.chars() {
        let f = match ch {
            'X' => OperatorPoly::position(),
            'P' => OperatorPoly::momentum(),
            other => return Err(AlgebraError::Invariant(format!("unknown operator letter {other:?}"))),
        };
        out = out.star(&f)?;
    }
    Ok(out)
}

fn word_sum(rows: &[(&str, GaussianRational, &[MTerm])]) -> OperatorPoly {
    let mut op = OperatorPoly::scaled_zero();
    for (w, phase, parts) in rows {
        let c = m_sum(parts).scale(phase);
        op = op + ordered_word(w).expect("fixed words use X and P only").scale(&c);
    }
    op
}

fn re(n: i64, d: i64) -> GaussianRational {
    GaussianRational::real(rat(n, d))
}

fn im(n: i64, d: i64) -> GaussianRational {
    GaussianRational::imag(rat(n, d))
}

/// Printed physical observables, order by order, converted to `T_{r,s}`.
pub fn observable_table(which: Observable, order: u32) -> Option<OperatorPoly> {
    let one = re(1, 1);
    let i = im(1, 1);
    let op = match (which, order) {
        (Observable::X, 0) => OperatorPoly::position(),
        (Observable::X, 1) => word_sum(&[("PP", i.clone(), &[(2, 1, -4)]), ("XX", i.clone(), &[(1, 1, -2)])]),
        (Observable::X, 2) => word_sum(&[
            ("XPP", one.clone(), &[(2, 1, -6)]),
            ("P", i.clone(), &[(-2, 1, -6)]),
            ("XXX", one.clone(), &[(-1, 1, -4)]),
        ]),
        (Observable::X, 3) => word_sum(&[
            ("PPPP", i.clone(), &[(-172, 15, -10), (16, 1, -8)]),
            ("XXXX", i.clone(), &[(-5, 1, -6), (4, 1, -4)]),
            ("XP", one.clone(), &[(-128, 3, -8), (48, 1, -6)]),
            ("XXPP", i.clone(), &[(64, 3, -8), (-24, 1, -6)]),
            ("", i.clone(), &[(50, 3, -8), (-16, 1, -6)]),
        ]),
        (Observable::P, 0) => OperatorPoly::momentum(),
        (Observable::P, 1) => word_sum(&[("XP", i.clone(), &[(-2, 1, -2)]), ("", one.clone(), &[(-1, 1, -2)])]),
        (Observable::P, 2) => word_sum(&[
            ("PPP", one.clone(), &[(2, 1, -6)]),
            ("XXP", one.clone(), &[(-1, 1, -4)]),
            ("X", i.clone(), &[(1, 1, -4)]),
        ]),
        (Observable::P, 3) => word_sum(&[
            ("XPPP", im(-1, 1), &[(16, 1, -8), (-16, 1, -6)]),
            ("PP", re(-3, 2), &[(16, 1, -8), (-16, 1, -6)]),
            ("XXXP", im(-1, 1), &[(16, 1, -6), (-16, 1, -4)]),
            ("XX", re(-3, 2), &[(16, 1, -6), (-16, 1, -4)]),
        ]),
        _ => return None,
    };
    Some(op)
}

/// Printed ε² energy coefficient
/// `¼[(30n²+30n+11)/(2𝓜⁴) − (6n²+6n+3)]`.
pub fn energy_second_order_table() -> NumberPoly {
    let m4 = NumberPoly::with_rational(&[rat(11, 8), rat(30, 8), rat(30, 8)], ParamExponents::single(Param::M, -4));
    let rest = NumberPoly::with_rational(&[rat(-3, 4), rat(-6, 4), rat(-6, 4)], ParamExponents::ONE);
    m4.add(&rest)
}

fn phys(pairs: &[(Param, i32)]) -> ParamExponents {
    ParamExponents::from_pairs(pairs)
}

fn pc(c: GaussianRational, pairs: &[(Param, i32)]) -> CoeffValue {
    CoeffValue::monomial(c, phys(pairs))
}

/// Printed physical-unit ε² coefficient of `h(x,p)` in the `S_{r,s}` basis,
/// with the `x p` and `x² p²` words expanded. `x2p2_sign` is the sign in
/// front of the `x²p²` word (the printed table has −1).
pub fn physical_h2_table(x2p2_sign: i64) -> Result<OperatorPoly, AlgebraError> {
    use Param::{Hbar, Mass, Mu};
    let mut op = OperatorPoly::zero(Convention::Physical);
    op.add_term(
        BasisKey::new(0, 4),
        pc(re(3, 2), &[(Mu, -2)]) + pc(re(-1, 1), &[(Mass, 1), (Hbar, 2)]),
    );
    op.add_term(BasisKey::new(0, 0), pc(re(-2, 1), &[(Mass, -1), (Hbar, 2), (Mu, -4)]));
    let xp = scaled_word_to_physical(&ordered_word("XP")?, 1)?;
    op = op + xp.scale(&pc(im(-6, 1), &[(Mass, -1), (Hbar, 1), (Mu, -4)]));
    let x2p2 = scaled_word_to_physical(&ordered_word("XXPP")?, 2)?;
    op = op + x2p2.scale(&pc(re(3 * x2p2_sign, 1), &[(Mass, -1), (Mu, -4)]));
    Ok(op)
}

/// Classical Hamiltonian `p²/2M(x) + ½μ²x² + (3ε²/2μ²)x⁴` with
/// `1/M(x) = (1 + 6 σ μ⁻⁴ ε² x²)/m`. The printed mass function has `σ = −1`.
pub fn classical_table(sigma: i64) -> ClassicalHamiltonian {
    use Param::{Mass, Mu};
    let mut hc = ClassicalHamiltonian::new();
    hc.add_term(0, 2, 0, pc(re(1, 2), &[(Mass, -1)]));
    hc.add_term(0, 0, 2, pc(re(1, 2), &[(Mu, 2)]));
    hc.add_term(2, 0, 4, pc(re(3, 2), &[(Mu, -2)]));
    hc.add_term(2, 2, 2, pc(re(3 * sigma, 1), &[(Mass, -1), (Mu, -4)]));
    hc
}

/// One coefficient that differs between computed and printed values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub basis: String,
    pub params: String,
    pub computed: String,
    pub published: String,
}

/// Result of comparing one computed object with its printed counterpart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableComparison {
    pub name: String,
    pub mismatches: Vec<Mismatch>,
}

impl TableComparison {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for TableComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.matches() {
            return write!(f, "{}: matches", self.name);
        }
        write!(f, "{}: {} coefficient(s) differ", self.name, self.mismatches.len())?;
        for m in &self.mismatches {
            let params = if m.params.is_empty() { "1".to_string() } else { m.params.clone() };
            write!(
                f,
                "\n  {} {}: computed {}, printed {}",
                m.basis, params, m.computed, m.published
            )?;
        }
        Ok(())
    }
}

fn diff_coeffs(basis: String, computed: &CoeffValue, published: &CoeffValue, out: &mut Vec<Mismatch>) {
    let mut keys: Vec<ParamExponents> = computed.terms().map(|(k, _)| *k).collect();
    keys.extend(published.terms().map(|(k, _)| *k));
    keys.sort();
    keys.dedup();
    for k in keys {
        let a = computed.get(&k);
        let b = published.get(&k);
        if a != b {
            out.push(Mismatch {
                basis: basis.clone(),
                params: k.to_string(),
                computed: a.to_string(),
                published: b.to_string(),
            });
        }
    }
}

/// Exact coefficient-by-coefficient comparison of two operators.
pub fn compare_operators(name: &str, computed: &OperatorPoly, published: &OperatorPoly) -> TableComparison {
    let mut keys: Vec<BasisKey> = computed.keys().copied().collect();
    keys.extend(published.keys().copied());
    keys.sort();
    keys.dedup();
    let letter = match computed.convention() {
        Convention::Scaled => "T",
        Convention::Physical => "S",
    };
    let mut mismatches = Vec::new();
    for k in keys.into_iter().rev() {
        diff_coeffs(format!("{letter}{k}"), &computed.coeff(k), &published.coeff(k), &mut mismatches);
    }
    TableComparison { name: name.to_string(), mismatches }
}

pub fn compare_number_polys(name: &str, computed: &NumberPoly, published: &NumberPoly) -> TableComparison {
    let len = computed.coeffs().len().max(published.coeffs().len());
    let mut mismatches = Vec::new();
    for k in 0..len {
        diff_coeffs(format!("n^{k}"), &computed.coeff(k), &published.coeff(k), &mut mismatches);
    }
    TableComparison { name: name.to_string(), mismatches }
}

pub fn compare_classical(name: &str, computed: &ClassicalHamiltonian, published: &ClassicalHamiltonian) -> TableComparison {
    let mut keys: Vec<(u32, u32, u32)> = computed.terms().map(|(k, _)| *k).collect();
    keys.extend(published.terms().map(|(k, _)| *k));
    keys.sort();
    keys.dedup();
    let mut mismatches = Vec::new();
    for (k, r, s) in keys {
        diff_coeffs(
            format!("eps^{k} p^{r} x^{s}"),
            &computed.coeff(k, r, s),
            &published.coeff(k, r, s),
            &mut mismatches,
        );
    }
    TableComparison { name: name.to_string(), mismatches }
}

/// How the computed ε² energy coefficient relates to the printed formula.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyComparison {
    pub comparison: TableComparison,
    /// The `𝓜⁻⁴` part agrees with the printed `(30n²+30n+11)/(8𝓜⁴)`.
    pub m4_block_matches: bool,
    /// The computed remainder equals the printed remainder times `𝓜⁻²`.
    pub remainder_missing_m2: bool,
}

pub fn compare_energy(formula: &EnergyFormula) -> EnergyComparison {
    let printed = energy_second_order_table();
    let comparison = compare_number_polys("energy eps^2 coefficient", &formula.second, &printed);
    let m4 = |p: &NumberPoly| p.filter(|k| k.get(Param::M) == -4);
    let rest = |p: &NumberPoly| p.filter(|k| k.get(Param::M) != -4);
    let shifted = rest(&printed).scale(&CoeffValue::m_pow(1, 1, -2));
    EnergyComparison {
        comparison,
        m4_block_matches: m4(&formula.second) == m4(&printed),
        remainder_missing_m2: rest(&formula.second) == shifted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_reduce_to_symmetric_basis() {
        // X P = T[1,1] + i/2
        let xp = ordered_word("XP").unwrap();
        assert_eq!(xp, OperatorPoly::t(1, 1, 1) + OperatorPoly::t(0, 0, im(1, 2)));
        // X² P² = T[2,2] + 2i T[1,1] − 1/2
        let w = ordered_word("XXPP").unwrap();
        let expect = OperatorPoly::t(2, 2, 1) + OperatorPoly::t(1, 1, im(2, 1)) + OperatorPoly::t(0, 0, re(-1, 2));
        assert_eq!(w, expect);
        assert!(ordered_word("XQ").is_err());
    }

    #[test]
    fn printed_p_corrections_are_symmetric_words() {
        // The printed ε² and ε³ momentum words collapse to single T's.
        let p2 = observable_table(Observable::P, 2).unwrap();
        let expect = table(&[(3, 0, &[(2, 1, -6)]), (1, 2, &[(-1, 1, -4)])]);
        assert_eq!(p2, expect);
        let p1 = observable_table(Observable::P, 1).unwrap();
        assert_eq!(p1, OperatorPoly::t(1, 1, CoeffValue::m_pow(1, 1, -2).scale(&im(-2, 1))));
    }

    #[test]
    fn physical_words_carry_hbar() {
        let xp = scaled_word_to_physical(&ordered_word("XP").unwrap(), 1).unwrap();
        assert_eq!(xp.coeff(BasisKey::new(1, 1)), CoeffValue::one());
        assert_eq!(
            xp.coeff(BasisKey::new(0, 0)),
            CoeffValue::monomial(im(1, 2), ParamExponents::single(Param::Hbar, 1))
        );
    }

    #[test]
    fn comparison_lists_each_differing_monomial() {
        let a = OperatorPoly::t(1, 0, CoeffValue::m_pow(1, 1, -2) + CoeffValue::m_pow(1, 1, -4));
        let b = OperatorPoly::t(1, 0, CoeffValue::m_pow(1, 1, -2));
        let c = compare_operators("demo", &a, &b);
        assert_eq!(c.mismatches.len(), 1);
        assert_eq!(c.mismatches[0].params, "M^-4");
        assert!(compare_operators("same", &a, &a).matches());
    }
}
