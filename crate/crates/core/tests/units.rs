use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use weylpt_core::coeff::{rat, ParamValues};
use weylpt_core::reference::{classical_table, compare_energy, physical_h2_table};
use weylpt_core::units::*;
use weylpt_core::*;

type Mat = Vec<Vec<BigRational>>;

fn zeros(n: usize) -> Mat {
    vec![vec![BigRational::zero(); n]; n]
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    c[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    c
}

fn half_anticommutator(a: &Mat, b: &Mat) -> Mat {
    let (ab, ba) = (mul(a, b), mul(b, a));
    let half = rat(1, 2);
    (0..a.len())
        .map(|i| (0..a.len()).map(|j| (&ab[i][j] + &ba[i][j]) * &half).collect())
        .collect()
}

/// `⟨n|T_{r,s}|n⟩` from ladder matrices in the unnormalised basis
/// `a†^n|0⟩`, where `a|n⟩ = n|n−1⟩` and `a†|n⟩ = |n+1⟩`. Diagonal elements
/// are the same as in the normalised basis. Returns the rational factor
/// multiplying `i^r 2^{−(r+s)/2} 𝓜^{(r−s)/2}`.
fn ladder_oracle(r: u32, s: u32, n: usize) -> BigRational {
    let dim = n + (r + s) as usize + 2;
    let mut a = zeros(dim);
    let mut ad = zeros(dim);
    for k in 1..dim {
        a[k - 1][k] = BigRational::from_integer(BigInt::from(k));
        ad[k][k - 1] = BigRational::one();
    }
    let x: Mat = (0..dim).map(|i| (0..dim).map(|j| &a[i][j] + &ad[i][j]).collect()).collect();
    let p: Mat = (0..dim).map(|i| (0..dim).map(|j| &ad[i][j] - &a[i][j]).collect()).collect();
    let mut t: Mat = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for _ in 0..s {
        t = half_anticommutator(&x, &t);
    }
    for _ in 0..r {
        t = half_anticommutator(&p, &t);
    }
    t[n][n].clone()
}

#[test]
fn expectations_agree_with_ladder_oracle() {
    for r in 0..=6u32 {
        for s in 0..=6u32 {
            if (r + s) % 2 == 1 {
                continue;
            }
            let poly = number_state_expectation(&OperatorPoly::t(r, s, 1)).unwrap();
            for n in 0..=5u64 {
                let oracle = ladder_oracle(r, s, n as usize);
                let scale = GaussianRational::i_pow(r as i64)
                    .scale(&BigRational::new(1.into(), BigInt::from(2).pow((r + s) / 2)));
                let expect = CoeffValue::monomial(scale.scale(&oracle), ParamExponents::single(Param::M, (r as i32 - s as i32) / 2));
                assert_eq!(poly.at(n), expect, "T[{r},{s}] at n={n}");
            }
        }
    }
}

#[test]
fn quartic_and_mixed_expectations() {
    // ⟨n|X⁴|n⟩ = (6n²+6n+3)/(4𝓜²), ⟨n|T[2,2]|n⟩ = (2n²+2n+1)/4
    let x4 = number_state_expectation(&OperatorPoly::t(0, 4, 1)).unwrap();
    assert_eq!(x4, NumberPoly::with_rational(&[rat(3, 4), rat(6, 4), rat(6, 4)], ParamExponents::single(Param::M, -2)));
    let t22 = number_state_expectation(&OperatorPoly::t(2, 2, 1)).unwrap();
    assert_eq!(t22, NumberPoly::with_rational(&[rat(1, 4), rat(2, 4), rat(2, 4)], ParamExponents::ONE));
}

#[test]
fn second_order_energy_is_frozen() {
    let qh = build_q_hierarchy(3).unwrap();
    let hs = build_hermitian_h(&qh, 2).unwrap();
    let ef = energy_formula(&hs).unwrap();
    let m4 = NumberPoly::with_rational(&[rat(11, 8), rat(30, 8), rat(30, 8)], ParamExponents::single(Param::M, -4));
    let m2 = NumberPoly::with_rational(&[rat(-3, 4), rat(-6, 4), rat(-6, 4)], ParamExponents::single(Param::M, -2));
    assert_eq!(ef.second, m4.add(&m2));
    assert_eq!(ef.zeroth, oscillator_levels());
    // At 𝓜 = 1: (18n² + 18n + 5)/8.
    assert_eq!(ef.second.eval(3, &ParamValues::scaled(1.0)).0, (18.0 * 9.0 + 54.0 + 5.0) / 8.0);
    let cmp = compare_energy(&ef);
    assert!(cmp.m4_block_matches);
    assert!(cmp.remainder_missing_m2);
    assert!(!cmp.comparison.matches());
}

fn physical_h() -> PhysicalSeries {
    let qh = build_q_hierarchy(3).unwrap();
    let hs = build_hermitian_h(&qh, 2).unwrap();
    to_physical(&hs.as_series().truncate(3), ScaledKind::Hamiltonian).unwrap()
}

#[test]
fn physical_hamiltonian_order_zero() {
    let ph = physical_h();
    let h0 = ph.get(0);
    assert_eq!(h0.coeff(BasisKey::new(2, 0)), CoeffValue::monomial(GaussianRational::real(rat(1, 2)), ParamExponents::single(Param::Mass, -1)));
    assert_eq!(h0.coeff(BasisKey::new(0, 2)), CoeffValue::monomial(GaussianRational::real(rat(1, 2)), ParamExponents::single(Param::Mu, 2)));
    assert!(ph.get(1).is_zero());
}

#[test]
fn physical_second_order_needs_positive_mixed_term() {
    let h2 = physical_h().get(2);
    assert_eq!(h2, physical_h2_table(1).unwrap());
    assert_ne!(h2, physical_h2_table(-1).unwrap());
}

#[test]
fn classical_limit_and_position_dependent_mass() {
    let hc = classical_limit(&physical_h()).unwrap();
    assert!(hc.is_real());
    assert_eq!(hc, classical_table(1));
    let inv = hc.inverse_mass();
    let six = CoeffValue::monomial(
        GaussianRational::real(rat(6, 1)),
        ParamExponents::from_pairs(&[(Param::Mass, -1), (Param::Mu, -4)]),
    );
    assert_eq!(inv[&(2, 2)], six);
    assert!(!hc.difference(&classical_table(-1)).is_zero());
}

#[test]
fn generator_to_physical_keeps_dimensionless_scale() {
    let qh = build_q_hierarchy(1).unwrap();
    let q = to_physical(&qh.as_series(), ScaledKind::Generator).unwrap();
    // Q1 = −(4/3)𝓜⁻⁴T[3,0] − 2𝓜⁻²T[1,2]  →  ε m ħ³ times the substituted terms.
    let expect = CoeffValue::monomial(
        GaussianRational::real(rat(-4, 3)),
        ParamExponents::from_pairs(&[(Param::Mass, -1), (Param::Hbar, -1), (Param::Mu, -4)]),
    );
    assert_eq!(q.get(1).coeff(BasisKey::new(3, 0)), expect);
}
