use num_complex::Complex64;
use weylpt_core::units::number_state_expectation;
use weylpt_core::*;
use weylpt_numeric::matrix::{interior, position_momentum};
use weylpt_numeric::position::{apply_weyl, PolyGauss};
use weylpt_numeric::wavefunction::{hermite_functions, wavefunction_coefficients};
use weylpt_numeric::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn position_squared_diagonal() {
    let m = matrixize(&OperatorPoly::t(0, 2, 1), 40, 1.0).unwrap();
    for (n, d) in m.diagonal().iter().enumerate() {
        assert!((d - c(n as f64 + 0.5)).norm() < 1e-12);
    }
}

#[test]
fn mixed_quartic_diagonal() {
    let m = matrixize(&OperatorPoly::t(2, 2, 1), 40, 1.0).unwrap();
    for n in 0..=30 {
        let nf = n as f64;
        let expect = (2.0 * nf * nf + 2.0 * nf + 1.0) / 4.0;
        assert!((m.entries[(n, n)] - c(expect)).norm() < 1e-10, "n={n}");
    }
}

/// Explicit averages over orderings, built from plain products on a padded space.
#[test]
fn recursion_matches_explicit_symmetrised_averages() {
    let dim = 30;
    let pad = dim + 8;
    let (x, p) = position_momentum(pad, 1.4);
    let words = |ws: &[&str]| -> CMatrix {
        let mut total = CMatrix::zeros(pad, pad);
        for w in ws {
            let mut m = CMatrix::identity(pad, pad);
            for ch in w.chars() {
                m = if ch == 'X' { m * &x } else { m * &p };
            }
            total += m;
        }
        total / c(ws.len() as f64)
    };
    let cases: [(u32, u32, Vec<&str>); 4] = [
        (1, 2, vec!["PXX", "XPX", "XXP"]),
        (2, 2, vec!["XXPP", "PPXX", "PXPX", "XPXP", "PXXP", "XPPX"]),
        (3, 1, vec!["PPPX", "PPXP", "PXPP", "XPPP"]),
        (0, 3, vec!["XXX"]),
    ];
    for (r, s, ws) in cases {
        let ours = matrixize(&OperatorPoly::t(r, s, 1), dim, 1.4).unwrap().entries;
        let explicit = interior(&words(&ws), dim);
        assert!((ours - explicit).norm() < 1e-12, "T[{r},{s}]");
    }
}

fn sample_ops() -> Vec<OperatorPoly> {
    let m = CoeffValue::m_pow;
    let i = GaussianRational::i();
    vec![
        OperatorPoly::t(1, 2, m(-2, 1, -2)) + OperatorPoly::t(3, 0, m(-4, 3, -4)),
        OperatorPoly::t(0, 3, CoeffValue::constant(i.clone())),
        OperatorPoly::t(2, 2, m(3, 1, -4)) + OperatorPoly::t(0, 4, m(1, 2, 0)),
        OperatorPoly::t(1, 1, 1) + OperatorPoly::t(0, 0, CoeffValue::constant(i)),
        OperatorPoly::t(4, 0, m(1, 3, 2)) + OperatorPoly::t(1, 3, m(-5, 2, -1)),
    ]
}

#[test]
fn star_product_matches_matrix_product_on_interior() {
    let dim = 40;
    for m_value in [1.0, 1.6] {
        for a in sample_ops() {
            for b in sample_ops() {
                let ab = matrixize(&a.star(&b).unwrap(), dim, m_value).unwrap().entries;
                let ma = matrixize(&a, dim, m_value).unwrap().entries;
                let mb = matrixize(&b, dim, m_value).unwrap().entries;
                let diff = interior(&(&ab - &ma * &mb), dim / 2).norm();
                let scale = interior(&ab, dim / 2).norm().max(1.0);
                assert!(diff / scale < 1e-8, "{a} * {b}: {diff}");
            }
        }
    }
}

#[test]
fn real_operators_give_hermitian_matrices() {
    let qh = build_q_hierarchy(7).unwrap();
    for (_, q) in qh.orders() {
        let m = matrixize(q, 60, 1.0).unwrap();
        assert!(m.hermiticity_defect() < 1e-12);
    }
    let h1 = matrixize(&build_h(HamiltonianPart::H1), 30, 1.0).unwrap();
    assert!(h1.hermiticity_defect() > 1.0);
}

#[test]
fn matrixize_is_linear() {
    let ops = sample_ops();
    let sum = &ops[0] + &ops[2];
    let lhs = matrixize(&sum, 30, 1.2).unwrap().entries;
    let rhs = matrixize(&ops[0], 30, 1.2).unwrap().entries + matrixize(&ops[2], 30, 1.2).unwrap().entries;
    assert!((lhs - rhs).norm() < 1e-10);
}

#[test]
fn exact_expectations_agree_with_matrix_diagonal() {
    for r in 0..=6u32 {
        for s in 0..=(6 - r) {
            let op = OperatorPoly::t(r, s, 1);
            let poly = number_state_expectation(&op).unwrap();
            let m = matrixize(&op, 20, 1.0).unwrap();
            for n in 0..=8u64 {
                let (re, im) = poly.eval(n, &ParamValues::scaled(1.0));
                let d = m.entries[(n as usize, n as usize)];
                assert!((d - Complex64::new(re, im)).norm() < 1e-10, "T[{r},{s}] n={n}");
            }
        }
    }
}

#[test]
fn weak_coupling_spectrum_is_real_and_converged() {
    let r = spectrum_h(0.01, 80, 1.0, 5).unwrap();
    assert!(r.converged(), "{:?}", r.warning);
    for z in &r.eigenvalues {
        assert!(z.im.abs() < 1e-8, "{z}");
    }
}

#[test]
fn generator_action_agrees_between_number_and_position_routes() {
    let qh = build_q_hierarchy(3).unwrap();
    for m_value in [1.0, 2.0] {
        let g = PolyGauss::ground_state(m_value);
        let f = apply_weyl(&qh.get(1), &g, m_value).unwrap();
        let dim = 12;
        let q1 = matrixize(&qh.get(1), dim, m_value).unwrap().entries;
        let col = q1.column(0);
        for x in [-3.0, -1.2, -0.3, 0.0, 0.7, 1.9, 3.5] {
            let h = hermite_functions(dim - 1, m_value.sqrt() * x);
            let via_basis: Complex64 = col.iter().zip(&h).map(|(v, hk)| v * (hk * m_value.powf(0.25))).sum();
            assert!((via_basis - f.eval(x)).norm() < 1e-8, "M={m_value} x={x}");
        }
    }
}

#[test]
fn zero_coupling_wave_function_is_the_oscillator_state() {
    let qh = build_q_hierarchy(3).unwrap();
    let grid = GridSpec::DEFAULT;
    for n in 0..4 {
        let psi = physical_wavefunction(&qh, n, 0.0, PhysicalParams::UNIT, 3, grid).unwrap();
        for (x, v) in grid.xs().iter().zip(&psi.values) {
            let h = hermite_functions(n, *x);
            assert!((v - c(h[n])).norm() < 1e-12);
        }
    }
}

#[test]
fn wave_function_in_other_units() {
    // With ħ = 2, m = 1/2, μ = 3 the oscillator length is ℓ² = ħ/(m^{1/2}μ).
    let qh = build_q_hierarchy(3).unwrap();
    let params = PhysicalParams { mass: 0.5, mu: 3.0, hbar: 2.0 };
    let grid = GridSpec { x_min: -8.0, x_max: 8.0, points: 3001 };
    let psi = physical_wavefunction(&qh, 1, 0.0, params, 3, grid).unwrap();
    assert!((psi.norm_squared() - 1.0).abs() < 1e-10);
    let rho = probability_density(&physical_wavefunction(&qh, 1, 0.002, params, 3, grid).unwrap()).unwrap();
    assert!((rho.integral().re - 1.0).abs() < 1e-10);
}

#[test]
fn first_order_deviation_halves_with_coupling() {
    let qh = build_q_hierarchy(3).unwrap();
    let grid = GridSpec::DEFAULT;
    let psi0 = physical_wavefunction(&qh, 0, 0.0, PhysicalParams::UNIT, 3, grid).unwrap();
    let dev = |eps| physical_wavefunction(&qh, 0, eps, PhysicalParams::UNIT, 3, grid).unwrap().relative_distance(&psi0);
    let ratio = dev(0.05) / dev(0.025);
    assert!((1.0..=4.0).contains(&ratio), "{ratio}");
}

#[test]
fn density_is_parity_even_at_every_coupling() {
    // e^{−Q/2} commutes with PT, so Ψ(−x) = (−1)ⁿ Ψ(x)* and |Ψ|² is even.
    let qh = build_q_hierarchy(3).unwrap();
    let grid = GridSpec::DEFAULT;
    for n in 0..4 {
        for eps in [0.0, 0.01, 0.05] {
            let psi = physical_wavefunction(&qh, n, eps, PhysicalParams::UNIT, 3, grid).unwrap();
            let xs = grid.xs();
            let last = xs.len() - 1;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for i in (0..xs.len()).step_by(97) {
                assert!((psi.values[last - i] - psi.values[i].conj() * sign).norm() < 1e-12);
            }
            assert!(probability_density(&psi).unwrap().antisymmetric_l1().unwrap() < 1e-12);
        }
    }
}

#[test]
fn coefficients_reject_unsupported_order() {
    let qh = build_q_hierarchy(1).unwrap();
    assert!(wavefunction_coefficients(&qh, 0, 0.1, 1.0, 4).is_err());
    assert!(wavefunction_coefficients(&qh, 0, 0.1, 1.0, 3).is_err());
    assert!(wavefunction_coefficients(&qh, 0, 0.1, 1.0, 2).is_ok());
}
