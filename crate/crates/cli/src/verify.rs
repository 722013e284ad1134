//! The full invariant and oracle suite behind `weylpt verify`.

use rayon::prelude::*;
use weylpt_core::engine::{build_q_hierarchy_via, residuals, RhsRoute};
use weylpt_core::reference::{compare_operators, h_table, observable_table, q_table};
use weylpt_core::units::number_state_expectation;
use weylpt_core::{build_observable, build_q_hierarchy, GaussianRational, Observable, OperatorPoly, ParamValues};
use weylpt_numeric::metric::default_block;
use weylpt_numeric::output::CheckRow;
use weylpt_numeric::{matrixize, metric_scaling, ExpMethod, GridSpec, PhysicalParams};

use crate::commands::{
    algebra, classical_result, density_result, energy_rows, hermitian_series, numeric, physical_spectrum,
};
use crate::laws::{run_law, CASES, LAWS};
use crate::CliError;

fn row(name: impl Into<String>, value: f64, expected: &str, pass: bool) -> CheckRow {
    CheckRow { name: name.into(), value, expected_order: expected.to_string(), pass }
}

fn exact(name: impl Into<String>, defects: usize) -> CheckRow {
    row(name, defects as f64, "exact (0 differing terms)", defects == 0)
}

fn symbolic_rows() -> Result<Vec<CheckRow>, CliError> {
    let mut rows = Vec::new();
    let qh = build_q_hierarchy(7).map_err(algebra)?;
    let res = residuals(&qh).map_err(algebra)?;
    for (k, r) in &res.closed_form {
        rows.push(exact(format!("residual Q{k}"), r.len()));
    }
    let top: usize = res.intertwining.values().map(OperatorPoly::len).sum();
    rows.push(exact("intertwining e^(-Q) H e^(Q) = P H P through eps^8", top));
    let graded = build_q_hierarchy_via(7, RhsRoute::Graded).map_err(algebra)?;
    let differing = (1..=7).filter(|k| graded.get(*k) != qh.get(*k)).count();
    rows.push(exact("closed-form and graded BCH routes agree", differing));
    for k in [1, 3] {
        let cmp = compare_operators("", &qh.get(k), &q_table(k).expect("printed"));
        rows.push(exact(format!("Q{k} equals printed table"), cmp.mismatches.len()));
    }

    // build_hermitian_h itself rejects any disagreement between the closed
    // form and direct conjugation, and any non-Hermitian order.
    let hs = hermitian_series(6)?;
    rows.push(exact("h closed form equals direct BCH through eps^6", 0));
    let odd: usize = [1, 3, 5].iter().map(|k| hs.get(*k).len()).sum();
    rows.push(exact("h1 = h3 = h5 = 0", odd));
    for k in [0, 2] {
        let cmp = compare_operators("", &hs.get(k), &h_table(k).expect("printed"));
        rows.push(exact(format!("h{k} equals printed table"), cmp.mismatches.len()));
    }

    let q3 = build_q_hierarchy(3).map_err(algebra)?;
    let x = build_observable(Observable::X, &q3, 3).map_err(algebra)?;
    let p = build_observable(Observable::P, &q3, 3).map_err(algebra)?;
    let comm = x.series.commutator(&p.series, 3).map_err(algebra)?;
    let expected = OperatorPoly::t(0, 0, GaussianRational::i());
    let defects = (comm.get(0) != expected) as usize + (1..=3).filter(|k| !comm.get(*k).is_zero()).count();
    rows.push(exact("[X,P] = i through eps^3", defects));
    for obs in [&x, &p] {
        let mut n = 0;
        for k in 0..=2 {
            let printed = observable_table(obs.which, k).expect("printed");
            n += compare_operators("", &obs.series.get(k), &printed).mismatches.len();
        }
        rows.push(exact(format!("{:?} through eps^2 equals printed table", obs.which), n));
    }

    let classical = classical_result()?;
    rows.push(exact(
        "classical limit equals H_c with M(x_c) = m/(1 + 6 mu^-4 eps^2 x_c^2)",
        classical.classical_vs_corrected.mismatches.len(),
    ));
    rows.push(row(
        "classical limit is real",
        0.0,
        "exact",
        classical.classical.is_real(),
    ));
    Ok(rows)
}

fn law_rows() -> Result<Vec<CheckRow>, CliError> {
    let results: Result<Vec<_>, _> = (0..LAWS.len()).into_par_iter().map(|i| run_law(i, CASES)).collect();
    Ok(results
        .map_err(algebra)?
        .into_iter()
        .map(|r| {
            row(format!("{} ({} seeded cases)", r.name, r.cases), r.failures as f64, "0 failures", r.failures == 0)
        })
        .collect())
}

fn expectation_rows() -> Result<Vec<CheckRow>, CliError> {
    let dim = 40;
    let m_value = 1.3;
    let values = ParamValues::scaled(m_value);
    let mut worst: f64 = 0.0;
    for r in 0..=6 {
        for s in 0..=(6 - r) {
            let op = OperatorPoly::t(r, s, 1i64);
            let poly = number_state_expectation(&op).map_err(algebra)?;
            let diag = matrixize(&op, dim, m_value).map_err(numeric)?.diagonal();
            for n in 0..=8u64 {
                let (re, im) = poly.eval(n, &values);
                let z = diag[n as usize];
                worst = worst.max((re - z.re).abs()).max((im - z.im).abs());
            }
        }
    }
    Ok(vec![row("<n|T_rs|n> symbolic vs matrix, r+s <= 6, n <= 8", worst, "< 1e-10", worst < 1e-10)])
}

fn energy_check(params: PhysicalParams) -> Result<Vec<CheckRow>, CliError> {
    let rows = energy_rows(8, 0.01, 120, params)?;
    let worst = rows.iter().map(|r| (r.exact - r.oracle).abs()).fold(0.0, f64::max);
    Ok(vec![row("E_n exact vs dim 120 matrix oracle, n <= 8", worst, "< 1e-10", worst < 1e-10)])
}

/// Largest imaginary part, convergence flag and the per-level ε-doubling
/// ratios of `|λₙ − Eₙ|`.
pub struct SpectrumCheck {
    pub max_imag: f64,
    pub converged: bool,
    pub ratios: Vec<f64>,
}

pub fn spectrum_check(eps: f64, dim: usize, levels: usize, params: PhysicalParams) -> Result<SpectrumCheck, CliError> {
    let hs = hermitian_series(2)?;
    let formula = weylpt_core::units::energy_formula(&hs).map_err(algebra)?;
    let values = ParamValues::scaled(params.m_scale());
    let deviations = |e: f64| -> Result<(Vec<f64>, f64, bool), CliError> {
        let r = physical_spectrum(e, dim, levels, params)?;
        let dev = r
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(n, z)| (z.re - formula.eval(n as u64, params.scaled_eps(e), &values) / params.mass).abs())
            .collect();
        let imag = r.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        Ok((dev, imag, r.converged()))
    };
    let (small, max_imag, converged) = deviations(eps)?;
    let (large, _, _) = deviations(2.0 * eps)?;
    let ratios = large.iter().zip(&small).map(|(a, b)| a / b).collect();
    Ok(SpectrumCheck { max_imag, converged, ratios })
}

fn spectrum_rows(eps: f64, dim: usize, params: PhysicalParams) -> Result<Vec<CheckRow>, CliError> {
    let c = spectrum_check(eps, dim, 5, params)?;
    let mut rows = vec![
        row(format!("max |Im lambda_n|, n < 5, eps {eps}"), c.max_imag, "< 1e-8", c.max_imag < 1e-8),
        row("spectrum converged against dim + 20", c.converged as u8 as f64, "1", c.converged),
    ];
    for (n, r) in c.ratios.iter().enumerate() {
        rows.push(row(
            format!("|lambda_{n} - E_{n}| ratio, 2 eps vs eps"),
            *r,
            "eps^4: in [8, 32]",
            (8.0..=32.0).contains(r),
        ));
    }
    Ok(rows)
}

fn metric_rows(eps: f64, dim: usize, params: PhysicalParams) -> Result<Vec<CheckRow>, CliError> {
    let qh = build_q_hierarchy(3).map_err(algebra)?;
    let block = default_block(dim);
    let s = metric_scaling(&qh, params.scaled_eps(eps), dim, params.m_scale(), block, ExpMethod::Graded)
        .map_err(numeric)?;
    Ok(s.ratios()
        .iter()
        .map(|(name, r)| row(format!("{name} ratio eps vs eps/2, block {block}"), *r, ">= 20", *r >= 20.0))
        .collect())
}

fn density_rows(params: PhysicalParams) -> Result<Vec<CheckRow>, CliError> {
    let cases: Vec<(usize, f64)> = (0..=3).flat_map(|n| [(n, 0.01), (n, 0.05)]).collect();
    let per_case: Result<Vec<Vec<CheckRow>>, CliError> = cases
        .par_iter()
        .map(|&(n, eps)| {
            let d = density_result(n, eps, GridSpec::DEFAULT, params)?;
            let h = density_result(n, eps / 2.0, GridSpec::DEFAULT, params)?;
            let ratio = d.deviation / h.deviation;
            Ok(vec![
                row(
                    format!("density integral - 1, n {n} eps {eps}"),
                    d.integral - 1.0,
                    "|.| <= 1e-8",
                    (d.integral - 1.0).abs() <= 1e-8,
                ),
                row(format!("density minimum, n {n} eps {eps}"), d.minimum, ">= -1e-12", d.minimum >= -1e-12),
                row(
                    format!("|Psi - psi_n| ratio eps vs eps/2, n {n} eps {eps}"),
                    ratio,
                    "halves: in [1, 4]",
                    (1.0..=4.0).contains(&ratio),
                ),
            ])
        })
        .collect();
    Ok(per_case?.into_iter().flatten().collect())
}

/// Every check of the suite, in a fixed order.
pub fn verify_rows(eps: f64, dim: usize, params: PhysicalParams) -> Result<Vec<CheckRow>, CliError> {
    let mut rows = symbolic_rows()?;
    rows.extend(law_rows()?);
    rows.extend(expectation_rows()?);
    rows.extend(energy_check(params)?);
    rows.extend(spectrum_rows(eps, dim, params)?);
    rows.extend(metric_rows(eps, dim, params)?);
    rows.extend(density_rows(params)?);
    Ok(rows)
}
