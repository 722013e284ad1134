use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};
use weylpt_core::coeff::{Param, ParamExponents};
use weylpt_core::engine::residuals;
use weylpt_core::reference::{
    classical_table, compare_classical, compare_energy, compare_operators, energy_second_order_table, h_table,
    observable_table, physical_h2_table, q_table, TableComparison,
};
use weylpt_core::units::{classical_limit, energy_formula, to_physical, ScaledKind};
use weylpt_core::{
    build_hermitian_h, build_observable, build_q_hierarchy, AlgebraError, CoeffValue, HermitianSeries, Observable,
    OperatorPoly, ParamValues, PerturbationSeries, QHierarchy,
};
use weylpt_numeric::output::{write_density_csv, write_spectrum_csv};
use weylpt_numeric::{
    matrixize, physical_wavefunction, probability_density, spectrum_h, GridSpec, NumericError, PhysicalParams,
    SpectrumReport,
};

use crate::args::{Format, GlobalArgs, Which};
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rendered command output plus overall success.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub body: String,
    pub ok: bool,
}

impl Report {
    fn ok(body: String) -> Self {
        Report { body, ok: true }
    }
}

pub(crate) fn header() -> String {
    format!("# weylpt {VERSION}\n")
}

pub(crate) fn json_body(command: &str, mut payload: Value) -> String {
    if let Value::Object(map) = &mut payload {
        map.insert("version".into(), json!(VERSION));
        map.insert("command".into(), json!(command));
    }
    let mut s = serde_json::to_string_pretty(&payload).expect("json values serialize");
    s.push('\n');
    s
}

pub(crate) fn algebra(e: AlgebraError) -> CliError {
    CliError::Compute(e.to_string())
}

pub(crate) fn numeric(e: NumericError) -> CliError {
    match e {
        NumericError::DimensionTooSmall { .. } | NumericError::InvalidArgument(_) => CliError::BadArgs(e.to_string()),
        other => CliError::Compute(other.to_string()),
    }
}

pub fn physical_params(g: &GlobalArgs) -> Result<PhysicalParams, CliError> {
    let p = match g.m_scale {
        Some(m) => PhysicalParams { mass: 1.0, mu: m, hbar: 1.0 },
        None => PhysicalParams { mass: g.mass, mu: g.mu, hbar: g.hbar },
    };
    p.validate().map_err(|e| CliError::BadArgs(e.to_string()))?;
    Ok(p)
}

fn check_eps(eps: f64) -> Result<(), CliError> {
    if eps.is_finite() {
        Ok(())
    } else {
        Err(CliError::BadArgs(format!("eps must be finite, got {eps}")))
    }
}

fn series_csv(rows: &mut Vec<[String; 6]>, name: &str, series: &PerturbationSeries) {
    for (k, op) in series.orders() {
        operator_csv(rows, name, k, op);
    }
}

fn operator_csv(rows: &mut Vec<[String; 6]>, name: &str, order: u32, op: &OperatorPoly) {
    for (key, c) in op.terms().rev() {
        for (params, g) in c.terms() {
            rows.push([
                name.to_string(),
                order.to_string(),
                format!("{},{}", key.r, key.s),
                params.to_string(),
                g.re.to_string(),
                g.im.to_string(),
            ]);
        }
    }
}

fn render_csv(rows: &[[String; 6]]) -> String {
    let mut out = String::from("object,order,r_s,params,re,im\n");
    for r in rows {
        let quoted: Vec<String> =
            r.iter().map(|f| if f.contains(',') { format!("\"{f}\"") } else { f.clone() }).collect();
        out.push_str(&quoted.join(","));
        out.push('\n');
    }
    out
}

fn comparisons_text(out: &mut String, comparisons: &[TableComparison]) {
    out.push_str("comparison with printed tables:\n");
    for c in comparisons {
        let _ = writeln!(out, "{c}");
    }
}

pub fn cmd_qsolve(max_order: u32, format: Format) -> Result<Report, CliError> {
    if max_order.is_multiple_of(2) || max_order > weylpt_core::engine::MAX_Q_ORDER {
        return Err(CliError::BadArgs(format!("--max-order must be odd and at most 7, got {max_order}")));
    }
    let qh = build_q_hierarchy(max_order).map_err(algebra)?;
    let res = residuals(&qh).map_err(algebra)?;
    let comparisons: Vec<TableComparison> = qh
        .orders()
        .map(|(k, q)| compare_operators(&format!("Q{k}"), q, &q_table(k).expect("tables cover odd orders to 7")))
        .collect();
    let top = max_order + 1;
    let intertwining_zero = res.intertwining.values().all(OperatorPoly::is_zero);
    let ok = res.all_zero();
    let body = match format {
        Format::Text => {
            let mut s = header();
            for (k, q) in qh.orders() {
                let _ = writeln!(s, "Q{k} = {q}");
            }
            for (k, r) in &res.closed_form {
                let _ = writeln!(s, "residual [H0,Q{k}] - rhs{k}: {r}");
            }
            let _ = writeln!(
                s,
                "intertwining e^(-Q) H e^(Q) - P H P through eps^{top}: {}",
                if intertwining_zero { "0".to_string() } else { "nonzero".to_string() }
            );
            comparisons_text(&mut s, &comparisons);
            s
        }
        Format::Json => json_body(
            "qsolve",
            json!({
                "max_order": max_order,
                "generators": qh.orders().map(|(k, q)| json!({"order": k, "operator": q.to_json()})).collect::<Vec<_>>(),
                "residuals": res.closed_form.iter().map(|(k, r)| json!({"order": k, "zero": r.is_zero(), "residual": r.to_json()})).collect::<Vec<_>>(),
                "intertwining_zero_through": if intertwining_zero { Some(top) } else { None },
                "comparisons": comparisons,
            }),
        ),
        Format::Csv => {
            let mut rows = Vec::new();
            series_csv(&mut rows, "Q", &qh.as_series());
            render_csv(&rows)
        }
    };
    Ok(Report { body, ok })
}

fn hierarchy_for_h(max_order: u32) -> Result<QHierarchy, CliError> {
    build_q_hierarchy(max_order.saturating_sub(1).max(1)).map_err(algebra)
}

pub fn hermitian_series(max_order: u32) -> Result<HermitianSeries, CliError> {
    if max_order % 2 == 1 || max_order > weylpt_core::engine::MAX_H_ORDER {
        return Err(CliError::BadArgs(format!("--max-order must be even and at most 6, got {max_order}")));
    }
    let qh = hierarchy_for_h(max_order)?;
    build_hermitian_h(&qh, max_order).map_err(algebra)
}

pub fn cmd_hermitian(max_order: u32, format: Format) -> Result<Report, CliError> {
    let hs = hermitian_series(max_order)?;
    let comparisons: Vec<TableComparison> = (0..=max_order.min(4))
        .step_by(2)
        .map(|k| compare_operators(&format!("h{k}"), &hs.get(k), &h_table(k).expect("tables cover 0, 2, 4")))
        .collect();
    let body = match format {
        Format::Text => {
            let mut s = header();
            for k in 0..=max_order {
                let _ = writeln!(s, "h{k} = {}", hs.get(k));
            }
            let _ = writeln!(s, "closed form equals direct conjugation through eps^{max_order}: yes");
            comparisons_text(&mut s, &comparisons);
            s
        }
        Format::Json => json_body(
            "hermitian",
            json!({
                "max_order": max_order,
                "terms": hs.as_series().to_json(),
                "closed_form_equals_direct": true,
                "comparisons": comparisons,
            }),
        ),
        Format::Csv => {
            let mut rows = Vec::new();
            series_csv(&mut rows, "h", &hs.as_series());
            render_csv(&rows)
        }
    };
    Ok(Report::ok(body))
}

pub fn cmd_observables(which: Which, max_order: u32, format: Format) -> Result<Report, CliError> {
    if max_order > 3 {
        return Err(CliError::BadArgs(format!("--max-order for observables is at most 3, got {max_order}")));
    }
    let qh = build_q_hierarchy(3).map_err(algebra)?;
    let selected: Vec<Observable> = match which {
        Which::X => vec![Observable::X],
        Which::P => vec![Observable::P],
        Which::Both => vec![Observable::X, Observable::P],
    };
    let mut series = Vec::new();
    for w in &selected {
        series.push(build_observable(*w, &qh, max_order).map_err(algebra)?);
    }
    let x = build_observable(Observable::X, &qh, max_order).map_err(algebra)?;
    let p = build_observable(Observable::P, &qh, max_order).map_err(algebra)?;
    let comm = x.series.commutator(&p.series, max_order).map_err(algebra)?;
    let canonical = comm.get(0) == OperatorPoly::t(0, 0, weylpt_core::GaussianRational::i())
        && (1..=max_order).all(|k| comm.get(k).is_zero());
    let mut comparisons = Vec::new();
    for obs in &series {
        for k in 0..=max_order {
            let printed = observable_table(obs.which, k).expect("tables cover orders 0..3");
            comparisons.push(compare_operators(&format!("{:?}{k}", obs.which), &obs.series.get(k), &printed));
        }
    }
    let body = match format {
        Format::Text => {
            let mut s = header();
            for obs in &series {
                for k in 0..=max_order {
                    let _ = writeln!(s, "{:?}{k} = {}", obs.which, obs.series.get(k));
                }
                let _ = writeln!(s, "PT-covariant {:?}: {}", obs.which, if obs.is_pt_covariant() { "yes" } else { "no" });
            }
            let _ = writeln!(s, "[X,P] = i through eps^{max_order}: {}", if canonical { "yes" } else { "no" });
            comparisons_text(&mut s, &comparisons);
            s
        }
        Format::Json => json_body(
            "observables",
            json!({
                "max_order": max_order,
                "observables": series.iter().map(|o| json!({
                    "which": format!("{:?}", o.which),
                    "terms": o.series.to_json(),
                    "pt_covariant": o.is_pt_covariant(),
                })).collect::<Vec<_>>(),
                "canonical_commutator": canonical,
                "comparisons": comparisons,
            }),
        ),
        Format::Csv => {
            let mut rows = Vec::new();
            for o in &series {
                series_csv(&mut rows, &format!("{:?}", o.which), &o.series);
            }
            render_csv(&rows)
        }
    };
    Ok(Report { body, ok: canonical })
}

/// Physical-unit `h` through ε², its classical limit and the comparisons.
pub struct ClassicalResult {
    pub physical: weylpt_core::units::PhysicalSeries,
    pub classical: weylpt_core::units::ClassicalHamiltonian,
    pub physical_vs_printed: TableComparison,
    pub classical_vs_printed: TableComparison,
    pub classical_vs_corrected: TableComparison,
}

pub fn classical_result() -> Result<ClassicalResult, CliError> {
    let hs = hermitian_series(2)?;
    let physical = to_physical(&hs.as_series(), ScaledKind::Hamiltonian).map_err(algebra)?;
    let classical = classical_limit(&physical).map_err(algebra)?;
    let printed_h2 = physical_h2_table(-1).map_err(algebra)?;
    Ok(ClassicalResult {
        physical_vs_printed: compare_operators("physical h eps^2", &physical.get(2), &printed_h2),
        classical_vs_printed: compare_classical("classical Hamiltonian", &classical, &classical_table(-1)),
        classical_vs_corrected: compare_classical(
            "classical Hamiltonian, M(x_c) = m/(1 + 6 mu^-4 eps^2 x_c^2)",
            &classical,
            &classical_table(1),
        ),
        physical,
        classical,
    })
}

fn mass_function_text(inv: &std::collections::BTreeMap<(u32, u32), CoeffValue>) -> String {
    let base = inv.get(&(0, 0)).cloned().unwrap_or_default();
    let inv_mass = CoeffValue::monomial(weylpt_core::GaussianRational::from(1), ParamExponents::single(Param::Mass, -1));
    if base != inv_mass {
        return "M(x_c): kinetic term is not p_c^2/2m at eps^0".into();
    }
    let mut parts = vec!["1".to_string()];
    for ((k, s), c) in inv {
        if (*k, *s) == (0, 0) {
            continue;
        }
        let rel = c.shift(ParamExponents::single(Param::Mass, 1));
        parts.push(format!("{rel}*eps^{k}*x_c^{s}"));
    }
    format!("M(x_c) = m/({}) + O(eps^4)", parts.join(" + "))
}

pub fn cmd_classical(format: Format) -> Result<Report, CliError> {
    let r = classical_result()?;
    let inv = r.classical.inverse_mass();
    let body = match format {
        Format::Text => {
            let mut s = header();
            let _ = writeln!(s, "h(x,p) = {}", r.physical);
            let _ = writeln!(s, "H_c(x_c,p_c) = {}", r.classical);
            let _ = writeln!(s, "{}", mass_function_text(&inv));
            comparisons_text(&mut s, &[r.physical_vs_printed.clone(), r.classical_vs_printed.clone()]);
            let _ = writeln!(s, "{}", r.classical_vs_corrected);
            s
        }
        Format::Json => json_body(
            "classical",
            json!({
                "physical_h": r.physical.series().to_json(),
                "classical": r.classical.to_json(),
                "mass_function": mass_function_text(&inv),
                "comparisons": [r.physical_vs_printed, r.classical_vs_printed, r.classical_vs_corrected],
            }),
        ),
        Format::Csv => {
            let mut out = String::from("eps_order,p_power,x_power,params,re,im\n");
            for ((k, pr, xs), c) in r.classical.terms() {
                for (params, g) in c.terms() {
                    let _ = writeln!(out, "{k},{pr},{xs},{params},{},{}", g.re, g.im);
                }
            }
            out
        }
    };
    Ok(Report::ok(body))
}

/// One row of the energy table, in physical units.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct EnergyRow {
    pub n: u32,
    pub exact: f64,
    pub printed: f64,
    pub diff: f64,
    pub oracle: f64,
}

pub fn energy_rows(n_max: u32, eps: f64, dim: usize, params: PhysicalParams) -> Result<Vec<EnergyRow>, CliError> {
    check_eps(eps)?;
    if dim < n_max as usize + 10 {
        return Err(CliError::BadArgs(format!("--dim must be at least n_max + 10 = {}", n_max + 10)));
    }
    let hs = hermitian_series(2)?;
    let formula = energy_formula(&hs).map_err(algebra)?;
    let m = params.m_scale();
    let eps_s = params.scaled_eps(eps);
    let values = ParamValues::scaled(m);
    let printed = energy_second_order_table();
    let h2 = matrixize(&hs.get(2), dim, m).map_err(numeric)?;
    let rows = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let exact = formula.eval(n as u64, eps_s, &values);
            let e0 = m * (n as f64 + 0.5);
            let printed_val = e0 + eps_s * eps_s * printed.eval(n as u64, &values).0;
            let oracle = e0 + eps_s * eps_s * h2.entries[(n as usize, n as usize)].re;
            EnergyRow {
                n,
                exact: exact / params.mass,
                printed: printed_val / params.mass,
                diff: (exact - printed_val) / params.mass,
                oracle: oracle / params.mass,
            }
        })
        .collect();
    Ok(rows)
}

pub fn cmd_energy(n_max: u32, eps: f64, dim: usize, params: PhysicalParams, format: Format) -> Result<Report, CliError> {
    let rows = energy_rows(n_max, eps, dim, params)?;
    let hs = hermitian_series(2)?;
    let formula = energy_formula(&hs).map_err(algebra)?;
    let cmp = compare_energy(&formula);
    let finding = if cmp.remainder_missing_m2 {
        "printed remainder -(6n^2+6n+3)/4 lacks a factor M^-2; exact remainder is -(6n^2+6n+3)/(4 M^2)"
    } else if cmp.comparison.matches() {
        "printed formula matches"
    } else {
        "printed formula differs"
    };
    let body = match format {
        Format::Text => {
            let mut s = header();
            let _ = writeln!(s, "E_n = {} + eps^2*[{}] + O(eps^4)", formula.zeroth, formula.second);
            let _ = writeln!(s, "M^-4 block matches printed (30n^2+30n+11)/(8M^4): {}", if cmp.m4_block_matches { "yes" } else { "no" });
            let _ = writeln!(s, "finding: {finding}");
            let _ = writeln!(s, "{}", cmp.comparison);
            let _ = writeln!(s, "n E_exact_sym_at_params E_printed_formula diff E_matrix_oracle");
            for r in &rows {
                let _ = writeln!(s, "{} {} {} {} {}", r.n, r.exact, r.printed, r.diff, r.oracle);
            }
            s
        }
        Format::Json => json_body(
            "energy",
            json!({
                "eps": eps,
                "second_order": formula.second.to_string(),
                "m4_block_matches": cmp.m4_block_matches,
                "remainder_missing_m2": cmp.remainder_missing_m2,
                "finding": finding,
                "comparison": cmp.comparison,
                "rows": rows,
            }),
        ),
        Format::Csv => {
            let mut s = String::from("n,E_exact_sym_at_params,E_printed_formula,diff,E_matrix_oracle\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{},{}", r.n, r.exact, r.printed, r.diff, r.oracle);
            }
            s
        }
    };
    Ok(Report::ok(body))
}

/// Spectrum in physical units: eigenvalues of `H(X,P)` divided by `m`.
pub fn physical_spectrum(eps: f64, dim: usize, levels: usize, params: PhysicalParams) -> Result<SpectrumReport, CliError> {
    check_eps(eps)?;
    let r = spectrum_h(params.scaled_eps(eps), dim, params.m_scale(), levels).map_err(numeric)?;
    Ok(SpectrumReport {
        eps,
        eigenvalues: r.eigenvalues.iter().map(|z| z / params.mass).collect(),
        ..r
    })
}

pub fn cmd_spectrum(eps: f64, dim: usize, levels: usize, params: PhysicalParams, format: Format) -> Result<Report, CliError> {
    let r = physical_spectrum(eps, dim, levels, params)?;
    if let Some(w) = &r.warning {
        eprintln!("warning: {w}");
    }
    let body = match format {
        Format::Text => {
            let mut s = header();
            let _ = writeln!(s, "eps {} dim {} levels {}", eps, dim, levels);
            for (i, z) in r.eigenvalues.iter().enumerate() {
                let _ = writeln!(s, "{i} {} {}", z.re, z.im);
            }
            let _ = writeln!(s, "truncation shift (dim vs dim+20): {:e}", r.truncation_shift);
            if let Some(w) = &r.warning {
                let _ = writeln!(s, "warning: {w}");
            }
            s
        }
        Format::Json => json_body(
            "spectrum",
            json!({
                "eps": eps,
                "dim": dim,
                "eigenvalues": r.eigenvalues.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "truncation_shift": r.truncation_shift,
                "warning": r.warning,
            }),
        ),
        Format::Csv => {
            let mut buf = Vec::new();
            write_spectrum_csv(&mut buf, std::slice::from_ref(&r)).map_err(numeric)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
    };
    Ok(Report::ok(body))
}

/// Density together with summary statistics.
pub struct DensityResult {
    pub rho: weylpt_numeric::GridFunction,
    pub integral: f64,
    pub minimum: f64,
    pub deviation: f64,
}

pub fn density_result(n: usize, eps: f64, grid: GridSpec, params: PhysicalParams) -> Result<DensityResult, CliError> {
    check_eps(eps)?;
    let qh = build_q_hierarchy(3).map_err(algebra)?;
    let psi = physical_wavefunction(&qh, n, eps, params, 3, grid).map_err(numeric)?;
    let psi0 = physical_wavefunction(&qh, n, 0.0, params, 3, grid).map_err(numeric)?;
    let rho = probability_density(&psi).map_err(numeric)?;
    let integral = rho.integral().re;
    let minimum = rho.real_values().into_iter().fold(f64::INFINITY, f64::min);
    Ok(DensityResult { integral, minimum, deviation: psi.relative_distance(&psi0), rho })
}

pub fn cmd_density(n: usize, eps: f64, grid: GridSpec, params: PhysicalParams, format: Format) -> Result<Report, CliError> {
    let d = density_result(n, eps, grid, params)?;
    let body = match format {
        Format::Text => {
            let mut s = header();
            let _ = writeln!(s, "n {n} eps {eps}");
            let _ = writeln!(s, "integral {}", d.integral);
            let _ = writeln!(s, "minimum {}", d.minimum);
            let _ = writeln!(s, "relative L2 deviation from psi_n {}", d.deviation);
            let _ = writeln!(s, "x rho");
            for (x, v) in d.rho.xs().iter().zip(&d.rho.values) {
                let _ = writeln!(s, "{x} {}", v.re);
            }
            s
        }
        Format::Json => json_body(
            "density",
            json!({
                "n": n,
                "eps": eps,
                "integral": d.integral,
                "minimum": d.minimum,
                "deviation": d.deviation,
                "x": d.rho.xs(),
                "rho": d.rho.real_values(),
            }),
        ),
        Format::Csv => {
            let mut buf = Vec::new();
            write_density_csv(&mut buf, &d.rho).map_err(numeric)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
    };
    Ok(Report::ok(body))
}
