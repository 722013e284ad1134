//! CSV emitters. Floats use Rust's shortest round-trip formatting, so every
//! value reads back bit-for-bit.

use std::io::Write;

use crate::error::NumericError;
use crate::spectrum::SpectrumReport;
use crate::wavefunction::GridFunction;

/// One row of a check report.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub expected_order: String,
    pub pass: bool,
}

pub fn write_spectrum_csv<W: Write>(out: W, reports: &[SpectrumReport]) -> Result<(), NumericError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "re", "im", "dim", "eps"])?;
    for r in reports {
        for (i, z) in r.eigenvalues.iter().enumerate() {
            w.write_record([i.to_string(), z.re.to_string(), z.im.to_string(), r.dim.to_string(), r.eps.to_string()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_density_csv<W: Write>(out: W, rho: &GridFunction) -> Result<(), NumericError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "rho"])?;
    for (x, v) in rho.xs().iter().zip(&rho.values) {
        w.write_record([x.to_string(), v.re.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_checks_csv<W: Write>(out: W, rows: &[CheckRow]) -> Result<(), NumericError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check_name", "value", "expected_order", "pass"])?;
    for r in rows {
        w.write_record([r.name.clone(), r.value.to_string(), r.expected_order.clone(), r.pass.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn spectrum_rows_round_trip() {
        let r = SpectrumReport {
            eps: 0.01,
            dim: 80,
            m_value: 1.0,
            eigenvalues: vec![Complex64::new(0.1 + 0.2, -1e-17)],
            truncation_shift: 0.0,
            warning: None,
        };
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(fields[2].parse::<f64>().unwrap(), -1e-17);
        assert_eq!(text.lines().next().unwrap(), "index,re,im,dim,eps");
    }
}
