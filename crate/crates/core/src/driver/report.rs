//! CSV records and the plain-text summary table.

use std::io::Write;
use std::path::Path;

use crate::assembly::{CoefficientField, ParameterSet};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 22] = [
    "case",
    "level",
    "h",
    "dofs",
    "lambda",
    "mu",
    "alpha",
    "beta",
    "a0",
    "b0",
    "c0",
    "K",
    "theta",
    "dt",
    "precond",
    "realization",
    "iters",
    "converged",
    "final_relres",
    "lmin_est",
    "lmax_est",
    "seconds",
];

/// One CSV line. Heterogeneous coefficients are written as `min:max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub case: String,
    pub level: u32,
    pub h: f64,
    pub dofs: usize,
    pub params: ParameterSet,
    pub precond: String,
    pub realization: String,
    pub iters: Option<usize>,
    pub converged: bool,
    pub final_relres: Option<f64>,
    pub lmin_est: Option<f64>,
    pub lmax_est: Option<f64>,
    pub seconds: f64,
    /// Extra trailing columns (name, value), identical names within a file.
    pub extra: Vec<(String, f64)>,
}

fn field(c: &CoefficientField) -> String {
    match c.as_constant() {
        Some(v) => v.to_string(),
        None => format!("{}:{}", c.min(), c.max()),
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl Record {
    pub fn fields(&self) -> Vec<String> {
        let p = &self.params;
        let mut out = vec![
            self.case.clone(),
            self.level.to_string(),
            self.h.to_string(),
            self.dofs.to_string(),
            field(&p.lambda),
            field(&p.mu),
            p.alpha.to_string(),
            p.beta.to_string(),
            p.a0.to_string(),
            p.b0.to_string(),
            p.c0.to_string(),
            field(&p.k),
            field(&p.theta),
            p.dt.to_string(),
            self.precond.clone(),
            self.realization.clone(),
            opt(&self.iters),
            self.converged.to_string(),
            opt(&self.final_relres),
            opt(&self.lmin_est),
            opt(&self.lmax_est),
            format!("{:.3}", self.seconds),
        ];
        out.extend(self.extra.iter().map(|(_, v)| v.to_string()));
        out
    }
}

pub fn write_csv<W: Write>(w: W, records: &[Record]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header: Vec<String> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
    if let Some(r) = records.first() {
        header.extend(r.extra.iter().map(|(n, _)| n.clone()));
    }
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    wr.write_record(&header).map_err(csv_err)?;
    for r in records {
        wr.write_record(r.fields()).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, records: &[Record]) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(f), records)
}

fn short(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{}", (v * 1e6).round() / 1e6)
    } else {
        format!("{v:.0e}")
    }
}

/// Fixed-width summary: case, level, dofs, the swept coefficients, solver
/// and iteration count.
pub fn table(records: &[Record]) -> String {
    let mut s = format!(
        "{:<22} {:>3} {:>8} {:>9} {:>9} {:>7} {:>9} {:>9} {:>7} {:>5} {:>6} {:>5} {:>10}\n",
        "case", "l", "dofs", "lambda", "beta", "a0", "K", "theta", "precond", "real", "iters", "conv", "relres"
    );
    for r in records {
        let p = &r.params;
        s.push_str(&format!(
            "{:<22} {:>3} {:>8} {:>9} {:>9} {:>7} {:>9} {:>9} {:>7} {:>5} {:>6} {:>5} {:>10}",
            r.case,
            r.level,
            r.dofs,
            p.lambda.as_constant().map(short).unwrap_or_else(|| "var".into()),
            short(p.beta),
            short(p.a0),
            p.k.as_constant().map(short).unwrap_or_else(|| "var".into()),
            p.theta.as_constant().map(short).unwrap_or_else(|| "var".into()),
            r.precond,
            r.realization,
            opt(&r.iters),
            if r.converged { "yes" } else { "NO" },
            r.final_relres.map(|v| format!("{v:.2e}")).unwrap_or_default(),
        ));
        for (n, v) in &r.extra {
            s.push_str(&format!(" {n}={v:.6}"));
        }
        if let (Some(a), Some(b)) = (r.lmin_est, r.lmax_est) {
            s.push_str(&format!(" |eig| in [{a:.4}, {b:.4}] ratio {:.3}", b / a));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec() -> Record {
        Record {
            case: "t".into(),
            level: 2,
            h: 0.25,
            dofs: 10,
            params: ParameterSet::unit(),
            precond: "b1".into(),
            realization: "exact".into(),
            iters: Some(12),
            converged: true,
            final_relres: Some(1e-13),
            lmin_est: None,
            lmax_est: None,
            seconds: 0.5,
            extra: vec![],
        }
    }

    #[test]
    fn csv_is_rectangular_with_stable_header() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[rec(), rec()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 3);
        for l in &lines {
            assert_eq!(l.split(',').count(), 22);
        }
        assert!(lines[1].starts_with("t,2,0.25,10,1,1,"));
    }

    #[test]
    fn heterogeneous_fields_are_ranges() {
        let mut r = rec();
        r.params.k = CoefficientField::Grid([[1.0, 2.0, 3.0, 4.0]; 4]);
        assert_eq!(r.fields()[11], "1:4");
    }
}
