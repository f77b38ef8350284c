//! CSV rows: `scenario,ell,tau,t0,tf,metric,value`.

use std::io::{self, Write};

pub const HEADER: &str = "scenario,ell,tau,t0,tf,metric,value";

/// Formats a real with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scenario: &'static str,
    pub ell: Option<u32>,
    pub tau: Option<f64>,
    pub span: Option<(f64, f64)>,
    pub metric: String,
    pub value: f64,
}

impl Row {
    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        let opt = |x: Option<f64>| x.map(real).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            self.scenario,
            self.ell.map(|l| l.to_string()).unwrap_or_default(),
            opt(self.tau),
            opt(self.span.map(|s| s.0)),
            opt(self.span.map(|s| s.1)),
            self.metric,
            real(self.value)
        )
    }
}

pub fn write_all(w: &mut impl Write, rows: &[Row]) -> io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for row in rows {
        row.write_to(w)?;
    }
    w.flush()
}
