//! One-parameter sweeps of the uncertainty relations over a preset family,
//! with CSV output.

use serde::Serialize;

use crate::bases::QubitBasis;
use crate::bounds::{check_relation, UncertaintyReport};
use crate::channels::Preset;
use crate::coherence::CoherenceMeasure;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "param,sum_coherence,lower_bound,slack,saturated";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub preset: Preset,
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub basis1: QubitBasis,
    pub basis2: QubitBasis,
    pub measure: CoherenceMeasure,
    pub c_override: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub report: UncertaintyReport,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.preset.parameters().contains(&self.parameter.as_str()) {
            return Err(Error::Parse(format!(
                "preset `{}` has no parameter `{}` (expected one of: {})",
                self.preset,
                self.parameter,
                self.preset.parameters().join(", ")
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::Domain("sweep range must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::Domain(format!(
                "step = {} must be positive",
                self.step
            )));
        }
        if self.start > self.stop {
            return Err(Error::Domain(format!(
                "start = {} exceeds stop = {}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Grid `start + i * step`, capped at `stop`. A stop value reached up to
    /// rounding counts as a grid point.
    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n)
            .map(|i| (self.start + i as f64 * self.step).min(self.stop))
            .collect())
    }

    pub fn run(&self) -> Result<Vec<SweepRow>> {
        self.points()?
            .into_iter()
            .map(|param| {
                let params = [(self.parameter.clone(), param)].into_iter().collect();
                let channel = self.preset.build(&params)?;
                let report = check_relation(
                    &channel,
                    &self.basis1,
                    &self.basis2,
                    self.measure,
                    self.c_override,
                )?;
                Ok(SweepRow { param, report })
            })
            .collect()
    }
}

/// `%.12g`: twelve significant digits, trailing zeros removed, exponent form
/// outside `[1e-5, 1e12)`.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-5..12).contains(&exponent) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exponent.abs());
    }
    let decimals = (11 - exponent) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.report;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_sig12(row.param),
            format_sig12(r.sum_coherence),
            format_sig12(r.lower_bound),
            format_sig12(r.slack),
            r.saturated
        ));
    }
    out
}

/// A gnuplot script plotting the sum and the bound against the parameter.
pub fn gnuplot_script(csv_path: &str, spec: &SweepSpec) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel '{param}'\n\
         set ylabel '{measure} coherence'\n\
         set title '{preset}'\n\
         plot '{csv_path}' using 1:2 with lines title 'sum', \\\n\
         \x20    '' using 1:3 with lines dashtype 2 title 'lower bound'\n",
        param = spec.parameter,
        measure = spec.measure,
        preset = spec.preset,
    )
}
