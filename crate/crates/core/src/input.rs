//! Text formats for channels, bases and angle-valued numbers.
//!
//! Channels are given either as JSON,
//!
//! ```text
//! {"preset": {"name": "bit_flip", "params": {"p": 0.3}}}
//! {"kraus": [[[[re, im], [re, im]], [[re, im], [re, im]]], ...]}
//! ```
//!
//! or in the short form `preset=bit_flip,p=0.3`. Bases are a built-in name or
//! `{"bloch": [theta, phi]}` / `{"vectors": [[[re, im], [re, im]], [[re, im], [re, im]]]}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::QubitBasis;
use crate::channels::{validate_cptp, KrausChannel, Preset};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, Ket};

/// A complex number as `[re, im]`.
pub type ComplexPair = [f64; 2];
/// A 2x2 matrix as rows of `[re, im]` pairs.
pub type OperatorRows = [[ComplexPair; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelSpec {
    Preset(PresetSpec),
    Kraus(Vec<OperatorRows>),
}

impl ChannelSpec {
    pub fn build(&self) -> Result<KrausChannel> {
        match self {
            ChannelSpec::Preset(spec) => spec.name.parse::<Preset>()?.build(&spec.params),
            ChannelSpec::Kraus(ops) => {
                let matrices = ops
                    .iter()
                    .map(|rows| {
                        ComplexMatrix::new(2, rows.iter().flatten().map(|&z| complex(z)).collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                validate_cptp(matrices)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisSpec {
    Bloch([f64; 2]),
    Vectors([[ComplexPair; 2]; 2]),
}

impl BasisSpec {
    pub fn build(&self) -> Result<QubitBasis> {
        match *self {
            BasisSpec::Bloch([theta, phi]) => QubitBasis::from_bloch(theta, phi),
            BasisSpec::Vectors([u, v]) => QubitBasis::new(ket(u), ket(v)),
        }
    }
}

fn complex([re, im]: ComplexPair) -> Complex64 {
    Complex64::new(re, im)
}

fn ket([a, b]: [ComplexPair; 2]) -> Ket {
    [complex(a), complex(b)]
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid {what} JSON: {e}")))
}

/// Parses a channel from JSON or the `preset=name,key=value` short form.
pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    parse_channel_spec(text)?.build()
}

pub fn parse_channel_spec(text: &str) -> Result<ChannelSpec> {
    let text = text.trim();
    if text.starts_with('{') {
        return from_json(text, "channel");
    }
    let mut parts = text.split(',').map(str::trim);
    let head = parts.next().unwrap_or_default();
    let name = head.strip_prefix("preset=").unwrap_or(head);
    if name.is_empty() || name.contains('=') {
        return Err(Error::Parse(format!(
            "channel `{text}` is neither JSON nor `preset=name,key=value`"
        )));
    }
    let mut params = BTreeMap::new();
    for part in parts.filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
        if params
            .insert(key.trim().to_string(), parse_number(value)?)
            .is_some()
        {
            return Err(Error::Parse(format!(
                "parameter `{}` given twice",
                key.trim()
            )));
        }
    }
    Ok(ChannelSpec::Preset(PresetSpec {
        name: name.to_string(),
        params,
    }))
}

/// Parses a basis from a built-in name or JSON.
pub fn parse_basis(text: &str) -> Result<QubitBasis> {
    let text = text.trim();
    if text.starts_with('{') {
        from_json::<BasisSpec>(text, "basis")?.build()
    } else {
        QubitBasis::named(text)
    }
}

/// Parses a real number, also accepting multiples of pi such as `pi/4`,
/// `3*pi/4`, `-pi` or `2pi`.
pub fn parse_number(text: &str) -> Result<f64> {
    let s = text.trim();
    let bad = || Error::Parse(format!("cannot parse number `{s}`"));
    if let Ok(x) = s.parse::<f64>() {
        return if x.is_finite() { Ok(x) } else { Err(bad()) };
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, s),
    };
    let pos = body.find("pi").ok_or_else(bad)?;
    let coefficient = match body[..pos].trim().trim_end_matches('*').trim() {
        "" => 1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = body[pos + 2..].trim();
    let divisor = match rest.strip_prefix('/') {
        Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    let value = sign * coefficient * PI / divisor;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}
