//! Relative-entropy and l1 coherence of a channel, evaluated on its
//! normalized Choi state in the product reference basis
//! `{|j> ⊗ |b_m>}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bases::QubitBasis;
use crate::channels::{choi, ChoiState, KrausChannel};
use crate::error::{Error, Result};
use crate::numerics::{inner, shannon_entropy, von_neumann_entropy, STRUCTURAL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceMeasure {
    RelativeEntropy,
    L1Norm,
}

impl CoherenceMeasure {
    pub fn short_name(self) -> &'static str {
        match self {
            CoherenceMeasure::RelativeEntropy => "rel",
            CoherenceMeasure::L1Norm => "l1",
        }
    }
}

impl fmt::Display for CoherenceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for CoherenceMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rel" | "relative_entropy" | "relative-entropy" => Ok(Self::RelativeEntropy),
            "l1" | "l1_norm" | "l1-norm" => Ok(Self::L1Norm),
            other => Err(Error::Parse(format!(
                "unknown measure `{other}` (expected rel or l1)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceValue {
    pub measure: CoherenceMeasure,
    pub value: f64,
    pub basis: QubitBasis,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diag_entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_entropy: Option<f64>,
}

fn clamp_nonnegative(value: f64, what: &str) -> Result<f64> {
    if value < -STRUCTURAL_TOL {
        return Err(Error::InternalConsistency(format!(
            "{what} came out negative: {value:e}"
        )));
    }
    Ok(value.max(0.0))
}

pub fn rel_entropy_coherence(channel: &KrausChannel, basis: &QubitBasis) -> Result<CoherenceValue> {
    rel_entropy_of_choi(&choi(channel, basis))
}

/// `S(diag ρ) - S(ρ)` in bits.
pub fn rel_entropy_of_choi(state: &ChoiState) -> Result<CoherenceValue> {
    let rho = state.matrix();
    let diagonal: Vec<f64> = rho.diagonal().into_iter().map(|d| d.max(0.0)).collect();
    let diag_entropy = shannon_entropy(&diagonal);
    let state_entropy = von_neumann_entropy(rho)?;
    let value = clamp_nonnegative(
        diag_entropy - state_entropy,
        "relative entropy of coherence",
    )?;
    Ok(CoherenceValue {
        measure: CoherenceMeasure::RelativeEntropy,
        value,
        basis: state.output_basis().clone(),
        diag_entropy: Some(diag_entropy),
        state_entropy: Some(state_entropy),
    })
}

pub fn l1_coherence(channel: &KrausChannel, basis: &QubitBasis) -> Result<CoherenceValue> {
    l1_of_choi(&choi(channel, basis))
}

/// Sum of moduli of all off-diagonal entries.
pub fn l1_of_choi(state: &ChoiState) -> Result<CoherenceValue> {
    let rho = state.matrix();
    let n = rho.dim();
    let value: f64 = (0..n)
        .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
        .map(|(r, c)| rho.get(r, c).norm())
        .sum();
    Ok(CoherenceValue {
        measure: CoherenceMeasure::L1Norm,
        value,
        basis: state.output_basis().clone(),
        diag_entropy: None,
        state_entropy: None,
    })
}

pub fn coherence(
    channel: &KrausChannel,
    basis: &QubitBasis,
    measure: CoherenceMeasure,
) -> Result<CoherenceValue> {
    match measure {
        CoherenceMeasure::RelativeEntropy => rel_entropy_coherence(channel, basis),
        CoherenceMeasure::L1Norm => l1_coherence(channel, basis),
    }
}

/// l1 coherence of a unitary channel from a single overlap: with
/// `|<x|M|0>|^2 = cos^2(α/2)` the value is `2 sin α + 1`.
pub fn unitary_l1_closed_form(channel: &KrausChannel, basis: &QubitBasis) -> Result<f64> {
    if !channel.is_unitary() {
        return Err(Error::NotUnitaryChannel);
    }
    let m = &channel.operators()[0];
    let column = [m.get(0, 0), m.get(1, 0)];
    let amplitude = inner(basis.first(), &column).norm();
    let alpha = 2.0 * amplitude.min(1.0).acos();
    Ok(2.0 * alpha.sin() + 1.0)
}
