//! Qubit channels in Kraus form and their normalized Choi states.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::QubitBasis;
use crate::error::{Error, Result};
use crate::numerics::{inner, ComplexMatrix, Ket, STRUCTURAL_TOL};

pub const MAX_KRAUS: usize = 8;

/// Operators with Frobenius norm below this are dropped.
const ZERO_WEIGHT: f64 = 1e-12;

/// A certified CPTP map on one qubit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    unitary: bool,
}

impl KrausChannel {
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// True iff the channel has a single Kraus operator and it is unitary.
    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// `Φ(|u><v|)`.
    pub fn apply_outer(&self, u: &Ket, v: &Ket) -> ComplexMatrix {
        self.apply(&ComplexMatrix::outer(u, v))
            .expect("outer product of kets is 2x2")
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(2)?;
        for m in &self.operators {
            out = out.add(&m.multiply(rho)?.multiply(&m.adjoint())?)?;
        }
        Ok(out)
    }

    /// `sum_m |<y|M_m|i>|^2`, i.e. `<y|Φ(|i><i|)|y>` for computational `|i>`.
    pub fn output_population(&self, y: &Ket, input: usize) -> f64 {
        self.operators
            .iter()
            .map(|m| inner(y, &[m.get(0, input), m.get(1, input)]).norm_sqr())
            .sum()
    }

    /// Convex mixture `tΦ₁ + (1-t)Φ₂` realised as the Kraus union
    /// `{sqrt(t) M} ∪ {sqrt(1-t) N}`.
    pub fn mix(t: f64, a: &Self, b: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("mixing weight {t} outside [0, 1]")));
        }
        let wa = Complex64::new(t.sqrt(), 0.0);
        let wb = Complex64::new((1.0 - t).sqrt(), 0.0);
        let ops = a
            .operators
            .iter()
            .map(|m| m.scale(wa))
            .chain(b.operators.iter().map(|m| m.scale(wb)))
            .collect();
        validate_cptp(ops)
    }
}

/// Checks `sum_m M_m^dagger M_m = I` and certifies the operator list.
pub fn validate_cptp(operators: Vec<ComplexMatrix>) -> Result<KrausChannel> {
    if operators.is_empty() {
        return Err(Error::EmptyOperatorList);
    }
    if operators.len() > MAX_KRAUS {
        return Err(Error::TooManyOperators(operators.len()));
    }
    if let Some(m) = operators.iter().find(|m| m.dim() != 2) {
        return Err(Error::DimensionMismatch(format!(
            "Kraus operators must be 2x2, got {0}x{0}",
            m.dim()
        )));
    }
    let operators: Vec<ComplexMatrix> = operators
        .into_iter()
        .filter(|m| m.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() >= ZERO_WEIGHT)
        .collect();
    if operators.is_empty() {
        return Err(Error::EmptyOperatorList);
    }
    let mut gram = ComplexMatrix::zeros(2)?;
    for m in &operators {
        gram = gram.add(&m.adjoint().multiply(m)?)?;
    }
    let residual = gram.max_abs_diff(&ComplexMatrix::identity(2)?);
    if residual > STRUCTURAL_TOL {
        return Err(Error::NotTracePreserving { residual });
    }
    let unitary = operators.len() == 1 && operators[0].is_unitary(STRUCTURAL_TOL);
    Ok(KrausChannel { operators, unitary })
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} outside [0, 1]")))
    }
}

/// `{sqrt(p) I, sqrt(1-p) X}`.
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let a = p.sqrt();
    let b = (1.0 - p).sqrt();
    validate_cptp(vec![
        ComplexMatrix::from_real_rows2([[a, 0.0], [0.0, a]]),
        ComplexMatrix::from_real_rows2([[0.0, b], [b, 0.0]]),
    ])
}

/// `{diag(1, sqrt(1-λ)), diag(0, sqrt λ)}`.
pub fn phase_damping(lambda: f64) -> Result<KrausChannel> {
    check_probability("lambda", lambda)?;
    validate_cptp(vec![
        ComplexMatrix::from_real_rows2([[1.0, 0.0], [0.0, (1.0 - lambda).sqrt()]]),
        ComplexMatrix::from_real_rows2([[0.0, 0.0], [0.0, lambda.sqrt()]]),
    ])
}

/// Real rotation `[[cos α, -sin α], [sin α, cos α]]`.
pub fn rotation(alpha: f64) -> Result<KrausChannel> {
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha = {alpha} is not finite")));
    }
    let (s, c) = alpha.sin_cos();
    validate_cptp(vec![ComplexMatrix::from_real_rows2([[c, -s], [s, c]])])
}

pub fn pauli_x() -> KrausChannel {
    validate_cptp(vec![ComplexMatrix::from_real_rows2([
        [0.0, 1.0],
        [1.0, 0.0],
    ])])
    .expect("Pauli X is unitary")
}

pub fn identity() -> KrausChannel {
    validate_cptp(vec![ComplexMatrix::identity(2).expect("dimension 2")])
        .expect("identity is unitary")
}

pub fn unitary(u: ComplexMatrix) -> Result<KrausChannel> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "unitary channel needs a 2x2 operator".into(),
        ));
    }
    let residual = u.unitarity_residual();
    if residual > STRUCTURAL_TOL {
        return Err(Error::NotUnitary { residual });
    }
    validate_cptp(vec![u])
}

/// Named channel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    BitFlip,
    PhaseDamping,
    Rotation,
    PauliX,
    Identity,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::BitFlip,
        Preset::PhaseDamping,
        Preset::Rotation,
        Preset::PauliX,
        Preset::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::BitFlip => "bit_flip",
            Preset::PhaseDamping => "phase_damping",
            Preset::Rotation => "rotation",
            Preset::PauliX => "pauli_x",
            Preset::Identity => "identity",
        }
    }

    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            Preset::BitFlip => &["p"],
            Preset::PhaseDamping => &["lambda"],
            Preset::Rotation => &["alpha"],
            Preset::PauliX | Preset::Identity => &[],
        }
    }

    pub fn build(self, params: &BTreeMap<String, f64>) -> Result<KrausChannel> {
        if let Some(unknown) = params
            .keys()
            .find(|k| !self.parameters().contains(&k.as_str()))
        {
            return Err(Error::Parse(format!(
                "preset `{}` has no parameter `{unknown}`",
                self.name()
            )));
        }
        let get = |key: &str| {
            params
                .get(key)
                .copied()
                .ok_or_else(|| Error::Parse(format!("preset `{}` needs `{key}`", self.name())))
        };
        match self {
            Preset::BitFlip => bit_flip(get("p")?),
            Preset::PhaseDamping => phase_damping(get("lambda")?),
            Preset::Rotation => rotation(get("alpha")?),
            Preset::PauliX => Ok(pauli_x()),
            Preset::Identity => Ok(identity()),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s || p.name().replace('_', "-") == s)
            .ok_or_else(|| Error::Parse(format!("unknown preset `{s}`")))
    }
}

/// The normalized Choi matrix `J_Φ / 2`, with the output factor expressed in
/// a chosen measurement basis and the input factor left computational.
///
/// Entry `(2j + m, 2k + n)` is `<b_m|Φ(|j><k|)|b_n> / 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChoiState {
    matrix: ComplexMatrix,
    output_basis: QubitBasis,
    source: KrausChannel,
}

impl ChoiState {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn output_basis(&self) -> &QubitBasis {
        &self.output_basis
    }

    pub fn source(&self) -> &KrausChannel {
        &self.source
    }

    /// Trace over the output factor; equals `I/2` for trace-preserving maps.
    pub fn output_partial_trace(&self) -> ComplexMatrix {
        let m = &self.matrix;
        let t = |j: usize, k: usize| m.get(2 * j, 2 * k) + m.get(2 * j + 1, 2 * k + 1);
        ComplexMatrix::from_rows2([[t(0, 0), t(0, 1)], [t(1, 0), t(1, 1)]])
    }
}

pub fn choi(channel: &KrausChannel, basis: &QubitBasis) -> ChoiState {
    // each Kraus operator contributes |ψ><ψ| with ψ[2j + m] = <b_m|M|j>
    let [b0, b1] = basis.vectors();
    let columns: Vec<Vec<Complex64>> = channel
        .operators
        .iter()
        .map(|m| {
            let mut psi = Vec::with_capacity(4);
            for j in 0..2 {
                let col = [m.get(0, j), m.get(1, j)];
                psi.push(inner(b0, &col));
                psi.push(inner(b1, &col));
            }
            psi
        })
        .collect();
    let matrix = ComplexMatrix::from_outer_sum(&columns, 0.5).expect("four-component vectors");
    ChoiState {
        matrix,
        output_basis: basis.clone(),
        source: channel.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }
    use crate::numerics::hermitian_eigenvalues;

    #[test]
    fn identity_is_unitary() {
        let ch = validate_cptp(vec![ComplexMatrix::identity(2).unwrap()]).unwrap();
        assert!(ch.is_unitary());
    }

    #[test]
    fn bit_flip_is_valid_but_not_unitary() {
        let ch = bit_flip(0.3).unwrap();
        assert_eq!(ch.operators().len(), 2);
        assert!(!ch.is_unitary());
    }

    #[test]
    fn projector_alone_is_not_trace_preserving() {
        let err = validate_cptp(vec![ComplexMatrix::from_real_rows2([
            [1.0, 0.0],
            [0.0, 0.0],
        ])])
        .unwrap_err();
        match err {
            Error::NotTracePreserving { residual } => assert!((residual - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_and_oversized_lists() {
        assert_eq!(validate_cptp(vec![]).unwrap_err(), Error::EmptyOperatorList);
        let zero = ComplexMatrix::zeros(2).unwrap();
        assert_eq!(
            validate_cptp(vec![zero.clone()]).unwrap_err(),
            Error::EmptyOperatorList
        );
        assert!(matches!(
            validate_cptp(vec![zero; 9]),
            Err(Error::TooManyOperators(9))
        ));
        assert!(matches!(
            validate_cptp(vec![ComplexMatrix::identity(4).unwrap()]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn zero_weight_operators_are_dropped() {
        let ch = bit_flip(1.0).unwrap();
        assert_eq!(ch.operators(), &[ComplexMatrix::identity(2).unwrap()]);
        assert!(ch.is_unitary());
        assert_eq!(phase_damping(0.0).unwrap().operators().len(), 1);
    }

    #[test]
    fn rotation_zero_is_identity() {
        assert_eq!(rotation(0.0).unwrap(), identity());
    }

    #[test]
    fn phase_damping_operators() {
        let ch = phase_damping(0.5).unwrap();
        let h = 0.5f64.sqrt();
        assert_eq!(
            ch.operators(),
            &[
                ComplexMatrix::from_real_rows2([[1.0, 0.0], [0.0, h]]),
                ComplexMatrix::from_real_rows2([[0.0, 0.0], [0.0, h]]),
            ]
        );
    }

    #[test]
    fn preset_domains() {
        assert!(matches!(bit_flip(1.5), Err(Error::Domain(_))));
        assert!(matches!(phase_damping(-0.1), Err(Error::Domain(_))));
        assert!(matches!(rotation(f64::NAN), Err(Error::Domain(_))));
        let not_unitary = ComplexMatrix::from_real_rows2([[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(
            unitary(not_unitary),
            Err(Error::NotUnitary { .. })
        ));
        let mut params = BTreeMap::new();
        params.insert("q".to_string(), 0.1);
        assert!(Preset::BitFlip.build(&params).is_err());
        assert!(Preset::BitFlip.build(&BTreeMap::new()).is_err());
        assert_eq!(
            "phase-damping".parse::<Preset>().unwrap(),
            Preset::PhaseDamping
        );
    }

    #[test]
    fn bit_flip_choi_in_computational_basis() {
        let p = 0.3;
        let q = 1.0 - p;
        let state = choi(&bit_flip(p).unwrap(), &QubitBasis::computational());
        let expected = ComplexMatrix::from_real_rows4([
            [p, 0.0, 0.0, p],
            [0.0, q, q, 0.0],
            [0.0, q, q, 0.0],
            [p, 0.0, 0.0, p],
        ])
        .scale(real(0.5));
        assert!(state.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn bit_flip_choi_in_plus_minus_basis() {
        let p = 0.3;
        let a = 0.5 * (2.0 * p - 1.0);
        let b = 0.5 * (1.0 - 2.0 * p);
        let state = choi(&bit_flip(p).unwrap(), &QubitBasis::plus_minus());
        let expected = ComplexMatrix::from_real_rows4([
            [0.5, a, 0.5, b],
            [a, 0.5, a, -0.5],
            [0.5, a, 0.5, b],
            [b, -0.5, b, 0.5],
        ])
        .scale(real(0.5));
        assert!(state.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn phase_damping_choi() {
        let lambda = 0.36;
        let r = (1.0f64 - lambda).sqrt();
        let state = choi(
            &phase_damping(lambda).unwrap(),
            &QubitBasis::computational(),
        );
        let expected = ComplexMatrix::from_real_rows4([
            [1.0, 0.0, 0.0, r],
            [0.0; 4],
            [0.0; 4],
            [r, 0.0, 0.0, 1.0],
        ])
        .scale(real(0.5));
        assert!(state.matrix().max_abs_diff(&expected) < 1e-15);

        let zstate = choi(&phase_damping(lambda).unwrap(), &QubitBasis::plus_minus());
        let expected_z = ComplexMatrix::from_real_rows4([
            [1.0, 1.0, r, -r],
            [1.0, 1.0, r, -r],
            [r, r, 1.0, -1.0],
            [-r, -r, -1.0, 1.0],
        ])
        .scale(real(0.25));
        assert!(zstate.matrix().max_abs_diff(&expected_z) < 1e-15);
    }

    #[test]
    fn pauli_x_choi_matrices() {
        let x = choi(&pauli_x(), &QubitBasis::computational());
        let expected = ComplexMatrix::from_real_rows4([
            [0.0; 4],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0; 4],
        ])
        .scale(real(0.5));
        assert!(x.matrix().max_abs_diff(&expected) < 1e-15);

        let z = choi(&pauli_x(), &QubitBasis::plus_minus());
        let expected = ComplexMatrix::from_real_rows4([
            [0.5, -0.5, 0.5, 0.5],
            [-0.5, 0.5, -0.5, -0.5],
            [0.5, -0.5, 0.5, 0.5],
            [0.5, -0.5, 0.5, 0.5],
        ])
        .scale(real(0.5));
        assert!(z.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn phase_damping_spectrum() {
        let state = choi(&phase_damping(0.5).unwrap(), &QubitBasis::computational());
        let s = hermitian_eigenvalues(state.matrix()).unwrap();
        let r = 0.5f64.sqrt();
        let expected = [(1.0 + r) / 2.0, (1.0 - r) / 2.0, 0.0, 0.0];
        for (got, want) in s.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn partial_trace_is_maximally_mixed() {
        for ch in [
            bit_flip(0.2).unwrap(),
            phase_damping(0.7).unwrap(),
            pauli_x(),
        ] {
            let state = choi(&ch, &QubitBasis::from_bloch(0.7, 2.0).unwrap());
            let half = ComplexMatrix::diag(&[0.5, 0.5]).unwrap();
            assert!(state.output_partial_trace().max_abs_diff(&half) < 1e-12);
        }
    }

    #[test]
    fn mixing_rejects_bad_weight() {
        assert!(KrausChannel::mix(1.2, &identity(), &pauli_x()).is_err());
        let half = KrausChannel::mix(0.5, &identity(), &pauli_x()).unwrap();
        let bf = bit_flip(0.5).unwrap();
        let basis = QubitBasis::plus_minus();
        assert!(
            choi(&half, &basis)
                .matrix()
                .max_abs_diff(choi(&bf, &basis).matrix())
                < 1e-15
        );
    }
}
