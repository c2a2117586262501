//! Orthonormal qubit measurement bases and their overlap constants.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{inner, norm_sqr, ComplexMatrix, Ket, STRUCTURAL_TOL};

/// Polar and azimuthal angle of the first basis vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

/// An ordered orthonormal pair of qubit kets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitBasis {
    first: Ket,
    second: Ket,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    bloch: Option<BlochAngles>,
}

impl QubitBasis {
    pub fn new(first: Ket, second: Ket) -> Result<Self> {
        for (name, v) in [("first", &first), ("second", &second)] {
            let n = norm_sqr(v);
            if !n.is_finite() || (n - 1.0).abs() > STRUCTURAL_TOL {
                return Err(Error::InvalidBasis(format!(
                    "{name} vector has squared norm {n}, expected 1"
                )));
            }
        }
        let overlap = inner(&first, &second).norm();
        if overlap > STRUCTURAL_TOL {
            return Err(Error::InvalidBasis(format!(
                "vectors are not orthogonal (|<first|second>| = {overlap:.3e})"
            )));
        }
        Ok(Self {
            first,
            second,
            bloch: None,
        })
    }

    /// `first = (cos θ/2, e^{iφ} sin θ/2)`, `second = (-e^{-iφ} sin θ/2, cos θ/2)`.
    pub fn from_bloch(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("theta = {theta} outside [0, pi]")));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::Domain(format!("phi = {phi} outside [0, 2pi)")));
        }
        let (s, c) = (theta / 2.0).sin_cos();
        let phase = Complex64::from_polar(1.0, phi);
        let first = [Complex64::new(c, 0.0), phase * s];
        let second = [-phase.conj() * s, Complex64::new(c, 0.0)];
        Ok(Self {
            first,
            second,
            bloch: Some(BlochAngles { theta, phi }),
        })
    }

    pub fn computational() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            first: [one, zero],
            second: [zero, one],
            bloch: Some(BlochAngles {
                theta: 0.0,
                phi: 0.0,
            }),
        }
    }

    /// `{|+>, |->}`.
    pub fn plus_minus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            first: [h, h],
            second: [h, -h],
            bloch: None,
        }
    }

    /// Real basis with `|<0|y1>|^2 = 1 - g`, `g = (3 - sqrt 5)/2`.
    pub fn golden() -> Self {
        let g = (3.0 - 5f64.sqrt()) / 2.0;
        let (s, c) = (g.sqrt(), (1.0 - g).sqrt());
        let r = |x: f64| Complex64::new(x, 0.0);
        Self {
            first: [r(c), r(s)],
            second: [r(-s), r(c)],
            bloch: None,
        }
    }

    /// Complex basis with `|<0|y1>|^2 = 9/16`.
    pub fn complex_nine_sixteenths() -> Self {
        let (s2, s3, s5, s6) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt(), 6f64.sqrt());
        Self {
            first: [Complex64::new(s3, s6) / 4.0, Complex64::new(s2, s5) / 4.0],
            second: [Complex64::new(s2, -s5) / 4.0, Complex64::new(-s3, s6) / 4.0],
            bloch: None,
        }
    }

    /// Built-in bases addressable by name.
    pub const NAMES: [&'static str; 4] = [
        "computational",
        "plus-minus",
        "example2-golden",
        "example3-yprime",
    ];

    pub fn named(name: &str) -> Result<Self> {
        match name {
            "computational" | "z" => Ok(Self::computational()),
            "plus-minus" | "x" => Ok(Self::plus_minus()),
            "example2-golden" => Ok(Self::golden()),
            "example3-yprime" => Ok(Self::complex_nine_sixteenths()),
            other => Err(Error::InvalidBasis(format!(
                "unknown basis name `{other}` (known: {})",
                Self::NAMES.join(", ")
            ))),
        }
    }

    pub fn first(&self) -> &Ket {
        &self.first
    }

    pub fn second(&self) -> &Ket {
        &self.second
    }

    pub fn vectors(&self) -> [&Ket; 2] {
        [&self.first, &self.second]
    }

    pub fn bloch(&self) -> Option<BlochAngles> {
        self.bloch
    }

    /// Unitary whose columns are the basis vectors.
    pub fn change_of_basis(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows2([
            [self.first[0], self.second[0]],
            [self.first[1], self.second[1]],
        ])
    }

    /// Multiplies each vector by a global phase. The result spans the same rays.
    pub fn with_phases(&self, first: f64, second: f64) -> Self {
        let p1 = Complex64::from_polar(1.0, first);
        let p2 = Complex64::from_polar(1.0, second);
        Self {
            first: [self.first[0] * p1, self.first[1] * p1],
            second: [self.second[0] * p2, self.second[1] * p2],
            bloch: None,
        }
    }
}

/// Largest and smallest squared overlap between vectors of two bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisOverlap {
    pub c_max: f64,
    pub c_min: f64,
    /// `(index in first basis, index in second basis)` of the maximum; ties
    /// go to the lowest index pair.
    pub argmax: (usize, usize),
}

pub fn overlap(b1: &QubitBasis, b2: &QubitBasis) -> BasisOverlap {
    let mut c_max = f64::NEG_INFINITY;
    let mut c_min = f64::INFINITY;
    let mut argmax = (0, 0);
    for (i, x) in b1.vectors().into_iter().enumerate() {
        for (j, z) in b2.vectors().into_iter().enumerate() {
            let c = inner(x, z).norm_sqr();
            if c > c_max {
                c_max = c;
                argmax = (i, j);
            }
            c_min = c_min.min(c);
        }
    }
    BasisOverlap {
        c_max,
        c_min,
        argmax,
    }
}
