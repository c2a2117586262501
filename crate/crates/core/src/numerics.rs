//! Small dense complex matrices (dimension 2 and 4), Hermitian spectra and
//! entropies in bits.

use std::fmt;
use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for structural checks (Hermitian, unitary, trace).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance for comparisons between derived quantities.
pub const DERIVED_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A qubit ket.
pub type Ket = [Complex64; 2];

/// `<u|v>`, conjugate-linear in the first argument.
pub fn inner(u: &Ket, v: &Ket) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

pub fn norm_sqr(u: &Ket) -> f64 {
    u[0].norm_sqr() + u[1].norm_sqr()
}

/// Dense square complex matrix stored row-major. Only dimensions 2 and 4 exist.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        ComplexMatrix::new(raw.dim, raw.entries)
    }
}

impl From<ComplexMatrix> for RawMatrix {
    fn from(m: ComplexMatrix) -> Self {
        RawMatrix {
            dim: m.dim,
            entries: m.entries,
        }
    }
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::DimensionMismatch(format!(
                "dimension must be 2 or 4, got {dim}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows2(rows: [[Complex64; 2]; 2]) -> Self {
        Self {
            dim: 2,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_rows2(rows: [[f64; 2]; 2]) -> Self {
        Self {
            dim: 2,
            entries: rows
                .iter()
                .flatten()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        }
    }

    pub fn from_rows4(rows: [[Complex64; 4]; 4]) -> Self {
        Self {
            dim: 4,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_rows4(rows: [[f64; 4]; 4]) -> Self {
        Self {
            dim: 4,
            entries: rows
                .iter()
                .flatten()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(dim, vec![ZERO; dim * dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        Ok(m)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut m = Self::zeros(dim)?;
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * dim + i] = Complex64::new(v, 0.0);
        }
        Ok(m)
    }

    /// `|u><v|` for qubit kets.
    pub fn outer(u: &Ket, v: &Ket) -> Self {
        Self::from_rows2([
            [u[0] * v[0].conj(), u[0] * v[1].conj()],
            [u[1] * v[0].conj(), u[1] * v[1].conj()],
        ])
    }

    /// `sum_i w_i |v_i><v_i|` in dimension `v.len()`.
    pub(crate) fn from_outer_sum(vectors: &[Vec<Complex64>], weight: f64) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        let mut m = Self::zeros(dim)?;
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch("ragged vector list".into()));
            }
            for r in 0..dim {
                for c in 0..dim {
                    m.entries[r * dim + c] += v[r] * v[c].conj() * weight;
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Applies the matrix to a qubit ket.
    pub fn apply(&self, v: &Ket) -> Result<Ket> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch(
                "ket application requires a 2x2 matrix".into(),
            ));
        }
        Ok([
            self.get(0, 0) * v[0] + self.get(0, 1) * v[1],
            self.get(1, 0) * v[0] + self.get(1, 1) * v[1],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        Self { dim: n, entries }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.dim, other.dim
            )));
        }
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                for c in 0..n {
                    entries[r * n + c] += a * other.entries[k * n + c];
                }
            }
        }
        Ok(Self { dim: n, entries })
    }

    /// `self ⊗ other` for two 2x2 factors; row `(j, m)` maps to `2j + m`.
    pub fn kronecker(&self, other: &Self) -> Result<Self> {
        if self.dim != 2 || other.dim != 2 {
            return Err(Error::DimensionMismatch(
                "kronecker product is defined for two 2x2 factors".into(),
            ));
        }
        let mut entries = vec![ZERO; 16];
        for j in 0..2 {
            for k in 0..2 {
                let a = self.get(j, k);
                for m in 0..2 {
                    for n in 0..2 {
                        entries[(2 * j + m) * 4 + 2 * k + n] = a * other.get(m, n);
                    }
                }
            }
        }
        Ok(Self { dim: 4, entries })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(
                "cannot add matrices of different size".into(),
            ));
        }
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.adjoint().multiply(self).expect("same dimension");
        gram.max_abs_diff(&Self::identity(self.dim).expect("valid dimension"))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    pub fn is_density(&self, tol: f64) -> bool {
        self.density_violation(tol).is_none()
    }

    /// Names the first density-matrix check that fails, if any.
    fn density_violation(&self, tol: f64) -> Option<String> {
        let dev = self.hermitian_deviation();
        if dev > tol {
            return Some(format!("not Hermitian (deviation {dev:.3e})"));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Some(format!(
                "trace is {:.12} + {:.3e}i, expected 1",
                tr.re, tr.im
            ));
        }
        match hermitian_eigenvalues(self) {
            Ok(spec) => {
                let min = spec.min();
                (min < -tol).then(|| format!("negative eigenvalue {min:.3e}"))
            }
            Err(e) => Some(e.to_string()),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.dim + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({0}x{0}) [", self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self.get(r, c);
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    let deviation = m.hermitian_deviation();
    if deviation > STRUCTURAL_TOL {
        return Err(Error::NonHermitianInput { deviation });
    }
    let mut eigenvalues = match m.dim() {
        2 => eigenvalues_2x2(m).to_vec(),
        _ => eigenvalues_by_embedding(m),
    };
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum { eigenvalues })
}

fn eigenvalues_2x2(m: &ComplexMatrix) -> [f64; 2] {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    // average the off-diagonal pair so tiny anti-Hermitian noise cancels
    let b = (m.get(0, 1) + m.get(1, 0).conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean + radius, mean - radius]
}

/// A Hermitian `n x n` matrix `A = X + iY` has the same spectrum, with every
/// eigenvalue doubled, as the real symmetric `[[X, -Y], [Y, X]]`.
fn eigenvalues_by_embedding(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim();
    let size = 2 * n;
    let mut a = vec![0.0; size * size];
    for r in 0..n {
        for c in 0..n {
            // symmetrize on the way in
            let z = (m.get(r, c) + m.get(c, r).conj()) * 0.5;
            a[r * size + c] = z.re;
            a[(r + n) * size + (c + n)] = z.re;
            a[r * size + (c + n)] = -z.im;
            a[(r + n) * size + c] = z.im;
        }
    }
    let mut all = jacobi_symmetric_eigenvalues(&mut a, size);
    all.sort_by(|a, b| b.total_cmp(a));
    all.chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect()
}

/// Cyclic Jacobi rotations on a dense real symmetric matrix (destroys `a`).
fn jacobi_symmetric_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        let scale: f64 = (0..n)
            .map(|i| a[i * n + i] * a[i * n + i])
            .sum::<f64>()
            .max(1.0);
        if off <= 1e-34 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// `-sum p log2 p` over a probability vector, with `0 log 0 = 0`.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in bits.
///
/// Eigenvalues in `[-1e-10, 0)` are treated as zero; anything more negative
/// is rejected as not a density matrix.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64> {
    let deviation = m.hermitian_deviation();
    if deviation > STRUCTURAL_TOL {
        return Err(Error::NotDensityMatrix {
            check: format!("not Hermitian (deviation {deviation:.3e})"),
        });
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
        return Err(Error::NotDensityMatrix {
            check: format!("trace is {:.12}, expected 1", tr.re),
        });
    }
    let spectrum = hermitian_eigenvalues(m)?;
    if spectrum.min() < -STRUCTURAL_TOL {
        return Err(Error::NotDensityMatrix {
            check: format!("negative eigenvalue {:.3e}", spectrum.min()),
        });
    }
    let clamped: Vec<f64> = spectrum.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    Ok(shannon_entropy(&clamped))
}

/// Binary entropy `H(x)` in bits. Inputs within `1e-12` outside `[0, 1]` are
/// clamped.
pub fn binary_entropy(x: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&x) {
        return Err(Error::Domain(format!(
            "binary entropy argument {x} outside [0, 1]"
        )));
    }
    let x = x.clamp(0.0, 1.0);
    Ok(shannon_entropy(&[x, 1.0 - x]))
}
