//! Lower bounds on the sum of a channel's coherences in two bases, plus the
//! auxiliary inequalities they rest on.
//!
//! For any qubit channel and bases with maximal overlap `c`,
//!
//! ```text
//! C_rel(X) + C_rel(Z) >= H(sqrt c) - 2 S(J/2) + 2
//! ```
//!
//! and for unitary channels
//!
//! ```text
//! C_l1(X) + C_l1(Z) >= 4 sqrt(c (1 - c)) + 2.
//! ```
//!
//! All entropies are in bits.

use serde::{Deserialize, Serialize};

use crate::bases::{overlap, QubitBasis};
use crate::channels::{choi, KrausChannel};
use crate::coherence::{coherence, CoherenceMeasure};
use crate::error::{Error, Result};
use crate::numerics::STRUCTURAL_TOL;
use crate::numerics::{binary_entropy, inner, norm_sqr, von_neumann_entropy, ComplexMatrix, Ket};

/// Slack at or below which a relation counts as saturated.
pub const SATURATION_TOL: f64 = 1e-6;
/// Tolerance on the two equalities of the saturation condition.
pub const SATURATION_CONDITION_TOL: f64 = 1e-8;

/// `H(sqrt c) - 2 S(J/2) + 2`.
pub fn rel_entropy_bound(channel: &KrausChannel, c_max: f64) -> Result<f64> {
    if !(c_max > 0.0 && c_max <= 1.0) {
        return Err(Error::Domain(format!("c_max = {c_max} outside (0, 1]")));
    }
    let state = choi(channel, &QubitBasis::computational());
    let entropy = von_neumann_entropy(state.matrix())?;
    Ok(binary_entropy(c_max.sqrt())? - 2.0 * entropy + 2.0)
}

/// `4 sqrt(c (1 - c)) + 2`.
pub fn l1_unitary_bound(c_max: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c_max) {
        return Err(Error::Domain(format!("c_max = {c_max} outside [0, 1]")));
    }
    Ok(4.0 * (c_max * (1.0 - c_max)).sqrt() + 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub measure: CoherenceMeasure,
    pub coherence_first: f64,
    pub coherence_second: f64,
    pub sum_coherence: f64,
    pub lower_bound: f64,
    /// `sum_coherence - lower_bound`; never clipped.
    pub slack: f64,
    pub c_max_used: f64,
    pub saturated: bool,
}

pub fn check_relation(
    channel: &KrausChannel,
    basis1: &QubitBasis,
    basis2: &QubitBasis,
    measure: CoherenceMeasure,
    c_override: Option<f64>,
) -> Result<UncertaintyReport> {
    if measure == CoherenceMeasure::L1Norm && !channel.is_unitary() {
        return Err(Error::TheoremScope(
            "the l1 relation only holds for unitary channels".into(),
        ));
    }
    let c = c_override.unwrap_or_else(|| overlap(basis1, basis2).c_max);
    let lower_bound = match measure {
        CoherenceMeasure::RelativeEntropy => rel_entropy_bound(channel, c)?,
        CoherenceMeasure::L1Norm => l1_unitary_bound(c)?,
    };
    let first = coherence(channel, basis1, measure)?.value;
    let second = coherence(channel, basis2, measure)?.value;
    let sum = first + second;
    let slack = sum - lower_bound;
    Ok(UncertaintyReport {
        measure,
        coherence_first: first,
        coherence_second: second,
        sum_coherence: sum,
        lower_bound,
        slack,
        c_max_used: c,
        saturated: slack <= SATURATION_TOL,
    })
}

/// Which vectors satisfied the saturation condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaturationWitness {
    /// Index into the first basis.
    pub first_index: usize,
    /// Index into the second basis.
    pub second_index: usize,
    /// The vanishing population belongs to the first-basis vector rather than
    /// the second.
    pub roles_swapped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationCheck {
    pub holds: bool,
    pub c_used: f64,
    pub witness: Option<SaturationWitness>,
}

/// Sufficient condition for equality in the relative-entropy relation: for
/// some `|x>` in the first basis and `|y>` in the second, and both inputs
/// `i = 0, 1`,
///
/// ```text
/// p_x(i) + p_y(i) = p_x(i) - p_y(i) = 1 - sqrt c,   p_v(i) = sum_m |<v|M_m|i>|^2
/// ```
///
/// The roles of the two bases may be exchanged.
pub fn saturation_condition(
    channel: &KrausChannel,
    basis1: &QubitBasis,
    basis2: &QubitBasis,
    c_override: Option<f64>,
) -> Result<SaturationCheck> {
    let c = c_override.unwrap_or_else(|| overlap(basis1, basis2).c_max);
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Domain(format!("c = {c} outside [0, 1]")));
    }
    let target = 1.0 - c.sqrt();
    let close = |v: f64| (v - target).abs() <= SATURATION_CONDITION_TOL;
    let satisfied = |x: &Ket, y: &Ket| {
        (0..2).all(|i| {
            let px = channel.output_population(x, i);
            let py = channel.output_population(y, i);
            close(px + py) && close(px - py)
        })
    };
    for (xi, x) in basis1.vectors().into_iter().enumerate() {
        for (yi, y) in basis2.vectors().into_iter().enumerate() {
            for roles_swapped in [false, true] {
                let ok = if roles_swapped {
                    satisfied(y, x)
                } else {
                    satisfied(x, y)
                };
                if ok {
                    return Ok(SaturationCheck {
                        holds: true,
                        c_used: c,
                        witness: Some(SaturationWitness {
                            first_index: xi,
                            second_index: yi,
                            roles_swapped,
                        }),
                    });
                }
            }
        }
    }
    Ok(SaturationCheck {
        holds: false,
        c_used: c,
        witness: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Outcome {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `a + b <= 1 + sqrt c`
    pub upper_holds: bool,
    /// `|a - b| <= sqrt(1 - c)`
    pub difference_holds: bool,
    /// `1 - sqrt c <= a + b`
    pub lower_holds: bool,
    /// Smallest of the three margins.
    pub slack: f64,
}

/// Evaluates `a = <x|A|x>`, `b = <z|A|z>`, `c = |<x|z>|^2` and the three
/// inequalities relating them.
pub fn lemma1_check(density: &ComplexMatrix, x: &Ket, z: &Ket) -> Result<Lemma1Outcome> {
    if density.dim() != 2 || !density.is_density(STRUCTURAL_TOL) {
        return Err(Error::NotDensityMatrix {
            check: "expected a 2x2 density matrix".into(),
        });
    }
    for v in [x, z] {
        if (norm_sqr(v) - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::Domain("vectors must be normalized".into()));
        }
    }
    let expectation = |v: &Ket| inner(v, &density.apply(v).expect("2x2")).re;
    let a = expectation(x);
    let b = expectation(z);
    let c = inner(x, z).norm_sqr().min(1.0);
    let upper = 1.0 + c.sqrt() - (a + b);
    let difference = (1.0 - c).sqrt() - (a - b).abs();
    let lower = (a + b) - (1.0 - c.sqrt());
    let holds = |m: f64| m >= -STRUCTURAL_TOL;
    Ok(Lemma1Outcome {
        a,
        b,
        c,
        upper_holds: holds(upper),
        difference_holds: holds(difference),
        lower_holds: holds(lower),
        slack: upper.min(difference).min(lower),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Outcome {
    /// Angle between the first and second vectors.
    pub alpha: f64,
    /// Angle between the second and third vectors.
    pub beta: f64,
    /// Angle between the third and first vectors.
    pub gamma: f64,
    /// Smallest margin of `sin u + sin v - sin w` over the three cyclic
    /// assignments of the angles.
    pub slack: f64,
    pub holds: bool,
}

fn angle_between(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let cross_norm = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    cross_norm.atan2(dot)
}

/// Checks `sin α + sin β >= sin γ` for the pairwise angles of three nonzero
/// vectors in R^3, for every cyclic relabelling.
pub fn lemma2_check(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> Result<Lemma2Outcome> {
    for v in [a, b, c] {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::Domain("vectors must be nonzero and finite".into()));
        }
    }
    let alpha = angle_between(a, b);
    let beta = angle_between(b, c);
    let gamma = angle_between(c, a);
    let (sa, sb, sg) = (alpha.sin(), beta.sin(), gamma.sin());
    let slack = (sa + sb - sg).min(sb + sg - sa).min(sg + sa - sb);
    Ok(Lemma2Outcome {
        alpha,
        beta,
        gamma,
        slack,
        holds: slack + 1e-10 >= 0.0,
    })
}

/// A point `(a1, a2, b1, b2)` of the relaxed region in which the diagonal
/// populations of the two Choi states live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GFeasiblePoint {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl GFeasiblePoint {
    /// `1 - sqrt c <= a_i + b_i <= 1 + sqrt c` and `|a_i - b_i| <= sqrt(1 - c)`.
    pub fn is_feasible(&self, c: f64, tol: f64) -> bool {
        let s = c.sqrt();
        let d = (1.0 - c).sqrt();
        [(self.a1, self.b1), (self.a2, self.b2)]
            .iter()
            .all(|&(a, b)| {
                (-tol..=1.0 + tol).contains(&a)
                    && (-tol..=1.0 + tol).contains(&b)
                    && a + b >= 1.0 - s - tol
                    && a + b <= 1.0 + s + tol
                    && (a - b).abs() <= d + tol
            })
    }

    /// `f(a1, b1) + f(a2, b2) + 2` with `f(x, y) = (H(x) + H(y)) / 2`.
    pub fn g(&self) -> f64 {
        pair_entropy(self.a1, self.b1) + pair_entropy(self.a2, self.b2) + 2.0
    }
}

fn pair_entropy(x: f64, y: f64) -> f64 {
    let h = |t: f64| binary_entropy(t.clamp(0.0, 1.0)).expect("clamped into [0, 1]");
    0.5 * (h(x) + h(y))
}

/// Closed-form minimum of `g` over the relaxed region: `H(sqrt c) + 2`.
pub fn analytic_g_minimum(c_max: f64) -> Result<f64> {
    Ok(binary_entropy(c_max.sqrt())? + 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMinimum {
    pub value: f64,
    pub point: GFeasiblePoint,
    pub evaluations: usize,
}

/// Evenly spaced points from `lo` to `hi` inclusive of both ends.
fn grid(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((hi - lo) / step).floor().max(0.0) as usize;
    (0..=n)
        .map(move |k| lo + k as f64 * step)
        .filter(move |&x| x < hi)
        .chain(std::iter::once(hi))
}

/// Brute-force minimum of `g` over a grid of the region, using
/// `A = a + b`, `B = b - a`.
///
/// `g` is symmetric about `A = 1`, so only `A in [1 - sqrt c, 1]` and
/// `B in [0, min(A, sqrt(1 - c))]` (keeping `a >= 0`) are scanned. Grid lines
/// include the region boundary. The two index pairs `(a1, b1)`, `(a2, b2)`
/// separate, so the 2D minimum of `f` is shared by both.
pub fn minimize_g_bruteforce(c_max: f64, grid_step: f64) -> Result<GridMinimum> {
    if !(0.5..1.0).contains(&c_max) {
        return Err(Error::Domain(format!("c_max = {c_max} outside [0.5, 1)")));
    }
    if !(1e-4..=1e-2).contains(&grid_step) {
        return Err(Error::Domain(format!(
            "grid step {grid_step} outside [1e-4, 1e-2]"
        )));
    }
    let a_lo = 1.0 - c_max.sqrt();
    let b_hi = (1.0 - c_max).sqrt();
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let mut evaluations = 0;
    for big_a in grid(a_lo, 1.0, grid_step) {
        for big_b in grid(0.0, big_a.min(b_hi), grid_step) {
            let a = 0.5 * (big_a - big_b);
            let b = 0.5 * (big_a + big_b);
            let f = pair_entropy(a, b);
            evaluations += 1;
            if f < best.0 {
                best = (f, a, b);
            }
        }
    }
    let point = GFeasiblePoint {
        a1: best.1,
        a2: best.1,
        b1: best.2,
        b2: best.2,
    };
    Ok(GridMinimum {
        value: 2.0 * best.0 + 2.0,
        point,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{bit_flip, identity, pauli_x, phase_damping, rotation, validate_cptp};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_8, PI};

    fn h(x: f64) -> f64 {
        binary_entropy(x).unwrap()
    }

    #[test]
    fn rel_bound_examples() {
        for p in [0.0, 0.2, 0.5, 0.8] {
            let got = rel_entropy_bound(&bit_flip(p).unwrap(), 0.5).unwrap();
            assert!((got - (h(FRAC_1_SQRT_2) - 2.0 * h(p) + 2.0)).abs() < 1e-9);
        }
        let g = (3.0 - 5f64.sqrt()) / 2.0;
        let got = rel_entropy_bound(&pauli_x(), g).unwrap();
        assert!((got - (h(g.sqrt()) + 2.0)).abs() < 1e-9);
        assert!((got - (h(g) + 2.0)).abs() < 1e-9);
        for lambda in [0.0, 0.3, 1.0] {
            let q = (1.0 + (1.0f64 - lambda).sqrt()) / 2.0;
            let got = rel_entropy_bound(&phase_damping(lambda).unwrap(), 9.0 / 16.0).unwrap();
            assert!((got - (h(0.75) - 2.0 * h(q) + 2.0)).abs() < 1e-9);
        }
        assert!(rel_entropy_bound(&identity(), 0.0).is_err());
        assert!(rel_entropy_bound(&identity(), 1.5).is_err());
    }

    #[test]
    fn l1_bound_examples() {
        assert!((l1_unitary_bound(0.5).unwrap() - 4.0).abs() < 1e-15);
        assert!((l1_unitary_bound(1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((l1_unitary_bound(0.75).unwrap() - (3f64.sqrt() + 2.0)).abs() < 1e-15);
        assert!(l1_unitary_bound(-0.1).is_err());
    }

    #[test]
    fn relation_for_half_bit_flip() {
        let r = check_relation(
            &bit_flip(0.5).unwrap(),
            &QubitBasis::computational(),
            &QubitBasis::plus_minus(),
            CoherenceMeasure::RelativeEntropy,
            None,
        )
        .unwrap();
        assert!((r.sum_coherence - 2.0).abs() < 1e-9);
        assert!((r.lower_bound - 0.872_429_339_856_468_2).abs() < 1e-9);
        assert!((r.slack - 1.127_570_660_143_531_8).abs() < 1e-9);
        assert!(!r.saturated);
        assert!((r.c_max_used - 0.5).abs() < 1e-15);
    }

    #[test]
    fn relation_for_pauli_x_is_tight() {
        let r = check_relation(
            &pauli_x(),
            &QubitBasis::computational(),
            &QubitBasis::plus_minus(),
            CoherenceMeasure::L1Norm,
            None,
        )
        .unwrap();
        assert!((r.sum_coherence - 4.0).abs() < 1e-9);
        assert!((r.lower_bound - 4.0).abs() < 1e-9);
        assert!(r.saturated);
    }

    #[test]
    fn relation_for_rotation() {
        let r = check_relation(
            &rotation(FRAC_PI_8).unwrap(),
            &QubitBasis::computational(),
            &QubitBasis::plus_minus(),
            CoherenceMeasure::L1Norm,
            None,
        )
        .unwrap();
        assert!((r.sum_coherence - (2.0 * 2f64.sqrt() + 2.0)).abs() < 1e-9);
        assert!((r.lower_bound - 4.0).abs() < 1e-9);
        assert!(!r.saturated);
    }

    #[test]
    fn l1_relation_rejects_non_unitary() {
        let err = check_relation(
            &bit_flip(0.2).unwrap(),
            &QubitBasis::computational(),
            &QubitBasis::plus_minus(),
            CoherenceMeasure::L1Norm,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::TheoremScope(_)));
    }

    #[test]
    fn saturation_examples() {
        let comp = QubitBasis::computational();
        let pm = QubitBasis::plus_minus();
        assert!(
            !saturation_condition(&bit_flip(0.3).unwrap(), &comp, &pm, None)
                .unwrap()
                .holds
        );
        assert!(
            !saturation_condition(&identity(), &comp, &comp, None)
                .unwrap()
                .holds
        );
        let b = QubitBasis::from_bloch(1.0, 2.0).unwrap();
        assert!(
            !saturation_condition(&identity(), &b, &b, None)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn reset_channel_saturates() {
        // both inputs go to |1>; with identical bases c = 1 and the condition holds for x = y = |0>
        let reset = validate_cptp(vec![
            ComplexMatrix::from_real_rows2([[0.0, 0.0], [1.0, 0.0]]),
            ComplexMatrix::from_real_rows2([[0.0, 0.0], [0.0, 1.0]]),
        ])
        .unwrap();
        let comp = QubitBasis::computational();
        let sat = saturation_condition(&reset, &comp, &comp, None).unwrap();
        assert!(sat.holds);
        assert_eq!(sat.witness.unwrap().first_index, 0);
        let r = check_relation(
            &reset,
            &comp,
            &comp,
            CoherenceMeasure::RelativeEntropy,
            None,
        )
        .unwrap();
        assert!(r.slack.abs() <= SATURATION_TOL);
    }

    #[test]
    fn complex_basis_phase_damping_is_not_saturated() {
        // sum - bound = H(9/16) - H(3/4) for every λ
        let comp = QubitBasis::computational();
        let yp = QubitBasis::complex_nine_sixteenths();
        for lambda in [0.0, 0.5, 1.0] {
            let ch = phase_damping(lambda).unwrap();
            let r = check_relation(
                &ch,
                &comp,
                &yp,
                CoherenceMeasure::RelativeEntropy,
                Some(9.0 / 16.0),
            )
            .unwrap();
            assert!((r.slack - (h(9.0 / 16.0) - h(0.75))).abs() < 1e-9);
            assert!(
                !saturation_condition(&ch, &comp, &yp, Some(9.0 / 16.0))
                    .unwrap()
                    .holds
            );
        }
    }

    #[test]
    fn lemma1_examples() {
        let mixed = ComplexMatrix::diag(&[0.5, 0.5]).unwrap();
        let b = QubitBasis::from_bloch(0.9, 1.3).unwrap();
        let o = lemma1_check(&mixed, QubitBasis::computational().first(), b.first()).unwrap();
        assert!((o.a - 0.5).abs() < 1e-15 && (o.b - 0.5).abs() < 1e-15);
        assert!(o.upper_holds && o.difference_holds && o.lower_holds);

        let ground = ComplexMatrix::diag(&[1.0, 0.0]).unwrap();
        let o = lemma1_check(
            &ground,
            QubitBasis::computational().first(),
            QubitBasis::plus_minus().first(),
        )
        .unwrap();
        assert!((o.a - 1.0).abs() < 1e-15);
        assert!((o.b - 0.5).abs() < 1e-15);
        assert!((o.c - 0.5).abs() < 1e-15);
        assert!(o.upper_holds && o.difference_holds && o.lower_holds);
        assert!((o.slack - (FRAC_1_SQRT_2 - 0.5)).abs() < 1e-12);

        let not_density = ComplexMatrix::diag(&[1.0, 1.0]).unwrap();
        assert!(lemma1_check(&not_density, b.first(), b.second()).is_err());
    }

    #[test]
    fn lemma2_examples() {
        let e = [0.0, 0.0, 1.0];
        let same = lemma2_check(&e, &e, &e).unwrap();
        assert!(same.holds);
        assert_eq!(same.slack, 0.0);

        let ortho = lemma2_check(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        assert!((ortho.alpha - FRAC_PI_2).abs() < 1e-15);
        assert!((ortho.slack - 1.0).abs() < 1e-12);

        let anti = lemma2_check(&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!((anti.alpha - PI).abs() < 1e-15);
        assert!(anti.holds);
        assert!(lemma2_check(&[0.0; 3], &e, &e).is_err());
    }

    #[test]
    fn g_grid_matches_closed_form() {
        for c in [0.5, 0.5625, 0.75] {
            let grid = minimize_g_bruteforce(c, 1e-3).unwrap();
            let closed = analytic_g_minimum(c).unwrap();
            assert!(
                (grid.value - closed).abs() <= 2e-3,
                "c={c}: {} vs {closed}",
                grid.value
            );
            assert!(grid.value >= closed - 1e-12);
            assert!(grid.point.is_feasible(c, 1e-12));
        }
        let near_one = minimize_g_bruteforce(0.9999, 1e-3).unwrap();
        assert!((near_one.value - (h(0.9999f64.sqrt()) + 2.0)).abs() <= 2e-3);
        assert!(near_one.value < 2.01);
    }

    #[test]
    fn g_grid_domain() {
        assert!(minimize_g_bruteforce(0.4, 1e-3).is_err());
        assert!(minimize_g_bruteforce(1.0, 1e-3).is_err());
        assert!(minimize_g_bruteforce(0.6, 1e-5).is_err());
        assert!(minimize_g_bruteforce(0.6, 0.1).is_err());
    }

    #[test]
    fn grid_includes_endpoints() {
        let pts: Vec<f64> = grid(0.25, 1.0, 0.3).collect();
        let expected = [0.25, 0.55, 0.85, 1.0];
        assert_eq!(pts.len(), expected.len());
        assert!(pts.iter().zip(expected).all(|(p, e)| (p - e).abs() < 1e-15));
        assert_eq!(pts[3], 1.0);
        let single: Vec<f64> = grid(0.0, 0.0, 0.1).collect();
        assert_eq!(single, vec![0.0]);
    }
}
