//! Seeded random generators and randomized falsification runs.
//!
//! Every trial draws from its own generator, seeded by mixing the master seed
//! with the trial index, so a run's content does not depend on how trials are
//! scheduled across threads.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bases::QubitBasis;
use crate::bounds::{
    analytic_g_minimum, check_relation, lemma1_check, lemma2_check, minimize_g_bruteforce,
};
use crate::channels::{validate_cptp, KrausChannel};
use crate::coherence::CoherenceMeasure;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, Ket, DERIVED_TOL};

/// Slack below which a trial is logged as near-saturated.
pub const NEAR_SATURATION: f64 = 1e-3;

/// Default grid step for randomized g-minimum trials.
pub const GMIN_RANDOM_STEP: f64 = 1e-2;
/// Default grid step when `c` is pinned.
pub const GMIN_PINNED_STEP: f64 = 1e-3;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` of a run with the given master seed.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed ^ mix64(index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Orthonormalizes the two columns of a complex Gaussian `rows x 2` matrix.
/// Gram-Schmidt leaves a positive real diagonal in the triangular factor,
/// which is the phase convention that makes the result Haar distributed.
fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize) -> [Vec<Complex64>; 2] {
    loop {
        let mut u: Vec<Complex64> = (0..rows).map(|_| complex_gaussian(rng)).collect();
        let mut v: Vec<Complex64> = (0..rows).map(|_| complex_gaussian(rng)).collect();
        let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nu < 1e-8 {
            continue;
        }
        u.iter_mut().for_each(|z| *z /= nu);
        let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        v.iter_mut().zip(&u).for_each(|(b, a)| *b -= proj * a);
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= nv);
        return [u, v];
    }
}

pub fn sample_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let [c0, c1] = haar_isometry(rng, 2);
    ComplexMatrix::from_rows2([[c0[0], c1[0]], [c0[1], c1[1]]])
}

/// Haar-random 2x2 unitary.
pub fn random_unitary(seed: u64) -> ComplexMatrix {
    sample_unitary(&mut rng_from_seed(seed))
}

pub fn sample_cptp<R: Rng + ?Sized>(rng: &mut R, kraus_count: usize) -> Result<KrausChannel> {
    if !(1..=4).contains(&kraus_count) {
        return Err(Error::Domain(format!(
            "kraus_count = {kraus_count} outside [1, 4]"
        )));
    }
    let [c0, c1] = haar_isometry(rng, 2 * kraus_count);
    let ops = (0..kraus_count)
        .map(|k| {
            let r = 2 * k;
            ComplexMatrix::from_rows2([[c0[r], c1[r]], [c0[r + 1], c1[r + 1]]])
        })
        .collect();
    validate_cptp(ops)
}

/// Channel whose stacked Kraus operators form a Haar-random isometry
/// `C^2 -> C^(2 kraus_count)`.
pub fn random_cptp(kraus_count: usize, seed: u64) -> Result<KrausChannel> {
    sample_cptp(&mut rng_from_seed(seed), kraus_count)
}

pub fn sample_density<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Result<ComplexMatrix> {
    if !(1..=2).contains(&rank) {
        return Err(Error::Domain(format!("rank = {rank} outside [1, 2]")));
    }
    let columns: Vec<Vec<Complex64>> = (0..rank)
        .map(|_| vec![complex_gaussian(rng), complex_gaussian(rng)])
        .collect();
    let trace: f64 = columns.iter().flatten().map(|z| z.norm_sqr()).sum();
    ComplexMatrix::from_outer_sum(&columns, 1.0 / trace)
}

/// `G G^dagger / tr` with `G` a complex Gaussian `2 x rank` matrix.
pub fn random_density(rank: usize, seed: u64) -> Result<ComplexMatrix> {
    sample_density(&mut rng_from_seed(seed), rank)
}

pub fn sample_basis<R: Rng + ?Sized>(rng: &mut R) -> QubitBasis {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let theta = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
    let phi = (TAU * v).min(TAU - 1e-15);
    QubitBasis::from_bloch(theta.min(PI), phi).expect("angles in range")
}

/// Basis whose first vector is uniform on the Bloch sphere.
pub fn random_basis(seed: u64) -> QubitBasis {
    sample_basis(&mut rng_from_seed(seed))
}

pub fn sample_unit_vector3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "theorem1")]
    Theorem1,
    #[serde(rename = "theorem2")]
    Theorem2,
    #[serde(rename = "lemma1")]
    Lemma1,
    #[serde(rename = "lemma2")]
    Lemma2,
    #[serde(rename = "gmin")]
    GMinimum,
}

impl Target {
    pub const ALL: [Target; 5] = [
        Target::Theorem1,
        Target::Theorem2,
        Target::Lemma1,
        Target::Lemma2,
        Target::GMinimum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Theorem1 => "theorem1",
            Target::Theorem2 => "theorem2",
            Target::Lemma1 => "lemma1",
            Target::Lemma2 => "lemma2",
            Target::GMinimum => "gmin",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown target `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsificationConfig {
    pub target: Target,
    pub trials: u64,
    pub master_seed: u64,
    /// Worker threads; `0` lets the pool decide.
    pub jobs: usize,
    /// Pins `c` for the g-minimum target (a single grid evaluation).
    pub gmin_c_max: Option<f64>,
    pub gmin_grid_step: Option<f64>,
}

impl FalsificationConfig {
    pub fn new(target: Target, trials: u64, master_seed: u64) -> Self {
        Self {
            target,
            trials,
            master_seed,
            jobs: 1,
            gmin_c_max: None,
            gmin_grid_step: None,
        }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub trial: u64,
    pub seed: u64,
    pub slack: f64,
    pub inputs: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearSaturation {
    pub trial: u64,
    pub slack: f64,
}

/// Detail of a pinned-`c` g-minimum run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCheck {
    pub c_max: f64,
    pub grid_step: f64,
    pub grid_minimum: f64,
    pub analytic_minimum: f64,
    pub abs_error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub target: Target,
    pub trials: u64,
    pub master_seed: u64,
    pub min_slack: f64,
    pub violations: Vec<Violation>,
    pub near_saturation: Vec<NearSaturation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_check: Option<GridCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Pretty JSON with a trailing newline, as printed by the CLI.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

#[derive(Serialize)]
struct RelationInputs<'a> {
    kraus: &'a [ComplexMatrix],
    basis1: &'a QubitBasis,
    basis2: &'a QubitBasis,
}

#[derive(Serialize)]
struct Lemma1Inputs<'a> {
    density: &'a ComplexMatrix,
    x: &'a Ket,
    z: &'a Ket,
}

#[derive(Serialize)]
struct GridInputs {
    c_max: f64,
    grid_step: f64,
}

struct TrialOutcome {
    slack: f64,
    /// Only materialised when the trial is a violation.
    inputs: Option<serde_json::Value>,
    error: Option<String>,
    grid: Option<GridCheck>,
}

impl TrialOutcome {
    fn new<T: Serialize>(slack: f64, inputs: impl FnOnce() -> T) -> Self {
        let inputs = (slack < -DERIVED_TOL).then(|| json(&inputs()));
        Self {
            slack,
            inputs,
            error: None,
            grid: None,
        }
    }

    fn failed<T: Serialize>(err: Error, inputs: T) -> Self {
        Self {
            slack: f64::NEG_INFINITY,
            inputs: Some(json(&inputs)),
            error: Some(err.to_string()),
            grid: None,
        }
    }
}

fn json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}

fn relation_trial(rng: &mut ChaCha8Rng, measure: CoherenceMeasure) -> TrialOutcome {
    let channel = match measure {
        CoherenceMeasure::RelativeEntropy => {
            let count = rng.gen_range(1..=4);
            sample_cptp(rng, count)
        }
        CoherenceMeasure::L1Norm => validate_cptp(vec![sample_unitary(rng)]),
    };
    let channel = match channel {
        Ok(ch) => ch,
        Err(e) => return TrialOutcome::failed(e, serde_json::Value::Null),
    };
    let basis1 = sample_basis(rng);
    let basis2 = sample_basis(rng);
    let inputs = || RelationInputs {
        kraus: channel.operators(),
        basis1: &basis1,
        basis2: &basis2,
    };
    match check_relation(&channel, &basis1, &basis2, measure, None) {
        Ok(report) => TrialOutcome::new(report.slack, inputs),
        Err(e) => TrialOutcome::failed(e, inputs()),
    }
}

fn lemma1_trial(rng: &mut ChaCha8Rng, index: u64) -> TrialOutcome {
    let rank = 1 + (index % 2) as usize;
    let density = match sample_density(rng, rank) {
        Ok(d) => d,
        Err(e) => return TrialOutcome::failed(e, serde_json::Value::Null),
    };
    let x = *sample_basis(rng).first();
    let z = *sample_basis(rng).first();
    let inputs = || Lemma1Inputs {
        density: &density,
        x: &x,
        z: &z,
    };
    match lemma1_check(&density, &x, &z) {
        Ok(outcome) => TrialOutcome::new(outcome.slack, inputs),
        Err(e) => TrialOutcome::failed(e, inputs()),
    }
}

fn lemma2_trial(rng: &mut ChaCha8Rng) -> TrialOutcome {
    let vectors = [
        sample_unit_vector3(rng),
        sample_unit_vector3(rng),
        sample_unit_vector3(rng),
    ];
    match lemma2_check(&vectors[0], &vectors[1], &vectors[2]) {
        Ok(outcome) => TrialOutcome::new(outcome.slack, || vectors),
        Err(e) => TrialOutcome::failed(e, vectors),
    }
}

/// Slack is the smaller of `grid - analytic` (the grid must not undercut the
/// claimed minimum) and `tol - |grid - analytic|` (the two must agree).
fn gmin_trial(c_max: f64, grid_step: f64) -> TrialOutcome {
    let inputs = GridInputs { c_max, grid_step };
    let grid = match minimize_g_bruteforce(c_max, grid_step) {
        Ok(g) => g,
        Err(e) => return TrialOutcome::failed(e, inputs),
    };
    let analytic = match analytic_g_minimum(c_max) {
        Ok(a) => a,
        Err(e) => return TrialOutcome::failed(e, inputs),
    };
    let tolerance = f64::max(1e-3, 2.0 * grid_step);
    let diff = grid.value - analytic;
    let slack = diff.min(tolerance - diff.abs());
    let mut outcome = TrialOutcome::new(slack, || inputs);
    outcome.grid = Some(GridCheck {
        c_max,
        grid_step,
        grid_minimum: grid.value,
        analytic_minimum: analytic,
        abs_error: diff.abs(),
        tolerance,
    });
    outcome
}

fn run_trial(config: &FalsificationConfig, index: u64, seed: u64) -> TrialOutcome {
    let mut rng = rng_from_seed(seed);
    match config.target {
        Target::Theorem1 => relation_trial(&mut rng, CoherenceMeasure::RelativeEntropy),
        Target::Theorem2 => relation_trial(&mut rng, CoherenceMeasure::L1Norm),
        Target::Lemma1 => lemma1_trial(&mut rng, index),
        Target::Lemma2 => lemma2_trial(&mut rng),
        Target::GMinimum => match config.gmin_c_max {
            Some(c) => gmin_trial(c, config.gmin_grid_step.unwrap_or(GMIN_PINNED_STEP)),
            None => {
                let c = rng.gen_range(0.5..0.999);
                gmin_trial(c, config.gmin_grid_step.unwrap_or(GMIN_RANDOM_STEP))
            }
        },
    }
}

/// Runs `config.trials` independent checks of the target inequality.
/// Violations are collected as data; the run itself only fails on bad
/// configuration.
pub fn run_falsification(config: &FalsificationConfig) -> Result<VerificationReport> {
    if config.trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    // a pinned c makes every trial identical
    let trials = if config.target == Target::GMinimum && config.gmin_c_max.is_some() {
        1
    } else {
        config.trials
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<(u64, u64, TrialOutcome)> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|index| {
                let seed = trial_seed(config.master_seed, index);
                (index, seed, run_trial(config, index, seed))
            })
            .collect()
    });

    let mut min_slack = f64::INFINITY;
    let mut violations = Vec::new();
    let mut near_saturation = Vec::new();
    let mut grid_check = None;
    for (trial, seed, outcome) in outcomes {
        min_slack = min_slack.min(outcome.slack);
        if outcome.slack < -DERIVED_TOL {
            violations.push(Violation {
                trial,
                seed,
                slack: outcome.slack,
                inputs: outcome.inputs.unwrap_or(serde_json::Value::Null),
                error: outcome.error,
            });
        } else if outcome.slack < NEAR_SATURATION && config.target != Target::GMinimum {
            near_saturation.push(NearSaturation {
                trial,
                slack: outcome.slack,
            });
        }
        if config.gmin_c_max.is_some() {
            grid_check = outcome.grid;
        }
    }
    log::info!(
        "{}: {} trials, min slack {:e}, {} violations",
        config.target,
        trials,
        min_slack,
        violations.len()
    );
    Ok(VerificationReport {
        target: config.target,
        trials,
        master_seed: config.master_seed,
        min_slack,
        violations,
        near_saturation,
        grid_check,
    })
}
