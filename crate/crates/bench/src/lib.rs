//! Fixtures shared by the criterion benches.

use qchan_core::verify::{random_basis, random_cptp, trial_seed};
use qchan_core::{KrausChannel, QubitBasis};

/// Deterministic (channel, basis) pairs with Kraus ranks cycling through 1..=4.
pub fn workload(n: u64) -> Vec<(KrausChannel, QubitBasis)> {
    (0..n)
        .map(|i| {
            let rank = 1 + (i % 4) as usize;
            let channel = random_cptp(rank, trial_seed(99, 2 * i)).expect("valid rank");
            (channel, random_basis(trial_seed(99, 2 * i + 1)))
        })
        .collect()
}
