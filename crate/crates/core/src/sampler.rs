//! Seeded Monte Carlo sampling of circuit outcomes.
//!
//! Each trial walks the circuit with a normalized state and draws at the
//! classical branch points only: survive-or-absorb at every absorption
//! channel, then one detector from the terminal |amplitude|². Unitaries are
//! applied exactly.
//!
//! Trial `i` draws from ChaCha8 seeded with `seed` on stream `i`, so the
//! counts do not depend on how trials are scheduled across threads.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuits::{run_exact, sink_outcome, Circuit, OutcomeDistribution, Step};
use crate::error::{IfmError, Result};
use crate::qcore::ModeState;

/// Generator name recorded in report metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.9), seed_from_u64(seed), stream = trial index";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub counts: BTreeMap<String, u64>,
    pub trials: u64,
    pub empirical: BTreeMap<String, f64>,
    /// Largest |empirical − exact| over every label seen or predicted.
    pub max_abs_dev: f64,
    pub seed: u64,
    pub exact: OutcomeDistribution,
}

impl SampleReport {
    /// Pearson chi-square of the counts against the exact distribution, over
    /// outcomes with non-zero exact probability. Returns the statistic and
    /// the degrees of freedom. Any count on a zero-probability outcome makes
    /// the statistic infinite.
    pub fn chi_square(&self) -> (f64, usize) {
        let n = self.trials as f64;
        let mut stat = 0.0;
        let mut cells = 0;
        for (label, p) in self.exact.iter() {
            let observed = self.counts.get(label).copied().unwrap_or(0) as f64;
            if p > 1e-15 {
                let expected = n * p;
                stat += (observed - expected).powi(2) / expected;
                cells += 1;
            } else if observed > 0.0 {
                return (f64::INFINITY, cells.max(1) - 1);
            }
        }
        (stat, cells.max(1) - 1)
    }
}

/// Precomputed walk: steps with the outcome index of every absorption, and
/// the outcome index of every terminal basis state.
struct Plan<'a> {
    steps: Vec<(Step<'a>, Option<usize>)>,
    terminal: Vec<usize>,
    labels: Vec<String>,
}

impl<'a> Plan<'a> {
    fn new(circuit: &'a Circuit) -> Self {
        let steps = circuit.steps();
        let terminal_labels = circuit.terminal_labels();
        let mut all = BTreeSet::new();
        for s in &steps {
            if let Step::Absorption {
                channel,
                repetition,
            } = s
            {
                all.insert(sink_outcome(channel.sink_label(), *repetition));
            }
        }
        all.extend(terminal_labels.iter().cloned());
        let labels: Vec<String> = all.into_iter().collect();
        let index = |l: &str| {
            labels
                .binary_search_by(|x| x.as_str().cmp(l))
                .expect("label collected above")
        };
        let steps = steps
            .into_iter()
            .map(|s| {
                let idx = match s {
                    Step::Absorption {
                        channel,
                        repetition,
                    } => Some(index(&sink_outcome(channel.sink_label(), repetition))),
                    Step::Unitary(_) => None,
                };
                (s, idx)
            })
            .collect();
        let terminal = terminal_labels.iter().map(|l| index(l)).collect();
        Plan {
            steps,
            terminal,
            labels,
        }
    }

    fn trajectory(&self, initial: &ModeState, rng: &mut impl Rng) -> Result<usize> {
        let mut state = initial.with_unit_weight();
        for (step, idx) in &self.steps {
            match step {
                Step::Unitary(u) => state = state.apply_unitary(u)?,
                Step::Absorption { channel, .. } => {
                    let (survivor, event) = state.apply_absorption(channel)?;
                    if rng.random::<f64>() < event.probability {
                        return Ok(idx.expect("absorption steps carry an outcome index"));
                    }
                    state = survivor.with_unit_weight();
                }
            }
        }
        let u = rng.random::<f64>() * state.norm_sq();
        let mut acc = 0.0;
        let mut last = None;
        for (flat, a) in state.amplitudes().iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            acc += p;
            last = Some(flat);
            if u < acc {
                return Ok(self.terminal[flat]);
            }
        }
        last.map(|f| self.terminal[f])
            .ok_or_else(|| IfmError::config("terminal state has no support"))
    }
}

/// Runs `trials` seeded trajectories of `circuit` and compares the
/// frequencies with [`run_exact`].
pub fn sample(
    circuit: &Circuit,
    initial: &ModeState,
    trials: u64,
    seed: u64,
) -> Result<SampleReport> {
    if trials == 0 {
        return Err(IfmError::domain("trials must be at least 1"));
    }
    let exact = run_exact(circuit, initial)?;
    let plan = Plan::new(circuit);
    let k = plan.labels.len();

    let tallies = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            plan.trajectory(initial, &mut rng)
        })
        .try_fold(
            || vec![0u64; k],
            |mut acc, outcome| {
                acc[outcome?] += 1;
                Ok::<_, IfmError>(acc)
            },
        )
        .try_reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;

    let counts: BTreeMap<String, u64> = plan.labels.iter().cloned().zip(tallies).collect();
    let empirical: BTreeMap<String, f64> = counts
        .iter()
        .map(|(l, &c)| (l.clone(), c as f64 / trials as f64))
        .collect();
    let max_abs_dev = empirical
        .iter()
        .map(|(l, &f)| (f - exact.get(l)).abs())
        .chain(
            exact
                .iter()
                .map(|(l, p)| (empirical.get(l).copied().unwrap_or(0.0) - p).abs()),
        )
        .fold(0.0, f64::max);
    Ok(SampleReport {
        counts,
        trials,
        empirical,
        max_abs_dev,
        seed,
        exact,
    })
}
