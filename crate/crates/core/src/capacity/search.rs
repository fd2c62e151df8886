//! Multi-start maximization of χ over ensembles of at most `n` pure states.
//!
//! States are parametrized by angles (a polar angle per state in the x-z
//! plane, or polar and azimuthal angles on the full sphere); probabilities
//! are a softmax of `n − 1` free logits with the last logit pinned at zero.
//! Each start runs an independent Nelder–Mead descent on `−χ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{chi_weighted, CapacityResult};
use crate::bloch::BlochVector;
use crate::channel::QubitChannel;
use crate::optimize::{nelder_mead, SimplexOptions};

/// Where the input states may live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpace {
    Sphere,
    XzPlane,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub simplex: SimplexOptions,
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            simplex: SimplexOptions::default(),
            random_starts: 24,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig {
            seed,
            ..Default::default()
        }
    }
}

const MAX_STATES: usize = 4;

struct Layout {
    n: usize,
    space: StateSpace,
}

impl Layout {
    fn angles_per_state(&self) -> usize {
        match self.space {
            StateSpace::Sphere => 2,
            StateSpace::XzPlane => 1,
        }
    }

    fn dim(&self) -> usize {
        self.n * self.angles_per_state() + self.n - 1
    }

    fn decode(&self, x: &[f64], out: &mut Vec<(f64, BlochVector)>) {
        out.clear();
        let k = self.angles_per_state();
        let logits = &x[self.n * k..];
        let top = logits.iter().copied().fold(0.0, f64::max);
        let mut total = (-top).exp();
        for l in logits {
            total += (l - top).exp();
        }
        for i in 0..self.n {
            let w = match self.space {
                StateSpace::Sphere => BlochVector::from_angles(x[2 * i], x[2 * i + 1]),
                StateSpace::XzPlane => BlochVector::in_xz_plane(x[i]),
            };
            let l = if i + 1 < self.n { logits[i] } else { 0.0 };
            out.push(((l - top).exp() / total, w));
        }
    }

    fn encode(&self, states: &[(f64, BlochVector)]) -> Vec<f64> {
        debug_assert_eq!(states.len(), self.n);
        let mut x = Vec::with_capacity(self.dim());
        for &(_, w) in states {
            match self.space {
                StateSpace::Sphere => {
                    x.push(w.z.clamp(-1.0, 1.0).acos());
                    x.push(w.y.atan2(w.x));
                }
                StateSpace::XzPlane => x.push(w.x.atan2(w.z)),
            }
        }
        let last = states[self.n - 1].0.max(1e-300).ln();
        for &(p, _) in &states[..self.n - 1] {
            x.push(p.max(1e-300).ln() - last);
        }
        x
    }
}

/// Resizes a start to exactly `n` states: truncates (renormalizing) or pads
/// by splitting the heaviest member into two coincident halves, which leaves
/// χ unchanged.
fn fit_to(mut states: Vec<(f64, BlochVector)>, n: usize) -> Vec<(f64, BlochVector)> {
    states.truncate(n);
    while states.len() < n {
        let (i, _) = states
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .expect("start has at least one state");
        states[i].0 *= 0.5;
        let copy = states[i];
        states.push(copy);
    }
    let total: f64 = states.iter().map(|s| s.0).sum();
    states.iter_mut().for_each(|s| s.0 /= total);
    states
}

fn in_plane(alpha: f64) -> BlochVector {
    BlochVector::in_xz_plane(alpha)
}

/// The eight deterministic starts: vertical and horizontal pairs, equally
/// spaced triples and quadruples in the x-z plane at two phases, and a
/// pole-plus-symmetric-pair pattern from each pole.
fn deterministic_starts() -> Vec<Vec<(f64, BlochVector)>> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    let spaced = |count: usize, phase: f64| {
        (0..count)
            .map(|k| {
                (
                    1.0 / count as f64,
                    in_plane(phase + 2.0 * PI * k as f64 / count as f64),
                )
            })
            .collect::<Vec<_>>()
    };
    let tilted = |pole: BlochVector, z: f64| {
        let x = (1.0 - z * z).sqrt();
        vec![
            (0.4, pole),
            (0.3, BlochVector::new(x, 0.0, z)),
            (0.3, BlochVector::new(-x, 0.0, z)),
        ]
    };
    vec![
        vec![(0.5, BlochVector::NORTH), (0.5, BlochVector::SOUTH)],
        vec![(0.5, in_plane(FRAC_PI_2)), (0.5, in_plane(-FRAC_PI_2))],
        spaced(3, 0.0),
        spaced(3, PI),
        spaced(4, 0.0),
        spaced(4, FRAC_PI_4),
        tilted(BlochVector::NORTH, -0.35),
        tilted(BlochVector::SOUTH, 0.35),
    ]
}

fn random_start(rng: &mut ChaCha8Rng, n: usize, space: StateSpace) -> Vec<(f64, BlochVector)> {
    (0..n)
        .map(|_| {
            let w = match space {
                StateSpace::Sphere => {
                    let z: f64 = rng.random_range(-1.0..1.0);
                    BlochVector::from_angles(z.acos(), rng.random_range(0.0..std::f64::consts::TAU))
                }
                StateSpace::XzPlane => {
                    in_plane(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                }
            };
            (rng.random_range(-1.0f64..1.0).exp(), w)
        })
        .collect()
}

fn start_seed(seed: u64, n: usize, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ ((n as u64) << 48)
        ^ (index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Best ensemble of exactly `n` (possibly coincident) states, starting from
/// the standard start set plus an optional warm start.
fn search_n(
    channel: &QubitChannel,
    n: usize,
    space: StateSpace,
    config: &SearchConfig,
    warm: Option<&CapacityResult>,
) -> CapacityResult {
    let layout = Layout { n, space };
    let mut starts: Vec<Vec<(f64, BlochVector)>> = deterministic_starts();
    for i in 0..config.random_starts {
        let mut rng = ChaCha8Rng::seed_from_u64(start_seed(config.seed, n, i));
        starts.push(random_start(&mut rng, n, space));
    }
    if let Some(w) = warm {
        starts.push(w.ensemble.members().iter().map(|m| (m.p, m.w)).collect());
    }
    let encoded: Vec<Vec<f64>> = starts
        .into_iter()
        .map(|s| layout.encode(&fit_to(s, n)))
        .collect();

    let runs: Vec<_> = encoded
        .par_iter()
        .map(|x0| {
            let objective = |x: &[f64]| {
                let mut buf = Vec::with_capacity(MAX_STATES);
                layout.decode(x, &mut buf);
                -chi_weighted(channel, &buf)
            };
            nelder_mead(objective, x0, &config.simplex)
        })
        .collect();

    let evaluations: usize = runs.iter().map(|r| r.evals).sum();
    // index order breaks exact ties, so the reduction does not depend on
    // which thread finished first
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one start");
    let mut weighted = Vec::with_capacity(n);
    layout.decode(&best.x, &mut weighted);
    let mut result = CapacityResult::assemble(channel, weighted, evaluations)
        .expect("softmax weights form a distribution");
    if let Some(w) = warm {
        if w.value > result.value {
            result = CapacityResult {
                evaluations,
                ..w.clone()
            };
        }
    }
    result
}

fn ladder(
    channel: &QubitChannel,
    max_n: usize,
    space: StateSpace,
    config: &SearchConfig,
) -> Vec<CapacityResult> {
    let mut out: Vec<CapacityResult> = Vec::with_capacity(max_n);
    // one state: χ vanishes identically
    out.push(
        CapacityResult::assemble(channel, [(1.0, BlochVector::NORTH)], 1)
            .expect("single state is a valid ensemble"),
    );
    for n in 2..=max_n {
        let r = search_n(channel, n, space, config, out.last());
        out.push(r);
    }
    out
}

/// Maximizes χ over ensembles of at most `n` pure states (`1 ≤ n ≤ 4`).
///
/// The start set holds eight deterministic configurations,
/// `config.random_starts` seeded random ones, and the optimum for `n − 1`
/// states padded with a coincident copy, so `C_{n−1} ≤ C_n` holds by
/// construction. States with probability below 1e-9 are pruned from the
/// reported ensemble.
pub fn optimize_n_state(
    channel: &QubitChannel,
    n: usize,
    space: StateSpace,
    config: &SearchConfig,
) -> CapacityResult {
    assert!((1..=MAX_STATES).contains(&n), "n must be in 1..=4, got {n}");
    ladder(channel, n, space, config)
        .pop()
        .expect("ladder is nonempty")
}

/// Outcome of [`optimize_global`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalCapacity {
    pub best: CapacityResult,
    /// `C_1, …, C_4` over the full sphere.
    pub by_size: Vec<f64>,
    /// `C_3` exceeds `C_2` by more than 1e-6.
    pub needs_three_states: bool,
}

/// Holevo capacity: the best of the 2-, 3- and 4-state searches over the
/// full sphere.
pub fn optimize_global(channel: &QubitChannel, config: &SearchConfig) -> GlobalCapacity {
    let results = ladder(channel, MAX_STATES, StateSpace::Sphere, config);
    let by_size: Vec<f64> = results.iter().map(|r| r.value).collect();
    let needs_three_states = by_size[2] > by_size[1] + 1e-6;
    let evaluations = results.iter().map(|r| r.evaluations).sum();
    // a larger ensemble replaces a smaller one only when strictly better
    let mut best = results[1].clone();
    for r in &results[2..] {
        if r.value > best.value + 1e-9 {
            best = r.clone();
        }
    }
    let best = CapacityResult {
        evaluations,
        ..best
    };
    GlobalCapacity {
        best,
        by_size,
        needs_three_states,
    }
}
