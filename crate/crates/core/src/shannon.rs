//! Single-letter Shannon capacity: accessible information maximized over
//! input ensembles and output measurements, both restricted to products.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{xlog2x_neg, BlochVector};
use crate::capacity::CapacityResult;
use crate::channel::QubitChannel;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, scan_then_golden_max, SimplexOptions};

/// One POVM element `E = weight·[I + direction·σ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmElement {
    pub weight: f64,
    pub direction: BlochVector,
}

/// Elements `E_k = weight_k·[I + n_k·σ]` with `Σ E_k = I`, i.e.
/// `Σ weight_k = 1` and `Σ weight_k n_k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let bad = |msg: String| Err(Error::Domain(format!("invalid POVM: {msg}")));
        if elements.is_empty() {
            return bad("no elements".into());
        }
        if let Some(e) = elements
            .iter()
            .find(|e| e.weight.is_nan() || e.weight < 0.0 || !e.direction.is_valid())
        {
            return bad(format!("element {e:?} is not positive semidefinite"));
        }
        let total: f64 = elements.iter().map(|e| e.weight).sum();
        let moment = elements
            .iter()
            .fold(BlochVector::ORIGIN, |acc, e| acc + e.weight * e.direction);
        if (total - 1.0).abs() > 1e-12 || moment.norm() > 1e-12 {
            return bad(format!("elements sum to {total}·I + {moment:?}·σ"));
        }
        Ok(Povm { elements })
    }

    /// Two-outcome projective measurement `½[I ± axis·σ]`.
    pub fn projective(axis: BlochVector) -> Result<Self> {
        let n = axis.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "measurement axis must be a unit vector, |axis| = {n}"
            )));
        }
        Ok(Povm {
            elements: vec![
                PovmElement {
                    weight: 0.5,
                    direction: axis,
                },
                PovmElement {
                    weight: 0.5,
                    direction: -1.0 * axis,
                },
            ],
        })
    }

    /// The trivial one-outcome measurement `{I}`.
    pub fn trivial() -> Self {
        Povm {
            elements: vec![PovmElement {
                weight: 1.0,
                direction: BlochVector::ORIGIN,
            }],
        }
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }
}

/// Mutual information in bits of a joint distribution given row-major.
fn mutual_information(joint: &[f64], rows: usize, cols: usize) -> f64 {
    let mut row = vec![0.0; rows];
    let mut col = vec![0.0; cols];
    for j in 0..rows {
        for k in 0..cols {
            let v = joint[j * cols + k];
            row[j] += v;
            col[k] += v;
        }
    }
    let h = |v: &[f64]| v.iter().map(|&x| xlog2x_neg(x)).sum::<f64>();
    (h(&row) + h(&col) - h(joint)).max(0.0)
}

fn information(channel: &QubitChannel, inputs: &[(f64, BlochVector)], povm: &[PovmElement]) -> f64 {
    let cols = povm.len();
    let mut joint = Vec::with_capacity(inputs.len() * cols);
    for &(p, w) in inputs {
        let out = channel.apply(w);
        for e in povm {
            joint.push((p * e.weight * (1.0 + out.dot(e.direction))).max(0.0));
        }
    }
    mutual_information(&joint, inputs.len(), cols)
}

/// Classical mutual information between the ensemble index and the outcome
/// of `povm` on the channel output, `p(j,k) = π_j Tr[Φ(ρ_j) E_k]`.
pub fn accessible_information(channel: &QubitChannel, ensemble: &Ensemble, povm: &Povm) -> f64 {
    let inputs: Vec<_> = ensemble.members().iter().map(|m| (m.p, m.w)).collect();
    information(channel, &inputs, &povm.elements)
}

/// Measurement class searched by [`optimize_shannon`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShannonMode {
    /// Two pure inputs and a two-outcome projective measurement, all in the
    /// x-z plane.
    #[default]
    Projective,
    /// Three pure inputs and a three-outcome POVM in the x-z plane. Only a
    /// probe of the restriction above.
    Trine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShannonResult {
    #[serde(flatten)]
    pub result: CapacityResult,
    /// Axis of the first outcome; the remaining outcome directions are in
    /// `povm`.
    pub measurement_axis: BlochVector,
    #[serde(skip)]
    pub povm: Povm,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn pair_inputs(x: &[f64]) -> [(f64, BlochVector); 2] {
    let p = sigmoid(x[2]);
    [
        (p, BlochVector::in_xz_plane(x[0])),
        (1.0 - p, BlochVector::in_xz_plane(x[1])),
    ]
}

fn projective_elements(phi: f64) -> [PovmElement; 2] {
    let n = BlochVector::in_xz_plane(phi);
    [
        PovmElement {
            weight: 0.5,
            direction: n,
        },
        PovmElement {
            weight: 0.5,
            direction: -1.0 * n,
        },
    ]
}

/// Best projective axis for fixed inputs. Axes `φ` and `φ + π` give the same
/// measurement, so `[0, π]` covers every case.
pub(crate) fn best_axis(channel: &QubitChannel, inputs: &[(f64, BlochVector)]) -> (f64, f64) {
    let r = scan_then_golden_max(
        |phi| information(channel, inputs, &projective_elements(phi)),
        0.0,
        std::f64::consts::PI,
        90,
        1e-9,
    );
    (r.x, r.value)
}

/// Weights making three in-plane directions a POVM, or `None` when the
/// origin is not inside their convex hull.
fn trine_weights(angles: [f64; 3]) -> Option<[f64; 3]> {
    let d = |a: f64, b: f64| (b - a).sin();
    let raw = [
        d(angles[1], angles[2]),
        d(angles[2], angles[0]),
        d(angles[0], angles[1]),
    ];
    let total: f64 = raw.iter().sum();
    if total.abs() < 1e-12 {
        return None;
    }
    let w = raw.map(|r| r / total);
    if w.iter().any(|&v| v < 0.0) {
        return None;
    }
    Some(w)
}

fn trine_elements(angles: [f64; 3]) -> Option<[PovmElement; 3]> {
    let w = trine_weights(angles)?;
    Some([0, 1, 2].map(|k| PovmElement {
        weight: w[k],
        direction: BlochVector::in_xz_plane(angles[k]),
    }))
}

fn trine_inputs(x: &[f64]) -> [(f64, BlochVector); 3] {
    let top = x[3].max(x[4]).max(0.0);
    let e = [(x[3] - top).exp(), (x[4] - top).exp(), (-top).exp()];
    let t: f64 = e.iter().sum();
    [0, 1, 2].map(|k| (e[k] / t, BlochVector::in_xz_plane(x[k])))
}

/// Shannon capacity under `ShannonMode::Projective`.
pub fn optimize_shannon(channel: &QubitChannel, seed: u64) -> ShannonResult {
    optimize_shannon_with(channel, ShannonMode::Projective, seed)
}

pub fn optimize_shannon_with(
    channel: &QubitChannel,
    mode: ShannonMode,
    seed: u64,
) -> ShannonResult {
    match mode {
        ShannonMode::Projective => projective_search(channel, seed),
        ShannonMode::Trine => trine_search(channel, seed),
    }
}

fn projective_search(channel: &QubitChannel, seed: u64) -> ShannonResult {
    use std::f64::consts::{FRAC_PI_2, PI};
    let mut starts: Vec<Vec<f64>> = vec![
        vec![0.0, PI, 0.0],
        vec![FRAC_PI_2, -FRAC_PI_2, 0.0],
        vec![0.3, PI - 0.3, 0.0],
        vec![2.0, -2.0, 0.0],
    ];
    for i in 0..12u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (i + 1));
        starts.push(vec![
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
            rng.random_range(-1.0..1.0),
        ]);
    }
    let opts = SimplexOptions {
        x_tol: 1e-9,
        max_evals: 4000,
        initial_step: 0.3,
        restarts: 2,
    };
    let runs: Vec<_> = starts
        .par_iter()
        .map(|x0| nelder_mead(|x| -best_axis(channel, &pair_inputs(x)).1, x0, &opts))
        .collect();
    let outer_evals: usize = runs.iter().map(|r| r.evals).sum();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one start");
    let inputs = pair_inputs(&best.x);
    let (phi, value) = best_axis(channel, &inputs);
    finish(
        channel,
        &inputs,
        projective_elements(phi).to_vec(),
        value,
        outer_evals,
    )
}

fn trine_search(channel: &QubitChannel, seed: u64) -> ShannonResult {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};
    let objective = |x: &[f64]| match trine_elements([x[5], x[6], x[7]]) {
        Some(povm) => -information(channel, &trine_inputs(x), &povm),
        None => f64::INFINITY,
    };
    let mut starts: Vec<Vec<f64>> = vec![
        vec![
            0.0,
            PI,
            FRAC_PI_2,
            0.0,
            0.0,
            0.0,
            TAU / 3.0,
            2.0 * TAU / 3.0,
        ],
        vec![
            0.0,
            TAU / 3.0,
            2.0 * TAU / 3.0,
            0.0,
            0.0,
            0.0,
            TAU / 3.0,
            2.0 * TAU / 3.0,
        ],
        vec![0.0, PI - 0.3, PI + 0.3, 0.0, 0.0, 0.1, PI + 0.2, PI - 0.2],
    ];
    for i in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ (i + 1));
        let mut x: Vec<f64> = (0..3).map(|_| rng.random_range(-PI..PI)).collect();
        x.extend((0..2).map(|_| rng.random_range(-1.0..1.0)));
        let base = rng.random_range(0.0..TAU);
        x.extend((0..3).map(|k| base + TAU * k as f64 / 3.0 + rng.random_range(-0.3..0.3)));
        starts.push(x);
    }
    let opts = SimplexOptions {
        x_tol: 1e-9,
        max_evals: 40_000,
        initial_step: 0.3,
        restarts: 3,
    };
    let runs: Vec<_> = starts
        .par_iter()
        .map(|x0| nelder_mead(objective, x0, &opts))
        .collect();
    let evals: usize = runs.iter().map(|r| r.evals).sum();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one start");
    let inputs = trine_inputs(&best.x);
    let povm = trine_elements([best.x[5], best.x[6], best.x[7]]).expect("best point is feasible");
    finish(channel, &inputs, povm.to_vec(), -best.value, evals)
}

fn finish(
    channel: &QubitChannel,
    inputs: &[(f64, BlochVector)],
    povm: Vec<PovmElement>,
    value: f64,
    evaluations: usize,
) -> ShannonResult {
    let mut result = CapacityResult::assemble(channel, inputs.iter().copied(), evaluations)
        .expect("optimizer weights form a distribution");
    // the Holevo-χ value computed by assemble is replaced by the information
    result.value = value;
    result.equidistance_residual = crate::capacity::equidistance_check(channel, &result);
    let measurement_axis = povm[0].direction;
    let povm = Povm::new(povm).expect("search only produces complete measurements");
    ShannonResult {
        result,
        measurement_axis,
        povm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::chi;
    use crate::ensemble::Member;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, TAU};

    fn z_measurement() -> Povm {
        Povm::projective(BlochVector::NORTH).unwrap()
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![PovmElement {
            weight: 0.5,
            direction: BlochVector::NORTH
        }])
        .is_err());
        assert!(Povm::projective(BlochVector::new(0.0, 0.0, 0.5)).is_err());
        let trine = trine_elements([
            0.0,
            std::f64::consts::TAU / 3.0,
            2.0 * std::f64::consts::TAU / 3.0,
        ])
        .unwrap();
        for e in &trine {
            assert_abs_diff_eq!(e.weight, 1.0 / 3.0, epsilon = 1e-12);
        }
        assert!(Povm::new(trine.to_vec()).is_ok());
        assert!(trine_weights([0.0, 0.1, 0.2]).is_none());
    }

    #[test]
    fn noiseless_bit() {
        let e = Ensemble::pair(0.5, BlochVector::NORTH, BlochVector::SOUTH).unwrap();
        let v = accessible_information(&QubitChannel::identity(), &e, &z_measurement());
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn trivial_measurement_carries_nothing() {
        let e = Ensemble::pair(0.3, BlochVector::NORTH, BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        let ch = QubitChannel::stretched(0.5, 0.6).unwrap();
        assert_eq!(accessible_information(&ch, &e, &Povm::trivial()), 0.0);
    }

    #[test]
    fn qc_channel_shannon_equals_holevo() {
        let qc = QubitChannel::qc(0.5, 0.5).unwrap();
        let e = Ensemble::pair(0.6, BlochVector::NORTH, BlochVector::SOUTH).unwrap();
        let v = accessible_information(&qc, &e, &z_measurement());
        assert_abs_diff_eq!(v, chi(&qc, &e), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.32193, epsilon = 5e-6);
    }

    #[test]
    fn identity_shannon_capacity_is_one_bit() {
        let r = optimize_shannon(&QubitChannel::identity(), 0);
        assert_abs_diff_eq!(r.result.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn holevo_bound_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = QubitChannel::squeezed(0.5, 0.435).unwrap();
        for _ in 0..200 {
            let members: Vec<Member> = {
                let a: f64 = rng.random_range(0.05..0.95);
                vec![
                    Member {
                        p: a,
                        w: BlochVector::from_angles(
                            rng.random_range(0.0..PI),
                            rng.random_range(0.0..TAU),
                        ),
                    },
                    Member {
                        p: 1.0 - a,
                        w: BlochVector::from_angles(
                            rng.random_range(0.0..PI),
                            rng.random_range(0.0..TAU),
                        ),
                    },
                ]
            };
            let e = Ensemble::new(members).unwrap();
            let povm = Povm::projective(BlochVector::from_angles(
                rng.random_range(0.0..PI),
                rng.random_range(0.0..TAU),
            ))
            .unwrap();
            assert!(accessible_information(&ch, &e, &povm) <= chi(&ch, &e) + 1e-10);
        }
    }

    #[test]
    fn result_json_has_measurement_axis() {
        let r = optimize_shannon(&QubitChannel::identity(), 0);
        let v = serde_json::to_value(&r).unwrap();
        assert!(v.get("measurement_axis").is_some());
        assert!(v.get("value").is_some());
        assert!(v.get("ensemble").is_some());
    }
}
