use serde::{Deserialize, Serialize};

use crate::bloch::BlochVector;
use crate::error::{Error, Result};

pub const MAX_MEMBERS: usize = 8;
const PROB_TOL: f64 = 1e-12;

/// Bloch distance under which two members count as the same state when the
/// effective size of an ensemble is reported.
pub const MERGE_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub p: f64,
    pub w: BlochVector,
}

/// A finite list of `(probability, state)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Member>", into = "Vec<Member>")]
pub struct Ensemble {
    members: Vec<Member>,
}

impl TryFrom<Vec<Member>> for Ensemble {
    type Error = Error;
    fn try_from(members: Vec<Member>) -> Result<Self> {
        Ensemble::new(members)
    }
}

impl From<Ensemble> for Vec<Member> {
    fn from(e: Ensemble) -> Self {
        e.members
    }
}

impl Ensemble {
    pub fn new(members: Vec<Member>) -> Result<Self> {
        if members.is_empty() || members.len() > MAX_MEMBERS {
            return Err(Error::InvalidEnsemble(format!(
                "size {} outside 1..={MAX_MEMBERS}",
                members.len()
            )));
        }
        if let Some(m) = members
            .iter()
            .find(|m| m.p.is_nan() || m.p < 0.0 || !m.w.is_valid())
        {
            return Err(Error::InvalidEnsemble(format!(
                "member p = {}, w = {:?} is not a valid weighted state",
                m.p, m.w
            )));
        }
        let total: f64 = members.iter().map(|m| m.p).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Ensemble { members })
    }

    /// Builds an ensemble from unnormalized weights, dropping members whose
    /// normalized weight falls below `prune`.
    pub fn from_weights(
        pairs: impl IntoIterator<Item = (f64, BlochVector)>,
        prune: f64,
    ) -> Result<Self> {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let total: f64 = pairs.iter().map(|(p, _)| p).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidEnsemble("weights sum to zero".into()));
        }
        let kept: Vec<_> = pairs
            .into_iter()
            .filter(|(p, _)| p / total >= prune)
            .collect();
        let kept_total: f64 = kept.iter().map(|(p, _)| p).sum();
        Ensemble::new(
            kept.into_iter()
                .map(|(p, w)| Member {
                    p: p / kept_total,
                    w,
                })
                .collect(),
        )
    }

    pub fn pair(p: f64, a: BlochVector, b: BlochVector) -> Result<Self> {
        Ensemble::new(vec![Member { p, w: a }, Member { p: 1.0 - p, w: b }])
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn average(&self) -> BlochVector {
        self.members
            .iter()
            .fold(BlochVector::ORIGIN, |acc, m| acc + m.p * m.w)
    }

    pub fn map_states(&self, f: impl Fn(BlochVector) -> BlochVector) -> Ensemble {
        Ensemble {
            members: self
                .members
                .iter()
                .map(|m| Member { p: m.p, w: f(m.w) })
                .collect(),
        }
    }

    /// Merges members closer than `dist`, summing their probabilities. The
    /// merged state is the probability-weighted mean, which is a valid state.
    pub fn merged(&self, dist: f64) -> Ensemble {
        let mut out: Vec<Member> = Vec::with_capacity(self.members.len());
        for m in &self.members {
            match out.iter_mut().find(|o| o.w.distance(m.w) <= dist) {
                Some(o) => {
                    let p = o.p + m.p;
                    if p > 0.0 {
                        o.w = (o.p / p) * o.w + (m.p / p) * m.w;
                    }
                    o.p = p;
                }
                None => out.push(*m),
            }
        }
        Ensemble { members: out }
    }

    /// Number of distinct states after merging at [`MERGE_DISTANCE`].
    pub fn effective_size(&self) -> usize {
        self.merged(MERGE_DISTANCE).len()
    }

    /// Sorts members by z descending, then x descending, then y descending.
    pub fn canonicalized(&self) -> Ensemble {
        let mut members = self.members.clone();
        members.sort_by(|a, b| {
            b.w.z
                .total_cmp(&a.w.z)
                .then(b.w.x.total_cmp(&a.w.x))
                .then(b.w.y.total_cmp(&a.w.y))
        });
        Ensemble { members }
    }
}

/// `½(E₁ + E₂)`: members of both ensembles with halved probabilities,
/// coincident states (within 1e-12) merged.
pub fn average_ensembles(e1: &Ensemble, e2: &Ensemble) -> Ensemble {
    let mut members: Vec<Member> = Vec::with_capacity(e1.len() + e2.len());
    for m in e1.members.iter().chain(e2.members.iter()) {
        let half = Member {
            p: 0.5 * m.p,
            w: m.w,
        };
        match members.iter_mut().find(|o| o.w.distance(half.w) <= 1e-12) {
            Some(o) => o.p += half.p,
            None => members.push(half),
        }
    }
    Ensemble { members }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: f64, x: f64, y: f64, z: f64) -> Member {
        Member {
            p,
            w: BlochVector::new(x, y, z),
        }
    }

    #[test]
    fn validation() {
        assert!(Ensemble::new(vec![]).is_err());
        assert!(Ensemble::new(vec![m(0.5, 0.0, 0.0, 1.0)]).is_err());
        assert!(Ensemble::new(vec![m(1.0, 0.0, 0.0, 1.1)]).is_err());
        assert!(Ensemble::new(vec![m(1.2, 0.0, 0.0, 1.0), m(-0.2, 0.0, 0.0, -1.0)]).is_err());
        assert!(Ensemble::new(vec![m(0.125, 0.0, 0.0, 1.0); 8]).is_ok());
        assert!(Ensemble::new(vec![m(1.0 / 9.0, 0.0, 0.0, 1.0); 9]).is_err());
    }

    #[test]
    fn averaging_self_is_identity() {
        let e = Ensemble::new(vec![m(0.3, 0.0, 0.0, 1.0), m(0.7, 0.6, 0.0, -0.8)]).unwrap();
        assert_eq!(average_ensembles(&e, &e), e);
    }

    #[test]
    fn averaging_distinct_pairs_halves() {
        let a = Ensemble::pair(0.6, BlochVector::NORTH, BlochVector::SOUTH).unwrap();
        let b = Ensemble::pair(
            0.5,
            BlochVector::new(1.0, 0.0, 0.0),
            BlochVector::new(-1.0, 0.0, 0.0),
        )
        .unwrap();
        let avg = average_ensembles(&a, &b);
        assert_eq!(avg.len(), 4);
        let ps: Vec<f64> = avg.members().iter().map(|m| m.p).collect();
        assert_eq!(ps, vec![0.3, 0.2, 0.25, 0.25]);
        assert!(Ensemble::new(avg.members().to_vec()).is_ok());
    }

    #[test]
    fn merge_and_canonical_order() {
        let e = Ensemble::new(vec![
            m(0.2, -0.6, 0.0, -0.8),
            m(0.3, 0.0, 0.0, 1.0),
            m(0.2, 0.6, 0.0, -0.8),
            m(0.3, 0.0, 0.0, 1.0 - 1e-9),
        ])
        .unwrap();
        assert_eq!(e.effective_size(), 3);
        let c = e.merged(MERGE_DISTANCE).canonicalized();
        assert_eq!(c.members()[0].p, 0.6);
        assert_eq!(c.members()[1].w.x, 0.6);
        assert_eq!(c.members()[2].w.x, -0.6);
    }

    #[test]
    fn from_weights_prunes_and_renormalizes() {
        let e = Ensemble::from_weights(
            [
                (2.0, BlochVector::NORTH),
                (1e-12, BlochVector::ORIGIN),
                (2.0, BlochVector::SOUTH),
            ],
            1e-9,
        )
        .unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.members()[0].p, 0.5);
    }

    #[test]
    fn json_shape() {
        let e = Ensemble::pair(0.25, BlochVector::NORTH, BlochVector::SOUTH).unwrap();
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(
            v,
            serde_json::json!([{"p": 0.25, "w": [0.0, 0.0, 1.0]}, {"p": 0.75, "w": [0.0, 0.0, -1.0]}])
        );
        let back: Ensemble = serde_json::from_value(v).unwrap();
        assert_eq!(back, e);
    }
}
