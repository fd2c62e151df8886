//! Qubit channels with a diagonal affine action on the Bloch ball,
//! `w ↦ t + Λw`, and the named families built from them.

use serde::{Deserialize, Serialize};

use crate::bloch::BlochVector;
use crate::choi::ChoiMatrix;
use crate::error::{Error, Result};

/// Default tolerance on the smallest Choi eigenvalue.
pub const CP_TOL: f64 = 1e-10;

/// Slack on the image radius accepted by the positivity check.
const POSITIVITY_SLACK: f64 = 1e-9;

/// A qubit channel `w ↦ (t₁ + λ₁w₁, t₂ + λ₂w₂, t₃ + λ₃w₃)`.
///
/// Constructed through [`QubitChannel::new`] (positivity checked),
/// [`QubitChannel::completely_positive`] (Choi matrix checked as well) or one
/// of the family constructors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct QubitChannel {
    lambda: [f64; 3],
    shift: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct RawChannel {
    lambda: [f64; 3],
    shift: [f64; 3],
}

impl TryFrom<RawChannel> for QubitChannel {
    type Error = Error;
    fn try_from(raw: RawChannel) -> Result<Self> {
        QubitChannel::new(raw.lambda, raw.shift)
    }
}

impl From<QubitChannel> for RawChannel {
    fn from(c: QubitChannel) -> Self {
        RawChannel {
            lambda: c.lambda,
            shift: c.shift,
        }
    }
}

/// Convention for the third shift component of the squeezed family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezedShift {
    /// `t₃ = 1 − μ`, the shift of the depolarizing channel being squeezed.
    #[default]
    OneMinusMu,
    /// `t₃ = 1 − q`, which keeps the north pole fixed.
    NorthPoleFixed,
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{name} = {v} must lie in [0, 1]")));
    }
    Ok(())
}

impl QubitChannel {
    /// Builds a channel after checking that the image of the Bloch ball stays
    /// inside the ball.
    pub fn new(lambda: [f64; 3], shift: [f64; 3]) -> Result<Self> {
        if lambda.iter().chain(shift.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("channel parameters must be finite".into()));
        }
        let c = QubitChannel { lambda, shift };
        let radius = c.max_image_radius();
        if radius > 1.0 + POSITIVITY_SLACK {
            return Err(Error::NotPositive { radius });
        }
        Ok(c)
    }

    /// Builds a channel and additionally requires a positive semidefinite
    /// Choi matrix.
    pub fn completely_positive(lambda: [f64; 3], shift: [f64; 3]) -> Result<Self> {
        let c = QubitChannel::new(lambda, shift)?;
        c.require_cp(CP_TOL)
    }

    /// No checks at all. Used to probe parameters outside a family's range.
    pub fn new_unchecked(lambda: [f64; 3], shift: [f64; 3]) -> Self {
        QubitChannel { lambda, shift }
    }

    pub fn identity() -> Self {
        QubitChannel {
            lambda: [1.0; 3],
            shift: [0.0; 3],
        }
    }

    /// `w ↦ (μw₁, μw₂, (1−μ) + μw₃)`.
    pub fn shifted_depolarizing(mu: f64) -> Result<Self> {
        check_unit_interval("mu", mu)?;
        Ok(QubitChannel {
            lambda: [mu; 3],
            shift: [0.0, 0.0, 1.0 - mu],
        })
    }

    /// `w ↦ (√μw₁, √μw₂, (1−μ) + μw₃)`.
    pub fn amplitude_damping(mu: f64) -> Result<Self> {
        check_unit_interval("mu", mu)?;
        let r = mu.sqrt();
        Ok(QubitChannel {
            lambda: [r, r, mu],
            shift: [0.0, 0.0, 1.0 - mu],
        })
    }

    /// `w ↦ (sw₁, sw₂, (1−μ) + μw₃)` with `μ ≤ s ≤ √μ`.
    pub fn stretched(mu: f64, s: f64) -> Result<Self> {
        check_unit_interval("mu", mu)?;
        // sqrt rounding: allow s = mu.sqrt() computed by the caller
        if s < mu - 1e-15 || s > mu.sqrt() + 1e-15 {
            return Err(Error::Domain(format!(
                "stretch s = {s} must satisfy mu <= s <= sqrt(mu) for mu = {mu}"
            )));
        }
        Ok(QubitChannel::stretched_unchecked(mu, s))
    }

    /// Stretched channel without the `μ ≤ s ≤ √μ` window or positivity check.
    pub fn stretched_unchecked(mu: f64, s: f64) -> Self {
        QubitChannel {
            lambda: [s, s, mu],
            shift: [0.0, 0.0, 1.0 - mu],
        }
    }

    /// Squeezed channel `w ↦ (μw₁, qw₂, t₃ + qw₃)` with `t₃ = 1 − μ`.
    pub fn squeezed(mu: f64, q: f64) -> Result<Self> {
        QubitChannel::squeezed_with(mu, q, SqueezedShift::OneMinusMu)
    }

    pub fn squeezed_with(mu: f64, q: f64, convention: SqueezedShift) -> Result<Self> {
        check_unit_interval("mu", mu)?;
        if !(0.0..=mu).contains(&q) {
            return Err(Error::Domain(format!(
                "squeeze q = {q} must satisfy 0 <= q <= mu = {mu}"
            )));
        }
        let t3 = match convention {
            SqueezedShift::OneMinusMu => 1.0 - mu,
            SqueezedShift::NorthPoleFixed => 1.0 - q,
        };
        QubitChannel::completely_positive([mu, q, q], [0.0, 0.0, t3])
    }

    /// Quantum-classical channel `w ↦ (0, 0, t₃ + μw₃)`, `|t₃| + |μ| ≤ 1`.
    pub fn qc(t3: f64, mu: f64) -> Result<Self> {
        if t3.abs() + mu.abs() > 1.0 + 1e-15 {
            return Err(Error::Domain(format!(
                "|t3| + |mu| = {} exceeds 1",
                t3.abs() + mu.abs()
            )));
        }
        Ok(QubitChannel {
            lambda: [0.0, 0.0, mu],
            shift: [0.0, 0.0, t3],
        })
    }

    /// Classical-quantum channel `w ↦ (t₁, t₂, t₃ + μw₃)` with
    /// `t₁² + t₂² + (|t₃| + |μ|)² ≤ 1`.
    pub fn cq(t1: f64, t2: f64, t3: f64, mu: f64) -> Result<Self> {
        let n = t1 * t1 + t2 * t2 + (t3.abs() + mu.abs()).powi(2);
        if n > 1.0 + 1e-15 {
            return Err(Error::Domain(format!(
                "t1^2 + t2^2 + (|t3| + |mu|)^2 = {n} exceeds 1"
            )));
        }
        Ok(QubitChannel {
            lambda: [0.0, 0.0, mu],
            shift: [t1, t2, t3],
        })
    }

    /// Convex combination `aΦ₁ + (1−a)Φ₂`.
    pub fn mix(a: f64, phi1: &QubitChannel, phi2: &QubitChannel) -> Result<Self> {
        check_unit_interval("a", a)?;
        let comb = |u: [f64; 3], v: [f64; 3]| {
            [
                a * u[0] + (1.0 - a) * v[0],
                a * u[1] + (1.0 - a) * v[1],
                a * u[2] + (1.0 - a) * v[2],
            ]
        };
        Ok(QubitChannel {
            lambda: comb(phi1.lambda, phi2.lambda),
            shift: comb(phi1.shift, phi2.shift),
        })
    }

    /// Conjugates the channel by the rotation `(x, y, z) ↦ (z, −y, x)`,
    /// exchanging the roles of the x and z axes.
    pub fn exchange_x_z(&self) -> Self {
        let [l1, l2, l3] = self.lambda;
        let [t1, t2, t3] = self.shift;
        QubitChannel {
            lambda: [l3, l2, l1],
            shift: [t3, -t2, t1],
        }
    }

    pub fn lambda(&self) -> [f64; 3] {
        self.lambda
    }

    pub fn shift(&self) -> [f64; 3] {
        self.shift
    }

    pub fn apply(&self, w: BlochVector) -> BlochVector {
        BlochVector::new(
            self.shift[0] + self.lambda[0] * w.x,
            self.shift[1] + self.lambda[1] * w.y,
            self.shift[2] + self.lambda[2] * w.z,
        )
    }

    /// True when the channel commutes with rotations about z.
    pub fn is_axially_symmetric(&self) -> bool {
        self.lambda[0] == self.lambda[1] && self.shift[0] == 0.0 && self.shift[1] == 0.0
    }

    pub fn choi_matrix(&self) -> ChoiMatrix {
        ChoiMatrix::of(self)
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.choi_matrix().min_eigenvalue() >= -tol
    }

    fn require_cp(self, tol: f64) -> Result<Self> {
        let min_eigenvalue = self.choi_matrix().min_eigenvalue();
        if min_eigenvalue < -tol {
            return Err(Error::NotCompletelyPositive { min_eigenvalue });
        }
        Ok(self)
    }

    /// Largest Bloch radius reached by the image of the unit ball.
    ///
    /// The maximum of the convex function `|t + Λw|` lies on the sphere; a
    /// Fibonacci sample plus the six axis points locates its basin and a projected fixed-point
    /// iteration `w ← normalize(Λ(t + Λw))` polishes it.
    pub fn max_image_radius(&self) -> f64 {
        let n = 2000;
        let mut best = BlochVector::NORTH;
        let mut best_r = f64::NEG_INFINITY;
        let axes = [
            BlochVector::NORTH,
            BlochVector::SOUTH,
            BlochVector::new(1.0, 0.0, 0.0),
            BlochVector::new(-1.0, 0.0, 0.0),
            BlochVector::new(0.0, 1.0, 0.0),
            BlochVector::new(0.0, -1.0, 0.0),
        ];
        for w in axes.into_iter().chain(fibonacci_sphere(n)) {
            let r = self.apply(w).norm();
            if r > best_r {
                best_r = r;
                best = w;
            }
        }
        let mut w = best;
        for _ in 0..500 {
            let out = self.apply(w);
            let g = BlochVector::new(
                self.lambda[0] * out.x,
                self.lambda[1] * out.y,
                self.lambda[2] * out.z,
            );
            let gn = g.norm();
            if gn < 1e-300 {
                break;
            }
            let next = (1.0 / gn) * g;
            let r = self.apply(next).norm();
            if r > best_r {
                best_r = r;
            }
            if next.distance(w) < 1e-15 {
                break;
            }
            w = next;
        }
        best_r
    }
}

/// Quasi-uniform points on the unit sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> impl Iterator<Item = BlochVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n).map(move |i| {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * i as f64;
        BlochVector::new(r * phi.cos(), r * phi.sin(), z)
    })
}

/// A channel given by family name and parameters, or by its raw affine
/// parts.
///
/// JSON forms: `{"family": "stretched", "mu": 0.5, "s": 0.6}` or
/// `{"lambda": [l1, l2, l3], "shift": [t1, t2, t3]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Family(Family),
    Raw { lambda: [f64; 3], shift: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Identity,
    #[serde(alias = "depolarizing")]
    ShiftedDepolarizing {
        mu: f64,
    },
    AmplitudeDamping {
        mu: f64,
    },
    Stretched {
        mu: f64,
        s: f64,
    },
    Squeezed {
        mu: f64,
        q: f64,
        #[serde(default)]
        shift_convention: SqueezedShift,
    },
    Qc {
        t3: f64,
        mu: f64,
    },
    Cq {
        t1: f64,
        t2: f64,
        t3: f64,
        mu: f64,
    },
}

impl ChannelSpec {
    /// Builds the channel. Raw channels must be completely positive.
    pub fn build(&self) -> Result<QubitChannel> {
        match self {
            ChannelSpec::Raw { lambda, shift } => {
                QubitChannel::completely_positive(*lambda, *shift)
            }
            ChannelSpec::Family(f) => f.build(),
        }
    }
}

impl Family {
    pub fn build(&self) -> Result<QubitChannel> {
        match *self {
            Family::Identity => Ok(QubitChannel::identity()),
            Family::ShiftedDepolarizing { mu } => QubitChannel::shifted_depolarizing(mu),
            Family::AmplitudeDamping { mu } => QubitChannel::amplitude_damping(mu),
            Family::Stretched { mu, s } => QubitChannel::stretched(mu, s),
            Family::Squeezed {
                mu,
                q,
                shift_convention,
            } => QubitChannel::squeezed_with(mu, q, shift_convention),
            Family::Qc { t3, mu } => QubitChannel::qc(t3, mu),
            Family::Cq { t1, t2, t3, mu } => QubitChannel::cq(t1, t2, t3, mu),
        }
    }
}
