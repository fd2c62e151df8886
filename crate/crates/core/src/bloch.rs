//! Bloch-vector representation of qubit states and the entropy functionals
//! evaluated on it.
//!
//! A state `ρ = ½[I + w·σ]` is stored as its Bloch vector `w`. Both the von
//! Neumann entropy and the relative entropy of two qubit states have closed
//! forms in terms of the vectors, so no eigensolver is needed in the
//! optimization loops. All entropies are in bits.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed above the unit sphere before a vector is rejected.
pub const NORM_SLACK: f64 = 1e-12;

/// A real 3-vector `w` with `|w| ≤ 1` representing `½[I + w·σ]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector::new(0.0, 0.0, 0.0);
    pub const NORTH: BlochVector = BlochVector::new(0.0, 0.0, 1.0);
    pub const SOUTH: BlochVector = BlochVector::new(0.0, 0.0, -1.0);

    /// Builds a vector without checking the norm.
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    /// Builds a vector, rejecting norms above `1 + NORM_SLACK` and non-finite entries.
    pub fn checked(x: f64, y: f64, z: f64) -> Result<Self> {
        let w = BlochVector::new(x, y, z);
        if !w.is_valid() {
            return Err(Error::Domain(format!(
                "Bloch vector ({x}, {y}, {z}) has norm {} > 1",
                w.norm()
            )));
        }
        Ok(w)
    }

    /// Pure state at polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        BlochVector::new(st * cp, st * sp, ct)
    }

    /// Pure state in the x-z plane at polar angle `theta` measured from +z.
    pub fn in_xz_plane(theta: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        BlochVector::new(st, 0.0, ct)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: BlochVector) -> f64 {
        (self - other).norm()
    }

    pub fn is_valid(self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.z.is_finite()
            && self.norm() <= 1.0 + NORM_SLACK
    }

    pub fn is_pure(self, tol: f64) -> bool {
        self.norm() >= 1.0 - tol
    }

    /// Rotation about the z axis by `angle` radians.
    pub fn rotate_z(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        BlochVector::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl From<[f64; 3]> for BlochVector {
    fn from(a: [f64; 3]) -> Self {
        BlochVector::new(a[0], a[1], a[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(w: BlochVector) -> Self {
        w.to_array()
    }
}

impl Add for BlochVector {
    type Output = BlochVector;
    fn add(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<BlochVector> for f64 {
    type Output = BlochVector;
    fn mul(self, w: BlochVector) -> BlochVector {
        BlochVector::new(self * w.x, self * w.y, self * w.z)
    }
}

/// `-x log₂ x` with the convention `0 log 0 = 0`.
pub(crate) fn xlog2x_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Binary entropy `h₂(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    xlog2x_neg(x) + xlog2x_neg(1.0 - x)
}

/// Von Neumann entropy of `½[I + w·σ]`, i.e. `h₂((1 + |w|)/2)`.
pub fn entropy(w: BlochVector) -> f64 {
    let r = w.norm().min(1.0);
    binary_entropy(0.5 * (1.0 + r))
}

/// Relative entropy `H(P,Q) = Tr P log P − Tr P log Q` in bits, with `P`, `Q`
/// given by Bloch vectors `p`, `q`.
///
/// Uses the spectral form of `log Q`: with `u = |q|` and `d = p·q̂`,
/// `Tr P log Q = α + β d`, `α = ½ log₂((1−u²)/4)`, `β = ½ log₂((1+u)/(1−u))`.
/// Returns `f64::INFINITY` when `Q` is pure and `P ≠ Q`.
pub fn relative_entropy(p: BlochVector, q: BlochVector) -> f64 {
    let u = q.norm();
    if u >= 1.0 - NORM_SLACK {
        return if p.distance(q) <= 1e-10 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let alpha = 0.5 * ((1.0 - u * u) / 4.0).log2();
    let d_term = if u > 0.0 {
        let beta = 0.5 * ((1.0 + u) / (1.0 - u)).log2();
        beta * p.dot(q) / u
    } else {
        0.0
    };
    (-entropy(p) - alpha - d_term).max(0.0)
}
