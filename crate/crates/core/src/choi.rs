//! Choi matrix of a qubit channel and the complete-positivity test.
//!
//! The channel is extended linearly to all 2×2 matrices by `Φ(I) = I + t·σ`
//! and `Φ(σ_k) = λ_k σ_k`. The Choi matrix is `C = Σ_ij E_ij ⊗ Φ(E_ij)` over
//! the matrix units, so `Tr C = 2` and `C ⪰ 0` iff the channel is completely
//! positive.

use nalgebra::{Complex, Matrix2, Matrix4};

use crate::channel::QubitChannel;

type C64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    entries: Matrix4<C64>,
}

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `½[a₀ I + a·σ]` for complex coefficients.
fn pauli_combination(a0: C64, a: [C64; 3]) -> Matrix2<C64> {
    let half = c(0.5, 0.0);
    let i = c(0.0, 1.0);
    Matrix2::new(
        half * (a0 + a[2]),
        half * (a[0] - i * a[1]),
        half * (a[0] + i * a[1]),
        half * (a0 - a[2]),
    )
}

impl ChoiMatrix {
    pub fn of(channel: &QubitChannel) -> Self {
        let [l1, l2, l3] = channel.lambda();
        let [t1, t2, t3] = channel.shift();
        let zero = c(0.0, 0.0);
        // E00 = ½(I + σz), E11 = ½(I − σz), E01 = ½(σx + iσy), E10 = ½(σx − iσy)
        let shift = [c(t1, 0.0), c(t2, 0.0), c(t3, 0.0)];
        let phi_00 = pauli_combination(c(1.0, 0.0), [shift[0], shift[1], shift[2] + c(l3, 0.0)]);
        let phi_11 = pauli_combination(c(1.0, 0.0), [shift[0], shift[1], shift[2] - c(l3, 0.0)]);
        let phi_01 = pauli_combination(zero, [c(l1, 0.0), c(0.0, l2), zero]);
        let phi_10 = pauli_combination(zero, [c(l1, 0.0), c(0.0, -l2), zero]);

        let mut entries = Matrix4::<C64>::zeros();
        let blocks = [[phi_00, phi_01], [phi_10, phi_11]];
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, block) in row.iter().enumerate() {
                entries
                    .fixed_view_mut::<2, 2>(2 * bi, 2 * bj)
                    .copy_from(block);
            }
        }
        ChoiMatrix { entries }
    }

    pub fn entries(&self) -> &Matrix4<C64> {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.entries - self.entries.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let ev = self.entries.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_spectrum(ch: &QubitChannel, expected: [f64; 4]) {
        let ev = ch.choi_matrix().eigenvalues();
        for (a, b) in ev.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn identity_is_twice_the_bell_projector() {
        let choi = QubitChannel::identity().choi_matrix();
        assert_spectrum(&QubitChannel::identity(), [0.0, 0.0, 0.0, 2.0]);
        let e = choi.entries();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(e[(i, j)].re, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn completely_depolarizing_is_flat() {
        let ch = QubitChannel::new([0.0; 3], [0.0; 3]).unwrap();
        assert_spectrum(&ch, [0.5; 4]);
    }

    #[test]
    fn amplitude_damping_is_extreme() {
        let ch = QubitChannel::amplitude_damping(0.5).unwrap();
        assert_abs_diff_eq!(ch.choi_matrix().min_eigenvalue(), 0.0, epsilon = 1e-10);
        // Two Kraus operators: rank-2 Choi matrix with spectrum {0, 0, 1/2, 3/2}.
        assert_spectrum(&ch, [0.0, 0.0, 0.5, 1.5]);
    }

    #[test]
    fn trace_and_hermiticity() {
        let chans = [
            QubitChannel::stretched(0.5, 0.6).unwrap(),
            QubitChannel::cq(0.3, -0.4, 0.1, 0.5).unwrap(),
            QubitChannel::stretched_unchecked(0.5, 0.9),
        ];
        for ch in &chans {
            let choi = ch.choi_matrix();
            assert_abs_diff_eq!(choi.trace().re, 2.0, epsilon = 1e-15);
            assert_abs_diff_eq!(choi.trace().im, 0.0, epsilon = 1e-15);
            assert!(choi.hermiticity_defect() <= 1e-12);
        }
    }

    #[test]
    fn stretched_outside_window_has_negative_eigenvalue() {
        // For t = (0,0,1−μ) and λ = (s,s,μ) the relevant eigenvalue is
        // ½[(1 + μ) − √((1 − μ)² + 4s²)], negative iff s > √μ.
        let ev = QubitChannel::stretched_unchecked(0.5, 0.72)
            .choi_matrix()
            .min_eigenvalue();
        let closed = 0.5 * (1.5 - (0.25f64 + 4.0 * 0.72 * 0.72).sqrt());
        assert_abs_diff_eq!(ev, closed, epsilon = 1e-12);
        assert!(ev < -1e-3);
    }

    #[test]
    fn choi_is_linear_in_the_channel() {
        let p1 = QubitChannel::amplitude_damping(0.3).unwrap();
        let p2 = QubitChannel::cq(0.2, 0.1, -0.3, 0.4).unwrap();
        for &a in &[0.0, 0.25, 0.5, 0.9, 1.0] {
            let m = QubitChannel::mix(a, &p1, &p2).unwrap().choi_matrix();
            let lin = p1.choi_matrix().entries() * Complex::new(a, 0.0)
                + p2.choi_matrix().entries() * Complex::new(1.0 - a, 0.0);
            let diff = (m.entries() - lin)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff <= 1e-12);
        }
    }
}
