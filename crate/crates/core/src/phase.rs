//! Schrödinger phases `θ = (rate·t/2)·‖k‖²` reduced modulo `2π` in
//! double-double arithmetic.
//!
//! On the resonant ladder `‖k‖²` reaches `10⁸` and beyond, so `θ` is of order
//! `10⁹` rad. Forming `θ` in `f64` and then reducing it throws away the
//! fractional part; here the product `rate·t·‖k‖²` is formed exactly enough
//! (≈106 bits) and reduced against a three-word `2π` before any trig call.

use std::f64::consts::PI;

use num_complex::Complex64;

const TWO_PI_HI: f64 = 6.283185307179586;
const TWO_PI_MID: f64 = 2.4492935982947064e-16;
const TWO_PI_LO: f64 = -5.989539619436679e-33;

#[derive(Clone, Copy, Debug, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    DoubleDouble { hi: s, lo: err }
}

fn two_prod(a: f64, b: f64) -> DoubleDouble {
    let p = a * b;
    DoubleDouble {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl DoubleDouble {
    fn from_i128(n: i128) -> Self {
        let hi = n as f64;
        let lo = (n - hi as i128) as f64;
        DoubleDouble { hi, lo }
    }

    fn add(self, other: DoubleDouble) -> DoubleDouble {
        let s = two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        two_sum(s.hi, lo)
    }

    fn mul(self, other: DoubleDouble) -> DoubleDouble {
        let p = two_prod(self.hi, other.hi);
        let lo = p.lo + (self.hi * other.lo + self.lo * other.hi);
        two_sum(p.hi, lo)
    }

    fn scale(self, s: f64) -> DoubleDouble {
        let p = two_prod(self.hi, s);
        two_sum(p.hi, p.lo + self.lo * s)
    }
}

/// `θ = rate·t·‖k‖²/2` reduced to `[-π, π]`.
pub fn reduced_phase(rate: f64, t: f64, norm_sq: i128) -> f64 {
    let theta = two_prod(rate, t)
        .mul(DoubleDouble::from_i128(norm_sq))
        .scale(0.5);
    if theta.hi.abs() <= PI {
        return theta.hi + theta.lo;
    }
    let turns = (theta.hi / TWO_PI_HI).round();
    let r = theta
        .add(two_prod(-turns, TWO_PI_HI))
        .add(two_prod(-turns, TWO_PI_MID))
        .add(DoubleDouble {
            hi: -turns * TWO_PI_LO,
            lo: 0.0,
        });
    r.hi + r.lo
}

/// `e^{-iθ}` for the free Schrödinger flow of mode `k` with `‖k‖² = norm_sq`.
pub fn schrodinger_phasor(rate: f64, t: f64, norm_sq: i128) -> Complex64 {
    let theta = reduced_phase(rate, t, norm_sq);
    Complex64::new(theta.cos(), -theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 300-bit arithmetic.
    const CASES: [(f64, f64, i128, f64, f64, f64); 3] = [
        (
            1.0,
            0.7310585786300049,
            14520 * 14520 + 170 * 170,
            0.24752047607777256,
            0.9695228866633963,
            -0.24500075966387388,
        ),
        (
            1.0,
            1.9,
            100_000_000_000_003,
            -3.080125245476937,
            -0.99811147359148,
            0.061428708964492464,
        ),
        (
            0.37,
            -123.456,
            987_654_321_987,
            -1.4708624979958607,
            0.09976757580772885,
            0.9950107691967204,
        ),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for (rate, t, n, theta, re, im) in CASES {
            let got = reduced_phase(rate, t, n);
            assert!((got - theta).abs() < 1e-13, "{got} vs {theta}");
            let z = schrodinger_phasor(rate, t, n);
            assert!((z.re - re).abs() < 1e-13 && (z.im - im).abs() < 1e-13);
        }
    }

    #[test]
    fn naive_reduction_loses_digits() {
        let (rate, t, n, theta, ..) = CASES[1];
        let naive = (rate * t * n as f64 / 2.0).rem_euclid(2.0 * PI);
        let naive = if naive > PI { naive - 2.0 * PI } else { naive };
        assert!((naive - theta).abs() > 1e-4);
    }

    #[test]
    fn small_phases_pass_through() {
        assert_eq!(reduced_phase(1.0, 0.0, 12345), 0.0);
        assert!((reduced_phase(1.0, 0.5, 2) - 0.5).abs() < 1e-16);
        let z = schrodinger_phasor(1.0, 4.0 * PI, 1);
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn additive_in_time_for_dyadic_steps() {
        let n = 123_456_789_012i128;
        for (a, b) in [(0.5, 0.25), (1.75, -3.0), (1024.0, 0.125)] {
            let lhs = schrodinger_phasor(1.0, a, n) * schrodinger_phasor(1.0, b, n);
            let rhs = schrodinger_phasor(1.0, a + b, n);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
