//! Sparse Fourier representation of functions on the flat torus
//! `T^d = R^d / (2π Z)^d`.
//!
//! A [`LatticeState`] stores the coefficients `û(k)` of
//!
//! ```text
//! u(x) = Σ_k û(k) e^{ik·x} / (2π)^{d/2}
//! ```
//!
//! so that `Σ_k |û(k)|²` is the squared L² norm of `u`. Only nonzero
//! amplitudes are stored; lattice sites are exact 64-bit integers.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A site `k ∈ Z^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(SmallVec<[i64; 4]>);

impl LatticeVector {
    pub fn new(components: impl Into<SmallVec<[i64; 4]>>) -> Self {
        LatticeVector(components.into())
    }

    pub fn from_slice(components: &[i64]) -> Self {
        LatticeVector(SmallVec::from_slice(components))
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(SmallVec::from_elem(0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `self + other`, refusing silent wrap-around.
    pub fn checked_add(&self, other: &LatticeVector) -> Result<LatticeVector> {
        check_dim(self.dim(), other.dim())?;
        let mut out = SmallVec::with_capacity(self.dim());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(
                a.checked_add(*b)
                    .ok_or_else(|| Error::Overflow(format!("{self} + {other}")))?,
            );
        }
        Ok(LatticeVector(out))
    }

    /// Unchecked addition for sites already known to be far from the
    /// representable edge (all state supports are validated on insertion).
    pub(crate) fn add(&self, other: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|c| -c).collect())
    }

    pub fn dot(&self, other: &LatticeVector) -> i128 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }

    pub fn norm_sq(&self) -> i128 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.saturating_abs()).max().unwrap_or(0)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(SmallVec::from_vec(v))
    }
}

impl<const N: usize> From<[i64; N]> for LatticeVector {
    fn from(v: [i64; N]) -> Self {
        LatticeVector::from_slice(&v)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Sparse amplitudes `û(k)` on `Z^d`. Zero amplitudes are never stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateDoc", into = "StateDoc")]
pub struct LatticeState {
    dim: usize,
    modes: BTreeMap<LatticeVector, Complex64>,
}

impl LatticeState {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(LatticeState {
            dim,
            modes: BTreeMap::new(),
        })
    }

    /// Builds a state from `(k, û(k))` pairs; repeated sites are summed.
    pub fn from_modes<I, K>(dim: usize, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Complex64)>,
        K: Into<LatticeVector>,
    {
        let mut state = LatticeState::new(dim)?;
        for (k, amp) in modes {
            state.add_mode(k.into(), amp)?;
        }
        Ok(state)
    }

    /// A single unit mode at `k`.
    pub fn single(k: impl Into<LatticeVector>) -> Self {
        let k = k.into();
        let mut modes = BTreeMap::new();
        modes.insert(k.clone(), Complex64::new(1.0, 0.0));
        LatticeState { dim: k.dim(), modes }
    }

    pub fn add_mode(&mut self, k: LatticeVector, amp: Complex64) -> Result<()> {
        check_dim(self.dim, k.dim())?;
        // keep |k|^2 and pair sums representable in i128 / i64 arithmetic
        if k.max_abs() > i64::MAX / 4 {
            return Err(Error::Overflow(format!("site {k} too large")));
        }
        let zero = Complex64::new(0.0, 0.0);
        let sum = self.modes.get(&k).copied().unwrap_or(zero) + amp;
        if sum == zero {
            self.modes.remove(&k);
        } else {
            self.modes.insert(k, sum);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn get(&self, k: &LatticeVector) -> Option<Complex64> {
        self.modes.get(k).copied()
    }

    /// Modes in lattice order.
    pub fn iter(&self) -> impl Iterator<Item = (&LatticeVector, &Complex64)> + '_ {
        self.modes.iter()
    }

    /// Largest `|k_i|` over the support.
    pub fn mode_radius(&self) -> i64 {
        self.modes.keys().map(LatticeVector::max_abs).max().unwrap_or(0)
    }

    /// Largest Euclidean `‖k‖` over the support.
    pub fn euclidean_radius(&self) -> f64 {
        self.modes
            .keys()
            .map(|k| (k.norm_sq() as f64).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.modes.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every amplitude by `c`.
    pub fn scaled(&self, c: Complex64) -> LatticeState {
        let modes = self
            .modes
            .iter()
            .map(|(k, a)| (k.clone(), a * c))
            .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
            .collect();
        LatticeState {
            dim: self.dim,
            modes,
        }
    }

    /// Rescales to unit ℓ² norm. The zero state is returned unchanged.
    pub fn normalized(&self) -> LatticeState {
        let n = self.l2_norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scaled(Complex64::new(1.0 / n, 0.0))
        }
    }

    /// Replaces every amplitude with `f(k, û(k))`; the support is kept.
    pub(crate) fn map_amplitudes(&self, f: impl Fn(&LatticeVector, Complex64) -> Complex64) -> Self {
        LatticeState {
            dim: self.dim,
            modes: self.modes.iter().map(|(k, a)| (k.clone(), f(k, *a))).collect(),
        }
    }

    /// Translates the support by `shift`: `v̂(k) = û(k - shift)`, i.e.
    /// multiplication of `u` by `e^{i shift·x}`.
    pub fn modulate(&self, shift: &LatticeVector) -> Result<LatticeState> {
        check_dim(self.dim, shift.dim())?;
        let mut modes = BTreeMap::new();
        for (k, a) in &self.modes {
            let moved = k.checked_add(shift)?;
            if moved.max_abs() > i64::MAX / 4 {
                return Err(Error::Overflow(format!("site {moved} too large")));
            }
            modes.insert(moved, *a);
        }
        Ok(LatticeState {
            dim: self.dim,
            modes,
        })
    }

    /// Fourier coefficient of `|u(x)|²` at `l`:
    /// `c(l) = (2π)^{-d} Σ_j û(j+l) conj(û(j))`.
    pub fn density_coefficient(&self, l: &LatticeVector) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, a) in &self.modes {
            if let Some(b) = self.modes.get(&j.add(l)) {
                acc += b * a.conj();
            }
        }
        acc * (2.0 * PI).powi(-(self.dim as i32))
    }

    /// All nonzero Fourier coefficients of `|u(x)|²`, keyed by frequency.
    pub fn density_coefficients(&self) -> BTreeMap<LatticeVector, Complex64> {
        let norm = (2.0 * PI).powi(-(self.dim as i32));
        let mut out: BTreeMap<LatticeVector, Complex64> = BTreeMap::new();
        for (k, a) in &self.modes {
            for (j, b) in &self.modes {
                let l = LatticeVector(k.0.iter().zip(j.0.iter()).map(|(x, y)| x - y).collect());
                *out.entry(l).or_insert(Complex64::new(0.0, 0.0)) += a * b.conj() * norm;
            }
        }
        out
    }

    /// Evaluates `u` on the tensor grid `x_m = 2π m / N`, `m ∈ {0..N-1}^d`,
    /// in row-major order (last axis fastest).
    pub fn sample_on_grid(&self, points_per_axis: usize) -> Result<Vec<Complex64>> {
        let radius = self.mode_radius();
        let required = 2 * radius as usize + 1;
        if points_per_axis < required {
            return Err(Error::Aliasing {
                points: points_per_axis,
                max_component: radius,
                required,
            });
        }
        let n = points_per_axis;
        let twiddle: Vec<Complex64> = (0..n)
            .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))
            .collect();
        let total = n.pow(self.dim as u32);
        let prefactor = (2.0 * PI).powf(-(self.dim as f64) / 2.0);
        let mut out = vec![Complex64::new(0.0, 0.0); total];
        let mut index = vec![0usize; self.dim];
        for value in out.iter_mut() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, a) in &self.modes {
                // k·m mod N, exactly
                let mut phase = 0i128;
                for (c, &m) in k.0.iter().zip(index.iter()) {
                    phase += *c as i128 * m as i128;
                }
                let slot = phase.rem_euclid(n as i128) as usize;
                acc += a * twiddle[slot];
            }
            *value = acc * prefactor;
            for axis in (0..self.dim).rev() {
                index[axis] += 1;
                if index[axis] < n {
                    break;
                }
                index[axis] = 0;
            }
        }
        Ok(out)
    }
}

/// JSON layout `{dim, modes: [{k: [...], re, im}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateDoc {
    pub dim: usize,
    pub modes: Vec<ModeDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeDoc {
    pub k: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

impl TryFrom<StateDoc> for LatticeState {
    type Error = Error;

    fn try_from(doc: StateDoc) -> Result<Self> {
        LatticeState::from_modes(
            doc.dim,
            doc.modes
                .into_iter()
                .map(|m| (LatticeVector::from(m.k), Complex64::new(m.re, m.im))),
        )
    }
}

impl From<LatticeState> for StateDoc {
    fn from(s: LatticeState) -> Self {
        StateDoc {
            dim: s.dim,
            modes: s
                .modes
                .into_iter()
                .map(|(k, a)| ModeDoc {
                    k: k.0.to_vec(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn five_mode() -> LatticeState {
        LatticeState::from_modes(
            2,
            [
                ([0, 0], c(0.3, 0.1)),
                ([1, -2], c(-0.2, 0.5)),
                ([3, 1], c(0.7, 0.0)),
                ([-2, 2], c(0.0, -0.4)),
                ([1, 1], c(0.25, 0.25)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(LatticeState::new(1).unwrap().l2_norm(), 0.0);
        assert_eq!(LatticeState::single([7]).l2_norm(), 1.0);
        let s = 1.0 / 2f64.sqrt();
        let two = LatticeState::from_modes(1, [([0], c(s, 0.0)), ([1], c(s, 0.0))]).unwrap();
        assert!((two.l2_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(LatticeState::new(0), Err(Error::ZeroDimension));
    }

    #[test]
    fn cancelling_modes_are_dropped() {
        let s = LatticeState::from_modes(1, [([2], c(1.0, 0.0)), ([2], c(-1.0, 0.0))]).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn density_of_single_mode_is_flat() {
        let d = LatticeState::single([3, -1]).density_coefficients();
        assert_eq!(d.len(), 1);
        let v = d[&LatticeVector::from([0, 0])];
        assert!((v.re - (2.0 * PI).powi(-2)).abs() < 1e-16);
    }

    #[test]
    fn density_two_modes_matches_grid_dft() {
        // |u|^2 = (1 + cos x)/(2π); frozen from a 64-point DFT of the sampled density
        let s = 1.0 / 2f64.sqrt();
        let u = LatticeState::from_modes(1, [([0], c(s, 0.0)), ([1], c(s, 0.0))]).unwrap();
        let d = u.density_coefficients();
        let tol = 1e-15;
        assert!((d[&LatticeVector::from([0])] - c(1.0 / (2.0 * PI), 0.0)).norm() < tol);
        assert!((d[&LatticeVector::from([1])] - c(1.0 / (4.0 * PI), 0.0)).norm() < tol);
        assert!((d[&LatticeVector::from([-1])] - c(1.0 / (4.0 * PI), 0.0)).norm() < tol);

        let n = 64;
        let grid = u.sample_on_grid(n).unwrap();
        for l in -1i64..=1 {
            let mut acc = c(0.0, 0.0);
            for (m, v) in grid.iter().enumerate() {
                let x = 2.0 * PI * m as f64 / n as f64;
                acc += v.norm_sqr() * Complex64::from_polar(1.0, -(l as f64) * x);
            }
            // c(l) = (1/2π) ∫ |u|^2 e^{-ilx} dx
            let dft = acc / n as f64;
            assert!((dft - d[&LatticeVector::from([l])]).norm() < 1e-15);
        }
    }

    #[test]
    fn density_is_conjugate_symmetric() {
        let d = five_mode().density_coefficients();
        for (l, v) in &d {
            assert!((d[&l.neg()] - v.conj()).norm() < 1e-16);
        }
    }

    #[test]
    fn modulate_examples() {
        let u = five_mode();
        assert_eq!(u.modulate(&LatticeVector::zero(2)).unwrap(), u);
        let one = LatticeState::single([4]).modulate(&LatticeVector::from([-9])).unwrap();
        assert_eq!(one.get(&LatticeVector::from([-5])), Some(c(1.0, 0.0)));
        assert_eq!(u.modulate(&LatticeVector::from([1000, -7])).unwrap().l2_norm(), u.l2_norm());
    }

    #[test]
    fn modulate_refuses_overflow() {
        let u = LatticeState::single([1]);
        assert!(matches!(
            u.modulate(&LatticeVector::from([i64::MAX])),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn grid_samples_single_mode() {
        let u = LatticeState::single([1]);
        let g = u.sample_on_grid(8).unwrap();
        for (m, v) in g.iter().enumerate() {
            let x = 2.0 * PI * m as f64 / 8.0;
            let expect = Complex64::from_polar(1.0, x) / (2.0 * PI).sqrt();
            assert!((v - expect).norm() < 1e-15);
        }
        assert!(LatticeState::new(2).unwrap().sample_on_grid(4).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn grid_rejects_aliasing() {
        let u = LatticeState::single([5]);
        assert!(matches!(u.sample_on_grid(10), Err(Error::Aliasing { required: 11, .. })));
    }

    #[test]
    fn parseval_on_grid() {
        let u = five_mode();
        let n = 16;
        let g = u.sample_on_grid(n).unwrap();
        let cell = (2.0 * PI / n as f64).powi(2);
        let quad: f64 = g.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell;
        assert!((quad - u.l2_norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn json_layout() {
        let u = LatticeState::from_modes(2, [([1, -2], c(0.5, -0.25))]).unwrap();
        let text = serde_json::to_string(&u).unwrap();
        assert_eq!(text, r#"{"dim":2,"modes":[{"k":[1,-2],"re":0.5,"im":-0.25}]}"#);
        let back: LatticeState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, u);
        let bad = r#"{"dim":2,"modes":[{"k":[1],"re":1.0,"im":0.0}]}"#;
        assert!(serde_json::from_str::<LatticeState>(bad).is_err());
    }
}
