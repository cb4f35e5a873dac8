//! Exact propagation: the diagonal Schrödinger flow `e^{iα_h h tΔ/2}` on the
//! torus and the closed-form free evolution of Gaussian packets on `R^d`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeState;
use crate::phase::schrodinger_phasor;

/// The rescaling `h ↦ α_h` of time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum TimeScale {
    /// `α_h = 1/h`.
    Reciprocal,
    /// `α_h = h^{-γ}`.
    Power { gamma: f64 },
    /// `α_h = α` for every `h`.
    Constant { alpha: f64 },
    /// Explicit `(h, α)` pairs.
    Table { entries: Vec<(f64, f64)> },
}

/// Whether a time scale satisfies `α_h = o(1/h²)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleRegime {
    WithinHypothesis,
    /// Admissible only because the geometry is flat.
    FlatOnly,
}

impl TimeScale {
    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponent must be >= 0, got {gamma}")));
        }
        Ok(TimeScale::Power { gamma })
    }

    pub fn constant(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        Ok(TimeScale::Constant { alpha })
    }

    pub fn table(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.iter().any(|&(h, a)| !(h > 0.0 && a > 0.0 && h.is_finite() && a.is_finite())) {
            return Err(Error::InvalidParameter("table entries must be positive".into()));
        }
        Ok(TimeScale::Table { entries })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TimeScale::Reciprocal => Ok(()),
            TimeScale::Power { gamma } => Self::power(*gamma).map(|_| ()),
            TimeScale::Constant { alpha } => Self::constant(*alpha).map(|_| ()),
            TimeScale::Table { entries } => Self::table(entries.clone()).map(|_| ()),
        }
    }

    pub fn alpha(&self, h: f64) -> Result<f64> {
        check_h(h)?;
        match self {
            TimeScale::Reciprocal => Ok(1.0 / h),
            TimeScale::Power { gamma } => Ok(h.powf(-gamma)),
            TimeScale::Constant { alpha } => Ok(*alpha),
            TimeScale::Table { entries } => entries
                .iter()
                .find(|(eh, _)| (eh - h).abs() <= 1e-12 * h)
                .map(|&(_, a)| a)
                .ok_or_else(|| Error::InvalidParameter(format!("h = {h} is not in the time-scale table"))),
        }
    }

    /// `α_h·h`, the frequency multiplying `‖k‖²/2` in the phase. Exactly 1
    /// for the reciprocal scale.
    pub fn rate(&self, h: f64) -> Result<f64> {
        check_h(h)?;
        match self {
            TimeScale::Reciprocal => Ok(1.0),
            TimeScale::Power { gamma } if *gamma == 1.0 => Ok(1.0),
            TimeScale::Power { gamma } => Ok(h.powf(1.0 - gamma)),
            _ => Ok(self.alpha(h)? * h),
        }
    }

    pub fn regime(&self) -> ScaleRegime {
        let within = match self {
            TimeScale::Reciprocal | TimeScale::Constant { .. } => true,
            TimeScale::Power { gamma } => *gamma < 2.0,
            TimeScale::Table { entries } => {
                // α h² must shrink along the table as h decreases
                let mut sorted = entries.clone();
                sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
                sorted.windows(2).all(|w| w[1].1 * w[1].0 * w[1].0 < w[0].1 * w[0].0 * w[0].0)
            }
        };
        if within {
            ScaleRegime::WithinHypothesis
        } else {
            ScaleRegime::FlatOnly
        }
    }
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
    }
    Ok(())
}

/// `û(k) ↦ e^{-i·rate·t‖k‖²/2} û(k)`.
pub fn evolve_torus_at_rate(state: &LatticeState, rate: f64, t: f64) -> LatticeState {
    state.map_amplitudes(|k, a| a * schrodinger_phasor(rate, t, k.norm_sq()))
}

/// `e^{iα_h h tΔ/2}` applied to `state`.
pub fn evolve_torus(state: &LatticeState, h: f64, scale: &TimeScale, t: f64) -> Result<LatticeState> {
    Ok(evolve_torus_at_rate(state, scale.rate(h)?, t))
}

/// `ψ(x) = (πhσ²)^{-d/4} (σ²/w)^{d/2} exp(-|x-c|²/(2hw) + iξ0·(x-c)/h + i|ξ0|²s/(2h))`
/// with `w = σ² + is` and `c = x0 + sξ0`, where `s` is the elapsed
/// semiclassical time `α_h t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    x0: Vec<f64>,
    xi0: Vec<f64>,
    sigma: f64,
    h: f64,
    #[serde(default)]
    elapsed: f64,
}

impl GaussianPacket {
    pub fn new(x0: Vec<f64>, xi0: Vec<f64>, sigma: f64, h: f64) -> Result<Self> {
        if x0.is_empty() {
            return Err(Error::ZeroDimension);
        }
        crate::lattice::check_dim(x0.len(), xi0.len())?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        check_h(h)?;
        Ok(GaussianPacket {
            x0,
            xi0,
            sigma,
            h,
            elapsed: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn momentum(&self) -> &[f64] {
        &self.xi0
    }

    pub fn initial_center(&self) -> &[f64] {
        &self.x0
    }

    /// Semiclassical time `α_h t` accumulated so far.
    pub fn elapsed(&self) -> f64 {
        self.elapsed
    }

    pub fn center(&self) -> Vec<f64> {
        self.x0.iter().zip(&self.xi0).map(|(x, v)| x + self.elapsed * v).collect()
    }

    pub fn width(&self) -> Complex64 {
        Complex64::new(self.sigma * self.sigma, self.elapsed)
    }

    /// Advances by semiclassical time `s`.
    pub fn advanced(&self, s: f64) -> GaussianPacket {
        GaussianPacket {
            elapsed: self.elapsed + s,
            ..self.clone()
        }
    }

    pub fn amplitude(&self, x: &[f64]) -> Complex64 {
        let d = self.dim() as f64;
        let w = self.width();
        let s2 = self.sigma * self.sigma;
        let norm = (PI * self.h * s2).powf(-d / 4.0);
        let pre = (Complex64::new(s2, 0.0) / w).powf(d / 2.0);
        let c = self.center();
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        let lin: f64 = x.iter().zip(&c).zip(&self.xi0).map(|((a, b), v)| (a - b) * v).sum();
        let p2: f64 = self.xi0.iter().map(|v| v * v).sum();
        let expo = -r2 / (2.0 * self.h * w) + Complex64::new(0.0, (lin + 0.5 * p2 * self.elapsed) / self.h);
        pre * norm * expo.exp()
    }

    /// `|ψ(x)|²` in closed form.
    pub fn density(&self, x: &[f64]) -> f64 {
        let d = self.dim() as f64;
        let w = self.width();
        let s2 = self.sigma * self.sigma;
        let var = self.h * w.norm_sqr() / s2;
        let c = self.center();
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        (PI * var).powf(-d / 2.0) * (-r2 / var).exp()
    }

    /// `‖ψ‖²` in closed form, for comparison with quadrature.
    pub fn norm_sq(&self) -> f64 {
        let d = self.dim() as i32;
        let w = self.width();
        let s2 = self.sigma * self.sigma;
        // N²(σ²/|w|)^d (πh|w|²/σ²)^{d/2}
        let n2 = (PI * self.h * s2).powf(-(d as f64) / 2.0);
        n2 * (s2 / w.norm()).powi(d) * (PI * self.h * w.norm_sqr() / s2).powf(d as f64 / 2.0)
    }
}

/// Free evolution for rescaled time `t`: the packet advances by `s = α_h t`.
pub fn evolve_free(packet: &GaussianPacket, scale: &TimeScale, t: f64) -> Result<GaussianPacket> {
    Ok(packet.advanced(scale.alpha(packet.h)? * t))
}

/// Wigner function of a Gaussian packet: a product over coordinates of
/// 2-D Gaussians with a common covariance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGaussian {
    pub mean_x: Vec<f64>,
    pub mean_xi: Vec<f64>,
    /// `[Σ_xx, Σ_xξ, Σ_ξξ]` for each coordinate.
    pub covariance: [f64; 3],
}

pub fn wigner_gaussian(packet: &GaussianPacket) -> PhaseSpaceGaussian {
    let w = packet.width();
    let h = packet.h;
    PhaseSpaceGaussian {
        mean_x: packet.center(),
        mean_xi: packet.xi0.clone(),
        covariance: [
            h * w.norm_sqr() / (2.0 * w.re),
            h * w.im / (2.0 * w.re),
            h / (2.0 * w.re),
        ],
    }
}

impl PhaseSpaceGaussian {
    pub fn dim(&self) -> usize {
        self.mean_x.len()
    }

    pub fn density(&self, x: &[f64], xi: &[f64]) -> f64 {
        let [a, b, c] = self.covariance;
        let det = a * c - b * b;
        let mut acc = 1.0;
        for i in 0..self.dim() {
            let dx = x[i] - self.mean_x[i];
            let dp = xi[i] - self.mean_xi[i];
            let q = (c * dx * dx - 2.0 * b * dx * dp + a * dp * dp) / det;
            acc *= (-0.5 * q).exp() / (2.0 * PI * det.sqrt());
        }
        acc
    }

    /// `∫ W(x, ξ) a(x, ξ) dx dξ` for a product-Gaussian observable.
    pub fn pair_with(&self, symbol: &GaussianObservable) -> Result<f64> {
        crate::lattice::check_dim(self.dim(), symbol.dim())?;
        let [sxx, sxp, spp] = self.covariance;
        let ax = 1.0 / (symbol.x_scale * symbol.x_scale);
        let ap = symbol.xi_scale.map_or(0.0, |s| 1.0 / (s * s));
        // M = I + ΣA, A = diag(ax, ap)
        let m = [[1.0 + sxx * ax, sxp * ap], [sxp * ax, 1.0 + spp * ap]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        // K = A M⁻¹
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        let k = [[ax * inv[0][0], ax * inv[0][1]], [ap * inv[1][0], ap * inv[1][1]]];
        let mut value = symbol.amplitude;
        for i in 0..self.dim() {
            let rx = self.mean_x[i] - symbol.x_center[i];
            let rp = match symbol.xi_scale {
                Some(_) => self.mean_xi[i] - symbol.xi_center[i],
                None => 0.0,
            };
            let q = rx * (k[0][0] * rx + k[0][1] * rp) + rp * (k[1][0] * rx + k[1][1] * rp);
            value *= (-0.5 * q).exp() / det.sqrt();
        }
        Ok(value)
    }
}

/// `a(x, ξ) = A Π_i exp(-(x_i-m_i)²/(2s_x²) - (ξ_i-n_i)²/(2s_ξ²))` on `R^d × R^d`;
/// `xi_scale = None` drops the `ξ` factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianObservable {
    pub x_center: Vec<f64>,
    pub x_scale: f64,
    pub xi_center: Vec<f64>,
    pub xi_scale: Option<f64>,
    pub amplitude: f64,
}

impl GaussianObservable {
    pub fn dim(&self) -> usize {
        self.x_center.len()
    }

    pub fn evaluate(&self, x: &[f64], xi: &[f64]) -> f64 {
        let mut q = 0.0;
        for i in 0..self.dim() {
            q += (x[i] - self.x_center[i]).powi(2) / (self.x_scale * self.x_scale);
            if let Some(s) = self.xi_scale {
                q += (xi[i] - self.xi_center[i]).powi(2) / (s * s);
            }
        }
        self.amplitude * (-0.5 * q).exp()
    }

    /// Radius in `x` beyond which the observable is below `exp(-32)` of its peak.
    pub fn effective_x_radius(&self) -> f64 {
        8.0 * self.x_scale
    }

    /// Largest value of `∫ W a` over all normalized phase-space densities whose
    /// position covariance per coordinate is at least `var_x`.
    pub fn spread_bound(&self, var_x: f64) -> f64 {
        let s2 = self.x_scale * self.x_scale;
        self.amplitude.abs() * (s2 / (s2 + var_x)).powf(self.dim() as f64 / 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeVector;
    use crate::window::simpson;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_state() -> LatticeState {
        LatticeState::from_modes(
            2,
            vec![
                (vec![0, 0], c(0.5, 0.1)),
                (vec![3, -1], c(-0.2, 0.7)),
                (vec![120, 14520], c(0.3, 0.3)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn time_scales() {
        assert_eq!(TimeScale::Reciprocal.alpha(0.01).unwrap(), 100.0);
        assert_eq!(TimeScale::Reciprocal.rate(0.01).unwrap(), 1.0);
        assert_eq!(TimeScale::power(1.0).unwrap().rate(0.37).unwrap(), 1.0);
        assert!((TimeScale::power(0.5).unwrap().rate(0.04).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(TimeScale::constant(3.0).unwrap().alpha(0.1).unwrap(), 3.0);
        let table = TimeScale::table(vec![(0.1, 10.0), (0.01, 400.0)]).unwrap();
        assert_eq!(table.alpha(0.01).unwrap(), 400.0);
        assert!(table.alpha(0.02).is_err());
        assert_eq!(TimeScale::power(2.0).unwrap().regime(), ScaleRegime::FlatOnly);
        assert_eq!(TimeScale::power(1.9).unwrap().regime(), ScaleRegime::WithinHypothesis);
        assert!(TimeScale::power(-1.0).is_err());
        assert!(TimeScale::Reciprocal.alpha(0.0).is_err());
        let text = serde_json::to_string(&TimeScale::Power { gamma: 1.5 }).unwrap();
        assert_eq!(text, r#"{"rule":"power","gamma":1.5}"#);
    }

    #[test]
    fn evolve_torus_examples() {
        let u = sample_state();
        assert_eq!(evolve_torus(&u, 0.1, &TimeScale::Reciprocal, 0.0).unwrap(), u);
        let v = evolve_torus(&u, 0.1, &TimeScale::Reciprocal, 1.234).unwrap();
        for (k, a) in u.iter() {
            assert!((v.get(k).unwrap().norm() - a.norm()).abs() < 1e-15);
        }
        let one = LatticeState::single([1]);
        let back = evolve_torus(&one, 1.0, &TimeScale::constant(1.0).unwrap(), 4.0 * PI).unwrap();
        assert!((back.get(&LatticeVector::from([1])).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn evolve_torus_sign() {
        // mode k = 2 at rate 1, t = 0.1: phase e^{-0.2 i}
        let u = LatticeState::single([2]);
        let v = evolve_torus_at_rate(&u, 1.0, 0.1);
        let z = v.get(&LatticeVector::from([2])).unwrap();
        assert!((z - Complex64::from_polar(1.0, -0.2)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn torus_group_law(i1 in -6400i32..6400, i2 in -6400i32..6400, h in 0.001f64..1.0) {
            // dyadic times keep t1 + t2 exact
            let (t1, t2) = (i1 as f64 / 128.0, i2 as f64 / 128.0);
            let u = sample_state();
            let s = TimeScale::power(0.5).unwrap();
            let a = evolve_torus(&evolve_torus(&u, h, &s, t1).unwrap(), h, &s, t2).unwrap();
            let b = evolve_torus(&u, h, &s, t1 + t2).unwrap();
            for (k, x) in a.iter() {
                prop_assert!((x - b.get(k).unwrap()).norm() < 1e-9);
            }
            prop_assert!((a.l2_norm() - u.l2_norm()).abs() < 1e-14);
        }

        #[test]
        fn free_evolution_is_unitary(
            x0 in -1.0f64..1.0, p in -2.0f64..2.0, sigma in 0.3f64..2.0, h in 0.01f64..0.5, t in -3.0f64..3.0
        ) {
            let g = GaussianPacket::new(vec![x0], vec![p], sigma, h).unwrap();
            let e = evolve_free(&g, &TimeScale::Reciprocal, t).unwrap();
            prop_assert!((e.norm_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn free_packet_norm_by_quadrature() {
        let g = GaussianPacket::new(vec![0.2], vec![1.0], 0.8, 0.05).unwrap().advanced(0.7);
        let c = g.center()[0];
        let q = simpson(|x| g.amplitude(&[x]).norm_sqr(), c - 8.0, c + 8.0, 20_000);
        assert!((q - 1.0).abs() < 1e-12);
        let x = c + 0.13;
        assert!((g.amplitude(&[x]).norm_sqr() - g.density(&[x])).abs() < 1e-12);
    }

    #[test]
    fn free_packet_solves_schrodinger() {
        // ∂_s ψ = (ih/2) ψ'' at an interior point, by finite differences
        let g = GaussianPacket::new(vec![0.0], vec![0.7], 1.0, 0.1).unwrap().advanced(0.4);
        let x = 0.31;
        let ds = 1e-5;
        let dt = (g.advanced(ds).amplitude(&[x]) - g.advanced(-ds).amplitude(&[x])) / (2.0 * ds);
        let dx = 1e-3;
        let lap = (g.amplitude(&[x + dx]) - 2.0 * g.amplitude(&[x]) + g.amplitude(&[x - dx])) / (dx * dx);
        let rhs = Complex64::new(0.0, 0.05) * lap;
        assert!((dt - rhs).norm() < 1e-5 * rhs.norm().max(1.0), "{dt} {rhs}");
    }

    #[test]
    fn evolve_free_transport() {
        let g = GaussianPacket::new(vec![0.0], vec![1.0], 1.0, 0.01).unwrap();
        assert_eq!(evolve_free(&g, &TimeScale::Reciprocal, 0.0).unwrap(), g);
        // group velocity α_h ξ0 under e^{iα_h h tΔ/2}
        let e = evolve_free(&g, &TimeScale::Reciprocal, 1.0).unwrap();
        assert_eq!(e.center(), vec![100.0]);
        let e = evolve_free(&g, &TimeScale::constant(1.0).unwrap(), 1.0).unwrap();
        assert_eq!(e.center(), vec![1.0]);
    }

    /// `W(x, ξ) = (πh)^{-1} ∫ ψ(x+y) conj ψ(x-y) e^{-2iξy/h} dy` in 1-D.
    fn wigner_by_quadrature(g: &GaussianPacket, x: f64, xi: f64) -> f64 {
        let f = |y: f64| {
            (g.amplitude(&[x + y]) * g.amplitude(&[x - y]).conj() * Complex64::from_polar(1.0, -2.0 * xi * y / g.h())).re
        };
        simpson(f, -6.0, 6.0, 40_000) / (PI * g.h())
    }

    #[test]
    fn wigner_gaussian_matches_definition() {
        let g = GaussianPacket::new(vec![0.3], vec![0.9], 0.8, 0.2).unwrap().advanced(0.6);
        let w = wigner_gaussian(&g);
        for (x, xi) in [(0.3, 0.9), (1.0, 1.1), (0.5, 0.5)] {
            let x = x + 0.6 * 0.9;
            let quad = wigner_by_quadrature(&g, x, xi);
            assert!((quad - w.density(&[x], &[xi])).abs() < 1e-10, "{quad}");
        }
        assert_eq!(w.mean_xi, vec![0.9]);
    }

    #[test]
    fn wigner_integral_and_marginal() {
        let g = GaussianPacket::new(vec![0.1], vec![-0.5], 1.3, 0.05).unwrap().advanced(1.5);
        let w = wigner_gaussian(&g);
        let [sxx, _, spp] = w.covariance;
        // 7 standard deviations per axis
        let (lx, lp) = (7.0 * sxx.sqrt(), 7.0 * spp.sqrt());
        let (mx, mp) = (w.mean_x[0], w.mean_xi[0]);
        let n = 600;
        let total = simpson(
            |x| simpson(|p| w.density(&[x], &[p]), mp - lp, mp + lp, n),
            mx - lx,
            mx + lx,
            n,
        );
        assert!((total - 1.0).abs() < 1e-10, "{total}");
        let x = g.initial_center()[0] + g.elapsed() * g.momentum()[0];
        let marginal = simpson(|p| w.density(&[x], &[p]), mp - 12.0 * spp.sqrt(), mp + 12.0 * spp.sqrt(), 4000);
        assert!((marginal - g.density(&[x])).abs() < 1e-10);
        // concentration as h → 0
        let small = wigner_gaussian(&GaussianPacket::new(vec![0.1], vec![-0.5], 1.3, 1e-4).unwrap());
        assert!(small.covariance.iter().all(|v| v.abs() < 1e-4));
    }

    #[test]
    fn gaussian_pairing_matches_quadrature() {
        let g = GaussianPacket::new(vec![0.0], vec![1.0], 1.0, 0.1).unwrap().advanced(0.8);
        let w = wigner_gaussian(&g);
        for xi_scale in [Some(0.7), None] {
            let a = GaussianObservable {
                x_center: vec![0.5],
                x_scale: 0.4,
                xi_center: vec![1.2],
                xi_scale,
                amplitude: 1.5,
            };
            let closed = w.pair_with(&a).unwrap();
            let quad = simpson(
                |x| simpson(|p| w.density(&[x], &[p]) * a.evaluate(&[x], &[p]), -5.0, 7.0, 800),
                -5.0,
                6.0,
                800,
            );
            assert!((closed - quad).abs() < 1e-10, "{closed} {quad}");
            assert!(closed <= a.spread_bound(w.covariance[0]) + 1e-15);
        }
    }
}
