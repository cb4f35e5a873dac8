//! Wigner pairings `⟨W_u^h, a⟩` on the torus.
//!
//! With `a = Σ_l c_l(ξ) e^{il·x}` and `u = Σ_k û(k) e^{ik·x}/(2π)^{d/2}`,
//!
//! ```text
//! ⟨W_u^h, a⟩ = Σ_l Σ_k û(k) conj(û(k+l)) c_l(h(2k+l)/2)
//! ```
//!
//! which is `⟨op_h^w(a) u, u⟩` for the Weyl quantization. Time averages
//! against a window replace each term by its `φ̂`-weighted version.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_dim, LatticeState, LatticeVector};
use crate::propagators::{evolve_free, evolve_torus, evolve_torus_at_rate, wigner_gaussian, GaussianObservable, GaussianPacket, TimeScale};
use crate::symbols::TorusSymbol;
use crate::window::TestWindow;

/// States above this size are paired in parallel.
const PARALLEL_THRESHOLD: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingValue {
    pub value: Complex64,
    /// Upper bound on `|value - exact|` from truncations and quadrature.
    pub budget: f64,
}

impl PairingValue {
    pub fn exact(value: Complex64) -> Self {
        PairingValue { value, budget: 0.0 }
    }
}

/// Sums `f(k, û(k), û(k+l), l, term)` over every state mode `k` and every
/// symbol term for which `k + l` is also in the support.
fn sum_pairs<F>(state: &LatticeState, symbol: &TorusSymbol, f: F) -> (Complex64, f64)
where
    F: Fn(&LatticeVector, &LatticeVector, Complex64, Complex64, usize) -> Option<(Complex64, f64)> + Sync,
{
    let modes: Vec<(&LatticeVector, &Complex64)> = state.iter().collect();
    let term = |(k, uk): &(&LatticeVector, &Complex64)| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (idx, t) in symbol.terms().iter().enumerate() {
            let Ok(j) = k.checked_add(&t.l) else { continue };
            let Some(uj) = state.get(&j) else { continue };
            if let Some((v, e)) = f(k, &j, **uk, uj, idx) {
                acc += v;
                err += e;
            }
        }
        (acc, err)
    };
    // terms are summed in lattice order so the result does not depend on the thread count
    let parts: Vec<(Complex64, f64)> = if modes.len() >= PARALLEL_THRESHOLD {
        modes.par_iter().map(term).collect()
    } else {
        modes.iter().map(term).collect()
    };
    parts
        .into_iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn midpoint(k: &LatticeVector, j: &LatticeVector, h: f64) -> Vec<f64> {
    k.components()
        .iter()
        .zip(j.components())
        .map(|(&a, &b)| h * (a as f64 + b as f64) / 2.0)
        .collect()
}

fn check_inputs(state: &LatticeState, symbol: &TorusSymbol, h: f64) -> Result<()> {
    check_dim(symbol.dim(), state.dim())?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
    }
    Ok(())
}

pub fn pairing_instantaneous(state: &LatticeState, symbol: &TorusSymbol, h: f64) -> Result<PairingValue> {
    check_inputs(state, symbol, h)?;
    let terms = symbol.terms();
    let (value, budget) = sum_pairs(state, symbol, |k, j, uk, uj, idx| {
        let p = &terms[idx].profile;
        let w = uk * uj.conj();
        Some((w * p.evaluate(&midpoint(k, j, h)), w.norm() * p.truncation_error()))
    });
    Ok(PairingValue { value, budget })
}

/// `τ = rate·(‖k‖² - ‖j‖²)/2`.
fn time_frequency(rate: f64, k: &LatticeVector, j: &LatticeVector) -> f64 {
    rate * ((k.norm_sq() - j.norm_sq()) as f64) / 2.0
}

/// `∫ φ(t) ⟨W(e^{iα_h h tΔ/2}u), a⟩ dt` as a closed-form double sum. Pairs
/// with `|τ| ≥ R` are skipped, so their contribution is exactly zero.
pub fn pairing_time_averaged(
    state: &LatticeState,
    symbol: &TorusSymbol,
    h: f64,
    scale: &TimeScale,
    window: &TestWindow,
) -> Result<PairingValue> {
    check_inputs(state, symbol, h)?;
    let rate = scale.rate(h)?;
    Ok(time_averaged_at_rate(state, symbol, h, rate, window))
}

pub(crate) fn time_averaged_at_rate(
    state: &LatticeState,
    symbol: &TorusSymbol,
    h: f64,
    rate: f64,
    window: &TestWindow,
) -> PairingValue {
    let terms = symbol.terms();
    let r = window.bandwidth();
    let (value, budget) = sum_pairs(state, symbol, |k, j, uk, uj, idx| {
        let tau = time_frequency(rate, k, j);
        if tau.abs() >= r {
            return None;
        }
        let p = &terms[idx].profile;
        let w = uk * uj.conj() * window.phi_hat(tau);
        Some((w * p.evaluate(&midpoint(k, j, h)), w.norm() * p.truncation_error()))
    });
    PairingValue { value, budget }
}

/// Number of `(k, l)` pairs inside the support whose `φ̂` weight is nonzero.
pub fn active_pair_count(state: &LatticeState, symbol: &TorusSymbol, h: f64, scale: &TimeScale, window: &TestWindow) -> Result<usize> {
    check_inputs(state, symbol, h)?;
    let rate = scale.rate(h)?;
    let r = window.bandwidth();
    let mut n = 0;
    for (k, _) in state.iter() {
        for t in symbol.terms() {
            let Ok(j) = k.checked_add(&t.l) else { continue };
            if state.get(&j).is_some() && time_frequency(rate, k, &j).abs() < r {
                n += 1;
            }
        }
    }
    Ok(n)
}

/// `Σ_l Σ_k |û(k)||û(k+l)| sup|c_l|`, a bound on `|⟨W(t), a⟩|` for all `t`.
pub fn pairing_sup_bound(state: &LatticeState, symbol: &TorusSymbol) -> Result<f64> {
    check_dim(symbol.dim(), state.dim())?;
    let terms = symbol.terms();
    let (_, bound) = sum_pairs(state, symbol, |_, _, uk, uj, idx| {
        Some((Complex64::new(0.0, 0.0), uk.norm() * uj.norm() * terms[idx].profile.sup_bound()))
    });
    Ok(bound)
}

/// Composite Simpson on `[-T, T]` of `φ(t)⟨W(t), a⟩`, evaluated by evolving
/// the state and pairing at each node. The budget adds the window tail beyond
/// `T` and a Richardson estimate of the discretisation error; the call fails
/// if it exceeds `tolerance`.
#[allow(clippy::too_many_arguments)]
pub fn oracle_time_quadrature(
    state: &LatticeState,
    symbol: &TorusSymbol,
    h: f64,
    scale: &TimeScale,
    window: &TestWindow,
    horizon: f64,
    step: f64,
    tolerance: f64,
) -> Result<PairingValue> {
    check_inputs(state, symbol, h)?;
    if !(horizon > 0.0 && step > 0.0 && step < horizon) {
        return Err(Error::InvalidParameter("need 0 < step < horizon".into()));
    }
    let mut n = (2.0 * horizon / step).ceil() as usize;
    n = n.div_ceil(4) * 4; // even at both resolutions
    let node = |t: f64| -> Result<Complex64> {
        let evolved = evolve_torus(state, h, scale, t)?;
        Ok(window.phi(t) * pairing_instantaneous(&evolved, symbol, h)?.value)
    };
    let dt = 2.0 * horizon / n as f64;
    let values: Vec<Complex64> = (0..=n)
        .into_par_iter()
        .map(|i| node(-horizon + i as f64 * dt))
        .collect::<Result<_>>()?;
    let fine = simpson_weights(&values, dt, 1);
    let coarse = simpson_weights(&values, dt, 2);
    let sup = pairing_sup_bound(state, symbol)?;
    let trunc = pairing_instantaneous(state, symbol, h)?.budget * window.integral();
    let budget = window.tail_mass(horizon) * sup + (fine - coarse).norm() / 15.0 + trunc;
    if budget > tolerance {
        return Err(Error::BudgetExceeded {
            value: fine,
            budget,
            tolerance,
        });
    }
    Ok(PairingValue { value: fine, budget })
}

/// Simpson sum over every `stride`-th sample.
fn simpson_weights(values: &[Complex64], dt: f64, stride: usize) -> Complex64 {
    let pts: Vec<Complex64> = values.iter().step_by(stride).copied().collect();
    let h = dt * stride as f64;
    let n = pts.len() - 1;
    let mut acc = pts[0] + pts[n];
    for (i, v) in pts.iter().enumerate().take(n).skip(1) {
        acc += *v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// Largest `|‖k‖² - ‖k+l‖²|` over pairs in the support.
fn max_frequency_gap(state: &LatticeState, symbol: &TorusSymbol) -> i128 {
    let mut gap = 0i128;
    for (k, _) in state.iter() {
        for t in symbol.terms() {
            let Ok(j) = k.checked_add(&t.l) else { continue };
            if state.get(&j).is_some() {
                gap = gap.max((k.norm_sq() - j.norm_sq()).abs());
            }
        }
    }
    gap
}

/// Largest trapezoid node count the periodic oracle will use.
pub const PERIODIC_ORACLE_MAX_NODES: usize = 1 << 22;

/// Time average computed on one period of the evolution.
///
/// The evolved pairing has period `4π/rate`, so `∫φ(t)P(t)dt` equals the
/// integral of `P` against the periodised window `Σ_m φ(t + m·period)` over a
/// single period. The periodised window is summed in closed form from `φ`
/// (never from `φ̂`), and the trapezoid rule on a periodic band-limited
/// integrand is exact once the node count exceeds its bandwidth.
pub fn oracle_time_quadrature_periodic(
    state: &LatticeState,
    symbol: &TorusSymbol,
    h: f64,
    scale: &TimeScale,
    window: &TestWindow,
) -> Result<PairingValue> {
    check_inputs(state, symbol, h)?;
    let rate = scale.rate(h)?;
    let period = 4.0 * PI / rate;
    window.periodized(0.0, period)?;
    let needed = max_frequency_gap(state, symbol) as f64 + 2.0 * window.bandwidth() / rate + 1.0;
    let mut n = 64usize;
    while (n as f64) <= needed {
        n *= 2;
        if n > PERIODIC_ORACLE_MAX_NODES {
            return Err(Error::InvalidParameter(format!(
                "periodic oracle needs more than {PERIODIC_ORACLE_MAX_NODES} nodes"
            )));
        }
    }
    let trapezoid = |n: usize| -> Result<Complex64> {
        let dt = period / n as f64;
        let parts: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let t = i as f64 * dt;
                let evolved = evolve_torus_at_rate(state, rate, t);
                Ok(window.periodized(t, period)? * pairing_instantaneous(&evolved, symbol, h)?.value)
            })
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum::<Complex64>() * dt)
    };
    let coarse = trapezoid(n)?;
    let fine = trapezoid(2 * n)?;
    let sup = pairing_sup_bound(state, symbol)?;
    let trunc = pairing_instantaneous(state, symbol, h)?.budget * window.integral();
    let floor = 1e-13 * sup.max(1.0) * window.integral();
    Ok(PairingValue {
        value: fine,
        budget: (fine - coarse).norm() + floor + trunc,
    })
}

/// `∫ a(x)|u(x)|² dx` for a symbol whose profiles do not depend on `ξ`.
pub fn pairing_position_density(state: &LatticeState, xsymbol: &TorusSymbol) -> Result<PairingValue> {
    check_dim(xsymbol.dim(), state.dim())?;
    if !xsymbol.is_xi_independent() {
        return Err(Error::InadmissibleSymbol("position pairing needs ξ-independent profiles".into()));
    }
    let vol = (2.0 * PI).powi(state.dim() as i32);
    let value = xsymbol
        .terms()
        .iter()
        .map(|t| t.profile.amplitude() * state.density_coefficient(&t.l.neg()) * vol)
        .sum();
    Ok(PairingValue::exact(value))
}

/// Shares of `Σ|û(k)|²` with `‖hk‖²` below, inside and above `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationProfile {
    pub below: f64,
    pub inside: f64,
    pub above: f64,
}

pub fn h_oscillation_profile(state: &LatticeState, h: f64, lower: f64, upper: f64) -> Result<OscillationProfile> {
    if !(lower < upper) {
        return Err(Error::InvalidParameter(format!("need lower < upper, got [{lower}, {upper}]")));
    }
    let mut mass = [0.0f64; 3];
    for (k, a) in state.iter() {
        let e = k.to_f64().iter().map(|x| (h * x).powi(2)).sum::<f64>();
        let slot = if e < lower {
            0
        } else if e > upper {
            2
        } else {
            1
        };
        mass[slot] += a.norm_sqr();
    }
    let total: f64 = mass.iter().sum();
    if total == 0.0 {
        return Ok(OscillationProfile {
            below: 0.0,
            inside: 0.0,
            above: 0.0,
        });
    }
    Ok(OscillationProfile {
        below: mass[0] / total,
        inside: mass[1] / total,
        above: mass[2] / total,
    })
}

/// `∫ φ(t) ⟨W(ψ_t), a⟩ dt` for a free Gaussian packet on `R^d`, by Simpson on
/// `[-T, T]`. Beyond `T` the pairing is bounded by the observable's spread
/// bound at the packet's width at `|t| = T`.
pub fn dispersion_time_averaged(
    packet: &GaussianPacket,
    scale: &TimeScale,
    window: &TestWindow,
    observable: &GaussianObservable,
    horizon: f64,
    step: f64,
) -> Result<PairingValue> {
    check_dim(packet.dim(), observable.dim())?;
    if !(horizon > 0.0 && step > 0.0 && step < horizon) {
        return Err(Error::InvalidParameter("need 0 < step < horizon".into()));
    }
    let mut n = (2.0 * horizon / step).ceil() as usize;
    n = n.div_ceil(4) * 4;
    let dt = 2.0 * horizon / n as f64;
    let values: Vec<Complex64> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let t = -horizon + i as f64 * dt;
            let p = wigner_gaussian(&evolve_free(packet, scale, t)?).pair_with(observable)?;
            Ok(Complex64::new(window.phi(t) * p, 0.0))
        })
        .collect::<Result<_>>()?;
    let fine = simpson_weights(&values, dt, 1);
    let coarse = simpson_weights(&values, dt, 2);
    let edge = wigner_gaussian(&evolve_free(packet, scale, horizon)?);
    let tail = window.tail_mass(horizon) * observable.spread_bound(edge.covariance[0]);
    Ok(PairingValue {
        value: fine,
        budget: tail + (fine - coarse).norm() / 15.0,
    })
}
