//! Semiclassical families `(h_n, u_n)`.
//!
//! The resonant construction: take rational approximations `k_n → θ0` of a
//! non-resonant direction, let `q_n` be the lcm of their denominators,
//! `λ_1 = q_1`, `λ_n = q_n λ_{n-1}` and `h_n = λ_n^{-2}`. Then
//!
//! - `û_n(k) = ρ̂(k - λ_n² ξ0)` (plane wave at `ξ0`),
//! - `v̂_n(k) = ρ̂(k - λ_n² ξ0 - λ_n k_n)` (tilted by `√h_n k_n`).
//!
//! Both have the same semiclassical measure; their long-time averages differ.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{convergents, lcm, SurdVector};
use crate::lattice::{check_dim, LatticeState, LatticeVector};

/// Gaussian truncation radius of torus wave packets, in units of `√h`.
pub const PACKET_CUTOFF: f64 = 8.0;

/// Coordinatewise continued-fraction convergents of a non-resonant target.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalApproxStream {
    target: SurdVector,
}

impl RationalApproxStream {
    pub fn new(target: SurdVector) -> Result<Self> {
        if target.is_resonant() {
            return Err(Error::ResonantTarget(target.to_string()));
        }
        Ok(RationalApproxStream { target })
    }

    pub fn target(&self) -> &SurdVector {
        &self.target
    }

    /// `k_1, ..., k_count`, each coordinate in lowest terms.
    pub fn take(&self, count: usize) -> Result<Vec<Vec<Ratio<i128>>>> {
        let per_coord: Vec<Vec<Ratio<i128>>> = self
            .target
            .components()
            .iter()
            .map(|c| convergents(c, count))
            .collect::<Result<_>>()?;
        Ok((0..count)
            .map(|n| per_coord.iter().map(|c| reduce(c[n])).collect())
            .collect())
    }
}

fn reduce(r: Ratio<i128>) -> Ratio<i128> {
    Ratio::new(*r.numer(), *r.denom())
}

/// One rung of the ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub n: usize,
    /// `k_n` as `(numerator, denominator)` pairs.
    pub k: Vec<(i128, i128)>,
    pub q: i128,
    pub lambda: i128,
    /// `λ_n k_n`, an exact lattice vector.
    pub lambda_k: LatticeVector,
    pub h: f64,
}

impl LadderStep {
    pub fn k_f64(&self) -> Vec<f64> {
        self.k.iter().map(|&(p, q)| p as f64 / q as f64).collect()
    }

    /// `λ_n² ξ0` for an integer direction.
    pub fn carrier_shift(&self, xi0: &LatticeVector) -> Result<LatticeVector> {
        let l2 = self.lambda * self.lambda;
        let comps = xi0
            .components()
            .iter()
            .map(|&x| {
                l2.checked_mul(x as i128)
                    .and_then(|v| i64::try_from(v).ok())
                    .ok_or_else(|| Error::Overflow(format!("λ_{}² ξ0 exceeds i64", self.n)))
            })
            .collect::<Result<Vec<i64>>>()?;
        Ok(LatticeVector::from(comps))
    }
}

/// The ladder `q_n`, `λ_n`, `h_n = λ_n^{-2}`, stopped at the last rung whose
/// `λ_n²` fits in a signed 64-bit integer.
#[derive(Clone, Debug, PartialEq)]
pub struct LcmLadder {
    stream: RationalApproxStream,
    steps: Vec<LadderStep>,
    capped: bool,
}

impl LcmLadder {
    pub fn new(stream: RationalApproxStream, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidParameter("ladder depth must be at least 1".into()));
        }
        // convergents may overflow before λ does; stop quietly at that point too
        let mut ks = Vec::new();
        for count in (1..=depth).rev() {
            if let Ok(v) = stream.take(count) {
                ks = v;
                break;
            }
        }
        let mut steps = Vec::new();
        let mut lambda: i128 = 1;
        let mut capped = ks.len() < depth;
        for (i, k) in ks.into_iter().enumerate() {
            let q = k.iter().try_fold(1i128, |acc, r| lcm(acc, *r.denom()));
            let Ok(q) = q else {
                capped = true;
                break;
            };
            let next = if i == 0 { Some(q) } else { lambda.checked_mul(q) };
            let Some(next) = next.filter(|l| l.checked_mul(*l).is_some_and(|sq| sq <= i64::MAX as i128)) else {
                capped = true;
                break;
            };
            lambda = next;
            let lambda_k = k
                .iter()
                .map(|r| {
                    let (p, d) = (*r.numer(), *r.denom());
                    debug_assert!(lambda.is_multiple_of(&d));
                    i64::try_from((lambda / d) * p).map_err(|_| Error::Overflow("λ k".into()))
                })
                .collect::<Result<Vec<i64>>>();
            let Ok(lambda_k) = lambda_k else {
                capped = true;
                break;
            };
            steps.push(LadderStep {
                n: i + 1,
                k: k.iter().map(|r| (*r.numer(), *r.denom())).collect(),
                q,
                lambda,
                lambda_k: LatticeVector::from(lambda_k),
                h: 1.0 / (lambda as f64 * lambda as f64),
            });
        }
        if steps.is_empty() {
            return Err(Error::LadderExhausted {
                requested: 1,
                largest: 0,
            });
        }
        Ok(LcmLadder { stream, steps, capped })
    }

    pub fn stream(&self) -> &RationalApproxStream {
        &self.stream
    }

    pub fn steps(&self) -> &[LadderStep] {
        &self.steps
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// True if the ladder stopped short of the requested depth.
    pub fn is_capped(&self) -> bool {
        self.capped
    }

    pub fn step(&self, n: usize) -> Result<&LadderStep> {
        if n == 0 {
            return Err(Error::FamilyIndex(0));
        }
        self.steps.get(n - 1).ok_or(Error::LadderExhausted {
            requested: n,
            largest: self.depth(),
        })
    }
}

/// A member `(n, h_n, u_n)` of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub n: usize,
    pub h: f64,
    pub state: LatticeState,
}

fn shifted_member(
    rho: &LatticeState,
    xi0: &LatticeVector,
    ladder: &LcmLadder,
    n: usize,
    tilt: bool,
) -> Result<FamilyMember> {
    check_dim(rho.dim(), xi0.dim())?;
    check_dim(rho.dim(), ladder.stream().target().dim())?;
    let build = |m: usize| -> Result<FamilyMember> {
        let step = ladder.step(m)?;
        let mut shift = step.carrier_shift(xi0)?;
        if tilt {
            shift = shift.checked_add(&step.lambda_k)?;
        }
        Ok(FamilyMember {
            n: m,
            h: step.h,
            state: rho.modulate(&shift)?,
        })
    };
    match build(n) {
        Err(Error::Overflow(_)) => {
            let largest = (1..n).rev().find(|&m| build(m).is_ok()).unwrap_or(0);
            Err(Error::LadderExhausted { requested: n, largest })
        }
        other => other,
    }
}

/// `û_n(k) = ρ̂(k - λ_n² ξ0)` with `h_n = λ_n^{-2}`.
pub fn plane_wave_family(rho: &LatticeState, xi0: &LatticeVector, ladder: &LcmLadder, n: usize) -> Result<FamilyMember> {
    shifted_member(rho, xi0, ladder, n, false)
}

/// `v̂_n(k) = ρ̂(k - λ_n² ξ0 - λ_n k_n)` with `h_n = λ_n^{-2}`.
pub fn resonant_family(rho: &LatticeState, xi0: &LatticeVector, ladder: &LcmLadder, n: usize) -> Result<FamilyMember> {
    shifted_member(rho, xi0, ladder, n, true)
}

/// Coherent state on the torus concentrated at `(x0, ξ0)`:
/// `û(k) ∝ exp(-‖hk - ξ0‖²/(2h)) e^{-ik·x0}`, truncated at
/// `‖hk - ξ0‖ ≤ 8√h` and normalized.
pub fn wave_packet_torus(x0: &[f64], xi0: &[f64], h: f64) -> Result<LatticeState> {
    let d = x0.len();
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    check_dim(d, xi0.len())?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
    }
    let radius = PACKET_CUTOFF * h.sqrt();
    let ranges: Vec<(i64, i64)> = xi0
        .iter()
        .map(|&c| (((c - radius) / h).ceil() as i64, ((c + radius) / h).floor() as i64))
        .collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return Err(Error::EmptyPacket);
    }
    let mut entries = Vec::new();
    let mut k = vec![0i64; d];
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    'outer: loop {
        k.copy_from_slice(&idx);
        let dist2: f64 = k.iter().zip(xi0).map(|(&ki, &c)| (h * ki as f64 - c).powi(2)).sum();
        if dist2 <= radius * radius {
            let phase: f64 = -k.iter().zip(x0).map(|(&ki, &x)| ki as f64 * x).sum::<f64>();
            entries.push((k.clone(), Complex64::from_polar((-dist2 / (2.0 * h)).exp(), phase)));
        }
        for i in 0..d {
            if idx[i] < ranges[i].1 {
                idx[i] += 1;
                continue 'outer;
            }
            idx[i] = ranges[i].0;
        }
        break;
    }
    if entries.is_empty() {
        return Err(Error::EmptyPacket);
    }
    Ok(LatticeState::from_modes(d, entries)?.normalized())
}

/// The unit eigenmode `e^{ik0·x}/(2π)^{d/2}`.
pub fn eigenmode(k0: impl Into<LatticeVector>) -> LatticeState {
    LatticeState::single(k0)
}

/// A family declared by kind and parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SemiclassicalFamily {
    PlaneWave {
        rho: LatticeState,
        xi0: LatticeVector,
        theta0: SurdVector,
        depth: usize,
    },
    Resonant {
        rho: LatticeState,
        xi0: LatticeVector,
        theta0: SurdVector,
        depth: usize,
    },
    WavePacket {
        x0: Vec<f64>,
        xi0: Vec<f64>,
        h_grid: Vec<f64>,
    },
    /// `e^{i m ξ0·x}` at `h = 1/m` for each multiplier `m`.
    Eigenmode { xi0: LatticeVector, multipliers: Vec<i64> },
}

impl SemiclassicalFamily {
    pub fn kind(&self) -> &'static str {
        match self {
            SemiclassicalFamily::PlaneWave { .. } => "plane-wave",
            SemiclassicalFamily::Resonant { .. } => "resonant",
            SemiclassicalFamily::WavePacket { .. } => "wave-packet",
            SemiclassicalFamily::Eigenmode { .. } => "eigenmode",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SemiclassicalFamily::PlaneWave { rho, .. } | SemiclassicalFamily::Resonant { rho, .. } => rho.dim(),
            SemiclassicalFamily::WavePacket { x0, .. } => x0.len(),
            SemiclassicalFamily::Eigenmode { xi0, .. } => xi0.dim(),
        }
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        match self {
            SemiclassicalFamily::PlaneWave { depth, .. } | SemiclassicalFamily::Resonant { depth, .. } => *depth,
            SemiclassicalFamily::WavePacket { h_grid, .. } => h_grid.len(),
            SemiclassicalFamily::Eigenmode { multipliers, .. } => multipliers.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The carrier `ξ0` as floats.
    pub fn carrier(&self) -> Vec<f64> {
        match self {
            SemiclassicalFamily::PlaneWave { xi0, .. }
            | SemiclassicalFamily::Resonant { xi0, .. }
            | SemiclassicalFamily::Eigenmode { xi0, .. } => xi0.to_f64(),
            SemiclassicalFamily::WavePacket { xi0, .. } => xi0.clone(),
        }
    }

    /// Norm every member carries.
    pub fn declared_norm(&self) -> f64 {
        match self {
            SemiclassicalFamily::PlaneWave { rho, .. } | SemiclassicalFamily::Resonant { rho, .. } => rho.l2_norm(),
            _ => 1.0,
        }
    }

    /// The window `[‖ξ0‖²/2, 2‖ξ0‖²]` on which `‖hk‖²` should concentrate.
    pub fn declared_window(&self) -> (f64, f64) {
        let e: f64 = self.carrier().iter().map(|x| x * x).sum();
        (e / 2.0, 2.0 * e)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SemiclassicalFamily::PlaneWave { rho, xi0, theta0, depth }
            | SemiclassicalFamily::Resonant { rho, xi0, theta0, depth } => {
                check_dim(rho.dim(), xi0.dim())?;
                check_dim(rho.dim(), theta0.dim())?;
                if xi0.is_zero() {
                    return Err(Error::ZeroDirection);
                }
                if rho.is_empty() {
                    return Err(Error::InvalidParameter("profile has no modes".into()));
                }
                if *depth == 0 {
                    return Err(Error::InvalidParameter("depth must be at least 1".into()));
                }
                RationalApproxStream::new(theta0.clone())?;
            }
            SemiclassicalFamily::WavePacket { x0, xi0, h_grid } => {
                check_dim(x0.len(), xi0.len())?;
                if x0.is_empty() {
                    return Err(Error::ZeroDimension);
                }
                if xi0.iter().all(|&x| x == 0.0) {
                    return Err(Error::ZeroDirection);
                }
                if h_grid.is_empty() || h_grid.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
                    return Err(Error::InvalidParameter("h grid must be nonempty and positive".into()));
                }
            }
            SemiclassicalFamily::Eigenmode { xi0, multipliers } => {
                if xi0.is_zero() {
                    return Err(Error::ZeroDirection);
                }
                if multipliers.is_empty() || multipliers.iter().any(|&m| m <= 0) {
                    return Err(Error::InvalidParameter("multipliers must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// The ladder of a plane-wave or resonant family.
    pub fn ladder(&self) -> Result<Option<LcmLadder>> {
        match self {
            SemiclassicalFamily::PlaneWave { theta0, depth, .. } | SemiclassicalFamily::Resonant { theta0, depth, .. } => {
                Ok(Some(LcmLadder::new(RationalApproxStream::new(theta0.clone())?, *depth)?))
            }
            _ => Ok(None),
        }
    }

    /// Member `n` (1-based).
    pub fn member(&self, n: usize) -> Result<FamilyMember> {
        self.validate()?;
        if n == 0 || n > self.len() {
            return Err(Error::FamilyIndex(n));
        }
        match self {
            SemiclassicalFamily::PlaneWave { rho, xi0, .. } => {
                plane_wave_family(rho, xi0, &self.ladder()?.expect("ladder"), n)
            }
            SemiclassicalFamily::Resonant { rho, xi0, .. } => resonant_family(rho, xi0, &self.ladder()?.expect("ladder"), n),
            SemiclassicalFamily::WavePacket { x0, xi0, h_grid } => Ok(FamilyMember {
                n,
                h: h_grid[n - 1],
                state: wave_packet_torus(x0, xi0, h_grid[n - 1])?,
            }),
            SemiclassicalFamily::Eigenmode { xi0, multipliers } => {
                let m = multipliers[n - 1];
                let k: Vec<i64> = xi0
                    .components()
                    .iter()
                    .map(|&c| c.checked_mul(m).ok_or_else(|| Error::Overflow("eigenmode index".into())))
                    .collect::<Result<_>>()?;
                Ok(FamilyMember {
                    n,
                    h: 1.0 / m as f64,
                    state: eigenmode(k),
                })
            }
        }
    }

    pub fn members(&self) -> Result<Vec<FamilyMember>> {
        (1..=self.len()).map(|n| self.member(n)).collect()
    }
}
