//! Phase-space observables on `T*T^d = T^d × R^d`.
//!
//! A [`TorusSymbol`] is a finite sum `a(x, ξ) = Σ_l c_l(ξ) e^{il·x}` whose
//! momentum profiles `c_l` come from a few closed families ([`XiProfile`]).
//! Profiles may carry a product of affine factors `Π (w·ξ + b)`; this keeps
//! the Poisson bracket with `p = ‖ξ‖²` inside the representation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::SurdVector;
use crate::lattice::{check_dim, LatticeVector};

/// Default Gaussian truncation radius, in standard deviations.
pub const GAUSSIAN_CUTOFF_SIGMAS: f64 = 8.0;

/// `max |d/ds exp(1 - 1/(1 - s²))|` over `0 < s < 1`.
const BUMP_SLOPE: f64 = 2.1703570857103387;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileFamily {
    /// `exp(-‖ξ-c‖²/(2r²))`, treated as zero beyond the cutoff radius.
    Gaussian,
    /// `exp(1 - 1/(1 - ‖ξ-c‖²/r²))` inside the ball of radius `r`, zero outside.
    Bump,
    /// Indicator of the closed ball `‖ξ-c‖ ≤ r`.
    ConstantOnBall,
    /// Independent of `ξ`; only used for position observables.
    Constant,
}

/// The affine factor `w·ξ + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFactor {
    pub w: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl LinearFactor {
    fn eval(&self, xi: &[f64]) -> f64 {
        self.w.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() + self.offset
    }

    /// `sup |w·ξ + offset|` over `‖ξ - center‖ ≤ radius`.
    fn bound_on_ball(&self, center: &[f64], radius: f64) -> f64 {
        let wn = self.w.iter().map(|a| a * a).sum::<f64>().sqrt();
        self.eval(center).abs() + wn * radius
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileDoc", into = "ProfileDoc")]
pub struct XiProfile {
    family: ProfileFamily,
    center: Vec<f64>,
    scale: f64,
    amplitude: Complex64,
    cutoff: f64,
    factors: Vec<LinearFactor>,
}

impl XiProfile {
    fn build(family: ProfileFamily, center: Vec<f64>, scale: f64, amplitude: Complex64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidProfile(format!("scale must be positive, got {scale}")));
        }
        if center.iter().any(|c| !c.is_finite()) || !amplitude.is_finite() {
            return Err(Error::InvalidProfile("non-finite parameter".into()));
        }
        let cutoff = match family {
            ProfileFamily::Gaussian => GAUSSIAN_CUTOFF_SIGMAS * scale,
            ProfileFamily::Bump | ProfileFamily::ConstantOnBall => scale,
            ProfileFamily::Constant => f64::INFINITY,
        };
        Ok(XiProfile {
            family,
            center,
            scale,
            amplitude,
            cutoff,
            factors: Vec::new(),
        })
    }

    pub fn gaussian(center: Vec<f64>, scale: f64, amplitude: Complex64) -> Result<Self> {
        Self::build(ProfileFamily::Gaussian, center, scale, amplitude)
    }

    pub fn bump(center: Vec<f64>, radius: f64, amplitude: Complex64) -> Result<Self> {
        Self::build(ProfileFamily::Bump, center, radius, amplitude)
    }

    pub fn constant_on_ball(center: Vec<f64>, radius: f64, amplitude: Complex64) -> Result<Self> {
        Self::build(ProfileFamily::ConstantOnBall, center, radius, amplitude)
    }

    pub fn constant(dim: usize, amplitude: Complex64) -> Result<Self> {
        Self::build(ProfileFamily::Constant, vec![0.0; dim], 1.0, amplitude)
    }

    /// Overrides the Gaussian truncation radius (absolute, in `ξ` units).
    pub fn with_cutoff(mut self, radius: f64) -> Result<Self> {
        if self.family != ProfileFamily::Gaussian {
            return Err(Error::InvalidProfile("only gaussian profiles carry a cutoff".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidProfile(format!("cutoff must be positive, got {radius}")));
        }
        self.cutoff = radius;
        Ok(self)
    }

    /// Multiplies by `(w·ξ + offset)`.
    pub fn with_factor(mut self, factor: LinearFactor) -> Result<Self> {
        check_dim(self.dim(), factor.w.len())?;
        self.factors.push(factor);
        Ok(self)
    }

    pub fn family(&self) -> ProfileFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn factors(&self) -> &[LinearFactor] {
        &self.factors
    }

    pub fn is_xi_independent(&self) -> bool {
        self.family == ProfileFamily::Constant && self.factors.is_empty()
    }

    pub fn scaled(&self, c: Complex64) -> XiProfile {
        XiProfile {
            amplitude: self.amplitude * c,
            ..self.clone()
        }
    }

    pub fn conj(&self) -> XiProfile {
        XiProfile {
            amplitude: self.amplitude.conj(),
            ..self.clone()
        }
    }

    fn shape(&self, xi: &[f64]) -> f64 {
        let dist2: f64 = self.center.iter().zip(xi).map(|(c, x)| (x - c) * (x - c)).sum();
        match self.family {
            ProfileFamily::Gaussian => {
                if dist2 > self.cutoff * self.cutoff {
                    0.0
                } else {
                    (-dist2 / (2.0 * self.scale * self.scale)).exp()
                }
            }
            ProfileFamily::Bump => {
                let s2 = dist2 / (self.scale * self.scale);
                if s2 >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s2)).exp()
                }
            }
            ProfileFamily::ConstantOnBall => {
                if dist2 <= self.scale * self.scale {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileFamily::Constant => 1.0,
        }
    }

    pub fn evaluate(&self, xi: &[f64]) -> Complex64 {
        let s = self.shape(xi);
        if s == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let poly: f64 = self.factors.iter().map(|f| f.eval(xi)).product();
        self.amplitude * (s * poly)
    }

    /// Radius of the ball about the center outside which the stored profile
    /// vanishes.
    pub fn support_radius(&self) -> f64 {
        self.cutoff
    }

    /// Upper bound on `sup_ξ |c(ξ)|`.
    pub fn sup_bound(&self) -> f64 {
        let mut bound = self.amplitude.norm();
        if self.factors.is_empty() {
            return bound;
        }
        if self.family == ProfileFamily::Constant {
            return f64::INFINITY;
        }
        for f in &self.factors {
            bound *= f.bound_on_ball(&self.center, self.cutoff);
        }
        bound
    }

    /// Lipschitz constant in `ξ` (infinite for discontinuous or
    /// polynomially-weighted profiles).
    pub fn lipschitz(&self) -> f64 {
        if !self.factors.is_empty() {
            return f64::INFINITY;
        }
        let a = self.amplitude.norm();
        match self.family {
            ProfileFamily::Gaussian => a / (self.scale * std::f64::consts::E.sqrt()),
            ProfileFamily::Bump => a * BUMP_SLOPE / self.scale,
            ProfileFamily::ConstantOnBall => {
                if a == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProfileFamily::Constant => 0.0,
        }
    }

    /// Pointwise bound on the difference between the stored (truncated)
    /// profile and the untruncated closed form.
    pub fn truncation_error(&self) -> f64 {
        if self.family != ProfileFamily::Gaussian {
            return 0.0;
        }
        let tail = (-self.cutoff * self.cutoff / (2.0 * self.scale * self.scale)).exp();
        let poly: f64 = self
            .factors
            .iter()
            .map(|f| f.bound_on_ball(&self.center, self.cutoff))
            .product();
        self.amplitude.norm() * tail * poly
    }
}

/// Serialized profile: `{family, center, scale, amp_re, amp_im}` plus the
/// optional `cutoff` and `factors`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub family: String,
    pub center: Vec<f64>,
    pub scale: f64,
    pub amp_re: f64,
    #[serde(default)]
    pub amp_im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<LinearFactor>,
}

impl TryFrom<ProfileDoc> for XiProfile {
    type Error = Error;

    fn try_from(doc: ProfileDoc) -> Result<Self> {
        let amp = Complex64::new(doc.amp_re, doc.amp_im);
        let family = match doc.family.as_str() {
            "gaussian" | "linear-times-gaussian" => ProfileFamily::Gaussian,
            "bump" => ProfileFamily::Bump,
            "constant-on-ball" => ProfileFamily::ConstantOnBall,
            "constant" => ProfileFamily::Constant,
            other => return Err(Error::InvalidProfile(format!("unknown family `{other}`"))),
        };
        if doc.family == "linear-times-gaussian" && doc.factors.is_empty() {
            return Err(Error::InvalidProfile("linear-times-gaussian needs a factor".into()));
        }
        let mut p = XiProfile::build(family, doc.center, doc.scale, amp)?;
        if let Some(c) = doc.cutoff {
            p = p.with_cutoff(c)?;
        }
        for f in doc.factors {
            p = p.with_factor(f)?;
        }
        Ok(p)
    }
}

impl From<XiProfile> for ProfileDoc {
    fn from(p: XiProfile) -> Self {
        let family = match p.family {
            ProfileFamily::Gaussian if p.factors.len() == 1 => "linear-times-gaussian",
            ProfileFamily::Gaussian => "gaussian",
            ProfileFamily::Bump => "bump",
            ProfileFamily::ConstantOnBall => "constant-on-ball",
            ProfileFamily::Constant => "constant",
        };
        let default_cutoff = GAUSSIAN_CUTOFF_SIGMAS * p.scale;
        ProfileDoc {
            family: family.to_string(),
            cutoff: (p.family == ProfileFamily::Gaussian && p.cutoff != default_cutoff).then_some(p.cutoff),
            center: p.center,
            scale: p.scale,
            amp_re: p.amplitude.re,
            amp_im: p.amplitude.im,
            factors: p.factors,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolTerm {
    pub l: LatticeVector,
    pub profile: XiProfile,
}

/// `a(x, ξ) = Σ_l c_l(ξ) e^{il·x}`. Terms may repeat a frequency; their
/// profiles add.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolDoc", into = "SymbolDoc")]
pub struct TorusSymbol {
    dim: usize,
    terms: Vec<SymbolTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolDoc {
    pub dim: usize,
    pub terms: Vec<SymbolTerm>,
}

impl TryFrom<SymbolDoc> for TorusSymbol {
    type Error = Error;
    fn try_from(doc: SymbolDoc) -> Result<Self> {
        let mut s = TorusSymbol::new(doc.dim)?;
        for t in doc.terms {
            s.push(t.l, t.profile)?;
        }
        Ok(s)
    }
}

impl From<TorusSymbol> for SymbolDoc {
    fn from(s: TorusSymbol) -> Self {
        SymbolDoc {
            dim: s.dim,
            terms: s.terms,
        }
    }
}

impl TorusSymbol {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(TorusSymbol { dim, terms: Vec::new() })
    }

    pub fn push(&mut self, l: impl Into<LatticeVector>, profile: XiProfile) -> Result<()> {
        let l = l.into();
        check_dim(self.dim, l.dim())?;
        check_dim(self.dim, profile.dim())?;
        self.terms.push(SymbolTerm { l, profile });
        Ok(())
    }

    pub fn with_term(mut self, l: impl Into<LatticeVector>, profile: XiProfile) -> Result<Self> {
        self.push(l, profile)?;
        Ok(self)
    }

    /// Adds `c(ξ)e^{il·x} + conj(c(ξ))e^{-il·x}` (or just the real part of
    /// `c` when `l = 0`), keeping the symbol real-valued.
    pub fn with_real_pair(mut self, l: impl Into<LatticeVector>, profile: XiProfile) -> Result<Self> {
        let l = l.into();
        if l.is_zero() {
            let re = Complex64::new(profile.amplitude.re, 0.0);
            let p = XiProfile {
                amplitude: re,
                ..profile
            };
            self.push(l, p)?;
        } else {
            self.push(l.neg(), profile.conj())?;
            self.push(l, profile)?;
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[SymbolTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let phase: f64 = t.l.components().iter().zip(x).map(|(&l, &y)| l as f64 * y).sum();
                t.profile.evaluate(xi) * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// Every term has a partner at `-l` with the conjugate profile.
    pub fn is_real(&self) -> bool {
        let mut used = vec![false; self.terms.len()];
        for i in 0..self.terms.len() {
            if used[i] {
                continue;
            }
            let t = &self.terms[i];
            let target_l = t.l.neg();
            let target_p = t.profile.conj();
            if t.l.is_zero() && t.profile == target_p {
                used[i] = true;
                continue;
            }
            let partner = (0..self.terms.len())
                .find(|&j| j != i && !used[j] && self.terms[j].l == target_l && self.terms[j].profile == target_p);
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None => return false,
            }
        }
        true
    }

    pub fn scaled(&self, c: Complex64) -> TorusSymbol {
        TorusSymbol {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| SymbolTerm {
                    l: t.l.clone(),
                    profile: t.profile.scaled(c),
                })
                .collect(),
        }
    }

    pub fn plus(&self, other: &TorusSymbol) -> Result<TorusSymbol> {
        check_dim(self.dim, other.dim)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(TorusSymbol { dim: self.dim, terms })
    }

    /// Only the terms whose frequency satisfies `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&LatticeVector) -> bool) -> TorusSymbol {
        TorusSymbol {
            dim: self.dim,
            terms: self.terms.iter().filter(|t| keep(&t.l)).cloned().collect(),
        }
    }

    /// Average along the straight-line flow in direction `ξ0`: keeps exactly
    /// the terms with `l·ξ0 = 0`, decided in exact arithmetic. For a
    /// non-resonant `ξ0` only `l = 0` survives.
    pub fn average_along(&self, direction: &SurdVector) -> Result<TorusSymbol> {
        check_dim(self.dim, direction.dim())?;
        direction.require_nonzero()?;
        let mut terms = Vec::new();
        for t in &self.terms {
            if direction.is_orthogonal_to(&t.l)? {
                terms.push(t.clone());
            }
        }
        Ok(TorusSymbol { dim: self.dim, terms })
    }

    /// `{a, p}` with `p = ‖ξ‖²`: each term maps to `-2i(l·ξ) c_l(ξ) e^{il·x}`.
    pub fn poisson_bracket_with_p(&self) -> TorusSymbol {
        let terms = self
            .terms
            .iter()
            .filter(|t| !t.l.is_zero())
            .map(|t| {
                // store the factor with a canonical sign so that `l` and `-l`
                // partners stay structurally conjugate
                let neg = t.l.neg();
                let (w, coeff) = if t.l > neg { (t.l.to_f64(), -2.0) } else { (neg.to_f64(), 2.0) };
                let factor = LinearFactor { w, offset: 0.0 };
                let mut profile = t.profile.scaled(Complex64::new(0.0, coeff));
                profile.factors.push(factor);
                SymbolTerm {
                    l: t.l.clone(),
                    profile,
                }
            })
            .collect();
        TorusSymbol { dim: self.dim, terms }
    }

    /// The ξ-profile sum `Σ_{l=0} c_0(ξ)`, i.e. the x-average of `a(·, ξ)`.
    pub fn mean_profile(&self, xi: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.l.is_zero())
            .map(|t| t.profile.evaluate(xi))
            .sum()
    }

    /// True if every profile is independent of `ξ`.
    pub fn is_xi_independent(&self) -> bool {
        self.terms.iter().all(|t| t.profile.is_xi_independent())
    }

    /// True if the symbol has only `l = 0` terms.
    pub fn is_x_independent(&self) -> bool {
        self.terms.iter().all(|t| t.l.is_zero())
    }

    /// `Σ_terms sup|c_l|`, a bound on `sup |a|`.
    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.profile.sup_bound()).sum()
    }
}

/// `(2π)^{-d} ∫ a(y, ξ) dy`, computed by the tensor midpoint rule; used by
/// tests as an independent route to the `l = 0` projection.
pub fn torus_mean_by_quadrature(symbol: &TorusSymbol, xi: &[f64], points_per_axis: usize) -> Complex64 {
    let d = symbol.dim();
    let n = points_per_axis;
    let total = n.pow(d as u32);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut x = vec![0.0; d];
    for idx in 0..total {
        let mut rem = idx;
        for xi_ in x.iter_mut() {
            *xi_ = 2.0 * PI * (rem % n) as f64 / n as f64;
            rem /= n;
        }
        acc += symbol.evaluate(&x, xi);
    }
    acc / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QuadraticSurd;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_symbol() -> TorusSymbol {
        TorusSymbol::new(2)
            .unwrap()
            .with_real_pair([0, 0], XiProfile::gaussian(vec![1.0, 0.0], 0.7, c(1.0, 0.0)).unwrap())
            .unwrap()
            .with_real_pair([0, 3], XiProfile::bump(vec![0.5, 0.5], 1.5, c(0.3, -0.2)).unwrap())
            .unwrap()
            .with_real_pair([2, 0], XiProfile::gaussian(vec![0.0, 1.0], 0.4, c(0.0, 0.5)).unwrap())
            .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let empty = TorusSymbol::new(1).unwrap();
        assert_eq!(empty.evaluate(&[0.3], &[1.0]), c(0.0, 0.0));
        let amp = c(0.8, -0.1);
        let s = TorusSymbol::new(2)
            .unwrap()
            .with_term([0, 0], XiProfile::gaussian(vec![1.0, -2.0], 0.5, amp).unwrap())
            .unwrap();
        assert_eq!(s.evaluate(&[1.3, 4.0], &[1.0, -2.0]), amp);
    }

    #[test]
    fn real_symbols_evaluate_real() {
        let s = sample_symbol();
        assert!(s.is_real());
        let mut x = 0.1f64;
        for _ in 0..100 {
            x = (x * 7.31 + 0.17).fract();
            let pt = [x * 6.28, (x * 13.1).fract() * 6.28];
            let xi = [x * 3.0 - 1.0, (x * 5.3).fract() * 2.0];
            assert!(s.evaluate(&pt, &xi).im.abs() <= 1e-14);
        }
        let lone = TorusSymbol::new(1)
            .unwrap()
            .with_term([1], XiProfile::gaussian(vec![0.0], 1.0, c(1.0, 0.0)).unwrap())
            .unwrap();
        assert!(!lone.is_real());
    }

    #[test]
    fn profile_bounds() {
        let g = XiProfile::gaussian(vec![0.0], 0.5, c(2.0, 0.0)).unwrap();
        assert_eq!(g.evaluate(&[4.0 + 1e-9]), c(0.0, 0.0));
        assert!(g.evaluate(&[3.9]).norm() > 0.0);
        assert!((g.truncation_error() - 2.0 * (-32f64).exp()).abs() < 1e-25);
        let b = XiProfile::bump(vec![1.0, 1.0], 0.5, c(1.0, 0.0)).unwrap();
        assert_eq!(b.evaluate(&[1.5, 1.0]), c(0.0, 0.0));
        assert_eq!(b.evaluate(&[1.0, 1.0]), c(1.0, 0.0));
        // sampled slope never exceeds the stored Lipschitz constant
        let lip = b.lipschitz();
        let mut worst: f64 = 0.0;
        for i in 0..4000 {
            let s0 = i as f64 / 4000.0 * 0.6;
            let s1 = s0 + 1e-5;
            let d = (b.evaluate(&[1.0 + s1, 1.0]) - b.evaluate(&[1.0 + s0, 1.0])).norm() / 1e-5;
            worst = worst.max(d);
        }
        assert!(worst <= lip && worst > 0.99 * lip);
        assert!(XiProfile::gaussian(vec![0.0], -1.0, c(1.0, 0.0)).is_err());
        assert!(XiProfile::bump(vec![0.0], 1.0, c(1.0, 0.0)).unwrap().with_cutoff(2.0).is_err());
    }

    #[test]
    fn average_along_examples() {
        let s = TorusSymbol::new(2)
            .unwrap()
            .with_term([0, 3], XiProfile::constant(2, c(1.0, 0.0)).unwrap())
            .unwrap()
            .with_term([2, 0], XiProfile::constant(2, c(1.0, 0.0)).unwrap())
            .unwrap();
        let e1 = SurdVector::from_integers(&[1, 0]).unwrap();
        let avg = s.average_along(&e1).unwrap();
        assert_eq!(avg.terms().len(), 1);
        assert_eq!(avg.terms()[0].l, LatticeVector::from([0, 3]));

        let irr = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2).unwrap()]).unwrap();
        let avg = sample_symbol().average_along(&irr).unwrap();
        assert!(avg.terms().iter().all(|t| t.l.is_zero()));
        assert_eq!(avg.terms().len(), 1);

        let zero = SurdVector::from_integers(&[0, 0]).unwrap();
        assert_eq!(s.average_along(&zero), Err(Error::ZeroDirection));
    }

    #[test]
    fn average_for_nonresonant_direction_is_the_torus_mean() {
        let irr = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2).unwrap()]).unwrap();
        let s = sample_symbol();
        let avg = s.average_along(&irr).unwrap();
        let xi = irr.to_f64();
        let quad = torus_mean_by_quadrature(&s, &xi, 16);
        for x in [[0.0, 0.0], [1.3, 2.9], [5.0, 0.4]] {
            let v = avg.evaluate(&x, &xi);
            assert!((v - quad).norm() < 1e-14);
            assert!((v - avg.evaluate(&[0.7, 0.7], &xi)).norm() < 1e-14);
        }
    }

    #[test]
    fn bracket_of_invariant_symbol_vanishes() {
        let s = TorusSymbol::new(1)
            .unwrap()
            .with_term([0], XiProfile::gaussian(vec![1.0], 1.0, c(1.0, 0.0)).unwrap())
            .unwrap();
        assert!(s.poisson_bracket_with_p().is_empty());
    }

    #[test]
    fn bracket_matches_flow_derivative() {
        // {a, p}(x, ξ) = -d/ds a(x + 2sξ, ξ) at s = 0
        let s = sample_symbol();
        let br = s.poisson_bracket_with_p();
        let step = 1e-5;
        let mut seed = 0.37f64;
        for _ in 0..50 {
            seed = (seed * 9.17 + 0.29).fract();
            let x = [seed * 6.28, (seed * 3.7).fract() * 6.28];
            let xi = [seed * 2.0 - 0.5, (seed * 7.1).fract() * 2.0 - 0.5];
            let fwd = s.evaluate(&[x[0] + 2.0 * step * xi[0], x[1] + 2.0 * step * xi[1]], &xi);
            let bwd = s.evaluate(&[x[0] - 2.0 * step * xi[0], x[1] - 2.0 * step * xi[1]], &xi);
            let fd = -(fwd - bwd) / (2.0 * step);
            assert!((br.evaluate(&x, &xi) - fd).norm() < 1e-6);
        }
    }

    #[test]
    fn bracket_keeps_reality_and_is_killed_by_nonresonant_average() {
        let br = sample_symbol().poisson_bracket_with_p();
        assert!(br.is_real());
        let irr = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2).unwrap()]).unwrap();
        assert!(br.average_along(&irr).unwrap().is_empty());
    }

    #[test]
    fn json_layout() {
        let s = TorusSymbol::new(1)
            .unwrap()
            .with_term([2], XiProfile::gaussian(vec![1.0], 0.5, c(1.0, -0.5)).unwrap())
            .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"{"dim":1,"terms":[{"l":[2],"profile":{"family":"gaussian","center":[1.0],"scale":0.5,"amp_re":1.0,"amp_im":-0.5}}]}"#
        );
        let br = s.poisson_bracket_with_p();
        let text = serde_json::to_string(&br).unwrap();
        assert!(text.contains("linear-times-gaussian"));
        let back: TorusSymbol = serde_json::from_str(&text).unwrap();
        assert_eq!(back, br);
        assert!(serde_json::from_str::<TorusSymbol>(
            r#"{"dim":1,"terms":[{"l":[2],"profile":{"family":"nope","center":[1.0],"scale":0.5,"amp_re":1.0}}]}"#
        )
        .is_err());
    }

    fn arb_symbol() -> impl Strategy<Value = TorusSymbol> {
        prop::collection::vec(
            (
                (-3i64..=3, -3i64..=3),
                (-2.0f64..2.0, -2.0f64..2.0),
                0.2f64..1.5,
                (-1.0f64..1.0, -1.0f64..1.0),
                prop::bool::ANY,
            ),
            0..6,
        )
        .prop_map(|terms| {
            let mut s = TorusSymbol::new(2).unwrap();
            for ((l1, l2), (c1, c2), r, (a, b), bump) in terms {
                let p = if bump {
                    XiProfile::bump(vec![c1, c2], r, Complex64::new(a, b)).unwrap()
                } else {
                    XiProfile::gaussian(vec![c1, c2], r, Complex64::new(a, b)).unwrap()
                };
                s.push([l1, l2], p).unwrap();
            }
            s
        })
    }

    fn arb_direction() -> impl Strategy<Value = SurdVector> {
        ((-3i64..=3, -3i64..=3, 0i64..=1), (-3i64..=3, 0i64..=2, 2i64..=7)).prop_filter_map(
            "nonzero",
            |((p1, p2, use_surd), (q1, q2, m))| {
                let a = QuadraticSurd::new(p1, 0, 0, 1).ok()?;
                let b = if use_surd == 1 {
                    QuadraticSurd::new(p2, q2, m, 1).ok()?
                } else {
                    QuadraticSurd::new(q1, 0, 0, 1).ok()?
                };
                let v = SurdVector::new(vec![a, b]).ok()?;
                (!v.is_zero()).then_some(v)
            },
        )
    }

    proptest! {
        #[test]
        fn averaging_is_an_idempotent_linear_projection(
            a in arb_symbol(),
            b in arb_symbol(),
            dir in arb_direction(),
            x in (0.0f64..6.3, 0.0f64..6.3),
            xi in (-2.0f64..2.0, -2.0f64..2.0),
        ) {
            let once = a.average_along(&dir).unwrap();
            let twice = once.average_along(&dir).unwrap();
            prop_assert_eq!(&once, &twice);
            let lhs = a.plus(&b).unwrap().average_along(&dir).unwrap();
            let rhs = once.plus(&b.average_along(&dir).unwrap()).unwrap();
            let (x, xi) = ([x.0, x.1], [xi.0, xi.1]);
            prop_assert!((lhs.evaluate(&x, &xi) - rhs.evaluate(&x, &xi)).norm() < 1e-12);
        }

        #[test]
        fn averaged_symbol_is_constant_along_the_flow(
            a in arb_symbol(),
            dir in arb_direction(),
            x in (0.0f64..6.3, 0.0f64..6.3),
            s in -5.0f64..5.0,
        ) {
            let avg = a.average_along(&dir).unwrap();
            let v = dir.to_f64();
            let moved = [x.0 + s * v[0], x.1 + s * v[1]];
            let xi = [0.3, -0.2];
            prop_assert!((avg.evaluate(&[x.0, x.1], &xi) - avg.evaluate(&moved, &xi)).norm() < 1e-10);
        }

        #[test]
        fn bracket_of_flow_invariant_part_vanishes_on_resonant_directions(
            a in arb_symbol(),
            dir in arb_direction(),
            x in (0.0f64..6.3, 0.0f64..6.3),
            t in 0.1f64..2.0,
        ) {
            // at ξ = t·ξ0, terms with l·ξ0 = 0 have l·ξ = 0
            let inv = a.average_along(&dir).unwrap().poisson_bracket_with_p();
            let v = dir.to_f64();
            let xi = [t * v[0], t * v[1]];
            prop_assert!(inv.evaluate(&[x.0, x.1], &xi).norm() < 1e-12);
        }
    }
}
