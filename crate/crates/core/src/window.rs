//! Band-limited time windows `φ` for long-time averages.
//!
//! Convention: `φ̂(τ) = ∫ φ(t) e^{-iτt} dt`, so `φ(t) = (2π)^{-1} ∫ φ̂(τ) e^{iτt} dτ`
//! and `∫ φ = φ̂(0)`. Both families have `supp φ̂ = [-R, R]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Total variation of `sinc²` over the real line (rounded up).
const TV_SINC2: f64 = 2.3891;
/// Total variation of `sinc⁴` over the real line (rounded up).
const TV_SINC4: f64 = 2.0105;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowFamily {
    /// `φ̂(τ) = max(0, 1 - |τ|/R)`, `φ(t) = 2 sin²(Rt/2)/(πRt²)`.
    Fejer,
    /// `φ = (Fejér of bandwidth R/2)²`; `φ̂` is a cubic B-spline.
    TriangleProduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WindowDoc", into = "WindowDoc")]
pub struct TestWindow {
    family: WindowFamily,
    bandwidth: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WindowDoc {
    pub family: WindowFamily,
    pub bandwidth: f64,
}

impl TryFrom<WindowDoc> for TestWindow {
    type Error = Error;
    fn try_from(doc: WindowDoc) -> Result<Self> {
        TestWindow::new(doc.family, doc.bandwidth)
    }
}

impl From<TestWindow> for WindowDoc {
    fn from(w: TestWindow) -> Self {
        WindowDoc {
            family: w.family,
            bandwidth: w.bandwidth,
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Cubic B-spline on `[-2, 2]` with unit integral.
fn bspline3(s: f64) -> f64 {
    let s = s.abs();
    if s <= 1.0 {
        2.0 / 3.0 - s * s + s * s * s / 2.0
    } else if s < 2.0 {
        let u = 2.0 - s;
        u * u * u / 6.0
    } else {
        0.0
    }
}

impl TestWindow {
    /// Builds the window and checks the transform pair by quadrature.
    pub fn new(family: WindowFamily, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidWindow(format!("bandwidth must be positive, got {bandwidth}")));
        }
        let w = TestWindow { family, bandwidth };
        let err = w.transform_pair_error();
        if err > 1e-8 {
            return Err(Error::InvalidWindow(format!("transform pair mismatch {err:e}")));
        }
        Ok(w)
    }

    pub fn fejer(bandwidth: f64) -> Result<Self> {
        Self::new(WindowFamily::Fejer, bandwidth)
    }

    pub fn triangle_product(bandwidth: f64) -> Result<Self> {
        Self::new(WindowFamily::TriangleProduct, bandwidth)
    }

    pub fn family(&self) -> WindowFamily {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn phi_hat(&self, tau: f64) -> f64 {
        let r = self.bandwidth;
        match self.family {
            WindowFamily::Fejer => (1.0 - tau.abs() / r).max(0.0),
            WindowFamily::TriangleProduct => {
                let a = r / 2.0;
                a / (2.0 * PI) * bspline3(tau / a)
            }
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        let r = self.bandwidth;
        match self.family {
            WindowFamily::Fejer => r / (2.0 * PI) * sinc(r * t / 2.0).powi(2),
            WindowFamily::TriangleProduct => {
                let a = r / 2.0;
                (a / (2.0 * PI) * sinc(a * t / 2.0).powi(2)).powi(2)
            }
        }
    }

    /// `∫ φ = φ̂(0)`.
    pub fn integral(&self) -> f64 {
        self.phi_hat(0.0)
    }

    pub fn sup_phi_hat(&self) -> f64 {
        self.phi_hat(0.0)
    }

    /// A constant `C` with `φ(t) ≤ C/(1 + t²)` for all `t`.
    pub fn decay_constant(&self) -> f64 {
        let r = self.bandwidth;
        match self.family {
            WindowFamily::Fejer => (4.0 / (PI * r)).max(r / PI),
            WindowFamily::TriangleProduct => {
                let a = r / 2.0;
                (2.0 * (a / (2.0 * PI)).powi(2)).max(8.0 / (PI * PI * a * a))
            }
        }
    }

    /// Upper bound on `∫_{|t|>T} φ`.
    pub fn tail_mass(&self, horizon: f64) -> f64 {
        if horizon <= 0.0 {
            return self.integral();
        }
        let r = self.bandwidth;
        let bound = match self.family {
            WindowFamily::Fejer => 4.0 / (PI * r * horizon),
            WindowFamily::TriangleProduct => {
                let a = r / 2.0;
                8.0 / (3.0 * PI * PI * a * a * horizon.powi(3))
            }
        };
        bound.min(self.integral())
    }

    /// Upper bound on `∫ |φ'|`.
    pub fn derivative_l1(&self) -> f64 {
        let r = self.bandwidth;
        match self.family {
            WindowFamily::Fejer => r / (2.0 * PI) * TV_SINC2,
            WindowFamily::TriangleProduct => {
                let a = r / 2.0;
                (a / (2.0 * PI)).powi(2) * TV_SINC4
            }
        }
    }

    /// Points in `(0, R)` where `φ̂` is not smooth.
    fn kinks(&self) -> Vec<f64> {
        match self.family {
            WindowFamily::Fejer => vec![],
            WindowFamily::TriangleProduct => vec![self.bandwidth / 2.0],
        }
    }

    /// Largest deviation between `φ` and the inverse transform of `φ̂`
    /// (Simpson on each smooth piece) over a set of probe times.
    pub fn transform_pair_error(&self) -> f64 {
        let r = self.bandwidth;
        let mut nodes = vec![0.0];
        nodes.extend(self.kinks());
        nodes.push(r);
        let probes = [0.0, 0.37, 1.3, 2.9, 7.7, 15.1];
        let mut worst: f64 = 0.0;
        for &p in &probes {
            let t = p / r;
            let mut integral = 0.0;
            for w in nodes.windows(2) {
                integral += simpson(|tau| self.phi_hat(tau) * (tau * t).cos(), w[0], w[1], 2000);
            }
            // φ̂ is even
            let inverse = integral / PI;
            worst = worst.max((inverse - self.phi(t)).abs());
        }
        worst
    }

    /// `Σ_m φ(t + m·period)` in closed form. Needs the window's
    /// oscillation to be commensurate with the period.
    pub fn periodized(&self, t: f64, period: f64) -> Result<f64> {
        self.check_foldable(period)?;
        let r = self.bandwidth;
        let t = t - period * (t / period).round();
        let z = PI * t / period;
        let q = PI / period;
        Ok(match self.family {
            WindowFamily::Fejer => {
                let ratio = (r / 2.0) * sinc(r * t / 2.0) / (q * sinc(z));
                2.0 / (PI * r) * q * q * ratio * ratio
            }
            WindowFamily::TriangleProduct => {
                let a = r / 2.0;
                let ratio = (a / 2.0) * sinc(a * t / 2.0) / (q * sinc(z));
                let s = (a * t / 2.0).sin();
                let sum = q.powi(4) * ratio.powi(4) - (2.0 / 3.0) * q.powi(4) * ratio * ratio * s * s;
                4.0 / (PI * PI * a * a) * sum
            }
        })
    }

    fn check_foldable(&self, period: f64) -> Result<()> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
        }
        // the window's sin-factor has period 2π/R (Fejér) or 4π/R (product)
        let base = match self.family {
            WindowFamily::Fejer => 2.0 * PI / self.bandwidth,
            WindowFamily::TriangleProduct => 4.0 * PI / self.bandwidth,
        };
        let ratio = period / base;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
            return Err(Error::WindowNotFoldable {
                bandwidth: self.bandwidth,
                period,
            });
        }
        Ok(())
    }
}

/// Composite Simpson rule with `n` (even) subintervals.
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
