//! Limiting values of pairings as `h → 0`, evaluated as functionals of the
//! symbol.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::SurdVector;
use crate::lattice::{check_dim, LatticeState, LatticeVector};
use crate::symbols::TorusSymbol;
use crate::window::TestWindow;

/// `∫ a(x, ξ0)|ρ(x)|² dx`: the limit for `ρ` modulated by a plane wave at `ξ0`.
pub fn predict_mu0_planewave(rho: &LatticeState, xi0: &[f64], symbol: &TorusSymbol) -> Result<Complex64> {
    check_dim(symbol.dim(), rho.dim())?;
    check_dim(symbol.dim(), xi0.len())?;
    let vol = (2.0 * PI).powi(rho.dim() as i32);
    Ok(symbol
        .terms()
        .iter()
        .map(|t| t.profile.evaluate(xi0) * rho.density_coefficient(&t.l.neg()) * vol)
        .sum())
}

/// `a(x0, ξ0)`: the limit for a coherent state at `(x0, ξ0)`.
pub fn predict_mu0_pointmass(x0: &[f64], xi0: &[f64], symbol: &TorusSymbol) -> Result<Complex64> {
    check_dim(symbol.dim(), x0.len())?;
    check_dim(symbol.dim(), xi0.len())?;
    Ok(symbol.evaluate(x0, xi0))
}

/// Long-time limit for the plane-wave family at an integer `ξ0`:
/// `Σ_{l·ξ0 = 0} c_l(ξ0) Σ_k φ̂((‖k‖² - ‖k+l‖²)/2) ρ̂(k) conj ρ̂(k+l)`.
pub fn predict_mu1(rho: &LatticeState, xi0: &LatticeVector, symbol: &TorusSymbol, window: &TestWindow) -> Result<Complex64> {
    check_dim(symbol.dim(), rho.dim())?;
    check_dim(symbol.dim(), xi0.dim())?;
    if xi0.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let xi = xi0.to_f64();
    let r = window.bandwidth();
    let mut acc = Complex64::new(0.0, 0.0);
    for t in symbol.terms() {
        if t.l.dot(xi0) != 0 {
            continue;
        }
        let c = t.profile.evaluate(&xi);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (k, a) in rho.iter() {
            let Ok(j) = k.checked_add(&t.l) else { continue };
            let Some(b) = rho.get(&j) else { continue };
            let tau = (k.norm_sq() - j.norm_sq()) as f64 / 2.0;
            if tau.abs() >= r {
                continue;
            }
            acc += c * a * b.conj() * window.phi_hat(tau);
        }
    }
    Ok(acc)
}

/// `(∫φ) ‖ρ‖² c_0(ξ0)`: the uniform-in-`x` limit for the tilted family.
pub fn predict_mu2(rho: &LatticeState, xi0: &[f64], symbol: &TorusSymbol, window: &TestWindow) -> Result<Complex64> {
    check_dim(symbol.dim(), rho.dim())?;
    check_dim(symbol.dim(), xi0.len())?;
    Ok(symbol.mean_profile(xi0) * rho.l2_norm().powi(2) * window.integral())
}

/// On the circle every orbit is closed and the average keeps only `c_0`.
pub fn predict_zoll(x0: f64, xi0: f64, symbol: &TorusSymbol) -> Result<Complex64> {
    if symbol.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: symbol.dim(),
        });
    }
    if xi0 == 0.0 || !xi0.is_finite() {
        return Err(Error::ZeroDirection);
    }
    // on the circle l·ξ0 = 0 forces l = 0 for any ξ0 ≠ 0
    Ok(symbol.filter_terms(LatticeVector::is_zero).evaluate(&[x0], &[xi0]))
}

/// Along a dense direction the average is the `x`-mean `c_0(ξ0)`.
pub fn predict_torus_average(x0: &[f64], xi0: &SurdVector, symbol: &TorusSymbol) -> Result<Complex64> {
    check_dim(symbol.dim(), x0.len())?;
    if xi0.is_resonant() {
        return Err(Error::ResonantTarget(xi0.to_string()));
    }
    let avg = symbol.average_along(xi0)?;
    Ok(avg.evaluate(x0, &xi0.to_f64()))
}

/// Free-space time averages vanish in the limit.
pub fn predict_dispersion() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Bound on `|computed - predicted|` coming only from evaluating each profile
/// at the pair midpoint instead of at `ξ0`:
/// `sup φ̂ · Σ_l Lip(c_l) Σ_k |ρ̂(k)||ρ̂(k+l)| (‖offset‖ + h‖k + l/2‖)`.
/// The midpoint of a family member sits at `ξ0 + offset + h(k + l/2)`.
pub fn lipschitz_error_bound(
    rho: &LatticeState,
    symbol: &TorusSymbol,
    weight: f64,
    h: f64,
    offset: &[f64],
) -> Result<f64> {
    check_dim(symbol.dim(), rho.dim())?;
    check_dim(symbol.dim(), offset.len())?;
    let off = offset.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut total = 0.0;
    for t in symbol.terms() {
        let lip = t.profile.lipschitz();
        for (k, a) in rho.iter() {
            let Ok(j) = k.checked_add(&t.l) else { continue };
            let Some(b) = rho.get(&j) else { continue };
            let mid: f64 = k
                .components()
                .iter()
                .zip(j.components())
                .map(|(&x, &y)| ((x as f64 + y as f64) / 2.0).powi(2))
                .sum::<f64>()
                .sqrt();
            let w = a.norm() * b.norm();
            if w > 0.0 {
                total += lip * w * (off + h * mid);
            }
        }
    }
    Ok(weight * total)
}

/// A named limit, evaluable on any symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasurePrediction {
    Mu0Planewave {
        rho: LatticeState,
        xi0: Vec<f64>,
        #[serde(default)]
        window: Option<TestWindow>,
    },
    Mu0Pointmass {
        x0: Vec<f64>,
        xi0: Vec<f64>,
        #[serde(default)]
        window: Option<TestWindow>,
    },
    Mu1Resonant {
        rho: LatticeState,
        xi0: LatticeVector,
        window: TestWindow,
    },
    Mu2Uniform {
        rho: LatticeState,
        xi0: Vec<f64>,
        window: TestWindow,
    },
    ZollAverage {
        x0: f64,
        xi0: f64,
        #[serde(default)]
        window: Option<TestWindow>,
    },
    TorusAverage {
        x0: Vec<f64>,
        xi0: SurdVector,
        #[serde(default)]
        window: Option<TestWindow>,
    },
    Zero,
}

impl MeasurePrediction {
    pub fn kind(&self) -> &'static str {
        match self {
            MeasurePrediction::Mu0Planewave { .. } => "mu0-planewave",
            MeasurePrediction::Mu0Pointmass { .. } => "mu0-pointmass",
            MeasurePrediction::Mu1Resonant { .. } => "mu1-resonant",
            MeasurePrediction::Mu2Uniform { .. } => "mu2-uniform",
            MeasurePrediction::ZollAverage { .. } => "zoll-average",
            MeasurePrediction::TorusAverage { .. } => "torus-average",
            MeasurePrediction::Zero => "zero",
        }
    }

    /// The predicted value; instantaneous limits carrying a window are
    /// multiplied by `∫φ`.
    pub fn evaluate(&self, symbol: &TorusSymbol) -> Result<Complex64> {
        let mass = |w: &Option<TestWindow>| w.as_ref().map_or(1.0, TestWindow::integral);
        Ok(match self {
            MeasurePrediction::Mu0Planewave { rho, xi0, window } => predict_mu0_planewave(rho, xi0, symbol)? * mass(window),
            MeasurePrediction::Mu0Pointmass { x0, xi0, window } => predict_mu0_pointmass(x0, xi0, symbol)? * mass(window),
            MeasurePrediction::Mu1Resonant { rho, xi0, window } => predict_mu1(rho, xi0, symbol, window)?,
            MeasurePrediction::Mu2Uniform { rho, xi0, window } => predict_mu2(rho, xi0, symbol, window)?,
            MeasurePrediction::ZollAverage { x0, xi0, window } => predict_zoll(*x0, *xi0, symbol)? * mass(window),
            MeasurePrediction::TorusAverage { x0, xi0, window } => predict_torus_average(x0, xi0, symbol)? * mass(window),
            MeasurePrediction::Zero => predict_dispersion(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QuadraticSurd;
    use crate::lattice::LatticeVector;
    use crate::pairing::pairing_position_density;
    use crate::propagators::evolve_torus_at_rate;
    use crate::symbols::XiProfile;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rho3() -> LatticeState {
        LatticeState::from_modes(
            2,
            vec![(vec![0, 0], c(0.5, 0.0)), (vec![0, 1], c(0.3, -0.4)), (vec![1, 1], c(-0.2, 0.6))],
        )
        .unwrap()
    }

    fn gauss(center: Vec<f64>, amp: Complex64) -> XiProfile {
        XiProfile::gaussian(center, 0.5, amp).unwrap()
    }

    #[test]
    fn mu0_examples() {
        let rho = rho3();
        let xi0 = [1.0, 0.0];
        let b = gauss(vec![1.0, 0.1], c(1.0, 0.0));
        let a = TorusSymbol::new(2).unwrap().with_term([0, 0], b.clone()).unwrap();
        let v = predict_mu0_planewave(&rho, &xi0, &a).unwrap();
        assert!((v - b.evaluate(&xi0) * rho.l2_norm().powi(2)).norm() < 1e-15);
        let single = LatticeState::single([2, 3]);
        let osc = TorusSymbol::new(2).unwrap().with_term([0, 1], b.clone()).unwrap();
        assert_eq!(predict_mu0_planewave(&single, &xi0, &osc).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn mu0_against_grid_quadrature() {
        let rho = rho3();
        let xi0 = [1.0, 0.0];
        let a = TorusSymbol::new(2)
            .unwrap()
            .with_term([0, 1], gauss(vec![1.0, 0.2], c(0.7, 0.2)))
            .unwrap();
        let n = 16;
        let grid = rho.sample_on_grid(n).unwrap();
        let dx = 2.0 * PI / n as f64;
        let mut quad = c(0.0, 0.0);
        for (idx, u) in grid.iter().enumerate() {
            let x = [(idx / n) as f64 * dx, (idx % n) as f64 * dx];
            quad += a.evaluate(&x, &xi0) * u.norm_sqr() * dx * dx;
        }
        let closed = predict_mu0_planewave(&rho, &xi0, &a).unwrap();
        assert!((closed - quad).norm() < 1e-12, "{closed} {quad}");
    }

    #[test]
    fn mu1_mu2_examples() {
        let w = TestWindow::fejer(2.0).unwrap();
        let xi0 = LatticeVector::from([1, 0]);
        let s = 1.0 / 2f64.sqrt();
        let rho = LatticeState::from_modes(2, vec![(vec![0, 0], c(s, 0.0)), (vec![0, 1], c(s, 0.0))]).unwrap();
        let b = gauss(vec![1.0, 0.0], c(1.0, 0.0));
        let diag = TorusSymbol::new(2).unwrap().with_term([0, 0], b.clone()).unwrap();
        let m1 = predict_mu1(&rho, &xi0, &diag, &w).unwrap();
        assert!((m1 - c(1.0, 0.0)).norm() < 1e-15);
        let cross = TorusSymbol::new(2).unwrap().with_term([0, 1], b.clone()).unwrap();
        // (0,0) → (0,1): τ = -1/2, φ̂ = 3/4
        let m1 = predict_mu1(&rho, &xi0, &cross, &w).unwrap();
        assert!((m1 - c(0.375, 0.0)).norm() < 1e-15);
        assert_eq!(predict_mu2(&rho, &[1.0, 0.0], &cross, &w).unwrap(), c(0.0, 0.0));
        let single = LatticeState::single([0, 3]);
        let mixed = diag.plus(&cross).unwrap();
        assert_eq!(
            predict_mu1(&single, &xi0, &mixed, &w).unwrap(),
            predict_mu2(&single, &[1.0, 0.0], &mixed, &w).unwrap()
        );
    }

    #[test]
    fn mass_consistency() {
        let w = TestWindow::triangle_product(3.0).unwrap();
        let one = TorusSymbol::new(2)
            .unwrap()
            .with_term([0, 0], XiProfile::constant(2, c(1.0, 0.0)).unwrap())
            .unwrap();
        let rho = rho3();
        let m1 = predict_mu1(&rho, &LatticeVector::from([1, 0]), &one, &w).unwrap();
        let m2 = predict_mu2(&rho, &[1.0, 0.0], &one, &w).unwrap();
        let mass = w.integral() * rho.l2_norm().powi(2);
        assert!((m1.re - mass).abs() < 1e-15 && (m2.re - mass).abs() < 1e-15);
    }

    #[test]
    fn mu1_density_form() {
        // ∫ φ(t) ∫ a_res(x, ξ0) |e^{itΔ/2}ρ|² dx dt, folded onto one period
        let w = TestWindow::fejer(2.0).unwrap();
        let xi0 = LatticeVector::from([1, 0]);
        let rho = LatticeState::from_modes(
            2,
            vec![(vec![0, 0], c(0.5, 0.0)), (vec![0, 1], c(0.3, -0.4)), (vec![0, 2], c(0.1, 0.2)), (vec![1, 1], c(-0.2, 0.6))],
        )
        .unwrap();
        let a = TorusSymbol::new(2)
            .unwrap()
            .with_real_pair([0, 1], gauss(vec![1.0, 0.3], c(0.4, 0.1)))
            .unwrap()
            .with_real_pair([1, 0], gauss(vec![1.0, 0.0], c(0.5, 0.0)))
            .unwrap()
            .with_term([0, 0], gauss(vec![1.1, 0.0], c(0.8, 0.0)))
            .unwrap();
        let xi = xi0.to_f64();
        let mut xsym = TorusSymbol::new(2).unwrap();
        for t in a.terms().iter().filter(|t| t.l.dot(&xi0) == 0) {
            xsym.push(t.l.clone(), XiProfile::constant(2, t.profile.evaluate(&xi)).unwrap()).unwrap();
        }
        let period = 4.0 * PI;
        let n = 256;
        let dt = period / n as f64;
        let mut density_form = c(0.0, 0.0);
        for i in 0..n {
            let t = i as f64 * dt;
            let evolved = evolve_torus_at_rate(&rho, 1.0, t);
            density_form += w.periodized(t, period).unwrap() * pairing_position_density(&evolved, &xsym).unwrap().value * dt;
        }
        let double_sum = predict_mu1(&rho, &xi0, &a, &w).unwrap();
        assert!((density_form - double_sum).norm() < 1e-12, "{density_form} {double_sum}");
    }

    #[test]
    fn zoll_and_torus() {
        let a = TorusSymbol::new(1)
            .unwrap()
            .with_term([0], XiProfile::gaussian(vec![1.0], 0.5, c(0.9, 0.0)).unwrap())
            .unwrap()
            .with_real_pair([1], XiProfile::gaussian(vec![1.0], 0.5, c(0.3, 0.0)).unwrap())
            .unwrap();
        assert!((predict_zoll(0.2, 1.0, &a).unwrap() - c(0.9, 0.0)).norm() < 1e-15);
        assert_eq!(predict_zoll(0.2, 1.0, &a).unwrap(), predict_zoll(2.9, 1.0, &a).unwrap());
        assert_eq!(predict_zoll(0.2, 0.0, &a), Err(Error::ZeroDirection));
        let osc = a.filter_terms(|l| !l.is_zero());
        assert_eq!(predict_zoll(0.2, 1.0, &osc).unwrap(), c(0.0, 0.0));

        let dir = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2).unwrap()]).unwrap();
        let b = TorusSymbol::new(2)
            .unwrap()
            .with_term([0, 0], gauss(vec![1.0, 1.4], c(0.6, 0.0)))
            .unwrap()
            .with_real_pair([1, -1], gauss(vec![1.0, 1.4], c(0.2, 0.1)))
            .unwrap();
        let v = predict_torus_average(&[0.3, 1.1], &dir, &b).unwrap();
        assert!((v - gauss(vec![1.0, 1.4], c(0.6, 0.0)).evaluate(&dir.to_f64())).norm() < 1e-15);
        assert_eq!(v, predict_torus_average(&[2.0, 5.0], &dir, &b).unwrap());
        let res = SurdVector::from_integers(&[1, 0]).unwrap();
        assert!(matches!(predict_torus_average(&[0.0, 0.0], &res, &b), Err(Error::ResonantTarget(_))));
        assert_eq!(predict_dispersion(), c(0.0, 0.0));
    }

    #[test]
    fn prediction_json() {
        let p = MeasurePrediction::ZollAverage {
            x0: 0.3,
            xi0: 1.0,
            window: Some(TestWindow::fejer(2.0).unwrap()),
        };
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.starts_with(r#"{"kind":"zoll-average""#));
        assert_eq!(serde_json::from_str::<MeasurePrediction>(&text).unwrap(), p);
        assert_eq!(serde_json::from_str::<MeasurePrediction>(r#"{"kind":"zero"}"#).unwrap(), MeasurePrediction::Zero);
    }

    fn arb_symbol() -> impl Strategy<Value = TorusSymbol> {
        prop::collection::vec(((-2i64..=2, -2i64..=2), (0.5f64..1.5, -0.5f64..0.5), (-1.0f64..1.0, -1.0f64..1.0)), 1..5)
            .prop_map(|terms| {
                let mut s = TorusSymbol::new(2).unwrap();
                for ((l1, l2), (c1, c2), (a, b)) in terms {
                    s = s.with_real_pair([l1, l2], XiProfile::gaussian(vec![c1, c2], 0.6, c(a, b)).unwrap()).unwrap();
                }
                s
            })
    }

    proptest! {
        #[test]
        fn mu1_ignores_nonresonant_terms(a in arb_symbol()) {
            let w = TestWindow::fejer(2.0).unwrap();
            let xi0 = LatticeVector::from([1, 0]);
            let res = a.filter_terms(|l| l.dot(&xi0) == 0);
            let full = predict_mu1(&rho3(), &xi0, &a, &w).unwrap();
            let proj = predict_mu1(&rho3(), &xi0, &res, &w).unwrap();
            prop_assert!((full - proj).norm() < 1e-15);
        }

        #[test]
        fn averages_are_invariant_under_averaging(a in arb_symbol(), x in (0.0f64..6.3, 0.0f64..6.3)) {
            let dir = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2).unwrap()]).unwrap();
            let avg = a.average_along(&dir).unwrap();
            let p = predict_torus_average(&[x.0, x.1], &dir, &a).unwrap();
            let q = predict_torus_average(&[x.0, x.1], &dir, &avg).unwrap();
            prop_assert_eq!(p, q);
        }
    }
}
