//! Two families with the same instantaneous limit and different time averages.

use num_complex::Complex64;
use wignerlab::exact::{QuadraticSurd, SurdVector};
use wignerlab::families::{plane_wave_family, resonant_family, LcmLadder, RationalApproxStream};
use wignerlab::lattice::{LatticeState, LatticeVector};
use wignerlab::pairing::{pairing_instantaneous, pairing_time_averaged};
use wignerlab::predictions::{predict_mu0_planewave, predict_mu1, predict_mu2};
use wignerlab::propagators::TimeScale;
use wignerlab::symbols::{TorusSymbol, XiProfile};
use wignerlab::window::TestWindow;

fn main() -> wignerlab::Result<()> {
    let half = Complex64::new(0.5, 0.0);
    let rho = LatticeState::from_modes(2, [[0, 0], [0, 1], [1, 0], [1, 1]].map(|k| (k.to_vec(), half)))?;
    let xi0 = LatticeVector::from([1, 0]);
    let theta = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2)?])?;
    let ladder = LcmLadder::new(RationalApproxStream::new(theta)?, 4)?;
    let w = TestWindow::fejer(2.0)?;
    let a = TorusSymbol::new(2)?
        .with_term([0, 0], XiProfile::gaussian(vec![1.0, 0.0], 0.5, half * 2.0)?)?
        .with_real_pair([0, 1], XiProfile::gaussian(vec![1.0, 0.0], 0.5, half)?)?;

    let mu0 = predict_mu0_planewave(&rho, &xi0.to_f64(), &a)?;
    let mu1 = predict_mu1(&rho, &xi0, &a, &w)?;
    let mu2 = predict_mu2(&rho, &xi0.to_f64(), &a, &w)?;
    println!("limits: mu0 {:.6}  mu1 {:.6}  mu2 {:.6}", mu0.re, mu1.re, mu2.re);
    println!("{:>2} {:>10} {:>10} {:>10} {:>10} {:>10}", "n", "h_n", "u(0)", "v(0)", "avg u", "avg v");
    for n in 1..=4 {
        let u = plane_wave_family(&rho, &xi0, &ladder, n)?;
        let v = resonant_family(&rho, &xi0, &ladder, n)?;
        let s = TimeScale::Reciprocal;
        println!(
            "{:>2} {:>10.3e} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            n,
            u.h,
            pairing_instantaneous(&u.state, &a, u.h)?.value.re,
            pairing_instantaneous(&v.state, &a, v.h)?.value.re,
            pairing_time_averaged(&u.state, &a, u.h, &s, &w)?.value.re,
            pairing_time_averaged(&v.state, &a, v.h, &s, &w)?.value.re,
        );
    }
    Ok(())
}
