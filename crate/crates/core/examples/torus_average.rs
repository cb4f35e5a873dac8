//! Wave packets on T² with a dense direction: convergence to the average along ξ0.

use num_complex::Complex64;
use wignerlab::exact::{QuadraticSurd, SurdVector};
use wignerlab::families::wave_packet_torus;
use wignerlab::pairing::pairing_time_averaged;
use wignerlab::predictions::predict_torus_average;
use wignerlab::propagators::TimeScale;
use wignerlab::symbols::{TorusSymbol, XiProfile};
use wignerlab::window::TestWindow;

fn main() -> wignerlab::Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let dir = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2)?])?;
    let xi0 = dir.to_f64();
    let x0 = [0.3, 1.1];
    let a = TorusSymbol::new(2)?
        .with_term([0, 0], XiProfile::gaussian(vec![1.1, 1.3], 0.6, one)?)?
        .with_real_pair([1, -1], XiProfile::gaussian(vec![1.0, 1.4], 0.6, one * 0.4)?)?
        .with_real_pair([0, 1], XiProfile::gaussian(vec![1.0, 1.4], 0.6, one * 0.3)?)?;
    let w = TestWindow::fejer(2.0)?;
    let limit = predict_torus_average(&x0, &dir, &a)? * w.integral();
    for h in [1e-2, 5e-3, 2.5e-3] {
        let u = wave_packet_torus(&x0, &xi0, h)?;
        let p = pairing_time_averaged(&u, &a, h, &TimeScale::Reciprocal, &w)?;
        println!("h = {h:8.2e}  modes {:6}  error {:.3e}", u.len(), (p.value - limit).norm());
    }
    Ok(())
}
