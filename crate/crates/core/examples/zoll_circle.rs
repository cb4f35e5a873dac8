//! Wave packets on the circle: the time average tends to the orbit average c_0(ξ0)·∫φ.

use num_complex::Complex64;
use wignerlab::families::wave_packet_torus;
use wignerlab::pairing::pairing_time_averaged;
use wignerlab::predictions::predict_zoll;
use wignerlab::propagators::TimeScale;
use wignerlab::symbols::{TorusSymbol, XiProfile};
use wignerlab::window::TestWindow;

fn main() -> wignerlab::Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let a = TorusSymbol::new(1)?
        .with_term([0], XiProfile::gaussian(vec![1.1], 0.5, one)?)?
        .with_real_pair([1], XiProfile::gaussian(vec![1.0], 0.5, one * 0.4)?)?;
    let w = TestWindow::fejer(2.0)?;
    let limit = predict_zoll(0.3, 1.0, &a)? * w.integral();
    let mut last: Option<f64> = None;
    for h in [1e-2, 2.5e-3, 6.25e-4] {
        let u = wave_packet_torus(&[0.3], &[1.0], h)?;
        let p = pairing_time_averaged(&u, &a, h, &TimeScale::Reciprocal, &w)?;
        let err = (p.value - limit).norm();
        let ratio = last.map_or(String::new(), |e| format!("  ratio {:.3}", e / err));
        println!("h = {h:9.3e}  value {:.10}  error {err:.3e}{ratio}", p.value.re);
        last = Some(err);
    }
    Ok(())
}
