//! Free Gaussian packets on R² at α_h = 1/h leave every compact set: the
//! averaged pairing with a localized observable shrinks as h decreases.

use wignerlab::pairing::dispersion_time_averaged;
use wignerlab::propagators::{GaussianObservable, GaussianPacket, TimeScale};
use wignerlab::window::TestWindow;

fn main() -> wignerlab::Result<()> {
    let obs = GaussianObservable {
        x_center: vec![0.3, 1.1],
        x_scale: 1.0 / 16.0,
        xi_center: vec![1.0, 0.0],
        xi_scale: None,
        amplitude: 1.0,
    };
    let w = TestWindow::fejer(2.0)?;
    let scale = TimeScale::Reciprocal;
    let mut last: Option<f64> = None;
    for h in [0.1, 0.05, 0.025, 0.0125] {
        let p = GaussianPacket::new(vec![0.3, 1.1], vec![1.0, 0.0], 1.0, h)?;
        let v = dispersion_time_averaged(&p, &scale, &w, &obs, 50.0, 0.02 * h)?;
        let ratio = last.map_or(String::new(), |prev| format!("  ratio {:.3}", prev / v.value.re));
        println!("h = {h:7.4}  pairing {:.4e}  budget {:.1e}{ratio}", v.value.re, v.budget);
        last = Some(v.value.re);
    }
    Ok(())
}
