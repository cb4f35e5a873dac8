//! Averaged pairing against {a, |ξ|²/2} along a wave-packet family, with its 1/α_h bound.

use num_complex::Complex64;
use wignerlab::families::SemiclassicalFamily;
use wignerlab::propagators::TimeScale;
use wignerlab::scenarios::invariance_residual;
use wignerlab::symbols::{TorusSymbol, XiProfile};
use wignerlab::window::TestWindow;

fn main() -> wignerlab::Result<()> {
    let family = SemiclassicalFamily::WavePacket {
        x0: vec![0.3, 1.1],
        xi0: vec![1.0, 0.0],
        h_grid: vec![4e-2, 2e-2, 1e-2, 5e-3],
    };
    let a = TorusSymbol::new(2)?
        .with_real_pair([0, 1], XiProfile::gaussian(vec![1.0, 0.4], 0.5, Complex64::new(0.5, 0.0))?)?
        .with_real_pair([1, 0], XiProfile::gaussian(vec![1.2, 0.1], 0.5, Complex64::new(0.3, 0.0))?)?;
    let w = TestWindow::fejer(2.0)?;
    println!("{:>2} {:>8} {:>7} {:>12} {:>12} {:>12}", "n", "h", "α_h", "residual", "residual·α", "bound");
    for r in invariance_residual(&family, &a, &w, &TimeScale::Reciprocal, &[])? {
        println!("{:>2} {:>8.1e} {:>7.0} {:>12.4e} {:>12.4e} {:>12.4e}", r.n, r.h, r.alpha, r.residual, r.scaled, r.bound);
    }
    Ok(())
}
