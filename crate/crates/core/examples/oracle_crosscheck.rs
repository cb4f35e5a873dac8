//! Closed-form time average against quadrature of the evolved pairing.

use num_complex::Complex64;
use wignerlab::lattice::LatticeState;
use wignerlab::pairing::{oracle_time_quadrature_periodic, pairing_time_averaged};
use wignerlab::propagators::TimeScale;
use wignerlab::symbols::{TorusSymbol, XiProfile};
use wignerlab::window::TestWindow;

fn main() -> wignerlab::Result<()> {
    let c = |re, im| Complex64::new(re, im);
    let u = LatticeState::from_modes(1, vec![(vec![0], c(0.6, 0.0)), (vec![1], c(0.4, 0.3)), (vec![3], c(0.3, -0.2))])?;
    let a = TorusSymbol::new(1)?
        .with_term([0], XiProfile::gaussian(vec![0.5], 0.7, c(1.0, 0.0))?)?
        .with_real_pair([1], XiProfile::gaussian(vec![0.2], 0.5, c(0.4, 0.0))?)?
        .with_term([3], XiProfile::gaussian(vec![0.8], 0.9, c(0.3, -0.1))?)?;
    let h = 0.5;
    for r in [1.0, 2.0, 4.0] {
        let w = TestWindow::fejer(r)?;
        let closed = pairing_time_averaged(&u, &a, h, &TimeScale::Reciprocal, &w)?;
        let oracle = oracle_time_quadrature_periodic(&u, &a, h, &TimeScale::Reciprocal, &w)?;
        println!(
            "R = {r}: closed {:.12}  oracle {:.12}  |diff| {:.1e}  budget {:.1e}",
            closed.value,
            oracle.value,
            (closed.value - oracle.value).norm(),
            closed.budget + oracle.budget
        );
    }
    Ok(())
}
