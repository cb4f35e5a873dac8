//! ξ-only symbols pair to a constant in time, for α_h = 1/h and for α_h = 1/h².

use num_complex::Complex64;
use wignerlab::families::SemiclassicalFamily;
use wignerlab::propagators::TimeScale;
use wignerlab::scenarios::{default_time_grid, egorov_invariant_check};
use wignerlab::symbols::{TorusSymbol, XiProfile};

fn main() -> wignerlab::Result<()> {
    let family = SemiclassicalFamily::WavePacket {
        x0: vec![0.3, 1.1],
        xi0: vec![1.0, 0.0],
        h_grid: vec![5e-2, 2e-2, 1e-2],
    };
    let a = TorusSymbol::new(2)?.with_term([0, 0], XiProfile::gaussian(vec![1.0, 0.2], 0.4, Complex64::new(1.0, 0.5))?)?;
    let times = default_time_grid();
    for (name, scale) in [("1/h", TimeScale::Reciprocal), ("1/h²", TimeScale::power(2.0)?)] {
        let dev = egorov_invariant_check(&family, &a, &scale, &times)?;
        println!("α_h = {name:5} regime {:?}  max deviation {dev:.2e}", scale.regime());
    }
    Ok(())
}
