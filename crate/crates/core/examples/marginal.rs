//! For x-only symbols the Wigner pairing is the integral against |u(t, x)|².

use num_complex::Complex64;
use wignerlab::families::wave_packet_torus;
use wignerlab::pairing::{pairing_instantaneous, pairing_position_density};
use wignerlab::propagators::{evolve_torus, TimeScale};
use wignerlab::symbols::{TorusSymbol, XiProfile};

fn main() -> wignerlab::Result<()> {
    let h = 0.02;
    let u = wave_packet_torus(&[0.3, 1.1], &[1.0, 0.0], h)?;
    let a = TorusSymbol::new(2)?
        .with_term([0, 0], XiProfile::constant(2, Complex64::new(0.5, 0.0))?)?
        .with_real_pair([1, 1], XiProfile::constant(2, Complex64::new(0.2, 0.0))?)?
        .with_term([0, 2], XiProfile::constant(2, Complex64::new(0.1, 0.3))?)?;
    for t in [0.0, 0.5, 1.0, 2.0] {
        let ut = evolve_torus(&u, h, &TimeScale::Reciprocal, t)?;
        let weyl = pairing_instantaneous(&ut, &a, h)?.value;
        let dens = pairing_position_density(&ut, &a)?.value;
        println!("t = {t:3.1}  Weyl {weyl:.12}  density {dens:.12}  gap {:.1e}", (weyl - dens).norm());
    }
    Ok(())
}
