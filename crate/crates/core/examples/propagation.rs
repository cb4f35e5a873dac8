//! Exact torus propagation and the closed-form free Gaussian packet on R^d.

use num_complex::Complex64;
use wignerlab::lattice::LatticeState;
use wignerlab::propagators::{evolve_free, evolve_torus, GaussianPacket, TimeScale};

fn main() -> wignerlab::Result<()> {
    let u = LatticeState::from_modes(1, vec![(vec![0], Complex64::new(0.8, 0.0)), (vec![7], Complex64::new(0.0, 0.6))])?;
    let h = 0.01;
    let scale = TimeScale::Reciprocal;
    let a = evolve_torus(&evolve_torus(&u, h, &scale, 0.75)?, h, &scale, 0.5)?;
    let b = evolve_torus(&u, h, &scale, 1.25)?;
    let gap = a.iter().zip(b.iter()).map(|((_, x), (_, y))| (x - y).norm()).fold(0.0, f64::max);
    println!("group law gap {gap:.1e}, norm drift {:.1e}", (b.l2_norm() - u.l2_norm()).abs());

    let p = GaussianPacket::new(vec![0.0, 0.0], vec![1.0, 0.5], 1.0, 0.05)?;
    for t in [0.0, 0.5, 1.0, 2.0] {
        let q = evolve_free(&p, &scale, t)?;
        let c = q.center();
        println!("t = {t:3.1}: centre ({:7.3}, {:7.3})  width {:.3}  ‖ψ‖² {:.12}", c[0], c[1], q.width(), q.norm_sq());
    }
    Ok(())
}
