//! Sparse torus states: construction, grid sampling and density coefficients.

use num_complex::Complex64;
use wignerlab::lattice::{LatticeState, LatticeVector};

fn main() -> wignerlab::Result<()> {
    let u = LatticeState::from_modes(
        2,
        vec![
            (vec![0, 0], Complex64::new(0.6, 0.0)),
            (vec![1, -2], Complex64::new(0.0, 0.5)),
            (vec![3, 1], Complex64::new(0.3, -0.2)),
        ],
    )?
    .normalized();
    println!("modes {}  ‖u‖ = {:.15}  mode radius {}", u.len(), u.l2_norm(), u.mode_radius());

    let grid = u.sample_on_grid(16)?;
    let dx = 2.0 * std::f64::consts::PI / 16.0;
    let mass: f64 = grid.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx;
    println!("∫|u|² on a 16×16 grid = {mass:.15}");

    for l in [[0, 0], [1, -2], [2, 3]] {
        println!("|u|² coefficient at {:?}: {:.6}", l, u.density_coefficient(&LatticeVector::from(l)));
    }

    let shifted = u.modulate(&LatticeVector::from([100, 0]))?;
    println!("after modulation by (100, 0): radius {}", shifted.mode_radius());
    Ok(())
}
