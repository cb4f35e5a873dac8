//! Share of spectral mass with ‖hk‖² inside the declared window of each family.

use num_complex::Complex64;
use wignerlab::exact::{QuadraticSurd, SurdVector};
use wignerlab::families::SemiclassicalFamily;
use wignerlab::lattice::LatticeState;
use wignerlab::pairing::h_oscillation_profile;

fn main() -> wignerlab::Result<()> {
    let half = Complex64::new(0.5, 0.0);
    let rho = LatticeState::from_modes(2, [[0, 0], [0, 1], [1, 0], [1, 1]].map(|k| (k.to_vec(), half)))?;
    let theta0 = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2)?])?;
    let families = [
        SemiclassicalFamily::PlaneWave { rho: rho.clone(), xi0: vec![1, 0].into(), theta0: theta0.clone(), depth: 4 },
        SemiclassicalFamily::Resonant { rho, xi0: vec![1, 0].into(), theta0, depth: 4 },
        SemiclassicalFamily::WavePacket { x0: vec![0.3], xi0: vec![1.0], h_grid: vec![1e-2, 1e-3] },
        SemiclassicalFamily::Eigenmode { xi0: vec![2, 1].into(), multipliers: vec![1, 10, 100] },
    ];
    for f in &families {
        let (lo, hi) = f.declared_window();
        for m in f.members()? {
            let p = h_oscillation_profile(&m.state, m.h, lo, hi)?;
            println!("{:<12} n = {}  h = {:9.3e}  inside {:.12}", f.kind(), m.n, m.h, p.inside);
        }
    }
    Ok(())
}
