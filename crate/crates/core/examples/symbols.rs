//! Torus symbols: evaluation, the bracket with |ξ|²/2 and averages along a direction.

use num_complex::Complex64;
use wignerlab::exact::{QuadraticSurd, SurdVector};
use wignerlab::symbols::{TorusSymbol, XiProfile};

fn main() -> wignerlab::Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let a = TorusSymbol::new(2)?
        .with_term([0, 0], XiProfile::gaussian(vec![1.0, 1.4], 0.5, one)?)?
        .with_real_pair([1, -1], XiProfile::gaussian(vec![1.0, 1.4], 0.5, one * 0.4)?)?
        .with_real_pair([0, 1], XiProfile::bump(vec![1.0, 1.4], 0.8, one * 0.3)?)?;
    println!("terms {}  real {}  sup ≤ {:.4}", a.terms().len(), a.is_real(), a.sup_bound());
    println!("a(0.3, 1.1; 1, √2) = {:.6}", a.evaluate(&[0.3, 1.1], &[1.0, 2f64.sqrt()]));

    let b = a.poisson_bracket_with_p();
    println!("{{a, |ξ|²/2}} at the same point = {:.6}", b.evaluate(&[0.3, 1.1], &[1.0, 2f64.sqrt()]));

    let resonant = SurdVector::from_integers(&[1, 1])?;
    let dense = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2)?])?;
    for (name, dir) in [("(1, 1)", &resonant), ("(1, √2)", &dense)] {
        let avg = a.average_along(dir)?;
        println!("average along {name}: {} terms survive", avg.terms().len());
    }
    Ok(())
}
