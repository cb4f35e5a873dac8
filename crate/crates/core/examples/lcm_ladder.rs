//! The LCM ladder for θ0 = (1, √2): q_n, λ_n, h_n and the exact shifts λ_n k_n.

use wignerlab::exact::{QuadraticSurd, SurdVector};
use wignerlab::families::{LcmLadder, RationalApproxStream};

fn main() -> wignerlab::Result<()> {
    let theta = SurdVector::new(vec![QuadraticSurd::integer(1), QuadraticSurd::sqrt(2)?])?;
    let ladder = LcmLadder::new(RationalApproxStream::new(theta)?, 10)?;
    println!("{:>2} {:>10} {:>22} {:>12}  λ_n k_n", "n", "q_n", "λ_n", "h_n");
    for s in ladder.steps() {
        println!("{:>2} {:>10} {:>22} {:>12.4e}  {}", s.n, s.q, s.lambda, s.h, s.lambda_k);
    }
    if ladder.is_capped() {
        println!("ladder stops at n = {}: λ² would leave the 64-bit lattice", ladder.depth());
    }
    Ok(())
}
